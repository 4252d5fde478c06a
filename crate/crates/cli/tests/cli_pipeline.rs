//! End-to-end CLI pipeline through a temp directory, plus exit-code and
//! reproducibility contracts.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn cosoc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cosoc"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = cosoc().args(args).output().expect("spawn cosoc");
    assert!(
        out.status.success(),
        "cosoc {:?} failed\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn exit_code(args: &[&str]) -> i32 {
    cosoc()
        .args(args)
        .output()
        .expect("spawn cosoc")
        .status
        .code()
        .unwrap_or(-1)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Pipeline {
    dir: tempfile::TempDir,
    index: PathBuf,
}

fn build_pipeline() -> Pipeline {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("gen.toml");
    std::fs::write(
        &config,
        "n_blogs = 12\ndays = 30\nlatent_dim = 6\nposts_per_day = 0.8\n\
         beta_social = 0.0\nbeta_semantic = 0.0\nrelay_prob = 0.5\nseed = 7\n",
    )
    .unwrap();
    let events = dir.path().join("events.jsonl");
    run_ok(&[
        "synth",
        "--config",
        path_str(&config),
        "--out",
        path_str(&events),
    ]);
    let manifest = dir.path().join("events.jsonl.manifest.json");
    assert!(manifest.exists());

    let index = dir.path().join("corpus.index.json");
    run_ok(&[
        "ingest",
        "--events",
        path_str(&events),
        "--manifest",
        path_str(&manifest),
        "--out",
        path_str(&index),
    ]);
    Pipeline { dir, index }
}

#[test]
fn full_pipeline_produces_all_artifacts() {
    let p = build_pipeline();
    let dir = p.dir.path();
    let index = path_str(&p.index);

    let dist_csv = dir.join("social.dist.csv");
    run_ok(&[
        "distances", "--index", index, "--cutoff", "20", "--kind", "social", "--all", "--out",
        path_str(&dist_csv),
    ]);
    let text = std::fs::read_to_string(&dist_csv).unwrap();
    assert!(text.starts_with("src,dst,distance"));
    assert!(text.lines().count() > 1);

    let det_csv = dir.join("detachment.dist.csv");
    run_ok(&[
        "distances", "--index", index, "--cutoff", "20", "--kind", "detachment", "--all",
        "--out", path_str(&det_csv),
    ]);

    let sem_csv = dir.join("semdist.csv");
    run_ok(&[
        "semdist", "--index", index, "--cutoff", "20", "--all", "--out", path_str(&sem_csv),
    ]);
    let text = std::fs::read_to_string(&sem_csv).unwrap();
    assert!(text.starts_with("i,j,delta"));

    let prop_csv = dir.join("social.prop.csv");
    run_ok(&[
        "propensity", "--index", index, "--kind", "social", "--t0", "5", "--T", "5",
        "--windows", "3", "--max-d", "4", "--out", path_str(&prop_csv),
    ]);
    let summary = dir.join("social.prop.summary.csv");
    assert!(summary.exists());
    let text = std::fs::read_to_string(&summary).unwrap();
    assert!(text.starts_with("bin_lo,bin_hi,mean,normalized_mean,ci95_halfwidth"));

    let twod_csv = dir.join("grid.prop.csv");
    run_ok(&[
        "propensity", "--index", index, "--kind", "2d", "--t0", "5", "--T", "5", "--windows",
        "3", "--max-d", "3", "--delta-bin", "0.2", "--out", path_str(&twod_csv),
    ]);
    let text = std::fs::read_to_string(&twod_csv).unwrap();
    assert!(text.starts_with("d_lo,d_hi,delta_lo,delta_hi,window,raw_f,denominator"));

    let diff_dir = dir.join("diffusion");
    run_ok(&[
        "diffusion", "extract", "--index", index, "--out", path_str(&diff_dir),
    ]);
    assert!(diff_dir.join("subgraphs.jsonl").exists());
    assert!(diff_dir.join("counts.json").exists());
    assert!(diff_dir.join("run.json").exists());

    for (kind, file) in [
        ("sizes", "sizes.csv"),
        ("attention", "attention.csv"),
        ("edgerange", "edgerange.csv"),
    ] {
        let out = dir.join(file);
        run_ok(&[
            "diffusion", "stats", "--index", index, "--kind", kind, "--out", path_str(&out),
        ]);
        assert!(out.exists(), "{kind} output missing");
    }

    let report_out = run_ok(&[
        "report", "--index", index, "--outputs", path_str(dir),
    ]);
    let stdout = String::from_utf8_lossy(&report_out.stdout).to_string();
    assert!(stdout.contains("# Corpus report"));
    assert!(stdout.contains("transmission links"));
    assert!(dir.join("report.md").exists());
    assert!(dir.join("report.json").exists());
    // The report lists the CSVs produced above.
    let report_md = std::fs::read_to_string(dir.join("report.md")).unwrap();
    assert!(report_md.contains("sizes.csv"));
    assert!(report_md.contains("social.prop.csv"));
}

#[test]
fn identical_runs_reproduce_identical_output_digests() {
    let p = build_pipeline();
    let dir = p.dir.path();
    let index = path_str(&p.index);
    let run = |out: &Path| {
        run_ok(&[
            "propensity", "--index", index, "--kind", "semantic", "--t0", "5", "--T", "5",
            "--windows", "3", "--delta-bin", "0.25", "--out", path_str(out),
        ]);
        let manifest: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(format!("{}.run.json", out.display())).unwrap(),
        )
        .unwrap();
        manifest["outputs"]
            .as_object()
            .unwrap()
            .values()
            .map(|v| v.as_str().unwrap().to_owned())
            .collect::<Vec<_>>()
    };
    let first = run(&dir.join("sem1.csv"));
    let second = run(&dir.join("sem2.csv"));
    assert_eq!(first, second, "re-running changed output digests");
}

#[test]
fn exit_codes_flag_validation_and_io_failures() {
    let p = build_pipeline();
    let dir = p.dir.path();
    let index = path_str(&p.index);

    // Missing input file: I/O error.
    assert_eq!(
        exit_code(&[
            "ingest",
            "--events",
            path_str(&dir.join("nope.jsonl")),
            "--manifest",
            path_str(&dir.join("nope.json")),
            "--out",
            path_str(&dir.join("x.json")),
        ]),
        2
    );

    // Malformed record: validation error.
    let bad_events = dir.join("bad.jsonl");
    std::fs::write(&bad_events, "not json at all\n").unwrap();
    let manifest = dir.join("m.json");
    std::fs::write(&manifest, r#"{"days": 10}"#).unwrap();
    assert_eq!(
        exit_code(&[
            "ingest",
            "--events",
            path_str(&bad_events),
            "--manifest",
            path_str(&manifest),
            "--out",
            path_str(&dir.join("x.json")),
        ]),
        1
    );

    // Day outside the declared window: validation error.
    let out_of_window = dir.join("oow.jsonl");
    std::fs::write(&out_of_window, "{\"blog\":\"x\",\"day\":99}\n").unwrap();
    assert_eq!(
        exit_code(&[
            "ingest",
            "--events",
            path_str(&out_of_window),
            "--manifest",
            path_str(&manifest),
            "--out",
            path_str(&dir.join("x.json")),
        ]),
        1
    );

    // Cut-off beyond the horizon: validation error.
    assert_eq!(
        exit_code(&[
            "distances", "--index", index, "--cutoff", "999", "--kind", "social", "--all",
            "--out", path_str(&dir.join("d.csv")),
        ]),
        1
    );

    // Unknown CLI flag: validation error.
    assert_eq!(exit_code(&["distances", "--bogus"]), 1);

    // Help is success.
    assert_eq!(exit_code(&["--help"]), 0);
}

#[test]
fn pairs_files_drive_distance_queries() {
    let p = build_pipeline();
    let dir = p.dir.path();
    let index = path_str(&p.index);
    let pairs = dir.join("pairs.csv");
    std::fs::write(&pairs, "blog-0000,blog-0001\nblog-0001,blog-0000\n").unwrap();
    let out = dir.join("pair-dist.csv");
    run_ok(&[
        "distances", "--index", index, "--cutoff", "25", "--kind", "detachment", "--pairs",
        path_str(&pairs), "--out", path_str(&out),
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 3);
    // Unknown blog in the pairs file is a validation error.
    std::fs::write(&pairs, "blog-0000,who\n").unwrap();
    assert_eq!(
        exit_code(&[
            "distances", "--index", index, "--cutoff", "25", "--kind", "social", "--pairs",
            path_str(&pairs), "--out", path_str(&out),
        ]),
        1
    );
}
