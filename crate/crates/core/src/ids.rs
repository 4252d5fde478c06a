//! Dense identifiers and the string registries behind them.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Day index, 1-based. Day 0 is reserved for "before the first observation".
pub type Day = u32;

macro_rules! dense_id {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

dense_id!(
    /// Dense index of a blog in the blog registry.
    BlogId
);
dense_id!(
    /// Dense index of a term in the term registry.
    TermId
);
dense_id!(
    /// Dense index of a URL in the URL registry.
    UrlId
);

/// Injective mapping between opaque string identifiers and dense indices.
///
/// Indices are contiguous from 0 in registration order, so registry contents
/// are reproducible from the event stream alone.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Registry {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuild a registry from an ordered name list (index-file loading).
    pub fn from_names(names: Vec<String>) -> crate::Result<Self> {
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i as u32).is_some() {
                return Err(crate::Error::MalformedIndex(format!(
                    "duplicate registry entry `{name}`"
                )));
            }
        }
        Ok(Self { names, index })
    }

    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len() as u32;
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), i);
        i
    }

    pub fn lookup(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: u32) -> &str {
        &self.names[i as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}
