use serde::Serialize;

use crate::error::{Error, Result};

/// Hard size limits for every operation that materializes words or searches.
///
/// Exceeding a budget is always a hard error, never a silent truncation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Budget {
    /// Longest word (in symbols) any operation may materialize.
    pub max_word_symbols: u64,
    /// Node limit for exhaustive code enumeration.
    pub max_search_nodes: u64,
}

pub const DEFAULT_WORD_SYMBOLS: u64 = 10_000_000;
pub const DEFAULT_SEARCH_NODES: u64 = 50_000_000;

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_word_symbols: DEFAULT_WORD_SYMBOLS,
            max_search_nodes: DEFAULT_SEARCH_NODES,
        }
    }
}

impl Budget {
    pub fn with_word_symbols(mut self, max: u64) -> Self {
        self.max_word_symbols = max;
        self
    }

    pub fn with_search_nodes(mut self, max: u64) -> Self {
        self.max_search_nodes = max;
        self
    }

    /// Checks a word-size requirement and converts it to an indexable length.
    pub fn ensure_word(&self, needed: u64, what: &str) -> Result<usize> {
        if needed > self.max_word_symbols {
            return Err(Error::BudgetExceeded {
                what: what.to_string(),
                needed,
                limit: self.max_word_symbols,
            });
        }
        usize::try_from(needed).map_err(|_| Error::BudgetExceeded {
            what: what.to_string(),
            needed,
            limit: usize::MAX as u64,
        })
    }
}
