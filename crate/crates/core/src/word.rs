use std::borrow::Borrow;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite word over the alphabet {0, 1}, stored one symbol per byte.
///
/// Serialized as the string of its symbols ("0010"), which keeps schedule
/// files and JSON reports readable.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn from_bits(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Word(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Word(vec![0; len])
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::InvalidArgument(format!(
                    "words are over {{0,1}}, found '{other}'"
                ))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }
}

impl Borrow<[u8]> for Word {
    fn borrow(&self) -> &[u8] {
        &self.0
    }
}

impl AsRef<[u8]> for Word {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl From<&[u8]> for Word {
    fn from(bits: &[u8]) -> Self {
        Word::from_bits(bits.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{}", if b == 0 { '0' } else { '1' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Word::parse(&text).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Smallest (weak) period of a word: the least p >= 1 with w[i] == w[i+p]
/// wherever both sides are defined. Computed from the KMP border array.
pub fn minimal_period(w: &[u8]) -> usize {
    if w.is_empty() {
        return 0;
    }
    let n = w.len();
    let mut border = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && w[i] != w[k] {
            k = border[k - 1];
        }
        if w[i] == w[k] {
            k += 1;
        }
        border[i] = k;
    }
    n - border[n - 1]
}

/// Length of the longest run of 1s in a word.
pub fn max_one_run(w: &[u8]) -> u64 {
    let mut best = 0u64;
    let mut cur = 0u64;
    for &b in w {
        if b == 1 {
            cur += 1;
            best = best.max(cur);
        } else {
            cur = 0;
        }
    }
    best
}
