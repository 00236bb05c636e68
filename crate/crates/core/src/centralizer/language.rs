//! The finite language of the subshift: all factors of the limit word up to
//! a chosen length, certified by stabilization across two consecutive stages.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::schedule::CuttingSchedule;
use crate::tower::{classify, raw_words_up_to};
use crate::word::Word;

/// Stage ceiling for the stabilization scan; words normally blow the word
/// budget long before this.
const STAGE_LIMIT: usize = 64;

/// Depth at which the repeating/non-repeating evidence is gathered.
pub const CLASSIFY_EVIDENCE_DEPTH: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LanguageTable {
    pub max_len: usize,
    /// First stage M whose factor sets agree with stage M + 1 for every
    /// length up to `max_len`.
    pub stabilization_stage: usize,
    sets: Vec<BTreeSet<Word>>,
}

impl LanguageTable {
    pub fn factors(&self, len: usize) -> &BTreeSet<Word> {
        &self.sets[len]
    }

    pub fn factor_count(&self, len: usize) -> usize {
        self.sets[len].len()
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        w.len() <= self.max_len && self.sets[w.len()].contains(w)
    }

    /// Every factor of a member is a member.
    pub fn is_factor_closed(&self) -> bool {
        for len in 2..=self.max_len {
            for f in &self.sets[len] {
                let bits = f.bits();
                if !self.sets[len - 1].contains(&bits[..len - 1])
                    || !self.sets[len - 1].contains(&bits[1..])
                {
                    return false;
                }
            }
        }
        true
    }

    /// Every member shorter than `max_len` extends on both sides in the table.
    pub fn is_biextendable(&self) -> bool {
        for len in 1..self.max_len {
            for f in &self.sets[len] {
                let bits = f.bits();
                let extends = |candidate: Vec<u8>| self.sets[len + 1].contains(&candidate[..]);
                let left = [0u8, 1].iter().any(|&b| {
                    let mut v = Vec::with_capacity(len + 1);
                    v.push(b);
                    v.extend_from_slice(bits);
                    extends(v)
                });
                let right = [0u8, 1].iter().any(|&b| {
                    let mut v = bits.to_vec();
                    v.push(b);
                    extends(v)
                });
                if !left || !right {
                    return false;
                }
            }
        }
        true
    }
}

fn factor_sets(word: &[u8], max_len: usize) -> Vec<BTreeSet<Word>> {
    let mut sets = vec![BTreeSet::new(); max_len + 1];
    for (len, set) in sets.iter_mut().enumerate().take(max_len.min(word.len()) + 1).skip(1) {
        for w in word.windows(len) {
            set.insert(Word::from_bits(w.to_vec()));
        }
    }
    sets
}

/// Factors of length <= `max_len`, extracted from the first stage word whose
/// factor sets agree with the next stage's.
///
/// Repeating-consistent schedules are refused unless `allow_repeating` is
/// set: the centralizer machinery downstream assumes a non-repeating word.
pub fn language(
    schedule: &CuttingSchedule,
    max_len: usize,
    allow_repeating: bool,
    budget: &Budget,
) -> Result<LanguageTable> {
    if max_len < 1 {
        return Err(Error::InvalidArgument("max_len must be positive".into()));
    }
    if !allow_repeating {
        let verdict = classify(schedule, CLASSIFY_EVIDENCE_DEPTH, budget)?;
        if verdict.is_repeating() {
            return Err(Error::RepeatingSchedule {
                depth_checked: CLASSIFY_EVIDENCE_DEPTH,
            });
        }
    }

    let mut prev: Option<Vec<BTreeSet<Word>>> = None;
    for stage in 1..=STAGE_LIMIT {
        let word = raw_words_up_to(schedule, stage, budget)?.pop().unwrap();
        let sets = factor_sets(&word, max_len);
        if let Some(prev_sets) = prev {
            if prev_sets == sets {
                return Ok(LanguageTable {
                    max_len,
                    stabilization_stage: stage - 1,
                    sets,
                });
            }
        }
        prev = Some(sets);
    }
    Err(Error::NoStabilization {
        max_len,
        stage_limit: STAGE_LIMIT,
    })
}
