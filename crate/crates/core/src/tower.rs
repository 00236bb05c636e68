//! Tower words W_n, expected-occurrence position sets E_{m,n}, and the
//! spacer-behavior trichotomy.
//!
//! W_0 = 0^{h0} and W_{n+1} = W_n 1^{a_1} W_n 1^{a_2} ... 1^{a_{q-1}} W_n per
//! the stage-n rule, so symbol 0 marks levels sitting inside the stage-0
//! tower and symbol 1 marks spacers. E_{m,n} collects the start positions of
//! the aligned (expected) copies of W_n inside W_m; every 0 of W_m belongs to
//! exactly one expected copy.

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::schedule::CuttingSchedule;
use crate::word::{max_one_run, minimal_period, Word};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerWord {
    pub stage: usize,
    pub word: Word,
}

/// Builds W_0 .. W_max as raw symbol vectors, one expansion per stage.
pub(crate) fn raw_words_up_to(
    schedule: &CuttingSchedule,
    max_stage: usize,
    budget: &Budget,
) -> Result<Vec<Vec<u8>>> {
    let h_max = schedule.height(max_stage)?;
    budget.ensure_word(h_max, "tower word")?;

    let mut words = Vec::with_capacity(max_stage + 1);
    words.push(vec![0u8; schedule.h0() as usize]);
    for s in 0..max_stage {
        let rule = schedule.stage_rule(s)?;
        let h_next = budget.ensure_word(schedule.height(s + 1)?, "tower word")?;
        let mut next = Vec::with_capacity(h_next);
        for c in 0..rule.q as usize {
            next.extend_from_slice(&words[s]);
            if c + 1 < rule.q as usize {
                next.extend(std::iter::repeat_n(1u8, rule.spacers[c] as usize));
            }
        }
        debug_assert_eq!(next.len(), h_next);
        words.push(next);
    }
    Ok(words)
}

/// The stage-n tower word W_n.
pub fn word(schedule: &CuttingSchedule, n: usize, budget: &Budget) -> Result<TowerWord> {
    let bits = raw_words_up_to(schedule, n, budget)?
        .pop()
        .expect("words_up_to returns n + 1 words");
    Ok(TowerWord {
        stage: n,
        word: Word::from_bits(bits),
    })
}

/// The first `length` symbols of W_infinity, i.e. of the first W_n at least
/// that long.
pub fn infinite_word_prefix(
    schedule: &CuttingSchedule,
    length: u64,
    budget: &Budget,
) -> Result<Word> {
    if length == 0 {
        return Err(Error::InvalidArgument("prefix length must be positive".into()));
    }
    let len = budget.ensure_word(length, "prefix")?;
    let mut n = 0;
    while schedule.height(n)? < length {
        n += 1;
    }
    let tw = word(schedule, n, budget)?;
    Ok(Word::from_bits(tw.word.bits()[..len].to_vec()))
}

/// Start positions of the expected occurrences of W_n inside W_m.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpectedSet {
    pub upper: usize,
    pub lower: usize,
    pub positions: Vec<u64>,
}

/// E_{m,n} via the compositional identity
/// E_{m,n} = { a + b : a in E_{m,n+1}, b in E_{n+1,n} }.
pub fn expected_positions(
    schedule: &CuttingSchedule,
    m: usize,
    n: usize,
    budget: &Budget,
) -> Result<ExpectedSet> {
    if m < n {
        return Err(Error::InvalidArgument(format!(
            "expected_positions needs m >= n, got m = {m}, n = {n}"
        )));
    }
    budget.ensure_word(schedule.height(m)?, "expected-set span")?;

    let mut positions = vec![0u64];
    for s in (n..m).rev() {
        let offsets = schedule.copy_offsets(s)?;
        let mut next = Vec::with_capacity(positions.len() * offsets.len());
        for &a in &positions {
            for &b in &offsets {
                next.push(a + b);
            }
        }
        positions = next;
    }
    debug_assert!(positions.windows(2).all(|w| w[0] < w[1]));
    Ok(ExpectedSet {
        upper: m,
        lower: n,
        positions,
    })
}

/// Two distinct 1-gap lengths between consecutive expected occurrences of
/// W_n in W_k: evidence that the representation is not repeating at level n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GapWitness {
    pub n: usize,
    pub k: usize,
    pub r: u64,
    pub r_prime: u64,
}

/// Smallest k <= max_stage whose consecutive expected W_n occurrences in W_k
/// are separated by at least two distinct 1-run lengths.
pub fn nonconstant_gap_witness(
    schedule: &CuttingSchedule,
    n: usize,
    max_stage: usize,
    budget: &Budget,
) -> Result<Option<GapWitness>> {
    let h_n = schedule.height(n)?;
    for k in (n + 1)..=max_stage {
        let positions = expected_positions(schedule, k, n, budget)?.positions;
        let mut first_gap: Option<u64> = None;
        for pair in positions.windows(2) {
            let gap = pair[1] - pair[0] - h_n;
            match first_gap {
                None => first_gap = Some(gap),
                Some(r) if r != gap => {
                    return Ok(Some(GapWitness {
                        n,
                        k,
                        r,
                        r_prime: gap,
                    }))
                }
                Some(_) => {}
            }
        }
    }
    Ok(None)
}

/// Depth-qualified spacer-behavior verdict. Evidence at the checked depth,
/// never a proof about the full infinite word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SpacerClassification {
    /// No non-constant gap witness up to the checked depth and the minimal
    /// period of the word prefix agrees across the last two stages.
    RepeatingConsistent { period: u64, depth_checked: usize },
    /// A witness exists and the longest 1-run is identical at the last two
    /// stages; `a_max` is that stable run length.
    NonRepeatingBounded { a_max: u64, witness: GapWitness },
    /// Longest 1-runs keep growing; `witness_stages` lists the stages where
    /// the maximum strictly increased.
    NonRepeatingUnbounded {
        witness: GapWitness,
        witness_stages: Vec<usize>,
    },
}

/// Classifies the spacer behavior of the representation up to `max_stage`.
pub fn classify(
    schedule: &CuttingSchedule,
    max_stage: usize,
    budget: &Budget,
) -> Result<SpacerClassification> {
    if max_stage < 1 {
        return Err(Error::InvalidArgument(
            "classification needs max_stage >= 1".into(),
        ));
    }
    let mut witness = None;
    for n in 1..max_stage {
        if let Some(w) = nonconstant_gap_witness(schedule, n, max_stage, budget)? {
            witness = Some(w);
            break;
        }
    }
    let words = raw_words_up_to(schedule, max_stage, budget)?;
    match witness {
        None => Ok(SpacerClassification::RepeatingConsistent {
            period: minimal_period(&words[max_stage]) as u64,
            depth_checked: max_stage,
        }),
        Some(witness) => {
            let runs: Vec<u64> = words.iter().map(|w| max_one_run(w)).collect();
            if runs[max_stage] == runs[max_stage - 1] {
                Ok(SpacerClassification::NonRepeatingBounded {
                    a_max: runs[max_stage],
                    witness,
                })
            } else {
                let witness_stages = (1..=max_stage)
                    .filter(|&s| runs[s] > runs[s - 1])
                    .collect();
                Ok(SpacerClassification::NonRepeatingUnbounded {
                    witness,
                    witness_stages,
                })
            }
        }
    }
}

impl SpacerClassification {
    pub fn is_repeating(&self) -> bool {
        matches!(self, SpacerClassification::RepeatingConsistent { .. })
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, SpacerClassification::NonRepeatingUnbounded { .. })
    }
}
