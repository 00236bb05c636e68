//! Occurrence search and expected-occurrence recognition.
//!
//! An occurrence of W_n in W_m is expected when it starts at a position of
//! E_{m,n}; other occurrences overlap exactly two expected copies. Knowing a
//! long enough context window starting at an expected occurrence pins down
//! expectedness everywhere: with k a stage whose expected W_n occurrences in
//! W_k have non-constant 1-gaps, a window of length 2 h_k + h_n suffices.
//! `minimal_context` sharpens that bound by brute force, `TemplateSet` turns
//! it into a usable classifier, and `lemma_gap_check` exhaustively verifies
//! the gap-matching identity (overlapping occurrence trains carry the same
//! 1-gap as the expected train they straddle).

use std::collections::HashSet;

use serde::Serialize;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::schedule::CuttingSchedule;
use crate::tower::{expected_positions, nonconstant_gap_witness, raw_words_up_to, GapWitness};
use crate::word::Word;

/// All start positions of `needle` in `haystack`, overlapping included.
pub fn occurrences(haystack: &[u8], needle: &[u8]) -> Vec<usize> {
    if needle.is_empty() || needle.len() > haystack.len() {
        return Vec::new();
    }
    haystack
        .windows(needle.len())
        .enumerate()
        .filter_map(|(i, w)| (w == needle).then_some(i))
        .collect()
}

/// Occurrences of W_n in W_m split into expected and unexpected starts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OccurrenceReport {
    pub upper: usize,
    pub lower: usize,
    pub all: Vec<u64>,
    pub expected: Vec<u64>,
    pub unexpected: Vec<u64>,
}

pub fn unexpected_occurrences(
    schedule: &CuttingSchedule,
    m: usize,
    n: usize,
    budget: &Budget,
) -> Result<OccurrenceReport> {
    if m <= n {
        return Err(Error::InvalidArgument(format!(
            "unexpected_occurrences needs m > n, got m = {m}, n = {n}"
        )));
    }
    let words = raw_words_up_to(schedule, m, budget)?;
    let all: Vec<u64> = occurrences(&words[m], &words[n])
        .into_iter()
        .map(|p| p as u64)
        .collect();
    let expected = expected_positions(schedule, m, n, budget)?.positions;
    debug_assert!(expected.iter().all(|e| all.binary_search(e).is_ok()));
    let expected_set: HashSet<u64> = expected.iter().copied().collect();
    let unexpected = all
        .iter()
        .copied()
        .filter(|p| !expected_set.contains(p))
        .collect();
    Ok(OccurrenceReport {
        upper: m,
        lower: n,
        all,
        expected,
        unexpected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContextBoundKind {
    /// l = 2 h_k + h_n with k the witness stage.
    Analytic,
    /// Smallest context length surviving an exhaustive scan.
    BruteMinimal,
}

/// A context length sufficient to recognize expected W_n occurrences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ContextBound {
    pub n: usize,
    pub l: u64,
    pub witness_stage: usize,
    pub kind: ContextBoundKind,
}

/// The closed-form bound l = 2 h_k + h_n, with k the smallest stage showing
/// non-constant gaps for W_n.
pub fn context_bound(
    schedule: &CuttingSchedule,
    n: usize,
    max_stage: usize,
    budget: &Budget,
) -> Result<ContextBound> {
    let witness = nonconstant_gap_witness(schedule, n, max_stage, budget)?
        .ok_or(Error::NoWitness { n, max_stage })?;
    let h_k = schedule.height(witness.k)?;
    let h_n = schedule.height(n)?;
    let l = h_k
        .checked_mul(2)
        .and_then(|x| x.checked_add(h_n))
        .ok_or(Error::Overflow { stage: witness.k })?;
    Ok(ContextBound {
        n,
        l,
        witness_stage: witness.k,
        kind: ContextBoundKind::Analytic,
    })
}

struct ContextScan {
    words: Vec<Vec<u8>>,
    expected: Vec<Vec<u64>>,
    h_n: usize,
    lower: usize,
    upper: usize,
}

impl ContextScan {
    fn new(
        schedule: &CuttingSchedule,
        n: usize,
        max_stage: usize,
        budget: &Budget,
    ) -> Result<Self> {
        let words = raw_words_up_to(schedule, max_stage, budget)?;
        let mut expected = Vec::with_capacity(max_stage + 1);
        for m in 0..=max_stage {
            expected.push(if m >= n {
                expected_positions(schedule, m, n, budget)?.positions
            } else {
                Vec::new()
            });
        }
        Ok(ContextScan {
            words,
            expected,
            h_n: schedule.height(n)? as usize,
            lower: n,
            upper: max_stage,
        })
    }

    /// Distinct context windows of length l starting at expected positions
    /// of stage m, paired with m for the occurrence check.
    fn extractions(&self, l: usize) -> Vec<(usize, &[u8])> {
        let mut out = Vec::new();
        for m in self.lower..=self.upper {
            let w = &self.words[m];
            let mut seen: HashSet<&[u8]> = HashSet::new();
            for &e in &self.expected[m] {
                let e = e as usize;
                if e + l <= w.len() && seen.insert(&w[e..e + l]) {
                    out.push((m, &w[e..e + l]));
                }
            }
        }
        out
    }

    fn window_ok(&self, m: usize, s: &[u8]) -> bool {
        let expected = &self.expected[m];
        occurrences(&self.words[m], s)
            .into_iter()
            .all(|p| expected.binary_search(&(p as u64)).is_ok())
    }
}

/// Smallest l such that, for every m <= max_stage, every length-l window of
/// W_m starting at an expected W_n occurrence only ever recurs at expected
/// starts. Exhaustive, so the scan is its own oracle.
pub fn minimal_context(
    schedule: &CuttingSchedule,
    n: usize,
    max_stage: usize,
    budget: &Budget,
) -> Result<ContextBound> {
    minimal_context_impl(schedule, n, max_stage, budget, true)
}

/// Sequential variant of [`minimal_context`]; same result.
pub fn minimal_context_seq(
    schedule: &CuttingSchedule,
    n: usize,
    max_stage: usize,
    budget: &Budget,
) -> Result<ContextBound> {
    minimal_context_impl(schedule, n, max_stage, budget, false)
}

fn minimal_context_impl(
    schedule: &CuttingSchedule,
    n: usize,
    max_stage: usize,
    budget: &Budget,
    parallel: bool,
) -> Result<ContextBound> {
    if max_stage <= n {
        return Err(Error::InvalidArgument(format!(
            "minimal_context needs max_stage > n, got {max_stage} <= {n}"
        )));
    }
    let scan = ContextScan::new(schedule, n, max_stage, budget)?;
    let h_max = scan.words[max_stage].len();
    for l in scan.h_n..=h_max {
        let extractions = scan.extractions(l);
        let ok = if parallel {
            check_extractions_par(&scan, &extractions)
        } else {
            extractions.iter().all(|&(m, s)| scan.window_ok(m, s))
        };
        if ok {
            return Ok(ContextBound {
                n,
                l: l as u64,
                witness_stage: max_stage,
                kind: ContextBoundKind::BruteMinimal,
            });
        }
    }
    unreachable!("l = h_max admits only the full word as a window");
}

#[cfg(feature = "parallel")]
fn check_extractions_par(scan: &ContextScan, extractions: &[(usize, &[u8])]) -> bool {
    extractions.par_iter().all(|&(m, s)| scan.window_ok(m, s))
}

#[cfg(not(feature = "parallel"))]
fn check_extractions_par(scan: &ContextScan, extractions: &[(usize, &[u8])]) -> bool {
    extractions.iter().all(|&(m, s)| scan.window_ok(m, s))
}

/// Context windows of length l extracted at the expected W_n starts of a
/// template stage. A position recognizes as expected exactly when its l-window
/// matches a template.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TemplateSet {
    pub n: usize,
    pub stage: usize,
    pub context_len: u64,
    pub witness: GapWitness,
    pub templates: std::collections::BTreeSet<Word>,
    /// Whether the same extraction at stage + 1 yields the identical set.
    pub stable: bool,
}

fn extract_templates(
    schedule: &CuttingSchedule,
    n: usize,
    stage: usize,
    l: usize,
    budget: &Budget,
) -> Result<std::collections::BTreeSet<Word>> {
    let w = raw_words_up_to(schedule, stage, budget)?.pop().unwrap();
    let positions = expected_positions(schedule, stage, n, budget)?.positions;
    let mut set = std::collections::BTreeSet::new();
    for &e in &positions {
        let e = e as usize;
        if e + l <= w.len() {
            set.insert(Word::from_bits(w[e..e + l].to_vec()));
        }
    }
    Ok(set)
}

/// Builds the template set at a caller-chosen stage, recording whether the
/// set is already stable against the next stage.
pub fn template_set(
    schedule: &CuttingSchedule,
    n: usize,
    stage: usize,
    budget: &Budget,
) -> Result<TemplateSet> {
    let bound = context_bound(schedule, n, stage, budget)?;
    let witness = nonconstant_gap_witness(schedule, n, stage, budget)?
        .expect("context_bound succeeded, witness exists");
    let l = budget.ensure_word(bound.l, "recognition context")?;
    let templates = extract_templates(schedule, n, stage, l, budget)?;
    let next = extract_templates(schedule, n, stage + 1, l, budget)?;
    let stable = !templates.is_empty() && templates == next;
    Ok(TemplateSet {
        n,
        stage,
        context_len: bound.l,
        witness,
        templates,
        stable,
    })
}

/// Scans stages upward until the template set stops changing.
pub fn stabilized_template_set(
    schedule: &CuttingSchedule,
    n: usize,
    max_stage: usize,
    budget: &Budget,
) -> Result<TemplateSet> {
    let mut saw_witness = false;
    for stage in (n + 1)..=max_stage {
        match template_set(schedule, n, stage, budget) {
            Ok(ts) => {
                saw_witness = true;
                if ts.stable {
                    return Ok(ts);
                }
            }
            Err(Error::NoWitness { .. }) => continue,
            Err(other) => return Err(other),
        }
    }
    if saw_witness {
        Err(Error::NoStabilization {
            max_len: 0,
            stage_limit: max_stage,
        })
    } else {
        Err(Error::NoWitness { n, max_stage })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecognitionVerdict {
    Expected,
    Unexpected,
    InsufficientContext,
}

/// Classifies the W_n occurrence starting at `p` in `w`.
///
/// `w` must be a language word containing an occurrence of W_n at `p`;
/// the verdict is `InsufficientContext` when `w` ends before the context
/// window does.
pub fn is_expected_start(
    schedule: &CuttingSchedule,
    w: &[u8],
    p: usize,
    templates: &TemplateSet,
    budget: &Budget,
) -> Result<RecognitionVerdict> {
    let w_n = raw_words_up_to(schedule, templates.n, budget)?.pop().unwrap();
    if p + w_n.len() > w.len() || w[p..p + w_n.len()] != w_n[..] {
        return Err(Error::InvalidArgument(format!(
            "no stage-{} occurrence at position {p}",
            templates.n
        )));
    }
    let l = templates.context_len as usize;
    if p + l > w.len() {
        return Ok(RecognitionVerdict::InsufficientContext);
    }
    Ok(if templates.templates.contains(&w[p..p + l]) {
        RecognitionVerdict::Expected
    } else {
        RecognitionVerdict::Unexpected
    })
}

/// One gap-matching failure: an overlapping occurrence whose trailing 1-run
/// before the next occurrence differs from the expected train's gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LemmaViolation {
    pub expected_start: u64,
    pub expected_gap: u64,
    pub overlap_start: u64,
    pub overlap_gap: u64,
}

/// Exhaustive scan report for the gap-matching identity on (W_m, W_n).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub upper: usize,
    pub lower: usize,
    /// Pairs (expected start with a successor, overlapping occurrence).
    pub configurations: u64,
    /// Configurations whose overlapping occurrence is itself followed by a
    /// 1-run and another occurrence, so the gap identity applies.
    pub checked: u64,
    pub violations: Vec<LemmaViolation>,
}

pub fn lemma_gap_check(
    schedule: &CuttingSchedule,
    m: usize,
    n: usize,
    budget: &Budget,
) -> Result<LemmaReport> {
    lemma_gap_check_impl(schedule, m, n, budget, true)
}

/// Sequential variant of [`lemma_gap_check`]; same result.
pub fn lemma_gap_check_seq(
    schedule: &CuttingSchedule,
    m: usize,
    n: usize,
    budget: &Budget,
) -> Result<LemmaReport> {
    lemma_gap_check_impl(schedule, m, n, budget, false)
}

struct LemmaScan {
    w_m: Vec<u8>,
    h_n: u64,
    expected: Vec<u64>,
    occ: Vec<u64>,
}

impl LemmaScan {
    /// Configurations anchored at expected index `idx`.
    fn scan_anchor(&self, idx: usize) -> (u64, u64, Vec<LemmaViolation>) {
        let e = self.expected[idx];
        let r = self.expected[idx + 1] - e - self.h_n;
        let lo = self.occ.partition_point(|&p| p <= e);
        let hi = self.occ.partition_point(|&p| p < e + self.h_n);
        let mut configurations = 0;
        let mut checked = 0;
        let mut violations = Vec::new();
        for &j in &self.occ[lo..hi] {
            configurations += 1;
            let mut t = j + self.h_n;
            while (t as usize) < self.w_m.len() && self.w_m[t as usize] == 1 {
                t += 1;
            }
            let s = t - (j + self.h_n);
            if t + self.h_n <= self.w_m.len() as u64 && self.occ.binary_search(&t).is_ok() {
                checked += 1;
                if s != r {
                    violations.push(LemmaViolation {
                        expected_start: e,
                        expected_gap: r,
                        overlap_start: j,
                        overlap_gap: s,
                    });
                }
            }
        }
        (configurations, checked, violations)
    }
}

fn lemma_gap_check_impl(
    schedule: &CuttingSchedule,
    m: usize,
    n: usize,
    budget: &Budget,
    parallel: bool,
) -> Result<LemmaReport> {
    if m <= n {
        return Err(Error::InvalidArgument(format!(
            "lemma_gap_check needs m > n, got m = {m}, n = {n}"
        )));
    }
    let words = raw_words_up_to(schedule, m, budget)?;
    let scan = LemmaScan {
        occ: occurrences(&words[m], &words[n])
            .into_iter()
            .map(|p| p as u64)
            .collect(),
        w_m: words.into_iter().nth(m).unwrap(),
        h_n: schedule.height(n)?,
        expected: expected_positions(schedule, m, n, budget)?.positions,
    };
    let anchors = scan.expected.len().saturating_sub(1);
    let results = run_anchors(&scan, anchors, parallel);
    let mut report = LemmaReport {
        upper: m,
        lower: n,
        configurations: 0,
        checked: 0,
        violations: Vec::new(),
    };
    for (configurations, checked, violations) in results {
        report.configurations += configurations;
        report.checked += checked;
        report.violations.extend(violations);
    }
    Ok(report)
}

#[cfg(feature = "parallel")]
fn run_anchors(
    scan: &LemmaScan,
    anchors: usize,
    parallel: bool,
) -> Vec<(u64, u64, Vec<LemmaViolation>)> {
    if parallel {
        (0..anchors)
            .into_par_iter()
            .map(|idx| scan.scan_anchor(idx))
            .collect()
    } else {
        (0..anchors).map(|idx| scan.scan_anchor(idx)).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn run_anchors(
    scan: &LemmaScan,
    anchors: usize,
    _parallel: bool,
) -> Vec<(u64, u64, Vec<LemmaViolation>)> {
    (0..anchors).map(|idx| scan.scan_anchor(idx)).collect()
}
