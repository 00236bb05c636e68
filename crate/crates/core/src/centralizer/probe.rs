//! The exhaustive centralizer probe: enumerate all language-preserving codes
//! of a radius, keep the invertible ones, and match each against the shift
//! powers. On a non-repeating schedule every invertible survivor is expected
//! to be a shift power; anything else is flagged EXOTIC.

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::recognizer::stabilized_template_set;
use crate::schedule::CuttingSchedule;
use crate::tower::classify;

use super::code::{
    enumerate_codes, invertible_codes, shift_power_code, table_space, BlockCode,
};
use super::language::{language, LanguageTable, CLASSIFY_EVIDENCE_DEPTH};
use super::phi::{
    phi_map_normalized, psi_conjugation_check, recover_offset, window_stage_for, OriginWord,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeScope {
    /// Non-repeating evidence found; the triviality prediction applies.
    InTheoremScope,
    /// Schedule classified repeating-consistent; the probe still runs but
    /// exotic survivors are expected (and demonstrate why the hypothesis
    /// matters).
    OutOfTheoremScope,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeSurvivor {
    /// Output column of the code table, in sorted-input order.
    pub outputs: String,
    pub inverse_radius: usize,
    pub matched_power: Option<i64>,
    pub exotic: bool,
    /// Offset recovered by the return-matching pipeline, when it applies.
    pub recovered_offset: Option<i64>,
    pub psi_violations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub schedule_id: String,
    pub radius: usize,
    pub test_len: usize,
    pub inverse_radius: usize,
    pub scope: ProbeScope,
    pub stabilization_stage: usize,
    pub window_factors: usize,
    pub test_factors: usize,
    pub table_space: u64,
    pub language_preserving: usize,
    pub invertible: usize,
    pub survivors: Vec<ProbeSurvivor>,
    pub exotic_count: usize,
}

/// Default test length: long enough for two full recognition windows plus
/// the code trim, and for the counting argument behind surjectivity.
pub fn default_test_len(
    schedule: &CuttingSchedule,
    radius: usize,
    budget: &Budget,
) -> Result<usize> {
    let h2 = schedule.height(2)? as usize;
    let by_height = 3 * h2;
    match crate::recognizer::context_bound(schedule, 1, CLASSIFY_EVIDENCE_DEPTH, budget) {
        Ok(bound) => Ok(by_height.max(2 * radius + 2 * bound.l as usize)),
        Err(Error::NoWitness { .. }) => Ok(by_height.max(4 * radius + 2)),
        Err(other) => Err(other),
    }
}

pub fn centralizer_probe(
    schedule: &CuttingSchedule,
    schedule_id: &str,
    radius: usize,
    test_len: usize,
    inverse_radius: usize,
    budget: &Budget,
) -> Result<ProbeReport> {
    if inverse_radius < radius {
        return Err(Error::InvalidArgument(format!(
            "inverse radius {inverse_radius} below code radius {radius}"
        )));
    }
    let h1 = schedule.height(1)? as usize;
    if test_len < 2 * radius + h1 {
        return Err(Error::InvalidArgument(format!(
            "test length {test_len} below 2 R + h_1 = {}",
            2 * radius + h1
        )));
    }

    let verdict = classify(schedule, CLASSIFY_EVIDENCE_DEPTH, budget)?;
    let scope = if verdict.is_repeating() {
        ProbeScope::OutOfTheoremScope
    } else {
        ProbeScope::InTheoremScope
    };

    let table_len = test_len.max(2 * radius + 2 * inverse_radius + 1);
    let lang = language(schedule, table_len, true, budget)?;
    let codes = enumerate_codes(&lang, radius, test_len, budget)?;

    let shift_powers: Vec<(i64, BlockCode)> = ordered_powers(radius)
        .map(|k| Ok((k, shift_power_code(k, radius, &lang)?)))
        .collect::<Result<_>>()?;

    // The matching pipeline needs a recognizer; only available with a witness.
    let pipeline = match stabilized_template_set(schedule, 1, 10, budget) {
        Ok(templates) => {
            let stage =
                window_stage_for(schedule, templates.context_len, radius, budget)?;
            Some((templates, OriginWord::tower_window(schedule, stage, budget)?))
        }
        Err(Error::NoWitness { .. }) | Err(Error::NoStabilization { .. }) => None,
        Err(other) => return Err(other),
    };

    let mut survivors = Vec::new();
    for (code, inverse) in invertible_codes(&codes, &lang, inverse_radius)? {
        let matched_power = shift_powers
            .iter()
            .find(|(_, sigma)| *sigma == code)
            .map(|(k, _)| *k);
        let (recovered_offset, psi_violations) = match &pipeline {
            Some((templates, window)) => {
                match phi_map_normalized(schedule, window, &code, templates, budget) {
                    Ok(matching) => (
                        recover_offset(&matching).ok(),
                        Some(psi_conjugation_check(&matching)?.len()),
                    ),
                    Err(Error::NormalizationRequired { .. })
                    | Err(Error::InsufficientContext(_)) => (None, None),
                    Err(other) => return Err(other),
                }
            }
            None => (None, None),
        };
        survivors.push(ProbeSurvivor {
            outputs: code
                .outputs()
                .iter()
                .map(|&b| if b == 0 { '0' } else { '1' })
                .collect(),
            inverse_radius: inverse.radius(),
            matched_power,
            exotic: matched_power.is_none(),
            recovered_offset,
            psi_violations,
        });
    }
    survivors.sort_by(|a, c| a.outputs.cmp(&c.outputs));

    let exotic_count = survivors.iter().filter(|s| s.exotic).count();
    Ok(ProbeReport {
        schedule_id: schedule_id.to_string(),
        radius,
        test_len,
        inverse_radius,
        scope,
        stabilization_stage: lang.stabilization_stage,
        window_factors: lang.factor_count(2 * radius + 1),
        test_factors: lang.factor_count(test_len),
        table_space: table_space(&lang, radius),
        language_preserving: codes.len(),
        invertible: survivors.len(),
        survivors,
        exotic_count,
    })
}

/// 0, 1, -1, 2, -2, ...: the preferred order for naming a matched power when
/// several shift tables coincide (repeating languages collapse them).
fn ordered_powers(radius: usize) -> impl Iterator<Item = i64> {
    let r = radius as i64;
    std::iter::once(0).chain((1..=r).flat_map(|k| [k, -k]))
}

/// Convenience wrapper re-exported for tests and the command line.
pub fn language_for_probe(
    schedule: &CuttingSchedule,
    max_len: usize,
    allow_repeating: bool,
    budget: &Budget,
) -> Result<LanguageTable> {
    language(schedule, max_len, allow_repeating, budget)
}
