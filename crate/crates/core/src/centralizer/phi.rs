//! The return-set matching pipeline for a concrete code g.
//!
//! Around a designated origin in a language word x, the stage-1 base visits
//! Z(x) and Z(g(x)) are recovered by expected-occurrence recognition. Each
//! visit i of x whose image symbol is 0 sits inside exactly one stage-1 copy
//! of g(x); matching it to that copy's base gives phi(i) with
//! i - h_1 < phi(i) <= i. When the image symbol is a spacer the code first
//! needs to be pre-composed with a shift (the normalization retry), after
//! which the matched offsets of a genuinely shift-commuting code agree
//! everywhere and recover its power.

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::recognizer::TemplateSet;
use crate::schedule::CuttingSchedule;
use crate::tower::raw_words_up_to;
use crate::word::Word;

use super::code::BlockCode;

/// A language word with a designated origin index; window coordinates are
/// relative to the origin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OriginWord {
    pub word: Word,
    pub origin: usize,
}

impl OriginWord {
    /// The stage-`n` tower word with its origin at the middle.
    pub fn tower_window(
        schedule: &CuttingSchedule,
        stage: usize,
        budget: &Budget,
    ) -> Result<Self> {
        let tw = crate::tower::word(schedule, stage, budget)?;
        let origin = tw.word.len() / 2;
        Ok(OriginWord {
            word: tw.word,
            origin,
        })
    }
}

/// Smallest stage whose tower word comfortably hosts the matching pipeline:
/// two recognition contexts, the code trim, and a few return gaps of slack.
pub fn window_stage_for(
    schedule: &CuttingSchedule,
    context_len: u64,
    radius: usize,
    budget: &Budget,
) -> Result<usize> {
    let h1 = schedule.height(1)?;
    let need = 2 * context_len + 2 * radius as u64 + 8 * h1;
    let mut stage = 2;
    while schedule.height(stage)? < need {
        stage += 1;
    }
    budget.ensure_word(schedule.height(stage)?, "pipeline window")?;
    Ok(stage)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PhiPair {
    pub x: i64,
    pub gx: i64,
    pub offset: u64,
}

/// The matched return sets of x and g(x) over the safe sub-window, with the
/// structural facts the matching is supposed to satisfy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhiMatching {
    /// Shift pre-composed with g before matching succeeded.
    pub pre_shift: u64,
    pub zx: Vec<i64>,
    pub zgx: Vec<i64>,
    pub x_known: (i64, i64),
    pub gx_known: (i64, i64),
    pub pairs: Vec<PhiPair>,
    pub order_preserving: bool,
    pub injective: bool,
    pub surjective_on_safe: bool,
    pub offset_bound_ok: bool,
}

/// Returns of a word relative to its origin, plus the coordinate range over
/// which recognition has full context.
fn recognized_returns(
    word: &[u8],
    origin: i64,
    w1: &[u8],
    templates: &TemplateSet,
) -> (Vec<i64>, (i64, i64)) {
    let l = templates.context_len as usize;
    let mut returns = Vec::new();
    if word.len() >= l {
        for p in 0..=word.len() - l {
            if word[p..p + w1.len()] == *w1 && templates.templates.contains(&word[p..p + l]) {
                returns.push(p as i64 - origin);
            }
        }
    }
    let known = (-origin, word.len() as i64 - l as i64 - origin);
    (returns, known)
}

/// Strict matching: errors with `NormalizationRequired` whenever some return
/// of x lands on a spacer symbol of the (shifted) image.
pub fn phi_map(
    schedule: &CuttingSchedule,
    x: &OriginWord,
    code: &BlockCode,
    templates: &TemplateSet,
    budget: &Budget,
) -> Result<PhiMatching> {
    phi_map_with_shift(schedule, x, code, templates, 0, budget)
}

/// Retries `phi_map` with growing pre-shifts until the matching succeeds.
pub fn phi_map_normalized(
    schedule: &CuttingSchedule,
    x: &OriginWord,
    code: &BlockCode,
    templates: &TemplateSet,
    budget: &Budget,
) -> Result<PhiMatching> {
    let h1 = schedule.height(1)?;
    let mut last = Error::NormalizationRequired { at: 0 };
    for shift in 0..=(code.radius() as u64 + h1) {
        match phi_map_with_shift(schedule, x, code, templates, shift, budget) {
            Ok(matching) => return Ok(matching),
            Err(err @ Error::NormalizationRequired { .. }) => last = err,
            Err(other) => return Err(other),
        }
    }
    Err(last)
}

fn phi_map_with_shift(
    schedule: &CuttingSchedule,
    x: &OriginWord,
    code: &BlockCode,
    templates: &TemplateSet,
    shift: u64,
    budget: &Budget,
) -> Result<PhiMatching> {
    let w1 = raw_words_up_to(schedule, 1, budget)?.pop().unwrap();
    let h1 = w1.len() as i64;
    let l = templates.context_len as usize;
    if x.word.len() < 2 * l + 2 * code.radius() {
        return Err(Error::InsufficientContext(format!(
            "window of length {} is shorter than 2 l + 2 R = {}",
            x.word.len(),
            2 * l + 2 * code.radius()
        )));
    }

    let (zx, x_known) = recognized_returns(x.word.bits(), x.origin as i64, &w1, templates);
    let image = code.apply(x.word.bits())?;
    let image_origin = x.origin as i64 - code.radius() as i64;
    let (zg_raw, g_known_raw) = recognized_returns(&image, image_origin, &w1, templates);

    let s = shift as i64;
    let zgx: Vec<i64> = zg_raw.iter().map(|&z| z - s).collect();
    let gx_known = (g_known_raw.0 - s, g_known_raw.1 - s);

    if !(zx.iter().any(|&i| i < 0) && zx.iter().any(|&i| i > 0)) {
        return Err(Error::InsufficientContext(
            "window has no returns on both sides of the origin".into(),
        ));
    }

    let mut pairs = Vec::new();
    for &i in &zx {
        if i - h1 + 1 < gx_known.0 || i > gx_known.1 {
            continue; // outside the safe sub-window
        }
        // Image symbol at coordinate i, in pre-shift (raw) image indices.
        let raw_index = i + s + image_origin;
        if raw_index < 0 || raw_index >= image.len() as i64 {
            continue;
        }
        if image[raw_index as usize] != 0 {
            return Err(Error::NormalizationRequired { at: i });
        }
        let pos = zgx.partition_point(|&z| z <= i);
        if pos == 0 {
            return Err(Error::NormalizationRequired { at: i });
        }
        let partner = zgx[pos - 1];
        if i - partner >= h1 {
            return Err(Error::NormalizationRequired { at: i });
        }
        pairs.push(PhiPair {
            x: i,
            gx: partner,
            offset: (i - partner) as u64,
        });
    }
    if pairs.is_empty() {
        return Err(Error::InsufficientContext(
            "no returns inside the safe sub-window".into(),
        ));
    }

    let order_preserving = pairs.windows(2).all(|p| p[0].gx < p[1].gx);
    let injective = order_preserving;
    let offset_bound_ok = pairs.iter().all(|p| (p.offset as i64) < h1);
    let lo = pairs.first().unwrap().gx;
    let hi = pairs.last().unwrap().gx;
    let hit: std::collections::BTreeSet<i64> = pairs.iter().map(|p| p.gx).collect();
    let surjective_on_safe = zgx
        .iter()
        .filter(|&&z| z >= lo && z <= hi)
        .all(|z| hit.contains(z));

    Ok(PhiMatching {
        pre_shift: shift,
        zx,
        zgx,
        x_known,
        gx_known,
        pairs,
        order_preserving,
        injective,
        surjective_on_safe,
        offset_bound_ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PsiViolation {
    pub at: i64,
    pub psi_x: u64,
    pub psi_gx: u64,
}

/// Checks the gap conjugation Psi_x(i) = Psi_{g(x)}(phi(i)) over consecutive
/// matched returns, reading the image gaps off the actual return set.
pub fn psi_conjugation_check(matching: &PhiMatching) -> Result<Vec<PsiViolation>> {
    if matching.pairs.len() < 2 {
        return Err(Error::TooFewReturns {
            have: matching.pairs.len(),
            need: 2,
        });
    }
    let mut violations = Vec::new();
    for window in matching.pairs.windows(2) {
        let (cur, next) = (window[0], window[1]);
        let psi_x = (next.x - cur.x) as u64;
        let pos = matching.zgx.partition_point(|&z| z <= cur.gx);
        let successor = match matching.zgx.get(pos) {
            Some(&z) => z,
            None => continue,
        };
        let psi_gx = (successor - cur.gx) as u64;
        if psi_x != psi_gx {
            violations.push(PsiViolation {
                at: cur.x,
                psi_x,
                psi_gx,
            });
        }
    }
    Ok(violations)
}

/// The common value i - phi(i), corrected for the normalization pre-shift;
/// errors when the offsets disagree (the mark of a non-shift-power map).
pub fn recover_offset(matching: &PhiMatching) -> Result<i64> {
    let first = matching.pairs.first().ok_or(Error::TooFewReturns {
        have: 0,
        need: 1,
    })?;
    for pair in &matching.pairs {
        if pair.offset != first.offset {
            return Err(Error::OffsetsInconsistent {
                first: first.offset as i64,
                other: pair.offset as i64,
            });
        }
    }
    Ok(first.offset as i64 - matching.pre_shift as i64)
}
