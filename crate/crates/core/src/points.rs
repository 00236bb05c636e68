//! Finite-precision point arithmetic on tower levels.
//!
//! A point is addressed as a level of the depth-N tower. Walking the cutting
//! structure downward locates it relative to any shallower stage, extending
//! through a copy index lifts it one stage up, and the margin to the base and
//! top of the tower is the finite stand-in for interiority. The window of
//! visits to the stage-1 base around an address (its Z-window) drives the
//! gap function, the return word R_n, and the congruence-class analysis.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::schedule::CuttingSchedule;
use crate::tower::{classify, expected_positions};

/// Level `level` of the depth-`depth` tower.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PointAddress {
    pub depth: usize,
    pub level: u64,
}

impl PointAddress {
    pub fn new(depth: usize, level: u64) -> Self {
        PointAddress { depth, level }
    }
}

impl std::fmt::Display for PointAddress {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.depth, self.level)
    }
}

impl std::str::FromStr for PointAddress {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (depth, level) = s.split_once(':').ok_or_else(|| {
            Error::InvalidArgument(format!("address must look like depth:level, got '{s}'"))
        })?;
        Ok(PointAddress {
            depth: depth
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad depth in '{s}'")))?,
            level: level
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad level in '{s}'")))?,
        })
    }
}

/// Where an address sits relative to the stage-n tower: inside level `index`,
/// or in the stage-n leftover region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PointLocation {
    Level { stage: usize, index: u64 },
    Spacer { stage: usize },
}

fn check_address(schedule: &CuttingSchedule, addr: PointAddress) -> Result<u64> {
    let h = schedule.height(addr.depth)?;
    if addr.level >= h {
        return Err(Error::InvalidArgument(format!(
            "level {} out of range for depth {} (height {h})",
            addr.level, addr.depth
        )));
    }
    Ok(h)
}

/// Locates the address relative to the stage-n tower by walking the cutting
/// structure downward. Landing between copies at any intermediate stage means
/// the point is in the stage-n leftover as well.
pub fn locate(schedule: &CuttingSchedule, addr: PointAddress, n: usize) -> Result<PointLocation> {
    if n > addr.depth {
        return Err(Error::InvalidArgument(format!(
            "locate stage {n} exceeds address depth {}",
            addr.depth
        )));
    }
    check_address(schedule, addr)?;
    let mut index = addr.level;
    let mut stage = addr.depth;
    while stage > n {
        let offsets = schedule.copy_offsets(stage - 1)?;
        let h_prev = schedule.height(stage - 1)?;
        let c = offsets.partition_point(|&o| o <= index) - 1;
        if index < offsets[c] + h_prev {
            index -= offsets[c];
            stage -= 1;
        } else {
            return Ok(PointLocation::Spacer { stage: n });
        }
    }
    Ok(PointLocation::Level { stage: n, index })
}

/// Lifts the address into copy `copy` of the next stage.
pub fn extend(schedule: &CuttingSchedule, addr: PointAddress, copy: u64) -> Result<PointAddress> {
    check_address(schedule, addr)?;
    let rule = schedule.stage_rule(addr.depth)?;
    if copy >= rule.q {
        return Err(Error::CopyIndexOutOfRange { copy, q: rule.q });
    }
    let offsets = schedule.copy_offsets(addr.depth)?;
    Ok(PointAddress {
        depth: addr.depth + 1,
        level: offsets[copy as usize] + addr.level,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StageMargin {
    pub stage: usize,
    /// (distance to base, distance to top) when the point is in a level;
    /// absent when it sits in the stage's leftover.
    pub margin: Option<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Margins {
    pub down: u64,
    pub up: u64,
    pub per_stage: Vec<StageMargin>,
}

impl Margins {
    /// k-interior: at least k levels below and above at the address depth.
    pub fn is_k_interior(&self, k: u64) -> bool {
        self.down >= k && self.up >= k
    }
}

pub fn interior_margin(schedule: &CuttingSchedule, addr: PointAddress) -> Result<Margins> {
    let h = check_address(schedule, addr)?;
    let mut per_stage = Vec::with_capacity(addr.depth + 1);
    for n in 0..=addr.depth {
        let margin = match locate(schedule, addr, n)? {
            PointLocation::Level { index, .. } => {
                let h_n = schedule.height(n)?;
                Some((index, h_n - 1 - index))
            }
            PointLocation::Spacer { .. } => None,
        };
        per_stage.push(StageMargin { stage: n, margin });
    }
    Ok(Margins {
        down: addr.level,
        up: h - 1 - addr.level,
        per_stage,
    })
}

/// Visits to the stage-1 base at offsets i from the address, i.e. the local
/// picture of the return-time set around the point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZWindow {
    pub depth: usize,
    pub level: u64,
    pub lo: i64,
    pub hi: i64,
    pub returns: Vec<i64>,
}

fn window_between(
    schedule: &CuttingSchedule,
    addr: PointAddress,
    lo: i64,
    hi: i64,
    budget: &Budget,
) -> Result<ZWindow> {
    let positions = expected_positions(schedule, addr.depth, 1, budget)?.positions;
    let level = addr.level as i64;
    let returns = positions
        .iter()
        .map(|&e| e as i64 - level)
        .filter(|&i| i >= lo && i <= hi)
        .collect();
    Ok(ZWindow {
        depth: addr.depth,
        level: addr.level,
        lo,
        hi,
        returns,
    })
}

/// The symmetric radius-T window. Requires the whole window, including a full
/// stage-1 copy at its right edge, to stay inside the depth-N tower.
pub fn z_window(
    schedule: &CuttingSchedule,
    addr: PointAddress,
    radius: u64,
    budget: &Budget,
) -> Result<ZWindow> {
    let h = check_address(schedule, addr)?;
    let h1 = schedule.height(1)?;
    if addr.level < radius || addr.level + radius + h1 > h {
        return Err(Error::WindowExceedsDepth {
            depth: addr.depth,
            level: addr.level,
            radius,
        });
    }
    window_between(
        schedule,
        addr,
        -(radius as i64),
        radius as i64,
        budget,
    )
}

/// Every return visible at the address depth: offsets in [-level, h - h_1 - level].
pub fn max_z_window(
    schedule: &CuttingSchedule,
    addr: PointAddress,
    budget: &Budget,
) -> Result<ZWindow> {
    let h = check_address(schedule, addr)?;
    let h1 = schedule.height(1)?;
    let level = addr.level as i64;
    window_between(schedule, addr, -level, (h - h1) as i64 - level, budget)
}

/// For an h_1-interior address the full in-depth window always contains a
/// strictly negative and a strictly positive return.
pub fn z_window_two_sided_check(
    schedule: &CuttingSchedule,
    addr: PointAddress,
    k: u64,
    budget: &Budget,
) -> Result<bool> {
    let h1 = schedule.height(1)?;
    if k < h1 {
        return Err(Error::InvalidArgument(format!(
            "two-sided check needs margin k >= h_1 = {h1}, got {k}"
        )));
    }
    let margins = interior_margin(schedule, addr)?;
    if !margins.is_k_interior(k) {
        return Err(Error::InvalidArgument(format!(
            "address {addr} is not {k}-interior (margins {}, {})",
            margins.down, margins.up
        )));
    }
    let window = max_z_window(schedule, addr, budget)?;
    Ok(window.returns.iter().any(|&i| i < 0) && window.returns.iter().any(|&i| i > 0))
}

/// Gaps to the next return, defined on all but the last return of a window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapFunction {
    pub entries: Vec<(i64, u64)>,
}

pub fn psi(window: &ZWindow) -> Result<GapFunction> {
    if window.returns.len() < 2 {
        return Err(Error::TooFewReturns {
            have: window.returns.len(),
            need: 2,
        });
    }
    let entries = window
        .returns
        .windows(2)
        .map(|pair| (pair[0], (pair[1] - pair[0]) as u64))
        .collect();
    Ok(GapFunction { entries })
}

/// The return pattern of one pass up the stage-n tower: r_n visits to the
/// stage-1 base and the r_n - 1 gaps between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReturnWord {
    pub stage: usize,
    pub visits: usize,
    pub gaps: Vec<u64>,
}

pub fn return_word(schedule: &CuttingSchedule, n: usize, budget: &Budget) -> Result<ReturnWord> {
    if n < 1 {
        return Err(Error::InvalidArgument("return_word needs n >= 1".into()));
    }
    let positions = expected_positions(schedule, n, 1, budget)?.positions;
    let gaps = positions.windows(2).map(|p| p[1] - p[0]).collect();
    Ok(ReturnWord {
        stage: n,
        visits: positions.len(),
        gaps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceClass {
    pub residue: u64,
    pub values: Vec<u64>,
    pub constant: bool,
}

/// Per-residue-class behaviour of the gap function along a window, indexed
/// mod r_n from an anchor return sitting at the base of a stage-n copy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceReport {
    pub stage: usize,
    pub modulus: usize,
    pub anchor: i64,
    pub classes: Vec<CongruenceClass>,
    pub constant_classes: usize,
    pub varying_classes: usize,
    /// Whether the schedule classified unbounded, which is the regime where
    /// "all classes constant except one" is asserted rather than described.
    pub asserted: bool,
    pub claim_shadow_holds: Option<bool>,
}

pub fn psi_congruence_report(
    schedule: &CuttingSchedule,
    addr: PointAddress,
    radius: Option<u64>,
    n: usize,
    budget: &Budget,
) -> Result<CongruenceReport> {
    let window = match radius {
        Some(t) => z_window(schedule, addr, t, budget)?,
        None => max_z_window(schedule, addr, budget)?,
    };
    let rw = return_word(schedule, n, budget)?;
    let r_n = rw.visits;
    if window.returns.len() < 3 * r_n {
        return Err(Error::TooFewReturns {
            have: window.returns.len(),
            need: 3 * r_n,
        });
    }

    let stage_positions = expected_positions(schedule, addr.depth, n, budget)?.positions;
    let level = addr.level as i64;
    let anchor_idx = window
        .returns
        .iter()
        .position(|&i| stage_positions.binary_search(&((i + level) as u64)).is_ok())
        .ok_or_else(|| {
            Error::InvalidArgument("window has no return at a stage-n copy base".into())
        })?;

    let gaps = psi(&window)?;
    let mut classes: Vec<CongruenceClass> = (0..r_n)
        .map(|residue| CongruenceClass {
            residue: residue as u64,
            values: Vec::new(),
            constant: true,
        })
        .collect();
    for (t, &(_, gap)) in gaps.entries.iter().enumerate() {
        let k = t as i64 - anchor_idx as i64;
        let residue = k.rem_euclid(r_n as i64) as usize;
        classes[residue].values.push(gap);
    }
    for class in &mut classes {
        class.constant = !class.values.is_empty()
            && class.values.iter().all(|&v| v == class.values[0]);
    }
    let constant_classes = classes.iter().filter(|c| c.constant).count();
    let varying_classes = r_n - constant_classes;
    let asserted = classify(schedule, addr.depth.max(2), budget)?.is_unbounded();
    let claim_shadow_holds = asserted.then(|| constant_classes >= r_n.saturating_sub(1));

    Ok(CongruenceReport {
        stage: n,
        modulus: r_n,
        anchor: window.returns[anchor_idx],
        classes,
        constant_classes,
        varying_classes,
        asserted,
        claim_shadow_holds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    /// Least stage with a level containing exactly one of the two points,
    /// plus that level's index.
    pub separating_level: Option<(usize, u64)>,
    pub windows_differ: bool,
    pub radius_used: u64,
}

/// Finds a tower level separating two distinct interior addresses and checks
/// that their radius-T return windows differ.
pub fn separation_check(
    schedule: &CuttingSchedule,
    a: PointAddress,
    b: PointAddress,
    radius: u64,
    budget: &Budget,
) -> Result<SeparationReport> {
    if a.depth != b.depth {
        return Err(Error::DepthMismatch {
            left: a.depth,
            right: b.depth,
        });
    }
    if a.level == b.level {
        return Err(Error::InvalidArgument(
            "separation check needs distinct levels".into(),
        ));
    }
    let h1 = schedule.height(1)?;
    for (label, addr) in [("first", a), ("second", b)] {
        let margins = interior_margin(schedule, addr)?;
        if !margins.is_k_interior(h1) {
            return Err(Error::InvalidArgument(format!(
                "{label} address {addr} is not h_1-interior"
            )));
        }
    }

    let mut separating_level = None;
    for n in 0..=a.depth {
        match (locate(schedule, a, n)?, locate(schedule, b, n)?) {
            (PointLocation::Level { index: i, .. }, PointLocation::Level { index: j, .. })
                if i != j =>
            {
                separating_level = Some((n, i));
                break;
            }
            (PointLocation::Level { index, .. }, PointLocation::Spacer { .. })
            | (PointLocation::Spacer { .. }, PointLocation::Level { index, .. }) => {
                separating_level = Some((n, index));
                break;
            }
            _ => {}
        }
    }

    let h = schedule.height(a.depth)?;
    let max_radius = |addr: PointAddress| addr.level.min(h - h1 - addr.level);
    let radius_used = radius.min(max_radius(a)).min(max_radius(b));
    let wa = z_window(schedule, a, radius_used, budget)?;
    let wb = z_window(schedule, b, radius_used, budget)?;
    Ok(SeparationReport {
        separating_level,
        windows_differ: wa.returns != wb.returns,
        radius_used,
    })
}

/// Deterministically seeded sample of k-interior levels at a fixed depth.
pub fn sample_interior_addresses(
    schedule: &CuttingSchedule,
    depth: usize,
    margin: u64,
    count: usize,
    seed: u64,
) -> Result<Vec<PointAddress>> {
    let h = schedule.height(depth)?;
    if h < 2 * margin + 1 {
        return Err(Error::InvalidArgument(format!(
            "depth {depth} has no {margin}-interior levels (height {h})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| PointAddress {
            depth,
            level: rng.gen_range(margin..=h - 1 - margin),
        })
        .collect())
}
