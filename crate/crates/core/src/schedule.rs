//! Cutting-and-stacking schedules.
//!
//! A schedule fixes, for every stage n, how many copies q_n the stage-n tower
//! is cut into and how many spacer levels sit between consecutive copies.
//! Spacers live strictly between copies, never before the first or after the
//! last one, so every stage-(n+1) word begins and ends with the stage-n word.
//! An explicit finite list of stages is extended to all stages by a tail rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One cutting stage: cut into `q` copies, insert `spacers[c]` spacer levels
/// between copy `c` and copy `c + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRule {
    pub q: u64,
    pub spacers: Vec<u64>,
}

impl StageRule {
    pub fn new(q: u64, spacers: Vec<u64>) -> Self {
        StageRule { q, spacers }
    }

    fn validate(&self, stage: usize) -> Result<()> {
        if self.q < 2 {
            return Err(Error::QInvalid { stage, q: self.q });
        }
        let expected = (self.q - 1) as usize;
        if self.spacers.len() != expected {
            return Err(Error::SpacerCountMismatch {
                stage,
                q: self.q,
                expected,
                got: self.spacers.len(),
            });
        }
        Ok(())
    }

    pub fn spacer_sum(&self) -> Option<u64> {
        self.spacers.iter().try_fold(0u64, |a, &s| a.checked_add(s))
    }
}

/// How to extend the explicit stage list to every stage n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum TailRule {
    /// Repeat the last explicit stage forever.
    RepeatLast,
    /// Cycle through a fixed list of stages.
    Cycle { stages: Vec<StageRule> },
    /// Two-copy stages whose single spacer count grows linearly:
    /// stage n gets `base + slope * n` spacers between its two copies.
    Arithmetic { q: u64, base: u64, slope: u64 },
}

/// Raw, unvalidated schedule description; the on-disk JSON shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub h0: u64,
    pub stages: Vec<StageRule>,
    pub tail: TailRule,
}

/// A validated schedule. `stage_rule(n)` is total over all n >= 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CuttingSchedule {
    h0: u64,
    stages: Vec<StageRule>,
    tail: TailRule,
}

impl CuttingSchedule {
    pub fn new(h0: u64, stages: Vec<StageRule>, tail: TailRule) -> Result<Self> {
        Self::from_spec(ScheduleSpec { h0, stages, tail })
    }

    pub fn from_spec(spec: ScheduleSpec) -> Result<Self> {
        if spec.h0 < 1 {
            return Err(Error::H0Invalid(spec.h0));
        }
        for (i, stage) in spec.stages.iter().enumerate() {
            stage.validate(i)?;
        }
        match &spec.tail {
            TailRule::RepeatLast => {
                if spec.stages.is_empty() {
                    return Err(Error::TailInvalid(
                        "repeat-last needs at least one explicit stage".into(),
                    ));
                }
            }
            TailRule::Cycle { stages } => {
                if stages.is_empty() {
                    return Err(Error::TailInvalid("cycle needs at least one stage".into()));
                }
                for (i, stage) in stages.iter().enumerate() {
                    stage.validate(spec.stages.len() + i)?;
                }
            }
            TailRule::Arithmetic { q, .. } => {
                if *q != 2 {
                    return Err(Error::TailInvalid(format!(
                        "arithmetic tail is defined for q = 2 only, got q = {q}"
                    )));
                }
            }
        }
        Ok(CuttingSchedule {
            h0: spec.h0,
            stages: spec.stages,
            tail: spec.tail,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ScheduleSpec =
            serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
        Self::from_spec(spec)
    }

    pub fn to_spec(&self) -> ScheduleSpec {
        ScheduleSpec {
            h0: self.h0,
            stages: self.stages.clone(),
            tail: self.tail.clone(),
        }
    }

    pub fn h0(&self) -> u64 {
        self.h0
    }

    pub fn explicit_stages(&self) -> &[StageRule] {
        &self.stages
    }

    pub fn tail(&self) -> &TailRule {
        &self.tail
    }

    /// The cutting rule applied at stage `n` (how W_{n+1} is assembled from W_n).
    pub fn stage_rule(&self, n: usize) -> Result<StageRule> {
        if let Some(rule) = self.stages.get(n) {
            return Ok(rule.clone());
        }
        match &self.tail {
            TailRule::RepeatLast => Ok(self
                .stages
                .last()
                .expect("validated: repeat-last has explicit stages")
                .clone()),
            TailRule::Cycle { stages } => {
                Ok(stages[(n - self.stages.len()) % stages.len()].clone())
            }
            TailRule::Arithmetic { base, slope, .. } => {
                let spacer = slope
                    .checked_mul(n as u64)
                    .and_then(|x| x.checked_add(*base))
                    .ok_or(Error::Overflow { stage: n })?;
                Ok(StageRule::new(2, vec![spacer]))
            }
        }
    }

    /// Tower height h_n, via h_{n+1} = q_n * h_n + sum of stage-n spacers.
    /// Strictly increasing in n; overflow is an explicit error.
    pub fn height(&self, n: usize) -> Result<u64> {
        let mut h = self.h0;
        for s in 0..n {
            let rule = self.stage_rule(s)?;
            let sum = rule.spacer_sum().ok_or(Error::Overflow { stage: s })?;
            h = rule
                .q
                .checked_mul(h)
                .and_then(|x| x.checked_add(sum))
                .ok_or(Error::Overflow { stage: s })?;
        }
        Ok(h)
    }

    /// Start offsets of the q_n stage-n copies inside the stage-(n+1) word.
    pub fn copy_offsets(&self, n: usize) -> Result<Vec<u64>> {
        let h = self.height(n)?;
        let rule = self.stage_rule(n)?;
        let mut offsets = Vec::with_capacity(rule.q as usize);
        let mut off = 0u64;
        offsets.push(off);
        for c in 0..(rule.q - 1) as usize {
            off = off
                .checked_add(h)
                .and_then(|x| x.checked_add(rule.spacers[c]))
                .ok_or(Error::Overflow { stage: n })?;
            offsets.push(off);
        }
        Ok(offsets)
    }
}

/// Built-in schedules used throughout the test and bench suites.
pub const PRESETS: &[&str] = &["chacon", "paper-4copy", "odometer2", "staircase"];

pub fn preset(name: &str) -> Option<CuttingSchedule> {
    let spec = match name {
        "chacon" => ScheduleSpec {
            h0: 1,
            stages: vec![StageRule::new(3, vec![0, 1])],
            tail: TailRule::RepeatLast,
        },
        "paper-4copy" => ScheduleSpec {
            h0: 1,
            stages: vec![StageRule::new(4, vec![0, 1, 0])],
            tail: TailRule::RepeatLast,
        },
        "odometer2" => ScheduleSpec {
            h0: 1,
            stages: vec![StageRule::new(2, vec![0])],
            tail: TailRule::RepeatLast,
        },
        "staircase" => ScheduleSpec {
            h0: 1,
            stages: vec![],
            tail: TailRule::Arithmetic {
                q: 2,
                base: 1,
                slope: 1,
            },
        },
        _ => return None,
    };
    Some(CuttingSchedule::from_spec(spec).expect("presets are valid"))
}
