//! Finite combinatorial models of rank-one cutting-and-stacking systems.
//!
//! A cutting schedule (copy counts plus between-copy spacer counts, extended
//! by a tail rule) generates the tower words W_0, W_1, ... over {0,1} and
//! everything downstream of them:
//!
//! - [`tower`]: the words themselves, the expected-occurrence position sets
//!   E_{m,n}, and the repeating / bounded-spacer / unbounded-spacer
//!   trichotomy of the limit word.
//! - [`recognizer`]: occurrence search, context bounds under which expected
//!   occurrences are recognizable from a window alone, and an exhaustive
//!   check of the gap-matching identity for overlapping occurrences.
//! - [`points`]: tower levels as finite point addresses, interior margins,
//!   windows of stage-1 base visits, the gap function along them, and
//!   separation of distinct interior points by their windows.
//! - [`centralizer`]: the finite factor language, exhaustive enumeration of
//!   language-preserving sliding-block codes, constructive invertibility,
//!   and the probe matching every invertible survivor against shift powers.
//!
//! With the default `parallel` feature the exhaustive searches fan out over
//! rayon; disabling it leaves sequential equivalents with identical output.

pub mod budget;
pub mod centralizer;
pub mod error;
pub mod points;
pub mod recognizer;
pub mod schedule;
pub mod tower;
pub mod word;

pub use budget::Budget;
pub use error::{Error, Result};
pub use schedule::{preset, CuttingSchedule, ScheduleSpec, StageRule, TailRule, PRESETS};
pub use word::Word;
