//! `rank1`: command-line front end for the rank-one tower toolkit.
//!
//! Every library operation is a subcommand. Output is line-oriented text by
//! default, or exactly one JSON document with `--json`. Exit codes: 0 on
//! success, 1 on computation errors, 2 when the centralizer probe finds an
//! exotic invertible code, 64 on usage errors.

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use rank1_core::centralizer::{
    centralizer_probe, default_test_len, language, phi_map_normalized, psi_conjugation_check,
    recover_offset, shift_power_code, window_stage_for, OriginWord, ProbeScope,
};
use rank1_core::points::{
    extend, interior_margin, locate, max_z_window, psi, psi_congruence_report, separation_check,
    z_window, PointAddress,
};
use rank1_core::recognizer::{
    context_bound, is_expected_start, lemma_gap_check, minimal_context, occurrences,
    stabilized_template_set, template_set, unexpected_occurrences, RecognitionVerdict,
};
use rank1_core::tower::{
    classify, expected_positions, infinite_word_prefix, nonconstant_gap_witness, word,
};
use rank1_core::{preset, Budget, CuttingSchedule, Error, Word, PRESETS};

const SCHEMA: &str = "rank1/v1";
const DEFAULT_SEED: u64 = 1069;
const BUDGET_ENV: &str = "RANK1_BUDGET";

#[derive(Parser)]
#[command(
    name = "rank1",
    version,
    about = "Finite models of rank-one cutting-and-stacking systems",
    long_about = "Materializes rank-one tower representations as finite words, position sets \
                  and point addresses, and exhaustively probes the sliding-block codes that \
                  commute with the shift on the resulting subshift."
)]
struct Cli {
    /// Emit one JSON document instead of text lines.
    #[arg(long, global = true)]
    json: bool,

    /// Maximum word length in symbols (overrides the RANK1_BUDGET variable).
    #[arg(long, global = true, value_name = "SYMBOLS")]
    budget: Option<u64>,

    /// Node limit for exhaustive code enumeration.
    #[arg(long, global = true, value_name = "NODES")]
    max_nodes: Option<u64>,

    /// Seed for sampling-based operations; fixed default for reproducibility.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SchedArgs {
    /// Built-in schedule: chacon, paper-4copy, odometer2, staircase.
    #[arg(long, value_name = "NAME", conflicts_with = "schedule")]
    preset: Option<String>,

    /// Path to a schedule JSON file {"h0":…,"stages":[…],"tail":{…}}.
    #[arg(long, value_name = "FILE")]
    schedule: Option<std::path::PathBuf>,
}

impl SchedArgs {
    fn load(&self) -> Result<(CuttingSchedule, String), Error> {
        match (&self.preset, &self.schedule) {
            (Some(name), None) => {
                let schedule = preset(name).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "unknown preset '{name}' (available: {})",
                        PRESETS.join(", ")
                    ))
                })?;
                Ok((schedule, name.clone()))
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
                let schedule = CuttingSchedule::from_json(&text)?;
                Ok((schedule, path.display().to_string()))
            }
            _ => Err(Error::InvalidArgument(
                "give exactly one of --preset or --schedule".into(),
            )),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a schedule and print its normalized form.
    #[command(after_help = "Exercises: the schedule well-formedness constraints -- q >= 2 at \
                            every stage (each level splits into at least two), spacer lists of \
                            arity q - 1 (spacers only between copies), and a total tail rule.")]
    Validate {
        #[command(flatten)]
        sched: SchedArgs,
    },

    /// Tower height h_n.
    #[command(after_help = "Exercises: the height recursion h_{n+1} = q_n h_n + sum of stage-n \
                            spacers, strictly increasing, with overflow as a hard error.")]
    Height {
        #[command(flatten)]
        sched: SchedArgs,
        #[arg(long)]
        stage: usize,
    },

    /// The stage-n tower word W_n.
    #[command(after_help = "Exercises: the word recursion W_{n+1} = W_n 1^{a_1} W_n ... W_n; \
                            every stage word begins and ends with the previous one.")]
    Word {
        #[command(flatten)]
        sched: SchedArgs,
        #[arg(long)]
        stage: usize,
    },

    /// Prefix of the limit word W_infinity.
    #[command(after_help = "Exercises: the limit word, defined stagewise wherever any W_n is.")]
    Prefix {
        #[command(flatten)]
        sched: SchedArgs,
        #[arg(long)]
        length: u64,
    },

    /// Expected occurrence positions E_{m,n} of W_n inside W_m.
    #[command(after_help = "Exercises: the aligned-copy position sets and their compositional \
                            identity E_{m,n} = E_{m,n+1} + E_{n+1,n}; every 0 of W_m lies in \
                            exactly one expected copy.")]
    Expected {
        #[command(flatten)]
        sched: SchedArgs,
        #[arg(long)]
        upper: usize,
        #[arg(long)]
        lower: usize,
    },

    /// Depth-qualified spacer-behavior verdict for the limit word.
    #[command(after_help = "Exercises: the trichotomy for the limit word -- periodic, \
                            non-repeating with bounded spacer runs, or with arbitrarily long \
                            spacer runs. Evidence at the checked depth, not a proof.")]
    Classify {
        #[command(flatten)]
        sched: SchedArgs,
        #[arg(long, default_value_t = 6)]
        max_stage: usize,
    },

    /// Smallest stage with non-constant gaps between expected W_n copies.
    #[command(after_help = "Exercises: the non-repeating witness -- some stage k where the 1-runs \
                            separating consecutive expected W_n occurrences take two values.")]
    Witness {
        #[command(flatten)]
        sched: SchedArgs,
        /// The inner stage n.
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 8)]
        max_stage: usize,
    },

    /// All start positions of a needle word inside a haystack word.
    #[command(after_help = "Exercises: exact overlapping substring search, the primitive under \
                            the expected/unexpected occurrence split.")]
    Occurrences {
        #[arg(long)]
        haystack: String,
        #[arg(long)]
        needle: String,
    },

    /// Occurrences of W_n in W_m split into expected and unexpected.
    #[command(after_help = "Exercises: unexpected occurrences overlap exactly two expected \
                            copies; four-copy-style schedules always have at least one.")]
    Unexpected {
        #[command(flatten)]
        sched: SchedArgs,
        #[arg(long)]
        upper: usize,
        #[arg(long)]
        lower: usize,
    },

    /// The closed-form recognition context length l = 2 h_k + h_n.
    #[command(after_help = "Exercises: a window of length 2 h_k + h_n starting at an expected \
                            occurrence recurs only at expected occurrences, with k a \
                            non-constant-gap stage.")]
    ContextBound {
        #[command(flatten)]
        sched: SchedArgs,
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 6)]
        max_stage: usize,
    },

    /// Brute-force minimal recognition context length.
    #[command(after_help = "Exercises: the exhaustive sharpening of the context bound; always at \
                            most the closed-form value when the witness stage is in range.")]
    MinimalContext {
        #[command(flatten)]
        sched: SchedArgs,
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 4)]
        max_stage: usize,
    },

    /// Classify one W_n occurrence in a word as expected or unexpected.
    #[command(after_help = "Exercises: template recognition -- matching the context window \
                            against the windows extracted at expected starts of a template \
                            stage decides expectedness.")]
    Recognize {
        #[command(flatten)]
        sched: SchedArgs,
        /// The word containing the occurrence, as 0/1 symbols.
        #[arg(long)]
        word: String,
        #[arg(long)]
        pos: usize,
        /// The occurrence stage n.
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 6)]
        template_stage: usize,
    },

    /// Exhaustively check the gap-matching identity on (W_m, W_n).
    #[command(after_help = "Exercises: an occurrence overlapping an expected copy, when followed \
                            by a 1-run and another occurrence, carries the same run length as \
                            the expected train (r = s). Zero violations expected, always.")]
    LemmaCheck {
        #[command(flatten)]
        sched: SchedArgs,
        #[arg(long)]
        upper: usize,
        #[arg(long)]
        lower: usize,
    },

    /// Point-address operations (tower levels as points).
    #[command(subcommand)]
    Point(PointCommand),

    /// Factors of the limit word up to a length, with a stabilization stage.
    #[command(after_help = "Exercises: the finite factor language standing in for the subshift; \
                            certified by factor sets agreeing across two consecutive stages.")]
    Language {
        #[command(flatten)]
        sched: SchedArgs,
        #[arg(long)]
        max_len: usize,
        /// Proceed even when the schedule classifies repeating-consistent.
        #[arg(long)]
        allow_repeating: bool,
    },

    /// Exhaustive centralizer probe over radius-R sliding-block codes.
    #[command(after_help = "Exercises: on a non-repeating schedule, every invertible \
                            shift-commuting code found by exhaustion should be a power of the \
                            shift; any other invertible survivor is flagged EXOTIC and makes \
                            the exit code 2.")]
    Probe {
        #[command(flatten)]
        sched: SchedArgs,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        test_len: Option<usize>,
        /// Largest inverse radius searched (default: radius + 1).
        #[arg(long)]
        inverse_radius: Option<usize>,
        /// Silence the warning on repeating schedules.
        #[arg(long)]
        allow_repeating: bool,
    },

    /// Run the return-matching pipeline against a shift power.
    #[command(after_help = "Exercises: the matching between the stage-1 return sets of a word \
                            and its image -- order-preserving bijection, per-pair bound \
                            i - h_1 < phi(i) <= i, gap conjugation, and a constant offset that \
                            recovers the power.")]
    Phi {
        #[command(flatten)]
        sched: SchedArgs,
        /// The shift power to analyze.
        #[arg(long, allow_hyphen_values = true)]
        power: i64,
        /// Code radius (default: |power|).
        #[arg(long)]
        radius: Option<usize>,
        /// Stage of the host window (default: chosen from the context bound).
        #[arg(long)]
        window_stage: Option<usize>,
    },
}

#[derive(Subcommand)]
enum PointCommand {
    /// Locate an address relative to a shallower stage.
    #[command(after_help = "Exercises: each deep level sits inside exactly one level of each \
                            shallower tower or in its leftover region.")]
    Locate {
        #[command(flatten)]
        sched: SchedArgs,
        /// Address as depth:level.
        addr: PointAddress,
        #[arg(long)]
        stage: usize,
    },

    /// Lift an address into a copy of the next stage.
    #[command(after_help = "Exercises: extension through copy c adds the copy offset; interior \
                            copies strictly grow both margins.")]
    Extend {
        #[command(flatten)]
        sched: SchedArgs,
        addr: PointAddress,
        #[arg(long)]
        copy: u64,
    },

    /// Distances to the base and top, per stage.
    #[command(after_help = "Exercises: the k-interior predicate k <= i < h_n - k, the finite \
                            stand-in for interiority.")]
    Margins {
        #[command(flatten)]
        sched: SchedArgs,
        addr: PointAddress,
    },

    /// Visits to the stage-1 base around the address.
    #[command(after_help = "Exercises: the return-time window; consecutive returns differ by at \
                            least h_1, stage-n aligned returns by at least h_n, and interior \
                            addresses see returns on both sides.")]
    Zwindow {
        #[command(flatten)]
        sched: SchedArgs,
        addr: PointAddress,
        /// Symmetric radius; omitted means every return visible at this depth.
        #[arg(long)]
        radius: Option<u64>,
    },

    /// Gaps to the next return along the window.
    #[command(after_help = "Exercises: the gap function on the return set; every value is at \
                            least h_1.")]
    Psi {
        #[command(flatten)]
        sched: SchedArgs,
        addr: PointAddress,
        #[arg(long)]
        radius: Option<u64>,
    },

    /// Gap values per residue class mod r_n along the window.
    #[command(after_help = "Exercises: on schedules with unbounded spacer runs, the gap function \
                            is constant on every residue class mod r_n except one.")]
    Congruence {
        #[command(flatten)]
        sched: SchedArgs,
        addr: PointAddress,
        /// The stage n whose return count r_n indexes the classes.
        #[arg(long)]
        stage: usize,
        #[arg(long)]
        radius: Option<u64>,
    },

    /// Separate two addresses by a tower level and compare their windows.
    #[command(after_help = "Exercises: distinct interior points are separated by some tower \
                            level, and their return windows differ once the radius reaches the \
                            context bound of the separating stage.")]
    Separate {
        #[command(flatten)]
        sched: SchedArgs,
        first: PointAddress,
        second: PointAddress,
        #[arg(long)]
        radius: u64,
    },
}

#[derive(Serialize, Clone)]
struct ConfigEcho {
    schedule: Option<String>,
    seed: u64,
    max_word_symbols: u64,
    max_search_nodes: u64,
}

#[derive(Serialize)]
struct Doc<T: Serialize> {
    schema: &'static str,
    command: &'static str,
    config: ConfigEcho,
    report: T,
}

struct Output {
    json: bool,
    config: ConfigEcho,
}

impl Output {
    fn emit<T: Serialize>(&self, command: &'static str, report: T, text: String) {
        if self.json {
            let doc = Doc {
                schema: SCHEMA,
                command,
                config: self.config.clone(),
                report,
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("reports serialize")
            );
        } else {
            println!("{text}");
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn effective_budget(cli: &Cli) -> Result<Budget, Error> {
    let mut budget = Budget::default();
    if let Ok(text) = std::env::var(BUDGET_ENV) {
        let value: u64 = text.trim().parse().map_err(|_| {
            Error::InvalidArgument(format!("{BUDGET_ENV} must be an integer, got '{text}'"))
        })?;
        budget = budget.with_word_symbols(value);
    }
    if let Some(value) = cli.budget {
        budget = budget.with_word_symbols(value);
    }
    if let Some(value) = cli.max_nodes {
        budget = budget.with_search_nodes(value);
    }
    if budget.max_word_symbols == 0 || budget.max_search_nodes == 0 {
        return Err(Error::InvalidArgument("budgets must be positive".into()));
    }
    Ok(budget)
}

fn run(cli: Cli) -> Result<u8, Error> {
    let budget = effective_budget(&cli)?;
    let mut out = Output {
        json: cli.json,
        config: ConfigEcho {
            schedule: None,
            seed: cli.seed,
            max_word_symbols: budget.max_word_symbols,
            max_search_nodes: budget.max_search_nodes,
        },
    };

    match cli.command {
        Command::Validate { sched } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let spec = schedule.to_spec();
            let text = format!(
                "valid schedule: {}",
                serde_json::to_string(&spec).expect("specs serialize")
            );
            out.emit("validate", spec, text);
        }
        Command::Height { sched, stage } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let h = schedule.height(stage)?;
            out.emit("height", h, format!("{h}"));
        }
        Command::Word { sched, stage } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let tw = word(&schedule, stage, &budget)?;
            let text = tw.word.to_string();
            out.emit("word", tw, text);
        }
        Command::Prefix { sched, length } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let prefix = infinite_word_prefix(&schedule, length, &budget)?;
            let text = prefix.to_string();
            out.emit("prefix", prefix, text);
        }
        Command::Expected {
            sched,
            upper,
            lower,
        } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let set = expected_positions(&schedule, upper, lower, &budget)?;
            let text = format!(
                "|E({upper},{lower})| = {}\npositions: {}",
                set.positions.len(),
                join(&set.positions)
            );
            out.emit("expected", set, text);
        }
        Command::Classify { sched, max_stage } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let verdict = classify(&schedule, max_stage, &budget)?;
            use rank1_core::tower::SpacerClassification::*;
            let text = match &verdict {
                RepeatingConsistent {
                    period,
                    depth_checked,
                } => format!(
                    "repeating-consistent: period {period} (evidence through stage {depth_checked})"
                ),
                NonRepeatingBounded { a_max, witness } => format!(
                    "non-repeating, bounded spacer runs: a_max={a_max}, witness stage {} gaps {} and {}",
                    witness.k, witness.r, witness.r_prime
                ),
                NonRepeatingUnbounded { witness_stages, .. } => format!(
                    "non-repeating, unbounded spacer runs: maxima grew at stages {}",
                    join(witness_stages)
                ),
            };
            out.emit("classify", verdict, text);
        }
        Command::Witness {
            sched,
            level,
            max_stage,
        } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let witness = nonconstant_gap_witness(&schedule, level, max_stage, &budget)?;
            let text = match &witness {
                Some(w) => format!("witness: k={} r={} r'={}", w.k, w.r, w.r_prime),
                None => format!("no witness for stage {level} up to stage {max_stage}"),
            };
            out.emit("witness", witness, text);
        }
        Command::Occurrences { haystack, needle } => {
            let haystack = Word::parse(&haystack)?;
            let needle = Word::parse(&needle)?;
            let positions = occurrences(haystack.bits(), needle.bits());
            let text = format!("occurrences: {}", join(&positions));
            out.emit("occurrences", positions, text);
        }
        Command::Unexpected {
            sched,
            upper,
            lower,
        } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let report = unexpected_occurrences(&schedule, upper, lower, &budget)?;
            let text = format!(
                "all:        {}\nexpected:   {}\nunexpected: {}",
                join(&report.all),
                join(&report.expected),
                join(&report.unexpected)
            );
            out.emit("unexpected", report, text);
        }
        Command::ContextBound {
            sched,
            level,
            max_stage,
        } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let bound = context_bound(&schedule, level, max_stage, &budget)?;
            let text = format!("l = {} (witness stage {}, analytic)", bound.l, bound.witness_stage);
            out.emit("context-bound", bound, text);
        }
        Command::MinimalContext {
            sched,
            level,
            max_stage,
        } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let bound = minimal_context(&schedule, level, max_stage, &budget)?;
            let text = format!("l = {} (brute-minimal, scanned through stage {max_stage})", bound.l);
            out.emit("minimal-context", bound, text);
        }
        Command::Recognize {
            sched,
            word: text_word,
            pos,
            level,
            template_stage,
        } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let w = Word::parse(&text_word)?;
            let templates = template_set(&schedule, level, template_stage, &budget)?;
            if !templates.stable {
                eprintln!(
                    "warning: template set at stage {template_stage} differs from stage {}; \
                     verdicts are evidence at this depth only",
                    template_stage + 1
                );
            }
            let verdict = is_expected_start(&schedule, w.bits(), pos, &templates, &budget)?;
            #[derive(Serialize)]
            struct Recognition {
                verdict: RecognitionVerdict,
                context_len: u64,
                template_stage: usize,
                templates_stable: bool,
            }
            let report = Recognition {
                verdict,
                context_len: templates.context_len,
                template_stage,
                templates_stable: templates.stable,
            };
            let text = match verdict {
                RecognitionVerdict::Expected => "expected",
                RecognitionVerdict::Unexpected => "unexpected",
                RecognitionVerdict::InsufficientContext => "insufficient-context",
            }
            .to_string();
            out.emit("recognize", report, text);
        }
        Command::LemmaCheck {
            sched,
            upper,
            lower,
        } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let report = lemma_gap_check(&schedule, upper, lower, &budget)?;
            let text = format!(
                "configurations={} checked={} violations={}",
                report.configurations,
                report.checked,
                report.violations.len()
            );
            out.emit("lemma-check", report, text);
        }
        Command::Point(cmd) => return run_point(cmd, &budget, &mut out),
        Command::Language {
            sched,
            max_len,
            allow_repeating,
        } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let table = language(&schedule, max_len, allow_repeating, &budget)?;
            let counts: Vec<String> = (1..=max_len)
                .map(|len| format!("{len}:{}", table.factor_count(len)))
                .collect();
            let text = format!(
                "stabilized at stage {}\nfactor counts: {}",
                table.stabilization_stage,
                counts.join(" ")
            );
            out.emit("language", table, text);
        }
        Command::Probe {
            sched,
            radius,
            test_len,
            inverse_radius,
            allow_repeating,
        } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label.clone());
            let test_len = match test_len {
                Some(len) => len,
                None => default_test_len(&schedule, radius, &budget)?,
            };
            let inverse_radius = inverse_radius.unwrap_or(radius + 1);
            let report =
                centralizer_probe(&schedule, &label, radius, test_len, inverse_radius, &budget)?;
            if report.scope == ProbeScope::OutOfTheoremScope && !allow_repeating {
                eprintln!(
                    "warning: schedule classifies repeating-consistent; the triviality \
                     prediction does not apply (pass --allow-repeating to silence)"
                );
            }
            let mut lines = vec![
                format!(
                    "language stabilized at stage {}; {} window factors, {} test factors",
                    report.stabilization_stage, report.window_factors, report.test_factors
                ),
                format!(
                    "radius {} test-len {} inverse-radius {}: {} of {} tables preserve the language, {} invertible",
                    report.radius,
                    report.test_len,
                    report.inverse_radius,
                    report.language_preserving,
                    report.table_space,
                    report.invertible
                ),
            ];
            for s in &report.survivors {
                lines.push(format!(
                    "  code {} -> {}",
                    s.outputs,
                    match (s.matched_power, s.recovered_offset) {
                        (Some(k), Some(r)) => format!("shift power {k} (pipeline offset {r})"),
                        (Some(k), None) => format!("shift power {k}"),
                        (None, _) => "EXOTIC".to_string(),
                    }
                ));
            }
            lines.push(format!("exotic: {}", report.exotic_count));
            let exotic = report.exotic_count > 0;
            out.emit("probe", report, lines.join("\n"));
            return Ok(if exotic { 2 } else { 0 });
        }
        Command::Phi {
            sched,
            power,
            radius,
            window_stage,
        } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let radius = radius.unwrap_or(power.unsigned_abs() as usize);
            let templates = stabilized_template_set(&schedule, 1, 10, &budget)?;
            let stage = match window_stage {
                Some(stage) => stage,
                None => window_stage_for(&schedule, templates.context_len, radius, &budget)?,
            };
            let lang = language(&schedule, 2 * radius + 1, true, &budget)?;
            let code = shift_power_code(power, radius, &lang)?;
            let window = OriginWord::tower_window(&schedule, stage, &budget)?;
            let matching = phi_map_normalized(&schedule, &window, &code, &templates, &budget)?;
            let violations = psi_conjugation_check(&matching)?;
            let recovered = recover_offset(&matching)?;
            #[derive(Serialize)]
            struct PhiOutcome {
                window_stage: usize,
                pre_shift: u64,
                pairs: usize,
                order_preserving: bool,
                injective: bool,
                surjective_on_safe: bool,
                offset_bound_ok: bool,
                psi_violations: usize,
                recovered_offset: i64,
            }
            let report = PhiOutcome {
                window_stage: stage,
                pre_shift: matching.pre_shift,
                pairs: matching.pairs.len(),
                order_preserving: matching.order_preserving,
                injective: matching.injective,
                surjective_on_safe: matching.surjective_on_safe,
                offset_bound_ok: matching.offset_bound_ok,
                psi_violations: violations.len(),
                recovered_offset: recovered,
            };
            let text = format!(
                "window stage {}: {} matched pairs, pre-shift {}, recovered offset {recovered}, {} gap violations",
                stage,
                matching.pairs.len(),
                matching.pre_shift,
                violations.len()
            );
            out.emit("phi", report, text);
        }
    }
    Ok(0)
}

fn run_point(cmd: PointCommand, budget: &Budget, out: &mut Output) -> Result<u8, Error> {
    match cmd {
        PointCommand::Locate { sched, addr, stage } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let location = locate(&schedule, addr, stage)?;
            let text = match location {
                rank1_core::points::PointLocation::Level { stage, index } => {
                    format!("level: stage {stage} index {index}")
                }
                rank1_core::points::PointLocation::Spacer { stage } => {
                    format!("spacer at stage {stage}")
                }
            };
            out.emit("point-locate", location, text);
        }
        PointCommand::Extend { sched, addr, copy } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let lifted = extend(&schedule, addr, copy)?;
            let text = lifted.to_string();
            out.emit("point-extend", lifted, text);
        }
        PointCommand::Margins { sched, addr } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let margins = interior_margin(&schedule, addr)?;
            let mut lines = vec![format!("down={} up={}", margins.down, margins.up)];
            for sm in &margins.per_stage {
                lines.push(match sm.margin {
                    Some((down, up)) => format!("  stage {}: down={down} up={up}", sm.stage),
                    None => format!("  stage {}: spacer", sm.stage),
                });
            }
            out.emit("point-margins", margins, lines.join("\n"));
        }
        PointCommand::Zwindow {
            sched,
            addr,
            radius,
        } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let window = match radius {
                Some(t) => z_window(&schedule, addr, t, budget)?,
                None => max_z_window(&schedule, addr, budget)?,
            };
            let text = format!("returns: {}", join(&window.returns));
            out.emit("point-zwindow", window, text);
        }
        PointCommand::Psi {
            sched,
            addr,
            radius,
        } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let window = match radius {
                Some(t) => z_window(&schedule, addr, t, budget)?,
                None => max_z_window(&schedule, addr, budget)?,
            };
            let gaps = psi(&window)?;
            let text = gaps
                .entries
                .iter()
                .map(|(at, gap)| format!("psi({at}) = {gap}"))
                .collect::<Vec<_>>()
                .join("\n");
            out.emit("point-psi", gaps, text);
        }
        PointCommand::Congruence {
            sched,
            addr,
            stage,
            radius,
        } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let report = psi_congruence_report(&schedule, addr, radius, stage, budget)?;
            let mut lines = vec![format!(
                "r_{} = {}, anchor {}, {} constant / {} varying ({})",
                report.stage,
                report.modulus,
                report.anchor,
                report.constant_classes,
                report.varying_classes,
                if report.asserted {
                    "asserted: unbounded spacer runs"
                } else {
                    "descriptive only"
                }
            )];
            for class in &report.classes {
                lines.push(format!(
                    "  class {} ({}): {}",
                    class.residue,
                    if class.constant { "constant" } else { "varying" },
                    join(&class.values)
                ));
            }
            out.emit("point-congruence", report, lines.join("\n"));
        }
        PointCommand::Separate {
            sched,
            first,
            second,
            radius,
        } => {
            let (schedule, label) = sched.load()?;
            out.config.schedule = Some(label);
            let report = separation_check(&schedule, first, second, radius, budget)?;
            let text = format!(
                "separating level: {}; windows {} (radius {})",
                match report.separating_level {
                    Some((stage, index)) => format!("stage {stage}, index {index}"),
                    None => "none".to_string(),
                },
                if report.windows_differ { "differ" } else { "agree" },
                report.radius_used
            );
            out.emit("point-separate", report, text);
        }
    }
    Ok(0)
}

fn join<T: std::fmt::Display>(values: &[T]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}
