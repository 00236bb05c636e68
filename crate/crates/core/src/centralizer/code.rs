//! Radius-R sliding-block codes over a finite language, their exhaustive
//! enumeration, and constructive invertibility checking.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::word::Word;

use super::language::LanguageTable;

/// A local rule of radius R: a total map from the (2R+1)-factors of the
/// language to {0,1}. Applying it to a length-k word yields length k - 2R.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCode {
    radius: usize,
    inputs: Arc<Vec<Word>>,
    outputs: Vec<u8>,
}

impl BlockCode {
    pub fn new(radius: usize, inputs: Arc<Vec<Word>>, outputs: Vec<u8>) -> Self {
        debug_assert_eq!(inputs.len(), outputs.len());
        debug_assert!(inputs.windows(2).all(|w| w[0] < w[1]));
        BlockCode {
            radius,
            inputs,
            outputs,
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn window_len(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn inputs(&self) -> &[Word] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[u8] {
        &self.outputs
    }

    pub fn output_of(&self, window: &[u8]) -> Option<u8> {
        self.inputs
            .binary_search_by(|w| w.bits().cmp(window))
            .ok()
            .map(|i| self.outputs[i])
    }

    /// Applies the rule along `w`; errors if some window is missing from the
    /// table, i.e. the word is not in the language the code was built over.
    pub fn apply(&self, w: &[u8]) -> Result<Vec<u8>> {
        let win = self.window_len();
        if w.len() < win {
            return Err(Error::InvalidArgument(format!(
                "word of length {} is shorter than the code window {win}",
                w.len()
            )));
        }
        w.windows(win)
            .map(|window| {
                self.output_of(window)
                    .ok_or(Error::WordNotInLanguage { len: win })
            })
            .collect()
    }

    pub fn table(&self) -> impl Iterator<Item = (&Word, u8)> {
        self.inputs.iter().zip(self.outputs.iter().copied())
    }
}

/// Sorted (2R+1)-factors of the language, shared by all codes of one radius.
pub fn code_inputs(lang: &LanguageTable, radius: usize) -> Arc<Vec<Word>> {
    Arc::new(lang.factors(2 * radius + 1).iter().cloned().collect())
}

/// The power sigma^k as a radius-R code: window w maps to w[R + k].
pub fn shift_power_code(k: i64, radius: usize, lang: &LanguageTable) -> Result<BlockCode> {
    if k.unsigned_abs() as usize > radius {
        return Err(Error::OffsetExceedsRadius { offset: k, radius });
    }
    let inputs = code_inputs(lang, radius);
    let pick = (radius as i64 + k) as usize;
    let outputs = inputs.iter().map(|w| w.bits()[pick]).collect();
    Ok(BlockCode::new(radius, inputs, outputs))
}

const UNASSIGNED: i8 = -1;

struct EnumProblem {
    inputs: Arc<Vec<Word>>,
    radius: usize,
    /// Test words as sequences of input indices, one per sliding window.
    windows: Vec<Vec<u32>>,
    image_len: usize,
    image_sets: Vec<std::collections::BTreeSet<Word>>,
    node_limit: u64,
}

impl EnumProblem {
    fn new(lang: &LanguageTable, radius: usize, test_len: usize, budget: &Budget) -> Result<Self> {
        let win = 2 * radius + 1;
        if test_len > lang.max_len {
            return Err(Error::InvalidArgument(format!(
                "test length {test_len} exceeds language table length {}",
                lang.max_len
            )));
        }
        if test_len <= 2 * radius {
            return Err(Error::InvalidArgument(format!(
                "test length {test_len} leaves no image for radius {radius}"
            )));
        }
        let inputs = code_inputs(lang, radius);
        let index: BTreeMap<&[u8], u32> = inputs
            .iter()
            .enumerate()
            .map(|(i, w)| (w.bits(), i as u32))
            .collect();
        let windows = lang
            .factors(test_len)
            .iter()
            .map(|w| {
                w.bits()
                    .windows(win)
                    .map(|window| *index.get(window).expect("language is factor-closed"))
                    .collect()
            })
            .collect();
        let image_len = test_len - 2 * radius;
        // image_sets[len] = language factors of that length; index 0 unused.
        let mut image_sets = Vec::with_capacity(image_len + 1);
        image_sets.push(std::collections::BTreeSet::new());
        for len in 1..=image_len {
            image_sets.push(lang.factors(len).clone());
        }
        Ok(EnumProblem {
            inputs,
            radius,
            windows,
            image_len,
            image_sets,
            node_limit: budget.max_search_nodes,
        })
    }
}

/// Scan cursor: which test word / window is next, plus the image prefix of
/// the current word. Earlier words are fully determined and already checked.
#[derive(Clone)]
struct ScanState {
    assign: Vec<i8>,
    word: usize,
    pos: usize,
    image: Vec<u8>,
}

impl ScanState {
    fn fresh(problem: &EnumProblem) -> Self {
        ScanState {
            assign: vec![UNASSIGNED; problem.inputs.len()],
            word: 0,
            pos: 0,
            image: Vec::with_capacity(problem.image_len),
        }
    }

    fn done(&self, problem: &EnumProblem) -> bool {
        self.word == problem.windows.len()
    }

    /// Pushes the output bit of the current window; false if the grown image
    /// prefix leaves the language.
    fn try_extend(&mut self, problem: &EnumProblem, bit: u8) -> bool {
        self.image.push(bit);
        if !problem.image_sets[self.image.len()].contains(&self.image[..]) {
            return false;
        }
        if self.image.len() == problem.image_len {
            self.word += 1;
            self.pos = 0;
            self.image.clear();
        } else {
            self.pos += 1;
        }
        true
    }

    fn emit(&self, problem: &EnumProblem, out: &mut Vec<BlockCode>) {
        // Bi-extendability guarantees every input factor occurs in some test
        // word, so a finished scan has assigned everything.
        let unassigned: Vec<usize> = (0..self.assign.len())
            .filter(|&i| self.assign[i] == UNASSIGNED)
            .collect();
        let mut outputs: Vec<u8> = self.assign.iter().map(|&b| b.max(0) as u8).collect();
        if unassigned.is_empty() {
            out.push(BlockCode::new(
                problem.radius,
                problem.inputs.clone(),
                outputs,
            ));
            return;
        }
        // Unconstrained factors: every completion qualifies.
        let count = 1usize << unassigned.len();
        for mask in 0..count {
            for (bit, &idx) in unassigned.iter().enumerate() {
                outputs[idx] = ((mask >> bit) & 1) as u8;
            }
            out.push(BlockCode::new(
                problem.radius,
                problem.inputs.clone(),
                outputs.clone(),
            ));
        }
    }
}

enum StepOutcome {
    /// Reached a branch on this factor index.
    Branch(u32),
    /// All test words consumed.
    Finished,
    /// Some determined prefix left the language.
    Dead,
}

fn advance(problem: &EnumProblem, state: &mut ScanState) -> StepOutcome {
    loop {
        if state.done(problem) {
            return StepOutcome::Finished;
        }
        let factor = problem.windows[state.word][state.pos];
        let bit = state.assign[factor as usize];
        if bit == UNASSIGNED {
            return StepOutcome::Branch(factor);
        }
        if !state.try_extend(problem, bit as u8) {
            return StepOutcome::Dead;
        }
    }
}

fn dfs(
    problem: &EnumProblem,
    mut state: ScanState,
    out: &mut Vec<BlockCode>,
    nodes: &AtomicU64,
) -> Result<()> {
    match advance(problem, &mut state) {
        StepOutcome::Dead => Ok(()),
        StepOutcome::Finished => {
            state.emit(problem, out);
            Ok(())
        }
        StepOutcome::Branch(factor) => {
            for bit in [0i8, 1] {
                if nodes.fetch_add(1, Ordering::Relaxed) >= problem.node_limit {
                    return Err(Error::BudgetExceeded {
                        what: "code enumeration nodes".into(),
                        needed: nodes.load(Ordering::Relaxed),
                        limit: problem.node_limit,
                    });
                }
                let mut next = state.clone();
                next.assign[factor as usize] = bit;
                if next.try_extend(problem, bit as u8) {
                    dfs(problem, next, out, nodes)?;
                }
            }
            Ok(())
        }
    }
}

/// Frontier of viable partial assignments after `depth` branch levels, in
/// DFS order. Each entry resumes as an independent subtree.
fn frontier(
    problem: &EnumProblem,
    state: ScanState,
    depth: usize,
    out: &mut Vec<ScanState>,
    finished: &mut Vec<BlockCode>,
    nodes: &AtomicU64,
) -> Result<()> {
    if depth == 0 {
        out.push(state);
        return Ok(());
    }
    let mut state = state;
    match advance(problem, &mut state) {
        StepOutcome::Dead => Ok(()),
        StepOutcome::Finished => {
            state.emit(problem, finished);
            Ok(())
        }
        StepOutcome::Branch(factor) => {
            for bit in [0i8, 1] {
                if nodes.fetch_add(1, Ordering::Relaxed) >= problem.node_limit {
                    return Err(Error::BudgetExceeded {
                        what: "code enumeration nodes".into(),
                        needed: nodes.load(Ordering::Relaxed),
                        limit: problem.node_limit,
                    });
                }
                let mut next = state.clone();
                next.assign[factor as usize] = bit;
                if next.try_extend(problem, bit as u8) {
                    frontier(problem, next, depth - 1, out, finished, nodes)?;
                }
            }
            Ok(())
        }
    }
}

/// Exactly the total radius-R tables mapping every length-`test_len` factor
/// of the language to a factor. Depth-first with prefix pruning.
pub fn enumerate_codes(
    lang: &LanguageTable,
    radius: usize,
    test_len: usize,
    budget: &Budget,
) -> Result<Vec<BlockCode>> {
    #[cfg(feature = "parallel")]
    {
        enumerate_codes_par(lang, radius, test_len, budget)
    }
    #[cfg(not(feature = "parallel"))]
    {
        enumerate_codes_seq(lang, radius, test_len, budget)
    }
}

/// Sequential variant of [`enumerate_codes`]; same codes in the same order.
pub fn enumerate_codes_seq(
    lang: &LanguageTable,
    radius: usize,
    test_len: usize,
    budget: &Budget,
) -> Result<Vec<BlockCode>> {
    let problem = EnumProblem::new(lang, radius, test_len, budget)?;
    let nodes = AtomicU64::new(0);
    let mut out = Vec::new();
    dfs(&problem, ScanState::fresh(&problem), &mut out, &nodes)?;
    Ok(out)
}

#[cfg(feature = "parallel")]
fn enumerate_codes_par(
    lang: &LanguageTable,
    radius: usize,
    test_len: usize,
    budget: &Budget,
) -> Result<Vec<BlockCode>> {
    const SPLIT_DEPTH: usize = 8;
    let problem = EnumProblem::new(lang, radius, test_len, budget)?;
    let nodes = AtomicU64::new(0);
    let mut starts = Vec::new();
    let mut out = Vec::new();
    frontier(
        &problem,
        ScanState::fresh(&problem),
        SPLIT_DEPTH,
        &mut starts,
        &mut out,
        &nodes,
    )?;
    let branches: Vec<Result<Vec<BlockCode>>> = starts
        .into_par_iter()
        .map(|state| {
            let mut local = Vec::new();
            dfs(&problem, state, &mut local, &nodes)?;
            Ok(local)
        })
        .collect();
    for branch in branches {
        out.extend(branch?);
    }
    Ok(out)
}

/// Number of search-tree nodes a full enumeration would allocate without any
/// pruning; reported alongside actual nodes visited.
pub fn table_space(lang: &LanguageTable, radius: usize) -> u64 {
    let f = lang.factor_count(2 * radius + 1) as u32;
    if f >= 64 {
        u64::MAX
    } else {
        1u64 << f
    }
}

/// Constructive inverse search: radii 0..=max_radius in turn, forcing the
/// inverse table from center recovery and verifying both compositions on the
/// longest factors the table holds.
pub fn find_inverse(
    code: &BlockCode,
    lang: &LanguageTable,
    max_radius: usize,
) -> Result<Option<BlockCode>> {
    for r2 in 0..=max_radius {
        let need = 2 * code.radius() + 2 * r2 + 1;
        if need > lang.max_len {
            return Err(Error::InvalidArgument(format!(
                "inverse search at radius {r2} needs length-{need} factors, table stops at {}",
                lang.max_len
            )));
        }
        let mut forced: BTreeMap<Word, u8> = BTreeMap::new();
        let mut conflict = false;
        for w in lang.factors(need) {
            let image = Word::from_bits(code.apply(w.bits())?);
            let center = w.bits()[code.radius() + r2];
            match forced.entry(image) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(center);
                }
                std::collections::btree_map::Entry::Occupied(e) => {
                    if *e.get() != center {
                        conflict = true;
                        break;
                    }
                }
            }
        }
        if conflict {
            continue;
        }
        // Coverage is monotone in the radius: once the image misses a factor
        // here, it misses one at every larger radius too.
        if forced.len() < lang.factor_count(2 * r2 + 1) {
            return Ok(None);
        }
        let inputs = code_inputs(lang, r2);
        let outputs = inputs.iter().map(|w| forced[w]).collect();
        let candidate = BlockCode::new(r2, inputs, outputs);
        if compositions_are_identity(code, &candidate, lang) {
            return Ok(Some(candidate));
        }
    }
    Ok(None)
}

/// The codes possessing a two-sided inverse of radius at most `max_radius`,
/// paired with that inverse.
pub fn invertible_codes(
    codes: &[BlockCode],
    lang: &LanguageTable,
    max_radius: usize,
) -> Result<Vec<(BlockCode, BlockCode)>> {
    let mut out = Vec::new();
    for code in codes {
        if let Some(inverse) = find_inverse(code, lang, max_radius)? {
            out.push((code.clone(), inverse));
        }
    }
    Ok(out)
}

/// Both compositions act as the shift-trimmed identity on the longest factors
/// available in the table.
fn compositions_are_identity(code: &BlockCode, inverse: &BlockCode, lang: &LanguageTable) -> bool {
    let trim = code.radius() + inverse.radius();
    let len = lang.max_len;
    if len < 2 * trim + 1 {
        return false;
    }
    for w in lang.factors(len) {
        let bits = w.bits();
        let expect = &bits[trim..len - trim];
        let forward = match code.apply(bits).map(|mid| inverse.apply(&mid)) {
            Ok(Ok(out)) => out,
            _ => return false,
        };
        if forward != expect {
            return false;
        }
        let backward = match inverse.apply(bits).map(|mid| code.apply(&mid)) {
            Ok(Ok(out)) => out,
            _ => return false,
        };
        if backward != expect {
            return false;
        }
    }
    true
}
