//! Orbit search: norm reduction, simple-tail extraction, braid words
//! between full sequences, and perpendicular-category structure checks.
//!
//! Every word returned by any search here is re-applied and compared
//! before it is handed back, so a returned word is always exact; running
//! out of budget is reported as such and never as a wrong word.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ktheory::{EulerLattice, K0Class};
use crate::linalg::covector_kernel;
use crate::mutation::{apply_letter, apply_word, rotation_word, BraidWord};
use crate::sequences::{classify_rank0, ExcSeq, Rank0Class};

/// Entry ranks sorted descending; compared lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormVector(pub Vec<i64>);

/// Limits for the bounded searches. Results are deterministic for a fixed
/// budget and seed in single-threaded mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_depth: u32,
    pub seed: u64,
    /// Wall-clock limit in milliseconds, if any.
    pub time_limit_ms: Option<u64>,
    /// Expand search frontiers with a thread pool. Any returned word is
    /// valid regardless of scheduling.
    pub parallel: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 100_000,
            max_depth: 64,
            seed: 0,
            time_limit_ms: None,
            parallel: false,
        }
    }
}

impl SearchBudget {
    pub fn with_max_nodes(max_nodes: u64) -> Self {
        SearchBudget {
            max_nodes,
            ..Default::default()
        }
    }
}

struct BudgetClock {
    start: Instant,
    limit_ms: Option<u64>,
}

impl BudgetClock {
    fn new(budget: &SearchBudget) -> Self {
        BudgetClock {
            start: Instant::now(),
            limit_ms: budget.time_limit_ms,
        }
    }

    fn expired(&self) -> bool {
        match self.limit_ms {
            Some(ms) => self.start.elapsed().as_millis() as u64 >= ms,
            None => false,
        }
    }
}

pub fn rank_norm(lat: &EulerLattice, s: &ExcSeq) -> Result<NormVector> {
    let mut ranks = s
        .entries
        .iter()
        .map(|e| lat.rank_of(e))
        .collect::<Result<Vec<_>>>()?;
    ranks.sort_unstable_by(|a, b| b.cmp(a));
    Ok(NormVector(ranks))
}

/// One norm-reduction move: a short word (usually a single generator,
/// with norm-preserving transpositions first when the minimal Hom window
/// is wider than one) whose application strictly decreases the rank norm.
pub fn reduce_norm_step(lat: &EulerLattice, s: &ExcSeq) -> Result<(BraidWord, ExcSeq)> {
    if lat.weight_type().t() == 0 {
        return Err(Error::MalformedInput(
            "the weightless type has no rank-zero sheaves to reduce toward".into(),
        ));
    }
    let m = s.len();
    let base = rank_norm(lat, s)?;
    if base.0.iter().any(|&r| r < 1) {
        return Err(Error::MalformedInput(
            "norm reduction needs every entry of positive rank".into(),
        ));
    }

    // single generators first
    for slot in 1..m as i32 {
        for letter in [slot, -slot] {
            if let Ok((next, _)) = apply_letter(lat, s, letter) {
                if rank_norm(lat, &next)? < base {
                    return Ok((BraidWord::new(vec![letter]), next));
                }
            }
        }
    }

    // minimal-width Hom window, then transpose one endpoint adjacent
    for width in 2..m {
        for a in 1..=(m - width) {
            let b = a + width;
            let chi_ab = lat.euler_form(&s.entries[a - 1], &s.entries[b - 1])?;
            if chi_ab <= 0 {
                continue;
            }
            let mut word = Vec::new();
            let move_a_right = {
                let mut ok = true;
                for i in (a + 1)..b {
                    if lat.euler_form(&s.entries[a - 1], &s.entries[i - 1])? != 0 {
                        ok = false;
                        break;
                    }
                }
                ok
            };
            if move_a_right {
                word.extend((a as i32)..=(b as i32 - 2));
            } else {
                let mut ok = true;
                for i in (a + 1)..b {
                    if lat.euler_form(&s.entries[i - 1], &s.entries[b - 1])? != 0 {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    return Err(Error::ModelInconsistency(
                        "minimal Hom window has no orthogonal side".into(),
                    ));
                }
                word.extend(((a as i32 + 1)..=(b as i32 - 1)).rev());
            }
            let transposed = apply_word(lat, s, &BraidWord::new(word.clone()))?;
            let slot = if move_a_right { b as i32 - 1 } else { a as i32 };
            for letter in [slot, -slot] {
                if let Ok((next, _)) = apply_letter(lat, &transposed, letter) {
                    if rank_norm(lat, &next)? < base {
                        word.push(letter);
                        return Ok((BraidWord::new(word), next));
                    }
                }
            }
            return Err(Error::ModelInconsistency(
                "adjacent Hom pair admits no norm-decreasing mutation".into(),
            ));
        }
    }
    Err(Error::ModelInconsistency(
        "positive-rank sequence with no Hom pair".into(),
    ))
}

fn entry_tube_score(
    lat: &EulerLattice,
    e: &K0Class,
    filter: Option<usize>,
) -> Result<Option<i64>> {
    match classify_rank0(lat, e)? {
        Rank0Class::Tube { arm, len, .. } => {
            if filter.is_none_or(|f| f == arm) {
                Ok(Some(len))
            } else {
                Ok(None)
            }
        }
        _ => Ok(None),
    }
}

/// Minimal torsion length among tube entries matching the filter.
fn best_score(lat: &EulerLattice, s: &ExcSeq, filter: Option<usize>) -> Result<i64> {
    let mut best = i64::MAX;
    for e in &s.entries {
        if let Some(l) = entry_tube_score(lat, e, filter)? {
            best = best.min(l);
        }
    }
    Ok(best)
}

/// Rightmost slot (1-based) holding a simple that matches the filter.
fn simple_slot(lat: &EulerLattice, s: &ExcSeq, filter: Option<usize>) -> Result<Option<usize>> {
    for (k, e) in s.entries.iter().enumerate().rev() {
        if entry_tube_score(lat, e, filter)? == Some(1) {
            return Ok(Some(k + 1));
        }
    }
    Ok(None)
}

/// Rotates the rightmost matching simple into the last slot.
fn rotate_simple_to_tail(
    lat: &EulerLattice,
    s: &ExcSeq,
    filter: Option<usize>,
) -> Result<(BraidWord, ExcSeq)> {
    let m = s.len();
    let slot = simple_slot(lat, s, filter)?
        .ok_or_else(|| Error::ModelInconsistency("no matching simple entry to rotate".into()))?;
    let mut word = BraidWord::empty();
    let rot = rotation_word(m);
    for _ in slot..m {
        word = word.concat(&rot);
    }
    let out = apply_word(lat, s, &word)?;
    debug_assert_eq!(entry_tube_score(lat, &out.entries[m - 1], filter)?, Some(1));
    Ok((word, out))
}

/// Norm reduction until a rank-zero entry appears, then a best-first
/// search ordered by (minimal torsion length, rank norm) until a simple
/// entry (of the filtered arm, if any) shows up, then helix rotations to
/// put it last. Returns the witnessing word and the resulting sequence.
fn find_tail_filtered(
    lat: &EulerLattice,
    s: &ExcSeq,
    filter: Option<usize>,
    cap: u64,
    nodes: &mut u64,
) -> Result<(BraidWord, ExcSeq)> {
    let mut word = BraidWord::empty();
    let mut cur = s.clone();

    // phase A: strict norm reduction while all ranks are positive
    let step_cap = (lat.n() as i64)
        * lat.weight_type().weights().iter().copied().max().unwrap_or(1)
        * 10;
    let mut steps = 0i64;
    loop {
        if simple_slot(lat, &cur, filter)?.is_some() {
            let (rot, out) = rotate_simple_to_tail(lat, &cur, filter)?;
            return Ok((word.concat(&rot), out));
        }
        if rank_norm(lat, &cur)?.0.iter().any(|&r| r < 1) {
            break;
        }
        match reduce_norm_step(lat, &cur) {
            Ok((w, next)) => {
                word = word.concat(&w);
                cur = next;
            }
            Err(Error::ModelInconsistency(_)) => break,
            Err(e) => return Err(e),
        }
        steps += 1;
        if steps > step_cap {
            return Err(Error::SearchExhausted {
                nodes: *nodes,
                depth: steps as u32,
            });
        }
    }

    // phase B: best-first toward a matching simple entry
    let mut heap: BinaryHeap<Reverse<(i64, NormVector, u64)>> = BinaryHeap::new();
    let mut payload: HashMap<u64, ExcSeq> = HashMap::new();
    let mut parents: HashMap<Vec<u8>, (Vec<u8>, i32)> = HashMap::new();
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut id: u64 = 0;

    let root_fp = cur.fingerprint();
    seen.insert(root_fp.clone());
    heap.push(Reverse((best_score(lat, &cur, filter)?, rank_norm(lat, &cur)?, id)));
    payload.insert(id, cur.clone());
    id += 1;

    let mut expanded: u64 = 0;
    while let Some(Reverse((score, _, node_id))) = heap.pop() {
        let seq = payload.remove(&node_id).expect("payload tracks heap ids");
        if score == 1 {
            // reconstruct the path to this node
            let mut letters = Vec::new();
            let mut fp = seq.fingerprint();
            while let Some((pfp, letter)) = parents.get(&fp) {
                letters.push(*letter);
                fp = pfp.clone();
            }
            letters.reverse();
            let search_word = BraidWord::new(letters);
            let reached = apply_word(lat, &cur, &search_word)?;
            debug_assert_eq!(reached, seq);
            let (rot, out) = rotate_simple_to_tail(lat, &reached, filter)?;
            return Ok((word.concat(&search_word).concat(&rot), out));
        }
        expanded += 1;
        if expanded > cap {
            log::debug!("tail search cap {cap} hit");
            return Err(Error::SearchExhausted {
                nodes: *nodes,
                depth: 0,
            });
        }
        let fp = seq.fingerprint();
        for slot in 1..seq.len() as i32 {
            for letter in [slot, -slot] {
                let (child, _) = apply_letter(lat, &seq, letter)?;
                let cfp = child.fingerprint();
                if seen.insert(cfp.clone()) {
                    *nodes += 1;
                    parents.insert(cfp, (fp.clone(), letter));
                    heap.push(Reverse((
                        best_score(lat, &child, filter)?,
                        rank_norm(lat, &child)?,
                        id,
                    )));
                    payload.insert(id, child);
                    id += 1;
                }
            }
        }
    }
    log::debug!("tail search heap emptied after {expanded} expansions, {id} inserts");
    Err(Error::SearchExhausted {
        nodes: *nodes,
        depth: 0,
    })
}

/// Search result of [`find_simple_tail`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailResult {
    pub word: BraidWord,
    pub seq: ExcSeq,
}

/// Finds a word carrying the sequence to one whose last entry is a tube
/// simple. The word is verified by re-application before returning.
pub fn find_simple_tail(
    lat: &EulerLattice,
    s: &ExcSeq,
    budget: &SearchBudget,
) -> Result<TailResult> {
    let mut nodes = 0u64;
    let (word, seq) = find_tail_filtered(lat, s, None, budget.max_nodes, &mut nodes)?;
    if apply_word(lat, s, &word)? != seq {
        return Err(Error::ModelInconsistency(
            "tail search produced a non-verifying word".into(),
        ));
    }
    Ok(TailResult { word, seq })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Recursive,
    Bidirectional,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectReport {
    pub found: bool,
    pub word: Option<BraidWord>,
    pub nodes: u64,
    pub depth: u32,
}

enum RecOutcome {
    Word(BraidWord),
    Exhausted,
}

/// Searches for a braid word carrying `src` to `dst`. On success the word
/// re-applies exactly; running out of budget is reported in the result,
/// never as an unverified word.
pub fn find_braid_word(
    lat: &EulerLattice,
    src: &ExcSeq,
    dst: &ExcSeq,
    strategy: Strategy,
    budget: &SearchBudget,
) -> Result<ConnectReport> {
    if src.len() != dst.len() {
        return Err(Error::MalformedInput(
            "source and destination have different lengths".into(),
        ));
    }
    if src == dst {
        return Ok(ConnectReport {
            found: true,
            word: Some(BraidWord::empty()),
            nodes: 0,
            depth: 0,
        });
    }
    let mut nodes = 0u64;
    let outcome = match strategy {
        Strategy::Bidirectional => bidirectional_connect(lat, src, dst, budget, &mut nodes)?,
        Strategy::Recursive => {
            match recursive_connect(lat, src, dst, budget, &mut nodes)? {
                RecOutcome::Word(w) => Some(w),
                RecOutcome::Exhausted => None,
            }
        }
    };
    match outcome {
        Some(word) => {
            if apply_word(lat, src, &word)? != *dst {
                return Err(Error::ModelInconsistency(
                    "search produced a non-verifying word".into(),
                ));
            }
            let depth = word.len() as u32;
            Ok(ConnectReport {
                found: true,
                word: Some(word),
                nodes,
                depth,
            })
        }
        None => Ok(ConnectReport {
            found: false,
            word: None,
            nodes,
            depth: 0,
        }),
    }
}

fn expand_children(
    lat: &EulerLattice,
    frontier: &[ExcSeq],
    parallel: bool,
) -> Result<Vec<Vec<(i32, ExcSeq)>>> {
    let expand_one = |s: &ExcSeq| -> Result<Vec<(i32, ExcSeq)>> {
        let mut out = Vec::with_capacity(2 * (s.len() - 1));
        for slot in 1..s.len() as i32 {
            for letter in [slot, -slot] {
                out.push((letter, apply_letter(lat, s, letter)?.0));
            }
        }
        Ok(out)
    };
    if parallel {
        frontier.par_iter().map(expand_one).collect()
    } else {
        frontier.iter().map(expand_one).collect()
    }
}

fn walk_parents(parents: &HashMap<Vec<u8>, (Vec<u8>, i32)>, from: &[u8]) -> BraidWord {
    let mut letters = Vec::new();
    let mut cur = from.to_vec();
    while let Some((pfp, letter)) = parents.get(&cur) {
        letters.push(*letter);
        cur = pfp.clone();
    }
    letters.reverse();
    BraidWord::new(letters)
}

/// Two-frontier breadth-first search on fingerprints, always expanding the
/// smaller frontier one full level.
fn bidirectional_connect(
    lat: &EulerLattice,
    src: &ExcSeq,
    dst: &ExcSeq,
    budget: &SearchBudget,
    nodes: &mut u64,
) -> Result<Option<BraidWord>> {
    let clock = BudgetClock::new(budget);
    let mut parents_s: HashMap<Vec<u8>, (Vec<u8>, i32)> = HashMap::new();
    let mut parents_d: HashMap<Vec<u8>, (Vec<u8>, i32)> = HashMap::new();
    let mut seen_s: HashSet<Vec<u8>> = HashSet::new();
    let mut seen_d: HashSet<Vec<u8>> = HashSet::new();
    let mut frontier_s = vec![src.clone()];
    let mut frontier_d = vec![dst.clone()];
    seen_s.insert(src.fingerprint());
    seen_d.insert(dst.fingerprint());
    let mut depth = 0u32;

    loop {
        if frontier_s.is_empty() || frontier_d.is_empty() {
            return Ok(None);
        }
        if depth >= budget.max_depth || *nodes >= budget.max_nodes || clock.expired() {
            return Ok(None);
        }
        depth += 1;
        let from_src = frontier_s.len() <= frontier_d.len();
        let (frontier, seen, parents, other_seen) = if from_src {
            (&mut frontier_s, &mut seen_s, &mut parents_s, &seen_d)
        } else {
            (&mut frontier_d, &mut seen_d, &mut parents_d, &seen_s)
        };
        let batches = expand_children(lat, frontier, budget.parallel)?;
        let mut next = Vec::new();
        let mut meet: Option<Vec<u8>> = None;
        'level: for (parent, batch) in frontier.iter().zip(batches) {
            let pfp = parent.fingerprint();
            for (letter, child) in batch {
                let cfp = child.fingerprint();
                if seen.insert(cfp.clone()) {
                    *nodes += 1;
                    parents.insert(cfp.clone(), (pfp.clone(), letter));
                    if other_seen.contains(&cfp) {
                        meet = Some(cfp);
                        break 'level;
                    }
                    next.push(child);
                    if *nodes >= budget.max_nodes {
                        break 'level;
                    }
                }
            }
        }
        if let Some(meet_fp) = meet {
            let w_s = walk_parents(&parents_s, &meet_fp);
            let w_d = walk_parents(&parents_d, &meet_fp);
            return Ok(Some(w_s.concat(&w_d.inverse())));
        }
        *frontier = next;
    }
}

/// Perpendicular recursion: carry both sequences to a common simple tail,
/// recurse on the prefixes (whose classes stay in the perpendicular
/// sublattice of the tail), and stitch the words together. Pairs at the
/// bottom are connected by the degree walk. Each level gets a local node
/// cap for the structured path; when tail extraction or tube alignment
/// exhausts it (deep levels can leave a reduced tube with a single
/// admissible simple), the level's subproblem is handed to the
/// bidirectional search instead.
fn recursive_connect(
    lat: &EulerLattice,
    src: &ExcSeq,
    dst: &ExcSeq,
    budget: &SearchBudget,
    nodes: &mut u64,
) -> Result<RecOutcome> {
    if src == dst {
        return Ok(RecOutcome::Word(BraidWord::empty()));
    }
    if *nodes >= budget.max_nodes {
        return Ok(RecOutcome::Exhausted);
    }
    let m = src.len();
    log::debug!("recursive level m={m}, nodes so far {nodes}");
    if m == 2 {
        if let RecOutcome::Word(w) = base_pair_walk(lat, src, dst, budget, nodes)? {
            return Ok(RecOutcome::Word(w));
        }
        return level_bidirectional(lat, src, dst, budget, nodes);
    }

    // deep levels fail over quickly: after several perpendicular
    // reductions the residual tubes hold few admissible simples and the
    // bidirectional fallback is cheap there
    let cap = if m <= 3 {
        2_000
    } else {
        (budget.max_nodes / 8).clamp(5_000, 50_000)
    };
    match recursive_level(lat, src, dst, budget, cap, nodes)? {
        RecOutcome::Word(w) => Ok(RecOutcome::Word(w)),
        RecOutcome::Exhausted => {
            log::debug!("level m={m}: structured path exhausted, going bidirectional");
            level_bidirectional(lat, src, dst, budget, nodes)
        }
    }
}

fn level_bidirectional(
    lat: &EulerLattice,
    src: &ExcSeq,
    dst: &ExcSeq,
    budget: &SearchBudget,
    nodes: &mut u64,
) -> Result<RecOutcome> {
    let remaining = budget.max_nodes.saturating_sub(*nodes);
    if remaining == 0 {
        return Ok(RecOutcome::Exhausted);
    }
    let local = SearchBudget {
        max_nodes: remaining,
        ..budget.clone()
    };
    match bidirectional_connect(lat, src, dst, &local, nodes)? {
        Some(w) => Ok(RecOutcome::Word(w)),
        None => Ok(RecOutcome::Exhausted),
    }
}

/// One structured level: tail extraction on both sides, tube alignment,
/// then recursion on the prefixes.
fn recursive_level(
    lat: &EulerLattice,
    src: &ExcSeq,
    dst: &ExcSeq,
    budget: &SearchBudget,
    cap: u64,
    nodes: &mut u64,
) -> Result<RecOutcome> {
    let m = src.len();
    let (w_u, u) = match find_tail_filtered(lat, src, None, cap, nodes) {
        Ok(r) => r,
        Err(Error::SearchExhausted { .. }) => {
            log::debug!("level m={m}: source tail search exhausted");
            return Ok(RecOutcome::Exhausted);
        }
        Err(e) => return Err(e),
    };
    let (arm_u, _) = match classify_rank0(lat, &u.entries[m - 1])? {
        Rank0Class::Tube { arm, start, .. } => (arm, start),
        other => {
            return Err(Error::ModelInconsistency(format!(
                "tail search returned a non-simple tail: {other:?}"
            )))
        }
    };
    let (mut w_v, mut v) = match find_tail_filtered(lat, dst, Some(arm_u), cap, nodes) {
        Ok(r) => r,
        Err(Error::SearchExhausted { .. }) => {
            log::debug!("level m={m}: destination tail search exhausted (arm {arm_u})");
            return Ok(RecOutcome::Exhausted);
        }
        Err(e) => return Err(e),
    };

    // translate cycles on the whole sequence walk the tail around its
    // reduced tube until the classes agree
    let target = u.entries[m - 1].clone();
    if v.entries[m - 1] != target {
        let p_i = lat.weight_type().weight(arm_u)?;
        let rot = rotation_word(m);
        let mut cycle = BraidWord::empty();
        for _ in 0..m {
            cycle = cycle.concat(&rot);
        }
        let mut aligned = false;
        for _ in 0..=p_i {
            v = apply_word(lat, &v, &cycle)?;
            w_v = w_v.concat(&cycle);
            if v.entries[m - 1] == target {
                aligned = true;
                break;
            }
        }
        if !aligned {
            log::debug!("level m={m}: tube alignment failed in arm {arm_u}");
            return Ok(RecOutcome::Exhausted);
        }
    }

    let prefix_u = ExcSeq::new(u.entries[..m - 1].to_vec());
    let prefix_v = ExcSeq::new(v.entries[..m - 1].to_vec());
    match recursive_connect(lat, &prefix_u, &prefix_v, budget, nodes)? {
        RecOutcome::Word(w_rec) => Ok(RecOutcome::Word(
            w_u.concat(&w_rec).concat(&w_v.inverse()),
        )),
        other => Ok(other),
    }
}

/// Length-2 base case: iterate the slot-1 generator, with progress
/// measured by total degree. The degree gap of a pair is invariant along
/// the walk, so the number of steps is determined; budget guards keep a
/// degenerate gap from looping.
fn base_pair_walk(
    lat: &EulerLattice,
    src: &ExcSeq,
    dst: &ExcSeq,
    budget: &SearchBudget,
    nodes: &mut u64,
) -> Result<RecOutcome> {
    let deg = |s: &ExcSeq, k: usize| lat.degree_of(&s.entries[k]);
    let gap_src = deg(src, 1)? - deg(src, 0)?;
    let gap_dst = deg(dst, 1)? - deg(dst, 0)?;
    if gap_src != gap_dst || gap_src == 0 {
        return Ok(RecOutcome::Exhausted);
    }
    let d_src = deg(src, 0)? + deg(src, 1)?;
    let d_dst = deg(dst, 0)? + deg(dst, 1)?;
    let diff = d_src - d_dst;
    let step = 2 * gap_src;
    if diff % step != 0 {
        return Ok(RecOutcome::Exhausted);
    }
    let k = diff / step;
    if k.unsigned_abs() > budget.max_nodes.saturating_sub(*nodes) {
        return Ok(RecOutcome::Exhausted);
    }
    *nodes += k.unsigned_abs();
    let letters = vec![if k >= 0 { 1 } else { -1 }; k.unsigned_abs() as usize];
    let word = BraidWord::new(letters);
    if apply_word(lat, src, &word)? == *dst {
        Ok(RecOutcome::Word(word))
    } else {
        Ok(RecOutcome::Exhausted)
    }
}

/// Basis of the rank n-1 sublattice perpendicular to a simple class,
/// with the Euler form restricted to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerpLattice {
    pub basis: Vec<K0Class>,
    pub gram: Vec<Vec<i64>>,
}

pub fn perp_sublattice(lat: &EulerLattice, s_class: &K0Class) -> Result<PerpLattice> {
    match classify_rank0(lat, s_class)? {
        Rank0Class::Tube { len: 1, .. } => {}
        other => {
            return Err(Error::MalformedInput(format!(
                "perpendicular sublattice needs a tube simple, got {other:?}"
            )))
        }
    }
    let n = lat.n();
    // covector y |-> chi(s, y)
    let mut cov = vec![0i64; n];
    for (k, slot) in cov.iter_mut().enumerate() {
        *slot = lat.euler_form(s_class, &lat.basis_class(k))?;
    }
    let kernel = covector_kernel(&cov)?;
    let basis: Vec<K0Class> = kernel
        .into_iter()
        .map(|coeffs| K0Class { coeffs })
        .collect();
    let mut gram = vec![vec![0i64; basis.len()]; basis.len()];
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            gram[i][j] = lat.euler_form(a, b)?;
        }
    }
    Ok(PerpLattice { basis, gram })
}

/// Per-arm block of the wing structure report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WingBlock {
    pub arm: usize,
    pub size: i64,
    pub chain_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WingReport {
    pub ok: bool,
    pub count_ok: bool,
    pub blocks: Vec<WingBlock>,
    pub violations: Vec<String>,
}

/// Verifies the perpendicular-wing structure for a basis line bundle `L`:
/// the tube simples missing `L`'s index kill both `L` and `L(c)` under the
/// Euler form, and their mutual Gram matrix is a disjoint union of linear
/// chains, one per arm, of total size n - 2.
pub fn wing_gram_check(lat: &EulerLattice, line: &K0Class) -> Result<WingReport> {
    let n = lat.n();
    let k = (0..n).find(|&k| *line == lat.basis_class(k)).ok_or_else(|| {
        Error::MalformedInput("wing check expects one of the basis line bundle classes".into())
    })?;
    let y = &lat.basis_twists()[k];
    let line_c = lat.twist_class(line, &lat.weight_type().canonical_element())?;

    let mut violations = Vec::new();
    let mut blocks = Vec::new();
    let t = lat.weight_type().t();
    let mut wings: Vec<Vec<K0Class>> = Vec::with_capacity(t);
    for arm in 1..=t {
        let p_i = lat.weight_type().weight(arm)?;
        let offset = y.arm_coeffs()[arm - 1];
        let mut wing = Vec::with_capacity((p_i - 1) as usize);
        for s in 1..p_i {
            wing.push(lat.simple_class(arm, offset + s)?);
        }
        wings.push(wing);
    }

    for (wi, wing) in wings.iter().enumerate() {
        let arm = wi + 1;
        let mut chain_ok = true;
        for (a, sa) in wing.iter().enumerate() {
            let against_l = lat.euler_form(sa, line)?;
            if against_l != 0 {
                violations.push(format!("chi(S[{arm},{a}], L) = {against_l}"));
            }
            let against_lc = lat.euler_form(sa, &line_c)?;
            if against_lc != 0 {
                violations.push(format!("chi(S[{arm},{a}], L(c)) = {against_lc}"));
            }
            for (b, sb) in wing.iter().enumerate() {
                let chi = lat.euler_form(sa, sb)?;
                let expect = if a == b {
                    1
                } else if b + 1 == a {
                    -1
                } else {
                    0
                };
                if chi != expect {
                    chain_ok = false;
                    violations.push(format!(
                        "within arm {arm}: chi at ({a},{b}) is {chi}, expected {expect}"
                    ));
                }
            }
            // cross-tube entries all vanish
            for (wj, other) in wings.iter().enumerate() {
                if wi == wj {
                    continue;
                }
                for sb in other {
                    let chi = lat.euler_form(sa, sb)?;
                    if chi != 0 {
                        violations.push(format!(
                            "cross-tube chi between arms {arm} and {} is {chi}",
                            wj + 1
                        ));
                    }
                }
            }
        }
        blocks.push(WingBlock {
            arm,
            size: wing.len() as i64,
            chain_ok,
        });
    }

    let total: i64 = blocks.iter().map(|b| b.size).sum();
    let count_ok = total == (n as i64) - 2;
    if !count_ok {
        violations.push(format!("wing count {total} differs from n - 2 = {}", n - 2));
    }
    Ok(WingReport {
        ok: violations.is_empty(),
        count_ok,
        blocks,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub nodes_visited: u64,
    pub max_depth: u32,
    pub depth_counts: Vec<u64>,
    pub exhausted: bool,
}

/// Bounded breadth-first census of the mutation orbit of a sequence.
pub fn orbit_census(
    lat: &EulerLattice,
    s: &ExcSeq,
    budget: &SearchBudget,
    radius: Option<u32>,
) -> Result<OrbitReport> {
    let clock = BudgetClock::new(budget);
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut frontier = VecDeque::new();
    seen.insert(s.fingerprint());
    frontier.push_back(s.clone());
    let mut depth_counts = vec![1u64];
    let mut nodes = 1u64;
    let mut depth = 0u32;
    let mut exhausted = false;

    'outer: while !frontier.is_empty() {
        if let Some(r) = radius {
            if depth >= r {
                break;
            }
        }
        if depth >= budget.max_depth {
            break;
        }
        depth += 1;
        let level: Vec<ExcSeq> = frontier.drain(..).collect();
        let batches = expand_children(lat, &level, budget.parallel)?;
        let mut count_this_level = 0u64;
        for batch in batches {
            for (_, child) in batch {
                if nodes >= budget.max_nodes || clock.expired() {
                    exhausted = true;
                    break 'outer;
                }
                if seen.insert(child.fingerprint()) {
                    nodes += 1;
                    count_this_level += 1;
                    frontier.push_back(child);
                }
            }
        }
        depth_counts.push(count_this_level);
    }
    Ok(OrbitReport {
        nodes_visited: nodes,
        max_depth: depth,
        depth_counts,
        exhausted,
    })
}
