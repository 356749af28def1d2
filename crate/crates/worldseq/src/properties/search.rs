//! Bounded counterexample search over synthetic systems and user scenarios.
//!
//! Witness enumeration order, which the reported minimal counterexample is
//! defined against, is: systems first (complete-graph synthetic universes of
//! 1, 2, ... `max_worlds` worlds, then the user scenario if one was given),
//! then total binding size (sum of sequence lengths plus one per bound
//! world), then utility-assignment index, then the lexicographic rank of the
//! binding tuple (each sequence ordered by length, then world ids).
//!
//! Synthetic worlds are interchangeable, so utility assignments are
//! enumerated in canonical non-decreasing form; any violating assignment has
//! a canonical image, which keeps the search complete within bounds.
//! Utility enumeration is partitioned across parallel workers and reduced to
//! the minimal hit, so the verdict is identical for any worker count.

use std::collections::HashMap;
use std::ops::Range;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::claims::published_claim;
use super::{check_instance, CheckOutcome, PropertyId, Variants, Witness};
use crate::aggregate::{Aggregator, UtilityFunction};
use crate::model::{Action, ArcMode, Literal, TransitionSystem, World};
use crate::scalar::{rat, Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    Randomized { samples: usize },
}

/// Bounds and knobs of one search run.
#[derive(Debug, Clone)]
pub struct SearchConfig<S> {
    /// Largest synthetic universe, in worlds.
    pub max_worlds: usize,
    /// Utility values each synthetic world may take.
    pub utility_grid: Vec<S>,
    /// Maximum entries per bound sequence.
    pub max_seq_len: usize,
    pub mode: SearchMode,
    pub seed: u64,
    pub variants: Variants,
}

impl Default for SearchConfig<Rational> {
    fn default() -> Self {
        SearchConfig {
            max_worlds: 3,
            utility_grid: vec![
                rat(-1, 1),
                rat(-9, 10),
                rat(-3, 10),
                rat(-1, 5),
                rat(-1, 100),
                rat(0, 1),
                rat(1, 5),
                rat(2, 5),
                rat(1, 2),
                rat(1, 1),
            ],
            max_seq_len: 4,
            mode: SearchMode::Exhaustive,
            seed: 42,
            variants: Variants::default(),
        }
    }
}

/// Serializable record of the bounds a verdict was produced under.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsRecord {
    pub max_worlds: usize,
    pub max_seq_len: usize,
    pub utility_grid: Vec<String>,
    pub mode: SearchMode,
    pub seed: u64,
    pub losses_variant: super::LossesVariant,
    pub redundancy_precondition: bool,
    pub systems: Vec<String>,
}

impl BoundsRecord {
    fn of<S: Scalar>(config: &SearchConfig<S>, systems: Vec<String>) -> Self {
        BoundsRecord {
            max_worlds: config.max_worlds,
            max_seq_len: config.max_seq_len,
            utility_grid: config.utility_grid.iter().map(|v| v.to_string()).collect(),
            mode: config.mode,
            seed: config.seed,
            losses_variant: config.variants.losses,
            redundancy_precondition: config.variants.redundancy_precondition,
            systems,
        }
    }
}

/// Outcome of one search: confirmed within the bounds, or refuted with the
/// minimal witness in enumeration order.
#[derive(Debug, Clone)]
pub enum VerdictStatus<S> {
    ConfirmedWithinBounds,
    Refuted {
        witness: Witness<S>,
        details: String,
    },
}

#[derive(Debug, Clone)]
pub struct Verdict<S> {
    pub property: PropertyId,
    pub aggregator: Aggregator,
    pub status: VerdictStatus<S>,
    pub published_claim: Option<bool>,
    pub discrepancy: bool,
    pub bounds: BoundsRecord,
}

impl<S> Verdict<S> {
    pub fn is_refuted(&self) -> bool {
        matches!(self.status, VerdictStatus::Refuted { .. })
    }

    pub fn witness(&self) -> Option<&Witness<S>> {
        match &self.status {
            VerdictStatus::Refuted { witness, .. } => Some(witness),
            VerdictStatus::ConfirmedWithinBounds => None,
        }
    }
}

/// Complete-graph synthetic universe of `n` abstract worlds. Each world
/// carries a private marker proposition and every ordered pair (self-loops
/// included) is an arc, so any id string is a valid sequence.
pub fn synthetic_system(n: usize) -> TransitionSystem {
    assert!(n >= 1, "synthetic universe needs at least one world");
    let ids: Vec<String> = (0..n).map(world_name).collect();
    let worlds: Vec<World> = ids
        .iter()
        .map(|id| World::new(id.clone(), [format!("at_{id}")]))
        .collect();
    let mut actions = Vec::new();
    for from in &ids {
        for to in &ids {
            let mut post = vec![Literal::pos(format!("at_{to}"))];
            if from != to {
                post.push(Literal::neg(format!("at_{from}")));
            }
            actions.push(Action::new(
                format!("t_{from}_{to}"),
                [format!("at_{from}")],
                post,
            ));
        }
    }
    TransitionSystem::build(worlds, actions, &ids[0], ArcMode::Derived, &[])
        .expect("synthetic system construction cannot fail")
}

fn world_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("w{i}")
    }
}

/// All valid sequences of `ts` with at most `max_len` entries, from any
/// start world, ordered by (length, lexicographic world ids).
pub fn all_sequences(ts: &TransitionSystem, max_len: usize) -> Vec<Vec<String>> {
    let ids: Vec<String> = ts.world_ids().map(str::to_string).collect();
    let mut levels: Vec<Vec<Vec<String>>> = vec![ids.iter().map(|id| vec![id.clone()]).collect()];
    for _ in 1..max_len {
        let prev = levels.last().expect("at least one level");
        let mut next = Vec::new();
        for seq in prev {
            let last = seq.last().expect("non-empty");
            for succ in ts.successors(last) {
                let mut ext = seq.clone();
                ext.push(succ.to_string());
                next.push(ext);
            }
        }
        levels.push(next);
    }
    levels.into_iter().flatten().collect()
}

struct SysCtx<S> {
    label: String,
    ts: TransitionSystem,
    ids: Vec<String>,
    arc: Vec<Vec<bool>>,
    /// All sequences with <= max_seq_len entries, sorted by (len, lex).
    seqs: Vec<Vec<u16>>,
    /// Index ranges of `seqs` per length (1-based).
    ranges: Vec<Range<usize>>,
    /// Candidate utility assignments, one value per world index.
    assignments: Vec<Vec<S>>,
}

impl<S: Scalar> SysCtx<S> {
    fn new(
        label: String,
        ts: TransitionSystem,
        max_seq_len: usize,
        assignments: Vec<Vec<S>>,
    ) -> Self {
        let ids: Vec<String> = ts.world_ids().map(str::to_string).collect();
        let index_of = |id: &str| ids.iter().position(|x| x == id).expect("known world") as u16;
        let n = ids.len();
        let mut arc = vec![vec![false; n]; n];
        for (f, t, _) in ts.arcs() {
            arc[index_of(f) as usize][index_of(t) as usize] = true;
        }
        let mut seqs = Vec::new();
        let mut ranges = Vec::new();
        ranges.push(0..0);
        for raw in all_sequences(&ts, max_seq_len) {
            seqs.push(raw.iter().map(|id| index_of(id)).collect::<Vec<u16>>());
        }
        let mut start = 0;
        for len in 1..=max_seq_len {
            let end = seqs.iter().take_while(|s| s.len() <= len).count();
            ranges.push(start..end);
            start = end;
        }
        SysCtx {
            label,
            ts,
            ids,
            arc,
            seqs,
            ranges,
            assignments,
        }
    }

    fn sequence(&self, idx: usize) -> crate::model::WorldSequence {
        let ids: Vec<String> = self.seqs[idx]
            .iter()
            .map(|&i| self.ids[i as usize].clone())
            .collect();
        self.ts
            .validate_sequence(&ids)
            .expect("enumerated sequences are valid")
    }
}

fn nondecreasing_assignments<S: Clone>(grid: &[S], n: usize) -> Vec<Vec<S>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = Vec::with_capacity(n);
    fn rec<S: Clone>(
        grid: &[S],
        n: usize,
        start: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<S>>,
    ) {
        if current.len() == n {
            out.push(current.iter().map(|&i| grid[i].clone()).collect());
            return;
        }
        for i in start..grid.len() {
            current.push(i);
            rec(grid, n, i, current, out);
            current.pop();
        }
    }
    rec(grid, n, 0, &mut current, &mut out);
    out
}

/// A violation found during the scan; ordered by the documented enumeration
/// order (budget, utility index, tuple rank).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Hit {
    budget: usize,
    u_idx: usize,
    rank: u64,
    seq_idxs: Vec<usize>,
    world_idxs: Vec<usize>,
}

struct UScan<'a, S> {
    sys: &'a SysCtx<S>,
    aggregator: Aggregator,
    utils: &'a [S],
    /// sigma per base sequence index.
    sigma: Vec<S>,
    /// sigma of seq a followed by seq b, keyed by (a << 32 | b).
    cat2: HashMap<u64, S>,
    /// sigma of seq a followed by seq b twice.
    cat3: HashMap<u64, S>,
    scratch: Vec<u16>,
}

impl<'a, S: Scalar> UScan<'a, S> {
    fn new(sys: &'a SysCtx<S>, aggregator: Aggregator, utils: &'a [S]) -> Self {
        let sigma = sys
            .seqs
            .iter()
            .map(|s| aggregator.evaluate_core(s, |&k| utils[k as usize].clone()))
            .collect();
        UScan {
            sys,
            aggregator,
            utils,
            sigma,
            cat2: HashMap::new(),
            cat3: HashMap::new(),
            scratch: Vec::new(),
        }
    }

    fn eval(&self, worlds: &[u16]) -> S {
        self.aggregator
            .evaluate_core(worlds, |&k| self.utils[k as usize].clone())
    }

    fn joinable(&self, a: usize, b: usize) -> bool {
        let last = *self.sys.seqs[a].last().expect("non-empty") as usize;
        let first = self.sys.seqs[b][0] as usize;
        self.sys.arc[last][first]
    }

    fn sigma_cat2(&mut self, a: usize, b: usize) -> S {
        let key = (a as u64) << 32 | b as u64;
        if let Some(v) = self.cat2.get(&key) {
            return v.clone();
        }
        self.scratch.clear();
        self.scratch.extend_from_slice(&self.sys.seqs[a]);
        self.scratch.extend_from_slice(&self.sys.seqs[b]);
        let v = self
            .aggregator
            .evaluate_core(&self.scratch, |&k| self.utils[k as usize].clone());
        self.cat2.insert(key, v.clone());
        v
    }

    fn sigma_cat3(&mut self, a: usize, b: usize) -> S {
        let key = (a as u64) << 32 | b as u64;
        if let Some(v) = self.cat3.get(&key) {
            return v.clone();
        }
        self.scratch.clear();
        self.scratch.extend_from_slice(&self.sys.seqs[a]);
        self.scratch.extend_from_slice(&self.sys.seqs[b]);
        self.scratch.extend_from_slice(&self.sys.seqs[b]);
        let v = self
            .aggregator
            .evaluate_core(&self.scratch, |&k| self.utils[k as usize].clone());
        self.cat3.insert(key, v.clone());
        v
    }
}

/// Scans every binding tuple for one utility assignment, budgets ascending,
/// and returns the first (minimal) violation.
fn scan_u<S: Scalar + Ord>(
    property: PropertyId,
    aggregator: Aggregator,
    variants: &Variants,
    sys: &SysCtx<S>,
    u_idx: usize,
) -> Option<Hit> {
    let utils = &sys.assignments[u_idx];
    let mut scan = UScan::new(sys, aggregator, utils);
    let (n_seqs, n_worlds) = property.arity();
    let max_len = sys.ranges.len() - 1;
    let min_budget = n_seqs + n_worlds;
    let max_budget = n_seqs * max_len + n_worlds;
    for budget in min_budget..=max_budget {
        let hit = scan_budget(property, variants, sys, &mut scan, u_idx, budget);
        if hit.is_some() {
            return hit;
        }
    }
    None
}

fn scan_budget<S: Scalar + Ord>(
    property: PropertyId,
    variants: &Variants,
    sys: &SysCtx<S>,
    scan: &mut UScan<S>,
    u_idx: usize,
    budget: usize,
) -> Option<Hit> {
    let n = sys.ids.len();
    let max_len = sys.ranges.len() - 1;
    let len_of = |idx: usize| sys.seqs[idx].len();
    let mut rank: u64 = 0;
    let hit = |rank: u64, seq_idxs: Vec<usize>, world_idxs: Vec<usize>| Hit {
        budget,
        u_idx,
        rank,
        seq_idxs,
        world_idxs,
    };

    match property {
        PropertyId::NonRecovery => {
            for s1 in 0..sys.seqs.len() {
                let l1 = len_of(s1);
                if l1 + 2 > budget {
                    break;
                }
                for s2 in 0..sys.seqs.len() {
                    let l2 = len_of(s2);
                    let Some(l3) = budget.checked_sub(l1 + l2) else {
                        break;
                    };
                    if l3 < 1 || l3 > max_len {
                        continue;
                    }
                    for s3 in sys.ranges[l3].clone() {
                        rank += 1;
                        if !scan.joinable(s3, s2) {
                            continue;
                        }
                        let v1 = scan.sigma[s1].clone();
                        if v1 >= scan.sigma[s3] && v1 < scan.sigma_cat2(s3, s2) {
                            return Some(hit(rank, vec![s1, s2, s3], vec![]));
                        }
                    }
                }
            }
        }
        PropertyId::LossConservation => {
            for s1 in 0..sys.seqs.len() {
                let l1 = len_of(s1);
                if l1 + 1 > budget {
                    break;
                }
                let Some(l2) = budget.checked_sub(l1) else {
                    break;
                };
                if l2 < 1 || l2 > max_len {
                    continue;
                }
                for s2 in sys.ranges[l2].clone() {
                    rank += 1;
                    if !scan.joinable(s1, s2) {
                        continue;
                    }
                    let v1 = scan.sigma[s1].clone();
                    if scan.sigma[s2] > S::zero() && v1 >= scan.sigma_cat2(s1, s2) {
                        return Some(hit(rank, vec![s1, s2], vec![]));
                    }
                }
            }
        }
        PropertyId::Redundancy => {
            for s1 in 0..sys.seqs.len() {
                let l1 = len_of(s1);
                if l1 + 1 > budget {
                    break;
                }
                let Some(l2) = budget.checked_sub(l1) else {
                    break;
                };
                if l2 < 1 || l2 > max_len {
                    continue;
                }
                for s2 in sys.ranges[l2].clone() {
                    rank += 1;
                    if !scan.joinable(s1, s2) || !scan.joinable(s2, s2) {
                        continue;
                    }
                    let once = scan.sigma_cat2(s1, s2);
                    let first = scan.sigma[s1].clone() - once.clone();
                    if variants.redundancy_precondition && first.is_zero() {
                        continue;
                    }
                    let twice = scan.sigma_cat3(s1, s2);
                    let second = once - twice;
                    if !(first.abs() > second.abs()) {
                        return Some(hit(rank, vec![s1, s2], vec![]));
                    }
                }
            }
        }
        PropertyId::Independence => {
            if n < 2 {
                return None;
            }
            let l1 = budget.checked_sub(1)?;
            if l1 < 1 || l1 > max_len {
                return None;
            }
            for s1 in sys.ranges[l1].clone() {
                for w in 0..n {
                    if sys.seqs[s1].contains(&(w as u16)) {
                        continue;
                    }
                    rank += 1;
                    // The restriction leaves the sequence and the utilities
                    // of its worlds untouched; evaluate both sides exactly.
                    let full = scan.sigma[s1].clone();
                    let restricted = scan.eval(&sys.seqs[s1]);
                    if full != restricted {
                        return Some(hit(rank, vec![s1], vec![w]));
                    }
                }
            }
        }
        PropertyId::DecreasingBenefits | PropertyId::IncreasingLosses => {
            let l1 = budget.checked_sub(2)?;
            if l1 < 1 || l1 > max_len {
                return None;
            }
            for s1 in sys.ranges[l1].clone() {
                let last = *sys.seqs[s1].last().expect("non-empty") as usize;
                for w in 0..n {
                    for w2 in 0..n {
                        rank += 1;
                        if !sys.arc[last][w] || !sys.arc[w][w2] {
                            continue;
                        }
                        scan.scratch.clear();
                        scan.scratch.extend_from_slice(&sys.seqs[s1]);
                        scan.scratch.push(w as u16);
                        let ext1 = std::mem::take(&mut scan.scratch);
                        let v1 = scan.eval(&ext1);
                        let mut ext2 = ext1;
                        ext2.push(w2 as u16);
                        let v2 = scan.eval(&ext2);
                        scan.scratch = ext2;
                        let v0 = scan.sigma[s1].clone();
                        let violated = if property == PropertyId::DecreasingBenefits {
                            v0 < v1
                                && v1 < v2
                                && !(v2.clone() - v1.clone() < v1.clone() - v0.clone())
                        } else {
                            let premise = v0 > v1 && v1 > v2;
                            premise && {
                                let second = v2.clone() - v1.clone();
                                let first = v1.clone() - v0.clone();
                                match variants.losses {
                                    super::LossesVariant::Printed => !(second > first),
                                    super::LossesVariant::Prose => !(second < first),
                                }
                            }
                        };
                        if violated {
                            return Some(hit(rank, vec![s1], vec![w, w2]));
                        }
                    }
                }
            }
        }
        PropertyId::ZeroInitialisation | PropertyId::ValueInitialisation => {
            if budget != 1 {
                return None;
            }
            for w in 0..n {
                rank += 1;
                let v = scan.eval(&[w as u16]);
                let violated = match property {
                    PropertyId::ZeroInitialisation => !v.is_zero(),
                    _ => v != scan.utils[w],
                };
                if violated {
                    return Some(hit(rank, vec![], vec![w]));
                }
            }
        }
        PropertyId::WeakAdditivity => {
            let l = budget.checked_sub(1)?;
            if l < 1 || l > max_len {
                return None;
            }
            for s in sys.ranges[l].clone() {
                let last = *sys.seqs[s].last().expect("non-empty") as usize;
                for w in 0..n {
                    rank += 1;
                    if !sys.arc[last][w] {
                        continue;
                    }
                    scan.scratch.clear();
                    scan.scratch.extend_from_slice(&sys.seqs[s]);
                    scan.scratch.push(w as u16);
                    let ext = std::mem::take(&mut scan.scratch);
                    let after = scan.eval(&ext);
                    scan.scratch = ext;
                    let before = &scan.sigma[s];
                    let uw = &scan.utils[w];
                    let violated = (*uw >= S::zero() && after < *before)
                        || (*uw <= S::zero() && after > *before);
                    if violated {
                        return Some(hit(rank, vec![s], vec![w]));
                    }
                }
            }
        }
    }
    None
}

fn build_witness<S: Scalar>(sys: &SysCtx<S>, hit: &Hit) -> Witness<S> {
    let utils = &sys.assignments[hit.u_idx];
    let u = UtilityFunction::new(
        sys.ids
            .iter()
            .zip(utils)
            .map(|(id, v)| (id.clone(), v.clone())),
    )
    .expect("grid utilities are in range");
    Witness {
        system: sys.ts.clone(),
        u,
        seqs: hit.seq_idxs.iter().map(|&i| sys.sequence(i)).collect(),
        worlds: hit.world_idxs.iter().map(|&w| sys.ids[w].clone()).collect(),
    }
}

fn search_systems<S: Scalar>(
    config: &SearchConfig<S>,
    scenario: Option<(&TransitionSystem, &UtilityFunction<S>)>,
) -> Vec<SysCtx<S>> {
    assert!(config.max_worlds >= 1, "max_worlds must be at least 1");
    assert!(config.max_seq_len >= 1, "max_seq_len must be at least 1");
    assert!(
        !config.utility_grid.is_empty(),
        "utility grid must be non-empty"
    );
    let mut systems = Vec::new();
    for n in 1..=config.max_worlds {
        systems.push(SysCtx::new(
            format!("synthetic-{n}"),
            synthetic_system(n),
            config.max_seq_len,
            nondecreasing_assignments(&config.utility_grid, n),
        ));
    }
    if let Some((ts, u)) = scenario {
        let assignment: Vec<S> = ts
            .world_ids()
            .map(|id| u.get(id).expect("scenario utilities are total").clone())
            .collect();
        systems.push(SysCtx::new(
            "scenario".to_string(),
            ts.clone(),
            config.max_seq_len,
            vec![assignment],
        ));
    }
    systems
}

/// Searches for a counterexample to `property` under `aggregator` within the
/// configured bounds, over synthetic complete-graph systems plus the user's
/// scenario when given.
pub fn search_counterexample<S: Scalar + Ord + Send + Sync>(
    property: PropertyId,
    aggregator: Aggregator,
    config: &SearchConfig<S>,
    scenario: Option<(&TransitionSystem, &UtilityFunction<S>)>,
) -> Verdict<S> {
    let systems = search_systems(config, scenario);
    let bounds = BoundsRecord::of(config, systems.iter().map(|s| s.label.clone()).collect());
    let status = match config.mode {
        SearchMode::Exhaustive => exhaustive(property, aggregator, config, &systems),
        SearchMode::Randomized { samples } => {
            randomized(property, aggregator, config, &systems, samples)
        }
    };
    let published_claim = published_claim(property, aggregator);
    let refuted = matches!(status, VerdictStatus::Refuted { .. });
    // Only a found (re-validated) witness can contradict a published check
    // mark; failing to find one within bounds never contradicts a published
    // cross, since the claimed counterexample may simply lie outside them.
    let discrepancy = published_claim == Some(true) && refuted;
    Verdict {
        property,
        aggregator,
        status,
        published_claim,
        discrepancy,
        bounds,
    }
}

fn confirm_refutation<S: Scalar>(
    property: PropertyId,
    aggregator: Aggregator,
    variants: &Variants,
    witness: Witness<S>,
) -> VerdictStatus<S> {
    // Every reported counterexample must re-validate through the reference
    // checker; a mismatch would be an internal inconsistency.
    match check_instance(property, aggregator, &witness, variants) {
        Ok(CheckOutcome::Violated { details }) => VerdictStatus::Refuted { witness, details },
        other => panic!("search produced a witness that does not re-validate: {other:?}"),
    }
}

fn exhaustive<S: Scalar + Ord + Send + Sync>(
    property: PropertyId,
    aggregator: Aggregator,
    config: &SearchConfig<S>,
    systems: &[SysCtx<S>],
) -> VerdictStatus<S> {
    for sys in systems {
        let best = (0..sys.assignments.len())
            .into_par_iter()
            .filter_map(|u_idx| scan_u(property, aggregator, &config.variants, sys, u_idx))
            .min();
        if let Some(hit) = best {
            let witness = build_witness(sys, &hit);
            return confirm_refutation(property, aggregator, &config.variants, witness);
        }
    }
    VerdictStatus::ConfirmedWithinBounds
}

fn randomized<S: Scalar + Ord + Send + Sync>(
    property: PropertyId,
    aggregator: Aggregator,
    config: &SearchConfig<S>,
    systems: &[SysCtx<S>],
    samples: usize,
) -> VerdictStatus<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (n_seqs, n_worlds) = property.arity();
    for _ in 0..samples {
        let sys = &systems[rng.gen_range(0..systems.len())];
        let n = sys.ids.len();
        if property == PropertyId::Independence && n < 2 {
            continue;
        }
        let utils: Vec<S> = if sys.assignments.len() == 1 {
            sys.assignments[0].clone()
        } else {
            (0..n)
                .map(|_| {
                    config
                        .utility_grid
                        .choose(&mut rng)
                        .expect("non-empty grid")
                        .clone()
                })
                .collect()
        };
        let seq_idxs: Vec<usize> = (0..n_seqs)
            .map(|_| rng.gen_range(0..sys.seqs.len()))
            .collect();
        let world_idxs: Vec<usize> = (0..n_worlds).map(|_| rng.gen_range(0..n)).collect();
        // Witness validity (arcs between bound parts) is checked by the
        // reference checker; skip samples it rejects.
        let u = UtilityFunction::new(
            sys.ids
                .iter()
                .zip(&utils)
                .map(|(id, v)| (id.clone(), v.clone())),
        )
        .expect("grid utilities are in range");
        let witness = Witness {
            system: sys.ts.clone(),
            u,
            seqs: seq_idxs.iter().map(|&i| sys.sequence(i)).collect(),
            worlds: world_idxs.iter().map(|&w| sys.ids[w].clone()).collect(),
        };
        match check_instance(property, aggregator, &witness, &config.variants) {
            Ok(CheckOutcome::Violated { details }) => {
                return VerdictStatus::Refuted { witness, details }
            }
            Ok(CheckOutcome::Holds) => {}
            Err(_) => {}
        }
    }
    VerdictStatus::ConfirmedWithinBounds
}

/// The full verdict matrix in the published row/column order, plus the
/// increasing-losses row re-checked under the alternative reading as a
/// footnote.
#[derive(Debug, Clone)]
pub struct Matrix<S> {
    pub verdicts: Vec<Verdict<S>>,
    pub losses_alternative: Vec<Verdict<S>>,
}

impl<S> Matrix<S> {
    pub fn cell(&self, property: PropertyId, aggregator: Aggregator) -> Option<&Verdict<S>> {
        self.verdicts
            .iter()
            .find(|v| v.property == property && v.aggregator == aggregator)
    }

    pub fn discrepancies(&self) -> impl Iterator<Item = &Verdict<S>> {
        self.verdicts.iter().filter(|v| v.discrepancy)
    }
}

/// Runs the search for every (property, aggregator) cell.
pub fn satisfaction_matrix<S: Scalar + Ord + Send + Sync>(
    aggregators: &[Aggregator],
    config: &SearchConfig<S>,
    scenario: Option<(&TransitionSystem, &UtilityFunction<S>)>,
) -> Matrix<S> {
    let mut verdicts = Vec::new();
    for property in PropertyId::ALL {
        for &aggregator in aggregators {
            verdicts.push(search_counterexample(
                property, aggregator, config, scenario,
            ));
        }
    }
    let alt_losses = match config.variants.losses {
        super::LossesVariant::Printed => super::LossesVariant::Prose,
        super::LossesVariant::Prose => super::LossesVariant::Printed,
    };
    let alt_config = SearchConfig {
        variants: Variants {
            losses: alt_losses,
            ..config.variants
        },
        ..config.clone()
    };
    let losses_alternative = aggregators
        .iter()
        .map(|&aggregator| {
            search_counterexample(
                PropertyId::IncreasingLosses,
                aggregator,
                &alt_config,
                scenario,
            )
        })
        .collect();
    Matrix {
        verdicts,
        losses_alternative,
    }
}
