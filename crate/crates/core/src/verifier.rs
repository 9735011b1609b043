//! Exhaustive search for mechanisms other than TTC.
//!
//! A mechanism on a finite profile space is one allocation per profile. IR
//! and the chosen efficiency notion filter the values of each profile;
//! strategyproofness links every pair of profiles that differ in a single
//! agent's report. The search keeps the constraint network arc consistent
//! and looks for any solution that leaves TTC somewhere.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::axioms::{is_ir, is_pair_efficient, is_pareto};
use crate::domains::{self, LinearOrderSpec};
use crate::error::{Error, Result};
use crate::mechanisms::TableMechanism;
use crate::model::{permutations, AgentId, Allocation, Domain, ObjectId, Profile, ProfileSpace};
use crate::richness::check_top_two;
use crate::ttc::ttc;

pub const MAX_AGENTS: usize = 6;
pub const DEFAULT_PROFILE_CAP: usize = 10_000;
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Efficiency {
    Pair,
    Pareto,
}

impl FromStr for Efficiency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pair" => Ok(Efficiency::Pair),
            "pareto" => Ok(Efficiency::Pareto),
            other => Err(Error::Format(format!("unknown efficiency notion `{other}`"))),
        }
    }
}

impl fmt::Display for Efficiency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Efficiency::Pair => "pair",
            Efficiency::Pareto => "pareto",
        })
    }
}

/// Allocations that are IR and efficient at `profile`, in lexicographic order.
pub fn candidate_allocations(profile: &Profile, efficiency: Efficiency) -> Result<Vec<Allocation>> {
    let n = profile.n();
    if n > MAX_AGENTS {
        return Err(Error::Budget(format!(
            "candidate enumeration supports at most {MAX_AGENTS} agents, got {n}"
        )));
    }
    let mut out = Vec::new();
    for perm in permutations(n) {
        let x = Allocation::from_vec_unchecked(perm.into_iter().map(ObjectId::from_zero).collect());
        if !is_ir(profile, &x)? {
            continue;
        }
        let efficient = match efficiency {
            Efficiency::Pair => is_pair_efficient(profile, &x)?,
            Efficiency::Pareto => is_pareto(profile, &x)?,
        };
        if efficient {
            out.push(x);
        }
    }
    Ok(out)
}

/// Per-profile candidate lists over a profile space.
#[derive(Clone, Debug)]
pub struct CandidateSets {
    space: ProfileSpace,
    lists: Vec<Vec<Allocation>>,
    ttc: Vec<usize>,
}

impl CandidateSets {
    pub fn new(domains: &[Domain], efficiency: Efficiency) -> Result<Self> {
        let space = ProfileSpace::new(domains.to_vec())?;
        let mut lists = Vec::with_capacity(space.len());
        let mut ttc_idx = Vec::with_capacity(space.len());
        for p in space.iter() {
            let list = candidate_allocations(&p, efficiency)?;
            let t = ttc(&p);
            let k = list
                .iter()
                .position(|x| *x == t)
                .expect("TTC is IR and Pareto efficient");
            lists.push(list);
            ttc_idx.push(k);
        }
        Ok(CandidateSets {
            space,
            lists,
            ttc: ttc_idx,
        })
    }

    pub fn space(&self) -> &ProfileSpace {
        &self.space
    }

    pub fn list(&self, profile: usize) -> &[Allocation] {
        &self.lists[profile]
    }

    pub fn ttc_index(&self, profile: usize) -> usize {
        self.ttc[profile]
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub profile_cap: usize,
    pub nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            profile_cap: DEFAULT_PROFILE_CAP,
            nodes: DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub profiles: usize,
    pub nodes: u64,
    pub wall_time_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    UniqueTtc,
    Multiple { witness: TableMechanism },
    Budget { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    #[serde(flatten)]
    pub status: Status,
    pub stats: Stats,
}

impl Classification {
    pub fn is_unique_ttc(&self) -> bool {
        matches!(self.status, Status::UniqueTtc)
    }

    pub fn is_multiple(&self) -> bool {
        matches!(self.status, Status::Multiple { .. })
    }

    pub fn is_budget(&self) -> bool {
        matches!(self.status, Status::Budget { .. })
    }

    pub fn witness(&self) -> Option<&TableMechanism> {
        match &self.status {
            Status::Multiple { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn status_name(&self) -> &'static str {
        match self.status {
            Status::UniqueTtc => "unique_ttc",
            Status::Multiple { .. } => "multiple",
            Status::Budget { .. } => "budget",
        }
    }

    /// Equality of everything except wall time.
    pub fn same_outcome(&self, other: &Classification) -> bool {
        self.status == other.status
            && self.stats.profiles == other.stats.profiles
            && self.stats.nodes == other.stats.nodes
    }
}

/// Decides whether TTC is the only IR, efficient and strategyproof
/// mechanism on the product of `domains`.
pub fn classify(domains: &[Domain], efficiency: Efficiency, budget: SearchBudget) -> Result<Classification> {
    let start = Instant::now();
    let space = ProfileSpace::new(domains.to_vec())?;
    let n = space.n();
    let mut stats = Stats {
        profiles: space.len(),
        ..Stats::default()
    };
    let early = if n > MAX_AGENTS {
        Some(format!("{n} agents exceeds the limit of {MAX_AGENTS}"))
    } else if space.len() > budget.profile_cap {
        Some(format!(
            "{} profiles exceeds the cap of {}",
            space.len(),
            budget.profile_cap
        ))
    } else {
        None
    };
    if let Some(reason) = early {
        stats.wall_time_ms = start.elapsed().as_millis() as u64;
        return Ok(Classification {
            status: Status::Budget { reason },
            stats,
        });
    }
    let sets = CandidateSets::new(domains, efficiency)?;
    let mut csp = Csp::new(&sets, budget.nodes);
    let outcome = csp.second_solution();
    stats.nodes = csp.nodes;
    let status = match outcome {
        Search::Exhausted => Status::UniqueTtc,
        Search::Found(values) => {
            let allocs = values
                .iter()
                .enumerate()
                .map(|(p, &v)| sets.lists[p][v].clone())
                .collect();
            Status::Multiple {
                witness: TableMechanism::from_space(&space, allocs)?,
            }
        }
        Search::OutOfNodes => Status::Budget {
            reason: format!("node budget of {} exhausted", budget.nodes),
        },
    };
    stats.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(Classification { status, stats })
}

enum Search {
    Found(Vec<usize>),
    Exhausted,
    OutOfNodes,
}

struct Frame {
    var: usize,
    order: Vec<usize>,
    next: usize,
    mark: usize,
}

/// Constraint network over profile indices. Values are candidate indices;
/// `alive` is a bitset with `words` u64 words per profile.
struct Csp<'a> {
    sets: &'a CandidateSets,
    n: usize,
    // digits[p * n + i] = index of agent i's report at profile p
    digits: Vec<u32>,
    // objects[p][v * n + i] = object index agent i gets under value v at p
    objects: Vec<Vec<u8>>,
    // positions[i][j * n + o] = rank of object o in agent i's j-th domain element
    positions: Vec<Vec<u8>>,
    words: usize,
    alive: Vec<u64>,
    count: Vec<u32>,
    trail: Vec<(u32, u32)>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    nodes: u64,
    node_budget: u64,
}

impl<'a> Csp<'a> {
    fn new(sets: &'a CandidateSets, node_budget: u64) -> Self {
        let space = &sets.space;
        let n = space.n();
        let len = sets.len();
        let max_vals = sets.lists.iter().map(Vec::len).max().unwrap_or(1);
        let words = max_vals.div_ceil(64);
        let mut digits = Vec::with_capacity(len * n);
        for p in 0..len {
            digits.extend(space.digits(p).into_iter().map(|d| d as u32));
        }
        let objects = sets
            .lists
            .iter()
            .map(|list| {
                list.iter()
                    .flat_map(|x| x.as_slice().iter().map(|o| o.idx() as u8))
                    .collect()
            })
            .collect();
        let positions = space
            .domains()
            .iter()
            .map(|d| {
                d.iter()
                    .flat_map(|p| {
                        (0..n).map(move |o| p.position(ObjectId::from_zero(o)) as u8)
                    })
                    .collect()
            })
            .collect();
        let mut alive = vec![0u64; len * words];
        let mut count = vec![0u32; len];
        for (p, list) in sets.lists.iter().enumerate() {
            for v in 0..list.len() {
                alive[p * words + v / 64] |= 1 << (v % 64);
            }
            count[p] = list.len() as u32;
        }
        Csp {
            sets,
            n,
            digits,
            objects,
            positions,
            words,
            alive,
            count,
            trail: Vec::new(),
            queue: VecDeque::new(),
            queued: vec![false; len],
            nodes: 0,
            node_budget,
        }
    }

    fn len(&self) -> usize {
        self.count.len()
    }

    fn is_alive(&self, p: usize, v: usize) -> bool {
        self.alive[p * self.words + v / 64] & (1 << (v % 64)) != 0
    }

    fn alive_values(&self, p: usize) -> Vec<usize> {
        (0..self.sets.lists[p].len())
            .filter(|&v| self.is_alive(p, v))
            .collect()
    }

    fn remove(&mut self, p: usize, v: usize) {
        self.alive[p * self.words + v / 64] &= !(1 << (v % 64));
        self.count[p] -= 1;
        self.trail.push((p as u32, v as u32));
    }

    fn restore(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (p, v) = self.trail.pop().expect("trail above mark");
            let (p, v) = (p as usize, v as usize);
            self.alive[p * self.words + v / 64] |= 1 << (v % 64);
            self.count[p] += 1;
        }
    }

    fn enqueue(&mut self, p: usize) {
        if !self.queued[p] {
            self.queued[p] = true;
            self.queue.push_back(p);
        }
    }

    fn clear_queue(&mut self) {
        for p in self.queue.drain(..) {
            self.queued[p] = false;
        }
    }

    /// Removes values of `p` with no support at `q`, its neighbor through
    /// agent `i`. Returns whether anything was removed.
    fn revise(&mut self, p: usize, q: usize, i: usize) -> bool {
        let n = self.n;
        let a = self.digits[p * n + i] as usize;
        let b = self.digits[q * n + i] as usize;
        let pos_a = &self.positions[i][a * n..(a + 1) * n];
        let pos_b = &self.positions[i][b * n..(b + 1) * n];
        let mut at_q: u32 = 0;
        for v in 0..self.sets.lists[q].len() {
            if self.is_alive(q, v) {
                at_q |= 1 << self.objects[q][v * n + i];
            }
        }
        // supported[x]: getting x at p (truth a) is compatible with some
        // alive y at q (truth b) in both deviation directions
        let mut supported: u32 = 0;
        for x in 0..n {
            let ok = (0..n).any(|y| {
                at_q & (1 << y) != 0 && pos_a[x] <= pos_a[y] && pos_b[y] <= pos_b[x]
            });
            if ok {
                supported |= 1 << x;
            }
        }
        let mut changed = false;
        for v in 0..self.sets.lists[p].len() {
            if self.is_alive(p, v) && supported & (1 << self.objects[p][v * n + i]) == 0 {
                self.remove(p, v);
                changed = true;
            }
        }
        changed
    }

    /// Propagates queued changes to a fixpoint; false on a wipeout.
    fn propagate(&mut self) -> bool {
        let space = &self.sets.space;
        while let Some(q) = self.queue.pop_front() {
            self.queued[q] = false;
            for i in 0..self.n {
                let agent = AgentId::from_zero(i);
                let own = self.digits[q * self.n + i] as usize;
                for j in 0..space.domain(agent).len() {
                    if j == own {
                        continue;
                    }
                    let p = space.neighbor(q, agent, j);
                    if self.revise(p, q, i) {
                        if self.count[p] == 0 {
                            self.clear_queue();
                            return false;
                        }
                        self.enqueue(p);
                    }
                }
            }
        }
        true
    }

    fn assign(&mut self, p: usize, v: usize) {
        for u in self.alive_values(p) {
            if u != v {
                self.remove(p, u);
            }
        }
        self.enqueue(p);
    }

    fn solution(&self) -> Vec<usize> {
        (0..self.len())
            .map(|p| self.alive_values(p)[0])
            .collect()
    }

    /// Most constrained open variable, ties to the smallest index.
    fn select(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for p in 0..self.len() {
            if self.count[p] > 1 && best.is_none_or(|b| self.count[p] < self.count[b]) {
                best = Some(p);
                if self.count[p] == 2 {
                    break;
                }
            }
        }
        best
    }

    fn value_order(&self, p: usize) -> Vec<usize> {
        let t = self.sets.ttc[p];
        let mut order = Vec::with_capacity(self.count[p] as usize);
        if self.is_alive(p, t) {
            order.push(t);
        }
        order.extend(self.alive_values(p).into_iter().filter(|&v| v != t));
        order
    }

    /// Depth-first search with maintained arc consistency from the current,
    /// already consistent state. Leaves the state as it found it unless a
    /// solution is returned.
    fn dfs(&mut self) -> Search {
        let mut stack: Vec<Frame> = Vec::new();
        loop {
            match self.select() {
                None => return Search::Found(self.solution()),
                Some(var) => stack.push(Frame {
                    var,
                    order: self.value_order(var),
                    next: 0,
                    mark: self.trail.len(),
                }),
            }
            loop {
                let Some(top) = stack.last_mut() else {
                    return Search::Exhausted;
                };
                let (var, mark) = (top.var, top.mark);
                if top.next == top.order.len() {
                    stack.pop();
                    self.restore(mark);
                    continue;
                }
                let v = top.order[top.next];
                top.next += 1;
                self.restore(mark);
                self.nodes += 1;
                if self.nodes > self.node_budget {
                    if let Some(bottom) = stack.first() {
                        let m = bottom.mark;
                        self.restore(m);
                    }
                    return Search::OutOfNodes;
                }
                self.assign(var, v);
                if self.propagate() {
                    break;
                }
            }
        }
    }

    /// Looks for a solution that differs from all-TTC somewhere. Profiles
    /// are tried in index order; once a profile is shown to be TTC in every
    /// solution it stays fixed for the rest of the search.
    fn second_solution(&mut self) -> Search {
        for p in 0..self.len() {
            self.enqueue(p);
        }
        let ok = self.propagate();
        debug_assert!(ok, "all-TTC is a solution");
        for t in 0..self.len() {
            if self.count[t] <= 1 {
                continue;
            }
            let tv = self.sets.ttc[t];
            let mark = self.trail.len();
            self.remove(t, tv);
            self.enqueue(t);
            if self.propagate() {
                match self.dfs() {
                    Search::Exhausted => {}
                    other => return other,
                }
            }
            self.restore(mark);
            self.assign(t, tv);
            let ok = self.propagate();
            debug_assert!(ok, "fixing TTC keeps all-TTC feasible");
        }
        Search::Exhausted
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    UniqueTtc,
    Multiple,
    Inconclusive,
}

impl Verdict {
    fn of(c: &Classification) -> Self {
        match c.status {
            Status::UniqueTtc => Verdict::UniqueTtc,
            Status::Multiple { .. } => Verdict::Multiple,
            Status::Budget { .. } => Verdict::Inconclusive,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorollaryRow {
    pub label: String,
    pub domain: Domain,
    pub top_two: bool,
    pub pair: Verdict,
    pub pareto: Verdict,
    /// The expected TTC-domain status, where one is known in advance.
    pub expected_unique: Option<bool>,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorollaryReport {
    pub n: usize,
    pub rows: Vec<CorollaryRow>,
    pub all_consistent: bool,
    pub inconclusive: usize,
}

pub struct CorollaryCase {
    pub label: String,
    pub domain: Domain,
    pub expected_unique: Option<bool>,
}

pub const CATALOG_SEED: u64 = 0x74_7463_5f6c_6162;
pub const CATALOG_SAMPLES: usize = 20;
pub const CATALOG_MAX_SIZE: usize = 10;

/// The domains checked by [`verify_corollary`]: all nonempty subsets of the
/// unrestricted domain for `n = 3` (bitmask order over lexicographic
/// permutations), and a fixed catalog for `n = 4`.
pub fn corollary_cases(n: usize) -> Result<Vec<CorollaryCase>> {
    match n {
        3 => {
            let all = domains::unrestricted(3)?;
            Ok((1u32..64)
                .map(|mask| {
                    let prefs: Vec<_> = all
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| mask & (1 << k) != 0)
                        .map(|(_, p)| p.clone())
                        .collect();
                    let domain = Domain::new(prefs).expect("nonempty subset");
                    let label = domain.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
                    CorollaryCase {
                        label,
                        domain,
                        expected_unique: None,
                    }
                })
                .collect())
        }
        4 => {
            let axis = LinearOrderSpec::identity(4, false);
            let cycle = LinearOrderSpec::identity(4, true);
            let case = |label: String, domain: Domain, unique: bool| CorollaryCase {
                label,
                domain,
                expected_unique: Some(unique),
            };
            let mut cases = vec![
                case("single_dipped".into(), domains::single_dipped(4, &axis)?, true),
                case("single_peaked".into(), domains::single_peaked(4, &axis)?, false),
                case("circular".into(), domains::circular(4, &cycle)?, false),
            ];
            for p in 1..=3 {
                cases.push(case(
                    format!("single_peaked_two_adjacent(p={p})"),
                    domains::single_peaked_two_adjacent(4, &axis, p)?,
                    true,
                ));
            }
            for (k, (spec, d)) in
                domains::partial_agreement_samples(4, CATALOG_SAMPLES, CATALOG_MAX_SIZE, CATALOG_SEED)?
                    .into_iter()
                    .enumerate()
            {
                cases.push(case(format!("partial_agreement#{k}[{spec}]"), d, true));
            }
            cases.push(case("d3".into(), domains::example_d3(), false));
            Ok(cases)
        }
        _ => Err(Error::Unsupported(format!(
            "the equivalence sweep covers n = 3 and n = 4, not n = {n}"
        ))),
    }
}

fn corollary_row(case: CorollaryCase, budget: SearchBudget) -> Result<CorollaryRow> {
    let n = case.domain.n();
    let doms = vec![case.domain.clone(); n];
    let top_two = check_top_two(&case.domain).satisfied;
    let pair = Verdict::of(&classify(&doms, Efficiency::Pair, budget)?);
    let pareto = Verdict::of(&classify(&doms, Efficiency::Pareto, budget)?);
    let as_verdict = |unique: bool| {
        if unique {
            Verdict::UniqueTtc
        } else {
            Verdict::Multiple
        }
    };
    let want = as_verdict(top_two);
    let consistent = (pair == Verdict::Inconclusive || pair == want)
        && (pareto == Verdict::Inconclusive || pareto == want)
        && case.expected_unique.is_none_or(|u| u == top_two);
    Ok(CorollaryRow {
        label: case.label,
        domain: case.domain,
        top_two,
        pair,
        pareto,
        expected_unique: case.expected_unique,
        consistent,
    })
}

/// Checks, domain by domain, that the top-two condition, uniqueness of TTC
/// under pair efficiency and uniqueness under Pareto efficiency coincide.
/// `jobs` bounds the worker count; rows come back in case order.
pub fn verify_corollary(n: usize, jobs: Option<usize>, budget: SearchBudget) -> Result<CorollaryReport> {
    let cases = corollary_cases(n)?;
    let run = || {
        cases
            .into_par_iter()
            .map(|c| corollary_row(c, budget))
            .collect::<Result<Vec<_>>>()
    };
    let rows = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::Unsupported(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    let inconclusive = rows
        .iter()
        .filter(|r| r.pair == Verdict::Inconclusive || r.pareto == Verdict::Inconclusive)
        .count();
    Ok(CorollaryReport {
        n,
        all_consistent: rows.iter().all(|r| r.consistent),
        inconclusive,
        rows,
    })
}

/// A JSON file mapping a hash of (domains, efficiency) to its classification.
/// Budget outcomes are never stored.
#[derive(Debug)]
pub struct ResultsCache {
    path: PathBuf,
    entries: BTreeMap<String, Classification>,
}

impl ResultsCache {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let entries = match std::fs::read_to_string(&path) {
            Ok(s) => serde_json::from_str(&s).map_err(|e| Error::Format(e.to_string()))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(e.into()),
        };
        Ok(ResultsCache { path, entries })
    }

    pub fn key(domains: &[Domain], efficiency: Efficiency) -> String {
        let body = serde_json::to_string(&(domains, efficiency)).expect("domains serialize");
        format!("{:x}", Sha256::digest(body.as_bytes()))
    }

    pub fn get(&self, domains: &[Domain], efficiency: Efficiency) -> Option<&Classification> {
        self.entries.get(&ResultsCache::key(domains, efficiency))
    }

    pub fn insert(&mut self, domains: &[Domain], efficiency: Efficiency, c: &Classification) {
        if !c.is_budget() {
            self.entries.insert(ResultsCache::key(domains, efficiency), c.clone());
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn save(&self) -> Result<()> {
        let s = serde_json::to_string_pretty(&self.entries).expect("cache serializes");
        std::fs::write(&self.path, s)?;
        Ok(())
    }
}

/// [`classify`] through a cache. Returns the classification and whether it
/// came from the cache.
pub fn classify_cached(
    cache: &mut ResultsCache,
    domains: &[Domain],
    efficiency: Efficiency,
    budget: SearchBudget,
) -> Result<(Classification, bool)> {
    if let Some(c) = cache.get(domains, efficiency) {
        return Ok((c.clone(), true));
    }
    let c = classify(domains, efficiency, budget)?;
    cache.insert(domains, efficiency, &c);
    Ok((c, false))
}
