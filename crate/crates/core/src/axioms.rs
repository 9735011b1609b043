//! Allocation-level and mechanism-level axiom checks with witnesses.
//!
//! Mechanism-level checks tabulate the mechanism over the profile space and
//! scan it in (profile, agent, deviation) index order. The scan runs in
//! parallel but always reports the first violation in that order.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mechanisms::Mechanism;
use crate::model::{AgentId, Allocation, Domain, ObjectId, Preference, Profile, ProfileSpace};

/// Upper bound on (coalition, joint misreport) combinations per profile for
/// the group strategyproofness check.
pub const GROUP_SP_CAP: usize = 20_000;

/// Group strategyproofness is only checked up to this many agents.
pub const GROUP_SP_MAX_AGENTS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axiom {
    Ir,
    Pair,
    Pareto,
    Sp,
    #[serde(rename = "gsp")]
    GroupSp,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [Axiom::Ir, Axiom::Pair, Axiom::Pareto, Axiom::Sp, Axiom::GroupSp];

    /// Parses a comma-separated list such as `ir,pair,sp`.
    pub fn parse_list(s: &str) -> Result<Vec<Axiom>> {
        let mut out: Vec<Axiom> = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl FromStr for Axiom {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ir" => Ok(Axiom::Ir),
            "pair" => Ok(Axiom::Pair),
            "pareto" => Ok(Axiom::Pareto),
            "sp" => Ok(Axiom::Sp),
            "gsp" | "group-sp" | "groupsp" => Ok(Axiom::GroupSp),
            other => Err(Error::Format(format!("unknown axiom {other:?}"))),
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Ir => "ir",
            Axiom::Pair => "pair",
            Axiom::Pareto => "pareto",
            Axiom::Sp => "sp",
            Axiom::GroupSp => "gsp",
        })
    }
}

/// A concrete witness that an axiom fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AxiomViolation {
    /// `agent` strictly prefers its endowment to its assignment.
    Ir {
        profile: Profile,
        allocation: Allocation,
        agent: AgentId,
    },
    /// Agents `i` and `j` each strictly prefer the other's assignment.
    Pair {
        profile: Profile,
        allocation: Allocation,
        agents: (AgentId, AgentId),
    },
    /// `dominating` weakly improves everyone and strictly improves someone.
    Pareto {
        profile: Profile,
        allocation: Allocation,
        dominating: Allocation,
    },
    /// Reporting `misreport` instead of the truth gets `agent` something better.
    Sp {
        profile: Profile,
        agent: AgentId,
        misreport: Preference,
        truthful: Allocation,
        deviated: Allocation,
    },
    /// The coalition jointly misreports; all weakly gain, one strictly.
    GroupSp {
        profile: Profile,
        coalition: Vec<AgentId>,
        misreports: Vec<Preference>,
        truthful: Allocation,
        deviated: Allocation,
    },
}

impl AxiomViolation {
    pub fn axiom(&self) -> Axiom {
        match self {
            AxiomViolation::Ir { .. } => Axiom::Ir,
            AxiomViolation::Pair { .. } => Axiom::Pair,
            AxiomViolation::Pareto { .. } => Axiom::Pareto,
            AxiomViolation::Sp { .. } => Axiom::Sp,
            AxiomViolation::GroupSp { .. } => Axiom::GroupSp,
        }
    }

    /// Re-evaluates `mech` at the witnessed profiles and re-checks the
    /// definition; true when the violation is reproduced.
    pub fn replay(&self, mech: &Mechanism) -> Result<bool> {
        Ok(match self {
            AxiomViolation::Ir { profile, allocation, agent } => {
                let x = mech.evaluate(profile)?;
                &x == allocation && profile.get(*agent).prefers(agent.endowment(), x.of(*agent))
            }
            AxiomViolation::Pair { profile, allocation, agents: (i, j) } => {
                let x = mech.evaluate(profile)?;
                &x == allocation
                    && profile.get(*i).prefers(x.of(*j), x.of(*i))
                    && profile.get(*j).prefers(x.of(*i), x.of(*j))
            }
            AxiomViolation::Pareto { profile, allocation, dominating } => {
                let x = mech.evaluate(profile)?;
                &x == allocation && dominates(profile, dominating, &x)
            }
            AxiomViolation::Sp { profile, agent, misreport, truthful, deviated } => {
                let x = mech.evaluate(profile)?;
                let y = mech.evaluate(&profile.with_report(*agent, misreport.clone())?)?;
                &x == truthful
                    && &y == deviated
                    && profile.get(*agent).prefers(y.of(*agent), x.of(*agent))
            }
            AxiomViolation::GroupSp { profile, coalition, misreports, truthful, deviated } => {
                let x = mech.evaluate(profile)?;
                let mut q = profile.clone();
                for (a, r) in coalition.iter().zip(misreports) {
                    q = q.with_report(*a, r.clone())?;
                }
                let y = mech.evaluate(&q)?;
                &x == truthful
                    && &y == deviated
                    && coalition.iter().all(|a| profile.get(*a).weakly_prefers(y.of(*a), x.of(*a)))
                    && coalition.iter().any(|a| profile.get(*a).prefers(y.of(*a), x.of(*a)))
            }
        })
    }
}

fn check_sizes(profile: &Profile, alloc: &Allocation) -> Result<()> {
    if profile.n() != alloc.n() {
        return Err(Error::SizeMismatch {
            expected: profile.n(),
            found: alloc.n(),
        });
    }
    Ok(())
}

/// First agent (by index) that strictly prefers its endowment.
pub fn ir_violation(profile: &Profile, alloc: &Allocation) -> Result<Option<AgentId>> {
    check_sizes(profile, alloc)?;
    Ok(profile
        .agents()
        .find(|&a| profile.get(a).prefers(a.endowment(), alloc.of(a))))
}

pub fn is_ir(profile: &Profile, alloc: &Allocation) -> Result<bool> {
    Ok(ir_violation(profile, alloc)?.is_none())
}

/// First pair `(i, j)`, `i < j`, in which each strictly prefers the other's assignment.
pub fn pair_violation(profile: &Profile, alloc: &Allocation) -> Result<Option<(AgentId, AgentId)>> {
    check_sizes(profile, alloc)?;
    let n = profile.n();
    for i in 0..n {
        let (ai, xi) = (AgentId::from_zero(i), alloc.as_slice()[i]);
        for j in i + 1..n {
            let (aj, xj) = (AgentId::from_zero(j), alloc.as_slice()[j]);
            if profile.get(ai).prefers(xj, xi) && profile.get(aj).prefers(xi, xj) {
                return Ok(Some((ai, aj)));
            }
        }
    }
    Ok(None)
}

pub fn is_pair_efficient(profile: &Profile, alloc: &Allocation) -> Result<bool> {
    Ok(pair_violation(profile, alloc)?.is_none())
}

/// `y` weakly improves on `x` for all agents and strictly for one.
pub(crate) fn dominates(profile: &Profile, y: &Allocation, x: &Allocation) -> bool {
    profile.agents().all(|a| profile.get(a).weakly_prefers(y.of(a), x.of(a)))
        && profile.agents().any(|a| profile.get(a).prefers(y.of(a), x.of(a)))
}

/// A Pareto improvement on `alloc`, if one exists.
///
/// With strict preferences an allocation is Pareto dominated exactly when
/// the graph with an edge `i -> j` whenever `x_j P_i x_i` has a directed
/// cycle; trading along that cycle is the returned improvement.
pub fn pareto_improvement(profile: &Profile, alloc: &Allocation) -> Result<Option<Allocation>> {
    check_sizes(profile, alloc)?;
    let n = profile.n();
    let x = alloc.as_slice();
    let wants = |i: usize, j: usize| profile.prefs()[i].prefers(x[j], x[i]);
    // peel off sinks until none remain; survivors all have an edge to a survivor
    let mut alive = vec![true; n];
    loop {
        let sink = (0..n).find(|&i| alive[i] && !(0..n).any(|j| alive[j] && wants(i, j)));
        match sink {
            Some(i) => alive[i] = false,
            None => break,
        }
    }
    let Some(start) = (0..n).find(|&i| alive[i]) else {
        return Ok(None);
    };
    let mut seen = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut cur = start;
    while seen[cur] == usize::MAX {
        seen[cur] = path.len();
        path.push(cur);
        cur = (0..n).find(|&j| alive[j] && wants(cur, j)).expect("survivor has an out-edge");
    }
    let cycle = &path[seen[cur]..];
    let mut y: Vec<ObjectId> = x.to_vec();
    for (k, &i) in cycle.iter().enumerate() {
        y[i] = x[cycle[(k + 1) % cycle.len()]];
    }
    Ok(Some(Allocation::new(y)?))
}

pub fn is_pareto(profile: &Profile, alloc: &Allocation) -> Result<bool> {
    Ok(pareto_improvement(profile, alloc)?.is_none())
}

fn per_profile_violation(
    axiom: Axiom,
    profile: &Profile,
    x: &Allocation,
) -> Result<Option<AxiomViolation>> {
    Ok(match axiom {
        Axiom::Ir => ir_violation(profile, x)?.map(|agent| AxiomViolation::Ir {
            profile: profile.clone(),
            allocation: x.clone(),
            agent,
        }),
        Axiom::Pair => pair_violation(profile, x)?.map(|agents| AxiomViolation::Pair {
            profile: profile.clone(),
            allocation: x.clone(),
            agents,
        }),
        Axiom::Pareto => pareto_improvement(profile, x)?.map(|dominating| AxiomViolation::Pareto {
            profile: profile.clone(),
            allocation: x.clone(),
            dominating,
        }),
        Axiom::Sp | Axiom::GroupSp => unreachable!("mechanism-level axiom"),
    })
}

/// A mechanism evaluated over a whole profile space.
struct Tabulated<'a> {
    space: &'a ProfileSpace,
    table: Vec<Allocation>,
}

impl<'a> Tabulated<'a> {
    fn new(mech: &Mechanism, space: &'a ProfileSpace) -> Result<Self> {
        Ok(Tabulated {
            space,
            table: mech.tabulate(space)?,
        })
    }

    fn sp_violation_at(&self, idx: usize) -> Option<AxiomViolation> {
        let space = self.space;
        let profile = space.profile(idx);
        let x = &self.table[idx];
        for agent in profile.agents() {
            let truth = profile.get(agent);
            let dom = space.domain(agent);
            for d in 0..dom.len() {
                let j = space.neighbor(idx, agent, d);
                let y = &self.table[j];
                if truth.prefers(y.of(agent), x.of(agent)) {
                    return Some(AxiomViolation::Sp {
                        profile: profile.clone(),
                        agent,
                        misreport: dom.prefs()[d].clone(),
                        truthful: x.clone(),
                        deviated: y.clone(),
                    });
                }
            }
        }
        None
    }

    fn gsp_violation_at(&self, idx: usize, coalitions: &[Vec<AgentId>]) -> Option<AxiomViolation> {
        let space = self.space;
        let profile = space.profile(idx);
        let x = &self.table[idx];
        for coalition in coalitions {
            let radix: Vec<usize> = coalition.iter().map(|a| space.domain(*a).len()).collect();
            let mut digits = vec![0usize; coalition.len()];
            loop {
                let mut j = idx;
                for (a, &d) in coalition.iter().zip(&digits) {
                    j = space.neighbor(j, *a, d);
                }
                let y = &self.table[j];
                let all_weak = coalition
                    .iter()
                    .all(|&a| profile.get(a).weakly_prefers(y.of(a), x.of(a)));
                if all_weak && coalition.iter().any(|&a| profile.get(a).prefers(y.of(a), x.of(a))) {
                    return Some(AxiomViolation::GroupSp {
                        profile: profile.clone(),
                        coalition: coalition.clone(),
                        misreports: coalition
                            .iter()
                            .zip(&digits)
                            .map(|(a, &d)| space.domain(*a).prefs()[d].clone())
                            .collect(),
                        truthful: x.clone(),
                        deviated: y.clone(),
                    });
                }
                // odometer, last coalition member fastest
                let mut k = coalition.len();
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    digits[k] += 1;
                    if digits[k] < radix[k] {
                        break;
                    }
                    digits[k] = 0;
                    if k == 0 {
                        k = usize::MAX;
                        break;
                    }
                }
                if k == usize::MAX {
                    break;
                }
            }
        }
        None
    }
}

/// Nonempty agent subsets, by size and then lexicographically.
fn coalitions(n: usize) -> Vec<Vec<AgentId>> {
    let mut out: Vec<Vec<AgentId>> = (1u32..(1 << n))
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).map(AgentId::from_zero).collect())
        .collect();
    out.sort_by(|a: &Vec<AgentId>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn space_for(domains: &[Domain]) -> Result<ProfileSpace> {
    ProfileSpace::new(domains.to_vec())
}

/// First strategyproofness violation over the profile product of `domains`.
pub fn strategyproofness_violation(mech: &Mechanism, domains: &[Domain]) -> Result<Option<AxiomViolation>> {
    let space = space_for(domains)?;
    let tab = Tabulated::new(mech, &space)?;
    Ok((0..space.len())
        .into_par_iter()
        .find_map_first(|i| tab.sp_violation_at(i)))
}

pub fn is_strategyproof(mech: &Mechanism, domains: &[Domain]) -> Result<bool> {
    Ok(strategyproofness_violation(mech, domains)?.is_none())
}

/// Every strategyproofness violation, in scan order.
pub fn all_strategyproofness_violations(mech: &Mechanism, domains: &[Domain]) -> Result<Vec<AxiomViolation>> {
    let space = space_for(domains)?;
    let tab = Tabulated::new(mech, &space)?;
    let mut out = Vec::new();
    for idx in 0..space.len() {
        let profile = space.profile(idx);
        let x = &tab.table[idx];
        for agent in profile.agents() {
            let dom = space.domain(agent);
            for d in 0..dom.len() {
                let y = &tab.table[space.neighbor(idx, agent, d)];
                if profile.get(agent).prefers(y.of(agent), x.of(agent)) {
                    out.push(AxiomViolation::Sp {
                        profile: profile.clone(),
                        agent,
                        misreport: dom.prefs()[d].clone(),
                        truthful: x.clone(),
                        deviated: y.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Number of (coalition, joint misreport) combinations checked per profile.
pub fn group_sp_combinations(domains: &[Domain]) -> usize {
    let n = domains.len();
    coalitions(n)
        .iter()
        .map(|c| c.iter().map(|a| domains[a.idx()].len()).product::<usize>())
        .sum()
}

pub fn group_strategyproofness_violation(
    mech: &Mechanism,
    domains: &[Domain],
) -> Result<Option<AxiomViolation>> {
    let n = domains.len();
    if n > GROUP_SP_MAX_AGENTS {
        return Err(Error::Budget(format!(
            "group strategyproofness is checked for at most {GROUP_SP_MAX_AGENTS} agents, got {n}"
        )));
    }
    let combos = group_sp_combinations(domains);
    if combos > GROUP_SP_CAP {
        return Err(Error::Budget(format!(
            "{combos} coalition misreports per profile exceeds the cap of {GROUP_SP_CAP}"
        )));
    }
    let space = space_for(domains)?;
    let tab = Tabulated::new(mech, &space)?;
    let cs = coalitions(n);
    Ok((0..space.len())
        .into_par_iter()
        .find_map_first(|i| tab.gsp_violation_at(i, &cs)))
}

pub fn is_group_strategyproof(mech: &Mechanism, domains: &[Domain]) -> Result<bool> {
    Ok(group_strategyproofness_violation(mech, domains)?.is_none())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomResult {
    pub axiom: Axiom,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<AxiomViolation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub mechanism: String,
    pub profiles: usize,
    pub clean: bool,
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn holds(&self, axiom: Axiom) -> Option<bool> {
        self.results.iter().find(|r| r.axiom == axiom).map(|r| r.holds)
    }

    pub fn violation(&self, axiom: Axiom) -> Option<&AxiomViolation> {
        self.results
            .iter()
            .find(|r| r.axiom == axiom)
            .and_then(|r| r.violation.as_ref())
    }
}

/// Runs the selected checks and reports the first witness for each.
pub fn check_mechanism(mech: &Mechanism, domains: &[Domain], which: &[Axiom]) -> Result<AxiomReport> {
    let space = space_for(domains)?;
    let tab = Tabulated::new(mech, &space)?;
    let mut results = Vec::new();
    let mut sorted = which.to_vec();
    sorted.sort();
    sorted.dedup();
    for axiom in sorted {
        let violation = match axiom {
            Axiom::Ir | Axiom::Pair | Axiom::Pareto => (0..space.len())
                .into_par_iter()
                .map(|i| per_profile_violation(axiom, &space.profile(i), &tab.table[i]))
                .find_map_first(|r| match r {
                    Ok(Some(v)) => Some(Ok(v)),
                    Ok(None) => None,
                    Err(e) => Some(Err(e)),
                })
                .transpose()?,
            Axiom::Sp => (0..space.len())
                .into_par_iter()
                .find_map_first(|i| tab.sp_violation_at(i)),
            Axiom::GroupSp => group_strategyproofness_violation(mech, domains)?,
        };
        results.push(AxiomResult {
            axiom,
            holds: violation.is_none(),
            violation,
        });
    }
    Ok(AxiomReport {
        mechanism: mech.name().to_string(),
        profiles: space.len(),
        clean: results.iter().all(|r| r.holds),
        results,
    })
}
