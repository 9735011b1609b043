//! Mechanisms: TTC, the endowment mechanism, explicit tables, and the
//! non-TTC constructions for domains that fail the top-two condition.
//!
//! The Diff construction works in canonical coordinates. Given a domain
//! failing the top-two condition on the full object set, a [`Relabeling`]
//! moves the failure witness `(a, b)` to `(o2, o1)` and makes some
//! preference read `o2 o3 ... on` once `o1` is dropped. In those
//! coordinates a profile belongs to Diff when agent 1 tops `o2` and every
//! agent `i >= 2` tops `o_{i-1}` among `{o_{i-1}, ..., o_n}`. On Diff, with
//! `o_k` agent 1's second choice, agent 1 gets `o_k`, agents `2..=k` get
//! `o_1..o_{k-1}`, and the rest trade by TTC among themselves. Off Diff the
//! mechanism is TTC.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    restrict, AgentId, Allocation, Domain, ObjectId, Preference, Profile, ProfileSpace, SubsetO,
};
use crate::richness::{check_top_two, maximal_failing_subset};
use crate::ttc::ttc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mechanism {
    Ttc,
    Endowment,
    Table(TableMechanism),
    Diff(DiffMechanism),
    Lifted(LiftedMechanism),
}

impl Mechanism {
    pub fn evaluate(&self, profile: &Profile) -> Result<Allocation> {
        match self {
            Mechanism::Ttc => Ok(ttc(profile)),
            Mechanism::Endowment => Ok(Allocation::endowment(profile.n())),
            Mechanism::Table(t) => t.evaluate(profile),
            Mechanism::Diff(d) => d.evaluate(profile),
            Mechanism::Lifted(l) => l.evaluate(profile),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::Ttc => "ttc",
            Mechanism::Endowment => "endowment",
            Mechanism::Table(_) => "table",
            Mechanism::Diff(_) => "diff",
            Mechanism::Lifted(_) => "lifted",
        }
    }

    /// Evaluates the mechanism at every profile of `space`, in index order.
    pub fn tabulate(&self, space: &ProfileSpace) -> Result<Vec<Allocation>> {
        if let Mechanism::Table(t) = self {
            if t.n != space.n() {
                return Err(Error::SizeMismatch {
                    expected: space.n(),
                    found: t.n,
                });
            }
        }
        (0..space.len())
            .map(|i| {
                let p = space.profile(i);
                let x = self.evaluate(&p)?;
                if x.n() != p.n() {
                    return Err(Error::SizeMismatch {
                        expected: p.n(),
                        found: x.n(),
                    });
                }
                Ok(x)
            })
            .collect()
    }

    /// Materializes the mechanism over `space` as a table.
    pub fn to_table(&self, space: &ProfileSpace) -> Result<TableMechanism> {
        TableMechanism::from_space(space, self.tabulate(space)?)
    }
}

/// The mechanism that returns the endowment allocation at every profile.
pub fn endowment_mechanism() -> Mechanism {
    Mechanism::Endowment
}

/// An explicit profile-to-allocation map.
#[derive(Clone, Debug)]
pub struct TableMechanism {
    n: usize,
    entries: Vec<(Profile, Allocation)>,
    index: HashMap<Profile, usize>,
}

impl PartialEq for TableMechanism {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.entries == other.entries
    }
}

impl Eq for TableMechanism {}

impl TableMechanism {
    pub fn new(entries: Vec<(Profile, Allocation)>) -> Result<Self> {
        let n = entries
            .first()
            .map(|(p, _)| p.n())
            .ok_or_else(|| Error::Construction("table mechanism needs at least one entry".into()))?;
        let mut index = HashMap::with_capacity(entries.len());
        for (k, (p, x)) in entries.iter().enumerate() {
            if p.n() != n || x.n() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    found: if p.n() != n { p.n() } else { x.n() },
                });
            }
            if index.insert(p.clone(), k).is_some() {
                return Err(Error::Construction(format!("profile {p} listed twice")));
            }
        }
        Ok(TableMechanism { n, entries, index })
    }

    pub fn from_space(space: &ProfileSpace, allocations: Vec<Allocation>) -> Result<Self> {
        if allocations.len() != space.len() {
            return Err(Error::SizeMismatch {
                expected: space.len(),
                found: allocations.len(),
            });
        }
        TableMechanism::new(space.iter().zip(allocations).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(Profile, Allocation)] {
        &self.entries
    }

    pub fn evaluate(&self, profile: &Profile) -> Result<Allocation> {
        self.index
            .get(profile)
            .map(|&k| self.entries[k].1.clone())
            .ok_or_else(|| Error::Undefined(profile.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct TableEntryRepr {
    profile: Vec<Preference>,
    allocation: Allocation,
}

impl Serialize for TableMechanism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<TableEntryRepr> = self
            .entries
            .iter()
            .map(|(p, x)| TableEntryRepr {
                profile: p.prefs().to_vec(),
                allocation: x.clone(),
            })
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TableMechanism {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = Vec::<TableEntryRepr>::deserialize(d)?;
        let entries = v
            .into_iter()
            .map(|e| Ok((Profile::new(e.profile)?, e.allocation)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        TableMechanism::new(entries).map_err(D::Error::custom)
    }
}

/// An object permutation; `forward[o.idx()]` is `o`'s canonical label.
/// Agents move with their endowments.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relabeling {
    forward: Vec<ObjectId>,
    inverse: Vec<ObjectId>,
}

impl Relabeling {
    pub fn new(forward: Vec<ObjectId>) -> Result<Self> {
        let n = forward.len();
        let as_alloc = Allocation::new(forward.clone())
            .map_err(|_| Error::Construction("relabeling is not a bijection".into()))?;
        let mut inverse = vec![ObjectId::from_zero(0); n];
        for (i, o) in as_alloc.as_slice().iter().enumerate() {
            inverse[o.idx()] = ObjectId::from_zero(i);
        }
        Ok(Relabeling { forward, inverse })
    }

    pub fn identity(n: usize) -> Self {
        Relabeling::new((0..n).map(ObjectId::from_zero).collect()).expect("identity")
    }

    pub fn n(&self) -> usize {
        self.forward.len()
    }

    pub fn apply(&self, o: ObjectId) -> ObjectId {
        self.forward[o.idx()]
    }

    pub fn invert(&self, o: ObjectId) -> ObjectId {
        self.inverse[o.idx()]
    }

    pub fn inverse(&self) -> Relabeling {
        Relabeling {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(i, o)| o.idx() == i)
    }

    pub fn forward(&self) -> &[ObjectId] {
        &self.forward
    }

    pub fn pref(&self, p: &Preference) -> Preference {
        p.relabeled(&self.forward)
    }

    pub fn domain(&self, d: &Domain) -> Domain {
        Domain::new(d.iter().map(|p| self.pref(p)).collect()).expect("relabeling preserves validity")
    }

    /// Agent `i`'s report becomes canonical agent `pi(i)`'s report, relabeled.
    pub fn profile(&self, p: &Profile) -> Profile {
        let n = p.n();
        let mut prefs = vec![None; n];
        for a in p.agents() {
            prefs[self.apply(a.endowment()).idx()] = Some(self.pref(p.get(a)));
        }
        Profile::new(prefs.into_iter().map(|x| x.expect("bijection")).collect())
            .expect("relabeled profile")
    }

    pub fn allocation(&self, x: &Allocation) -> Allocation {
        let n = x.n();
        let mut assign = vec![ObjectId::from_zero(0); n];
        for i in 0..n {
            let a = AgentId::from_zero(i);
            assign[self.apply(a.endowment()).idx()] = self.apply(x.of(a));
        }
        Allocation::new(assign).expect("relabeled allocation")
    }
}

/// Finds the relabeling that puts a domain failing the top-two condition on
/// the full object set into canonical form.
///
/// The smallest failure witness `(a, b)` on the full set becomes `(o2, o1)`;
/// the first preference in domain order that tops `a` fixes the labels
/// `o3, o4, ...` of the remaining objects in its order.
pub fn canonicalize_failure(domain: &Domain) -> Result<Relabeling> {
    let n = domain.n();
    let report = check_top_two(domain);
    let witness = report.failures_at_full().next().copied().ok_or_else(|| {
        Error::Precondition("domain does not fail the top-two condition for the full object set".into())
    })?;
    let (a, b) = (witness.a, witness.b);
    let p0 = domain
        .iter()
        .find(|p| p.top() == a)
        .expect("a is top-able");
    let mut forward = vec![ObjectId::from_zero(0); n];
    forward[a.idx()] = ObjectId::from_zero(1);
    forward[b.idx()] = ObjectId::from_zero(0);
    let mut next = 2;
    for &o in p0.order() {
        if o != a && o != b {
            forward[o.idx()] = ObjectId::from_zero(next);
            next += 1;
        }
    }
    Relabeling::new(forward)
}

/// Diff membership, evaluated in the canonical coordinates of `relabeling`.
pub fn diff_contains(profile: &Profile, relabeling: &Relabeling) -> bool {
    canonical_in_diff(&relabeling.profile(profile))
}

fn canonical_in_diff(p: &Profile) -> bool {
    let n = p.n();
    if n < 2 {
        return false;
    }
    let o = ObjectId::from_zero;
    if p.prefs()[0].top() != o(1) {
        return false;
    }
    (1..n).all(|i| {
        // agent i+1 must top o_i among {o_i, ..., o_n}
        let upper = (i - 1..n).fold(0u32, |m, j| m | (1 << j));
        let s = SubsetO::from_mask(upper, n);
        p.prefs()[i].within(s).next() == Some(o(i - 1))
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffMechanism {
    n: usize,
    relabeling: Relabeling,
    base: Domain,
}

impl DiffMechanism {
    pub fn relabeling(&self) -> &Relabeling {
        &self.relabeling
    }

    pub fn base_domain(&self) -> &Domain {
        &self.base
    }

    pub fn contains(&self, profile: &Profile) -> bool {
        diff_contains(profile, &self.relabeling)
    }

    pub fn evaluate(&self, profile: &Profile) -> Result<Allocation> {
        if profile.n() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: profile.n(),
            });
        }
        let canon = self.relabeling.profile(profile);
        let x = diff_canonical(&canon);
        Ok(self.relabeling.inverse().allocation(&x))
    }
}

fn diff_canonical(p: &Profile) -> Allocation {
    if !canonical_in_diff(p) {
        return ttc(p);
    }
    let n = p.n();
    let o = ObjectId::from_zero;
    let k = p.prefs()[0].order()[1].get();
    let mut assign = vec![o(0); n];
    assign[0] = o(k - 1);
    for j in 2..=k {
        assign[j - 1] = o(j - 2);
    }
    if k < n {
        let agents: Vec<AgentId> = (k..n).map(AgentId::from_zero).collect();
        let objs = SubsetO::from_mask((k..n).fold(0u32, |m, j| m | (1 << j)), n);
        let sub = restrict(p, &agents, &objs).expect("tail sub-economy");
        for (a, obj) in sub.lift(&ttc(&sub.profile)) {
            assign[a.idx()] = obj;
        }
    }
    Allocation::new(assign).expect("diff allocation is a bijection")
}

/// Largest number of agents for which the Diff construction is strategyproof.
pub const DIFF_MAX_AGENTS: usize = 4;

/// The non-TTC mechanism for a domain failing the top-two condition on the
/// full object set, with at most four objects.
pub fn build_diff_mechanism(domain: &Domain) -> Result<Mechanism> {
    if domain.n() > DIFF_MAX_AGENTS {
        return Err(Error::Unsupported(format!(
            "the Diff construction is not strategyproof for n = {} > {DIFF_MAX_AGENTS}",
            domain.n()
        )));
    }
    build_diff_unchecked(domain)
}

/// Same as [`build_diff_mechanism`] without the size limit. The result is
/// generally not strategyproof beyond four agents.
#[cfg(feature = "oversize-diff")]
pub fn build_diff_mechanism_oversize(domain: &Domain) -> Result<Mechanism> {
    build_diff_unchecked(domain)
}

fn build_diff_unchecked(domain: &Domain) -> Result<Mechanism> {
    let relabeling = canonicalize_failure(domain)?;
    Ok(Mechanism::Diff(DiffMechanism {
        n: domain.n(),
        relabeling,
        base: domain.clone(),
    }))
}

/// A mechanism on a failing subset `O'` embedded in the full economy.
///
/// When every agent endowed outside `O'` tops its own endowment among
/// `O'` plus that endowment, the owners of `O'` are served by `inner` on the
/// restricted economy and everyone else trades by TTC among themselves.
/// Otherwise the mechanism is TTC.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedMechanism {
    n: usize,
    subset: SubsetO,
    inner: Box<Mechanism>,
}

impl LiftedMechanism {
    pub fn subset(&self) -> SubsetO {
        self.subset
    }

    pub fn inner(&self) -> &Mechanism {
        &self.inner
    }

    /// Whether the composite branch applies at `profile`.
    pub fn composite_applies(&self, profile: &Profile) -> bool {
        profile
            .agents()
            .filter(|a| !self.subset.contains(a.endowment()))
            .all(|a| {
                let with = self.subset.with(a.endowment());
                profile.get(a).within(with).next() == Some(a.endowment())
            })
    }

    pub fn evaluate(&self, profile: &Profile) -> Result<Allocation> {
        if profile.n() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: profile.n(),
            });
        }
        if !self.composite_applies(profile) {
            return Ok(ttc(profile));
        }
        let n = self.n;
        let inside: Vec<AgentId> = self.subset.iter().map(|o| o.owner()).collect();
        let sub = restrict(profile, &inside, &self.subset)?;
        let mut assign = vec![ObjectId::from_zero(0); n];
        for (a, o) in sub.lift(&self.inner.evaluate(&sub.profile)?) {
            assign[a.idx()] = o;
        }
        if self.subset.len() < n {
            let rest = SubsetO::from_mask(SubsetO::full(n).mask() & !self.subset.mask(), n);
            let outside: Vec<AgentId> = rest.iter().map(|o| o.owner()).collect();
            let sub = restrict(profile, &outside, &rest)?;
            for (a, o) in sub.lift(&ttc(&sub.profile)) {
                assign[a.idx()] = o;
            }
        }
        Allocation::new(assign)
    }
}

/// Embeds `inner` (a mechanism on the economy restricted to `subset`) into
/// the full economy of `domain`.
pub fn lift_mechanism(domain: &Domain, subset: &SubsetO, inner: Mechanism) -> Result<Mechanism> {
    let n = domain.n();
    domain.check_subset(subset)?;
    if subset.len() > DIFF_MAX_AGENTS {
        return Err(Error::Construction(format!(
            "subset size {} exceeds {DIFF_MAX_AGENTS}",
            subset.len()
        )));
    }
    if !check_top_two(domain).fails_for(subset) {
        return Err(Error::Construction(format!(
            "domain does not fail the top-two condition for {subset}"
        )));
    }
    for o in (0..n).map(ObjectId::from_zero).filter(|o| !subset.contains(*o)) {
        let tops = domain.top_set(&subset.with(o), 1)?;
        if !tops.contains(o) {
            return Err(Error::Construction(format!(
                "outside object {o} cannot be ranked first within {}",
                subset.with(o)
            )));
        }
    }
    if let Mechanism::Table(t) = &inner {
        if t.n() != subset.len() {
            return Err(Error::Construction(format!(
                "inner mechanism is over {} agents, subset has {}",
                t.n(),
                subset.len()
            )));
        }
    }
    if let Mechanism::Diff(d) = &inner {
        if d.n != subset.len() {
            return Err(Error::Construction(format!(
                "inner mechanism is over {} agents, subset has {}",
                d.n,
                subset.len()
            )));
        }
    }
    Ok(Mechanism::Lifted(LiftedMechanism {
        n,
        subset: *subset,
        inner: Box::new(inner),
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Counterexample {
    /// No counterexample exists to build: the domain satisfies top-two.
    SatisfiesTopTwo,
    /// Diff construction on the full object set.
    Diff(Mechanism),
    /// Diff construction on a failing subset, lifted to the full economy.
    Lifted(Mechanism),
    /// The domain fails top-two, but neither construction applies.
    OutOfScope(String),
}

impl Counterexample {
    pub fn mechanism(&self) -> Option<&Mechanism> {
        match self {
            Counterexample::Diff(m) | Counterexample::Lifted(m) => Some(m),
            _ => None,
        }
    }
}

/// Builds a non-TTC mechanism satisfying IR, Pareto efficiency and
/// strategyproofness for `domain` when one of the constructions applies.
pub fn build_necessity_counterexample(domain: &Domain) -> Counterexample {
    let n = domain.n();
    let Some(subset) = maximal_failing_subset(domain) else {
        return Counterexample::SatisfiesTopTwo;
    };
    if subset.is_full() {
        return match build_diff_mechanism(domain) {
            Ok(m) => Counterexample::Diff(m),
            Err(e) => Counterexample::OutOfScope(e.to_string()),
        };
    }
    if subset.len() > DIFF_MAX_AGENTS {
        return Counterexample::OutOfScope(format!(
            "largest failing subset {subset} has more than {DIFF_MAX_AGENTS} objects"
        ));
    }
    let inner = match domain
        .restricted(&subset)
        .and_then(|d| build_diff_mechanism(&d))
    {
        Ok(m) => m,
        Err(e) => return Counterexample::OutOfScope(e.to_string()),
    };
    match lift_mechanism(domain, &subset, inner) {
        Ok(m) => Counterexample::Lifted(m),
        Err(e) => Counterexample::OutOfScope(format!("n = {n}: {e}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{self, LinearOrderSpec};

    fn prof(v: &[&str]) -> Profile {
        Profile::parse_list(v).unwrap()
    }

    #[test]
    fn endowment_is_identity() {
        let m = endowment_mechanism();
        let p = prof(&["231", "312", "123"]);
        assert_eq!(m.evaluate(&p).unwrap(), Allocation::endowment(3));
    }

    #[test]
    fn d2_is_already_canonical() {
        let pi = canonicalize_failure(&domains::example_d2()).unwrap();
        assert!(pi.is_identity());
    }

    #[test]
    fn canonical_conditions_hold() {
        for d in [
            domains::example_d2(),
            domains::single_peaked(3, &LinearOrderSpec::identity(3, false)).unwrap(),
            domains::single_peaked(4, &LinearOrderSpec::identity(4, false)).unwrap(),
            domains::circular(4, &LinearOrderSpec::identity(4, true)).unwrap(),
        ] {
            let n = d.n();
            let pi = canonicalize_failure(&d).unwrap();
            let c = pi.domain(&d);
            let o = ObjectId::from_zero;
            let tops = c.top_set(&SubsetO::full(n), 1).unwrap();
            assert!(tops.contains(o(0)) && tops.contains(o(1)));
            assert!(c.iter().all(|p| !(p.top() == o(1) && p.order()[1] == o(0))));
            let rest = SubsetO::from_mask(SubsetO::full(n).mask() & !1, n);
            assert!(c.iter().any(|p| p.within(rest).map(|x| x.idx()).eq(1..n)));
        }
    }

    #[test]
    fn canonicalize_recovers_swap() {
        let swap = Relabeling::new(vec![
            ObjectId::new(3, 3).unwrap(),
            ObjectId::new(2, 3).unwrap(),
            ObjectId::new(1, 3).unwrap(),
        ])
        .unwrap();
        let d = swap.domain(&domains::example_d2());
        let pi = canonicalize_failure(&d).unwrap();
        assert_eq!(pi, swap.inverse());
        assert_eq!(pi.domain(&d), domains::example_d2());
    }

    #[test]
    fn canonicalize_requires_full_failure() {
        assert!(matches!(
            canonicalize_failure(&domains::example_d1()),
            Err(Error::Precondition(_))
        ));
        assert!(canonicalize_failure(&domains::example_d3()).is_err());
    }

    #[test]
    fn diff_membership() {
        let pi = Relabeling::identity(3);
        assert!(diff_contains(&prof(&["231", "123", "123"]), &pi));
        assert!(!diff_contains(&prof(&["231", "123", "132"]), &pi));
        assert!(!diff_contains(&prof(&["123", "123", "123"]), &pi));
    }

    #[test]
    fn diff_differs_from_ttc_on_diff() {
        let m = build_diff_mechanism(&domains::example_d2()).unwrap();
        let p = prof(&["231", "123", "123"]);
        assert_eq!(m.evaluate(&p).unwrap().to_string(), "312");
        assert_eq!(ttc(&p).to_string(), "213");
        let off = prof(&["123", "231", "132"]);
        assert_eq!(m.evaluate(&off).unwrap(), ttc(&off));
    }

    #[test]
    fn diff_rejects_large_or_satisfying_domains() {
        let c5 = domains::circular(5, &LinearOrderSpec::identity(5, true)).unwrap();
        assert!(matches!(build_diff_mechanism(&c5), Err(Error::Unsupported(_))));
        assert!(matches!(
            build_diff_mechanism(&domains::example_d1()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn relabeling_commutes_with_construction() {
        let d = domains::single_peaked(4, &LinearOrderSpec::identity(4, false)).unwrap();
        let pi = canonicalize_failure(&d).unwrap();
        let direct = build_diff_mechanism(&d).unwrap();
        let canonical = |p: &Profile| {
            if canonical_in_diff(p) {
                diff_canonical(p)
            } else {
                ttc(p)
            }
        };
        let space = ProfileSpace::homogeneous(&d);
        for p in space.iter() {
            let via_canon = pi.inverse().allocation(&canonical(&pi.profile(&p)));
            assert_eq!(direct.evaluate(&p).unwrap(), via_canon);
        }
    }

    #[test]
    fn lift_preconditions() {
        let d3 = domains::example_d3();
        let s134 = SubsetO::from_indices(&[1, 3, 4], 4).unwrap();
        let inner = build_diff_mechanism(&d3.restricted(&s134).unwrap()).unwrap();
        assert!(lift_mechanism(&d3, &s134, inner.clone()).is_ok());
        let s123 = SubsetO::from_indices(&[1, 2, 3], 4).unwrap();
        match lift_mechanism(&d3, &s123, inner.clone()) {
            Err(Error::Construction(msg)) => assert!(msg.contains("does not fail")),
            other => panic!("unexpected {other:?}"),
        }
        let wrong_inner = build_diff_mechanism(&domains::single_peaked(4, &LinearOrderSpec::identity(4, false)).unwrap()).unwrap();
        assert!(lift_mechanism(&d3, &s134, wrong_inner).is_err());
    }

    #[test]
    fn lifted_composite_switch() {
        let d3 = domains::example_d3();
        let Counterexample::Lifted(Mechanism::Lifted(m)) = build_necessity_counterexample(&d3) else {
            panic!("expected a lifted mechanism");
        };
        assert_eq!(m.subset(), SubsetO::from_indices(&[1, 3, 4], 4).unwrap());
        // agent 2 tops o2 within {o1,o2,o3,o4}: composite applies
        assert!(m.composite_applies(&prof(&["1234", "2143", "1234", "1234"])));
        assert!(!m.composite_applies(&prof(&["1234", "1234", "1234", "1234"])));
    }

    #[test]
    fn necessity_orchestration() {
        let sp3 = domains::single_peaked(3, &LinearOrderSpec::identity(3, false)).unwrap();
        assert!(matches!(build_necessity_counterexample(&sp3), Counterexample::Diff(_)));
        assert!(matches!(build_necessity_counterexample(&domains::example_d3()), Counterexample::Lifted(_)));
        assert_eq!(build_necessity_counterexample(&domains::example_d1()), Counterexample::SatisfiesTopTwo);
        let c5 = domains::circular(5, &LinearOrderSpec::identity(5, true)).unwrap();
        assert!(matches!(build_necessity_counterexample(&c5), Counterexample::OutOfScope(_)));
    }

    #[test]
    fn table_json_round_trip() {
        let space = ProfileSpace::homogeneous(&domains::example_d2());
        let t = Mechanism::Ttc.to_table(&space).unwrap();
        assert_eq!(t.len(), 27);
        let back = TableMechanism::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        let missing = prof(&["321", "321", "321"]);
        assert!(matches!(back.evaluate(&missing), Err(Error::Undefined(_))));
    }
}
