//! Agents, objects, preferences, domains, profiles and allocations.
//!
//! Agent `i` is always endowed with object `o_i`, so agents and objects
//! share the index space `1..=n`. All values are immutable once built.

mod format;
mod pref;
mod space;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use format::{domain_from_json, domain_to_json, emit_domain, emit_pref, parse_domain, parse_pref};
pub use pref::Preference;
pub use space::{enumerate_profiles, ProfileSpace};

/// Upper bound on the number of objects any value in this crate may carry.
pub const MAX_OBJECTS: usize = 32;

/// An object `o_i`, stored by its 1-based index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectId(u8);

impl ObjectId {
    pub fn new(index: usize, n: usize) -> Result<Self> {
        if index == 0 || index > n || n > MAX_OBJECTS {
            return Err(Error::InvalidObject { index, n });
        }
        Ok(ObjectId(index as u8))
    }

    /// Object with 0-based position `i`. Caller guarantees `i < MAX_OBJECTS`.
    pub(crate) fn from_zero(i: usize) -> Self {
        debug_assert!(i < MAX_OBJECTS);
        ObjectId(i as u8 + 1)
    }

    /// 1-based index.
    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// 0-based index.
    pub fn idx(self) -> usize {
        self.0 as usize - 1
    }

    /// The agent endowed with this object.
    pub fn owner(self) -> AgentId {
        AgentId(self.0)
    }

    pub(crate) fn bit(self) -> u32 {
        1u32 << self.idx()
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0)
    }
}

/// An agent `i`, stored by its 1-based index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "usize", try_from = "usize")]
pub struct AgentId(u8);

impl AgentId {
    pub fn new(index: usize, n: usize) -> Result<Self> {
        if index == 0 || index > n || n > MAX_OBJECTS {
            return Err(Error::InvalidObject { index, n });
        }
        Ok(AgentId(index as u8))
    }

    pub(crate) fn from_zero(i: usize) -> Self {
        debug_assert!(i < MAX_OBJECTS);
        AgentId(i as u8 + 1)
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    pub fn idx(self) -> usize {
        self.0 as usize - 1
    }

    pub fn endowment(self) -> ObjectId {
        ObjectId(self.0)
    }
}

impl From<AgentId> for usize {
    fn from(a: AgentId) -> usize {
        a.get()
    }
}

impl TryFrom<usize> for AgentId {
    type Error = Error;
    fn try_from(v: usize) -> Result<Self> {
        AgentId::new(v, MAX_OBJECTS)
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A nonempty subset `O'` of the objects, as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SubsetO {
    mask: u32,
    n: u8,
}

impl SubsetO {
    pub fn new(members: impl IntoIterator<Item = ObjectId>, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_OBJECTS {
            return Err(Error::Domain(format!("object count {n} out of range")));
        }
        let mut mask = 0u32;
        for o in members {
            if o.get() > n {
                return Err(Error::InvalidObject { index: o.get(), n });
            }
            mask |= o.bit();
        }
        if mask == 0 {
            return Err(Error::Domain("object subset must be nonempty".into()));
        }
        Ok(SubsetO { mask, n: n as u8 })
    }

    /// Builds a subset from 1-based indices.
    pub fn from_indices(indices: &[usize], n: usize) -> Result<Self> {
        let ids = indices
            .iter()
            .map(|&i| ObjectId::new(i, n))
            .collect::<Result<Vec<_>>>()?;
        SubsetO::new(ids, n)
    }

    pub fn full(n: usize) -> Self {
        assert!((1..=MAX_OBJECTS).contains(&n), "object count {n} out of range");
        let mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        SubsetO { mask, n: n as u8 }
    }

    pub(crate) fn from_mask(mask: u32, n: usize) -> Self {
        debug_assert!(mask != 0);
        SubsetO { mask, n: n as u8 }
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    /// Size of the ambient object set.
    pub fn universe(&self) -> usize {
        self.n as usize
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, o: ObjectId) -> bool {
        o.get() <= self.n as usize && self.mask & o.bit() != 0
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n as usize
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = ObjectId> + '_ {
        (0..self.n as usize)
            .filter(move |i| self.mask & (1 << i) != 0)
            .map(ObjectId::from_zero)
    }

    pub fn members(&self) -> Vec<ObjectId> {
        self.iter().collect()
    }

    pub fn with(&self, o: ObjectId) -> Self {
        SubsetO {
            mask: self.mask | o.bit(),
            n: self.n,
        }
    }

    /// All subsets of `{o_1..o_n}` with at least `min_size` members, ordered
    /// by size and then lexicographically by sorted member sequence.
    pub fn all_by_size(n: usize, min_size: usize) -> Vec<SubsetO> {
        assert!((1..=20).contains(&n), "subset enumeration limited to n <= 20");
        let mut out: Vec<SubsetO> = (1u32..(1u32 << n))
            .filter(|m| m.count_ones() as usize >= min_size)
            .map(|m| SubsetO::from_mask(m, n))
            .collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.members().cmp(&b.members())));
        out
    }
}

impl fmt::Display for SubsetO {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, o) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{o}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for SubsetO {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<usize> = self.iter().map(|o| o.get()).collect();
        v.serialize(s)
    }
}

/// `r_k(P_0, O')`: the object ranked `k`-th (1-based) by `pref` within `subset`.
pub fn rank(pref: &Preference, subset: &SubsetO, k: usize) -> Result<ObjectId> {
    pref.rank(subset, k)
}

/// `r_k(D, O')`: every object some preference in `domain` ranks `k`-th within `subset`.
pub fn top_set(domain: &Domain, subset: &SubsetO, k: usize) -> Result<SubsetO> {
    domain.top_set(subset, k)
}

/// An ordered, duplicate-free, nonempty set of preferences over `n` objects.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    n: usize,
    prefs: Vec<Preference>,
}

impl Domain {
    pub fn new(prefs: Vec<Preference>) -> Result<Self> {
        let first = prefs
            .first()
            .ok_or_else(|| Error::Domain("domain must be nonempty".into()))?;
        let n = first.n();
        for (i, p) in prefs.iter().enumerate() {
            if p.n() != n {
                return Err(Error::Domain(format!(
                    "preference {} is over {} objects, expected {n}",
                    i + 1,
                    p.n()
                )));
            }
            if prefs[..i].contains(p) {
                return Err(Error::Domain(format!("duplicate preference {p}")));
            }
        }
        Ok(Domain { n, prefs })
    }

    /// Keeps the first occurrence of each preference.
    pub fn dedup(prefs: Vec<Preference>) -> Result<Self> {
        let mut out: Vec<Preference> = Vec::with_capacity(prefs.len());
        for p in prefs {
            if !out.contains(&p) {
                out.push(p);
            }
        }
        Domain::new(out)
    }

    pub fn parse_list(items: &[&str]) -> Result<Self> {
        Domain::new(items.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.prefs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefs.is_empty()
    }

    pub fn prefs(&self) -> &[Preference] {
        &self.prefs
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Preference> {
        self.prefs.iter()
    }

    pub fn contains(&self, p: &Preference) -> bool {
        self.prefs.contains(p)
    }

    pub fn position(&self, p: &Preference) -> Option<usize> {
        self.prefs.iter().position(|q| q == p)
    }

    pub fn top_set(&self, subset: &SubsetO, k: usize) -> Result<SubsetO> {
        self.check_subset(subset)?;
        let mut mask = 0u32;
        for p in &self.prefs {
            mask |= p.rank(subset, k)?.bit();
        }
        Ok(SubsetO::from_mask(mask, self.n))
    }

    /// The preferences restricted to `subset`, relabeled so the `j`-th
    /// smallest member of `subset` becomes object `j`. Duplicates collapse.
    pub fn restricted(&self, subset: &SubsetO) -> Result<Domain> {
        self.check_subset(subset)?;
        Domain::dedup(self.prefs.iter().map(|p| p.restricted(subset)).collect())
    }

    pub(crate) fn check_subset(&self, subset: &SubsetO) -> Result<()> {
        if subset.universe() != self.n {
            return Err(Error::Domain(format!(
                "subset {subset} is over {} objects, domain over {}",
                subset.universe(),
                self.n
            )));
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a Domain {
    type Item = &'a Preference;
    type IntoIter = std::slice::Iter<'a, Preference>;
    fn into_iter(self) -> Self::IntoIter {
        self.prefs.iter()
    }
}

/// One reported preference per agent; entry `i` belongs to agent `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Profile {
    prefs: Vec<Preference>,
}

impl Profile {
    pub fn new(prefs: Vec<Preference>) -> Result<Self> {
        let n = prefs.len();
        if n == 0 {
            return Err(Error::Domain("profile must have at least one agent".into()));
        }
        for p in &prefs {
            if p.n() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    found: p.n(),
                });
            }
        }
        Ok(Profile { prefs })
    }

    pub fn parse_list(items: &[&str]) -> Result<Self> {
        Profile::new(items.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?)
    }

    pub fn n(&self) -> usize {
        self.prefs.len()
    }

    pub fn prefs(&self) -> &[Preference] {
        &self.prefs
    }

    pub fn get(&self, agent: AgentId) -> &Preference {
        &self.prefs[agent.idx()]
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> {
        (0..self.n()).map(AgentId::from_zero)
    }

    /// `(P_i', P_{-i})`.
    pub fn with_report(&self, agent: AgentId, report: Preference) -> Result<Profile> {
        if report.n() != self.n() {
            return Err(Error::SizeMismatch {
                expected: self.n(),
                found: report.n(),
            });
        }
        let mut prefs = self.prefs.clone();
        prefs[agent.idx()] = report;
        Ok(Profile { prefs })
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.prefs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// A bijection from agents to objects; entry `i` is agent `i + 1`'s object.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Allocation {
    assign: Vec<ObjectId>,
}

impl Allocation {
    pub fn new(assign: Vec<ObjectId>) -> Result<Self> {
        let n = assign.len();
        if n == 0 || n > MAX_OBJECTS {
            return Err(Error::Domain(format!("allocation size {n} out of range")));
        }
        let mut seen = 0u32;
        for o in &assign {
            if o.get() > n {
                return Err(Error::InvalidObject { index: o.get(), n });
            }
            if seen & o.bit() != 0 {
                return Err(Error::Domain(format!("object {o} assigned twice")));
            }
            seen |= o.bit();
        }
        Ok(Allocation { assign })
    }

    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let n = indices.len();
        Allocation::new(
            indices
                .iter()
                .map(|&i| ObjectId::new(i, n))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// Every agent keeps its endowment.
    pub fn endowment(n: usize) -> Self {
        Allocation {
            assign: (0..n).map(ObjectId::from_zero).collect(),
        }
    }

    pub(crate) fn from_vec_unchecked(assign: Vec<ObjectId>) -> Self {
        debug_assert!(Allocation::new(assign.clone()).is_ok());
        Allocation { assign }
    }

    pub fn n(&self) -> usize {
        self.assign.len()
    }

    pub fn of(&self, agent: AgentId) -> ObjectId {
        self.assign[agent.idx()]
    }

    pub fn as_slice(&self) -> &[ObjectId] {
        &self.assign
    }

    /// The agent holding `o`.
    pub fn holder(&self, o: ObjectId) -> AgentId {
        let i = self.assign.iter().position(|&x| x == o).expect("bijection");
        AgentId::from_zero(i)
    }

    /// All `n!` allocations in lexicographic order.
    pub fn all(n: usize) -> Vec<Allocation> {
        permutations(n)
            .into_iter()
            .map(|v| Allocation {
                assign: v.into_iter().map(ObjectId::from_zero).collect(),
            })
            .collect()
    }
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![cur.clone()];
    // next_permutation
    while let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) {
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
    out
}

/// A sub-economy: agents `agents[j]` endowed with `objects[j]`, reindexed so
/// that agent/object `j + 1` of `profile` stands for them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubEconomy {
    pub profile: Profile,
    pub agents: Vec<AgentId>,
    pub objects: Vec<ObjectId>,
}

impl SubEconomy {
    /// Maps an allocation of the reindexed economy back to original labels.
    pub fn lift(&self, sub: &Allocation) -> Vec<(AgentId, ObjectId)> {
        self.agents
            .iter()
            .zip(sub.as_slice())
            .map(|(&a, o)| (a, self.objects[o.idx()]))
            .collect()
    }
}

/// `P_S | O'`: the preferences of `agents` restricted to `objects`.
pub fn restrict(profile: &Profile, agents: &[AgentId], objects: &SubsetO) -> Result<SubEconomy> {
    let n = profile.n();
    if objects.universe() != n {
        return Err(Error::Restriction(format!(
            "object subset is over {} objects, profile over {n}",
            objects.universe()
        )));
    }
    if agents.len() != objects.len() {
        return Err(Error::Restriction(format!(
            "{} agents but {} objects",
            agents.len(),
            objects.len()
        )));
    }
    let mut sorted = agents.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != agents.len() {
        return Err(Error::Restriction("duplicate agent".into()));
    }
    for a in &sorted {
        if a.get() > n {
            return Err(Error::InvalidObject { index: a.get(), n });
        }
        if !objects.contains(a.endowment()) {
            return Err(Error::Restriction(format!(
                "agent {a}'s endowment {} is outside the object subset",
                a.endowment()
            )));
        }
    }
    let prefs = sorted
        .iter()
        .map(|&a| profile.get(a).restricted(objects))
        .collect();
    Ok(SubEconomy {
        profile: Profile::new(prefs)?,
        agents: sorted,
        objects: objects.members(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pref(s: &str) -> Preference {
        s.parse().unwrap()
    }

    #[test]
    fn rank_examples() {
        let s23 = SubsetO::from_indices(&[2, 3], 3).unwrap();
        assert_eq!(rank(&pref("123"), &s23, 1).unwrap().get(), 2);
        assert_eq!(rank(&pref("231"), &SubsetO::full(3), 2).unwrap().get(), 3);
        let s345 = SubsetO::from_indices(&[3, 4, 5], 5).unwrap();
        assert_eq!(rank(&pref("25341"), &s345, 1).unwrap().get(), 5);
    }

    #[test]
    fn rank_errors() {
        let s23 = SubsetO::from_indices(&[2, 3], 3).unwrap();
        assert!(matches!(
            rank(&pref("123"), &s23, 3),
            Err(Error::RankOutOfBounds { k: 3, size: 2 })
        ));
        assert!(matches!(
            rank(&pref("123"), &s23, 0),
            Err(Error::RankOutOfBounds { .. })
        ));
        let s4 = SubsetO::from_indices(&[1, 4], 4).unwrap();
        assert!(matches!(rank(&pref("123"), &s4, 1), Err(Error::Domain(_))));
        assert!(SubsetO::from_indices(&[4], 3).is_err());
    }

    #[test]
    fn top_set_examples() {
        let d1 = Domain::parse_list(&["123", "231", "213"]).unwrap();
        let t = top_set(&d1, &SubsetO::full(3), 1).unwrap();
        assert_eq!(t, SubsetO::from_indices(&[1, 2], 3).unwrap());
        let single = Domain::parse_list(&["123"]).unwrap();
        assert_eq!(
            top_set(&single, &SubsetO::full(3), 2).unwrap(),
            SubsetO::from_indices(&[2], 3).unwrap()
        );
        let all = Domain::new(
            permutations(3)
                .into_iter()
                .map(|v| Preference::from_zero_based(&v).unwrap())
                .collect(),
        )
        .unwrap();
        assert!(top_set(&all, &SubsetO::full(3), 1).unwrap().is_full());
    }

    #[test]
    fn domain_rejects_duplicates_and_mixed_sizes() {
        assert!(Domain::parse_list(&["123", "123"]).is_err());
        assert!(Domain::parse_list(&["123", "12"]).is_err());
        assert!(Domain::new(vec![]).is_err());
    }

    #[test]
    fn restrict_identity() {
        let p = Profile::parse_list(&["231", "312", "123"]).unwrap();
        let all: Vec<AgentId> = p.agents().collect();
        let sub = restrict(&p, &all, &SubsetO::full(3)).unwrap();
        assert_eq!(sub.profile, p);
    }

    #[test]
    fn restrict_to_tail_economy() {
        let p = Profile::parse_list(&["2134", "2134", "1234", "1234"]).unwrap();
        let agents = [AgentId::new(3, 4).unwrap(), AgentId::new(4, 4).unwrap()];
        let objs = SubsetO::from_indices(&[3, 4], 4).unwrap();
        let sub = restrict(&p, &agents, &objs).unwrap();
        // o3 > o4 for both, reindexed as 1 > 2
        assert_eq!(sub.profile, Profile::parse_list(&["12", "12"]).unwrap());
        assert_eq!(sub.objects, objs.members());
        let lifted = sub.lift(&Allocation::endowment(2));
        assert_eq!(lifted[0].1.get(), 3);
        assert_eq!(lifted[1].1.get(), 4);
    }

    #[test]
    fn restrict_errors() {
        let p = Profile::parse_list(&["123", "123", "123"]).unwrap();
        let objs = SubsetO::from_indices(&[1, 2], 3).unwrap();
        let one = [AgentId::new(1, 3).unwrap()];
        assert!(matches!(
            restrict(&p, &one, &objs),
            Err(Error::Restriction(_))
        ));
        let wrong = [AgentId::new(1, 3).unwrap(), AgentId::new(3, 3).unwrap()];
        assert!(matches!(
            restrict(&p, &wrong, &objs),
            Err(Error::Restriction(_))
        ));
    }

    #[test]
    fn permutations_are_lexicographic() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![0, 1, 2]);
        assert_eq!(p[1], vec![0, 2, 1]);
        assert_eq!(p[5], vec![2, 1, 0]);
        assert_eq!(permutations(1), vec![vec![0]]);
    }

    #[test]
    fn subsets_size_then_lex() {
        let s = SubsetO::all_by_size(3, 2);
        let seqs: Vec<Vec<usize>> = s
            .iter()
            .map(|x| x.iter().map(|o| o.get()).collect())
            .collect();
        assert_eq!(
            seqs,
            vec![vec![1, 2], vec![1, 3], vec![2, 3], vec![1, 2, 3]]
        );
    }

    #[test]
    fn allocation_validation() {
        assert!(Allocation::from_indices(&[2, 1, 3]).is_ok());
        assert!(Allocation::from_indices(&[2, 2, 3]).is_err());
        assert!(Allocation::from_indices(&[4, 1, 2]).is_err());
        assert_eq!(Allocation::all(4).len(), 24);
    }
}
