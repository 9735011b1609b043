//! Top-two, top-three and top-k richness conditions.
//!
//! A domain satisfies the top-k condition when, within every object subset
//! `O'`, any `k` distinct objects that can each be ranked first within `O'`
//! can also be ranked first through `k`-th within `O'` in every order.
//! Subsets where fewer than `k` objects can be ranked first hold vacuously.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Domain, ObjectId, SubsetO};

/// A witness that no preference ranks `a` first and `b` second within `subset`,
/// although both `a` and `b` can be ranked first there.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Failure {
    pub subset: SubsetO,
    pub a: ObjectId,
    pub b: ObjectId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopTwoReport {
    pub satisfied: bool,
    pub failures: Vec<Failure>,
}

impl TopTwoReport {
    /// Failures whose subset is the full object set.
    pub fn failures_at_full(&self) -> impl Iterator<Item = &Failure> {
        self.failures.iter().filter(|f| f.subset.is_full())
    }

    pub fn fails_for(&self, subset: &SubsetO) -> bool {
        self.failures.iter().any(|f| &f.subset == subset)
    }
}

/// A `k`-tuple of top-able objects that no preference realizes as ranks `1..=k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TupleFailure {
    pub subset: SubsetO,
    pub tuple: Vec<ObjectId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopKReport {
    pub k: usize,
    pub satisfied: bool,
    pub failures: Vec<TupleFailure>,
}

fn prefix_mask(domain: &Domain, subset: &SubsetO, k: usize) -> Vec<Vec<ObjectId>> {
    domain
        .iter()
        .map(|p| p.within(*subset).take(k).collect())
        .collect()
}

/// Scans every subset of size at least two (size-then-lexicographic order)
/// and every ordered pair of distinct top-able objects in it.
pub fn check_top_two(domain: &Domain) -> TopTwoReport {
    let n = domain.n();
    let mut failures = Vec::new();
    if n >= 2 {
        for subset in SubsetO::all_by_size(n, 2) {
            let prefixes = prefix_mask(domain, &subset, 2);
            let tops = top_set_of(&prefixes);
            for &a in &tops {
                for &b in &tops {
                    if a != b && !prefixes.iter().any(|p| p[0] == a && p[1] == b) {
                        failures.push(Failure { subset, a, b });
                    }
                }
            }
        }
    }
    TopTwoReport {
        satisfied: failures.is_empty(),
        failures,
    }
}

fn top_set_of(prefixes: &[Vec<ObjectId>]) -> Vec<ObjectId> {
    let mut tops: Vec<ObjectId> = prefixes.iter().map(|p| p[0]).collect();
    tops.sort();
    tops.dedup();
    tops
}

/// The top-k generalization; `k = 2` reports exactly what [`check_top_two`] does.
pub fn check_top_k(domain: &Domain, k: usize) -> Result<TopKReport> {
    let n = domain.n();
    if k < 2 || k > n {
        return Err(Error::RankOutOfBounds { k, size: n });
    }
    let mut failures = Vec::new();
    for subset in SubsetO::all_by_size(n, k) {
        let prefixes = prefix_mask(domain, &subset, k);
        let tops = top_set_of(&prefixes);
        if tops.len() < k {
            continue;
        }
        for tuple in ordered_tuples(&tops, k) {
            if !prefixes.iter().any(|p| p[..] == tuple[..]) {
                failures.push(TupleFailure { subset, tuple });
            }
        }
    }
    Ok(TopKReport {
        k,
        satisfied: failures.is_empty(),
        failures,
    })
}

/// Ordered `k`-tuples of distinct items, lexicographic by position.
fn ordered_tuples(items: &[ObjectId], k: usize) -> Vec<Vec<ObjectId>> {
    fn go(items: &[ObjectId], k: usize, cur: &mut Vec<ObjectId>, out: &mut Vec<Vec<ObjectId>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for &x in items {
            if !cur.contains(&x) {
                cur.push(x);
                go(items, k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(items, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// A largest subset for which the top-two condition fails; ties go to the
/// lexicographically smallest sorted member sequence.
pub fn maximal_failing_subset(domain: &Domain) -> Option<SubsetO> {
    let report = check_top_two(domain);
    let mut best: Option<SubsetO> = None;
    for f in &report.failures {
        best = match best {
            None => Some(f.subset),
            Some(b) if f.subset.len() > b.len() => Some(f.subset),
            Some(b) if f.subset.len() == b.len() && f.subset.members() < b.members() => {
                Some(f.subset)
            }
            keep => keep,
        };
    }
    best
}

#[derive(Serialize)]
struct FailureRepr {
    subset: Vec<usize>,
    a: usize,
    b: usize,
}

impl Serialize for Failure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FailureRepr {
            subset: self.subset.iter().map(|o| o.get()).collect(),
            a: self.a.get(),
            b: self.b.get(),
        }
        .serialize(s)
    }
}

impl Serialize for TopTwoReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            k: usize,
            satisfied: bool,
            failures: &'a [Failure],
        }
        Repr {
            k: 2,
            satisfied: self.satisfied,
            failures: &self.failures,
        }
        .serialize(s)
    }
}

impl Serialize for TopKReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct F {
            subset: Vec<usize>,
            tuple: Vec<usize>,
        }
        #[derive(Serialize)]
        struct Repr {
            k: usize,
            satisfied: bool,
            failures: Vec<F>,
        }
        Repr {
            k: self.k,
            satisfied: self.satisfied,
            failures: self
                .failures
                .iter()
                .map(|f| F {
                    subset: f.subset.iter().map(|o| o.get()).collect(),
                    tuple: f.tuple.iter().map(|o| o.get()).collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}
