//! Generators for the standard preference domains.
//!
//! Every generator filters all `n!` linear orders through the defining
//! condition, so results come out in lexicographic order of the orders.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{permutations, Domain, ObjectId, Preference};

/// Largest `n` for which generators enumerate all orders.
pub const MAX_ENUMERATION_N: usize = 9;

/// An underlying order `a_1 -> a_2 -> ... -> a_n` of the objects (an axis),
/// or a cyclic order when `cyclic` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearOrderSpec {
    order: Vec<ObjectId>,
    cyclic: bool,
}

impl LinearOrderSpec {
    pub fn new(order: &Preference, cyclic: bool) -> Self {
        LinearOrderSpec {
            order: order.order().to_vec(),
            cyclic,
        }
    }

    pub fn axis(order: &Preference) -> Self {
        LinearOrderSpec::new(order, false)
    }

    pub fn cycle(order: &Preference) -> Self {
        LinearOrderSpec::new(order, true)
    }

    /// `o_1 -> ... -> o_n`.
    pub fn identity(n: usize, cyclic: bool) -> Self {
        LinearOrderSpec {
            order: (0..n).map(ObjectId::from_zero).collect(),
            cyclic,
        }
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[ObjectId] {
        &self.order
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if self.order.len() != n {
            return Err(Error::Domain(format!(
                "order has {} objects, expected {n}",
                self.order.len()
            )));
        }
        Ok(())
    }
}

/// A strict partial order given by generating edges `a > b`.
/// Displays in the form [`PartialOrderSpec::parse`] reads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialOrderSpec {
    n: usize,
    edges: Vec<(ObjectId, ObjectId)>,
    // closure[a] = bitmask of everything a dominates
    closure: Vec<u32>,
}

impl PartialOrderSpec {
    pub fn new(n: usize, edges: Vec<(ObjectId, ObjectId)>) -> Result<Self> {
        if n == 0 || n > MAX_ENUMERATION_N {
            return Err(Error::Domain(format!("n = {n} out of range")));
        }
        let mut closure = vec![0u32; n];
        for &(a, b) in &edges {
            if a.get() > n || b.get() > n {
                return Err(Error::InvalidObject {
                    index: a.get().max(b.get()),
                    n,
                });
            }
            closure[a.idx()] |= b.bit();
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if closure[i] & (1 << k) != 0 {
                    closure[i] |= closure[k];
                }
            }
        }
        if let Some(i) = (0..n).find(|&i| closure[i] & (1 << i) != 0) {
            return Err(Error::Construction(format!(
                "partial order has a cycle through {}",
                ObjectId::from_zero(i)
            )));
        }
        Ok(PartialOrderSpec { n, edges, closure })
    }

    pub fn empty(n: usize) -> Result<Self> {
        PartialOrderSpec::new(n, Vec::new())
    }

    /// Parses `"1>3,2>4"`.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (pos, part) in s.split(',').map(str::trim).filter(|p| !p.is_empty()).enumerate() {
            let (a, b) = part.split_once('>').ok_or_else(|| Error::Parse {
                position: pos,
                message: format!("expected an edge like 1>3, found {part:?}"),
            })?;
            let parse_obj = |t: &str| -> Result<ObjectId> {
                let t = t.trim();
                let v: usize = t.trim_start_matches('o').parse().map_err(|_| Error::Parse {
                    position: pos,
                    message: format!("bad object {t:?}"),
                })?;
                ObjectId::new(v, n)
            };
            edges.push((parse_obj(a)?, parse_obj(b)?));
        }
        PartialOrderSpec::new(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(ObjectId, ObjectId)] {
        &self.edges
    }

    /// `a > b` in the transitive closure.
    pub fn dominates(&self, a: ObjectId, b: ObjectId) -> bool {
        self.closure[a.idx()] & b.bit() != 0
    }

    fn admits(&self, p: &Preference) -> bool {
        p.order().iter().enumerate().all(|(r, &a)| {
            // nothing ranked above a may be dominated by a
            p.order()[..r].iter().all(|&b| !self.dominates(a, b))
        })
    }
}

impl fmt::Display for PartialOrderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .edges
            .iter()
            .map(|(a, b)| format!("{}>{}", a.get(), b.get()))
            .collect();
        f.write_str(&parts.join(","))
    }
}

fn all_orders(n: usize) -> Result<Vec<Preference>> {
    if n == 0 || n > MAX_ENUMERATION_N {
        return Err(Error::Domain(format!(
            "n = {n} is outside the enumeration range 1..={MAX_ENUMERATION_N}"
        )));
    }
    Ok(permutations(n)
        .iter()
        .map(|v| Preference::from_zero_based(v).expect("permutation"))
        .collect())
}

fn filtered(n: usize, keep: impl Fn(&Preference) -> bool) -> Result<Domain> {
    let prefs: Vec<Preference> = all_orders(n)?.into_iter().filter(|p| keep(p)).collect();
    Domain::new(prefs)
}

fn require_min_n(kind: &str, n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::Domain(format!("{kind} domain requires n >= {min}, got {n}")));
    }
    Ok(())
}

/// All `n!` strict orders.
pub fn unrestricted(n: usize) -> Result<Domain> {
    Domain::new(all_orders(n)?)
}

/// Orders single-peaked with respect to `axis`: with the peak at axis
/// position `q`, preference strictly increases along the axis up to `q`
/// and strictly decreases after it.
pub fn single_peaked(n: usize, axis: &LinearOrderSpec) -> Result<Domain> {
    require_min_n("single-peaked", n, 3)?;
    axis.check_n(n)?;
    let a = &axis.order;
    filtered(n, |p| {
        let q = a.iter().position(|&o| o == p.top()).unwrap();
        (0..n - 1).all(|j| {
            if j < q {
                p.prefers(a[j + 1], a[j])
            } else {
                p.prefers(a[j], a[j + 1])
            }
        })
    })
}

/// Single-peaked orders whose peak is the `p`-th or `(p+1)`-th axis object.
pub fn single_peaked_two_adjacent(n: usize, axis: &LinearOrderSpec, p: usize) -> Result<Domain> {
    require_min_n("single-peaked", n, 3)?;
    if p == 0 || p >= n {
        return Err(Error::Domain(format!("peak index {p} not in 1..={}", n - 1)));
    }
    axis.check_n(n)?;
    let peaks = [axis.order[p - 1], axis.order[p]];
    let sp = single_peaked(n, axis)?;
    Domain::new(
        sp.iter()
            .filter(|pref| peaks.contains(&pref.top()))
            .cloned()
            .collect(),
    )
}

/// Orders single-dipped with respect to `axis`: with the least-preferred
/// object at axis position `q`, preference strictly decreases along the
/// axis down to `q` and strictly increases after it.
pub fn single_dipped(n: usize, axis: &LinearOrderSpec) -> Result<Domain> {
    require_min_n("single-dipped", n, 3)?;
    axis.check_n(n)?;
    let a = &axis.order;
    filtered(n, |p| {
        let dip = p.order()[n - 1];
        let q = a.iter().position(|&o| o == dip).unwrap();
        (0..n - 1).all(|j| {
            if j < q {
                p.prefers(a[j], a[j + 1])
            } else {
                p.prefers(a[j + 1], a[j])
            }
        })
    })
}

/// Orders that start anywhere on `cycle` and walk it clockwise or
/// counterclockwise.
pub fn circular(n: usize, cycle: &LinearOrderSpec) -> Result<Domain> {
    require_min_n("circular", n, 4)?;
    cycle.check_n(n)?;
    let c = &cycle.order;
    filtered(n, |p| {
        let q = c.iter().position(|&o| o == p.top()).unwrap();
        let clockwise = (0..n).all(|r| p.order()[r] == c[(q + r) % n]);
        let counter = (0..n).all(|r| p.order()[r] == c[(q + n - r) % n]);
        clockwise || counter
    })
}

/// Linear extensions of `spec`.
pub fn partial_agreement(n: usize, spec: &PartialOrderSpec) -> Result<Domain> {
    if spec.n() != n {
        return Err(Error::Domain(format!(
            "partial order is over {} objects, expected {n}",
            spec.n()
        )));
    }
    filtered(n, |p| spec.admits(p))
}

/// Deterministic pseudo-random partial-agreement domains.
///
/// Each spec orients a random subset of object pairs along a random
/// permutation (so it is acyclic). Specs whose domain has fewer than two or
/// more than `max_size` orders, or repeats an earlier domain, are skipped.
pub fn partial_agreement_samples(
    n: usize,
    count: usize,
    max_size: usize,
    seed: u64,
) -> Result<Vec<(PartialOrderSpec, Domain)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<(PartialOrderSpec, Domain)> = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::Domain(format!(
                "could not draw {count} distinct partial-agreement domains of size <= {max_size}"
            )));
        }
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let density: f64 = rng.gen_range(0.2..0.9);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(density) {
                    edges.push((ObjectId::from_zero(perm[i]), ObjectId::from_zero(perm[j])));
                }
            }
        }
        let spec = PartialOrderSpec::new(n, edges)?;
        let dom = partial_agreement(n, &spec)?;
        if dom.len() < 2 || dom.len() > max_size || out.iter().any(|(_, d)| d == &dom) {
            continue;
        }
        out.push((spec, dom));
    }
    Ok(out)
}

/// Three objects; `o1` and `o2` can top, and both can be ranked top two in either order.
pub fn example_d1() -> Domain {
    Domain::parse_list(&["123", "231", "213"]).expect("valid")
}

/// Three objects; `o2` is never followed directly by `o1`.
pub fn example_d2() -> Domain {
    Domain::parse_list(&["123", "231", "132"]).expect("valid")
}

/// Four objects; fails the top-two condition within `{o1, o3, o4}` only.
pub fn example_d3() -> Domain {
    Domain::parse_list(&["1234", "1324", "2143", "2431"]).expect("valid")
}
