//! Brute-force oracles shared by the integration tests. None of these call
//! into the search, TTC, or cycle-based efficiency code under test.

#![allow(dead_code)]

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

use ttc_lab::model::{AgentId, Allocation, Domain, ObjectId, Preference, Profile, ProfileSpace};

pub fn all_allocations(n: usize) -> Vec<Allocation> {
    (1..=n)
        .permutations(n)
        .map(|p| Allocation::from_indices(&p).unwrap())
        .collect()
}

fn prefers(p: &Preference, a: ObjectId, b: ObjectId) -> bool {
    let order = p.order();
    order.iter().position(|&o| o == a) < order.iter().position(|&o| o == b)
}

fn weakly(p: &Preference, a: ObjectId, b: ObjectId) -> bool {
    a == b || prefers(p, a, b)
}

/// Whether some coalition can reshuffle its own endowments so that every
/// member weakly gains over `x` and one strictly gains.
pub fn weakly_blocked(profile: &Profile, x: &Allocation) -> bool {
    let n = profile.n();
    for size in 1..=n {
        for coalition in (0..n).combinations(size) {
            for image in coalition.iter().copied().permutations(size) {
                let mut all_weak = true;
                let mut some_strict = false;
                for (&i, &j) in coalition.iter().zip(&image) {
                    let pref = &profile.prefs()[i];
                    let got = x.as_slice()[i];
                    let offered = ObjectId::new(j + 1, n).unwrap();
                    if !weakly(pref, offered, got) {
                        all_weak = false;
                        break;
                    }
                    some_strict |= prefers(pref, offered, got);
                }
                if all_weak && some_strict {
                    return true;
                }
            }
        }
    }
    false
}

/// Every allocation no coalition weakly blocks.
pub fn strict_core(profile: &Profile) -> Vec<Allocation> {
    all_allocations(profile.n())
        .into_iter()
        .filter(|x| !weakly_blocked(profile, x))
        .collect()
}

/// Pareto efficiency by comparing against all `n!` allocations.
pub fn pareto_brute(profile: &Profile, x: &Allocation) -> bool {
    let prefs = profile.prefs();
    !all_allocations(profile.n()).iter().any(|y| {
        let pairs = || y.as_slice().iter().zip(x.as_slice()).zip(prefs);
        pairs().all(|((&a, &b), p)| weakly(p, a, b)) && pairs().any(|((&a, &b), p)| prefers(p, a, b))
    })
}

pub fn ir_brute(profile: &Profile, x: &Allocation) -> bool {
    let n = profile.n();
    (0..n).all(|i| weakly(&profile.prefs()[i], x.as_slice()[i], ObjectId::new(i + 1, n).unwrap()))
}

pub fn pair_brute(profile: &Profile, x: &Allocation) -> bool {
    let n = profile.n();
    let (p, a) = (profile.prefs(), x.as_slice());
    !(0..n)
        .tuple_combinations()
        .any(|(i, j)| prefers(&p[i], a[j], a[i]) && prefers(&p[j], a[i], a[j]))
}

/// Whether the table (one allocation per profile index of `space`) admits
/// a profitable unilateral misreport.
pub fn table_manipulable(space: &ProfileSpace, table: &[Allocation]) -> bool {
    let n = space.n();
    for idx in 0..space.len() {
        let truth = space.profile(idx);
        for i in 0..n {
            let agent = AgentId::new(i + 1, n).unwrap();
            for m in 0..space.domain(agent).len() {
                let j = space.neighbor(idx, agent, m);
                let honest = table[idx].as_slice()[i];
                let lie = table[j].as_slice()[i];
                if prefers(&truth.prefs()[i], lie, honest) {
                    return true;
                }
            }
        }
    }
    false
}

/// Number of strategyproof tables drawn from per-profile candidate lists,
/// or `None` when the product of list sizes exceeds `limit`.
pub fn count_sp_tables(space: &ProfileSpace, lists: &[Vec<Allocation>], limit: usize) -> Option<usize> {
    let total = lists.iter().try_fold(1usize, |acc, l| acc.checked_mul(l.len()))?;
    if total > limit {
        return None;
    }
    let mut count = 0;
    for choice in lists.iter().map(|l| l.iter().cloned()).multi_cartesian_product() {
        if !table_manipulable(space, &choice) {
            count += 1;
        }
    }
    Some(count)
}

pub fn random_pref<R: Rng>(n: usize, rng: &mut R) -> Preference {
    let mut v: Vec<usize> = (1..=n).collect();
    v.shuffle(rng);
    Preference::from_indices(&v).unwrap()
}

pub fn random_profile<R: Rng>(n: usize, rng: &mut R) -> Profile {
    Profile::new((0..n).map(|_| random_pref(n, rng)).collect()).unwrap()
}

pub fn random_allocation<R: Rng>(n: usize, rng: &mut R) -> Allocation {
    let mut v: Vec<usize> = (1..=n).collect();
    v.shuffle(rng);
    Allocation::from_indices(&v).unwrap()
}

/// A random domain of `size` distinct orders over `n` objects.
pub fn random_domain<R: Rng>(n: usize, size: usize, rng: &mut R) -> Domain {
    let mut all: Vec<Vec<usize>> = (1..=n).permutations(n).collect();
    all.shuffle(rng);
    let prefs = all
        .into_iter()
        .take(size)
        .map(|v| Preference::from_indices(&v).unwrap())
        .collect();
    Domain::new(prefs).unwrap()
}
