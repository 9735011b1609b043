use std::fmt;

use super::{ObjectId, SubsetO, MAX_OBJECTS};
use crate::error::{Error, Result};

/// A strict linear order over `n` objects, most-preferred first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Preference {
    order: Vec<ObjectId>,
    // position[o.idx()] = 0-based rank of o
    position: Vec<u8>,
}

impl Preference {
    pub fn new(order: Vec<ObjectId>) -> Result<Self> {
        let n = order.len();
        if n == 0 || n > MAX_OBJECTS {
            return Err(Error::Domain(format!("preference length {n} out of range")));
        }
        let mut position = vec![u8::MAX; n];
        for (r, o) in order.iter().enumerate() {
            if o.get() > n {
                return Err(Error::Parse {
                    position: r,
                    message: format!("object {o} does not exist for n = {n}"),
                });
            }
            if position[o.idx()] != u8::MAX {
                return Err(Error::Parse {
                    position: r,
                    message: format!("duplicate object {o}"),
                });
            }
            position[o.idx()] = r as u8;
        }
        Ok(Preference { order, position })
    }

    /// From 1-based object indices, e.g. `[2, 3, 1]` for `o2 o3 o1`.
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let n = indices.len();
        let order = indices
            .iter()
            .enumerate()
            .map(|(r, &i)| {
                ObjectId::new(i, n).map_err(|_| Error::Parse {
                    position: r,
                    message: format!("object index {i} is not in 1..={n}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Preference::new(order)
    }

    pub(crate) fn from_zero_based(indices: &[usize]) -> Result<Self> {
        let v: Vec<usize> = indices.iter().map(|i| i + 1).collect();
        Preference::from_indices(&v)
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[ObjectId] {
        &self.order
    }

    /// 0-based position of `o` in the order.
    pub fn position(&self, o: ObjectId) -> usize {
        self.position[o.idx()] as usize
    }

    /// `a P b`.
    pub fn prefers(&self, a: ObjectId, b: ObjectId) -> bool {
        self.position[a.idx()] < self.position[b.idx()]
    }

    /// `a R b`.
    pub fn weakly_prefers(&self, a: ObjectId, b: ObjectId) -> bool {
        self.position[a.idx()] <= self.position[b.idx()]
    }

    pub fn top(&self) -> ObjectId {
        self.order[0]
    }

    /// Objects of `subset` in preference order.
    pub fn within(&self, subset: SubsetO) -> impl Iterator<Item = ObjectId> + '_ {
        self.order.iter().copied().filter(move |o| subset.contains(*o))
    }

    /// `r_k(P_0, O')` with `k` 1-based.
    pub fn rank(&self, subset: &SubsetO, k: usize) -> Result<ObjectId> {
        if subset.universe() != self.n() {
            return Err(Error::Domain(format!(
                "subset {subset} is over {} objects, preference over {}",
                subset.universe(),
                self.n()
            )));
        }
        if k == 0 || k > subset.len() {
            return Err(Error::RankOutOfBounds {
                k,
                size: subset.len(),
            });
        }
        Ok(self.within(*subset).nth(k - 1).expect("k within subset size"))
    }

    /// Restriction to `subset`, relabeled so the `j`-th smallest member of
    /// `subset` becomes object `j`.
    pub fn restricted(&self, subset: &SubsetO) -> Preference {
        let members = subset.members();
        let order = self
            .within(*subset)
            .map(|o| {
                let j = members.binary_search(&o).expect("member");
                ObjectId::from_zero(j)
            })
            .collect();
        Preference::new(order).expect("restriction of a permutation")
    }

    /// Applies an object relabeling; `map[o.idx()]` is the new label of `o`.
    pub fn relabeled(&self, map: &[ObjectId]) -> Preference {
        Preference::new(self.order.iter().map(|o| map[o.idx()]).collect())
            .expect("relabeling is a bijection")
    }

    /// Compact digit form (`n <= 9`), e.g. `231`.
    pub fn to_compact(&self) -> Option<String> {
        if self.n() > 9 {
            return None;
        }
        Some(self.order.iter().map(|o| char::from(b'0' + o.get() as u8)).collect())
    }

    /// General form, e.g. `o2>o3>o1`.
    pub fn to_general(&self) -> String {
        self.order
            .iter()
            .map(|o| o.to_string())
            .collect::<Vec<_>>()
            .join(">")
    }
}

impl fmt::Display for Preference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_compact() {
            Some(s) => f.write_str(&s),
            None => f.write_str(&self.to_general()),
        }
    }
}
