use super::{AgentId, Domain, Profile};
use crate::error::{Error, Result};

/// The product `D_1 x ... x D_n` of per-agent domains, indexed in mixed
/// radix with agent 1 as the most significant digit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileSpace {
    domains: Vec<Domain>,
    strides: Vec<usize>,
    len: usize,
}

impl ProfileSpace {
    pub fn new(domains: Vec<Domain>) -> Result<Self> {
        let n = domains.len();
        if n == 0 {
            return Err(Error::Domain("need at least one agent domain".into()));
        }
        for (i, d) in domains.iter().enumerate() {
            if d.n() != n {
                return Err(Error::Domain(format!(
                    "domain of agent {} is over {} objects but there are {n} agents",
                    i + 1,
                    d.n()
                )));
            }
        }
        let mut strides = vec![1usize; n];
        let mut len = 1usize;
        for i in (0..n).rev() {
            strides[i] = len;
            len = len.checked_mul(domains[i].len()).ok_or_else(|| {
                Error::Budget("profile space size overflows usize".into())
            })?;
        }
        Ok(ProfileSpace {
            domains,
            strides,
            len,
        })
    }

    /// Every agent draws from the same domain.
    pub fn homogeneous(domain: &Domain) -> Self {
        ProfileSpace::new(vec![domain.clone(); domain.n()]).expect("n agents over n objects")
    }

    pub fn n(&self) -> usize {
        self.domains.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn domain(&self, agent: AgentId) -> &Domain {
        &self.domains[agent.idx()]
    }

    pub fn is_homogeneous(&self) -> bool {
        self.domains.iter().all(|d| d == &self.domains[0])
    }

    pub fn stride(&self, agent: AgentId) -> usize {
        self.strides[agent.idx()]
    }

    /// Index of agent `agent`'s preference within its domain at profile `index`.
    pub fn digit(&self, index: usize, agent: AgentId) -> usize {
        let i = agent.idx();
        (index / self.strides[i]) % self.domains[i].len()
    }

    pub fn digits(&self, index: usize) -> Vec<usize> {
        (0..self.n())
            .map(|i| (index / self.strides[i]) % self.domains[i].len())
            .collect()
    }

    pub fn index_of_digits(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.strides)
            .map(|(d, s)| d * s)
            .sum()
    }

    /// The profile obtained by replacing agent `agent`'s report at `index`
    /// with the `pref_index`-th element of its domain.
    pub fn neighbor(&self, index: usize, agent: AgentId, pref_index: usize) -> usize {
        let cur = self.digit(index, agent);
        let s = self.strides[agent.idx()];
        index - cur * s + pref_index * s
    }

    pub fn profile(&self, index: usize) -> Profile {
        assert!(index < self.len, "profile index out of range");
        let prefs = (0..self.n())
            .map(|i| {
                let d = &self.domains[i];
                d.prefs()[(index / self.strides[i]) % d.len()].clone()
            })
            .collect();
        Profile::new(prefs).expect("space holds valid profiles")
    }

    pub fn index_of(&self, profile: &Profile) -> Option<usize> {
        if profile.n() != self.n() {
            return None;
        }
        let mut idx = 0;
        for (i, p) in profile.prefs().iter().enumerate() {
            idx += self.domains[i].position(p)? * self.strides[i];
        }
        Some(idx)
    }

    pub fn iter(&self) -> impl Iterator<Item = Profile> + '_ {
        (0..self.len).map(move |i| self.profile(i))
    }
}

/// Every profile of the product of per-agent domains, each exactly once, in
/// lexicographic order of per-agent preference indices.
pub fn enumerate_profiles(domains: &[Domain]) -> Result<impl Iterator<Item = Profile>> {
    let space = ProfileSpace::new(domains.to_vec())?;
    Ok((0..space.len()).map(move |i| space.profile(i)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let d = Domain::parse_list(&["123", "231", "213"]).unwrap();
        assert_eq!(enumerate_profiles(&[d.clone(), d.clone(), d.clone()]).unwrap().count(), 27);

        let hetero = [
            Domain::parse_list(&["213"]).unwrap(),
            Domain::parse_list(&["321"]).unwrap(),
            Domain::parse_list(&["132"]).unwrap(),
        ];
        let all: Vec<_> = enumerate_profiles(&hetero).unwrap().collect();
        assert_eq!(all, vec![Profile::parse_list(&["213", "321", "132"]).unwrap()]);

        let d8 = Domain::parse_list(&["1234", "2134", "2314", "2341", "3214", "3241", "3421", "4321"]).unwrap();
        assert_eq!(ProfileSpace::homogeneous(&d8).len(), 4096);
    }

    #[test]
    fn lexicographic_order_and_indexing() {
        let d = Domain::parse_list(&["12", "21"]).unwrap();
        let space = ProfileSpace::homogeneous(&d);
        let seen: Vec<String> = space.iter().map(|p| p.to_string()).collect();
        assert_eq!(seen, ["(12,12)", "(12,21)", "(21,12)", "(21,21)"]);
        for i in 0..space.len() {
            assert_eq!(space.index_of(&space.profile(i)), Some(i));
            assert_eq!(space.index_of_digits(&space.digits(i)), i);
        }
        let a1 = AgentId::new(1, 2).unwrap();
        assert_eq!(space.neighbor(1, a1, 1), 3);
    }

    #[test]
    fn mismatched_sizes_rejected() {
        let d3 = Domain::parse_list(&["123"]).unwrap();
        let d2 = Domain::parse_list(&["12"]).unwrap();
        assert!(enumerate_profiles(&[d3.clone(), d2, d3.clone()]).is_err());
        assert!(enumerate_profiles(&[d3.clone(), d3]).is_err());
    }
}
