//! Top trading cycles.
//!
//! Each remaining agent points to the owner of its most-preferred remaining
//! object. The pointing graph is functional, so its cycles are vertex
//! disjoint; every cycle of a round trades at once and leaves.

use serde::Serialize;

use crate::model::{AgentId, Allocation, ObjectId, Profile};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Round {
    pub remaining: Vec<AgentId>,
    /// Each cycle starts at its smallest agent and follows the pointers;
    /// cycles are sorted by that first agent.
    pub cycles: Vec<Vec<AgentId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TtcTrace {
    pub rounds: Vec<Round>,
    pub result: Allocation,
}

impl TtcTrace {
    /// Re-executes the recorded cycles, round by round, in the given order of
    /// cycles within each round.
    pub fn replay(&self, profile: &Profile, reverse_cycles: bool) -> Allocation {
        let n = profile.n();
        let mut assign = vec![None; n];
        for round in &self.rounds {
            let remaining: u32 = round.remaining.iter().fold(0, |m, a| m | a.endowment().bit());
            let mut order: Vec<&Vec<AgentId>> = round.cycles.iter().collect();
            if reverse_cycles {
                order.reverse();
            }
            for cycle in order {
                for &a in cycle {
                    let best = best_remaining(profile, a, remaining);
                    assign[a.idx()] = Some(best);
                }
            }
        }
        Allocation::new(assign.into_iter().map(|o| o.expect("every agent trades")).collect())
            .expect("replayed trace is a bijection")
    }
}

fn best_remaining(profile: &Profile, agent: AgentId, remaining: u32) -> ObjectId {
    *profile
        .get(agent)
        .order()
        .iter()
        .find(|o| remaining & o.bit() != 0)
        .expect("remaining set nonempty")
}

pub fn ttc(profile: &Profile) -> Allocation {
    run(profile, false).1
}

pub fn ttc_trace(profile: &Profile) -> TtcTrace {
    let (rounds, result) = run(profile, true);
    TtcTrace { rounds, result }
}

fn run(profile: &Profile, record: bool) -> (Vec<Round>, Allocation) {
    let n = profile.n();
    let mut remaining: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut assign: Vec<ObjectId> = (0..n).map(ObjectId::from_zero).collect();
    let mut rounds = Vec::new();
    let mut points = vec![0usize; n];
    // stamp[i] = walk id that first visited i; 0 = unvisited this round
    let mut stamp = vec![0usize; n];

    while remaining != 0 {
        let alive: Vec<usize> = (0..n).filter(|i| remaining & (1 << i) != 0).collect();
        for &i in &alive {
            points[i] = best_remaining(profile, AgentId::from_zero(i), remaining).idx();
            stamp[i] = 0;
        }
        let mut cycles: Vec<Vec<AgentId>> = Vec::new();
        for (walk, &start) in alive.iter().enumerate() {
            let walk = walk + 1;
            let mut cur = start;
            while stamp[cur] == 0 {
                stamp[cur] = walk;
                cur = points[cur];
            }
            if stamp[cur] != walk {
                continue;
            }
            // cur lies on a new cycle; rotate it to start at its minimum
            let mut cycle = vec![cur];
            let mut nxt = points[cur];
            while nxt != cur {
                cycle.push(nxt);
                nxt = points[nxt];
            }
            let min_pos = cycle.iter().enumerate().min_by_key(|(_, &a)| a).unwrap().0;
            cycle.rotate_left(min_pos);
            cycles.push(cycle.into_iter().map(AgentId::from_zero).collect());
        }
        cycles.sort();
        for cycle in &cycles {
            for a in cycle {
                assign[a.idx()] = ObjectId::from_zero(points[a.idx()]);
            }
        }
        let traded: u32 = cycles.iter().flatten().fold(0, |m, a| m | (1 << a.idx()));
        if record {
            rounds.push(Round {
                remaining: alive.iter().map(|&i| AgentId::from_zero(i)).collect(),
                cycles,
            });
        }
        remaining &= !traded;
    }
    (rounds, Allocation::new(assign).expect("ttc yields a bijection"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prof(v: &[&str]) -> Profile {
        Profile::parse_list(v).unwrap()
    }

    fn agents(v: &[usize]) -> Vec<AgentId> {
        v.iter().map(|&i| AgentId::from_zero(i - 1)).collect()
    }

    #[test]
    fn self_loops_keep_endowments() {
        let p = prof(&["123", "213", "312"]);
        assert_eq!(ttc(&p), Allocation::endowment(3));
        let t = ttc_trace(&p);
        assert_eq!(t.rounds.len(), 1);
        assert_eq!(t.rounds[0].cycles, vec![agents(&[1]), agents(&[2]), agents(&[3])]);
    }

    #[test]
    fn three_cycle() {
        let p = prof(&["231", "312", "123"]);
        assert_eq!(ttc(&p).to_string(), "231");
        let t = ttc_trace(&p);
        assert_eq!(t.rounds.len(), 1);
        assert_eq!(t.rounds[0].cycles, vec![agents(&[1, 2, 3])]);
    }

    #[test]
    fn three_rounds() {
        let p = prof(&["213", "213", "123"]);
        let t = ttc_trace(&p);
        assert_eq!(t.result.to_string(), "123");
        assert_eq!(t.rounds.len(), 3);
        assert_eq!(t.rounds[0].cycles, vec![agents(&[2])]);
        assert_eq!(t.rounds[1].cycles, vec![agents(&[1])]);
        assert_eq!(t.rounds[2].cycles, vec![agents(&[3])]);
    }

    #[test]
    fn replay_is_order_independent() {
        let p = prof(&["2143", "1234", "4312", "3421"]);
        let t = ttc_trace(&p);
        assert_eq!(t.rounds[0].cycles.len(), 2);
        assert_eq!(t.replay(&p, false), t.result);
        assert_eq!(t.replay(&p, true), t.result);
    }

    #[test]
    fn every_agent_in_exactly_one_cycle() {
        let p = prof(&["32145", "13254", "25413", "54321", "41235"]);
        let t = ttc_trace(&p);
        let mut seen: Vec<AgentId> = t.rounds.iter().flat_map(|r| r.cycles.iter().flatten().copied()).collect();
        seen.sort();
        assert_eq!(seen, agents(&[1, 2, 3, 4, 5]));
        assert_eq!(ttc_trace(&p), t);
    }
}
