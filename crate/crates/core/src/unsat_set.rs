//! Index set over clause indices with O(1) insert, remove, membership and
//! uniform sampling.
//!
//! A dense member array paired with a position map; removal swaps the victim
//! with the last member. Sampling picks a uniform slot of the member array,
//! which stays uniform over the set regardless of the insertion and removal
//! history.

use rand::Rng;

const ABSENT: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct UnsatClauseSet {
    members: Vec<u32>,
    position: Vec<u32>,
}

impl UnsatClauseSet {
    pub fn new(num_clauses: usize) -> Self {
        UnsatClauseSet {
            members: Vec::new(),
            position: vec![ABSENT; num_clauses],
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, clause: u32) -> bool {
        self.position[clause as usize] != ABSENT
    }

    /// Returns true if the clause was newly inserted.
    pub fn insert(&mut self, clause: u32) -> bool {
        if self.contains(clause) {
            return false;
        }
        self.position[clause as usize] = self.members.len() as u32;
        self.members.push(clause);
        true
    }

    /// Returns true if the clause was present.
    pub fn remove(&mut self, clause: u32) -> bool {
        let slot = self.position[clause as usize];
        if slot == ABSENT {
            return false;
        }
        let last = *self.members.last().expect("non-empty when slot is set");
        self.members[slot as usize] = last;
        self.position[last as usize] = slot;
        self.members.pop();
        self.position[clause as usize] = ABSENT;
        true
    }

    /// Uniform draw over the current members. Panics on an empty set.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        assert!(!self.members.is_empty(), "sample from empty unsat set");
        self.members[rng.random_range(0..self.members.len())]
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.members
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn insert_remove_membership() {
        let mut set = UnsatClauseSet::new(10);
        assert!(set.insert(3));
        assert!(!set.insert(3));
        assert!(set.insert(7));
        assert!(set.contains(3));
        assert!(set.remove(3));
        assert!(!set.remove(3));
        assert!(!set.contains(3));
        assert_eq!(set.len(), 1);
        assert!(set.contains(7));
    }

    #[test]
    fn singleton_sample_is_certain() {
        let mut set = UnsatClauseSet::new(10);
        set.insert(7);
        let mut rng = stream(1);
        for _ in 0..20 {
            assert_eq!(set.sample(&mut rng), 7);
        }
    }

    #[test]
    fn sample_is_uniform_over_three_members() {
        let mut set = UnsatClauseSet::new(10);
        for i in [2, 5, 9] {
            set.insert(i);
        }
        let mut rng = stream(99);
        let mut counts = [0u64; 10];
        let draws = 100_000;
        for _ in 0..draws {
            counts[set.sample(&mut rng) as usize] += 1;
        }
        for i in [2, 5, 9] {
            let freq = counts[i] as f64 / draws as f64;
            assert!((freq - 1.0 / 3.0).abs() < 0.01, "freq[{i}] = {freq}");
        }
    }

    #[test]
    fn sample_stays_uniform_after_adversarial_updates() {
        // Churn the set through interleaved inserts and removes, then check
        // uniformity over whatever membership survived.
        let mut set = UnsatClauseSet::new(64);
        let mut rng = stream(1234);
        for round in 0..500u32 {
            let c = (round * 17 + 5) % 64;
            if set.contains(c) {
                set.remove(c);
            } else {
                set.insert(c);
            }
        }
        let members: Vec<u32> = set.iter().collect();
        assert!(members.len() > 3);
        let draws = 200_000;
        let mut counts = vec![0u64; 64];
        for _ in 0..draws {
            counts[set.sample(&mut rng) as usize] += 1;
        }
        let expected = 1.0 / members.len() as f64;
        for &m in &members {
            let freq = counts[m as usize] as f64 / draws as f64;
            assert!((freq - expected).abs() < 0.01, "freq[{m}] = {freq}");
        }
    }

    #[test]
    #[should_panic(expected = "empty unsat set")]
    fn sample_on_empty_set_panics() {
        let set = UnsatClauseSet::new(4);
        let mut rng = stream(0);
        set.sample(&mut rng);
    }
}
