//! Recorded sample sets. Successor states are stored at draw time so the
//! certifier never queries the simulator twice for the same transition.

/// One-to-one samples `(x_i, d_i, f(x_i, d_i))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSampleSet {
    n: usize,
    n_d: usize,
    seed: u64,
    states: Vec<f64>,
    disturbances: Vec<f64>,
    next_states: Vec<f64>,
}

impl PairSampleSet {
    pub fn len(&self) -> usize {
        self.states.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_dim(&self) -> usize {
        self.n
    }

    pub fn disturbance_dim(&self) -> usize {
        self.n_d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.n..(i + 1) * self.n]
    }

    pub fn disturbance(&self, i: usize) -> &[f64] {
        &self.disturbances[i * self.n_d..(i + 1) * self.n_d]
    }

    pub fn next_state(&self, i: usize) -> &[f64] {
        &self.next_states[i * self.n..(i + 1) * self.n]
    }

    /// Views the pairs as groups of size one.
    pub fn into_groups(self) -> GroupSampleSet {
        GroupSampleSet {
            n: self.n,
            n_d: self.n_d,
            per_state: 1,
            seed: self.seed,
            states: self.states,
            disturbances: self.disturbances,
            next_states: self.next_states,
        }
    }
}

/// One-to-many samples: each state `x_i` carries `M` disturbances and their
/// successors.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSampleSet {
    n: usize,
    n_d: usize,
    per_state: usize,
    seed: u64,
    states: Vec<f64>,
    disturbances: Vec<f64>,
    next_states: Vec<f64>,
}

impl GroupSampleSet {
    pub(crate) fn from_parts(
        n: usize,
        n_d: usize,
        per_state: usize,
        seed: u64,
        states: Vec<f64>,
        disturbances: Vec<f64>,
        next_states: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(states.len() * per_state, next_states.len());
        debug_assert_eq!(states.len() / n * per_state * n_d, disturbances.len());
        Self {
            n,
            n_d,
            per_state,
            seed,
            states,
            disturbances,
            next_states,
        }
    }

    /// Number of sampled states `N`.
    pub fn len(&self) -> usize {
        self.states.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Disturbances per state `M`.
    pub fn per_state(&self) -> usize {
        self.per_state
    }

    pub fn num_transitions(&self) -> usize {
        self.len() * self.per_state
    }

    pub fn state_dim(&self) -> usize {
        self.n
    }

    pub fn disturbance_dim(&self) -> usize {
        self.n_d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.n..(i + 1) * self.n]
    }

    pub fn disturbance(&self, i: usize, j: usize) -> &[f64] {
        let k = i * self.per_state + j;
        &self.disturbances[k * self.n_d..(k + 1) * self.n_d]
    }

    pub fn next_state(&self, i: usize, j: usize) -> &[f64] {
        let k = i * self.per_state + j;
        &self.next_states[k * self.n..(k + 1) * self.n]
    }

    /// All successors of state `i`, concatenated.
    pub fn next_states_of(&self, i: usize) -> &[f64] {
        let w = self.per_state * self.n;
        &self.next_states[i * w..(i + 1) * w]
    }

    /// Flattens the groups into one pair per transition, each pair repeating
    /// its group's state.
    pub fn into_pairs(self) -> PairSampleSet {
        let states = if self.per_state == 1 {
            self.states
        } else {
            let mut v = Vec::with_capacity(self.next_states.len());
            for x in self.states.chunks_exact(self.n) {
                for _ in 0..self.per_state {
                    v.extend_from_slice(x);
                }
            }
            v
        };
        PairSampleSet {
            n: self.n,
            n_d: self.n_d,
            seed: self.seed,
            states,
            disturbances: self.disturbances,
            next_states: self.next_states,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn groups() -> GroupSampleSet {
        GroupSampleSet::from_parts(
            1,
            1,
            2,
            5,
            vec![0.1, 0.2],
            vec![1.0, 2.0, 3.0, 4.0],
            vec![0.11, 0.12, 0.21, 0.22],
        )
    }

    #[test]
    fn group_indexing() {
        let g = groups();
        assert_eq!((g.len(), g.per_state(), g.num_transitions()), (2, 2, 4));
        assert_eq!(g.disturbance(1, 0), &[3.0]);
        assert_eq!(g.next_state(1, 1), &[0.22]);
        assert_eq!(g.next_states_of(0), &[0.11, 0.12]);
    }

    #[test]
    fn flattening_repeats_states() {
        let p = groups().into_pairs();
        assert_eq!(p.len(), 4);
        assert_eq!(p.state(1), &[0.1]);
        assert_eq!(p.state(2), &[0.2]);
        assert_eq!(p.next_state(3), &[0.22]);
        assert_eq!(p.seed(), 5);
    }
}
