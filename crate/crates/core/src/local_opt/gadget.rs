//! Abstract energy/weight process that upper-bounds solver reinsertions.
//!
//! Nodes carry an energy and a weight, both non-negative integers. An
//! operation adds 3 energy and 1 weight to one node, then takes 1 energy from
//! a node twice. A node whose energy hits zero resets: its weight `w` drops
//! to zero and `w` extra operations are pushed onto the update stack. The
//! number of extra operations never exceeds twice the number of initial
//! operations.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetReport {
    pub initial_ops: u64,
    /// Operations spawned by resets.
    pub extra_ops: u64,
    pub resets: u64,
    pub nodes: usize,
    pub terminated: bool,
}

#[derive(Clone, Copy, Debug)]
enum Update {
    Insert,
    Drain,
}

struct GadgetState {
    energy: Vec<u64>,
    weight: Vec<u64>,
    /// Nodes with positive energy, ordered by energy.
    by_energy: BTreeSet<(u64, usize)>,
    /// Same set with O(1) uniform sampling.
    positive: Vec<usize>,
    slot: Vec<Option<usize>>,
}

impl GadgetState {
    fn new() -> Self {
        GadgetState {
            energy: Vec::new(),
            weight: Vec::new(),
            by_energy: BTreeSet::new(),
            positive: Vec::new(),
            slot: Vec::new(),
        }
    }

    fn add_node(&mut self) -> usize {
        self.energy.push(0);
        self.weight.push(0);
        self.slot.push(None);
        self.energy.len() - 1
    }

    fn set_energy(&mut self, v: usize, e: u64) {
        let old = self.energy[v];
        if old > 0 {
            self.by_energy.remove(&(old, v));
        }
        self.energy[v] = e;
        if e > 0 {
            self.by_energy.insert((e, v));
            if self.slot[v].is_none() {
                self.slot[v] = Some(self.positive.len());
                self.positive.push(v);
            }
        } else if let Some(i) = self.slot[v].take() {
            self.positive.swap_remove(i);
            if let Some(&moved) = self.positive.get(i) {
                self.slot[moved] = Some(i);
            }
        }
    }

    fn min_positive(&self) -> Option<usize> {
        self.by_energy.first().map(|&(_, v)| v)
    }
}

fn push_ops(stack: &mut Vec<Update>, ops: u64) {
    for _ in 0..ops {
        // popped as insert, drain, drain
        stack.push(Update::Drain);
        stack.push(Update::Drain);
        stack.push(Update::Insert);
    }
}

/// Runs the process for `n` initial operations against a seeded adversary
/// that favours low-energy targets, which is what makes resets happen.
pub fn simulate_gadget(n: u64, seed: u64) -> GadgetReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = GadgetState::new();
    let mut stack = Vec::new();
    push_ops(&mut stack, n);

    let op_limit = 10 * (n + 1);
    let mut ops = 0u64;
    let mut extra = 0u64;
    let mut resets = 0u64;
    let mut terminated = true;

    while let Some(update) = stack.pop() {
        match update {
            Update::Insert => {
                ops += 1;
                if ops > op_limit {
                    terminated = false;
                    break;
                }
                let roll: f64 = rng.gen();
                let target = if state.energy.is_empty() || roll < 0.25 {
                    state.add_node()
                } else if roll < 0.5 {
                    rng.gen_range(0..state.energy.len())
                } else {
                    match state.min_positive() {
                        Some(v) => v,
                        None => state.add_node(),
                    }
                };
                let e = state.energy[target] + 3;
                state.set_energy(target, e);
                state.weight[target] += 1;
            }
            Update::Drain => {
                let target = if rng.gen_bool(0.75) {
                    state.min_positive()
                } else if state.positive.is_empty() {
                    None
                } else {
                    Some(state.positive[rng.gen_range(0..state.positive.len())])
                };
                // Every drain follows its operation's insertion, so some node
                // always holds energy here.
                let Some(v) = target else {
                    terminated = false;
                    break;
                };
                let e = state.energy[v] - 1;
                state.set_energy(v, e);
                if e == 0 {
                    let w = std::mem::take(&mut state.weight[v]);
                    resets += 1;
                    extra += w;
                    push_ops(&mut stack, w);
                }
            }
        }
    }

    GadgetReport {
        initial_ops: n,
        extra_ops: extra,
        resets,
        nodes: state.energy.len(),
        terminated,
    }
}
