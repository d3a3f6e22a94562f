//! Reference simulator for cross-checking the library. It shares nothing with
//! the library's stepping code: the tape is a plain hash map that also keeps
//! blank cells, and moves are decoded by hand.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use infoloss::machine::{Configuration, MachineSpec, Move, StateId, SymbolId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Halted,
    Frozen,
    Running,
}

#[derive(Debug, Clone)]
pub struct Naive {
    pub state: StateId,
    pub head: i64,
    pub tape: HashMap<i64, SymbolId>,
    pub blank: SymbolId,
    pub steps: u64,
    pub destructive_writes: u64,
    pub outcome: Outcome,
}

impl Naive {
    pub fn new(spec: &MachineSpec, input: &[SymbolId]) -> Self {
        Naive {
            state: spec.start(),
            head: 0,
            tape: input.iter().enumerate().map(|(i, &s)| (i as i64, s)).collect(),
            blank: spec.blank(),
            steps: 0,
            destructive_writes: 0,
            outcome: Outcome::Running,
        }
    }

    pub fn read(&self, pos: i64) -> SymbolId {
        *self.tape.get(&pos).unwrap_or(&self.blank)
    }

    /// One step; returns false once the machine has stopped.
    pub fn step(&mut self, spec: &MachineSpec) -> bool {
        if self.outcome != Outcome::Running {
            return false;
        }
        if spec.halt_states().contains(&self.state) {
            self.outcome = Outcome::Halted;
            return false;
        }
        let read = self.read(self.head);
        let Some(rule) = spec.rule(self.state, read) else {
            self.outcome = Outcome::Frozen;
            return false;
        };
        if rule.write != read {
            self.destructive_writes += 1;
        }
        self.tape.insert(self.head, rule.write);
        self.head += match rule.mv {
            Move::L => -1,
            Move::R => 1,
            Move::S => 0,
        };
        self.state = rule.next;
        self.steps += 1;
        true
    }

    /// Runs until stopped or `max_steps` steps have been taken.
    pub fn run(mut self, spec: &MachineSpec, max_steps: u64) -> Self {
        while self.steps < max_steps && self.step(spec) {}
        // A halt state is visible without stepping; a missing rule is only
        // discovered by trying the next step, which the bound forbids.
        if self.outcome == Outcome::Running && spec.halt_states().contains(&self.state) {
            self.outcome = Outcome::Halted;
        }
        self
    }

    pub fn non_blank(&self) -> BTreeMap<i64, SymbolId> {
        self.tape.iter().filter(|(_, &s)| s != self.blank).map(|(&p, &s)| (p, s)).collect()
    }

    pub fn matches(&self, cfg: &Configuration) -> bool {
        self.state == cfg.state && self.head == cfg.head && self.non_blank() == cfg.cells().collect()
    }
}

pub fn naive_run(spec: &MachineSpec, input: &[SymbolId], max_steps: u64) -> Naive {
    Naive::new(spec, input).run(spec, max_steps)
}

/// Closed-form size of a machine class, computed without the library.
pub fn class_size(n_states: u64, n_symbols: u64) -> u64 {
    let per_slot = 1 + n_symbols * 3 * (n_states + 1);
    (0..n_states * n_symbols).fold(1, |acc, _| acc * per_slot)
}
