//! Oracle machines: Turing machines with an `ASK` instruction.
//!
//! An `ASK` rule reads a query from a fixed tape region, gets a yes/no answer
//! from an [`OracleSpec`] in a single step, and branches. Each answer enters
//! the ledger as one external bit, so a run with no `ASK` has zero external
//! bits and a run with `k` answers has exactly `k`.
//!
//! Queries are census indices written in binary (symbols `0`/`1`, most
//! significant first) on cells `query_start .. query_start + query_len`.
//! A halting oracle answers "does machine `i` reach a halt state from blank
//! tape?" and is only as complete as the census behind it: rows left at
//! `step_limit`, and indices outside the census, answer `unknown`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::census::{CensusTable, RowVerdict};
use crate::ledger::{LossEvent, LossKind};
use crate::machine::SpecFile;
use crate::machine::{HaltReason, MachineSpec, RunResult, Simulation, StateId, SymbolId, Verdict};
use crate::smi::Bits;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::Unknown => "unknown",
        })
    }
}

/// A fixed decision table. Keys it does not contain answer [`Answer::Unknown`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OracleSpec {
    answers: BTreeMap<u64, Answer>,
    provenance: String,
}

impl OracleSpec {
    pub fn new(answers: BTreeMap<u64, Answer>, provenance: impl Into<String>) -> Self {
        OracleSpec { answers, provenance: provenance.into() }
    }

    pub fn ask(&self, query: u64) -> Answer {
        self.answers.get(&query).copied().unwrap_or(Answer::Unknown)
    }

    /// Parses `query` as decimal or as `0b`-prefixed binary, then asks.
    pub fn ask_str(&self, query: &str) -> Result<Answer> {
        Ok(self.ask(parse_query(query)?))
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.answers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.answers.is_empty()
    }

    pub fn count(&self, answer: Answer) -> usize {
        self.answers.values().filter(|&&a| a == answer).count()
    }
}

pub fn parse_query(query: &str) -> Result<u64> {
    let q = query.trim();
    let parsed = match q.strip_prefix("0b") {
        Some(bin) => u64::from_str_radix(bin, 2),
        None => q.parse(),
    };
    parsed.map_err(|_| Error::validation(format!("malformed query `{query}`")))
}

/// Halted rows answer yes; freeze, proven loops and unreachable halts answer
/// no (the machine never reaches a halt state); step-limit rows answer unknown.
pub fn build_halting_oracle(census: &CensusTable) -> OracleSpec {
    let answers = census
        .rows
        .iter()
        .map(|r| {
            let a = match r.verdict {
                RowVerdict::Halted => Answer::Yes,
                RowVerdict::Freeze | RowVerdict::LoopProven | RowVerdict::HaltUnreachable => Answer::No,
                RowVerdict::StepLimit => Answer::Unknown,
            };
            (r.index, a)
        })
        .collect();
    let provenance = if census.n_states == 0 {
        format!("census(rows={})", census.rows.len())
    } else {
        format!("census(states={},symbols={},bound={})", census.n_states, census.n_symbols, census.bound)
    };
    OracleSpec::new(answers, provenance)
}

/// An `ASK` in `(state, read)`: branch to `yes` or `no`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AskRule {
    pub yes: StateId,
    pub no: StateId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleMachineSpec {
    machine: MachineSpec,
    ask: BTreeMap<(StateId, SymbolId), AskRule>,
    query_start: i64,
    query_len: u32,
}

impl OracleMachineSpec {
    pub fn new(
        machine: MachineSpec,
        ask: BTreeMap<(StateId, SymbolId), AskRule>,
        query_start: i64,
        query_len: u32,
    ) -> Result<Self> {
        if !(1..=63).contains(&query_len) {
            return Err(Error::validation(format!("query length {query_len} must be in 1..=63")));
        }
        for (&(s, r), rule) in &ask {
            if machine.rule(s, r).is_some() {
                return Err(Error::validation(format!(
                    "({}, {}) has both an ordinary rule and an ASK rule",
                    machine.state_name(s),
                    machine.symbol_name(r)
                )));
            }
            let n = machine.states().len() as u16;
            if s.0 >= n || rule.yes.0 >= n || rule.no.0 >= n || r.0 as usize >= machine.alphabet().len() {
                return Err(Error::validation("ASK rule references an undeclared state or symbol"));
            }
        }
        Ok(OracleMachineSpec { machine, ask, query_start, query_len })
    }

    /// A machine without ASK rules.
    pub fn closed(machine: MachineSpec) -> Self {
        OracleMachineSpec { machine, ask: BTreeMap::new(), query_start: 0, query_len: 1 }
    }

    pub fn machine(&self) -> &MachineSpec {
        &self.machine
    }

    pub fn ask_rule(&self, state: StateId, read: SymbolId) -> Option<AskRule> {
        self.ask.get(&(state, read)).copied()
    }

    pub fn has_ask(&self) -> bool {
        !self.ask.is_empty()
    }

    /// Machine fields as in [`MachineSpec::parse`], plus
    /// `ask = ["state,read,yes,no", ...]`, `query_start` and `query_len`.
    pub fn parse(text: &str) -> Result<Self> {
        let file: OracleFile =
            toml::from_str(text).map_err(|e| Error::validation(format!("oracle machine spec: {e}")))?;
        let machine = SpecFile {
            states: file.states,
            alphabet: file.alphabet,
            blank: file.blank,
            start: file.start,
            halt: file.halt,
            rules: file.rules,
        }
        .into_spec()?;
        let mut ask = BTreeMap::new();
        for line in &file.ask {
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 4 {
                return Err(Error::validation(format!("ASK rule `{line}` must have 4 fields: state,read,yes,no")));
            }
            let key = (machine.state_id(parts[0])?, machine.symbol_id(parts[1])?);
            let rule = AskRule { yes: machine.state_id(parts[2])?, no: machine.state_id(parts[3])? };
            if ask.insert(key, rule).is_some() {
                return Err(Error::validation(format!("two ASK rules for ({}, {})", parts[0], parts[1])));
            }
        }
        Self::new(machine, ask, file.query_start, file.query_len)
    }

    /// Reads the query region of `cfg`.
    fn decode_query(&self, cfg: &crate::machine::Configuration) -> Result<u64> {
        let zero = self.machine.symbol_id("0");
        let one = self.machine.symbol_id("1");
        let mut q = 0u64;
        for pos in self.query_start..self.query_start + self.query_len as i64 {
            let s = cfg.read(pos);
            let bit = if zero.as_ref().ok() == Some(&s) {
                0
            } else if one.as_ref().ok() == Some(&s) {
                1
            } else {
                return Err(Error::validation(format!(
                    "query cell {pos} holds `{}`, expected 0 or 1",
                    self.machine.symbol_name(s)
                )));
            };
            q = q << 1 | bit;
        }
        Ok(q)
    }
}

impl FromStr for OracleMachineSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OracleFile {
    states: Vec<String>,
    alphabet: Vec<String>,
    blank: String,
    start: String,
    halt: Vec<String>,
    #[serde(default)]
    rules: Vec<String>,
    #[serde(default)]
    ask: Vec<String>,
    #[serde(default)]
    query_start: i64,
    #[serde(default = "default_query_len")]
    query_len: u32,
}

fn default_query_len() -> u32 {
    1
}

/// Runs an oracle machine. Ordinary rules behave as in
/// [`crate::machine::run`]; each `ASK` costs one step and one external bit.
pub fn run_with_oracle(
    spec: &OracleMachineSpec,
    input: &[SymbolId],
    oracle: &OracleSpec,
    max_steps: u64,
) -> Result<RunResult> {
    // ASK reads absolute cells, so shifted repeats are not loops here.
    let mut sim = Simulation::new(&spec.machine, input, max_steps, false, !spec.has_ask())?;
    loop {
        if let Some(v) = sim.before_step() {
            return Ok(sim.finish(v).0);
        }
        let state = sim.cfg.state;
        let read = sim.cfg.read(sim.cfg.head);
        let verdict = if let Some(ask) = spec.ask_rule(state, read) {
            let query = spec.decode_query(&sim.cfg)?;
            let next = match oracle.ask(query) {
                Answer::Yes => ask.yes,
                Answer::No => ask.no,
                Answer::Unknown => {
                    let step = sim.steps;
                    return Ok(sim.finish(Verdict::OracleUndefined { step, query }).0);
                }
            };
            let answer = if next == ask.yes { "yes" } else { "no" };
            let event = LossEvent::new(
                LossKind::ExternalAnswer,
                Bits::new(1.0)?,
                sim.steps + 1,
                format!("ask {query}: {answer}"),
            )?;
            sim.ledger.record(event)?;
            sim.branch(next)
        } else {
            match sim.current_rule() {
                None => Some(Verdict::Halted { steps: sim.steps, reason: HaltReason::Freeze }),
                Some(rule) => sim.apply_rule(rule),
            }
        };
        if let Some(v) = verdict {
            return Ok(sim.finish(v).0);
        }
    }
}
