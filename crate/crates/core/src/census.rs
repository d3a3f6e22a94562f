//! Bounded halting census over small machine classes.
//!
//! Every rule table with `n_states` working states and `n_symbols` symbols
//! gets a canonical index. Each `(state, symbol)` slot is either absent
//! (freeze) or one of `n_symbols * 3 * (n_states + 1)` actions, the extra
//! next-state being the halt state `H`. Slot `(A, 0)` is the most significant
//! digit; digit 0 means absent, so index 0 is the machine with no rules.
//!
//! A census row records what a bounded run on blank tape could establish.
//! `step_limit` means unknown at that bound, not "does not halt": halting is
//! undecidable in general and no bound makes this census complete for all
//! machines. Semantic properties of programs (totality, equivalence, and the
//! like) are not decided anywhere in this crate.
//!
//! `halt_unreachable` rows ran out of steps but have no halt state and no
//! missing rule reachable in their state graph, so they provably never stop
//! (binary counters are the typical case).
//!
//! CSV header: `index,digest,verdict,steps,cycle,lost_bits`. `steps` is the
//! halting step count, the loop entry step, or the bound; `cycle` is only set
//! for `loop_proven`. `digest` is [`MachineSpec::digest`].

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::ledger::csv_err;
use crate::machine::{run, HaltReason, MachineSpec, Move, Rule, StateId, SymbolId, Verdict};
use crate::{Error, Result};

pub const MAX_STATES: u32 = 3;
pub const MAX_SYMBOLS: u32 = 3;

const STATE_NAMES: [&str; 3] = ["A", "B", "C"];
const HALT_NAME: &str = "H";

/// Canonical numbering of all rule tables in one machine class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MachineEnumeration {
    n_states: u32,
    n_symbols: u32,
}

impl MachineEnumeration {
    pub fn new(n_states: u32, n_symbols: u32) -> Result<Self> {
        if n_states == 0 || n_symbols == 0 {
            return Err(Error::validation("need at least one state and one symbol"));
        }
        if n_states > MAX_STATES || n_symbols > MAX_SYMBOLS {
            return Err(Error::capacity(format!(
                "class ({n_states} states, {n_symbols} symbols) exceeds the enumeration bound \
                 of {MAX_STATES} states and {MAX_SYMBOLS} symbols"
            )));
        }
        Ok(MachineEnumeration { n_states, n_symbols })
    }

    pub fn n_states(&self) -> u32 {
        self.n_states
    }

    pub fn n_symbols(&self) -> u32 {
        self.n_symbols
    }

    fn slots(&self) -> u32 {
        self.n_states * self.n_symbols
    }

    /// Choices per slot, including "absent".
    pub fn radix(&self) -> u64 {
        1 + self.n_symbols as u64 * 3 * (self.n_states as u64 + 1)
    }

    pub fn total(&self) -> u64 {
        self.radix().pow(self.slots())
    }

    pub fn spec_at(&self, index: u64) -> Result<MachineSpec> {
        if index >= self.total() {
            return Err(Error::validation(format!("index {index} is outside the class of {} machines", self.total())));
        }
        let radix = self.radix();
        let halt = StateId(self.n_states as u16);
        let mut rules = vec![None; self.slots() as usize];
        let mut rest = index;
        for slot in (0..self.slots() as usize).rev() {
            let digit = rest % radix;
            rest /= radix;
            if digit == 0 {
                continue;
            }
            let action = digit - 1;
            let targets = self.n_states as u64 + 1;
            let next = (action % targets) as u16;
            let mv = Move::ALL[((action / targets) % 3) as usize];
            let write = (action / targets / 3) as u16;
            rules[slot] = Some(Rule { write: SymbolId(write), mv, next: StateId(next) });
        }
        // the halt state has no rules
        rules.extend(std::iter::repeat_n(None, self.n_symbols as usize));
        let mut states: Vec<String> = STATE_NAMES[..self.n_states as usize].iter().map(|s| s.to_string()).collect();
        states.push(HALT_NAME.to_string());
        let alphabet = (0..self.n_symbols).map(|s| s.to_string()).collect();
        MachineSpec::from_table(states, alphabet, SymbolId(0), StateId(0), &[halt], rules)
    }

    /// Inverse of [`spec_at`](Self::spec_at). The spec must use this class's
    /// state and symbol layout.
    pub fn index_of(&self, spec: &MachineSpec) -> Result<u64> {
        let template = self.spec_at(0)?;
        if spec.states() != template.states()
            || spec.alphabet() != template.alphabet()
            || spec.blank() != template.blank()
            || spec.start() != template.start()
            || spec.halt_states() != template.halt_states()
        {
            return Err(Error::validation("spec does not belong to this machine class"));
        }
        let radix = self.radix();
        let targets = self.n_states as u64 + 1;
        let mut index = 0u64;
        for s in 0..self.n_states as u16 {
            for sym in 0..self.n_symbols as u16 {
                let digit = match spec.rule(StateId(s), SymbolId(sym)) {
                    None => 0,
                    Some(r) => {
                        let mv = Move::ALL.iter().position(|&m| m == r.mv).unwrap() as u64;
                        1 + (r.write.0 as u64 * 3 + mv) * targets + r.next.0 as u64
                    }
                };
                index = index * radix + digit;
            }
        }
        Ok(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = MachineSpec> + '_ {
        (0..self.total()).map(move |i| self.spec_at(i).expect("index in range"))
    }
}

/// Every machine of the class, in canonical index order.
pub fn enumerate_machines(n_states: u32, n_symbols: u32) -> Result<impl Iterator<Item = MachineSpec>> {
    let e = MachineEnumeration::new(n_states, n_symbols)?;
    Ok((0..e.total()).map(move |i| e.spec_at(i).expect("index in range")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowVerdict {
    Halted,
    Freeze,
    LoopProven,
    /// Never stops: no halt state or missing rule is reachable.
    HaltUnreachable,
    StepLimit,
}

impl RowVerdict {
    pub const ALL: [RowVerdict; 5] = [
        RowVerdict::Halted,
        RowVerdict::Freeze,
        RowVerdict::LoopProven,
        RowVerdict::HaltUnreachable,
        RowVerdict::StepLimit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RowVerdict::Halted => "halted",
            RowVerdict::Freeze => "freeze",
            RowVerdict::LoopProven => "loop_proven",
            RowVerdict::HaltUnreachable => "halt_unreachable",
            RowVerdict::StepLimit => "step_limit",
        }
    }
}

impl fmt::Display for RowVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RowVerdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RowVerdict::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::validation(format!("unknown verdict `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusRow {
    pub index: u64,
    pub digest: String,
    pub verdict: RowVerdict,
    pub steps: u64,
    pub cycle: Option<u64>,
    pub lost_bits: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensusTable {
    pub n_states: u32,
    pub n_symbols: u32,
    pub bound: u64,
    /// Sorted by index.
    pub rows: Vec<CensusRow>,
}

#[derive(Debug, Clone, Default)]
pub struct CensusOptions {
    /// Worker threads; `None` uses rayon's default, `Some(1)` runs inline.
    pub jobs: Option<usize>,
    /// Initial tape; blank when empty.
    pub input: Vec<SymbolId>,
}

/// Classifies every machine of the class on blank tape.
pub fn run_census(n_states: u32, n_symbols: u32, step_bound: u64) -> Result<CensusTable> {
    run_census_with(n_states, n_symbols, step_bound, &CensusOptions::default())
}

pub fn run_census_with(n_states: u32, n_symbols: u32, step_bound: u64, opts: &CensusOptions) -> Result<CensusTable> {
    let e = MachineEnumeration::new(n_states, n_symbols)?;
    if let Some(s) = opts.input.iter().find(|s| s.0 as u32 >= n_symbols) {
        return Err(Error::validation(format!("input symbol {} is outside the class alphabet", s.0)));
    }
    let classify = |index: u64| classify(&e, index, step_bound, &opts.input);
    let rows: Vec<CensusRow> = match opts.jobs {
        Some(1) => (0..e.total()).map(classify).collect::<Result<_>>()?,
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|err| Error::validation(format!("thread pool: {err}")))?
            .install(|| (0..e.total()).into_par_iter().map(classify).collect::<Result<_>>())?,
        None => (0..e.total()).into_par_iter().map(classify).collect::<Result<_>>()?,
    };
    Ok(CensusTable { n_states, n_symbols, bound: step_bound, rows })
}

fn classify(e: &MachineEnumeration, index: u64, bound: u64, input: &[SymbolId]) -> Result<CensusRow> {
    let spec = e.spec_at(index)?;
    let result = run(&spec, input, bound)?;
    let (verdict, steps, cycle) = match result.verdict {
        Verdict::Halted { steps, reason: HaltReason::Designated } => (RowVerdict::Halted, steps, None),
        Verdict::Halted { steps, reason: HaltReason::Freeze } => (RowVerdict::Freeze, steps, None),
        Verdict::LoopProven { entry_step, cycle_len, .. } => (RowVerdict::LoopProven, entry_step, Some(cycle_len)),
        Verdict::StepLimit { bound } => (RowVerdict::StepLimit, bound, None),
        Verdict::HaltUnreachable { bound } => (RowVerdict::HaltUnreachable, bound, None),
        Verdict::OracleUndefined { .. } => unreachable!("census machines have no ASK rules"),
    };
    Ok(CensusRow { index, digest: spec.digest(), verdict, steps, cycle, lost_bits: result.ledger.lost_total().value() })
}

impl CensusTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "digest", "verdict", "steps", "cycle", "lost_bits"]).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record([
                r.index.to_string(),
                r.digest.clone(),
                r.verdict.to_string(),
                r.steps.to_string(),
                r.cycle.map(|c| c.to_string()).unwrap_or_default(),
                r.lost_bits.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Reads rows back from CSV. Class parameters are not stored in the file
    /// and are left at zero.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let header = rdr.headers().map_err(csv_err)?.clone();
        if header.iter().collect::<Vec<_>>() != ["index", "digest", "verdict", "steps", "cycle", "lost_bits"] {
            return Err(Error::validation("census CSV header must be index,digest,verdict,steps,cycle,lost_bits"));
        }
        let mut rows = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let bad = |what: &str| Error::validation(format!("census row {}: bad {what}", line + 1));
            let cycle = match &rec[4] {
                "" => None,
                c => Some(c.parse().map_err(|_| bad("cycle"))?),
            };
            rows.push(CensusRow {
                index: rec[0].parse().map_err(|_| bad("index"))?,
                digest: rec[1].to_string(),
                verdict: rec[2].parse()?,
                steps: rec[3].parse().map_err(|_| bad("steps"))?,
                cycle,
                lost_bits: rec[5].parse().map_err(|_| bad("lost_bits"))?,
            });
        }
        if rows.windows(2).any(|w| w[0].index >= w[1].index) {
            return Err(Error::validation("census rows must be sorted by index without duplicates"));
        }
        Ok(CensusTable { n_states: 0, n_symbols: 0, bound: 0, rows })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusSummary {
    pub total: u64,
    pub halted: u64,
    pub freeze: u64,
    pub loop_proven: u64,
    pub halt_unreachable: u64,
    pub step_limit: u64,
    /// `step_limit / total`; zero for an empty table.
    pub unknown_fraction: f64,
    /// Longest run that ended in a halt state.
    pub max_halting_steps: Option<u64>,
}

pub fn census_summary(table: &CensusTable) -> CensusSummary {
    let count = |v: RowVerdict| table.rows.iter().filter(|r| r.verdict == v).count() as u64;
    let total = table.rows.len() as u64;
    let step_limit = count(RowVerdict::StepLimit);
    CensusSummary {
        total,
        halted: count(RowVerdict::Halted),
        freeze: count(RowVerdict::Freeze),
        loop_proven: count(RowVerdict::LoopProven),
        halt_unreachable: count(RowVerdict::HaltUnreachable),
        step_limit,
        unknown_fraction: if total == 0 { 0.0 } else { step_limit as f64 / total as f64 },
        max_halting_steps: table.rows.iter().filter(|r| r.verdict == RowVerdict::Halted).map(|r| r.steps).max(),
    }
}
