//! Deterministic single-tape Turing machines.
//!
//! Specs are read from TOML:
//!
//! ```toml
//! states = ["A", "B", "H"]
//! alphabet = ["0", "1"]
//! blank = "0"
//! start = "A"
//! halt = ["H"]
//! rules = ["A,0,1,R,B", "A,1,1,L,B", "B,0,1,L,A", "B,1,1,R,H"]
//! ```
//!
//! Each rule is `state,read,write,move,next` with move one of `L`, `R`, `S`.
//! A missing rule means the machine freezes in that situation.

mod sim;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub(crate) use sim::Simulation;
pub use sim::{
    is_reversible_spec, retrace, run, run_with_history, step, stop_reachable, HaltReason, HistoryLog, HistoryRecord,
    RunResult, StepResult, Verdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StateId(pub u16);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SymbolId(pub u16);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Move {
    L,
    R,
    S,
}

impl Move {
    pub const ALL: [Move; 3] = [Move::L, Move::R, Move::S];

    pub fn delta(self) -> i64 {
        match self {
            Move::L => -1,
            Move::R => 1,
            Move::S => 0,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::L => "L",
            Move::R => "R",
            Move::S => "S",
        })
    }
}

impl FromStr for Move {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "L" | "l" => Ok(Move::L),
            "R" | "r" => Ok(Move::R),
            "S" | "s" | "N" => Ok(Move::S),
            other => Err(Error::validation(format!("bad move `{other}` (expected L, R or S)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rule {
    pub write: SymbolId,
    pub mv: Move,
    pub next: StateId,
}

/// A validated machine description. Rules are stored densely by
/// `(state, symbol)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineSpec {
    states: Vec<String>,
    alphabet: Vec<String>,
    blank: SymbolId,
    start: StateId,
    halt: Vec<bool>,
    rules: Vec<Option<Rule>>,
}

impl MachineSpec {
    /// Builds a spec from ids. `rules` has `states.len() * alphabet.len()`
    /// entries, indexed `state * alphabet.len() + symbol`.
    pub fn from_table(
        states: Vec<String>,
        alphabet: Vec<String>,
        blank: SymbolId,
        start: StateId,
        halt: &[StateId],
        rules: Vec<Option<Rule>>,
    ) -> Result<Self> {
        check_names("state", &states)?;
        check_names("symbol", &alphabet)?;
        if states.len() > u16::MAX as usize || alphabet.len() > u16::MAX as usize {
            return Err(Error::capacity("too many states or symbols"));
        }
        let ns = states.len();
        let nsym = alphabet.len();
        if blank.0 as usize >= nsym {
            return Err(Error::validation("blank symbol is not in the alphabet"));
        }
        if start.0 as usize >= ns {
            return Err(Error::validation("start state is not declared"));
        }
        let mut halt_mask = vec![false; ns];
        for h in halt {
            *halt_mask.get_mut(h.0 as usize).ok_or_else(|| Error::validation("halt state is not declared"))? = true;
        }
        if rules.len() != ns * nsym {
            return Err(Error::validation(format!("rule table has {} slots, expected {}", rules.len(), ns * nsym)));
        }
        for r in rules.iter().flatten() {
            if r.write.0 as usize >= nsym || r.next.0 as usize >= ns {
                return Err(Error::validation("rule references an undeclared state or symbol"));
            }
        }
        Ok(MachineSpec { states, alphabet, blank, start, halt: halt_mask, rules })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn blank(&self) -> SymbolId {
        self.blank
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn is_halt(&self, s: StateId) -> bool {
        self.halt[s.0 as usize]
    }

    pub fn halt_states(&self) -> Vec<StateId> {
        (0..self.states.len() as u16).map(StateId).filter(|&s| self.is_halt(s)).collect()
    }

    pub fn rule(&self, state: StateId, read: SymbolId) -> Option<Rule> {
        self.rules[state.0 as usize * self.alphabet.len() + read.0 as usize]
    }

    /// `((state, read), rule)` for every defined rule, in slot order.
    pub fn rules(&self) -> impl Iterator<Item = ((StateId, SymbolId), Rule)> + '_ {
        let nsym = self.alphabet.len();
        self.rules
            .iter()
            .enumerate()
            .filter_map(move |(i, r)| r.map(|r| ((StateId((i / nsym) as u16), SymbolId((i % nsym) as u16)), r)))
    }

    pub fn state_id(&self, name: &str) -> Result<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(|i| StateId(i as u16))
            .ok_or_else(|| Error::validation(format!("unknown state `{name}`")))
    }

    pub fn symbol_id(&self, name: &str) -> Result<SymbolId> {
        self.alphabet
            .iter()
            .position(|s| s == name)
            .map(|i| SymbolId(i as u16))
            .ok_or_else(|| Error::validation(format!("unknown symbol `{name}`")))
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0 as usize]
    }

    pub fn symbol_name(&self, s: SymbolId) -> &str {
        &self.alphabet[s.0 as usize]
    }

    /// Symbols are one character each when every name is a single char;
    /// otherwise tape strings are whitespace separated.
    fn single_char_symbols(&self) -> bool {
        self.alphabet.iter().all(|s| s.chars().count() == 1)
    }

    pub fn parse_input(&self, input: &str) -> Result<Vec<SymbolId>> {
        if self.single_char_symbols() {
            input.chars().filter(|c| !c.is_whitespace()).map(|c| self.symbol_id(&c.to_string())).collect()
        } else {
            input.split_whitespace().map(|t| self.symbol_id(t)).collect()
        }
    }

    pub fn format_symbols(&self, symbols: &[SymbolId]) -> String {
        let sep = if self.single_char_symbols() { "" } else { " " };
        symbols.iter().map(|&s| self.symbol_name(s)).collect::<Vec<_>>().join(sep)
    }

    /// Parses the TOML spec format.
    pub fn parse(text: &str) -> Result<Self> {
        let file: SpecFile = toml::from_str(text).map_err(|e| Error::validation(format!("machine spec: {e}")))?;
        file.into_spec()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&SpecFile::from_spec(self)).expect("spec serializes")
    }

    /// Canonical one-line serialization:
    /// `states=A,B,H;alphabet=0,1;blank=0;start=A;halt=H;rules=A,0,1,R,B|...`
    /// with rules in `(state, symbol)` slot order.
    pub fn canonical_text(&self) -> String {
        let halt: Vec<&str> = self.halt_states().into_iter().map(|s| self.state_name(s)).collect();
        let rules: Vec<String> = self.rules().map(|(k, r)| self.rule_text(k, r)).collect();
        format!(
            "states={};alphabet={};blank={};start={};halt={};rules={}",
            self.states.join(","),
            self.alphabet.join(","),
            self.symbol_name(self.blank),
            self.state_name(self.start),
            halt.join(","),
            rules.join("|")
        )
    }

    /// First 16 hex digits of SHA-256 over [`canonical_text`](Self::canonical_text).
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.canonical_text().as_bytes());
        hash[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    fn rule_text(&self, (s, r): (StateId, SymbolId), rule: Rule) -> String {
        format!(
            "{},{},{},{},{}",
            self.state_name(s),
            self.symbol_name(r),
            self.symbol_name(rule.write),
            rule.mv,
            self.state_name(rule.next)
        )
    }
}

fn check_names(what: &str, names: &[String]) -> Result<()> {
    if names.is_empty() {
        return Err(Error::validation(format!("at least one {what} is required")));
    }
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() || n.contains(|c: char| c == ',' || c == ';' || c == '|' || c.is_whitespace()) {
            return Err(Error::validation(format!("bad {what} name `{n}`")));
        }
        if names[..i].contains(n) {
            return Err(Error::validation(format!("duplicate {what} `{n}`")));
        }
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct SpecFile {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub blank: String,
    pub start: String,
    pub halt: Vec<String>,
    pub rules: Vec<String>,
}

impl SpecFile {
    pub(crate) fn into_spec(self) -> Result<MachineSpec> {
        let find = |names: &[String], n: &str, what: &str| {
            names.iter().position(|x| x == n).ok_or_else(|| Error::validation(format!("unknown {what} `{n}`")))
        };
        let nsym = self.alphabet.len();
        let mut table = vec![None; self.states.len() * nsym];
        for line in &self.rules {
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 5 {
                return Err(Error::validation(format!("rule `{line}` must have 5 fields: state,read,write,move,next")));
            }
            let s = find(&self.states, parts[0], "state")?;
            let r = find(&self.alphabet, parts[1], "symbol")?;
            let w = find(&self.alphabet, parts[2], "symbol")?;
            let mv: Move = parts[3].parse()?;
            let n = find(&self.states, parts[4], "state")?;
            let slot = &mut table[s * nsym + r];
            if slot.is_some() {
                return Err(Error::validation(format!("two rules for ({}, {})", parts[0], parts[1])));
            }
            *slot = Some(Rule { write: SymbolId(w as u16), mv, next: StateId(n as u16) });
        }
        let blank = SymbolId(find(&self.alphabet, &self.blank, "symbol")? as u16);
        let start = StateId(find(&self.states, &self.start, "state")? as u16);
        let halt = self
            .halt
            .iter()
            .map(|h| find(&self.states, h, "state").map(|i| StateId(i as u16)))
            .collect::<Result<Vec<_>>>()?;
        MachineSpec::from_table(self.states, self.alphabet, blank, start, &halt, table)
    }

    pub(crate) fn from_spec(spec: &MachineSpec) -> Self {
        SpecFile {
            states: spec.states.clone(),
            alphabet: spec.alphabet.clone(),
            blank: spec.symbol_name(spec.blank).to_string(),
            start: spec.state_name(spec.start).to_string(),
            halt: spec.halt_states().into_iter().map(|s| spec.state_name(s).to_string()).collect(),
            rules: spec.rules().map(|(k, r)| spec.rule_text(k, r)).collect(),
        }
    }
}

/// A machine snapshot. Only non-blank cells are stored, so two equal
/// snapshots compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub state: StateId,
    pub head: i64,
    blank: SymbolId,
    tape: BTreeMap<i64, SymbolId>,
}

impl Configuration {
    /// Start state, head at 0, `input` written from cell 0.
    pub fn initial(spec: &MachineSpec, input: &[SymbolId]) -> Result<Self> {
        let mut cfg = Configuration { state: spec.start, head: 0, blank: spec.blank, tape: BTreeMap::new() };
        for (i, &s) in input.iter().enumerate() {
            if s.0 as usize >= spec.alphabet.len() {
                return Err(Error::validation(format!("input symbol {} is not in the alphabet", s.0)));
            }
            cfg.write(i as i64, s);
        }
        Ok(cfg)
    }

    pub fn read(&self, pos: i64) -> SymbolId {
        self.tape.get(&pos).copied().unwrap_or(self.blank)
    }

    pub fn write(&mut self, pos: i64, s: SymbolId) {
        if s == self.blank {
            self.tape.remove(&pos);
        } else {
            self.tape.insert(pos, s);
        }
    }

    /// Non-blank cells in position order.
    pub fn cells(&self) -> impl Iterator<Item = (i64, SymbolId)> + '_ {
        self.tape.iter().map(|(&p, &s)| (p, s))
    }

    pub fn non_blank_count(&self) -> usize {
        self.tape.len()
    }

    pub(crate) fn tape_map(&self) -> &BTreeMap<i64, SymbolId> {
        &self.tape
    }

    /// Cells from the leftmost to the rightmost non-blank cell.
    pub fn snapshot(&self, spec: &MachineSpec) -> TapeSnapshot {
        let (origin, symbols) = match (self.tape.keys().next(), self.tape.keys().next_back()) {
            (Some(&lo), Some(&hi)) => (lo, (lo..=hi).map(|p| self.read(p)).collect::<Vec<_>>()),
            _ => (0, Vec::new()),
        };
        TapeSnapshot {
            state: spec.state_name(self.state).to_string(),
            origin,
            cells: spec.format_symbols(&symbols),
            head: self.head,
        }
    }
}

/// Serialized tape: `cells` starts at cell index `origin`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TapeSnapshot {
    pub state: String,
    pub origin: i64,
    pub cells: String,
    pub head: i64,
}

impl fmt::Display for TapeSnapshot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "state={} origin={} head={} cells={}", self.state, self.origin, self.head, self.cells)
    }
}

/// The 2-state, 2-symbol busy-beaver champion: halts after 6 steps with four 1s.
pub fn busy_beaver_2() -> MachineSpec {
    MachineSpec::parse(
        r#"
states = ["A", "B", "H"]
alphabet = ["0", "1"]
blank = "0"
start = "A"
halt = ["H"]
rules = ["A,0,1,R,B", "A,1,1,L,B", "B,0,1,L,A", "B,1,1,R,H"]
"#,
    )
    .expect("built-in machine is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let bb = busy_beaver_2();
        assert_eq!(MachineSpec::parse(&bb.to_toml()).unwrap(), bb);
    }

    #[test]
    fn canonical_text_and_digest() {
        let bb = busy_beaver_2();
        assert_eq!(
            bb.canonical_text(),
            "states=A,B,H;alphabet=0,1;blank=0;start=A;halt=H;rules=A,0,1,R,B|A,1,1,L,B|B,0,1,L,A|B,1,1,R,H"
        );
        assert_eq!(bb.digest().len(), 16);
        assert_eq!(bb.digest(), busy_beaver_2().digest());
    }

    #[test]
    fn rejects_bad_specs() {
        let base = |rules: &str| {
            format!(
                "states=[\"A\",\"H\"]\nalphabet=[\"0\",\"1\"]\nblank=\"0\"\nstart=\"A\"\nhalt=[\"H\"]\nrules=[{rules}]\n"
            )
        };
        assert!(MachineSpec::parse(&base("\"A,0,1,R,H\"")).is_ok());
        assert!(MachineSpec::parse(&base("\"A,0,1,R,H\",\"A,0,0,L,A\"")).is_err());
        assert!(MachineSpec::parse(&base("\"A,0,2,R,H\"")).is_err());
        assert!(MachineSpec::parse(&base("\"A,0,1,X,H\"")).is_err());
        assert!(MachineSpec::parse(&base("\"A,0,1,R\"")).is_err());
        assert!(MachineSpec::parse(&base("\"A,0,1,R,Z\"")).is_err());
        assert!(MachineSpec::parse("states=[\"A\"]").is_err());
    }

    #[test]
    fn configurations_are_canonical() {
        let bb = busy_beaver_2();
        let mut a = Configuration::initial(&bb, &[]).unwrap();
        let b = a.clone();
        a.write(3, SymbolId(1));
        a.write(3, SymbolId(0));
        assert_eq!(a, b);
        assert_eq!(a.non_blank_count(), 0);
    }

    #[test]
    fn input_parsing() {
        let bb = busy_beaver_2();
        assert_eq!(bb.parse_input("0110").unwrap(), vec![SymbolId(0), SymbolId(1), SymbolId(1), SymbolId(0)]);
        assert!(bb.parse_input("012").is_err());
        let cfg = Configuration::initial(&bb, &bb.parse_input("0110").unwrap()).unwrap();
        let snap = cfg.snapshot(&bb);
        assert_eq!((snap.origin, snap.cells.as_str()), (1, "11"));
    }
}
