use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;

use super::{Configuration, MachineSpec, Move, Rule, StateId, SymbolId, TapeSnapshot};
use crate::ledger::{erasure_entropy, LossEvent, LossKind, LossLedger};
use crate::{Error, Result};

/// Why a run stopped on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltReason {
    /// Entered a declared halt state.
    Designated,
    /// No rule matched the current state and symbol.
    Freeze,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum Verdict {
    Halted {
        steps: u64,
        reason: HaltReason,
    },
    /// The configuration at `entry_step + cycle_len` equals the one at
    /// `entry_step` shifted by `shift` cells. `shift == 0` is an exact repeat;
    /// otherwise the head runs off into blank tape forever.
    LoopProven {
        entry_step: u64,
        cycle_len: u64,
        shift: i64,
    },
    StepLimit {
        bound: u64,
    },
    /// The bound ran out, but no halt state and no missing rule can be
    /// reached from the current state, so the machine never stops.
    HaltUnreachable {
        bound: u64,
    },
    /// An oracle had no answer for the query asked at `step`.
    OracleUndefined {
        step: u64,
        query: u64,
    },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Halted { reason: HaltReason::Designated, .. } => "halted",
            Verdict::Halted { reason: HaltReason::Freeze, .. } => "freeze",
            Verdict::LoopProven { .. } => "loop_proven",
            Verdict::StepLimit { .. } => "step_limit",
            Verdict::HaltUnreachable { .. } => "halt_unreachable",
            Verdict::OracleUndefined { .. } => "oracle_undefined",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub verdict: Verdict,
    /// Steps actually executed.
    pub steps: u64,
    pub final_config: Configuration,
    pub ledger: LossLedger,
}

impl RunResult {
    pub fn output_tape(&self, spec: &MachineSpec) -> TapeSnapshot {
        self.final_config.snapshot(spec)
    }
}

/// Everything needed to undo one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HistoryRecord {
    pub prev_state: StateId,
    pub prev_head: i64,
    /// Symbol that was under the head before the step.
    pub overwritten: SymbolId,
    pub written: SymbolId,
    pub mv: Move,
    pub next: StateId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct HistoryLog {
    pub records: Vec<HistoryRecord>,
}

impl HistoryLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepResult {
    Moved(Configuration, Option<LossEvent>),
    Frozen,
    /// The configuration is already in a halt state.
    Halted,
}

/// One transition. `step_no` is the number the step gets in the ledger.
pub fn step(spec: &MachineSpec, config: &Configuration, step_no: u64) -> StepResult {
    if spec.is_halt(config.state) {
        return StepResult::Halted;
    }
    let Some(rule) = spec.rule(config.state, config.read(config.head)) else {
        return StepResult::Frozen;
    };
    let mut next = config.clone();
    let record = apply(&mut next, rule);
    StepResult::Moved(next, erasure_event(spec, &record, step_no))
}

fn apply(cfg: &mut Configuration, rule: Rule) -> HistoryRecord {
    let read = cfg.read(cfg.head);
    let record = HistoryRecord {
        prev_state: cfg.state,
        prev_head: cfg.head,
        overwritten: read,
        written: rule.write,
        mv: rule.mv,
        next: rule.next,
    };
    cfg.write(cfg.head, rule.write);
    cfg.head += rule.mv.delta();
    cfg.state = rule.next;
    record
}

fn erasure_event(spec: &MachineSpec, rec: &HistoryRecord, step_no: u64) -> Option<LossEvent> {
    if rec.overwritten == rec.written {
        return None;
    }
    let bits = erasure_entropy(spec.alphabet().len() as u64).ok()?;
    let detail =
        format!("cell {}: {} -> {}", rec.prev_head, spec.symbol_name(rec.overwritten), spec.symbol_name(rec.written));
    LossEvent::new(LossKind::Erasure, bits, step_no, detail).ok()
}

// Record positions kept per direction by the translation detector.
const RECORD_WINDOW: usize = 32;

struct Extreme {
    step: u64,
    pos: i64,
    state: StateId,
    tape: BTreeMap<i64, SymbolId>,
}

/// Detects machines that repeat a pattern while moving into untouched tape.
///
/// Whenever the head reaches a new rightmost (leftmost) position we compare
/// with earlier records in the same state. If the head never went more than
/// `span` cells back from the earlier record, and the `span + 1` cells ending
/// at each record agree (everything beyond is blank in both), the later
/// record reproduces the earlier one shifted and the machine never stops.
struct TranslationTracker {
    heads: Vec<i64>,
    right: VecDeque<Extreme>,
    left: VecDeque<Extreme>,
    max_pos: i64,
    min_pos: i64,
}

impl TranslationTracker {
    fn new(cfg: &Configuration) -> Self {
        TranslationTracker {
            heads: vec![cfg.head],
            right: VecDeque::new(),
            left: VecDeque::new(),
            max_pos: cfg.head,
            min_pos: cfg.head,
        }
    }

    fn observe(&mut self, step: u64, cfg: &Configuration) -> Option<Verdict> {
        self.heads.push(cfg.head);
        let mut found = None;
        if cfg.head > self.max_pos {
            self.max_pos = cfg.head;
            found = self.check(step, cfg, true);
        } else if cfg.head < self.min_pos {
            self.min_pos = cfg.head;
            found = self.check(step, cfg, false);
        }
        found
    }

    fn check(&mut self, step: u64, cfg: &Configuration, rightward: bool) -> Option<Verdict> {
        let tape = cfg.tape_map();
        let beyond_blank = |t: &BTreeMap<i64, SymbolId>, p: i64| {
            if rightward {
                t.range(p + 1..).next().is_none()
            } else {
                t.range(..p).next().is_none()
            }
        };
        let records = if rightward { &self.right } else { &self.left };
        if beyond_blank(tape, cfg.head) {
            for rec in records.iter().rev() {
                if rec.state != cfg.state || !beyond_blank(&rec.tape, rec.pos) {
                    continue;
                }
                let between = &self.heads[rec.step as usize..=step as usize];
                let span = if rightward {
                    rec.pos - between.iter().copied().min().unwrap()
                } else {
                    between.iter().copied().max().unwrap() - rec.pos
                };
                let sign = if rightward { -1 } else { 1 };
                let same = (0..=span).all(|d| {
                    let a = rec.tape.get(&(rec.pos + sign * d));
                    let b = tape.get(&(cfg.head + sign * d));
                    a == b
                });
                if same {
                    return Some(Verdict::LoopProven {
                        entry_step: rec.step,
                        cycle_len: step - rec.step,
                        shift: cfg.head - rec.pos,
                    });
                }
            }
        }
        let records = if rightward { &mut self.right } else { &mut self.left };
        if records.len() == RECORD_WINDOW {
            records.pop_front();
        }
        records.push_back(Extreme { step, pos: cfg.head, state: cfg.state, tape: tape.clone() });
        None
    }
}

/// True if some state reachable from `from` in the rule graph is a halt
/// state or lacks a rule for some symbol. Every symbol is assumed readable
/// in every state, so a `false` answer is a proof that the run never stops.
pub fn stop_reachable(spec: &MachineSpec, from: StateId) -> bool {
    let n_sym = spec.alphabet().len();
    let mut seen = vec![false; spec.states().len()];
    let mut stack = vec![from];
    seen[from.0 as usize] = true;
    while let Some(state) = stack.pop() {
        if spec.is_halt(state) {
            return true;
        }
        for sym in 0..n_sym {
            let Some(rule) = spec.rule(state, SymbolId(sym as u16)) else {
                return true;
            };
            if !seen[rule.next.0 as usize] {
                seen[rule.next.0 as usize] = true;
                stack.push(rule.next);
            }
        }
    }
    false
}

/// Step-by-step driver shared by plain and oracle runs.
pub(crate) struct Simulation<'a> {
    spec: &'a MachineSpec,
    pub(crate) cfg: Configuration,
    pub(crate) steps: u64,
    bound: u64,
    seen: HashMap<Configuration, u64>,
    tracker: Option<TranslationTracker>,
    closed: bool,
    pub(crate) ledger: LossLedger,
    history: Option<Vec<HistoryRecord>>,
}

impl<'a> Simulation<'a> {
    /// `closed` enables the moving-loop detector and the reachability check;
    /// both are only sound when every transition comes from the rule table.
    pub(crate) fn new(
        spec: &'a MachineSpec,
        input: &[SymbolId],
        bound: u64,
        keep_history: bool,
        closed: bool,
    ) -> Result<Self> {
        let cfg = Configuration::initial(spec, input)?;
        let mut seen = HashMap::new();
        seen.insert(cfg.clone(), 0);
        Ok(Simulation {
            spec,
            tracker: closed.then(|| TranslationTracker::new(&cfg)),
            closed,
            cfg,
            steps: 0,
            bound,
            seen,
            ledger: LossLedger::new(),
            history: keep_history.then(Vec::new),
        })
    }

    /// Verdict reachable without taking a step.
    pub(crate) fn before_step(&self) -> Option<Verdict> {
        if self.spec.is_halt(self.cfg.state) {
            Some(Verdict::Halted { steps: self.steps, reason: HaltReason::Designated })
        } else if self.steps >= self.bound {
            // A zero bound means no analysis at all.
            if self.closed && self.bound > 0 && !stop_reachable(self.spec, self.cfg.state) {
                Some(Verdict::HaltUnreachable { bound: self.bound })
            } else {
                Some(Verdict::StepLimit { bound: self.bound })
            }
        } else {
            None
        }
    }

    pub(crate) fn current_rule(&self) -> Option<Rule> {
        self.spec.rule(self.cfg.state, self.cfg.read(self.cfg.head))
    }

    pub(crate) fn apply_rule(&mut self, rule: Rule) -> Option<Verdict> {
        let record = apply(&mut self.cfg, rule);
        self.steps += 1;
        match &mut self.history {
            Some(h) => h.push(record),
            None => {
                if let Some(ev) = erasure_event(self.spec, &record, self.steps) {
                    self.ledger.record(ev).expect("steps increase");
                }
            }
        }
        self.after_step()
    }

    /// A step that only changes state (an oracle branch).
    pub(crate) fn branch(&mut self, next: StateId) -> Option<Verdict> {
        let read = self.cfg.read(self.cfg.head);
        let record = HistoryRecord {
            prev_state: self.cfg.state,
            prev_head: self.cfg.head,
            overwritten: read,
            written: read,
            mv: Move::S,
            next,
        };
        self.cfg.state = next;
        self.steps += 1;
        if let Some(h) = &mut self.history {
            h.push(record);
        }
        self.after_step()
    }

    fn after_step(&mut self) -> Option<Verdict> {
        if let Some(&entry) = self.seen.get(&self.cfg) {
            return Some(Verdict::LoopProven { entry_step: entry, cycle_len: self.steps - entry, shift: 0 });
        }
        self.seen.insert(self.cfg.clone(), self.steps);
        let steps = self.steps;
        self.tracker.as_mut().and_then(|t| t.observe(steps, &self.cfg))
    }

    pub(crate) fn finish(self, verdict: Verdict) -> (RunResult, HistoryLog) {
        (
            RunResult { verdict, steps: self.steps, final_config: self.cfg, ledger: self.ledger },
            HistoryLog { records: self.history.unwrap_or_default() },
        )
    }
}

fn drive(
    spec: &MachineSpec,
    input: &[SymbolId],
    max_steps: u64,
    keep_history: bool,
) -> Result<(RunResult, HistoryLog)> {
    let mut sim = Simulation::new(spec, input, max_steps, keep_history, true)?;
    loop {
        if let Some(v) = sim.before_step() {
            return Ok(sim.finish(v));
        }
        let verdict = match sim.current_rule() {
            None => Some(Verdict::Halted { steps: sim.steps, reason: HaltReason::Freeze }),
            Some(rule) => sim.apply_rule(rule),
        };
        if let Some(v) = verdict {
            return Ok(sim.finish(v));
        }
    }
}

/// Runs from the start state with `input` at cell 0 for at most `max_steps` steps.
/// Every destructive write is charged `log2 |alphabet|` bits in the ledger.
pub fn run(spec: &MachineSpec, input: &[SymbolId], max_steps: u64) -> Result<RunResult> {
    drive(spec, input, max_steps, false).map(|(r, _)| r)
}

/// Like [`run`] but records how to undo every step. Nothing is lost while
/// the history is kept, so the ledger stays empty.
pub fn run_with_history(spec: &MachineSpec, input: &[SymbolId], max_steps: u64) -> Result<(RunResult, HistoryLog)> {
    drive(spec, input, max_steps, true)
}

/// Undoes `history` starting from `final_config`.
pub fn retrace(final_config: &Configuration, history: &HistoryLog) -> Result<Configuration> {
    let mut cfg = final_config.clone();
    for (i, rec) in history.records.iter().enumerate().rev() {
        let expected_head = rec.prev_head + rec.mv.delta();
        if cfg.state != rec.next || cfg.head != expected_head || cfg.read(rec.prev_head) != rec.written {
            return Err(Error::Integrity(format!(
                "history record {i} does not match the configuration being retraced"
            )));
        }
        cfg.write(rec.prev_head, rec.overwritten);
        cfg.head = rec.prev_head;
        cfg.state = rec.prev_state;
    }
    Ok(cfg)
}

/// True when every configuration has at most one predecessor: any two
/// rules entering the same state move the same way and write different symbols.
pub fn is_reversible_spec(spec: &MachineSpec) -> bool {
    let rules: Vec<Rule> = spec.rules().map(|(_, r)| r).collect();
    for (i, a) in rules.iter().enumerate() {
        for b in &rules[i + 1..] {
            if a.next == b.next && (a.mv != b.mv || a.write == b.write) {
                return false;
            }
        }
    }
    true
}
