//! C ABI for `infoloss`.
//!
//! Every fallible function returns an [`IlStatus`] and writes its result
//! through an out-pointer. On failure the out-pointer is left untouched and
//! [`il_last_error`] describes what went wrong on the calling thread.
//!
//! Handles (`IlTable`, `IlMachine`, `IlCensus`, `IlOracle`) are opaque and
//! must be released with their `*_free` function. Strings returned by the
//! library must be released with [`il_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use infoloss::census::{run_census_with, CensusOptions, CensusTable, RowVerdict};
use infoloss::gate::{self, EntropyModel, StandardGate, TruthTable};
use infoloss::ledger;
use infoloss::machine::{self, HaltReason, MachineSpec, Verdict};
use infoloss::oracle::{build_halting_oracle, Answer, OracleSpec};
use infoloss::smi::{self, ProbabilityDistribution};
use infoloss::{Bits, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IlStatus {
    Ok = 0,
    Validation = 1,
    Capacity = 2,
    Domain = 3,
    Integrity = 4,
    Io = 5,
    NullPointer = 6,
    InvalidUtf8 = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IlModel {
    OutputUniform = 0,
    UniformInput = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum IlVerdict {
    Halted = 0,
    Freeze = 1,
    LoopProven = 2,
    HaltUnreachable = 3,
    #[default]
    StepLimit = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IlAnswer {
    No = 0,
    Yes = 1,
    Unknown = 2,
}

/// Outcome of a bounded run. `entry_step`, `cycle_len` and `shift` are zero
/// unless `verdict` is `LoopProven`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IlRunSummary {
    pub verdict: IlVerdict,
    pub steps: u64,
    pub entry_step: u64,
    pub cycle_len: u64,
    pub shift: i64,
    pub lost_bits: f64,
    pub non_blank_cells: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IlCensusRow {
    pub index: u64,
    pub verdict: IlVerdict,
    pub steps: u64,
    pub has_cycle: bool,
    pub cycle: u64,
    pub lost_bits: f64,
}

pub struct IlTable(TruthTable);
pub struct IlMachine(MachineSpec);
pub struct IlCensus(CensusTable);
pub struct IlOracle(OracleSpec);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(IlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Validation(_) => IlStatus::Validation,
            Error::Capacity(_) => IlStatus::Capacity,
            Error::Domain(_) => IlStatus::Domain,
            Error::Integrity(_) => IlStatus::Integrity,
            _ => IlStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            IlStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            IlStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(IlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(IlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn il_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must come from this library and not have been freed yet.
#[no_mangle]
pub unsafe extern "C" fn il_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Shannon measure of `len` probabilities, in bits.
///
/// # Safety
/// `probs` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn il_smi(probs: *const f64, len: usize, result: *mut f64) -> IlStatus {
    guard(|| {
        let result = out(result, "result")?;
        if probs.is_null() {
            return Err(null("probs"));
        }
        let slice = std::slice::from_raw_parts(probs, len);
        let dist = ProbabilityDistribution::new(slice.to_vec())?;
        *result = smi::smi(&dist).value();
        Ok(())
    })
}

/// # Safety
/// `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn il_surprisal(p: f64, result: *mut f64) -> IlStatus {
    guard(|| {
        let result = out(result, "result")?;
        *result = smi::surprisal(p)?.value();
        Ok(())
    })
}

/// # Safety
/// `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn il_erasure_entropy(prior_states: u64, result: *mut f64) -> IlStatus {
    guard(|| {
        let result = out(result, "result")?;
        *result = ledger::erasure_entropy(prior_states)?.value();
        Ok(())
    })
}

/// Minimum heat in joules for erasing `bits` at `temperature` kelvin.
///
/// # Safety
/// `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn il_landauer_energy(bits: f64, temperature: f64, result: *mut f64) -> IlStatus {
    guard(|| {
        let result = out(result, "result")?;
        *result = ledger::landauer_energy(Bits::new(bits)?, temperature)?;
        Ok(())
    })
}

/// Looks up a standard gate by name (`NAND`, `XOR`, `TOFFOLI`, ...).
///
/// # Safety
/// `name` must be a NUL-terminated string; `table` must be writable.
#[no_mangle]
pub unsafe extern "C" fn il_table_standard(name: *const c_char, table: *mut *mut IlTable) -> IlStatus {
    guard(|| {
        let table = out(table, "table")?;
        let gate: StandardGate = text(name, "name")?.parse()?;
        *table = boxed(IlTable(gate.table()));
        Ok(())
    })
}

/// Parses a truth table in `00 -> 1` row format.
///
/// # Safety
/// `source` must be a NUL-terminated string; `table` must be writable.
#[no_mangle]
pub unsafe extern "C" fn il_table_parse(source: *const c_char, table: *mut *mut IlTable) -> IlStatus {
    guard(|| {
        let table = out(table, "table")?;
        *table = boxed(IlTable(TruthTable::parse(text(source, "source")?)?));
        Ok(())
    })
}

/// # Safety
/// `table` must come from this library and not have been freed yet.
#[no_mangle]
pub unsafe extern "C" fn il_table_free(table: *mut IlTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

fn model(m: IlModel) -> EntropyModel {
    match m {
        IlModel::OutputUniform => EntropyModel::OutputUniform,
        IlModel::UniformInput => EntropyModel::UniformInput,
    }
}

/// # Safety
/// `table` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn il_table_joint_entropy(table: *const IlTable, m: IlModel, result: *mut f64) -> IlStatus {
    guard(|| {
        let t = handle(table, "table")?;
        *out(result, "result")? = gate::joint_entropy(&t.0, model(m)).value();
        Ok(())
    })
}

/// # Safety
/// `table` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn il_table_equivocation(table: *const IlTable, m: IlModel, result: *mut f64) -> IlStatus {
    guard(|| {
        let t = handle(table, "table")?;
        *out(result, "result")? = gate::equivocation_with(&t.0, model(m)).value();
        Ok(())
    })
}

/// # Safety
/// `table` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn il_table_is_reversible(table: *const IlTable, result: *mut bool) -> IlStatus {
    guard(|| {
        let t = handle(table, "table")?;
        *out(result, "result")? = gate::is_reversible(&t.0);
        Ok(())
    })
}

/// Parses a machine description (TOML).
///
/// # Safety
/// `source` must be a NUL-terminated string; `machine` must be writable.
#[no_mangle]
pub unsafe extern "C" fn il_machine_parse(source: *const c_char, machine: *mut *mut IlMachine) -> IlStatus {
    guard(|| {
        let machine = out(machine, "machine")?;
        *machine = boxed(IlMachine(MachineSpec::parse(text(source, "source")?)?));
        Ok(())
    })
}

/// The two-state busy beaver champion.
///
/// # Safety
/// `machine` must be writable.
#[no_mangle]
pub unsafe extern "C" fn il_machine_busy_beaver_2(machine: *mut *mut IlMachine) -> IlStatus {
    guard(|| {
        *out(machine, "machine")? = boxed(IlMachine(machine::busy_beaver_2()));
        Ok(())
    })
}

/// # Safety
/// `machine` must come from this library and not have been freed yet.
#[no_mangle]
pub unsafe extern "C" fn il_machine_free(machine: *mut IlMachine) {
    if !machine.is_null() {
        drop(Box::from_raw(machine));
    }
}

/// 16 hex digit digest of the canonical form; free with [`il_string_free`].
/// Returns NULL if `machine` is NULL.
///
/// # Safety
/// `machine` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn il_machine_digest(machine: *const IlMachine) -> *mut c_char {
    match machine.as_ref() {
        Some(m) => into_c_string(m.0.digest()),
        None => ptr::null_mut(),
    }
}

fn verdict_code(v: &Verdict) -> IlVerdict {
    match v {
        Verdict::Halted { reason: HaltReason::Designated, .. } => IlVerdict::Halted,
        Verdict::Halted { reason: HaltReason::Freeze, .. } => IlVerdict::Freeze,
        Verdict::LoopProven { .. } => IlVerdict::LoopProven,
        Verdict::HaltUnreachable { .. } => IlVerdict::HaltUnreachable,
        Verdict::StepLimit { .. } | Verdict::OracleUndefined { .. } => IlVerdict::StepLimit,
    }
}

/// Runs `machine` on `input` (symbol names concatenated, or NULL for a
/// blank tape) for at most `max_steps` steps.
///
/// # Safety
/// `machine` must be a live handle, `input` NULL or a NUL-terminated string,
/// and `summary` writable.
#[no_mangle]
pub unsafe extern "C" fn il_machine_run(
    machine: *const IlMachine,
    input: *const c_char,
    max_steps: u64,
    summary: *mut IlRunSummary,
) -> IlStatus {
    guard(|| {
        let m = &handle(machine, "machine")?.0;
        let summary = out(summary, "summary")?;
        let input = if input.is_null() { Vec::new() } else { m.parse_input(text(input, "input")?)? };
        let r = machine::run(m, &input, max_steps)?;
        let (entry_step, cycle_len, shift) = match r.verdict {
            Verdict::LoopProven { entry_step, cycle_len, shift } => (entry_step, cycle_len, shift),
            _ => (0, 0, 0),
        };
        *summary = IlRunSummary {
            verdict: verdict_code(&r.verdict),
            steps: r.steps,
            entry_step,
            cycle_len,
            shift,
            lost_bits: r.ledger.lost_total().value(),
            non_blank_cells: r.final_config.non_blank_count() as u64,
        };
        Ok(())
    })
}

/// Classifies every machine with `n_states` working states and `n_symbols`
/// symbols on blank tape. `jobs == 0` uses all cores.
///
/// # Safety
/// `census` must be writable.
#[no_mangle]
pub unsafe extern "C" fn il_census_run(
    n_states: u32,
    n_symbols: u32,
    step_bound: u64,
    jobs: u32,
    census: *mut *mut IlCensus,
) -> IlStatus {
    guard(|| {
        let census = out(census, "census")?;
        let opts = CensusOptions { jobs: (jobs > 0).then_some(jobs as usize), input: Vec::new() };
        *census = boxed(IlCensus(run_census_with(n_states, n_symbols, step_bound, &opts)?));
        Ok(())
    })
}

/// # Safety
/// `census` must come from this library and not have been freed yet.
#[no_mangle]
pub unsafe extern "C" fn il_census_free(census: *mut IlCensus) {
    if !census.is_null() {
        drop(Box::from_raw(census));
    }
}

/// Number of rows; 0 for NULL.
///
/// # Safety
/// `census` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn il_census_len(census: *const IlCensus) -> u64 {
    census.as_ref().map_or(0, |c| c.0.rows.len() as u64)
}

fn row_verdict(v: RowVerdict) -> IlVerdict {
    match v {
        RowVerdict::Halted => IlVerdict::Halted,
        RowVerdict::Freeze => IlVerdict::Freeze,
        RowVerdict::LoopProven => IlVerdict::LoopProven,
        RowVerdict::HaltUnreachable => IlVerdict::HaltUnreachable,
        RowVerdict::StepLimit => IlVerdict::StepLimit,
    }
}

/// Row at position `position` (rows are sorted by machine index).
///
/// # Safety
/// `census` must be a live handle and `row` writable.
#[no_mangle]
pub unsafe extern "C" fn il_census_row(census: *const IlCensus, position: u64, row: *mut IlCensusRow) -> IlStatus {
    guard(|| {
        let c = &handle(census, "census")?.0;
        let row = out(row, "row")?;
        let r = usize::try_from(position)
            .ok()
            .and_then(|i| c.rows.get(i))
            .ok_or_else(|| Failure(IlStatus::Validation, format!("row {position} out of range")))?;
        *row = IlCensusRow {
            index: r.index,
            verdict: row_verdict(r.verdict),
            steps: r.steps,
            has_cycle: r.cycle.is_some(),
            cycle: r.cycle.unwrap_or(0),
            lost_bits: r.lost_bits,
        };
        Ok(())
    })
}

/// The census as CSV; free with [`il_string_free`]. NULL if `census` is NULL.
///
/// # Safety
/// `census` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn il_census_to_csv(census: *const IlCensus) -> *mut c_char {
    match census.as_ref() {
        Some(c) => into_c_string(c.0.to_csv()),
        None => ptr::null_mut(),
    }
}

/// Halting oracle answering by census index. The census may be freed afterwards.
///
/// # Safety
/// `census` must be a live handle and `oracle` writable.
#[no_mangle]
pub unsafe extern "C" fn il_oracle_from_census(census: *const IlCensus, oracle: *mut *mut IlOracle) -> IlStatus {
    guard(|| {
        let c = &handle(census, "census")?.0;
        *out(oracle, "oracle")? = boxed(IlOracle(build_halting_oracle(c)));
        Ok(())
    })
}

/// # Safety
/// `oracle` must come from this library and not have been freed yet.
#[no_mangle]
pub unsafe extern "C" fn il_oracle_free(oracle: *mut IlOracle) {
    if !oracle.is_null() {
        drop(Box::from_raw(oracle));
    }
}

/// Answer for machine index `query`; `Unknown` for NULL or unlisted indices.
///
/// # Safety
/// `oracle` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn il_oracle_ask(oracle: *const IlOracle, query: u64) -> IlAnswer {
    match oracle.as_ref().map(|o| o.0.ask(query)) {
        Some(Answer::Yes) => IlAnswer::Yes,
        Some(Answer::No) => IlAnswer::No,
        _ => IlAnswer::Unknown,
    }
}
