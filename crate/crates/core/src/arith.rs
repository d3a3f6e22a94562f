//! Preimages of fixed-width unsigned arithmetic.
//!
//! An output such as `1000` (8) does not tell which operation and operands
//! produced it. This module enumerates every single-operation candidate,
//! measures the resulting uncertainty, and solves for a missing operand.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::smi::Bits;
use crate::{Error, Result};

/// Largest operand width scanned exhaustively.
pub const MAX_OPERAND_WIDTH: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    // Declaration order is alphabetical so derived Ord sorts by name.
    Add,
    Mul,
    Sub,
}

impl OpKind {
    pub fn name(self) -> &'static str {
        match self {
            OpKind::Add => "add",
            OpKind::Mul => "mul",
            OpKind::Sub => "sub",
        }
    }

    pub fn apply(self, a: u64, b: u64) -> Option<u64> {
        match self {
            OpKind::Add => a.checked_add(b),
            OpKind::Sub => a.checked_sub(b),
            OpKind::Mul => a.checked_mul(b),
        }
    }

    /// Result width that holds every result of two `operand_width`-bit operands.
    pub fn natural_result_width(self, operand_width: u32) -> u32 {
        match self {
            OpKind::Add => operand_width + 1,
            OpKind::Sub => operand_width,
            OpKind::Mul => 2 * operand_width,
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "add" | "+" => Ok(OpKind::Add),
            "sub" | "-" => Ok(OpKind::Sub),
            "mul" | "*" | "x" => Ok(OpKind::Mul),
            other => Err(Error::validation(format!("unknown operation `{other}`"))),
        }
    }
}

/// A binary operation on unsigned integers of fixed widths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArithOp {
    pub kind: OpKind,
    pub operand_width: u32,
    pub result_width: u32,
}

impl ArithOp {
    pub fn new(kind: OpKind, operand_width: u32, result_width: u32) -> Result<Self> {
        if operand_width == 0 || result_width == 0 {
            return Err(Error::validation("widths must be positive"));
        }
        if result_width < operand_width {
            return Err(Error::validation(format!(
                "result width {result_width} is smaller than operand width {operand_width}"
            )));
        }
        if result_width > 63 {
            return Err(Error::capacity(format!("result width {result_width} exceeds 63 bits")));
        }
        Ok(ArithOp { kind, operand_width, result_width })
    }

    /// `kind` with the result width from [`OpKind::natural_result_width`].
    pub fn natural(kind: OpKind, operand_width: u32) -> Result<Self> {
        Self::new(kind, operand_width, kind.natural_result_width(operand_width))
    }

    fn operand_fits(&self, v: u64) -> bool {
        v >> self.operand_width == 0
    }

    fn result_fits(&self, v: u64) -> bool {
        v >> self.result_width == 0
    }

    /// Exact result, or `None` when it is negative or does not fit.
    pub fn eval(&self, a: u64, b: u64) -> Option<u64> {
        if !self.operand_fits(a) || !self.operand_fits(b) {
            return None;
        }
        self.kind.apply(a, b).filter(|&r| self.result_fits(r))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Candidate {
    pub op: OpKind,
    pub operands: [u64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreimageRecord {
    pub value: u64,
    pub width: u32,
    pub ops: Vec<OpKind>,
    /// Sorted by `(op name, operands)`.
    pub candidates: Vec<Candidate>,
    pub count: usize,
    /// `log2(count)`, absent when nothing produces the value.
    pub entropy_bits: Option<f64>,
}

impl PreimageRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }
}

/// Every ordered operand pair of `operand_width` bits that yields
/// `output_value` under one of `ops`, each op using its natural result width.
///
/// Ops whose result width cannot hold the value contribute no candidates; the
/// value must fit at least one of them.
pub fn enumerate_preimages(output_value: u64, operand_width: u32, ops: &[OpKind]) -> Result<PreimageRecord> {
    if operand_width > MAX_OPERAND_WIDTH {
        return Err(Error::capacity(format!(
            "operand width {operand_width} exceeds the exhaustive bound {MAX_OPERAND_WIDTH}"
        )));
    }
    let arith: Vec<ArithOp> = ops.iter().map(|&k| ArithOp::natural(k, operand_width)).collect::<Result<_>>()?;
    enumerate_with(output_value, &arith)
}

/// Like [`enumerate_preimages`] but with explicit widths per operation.
pub fn enumerate_with(output_value: u64, ops: &[ArithOp]) -> Result<PreimageRecord> {
    if ops.is_empty() {
        return Err(Error::validation("no operations given"));
    }
    let width = ops[0].operand_width;
    if let Some(op) = ops.iter().find(|o| o.operand_width > MAX_OPERAND_WIDTH) {
        return Err(Error::capacity(format!(
            "operand width {} exceeds the exhaustive bound {MAX_OPERAND_WIDTH}",
            op.operand_width
        )));
    }
    if !ops.iter().any(|o| o.result_fits(output_value)) {
        return Err(Error::validation(format!(
            "value {output_value} is not representable in any declared result width"
        )));
    }
    let mut kinds: Vec<OpKind> = ops.iter().map(|o| o.kind).collect();
    kinds.sort();
    kinds.dedup();

    let mut candidates = Vec::new();
    for op in ops {
        if !op.result_fits(output_value) {
            continue;
        }
        scan(op, output_value, &mut candidates);
    }
    candidates.sort();
    candidates.dedup();
    let count = candidates.len();
    Ok(PreimageRecord {
        value: output_value,
        width,
        ops: kinds,
        count,
        entropy_bits: (count > 0).then(|| (count as f64).log2()),
        candidates,
    })
}

/// For each left operand the right operand is determined (or free, for
/// `0 * b = 0`), so the scan visits every ordered pair without a double loop.
fn scan(op: &ArithOp, value: u64, out: &mut Vec<Candidate>) {
    let top = 1u64 << op.operand_width;
    for a in 0..top {
        let push = |b: u64, out: &mut Vec<Candidate>| {
            if op.eval(a, b) == Some(value) {
                out.push(Candidate { op: op.kind, operands: [a, b] });
            }
        };
        match op.kind {
            OpKind::Add => {
                if let Some(b) = value.checked_sub(a) {
                    push(b, out);
                }
            }
            OpKind::Sub => {
                if let Some(b) = a.checked_sub(value) {
                    push(b, out);
                }
            }
            OpKind::Mul => {
                if a == 0 {
                    if value == 0 {
                        (0..top).for_each(|b| push(b, out));
                    }
                } else if value.is_multiple_of(a) {
                    push(value / a, out);
                }
            }
        }
    }
}

/// Uncertainty over the enumerated candidates, assumed equally likely.
pub fn preimage_entropy(record: &PreimageRecord) -> Result<Bits> {
    if record.count == 0 {
        return Err(Error::validation(format!("value {} has no preimages", record.value)));
    }
    Ok(Bits::from_computed((record.count as f64).log2()))
}

/// `n_input_bits` fair bits scored at half a bit each: `-n (1/2 log2 1/2)`.
/// Six independent fair bits carry six bits under the ordinary measure; this
/// figure is kept as a separate quantity from [`preimage_entropy`].
pub fn half_bit_uncertainty(n_input_bits: u32) -> Result<Bits> {
    if n_input_bits == 0 {
        return Err(Error::validation("need at least one input bit"));
    }
    Ok(Bits::from_computed(-(n_input_bits as f64) * (0.5 * 0.5f64.log2())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reconstruction {
    NoSolution,
    Operand(u64),
    /// Subtraction: the missing operand when the known one is the minuend
    /// (`known - x`) and when it is the subtrahend (`x - known`).
    Orientations {
        known_left: Option<u64>,
        known_right: Option<u64>,
    },
    /// `0 * x = 0` holds for every `x`.
    AnyOperand,
}

/// Solves `op(known, x) = output` (or `op(x, known)`) for `x` within `op`'s widths.
pub fn reconstruct_operand(output: u64, known: u64, op: ArithOp) -> Result<Reconstruction> {
    if !op.operand_fits(known) {
        return Err(Error::validation(format!("known operand {known} does not fit {} bits", op.operand_width)));
    }
    if !op.result_fits(output) {
        return Err(Error::validation(format!("output {output} does not fit {} bits", op.result_width)));
    }
    let fits = |x: u64| op.operand_fits(x).then_some(x);
    Ok(match op.kind {
        OpKind::Add => match output.checked_sub(known).and_then(fits) {
            Some(x) => Reconstruction::Operand(x),
            None => Reconstruction::NoSolution,
        },
        OpKind::Mul => {
            if known == 0 {
                if output == 0 {
                    Reconstruction::AnyOperand
                } else {
                    Reconstruction::NoSolution
                }
            } else if output.is_multiple_of(known) {
                fits(output / known).map_or(Reconstruction::NoSolution, Reconstruction::Operand)
            } else {
                Reconstruction::NoSolution
            }
        }
        OpKind::Sub => {
            let known_left = known.checked_sub(output).and_then(fits);
            let known_right = output.checked_add(known).and_then(fits);
            if known_left.is_none() && known_right.is_none() {
                Reconstruction::NoSolution
            } else {
                Reconstruction::Orientations { known_left, known_right }
            }
        }
    })
}
