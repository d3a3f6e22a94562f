//! Truth tables, logic gates and circuits, with the information each destroys.
//!
//! Bit tuples are written most-significant bit first: for a 2-input table the
//! tuple `(a, b)` is row index `2a + b`.
//!
//! The interchange format is one row per line, `inputs -> outputs`:
//!
//! ```text
//! 00 -> 1
//! 01 -> 1
//! 10 -> 1
//! 11 -> 0
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::smi::{smi_of, Bits};
use crate::{Error, Result};

pub const MAX_ARITY: u8 = 16;
pub const MAX_WIDTH: u8 = 32;

/// A total Boolean function from `arity` input bits to `width` output bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    arity: u8,
    width: u8,
    rows: Vec<u32>,
}

impl TruthTable {
    /// `rows[i]` is the output for input index `i`.
    pub fn new(arity: u8, width: u8, rows: Vec<u32>) -> Result<Self> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::validation(format!("arity must be in 1..={MAX_ARITY}, got {arity}")));
        }
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::validation(format!("width must be in 1..={MAX_WIDTH}, got {width}")));
        }
        if rows.len() != 1usize << arity {
            return Err(Error::validation(format!("arity {arity} needs {} rows, got {}", 1usize << arity, rows.len())));
        }
        if let Some((i, &r)) = rows.iter().enumerate().find(|&(_, &r)| width < 32 && r >> width != 0) {
            return Err(Error::validation(format!("row {i} output {r} does not fit in {width} bits")));
        }
        Ok(TruthTable { arity, width, rows })
    }

    pub fn from_fn(arity: u8, width: u8, f: impl Fn(u32) -> u32) -> Result<Self> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::validation(format!("arity must be in 1..={MAX_ARITY}, got {arity}")));
        }
        Self::new(arity, width, (0..1u32 << arity).map(f).collect())
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn output(&self, input: u32) -> u32 {
        self.rows[input as usize]
    }

    /// Number of inputs mapping to each achievable output value.
    pub fn preimage_counts(&self) -> BTreeMap<u32, usize> {
        let mut counts = BTreeMap::new();
        for &r in &self.rows {
            *counts.entry(r).or_insert(0) += 1;
        }
        counts
    }

    /// Parses the `inputs -> outputs` text format. Rows may come in any order
    /// but every input tuple must appear exactly once.
    pub fn parse(text: &str) -> Result<Self> {
        let mut arity = None;
        let mut width = None;
        let mut rows: BTreeMap<u32, u32> = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| Error::validation(format!("line {}: expected `inputs -> outputs`", lineno + 1)))?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            let input = parse_bit_string(lhs).map_err(|e| at_line(lineno, e))?;
            let output = parse_bit_string(rhs).map_err(|e| at_line(lineno, e))?;
            let a = *arity.get_or_insert(lhs.len());
            let w = *width.get_or_insert(rhs.len());
            if lhs.len() != a || rhs.len() != w {
                return Err(Error::validation(format!(
                    "line {}: row shape {}->{} differs from {a}->{w}",
                    lineno + 1,
                    lhs.len(),
                    rhs.len()
                )));
            }
            if a > MAX_ARITY as usize || w > MAX_WIDTH as usize {
                return Err(Error::validation(format!("line {}: row too wide", lineno + 1)));
            }
            if rows.insert(input, output).is_some() {
                return Err(Error::validation(format!("line {}: duplicate input {lhs}", lineno + 1)));
            }
        }
        let (arity, width) = match (arity, width) {
            (Some(a), Some(w)) => (a as u8, w as u8),
            _ => return Err(Error::validation("truth table has no rows")),
        };
        if rows.len() != 1usize << arity {
            return Err(Error::validation(format!("truth table has {} of {} rows", rows.len(), 1usize << arity)));
        }
        Self::new(arity, width, rows.into_values().collect())
    }

    /// Serializes in ascending input order, one `\n`-terminated row per line.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &r) in self.rows.iter().enumerate() {
            writeln!(f, "{} -> {}", bit_string(i as u32, self.arity), bit_string(r, self.width))?;
        }
        Ok(())
    }
}

fn at_line(lineno: usize, e: Error) -> Error {
    Error::validation(format!("line {}: {e}", lineno + 1))
}

fn parse_bit_string(s: &str) -> Result<u32> {
    if s.is_empty() || s.len() > 32 {
        return Err(Error::validation(format!("bad bit string `{s}`")));
    }
    s.chars().try_fold(0u32, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok(acc << 1 | 1),
        _ => Err(Error::validation(format!("non-binary character `{c}` in `{s}`"))),
    })
}

fn bit_string(value: u32, n: u8) -> String {
    (0..n).rev().map(|i| if value >> i & 1 == 1 { '1' } else { '0' }).collect()
}

/// `value` as `n` bits, most significant first.
pub fn to_bits(value: u32, n: u8) -> Vec<u8> {
    (0..n).rev().map(|i| (value >> i & 1) as u8).collect()
}

/// Inverse of [`to_bits`]; every entry must be 0 or 1.
pub fn from_bits(bits: &[u8]) -> Result<u32> {
    if bits.len() > 32 {
        return Err(Error::validation(format!("{} bits do not fit in 32", bits.len())));
    }
    bits.iter().try_fold(0u32, |acc, &b| match b {
        0 | 1 => Ok(acc << 1 | b as u32),
        other => Err(Error::validation(format!("bit value {other} is not 0 or 1"))),
    })
}

/// The gate library.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardGate {
    Nand,
    Nor,
    Not,
    And,
    Or,
    Xor,
    /// Controlled-controlled-NOT on three bits: `(a, b, c) -> (a, b, c ^ (a & b))`.
    Toffoli,
}

impl StandardGate {
    pub const ALL: [StandardGate; 7] = [
        StandardGate::Nand,
        StandardGate::Nor,
        StandardGate::Not,
        StandardGate::And,
        StandardGate::Or,
        StandardGate::Xor,
        StandardGate::Toffoli,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StandardGate::Nand => "NAND",
            StandardGate::Nor => "NOR",
            StandardGate::Not => "NOT",
            StandardGate::And => "AND",
            StandardGate::Or => "OR",
            StandardGate::Xor => "XOR",
            StandardGate::Toffoli => "TOFFOLI",
        }
    }

    pub fn table(self) -> TruthTable {
        let two = |f: fn(u32, u32) -> u32| TruthTable::from_fn(2, 1, move |i| f(i >> 1, i & 1));
        match self {
            StandardGate::Nand => two(|a, b| 1 ^ (a & b)),
            StandardGate::Nor => two(|a, b| 1 ^ (a | b)),
            StandardGate::Not => TruthTable::from_fn(1, 1, |i| 1 ^ i),
            StandardGate::And => two(|a, b| a & b),
            StandardGate::Or => two(|a, b| a | b),
            StandardGate::Xor => two(|a, b| a ^ b),
            StandardGate::Toffoli => TruthTable::from_fn(3, 3, |i| i ^ ((i >> 2) & (i >> 1) & 1)),
        }
        .expect("library tables are well formed")
    }
}

impl FromStr for StandardGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.to_ascii_uppercase();
        if upper == "CCNOT" {
            return Ok(StandardGate::Toffoli);
        }
        StandardGate::ALL
            .into_iter()
            .find(|g| g.name() == upper)
            .ok_or_else(|| Error::validation(format!("unknown gate `{s}`")))
    }
}

/// All inputs of a table that produce one output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreimageSet {
    pub output: Vec<u8>,
    /// Input tuples in ascending row order.
    pub inputs: Vec<Vec<u8>>,
}

pub fn preimages(table: &TruthTable, output: &[u8]) -> Result<PreimageSet> {
    if output.len() != table.width as usize {
        return Err(Error::validation(format!(
            "output tuple has {} bits, table width is {}",
            output.len(),
            table.width
        )));
    }
    let target = from_bits(output)?;
    let inputs =
        (0..table.rows.len() as u32).filter(|&i| table.output(i) == target).map(|i| to_bits(i, table.arity)).collect();
    Ok(PreimageSet { output: output.to_vec(), inputs })
}

/// Probability model over a gate's inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EntropyModel {
    /// Every achievable output is equally likely; the inputs behind an output
    /// share its probability equally. NAND gives 1.7925 bits.
    #[default]
    OutputUniform,
    /// Every input tuple is equally likely.
    UniformInput,
}

impl FromStr for EntropyModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "output-uniform" => Ok(EntropyModel::OutputUniform),
            "uniform-input" => Ok(EntropyModel::UniformInput),
            other => {
                Err(Error::validation(format!("unknown model `{other}` (expected output-uniform or uniform-input)")))
            }
        }
    }
}

/// Probability of each joint (input, output) event, in row order.
fn joint_probs(table: &TruthTable, model: EntropyModel) -> Vec<f64> {
    let counts = table.preimage_counts();
    let m = counts.len() as f64;
    let n = table.rows.len() as f64;
    table
        .rows
        .iter()
        .map(|r| match model {
            EntropyModel::OutputUniform => 1.0 / m / counts[r] as f64,
            EntropyModel::UniformInput => 1.0 / n,
        })
        .collect()
}

fn output_probs(table: &TruthTable, model: EntropyModel) -> Vec<f64> {
    let counts = table.preimage_counts();
    let m = counts.len() as f64;
    let n = table.rows.len() as f64;
    counts
        .values()
        .map(|&c| match model {
            EntropyModel::OutputUniform => 1.0 / m,
            EntropyModel::UniformInput => c as f64 / n,
        })
        .collect()
}

/// SMI over the joint (input, output) events of `table` under `model`.
pub fn joint_entropy(table: &TruthTable, model: EntropyModel) -> Bits {
    Bits::from_computed(smi_of(&joint_probs(table, model)))
}

/// SMI of the output alone under `model`.
pub fn output_entropy(table: &TruthTable, model: EntropyModel) -> Bits {
    Bits::from_computed(smi_of(&output_probs(table, model)))
}

/// Joint entropy under the output-uniform model.
pub fn output_uniform_joint_entropy(table: &TruthTable) -> Bits {
    joint_entropy(table, EntropyModel::OutputUniform)
}

/// Uncertainty about the input that remains once the output is known.
pub fn equivocation_with(table: &TruthTable, model: EntropyModel) -> Bits {
    Bits::from_computed(joint_entropy(table, model).value() - output_entropy(table, model).value())
}

/// [`equivocation_with`] under the output-uniform model.
pub fn equivocation(table: &TruthTable) -> Bits {
    equivocation_with(table, EntropyModel::OutputUniform)
}

/// True iff no two inputs share an output.
pub fn is_reversible(table: &TruthTable) -> bool {
    table.preimage_counts().values().all(|&c| c == 1)
}

/// A wire carries one bit: a primary input or one output bit of a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wire {
    Input(usize),
    Gate { gate: usize, bit: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateInstance {
    pub label: String,
    pub table: TruthTable,
    /// One wire per table input, most significant first.
    pub inputs: Vec<Wire>,
}

/// A DAG of gates with ordered primary inputs and outputs.
///
/// Every wire must be consumed by a gate, listed as a primary output, or
/// declared discarded. Discarded wires are erased bits.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_inputs: usize,
    gates: Vec<GateInstance>,
    outputs: Vec<Wire>,
    discarded: Vec<Wire>,
    order: Vec<usize>,
}

impl Circuit {
    pub fn new(n_inputs: usize, gates: Vec<GateInstance>, outputs: Vec<Wire>, discarded: Vec<Wire>) -> Result<Self> {
        let check = |w: &Wire| -> Result<()> {
            let ok = match *w {
                Wire::Input(i) => i < n_inputs,
                Wire::Gate { gate, bit } => gate < gates.len() && bit < gates[gate].table.width() as usize,
            };
            if ok {
                Ok(())
            } else {
                Err(Error::validation(format!("wire {w:?} does not exist")))
            }
        };
        let mut uses: BTreeMap<Wire, usize> = BTreeMap::new();
        for (g, inst) in gates.iter().enumerate() {
            if inst.inputs.len() != inst.table.arity() as usize {
                return Err(Error::validation(format!(
                    "gate {g} ({}) has {} input wires for arity {}",
                    inst.label,
                    inst.inputs.len(),
                    inst.table.arity()
                )));
            }
            for w in &inst.inputs {
                check(w)?;
                *uses.entry(*w).or_insert(0) += 1;
            }
        }
        for w in &outputs {
            check(w)?;
            *uses.entry(*w).or_insert(0) += 1;
        }
        for w in &discarded {
            check(w)?;
            if uses.contains_key(w) {
                return Err(Error::validation(format!("discarded wire {w:?} is also used")));
            }
            *uses.entry(*w).or_insert(0) += 1;
        }
        let all_wires = (0..n_inputs).map(Wire::Input).chain(
            gates
                .iter()
                .enumerate()
                .flat_map(|(g, inst)| (0..inst.table.width() as usize).map(move |bit| Wire::Gate { gate: g, bit })),
        );
        for w in all_wires {
            if !uses.contains_key(&w) {
                return Err(Error::validation(format!("wire {w:?} dangles; consume it or declare it discarded")));
            }
        }
        let order = topological_order(&gates)?;
        Ok(Circuit { n_inputs, gates, outputs, discarded, order })
    }

    pub fn builder(n_inputs: usize) -> CircuitBuilder {
        CircuitBuilder { n_inputs, gates: Vec::new(), outputs: Vec::new(), discarded: Vec::new() }
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn gates(&self) -> &[GateInstance] {
        &self.gates
    }

    pub fn outputs(&self) -> &[Wire] {
        &self.outputs
    }

    pub fn discarded(&self) -> &[Wire] {
        &self.discarded
    }

    /// Evaluates on input bits given most significant first.
    pub fn evaluate(&self, inputs: &[u8]) -> Result<Vec<u8>> {
        if inputs.len() != self.n_inputs {
            return Err(Error::validation(format!("circuit takes {} inputs, got {}", self.n_inputs, inputs.len())));
        }
        from_bits(inputs)?;
        let mut values: Vec<Vec<u8>> = vec![Vec::new(); self.gates.len()];
        let read = |values: &Vec<Vec<u8>>, w: &Wire| match *w {
            Wire::Input(i) => inputs[i],
            Wire::Gate { gate, bit } => values[gate][bit],
        };
        for &g in &self.order {
            let inst = &self.gates[g];
            let bits: Vec<u8> = inst.inputs.iter().map(|w| read(&values, w)).collect();
            let out = inst.table.output(from_bits(&bits)?);
            values[g] = to_bits(out, inst.table.width());
        }
        Ok(self.outputs.iter().map(|w| read(&values, w)).collect())
    }

    /// The function computed by the circuit, by exhaustive evaluation.
    pub fn truth_table(&self) -> Result<TruthTable> {
        if self.n_inputs == 0 || self.n_inputs > MAX_ARITY as usize {
            return Err(Error::capacity(format!(
                "circuit has {} inputs; tables support 1..={MAX_ARITY}",
                self.n_inputs
            )));
        }
        let arity = self.n_inputs as u8;
        let width = u8::try_from(self.outputs.len()).map_err(|_| Error::capacity("too many circuit outputs"))?;
        let rows = (0..1u32 << arity)
            .map(|i| self.evaluate(&to_bits(i, arity)).and_then(|o| from_bits(&o)))
            .collect::<Result<Vec<_>>>()?;
        TruthTable::new(arity, width, rows)
    }

    pub fn loss_report(&self) -> LossReport {
        circuit_loss_report(self)
    }
}

fn topological_order(gates: &[GateInstance]) -> Result<Vec<usize>> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut mark = vec![0u8; gates.len()];
    let mut order = Vec::with_capacity(gates.len());
    for root in 0..gates.len() {
        if mark[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        mark[root] = 1;
        while let Some(&mut (g, ref mut next)) = stack.last_mut() {
            let inputs = &gates[g].inputs;
            if *next < inputs.len() {
                let w = inputs[*next];
                *next += 1;
                if let Wire::Gate { gate: dep, .. } = w {
                    match mark[dep] {
                        0 => {
                            mark[dep] = 1;
                            stack.push((dep, 0));
                        }
                        1 => return Err(Error::validation(format!("circuit has a cycle through gate {dep}"))),
                        _ => {}
                    }
                }
            } else {
                mark[g] = 2;
                order.push(g);
                stack.pop();
            }
        }
    }
    Ok(order)
}

pub struct CircuitBuilder {
    n_inputs: usize,
    gates: Vec<GateInstance>,
    outputs: Vec<Wire>,
    discarded: Vec<Wire>,
}

impl CircuitBuilder {
    /// Adds a gate and returns its index.
    pub fn gate(&mut self, label: &str, table: TruthTable, inputs: Vec<Wire>) -> usize {
        self.gates.push(GateInstance { label: label.to_string(), table, inputs });
        self.gates.len() - 1
    }

    pub fn output(&mut self, w: Wire) -> &mut Self {
        self.outputs.push(w);
        self
    }

    pub fn discard(&mut self, w: Wire) -> &mut Self {
        self.discarded.push(w);
        self
    }

    pub fn build(self) -> Result<Circuit> {
        Circuit::new(self.n_inputs, self.gates, self.outputs, self.discarded)
    }
}

/// Functions with a fixed NAND-only construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NandTarget {
    Not,
    And,
    Or,
    Xor,
}

impl NandTarget {
    pub const ALL: [NandTarget; 4] = [NandTarget::Not, NandTarget::And, NandTarget::Or, NandTarget::Xor];

    pub fn gate(self) -> StandardGate {
        match self {
            NandTarget::Not => StandardGate::Not,
            NandTarget::And => StandardGate::And,
            NandTarget::Or => StandardGate::Or,
            NandTarget::Xor => StandardGate::Xor,
        }
    }
}

impl FromStr for NandTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let g: StandardGate = s.parse()?;
        NandTarget::ALL
            .into_iter()
            .find(|t| t.gate() == g)
            .ok_or_else(|| Error::validation(format!("no NAND construction for `{s}`")))
    }
}

/// Builds `target` from NAND gates only (NOT: 1 gate, AND: 2, OR: 3, XOR: 4).
pub fn synthesize_from_nand(target: NandTarget) -> Circuit {
    let nand = || StandardGate::Nand.table();
    let out = |g: usize| Wire::Gate { gate: g, bit: 0 };
    let (a, b) = (Wire::Input(0), Wire::Input(1));
    let mut c = Circuit::builder(if target == NandTarget::Not { 1 } else { 2 });
    let last = match target {
        NandTarget::Not => c.gate("nand", nand(), vec![a, a]),
        NandTarget::And => {
            let g0 = c.gate("nand", nand(), vec![a, b]);
            c.gate("nand", nand(), vec![out(g0), out(g0)])
        }
        NandTarget::Or => {
            let na = c.gate("nand", nand(), vec![a, a]);
            let nb = c.gate("nand", nand(), vec![b, b]);
            c.gate("nand", nand(), vec![out(na), out(nb)])
        }
        NandTarget::Xor => {
            let g0 = c.gate("nand", nand(), vec![a, b]);
            let g1 = c.gate("nand", nand(), vec![a, out(g0)]);
            let g2 = c.gate("nand", nand(), vec![b, out(g0)]);
            c.gate("nand", nand(), vec![out(g1), out(g2)])
        }
    };
    c.output(out(last));
    c.build().expect("NAND constructions are well formed")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport {
    /// Primary inputs minus primary outputs, floored at zero.
    pub lost_bits: Bits,
    /// Sum of per-gate equivocation over every gate instance.
    pub accumulated_equivocation: Bits,
    /// Wires explicitly thrown away.
    pub discarded_wires: usize,
}

pub fn circuit_loss_report(circuit: &Circuit) -> LossReport {
    let lost = circuit.n_inputs.saturating_sub(circuit.outputs.len());
    let accumulated = circuit.gates.iter().fold(Bits::ZERO, |acc, g| acc + equivocation(&g.table));
    LossReport {
        lost_bits: Bits::from_computed(lost as f64),
        accumulated_equivocation: accumulated,
        discarded_wires: circuit.discarded.len(),
    }
}
