//! The `infoloss` command line.
//!
//! [`dispatch`] parses arguments and returns the exit code with captured
//! stdout/stderr, so the binary is a thin wrapper and tests can drive every
//! subcommand in-process. Numbers on stdout are rounded to four decimals;
//! files written with `--out` keep full precision.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::arith::{
    enumerate_preimages, half_bit_uncertainty, preimage_entropy, reconstruct_operand, ArithOp, OpKind, Reconstruction,
};
use crate::census::{census_summary, run_census_with, CensusOptions, CensusTable, MachineEnumeration};
use crate::gate::{
    equivocation_with, joint_entropy, output_entropy, preimages, synthesize_from_nand, EntropyModel, NandTarget,
    StandardGate, TruthTable,
};
use crate::ledger::{erasure_entropy, landauer_energy};
use crate::machine::{retrace, run, run_with_history, Configuration, MachineSpec, Verdict};
use crate::oracle::{build_halting_oracle, run_with_oracle, OracleMachineSpec, OracleSpec};
use crate::smi::{average_questions, build_question_tree, plogp_curve, smi, Bits, ProbabilityDistribution, Strategy};
use crate::{Error, Result};

/// Default temperature for energy figures, in kelvin.
pub const DEFAULT_TEMPERATURE: f64 = 300.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "infoloss", version, about = "Measure information loss in computation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Shannon measure of information of a distribution
    Smi {
        /// Comma-separated probabilities, e.g. 0.5,0.25,0.25
        #[arg(long)]
        dist: String,
        /// Rescale the values so they sum to one
        #[arg(long)]
        normalize: bool,
    },
    /// Binary-question game: build a question tree and report its depths
    Game {
        #[arg(long)]
        dist: String,
        /// bisect-mass or optimal
        #[arg(long, default_value = "bisect-mass")]
        strategy: String,
        #[arg(long)]
        normalize: bool,
    },
    /// Table of p, -log2 p and -p log2 p
    Curves {
        #[arg(long, default_value_t = 99)]
        points: usize,
        /// Write CSV here instead of printing
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truth-table analysis of a library gate or a table file
    Gate {
        #[command(subcommand)]
        command: GateCommand,
    },
    /// Build NOT, AND, OR or XOR from NAND gates
    Synth {
        target: String,
        /// Write the circuit's truth table here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entropy of erasing a cell with a number of equally likely prior states
    Erase {
        #[arg(long)]
        states: u64,
        /// Also print the Landauer energy at this temperature (K)
        #[arg(long)]
        temperature: Option<f64>,
    },
    /// Minimum energy to irreversibly lose a number of bits
    Landauer {
        #[arg(long)]
        bits: f64,
        #[arg(long, default_value_t = DEFAULT_TEMPERATURE)]
        temperature: f64,
    },
    /// Arithmetic preimages of a value
    Preimage {
        #[arg(long)]
        value: u64,
        /// Operand width in bits
        #[arg(long)]
        width: u32,
        /// Comma-separated subset of add,sub,mul
        #[arg(long, default_value = "add,sub,mul")]
        ops: String,
        /// Reconstruct the other operand given this one
        #[arg(long)]
        known: Option<u64>,
        /// Write the record as JSON here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turing machine simulation
    Sim {
        #[command(subcommand)]
        command: SimCommand,
    },
    /// Bounded halting census over a machine class
    Census {
        #[arg(long, default_value_t = 2)]
        states: u32,
        #[arg(long, default_value_t = 2)]
        symbols: u32,
        #[arg(long, default_value_t = 100)]
        bound: u64,
        /// Worker threads (default: all cores)
        #[arg(long)]
        jobs: Option<usize>,
        /// Initial tape for every machine (blank by default)
        #[arg(long, default_value = "")]
        input: String,
        /// Write the census CSV here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Census-backed halting oracles
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Subcommand, Debug)]
enum GateCommand {
    /// Joint (input, output) entropy
    Entropy {
        /// Library gate name (NAND, NOR, NOT, AND, OR, XOR, TOFFOLI) or table file
        gate: String,
        /// output-uniform or uniform-input
        #[arg(long, default_value = "output-uniform")]
        model: String,
    },
    /// Input uncertainty remaining after the output is known
    Equivocation {
        gate: String,
        #[arg(long, default_value = "output-uniform")]
        model: String,
    },
    /// Inputs that produce a given output
    Preimages {
        gate: String,
        /// Output bits, most significant first, e.g. 1
        #[arg(long)]
        output: String,
    },
    /// Whether the gate is injective
    Reversible { gate: String },
    /// Print the truth table in interchange format
    Table {
        gate: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum SimCommand {
    /// Run a machine spec file
    Run {
        spec: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 10_000)]
        max_steps: u64,
        /// Write the ledger CSV here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Landauer temperature for the energy line (K)
        #[arg(long, default_value_t = DEFAULT_TEMPERATURE)]
        temperature: f64,
    },
    /// Run with a history log, then retrace back to the start
    Reverse {
        spec: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 10_000)]
        max_steps: u64,
        /// Write the history log as JSON here
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Build an oracle from a census file or a fresh census
    Build {
        #[arg(long)]
        census: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        states: u32,
        #[arg(long, default_value_t = 2)]
        symbols: u32,
        #[arg(long, default_value_t = 100)]
        bound: u64,
        /// Ask one query (decimal or 0b-binary) after building
        #[arg(long)]
        query: Option<String>,
        /// Write the census CSV backing the oracle here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an oracle machine spec file
    Run {
        spec: PathBuf,
        #[arg(long)]
        census: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        states: u32,
        #[arg(long, default_value_t = 2)]
        symbols: u32,
        #[arg(long, default_value_t = 100)]
        bound: u64,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 10_000)]
        max_steps: u64,
        /// Write the ledger CSV here
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn dispatch<I, T>(args: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CommandOutcome { exit_code: 2, stdout: String::new(), stderr: text }
            } else {
                CommandOutcome { exit_code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    let mut out = String::new();
    match execute(cli.command, &mut out) {
        Ok(()) => CommandOutcome { exit_code: 0, stdout: out, stderr: String::new() },
        Err(e) => CommandOutcome { exit_code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn execute(cmd: Command, out: &mut String) -> Result<()> {
    match cmd {
        Command::Smi { dist, normalize } => {
            let d = parse_dist(&dist, normalize)?;
            line(out, format!("{:.4}", smi(&d)));
        }
        Command::Game { dist, strategy, normalize } => {
            let d = parse_dist(&dist, normalize)?;
            let tree = build_question_tree(&d, strategy.parse::<Strategy>()?);
            line(out, "event\tp\tdepth".into());
            for (event, depth) in tree.leaf_depths() {
                line(out, format!("{event}\t{:.4}\t{depth}", d.probs()[event]));
            }
            line(out, format!("average questions\t{:.4}", average_questions(&tree, &d)?));
            line(out, format!("smi\t{:.4}", smi(&d)));
        }
        Command::Curves { points, out: file } => {
            let curve = plogp_curve(points)?;
            match file {
                Some(path) => {
                    let mut csv = String::from("p,neg_log2_p,neg_p_log2_p\n");
                    for c in &curve {
                        let _ = writeln!(csv, "{},{},{}", c.p, c.neg_log2_p, c.neg_p_log2_p);
                    }
                    write_file(&path, &csv, out)?;
                }
                None => {
                    line(out, "p\t-log2 p\t-p log2 p".into());
                    for c in &curve {
                        line(out, format!("{:.4}\t{:.4}\t{:.4}", c.p, c.neg_log2_p, c.neg_p_log2_p));
                    }
                }
            }
        }
        Command::Gate { command } => gate(command, out)?,
        Command::Synth { target, out: file } => {
            let target: NandTarget = target.parse()?;
            let c = synthesize_from_nand(target);
            let table = c.truth_table()?;
            line(out, format!("{} from {} NAND gate(s)", target.gate().name(), c.gates().len()));
            for (i, g) in c.gates().iter().enumerate() {
                line(out, format!("g{i} = {}({})", g.label, wires(&g.inputs)));
            }
            line(out, format!("outputs: {}", wires(c.outputs())));
            line(out, format!("matches {}: {}", target.gate().name(), table == target.gate().table()));
            let report = c.loss_report();
            line(out, format!("lost bits\t{:.4}", report.lost_bits));
            line(out, format!("accumulated equivocation\t{:.4}", report.accumulated_equivocation));
            if let Some(path) = file {
                write_file(&path, &table.to_text(), out)?;
            } else {
                out.push_str(&table.to_text());
            }
        }
        Command::Erase { states, temperature } => {
            let bits = erasure_entropy(states)?;
            line(out, format!("{bits:.4}"));
            if let Some(t) = temperature {
                line(out, format!("energy at {t} K\t{:.4e} J", landauer_energy(bits, t)?));
            }
        }
        Command::Landauer { bits, temperature } => {
            let j = landauer_energy(Bits::new(bits)?, temperature)?;
            line(out, format!("{j:.4e}"));
        }
        Command::Preimage { value, width, ops, known, out: file } => {
            let kinds = ops.split(',').map(str::parse).collect::<Result<Vec<OpKind>>>()?;
            let record = enumerate_preimages(value, width, &kinds)?;
            match &file {
                Some(path) => write_file(path, &(record.to_json() + "\n"), out)?,
                None => {
                    for c in &record.candidates {
                        line(out, format!("{}\t{}\t{}", c.op, c.operands[0], c.operands[1]));
                    }
                }
            }
            line(out, format!("count\t{}", record.count));
            match preimage_entropy(&record) {
                Ok(h) => line(out, format!("entropy bits\t{h:.4}")),
                Err(_) => line(out, "entropy bits\tundefined (no preimages)".into()),
            }
            line(out, format!("half-bit input figure ({} bits)\t{:.4}", 2 * width, half_bit_uncertainty(2 * width)?));
            if let Some(k) = known {
                for &kind in &record.ops {
                    let op = ArithOp::natural(kind, width)?;
                    let r = reconstruct_operand(value, k, op)?;
                    line(out, format!("reconstruct {kind} with {k}\t{}", describe(r)));
                }
            }
        }
        Command::Sim { command } => sim(command, out)?,
        Command::Census { states, symbols, bound, jobs, input, out: file } => {
            let template = MachineEnumeration::new(states, symbols)?.spec_at(0)?;
            let opts = CensusOptions { jobs, input: template.parse_input(&input)? };
            let table = run_census_with(states, symbols, bound, &opts)?;
            if let Some(path) = file {
                write_file(&path, &table.to_csv(), out)?;
            }
            summary(&table, out);
        }
        Command::Oracle { command } => oracle(command, out)?,
    }
    Ok(())
}

fn gate(cmd: GateCommand, out: &mut String) -> Result<()> {
    match cmd {
        GateCommand::Entropy { gate, model } => {
            let (t, m) = (load_table(&gate)?, model.parse::<EntropyModel>()?);
            line(out, format!("{:.4}", joint_entropy(&t, m)));
        }
        GateCommand::Equivocation { gate, model } => {
            let (t, m) = (load_table(&gate)?, model.parse::<EntropyModel>()?);
            line(out, format!("{:.4}", equivocation_with(&t, m)));
            line(out, format!("joint\t{:.4}", joint_entropy(&t, m)));
            line(out, format!("output\t{:.4}", output_entropy(&t, m)));
        }
        GateCommand::Preimages { gate, output } => {
            let t = load_table(&gate)?;
            let bits = output
                .trim()
                .chars()
                .map(|c| {
                    c.to_digit(2).map(|d| d as u8).ok_or_else(|| Error::validation(format!("bad output bit `{c}`")))
                })
                .collect::<Result<Vec<u8>>>()?;
            let set = preimages(&t, &bits)?;
            for input in &set.inputs {
                line(out, input.iter().map(|b| b.to_string()).collect());
            }
            line(out, format!("count\t{}", set.inputs.len()));
        }
        GateCommand::Reversible { gate } => {
            line(out, crate::gate::is_reversible(&load_table(&gate)?).to_string());
        }
        GateCommand::Table { gate, out: file } => {
            let text = load_table(&gate)?.to_text();
            match file {
                Some(path) => write_file(&path, &text, out)?,
                None => out.push_str(&text),
            }
        }
    }
    Ok(())
}

fn sim(cmd: SimCommand, out: &mut String) -> Result<()> {
    match cmd {
        SimCommand::Run { spec, input, max_steps, out: file, temperature } => {
            let spec = MachineSpec::parse(&read(&spec)?)?;
            let input = spec.parse_input(&input)?;
            let r = run(&spec, &input, max_steps)?;
            verdict_lines(&r.verdict, out);
            line(out, format!("tape\t{}", r.output_tape(&spec)));
            line(out, format!("erasures\t{}", r.ledger.events().len()));
            line(out, format!("lost bits\t{:.4}", r.ledger.lost_total()));
            line(
                out,
                format!("landauer at {temperature} K\t{:.4e} J", landauer_energy(r.ledger.lost_total(), temperature)?),
            );
            if let Some(path) = file {
                write_file(&path, &r.ledger.to_csv(), out)?;
            }
        }
        SimCommand::Reverse { spec, input, max_steps, out: file } => {
            let spec = MachineSpec::parse(&read(&spec)?)?;
            let input = spec.parse_input(&input)?;
            let (r, history) = run_with_history(&spec, &input, max_steps)?;
            verdict_lines(&r.verdict, out);
            line(out, format!("final\t{}", r.final_config.snapshot(&spec)));
            line(out, format!("history records\t{}", history.len()));
            line(out, format!("lost bits\t{:.4}", r.ledger.lost_total()));
            let restored = retrace(&r.final_config, &history)?;
            line(out, format!("retraced\t{}", restored.snapshot(&spec)));
            let initial = Configuration::initial(&spec, &input)?;
            line(out, format!("matches initial\t{}", restored == initial));
            if let Some(path) = file {
                let json = serde_json::to_string_pretty(&history).expect("history serializes");
                write_file(&path, &(json + "\n"), out)?;
            }
        }
    }
    Ok(())
}

fn oracle(cmd: OracleCommand, out: &mut String) -> Result<()> {
    match cmd {
        OracleCommand::Build { census, states, symbols, bound, query, out: file } => {
            let table = load_census(census.as_deref(), states, symbols, bound)?;
            let o = build_halting_oracle(&table);
            describe_oracle(&o, out);
            if let Some(q) = query {
                line(out, format!("answer\t{}", o.ask_str(&q)?));
            }
            if let Some(path) = file {
                write_file(&path, &table.to_csv(), out)?;
            }
        }
        OracleCommand::Run { spec, census, states, symbols, bound, input, max_steps, out: file } => {
            let spec = OracleMachineSpec::parse(&read(&spec)?)?;
            let o = build_halting_oracle(&load_census(census.as_deref(), states, symbols, bound)?);
            let input = spec.machine().parse_input(&input)?;
            let r = run_with_oracle(&spec, &input, &o, max_steps)?;
            verdict_lines(&r.verdict, out);
            line(out, format!("tape\t{}", r.output_tape(spec.machine())));
            line(out, format!("lost bits\t{:.4}", r.ledger.lost_total()));
            line(out, format!("external bits\t{:.4}", r.ledger.external_total()));
            if let Some(path) = file {
                write_file(&path, &r.ledger.to_csv(), out)?;
            }
        }
    }
    Ok(())
}

fn load_census(file: Option<&Path>, states: u32, symbols: u32, bound: u64) -> Result<CensusTable> {
    match file {
        Some(path) => CensusTable::read_csv(fs::File::open(path)?),
        None => run_census_with(states, symbols, bound, &CensusOptions::default()),
    }
}

fn describe_oracle(o: &OracleSpec, out: &mut String) {
    use crate::oracle::Answer;
    line(out, format!("provenance\t{}", o.provenance()));
    line(out, format!("entries\t{}", o.len()));
    for a in [Answer::Yes, Answer::No, Answer::Unknown] {
        line(out, format!("{a}\t{}", o.count(a)));
    }
}

fn summary(table: &CensusTable, out: &mut String) {
    let s = census_summary(table);
    line(out, format!("machines\t{}", s.total));
    line(out, format!("halted\t{}", s.halted));
    line(out, format!("freeze\t{}", s.freeze));
    line(out, format!("loop_proven\t{}", s.loop_proven));
    line(out, format!("halt_unreachable\t{}", s.halt_unreachable));
    line(out, format!("step_limit\t{}", s.step_limit));
    line(out, format!("unknown fraction\t{:.4}", s.unknown_fraction));
    if let Some(m) = s.max_halting_steps {
        line(out, format!("max halting steps\t{m}"));
    }
}

fn verdict_lines(v: &Verdict, out: &mut String) {
    line(out, format!("verdict\t{}", v.label()));
    match *v {
        Verdict::Halted { steps, .. } => line(out, format!("steps\t{steps}")),
        Verdict::LoopProven { entry_step, cycle_len, shift } => {
            line(out, format!("entry step\t{entry_step}"));
            line(out, format!("cycle length\t{cycle_len}"));
            line(out, format!("shift\t{shift}"));
        }
        Verdict::StepLimit { bound } | Verdict::HaltUnreachable { bound } => line(out, format!("bound\t{bound}")),
        Verdict::OracleUndefined { step, query } => {
            line(out, format!("step\t{step}"));
            line(out, format!("query\t{query}"));
        }
    }
}

fn describe(r: Reconstruction) -> String {
    match r {
        Reconstruction::NoSolution => "no solution".into(),
        Reconstruction::Operand(x) => x.to_string(),
        Reconstruction::AnyOperand => "any operand".into(),
        Reconstruction::Orientations { known_left, known_right } => {
            let f = |o: Option<u64>| o.map_or("none".to_string(), |x| x.to_string());
            format!("known-x = {}; x-known = {}", f(known_left), f(known_right))
        }
    }
}

fn wires(ws: &[crate::gate::Wire]) -> String {
    use crate::gate::Wire;
    ws.iter()
        .map(|w| match *w {
            Wire::Input(i) => format!("x{i}"),
            Wire::Gate { gate, bit: 0 } => format!("g{gate}"),
            Wire::Gate { gate, bit } => format!("g{gate}.{bit}"),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn parse_dist(text: &str, normalize: bool) -> Result<ProbabilityDistribution> {
    let values = text
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| Error::validation(format!("bad probability `{v}`"))))
        .collect::<Result<Vec<_>>>()?;
    if normalize {
        ProbabilityDistribution::normalized(values)
    } else {
        ProbabilityDistribution::new(values)
    }
}

/// A library gate name, or a path to a table in interchange format.
fn load_table(gate: &str) -> Result<TruthTable> {
    match gate.parse::<StandardGate>() {
        Ok(g) => Ok(g.table()),
        Err(e) => {
            let path = Path::new(gate);
            if path.exists() {
                TruthTable::parse(&read(path)?)
            } else {
                Err(e)
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write_file(path: &Path, contents: &str, out: &mut String) -> Result<()> {
    fs::write(path, contents)?;
    line(out, format!("wrote {}", path.display()));
    Ok(())
}

fn line(out: &mut String, s: String) {
    out.push_str(&s);
    out.push('\n');
}
