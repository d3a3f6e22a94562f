//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{class_size, naive_run, Naive, Outcome};
use infoloss::arith::{enumerate_preimages, half_bit_uncertainty, OpKind};
use infoloss::census::{census_summary, run_census_with, CensusOptions, CensusTable, MachineEnumeration, RowVerdict};
use infoloss::gate::{
    equivocation, equivocation_with, is_reversible, joint_entropy, synthesize_from_nand, EntropyModel, NandTarget,
    StandardGate, TruthTable,
};
use infoloss::ledger::{erasure_entropy, LossEvent, LossKind, LossLedger};
use infoloss::machine::{
    retrace, run, run_with_history, stop_reachable, Configuration, MachineSpec, SymbolId, Verdict,
};
use infoloss::oracle::{build_halting_oracle, run_with_oracle, Answer, OracleMachineSpec, OracleSpec};
use infoloss::smi::{
    average_questions, build_question_tree, curve_peak, plogp_curve, smi, ProbabilityDistribution, Strategy,
};
use infoloss::Bits;
use proptest::prelude::{prop, Just, Strategy as _};
use proptest::prop_oneof;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn census_2_2(jobs: Option<usize>) -> CensusTable {
    run_census_with(2, 2, 100, &CensusOptions { jobs, input: Vec::new() }).expect("(2,2) census")
}

fn nand_joint_entropy() -> Check {
    let h = joint_entropy(&StandardGate::Nand.table(), EntropyModel::OutputUniform).value();
    ensure(format!("{h:.4}") == "1.7925", format!("displayed {h:.4}"))?;
    ensure((h - 1.7924).abs() < 1e-3, format!("{h} vs reference 1.7924"))?;
    Ok(format!("{h:.6} bits (reference 1.7924, diff {:.1e})", (h - 1.7924).abs()))
}

fn erasure_entropies() -> Check {
    let two = erasure_entropy(2).map_err(|e| e.to_string())?.value();
    let three = erasure_entropy(3).map_err(|e| e.to_string())?.value();
    ensure(two == 1.0, format!("2 states: {two}"))?;
    ensure((three - 1.58496).abs() < 1e-5, format!("3 states: {three}"))?;
    ensure((three - 1.58).abs() < 5e-3, format!("3 states vs 1.58: {three}"))?;
    Ok(format!("2 states {two}, 3 states {three:.5}"))
}

fn locker_game() -> Check {
    let d = ProbabilityDistribution::uniform(8).map_err(|e| e.to_string())?;
    let tree = build_question_tree(&d, Strategy::BisectMass);
    let depths = tree.depths_by_event();
    ensure(depths.iter().all(|&x| x == 3), format!("depths {depths:?}"))?;
    let avg = average_questions(&tree, &d).map_err(|e| e.to_string())?.value();
    ensure(avg == 3.0, format!("average {avg}"))?;
    let h = smi(&d).value();
    ensure(h == 3.0, format!("smi {h}"))?;
    Ok(format!("8 leaves at depth 3, average {avg}, smi {h}"))
}

fn input_uncertainty() -> Check {
    let h = half_bit_uncertainty(6).map_err(|e| e.to_string())?.value();
    ensure(h == 3.0, format!("{h}"))?;
    Ok(format!("6 input bits -> {h} bits"))
}

fn curve_maximum() -> Check {
    let points = 999;
    let curve = plogp_curve(points).map_err(|e| e.to_string())?;
    let peak = curve_peak(&curve).ok_or("empty curve")?;
    let grid = 1.0 / (points as f64 + 1.0);
    ensure((peak.p - 0.3679).abs() <= grid, format!("argmax {}", peak.p))?;
    ensure((peak.neg_p_log2_p - 0.5307).abs() < 1e-3, format!("max {}", peak.neg_p_log2_p))?;
    ensure((peak.neg_p_log2_p - 0.53).abs() < 1e-2, format!("max vs 0.53: {}", peak.neg_p_log2_p))?;
    Ok(format!("max {:.5} at p = {:.4} (grid step {grid})", peak.neg_p_log2_p, peak.p))
}

fn arithmetic_preimages() -> Check {
    for (op, f, expected) in [
        (
            OpKind::Add,
            (|a, b| a + b) as fn(u64, u64) -> u64,
            vec![[1, 7], [2, 6], [3, 5], [4, 4], [5, 3], [6, 2], [7, 1]],
        ),
        (OpKind::Mul, |a, b| a * b, vec![[2, 4], [4, 2]]),
    ] {
        let oracle: Vec<[u64; 2]> =
            (0..8u64).flat_map(|a| (0..8u64).map(move |b| [a, b])).filter(|&[a, b]| f(a, b) == 8).collect();
        let rec = enumerate_preimages(8, 3, &[op]).map_err(|e| e.to_string())?;
        let got: Vec<[u64; 2]> = rec.candidates.iter().map(|c| c.operands).collect();
        ensure(got == oracle, format!("{op}: enumerator {got:?}, brute force {oracle:?}"))?;
        ensure(got == expected, format!("{op}: {got:?}"))?;
    }
    Ok("add: 7 pairs incl. (3,5); mul: (2,4), (4,2); brute force over 64 pairs agrees".into())
}

fn nand_synthesis() -> Check {
    for target in NandTarget::ALL {
        let c = synthesize_from_nand(target);
        let want = target.gate().table();
        let got = c.truth_table().map_err(|e| e.to_string())?;
        ensure(got == want, format!("{target:?} table differs"))?;
        for input in 0..(1u32 << c.n_inputs()) {
            let bits = infoloss::gate::to_bits(input, c.n_inputs() as u8);
            let out = c.evaluate(&bits).map_err(|e| e.to_string())?;
            ensure(
                infoloss::gate::from_bits(&out).ok() == Some(want.output(input)),
                format!("{target:?} row {input}"),
            )?;
        }
    }
    for gate in [StandardGate::Not, StandardGate::Toffoli] {
        let t = gate.table();
        ensure(is_reversible(&t), format!("{gate:?} not bijective"))?;
        for model in [EntropyModel::OutputUniform, EntropyModel::UniformInput] {
            let e = equivocation_with(&t, model).value();
            ensure(e == 0.0, format!("{gate:?} equivocation {e}"))?;
        }
    }
    Ok("NOT/AND/OR/XOR exhaustive equality; NOT and Toffoli equivocation 0".into())
}

fn reversibility_round_trip(census: &CensusTable) -> Check {
    let e = MachineEnumeration::new(2, 2).unwrap();
    let mut checked = 0;
    for row in census.rows.iter().filter(|r| matches!(r.verdict, RowVerdict::Halted | RowVerdict::Freeze)) {
        let spec = e.spec_at(row.index).map_err(|e| e.to_string())?;
        let (r, hist) = run_with_history(&spec, &[], 100).map_err(|e| e.to_string())?;
        let back = retrace(&r.final_config, &hist).map_err(|e| format!("machine {}: {e}", row.index))?;
        ensure(back == Configuration::initial(&spec, &[]).unwrap(), format!("machine {} did not retrace", row.index))?;
        checked += 1;
    }
    Ok(format!("{checked} halting machines retraced, 0 failures"))
}

fn census_criterion(serial: &CensusTable, parallel: &CensusTable) -> Check {
    let s = census_summary(serial);
    let closed_form = (1 + 2 * 3 * (2 + 1) as u64).pow(2 * 2);
    ensure(closed_form == class_size(2, 2), "closed forms disagree")?;
    ensure(s.total == closed_form, format!("{} machines, expected {closed_form}", s.total))?;
    ensure(s.step_limit == 0, format!("{} step_limit rows", s.step_limit))?;
    ensure(s.max_halting_steps == Some(6), format!("max halting steps {:?}", s.max_halting_steps))?;
    let (a, b) = (serial.to_csv(), parallel.to_csv());
    ensure(a == b, "serial and parallel CSV differ")?;
    Ok(format!(
        "{} machines: {} halted, {} freeze, {} loop_proven, {} halt_unreachable, 0 step_limit; max 6 steps; CSV identical ({} bytes)",
        s.total,
        s.halted,
        s.freeze,
        s.loop_proven,
        s.halt_unreachable,
        a.len()
    ))
}

/// Re-simulates a loop verdict with the reference simulator.
fn loop_holds(spec: &MachineSpec, entry: u64, len: u64, shift: i64) -> bool {
    let mut m = naive_run(spec, &[], entry);
    let (state, head, tape) = (m.state, m.head, m.non_blank());
    let ahead_blank = |m: &Naive| m.non_blank().keys().all(|&p| if shift > 0 { p <= m.head } else { p >= m.head });
    let cycles = if shift == 0 { 1 } else { 10 };
    for k in 1..=cycles {
        for _ in 0..len {
            if !m.step(spec) {
                return false;
            }
        }
        if m.state != state || m.head != head + k * shift {
            return false;
        }
        if (shift == 0 && m.non_blank() != tape) || (shift != 0 && !ahead_blank(&m)) {
            return false;
        }
    }
    true
}

fn oracle_criterion(census: &CensusTable) -> Check {
    let oracle = build_halting_oracle(census);
    let e = MachineEnumeration::new(2, 2).unwrap();
    let mut proven = 0;
    for row in &census.rows {
        let spec = e.spec_at(row.index).map_err(|e| e.to_string())?;
        let ok = match (oracle.ask(row.index), row.verdict) {
            (Answer::Yes, RowVerdict::Halted) => {
                let m = naive_run(&spec, &[], census.bound);
                m.outcome == Outcome::Halted && m.steps == row.steps
            }
            (Answer::No, RowVerdict::Freeze) => {
                let m = naive_run(&spec, &[], census.bound + 1);
                m.outcome == Outcome::Frozen && m.steps == row.steps
            }
            (Answer::No, RowVerdict::LoopProven) => {
                let r = run(&spec, &[], census.bound).map_err(|e| e.to_string())?;
                match r.verdict {
                    Verdict::LoopProven { entry_step, cycle_len, shift } => {
                        loop_holds(&spec, entry_step, cycle_len, shift)
                    }
                    _ => false,
                }
            }
            (Answer::No, RowVerdict::HaltUnreachable) => {
                !stop_reachable(&spec, spec.start())
                    && naive_run(&spec, &[], 20 * census.bound).outcome == Outcome::Running
            }
            (answer, verdict) => return Err(format!("row {}: {answer} for {verdict}", row.index)),
        };
        ensure(ok, format!("row {} ({}) fails re-simulation", row.index, row.verdict))?;
        proven += 1;
    }

    let empty = OracleSpec::new(Default::default(), "none");
    for row in &census.rows {
        let spec = e.spec_at(row.index).unwrap();
        let r =
            run_with_oracle(&OracleMachineSpec::closed(spec), &[], &empty, census.bound).map_err(|e| e.to_string())?;
        ensure(r.ledger.external_total().value() == 0.0, format!("closed run {} gained bits", row.index))?;
    }

    let asker = OracleMachineSpec::parse(
        r#"
states = ["S", "Y", "N", "H"]
alphabet = ["_", "0", "1", "x"]
blank = "_"
start = "S"
halt = ["H"]
rules = ["S,0,0,R,S", "S,1,1,R,S", "S,_,_,S,H", "Y,x,_,R,S", "N,x,_,R,S"]
ask = ["S,x,Y,N"]
query_len = 17
"#,
    )
    .map_err(|e| e.to_string())?;
    let champion = e.index_of(&infoloss::machine::busy_beaver_2()).map_err(|e| e.to_string())?;
    let bits: String = (0..17).rev().map(|i| if champion >> i & 1 == 1 { '1' } else { '0' }).collect();
    for asks in 0..=20usize {
        let mut input = asker.machine().parse_input(&bits).unwrap();
        input.extend(std::iter::repeat_n(SymbolId(3), asks));
        let r = run_with_oracle(&asker, &input, &oracle, 1000).map_err(|e| e.to_string())?;
        let external: Vec<f64> =
            r.ledger.events().iter().filter(|ev| !ev.kind.is_loss()).map(|ev| ev.bits.value()).collect();
        ensure(external.len() == asks && external.iter().all(|&b| b == 1.0), format!("{asks} asks gave {external:?}"))?;
        ensure(r.ledger.external_total().value() == asks as f64, format!("{asks} asks: total"))?;
    }
    Ok(format!(
        "{proven}/{} proven rows agree with re-simulation; {} closed runs at 0 external bits; 0..=20 asks add 1.0 bit each",
        census.rows.len(),
        census.rows.len()
    ))
}

fn run_prop<S: proptest::strategy::Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    TestRunner::new(Config { cases: 1000, failure_persistence: None, ..Config::default() })
        .run(&strategy, test)
        .map_err(|e| format!("{name}: {e}"))
}

fn property_suites() -> Check {
    let positive =
        prop::collection::vec(1e-6..1.0f64, 1..24).prop_map(|w| ProbabilityDistribution::normalized(w).unwrap());
    let with_zeros = prop::collection::vec(prop_oneof![Just(0.0), 0.0..1.0f64], 1..24)
        .prop_filter_map("all zero", |w| ProbabilityDistribution::normalized(w).ok());

    run_prop("smi bounds", with_zeros, |d| {
        let h = smi(&d).value();
        if h < 0.0 || h > (d.len() as f64).log2() + 1e-9 {
            return Err(TestCaseError::fail(format!("smi {h} for n = {}", d.len())));
        }
        Ok(())
    })?;
    run_prop("optimal tree bound", positive, |d| {
        let h = smi(&d).value();
        let avg = average_questions(&build_question_tree(&d, Strategy::Optimal), &d).unwrap().value();
        if avg < h - 1e-9 || avg >= h + 1.0 {
            return Err(TestCaseError::fail(format!("average {avg}, H {h}")));
        }
        Ok(())
    })?;

    for bits in 0..16u32 {
        let rows: Vec<u32> = (0..4).map(|i| (bits >> i) & 1).collect();
        let t = TruthTable::new(2, 1, rows).unwrap();
        let e = equivocation(&t).value();
        ensure(e >= 0.0 && (e == 0.0) == is_reversible(&t), format!("table {bits:04b}: {e}"))?;
    }
    let tables = (1u8..=4, 1u8..=3).prop_flat_map(|(a, w)| {
        prop::collection::vec(0..(1u32 << w), 1usize << a).prop_map(move |r| TruthTable::new(a, w, r).unwrap())
    });
    run_prop("equivocation", tables, |t| {
        let e = equivocation(&t).value();
        let mut outs = t.rows().to_vec();
        outs.sort_unstable();
        outs.dedup();
        if e < 0.0 || (e == 0.0) != (outs.len() == t.rows().len()) {
            return Err(TestCaseError::fail(format!("{t}: {e}")));
        }
        Ok(())
    })?;

    let events = prop::collection::vec((0..4usize, 1e-6..50.0f64, 0..3u64), 0..60);
    run_prop("ledger replay", events, |evs| {
        let kinds = [LossKind::Erasure, LossKind::Gate, LossKind::Arithmetic, LossKind::ExternalAnswer];
        let mut l = LossLedger::new();
        let mut step = 0;
        for (k, b, gap) in evs {
            step += gap;
            l.record(LossEvent::new(kinds[k], Bits::new(b).unwrap(), step, "e").unwrap()).unwrap();
        }
        if l.totals() != l.replay_totals() {
            return Err(TestCaseError::fail("replay differs"));
        }
        Ok(())
    })?;

    // 200 machines from (2,2), (2,3) and (3,2) drawn with a fixed seed
    let classes = [(2u32, 2u32), (2, 3), (3, 2)];
    let mut s: u64 = 0x2545_F491_4F6C_DD1D;
    let bounds = [0u64, 1, 3, 10, 30, 100, 300];
    for i in 0..200 {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        let (n, k) = classes[i % 3];
        let e = MachineEnumeration::new(n, k).unwrap();
        let spec = e.spec_at(s % e.total()).unwrap();
        let verdicts: Vec<Verdict> = bounds.iter().map(|&b| run(&spec, &[], b).unwrap().verdict).collect();
        for (j, lo) in verdicts.iter().enumerate() {
            for hi in &verdicts[j + 1..] {
                let fine = match lo {
                    Verdict::Halted { .. } | Verdict::LoopProven { .. } => lo == hi,
                    Verdict::HaltUnreachable { .. } => {
                        matches!(hi, Verdict::HaltUnreachable { .. } | Verdict::LoopProven { .. })
                    }
                    _ => true,
                };
                ensure(fine, format!("{}: {lo:?} then {hi:?}", spec.canonical_text()))?;
            }
        }
    }
    Ok("smi bounds, optimal-tree bound, equivocation (16 tables + 1000 random), ledger replay: 1000 cases each; monotonicity on 200 machines".into())
}

fn main() -> ExitCode {
    let start = Instant::now();
    let serial = census_2_2(Some(1));
    let parallel = census_2_2(None);
    let results: Vec<(&str, Check)> = vec![
        ("NAND joint entropy (output-uniform model)", nand_joint_entropy()),
        ("erasure entropies", erasure_entropies()),
        ("locker game, uniform over 8", locker_game()),
        ("input uncertainty of 6 bits", input_uncertainty()),
        ("-p log2 p maximum", curve_maximum()),
        ("arithmetic preimages of 8 at width 3", arithmetic_preimages()),
        ("NAND synthesis and reversible gates", nand_synthesis()),
        ("history retrace over the (2,2) census", reversibility_round_trip(&serial)),
        ("(2,2) census at bound 100", census_criterion(&serial, &parallel)),
        ("halting oracle", oracle_criterion(&serial)),
        ("property suites", property_suites()),
    ];
    let mut failed = 0;
    for (i, (name, result)) in results.iter().enumerate() {
        match result {
            Ok(detail) => println!("PASS {:>2}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2}. {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed in {:.1?}", results.len() - failed, results.len(), start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
