mod common;

use std::collections::{HashMap, HashSet};

use common::{naive_run, Naive, Outcome};
use infoloss::census::MachineEnumeration;
use infoloss::machine::{
    busy_beaver_2, is_reversible_spec, retrace, run, run_with_history, step, stop_reachable, Configuration, HaltReason,
    MachineSpec, StateId, StepResult, SymbolId, Verdict,
};
use proptest::prelude::*;

fn spec_from(index: u64, states: u32, symbols: u32) -> MachineSpec {
    MachineEnumeration::new(states, symbols).unwrap().spec_at(index).unwrap()
}

/// Class and index drawn uniformly from (1,2), (2,2), (2,3) and (3,2).
fn machine() -> impl Strategy<Value = (u32, u32, u64)> {
    prop_oneof![Just((1u32, 2u32)), Just((2, 2)), Just((2, 3)), Just((3, 2))].prop_flat_map(|(n, k)| {
        let total = MachineEnumeration::new(n, k).unwrap().total();
        (Just(n), Just(k), 0..total)
    })
}

fn inputs(symbols: u32) -> impl Strategy<Value = Vec<SymbolId>> {
    prop::collection::vec((0..symbols as u16).prop_map(SymbolId), 0..4)
}

/// Cross-checks one verdict against the reference simulator.
fn check_against_naive(spec: &MachineSpec, input: &[SymbolId], bound: u64) -> Result<(), TestCaseError> {
    let r = run(spec, input, bound).unwrap();
    prop_assert_eq!(&r, &run(spec, input, bound).unwrap(), "deterministic");
    let naive = naive_run(spec, input, bound);
    match r.verdict {
        Verdict::Halted { steps, reason } => {
            let expected = match reason {
                HaltReason::Designated => Outcome::Halted,
                HaltReason::Freeze => Outcome::Frozen,
            };
            prop_assert_eq!(naive.outcome, expected);
            prop_assert_eq!(naive.steps, steps);
            prop_assert!(naive.matches(&r.final_config));
        }
        Verdict::StepLimit { bound: b } => {
            prop_assert_eq!(b, bound);
            prop_assert_eq!(naive.outcome, Outcome::Running);
            prop_assert_eq!(r.steps, bound);
            prop_assert!(naive.matches(&r.final_config));
        }
        Verdict::LoopProven { entry_step, cycle_len, shift } => {
            prop_assert!(cycle_len > 0);
            prop_assert!(entry_step + cycle_len <= bound);
            check_loop(spec, input, entry_step, cycle_len, shift)?;
        }
        Verdict::HaltUnreachable { bound: b } => {
            prop_assert_eq!(b, bound);
            prop_assert!(!stop_reachable(spec, r.final_config.state));
            let far = naive_run(spec, input, 20 * bound + 1000);
            prop_assert_eq!(far.outcome, Outcome::Running);
        }
        Verdict::OracleUndefined { .. } => prop_assert!(false, "no oracle here"),
    }
    // every destructive write costs log2 |alphabet|, summed in order
    let per_write = (spec.alphabet().len() as f64).log2();
    let replay = naive_run(spec, input, r.steps);
    let expected = (0..replay.destructive_writes).fold(0.0, |acc, _| acc + per_write);
    prop_assert_eq!(r.ledger.lost_total().value(), expected);
    prop_assert_eq!(r.ledger.events().len() as u64, replay.destructive_writes);
    Ok(())
}

/// Re-simulates a reported loop. Exact loops must reproduce the entry
/// configuration; shifted loops must keep their state and period for ten
/// more cycles with blank tape ahead of the head.
fn check_loop(spec: &MachineSpec, input: &[SymbolId], entry: u64, len: u64, shift: i64) -> Result<(), TestCaseError> {
    let mut m = naive_run(spec, input, entry);
    prop_assert_eq!(m.steps, entry);
    let (state0, head0, tape0) = (m.state, m.head, m.non_blank());
    let ahead_blank = |m: &Naive| m.non_blank().keys().all(|&p| if shift > 0 { p <= m.head } else { p >= m.head });
    if shift != 0 {
        prop_assert!(ahead_blank(&m));
    }
    let cycles = if shift == 0 { 1 } else { 10 };
    for k in 1..=cycles {
        for _ in 0..len {
            prop_assert!(m.step(spec), "stopped inside a proven loop");
        }
        prop_assert_eq!(m.state, state0);
        prop_assert_eq!(m.head, head0 + k * shift);
        if shift == 0 {
            prop_assert_eq!(&m.non_blank(), &tape0);
        } else {
            prop_assert!(ahead_blank(&m));
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn runs_agree_with_reference((n, k, index) in machine(), input in inputs(2), bound in 0u64..120) {
        let spec = spec_from(index, n, k);
        check_against_naive(&spec, &input, bound)?;
    }

    #[test]
    fn history_retraces_to_start((n, k, index) in machine(), input in inputs(2), bound in 0u64..80) {
        let spec = spec_from(index, n, k);
        let (r, hist) = run_with_history(&spec, &input, bound).unwrap();
        prop_assert_eq!(r.verdict, run(&spec, &input, bound).unwrap().verdict);
        prop_assert_eq!(hist.len() as u64, r.steps);
        prop_assert_eq!(r.ledger.lost_total().value(), 0.0);
        let start = Configuration::initial(&spec, &input).unwrap();
        prop_assert_eq!(retrace(&r.final_config, &hist).unwrap(), start);
    }
}

/// Machines and bounds for the monotonicity check, drawn with a fixed seed.
fn sampled_machines(count: usize) -> Vec<MachineSpec> {
    let classes = [(2u32, 2u32), (2, 3), (3, 2)];
    let mut s: u64 = 0x9E37_79B9_7F4A_7C15;
    (0..count)
        .map(|i| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            let (n, k) = classes[i % classes.len()];
            let e = MachineEnumeration::new(n, k).unwrap();
            e.spec_at(s % e.total()).unwrap()
        })
        .collect()
}

#[test]
fn verdicts_are_monotone_in_the_bound() {
    let bounds = [0u64, 1, 5, 10, 25, 50, 100, 200, 400];
    let mut resolved = 0;
    for spec in sampled_machines(200) {
        let verdicts: Vec<Verdict> = bounds.iter().map(|&b| run(&spec, &[], b).unwrap().verdict).collect();
        for (i, lo) in verdicts.iter().enumerate() {
            for hi in &verdicts[i + 1..] {
                match lo {
                    Verdict::Halted { .. } | Verdict::LoopProven { .. } => {
                        assert_eq!(lo, hi, "{}", spec.canonical_text())
                    }
                    Verdict::HaltUnreachable { .. } => assert!(
                        matches!(hi, Verdict::HaltUnreachable { .. } | Verdict::LoopProven { .. }),
                        "{}",
                        spec.canonical_text()
                    ),
                    Verdict::StepLimit { .. } => {}
                    Verdict::OracleUndefined { .. } => unreachable!(),
                }
            }
        }
        assert!(matches!(verdicts[0], Verdict::StepLimit { bound: 0 } | Verdict::Halted { steps: 0, .. }));
        if verdicts[0] != *verdicts.last().unwrap() {
            resolved += 1;
        }
    }
    assert!(resolved > 0);
}

#[test]
fn busy_beaver_champion_reference() {
    let bb = busy_beaver_2();
    let r = run(&bb, &[], 100).unwrap();
    assert_eq!(r.verdict, Verdict::Halted { steps: 6, reason: HaltReason::Designated });
    assert_eq!(r.output_tape(&bb).cells, "1111");
    let naive = naive_run(&bb, &[], 100);
    assert_eq!(naive.steps, 6);
    assert!(naive.matches(&r.final_config));
    assert_eq!(r.ledger.lost_total().value(), naive.destructive_writes as f64);
}

#[test]
fn full_one_state_class_against_reference() {
    for spec in MachineEnumeration::new(1, 2).unwrap().iter() {
        for input in [vec![], vec![SymbolId(1)], vec![SymbolId(1), SymbolId(0), SymbolId(1)]] {
            check_against_naive(&spec, &input, 60).unwrap();
        }
    }
}

/// All configurations reachable within `depth` steps from every input of
/// length at most 3.
fn reachable(spec: &MachineSpec, depth: u64) -> HashSet<Configuration> {
    let k = spec.alphabet().len() as u16;
    let mut inputs: Vec<Vec<SymbolId>> = vec![vec![]];
    for len in 1..=3 {
        let mut layer: Vec<Vec<SymbolId>> = vec![vec![]];
        for _ in 0..len {
            layer =
                layer.into_iter().flat_map(|p| (0..k).map(move |s| [p.clone(), vec![SymbolId(s)]].concat())).collect();
        }
        inputs.extend(layer);
    }
    let mut seen = HashSet::new();
    for input in inputs {
        let mut cfg = Configuration::initial(spec, &input).unwrap();
        seen.insert(cfg.clone());
        for n in 1..=depth {
            match step(spec, &cfg, n) {
                StepResult::Moved(next, _) => {
                    cfg = next;
                    seen.insert(cfg.clone());
                }
                _ => break,
            }
        }
    }
    seen
}

/// Counts predecessors of `cfg` by trying every configuration that differs
/// from it only in state, head (within one cell) and the cell under that head.
fn predecessor_count(spec: &MachineSpec, cfg: &Configuration) -> usize {
    let mut found = HashSet::new();
    for s in 0..spec.states().len() as u16 {
        for head in cfg.head - 1..=cfg.head + 1 {
            for sym in 0..spec.alphabet().len() as u16 {
                let mut p = cfg.clone();
                p.state = StateId(s);
                p.head = head;
                p.write(head, SymbolId(sym));
                if let StepResult::Moved(next, _) = step(spec, &p, 1) {
                    if &next == cfg {
                        found.insert(p);
                    }
                }
            }
        }
    }
    found.len()
}

#[test]
fn reversible_specs_have_unique_predecessors() {
    let mut checked = 0;
    let mut irreversible_witness = false;
    let mut classes = vec![MachineEnumeration::new(1, 2).unwrap().iter().collect::<Vec<_>>()];
    classes.push(
        sampled_machines(3000).into_iter().filter(|s| s.states().len() == 3 && s.alphabet().len() == 2).collect(),
    );
    for spec in classes.into_iter().flatten() {
        let configs = reachable(&spec, 20);
        if is_reversible_spec(&spec) {
            checked += 1;
            for cfg in &configs {
                assert!(predecessor_count(&spec, cfg) <= 1, "{} at {cfg:?}", spec.canonical_text());
            }
        } else if !irreversible_witness {
            irreversible_witness = configs.iter().any(|c| predecessor_count(&spec, c) > 1);
        }
    }
    assert!(checked > 50, "only {checked} reversible specs");
    assert!(irreversible_witness);
}

#[test]
fn retrace_detects_a_mismatched_history() {
    let bb = busy_beaver_2();
    let (r, mut hist) = run_with_history(&bb, &[], 100).unwrap();
    hist.records[2].written = SymbolId(0);
    assert!(matches!(retrace(&r.final_config, &hist), Err(infoloss::Error::Integrity(_))));
}

#[test]
fn spec_text_round_trips() {
    let mut digests = HashMap::new();
    for spec in MachineEnumeration::new(1, 2).unwrap().iter() {
        let again = MachineSpec::parse(&spec.to_toml()).unwrap();
        assert_eq!(again, spec);
        assert_eq!(again.digest(), spec.digest());
        assert!(digests.insert(spec.digest(), spec.canonical_text()).is_none());
    }
}
