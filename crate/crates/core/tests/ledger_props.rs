use infoloss::ledger::{erasure_entropy, landauer_energy, LossEvent, LossKind, LossLedger, BOLTZMANN};
use infoloss::Bits;
use proptest::prelude::*;

const KINDS: [LossKind; 4] = [LossKind::Erasure, LossKind::Gate, LossKind::Arithmetic, LossKind::ExternalAnswer];

#[test]
fn erasure_reference_values() {
    assert_eq!(erasure_entropy(2).unwrap().value(), 1.0);
    assert!((erasure_entropy(3).unwrap().value() - 1.58496).abs() < 1e-5);
    assert!((erasure_entropy(3).unwrap().value() - 1.58).abs() < 5e-3);
    assert_eq!(erasure_entropy(1).unwrap().value(), 0.0);
    assert!(erasure_entropy(0).is_err());
}

#[test]
fn landauer_reference_value() {
    let e = landauer_energy(Bits::new(1.0).unwrap(), 300.0).unwrap();
    assert!((e - 300.0 * 1.380649e-23 * 2f64.ln()).abs() < 1e-35);
    assert!((e - 2.871e-21).abs() < 1e-24);
    assert!(landauer_energy(Bits::new(1.0).unwrap(), 0.0).is_err());
    assert!(landauer_energy(Bits::new(1.0).unwrap(), f64::NAN).is_err());
}

#[test]
fn step_order_is_enforced() {
    let mut l = LossLedger::new();
    let ev = |step| LossEvent::new(LossKind::Gate, Bits::new(1.0).unwrap(), step, "g").unwrap();
    l.record(ev(3)).unwrap();
    l.record(ev(3)).unwrap();
    assert!(l.record(ev(2)).is_err());
    assert_eq!(l.events().len(), 2);
    assert!(LossEvent::new(LossKind::Gate, Bits::ZERO, 1, "nothing").is_err());
}

fn events() -> impl Strategy<Value = Vec<(usize, f64, u64)>> {
    prop::collection::vec((0..4usize, 1e-6..50.0f64, 0..4u64), 0..60)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn replay_equals_running_totals_and_losses_only_grow(evs in events()) {
        let mut ledger = LossLedger::new();
        let mut step = 0;
        let mut prev_lost = 0.0;
        let mut external = 0.0;
        for (k, bits, gap) in evs {
            step += gap;
            let kind = KINDS[k];
            ledger.record(LossEvent::new(kind, Bits::new(bits).unwrap(), step, "e").unwrap()).unwrap();
            let lost = ledger.lost_total().value();
            prop_assert!(lost >= prev_lost);
            prev_lost = lost;
            if kind == LossKind::ExternalAnswer {
                external += bits;
            }
        }
        prop_assert_eq!(ledger.totals(), ledger.replay_totals());
        prop_assert_eq!(ledger.is_open(), external > 0.0);
        prop_assert!((ledger.external_total().value() - external).abs() <= 1e-9 * external.max(1.0));
        let csv = ledger.to_csv();
        prop_assert_eq!(csv.lines().count(), ledger.events().len() + 1);
        prop_assert_eq!(&csv, &ledger.to_csv());
    }

    #[test]
    fn landauer_is_linear(bits in 0.0..1e6f64, t in 1e-3..1e4f64, a in 0.0..100.0f64) {
        let e = |b: f64, t: f64| landauer_energy(Bits::new(b).unwrap(), t).unwrap();
        let base = e(bits, t);
        let tol = 1e-12 * base.abs().max(f64::MIN_POSITIVE) * a.max(1.0);
        prop_assert!((e(a * bits, t) - a * base).abs() <= tol);
        prop_assert!((e(bits, a.max(1e-3) * t) - a.max(1e-3) * base).abs() <= tol);
        prop_assert!((base - bits * BOLTZMANN * t * std::f64::consts::LN_2).abs() <= tol);
    }
}
