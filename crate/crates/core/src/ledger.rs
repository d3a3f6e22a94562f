//! Accounting of information lost by computation and gained from outside.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::smi::Bits;
use crate::{Error, Result};

/// Boltzmann constant, J/K (exact SI value).
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Bits forgotten when erasing a cell that held one of `prior_states`
/// equally likely values.
pub fn erasure_entropy(prior_states: u64) -> Result<Bits> {
    if prior_states == 0 {
        return Err(Error::validation("an erased cell needs at least one prior state"));
    }
    Ok(Bits::from_computed((prior_states as f64).log2()))
}

/// Minimum heat in joules dissipated by irreversibly losing `bits` at `temperature` kelvin.
pub fn landauer_energy(bits: Bits, temperature: f64) -> Result<f64> {
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(Error::validation(format!("temperature must be positive and finite, got {temperature} K")));
    }
    Ok(bits.value() * BOLTZMANN * temperature * std::f64::consts::LN_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    Erasure,
    Gate,
    Arithmetic,
    /// Bits received from an oracle. Tracked as a gain, not a loss.
    ExternalAnswer,
}

impl LossKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LossKind::Erasure => "erasure",
            LossKind::Gate => "gate",
            LossKind::Arithmetic => "arithmetic",
            LossKind::ExternalAnswer => "external-answer",
        }
    }

    pub fn is_loss(self) -> bool {
        self != LossKind::ExternalAnswer
    }

    fn slot(self) -> usize {
        match self {
            LossKind::Erasure => 0,
            LossKind::Gate => 1,
            LossKind::Arithmetic => 2,
            LossKind::ExternalAnswer => 3,
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "erasure" => Ok(LossKind::Erasure),
            "gate" => Ok(LossKind::Gate),
            "arithmetic" => Ok(LossKind::Arithmetic),
            "external-answer" => Ok(LossKind::ExternalAnswer),
            other => Err(Error::validation(format!("unknown event kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossEvent {
    pub kind: LossKind,
    pub bits: Bits,
    pub step: u64,
    pub detail: String,
}

impl LossEvent {
    pub fn new(kind: LossKind, bits: Bits, step: u64, detail: impl Into<String>) -> Result<Self> {
        if bits.value() <= 0.0 {
            return Err(Error::validation("a ledger event must carry a positive number of bits"));
        }
        Ok(LossEvent { kind, bits, step, detail: detail.into() })
    }
}

/// Append-only list of events with running totals per kind.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LossLedger {
    events: Vec<LossEvent>,
    totals: [f64; 4],
}

impl LossLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends `event`; steps must not go backwards.
    pub fn record(&mut self, event: LossEvent) -> Result<()> {
        if let Some(last) = self.events.last() {
            if event.step < last.step {
                return Err(Error::validation(format!(
                    "event at step {} recorded after step {}",
                    event.step, last.step
                )));
            }
        }
        self.totals[event.kind.slot()] += event.bits.value();
        self.events.push(event);
        Ok(())
    }

    pub fn events(&self) -> &[LossEvent] {
        &self.events
    }

    pub fn total(&self, kind: LossKind) -> Bits {
        Bits::from_computed(self.totals[kind.slot()])
    }

    /// Erasure, gate and arithmetic bits combined.
    pub fn lost_total(&self) -> Bits {
        Bits::from_computed(self.totals[..3].iter().sum())
    }

    pub fn external_total(&self) -> Bits {
        self.total(LossKind::ExternalAnswer)
    }

    /// True when the run received information from outside.
    pub fn is_open(&self) -> bool {
        self.external_total().value() > 0.0
    }

    /// Totals recomputed from the event list, in the same order as recorded.
    pub fn replay_totals(&self) -> [f64; 4] {
        let mut totals = [0.0; 4];
        for e in &self.events {
            totals[e.kind.slot()] += e.bits.value();
        }
        totals
    }

    pub fn totals(&self) -> [f64; 4] {
        self.totals
    }

    /// CSV with header `step,kind,bits,detail`, events in recorded order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "kind", "bits", "detail"]).map_err(csv_err)?;
        for e in &self.events {
            w.write_record([e.step.to_string(), e.kind.to_string(), e.bits.to_string(), e.detail.clone()])
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
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::validation(format!("csv: {other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(kind: LossKind, bits: f64, step: u64) -> LossEvent {
        LossEvent::new(kind, Bits::new(bits).unwrap(), step, "t").unwrap()
    }

    #[test]
    fn erasure_examples() {
        assert_eq!(erasure_entropy(2).unwrap().value(), 1.0);
        assert!((erasure_entropy(3).unwrap().value() - 1.58496).abs() < 1e-5);
        assert_eq!(erasure_entropy(1).unwrap().value(), 0.0);
        assert!(erasure_entropy(0).is_err());
    }

    #[test]
    fn landauer_examples() {
        let one = landauer_energy(Bits::new(1.0).unwrap(), 300.0).unwrap();
        assert!((one - 2.871e-21).abs() < 1e-24, "{one}");
        assert_eq!(landauer_energy(Bits::ZERO, 77.0).unwrap(), 0.0);
        let million = landauer_energy(Bits::new(1e6).unwrap(), 300.0).unwrap();
        assert!((million / one - 1e6).abs() < 1e-6);
        assert!(landauer_energy(Bits::new(1.0).unwrap(), 0.0).is_err());
        assert!(landauer_energy(Bits::new(1.0).unwrap(), -3.0).is_err());
    }

    #[test]
    fn record_examples() {
        let mut l = LossLedger::new();
        l.record(ev(LossKind::Erasure, 1.0, 0)).unwrap();
        assert_eq!(l.lost_total().value(), 1.0);
        l.record(ev(LossKind::Gate, 0.7925, 1)).unwrap();
        assert!((l.lost_total().value() - 1.7925).abs() < 1e-12);
        l.record(ev(LossKind::ExternalAnswer, 1.0, 2)).unwrap();
        assert_eq!(l.external_total().value(), 1.0);
        assert!((l.lost_total().value() - 1.7925).abs() < 1e-12);
        assert!(l.is_open());
    }

    #[test]
    fn step_regression_rejected() {
        let mut l = LossLedger::new();
        l.record(ev(LossKind::Erasure, 1.0, 5)).unwrap();
        assert!(l.record(ev(LossKind::Erasure, 1.0, 4)).is_err());
        assert_eq!(l.events().len(), 1);
    }

    #[test]
    fn zero_bit_event_rejected() {
        assert!(LossEvent::new(LossKind::Gate, Bits::ZERO, 0, "").is_err());
    }

    #[test]
    fn csv_export() {
        let mut l = LossLedger::new();
        l.record(ev(LossKind::Erasure, 1.0, 1)).unwrap();
        l.record(LossEvent::new(LossKind::Gate, Bits::new(0.5).unwrap(), 3, "a,b").unwrap()).unwrap();
        assert_eq!(l.to_csv(), "step,kind,bits,detail\n1,erasure,1,t\n3,gate,0.5,\"a,b\"\n");
    }
}
