//! Shannon measure of information (SMI) and the binary-question game.
//!
//! `H = -Σ p log2 p`, with `0 log 0 = 0`. All arithmetic is done at full
//! double precision; rounding for display belongs to the caller.

use std::fmt;
use std::ops::Add;

use serde::Serialize;

use crate::{Error, Result};

/// Tolerance on `Σ p = 1` when validating a distribution.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// A non-negative, finite quantity of information in bits.
#[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Bits(f64);

impl Bits {
    pub const ZERO: Bits = Bits(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::validation(format!("bit count must be finite and non-negative, got {value}")));
        }
        Ok(Bits(value))
    }

    /// Wraps a value computed internally. Negative zero and sub-ulp negative
    /// results of entropy sums are clamped to zero.
    pub(crate) fn from_computed(value: f64) -> Self {
        debug_assert!(value.is_finite() && value > -1e-9, "bad bit value {value}");
        Bits(value.max(0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Add for Bits {
    type Output = Bits;

    fn add(self, rhs: Bits) -> Bits {
        Bits(self.0 + rhs.0)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{:.*}", p, self.0),
            None => write!(f, "{}", self.0),
        }
    }
}

/// A finite probability distribution over ordered events.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityDistribution {
    probs: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl ProbabilityDistribution {
    /// Validates `probs` without renormalizing them.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::validation("distribution must have at least one event"));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::validation(format!(
                    "probability at index {i} is {p}; entries must be finite and >= 0"
                )));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::validation(format!("probabilities sum to {sum}, expected 1 within {SUM_TOLERANCE}")));
        }
        Ok(ProbabilityDistribution { probs, labels: None })
    }

    /// Scales non-negative weights so they sum to one.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::validation(format!("weight at index {i} is {w}; weights must be finite and >= 0")));
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::validation("weights sum to zero"));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::validation("uniform distribution needs n >= 1"));
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.probs.len() {
            return Err(Error::validation(format!("{} labels given for {} events", labels.len(), self.probs.len())));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Shannon measure of information of `dist`, in bits.
pub fn smi(dist: &ProbabilityDistribution) -> Bits {
    Bits::from_computed(smi_of(dist.probs()))
}

/// `-Σ p log2 p` over raw probabilities. Callers guarantee validity.
pub(crate) fn smi_of(probs: &[f64]) -> f64 {
    -probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum::<f64>()
}

/// Information carried by observing an event of probability `p`.
pub fn surprisal(p: f64) -> Result<Bits> {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return Err(Error::validation(format!("probability {p} is outside [0, 1]")));
    }
    if p == 0.0 {
        return Err(Error::Domain("surprisal of an impossible event is infinite".into()));
    }
    Ok(Bits::from_computed(-p.log2()))
}

/// One row of the `-log2 p` / `-p log2 p` curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub p: f64,
    pub neg_log2_p: f64,
    pub neg_p_log2_p: f64,
}

/// Samples both curves at `p = i / (points + 1)` for `i = 1..=points`.
pub fn plogp_curve(points: usize) -> Result<Vec<CurvePoint>> {
    if points < 2 {
        return Err(Error::validation(format!("need at least 2 grid points, got {points}")));
    }
    let denom = (points + 1) as f64;
    Ok((1..=points)
        .map(|i| {
            let p = i as f64 / denom;
            let neg_log2_p = -p.log2();
            CurvePoint { p, neg_log2_p, neg_p_log2_p: p * neg_log2_p }
        })
        .collect())
}

/// The sample with the largest `-p log2 p`; the first one on ties.
pub fn curve_peak(curve: &[CurvePoint]) -> Option<CurvePoint> {
    curve.iter().copied().fold(None, |best, pt| match best {
        Some(b) if b.neg_p_log2_p >= pt.neg_p_log2_p => Some(b),
        _ => Some(pt),
    })
}

/// How a question tree is built from a distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Split the ordered event list into two contiguous halves of nearly equal mass.
    BisectMass,
    /// Minimum expected depth, by repeatedly merging the two least probable subtrees.
    Optimal,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bisect" | "bisect-mass" => Ok(Strategy::BisectMass),
            "optimal" => Ok(Strategy::Optimal),
            other => Err(Error::validation(format!("unknown strategy `{other}` (expected bisect-mass or optimal)"))),
        }
    }
}

/// A strategy for identifying an event with yes/no questions.
///
/// Every internal node asks "is the event in the `yes` subtree?".
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuestionTree {
    Leaf(usize),
    Question { yes: Box<QuestionTree>, no: Box<QuestionTree> },
}

impl QuestionTree {
    /// `(event, depth)` for every leaf, left to right.
    pub fn leaf_depths(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        self.collect_depths(0, &mut out);
        out
    }

    fn collect_depths(&self, depth: usize, out: &mut Vec<(usize, usize)>) {
        match self {
            QuestionTree::Leaf(e) => out.push((*e, depth)),
            QuestionTree::Question { yes, no } => {
                yes.collect_depths(depth + 1, out);
                no.collect_depths(depth + 1, out);
            }
        }
    }

    /// Depth of each event, indexed by event. Panics if the leaves are not
    /// exactly `0..n`; use [`average_questions`] for a checked variant.
    pub fn depths_by_event(&self) -> Vec<usize> {
        let mut leaves = self.leaf_depths();
        leaves.sort_unstable();
        leaves.into_iter().map(|(_, d)| d).collect()
    }

    /// Events below this node, sorted.
    pub fn events(&self) -> Vec<usize> {
        let mut ev: Vec<usize> = self.leaf_depths().into_iter().map(|(e, _)| e).collect();
        ev.sort_unstable();
        ev
    }

    fn min_event(&self) -> usize {
        match self {
            QuestionTree::Leaf(e) => *e,
            QuestionTree::Question { yes, no } => yes.min_event().min(no.min_event()),
        }
    }
}

pub fn build_question_tree(dist: &ProbabilityDistribution, strategy: Strategy) -> QuestionTree {
    match strategy {
        Strategy::BisectMass => {
            let mut prefix = Vec::with_capacity(dist.len() + 1);
            prefix.push(0.0);
            for &p in dist.probs() {
                prefix.push(prefix.last().unwrap() + p);
            }
            bisect(&prefix, 0, dist.len())
        }
        Strategy::Optimal => merge_least_probable(dist.probs()),
    }
}

// Mass differences below this are treated as ties so that rounding in the
// prefix sums cannot decide the split.
const TIE_EPS: f64 = 1e-12;

fn bisect(prefix: &[f64], lo: usize, hi: usize) -> QuestionTree {
    if hi - lo == 1 {
        return QuestionTree::Leaf(lo);
    }
    let total = prefix[hi] - prefix[lo];
    let mut best_k = lo + 1;
    let mut best_gap = f64::INFINITY;
    for k in lo + 1..hi {
        let gap = (2.0 * (prefix[k] - prefix[lo]) - total).abs();
        if gap < best_gap - TIE_EPS {
            best_gap = gap;
            best_k = k;
        }
    }
    QuestionTree::Question { yes: Box::new(bisect(prefix, lo, best_k)), no: Box::new(bisect(prefix, best_k, hi)) }
}

fn merge_least_probable(probs: &[f64]) -> QuestionTree {
    let mut pool: Vec<(f64, usize, QuestionTree)> =
        probs.iter().enumerate().map(|(i, &p)| (p, i, QuestionTree::Leaf(i))).collect();
    while pool.len() > 1 {
        let a = take_least(&mut pool);
        let b = take_least(&mut pool);
        let (first, second) = if a.1 <= b.1 { (a, b) } else { (b, a) };
        pool.push((
            first.0 + second.0,
            first.1,
            QuestionTree::Question { yes: Box::new(first.2), no: Box::new(second.2) },
        ));
    }
    pool.pop().expect("distribution is non-empty").2
}

fn take_least(pool: &mut Vec<(f64, usize, QuestionTree)>) -> (f64, usize, QuestionTree) {
    let idx = (0..pool.len())
        .min_by(|&i, &j| pool[i].0.total_cmp(&pool[j].0).then(pool[i].1.cmp(&pool[j].1)))
        .expect("pool is non-empty");
    let item = pool.swap_remove(idx);
    debug_assert_eq!(item.1, item.2.min_event());
    item
}

/// Expected number of questions `Σ p_i · depth_i`.
pub fn average_questions(tree: &QuestionTree, dist: &ProbabilityDistribution) -> Result<Bits> {
    let leaves = tree.leaf_depths();
    let mut seen = vec![false; dist.len()];
    for &(event, _) in &leaves {
        if event >= dist.len() || std::mem::replace(&mut seen[event], true) {
            return Err(Error::validation(format!(
                "tree leaf {event} does not match the {} distribution events",
                dist.len()
            )));
        }
    }
    if leaves.len() != dist.len() {
        return Err(Error::validation(format!(
            "tree has {} leaves but the distribution has {} events",
            leaves.len(),
            dist.len()
        )));
    }
    let avg = leaves.iter().map(|&(e, d)| dist.probs()[e] * d as f64).sum();
    Ok(Bits::from_computed(avg))
}
