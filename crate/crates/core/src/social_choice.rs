//! Cumulation mechanisms and set comparators.
//!
//! * egalitarian: minimum, compared lexicographically on ascending-sorted
//!   vectors (leximin)
//! * utilitarian: arithmetic mean
//! * nash: geometric mean

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    Egalitarian,
    Utilitarian,
    Nash,
}

impl Mechanism {
    pub const ALL: [Mechanism; 3] = [Mechanism::Utilitarian, Mechanism::Egalitarian, Mechanism::Nash];

    pub fn name(self) -> &'static str {
        match self {
            Mechanism::Egalitarian => "egalitarian",
            Mechanism::Utilitarian => "utilitarian",
            Mechanism::Nash => "nash",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "egalitarian" => Ok(Mechanism::Egalitarian),
            "utilitarian" => Ok(Mechanism::Utilitarian),
            "nash" => Ok(Mechanism::Nash),
            other => Err(Error::Parse(format!(
                "unknown mechanism `{other}` (expected egalitarian, utilitarian or nash)"
            ))),
        }
    }
}

/// Maps a signed score in [-1, 1] onto [0, 1].
pub fn affine_rescale(score: f64) -> f64 {
    (score + 1.0) / 2.0
}

fn sorted(scores: &[f64]) -> Vec<f64> {
    let mut v = scores.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn mean_of_sorted(v: &[f64]) -> f64 {
    let lo = v[0];
    let hi = v[v.len() - 1];
    let excess: f64 = v.iter().map(|x| x - lo).sum();
    (lo + excess / v.len() as f64).clamp(lo, hi)
}

/// Collapses a nonempty score list into one value.
///
/// Inputs are summed in sorted order so the result does not depend on
/// argument order. The mean is formed as `min + mean(x - min)` and the
/// geometric mean is clamped into `[min, mean]`; both are exact rewrites
/// that keep constant vectors and the min/GM/AM ordering exact in f64.
pub fn cumulate(scores: &[f64], mechanism: Mechanism) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyScores);
    }
    let v = sorted(scores);
    let lo = v[0];
    match mechanism {
        Mechanism::Egalitarian => Ok(lo),
        Mechanism::Utilitarian => Ok(mean_of_sorted(&v)),
        Mechanism::Nash => {
            if lo < 0.0 {
                return Err(Error::NegativeNash(lo));
            }
            if lo == 0.0 {
                return Ok(0.0);
            }
            let log_mean = v.iter().map(|x| x.ln()).sum::<f64>() / v.len() as f64;
            Ok(log_mean.exp().clamp(lo, mean_of_sorted(&v)))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    FirstPreferred,
    SecondPreferred,
    Indifferent,
}

impl Outcome {
    /// `Greater` means the first set is preferred.
    pub fn as_ordering(self) -> Ordering {
        match self {
            Outcome::FirstPreferred => Ordering::Greater,
            Outcome::SecondPreferred => Ordering::Less,
            Outcome::Indifferent => Ordering::Equal,
        }
    }

    fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Greater => Outcome::FirstPreferred,
            Ordering::Less => Outcome::SecondPreferred,
            Ordering::Equal => Outcome::Indifferent,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonVerdict {
    pub outcome: Outcome,
    /// Compared value pairs, in the order they were looked at. For
    /// egalitarian this ends at the deciding position.
    pub trace: Vec<(f64, f64)>,
}

impl ComparisonVerdict {
    /// Index into `trace` of the deciding pair, if any.
    pub fn deciding_position(&self) -> Option<usize> {
        match self.outcome {
            Outcome::Indifferent => None,
            _ => self.trace.len().checked_sub(1),
        }
    }
}

/// Lexicographic comparison of ascending-sorted vectors.
pub fn leximin_cmp(first: &[f64], second: &[f64]) -> Result<ComparisonVerdict> {
    if first.len() != second.len() {
        return Err(Error::LengthMismatch(first.len(), second.len()));
    }
    let (a, b) = (sorted(first), sorted(second));
    let mut trace = Vec::with_capacity(a.len());
    for (x, y) in a.into_iter().zip(b) {
        trace.push((x, y));
        match x.total_cmp(&y) {
            Ordering::Equal => continue,
            o => {
                return Ok(ComparisonVerdict {
                    outcome: Outcome::from_ordering(o),
                    trace,
                })
            }
        }
    }
    Ok(ComparisonVerdict {
        outcome: Outcome::Indifferent,
        trace,
    })
}

/// Compares two score lists under `mechanism`.
pub fn compare_sets(first: &[f64], second: &[f64], mechanism: Mechanism) -> Result<ComparisonVerdict> {
    match mechanism {
        Mechanism::Egalitarian => leximin_cmp(first, second),
        _ => {
            let a = cumulate(first, mechanism)?;
            let b = cumulate(second, mechanism)?;
            Ok(ComparisonVerdict {
                outcome: Outcome::from_ordering(a.total_cmp(&b)),
                trace: vec![(a, b)],
            })
        }
    }
}
