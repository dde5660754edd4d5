//! Per-vertex rational weights. Vertices without an explicit entry weigh 1,
//! so the empty weight function is the unweighted (counting) case.
//!
//! Weight file format: lines `w <v> <num>` or `w <v> <num>/<den>`; omitted
//! vertices default to 1. Blank lines and `c` comments are ignored.

use crate::graph::{Graph, Vertex};
use crate::rat::{self, RatParseError};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use std::collections::BTreeMap;
use thiserror::Error;

static ONE: Lazy<BigRational> = Lazy::new(BigRational::one);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WeightError {
    #[error("negative weight {w} for vertex {v}")]
    Negative { v: Vertex, w: String },
    #[error("line {line}: malformed weight line (expected `w <v> <num>[/<den>]`)")]
    Malformed { line: usize },
    #[error("line {line}: {source}")]
    BadRational {
        line: usize,
        source: RatParseError,
    },
    #[error("line {line}: duplicate weight for vertex {v}")]
    Duplicate { line: usize, v: Vertex },
}

/// Map from vertex to non-negative rational weight, defaulting to 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WeightFunction {
    weights: BTreeMap<Vertex, BigRational>,
}

impl WeightFunction {
    /// The all-ones weight function.
    pub fn unit() -> Self {
        Self::default()
    }

    /// Uniform weight `lambda` on the vertices of `g`.
    pub fn uniform(g: &Graph, lambda: &BigRational) -> Self {
        let mut w = Self::default();
        for v in g.vertices() {
            w.set(v, lambda.clone()).expect("uniform weight is validated by caller");
        }
        w
    }

    pub fn set(&mut self, v: Vertex, w: BigRational) -> Result<(), WeightError> {
        if w.is_negative() {
            return Err(WeightError::Negative {
                v,
                w: rat::format_rational(&w),
            });
        }
        self.weights.insert(v, w);
        Ok(())
    }

    pub fn get(&self, v: Vertex) -> &BigRational {
        self.weights.get(&v).unwrap_or(&ONE)
    }

    /// True if every vertex of `g` has a strictly positive weight.
    pub fn is_positive_on(&self, g: &Graph) -> bool {
        g.vertices().all(|v| self.get(v).is_positive())
    }

    /// First vertex of `g` with a zero weight, if any.
    pub fn zero_vertex_on(&self, g: &Graph) -> Option<Vertex> {
        g.vertices().find(|&v| self.get(v).is_zero())
    }
}

pub fn parse_weights(text: &str) -> Result<WeightFunction, WeightError> {
    let mut w = WeightFunction::unit();
    let mut seen = std::collections::BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "w" {
            return Err(WeightError::Malformed { line });
        }
        let v: Vertex = fields[1]
            .parse()
            .map_err(|_| WeightError::Malformed { line })?;
        if !seen.insert(v) {
            return Err(WeightError::Duplicate { line, v });
        }
        let r = rat::parse_rational(fields[2])
            .map_err(|source| WeightError::BadRational { line, source })?;
        w.set(v, r)?;
    }
    Ok(w)
}
