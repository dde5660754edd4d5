//! Certified approximate evaluation of positive circuits.
//!
//! Positive circuits (no subtraction, no negative constants) lose at most a
//! `(1 ± ε)` factor per operation when evaluated in floating point with
//! `ε = 2^{-b_m}`, so the output of a circuit `C` is within a multiplicative
//! `K^{3^{|C|}}` of the exact value, `K = (1+ε)/(1-ε)`. When the circuit
//! computes a polynomial of degree `d` whose inputs have denominators with
//! lcm `D`, the exact value `y` has `D^d y` integral, and choosing `b_m`,
//! `b_e` large enough makes `(D^d y - 1/2, D^d y + 1/2)` contain the single
//! integer `round(D^d ỹ)`, so the exact value is recovered by rounding.
//!
//! The floats here are software floats: an arbitrary-precision mantissa of
//! exactly `b_m` bits with round-to-nearest-even, and an unbounded exponent
//! checked against the planned `b_e` range after every operation (hardware
//! floats cannot honour arbitrary `b_m`).

use crate::circuit::{Circuit, Gate, GateId};
use crate::rat;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SoftFloatError {
    #[error("circuit is not positive (subtraction gate or negative constant)")]
    NonPositiveCircuit,
    #[error("bad plan parameter: {0}")]
    BadParams(String),
    #[error("expected {expected} inputs, got {got}")]
    InputArity { expected: usize, got: usize },
    #[error("input {index} is not strictly positive")]
    NonPositiveInput { index: usize },
    #[error("input {index} does not fit in {n_b} bits (numerator and denominator)")]
    InputNotRepresentable { index: usize, n_b: u64 },
    #[error("division by zero at gate g{gate}")]
    DivisionByZero { gate: GateId },
    #[error("exponent overflow at gate g{gate}: the precision plan was violated")]
    ExponentOverflow { gate: GateId },
}

/// Precision plan for one circuit evaluation: mantissa and exponent widths
/// derived from the circuit size, the input bit bound `n_b`, the degree bound
/// `d` and the lcm `D` of the input denominators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalPlan {
    pub n_b: u64,
    pub n_inputs: usize,
    pub degree: u64,
    pub circuit_size: usize,
    pub mantissa_bits: u64,
    pub exponent_bits: u64,
    pub denom_lcm: BigUint,
}

impl EvalPlan {
    /// `ε = 2^{-b_m}`.
    pub fn epsilon(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::one() << self.mantissa_bits as usize)
    }

    /// `3^{|C|+1} · ε`: an upper bound on `K^{3^{|C|}} - 1`, the worst-case
    /// relative error of a full evaluation (valid whenever the plan's
    /// `b_m` makes `3^{|C|+1} ε < 1/2`, which `plan_precision` guarantees).
    pub fn error_factor_bound(&self) -> BigRational {
        let pow = BigUint::from(3u8).pow(self.circuit_size as u32 + 1);
        BigRational::from_integer(BigInt::from(pow)) * self.epsilon()
    }

    /// `2 · 3^{|C|} · ε`: a lower bound on `K^{3^{|C|}} - 1` (Bernoulli with
    /// `K - 1 >= 2ε`). A measured relative error within this margin is
    /// therefore certainly within the `K^{3^{|C|}}` envelope, which itself
    /// cannot be materialized exactly for non-toy circuits.
    pub fn envelope_margin(&self) -> BigRational {
        let pow = BigUint::from(3u8).pow(self.circuit_size as u32);
        BigRational::from_integer(BigInt::from(pow * 2u8)) * self.epsilon()
    }

    /// Values must stay within `[2^-L, 2^L]` with `L = 2^{b_e}`.
    fn exponent_limit(&self) -> BigInt {
        BigInt::one() << self.exponent_bits as usize
    }
}

fn ceil_log2(x: u64) -> u64 {
    debug_assert!(x >= 1);
    x.next_power_of_two().trailing_zeros() as u64
}

/// Smallest `b_m`, `b_e` satisfying
/// `b_m >= log2(3)·(|C|+1) + n_b·n·d + 1` and `b_e >= ceil(log2 n_b) + |C| + 1`
/// for evaluating the positive circuit `c` on inputs representable in `n_b`
/// bits, with output polynomial degree at most `degree` and input-denominator
/// lcm `denom_lcm`.
pub fn plan_precision(
    c: &Circuit,
    n_b: u64,
    degree: u64,
    denom_lcm: BigUint,
) -> Result<EvalPlan, SoftFloatError> {
    if !c.check_positive() {
        return Err(SoftFloatError::NonPositiveCircuit);
    }
    if n_b < 1 {
        return Err(SoftFloatError::BadParams("n_b must be at least 1".into()));
    }
    if denom_lcm.is_zero() {
        return Err(SoftFloatError::BadParams("denominator lcm must be >= 1".into()));
    }
    let size = c.size() as u64;
    // ceil(log2(3^(|C|+1))) = bit length of 3^(|C|+1), since a power of three
    // is never a power of two.
    let log3_term = BigUint::from(3u8).pow(c.size() as u32 + 1).bits();
    let mantissa_bits = n_b * c.n_inputs() as u64 * degree + 1 + log3_term;
    let exponent_bits = ceil_log2(n_b) + size + 1;
    Ok(EvalPlan {
        n_b,
        n_inputs: c.n_inputs(),
        degree,
        circuit_size: c.size(),
        mantissa_bits,
        exponent_bits,
        denom_lcm,
    })
}

/// A non-negative software float: `mantissa · 2^exponent` with the mantissa
/// either zero or normalized to exactly the planned number of bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoftFloat {
    mantissa: BigUint,
    exponent: BigInt,
}

impl SoftFloat {
    pub fn zero() -> Self {
        SoftFloat {
            mantissa: BigUint::zero(),
            exponent: BigInt::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    /// Correctly rounded `b_m`-bit float closest to the non-negative
    /// rational `r` (round to nearest, ties to even).
    pub fn from_rational(r: &BigRational, b_m: u64) -> Self {
        assert!(!r.is_negative(), "soft floats are non-negative");
        if r.is_zero() {
            return SoftFloat::zero();
        }
        let p = r.numer().magnitude().clone();
        let q = r.denom().magnitude();
        let shift = b_m + 2 + q.bits();
        let scaled = p << shift as usize;
        let quot = &scaled / q;
        let rem = scaled % q;
        normalize_round(quot, BigInt::from(-(shift as i64)), !rem.is_zero(), b_m)
    }

    /// Exact rational value.
    pub fn to_rational(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let e = self
            .exponent
            .to_i64()
            .expect("soft float exponent too large to materialize");
        let m = BigInt::from(self.mantissa.clone());
        if e >= 0 {
            BigRational::from_integer(m << e as usize)
        } else {
            BigRational::new(m, BigInt::one() << (-e) as usize)
        }
    }

    pub fn add(&self, other: &SoftFloat, b_m: u64) -> SoftFloat {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (hi, lo) = if self.exponent >= other.exponent {
            (self, other)
        } else {
            (other, self)
        };
        let diff = &hi.exponent - &lo.exponent;
        if diff > BigInt::from(b_m) {
            // The smaller operand is below half an ulp of the result: the
            // correctly rounded sum is the larger operand itself.
            return hi.clone();
        }
        let d = diff.to_u64().unwrap();
        let m = (&hi.mantissa << d as usize) + &lo.mantissa;
        normalize_round(m, lo.exponent.clone(), false, b_m)
    }

    pub fn mul(&self, other: &SoftFloat, b_m: u64) -> SoftFloat {
        if self.is_zero() || other.is_zero() {
            return SoftFloat::zero();
        }
        let m = &self.mantissa * &other.mantissa;
        normalize_round(m, &self.exponent + &other.exponent, false, b_m)
    }

    /// `self / other`; panics if `other` is zero (callers check).
    pub fn div(&self, other: &SoftFloat, b_m: u64) -> SoftFloat {
        assert!(!other.is_zero(), "soft float division by zero");
        if self.is_zero() {
            return SoftFloat::zero();
        }
        let scaled = &self.mantissa << (b_m + 2) as usize;
        let quot = &scaled / &other.mantissa;
        let rem = scaled % &other.mantissa;
        let e = &self.exponent - &other.exponent - BigInt::from(b_m + 2);
        normalize_round(quot, e, !rem.is_zero(), b_m)
    }

    /// Exponent of the most significant bit: the value lies in
    /// `[2^(top-1), 2^top)`.
    fn top_exponent(&self) -> BigInt {
        debug_assert!(!self.is_zero());
        &self.exponent + BigInt::from(self.mantissa.bits())
    }
}

/// Rounds `m · 2^e` (with `sticky` marking dropped non-zero bits strictly
/// below `m`'s lsb) to a mantissa of exactly `b_m` bits, nearest-even.
fn normalize_round(m: BigUint, e: BigInt, sticky: bool, b_m: u64) -> SoftFloat {
    debug_assert!(!m.is_zero());
    let bits = m.bits();
    if bits <= b_m {
        debug_assert!(!sticky, "sticky with an under-wide mantissa");
        let shift = b_m - bits;
        return SoftFloat {
            mantissa: m << shift as usize,
            exponent: e - BigInt::from(shift),
        };
    }
    let s = bits - b_m;
    let mut kept = &m >> s as usize;
    let round_bit = m.bit(s - 1);
    let rest_nonzero = sticky || {
        if s >= 2 {
            let mask = (BigUint::one() << (s - 1) as usize) - BigUint::one();
            !(&m & &mask).is_zero()
        } else {
            false
        }
    };
    let round_up = round_bit && (rest_nonzero || kept.bit(0));
    let mut e = e + BigInt::from(s);
    if round_up {
        kept += BigUint::one();
        if kept.bits() > b_m {
            kept >>= 1;
            e += 1;
        }
    }
    SoftFloat {
        mantissa: kept,
        exponent: e,
    }
}

/// Evaluates a positive circuit on strictly positive inputs in software
/// floating point under `plan`. Every output `ỹ` satisfies
/// `y·K^{-3^{|C|}} <= ỹ <= y·K^{3^{|C|}}` against the exact value `y`.
pub fn eval_soft(
    c: &Circuit,
    xs: &[BigRational],
    plan: &EvalPlan,
) -> Result<Vec<SoftFloat>, SoftFloatError> {
    if !c.check_positive() {
        return Err(SoftFloatError::NonPositiveCircuit);
    }
    if xs.len() != c.n_inputs() {
        return Err(SoftFloatError::InputArity {
            expected: c.n_inputs(),
            got: xs.len(),
        });
    }
    for (index, x) in xs.iter().enumerate() {
        if !x.is_positive() {
            return Err(SoftFloatError::NonPositiveInput { index });
        }
        if x.numer().magnitude().bits() > plan.n_b || x.denom().magnitude().bits() > plan.n_b {
            return Err(SoftFloatError::InputNotRepresentable {
                index,
                n_b: plan.n_b,
            });
        }
    }
    let b_m = plan.mantissa_bits;
    let limit = plan.exponent_limit();
    let mut vals: Vec<SoftFloat> = Vec::with_capacity(c.size());
    for (id, gate) in c.gates().iter().enumerate() {
        let v = match gate {
            Gate::Input(i) => SoftFloat::from_rational(&xs[*i], b_m),
            Gate::Const(k) => SoftFloat::from_rational(k, b_m),
            Gate::Add(a, b) => vals[*a].add(&vals[*b], b_m),
            Gate::Mul(a, b) => vals[*a].mul(&vals[*b], b_m),
            Gate::Div(a, b) => {
                if vals[*b].is_zero() {
                    return Err(SoftFloatError::DivisionByZero { gate: id });
                }
                vals[*a].div(&vals[*b], b_m)
            }
            Gate::Sub(_, _) => unreachable!("positivity was checked"),
        };
        if !v.is_zero() {
            let top = v.top_exponent();
            if top > limit || top - 1 < -&limit {
                return Err(SoftFloatError::ExponentOverflow { gate: id });
            }
        }
        vals.push(v);
    }
    Ok(c.outputs().iter().map(|&o| vals[o].clone()).collect())
}

/// Recovers the exact output from its soft approximation:
/// `round(D^d · ỹ) / D^d`. Exact whenever the plan's preconditions held
/// (the true value `y` has `D^d y` integral and the error is below 1/2).
pub fn recover_exact(approx: &SoftFloat, plan: &EvalPlan) -> BigRational {
    let scale = BigInt::from(plan.denom_lcm.clone()).pow(plan.degree as u32);
    let scaled = approx.to_rational() * BigRational::from_integer(scale.clone());
    let rounded = rat::round_to_nearest(&scaled);
    BigRational::new(rounded, scale)
}
