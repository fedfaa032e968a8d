//! Greedy constructions: polynomial perturbations of arbitrary integer
//! sequences, and bounded perturbations of fast-growing sequences. Both emit
//! a per-step trace that records the deviation actually achieved next to the
//! bounds the construction promises.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear_form::{LinearForm, DEFAULT_ARITY_CEILING};
use crate::serde_util::bigint_string;
use crate::sidon::{can_extend, ExtendVerdict, FiniteSet};

/// One construction step. `step_bound` is the per-step scan radius
/// `4^h (k-1)^(2h-1) + (k-1)` (zero at k = 1) and `global_bound` is `k^(4h)`;
/// the recorded deviation stays within both.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub k: u64,
    #[serde(with = "bigint_string")]
    pub b_k: BigInt,
    #[serde(with = "bigint_string")]
    pub a_k: BigInt,
    #[serde(with = "bigint_string")]
    pub deviation: BigInt,
    #[serde(with = "bigint_string")]
    pub step_bound: BigInt,
    #[serde(with = "bigint_string")]
    pub global_bound: BigInt,
    pub candidates: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionTrace {
    pub steps: Vec<TraceStep>,
}

impl ConstructionTrace {
    /// The constructed set `{a_1, ..., a_K}`.
    pub fn final_set(&self) -> Result<FiniteSet> {
        FiniteSet::new(self.steps.iter().map(|s| s.a_k.clone()).collect())
    }
}

/// First index where the bounded-mode growth hypothesis fails. `k = 0` encodes
/// the initial condition `b_1 > m`; `k >= 1` the step condition
/// `b_{k+1} > C b_k + (C+1) m`. `lhs` is the sequence side, `rhs` the bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthViolation {
    pub k: u64,
    #[serde(with = "bigint_string")]
    pub lhs: BigInt,
    #[serde(with = "bigint_string")]
    pub rhs: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthCheck {
    #[serde(with = "bigint_string")]
    pub c: BigInt,
    #[serde(with = "bigint_string")]
    pub m: BigInt,
    pub first_violation: Option<GrowthViolation>,
}

impl GrowthCheck {
    pub fn passes(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Scan radius at step `k = n + 1`: `4^h n^(2h-1) + n`.
pub fn scan_radius(arity: usize, n: u64) -> BigInt {
    let h = arity as u32;
    BigInt::from(4).pow(h) * BigInt::from(n).pow(2 * h - 1) + n
}

/// Global deviation bound `k^(4h)`.
pub fn global_bound(arity: usize, k: u64) -> BigInt {
    BigInt::from(k).pow(4 * arity as u32)
}

fn require_property_n(form: &LinearForm) -> Result<()> {
    if form.property_n(DEFAULT_ARITY_CEILING)?.holds() {
        Ok(())
    } else {
        Err(Error::PropertyNRequired)
    }
}

/// Greedy polynomial-perturbation construction. Starts with `a_1 = b_1`; at
/// each later step scans candidates nearest-first around `b_{k+1}` (offsets
/// 0, +1, -1, +2, -2, ...) and accepts the first integer not already chosen
/// that extends the set. The scan is guaranteed to succeed within the step
/// radius; running past it means a bug here, not bad input, and aborts.
pub fn construct_poly(
    form: &LinearForm,
    b_values: &[BigInt],
    budget: u128,
) -> Result<ConstructionTrace> {
    require_property_n(form)?;
    let mut steps: Vec<TraceStep> = Vec::with_capacity(b_values.len());
    let mut chosen: Vec<BigInt> = Vec::with_capacity(b_values.len());

    for (i, b) in b_values.iter().enumerate() {
        let k = (i + 1) as u64;
        let (a, candidates, step_bound) = if i == 0 {
            (b.clone(), 1u64, BigInt::zero())
        } else {
            let n = i as u64; // |A_n| before this step
            let radius = scan_radius(form.arity(), n);
            let set = FiniteSet::new(chosen.clone()).expect("distinct by construction");
            let mut candidates = 0u64;
            let mut accepted: Option<BigInt> = None;
            let mut offset = BigInt::zero();
            loop {
                if offset > radius {
                    return Err(Error::Internal(format!(
                        "scan at step {k} exceeded radius {radius}, contradicting the \
                         counting bound"
                    )));
                }
                // offset 0 once, then +d before -d.
                let signs: &[i8] = if offset.is_zero() { &[1] } else { &[1, -1] };
                for &sign in signs {
                    let cand = if sign >= 0 { b + &offset } else { b - &offset };
                    candidates += 1;
                    if set.contains(&cand) {
                        continue;
                    }
                    if can_extend(form, &set, &cand, budget)?.holds() {
                        accepted = Some(cand);
                        break;
                    }
                }
                if accepted.is_some() {
                    break;
                }
                offset += 1;
            }
            (accepted.expect("loop exits only on acceptance"), candidates, radius)
        };
        steps.push(TraceStep {
            k,
            b_k: b.clone(),
            a_k: a.clone(),
            deviation: (&a - b).abs(),
            step_bound,
            global_bound: global_bound(form.arity(), k),
            candidates,
        });
        chosen.push(a);
    }
    Ok(ConstructionTrace { steps })
}

/// Checks the bounded-mode growth hypothesis `b_1 > m`,
/// `b_{k+1} > C b_k + (C+1) m` on the given prefix, which must be strictly
/// increasing and positive.
pub fn check_growth(form: &LinearForm, b_values: &[BigInt], m: &BigInt) -> Result<GrowthCheck> {
    if m.is_negative() {
        return Err(Error::InvalidParameter("m must be nonnegative".into()));
    }
    for (i, b) in b_values.iter().enumerate() {
        if !b.is_positive() {
            return Err(Error::InvalidParameter(format!(
                "sequence term b_{} = {b} is not positive",
                i + 1
            )));
        }
        if i > 0 && b <= &b_values[i - 1] {
            return Err(Error::InvalidParameter(format!(
                "sequence is not strictly increasing at k={}",
                i + 1
            )));
        }
    }
    let c = form.norm().clone();
    let mut first_violation = None;
    if let Some(b1) = b_values.first() {
        if b1 <= m {
            first_violation = Some(GrowthViolation { k: 0, lhs: b1.clone(), rhs: m.clone() });
        }
    }
    if first_violation.is_none() {
        for (i, w) in b_values.windows(2).enumerate() {
            let rhs = &c * &w[0] + (&c + 1) * m;
            if w[1] <= rhs {
                first_violation =
                    Some(GrowthViolation { k: (i + 1) as u64, lhs: w[1].clone(), rhs });
                break;
            }
        }
    }
    Ok(GrowthCheck { c, m: m.clone(), first_violation })
}

/// Integers `a` in the open interval `(b - m0, b + m0)`, in increasing order.
pub fn bounded_choices(b: &BigInt, m0: &BigRational) -> Vec<BigInt> {
    let lo: BigInt = (BigRational::from(b.clone()) - m0).floor().to_integer() + 1;
    let hi: BigInt = (BigRational::from(b.clone()) + m0).ceil().to_integer() - 1;
    let mut out = Vec::new();
    let mut a = lo;
    while a <= hi {
        out.push(a.clone());
        a += 1;
    }
    out
}

fn validate_m0(m: &BigInt, m0: &BigRational) -> Result<()> {
    if !m0.is_positive() {
        return Err(Error::InvalidParameter("m0 must be positive".into()));
    }
    let cap = BigRational::from(m.clone().max(BigInt::one()));
    if *m0 > cap {
        return Err(Error::InvalidParameter(format!(
            "m0 = {m0} exceeds its cap {cap} (m0 must satisfy 0 < m0 <= max(m, 1))"
        )));
    }
    Ok(())
}

/// Bounded-perturbation construction with the default choice `a_k = b_k`.
pub fn construct_bounded(
    form: &LinearForm,
    b_values: &[BigInt],
    m: &BigInt,
    m0: &BigRational,
    budget: u128,
) -> Result<ConstructionTrace> {
    construct_bounded_with(form, b_values, m, m0, budget, |_, b| b.clone())
}

/// Bounded-perturbation construction with an explicit per-step choice. The
/// chooser receives the 1-based index and `b_k` and must return a positive
/// integer inside `(b_k - m0, b_k + m0)`; step 1 always takes `a_1 = b_1`.
///
/// Under a passing growth check every such choice keeps the set Sidon; the
/// extension test still runs each step and a failure aborts as an internal
/// error, since it would contradict the guarantee.
pub fn construct_bounded_with(
    form: &LinearForm,
    b_values: &[BigInt],
    m: &BigInt,
    m0: &BigRational,
    budget: u128,
    mut choose: impl FnMut(usize, &BigInt) -> BigInt,
) -> Result<ConstructionTrace> {
    require_property_n(form)?;
    validate_m0(m, m0)?;
    let growth = check_growth(form, b_values, m)?;
    if let Some(v) = growth.first_violation {
        return Err(Error::GrowthCheckFailed { index: v.k, lhs: v.lhs, rhs: v.rhs });
    }

    let mut steps: Vec<TraceStep> = Vec::with_capacity(b_values.len());
    let mut chosen: Vec<BigInt> = Vec::with_capacity(b_values.len());
    for (i, b) in b_values.iter().enumerate() {
        let k = (i + 1) as u64;
        let a = if i == 0 { b.clone() } else { choose(i + 1, b) };
        let deviation = (&a - b).abs();
        if BigRational::from(deviation.clone()) >= *m0 {
            return Err(Error::InvalidParameter(format!(
                "choice {a} at step {k} lies outside ({b} - {m0}, {b} + {m0})"
            )));
        }
        if !a.is_positive() {
            return Err(Error::InvalidParameter(format!(
                "choice {a} at step {k} is not a positive integer"
            )));
        }
        if i > 0 {
            let set = FiniteSet::new(chosen.clone()).expect("distinct by construction");
            if set.contains(&a) {
                return Err(Error::InvalidParameter(format!(
                    "choice {a} at step {k} repeats an earlier element"
                )));
            }
            match can_extend(form, &set, &a, budget)? {
                ExtendVerdict::Extendable => {}
                ExtendVerdict::Conflict(c) => {
                    return Err(Error::Internal(format!(
                        "extension failed at step {k} for {a} (translates of {:?} and {:?} \
                         share {}), contradicting the growth guarantee",
                        c.j1.positions(),
                        c.j2.positions(),
                        c.value
                    )));
                }
            }
        }
        steps.push(TraceStep {
            k,
            b_k: b.clone(),
            a_k: a.clone(),
            deviation,
            step_bound: if i == 0 { BigInt::zero() } else { scan_radius(form.arity(), i as u64) },
            global_bound: global_bound(form.arity(), k),
            candidates: 1,
        });
        chosen.push(a);
    }
    Ok(ConstructionTrace { steps })
}
