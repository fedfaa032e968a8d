//! Counting certificates against bounded perturbations of dense sequences,
//! plus the standalone inequality check used by the polynomial construction.
//!
//! A window certificate compares two exact integers for a window of indices
//! `[s, t]`: any Sidon set within distance `m0` of the sequence would need
//! `(t-s+1)^h` distinct form values, but those values all fit in an integer
//! range of size `C (b_t - b_s + 2 m0) - 1`. When the first number exceeds
//! the second, no such set exists.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear_form::LinearForm;
use crate::serde_util::bigint_string;

/// Exact counting contradiction for the index window `[s, t]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowCertificate {
    pub s: u64,
    pub t: u64,
    #[serde(with = "bigint_string")]
    pub lhs: BigInt,
    #[serde(with = "bigint_string")]
    pub rhs: BigInt,
    #[serde(with = "bigint_string")]
    pub m0: BigInt,
    pub contradiction: bool,
}

/// Result of the density hypothesis check `b_t - b_s <= (t-s+1)^(h-eps)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityCheck {
    pub epsilon: BigRational,
    /// Pairs `(s, t)` violating the hypothesis, in scan order.
    pub violations: Vec<(u64, u64)>,
}

impl DensityCheck {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

fn require_increasing(b_values: &[BigInt]) -> Result<()> {
    for (i, w) in b_values.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(Error::InvalidParameter(format!(
                "sequence is not strictly increasing at k={}",
                i + 2
            )));
        }
    }
    Ok(())
}

/// Exhaustive check of `b_t - b_s <= (t-s+1)^(h-eps)` over all pairs
/// `s < t <= K`. With `eps = p/q` the comparison is done as
/// `(b_t - b_s)^q <= (t-s+1)^(hq-p)`, all in exact integers; raising both
/// sides to the q-th power is monotone since both are positive.
pub fn density_check(
    b_values: &[BigInt],
    arity: usize,
    epsilon: &BigRational,
    prefix_len: usize,
) -> Result<DensityCheck> {
    if !epsilon.is_positive() {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let k = prefix_len.min(b_values.len());
    require_increasing(&b_values[..k])?;
    let p = epsilon.numer().clone();
    let q = epsilon
        .denom()
        .to_u32()
        .ok_or_else(|| Error::InvalidParameter("epsilon denominator too large".into()))?;
    let hq_minus_p = BigInt::from(arity) * q - &p;
    let mut violations = Vec::new();
    for s in 1..=k {
        for t in (s + 1)..=k {
            let gap = &b_values[t - 1] - &b_values[s - 1];
            let width = BigInt::from(t - s + 1);
            let holds = if hq_minus_p.is_negative() {
                let neg = (-&hq_minus_p)
                    .to_u32()
                    .ok_or_else(|| Error::InvalidParameter("exponent too large".into()))?;
                gap.pow(q) * width.pow(neg) <= BigInt::one()
            } else {
                let e = hq_minus_p
                    .to_u32()
                    .ok_or_else(|| Error::InvalidParameter("exponent too large".into()))?;
                gap.pow(q) <= width.pow(e)
            };
            if !holds {
                violations.push((s as u64, t as u64));
            }
        }
    }
    Ok(DensityCheck { epsilon: epsilon.clone(), violations })
}

/// Builds the exact certificate for one window: `lhs = (t-s+1)^h`,
/// `rhs = C (b_t - b_s + 2 m0) - 1`. The verdict is a contradiction when
/// `lhs > rhs`.
pub fn window_certificate(
    form: &LinearForm,
    b_values: &[BigInt],
    m0: &BigInt,
    s: u64,
    t: u64,
) -> Result<WindowCertificate> {
    if t <= s {
        return Err(Error::InvalidParameter(format!("window needs t > s, got s={s}, t={t}")));
    }
    if s == 0 {
        return Err(Error::InvalidParameter("indices are 1-based".into()));
    }
    if !m0.is_positive() {
        return Err(Error::InvalidParameter("m0 must be a positive integer".into()));
    }
    let (s_i, t_i) = (s as usize, t as usize);
    if t_i > b_values.len() {
        return Err(Error::SequenceExhausted { len: b_values.len(), requested: t_i });
    }
    require_increasing(&b_values[s_i - 1..t_i])?;
    let lhs = BigInt::from(t - s + 1).pow(form.arity() as u32);
    let rhs = form.norm() * (&b_values[t_i - 1] - &b_values[s_i - 1] + 2 * m0) - 1;
    let contradiction = lhs > rhs;
    Ok(WindowCertificate { s, t, lhs, rhs, m0: m0.clone(), contradiction })
}

/// Searches all windows with `t <= K`, smallest width first and then smallest
/// start, for a counting contradiction. Absence within the limit is a valid
/// result, not an error.
pub fn refute_bounded(
    form: &LinearForm,
    b_values: &[BigInt],
    m0: &BigInt,
    limit: usize,
) -> Result<Option<WindowCertificate>> {
    if !m0.is_positive() {
        return Err(Error::InvalidParameter("m0 must be a positive integer".into()));
    }
    let k = limit.min(b_values.len());
    require_increasing(&b_values[..k])?;
    for width in 1..k {
        for s in 1..=(k - width) {
            let t = s + width;
            let cert = window_certificate(form, b_values, m0, s as u64, t as u64)?;
            if cert.contradiction {
                return Ok(Some(cert));
            }
        }
    }
    Ok(None)
}

/// The inequality `4^h n^(2h-1) + n < (n+1)^(4h)` that makes the per-step
/// scan radius compatible with the `k^(4h)` deviation bound. Exact integers.
pub fn thm1_bound_holds(arity: usize, n: u64) -> bool {
    let h = arity as u32;
    let lhs = BigInt::from(4).pow(h) * BigInt::from(n).pow(2 * h - 1) + n;
    let rhs = BigInt::from(n + 1).pow(4 * h);
    lhs < rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::IntSequence;

    fn form(text: &str) -> LinearForm {
        LinearForm::parse(text).unwrap()
    }

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn rational(p: i64, q: i64) -> BigRational {
        BigRational::new(big(p), big(q))
    }

    #[test]
    fn thm1_examples() {
        assert!(thm1_bound_holds(1, 1)); // 5 < 16
        assert!(thm1_bound_holds(3, 2)); // 2050 < 531441
    }

    #[test]
    fn window_certificate_examples() {
        let f = form("1,3");
        let b: Vec<BigInt> = (1..=100i64).map(big).collect();

        let cert = window_certificate(&f, &b, &big(5), 1, 100).unwrap();
        assert_eq!(cert.lhs, big(10000));
        assert_eq!(cert.rhs, big(435));
        assert!(cert.contradiction);

        let cert = window_certificate(&f, &b, &big(5), 1, 2).unwrap();
        assert_eq!(cert.lhs, big(4));
        assert_eq!(cert.rhs, big(43));
        assert!(!cert.contradiction);

        // Width-1 window: lhs is always 2^h.
        let cert = window_certificate(&f, &b, &big(1), 7, 8).unwrap();
        assert_eq!(cert.lhs, big(4));

        assert!(window_certificate(&f, &b, &big(5), 3, 3).is_err());
        assert!(window_certificate(&f, &b, &big(0), 1, 2).is_err());
    }

    #[test]
    fn refute_finds_certificate_for_linear_sequence() {
        let f = form("1,3");
        let b: Vec<BigInt> = (1..=200i64).map(big).collect();
        let cert = refute_bounded(&f, &b, &big(5), 200).unwrap().unwrap();
        assert!(cert.contradiction);
        // First contradicting width: (d+1)^2 > 4(d+10)-1 first holds at d=8.
        assert_eq!(cert.t - cert.s, 8);
        assert_eq!(cert.s, 1);
        assert_eq!(cert.lhs, big(81));
        assert_eq!(cert.rhs, big(71));
    }

    #[test]
    fn refute_absent_for_geometric_sequence() {
        let f = form("1,3");
        let b = IntSequence::parse("geom:2,5").unwrap().prefix(50).unwrap();
        for m0 in 1..=10i64 {
            assert!(refute_bounded(&f, &b, &big(m0), 50).unwrap().is_none(), "m0={m0}");
        }
    }

    #[test]
    fn density_check_examples() {
        // b_k = k, h = 2, eps = 1/2: gaps t-s stay below (t-s+1)^(3/2).
        let b: Vec<BigInt> = (1..=50i64).map(big).collect();
        let d = density_check(&b, 2, &rational(1, 2), 50).unwrap();
        assert!(d.passes());

        // b_k = k^2 fails: at fixed width the gap grows with k.
        let sq: Vec<BigInt> = (1..=50i64).map(|k| big(k * k)).collect();
        let d = density_check(&sq, 2, &rational(1, 2), 50).unwrap();
        assert!(!d.passes());
        let &(s, t) = d.violations.first().unwrap();
        // Independent recheck of the first reported pair.
        let gap = big((t * t - s * s) as i64);
        let width = big((t - s + 1) as i64);
        assert!(gap.pow(2) > width.pow(3));
    }

    #[test]
    fn density_check_rejects_bad_epsilon() {
        let b: Vec<BigInt> = (1..=5i64).map(big).collect();
        assert!(density_check(&b, 2, &rational(0, 1), 5).is_err());
        assert!(density_check(&b, 2, &rational(-1, 2), 5).is_err());
    }

    #[test]
    fn density_check_handles_epsilon_at_least_h() {
        // h - eps < 0: the bound is below 1, so any gap >= 1 violates.
        let b: Vec<BigInt> = (1..=5i64).map(big).collect();
        let d = density_check(&b, 2, &rational(5, 2), 5).unwrap();
        assert!(!d.passes());
    }

    #[test]
    fn certificate_exists_for_dense_sequences() {
        let f2 = form("1,3");
        // b_k = k and b_k = floor(k^(3/2)) both satisfy the density
        // hypothesis for h = 2, so a certificate must appear.
        let lin: Vec<BigInt> = (1..=300i64).map(big).collect();
        assert!(refute_bounded(&f2, &lin, &big(3), 300).unwrap().is_some());
        // floor(k^(3/2)) = isqrt(k^3), exactly.
        let pow32: Vec<BigInt> = (1..=300i64).map(|k| big(k).pow(3).sqrt()).collect();
        assert!(refute_bounded(&f2, &pow32, &big(3), 300).unwrap().is_some());
    }
}
