//! Brute-force Sidon verification and the translate-disjointness extension
//! test. Everything enumerates tuples exhaustively under an explicit value
//! budget; the costs are exponential in the arity, so refusing loudly beats
//! hanging silently.
//!
//! Tuple enumeration order is fixed everywhere: an odometer over the set in
//! increasing element order with the last coordinate moving fastest. Witnesses
//! refer to that order, so results are deterministic regardless of how the
//! enumeration is partitioned across threads.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linear_form::{IndexSet, LinearForm, DEFAULT_ARITY_CEILING};

/// Default ceiling on the number of enumerated values per operation.
pub const DEFAULT_VALUE_BUDGET: u128 = 100_000_000;

/// A finite set of integers, kept strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSet {
    elements: Vec<BigInt>,
}

impl FiniteSet {
    /// Sorts the input; duplicate elements are rejected.
    pub fn new(mut elements: Vec<BigInt>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidParameter("set must be nonempty".into()));
        }
        elements.sort();
        for w in elements.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidParameter(format!(
                    "duplicate element {} in set",
                    w[0]
                )));
            }
        }
        Ok(FiniteSet { elements })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // nonempty by construction
    }

    pub fn elements(&self) -> &[BigInt] {
        &self.elements
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    /// The set with one more element; errors if it is already present.
    pub fn with_element(&self, b: &BigInt) -> Result<Self> {
        match self.elements.binary_search(b) {
            Ok(_) => Err(Error::ElementInSet(b.clone())),
            Err(pos) => {
                let mut elements = self.elements.clone();
                elements.insert(pos, b.clone());
                Ok(FiniteSet { elements })
            }
        }
    }
}

/// Two distinct tuples with equal value under the form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollisionWitness {
    pub tuple1: Vec<BigInt>,
    pub tuple2: Vec<BigInt>,
    pub value: BigInt,
}

/// Result of a brute-force Sidon check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SidonVerdict {
    Sidon,
    NotSidon(CollisionWitness),
}

impl SidonVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, SidonVerdict::Sidon)
    }

    pub fn witness(&self) -> Option<&CollisionWitness> {
        match self {
            SidonVerdict::Sidon => None,
            SidonVerdict::NotSidon(w) => Some(w),
        }
    }
}

/// The full phi-image of a set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiImage {
    /// Total number of tuples enumerated, `|A|^h`.
    pub total_tuples: u128,
    /// Number of distinct values.
    pub distinct: usize,
    /// The distinct values, sorted.
    pub values: BTreeSet<BigInt>,
}

/// All `2^h` translates `Phi_J(A, b)` keyed by the subset mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslateFamily {
    arity: usize,
    sets: BTreeMap<u64, BTreeSet<BigInt>>,
}

impl TranslateFamily {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn get(&self, j: IndexSet) -> &BTreeSet<BigInt> {
        &self.sets[&j.mask()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (IndexSet, &BTreeSet<BigInt>)> {
        let arity = self.arity;
        self.sets
            .iter()
            .map(move |(&mask, set)| (IndexSet::from_mask(mask, arity), set))
    }
}

/// Conflict found by the extension test: two distinct subsets whose translates
/// share a value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendConflict {
    pub j1: IndexSet,
    pub j2: IndexSet,
    pub value: BigInt,
}

/// Result of the translate-disjointness extension test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtendVerdict {
    Extendable,
    Conflict(ExtendConflict),
}

impl ExtendVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, ExtendVerdict::Extendable)
    }
}

fn checked_pow(base: usize, exp: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
    }
    Some(acc)
}

fn enumeration_size(n: usize, h: usize, budget: u128, what: &'static str) -> Result<u128> {
    match checked_pow(n, h) {
        Some(total) if total <= budget => Ok(total),
        Some(total) => Err(Error::BudgetExceeded { required: total, budget, what }),
        None => Err(Error::BudgetExceeded { required: u128::MAX, budget, what }),
    }
}

/// Decodes a tuple rank into element indices, last coordinate fastest.
fn decode_rank(mut rank: u128, n: usize, len: usize) -> Vec<usize> {
    let mut idx = vec![0usize; len];
    for slot in (0..len).rev() {
        idx[slot] = (rank % n as u128) as usize;
        rank /= n as u128;
    }
    idx
}

fn tuple_at(a: &FiniteSet, rank: u128, len: usize) -> Vec<BigInt> {
    decode_rank(rank, a.len(), len)
        .into_iter()
        .map(|i| a.elements()[i].clone())
        .collect()
}

/// Value of the contraction to `positions` (1-based, ascending) on the tuple
/// with the given rank.
fn contraction_value(form: &LinearForm, a: &FiniteSet, positions: &[usize], rank: u128) -> BigInt {
    let idx = decode_rank(rank, a.len(), positions.len());
    let mut v = BigInt::zero();
    for (slot, &p) in positions.iter().enumerate() {
        v += form.coeff(p) * &a.elements()[idx[slot]];
    }
    v
}

/// All `|A|^h` values in enumeration order. Work is split across threads by
/// the leading coordinate; chunks are concatenated back in order, so the
/// result is independent of the worker count.
fn phi_values_ordered(form: &LinearForm, a: &FiniteSet, total: u128) -> Vec<BigInt> {
    let h = form.arity();
    let n = a.len();
    if h == 1 {
        return (0..n).map(|i| form.coeff(1) * &a.elements()[i]).collect();
    }
    let inner = total / n as u128;
    let rest: Vec<usize> = (2..=h).collect();
    (0..n)
        .into_par_iter()
        .map(|i0| {
            let lead = form.coeff(1) * &a.elements()[i0];
            (0..inner)
                .map(|r| &lead + contraction_value(form, a, &rest, r))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat()
}

/// Computes the phi-image of `A`: every value of the form over `A^h`.
pub fn phi_image(form: &LinearForm, a: &FiniteSet, budget: u128) -> Result<PhiImage> {
    let total = enumeration_size(a.len(), form.arity(), budget, "phi-image enumeration")?;
    let values_ordered = phi_values_ordered(form, a, total);
    let values: BTreeSet<BigInt> = values_ordered.into_iter().collect();
    Ok(PhiImage { total_tuples: total, distinct: values.len(), values })
}

/// Brute-force Sidon check: `A` is Sidon for the form iff all `|A|^h` tuple
/// values are distinct. On failure returns the first collision in enumeration
/// order, with `tuple1` the earlier tuple.
pub fn is_sidon(form: &LinearForm, a: &FiniteSet, budget: u128) -> Result<SidonVerdict> {
    let h = form.arity();
    let total = enumeration_size(a.len(), h, budget, "Sidon verification enumeration")?;
    let values = phi_values_ordered(form, a, total);
    let mut seen: HashMap<&BigInt, u128> = HashMap::with_capacity(values.len());
    for (rank, v) in values.iter().enumerate() {
        let rank = rank as u128;
        if let Some(&first) = seen.get(v) {
            return Ok(SidonVerdict::NotSidon(CollisionWitness {
                tuple1: tuple_at(a, first, h),
                tuple2: tuple_at(a, rank, h),
                value: v.clone(),
            }));
        }
        seen.insert(v, rank);
    }
    Ok(SidonVerdict::Sidon)
}

/// Builds all `2^h` translates `Phi_J(A, b) = phi_J(A) + s(J^c) b`.
pub fn translate_family(
    form: &LinearForm,
    a: &FiniteSet,
    b: &BigInt,
    budget: u128,
) -> Result<TranslateFamily> {
    if a.contains(b) {
        return Err(Error::ElementInSet(b.clone()));
    }
    let h = form.arity();
    enumeration_size(a.len() + 1, h, budget, "translate-family enumeration")?;
    let mut sets = BTreeMap::new();
    for j in IndexSet::all_subsets(h) {
        let shift = form.subset_sum(j.complement()) * b;
        let positions = j.positions();
        let count = checked_pow(a.len(), positions.len()).expect("within budget");
        let mut set = BTreeSet::new();
        for r in 0..count {
            set.insert(contraction_value(form, a, &positions, r) + &shift);
        }
        sets.insert(j.mask(), set);
    }
    Ok(TranslateFamily { arity: h, sets })
}

/// Single-element extension test: `A ∪ {b}` is Sidon iff `A` is Sidon and
/// all `2^h` translates are pairwise disjoint. One hash pass over the
/// `(|A|+1)^h` translate values, recording which subset produced each value.
///
/// A repeated value inside a single translate means `A` itself was not Sidon,
/// which breaches the caller's precondition and is reported as an error
/// rather than a conflict.
pub fn can_extend(
    form: &LinearForm,
    a: &FiniteSet,
    b: &BigInt,
    budget: u128,
) -> Result<ExtendVerdict> {
    if a.contains(b) {
        return Err(Error::ElementInSet(b.clone()));
    }
    let h = form.arity();
    enumeration_size(a.len() + 1, h, budget, "extension-test enumeration")?;
    let mut seen: HashMap<BigInt, u64> = HashMap::new();
    for j in IndexSet::all_subsets(h) {
        let shift = form.subset_sum(j.complement()) * b;
        let positions = j.positions();
        let count = checked_pow(a.len(), positions.len()).expect("within budget");
        for r in 0..count {
            let v = contraction_value(form, a, &positions, r) + &shift;
            match seen.get(&v) {
                None => {
                    seen.insert(v, j.mask());
                }
                Some(&prev) if prev == j.mask() => {
                    return Err(Error::NotSidon(format!(
                        "value {v} repeats inside the translate of subset {:?}",
                        j.positions()
                    )));
                }
                Some(&prev) => {
                    return Ok(ExtendVerdict::Conflict(ExtendConflict {
                        j1: IndexSet::from_mask(prev, h),
                        j2: j,
                        value: v,
                    }));
                }
            }
        }
    }
    Ok(ExtendVerdict::Extendable)
}

/// The finite set of integers `b` that cannot extend `A`: solutions of the
/// crossed-translate equation over all ordered pairs of distinct subsets.
/// Retained as a small-scale oracle for `can_extend`; the denominator is
/// nonzero exactly because the form has property N, which is checked first.
pub fn forbidden_values(
    form: &LinearForm,
    a: &FiniteSet,
    budget: u128,
) -> Result<BTreeSet<BigInt>> {
    let h = form.arity();
    if !form.property_n(DEFAULT_ARITY_CEILING)?.holds() {
        return Err(Error::PropertyNRequired);
    }
    // Total pair cost: sum over ordered distinct (J1, J2) of n^(|J1|+|J2|),
    // i.e. (n+1)^2h minus the diagonal (n^2+1)^h.
    let n = a.len();
    let required = checked_pow(n + 1, 2 * h)
        .zip(checked_pow(n * n + 1, h))
        .map(|(all, diag)| all - diag);
    match required {
        Some(required) if required <= budget => {}
        _ => {
            return Err(Error::BudgetExceeded {
                required: required.unwrap_or(u128::MAX),
                budget,
                what: "forbidden-value enumeration",
            })
        }
    }

    // Materialize each contraction's value list once, then combine pairs.
    let mut values_by_mask: BTreeMap<u64, Vec<BigInt>> = BTreeMap::new();
    for j in IndexSet::all_subsets(h) {
        let positions = j.positions();
        let count = checked_pow(a.len(), positions.len()).expect("within budget");
        let vals = (0..count)
            .map(|r| contraction_value(form, a, &positions, r))
            .collect();
        values_by_mask.insert(j.mask(), vals);
    }

    let mut out = BTreeSet::new();
    for j1 in IndexSet::all_subsets(h) {
        for j2 in IndexSet::all_subsets(h) {
            if j1 == j2 {
                continue;
            }
            let denom = form.subset_sum(j2.complement()) - form.subset_sum(j1.complement());
            debug_assert!(!denom.is_zero(), "property N guarantees a nonzero denominator");
            for v1 in &values_by_mask[&j1.mask()] {
                for v2 in &values_by_mask[&j2.mask()] {
                    let numer = v1 - v2;
                    let (q, r) = numer.div_rem(&denom);
                    if r.is_zero() {
                        out.insert(q);
                    }
                }
            }
        }
    }
    Ok(out)
}
