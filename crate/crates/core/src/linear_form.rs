//! Integer linear forms `c_1 x_1 + ... + c_h x_h`, their subset sums, and the
//! property-N decision (no two disjoint nonempty index subsets share a
//! coefficient sum). Property N is what makes nontrivial Sidon sets for the
//! form possible at all, so everything downstream starts here.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Default ceiling on the arity of exhaustive property-N checks (3^h states).
pub const DEFAULT_ARITY_CEILING: usize = 20;

/// A subset of the coefficient positions `{1, ..., h}`, stored as a bitmask.
/// Bit `i-1` set means position `i` is in the subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexSet {
    mask: u64,
    arity: usize,
}

impl IndexSet {
    pub fn from_mask(mask: u64, arity: usize) -> Self {
        debug_assert!(arity <= 63);
        debug_assert_eq!(mask & !Self::full(arity).mask, 0);
        IndexSet { mask, arity }
    }

    pub fn empty(arity: usize) -> Self {
        IndexSet { mask: 0, arity }
    }

    pub fn full(arity: usize) -> Self {
        IndexSet { mask: (1u64 << arity) - 1, arity }
    }

    /// Builds from 1-based positions.
    pub fn from_positions(arity: usize, positions: &[usize]) -> Result<Self> {
        let mut mask = 0u64;
        for &p in positions {
            if p == 0 || p > arity {
                return Err(Error::InvalidParameter(format!(
                    "position {p} out of range 1..={arity}"
                )));
            }
            mask |= 1 << (p - 1);
        }
        Ok(IndexSet { mask, arity })
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn cardinality(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, position: usize) -> bool {
        position >= 1 && position <= self.arity && (self.mask >> (position - 1)) & 1 == 1
    }

    pub fn complement(&self) -> Self {
        IndexSet { mask: Self::full(self.arity).mask & !self.mask, arity: self.arity }
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.mask & other.mask == 0
    }

    /// 1-based positions in increasing order.
    pub fn positions(&self) -> Vec<usize> {
        (1..=self.arity).filter(|&p| self.contains(p)).collect()
    }

    /// All `2^arity` subsets in increasing bitmask order.
    pub fn all_subsets(arity: usize) -> impl Iterator<Item = IndexSet> {
        (0..(1u64 << arity)).map(move |mask| IndexSet { mask, arity })
    }
}

/// Two disjoint nonempty index subsets with the same coefficient sum: the
/// obstruction that defeats property N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NWitness {
    pub i1: IndexSet,
    pub i2: IndexSet,
    pub common_sum: BigInt,
}

/// Outcome of the exhaustive property-N check.
///
/// `zero_sum_subset` is a diagnostic only: a nonempty subset whose
/// coefficients sum to zero does not defeat property N as defined (both
/// subsets must be nonempty), but it is worth reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyN {
    pub witness: Option<NWitness>,
    pub zero_sum_subset: Option<IndexSet>,
}

impl PropertyN {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// An integer linear form with all coefficients nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    coeffs: Vec<BigInt>,
    norm: BigInt,
}

impl LinearForm {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Parse("coefficient list is empty".into()));
        }
        if coeffs.len() > 63 {
            return Err(Error::ArityTooLarge { arity: coeffs.len(), ceiling: 63 });
        }
        if let Some(pos) = coeffs.iter().position(|c| c.is_zero()) {
            return Err(Error::ZeroCoefficient { position: pos + 1 });
        }
        let norm = coeffs.iter().map(|c| c.abs()).sum();
        Ok(LinearForm { coeffs, norm })
    }

    /// Parses a comma-separated coefficient list such as `1,-2,4`.
    pub fn parse(text: &str) -> Result<Self> {
        let coeffs = text
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("`{tok}` is not an integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        LinearForm::new(coeffs)
    }

    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient at 1-based position.
    pub fn coeff(&self, position: usize) -> &BigInt {
        &self.coeffs[position - 1]
    }

    /// The norm `C = sum |c_i|`.
    pub fn norm(&self) -> &BigInt {
        &self.norm
    }

    /// Subset sum `s_I = sum_{i in I} c_i`, with `s_empty = 0`.
    pub fn subset_sum(&self, set: IndexSet) -> BigInt {
        debug_assert_eq!(set.arity(), self.arity());
        let mut sum = BigInt::zero();
        for p in 1..=self.arity() {
            if set.contains(p) {
                sum += self.coeff(p);
            }
        }
        sum
    }

    /// The contraction to the positions in `J`, with the original positions
    /// retained for reporting.
    pub fn contraction(&self, j: IndexSet) -> Result<Contraction> {
        if j.is_empty() {
            return Err(Error::InvalidParameter(
                "contraction to the empty index set is not a linear form".into(),
            ));
        }
        let positions = j.positions();
        let coeffs = positions.iter().map(|&p| self.coeff(p).clone()).collect();
        Ok(Contraction { form: LinearForm::new(coeffs)?, positions })
    }

    /// Decides property N by exhausting all assignments of each position to
    /// one of {neither, I1, I2}, i.e. a ternary counter with position 1 as
    /// the least significant digit. The first counter value where both parts
    /// are nonempty and the sums agree yields the witness, reported with the
    /// smaller side (by cardinality, then mask) as I1.
    pub fn property_n(&self, arity_ceiling: usize) -> Result<PropertyN> {
        let h = self.arity();
        if h > arity_ceiling {
            return Err(Error::ArityTooLarge { arity: h, ceiling: arity_ceiling });
        }
        let witness = self.first_n_witness();
        let zero_sum_subset = IndexSet::all_subsets(h)
            .filter(|s| !s.is_empty())
            .find(|&s| self.subset_sum(s).is_zero());
        Ok(PropertyN { witness, zero_sum_subset })
    }

    fn first_n_witness(&self) -> Option<NWitness> {
        let h = self.arity();
        // Recursing from position h outermost to position 1 innermost with
        // digits tried in order 0,1,2 visits assignments in exactly
        // increasing ternary-counter order.
        let mut i1 = 0u64;
        let mut i2 = 0u64;
        let mut sum1 = BigInt::zero();
        let mut sum2 = BigInt::zero();
        let w = self.witness_search(h, &mut i1, &mut i2, &mut sum1, &mut sum2)?;
        // The two sides of a witness are interchangeable; report the smaller
        // one (by cardinality, then mask) as I1.
        let key = |s: &IndexSet| (s.cardinality(), s.mask());
        if key(&w.i2) < key(&w.i1) {
            Some(NWitness { i1: w.i2, i2: w.i1, common_sum: w.common_sum })
        } else {
            Some(w)
        }
    }

    fn witness_search(
        &self,
        position: usize,
        i1: &mut u64,
        i2: &mut u64,
        sum1: &mut BigInt,
        sum2: &mut BigInt,
    ) -> Option<NWitness> {
        if position == 0 {
            if *i1 != 0 && *i2 != 0 && sum1 == sum2 {
                return Some(NWitness {
                    i1: IndexSet::from_mask(*i1, self.arity()),
                    i2: IndexSet::from_mask(*i2, self.arity()),
                    common_sum: sum1.clone(),
                });
            }
            return None;
        }
        let bit = 1u64 << (position - 1);
        let c = self.coeff(position).clone();

        if let Some(w) = self.witness_search(position - 1, i1, i2, sum1, sum2) {
            return Some(w);
        }
        *i1 |= bit;
        *sum1 += &c;
        if let Some(w) = self.witness_search(position - 1, i1, i2, sum1, sum2) {
            return Some(w);
        }
        *i1 &= !bit;
        *sum1 -= &c;

        *i2 |= bit;
        *sum2 += &c;
        if let Some(w) = self.witness_search(position - 1, i1, i2, sum1, sum2) {
            return Some(w);
        }
        *i2 &= !bit;
        *sum2 -= &c;
        None
    }
}

/// A contraction `phi_J` together with the original 1-based positions of its
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    pub form: LinearForm,
    pub positions: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(text: &str) -> LinearForm {
        LinearForm::parse(text).unwrap()
    }

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn parse_basic() {
        let f = form("1,3");
        assert_eq!(f.arity(), 2);
        assert_eq!(f.norm(), &big(4));

        let f = form("1,-2,4");
        assert_eq!(f.arity(), 3);
        assert_eq!(f.norm(), &big(7));
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(
            LinearForm::parse("1,0,2"),
            Err(Error::ZeroCoefficient { position: 2 })
        ));
        assert!(matches!(LinearForm::parse(""), Err(Error::Parse(_))));
        assert!(matches!(LinearForm::parse("1,x"), Err(Error::Parse(_))));
    }

    #[test]
    fn subset_sums() {
        let f = form("1,2,4");
        let i = IndexSet::from_positions(3, &[1, 3]).unwrap();
        assert_eq!(f.subset_sum(i), big(5));
        assert_eq!(f.subset_sum(IndexSet::empty(3)), big(0));

        let f = form("1,-2,4");
        assert_eq!(f.subset_sum(IndexSet::full(3)), big(3));
    }

    #[test]
    fn subset_sum_additive_on_disjoint_sets() {
        let f = form("3,-5,7,11");
        let i = IndexSet::from_positions(4, &[1, 4]).unwrap();
        let j = IndexSet::from_positions(4, &[2]).unwrap();
        assert!(i.is_disjoint(&j));
        let union = IndexSet::from_mask(i.mask() | j.mask(), 4);
        assert_eq!(f.subset_sum(union), f.subset_sum(i) + f.subset_sum(j));
    }

    #[test]
    fn property_n_examples() {
        let r = form("1,1").property_n(DEFAULT_ARITY_CEILING).unwrap();
        assert!(!r.holds());
        let w = r.witness.unwrap();
        assert_eq!(w.i1.positions(), vec![1]);
        assert_eq!(w.i2.positions(), vec![2]);
        assert_eq!(w.common_sum, big(1));

        assert!(form("1,3").property_n(DEFAULT_ARITY_CEILING).unwrap().holds());
        assert!(form("1,2,4").property_n(DEFAULT_ARITY_CEILING).unwrap().holds());

        let r = form("1,2,3").property_n(DEFAULT_ARITY_CEILING).unwrap();
        assert!(!r.holds());
        let w = r.witness.unwrap();
        assert_eq!(w.i1.positions(), vec![3]);
        assert_eq!(w.i2.positions(), vec![1, 2]);
        assert_eq!(w.common_sum, big(3));
    }

    #[test]
    fn witness_sums_reproduce() {
        for text in ["1,1", "1,2,3", "4,2,2", "5,3,-3,5"] {
            let f = form(text);
            let r = f.property_n(DEFAULT_ARITY_CEILING).unwrap();
            let w = r.witness.expect(text);
            assert!(w.i1.is_disjoint(&w.i2));
            assert!(!w.i1.is_empty() && !w.i2.is_empty());
            assert_eq!(f.subset_sum(w.i1), w.common_sum);
            assert_eq!(f.subset_sum(w.i2), w.common_sum);
        }
    }

    #[test]
    fn equal_coefficients_never_property_n() {
        let r = form("7,2,7").property_n(DEFAULT_ARITY_CEILING).unwrap();
        assert!(!r.holds());
    }

    #[test]
    fn zero_sum_subset_is_diagnostic_only() {
        // -3+1+2 = 0, but a vanishing subset sum is not a property-N
        // violation: both subsets of a witness must be nonempty.
        let r = form("-3,1,2").property_n(DEFAULT_ARITY_CEILING).unwrap();
        assert!(r.holds());
        assert_eq!(r.zero_sum_subset.unwrap().positions(), vec![1, 2, 3]);

        let r = form("1,3").property_n(DEFAULT_ARITY_CEILING).unwrap();
        assert!(r.zero_sum_subset.is_none());
    }

    #[test]
    fn arity_ceiling_enforced() {
        let coeffs: Vec<BigInt> = (1..=21).map(big).collect();
        let f = LinearForm::new(coeffs).unwrap();
        assert!(matches!(
            f.property_n(DEFAULT_ARITY_CEILING),
            Err(Error::ArityTooLarge { arity: 21, ceiling: 20 })
        ));
    }

    #[test]
    fn contraction_examples() {
        let f = form("1,-2,4");
        let j = IndexSet::from_positions(3, &[1, 3]).unwrap();
        let c = f.contraction(j).unwrap();
        assert_eq!(c.form.coeffs(), &[big(1), big(4)]);
        assert_eq!(c.positions, vec![1, 3]);

        let f = form("1,3");
        let c = f.contraction(IndexSet::full(2)).unwrap();
        assert_eq!(c.form, f);

        let c = f.contraction(IndexSet::from_positions(2, &[2]).unwrap()).unwrap();
        assert_eq!(c.form.coeffs(), &[big(3)]);

        assert!(f.contraction(IndexSet::empty(2)).is_err());
    }

    /// Independent oracle: two nested loops over all subset pairs, no ternary
    /// counter, no shared code with the implementation path.
    fn property_n_oracle(f: &LinearForm) -> bool {
        let h = f.arity();
        for m1 in 1u64..(1 << h) {
            for m2 in 1u64..(1 << h) {
                if m1 & m2 != 0 {
                    continue;
                }
                let s1 = f.subset_sum(IndexSet::from_mask(m1, h));
                let s2 = f.subset_sum(IndexSet::from_mask(m2, h));
                if s1 == s2 {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn agrees_with_nested_subset_oracle() {
        // Dense small-coefficient grid, the regime where collisions live.
        let range = -4i64..=4;
        for a in range.clone() {
            for b in range.clone() {
                for c in range.clone() {
                    if a == 0 || b == 0 || c == 0 {
                        continue;
                    }
                    let f = LinearForm::new(vec![big(a), big(b), big(c)]).unwrap();
                    let got = f.property_n(DEFAULT_ARITY_CEILING).unwrap().holds();
                    assert_eq!(got, property_n_oracle(&f), "form {a},{b},{c}");
                }
            }
        }
    }

    #[test]
    fn agrees_with_oracle_wider_arity() {
        let cases: Vec<Vec<i64>> = vec![
            vec![1, 2, 4, 8, 16, 32],
            vec![1, 2, 4, 8, 15],
            vec![3, 5, -7, 11, 13, -17, 19],
            vec![1, -1, 2, -2, 4, -4, 8, 16, 32, 64],
            vec![1, 2, 4, 9, 17, 33, 65, 129, 257, 513],
        ];
        for coeffs in cases {
            let f = LinearForm::new(coeffs.iter().copied().map(big).collect()).unwrap();
            let got = f.property_n(DEFAULT_ARITY_CEILING).unwrap().holds();
            assert_eq!(got, property_n_oracle(&f), "form {coeffs:?}");
        }
    }
}
