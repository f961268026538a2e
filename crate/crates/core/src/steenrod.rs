//! The mod-2 Steenrod algebra in the admissible basis.
//!
//! Elements are GF(2)-sums of admissible monomials `Sq^{i_1} ... Sq^{i_k}`
//! with `i_j >= 2 i_{j+1}`. Products are reduced with the Adem relations
//!
//! ```text
//! Sq^a Sq^b = sum_c binom(b - c - 1, a - 2c) Sq^{a+b-c} Sq^c      (a < 2b)
//! ```
//!
//! and the reduction of `Sq^a * m` for admissible `m` is memoized
//! process-wide, which covers every inadmissible pair `(a, b)`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use thiserror::Error;

use crate::gf2::{self, Gf2Matrix, Gf2Vector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SteenrodError {
    #[error("Sq^0 is not a valid factor; write the unit as `1`")]
    ZeroIndex,
    #[error("monomial {0:?} is not admissible")]
    NotAdmissible(Vec<usize>),
    #[error("expected a homogeneous element of degree {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: String },
    #[error("subalgebra level must be at least 1, got {0}")]
    InvalidLevel(usize),
}

/// `binom(n, k) mod 2` by Lucas' theorem.
#[inline]
pub fn binom2(n: usize, k: usize) -> bool {
    k <= n && (k & !n) == 0
}

pub fn is_admissible(indices: &[usize]) -> bool {
    indices.iter().all(|&i| i >= 1) && indices.windows(2).all(|w| w[0] >= 2 * w[1])
}

/// An admissible monomial; the empty sequence is the unit.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AdmissibleMonomial(Vec<usize>);

impl AdmissibleMonomial {
    pub fn new(indices: Vec<usize>) -> Result<Self, SteenrodError> {
        if indices.contains(&0) {
            return Err(SteenrodError::ZeroIndex);
        }
        if !is_admissible(&indices) {
            return Err(SteenrodError::NotAdmissible(indices));
        }
        Ok(Self(indices))
    }

    pub fn unit() -> Self {
        Self(Vec::new())
    }

    /// `Sq^n`; `Sq^0` is the unit.
    pub fn sq(n: usize) -> Self {
        if n == 0 {
            Self::unit()
        } else {
            Self(vec![n])
        }
    }

    fn from_trusted(indices: Vec<usize>) -> Self {
        debug_assert!(is_admissible(&indices), "{indices:?}");
        Self(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_unit()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn excess(&self) -> usize {
        excess(self)
    }
}

/// `2 i_1 - degree`, zero for the unit.
pub fn excess(m: &AdmissibleMonomial) -> usize {
    match m.0.first() {
        None => 0,
        Some(&first) => {
            let e = 2 * first as isize - m.degree() as isize;
            assert!(e >= 0, "negative excess on admissible monomial {:?}", m.0);
            e as usize
        }
    }
}

impl Ord for AdmissibleMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        // degree first, then indices in decreasing lexicographic order
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for AdmissibleMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for AdmissibleMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for AdmissibleMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "Sq{i}")?;
        }
        Ok(())
    }
}

/// A formal sum of (not necessarily admissible) monomials; parser output.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SteenrodExpression {
    terms: Vec<Vec<usize>>,
}

impl SteenrodExpression {
    pub fn new(terms: Vec<Vec<usize>>) -> Result<Self, SteenrodError> {
        if terms.iter().flatten().any(|&i| i == 0) {
            return Err(SteenrodError::ZeroIndex);
        }
        Ok(Self { terms })
    }

    pub fn monomial(indices: Vec<usize>) -> Result<Self, SteenrodError> {
        Self::new(vec![indices])
    }

    pub fn terms(&self) -> &[Vec<usize>] {
        &self.terms
    }
}

impl fmt::Display for SteenrodExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if t.is_empty() {
                f.write_str("1")?;
            }
            for (j, i) in t.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "Sq{i}")?;
            }
        }
        Ok(())
    }
}

/// An element of the Steenrod algebra in canonical admissible form.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct AdmissibleSum(BTreeSet<AdmissibleMonomial>);

impl AdmissibleSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from(AdmissibleMonomial::unit())
    }

    pub fn sq(n: usize) -> Self {
        Self::from(AdmissibleMonomial::sq(n))
    }

    /// Toggles a monomial (GF(2) addition).
    pub fn add_monomial(&mut self, m: AdmissibleMonomial) {
        if !self.0.remove(&m) {
            self.0.insert(m);
        }
    }

    pub fn add_assign(&mut self, other: &AdmissibleSum) {
        for m in &other.0 {
            self.add_monomial(m.clone());
        }
    }

    pub fn sum(&self, other: &AdmissibleSum) -> AdmissibleSum {
        let mut s = self.clone();
        s.add_assign(other);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, m: &AdmissibleMonomial) -> bool {
        self.0.contains(m)
    }

    pub fn terms(&self) -> impl Iterator<Item = &AdmissibleMonomial> {
        self.0.iter()
    }

    /// The common degree of all terms; `None` for zero or mixed sums.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.0.iter().map(AdmissibleMonomial::degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    /// Coordinates in [`full_basis`] of `degree`; terms of other degrees
    /// are ignored.
    pub fn coordinates(&self, degree: usize) -> Gf2Vector {
        let basis = degree_basis(degree);
        Gf2Vector::from_indices(
            basis.monomials.len(),
            self.0
                .iter()
                .filter(|m| m.degree() == degree)
                .map(|m| basis.index[m]),
        )
    }

    pub fn from_coordinates(degree: usize, coords: &Gf2Vector) -> AdmissibleSum {
        let basis = degree_basis(degree);
        coords
            .ones()
            .map(|i| basis.monomials[i].clone())
            .collect()
    }

    pub fn to_expression(&self) -> SteenrodExpression {
        SteenrodExpression {
            terms: self.0.iter().map(|m| m.0.clone()).collect(),
        }
    }
}

impl From<AdmissibleMonomial> for AdmissibleSum {
    fn from(m: AdmissibleMonomial) -> Self {
        Self(BTreeSet::from([m]))
    }
}

impl FromIterator<AdmissibleMonomial> for AdmissibleSum {
    fn from_iter<T: IntoIterator<Item = AdmissibleMonomial>>(iter: T) -> Self {
        let mut s = Self::zero();
        for m in iter {
            s.add_monomial(m);
        }
        s
    }
}

impl fmt::Debug for AdmissibleSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for AdmissibleSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (k, m) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

type HeadMemo = RwLock<HashMap<(usize, AdmissibleMonomial), AdmissibleSum>>;

fn head_memo() -> &'static HeadMemo {
    static MEMO: OnceLock<HeadMemo> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// The admissible terms `(a + b - c, c)` of the Adem relation for `Sq^a Sq^b`
/// with odd coefficient. Requires `0 < a < 2b`.
pub fn adem_terms(a: usize, b: usize) -> Vec<(usize, usize)> {
    assert!(a > 0 && a < 2 * b, "Sq{a} Sq{b} is admissible");
    (0..=a / 2)
        .filter(|&c| binom2(b - c - 1, a - 2 * c))
        .map(|c| (a + b - c, c))
        .collect()
}

/// `Sq^a * m` in admissible form, for admissible `m`.
fn head_times(a: usize, m: &AdmissibleMonomial) -> AdmissibleSum {
    if a == 0 {
        return AdmissibleSum::from(m.clone());
    }
    match m.0.first() {
        None => return AdmissibleSum::sq(a),
        Some(&b) if a >= 2 * b => {
            let mut v = Vec::with_capacity(m.len() + 1);
            v.push(a);
            v.extend_from_slice(&m.0);
            return AdmissibleSum::from(AdmissibleMonomial::from_trusted(v));
        }
        Some(_) => {}
    }
    let key = (a, m.clone());
    if let Some(hit) = head_memo().read().unwrap().get(&key) {
        return hit.clone();
    }
    let b = m.0[0];
    let rest = AdmissibleMonomial::from_trusted(m.0[1..].to_vec());
    let mut out = AdmissibleSum::zero();
    for (hi, lo) in adem_terms(a, b) {
        for t in head_times(lo, &rest).terms() {
            out.add_assign(&head_times(hi, t));
        }
    }
    head_memo().write().unwrap().insert(key, out.clone());
    out
}

/// `Sq^a * x` for an admissible sum `x`.
pub fn sq_times(a: usize, x: &AdmissibleSum) -> AdmissibleSum {
    let mut out = AdmissibleSum::zero();
    for m in x.terms() {
        out.add_assign(&head_times(a, m));
    }
    out
}

/// Normalizes an arbitrary word `Sq^{w_1} ... Sq^{w_k}`; zero entries are
/// read as `Sq^0 = 1`.
pub fn normalize_word(word: &[usize]) -> AdmissibleSum {
    let mut acc = AdmissibleSum::one();
    for &a in word.iter().rev() {
        acc = sq_times(a, &acc);
    }
    acc
}

/// Reduces an expression to canonical admissible form.
pub fn adem_normalize(e: &SteenrodExpression) -> AdmissibleSum {
    let mut out = AdmissibleSum::zero();
    for t in e.terms() {
        out.add_assign(&normalize_word(t));
    }
    out
}

/// Plain rewriting without memoization: repeatedly replaces one inadmissible
/// adjacent pair, chosen by `choose` from the list of candidate positions.
///
/// Used to check that the normal form does not depend on the rewriting order.
pub fn normalize_by_rewriting(
    e: &SteenrodExpression,
    choose: &mut dyn FnMut(&[usize]) -> usize,
) -> AdmissibleSum {
    let mut pending: Vec<Vec<usize>> = e.terms().to_vec();
    let mut done = AdmissibleSum::zero();
    while let Some(word) = pending.pop() {
        let positions: Vec<usize> = word
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] < 2 * w[1])
            .map(|(p, _)| p)
            .collect();
        if positions.is_empty() {
            done.add_monomial(AdmissibleMonomial::from_trusted(word));
            continue;
        }
        let p = positions[choose(&positions) % positions.len()];
        let (a, b) = (word[p], word[p + 1]);
        for (hi, lo) in adem_terms(a, b) {
            let mut w = word[..p].to_vec();
            w.push(hi);
            if lo > 0 {
                w.push(lo);
            }
            w.extend_from_slice(&word[p + 2..]);
            pending.push(w);
        }
    }
    done
}

pub fn multiply(a: &AdmissibleSum, b: &AdmissibleSum) -> AdmissibleSum {
    let mut out = AdmissibleSum::zero();
    for ma in a.terms() {
        let mut acc = b.clone();
        for &i in ma.indices().iter().rev() {
            acc = sq_times(i, &acc);
        }
        out.add_assign(&acc);
    }
    out
}

type ChiMemo = RwLock<HashMap<usize, AdmissibleSum>>;

fn chi_memo() -> &'static ChiMemo {
    static MEMO: OnceLock<ChiMemo> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// `chi(Sq^n)` from `sum_{i+j=n} Sq^i chi(Sq^j) = 0`.
pub fn conjugate_sq(n: usize) -> AdmissibleSum {
    if n == 0 {
        return AdmissibleSum::one();
    }
    if let Some(hit) = chi_memo().read().unwrap().get(&n) {
        return hit.clone();
    }
    let mut out = AdmissibleSum::zero();
    for i in 1..=n {
        out.add_assign(&sq_times(i, &conjugate_sq(n - i)));
    }
    chi_memo().write().unwrap().insert(n, out.clone());
    out
}

/// The conjugation anti-automorphism.
pub fn conjugate(a: &AdmissibleSum) -> AdmissibleSum {
    let mut out = AdmissibleSum::zero();
    for m in a.terms() {
        let mut acc = AdmissibleSum::one();
        for &i in m.indices() {
            acc = multiply(&conjugate_sq(i), &acc);
        }
        out.add_assign(&acc);
    }
    out
}

struct DegreeBasis {
    monomials: Vec<AdmissibleMonomial>,
    index: HashMap<AdmissibleMonomial, usize>,
}

fn degree_basis(degree: usize) -> Arc<DegreeBasis> {
    static MEMO: OnceLock<RwLock<HashMap<usize, Arc<DegreeBasis>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(hit) = memo.read().unwrap().get(&degree) {
        return hit.clone();
    }
    let mut seqs = Vec::new();
    admissible_sequences(degree, degree, &mut Vec::new(), &mut seqs);
    let mut monomials: Vec<_> = seqs.into_iter().map(AdmissibleMonomial::from_trusted).collect();
    monomials.sort();
    let index = monomials
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();
    let basis = Arc::new(DegreeBasis { monomials, index });
    memo.write().unwrap().insert(degree, basis.clone());
    basis
}

fn admissible_sequences(
    remaining: usize,
    max_first: usize,
    prefix: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if remaining == 0 {
        out.push(prefix.clone());
        return;
    }
    for i in 1..=remaining.min(max_first) {
        prefix.push(i);
        admissible_sequences(remaining - i, i / 2, prefix, out);
        prefix.pop();
    }
}

/// All admissible monomials of exactly `degree`, in canonical order.
pub fn full_basis(degree: usize) -> Vec<AdmissibleMonomial> {
    degree_basis(degree).monomials.clone()
}

pub fn basis_dim(degree: usize) -> usize {
    degree_basis(degree).monomials.len()
}

/// A degreewise basis of the subalgebra `A(n)` below a degree bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubalgebraBasis {
    pub n: usize,
    pub degree_bound: usize,
    pub basis: BTreeMap<usize, Vec<AdmissibleSum>>,
}

impl SubalgebraBasis {
    pub fn in_degree(&self, degree: usize) -> &[AdmissibleSum] {
        self.basis.get(&degree).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn total_dim(&self) -> usize {
        self.basis.values().map(Vec::len).sum()
    }
}

/// Spans `A(n)`, generated by `Sq^1, Sq^2, ..., Sq^{2^n}`, degree by degree:
/// every word in the generators is a generator times a shorter word.
pub fn subalgebra_basis(n: usize, degree_bound: usize) -> SubalgebraBasis {
    let gens: Vec<usize> = (0..=n)
        .map(|j| 1usize << j)
        .take_while(|&g| g <= degree_bound.max(1))
        .collect();
    let mut basis: BTreeMap<usize, Vec<AdmissibleSum>> = BTreeMap::new();
    basis.insert(0, vec![AdmissibleSum::one()]);
    for d in 1..=degree_bound {
        let mut vecs = Vec::new();
        for &g in gens.iter().filter(|&&g| g <= d) {
            for x in &basis[&(d - g)] {
                vecs.push(sq_times(g, x).coordinates(d));
            }
        }
        let rows = Gf2Matrix::from_rows(basis_dim(d), vecs).expect("coordinate length");
        let ech = rows.row_reduce();
        let elems = ech.reduced.row_vectors()[..ech.rank]
            .iter()
            .map(|v| AdmissibleSum::from_coordinates(d, v))
            .collect();
        basis.insert(d, elems);
    }
    SubalgebraBasis {
        n,
        degree_bound,
        basis,
    }
}

/// Pairs `(a_j, b_j)` with `sum_j a_j Sq^{2^n} b_j` equal to the target.
pub type MembershipWitness = Vec<(AdmissibleSum, AdmissibleSum)>;

/// Decides whether `target` (of degree `2^{n+1}`) lies in
/// `Abar(n-1) Sq^{2^n} Abar(n-1)`, where `Abar(n-1)` is the positive-degree
/// part of `A(n-1)`.
pub fn ideal_membership(
    target: &AdmissibleSum,
    n: usize,
) -> Result<Option<MembershipWitness>, SteenrodError> {
    if n == 0 {
        return Err(SteenrodError::InvalidLevel(n));
    }
    let half = 1usize << n;
    let degree = 2 * half;
    if target.is_zero() {
        return Ok(Some(Vec::new()));
    }
    if target.degree() != Some(degree) {
        return Err(SteenrodError::DegreeMismatch {
            expected: degree,
            found: match target.degree() {
                Some(d) => d.to_string(),
                None => "a mixed-degree sum".to_string(),
            },
        });
    }
    let sub = subalgebra_basis(n - 1, half - 1);
    let mut pairs = Vec::new();
    let mut columns = Vec::new();
    for i in 1..half {
        for a in sub.in_degree(i) {
            for b in sub.in_degree(half - i) {
                let v = multiply(a, &sq_times(half, b));
                columns.push(v.coordinates(degree));
                pairs.push((a.clone(), b.clone()));
            }
        }
    }
    let m = Gf2Matrix::from_columns(basis_dim(degree), &columns).expect("coordinate length");
    let x = gf2::solve(&m, &target.coordinates(degree)).expect("shapes agree");
    Ok(x.map(|x| x.ones().map(|j| pairs[j].clone()).collect()))
}

/// Recomputes `sum_j a_j Sq^{2^n} b_j`.
pub fn evaluate_witness(n: usize, witness: &[(AdmissibleSum, AdmissibleSum)]) -> AdmissibleSum {
    let mut out = AdmissibleSum::zero();
    for (a, b) in witness {
        out.add_assign(&multiply(a, &sq_times(1 << n, b)));
    }
    out
}

/// `Sq^{2^n} Sq^{2^n}` written as `sum a_j b_j`, read off a membership
/// witness by setting `b_j = Sq^{2^n} b`.
pub fn square_relation_from_witness(
    n: usize,
    witness: &[(AdmissibleSum, AdmissibleSum)],
) -> Vec<(AdmissibleSum, AdmissibleSum)> {
    witness
        .iter()
        .map(|(a, b)| (a.clone(), sq_times(1 << n, b)))
        .collect()
}

/// `Sq^{2^n} Sq^{2^n}` written as `sum a_j b_j` through conjugation: each
/// admissible term `Sq^{i_1} R` of `chi(Sq^{2^n} Sq^{2^n})` contributes
/// `chi(R) chi(Sq^{i_1})`. Returns `None` if a length-one term occurs.
pub fn square_relation_by_conjugation(n: usize) -> Option<Vec<(AdmissibleSum, AdmissibleSum)>> {
    let half = 1usize << n;
    let square = normalize_word(&[half, half]);
    let chi = conjugate(&square);
    let mut pairs = Vec::new();
    for m in chi.terms() {
        if m.len() < 2 {
            return None;
        }
        let head = m.indices()[0];
        let rest = AdmissibleSum::from(AdmissibleMonomial::from_trusted(m.indices()[1..].to_vec()));
        pairs.push((conjugate(&rest), conjugate_sq(head)));
    }
    Some(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(w: &[usize]) -> AdmissibleSum {
        normalize_word(w)
    }

    fn mono(w: &[usize]) -> AdmissibleSum {
        AdmissibleSum::from(AdmissibleMonomial::new(w.to_vec()).unwrap())
    }

    #[test]
    fn adem_examples() {
        assert!(word(&[1, 1]).is_zero());
        assert_eq!(word(&[3, 1]), mono(&[3, 1]));
        assert_eq!(word(&[2, 2]), mono(&[3, 1]));
        assert_eq!(word(&[4, 4]), mono(&[7, 1]).sum(&mono(&[6, 2])));
        assert_eq!(word(&[4, 4]).to_string(), "Sq7 Sq1 + Sq6 Sq2");
    }

    #[test]
    fn multiply_examples() {
        let x = mono(&[5, 2]);
        assert_eq!(multiply(&AdmissibleSum::one(), &x), x);
        assert_eq!(multiply(&AdmissibleSum::sq(1), &AdmissibleSum::sq(2)), mono(&[3]));
        assert_eq!(multiply(&AdmissibleSum::sq(2), &AdmissibleSum::sq(2)), mono(&[3, 1]));
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(conjugate(&AdmissibleSum::one()), AdmissibleSum::one());
        assert_eq!(conjugate(&AdmissibleSum::sq(1)), AdmissibleSum::sq(1));
        assert_eq!(conjugate(&AdmissibleSum::sq(2)), AdmissibleSum::sq(2));
        // chi(Sq^3) = Sq^2 Sq^1
        assert_eq!(conjugate(&AdmissibleSum::sq(3)), mono(&[2, 1]));
    }

    #[test]
    fn excess_examples() {
        assert_eq!(excess(&AdmissibleMonomial::unit()), 0);
        assert_eq!(excess(&AdmissibleMonomial::sq(7)), 7);
        assert_eq!(excess(&AdmissibleMonomial::new(vec![3, 1]).unwrap()), 2);
    }

    #[test]
    fn basis_examples() {
        assert_eq!(full_basis(0), vec![AdmissibleMonomial::unit()]);
        let b3: Vec<String> = full_basis(3).iter().map(ToString::to_string).collect();
        assert_eq!(b3, vec!["Sq3", "Sq2 Sq1"]);
        for n in 0..=4 {
            let half = 1 << n;
            for m in full_basis(2 * half).iter().filter(|m| m.len() >= 2) {
                assert!(m.indices()[0] > half, "{m}");
            }
        }
    }

    #[test]
    fn rejects_bad_monomials() {
        assert_eq!(AdmissibleMonomial::new(vec![2, 2]), Err(SteenrodError::NotAdmissible(vec![2, 2])));
        assert_eq!(AdmissibleMonomial::new(vec![0]), Err(SteenrodError::ZeroIndex));
        assert_eq!(SteenrodExpression::new(vec![vec![1, 0]]), Err(SteenrodError::ZeroIndex));
    }

    #[test]
    fn subalgebra_examples() {
        let a0 = subalgebra_basis(0, 4);
        assert_eq!(a0.in_degree(1), &[AdmissibleSum::sq(1)]);
        assert!(a0.in_degree(2).is_empty());
        assert_eq!(subalgebra_basis(1, 8).total_dim(), 8);
        assert_eq!(subalgebra_basis(2, 0).in_degree(0), &[AdmissibleSum::one()]);
        for d in 0..=6 {
            for x in subalgebra_basis(1, 6).in_degree(d) {
                assert_eq!(&adem_normalize(&x.to_expression()), x);
            }
        }
    }

    #[test]
    fn membership_n1_has_the_single_witness() {
        let w = ideal_membership(&word(&[2, 2]), 1).unwrap().unwrap();
        assert_eq!(w, vec![(AdmissibleSum::sq(1), AdmissibleSum::sq(1))]);
        assert_eq!(evaluate_witness(1, &w), word(&[2, 2]));
    }

    #[test]
    fn membership_n2() {
        let target = word(&[4, 4]);
        let w = ideal_membership(&target, 2).unwrap().unwrap();
        assert!(!w.is_empty());
        assert_eq!(evaluate_witness(2, &w), target);
    }

    #[test]
    fn membership_trivial_and_errors() {
        assert_eq!(ideal_membership(&AdmissibleSum::zero(), 2).unwrap(), Some(vec![]));
        assert!(matches!(
            ideal_membership(&AdmissibleSum::sq(3), 1),
            Err(SteenrodError::DegreeMismatch { expected: 4, .. })
        ));
        assert_eq!(
            ideal_membership(&AdmissibleSum::sq(2), 0),
            Err(SteenrodError::InvalidLevel(0))
        );
        assert_eq!(ideal_membership(&AdmissibleSum::sq(4), 1).unwrap(), None);
    }

    #[test]
    fn square_relations_agree_with_the_square() {
        for n in 1..=3 {
            let half = 1 << n;
            let square = word(&[half, half]);
            let w = ideal_membership(&square, n).unwrap().unwrap();
            let mut routes = vec![square_relation_from_witness(n, &w)];
            routes.push(square_relation_by_conjugation(n).unwrap());
            for pairs in routes {
                let mut total = AdmissibleSum::zero();
                for (a, b) in &pairs {
                    let db = b.degree().unwrap();
                    assert!(half < db && db < 2 * half);
                    total.add_assign(&multiply(a, b));
                }
                assert_eq!(total, square);
            }
        }
    }

    #[test]
    fn rewriting_orders_agree_on_a_long_word() {
        let e = SteenrodExpression::monomial(vec![1, 2, 3, 2, 1]).unwrap();
        let first = normalize_by_rewriting(&e, &mut |_| 0);
        let last = normalize_by_rewriting(&e, &mut |p| p.len() - 1);
        assert_eq!(first, last);
        assert_eq!(first, adem_normalize(&e));
    }
}
