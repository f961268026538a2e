//! `Tor_A(F_2, F_2)` of a connected finite unstable algebra through the
//! reduced bar complex `Abar^{(x) s}`, with the Steenrod action computed on
//! cycle representatives by the Cartan formula.
//!
//! Column `s` is graded by the internal degree `t`; the class of
//! `[a_1 | ... | a_s]` sits in bidegree `(-s, t)` with `t = sum |a_i|`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::gf2::{Gf2Matrix, Gf2Vector, QuotientSpace, Subspace};
use crate::modules::{
    indecomposables, induced_module, FiniteUnstableAlgebra, FiniteUnstableModule, ModuleElement, ModuleError,
    StructuredModule,
};
use crate::nilfilt::{nilpotence_degree, Budget, NilError, NilpotenceCertificate, Obstruction};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorError {
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Nil(#[from] NilError),
    #[error("the algebra is not connected (degree 0 has dimension {0})")]
    NotConnected(usize),
    #[error("d^2 != 0 on the bar complex at s = {s}, t = {t}")]
    DSquared { s: usize, t: usize },
    #[error("Euler characteristic mismatch in internal degree {t}: chains {chains}, homology {homology}")]
    Euler { t: usize, chains: i64, homology: i64 },
    #[error("Sq{i} does not preserve boundaries at s = {s}, t = {t}")]
    NoDescent { s: usize, t: usize, i: usize },
    #[error("Tor^-1 differs from the indecomposables in degree {degree}: {detail}")]
    Corner { degree: usize, detail: String },
}

impl From<crate::gf2::Gf2Error> for TorError {
    fn from(e: crate::gf2::Gf2Error) -> Self {
        TorError::Module(e.into())
    }
}

/// A bar-complex basis element `[a_1 | ... | a_s]`, each `a_i` a basis
/// element `(degree, index)` of `Abar`.
pub type BarWord = Vec<(usize, usize)>;

/// Basis of `Abar^{(x) s}` in internal degree `t`, in lexicographic order.
#[derive(Debug, Clone, Default)]
struct BarBasis {
    words: Vec<BarWord>,
    index: HashMap<BarWord, usize>,
}

impl BarBasis {
    fn new(a: &FiniteUnstableAlgebra, s: usize, t: usize) -> Self {
        let mut words = Vec::new();
        let mut cur = Vec::with_capacity(s);
        fill(a, s, t, &mut cur, &mut words);
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Self { words, index }
    }

    fn len(&self) -> usize {
        self.words.len()
    }
}

fn fill(a: &FiniteUnstableAlgebra, s: usize, t: usize, cur: &mut BarWord, out: &mut Vec<BarWord>) {
    if s == 0 {
        if t == 0 {
            out.push(cur.clone());
        }
        return;
    }
    // leave at least one degree for each remaining factor
    for d in 1..=(t + 1).saturating_sub(s).min(a.top_degree()) {
        for i in 0..a.dim(d) {
            cur.push((d, i));
            fill(a, s - 1, t - d, cur, out);
            cur.pop();
        }
    }
}

/// The bar differential `[a_1|...|a_s] -> sum_p [... | a_p a_{p+1} | ...]`.
fn differential(a: &FiniteUnstableAlgebra, src: &BarBasis, tgt: &BarBasis) -> Gf2Matrix {
    let mut cols = Vec::with_capacity(src.len());
    for w in &src.words {
        let mut v = Gf2Vector::zeros(tgt.len());
        for p in 0..w.len().saturating_sub(1) {
            let ((d1, i), (d2, j)) = (w[p], w[p + 1]);
            if d1 + d2 > a.top_degree() {
                continue;
            }
            for k in a.mul_basis(d1, i, d2, j).ones() {
                let mut merged = Vec::with_capacity(w.len() - 1);
                merged.extend_from_slice(&w[..p]);
                merged.push((d1 + d2, k));
                merged.extend_from_slice(&w[p + 2..]);
                v.flip(tgt.index[&merged]);
            }
        }
        cols.push(v);
    }
    Gf2Matrix::from_columns(tgt.len(), &cols).expect("column lengths match")
}

/// `Sq^i` on a bar word by the Cartan formula, in the basis `tgt`.
fn sq_word(a: &FiniteUnstableAlgebra, i: usize, w: &[(usize, usize)], tgt: &BarBasis) -> Gf2Vector {
    let mut out = Gf2Vector::zeros(tgt.len());
    let mut cur = Vec::with_capacity(w.len());
    cartan(a, i, w, &mut cur, tgt, &mut out);
    out
}

fn cartan(
    a: &FiniteUnstableAlgebra,
    left: usize,
    rest: &[(usize, usize)],
    cur: &mut Vec<(usize, Gf2Vector)>,
    tgt: &BarBasis,
    out: &mut Gf2Vector,
) {
    let Some((&(d, j), tail)) = rest.split_first() else {
        if left == 0 {
            expand(cur, 0, &mut Vec::new(), tgt, out);
        }
        return;
    };
    let tail_room: usize = tail.iter().map(|&(e, _)| e).sum();
    let lo = left.saturating_sub(tail_room);
    for k in lo..=left.min(d) {
        let image = a.module().sq_vec(k, d, &Gf2Vector::unit(a.dim(d), j));
        if image.is_zero() {
            continue;
        }
        cur.push((d + k, image));
        cartan(a, left - k, tail, cur, tgt, out);
        cur.pop();
    }
}

fn expand(parts: &[(usize, Gf2Vector)], p: usize, word: &mut BarWord, tgt: &BarBasis, out: &mut Gf2Vector) {
    if p == parts.len() {
        out.flip(tgt.index[word]);
        return;
    }
    let (d, v) = &parts[p];
    for k in v.ones() {
        word.push((*d, k));
        expand(parts, p + 1, word, tgt, out);
        word.pop();
    }
}

/// One bidegree of the page.
#[derive(Debug, Clone)]
pub struct TorEntry {
    pub s: usize,
    pub t: usize,
    /// Dimension of `Abar^{(x) s}` in degree `t`.
    pub chain_dim: usize,
    pub homology: QuotientSpace,
    words: Vec<BarWord>,
}

impl TorEntry {
    pub fn dim(&self) -> usize {
        self.homology.dim()
    }

    pub fn words(&self) -> &[BarWord] {
        &self.words
    }

    /// Cycle representatives as sums of bar words.
    pub fn representatives(&self) -> Vec<Vec<BarWord>> {
        self.homology
            .representatives()
            .iter()
            .map(|v| v.ones().map(|k| self.words[k].clone()).collect())
            .collect()
    }
}

/// What the page construction verified.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TorChecks {
    /// `(s, t)` pairs with `d_s d_{s+1} = 0` checked.
    pub d_squared: usize,
    /// Internal degrees whose Euler characteristic was checked over all `s`.
    pub euler_degrees: usize,
    /// `(s, t, i)` triples where `Sq^i` was checked to preserve cycles and
    /// boundaries.
    pub descent: usize,
}

pub const SUSPENSION_CONVENTION: &str = "E_inf^{-s,*} = Sigma^s(F_{-s}/F_{-s+1}); only E_2 = Tor is computed";
pub const DIFFERENTIAL_SHAPE: &str = "d_r : E_r^{s,*} -> Sigma^{r-1} E_r^{s+r,*} (not computed)";

/// `Tor^{-s,t}` for `s <= s_max`, `t <= t_max`.
#[derive(Debug, Clone)]
pub struct TorPage {
    pub algebra: String,
    pub s_max: usize,
    pub t_max: usize,
    /// Lowest positive degree of `Abar`, if any.
    pub bottom: Option<usize>,
    /// Top degree of the algebra: column `s` vanishes above `s * top`.
    pub algebra_top: usize,
    pub entries: BTreeMap<(usize, usize), TorEntry>,
    /// Column `s` as an unstable module graded by `t`.
    pub columns: BTreeMap<usize, FiniteUnstableModule>,
    pub checks: TorChecks,
}

impl TorPage {
    pub fn dim(&self, s: usize, t: usize) -> usize {
        self.entries.get(&(s, t)).map_or(0, TorEntry::dim)
    }

    /// Whether column `s` is computed in every degree where it can be
    /// nonzero.
    pub fn column_complete(&self, s: usize) -> bool {
        s == 0 || self.t_max >= s * self.algebra_top
    }

    /// `Tor^{-s,t} = 0` for `t < s * bottom` in every computed entry.
    pub fn connectivity_holds(&self) -> bool {
        let Some(b) = self.bottom else {
            return self.entries.iter().all(|(&(s, _), e)| s == 0 || e.dim() == 0);
        };
        self.entries.iter().all(|(&(s, t), e)| t >= s * b || e.dim() == 0)
    }

    /// Aligned chart: one row per `t`, one column per `-s`.
    pub fn chart(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{:>4} |", "t"));
        for s in 0..=self.s_max {
            out.push_str(&format!(" {:>4}", format!("-{s}")));
        }
        out.push('\n');
        out.push_str(&format!("{}\n", "-".repeat(6 + 5 * (self.s_max + 1))));
        for t in (0..=self.t_max).rev() {
            out.push_str(&format!("{t:>4} |"));
            for s in 0..=self.s_max {
                let d = self.dim(s, t);
                let cell = if d == 0 { ".".to_string() } else { d.to_string() };
                out.push_str(&format!(" {cell:>4}"));
            }
            out.push('\n');
        }
        out
    }
}

fn label(a: &FiniteUnstableAlgebra, d: usize, i: usize) -> String {
    a.module()
        .space()
        .label(d, i)
        .map_or_else(|| format!("{d}.{i}"), str::to_string)
}

pub fn word_label(a: &FiniteUnstableAlgebra, w: &[(usize, usize)]) -> String {
    let parts: Vec<String> = w.iter().map(|&(d, i)| label(a, d, i)).collect();
    format!("[{}]", parts.join("|"))
}

/// Homology of the reduced bar complex in the requested rectangle.
///
/// Each internal degree is independent and runs on the rayon pool. In every
/// degree `t <= t_max` all `s <= t` are built (the complex vanishes beyond),
/// so `d^2 = 0` and the Euler characteristic are checked over the whole
/// degree; the action `Sq^i` is checked to map cycles to cycles and
/// boundaries to boundaries before it is induced on homology.
pub fn bar_tor(a: &FiniteUnstableAlgebra, s_max: usize, t_max: usize) -> Result<TorPage, TorError> {
    if a.dim(0) != 1 {
        return Err(TorError::NotConnected(a.dim(0)));
    }
    let s_top = |t: usize| if t == 0 { 0 } else { t };
    let bases: Vec<Vec<BarBasis>> = (0..=t_max)
        .into_par_iter()
        .map(|t| (0..=s_top(t) + 1).map(|s| BarBasis::new(a, s, t)).collect())
        .collect();

    struct Degree {
        entries: Vec<TorEntry>,
        boundaries: Vec<Subspace>,
        checks: TorChecks,
    }
    let per_degree: Vec<Degree> = (0..=t_max)
        .into_par_iter()
        .map(|t| -> Result<Degree, TorError> {
            let b = &bases[t];
            let top_s = s_top(t);
            // d[s] : B_s -> B_{s-1}; d_1 and d_0 vanish in the reduced complex
            let mut d: Vec<Gf2Matrix> = Vec::with_capacity(top_s + 2);
            for s in 0..=top_s + 1 {
                d.push(if s <= 1 {
                    Gf2Matrix::zeros(if s == 0 { 0 } else { b[0].len() }, b[s].len())
                } else {
                    differential(a, &b[s], &b[s - 1])
                });
            }
            let mut checks = TorChecks::default();
            let mut entries = Vec::new();
            let mut boundaries = Vec::new();
            let (mut chains, mut homology) = (0i64, 0i64);
            for s in 0..=top_s {
                if s >= 1 && !d[s].mul(&d[s + 1]).is_zero() {
                    return Err(TorError::DSquared { s, t });
                }
                checks.d_squared += 1;
                let cycles = d[s].kernel();
                let bounds = d[s + 1].image();
                let h = QuotientSpace::new(b[s].len(), t, &cycles, &bounds)?;
                let sign = if s % 2 == 0 { 1 } else { -1 };
                chains += sign * b[s].len() as i64;
                homology += sign * h.dim() as i64;
                if s <= s_max {
                    boundaries.push(Subspace::spanned_by(b[s].len(), &bounds));
                    entries.push(TorEntry {
                        s,
                        t,
                        chain_dim: b[s].len(),
                        homology: h,
                        words: b[s].words.clone(),
                    });
                }
            }
            if chains != homology {
                return Err(TorError::Euler { t, chains, homology });
            }
            checks.euler_degrees = 1;
            Ok(Degree { entries, boundaries, checks })
        })
        .collect::<Result<_, _>>()?;

    let mut entries = BTreeMap::new();
    let mut boundaries = BTreeMap::new();
    let mut checks = TorChecks::default();
    for (t, deg) in per_degree.into_iter().enumerate() {
        checks.d_squared += deg.checks.d_squared;
        checks.euler_degrees += deg.checks.euler_degrees;
        for (e, bd) in deg.entries.into_iter().zip(deg.boundaries) {
            boundaries.insert((e.s, t), bd);
            entries.insert((e.s, t), e);
        }
    }
    for s in 0..=s_max {
        for t in 0..=t_max {
            entries.entry((s, t)).or_insert_with(|| TorEntry {
                s,
                t,
                chain_dim: 0,
                homology: QuotientSpace::new(0, t, &[], &[]).expect("empty quotient"),
                words: Vec::new(),
            });
        }
    }

    // boundaries must map to boundaries; cycles to cycles is checked by
    // `induced_module`, which refuses images outside the generator span
    for s in 1..=s_max {
        for t in s..=t_max {
            let Some(bd) = boundaries.get(&(s, t)) else { continue };
            for i in 1..=(t_max - t).min(t) {
                let tgt_basis = &bases[t + i][s];
                let tgt = &boundaries[&(s, t + i)];
                for v in bd.independent() {
                    let mut image = Gf2Vector::zeros(tgt_basis.len());
                    for k in v.ones() {
                        image.add_assign(&sq_word(a, i, &bases[t][s].words[k], tgt_basis));
                    }
                    if !tgt.contains(&image) {
                        return Err(TorError::NoDescent { s, t, i });
                    }
                }
                checks.descent += 1;
            }
        }
    }

    let mut columns = BTreeMap::new();
    for s in 0..=s_max {
        let quotients: BTreeMap<usize, QuotientSpace> =
            (0..=t_max).map(|t| (t, entries[&(s, t)].homology.clone())).collect();
        let column = induced_module(&format!("Tor^-{s}"), &quotients, 0, |i, t, v| {
            let tgt = &bases[t + i][s];
            let mut image = Gf2Vector::zeros(tgt.len());
            for k in v.ones() {
                image.add_assign(&sq_word(a, i, &bases[t][s].words[k], tgt));
            }
            Ok(image)
        })?;
        columns.insert(s, column);
    }

    let bottom = (1..=a.top_degree()).find(|&d| a.dim(d) > 0);
    Ok(TorPage {
        algebra: a.name().to_string(),
        s_max,
        t_max,
        bottom,
        algebra_top: a.top_degree(),
        entries,
        columns,
        checks,
    })
}

/// Checks that `Tor^-1` is `Q(A)`: the identity on `Abar` induces, degree by
/// degree, an invertible map commuting with every `Sq^i`.
pub fn check_corner(page: &TorPage, a: &FiniteUnstableAlgebra) -> Result<(), TorError> {
    let q = indecomposables(a)?;
    let column = &page.columns[&1];
    let top = page.t_max.min(a.top_degree());
    let mut maps = BTreeMap::new();
    for t in 1..=top {
        let n = a.dim(t);
        let mut rels = Vec::new();
        for d1 in 1..t {
            for i in 0..a.dim(d1) {
                for j in 0..a.dim(t - d1) {
                    rels.push(a.mul_basis(d1, i, t - d1, j));
                }
            }
        }
        let gens: Vec<Gf2Vector> = (0..n).map(|i| Gf2Vector::unit(n, i)).collect();
        let quotient = QuotientSpace::new(n, t, &gens, &rels)?;
        let entry = &page.entries[&(1, t)];
        let cols: Vec<Gf2Vector> = entry
            .homology
            .representatives()
            .iter()
            .map(|r| quotient.project(r).expect("Abar is spanned by its basis"))
            .collect();
        let p = Gf2Matrix::from_columns(quotient.dim(), &cols)?;
        if p.rows() != p.cols() || p.rank() != p.rows() {
            return Err(TorError::Corner {
                degree: t,
                detail: format!("dimensions {} vs {}", entry.dim(), q.dim(t)),
            });
        }
        maps.insert(t, p);
    }
    for t in 1..=top {
        for i in 1..=(top - t).min(t) {
            let lhs = maps[&(t + i)].mul(&column.sq_block(i, t));
            let rhs = q.sq_block(i, t).mul(&maps[&t]);
            if lhs != rhs {
                return Err(TorError::Corner {
                    degree: t,
                    detail: format!("Sq{i} does not commute with the comparison map"),
                });
            }
        }
    }
    Ok(())
}

/// Certificates for every class of one column.
#[derive(Debug, Clone)]
pub struct ColumnNilpotence {
    pub s: usize,
    /// The nilpotence degree used for `Abar`.
    pub d: usize,
    /// Whether the column is computed through its top degree; otherwise a
    /// chain that leaves the range is undetermined.
    pub complete: bool,
    pub classes: Vec<((usize, usize), NilpotenceCertificate)>,
}

impl ColumnNilpotence {
    pub fn bound(&self) -> usize {
        self.s * self.d
    }

    /// Every class certifies at least `s * d`; `None` when some class is
    /// undetermined before reaching the bound.
    pub fn holds(&self) -> Option<bool> {
        let mut unknown = false;
        for (_, c) in &self.classes {
            if c.at_least() >= self.bound() {
                continue;
            }
            if c.is_unknown() {
                unknown = true;
            } else {
                return Some(false);
            }
        }
        (!unknown).then_some(true)
    }
}

impl fmt::Display for ColumnNilpotence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column -{}: bound s*d = {}*{} = {}", self.s, self.s, self.d, self.bound())
    }
}

/// The nilpotence degree of `Abar`: the least certified level over its
/// basis (for a finite module this is its bottom degree).
pub fn augmentation_nilpotence(a: &FiniteUnstableAlgebra, c_max: usize) -> Result<usize, TorError> {
    let mut desc = a.module().description();
    desc.dims[0] = 0;
    desc.labels.retain(|&(d, _), _| d > 0);
    let abar = StructuredModule::from(crate::modules::make_finite(&desc)?);
    let mut best: Option<usize> = None;
    for d in 1..=a.top_degree() {
        for i in 0..a.dim(d) {
            let x = ModuleElement::basis(d, a.dim(d), i);
            let cert = nilpotence_degree(&abar, &x, a.top_degree() + 1, c_max)?;
            best = Some(best.map_or(cert.at_least(), |b| b.min(cert.at_least())));
        }
    }
    Ok(best.unwrap_or(0))
}

/// Certifies each class of column `s` as at least `s * d`-nilpotent, with
/// `d` the nilpotence degree of `Abar` (computed when not supplied).
pub fn column_nilpotence(
    page: &TorPage,
    a: &FiniteUnstableAlgebra,
    s: usize,
    d: Option<usize>,
    c_max: usize,
) -> Result<ColumnNilpotence, TorError> {
    let d = match d {
        Some(d) => d,
        None => augmentation_nilpotence(a, c_max)?,
    };
    let column = &page.columns[&s];
    let complete = page.column_complete(s);
    let target = s * d;
    let mut classes = Vec::new();
    for t in 0..=column.top_degree() {
        for j in 0..column.dim(t) {
            let x = ModuleElement::basis(t, column.dim(t), j);
            classes.push(((t, j), column_certificate(column, &x, target, complete, page.t_max, c_max)));
        }
    }
    Ok(ColumnNilpotence { s, d, complete, classes })
}

fn column_certificate(
    column: &FiniteUnstableModule,
    x: &ModuleElement,
    s_max: usize,
    complete: bool,
    t_max: usize,
    c_max: usize,
) -> NilpotenceCertificate {
    let mut witnesses = BTreeMap::new();
    let mut obstruction = None;
    'k: for k in 0..s_max {
        let mut y = x.clone();
        for c in 0..=c_max {
            let Some(e) = y.degree() else {
                witnesses.insert(k, c);
                continue 'k;
            };
            if k >= e {
                // Sq_e is the identity, Sq_k for k > e vanishes
                if k == e {
                    obstruction = Some(Obstruction::NotNilpotent {
                        k,
                        chain: vec![y],
                        proof: crate::nilfilt::NonVanishing::Periodic,
                    });
                } else {
                    witnesses.insert(k, c + 1);
                    continue 'k;
                }
                break 'k;
            }
            let next = 2 * e - k;
            if next > t_max && !complete {
                obstruction = Some(Obstruction::Unknown {
                    k,
                    reason: Budget::DegreeBound { degree: next, bound: t_max },
                });
                break 'k;
            }
            let v = &y.parts()[&e];
            y = if next > column.top_degree() {
                ModuleElement::zero()
            } else {
                ModuleElement::homogeneous(next, column.sq_vec(e - k, e, v))
            };
        }
        obstruction = Some(Obstruction::Unknown {
            k,
            reason: Budget::IterationCap(c_max),
        });
        break;
    }
    NilpotenceCertificate {
        degree: x.degree(),
        s_max,
        witnesses,
        obstruction,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(page: &TorPage, s: usize) -> Vec<usize> {
        (0..=page.t_max).map(|t| page.dim(s, t)).collect()
    }

    #[test]
    fn trivial_algebra() {
        let page = bar_tor(&FiniteUnstableAlgebra::trivial(), 3, 6).unwrap();
        assert_eq!(page.dim(0, 0), 1);
        for s in 1..=3 {
            assert!(dims(&page, s).iter().all(|&d| d == 0));
        }
    }

    #[test]
    fn exterior_on_a_three_class() {
        let a = FiniteUnstableAlgebra::exterior(3);
        let page = bar_tor(&a, 4, 12).unwrap();
        for s in 0..=4 {
            for t in 0..=12 {
                assert_eq!(page.dim(s, t), usize::from(t == 3 * s), "s={s} t={t}");
            }
        }
        assert!(page.connectivity_holds());
        check_corner(&page, &a).unwrap();
        assert_eq!(page.entries[&(2, 6)].representatives(), vec![vec![vec![(3, 0), (3, 0)]]]);
    }

    #[test]
    fn truncated_polynomial_of_height_four() {
        let a = FiniteUnstableAlgebra::truncated_polynomial(1, 4).unwrap();
        let page = bar_tor(&a, 3, 10).unwrap();
        assert_eq!(dims(&page, 1), vec![0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(dims(&page, 2), vec![0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(dims(&page, 3), vec![0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0]);
        check_corner(&page, &a).unwrap();
    }

    #[test]
    fn polynomial_truncation_has_divided_power_pattern() {
        // F2[x]/x^2 in degree 1: Tor is a divided power algebra, one class
        // [x|...|x] in each bidegree (-s, s)
        let a = FiniteUnstableAlgebra::truncated_polynomial(1, 2).unwrap();
        let page = bar_tor(&a, 5, 6).unwrap();
        for s in 0..=5 {
            assert_eq!(dims(&page, s).iter().sum::<usize>(), 1);
            assert_eq!(page.dim(s, s), 1);
        }
    }

    #[test]
    fn action_on_a_tensor_product() {
        // H*(RP^2) x H*(S^1): Tor^-1 = Q has the Sq1 of RP^2
        let a = FiniteUnstableAlgebra::truncated_polynomial(1, 3)
            .unwrap()
            .tensor(&FiniteUnstableAlgebra::exterior(1))
            .unwrap();
        let page = bar_tor(&a, 3, 6).unwrap();
        check_corner(&page, &a).unwrap();
        assert!(page.checks.descent > 0);
        assert!(page.connectivity_holds());
    }

    #[test]
    fn column_nilpotence_of_exterior() {
        let a = FiniteUnstableAlgebra::exterior(3);
        let page = bar_tor(&a, 4, 12).unwrap();
        for s in 1..=4 {
            let c = column_nilpotence(&page, &a, s, None, 16).unwrap();
            assert_eq!(c.d, 3);
            assert!(c.complete);
            assert_eq!(c.holds(), Some(true));
            assert_eq!(c.classes.len(), 1);
            assert_eq!(c.classes[0].1.at_least(), 3 * s);
        }
    }

    #[test]
    fn truncated_column_is_undetermined() {
        let a = FiniteUnstableAlgebra::truncated_polynomial(1, 4).unwrap();
        let page = bar_tor(&a, 2, 5).unwrap();
        assert!(!page.column_complete(2));
        let c = column_nilpotence(&page, &a, 2, Some(3), 16).unwrap();
        assert_eq!(c.holds(), None);
    }
}
