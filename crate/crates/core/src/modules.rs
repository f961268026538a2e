//! Unstable modules and unstable algebras of finite type.
//!
//! [`FiniteUnstableModule`] stores one matrix per `Sq^i`, `1 <= i <= top`,
//! and is validated against instability and every Adem relation that fits
//! below the top degree. [`StructuredModule`] adds the infinite shapes used
//! by the filtration code: free modules `F(n)`, suspensions, tensor
//! products with the Cartan formula, and the reduced cohomology of `RP^inf`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use thiserror::Error;

use crate::gf2::{Gf2Error, Gf2Matrix, Gf2Vector, GradedLinearMap, GradedVectorSpace, QuotientSpace, Subspace};
use crate::steenrod::{binom2, normalize_word, sq_times, AdmissibleMonomial, AdmissibleSum};

/// One witness of an invalid module or algebra description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Shape(String),
    /// `Sq^op` is nonzero on basis element `index` of `degree < op`.
    Instability { op: usize, degree: usize, index: usize },
    /// `Sq^a Sq^b` and its Adem expansion differ on a basis element.
    Adem { a: usize, b: usize, degree: usize, index: usize },
    /// The induced action does not preserve a subquotient.
    NotClosed { op: usize, degree: usize, index: usize },
    NotConnected { dim0: usize },
    Unit { degree: usize, index: usize },
    Commutativity { left: (usize, usize), right: (usize, usize) },
    Associativity { factors: [(usize, usize); 3] },
    Cartan { op: usize, left: (usize, usize), right: (usize, usize) },
    /// `Sq^{|x|} x != x^2`.
    Restriction { degree: usize, index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape(s) => write!(f, "shape: {s}"),
            Violation::Instability { op, degree, index } => write!(
                f,
                "instability: Sq{op} is nonzero on element {index} of degree {degree}"
            ),
            Violation::Adem { a, b, degree, index } => write!(
                f,
                "Adem relation for Sq{a} Sq{b} fails on element {index} of degree {degree}"
            ),
            Violation::NotClosed { op, degree, index } => write!(
                f,
                "Sq{op} does not preserve the subquotient at element {index} of degree {degree}"
            ),
            Violation::NotConnected { dim0 } => {
                write!(f, "algebra must be connected, degree 0 has dimension {dim0}")
            }
            Violation::Unit { degree, index } => {
                write!(f, "unit law fails on element {index} of degree {degree}")
            }
            Violation::Commutativity { left, right } => write!(
                f,
                "product of {}:{} and {}:{} is not commutative",
                left.0, left.1, right.0, right.1
            ),
            Violation::Associativity { factors: [x, y, z] } => write!(
                f,
                "product of {}:{}, {}:{}, {}:{} is not associative",
                x.0, x.1, y.0, y.1, z.0, z.1
            ),
            Violation::Cartan { op, left, right } => write!(
                f,
                "Cartan formula for Sq{op} fails on {}:{} * {}:{}",
                left.0, left.1, right.0, right.1
            ),
            Violation::Restriction { degree, index } => write!(
                f,
                "Sq{degree} x != x^2 for element {index} of degree {degree}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuleError {
    #[error("invalid module: {0}")]
    Invalid(Violation),
    #[error("degree {degree} exceeds the truncation bound {bound}")]
    Overflow { degree: usize, bound: usize },
    #[error("element is not homogeneous")]
    NotHomogeneous,
    #[error("element does not belong to the module: {0}")]
    NotInModule(String),
    #[error(transparent)]
    Linear(#[from] Gf2Error),
}

/// Raw tables for a finite module: `ops[i][d]` is the matrix of `Sq^i` from
/// degree `d` to `d + i` (target x source). Missing blocks are zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModuleDescription {
    pub name: String,
    pub dims: Vec<usize>,
    pub ops: BTreeMap<usize, BTreeMap<usize, Gf2Matrix>>,
    pub labels: BTreeMap<(usize, usize), String>,
}

/// A graded `F_2`-space on degrees `0..=top` with a validated action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteUnstableModule {
    name: String,
    space: GradedVectorSpace,
    actions: BTreeMap<usize, GradedLinearMap>,
}

fn shape_checked(desc: &ModuleDescription) -> Result<(GradedVectorSpace, BTreeMap<usize, GradedLinearMap>), Violation> {
    let space = GradedVectorSpace::with_labels(desc.dims.clone(), desc.labels.clone())
        .map_err(|e| Violation::Shape(e.to_string()))?;
    let top = space.top_degree();
    for (&i, blocks) in &desc.ops {
        if i == 0 || i > top {
            return Err(Violation::Shape(format!("Sq{i} is out of range 1..={top}")));
        }
        for (&d, m) in blocks {
            if d + i > top {
                return Err(Violation::Shape(format!(
                    "Sq{i} block at degree {d} targets degree {} above the top",
                    d + i
                )));
            }
            if m.rows() != space.dim(d + i) || m.cols() != space.dim(d) {
                return Err(Violation::Shape(format!(
                    "Sq{i} block at degree {d} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    space.dim(d + i),
                    space.dim(d)
                )));
            }
        }
    }
    let mut actions = BTreeMap::new();
    for i in 1..=top {
        let mut blocks = BTreeMap::new();
        for d in 0..=top - i {
            if space.dim(d) == 0 {
                continue;
            }
            let m = desc
                .ops
                .get(&i)
                .and_then(|b| b.get(&d))
                .cloned()
                .unwrap_or_else(|| Gf2Matrix::zeros(space.dim(d + i), space.dim(d)));
            blocks.insert(d, m);
        }
        let map = GradedLinearMap::new(space.clone(), space.clone(), i as i64, blocks)
            .map_err(|e| Violation::Shape(e.to_string()))?;
        actions.insert(i, map);
    }
    Ok((space, actions))
}

/// Every violated invariant of a module description; empty iff valid.
pub fn verify_instability(desc: &ModuleDescription) -> Vec<Violation> {
    match shape_checked(desc) {
        Err(v) => vec![v],
        Ok((space, actions)) => FiniteUnstableModule {
            name: desc.name.clone(),
            space,
            actions,
        }
        .violations(),
    }
}

/// Builds a finite module, reporting the first violated invariant.
pub fn make_finite(desc: &ModuleDescription) -> Result<FiniteUnstableModule, ModuleError> {
    let (space, actions) = shape_checked(desc).map_err(ModuleError::Invalid)?;
    let m = FiniteUnstableModule {
        name: desc.name.clone(),
        space,
        actions,
    };
    match m.violations().into_iter().next() {
        Some(v) => Err(ModuleError::Invalid(v)),
        None => Ok(m),
    }
}

impl FiniteUnstableModule {
    /// The module with the given dimensions and every `Sq^i` zero.
    pub fn trivial_action(name: &str, dims: Vec<usize>) -> Self {
        make_finite(&ModuleDescription {
            name: name.to_string(),
            dims,
            ..Default::default()
        })
        .expect("a trivial action is always unstable")
    }

    /// `Sigma^s F_2`.
    pub fn sphere(s: usize) -> Self {
        let mut dims = vec![0; s + 1];
        dims[s] = 1;
        Self::trivial_action(&format!("S{s}"), dims)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn space(&self) -> &GradedVectorSpace {
        &self.space
    }

    pub fn top_degree(&self) -> usize {
        self.space.top_degree()
    }

    /// Dimension in `degree`; zero above the top.
    pub fn dim(&self, degree: usize) -> usize {
        self.space.dim(degree)
    }

    pub fn dims(&self) -> &[usize] {
        self.space.dims()
    }

    pub fn actions(&self) -> &BTreeMap<usize, GradedLinearMap> {
        &self.actions
    }

    pub fn description(&self) -> ModuleDescription {
        let mut ops = BTreeMap::new();
        for (&i, map) in &self.actions {
            let blocks: BTreeMap<usize, Gf2Matrix> = map
                .blocks()
                .iter()
                .filter(|(_, m)| !m.is_zero())
                .map(|(&d, m)| (d, m.clone()))
                .collect();
            if !blocks.is_empty() {
                ops.insert(i, blocks);
            }
        }
        ModuleDescription {
            name: self.name.clone(),
            dims: self.dims().to_vec(),
            ops,
            labels: self.space.labels().clone(),
        }
    }

    /// The matrix of `Sq^i` from `degree` to `degree + i`; `Sq^0` is the
    /// identity, and blocks leaving the module have no rows.
    pub fn sq_block(&self, i: usize, degree: usize) -> Gf2Matrix {
        if i == 0 {
            return Gf2Matrix::identity(self.dim(degree));
        }
        self.actions
            .get(&i)
            .and_then(|m| m.block(degree))
            .cloned()
            .unwrap_or_else(|| Gf2Matrix::zeros(self.dim(degree + i), self.dim(degree)))
    }

    /// The matrix of a word `Sq^{w_1} ... Sq^{w_k}` on `degree`.
    pub fn word_block(&self, word: &[usize], degree: usize) -> Gf2Matrix {
        let mut acc = Gf2Matrix::identity(self.dim(degree));
        let mut d = degree;
        for &i in word.iter().rev() {
            acc = self.sq_block(i, d).mul(&acc);
            d += i;
        }
        acc
    }

    pub fn sum_block(&self, op: &AdmissibleSum, degree: usize) -> Option<Gf2Matrix> {
        let target = degree + op.degree()?;
        let mut acc = Gf2Matrix::zeros(self.dim(target), self.dim(degree));
        for m in op.terms() {
            acc = acc.add(&self.word_block(m.indices(), degree));
        }
        Some(acc)
    }

    pub fn sq_vec(&self, i: usize, degree: usize, v: &Gf2Vector) -> Gf2Vector {
        self.sq_block(i, degree).mul_vec(v)
    }

    fn violations(&self) -> Vec<Violation> {
        let top = self.top_degree();
        let mut out = Vec::new();
        for (&i, map) in &self.actions {
            for (&d, m) in map.blocks() {
                if i > d {
                    for c in 0..m.cols() {
                        if !m.column(c).is_zero() {
                            out.push(Violation::Instability {
                                op: i,
                                degree: d,
                                index: c,
                            });
                        }
                    }
                }
            }
        }
        for b in 1..=top {
            for a in 1..(2 * b).min(top + 1) {
                if a + b > top {
                    break;
                }
                let rhs_op = normalize_word(&[a, b]);
                for d in 0..=top - a - b {
                    if self.dim(d) == 0 {
                        continue;
                    }
                    let lhs = self.word_block(&[a, b], d);
                    let rhs = self.sum_block(&rhs_op, d).unwrap_or_else(|| {
                        Gf2Matrix::zeros(self.dim(d + a + b), self.dim(d))
                    });
                    let diff = lhs.add(&rhs);
                    if let Some(c) = (0..diff.cols()).find(|&c| !diff.column(c).is_zero()) {
                        out.push(Violation::Adem { a, b, degree: d, index: c });
                    }
                }
            }
        }
        out
    }

    /// `Sigma^s` of this module.
    pub fn suspend(&self, s: usize) -> FiniteUnstableModule {
        let desc = self.description();
        let mut dims = vec![0; s];
        dims.extend_from_slice(&desc.dims);
        let ops = desc
            .ops
            .into_iter()
            .map(|(i, blocks)| (i, blocks.into_iter().map(|(d, m)| (d + s, m)).collect()))
            .collect();
        let labels = desc
            .labels
            .into_iter()
            .map(|((d, i), l)| ((d + s, i), l))
            .collect();
        make_finite(&ModuleDescription {
            name: format!("S{s}({})", self.name),
            dims,
            ops,
            labels,
        })
        .expect("suspension of an unstable module is unstable")
    }

    pub fn direct_sum(&self, other: &FiniteUnstableModule) -> FiniteUnstableModule {
        let top = self.top_degree().max(other.top_degree());
        let dims: Vec<usize> = (0..=top).map(|d| self.dim(d) + other.dim(d)).collect();
        let mut ops = BTreeMap::new();
        for i in 1..=top {
            let mut blocks = BTreeMap::new();
            for d in 0..=top - i {
                let (a, b) = (self.sq_block(i, d), other.sq_block(i, d));
                let mut m = Gf2Matrix::zeros(dims[d + i], dims[d]);
                for r in 0..a.rows() {
                    for c in 0..a.cols() {
                        m.set(r, c, a.get(r, c));
                    }
                }
                for r in 0..b.rows() {
                    for c in 0..b.cols() {
                        m.set(a.rows() + r, a.cols() + c, b.get(r, c));
                    }
                }
                if dims[d] > 0 {
                    blocks.insert(d, m);
                }
            }
            ops.insert(i, blocks);
        }
        make_finite(&ModuleDescription {
            name: format!("{} + {}", self.name, other.name),
            dims,
            ops,
            labels: BTreeMap::new(),
        })
        .expect("direct sum of unstable modules is unstable")
    }
}

/// Builds the subquotient with one [`QuotientSpace`] per degree of an ambient
/// module, placing ambient degree `d` at `d - shift`. The action is given on
/// ambient vectors; a representative whose image leaves the generator span
/// is reported as [`Violation::NotClosed`].
pub fn induced_module(
    name: &str,
    quotients: &BTreeMap<usize, QuotientSpace>,
    shift: usize,
    mut act: impl FnMut(usize, usize, &Gf2Vector) -> Result<Gf2Vector, ModuleError>,
) -> Result<FiniteUnstableModule, ModuleError> {
    let top_ambient = quotients
        .iter()
        .filter(|(_, q)| q.dim() > 0)
        .map(|(&d, _)| d)
        .max()
        .unwrap_or(shift)
        .max(shift);
    let top = top_ambient - shift;
    let dim = |d: usize| quotients.get(&(d + shift)).map_or(0, QuotientSpace::dim);
    let dims: Vec<usize> = (0..=top).map(dim).collect();
    let mut ops = BTreeMap::new();
    for i in 1..=top {
        let mut blocks = BTreeMap::new();
        for d in 0..=top - i {
            if dims[d] == 0 || dims[d + i] == 0 {
                continue;
            }
            let (src, tgt) = (&quotients[&(d + shift)], &quotients[&(d + i + shift)]);
            let mut cols = Vec::with_capacity(dims[d]);
            for (j, rep) in src.representatives().iter().enumerate() {
                let image = act(i, d + shift, rep)?;
                let coords = tgt.project(&image).ok_or(ModuleError::Invalid(Violation::NotClosed {
                    op: i,
                    degree: d + shift,
                    index: j,
                }))?;
                cols.push(coords);
            }
            blocks.insert(d, Gf2Matrix::from_columns(dims[d + i], &cols)?);
        }
        ops.insert(i, blocks);
    }
    make_finite(&ModuleDescription {
        name: name.to_string(),
        dims,
        ops,
        labels: BTreeMap::new(),
    })
}

impl FiniteUnstableModule {
    /// The submodule generated by homogeneous vectors, as a basis per degree
    /// `0..=top`. Degrees are closed in increasing order, so every `Sq^i`
    /// image of an already closed degree is included.
    pub fn generated_submodule(&self, gens: &BTreeMap<usize, Vec<Gf2Vector>>) -> BTreeMap<usize, Vec<Gf2Vector>> {
        let mut out: BTreeMap<usize, Vec<Gf2Vector>> = BTreeMap::new();
        for d in 0..=self.top_degree() {
            let mut span = Subspace::new(self.dim(d));
            for v in gens.get(&d).into_iter().flatten() {
                span.insert(v);
            }
            for i in 1..=d {
                for v in &out[&(d - i)] {
                    span.insert(&self.sq_vec(i, d - i, v));
                }
            }
            out.insert(d, span.independent().to_vec());
        }
        out
    }

    /// `M / N` for a submodule `N` given by a basis per degree.
    pub fn quotient(&self, sub: &BTreeMap<usize, Vec<Gf2Vector>>) -> Result<FiniteUnstableModule, ModuleError> {
        self.subquotient(&format!("{}/N", self.name), None, sub)
    }

    /// A submodule given by a basis per degree, as a module in its own right.
    pub fn restrict(&self, sub: &BTreeMap<usize, Vec<Gf2Vector>>) -> Result<FiniteUnstableModule, ModuleError> {
        self.subquotient(&format!("N({})", self.name), Some(sub), &BTreeMap::new())
    }

    fn subquotient(
        &self,
        name: &str,
        gens: Option<&BTreeMap<usize, Vec<Gf2Vector>>>,
        rels: &BTreeMap<usize, Vec<Gf2Vector>>,
    ) -> Result<FiniteUnstableModule, ModuleError> {
        let mut quotients = BTreeMap::new();
        for d in 0..=self.top_degree() {
            let n = self.dim(d);
            let g: Vec<Gf2Vector> = match gens {
                Some(g) => g.get(&d).cloned().unwrap_or_default(),
                None => (0..n).map(|j| Gf2Vector::unit(n, j)).collect(),
            };
            let r = rels.get(&d).cloned().unwrap_or_default();
            quotients.insert(d, QuotientSpace::new(n, d, &g, &r)?);
        }
        let mut m = induced_module(name, &quotients, 0, |i, d, v| Ok(self.sq_vec(i, d, v)))?;
        if m.top_degree() < self.top_degree() {
            let mut dims = m.dims().to_vec();
            dims.resize(self.top_degree() + 1, 0);
            m = make_finite(&m.description().with_dims(dims))?;
        }
        Ok(m)
    }
}

/// A possibly non-homogeneous element, stored as nonzero components by
/// degree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ModuleElement {
    parts: BTreeMap<usize, Gf2Vector>,
}

impl ModuleElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn homogeneous(degree: usize, v: Gf2Vector) -> Self {
        let mut x = Self::zero();
        x.add_part(degree, &v);
        x
    }

    pub fn basis(degree: usize, dim: usize, index: usize) -> Self {
        Self::homogeneous(degree, Gf2Vector::unit(dim, index))
    }

    pub fn parts(&self) -> &BTreeMap<usize, Gf2Vector> {
        &self.parts
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.parts.len() <= 1
    }

    /// The degree of a nonzero homogeneous element.
    pub fn degree(&self) -> Option<usize> {
        match self.parts.len() {
            1 => self.parts.keys().next().copied(),
            _ => None,
        }
    }

    pub fn component(&self, degree: usize) -> Option<&Gf2Vector> {
        self.parts.get(&degree)
    }

    pub fn add_part(&mut self, degree: usize, v: &Gf2Vector) {
        if v.is_zero() {
            return;
        }
        match self.parts.get_mut(&degree) {
            Some(w) => {
                w.add_assign(v);
                if w.is_zero() {
                    self.parts.remove(&degree);
                }
            }
            None => {
                self.parts.insert(degree, v.clone());
            }
        }
    }

    pub fn add_assign(&mut self, other: &ModuleElement) {
        for (&d, v) in &other.parts {
            self.add_part(d, v);
        }
    }

    /// `sigma^s x`, the same element read in the `s`-fold suspension.
    pub fn suspend(&self, s: usize) -> ModuleElement {
        ModuleElement {
            parts: self.parts.iter().map(|(&d, v)| (d + s, v.clone())).collect(),
        }
    }
}

impl fmt::Display for ModuleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, v) in &self.parts {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let idx: Vec<String> = v.ones().map(|i| i.to_string()).collect();
            write!(f, "{d}:{}", idx.join(","))?;
        }
        Ok(())
    }
}

/// Admissible monomials of `degree` with excess at most `n`, in canonical
/// order: the basis of `F(n)` in degree `n + degree`.
pub fn unstable_basis(n: usize, degree: usize) -> Arc<Vec<AdmissibleMonomial>> {
    type Memo = RwLock<HashMap<(usize, usize), Arc<Vec<AdmissibleMonomial>>>>;
    static MEMO: OnceLock<Memo> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if n == 1 {
        // F(1): only Sq^{2^{j-1}} ... Sq^2 Sq^1 survives, in degree 2^j - 1
        if !(degree + 1).is_power_of_two() {
            return Arc::new(Vec::new());
        }
        let indices: Vec<usize> = (0..(degree + 1).trailing_zeros()).rev().map(|j| 1 << j).collect();
        return Arc::new(vec![AdmissibleMonomial::new(indices).expect("admissible chain")]);
    }
    if let Some(hit) = memo.read().unwrap().get(&(n, degree)) {
        return hit.clone();
    }
    let mut seqs = Vec::new();
    // build from the last index upward so the excess test sees the full tail
    fn grow(remaining: usize, min: usize, rev: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(rev.iter().rev().copied().collect());
            return;
        }
        for i in min.max(1)..=remaining {
            // a later (leftward) index is at least 2i, so stop when none fit
            if i != remaining && remaining - i < 2 * i {
                continue;
            }
            rev.push(i);
            grow(remaining - i, 2 * i, rev, out);
            rev.pop();
        }
    }
    grow(degree, 1, &mut Vec::new(), &mut seqs);
    let mut monomials: Vec<AdmissibleMonomial> = seqs
        .into_iter()
        .map(|s| AdmissibleMonomial::new(s).expect("generated admissibly"))
        .filter(|m| m.excess() <= n)
        .collect();
    monomials.sort();
    let basis = Arc::new(monomials);
    memo.write().unwrap().insert((n, degree), basis.clone());
    basis
}

/// A module of finite type described by its shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StructuredModule {
    Finite(Arc<FiniteUnstableModule>),
    /// `F(n)`, available through degree `bound`.
    Free { n: usize, bound: usize },
    Suspension(Box<StructuredModule>, usize),
    Tensor(Box<StructuredModule>, Box<StructuredModule>),
    /// `H~*(RP^inf)`, spanned by `u^k`, `k >= 1`.
    RpInfinity,
}

impl From<FiniteUnstableModule> for StructuredModule {
    fn from(m: FiniteUnstableModule) -> Self {
        StructuredModule::Finite(Arc::new(m))
    }
}

impl fmt::Display for StructuredModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructuredModule::Finite(m) => write!(f, "{}", m.name()),
            StructuredModule::Free { n, bound } => write!(f, "F({n})[<={bound}]"),
            StructuredModule::Suspension(m, s) => write!(f, "S{s}({m})"),
            StructuredModule::Tensor(a, b) => write!(f, "({a} x {b})"),
            StructuredModule::RpInfinity => write!(f, "RP^inf"),
        }
    }
}

struct TensorBlock {
    left_degree: usize,
    offset: usize,
    left_dim: usize,
    right_dim: usize,
}

impl StructuredModule {
    pub fn free(n: usize, bound: usize) -> Self {
        StructuredModule::Free { n, bound }
    }

    pub fn suspend(self, s: usize) -> Self {
        assert!(s >= 1, "suspension by s >= 1");
        match self {
            StructuredModule::Suspension(m, t) => StructuredModule::Suspension(m, s + t),
            m => StructuredModule::Suspension(Box::new(m), s),
        }
    }

    pub fn tensor(self, other: StructuredModule) -> Self {
        StructuredModule::Tensor(Box::new(self), Box::new(other))
    }

    /// Lowest degree that can be nonzero; `None` for the zero module.
    pub fn connectivity(&self) -> Option<usize> {
        match self {
            StructuredModule::Finite(m) => m.dims().iter().position(|&d| d > 0),
            StructuredModule::Free { n, .. } => Some(*n),
            StructuredModule::Suspension(m, s) => m.connectivity().map(|c| c + s),
            StructuredModule::Tensor(a, b) => Some(a.connectivity()? + b.connectivity()?),
            StructuredModule::RpInfinity => Some(1),
        }
    }

    /// Degree above which the module is known to vanish.
    pub fn top_degree(&self) -> Option<usize> {
        match self {
            StructuredModule::Finite(m) => Some(m.top_degree()),
            StructuredModule::Free { .. } | StructuredModule::RpInfinity => None,
            StructuredModule::Suspension(m, s) => m.top_degree().map(|t| t + s),
            StructuredModule::Tensor(a, b) => match (a.connectivity(), b.connectivity()) {
                (None, _) | (_, None) => Some(0),
                _ => Some(a.top_degree()? + b.top_degree()?),
            },
        }
    }

    /// Degree through which basis and action are available; `None` when
    /// unlimited.
    pub fn bound(&self) -> Option<usize> {
        match self {
            StructuredModule::Finite(_) | StructuredModule::RpInfinity => None,
            StructuredModule::Free { bound, .. } => Some(*bound),
            StructuredModule::Suspension(m, s) => m.bound().map(|b| b + s),
            StructuredModule::Tensor(a, b) => {
                let (ca, cb) = match (a.connectivity(), b.connectivity()) {
                    (Some(ca), Some(cb)) => (ca, cb),
                    _ => return None,
                };
                match (a.bound().map(|x| x + cb), b.bound().map(|x| x + ca)) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, y) => x.or(y),
                }
            }
        }
    }

    pub fn dim(&self, degree: usize) -> Result<usize, ModuleError> {
        match self {
            StructuredModule::Finite(m) => Ok(m.dim(degree)),
            StructuredModule::Free { n, bound } => {
                if degree > *bound {
                    return Err(ModuleError::Overflow { degree, bound: *bound });
                }
                Ok(if degree < *n { 0 } else { unstable_basis(*n, degree - n).len() })
            }
            StructuredModule::Suspension(m, s) => {
                if degree < *s {
                    Ok(0)
                } else {
                    m.dim(degree - s)
                }
            }
            StructuredModule::Tensor(..) => Ok(self
                .tensor_blocks(degree)?
                .iter()
                .map(|b| b.left_dim * b.right_dim)
                .sum()),
            StructuredModule::RpInfinity => Ok(usize::from(degree >= 1)),
        }
    }

    fn tensor_blocks(&self, degree: usize) -> Result<Vec<TensorBlock>, ModuleError> {
        let StructuredModule::Tensor(a, b) = self else {
            unreachable!("tensor_blocks on a non-tensor shape")
        };
        let mut blocks = Vec::new();
        let mut offset = 0;
        let (Some(ca), Some(cb)) = (a.connectivity(), b.connectivity()) else {
            return Ok(blocks);
        };
        if degree < ca + cb {
            return Ok(blocks);
        }
        let mut lo = ca;
        let mut hi = degree - cb;
        if let Some(t) = a.top_degree() {
            hi = hi.min(t);
        }
        if let Some(t) = b.top_degree() {
            lo = lo.max(degree.saturating_sub(t));
        }
        for d1 in lo..=hi {
            let left_dim = match a.dim(d1) {
                Ok(0) => continue,
                other => other,
            };
            let right_dim = match b.dim(degree - d1) {
                Ok(0) => continue,
                other => other?,
            };
            let left_dim = left_dim?;
            blocks.push(TensorBlock {
                left_degree: d1,
                offset,
                left_dim,
                right_dim,
            });
            offset += left_dim * right_dim;
        }
        Ok(blocks)
    }

    /// Human-readable name of a basis element.
    pub fn basis_label(&self, degree: usize, index: usize) -> Result<String, ModuleError> {
        Ok(match self {
            StructuredModule::Finite(m) => m
                .space()
                .label(degree, index)
                .map(str::to_string)
                .unwrap_or_else(|| format!("x{degree}_{index}")),
            StructuredModule::Free { n, .. } => {
                self.dim(degree)?;
                let m = &unstable_basis(*n, degree - n)[index];
                if m.is_unit() {
                    format!("i{n}")
                } else {
                    format!("{m} i{n}")
                }
            }
            StructuredModule::Suspension(m, s) => format!("s{s} {}", m.basis_label(degree - s, index)?),
            StructuredModule::Tensor(a, b) => {
                let (blk, i, j) = self.split_tensor_index(degree, index)?;
                format!(
                    "{} * {}",
                    a.basis_label(blk.left_degree, i)?,
                    b.basis_label(degree - blk.left_degree, j)?
                )
            }
            StructuredModule::RpInfinity => format!("u^{degree}"),
        })
    }

    fn split_tensor_index(&self, degree: usize, index: usize) -> Result<(TensorBlock, usize, usize), ModuleError> {
        for blk in self.tensor_blocks(degree)? {
            if index < blk.offset + blk.left_dim * blk.right_dim {
                let k = index - blk.offset;
                let (i, j) = (k / blk.right_dim, k % blk.right_dim);
                return Ok((blk, i, j));
            }
        }
        Err(ModuleError::NotInModule(format!("no basis element {index} in degree {degree}")))
    }

    /// `Sq^i` of basis element `index` in `degree`, as a vector in degree
    /// `degree + i`.
    pub fn sq_basis(&self, i: usize, degree: usize, index: usize) -> Result<Gf2Vector, ModuleError> {
        if i == 0 {
            return Ok(Gf2Vector::unit(self.dim(degree)?, index));
        }
        match self {
            StructuredModule::Finite(m) => Ok(m.sq_block(i, degree).column(index)),
            StructuredModule::Free { n: 1, .. } => {
                // Sq^{2^j} u^{2^j} = u^{2^{j+1}}, every other square vanishes
                let target_dim = self.dim(degree + i)?;
                Ok(if i == degree {
                    Gf2Vector::unit(target_dim, 0)
                } else {
                    Gf2Vector::zeros(target_dim)
                })
            }
            StructuredModule::Free { n, .. } => {
                let target_dim = self.dim(degree + i)?;
                let source = unstable_basis(*n, degree - n);
                let image = sq_times(i, &AdmissibleSum::from(source[index].clone()));
                let target = unstable_basis(*n, degree + i - n);
                let mut v = Gf2Vector::zeros(target_dim);
                for m in image.terms().filter(|m| m.excess() <= *n) {
                    let k = target.binary_search(m).expect("excess-bounded admissible in basis");
                    v.flip(k);
                }
                Ok(v)
            }
            StructuredModule::Suspension(m, s) => m.sq_basis(i, degree - s, index),
            StructuredModule::Tensor(a, b) => {
                let (blk, x, y) = self.split_tensor_index(degree, index)?;
                let (d1, d2) = (blk.left_degree, degree - blk.left_degree);
                let targets = self.tensor_blocks(degree + i)?;
                let mut v = Gf2Vector::zeros(targets.iter().map(|t| t.left_dim * t.right_dim).sum());
                for j in 0..=i.min(d1) {
                    if i - j > d2 {
                        continue;
                    }
                    let left = a.sq_basis(j, d1, x)?;
                    if left.is_zero() {
                        continue;
                    }
                    let right = b.sq_basis(i - j, d2, y)?;
                    if right.is_zero() {
                        continue;
                    }
                    let t = targets
                        .iter()
                        .find(|t| t.left_degree == d1 + j)
                        .expect("nonzero factors give a target block");
                    for p in left.ones() {
                        for q in right.ones() {
                            v.flip(t.offset + p * t.right_dim + q);
                        }
                    }
                }
                Ok(v)
            }
            StructuredModule::RpInfinity => Ok(Gf2Vector::from_bits(&[u8::from(binom2(degree, i))])),
        }
    }

    /// The matrix of `Sq^i` from `degree` to `degree + i`.
    pub fn sq_matrix(&self, i: usize, degree: usize) -> Result<Gf2Matrix, ModuleError> {
        let rows = self.dim(degree + i)?;
        let cols: Vec<Gf2Vector> = (0..self.dim(degree)?)
            .map(|j| self.sq_basis(i, degree, j))
            .collect::<Result<_, _>>()?;
        Ok(Gf2Matrix::from_columns(rows, &cols)?)
    }

    pub fn sq_vec(&self, i: usize, degree: usize, v: &Gf2Vector) -> Result<Gf2Vector, ModuleError> {
        let mut out: Option<Gf2Vector> = None;
        for j in v.ones() {
            let w = self.sq_basis(i, degree, j)?;
            match &mut out {
                Some(acc) => acc.add_assign(&w),
                None => out = Some(w),
            }
        }
        match out {
            Some(v) => Ok(v),
            None => Ok(Gf2Vector::zeros(self.dim(degree + i)?)),
        }
    }

    pub fn contains(&self, x: &ModuleElement) -> Result<(), ModuleError> {
        for (&d, v) in x.parts() {
            let dim = self.dim(d)?;
            if v.len() != dim {
                return Err(ModuleError::NotInModule(format!(
                    "component in degree {d} has length {}, expected {dim}",
                    v.len()
                )));
            }
        }
        Ok(())
    }

    /// `Sq^i x`; components killed by instability are dropped without
    /// touching the target degree.
    pub fn sq(&self, i: usize, x: &ModuleElement) -> Result<ModuleElement, ModuleError> {
        let mut out = ModuleElement::zero();
        for (&d, v) in x.parts() {
            if i > d {
                continue;
            }
            out.add_part(d + i, &self.sq_vec(i, d, v)?);
        }
        Ok(out)
    }

    pub fn act(&self, op: &AdmissibleSum, x: &ModuleElement) -> Result<ModuleElement, ModuleError> {
        self.contains(x)?;
        let mut out = ModuleElement::zero();
        for m in op.terms() {
            let mut y = x.clone();
            for &i in m.indices().iter().rev() {
                if y.is_zero() {
                    break;
                }
                y = self.sq(i, &y)?;
            }
            out.add_assign(&y);
        }
        Ok(out)
    }

    /// `Sq_k x = Sq^{|x| - k} x`, zero when `k < 0` or `k > |x|`.
    pub fn sq_lower(&self, k: i64, x: &ModuleElement) -> Result<ModuleElement, ModuleError> {
        if !x.is_homogeneous() {
            return Err(ModuleError::NotHomogeneous);
        }
        let Some(d) = x.degree() else {
            return Ok(ModuleElement::zero());
        };
        if k < 0 || k as usize > d {
            return Ok(ModuleElement::zero());
        }
        self.sq(d - k as usize, x)
    }

    /// `x * y` in a tensor shape, for homogeneous factors.
    pub fn tensor_element(&self, x: &ModuleElement, y: &ModuleElement) -> Result<ModuleElement, ModuleError> {
        let StructuredModule::Tensor(a, b) = self else {
            return Err(ModuleError::NotInModule("not a tensor product".into()));
        };
        a.contains(x)?;
        b.contains(y)?;
        let mut out = ModuleElement::zero();
        for (&d1, v) in x.parts() {
            for (&d2, w) in y.parts() {
                let blocks = self.tensor_blocks(d1 + d2)?;
                let t = blocks
                    .iter()
                    .find(|t| t.left_degree == d1)
                    .expect("nonzero factors give a block");
                let mut z = Gf2Vector::zeros(blocks.iter().map(|t| t.left_dim * t.right_dim).sum());
                for p in v.ones() {
                    for q in w.ones() {
                        z.flip(t.offset + p * t.right_dim + q);
                    }
                }
                out.add_part(d1 + d2, &z);
            }
        }
        Ok(out)
    }

    /// The quotient by everything above `top`, as a finite module.
    pub fn truncate(&self, top: usize) -> Result<FiniteUnstableModule, ModuleError> {
        let dims: Vec<usize> = (0..=top).map(|d| self.dim(d)).collect::<Result<_, _>>()?;
        let mut ops = BTreeMap::new();
        for i in 1..=top {
            let mut blocks = BTreeMap::new();
            for d in 0..=top - i {
                if dims[d] > 0 && dims[d + i] > 0 {
                    blocks.insert(d, self.sq_matrix(i, d)?);
                }
            }
            ops.insert(i, blocks);
        }
        let mut labels = BTreeMap::new();
        for (d, &n) in dims.iter().enumerate() {
            for j in 0..n {
                labels.insert((d, j), self.basis_label(d, j)?);
            }
        }
        make_finite(&ModuleDescription {
            name: format!("{self}"),
            dims,
            ops,
            labels,
        })
    }
}

pub type ProductTable = BTreeMap<(usize, usize), Vec<Vec<Gf2Vector>>>;

/// Raw algebra tables: `products[(d1, d2)][i][j]` is the product of basis
/// element `i` of degree `d1` with basis element `j` of degree `d2`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlgebraDescription {
    pub module: ModuleDescription,
    pub products: ProductTable,
}

/// A connected unstable algebra of finite type, truncated at the module's
/// top degree. The unit is the single class in degree 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteUnstableAlgebra {
    module: FiniteUnstableModule,
    // positive degrees only, every pair with d1 + d2 <= top present
    products: ProductTable,
}

fn assemble_products(
    module: &FiniteUnstableModule,
    raw: &ProductTable,
) -> Result<ProductTable, Vec<Violation>> {
    let top = module.top_degree();
    let mut errors = Vec::new();
    for (&(d1, d2), table) in raw {
        if d1 + d2 > top {
            errors.push(Violation::Shape(format!("product table {d1},{d2} lands above the top degree")));
            continue;
        }
        let ok = table.len() == module.dim(d1)
            && table
                .iter()
                .all(|row| row.len() == module.dim(d2) && row.iter().all(|v| v.len() == module.dim(d1 + d2)));
        if !ok {
            errors.push(Violation::Shape(format!(
                "product table {d1},{d2} must be {}x{} vectors of length {}",
                module.dim(d1),
                module.dim(d2),
                module.dim(d1 + d2)
            )));
            continue;
        }
        if d1 == 0 || d2 == 0 {
            // only the unit lives in degree 0
            let (d, swap) = if d1 == 0 { (d2, false) } else { (d1, true) };
            for k in 0..module.dim(d) {
                let v = if swap { &table[k][0] } else { &table[0][k] };
                if *v != Gf2Vector::unit(module.dim(d), k) {
                    errors.push(Violation::Unit { degree: d, index: k });
                }
            }
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    let mut products = BTreeMap::new();
    for d1 in 1..=top {
        for d2 in 1..=top - d1.min(top) {
            if d1 + d2 > top {
                break;
            }
            let table = raw.get(&(d1, d2)).cloned().unwrap_or_else(|| {
                vec![vec![Gf2Vector::zeros(module.dim(d1 + d2)); module.dim(d2)]; module.dim(d1)]
            });
            products.insert((d1, d2), table);
        }
    }
    Ok(products)
}

/// Every violated invariant of an algebra description; empty iff valid.
pub fn verify_algebra(desc: &AlgebraDescription) -> Vec<Violation> {
    let (space, actions) = match shape_checked(&desc.module) {
        Ok(x) => x,
        Err(v) => return vec![v],
    };
    let module = FiniteUnstableModule {
        name: desc.module.name.clone(),
        space,
        actions,
    };
    let mut out = module.violations();
    if module.dim(0) != 1 {
        out.push(Violation::NotConnected { dim0: module.dim(0) });
        return out;
    }
    match assemble_products(&module, &desc.products) {
        Err(mut v) => out.append(&mut v),
        Ok(products) => {
            let a = FiniteUnstableAlgebra { module, products };
            out.extend(a.algebra_violations());
        }
    }
    out
}

pub fn make_algebra(desc: &AlgebraDescription) -> Result<FiniteUnstableAlgebra, ModuleError> {
    match verify_algebra(desc).into_iter().next() {
        Some(v) => Err(ModuleError::Invalid(v)),
        None => {
            let module = make_finite(&desc.module)?;
            let products = assemble_products(&module, &desc.products).expect("verified");
            Ok(FiniteUnstableAlgebra { module, products })
        }
    }
}

impl FiniteUnstableAlgebra {
    pub fn module(&self) -> &FiniteUnstableModule {
        &self.module
    }

    pub fn name(&self) -> &str {
        self.module.name()
    }

    pub fn top_degree(&self) -> usize {
        self.module.top_degree()
    }

    pub fn dim(&self, degree: usize) -> usize {
        self.module.dim(degree)
    }

    pub fn products(&self) -> &ProductTable {
        &self.products
    }

    pub fn description(&self) -> AlgebraDescription {
        AlgebraDescription {
            module: self.module.description(),
            products: self
                .products
                .iter()
                .filter(|(_, t)| t.iter().flatten().any(|v| !v.is_zero()))
                .map(|(&k, t)| (k, t.clone()))
                .collect(),
        }
    }

    /// Product of two basis elements; an empty vector when the product
    /// lands above the top degree.
    pub fn mul_basis(&self, d1: usize, i: usize, d2: usize, j: usize) -> Gf2Vector {
        if d1 + d2 > self.top_degree() {
            return Gf2Vector::zeros(0);
        }
        match (d1, d2) {
            (0, _) => Gf2Vector::unit(self.dim(d2), j),
            (_, 0) => Gf2Vector::unit(self.dim(d1), i),
            _ => self.products[&(d1, d2)][i][j].clone(),
        }
    }

    pub fn mul(&self, d1: usize, x: &Gf2Vector, d2: usize, y: &Gf2Vector) -> Gf2Vector {
        let mut out = Gf2Vector::zeros(self.dim(d1 + d2));
        for i in x.ones() {
            for j in y.ones() {
                out.add_assign(&self.mul_basis(d1, i, d2, j));
            }
        }
        out
    }

    fn algebra_violations(&self) -> Vec<Violation> {
        let top = self.top_degree();
        let mut out = Vec::new();
        for (&(d1, d2), table) in &self.products {
            for i in 0..self.dim(d1) {
                for j in 0..self.dim(d2) {
                    if table[i][j] != self.products[&(d2, d1)][j][i] {
                        out.push(Violation::Commutativity {
                            left: (d1, i),
                            right: (d2, j),
                        });
                    }
                }
            }
        }
        for d1 in 1..=top {
            for d2 in 1..=top {
                for d3 in 1..=top {
                    if d1 + d2 + d3 > top {
                        break;
                    }
                    for i in 0..self.dim(d1) {
                        for j in 0..self.dim(d2) {
                            for k in 0..self.dim(d3) {
                                let ek = Gf2Vector::unit(self.dim(d3), k);
                                let ei = Gf2Vector::unit(self.dim(d1), i);
                                let left = self.mul(d1 + d2, &self.mul_basis(d1, i, d2, j), d3, &ek);
                                let right = self.mul(d1, &ei, d2 + d3, &self.mul_basis(d2, j, d3, k));
                                if left != right {
                                    out.push(Violation::Associativity {
                                        factors: [(d1, i), (d2, j), (d3, k)],
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        for &(d1, d2) in self.products.keys() {
            for op in 1..=top - d1 - d2 {
                for i in 0..self.dim(d1) {
                    for j in 0..self.dim(d2) {
                        let lhs = self.module.sq_vec(op, d1 + d2, &self.mul_basis(d1, i, d2, j));
                        let mut rhs = Gf2Vector::zeros(self.dim(d1 + d2 + op));
                        for a in 0..=op.min(d1) {
                            if op - a > d2 {
                                continue;
                            }
                            let x = self.module.sq_block(a, d1).column(i);
                            let y = self.module.sq_block(op - a, d2).column(j);
                            rhs.add_assign(&self.mul(d1 + a, &x, d2 + op - a, &y));
                        }
                        if lhs != rhs {
                            out.push(Violation::Cartan {
                                op,
                                left: (d1, i),
                                right: (d2, j),
                            });
                        }
                    }
                }
            }
        }
        for d in 1..=top / 2 {
            let sq = self.module.sq_block(d, d);
            for i in 0..self.dim(d) {
                if sq.column(i) != self.mul_basis(d, i, d, i) {
                    out.push(Violation::Restriction { degree: d, index: i });
                }
            }
        }
        out
    }

    /// `F_2`, concentrated in degree 0.
    pub fn trivial() -> Self {
        make_algebra(&AlgebraDescription {
            module: ModuleDescription {
                name: "F2".into(),
                dims: vec![1],
                ..Default::default()
            },
            products: BTreeMap::new(),
        })
        .expect("F_2 is an unstable algebra")
    }

    /// `F_2[x]/x^height` with `|x| = g` and `Sq^{g i} x^k = binom(k, i) x^{k+i}`
    /// (the cohomology of `RP^{height-1}` for `g = 1`, `CP^{height-1}` for
    /// `g = 2`). Other generator degrees are validated like any input.
    pub fn truncated_polynomial(g: usize, height: usize) -> Result<Self, ModuleError> {
        assert!(g >= 1 && height >= 1);
        let top = g * (height - 1);
        let mut dims = vec![0; top + 1];
        for k in 0..height {
            dims[g * k] = 1;
        }
        let mut ops: BTreeMap<usize, BTreeMap<usize, Gf2Matrix>> = BTreeMap::new();
        for k in 1..height {
            for i in 1..=k {
                if k + i < height && binom2(k, i) {
                    ops.entry(g * i)
                        .or_default()
                        .insert(g * k, Gf2Matrix::identity(1));
                }
            }
        }
        let mut products = BTreeMap::new();
        for a in 1..height {
            for b in 1..height - a {
                products.insert((g * a, g * b), vec![vec![Gf2Vector::from_bits(&[1])]]);
            }
        }
        make_algebra(&AlgebraDescription {
            module: ModuleDescription {
                name: format!("F2[x{g}]/x^{height}"),
                dims,
                ops,
                labels: (1..height).map(|k| ((g * k, 0), format!("x^{k}"))).collect(),
            },
            products,
        })
    }

    /// The exterior algebra on one generator of degree `g`.
    pub fn exterior(g: usize) -> Self {
        let mut dims = vec![0; g + 1];
        dims[0] = 1;
        dims[g] = 1;
        make_algebra(&AlgebraDescription {
            module: ModuleDescription {
                name: format!("E(x{g})"),
                dims,
                ops: BTreeMap::new(),
                labels: BTreeMap::from([((g, 0), format!("x{g}"))]),
            },
            products: BTreeMap::new(),
        })
        .expect("an exterior algebra on one class is unstable")
    }

    /// `A (x) B` with the Cartan action and componentwise product.
    pub fn tensor(&self, other: &FiniteUnstableAlgebra) -> Result<Self, ModuleError> {
        let shape = StructuredModule::from(self.module.clone()).tensor(other.module.clone().into());
        let top = self.top_degree() + other.top_degree();
        let module = shape.truncate(top)?;
        // basis index of (d1, i) x (d2, j) in degree d1 + d2, left-major
        let index = |d1: usize, i: usize, d2: usize, j: usize| {
            let offset: usize = (0..d1).map(|e| self.dim(e) * other.dim(d1 + d2 - e)).sum();
            offset + i * other.dim(d2) + j
        };
        let split = |d: usize, k: usize| {
            let mut rest = k;
            for e in 0..=d {
                let n = self.dim(e) * other.dim(d - e);
                if rest < n {
                    return (e, rest / other.dim(d - e), d - e, rest % other.dim(d - e));
                }
                rest -= n;
            }
            unreachable!("index within the tensor basis")
        };
        let mut products = BTreeMap::new();
        for d in 1..=top {
            for e in 1..=top - d {
                let mut table = vec![vec![Gf2Vector::zeros(module.dim(d + e)); module.dim(e)]; module.dim(d)];
                for (p, row) in table.iter_mut().enumerate() {
                    let (a1, i1, b1, j1) = split(d, p);
                    for (q, cell) in row.iter_mut().enumerate() {
                        let (a2, i2, b2, j2) = split(e, q);
                        if a1 + a2 > self.top_degree() || b1 + b2 > other.top_degree() {
                            continue;
                        }
                        let x = self.mul_basis(a1, i1, a2, i2);
                        let y = other.mul_basis(b1, j1, b2, j2);
                        for s in x.ones() {
                            for t in y.ones() {
                                cell.flip(index(a1 + a2, s, b1 + b2, t));
                            }
                        }
                    }
                }
                products.insert((d, e), table);
            }
        }
        make_algebra(&AlgebraDescription {
            module: module.description().renamed(&format!("{} x {}", self.name(), other.name())),
            products,
        })
    }
}

impl ModuleDescription {
    pub fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }
}

/// `Q(A) = Abar / Abar^2` with the induced action.
pub fn indecomposables(a: &FiniteUnstableAlgebra) -> Result<FiniteUnstableModule, ModuleError> {
    let top = a.top_degree();
    let mut quotients = BTreeMap::new();
    for d in 0..=top {
        let n = if d == 0 { 0 } else { a.dim(d) };
        let gens: Vec<Gf2Vector> = (0..n).map(|i| Gf2Vector::unit(n, i)).collect();
        let mut rels = Vec::new();
        for d1 in 1..d {
            for i in 0..a.dim(d1) {
                for j in 0..a.dim(d - d1) {
                    rels.push(a.mul_basis(d1, i, d - d1, j));
                }
            }
        }
        quotients.insert(d, QuotientSpace::new(n, d, &gens, &rels)?);
    }
    let mut m = induced_module(&format!("Q({})", a.name()), &quotients, 0, |i, d, v| {
        Ok(a.module().sq_vec(i, d, v))
    })?;
    if m.top_degree() < top {
        let mut dims = m.dims().to_vec();
        dims.resize(top + 1, 0);
        m = make_finite(&m.description().with_dims(dims))?;
    }
    Ok(m)
}

impl ModuleDescription {
    fn with_dims(mut self, dims: Vec<usize>) -> Self {
        self.dims = dims;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steenrod::AdmissibleMonomial;

    fn rp2() -> ModuleDescription {
        ModuleDescription {
            name: "RP2".into(),
            dims: vec![0, 1, 1],
            ops: BTreeMap::from([(1, BTreeMap::from([(1, Gf2Matrix::identity(1))]))]),
            labels: BTreeMap::new(),
        }
    }

    #[test]
    fn sphere_is_valid() {
        let s = FiniteUnstableModule::sphere(1);
        assert_eq!(s.dims(), &[0, 1]);
    }

    #[test]
    fn rp2_is_valid() {
        assert!(verify_instability(&rp2()).is_empty());
        assert!(make_finite(&rp2()).is_ok());
    }

    #[test]
    fn sq2_on_degree_one_is_unstable() {
        let desc = ModuleDescription {
            name: "bad".into(),
            dims: vec![0, 1, 0, 1],
            ops: BTreeMap::from([(2, BTreeMap::from([(1, Gf2Matrix::identity(1))]))]),
            labels: BTreeMap::new(),
        };
        assert_eq!(
            make_finite(&desc),
            Err(ModuleError::Invalid(Violation::Instability { op: 2, degree: 1, index: 0 }))
        );
    }

    #[test]
    fn adem_violation_names_the_pair() {
        // one class in each of degrees 2, 4, 6; Sq^2 x = y, Sq^2 y = z but
        // nothing else, so Sq^2 Sq^2 != Sq^3 Sq^1
        let one = Gf2Matrix::identity(1);
        let desc = ModuleDescription {
            name: "bad".into(),
            dims: vec![0, 0, 1, 0, 1, 0, 1],
            ops: BTreeMap::from([(2, BTreeMap::from([(2, one.clone()), (4, one.clone())]))]),
            labels: BTreeMap::new(),
        };
        let v = verify_instability(&desc);
        assert!(v.contains(&Violation::Adem { a: 2, b: 2, degree: 2, index: 0 }), "{v:?}");
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let mut desc = rp2();
        desc.ops.get_mut(&1).unwrap().insert(1, Gf2Matrix::identity(2));
        assert!(matches!(make_finite(&desc), Err(ModuleError::Invalid(Violation::Shape(_)))));
    }

    #[test]
    fn rp_infinity_binomials() {
        let rp = StructuredModule::RpInfinity;
        let u = |k| ModuleElement::basis(k, 1, 0);
        assert_eq!(rp.act(&AdmissibleSum::sq(1), &u(1)).unwrap(), u(2));
        assert_eq!(rp.act(&AdmissibleSum::sq(2), &u(3)).unwrap(), u(5));
        assert!(rp.act(&AdmissibleSum::sq(1), &u(2)).unwrap().is_zero());
    }

    #[test]
    fn free_one_is_powers_of_two() {
        let f = StructuredModule::free(1, 64);
        for d in 1..=64usize {
            assert_eq!(f.dim(d).unwrap(), usize::from(d.is_power_of_two()), "degree {d}");
        }
        assert!(matches!(f.dim(65), Err(ModuleError::Overflow { degree: 65, bound: 64 })));
        // Sq^{2^i} u^{2^i} = u^{2^{i+1}}
        for i in 0..5 {
            let x = ModuleElement::basis(1 << i, 1, 0);
            assert_eq!(f.sq(1 << i, &x).unwrap(), ModuleElement::basis(2 << i, 1, 0));
        }
    }

    #[test]
    fn free_one_embeds_in_rp_infinity() {
        let f = StructuredModule::free(1, 32);
        let rp = StructuredModule::RpInfinity;
        for d in (0..6).map(|i| 1usize << i) {
            for i in 1..=32 - d {
                let x = ModuleElement::basis(d, 1, 0);
                let in_f = f.sq(i, &x).unwrap();
                let in_rp = rp.sq(i, &x).unwrap();
                assert_eq!(in_f, in_rp, "Sq{i} u^{d}");
            }
        }
    }

    #[test]
    fn free_two_dims_match_excess_count() {
        let f = StructuredModule::free(2, 20);
        for d in 2..=20 {
            let k = d - 2;
            let count = crate::steenrod::full_basis(k).iter().filter(|m| m.excess() <= 2).count();
            assert_eq!(f.dim(d).unwrap(), count);
        }
        assert!(f.truncate(20).is_ok());
    }

    #[test]
    fn unstable_basis_is_canonical() {
        let b = unstable_basis(3, 6);
        let mut sorted = (*b).clone();
        sorted.sort();
        assert_eq!(*b, sorted);
        assert!(b.contains(&AdmissibleMonomial::new(vec![4, 2]).unwrap()));
        assert!(!b.contains(&AdmissibleMonomial::new(vec![6]).unwrap()));
    }

    #[test]
    fn suspension_of_f2() {
        let s = StructuredModule::from(FiniteUnstableModule::sphere(0)).suspend(1);
        let x = ModuleElement::basis(1, 1, 0);
        assert!(s.sq(1, &x).unwrap().is_zero());
        assert_eq!(s.sq_lower(1, &x).unwrap(), x);
    }

    #[test]
    fn tensor_of_circles() {
        let s1 = StructuredModule::from(FiniteUnstableModule::sphere(1));
        let t = s1.clone().tensor(s1);
        assert_eq!(t.dim(2).unwrap(), 1);
        let x = ModuleElement::basis(2, 1, 0);
        assert!(t.sq(1, &x).unwrap().is_zero());
        assert!(t.sq(2, &x).unwrap().is_zero());
    }

    #[test]
    fn tensor_with_free_one_basis() {
        let k = StructuredModule::from(FiniteUnstableModule::trivial_action("K", vec![0, 0, 2]));
        let t = k.tensor(StructuredModule::free(1, 64));
        for d in 0..=66usize {
            let expect = if d >= 2 && (d - 2).is_power_of_two() { 2 } else { 0 };
            assert_eq!(t.dim(d).unwrap(), expect, "degree {d}");
        }
    }

    #[test]
    fn cartan_step_on_tensor_with_free_one() {
        // w in degree 1 with Sq^1 w = 0: Sq^{2^j}(w x u^{2^j}) = w x u^{2^{j+1}}
        let k = StructuredModule::from(FiniteUnstableModule::sphere(1));
        let t = k.tensor(StructuredModule::free(1, 64));
        for j in 1..5 {
            let x = ModuleElement::basis(1 + (1 << j), 1, 0);
            assert_eq!(t.sq(1 << j, &x).unwrap(), ModuleElement::basis(1 + (2 << j), 1, 0));
        }
    }

    #[test]
    fn sq_lower_conventions() {
        let rp = StructuredModule::RpInfinity;
        let u3 = ModuleElement::basis(3, 1, 0);
        assert_eq!(rp.sq_lower(3, &u3).unwrap(), u3);
        assert!(rp.sq_lower(4, &u3).unwrap().is_zero());
        assert!(rp.sq_lower(-1, &u3).unwrap().is_zero());
        assert_eq!(rp.sq_lower(0, &u3).unwrap(), ModuleElement::basis(6, 1, 0));
        let mut mixed = u3.clone();
        mixed.add_assign(&ModuleElement::basis(2, 1, 0));
        assert_eq!(rp.sq_lower(0, &mixed), Err(ModuleError::NotHomogeneous));
    }

    #[test]
    fn action_is_associative_through_normalization() {
        let f = StructuredModule::free(2, 24);
        let m = f.truncate(24).unwrap();
        for d in 0..=24 {
            for a in 1..=6 {
                for b in 1..=6 {
                    if d + a + b > 24 {
                        continue;
                    }
                    let lhs = m.word_block(&[a, b], d);
                    let rhs = m.sum_block(&normalize_word(&[a, b]), d);
                    if let Some(rhs) = rhs {
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn truncated_polynomials_are_valid() {
        for h in 1..8 {
            FiniteUnstableAlgebra::truncated_polynomial(1, h).unwrap();
            FiniteUnstableAlgebra::truncated_polynomial(2, h).unwrap();
        }
        // Sq^3 x = x^2 would force Sq^1 Sq^2 x != 0
        assert!(FiniteUnstableAlgebra::truncated_polynomial(3, 3).is_err());
    }

    #[test]
    fn restriction_violation_is_reported() {
        let mut desc = FiniteUnstableAlgebra::truncated_polynomial(1, 3).unwrap().description();
        desc.module.ops.clear();
        let v = verify_algebra(&desc);
        assert!(v.contains(&Violation::Restriction { degree: 1, index: 0 }), "{v:?}");
    }

    #[test]
    fn indecomposables_examples() {
        let q = indecomposables(&FiniteUnstableAlgebra::exterior(3)).unwrap();
        assert_eq!(q.dims(), &[0, 0, 0, 1]);
        let q = indecomposables(&FiniteUnstableAlgebra::truncated_polynomial(1, 4).unwrap()).unwrap();
        assert_eq!(q.dims(), &[0, 1, 0, 0]);
        let q = indecomposables(&FiniteUnstableAlgebra::trivial()).unwrap();
        assert_eq!(q.dims(), &[0]);
    }

    #[test]
    fn algebra_tensor_product() {
        let a = FiniteUnstableAlgebra::truncated_polynomial(1, 3).unwrap();
        let b = FiniteUnstableAlgebra::exterior(2);
        let t = a.tensor(&b).unwrap();
        assert_eq!(t.module().dims(), &[1, 1, 2, 1, 1]);
        let q = indecomposables(&t).unwrap();
        assert_eq!(q.dims(), &[0, 1, 1, 0, 0]);
    }

    #[test]
    fn direct_sum_and_suspension() {
        let rp2 = make_finite(&rp2()).unwrap();
        let s = rp2.suspend(2);
        assert_eq!(s.dims(), &[0, 0, 0, 1, 1]);
        assert_eq!(s.sq_block(1, 3), Gf2Matrix::identity(1));
        let sum = rp2.direct_sum(&FiniteUnstableModule::sphere(2));
        assert_eq!(sum.dims(), &[0, 1, 2]);
    }

    #[test]
    fn submodules_and_quotients() {
        let rp = StructuredModule::RpInfinity.truncate(6).unwrap();
        // u^2 generates only u^2 and u^4: Sq^1 u^2 = 0, Sq^2 u^4 = binom(4, 2) u^6 = 0
        let gens = BTreeMap::from([(2, vec![Gf2Vector::unit(1, 0)])]);
        let sub = rp.generated_submodule(&gens);
        let dims: Vec<usize> = sub.values().map(Vec::len).collect();
        assert_eq!(dims, vec![0, 0, 1, 0, 1, 0, 0]);
        let q = rp.quotient(&sub).unwrap();
        assert_eq!(q.dims(), &[0, 1, 0, 1, 0, 1, 1]);
        assert_eq!(q.sq_block(2, 3), Gf2Matrix::identity(1));
        let n = rp.restrict(&sub).unwrap();
        assert_eq!(n.dims(), &[0, 0, 1, 0, 1, 0, 0]);
        assert_eq!(n.sq_block(2, 2), Gf2Matrix::identity(1));
    }
}
