//! The nilpotent filtration `M = M_0 ⊃ M_1 ⊃ ...` and its reduced layers.
//!
//! An element `x` is `s`-nilpotent when every chain `x, Sq_k x, Sq_k^2 x, ...`
//! with `k < s` reaches zero, where `Sq_k x = Sq^{|x|-k} x`. Chains double
//! degrees, so on infinite shapes a chain is only decided once it enters a
//! subspace on which `Sq_k` is known to be injective forever; those subspaces
//! come from closed forms registered per shape (see [`persistent_subspace`]).
//! Anything else runs against explicit budgets and reports `Unknown`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::gf2::{Gf2Matrix, Gf2Vector, QuotientSpace, Subspace};
use crate::modules::{induced_module, FiniteUnstableModule, ModuleElement, ModuleError, StructuredModule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NilError {
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error("undetermined at budget in degree {degree}: {reason}")]
    Undetermined { degree: usize, reason: Budget },
    #[error("submodule basis is dependent in degree {0}")]
    NotInjective(usize),
    #[error("layer R_{s} is not reduced in degree {degree}")]
    NotReduced { s: usize, degree: usize },
    #[error("saturation chain did not stabilize within {0} steps")]
    NoStabilization(usize),
    #[error("saturation output fails its contract: {0}")]
    SaturationCheck(String),
}

impl From<crate::gf2::Gf2Error> for NilError {
    fn from(e: crate::gf2::Gf2Error) -> Self {
        NilError::Module(e.into())
    }
}

/// Which budget ran out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    IterationCap(usize),
    DegreeBound { degree: usize, bound: usize },
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::IterationCap(c) => write!(f, "iteration cap c_max = {c} reached"),
            Budget::DegreeBound { degree, bound } => {
                write!(f, "degree {degree} exceeds the module bound {bound}")
            }
        }
    }
}

/// Why a `Sq_k` chain never vanishes once it reaches a given subspace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NonVanishing {
    /// `k = |x|`, so `Sq_k` is the identity.
    Periodic,
    /// `Sq_k u^e = binom(e, k) u^{2e-k}` on `RP^inf`, and `e - k` is
    /// divisible by `2^{bitlen(k)}`, which is preserved along the chain.
    RpInfinityBinomial,
    /// `Sq_0 u^{2^i} = u^{2^{i+1}}` in `F(1)`.
    FreeOneSquaring,
    /// `Sq_k (w * u^{2^i}) = w * u^{2^{i+1}}` when `|w| = k < 2^i` in `K * F(1)`.
    TensorFreeOne,
    /// `Sq_0 = Sq_0 (x) Sq_0` on a tensor product of shapes with injective
    /// `Sq_0`.
    ReducedTensor,
    /// The rule of the desuspended module, with `k` shifted by `s`.
    Suspended(usize, Box<NonVanishing>),
}

impl fmt::Display for NonVanishing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonVanishing::Periodic => write!(f, "periodic"),
            NonVanishing::RpInfinityBinomial => write!(f, "rp-binomial"),
            NonVanishing::FreeOneSquaring => write!(f, "free-one-squaring"),
            NonVanishing::TensorFreeOne => write!(f, "tensor-free-one"),
            NonVanishing::ReducedTensor => write!(f, "reduced-tensor"),
            NonVanishing::Suspended(s, inner) => write!(f, "suspended({s}, {inner})"),
        }
    }
}

/// The same shape with every `F(1)` factor unbounded: its closed form is
/// valid in every degree.
pub fn unbounded(m: &StructuredModule) -> StructuredModule {
    match m {
        StructuredModule::Free { n: 1, .. } => StructuredModule::Free {
            n: 1,
            bound: usize::MAX / 4,
        },
        StructuredModule::Suspension(inner, s) => StructuredModule::Suspension(Box::new(unbounded(inner)), *s),
        StructuredModule::Tensor(a, b) => StructuredModule::Tensor(Box::new(unbounded(a)), Box::new(unbounded(b))),
        other => other.clone(),
    }
}

/// Shapes whose `Sq_0` is injective in every degree by a closed form:
/// `Sq_0 = Sq_0 (x) Sq_0` on a tensor product.
fn reduced_by_closed_form(m: &StructuredModule) -> bool {
    match m {
        StructuredModule::RpInfinity | StructuredModule::Free { n: 1, .. } => true,
        StructuredModule::Tensor(a, b) => reduced_by_closed_form(a) && reduced_by_closed_form(b),
        _ => false,
    }
}

/// A subspace of degree `e` on which `Sq_k` is injective and which it maps
/// into the corresponding subspace of degree `2e - k`; every nonzero vector
/// in it therefore has a nonvanishing chain. Shapes without a registered
/// rule only report the periodic case `k = e`.
pub fn persistent_subspace(
    m: &StructuredModule,
    k: i64,
    e: usize,
) -> Result<(Vec<Gf2Vector>, Option<NonVanishing>), ModuleError> {
    let dim = m.dim(e)?;
    let all = || (0..dim).map(|j| Gf2Vector::unit(dim, j)).collect::<Vec<_>>();
    if dim == 0 || k < 0 || k as usize > e {
        return Ok((Vec::new(), None));
    }
    let k = k as usize;
    if k == e {
        return Ok((all(), Some(NonVanishing::Periodic)));
    }
    Ok(match m {
        StructuredModule::RpInfinity => {
            let modulus = 1usize << (usize::BITS - k.leading_zeros());
            if (e - k).is_multiple_of(modulus) {
                (all(), Some(NonVanishing::RpInfinityBinomial))
            } else {
                (Vec::new(), None)
            }
        }
        StructuredModule::Free { n: 1, .. } if k == 0 => (all(), Some(NonVanishing::FreeOneSquaring)),
        StructuredModule::Tensor(..) if k == 0 && reduced_by_closed_form(m) => {
            (all(), Some(NonVanishing::ReducedTensor))
        }
        StructuredModule::Suspension(inner, s) => {
            let (basis, tag) = persistent_subspace(inner, k as i64 - *s as i64, e - s)?;
            (basis, tag.map(|t| NonVanishing::Suspended(*s, Box::new(t))))
        }
        StructuredModule::Tensor(a, b)
            if matches!(**a, StructuredModule::Finite(_)) && matches!(**b, StructuredModule::Free { n: 1, .. }) =>
        {
            let p = e - k;
            if p.is_power_of_two() && p > k && a.dim(k)? > 0 {
                // classes w * u^p with |w| = k: a whole tensor block
                let mut offset = 0;
                for d1 in 0..k {
                    offset += a.dim(d1)? * b.dim(e - d1)?;
                }
                let basis = (0..a.dim(k)?).map(|j| Gf2Vector::unit(dim, offset + j)).collect();
                (basis, Some(NonVanishing::TensorFreeOne))
            } else {
                (Vec::new(), None)
            }
        }
        _ => (Vec::new(), None),
    })
}

/// How a single `Sq_k` chain ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainOutcome {
    /// `Sq_k^steps x = 0`.
    Vanishes { steps: usize },
    /// The chain up to the point where it entered a persistent subspace.
    Persists { chain: Vec<ModuleElement>, proof: NonVanishing },
    Unknown(Budget),
}

/// Follows `x, Sq_k x, Sq_k^2 x, ...` for at most `c_max` steps.
pub fn lower_chain(m: &StructuredModule, k: i64, x: &ModuleElement, c_max: usize) -> Result<ChainOutcome, NilError> {
    if !x.is_homogeneous() {
        return Err(ModuleError::NotHomogeneous.into());
    }
    let exact = unbounded(m);
    let mut chain = vec![x.clone()];
    for c in 0..=c_max {
        let y = &chain[c];
        let Some(e) = y.degree() else {
            return Ok(ChainOutcome::Vanishes { steps: c });
        };
        let (basis, tag) = persistent_subspace(&exact, k, e)?;
        if let Some(tag) = tag {
            if Subspace::spanned_by(exact.dim(e)?, &basis).contains(&y.parts()[&e]) {
                return Ok(ChainOutcome::Persists { chain, proof: tag });
            }
        }
        if c == c_max {
            break;
        }
        match exact.sq_lower(k, y) {
            Ok(next) => chain.push(next),
            Err(ModuleError::Overflow { degree, bound }) => {
                return Ok(ChainOutcome::Unknown(Budget::DegreeBound { degree, bound }))
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(ChainOutcome::Unknown(Budget::IterationCap(c_max)))
}

/// Why an element is not more nilpotent than certified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Obstruction {
    /// The `Sq_k` chain never vanishes, so the element is exactly
    /// `k`-nilpotent.
    NotNilpotent { k: usize, chain: Vec<ModuleElement>, proof: NonVanishing },
    Unknown { k: usize, reason: Budget },
}

/// The outcome of the nilpotence criterion for one element: a vanishing
/// witness `c_k` for each `k` below the certified level, then either nothing
/// (the element is at least `s_max`-nilpotent), a nonvanishing chain, or an
/// exhausted budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NilpotenceCertificate {
    pub degree: Option<usize>,
    pub s_max: usize,
    pub witnesses: BTreeMap<usize, usize>,
    pub obstruction: Option<Obstruction>,
}

impl NilpotenceCertificate {
    /// The level `s` for which the element certifies as at least
    /// `s`-nilpotent.
    pub fn at_least(&self) -> usize {
        self.witnesses.len()
    }

    /// The exact nilpotence degree, when a nonvanishing chain was found.
    pub fn exact(&self) -> Option<usize> {
        match &self.obstruction {
            Some(Obstruction::NotNilpotent { k, .. }) => Some(*k),
            _ => None,
        }
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self.obstruction, Some(Obstruction::Unknown { .. }))
    }
}

impl fmt::Display for NilpotenceCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.witnesses.iter().map(|(k, c)| format!("k={k}:c={c}")).collect();
        write!(f, "nilpotent >= {} [{}]", self.at_least(), w.join(" "))?;
        match &self.obstruction {
            None => Ok(()),
            Some(Obstruction::NotNilpotent { k, chain, proof }) => {
                write!(f, "; not {}-nilpotent: Sq_{k} chain of length {} enters {proof}", k + 1, chain.len())
            }
            Some(Obstruction::Unknown { k, reason }) => write!(f, "; undetermined at k={k}: {reason}"),
        }
    }
}

/// Runs the criterion for `k = 0, 1, ..., s_max - 1`.
pub fn nilpotence_degree(
    m: &StructuredModule,
    x: &ModuleElement,
    s_max: usize,
    c_max: usize,
) -> Result<NilpotenceCertificate, NilError> {
    m.contains(x)?;
    if !x.is_homogeneous() {
        return Err(ModuleError::NotHomogeneous.into());
    }
    let mut witnesses = BTreeMap::new();
    let mut obstruction = None;
    for k in 0..s_max {
        match lower_chain(m, k as i64, x, c_max)? {
            ChainOutcome::Vanishes { steps } => {
                witnesses.insert(k, steps);
            }
            ChainOutcome::Persists { chain, proof } => {
                obstruction = Some(Obstruction::NotNilpotent { k, chain, proof });
                break;
            }
            ChainOutcome::Unknown(reason) => {
                obstruction = Some(Obstruction::Unknown { k, reason });
                break;
            }
        }
    }
    Ok(NilpotenceCertificate {
        degree: x.degree(),
        s_max,
        witnesses,
        obstruction,
    })
}

/// Replays a certificate by iterating `sq_lower`: every witness must reach
/// zero in exactly the stated number of steps, and a nonvanishing chain must
/// be a genuine `Sq_k` chain ending in a persistent subspace.
pub fn replay_certificate(
    m: &StructuredModule,
    x: &ModuleElement,
    cert: &NilpotenceCertificate,
) -> Result<bool, NilError> {
    let exact = unbounded(m);
    for (&k, &c) in &cert.witnesses {
        let mut y = x.clone();
        for step in 0..c {
            if y.is_zero() {
                return Ok(step == c);
            }
            y = exact.sq_lower(k as i64, &y)?;
        }
        if !y.is_zero() {
            return Ok(false);
        }
    }
    if let Some(Obstruction::NotNilpotent { k, chain, proof }) = &cert.obstruction {
        if chain.first() != Some(x) {
            return Ok(false);
        }
        for w in chain.windows(2) {
            if exact.sq_lower(*k as i64, &w[0])? != w[1] {
                return Ok(false);
            }
        }
        let last = chain.last().expect("nonempty chain");
        let Some(e) = last.degree() else {
            return Ok(false);
        };
        let (basis, tag) = persistent_subspace(&exact, *k as i64, e)?;
        if tag.as_ref() != Some(proof) || !Subspace::spanned_by(exact.dim(e)?, &basis).contains(&last.parts()[&e]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Basis of a subspace in each degree `0..=bound`.
pub type SubBasis = BTreeMap<usize, Vec<Gf2Vector>>;

/// `{x in M_d : Sq_k^c x = 0 for some c}`, computed by iterating the chain
/// on a whole basis until the images enter a persistent subspace.
fn eventually_zero(exact: &StructuredModule, k: i64, d: usize, c_max: usize) -> Result<Vec<Gf2Vector>, NilError> {
    let dim = exact.dim(d)?;
    let everything = || (0..dim).map(|j| Gf2Vector::unit(dim, j)).collect::<Vec<_>>();
    if dim == 0 || k < 0 || k as usize > d {
        return Ok(everything());
    }
    let k = k as usize;
    let mut cols = everything();
    let mut e = d;
    for _ in 0..=c_max {
        let (basis, _) = persistent_subspace(exact, k as i64, e)?;
        let pers = Subspace::spanned_by(exact.dim(e)?, &basis);
        if cols.iter().all(|c| pers.contains(c)) {
            let image = Gf2Matrix::from_columns(exact.dim(e)?, &cols)?;
            return Ok(image.kernel());
        }
        if k > e {
            return Ok(everything());
        }
        let next = 2 * e - k;
        if exact.top_degree().is_some_and(|t| next > t) {
            return Ok(everything());
        }
        let mut new_cols = Vec::with_capacity(cols.len());
        for c in &cols {
            match exact.sq_vec(e - k, e, c) {
                Ok(v) => new_cols.push(v),
                Err(ModuleError::Overflow { degree, bound }) => {
                    return Err(NilError::Undetermined {
                        degree: d,
                        reason: Budget::DegreeBound { degree, bound },
                    })
                }
                Err(err) => return Err(err.into()),
            }
        }
        cols = new_cols;
        e = next;
    }
    Err(NilError::Undetermined {
        degree: d,
        reason: Budget::IterationCap(c_max),
    })
}

fn intersect(dim: usize, a: &[Gf2Vector], b: &[Gf2Vector]) -> Vec<Gf2Vector> {
    // x = sum a_i = sum b_j: kernel of [A | B], read off the A half
    let cols: Vec<Gf2Vector> = a.iter().chain(b).cloned().collect();
    let m = Gf2Matrix::from_columns(dim, &cols).expect("same ambient");
    let mut out = Subspace::new(dim);
    for z in m.kernel() {
        let mut v = Gf2Vector::zeros(dim);
        for i in z.ones().filter(|&i| i < a.len()) {
            v.add_assign(&a[i]);
        }
        out.insert(&v);
    }
    out.independent().to_vec()
}

/// The largest `s`-nilpotent submodule within `degree_bound`: elements
/// certified by the criterion for every `k < s`, cut down to the largest
/// subspace closed under the action (closure is checked for targets within
/// the bound).
pub fn filtration_layer(m: &StructuredModule, s: usize, degree_bound: usize, c_max: usize) -> Result<SubBasis, NilError> {
    let exact = unbounded(m);
    let mut layer = SubBasis::new();
    for d in (0..=degree_bound).rev() {
        let dim = exact.dim(d)?;
        let mut cand: Vec<Gf2Vector> = (0..dim).map(|j| Gf2Vector::unit(dim, j)).collect();
        for k in 0..s {
            if cand.is_empty() {
                break;
            }
            let ez = eventually_zero(&exact, k as i64, d, c_max)?;
            cand = intersect(dim, &cand, &ez);
        }
        // closure: Sq^i x must stay in the layer already computed above d
        let mut constraints: Vec<Gf2Vector> = Vec::new();
        if !cand.is_empty() {
            for i in 1..=d.min(degree_bound - d) {
                let target = &layer[&(d + i)];
                let tdim = exact.dim(d + i)?;
                let sub = Subspace::spanned_by(tdim, target);
                let residues: Vec<Gf2Vector> = cand
                    .iter()
                    .map(|v| exact.sq_vec(i, d, v).map(|w| sub.reduce(&w)))
                    .collect::<Result<_, _>>()?;
                for r in 0..tdim {
                    constraints.push(Gf2Vector::from_bits(
                        &residues.iter().map(|w| u8::from(w.get(r))).collect::<Vec<_>>(),
                    ));
                }
            }
        }
        let closed = if constraints.is_empty() {
            cand
        } else {
            let cmat = Gf2Matrix::from_rows(cand.len(), constraints)?;
            cmat.kernel()
                .into_iter()
                .map(|z| {
                    let mut v = Gf2Vector::zeros(dim);
                    for i in z.ones() {
                        v.add_assign(&cand[i]);
                    }
                    v
                })
                .collect()
        };
        layer.insert(d, closed);
    }
    Ok(layer)
}

/// `R_s(M) = Sigma^{-s}(M_s / M_{s+1})` within the bound, with its reducedness
/// checked in every degree `j` with `2j + s <= degree_bound`.
pub fn rs_layer(m: &StructuredModule, s: usize, degree_bound: usize, c_max: usize) -> Result<FiniteUnstableModule, NilError> {
    let upper = filtration_layer(m, s, degree_bound, c_max)?;
    let lower = filtration_layer(m, s + 1, degree_bound, c_max)?;
    rs_from_layers(m, s, degree_bound, &upper, &lower)
}

fn rs_quotients(
    exact: &StructuredModule,
    s: usize,
    degree_bound: usize,
    upper: &SubBasis,
    lower: &SubBasis,
) -> Result<BTreeMap<usize, QuotientSpace>, NilError> {
    let mut quotients = BTreeMap::new();
    for d in s..=degree_bound {
        quotients.insert(d, QuotientSpace::new(exact.dim(d)?, d, &upper[&d], &lower[&d])?);
    }
    Ok(quotients)
}

fn rs_from_layers(
    m: &StructuredModule,
    s: usize,
    degree_bound: usize,
    upper: &SubBasis,
    lower: &SubBasis,
) -> Result<FiniteUnstableModule, NilError> {
    let exact = unbounded(m);
    let quotients = rs_quotients(&exact, s, degree_bound, upper, lower)?;
    let r = induced_module(&format!("R{s}({m})"), &quotients, s, |i, d, v| exact.sq_vec(i, d, v))?;
    for j in 0..=r.top_degree() {
        if r.dim(j) > 0 && 2 * j + s <= degree_bound && r.sq_block(j, j).rank() < r.dim(j) {
            return Err(NilError::NotReduced { s, degree: j });
        }
    }
    Ok(r)
}

/// `R_s(M)` together with the image of `R_s(N) -> R_s(M)` for a submodule
/// `N`, as a basis per degree of `R_s(M)`. Since `N_s = N ∩ M_s`, the image
/// is `(N ∩ M_s + M_{s+1}) / M_{s+1}`.
pub fn rs_layer_with_image(
    m: &StructuredModule,
    n: &Submodule,
    s: usize,
    degree_bound: usize,
    c_max: usize,
) -> Result<(FiniteUnstableModule, SubBasis), NilError> {
    let exact = unbounded(m);
    let upper = filtration_layer(m, s, degree_bound, c_max)?;
    let lower = filtration_layer(m, s + 1, degree_bound, c_max)?;
    let r = rs_from_layers(m, s, degree_bound, &upper, &lower)?;
    let quotients = rs_quotients(&exact, s, degree_bound, &upper, &lower)?;
    let mut image = SubBasis::new();
    for (&d, q) in &quotients {
        let dim = exact.dim(d)?;
        let nb = n.basis(d)?;
        let mut span = Subspace::new(q.dim());
        for v in intersect(dim, &nb, &upper[&d]) {
            span.insert(&q.project(&v).expect("inside the layer"));
        }
        image.insert(d - s, span.independent().to_vec());
    }
    Ok((r, image))
}

/// The layers `M_0 ⊇ ... ⊇ M_{s_max+1}` and quotients `R_0, ..., R_{s_max}`.
#[derive(Debug, Clone)]
pub struct FiltrationTable {
    pub module: String,
    pub degree_bound: usize,
    pub c_max: usize,
    pub layers: BTreeMap<usize, SubBasis>,
    pub quotients: BTreeMap<usize, FiniteUnstableModule>,
}

impl FiltrationTable {
    pub fn layer_dims(&self, s: usize) -> Vec<usize> {
        self.layers[&s].values().map(Vec::len).collect()
    }
}

pub fn filtration_table(
    m: &StructuredModule,
    s_max: usize,
    degree_bound: usize,
    c_max: usize,
) -> Result<FiltrationTable, NilError> {
    let mut layers = BTreeMap::new();
    for s in 0..=s_max + 1 {
        layers.insert(s, filtration_layer(m, s, degree_bound, c_max)?);
    }
    let mut quotients = BTreeMap::new();
    for s in 0..=s_max.min(degree_bound) {
        quotients.insert(s, rs_from_layers(m, s, degree_bound, &layers[&s], &layers[&(s + 1)])?);
    }
    Ok(FiltrationTable {
        module: m.to_string(),
        degree_bound,
        c_max,
        layers,
        quotients,
    })
}

/// Whether `Sq_0` is injective in every degree `d <= degree_bound`. Degrees
/// whose square lands above a known top degree count as non-injective;
/// degrees whose square lands above the bound are skipped.
pub fn is_reduced(m: &StructuredModule, degree_bound: usize) -> Result<bool, NilError> {
    for d in 1..=degree_bound {
        let dim = m.dim(d)?;
        if dim == 0 {
            continue;
        }
        if m.top_degree().is_some_and(|t| 2 * d > t) {
            return Ok(false);
        }
        if 2 * d > degree_bound {
            continue;
        }
        if m.sq_matrix(d, d)?.rank() < dim {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A submodule given by its basis in each degree, possibly by a rule valid
/// in every degree.
#[derive(Clone)]
pub struct Submodule {
    name: String,
    basis: Arc<dyn Fn(usize) -> Result<Vec<Gf2Vector>, ModuleError> + Send + Sync>,
    powers_of_two_support: bool,
}

impl fmt::Debug for Submodule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Submodule({})", self.name)
    }
}

impl Submodule {
    pub fn from_fn(
        name: &str,
        basis: impl Fn(usize) -> Result<Vec<Gf2Vector>, ModuleError> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.to_string(),
            basis: Arc::new(basis),
            powers_of_two_support: false,
        }
    }

    /// A basis per degree; degrees not listed are zero.
    pub fn explicit(name: &str, basis: SubBasis) -> Self {
        Self::from_fn(name, move |d| Ok(basis.get(&d).cloned().unwrap_or_default()))
    }

    pub fn whole(m: &StructuredModule) -> Self {
        let m = unbounded(m);
        Self::from_fn("whole", move |d| {
            let n = m.dim(d)?;
            Ok((0..n).map(|j| Gf2Vector::unit(n, j)).collect())
        })
    }

    pub fn zero() -> Self {
        Self::from_fn("zero", |_| Ok(Vec::new()))
    }

    /// `span{u^{2^i} : i >= min_exponent}` inside `RP^inf` or `F(1)`.
    pub fn powers_of_two(min_exponent: u32) -> Self {
        let mut s = Self::from_fn("powers of two", move |d| {
            Ok(if d.is_power_of_two() && d >= 1 << min_exponent {
                vec![Gf2Vector::unit(1, 0)]
            } else {
                Vec::new()
            })
        });
        s.powers_of_two_support = true;
        s
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn basis(&self, degree: usize) -> Result<Vec<Gf2Vector>, ModuleError> {
        (self.basis)(degree)
    }
}

/// Three-valued verdict of [`strong_f_iso`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FIsoVerdict {
    Yes,
    No { degree: usize, witness: Gf2Vector, reason: String },
    Unknown { degree: usize, reason: Budget },
}

/// Matrix of `Sq_0^c` from degree `d`, evaluated exactly.
fn sq0_power(exact: &StructuredModule, d: usize, c: usize) -> Result<Gf2Matrix, ModuleError> {
    let dim = exact.dim(d)?;
    let mut cols: Vec<Gf2Vector> = (0..dim).map(|j| Gf2Vector::unit(dim, j)).collect();
    let mut e = d;
    for _ in 0..c {
        cols = cols.iter().map(|v| exact.sq_vec(e, e, v)).collect::<Result<_, _>>()?;
        e *= 2;
    }
    Ok(Gf2Matrix::from_columns(exact.dim(e)?, &cols)?)
}

/// Whether `N ⊂ M` is a strong F-isomorphism in degrees `<= degree_bound`:
/// every nonzero `x` has some `Sq_0^c x` nonzero and inside `N`.
pub fn strong_f_iso(
    m: &StructuredModule,
    n: &Submodule,
    degree_bound: usize,
    c_max: usize,
) -> Result<FIsoVerdict, NilError> {
    f_iso(m, n, degree_bound, c_max, None)
}

/// [`strong_f_iso`] on a module that is only known through degree
/// `known_to` (a truncation, not a genuine top): a chain that leaves the
/// known range is undetermined.
pub fn strong_f_iso_truncated(
    m: &FiniteUnstableModule,
    n: &Submodule,
    known_to: usize,
    c_max: usize,
) -> Result<FIsoVerdict, NilError> {
    f_iso(&m.clone().into(), n, known_to.min(m.top_degree()), c_max, Some(known_to))
}

fn f_iso(
    m: &StructuredModule,
    n: &Submodule,
    degree_bound: usize,
    c_max: usize,
    known_to: Option<usize>,
) -> Result<FIsoVerdict, NilError> {
    let exact = unbounded(m);
    for d in 0..=degree_bound {
        let dim = exact.dim(d)?;
        let nb = n.basis(d)?;
        if Subspace::spanned_by(dim, &nb).dim() < nb.len() {
            return Err(NilError::NotInjective(d));
        }
        if dim == 0 {
            continue;
        }
        let mut verdict = None;
        for c in 0..=c_max {
            let e = d << c;
            if let Some(b) = known_to.filter(|&b| e > b) {
                verdict = Some(FIsoVerdict::Unknown {
                    degree: d,
                    reason: Budget::DegreeBound { degree: e, bound: b },
                });
                break;
            }
            let power = match sq0_power(&exact, d, c) {
                Ok(p) => p,
                Err(ModuleError::Overflow { degree, bound }) => {
                    verdict = Some(FIsoVerdict::Unknown {
                        degree: d,
                        reason: Budget::DegreeBound { degree, bound },
                    });
                    break;
                }
                Err(err) => return Err(err.into()),
            };
            if let Some(z) = power.kernel().into_iter().next() {
                verdict = Some(FIsoVerdict::No {
                    degree: d,
                    witness: z,
                    reason: format!("Sq_0^{c} kills it"),
                });
                break;
            }
            // preimage of N_e under Sq_0^c
            let target = Subspace::spanned_by(exact.dim(e)?, &n.basis(e)?);
            let residues: Vec<Gf2Vector> = power.columns().iter().map(|v| target.reduce(v)).collect();
            let r = Gf2Matrix::from_columns(exact.dim(e)?, &residues)?;
            let entered = r.kernel();
            if entered.len() == dim {
                break;
            }
            let outside = (0..dim)
                .map(|j| Gf2Vector::unit(dim, j))
                .find(|v| !Subspace::spanned_by(dim, &entered).contains(v))
                .expect("a basis vector outside a proper subspace");
            if d == 0 {
                verdict = Some(FIsoVerdict::No {
                    degree: 0,
                    witness: outside,
                    reason: "Sq_0 is the identity in degree 0".into(),
                });
                break;
            }
            if n.powers_of_two_support && !d.is_power_of_two() && exact.dim(d)? == 1 {
                verdict = Some(FIsoVerdict::No {
                    degree: d,
                    witness: outside,
                    reason: format!("{d} * 2^c is never a power of two"),
                });
                break;
            }
            if c == c_max {
                verdict = Some(FIsoVerdict::Unknown {
                    degree: d,
                    reason: Budget::IterationCap(c_max),
                });
            }
        }
        if let Some(v) = verdict {
            return Ok(v);
        }
    }
    Ok(FIsoVerdict::Yes)
}

/// Per-degree kernel of `Sq_0, ..., Sq_h` on a finite module, with every
/// `Sq^i` that fails to preserve it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerKernel {
    pub h: usize,
    pub basis: SubBasis,
    /// `(i, degree, index)`: `Sq^i` moves kernel vector `index` of `degree`
    /// out of the kernel.
    pub violations: Vec<(usize, usize, usize)>,
}

pub fn sq_lower_kernel(m: &FiniteUnstableModule, h: usize) -> Result<LowerKernel, NilError> {
    let top = m.top_degree();
    let mut basis = SubBasis::new();
    for d in 0..=top {
        let mut rows = Vec::new();
        for k in 0..=h.min(d) {
            rows.extend(m.sq_block(d - k, d).row_vectors().iter().cloned());
        }
        let stacked = Gf2Matrix::from_rows(m.dim(d), rows)?;
        basis.insert(d, stacked.kernel());
    }
    let mut violations = Vec::new();
    for d in 0..=top {
        for i in 1..=top - d {
            let target = Subspace::spanned_by(m.dim(d + i), &basis[&(d + i)]);
            for (j, v) in basis[&d].iter().enumerate() {
                if !target.contains(&m.sq_vec(i, d, v)) {
                    violations.push((i, d, j));
                }
            }
        }
    }
    Ok(LowerKernel { h, basis, violations })
}

/// Output of [`sq0_saturate`].
#[derive(Debug, Clone)]
pub struct Saturation {
    /// The index `k` at which `J_k = J_{k+1}`.
    pub k: usize,
    /// `dim J_h` per degree, for `h = 0..=k+1`.
    pub chain_dims: Vec<Vec<usize>>,
    pub h_prime: SubBasis,
}

/// `{x in H_d : Sq_0^h x in J}`.
fn sq0_preimage(exact: &StructuredModule, j: &Submodule, d: usize, h: usize) -> Result<Vec<Gf2Vector>, NilError> {
    let power = sq0_power(exact, d, h)?;
    let e = d << h;
    let target = Subspace::spanned_by(exact.dim(e)?, &j.basis(e)?);
    let residues: Vec<Gf2Vector> = power.columns().iter().map(|v| target.reduce(v)).collect();
    Ok(Gf2Matrix::from_columns(exact.dim(e)?, &residues)?.kernel())
}

/// Sub-basis of `Sq_0^k(H) + J` in degree `d`.
fn saturated(exact: &StructuredModule, j: &Submodule, k: usize, d: usize) -> Result<Vec<Gf2Vector>, ModuleError> {
    let dim = exact.dim(d)?;
    let mut span = Subspace::spanned_by(dim, &j.basis(d)?);
    if d.is_multiple_of(1 << k) {
        let src = d >> k;
        if src > 0 || k == 0 {
            for v in sq0_power(exact, src, k)?.columns() {
                span.insert(&v);
            }
        }
    }
    if d == 0 {
        // Sq_0 is the identity in degree 0
        for v in sq0_power(exact, 0, 0)?.columns() {
            span.insert(&v);
        }
    }
    Ok(span.independent().to_vec())
}

/// The construction behind the saturation lemma: with `J_h` the elements
/// whose `h`-th `Sq_0`-iterate lies in `J`, find the first `k` with
/// `J_k = J_{k+1}` in every degree within the bound and return
/// `H' = Sq_0^k(H) + J`. Both promised properties are re-checked: `H' ⊂ H`
/// is a strong F-isomorphism, and `x in H'`, `Sq_0 x in J` imply `x in J`.
pub fn sq0_saturate(
    h: &StructuredModule,
    j: &Submodule,
    degree_bound: usize,
    budget: usize,
) -> Result<Saturation, NilError> {
    let exact = unbounded(h);
    if !is_reduced(&exact, degree_bound)? {
        return Err(NilError::SaturationCheck("H is not reduced".into()));
    }
    let dims_at = |step: usize| -> Result<Vec<usize>, NilError> {
        (0..=degree_bound)
            .map(|d| sq0_preimage(&exact, j, d, step).map(|v| v.len()))
            .collect()
    };
    let mut chain_dims = vec![dims_at(0)?];
    let mut k = None;
    for step in 0..budget {
        chain_dims.push(dims_at(step + 1)?);
        if chain_dims[step] == chain_dims[step + 1] {
            k = Some(step);
            break;
        }
    }
    let k = k.ok_or(NilError::NoStabilization(budget))?;
    let mut h_prime = SubBasis::new();
    for d in 0..=degree_bound {
        h_prime.insert(d, saturated(&exact, j, k, d)?);
    }
    let jc = j.clone();
    let hp = Submodule::from_fn("H'", {
        let exact = exact.clone();
        move |d| saturated(&exact, &jc, k, d)
    });
    match strong_f_iso(&exact, &hp, degree_bound, budget.max(8))? {
        FIsoVerdict::Yes => {}
        other => return Err(NilError::SaturationCheck(format!("H' ⊂ H is not a strong F-isomorphism: {other:?}"))),
    }
    for d in 1..=degree_bound {
        let dim = exact.dim(d)?;
        let members = &h_prime[&d];
        let into_j = sq0_preimage(&exact, j, d, 1)?;
        let both = intersect(dim, members, &into_j);
        let jd = Subspace::spanned_by(dim, &j.basis(d)?);
        if let Some(v) = both.iter().find(|v| !jd.contains(v)) {
            return Err(NilError::SaturationCheck(format!(
                "element {v} of degree {d} lies in H' with Sq_0 in J but is not in J"
            )));
        }
    }
    Ok(Saturation { k, chain_dims, h_prime })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::Gf2Matrix;
    use crate::modules::{make_finite, FiniteUnstableAlgebra, ModuleDescription};

    fn rp2() -> StructuredModule {
        make_finite(&ModuleDescription {
            name: "RP2".into(),
            dims: vec![0, 1, 1],
            ops: BTreeMap::from([(1, BTreeMap::from([(1, Gf2Matrix::identity(1))]))]),
            labels: BTreeMap::new(),
        })
        .unwrap()
        .into()
    }

    fn k_tensor_f1(s: usize, dim: usize, bound: usize) -> StructuredModule {
        let mut dims = vec![0; s + 1];
        dims[s] = dim;
        StructuredModule::from(FiniteUnstableModule::trivial_action("K", dims)).tensor(StructuredModule::free(1, bound))
    }

    #[test]
    fn finite_elements_are_exactly_their_degree_nilpotent() {
        let m = rp2();
        for d in 1..=2 {
            let x = ModuleElement::basis(d, 1, 0);
            let cert = nilpotence_degree(&m, &x, 5, 16).unwrap();
            assert_eq!(cert.at_least(), d);
            assert_eq!(cert.exact(), Some(d));
            assert!(replay_certificate(&m, &x, &cert).unwrap());
        }
    }

    #[test]
    fn zero_is_nilpotent_to_any_level() {
        let cert = nilpotence_degree(&rp2(), &ModuleElement::zero(), 4, 16).unwrap();
        assert_eq!(cert.at_least(), 4);
        assert!(cert.obstruction.is_none());
    }

    #[test]
    fn u_in_rp_infinity_is_not_one_nilpotent() {
        let rp = StructuredModule::RpInfinity;
        let cert = nilpotence_degree(&rp, &ModuleElement::basis(1, 1, 0), 3, 16).unwrap();
        assert_eq!(cert.at_least(), 0);
        assert!(matches!(
            cert.obstruction,
            Some(Obstruction::NotNilpotent { k: 0, proof: NonVanishing::RpInfinityBinomial, .. })
        ));
        assert!(replay_certificate(&rp, &ModuleElement::basis(1, 1, 0), &cert).unwrap());
    }

    #[test]
    fn rp_infinity_chains_agree_with_long_iteration() {
        // a persistence verdict must match brute iteration for many steps
        let rp = StructuredModule::RpInfinity;
        for e in 1..40usize {
            for k in 0..e as i64 {
                let x = ModuleElement::basis(e, 1, 0);
                let outcome = lower_chain(&rp, k, &x, 20).unwrap();
                let mut y = x.clone();
                let mut vanished = false;
                for _ in 0..12 {
                    y = rp.sq_lower(k, &y).unwrap();
                    if y.is_zero() {
                        vanished = true;
                        break;
                    }
                }
                assert_eq!(matches!(outcome, ChainOutcome::Vanishes { .. }), vanished, "e={e} k={k}");
            }
        }
    }

    #[test]
    fn layers_of_a_finite_module_are_degree_truncations() {
        let m = rp2();
        for s in 0..4 {
            let layer = filtration_layer(&m, s, 2, 16).unwrap();
            for d in 0..=2 {
                let expect = if d >= s { m.dim(d).unwrap() } else { 0 };
                assert_eq!(layer[&d].len(), expect, "s={s} d={d}");
            }
        }
    }

    #[test]
    fn rp_infinity_has_no_positive_layers() {
        let rp = StructuredModule::RpInfinity;
        let layer = filtration_layer(&rp, 1, 32, 16).unwrap();
        assert!(layer.values().all(Vec::is_empty));
        let layer = filtration_layer(&rp, 0, 32, 16).unwrap();
        assert!((1..=32).all(|d| layer[&d].len() == 1));
    }

    #[test]
    fn rs_of_finite_module_is_a_slice() {
        let m = rp2();
        let r1 = rs_layer(&m, 1, 2, 16).unwrap();
        assert_eq!(r1.dims(), &[1]);
        let r2 = rs_layer(&m, 2, 2, 16).unwrap();
        assert_eq!(r2.dims(), &[1]);
    }

    #[test]
    fn rs_of_k_tensor_free_one() {
        for s in 0..=3 {
            let m = k_tensor_f1(s, 2, 64);
            let r = rs_layer(&m, s, 64 + s, 16).unwrap();
            for j in 0..=64usize {
                let expect = if j.is_power_of_two() { 2 } else { 0 };
                assert_eq!(r.dim(j), expect, "s={s} j={j}");
            }
            for t in (0..=5).filter(|&t| t != s) {
                let other = rs_layer(&m, t, 64 + s, 16).unwrap();
                assert!(other.dims().iter().all(|&d| d == 0), "s={s} t={t}");
            }
        }
    }

    #[test]
    fn suspension_shifts_layers() {
        let m = rp2();
        let sm = m.clone().suspend(1);
        assert!(rs_layer(&sm, 0, 3, 16).unwrap().dims().iter().all(|&d| d == 0));
        for s in 1..=3 {
            assert_eq!(
                rs_layer(&sm, s, 3, 16).unwrap().dims(),
                rs_layer(&m, s - 1, 2, 16).unwrap().dims()
            );
        }
    }

    #[test]
    fn reducedness_examples() {
        assert!(is_reduced(&StructuredModule::RpInfinity, 32).unwrap());
        let s1: StructuredModule = FiniteUnstableModule::sphere(1).into();
        assert!(!is_reduced(&s1, 4).unwrap());
        assert!(is_reduced(&StructuredModule::free(1, 32), 32).unwrap());
        assert!(is_reduced(&StructuredModule::free(2, 24), 24).unwrap());
    }

    #[test]
    fn strong_f_isomorphism_examples() {
        let f1 = StructuredModule::free(1, 64);
        assert_eq!(strong_f_iso(&f1, &Submodule::whole(&f1), 64, 16).unwrap(), FIsoVerdict::Yes);
        assert_eq!(strong_f_iso(&f1, &Submodule::powers_of_two(3), 64, 16).unwrap(), FIsoVerdict::Yes);
        match strong_f_iso(&StructuredModule::RpInfinity, &Submodule::powers_of_two(0), 8, 16).unwrap() {
            FIsoVerdict::No { degree, .. } => assert_eq!(degree, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lower_kernel_examples() {
        let s1 = FiniteUnstableModule::sphere(1);
        let k = sq_lower_kernel(&s1, 0).unwrap();
        assert_eq!(k.basis[&1].len(), 1);
        let p = FiniteUnstableAlgebra::truncated_polynomial(1, 4).unwrap();
        let k = sq_lower_kernel(p.module(), 0).unwrap();
        let dims: Vec<usize> = k.basis.values().map(Vec::len).collect();
        assert_eq!(dims, vec![0, 0, 1, 1]);
        assert!(k.violations.is_empty());
    }

    #[test]
    fn saturation_of_a_diagonal() {
        let h = k_tensor_f1(0, 2, 64);
        let exact = unbounded(&h);
        let diagonal = Submodule::from_fn("diagonal", move |d| {
            let n = exact.dim(d)?;
            Ok(if n == 2 && d >= 4 { vec![Gf2Vector::from_bits(&[1, 1])] } else { Vec::new() })
        });
        let sat = sq0_saturate(&h, &diagonal, 32, 8).unwrap();
        assert_eq!(sat.k, 2);
        assert_eq!(sat.h_prime[&2].len(), 0);
        assert_eq!(sat.h_prime[&4].len(), 2);
    }

    #[test]
    fn saturation_trivial_cases() {
        let h = StructuredModule::free(1, 64);
        let sat = sq0_saturate(&h, &Submodule::whole(&h), 32, 8).unwrap();
        assert_eq!(sat.k, 0);
        let sat = sq0_saturate(&h, &Submodule::zero(), 32, 8).unwrap();
        assert_eq!(sat.k, 0);
        assert!((0..=5).all(|i| sat.h_prime[&(1 << i)].len() == 1));
    }

    #[test]
    fn tensor_square_of_free_one_is_reduced() {
        let f = StructuredModule::free(1, 64);
        let sq = f.clone().tensor(f);
        let layer = filtration_layer(&sq, 1, 64, 16).unwrap();
        assert!(layer.values().all(Vec::is_empty));
        let r0 = rs_layer(&sq, 0, 64, 16).unwrap();
        for d in 0..=64usize {
            let expect = (0..7)
                .flat_map(|i| (0..7).map(move |j| (1usize << i) + (1usize << j)))
                .filter(|&e| e == d)
                .count();
            assert_eq!(r0.dim(d), expect, "d={d}");
        }
    }

    #[test]
    fn image_of_a_sub_layer() {
        // K = F2 in degree 1 (+) F2 in degree 3, N = first summand (x) F(1)
        let k = FiniteUnstableModule::trivial_action("K", vec![0, 1, 0, 1]);
        let m = StructuredModule::from(k).tensor(StructuredModule::free(1, 40));
        let exact = unbounded(&m);
        let n = Submodule::from_fn("N", move |d| {
            // the left factor of degree 1 comes first in each tensor block
            let dim = exact.dim(d)?;
            Ok(if d >= 2 && (d - 1).is_power_of_two() { vec![Gf2Vector::unit(dim, 0)] } else { Vec::new() })
        });
        let (r, image) = rs_layer_with_image(&m, &n, 1, 33, 16).unwrap();
        assert!((0..=32).all(|j| image[&j].len() == r.dim(j)));
        assert_eq!(strong_f_iso_truncated(&r, &Submodule::explicit("image", image), 32, 16).unwrap(), FIsoVerdict::Yes);
        let (r3, image3) = rs_layer_with_image(&m, &n, 3, 35, 16).unwrap();
        assert!(image3.values().all(Vec::is_empty));
        assert!(r3.dim(1) == 1);
        match strong_f_iso_truncated(&r3, &Submodule::zero(), 32, 16).unwrap() {
            FIsoVerdict::No { .. } | FIsoVerdict::Unknown { .. } => {}
            FIsoVerdict::Yes => panic!("zero is not an F-isomorphism onto a nonzero layer"),
        }
    }
}
