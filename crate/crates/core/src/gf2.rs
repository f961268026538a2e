//! Dense linear algebra over the two-element field.
//!
//! Vectors and matrices are bit-packed into `u64` words (rows for matrices).
//! Every public operation is defined by its GF(2) meaning alone, so the
//! packing never leaks out of this module.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("shape mismatch in {context}: expected {expected}, found {found}")]
    ShapeMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("vector in degree {degree} is not in the span of the chosen generators")]
    NotInSpan { degree: usize },
    #[error("relation in degree {degree} lies outside the span of the generators")]
    RelationOutsideGenerators { degree: usize },
    #[error("invalid graded map: {0}")]
    InvalidMap(String),
    #[error("invalid graded space: {0}")]
    InvalidSpace(String),
}

/// A vector in `F_2^len`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Vector {
    len: usize,
    words: Vec<u64>,
}

impl Gf2Vector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    /// Builds a vector from 0/1 entries; any nonzero byte counts as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn add_assign(&mut self, other: &Gf2Vector) {
        assert_eq!(self.len, other.len, "vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn sum(&self, other: &Gf2Vector) -> Gf2Vector {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn dot(&self, other: &Gf2Vector) -> bool {
        assert_eq!(self.len, other.len, "vector length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    /// Indices of the nonzero entries, increasing.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + t)
            })
        })
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    /// First `len` entries.
    pub fn truncated(&self, len: usize) -> Gf2Vector {
        assert!(len <= self.len);
        Gf2Vector::from_indices(len, self.ones().take_while(|&i| i < len))
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Gf2Vector) -> Gf2Vector {
        let mut out = Gf2Vector::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }
}

impl fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl fmt::Display for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A matrix over GF(2), stored as packed rows.
///
/// As a linear map it sends column vectors of length `cols` to column
/// vectors of length `rows` (target-basis × source-basis).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gf2Matrix {
    cols: usize,
    data: Vec<Gf2Vector>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowEchelon {
    pub rank: usize,
    pub reduced: Gf2Matrix,
    pub pivots: Vec<usize>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            data: vec![Gf2Vector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            data: (0..n).map(|i| Gf2Vector::unit(n, i)).collect(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<Gf2Vector>) -> Result<Self, Gf2Error> {
        for r in &rows {
            if r.len() != cols {
                return Err(Gf2Error::ShapeMismatch {
                    context: "matrix row",
                    expected: cols,
                    found: r.len(),
                });
            }
        }
        Ok(Self { cols, data: rows })
    }

    /// Builds a matrix from row-major 0/1 entries.
    pub fn from_bits(cols: usize, rows: &[Vec<u8>]) -> Result<Self, Gf2Error> {
        Self::from_rows(cols, rows.iter().map(|r| Gf2Vector::from_bits(r)).collect())
    }

    /// The matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Gf2Vector]) -> Result<Self, Gf2Error> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Gf2Error::ShapeMismatch {
                    context: "matrix column",
                    expected: rows,
                    found: c.len(),
                });
            }
            for i in c.ones() {
                m.data[i].set(j, true);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.data.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value)
    }

    pub fn row(&self, r: usize) -> &Gf2Vector {
        &self.data[r]
    }

    pub fn row_vectors(&self) -> &[Gf2Vector] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Gf2Vector {
        Gf2Vector::from_indices(
            self.rows(),
            (0..self.rows()).filter(|&r| self.data[r].get(c)),
        )
    }

    pub fn columns(&self) -> Vec<Gf2Vector> {
        self.transpose().data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Gf2Vector::is_zero)
    }

    pub fn to_bits(&self) -> Vec<Vec<u8>> {
        self.data.iter().map(Gf2Vector::to_bits).collect()
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Gf2Matrix::zeros(self.cols, self.rows());
        for (r, row) in self.data.iter().enumerate() {
            for c in row.ones() {
                t.data[c].set(r, true);
            }
        }
        t
    }

    /// `self · x`.
    pub fn mul_vec(&self, x: &Gf2Vector) -> Gf2Vector {
        assert_eq!(x.len(), self.cols, "matrix-vector shape mismatch");
        Gf2Vector::from_indices(
            self.rows(),
            self.data
                .iter()
                .enumerate()
                .filter(|(_, row)| row.dot(x))
                .map(|(i, _)| i),
        )
    }

    /// `self · other`.
    pub fn mul(&self, other: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.cols, other.rows(), "matrix product shape mismatch");
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc = Gf2Vector::zeros(other.cols);
                for k in row.ones() {
                    acc.add_assign(&other.data[k]);
                }
                acc
            })
            .collect();
        Gf2Matrix {
            cols: other.cols,
            data,
        }
    }

    pub fn add(&self, other: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.rows(), other.rows());
        assert_eq!(self.cols, other.cols);
        Gf2Matrix {
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.sum(b))
                .collect(),
        }
    }

    /// `[self | column]`.
    pub fn augment(&self, column: &Gf2Vector) -> Gf2Matrix {
        assert_eq!(column.len(), self.rows());
        Gf2Matrix {
            cols: self.cols + 1,
            data: self
                .data
                .iter()
                .enumerate()
                .map(|(i, r)| r.concat(&Gf2Vector::from_bits(&[column.get(i) as u8])))
                .collect(),
        }
    }

    pub fn row_reduce(&self) -> RowEchelon {
        let mut rows = self.data.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.add_assign(&pivot_row);
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        RowEchelon {
            rank,
            reduced: Gf2Matrix {
                cols: self.cols,
                data: rows,
            },
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.row_reduce().rank
    }

    /// Basis of `{x : self · x = 0}`.
    pub fn kernel(&self) -> Vec<Gf2Vector> {
        let ech = self.row_reduce();
        let mut is_pivot = vec![false; self.cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = Gf2Vector::unit(self.cols, free);
                for (r, &p) in ech.pivots.iter().enumerate() {
                    if ech.reduced.data[r].get(free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// Basis of the column space, in reduced echelon form.
    pub fn image(&self) -> Vec<Gf2Vector> {
        let ech = self.transpose().row_reduce();
        ech.reduced.data.into_iter().take(ech.rank).collect()
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Matrix {}x{} [", self.rows(), self.cols)?;
        for (i, r) in self.data.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}

/// Solves `m · x = b`. Returns `Ok(None)` when the system is inconsistent.
pub fn solve(m: &Gf2Matrix, b: &Gf2Vector) -> Result<Option<Gf2Vector>, Gf2Error> {
    if b.len() != m.rows() {
        return Err(Gf2Error::ShapeMismatch {
            context: "solve right-hand side",
            expected: m.rows(),
            found: b.len(),
        });
    }
    let ech = m.augment(b).row_reduce();
    if ech.pivots.last() == Some(&m.cols()) {
        return Ok(None);
    }
    let mut x = Gf2Vector::zeros(m.cols());
    for (r, &p) in ech.pivots.iter().enumerate() {
        if ech.reduced.row(r).get(m.cols()) {
            x.set(p, true);
        }
    }
    Ok(Some(x))
}

/// An echelon basis of a subspace of `F_2^n`, grown one vector at a time.
///
/// Each stored row carries a tag recording which inserted vectors it is a
/// combination of, so membership tests also produce coordinates.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient: usize,
    rows: Vec<(usize, Gf2Vector, Gf2Vector)>,
    inserted: Vec<Gf2Vector>,
    tag_len: usize,
}

impl Subspace {
    pub fn new(ambient: usize) -> Self {
        Self::with_capacity(ambient, 0)
    }

    fn with_capacity(ambient: usize, tag_len: usize) -> Self {
        Self {
            ambient,
            rows: Vec::new(),
            inserted: Vec::new(),
            tag_len,
        }
    }

    pub fn spanned_by<'a>(ambient: usize, vectors: impl IntoIterator<Item = &'a Gf2Vector>) -> Self {
        let vectors: Vec<&Gf2Vector> = vectors.into_iter().collect();
        let mut s = Self::with_capacity(ambient, vectors.len());
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v`; returns `true` if it enlarged the subspace.
    pub fn insert(&mut self, v: &Gf2Vector) -> bool {
        assert_eq!(v.len(), self.ambient, "subspace ambient mismatch");
        let (residual, mut tag) = self.reduce_tagged(v);
        match residual.first_one() {
            None => false,
            Some(p) => {
                let j = self.inserted.len();
                if j >= self.tag_len {
                    self.grow_tags((self.tag_len * 2).max(8));
                    tag = self.widen(&tag);
                }
                tag.flip(j);
                self.inserted.push(v.clone());
                self.rows.push((p, residual, tag));
                true
            }
        }
    }

    fn widen(&self, tag: &Gf2Vector) -> Gf2Vector {
        Gf2Vector::from_indices(self.tag_len, tag.ones())
    }

    fn grow_tags(&mut self, new_len: usize) {
        self.tag_len = new_len;
        for row in &mut self.rows {
            row.2 = Gf2Vector::from_indices(new_len, row.2.ones());
        }
    }

    fn reduce_tagged(&self, v: &Gf2Vector) -> (Gf2Vector, Gf2Vector) {
        let mut r = v.clone();
        let mut tag = Gf2Vector::zeros(self.tag_len);
        for (p, row, t) in &self.rows {
            if r.get(*p) {
                r.add_assign(row);
                tag.add_assign(t);
            }
        }
        (r, tag)
    }

    /// The residue of `v` modulo the subspace (zero iff `v` is a member).
    pub fn reduce(&self, v: &Gf2Vector) -> Gf2Vector {
        self.reduce_tagged(v).0
    }

    pub fn contains(&self, v: &Gf2Vector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Coefficients expressing `v` in terms of the independent inserted
    /// vectors (see [`Subspace::independent`]), or `None` if `v` is outside.
    pub fn coordinates(&self, v: &Gf2Vector) -> Option<Gf2Vector> {
        let (r, tag) = self.reduce_tagged(v);
        r.is_zero()
            .then(|| Gf2Vector::from_indices(self.inserted.len(), tag.ones()))
    }

    /// The inserted vectors that were independent at insertion time; a basis.
    pub fn independent(&self) -> &[Gf2Vector] {
        &self.inserted
    }

    pub fn contains_all(&self, other: &Subspace) -> bool {
        other.independent().iter().all(|v| self.contains(v))
    }
}

/// Quotient `span(generators) / span(relations)` in one degree, with chosen
/// representatives for the quotient basis.
#[derive(Debug, Clone)]
pub struct QuotientSpace {
    ambient: usize,
    representatives: Vec<Gf2Vector>,
    relations: Subspace,
    // pivot, echelon row, tag over representatives
    reducer: Vec<(usize, Gf2Vector, Gf2Vector)>,
}

impl QuotientSpace {
    /// Fails with `RelationOutsideGenerators` if some relation is not in
    /// the span of the generators.
    pub fn new(
        ambient: usize,
        degree: usize,
        generators: &[Gf2Vector],
        relations: &[Gf2Vector],
    ) -> Result<Self, Gf2Error> {
        for v in generators.iter().chain(relations) {
            if v.len() != ambient {
                return Err(Gf2Error::ShapeMismatch {
                    context: "subquotient vector",
                    expected: ambient,
                    found: v.len(),
                });
            }
        }
        let gens = Subspace::spanned_by(ambient, generators);
        if relations.iter().any(|r| !gens.contains(r)) {
            return Err(Gf2Error::RelationOutsideGenerators { degree });
        }
        let rel_space = Subspace::spanned_by(ambient, relations);
        let tag_len = generators.len();
        let mut reducer: Vec<(usize, Gf2Vector, Gf2Vector)> = rel_space
            .rows
            .iter()
            .map(|(p, row, _)| (*p, row.clone(), Gf2Vector::zeros(tag_len)))
            .collect();
        let mut representatives = Vec::new();
        for g in generators {
            let mut r = g.clone();
            let mut tag = Gf2Vector::zeros(tag_len);
            for (p, row, t) in &reducer {
                if r.get(*p) {
                    r.add_assign(row);
                    tag.add_assign(t);
                }
            }
            if let Some(p) = r.first_one() {
                tag.flip(representatives.len());
                representatives.push(g.clone());
                reducer.push((p, r, tag));
            }
        }
        let n = representatives.len();
        for row in &mut reducer {
            row.2 = row.2.truncated(n);
        }
        Ok(Self {
            ambient,
            representatives,
            relations: rel_space,
            reducer,
        })
    }

    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn representatives(&self) -> &[Gf2Vector] {
        &self.representatives
    }

    pub fn relations(&self) -> &Subspace {
        &self.relations
    }

    /// Quotient coordinates of `v`, or `None` if `v` is not in the span of
    /// the generators.
    pub fn project(&self, v: &Gf2Vector) -> Option<Gf2Vector> {
        let mut r = v.clone();
        let mut tag = Gf2Vector::zeros(self.dim());
        for (p, row, t) in &self.reducer {
            if r.get(*p) {
                r.add_assign(row);
                tag.add_assign(t);
            }
        }
        r.is_zero().then_some(tag)
    }

    /// The ambient vector represented by quotient coordinates.
    pub fn include(&self, coords: &Gf2Vector) -> Gf2Vector {
        let mut out = Gf2Vector::zeros(self.ambient);
        for i in coords.ones() {
            out.add_assign(&self.representatives[i]);
        }
        out
    }
}

/// A graded vector space of finite type, truncated at `top_degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedVectorSpace {
    dims: Vec<usize>,
    labels: BTreeMap<(usize, usize), String>,
}

impl GradedVectorSpace {
    /// An empty `dims` is treated as the zero space concentrated in degree 0.
    pub fn new(mut dims: Vec<usize>) -> Self {
        if dims.is_empty() {
            dims.push(0);
        }
        Self {
            dims,
            labels: BTreeMap::new(),
        }
    }

    pub fn with_labels(
        dims: Vec<usize>,
        labels: BTreeMap<(usize, usize), String>,
    ) -> Result<Self, Gf2Error> {
        let mut s = Self::new(dims);
        for &(d, i) in labels.keys() {
            if d > s.top_degree() || i >= s.dims[d] {
                return Err(Gf2Error::InvalidSpace(format!(
                    "label ({d}, {i}) outside the basis"
                )));
            }
        }
        s.labels = labels;
        Ok(s)
    }

    pub fn top_degree(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Dimension in `degree`; zero above the top degree.
    pub fn dim(&self, degree: usize) -> usize {
        self.dims.get(degree).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn labels(&self) -> &BTreeMap<(usize, usize), String> {
        &self.labels
    }

    pub fn label(&self, degree: usize, index: usize) -> Option<&str> {
        self.labels.get(&(degree, index)).map(String::as_str)
    }
}

/// A degree-shifting linear map between graded spaces, one block per degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedLinearMap {
    source: GradedVectorSpace,
    target: GradedVectorSpace,
    shift: i64,
    blocks: BTreeMap<usize, Gf2Matrix>,
}

impl GradedLinearMap {
    /// Validates that blocks exist exactly where source and target degrees
    /// are both populated-and-in-range, with matching shapes.
    pub fn new(
        source: GradedVectorSpace,
        target: GradedVectorSpace,
        shift: i64,
        blocks: BTreeMap<usize, Gf2Matrix>,
    ) -> Result<Self, Gf2Error> {
        for d in 0..=source.top_degree() {
            let expected = Self::block_expected(&source, &target, shift, d);
            match (expected, blocks.get(&d)) {
                (None, None) => {}
                (Some((r, c)), Some(m)) => {
                    if m.rows() != r || m.cols() != c {
                        return Err(Gf2Error::InvalidMap(format!(
                            "block at degree {d} is {}x{}, expected {r}x{c}",
                            m.rows(),
                            m.cols()
                        )));
                    }
                }
                (Some(_), None) => {
                    return Err(Gf2Error::InvalidMap(format!("missing block at degree {d}")))
                }
                (None, Some(_)) => {
                    return Err(Gf2Error::InvalidMap(format!(
                        "unexpected block at degree {d}"
                    )))
                }
            }
        }
        if let Some(&d) = blocks.keys().find(|&&d| d > source.top_degree()) {
            return Err(Gf2Error::InvalidMap(format!("unexpected block at degree {d}")));
        }
        Ok(Self {
            source,
            target,
            shift,
            blocks,
        })
    }

    fn block_expected(
        source: &GradedVectorSpace,
        target: &GradedVectorSpace,
        shift: i64,
        d: usize,
    ) -> Option<(usize, usize)> {
        let t = d as i64 + shift;
        (source.dim(d) > 0 && t >= 0 && t as usize <= target.top_degree())
            .then(|| (target.dim(t as usize), source.dim(d)))
    }

    pub fn zero(source: GradedVectorSpace, target: GradedVectorSpace, shift: i64) -> Self {
        let blocks = (0..=source.top_degree())
            .filter_map(|d| {
                Self::block_expected(&source, &target, shift, d)
                    .map(|(r, c)| (d, Gf2Matrix::zeros(r, c)))
            })
            .collect();
        Self {
            source,
            target,
            shift,
            blocks,
        }
    }

    pub fn source(&self) -> &GradedVectorSpace {
        &self.source
    }

    pub fn target(&self) -> &GradedVectorSpace {
        &self.target
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn block(&self, degree: usize) -> Option<&Gf2Matrix> {
        self.blocks.get(&degree)
    }

    pub fn blocks(&self) -> &BTreeMap<usize, Gf2Matrix> {
        &self.blocks
    }

    /// Image of a vector of the given source degree; `None` when the target
    /// degree is out of range (the map is zero there).
    pub fn apply(&self, degree: usize, v: &Gf2Vector) -> Option<Gf2Vector> {
        self.blocks.get(&degree).map(|m| m.mul_vec(v))
    }
}

/// A graded subquotient with its per-degree quotient data.
#[derive(Debug, Clone)]
pub struct Subquotient {
    pub space: GradedVectorSpace,
    pub degrees: BTreeMap<usize, QuotientSpace>,
}

impl Subquotient {
    pub fn project(&self, degree: usize, v: &Gf2Vector) -> Result<Gf2Vector, Gf2Error> {
        self.degrees
            .get(&degree)
            .and_then(|q| q.project(v))
            .ok_or(Gf2Error::NotInSpan { degree })
    }

    pub fn include(&self, degree: usize, coords: &Gf2Vector) -> Gf2Vector {
        self.degrees[&degree].include(coords)
    }
}

/// `span(generators) / span(relations)`, degree by degree, over `space`.
/// Degrees missing from `generators` contribute zero.
pub fn subquotient(
    space: &GradedVectorSpace,
    generators: &BTreeMap<usize, Vec<Gf2Vector>>,
    relations: &BTreeMap<usize, Vec<Gf2Vector>>,
) -> Result<Subquotient, Gf2Error> {
    let mut dims = vec![0; space.top_degree() + 1];
    let mut degrees = BTreeMap::new();
    for d in 0..=space.top_degree() {
        let gens = generators.get(&d).map(Vec::as_slice).unwrap_or(&[]);
        let rels = relations.get(&d).map(Vec::as_slice).unwrap_or(&[]);
        let q = QuotientSpace::new(space.dim(d), d, gens, rels)?;
        dims[d] = q.dim();
        degrees.insert(d, q);
    }
    if let Some(&d) = generators
        .keys()
        .chain(relations.keys())
        .find(|&&d| d > space.top_degree())
    {
        return Err(Gf2Error::InvalidSpace(format!(
            "vectors supplied in degree {d} above the top degree"
        )));
    }
    Ok(Subquotient {
        space: GradedVectorSpace::new(dims),
        degrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u8]]) -> Gf2Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        Gf2Matrix::from_bits(cols, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn identity_reduces_to_itself() {
        let e = Gf2Matrix::identity(3).row_reduce();
        assert_eq!(e.rank, 3);
        assert_eq!(e.pivots, vec![0, 1, 2]);
        assert_eq!(e.reduced, Gf2Matrix::identity(3));
    }

    #[test]
    fn zero_matrix_has_no_pivots() {
        let e = Gf2Matrix::zeros(2, 4).row_reduce();
        assert_eq!(e.rank, 0);
        assert!(e.pivots.is_empty());
    }

    #[test]
    fn duplicate_rows_rank_one() {
        let e = m(&[&[1, 1], &[1, 1]]).row_reduce();
        assert_eq!(e.rank, 1);
        assert_eq!(e.pivots, vec![0]);
        assert_eq!(e.reduced, m(&[&[1, 1], &[0, 0]]));
    }

    #[test]
    fn empty_matrices_are_fine() {
        assert_eq!(Gf2Matrix::zeros(0, 0).rank(), 0);
        assert_eq!(Gf2Matrix::zeros(0, 3).kernel().len(), 3);
        assert!(Gf2Matrix::zeros(3, 0).kernel().is_empty());
        assert_eq!(
            solve(&Gf2Matrix::zeros(0, 2), &Gf2Vector::zeros(0)).unwrap(),
            Some(Gf2Vector::zeros(2))
        );
    }

    #[test]
    fn solve_examples() {
        let b = Gf2Vector::from_bits(&[1, 0, 1]);
        assert_eq!(solve(&Gf2Matrix::identity(3), &b).unwrap(), Some(b.clone()));
        assert_eq!(solve(&Gf2Matrix::zeros(3, 3), &b).unwrap(), None);
        let x = solve(&m(&[&[1, 1], &[0, 1]]), &Gf2Vector::from_bits(&[1, 1])).unwrap();
        assert_eq!(x, Some(Gf2Vector::from_bits(&[0, 1])));
    }

    #[test]
    fn solve_rejects_bad_shapes() {
        assert!(matches!(
            solve(&Gf2Matrix::identity(2), &Gf2Vector::zeros(3)),
            Err(Gf2Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn vectors_cross_word_boundaries() {
        let mut v = Gf2Vector::zeros(130);
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(v.first_one(), Some(0));
        assert_eq!(v.count_ones(), 3);
        let w = Gf2Vector::unit(130, 129);
        assert!(v.dot(&w));
        assert_eq!(v.truncated(64).count_ones(), 1);
    }

    #[test]
    fn subquotient_examples() {
        let space = GradedVectorSpace::new(vec![0, 2]);
        let full: BTreeMap<_, _> = [(1, vec![Gf2Vector::unit(2, 0), Gf2Vector::unit(2, 1)])].into();
        let none = BTreeMap::new();
        assert_eq!(subquotient(&space, &full, &none).unwrap().space.dims(), &[0, 2]);
        assert_eq!(subquotient(&space, &full, &full).unwrap().space.dims(), &[0, 0]);
        let diag: BTreeMap<_, _> = [(1, vec![Gf2Vector::from_bits(&[1, 1])])].into();
        let sq = subquotient(&space, &diag, &none).unwrap();
        assert_eq!(sq.space.dims(), &[0, 1]);
        let rep = sq.include(1, &Gf2Vector::from_bits(&[1]));
        assert_eq!(sq.project(1, &rep).unwrap(), Gf2Vector::from_bits(&[1]));
        assert!(sq.project(1, &Gf2Vector::unit(2, 0)).is_err());
    }

    #[test]
    fn subquotient_rejects_stray_relations() {
        let space = GradedVectorSpace::new(vec![2]);
        let gens: BTreeMap<_, _> = [(0, vec![Gf2Vector::unit(2, 0)])].into();
        let rels: BTreeMap<_, _> = [(0, vec![Gf2Vector::unit(2, 1)])].into();
        assert_eq!(
            subquotient(&space, &gens, &rels).unwrap_err(),
            Gf2Error::RelationOutsideGenerators { degree: 0 }
        );
    }

    #[test]
    fn quotient_projection_ignores_relations() {
        let gens = [
            Gf2Vector::from_bits(&[1, 0, 0]),
            Gf2Vector::from_bits(&[0, 1, 0]),
            Gf2Vector::from_bits(&[0, 0, 1]),
        ];
        let rels = [Gf2Vector::from_bits(&[1, 1, 0])];
        let q = QuotientSpace::new(3, 0, &gens, &rels).unwrap();
        assert_eq!(q.dim(), 2);
        let a = q.project(&Gf2Vector::from_bits(&[1, 0, 0])).unwrap();
        let b = q.project(&Gf2Vector::from_bits(&[0, 1, 0])).unwrap();
        assert_eq!(a, b);
        assert!(q.project(&Gf2Vector::from_bits(&[1, 1, 0])).unwrap().is_zero());
    }

    #[test]
    fn graded_map_block_validation() {
        let s = GradedVectorSpace::new(vec![1, 1]);
        let ok: BTreeMap<_, _> = [(0, Gf2Matrix::identity(1))].into();
        assert!(GradedLinearMap::new(s.clone(), s.clone(), 1, ok).is_ok());
        let bad: BTreeMap<_, _> = [(1, Gf2Matrix::identity(1))].into();
        assert!(GradedLinearMap::new(s.clone(), s.clone(), 1, bad).is_err());
        let z = GradedLinearMap::zero(s.clone(), s, 1);
        assert_eq!(z.blocks().len(), 1);
    }

    #[test]
    fn subspace_coordinates() {
        let vs = [Gf2Vector::from_bits(&[1, 1, 0]), Gf2Vector::from_bits(&[0, 1, 1])];
        let s = Subspace::spanned_by(3, &vs);
        let c = s.coordinates(&Gf2Vector::from_bits(&[1, 0, 1])).unwrap();
        assert_eq!(c, Gf2Vector::from_bits(&[1, 1]));
        assert!(s.coordinates(&Gf2Vector::from_bits(&[1, 0, 0])).is_none());
    }
}
