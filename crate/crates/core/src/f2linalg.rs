//! Dense linear algebra over the two-element field.
//!
//! Vectors are bit-packed into `u64` words; addition is XOR. All
//! elimination routines pick the leftmost available pivot so that bases
//! and coordinates are reproducible from run to run.

use std::fmt;
use std::ops::{Add, AddAssign};

const WORD: usize = 64;

/// A vector over F2 of fixed length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct F2Vector {
    words: Vec<u64>,
    len: usize,
}

impl F2Vector {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from the low `len` bits of `mask` (bit `i` is coordinate `i`).
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= WORD, "mask vectors are limited to {WORD} coordinates");
        let mut v = Self::zeros(len);
        if len > 0 {
            let keep = if len == WORD { u64::MAX } else { (1u64 << len) - 1 };
            v.words[0] = mask & keep;
        }
        v
    }

    /// The coordinates as a bit mask; only valid for `len <= 64`.
    pub fn to_mask(&self) -> u64 {
        assert!(self.len <= WORD, "vector too long for a mask");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range (len={})", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "index {i} out of range (len={})", self.len);
        let bit = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= bit;
        } else {
            self.words[i / WORD] &= !bit;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range (len={})", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    /// Index of the lowest set coordinate.
    pub fn leading_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of the nonzero coordinates, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * WORD + b)
            })
        })
    }

    /// Restriction to the listed coordinates, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self::from_bits(indices.iter().map(|&i| self.get(i)))
    }

    /// Places this vector's coordinates at `indices` inside a zero vector of length `len`.
    pub fn scatter(&self, indices: &[usize], len: usize) -> Self {
        assert_eq!(indices.len(), self.len);
        let mut out = Self::zeros(len);
        for i in self.ones() {
            out.set(indices[i], true);
        }
        out
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2[")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, "]")
    }
}

impl AddAssign<&F2Vector> for F2Vector {
    fn add_assign(&mut self, rhs: &F2Vector) {
        self.xor_assign(rhs);
    }
}

impl Add<&F2Vector> for &F2Vector {
    type Output = F2Vector;

    fn add(self, rhs: &F2Vector) -> F2Vector {
        let mut out = self.clone();
        out.xor_assign(rhs);
        out
    }
}

/// A dense matrix over F2, stored as rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<F2Vector>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![F2Vector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed when `rows` is empty.
    pub fn from_rows(rows: Vec<F2Vector>, cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    pub fn from_columns(columns: &[F2Vector], rows: usize) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged columns");
            for i in c.ones() {
                m.set(i, j, true);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[i].set(j, value);
    }

    pub fn row(&self, i: usize) -> &F2Vector {
        &self.data[i]
    }

    pub fn column(&self, j: usize) -> F2Vector {
        F2Vector::from_bits((0..self.rows).map(|i| self.get(i, j)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F2Vector::is_zero)
    }

    pub fn mul_vec(&self, v: &F2Vector) -> F2Vector {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        F2Vector::from_bits(self.data.iter().map(|r| r.dot(v)))
    }

    pub fn mul(&self, other: &F2Matrix) -> F2Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = F2Matrix::zeros(self.rows, other.cols);
        for (i, row) in self.data.iter().enumerate() {
            for k in row.ones() {
                out.data[i].xor_assign(&other.data[k]);
            }
        }
        out
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows);
        for (i, row) in self.data.iter().enumerate() {
            for j in row.ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    /// The submatrix on the given row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> F2Matrix {
        F2Matrix::from_rows(
            rows.iter().map(|&i| self.data[i].select(cols)).collect(),
            cols.len(),
        )
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

/// Result of reducing a matrix to reduced row echelon form.
#[derive(Clone, Debug)]
pub struct RowReduction {
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub kernel_basis: Vec<F2Vector>,
    pub image_basis: Vec<F2Vector>,
    pub reduced: F2Matrix,
}

pub fn rref(m: &F2Matrix) -> RowReduction {
    let mut rows = m.data.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == rows.len() {
            break;
        }
        let Some(found) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
            continue;
        };
        rows.swap(r, found);
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row.get(c) {
                row.xor_assign(&pivot_row);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let rank = pivots.len();

    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let kernel_basis = (0..m.cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = F2Vector::unit(m.cols, free);
            for (k, &p) in pivots.iter().enumerate() {
                if rows[k].get(free) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect();
    let image_basis = pivots.iter().map(|&p| m.column(p)).collect();

    RowReduction {
        rank,
        pivots,
        kernel_basis,
        image_basis,
        reduced: F2Matrix::from_rows(rows, m.cols),
    }
}

/// Basis vectors of the kernel of `m`.
pub fn kernel(m: &F2Matrix) -> Vec<F2Vector> {
    rref(m).kernel_basis
}

/// Coset representatives of F2^ambient_dim modulo the span of `subspace_basis`:
/// the unit vectors at the non-pivot columns of the reduced subspace basis.
pub fn quotient_reps(subspace_basis: &[F2Vector], ambient_dim: usize) -> Vec<F2Vector> {
    let sub = Subspace::from_vectors(ambient_dim, subspace_basis.iter().cloned());
    let mut is_pivot = vec![false; ambient_dim];
    for &p in sub.pivots() {
        is_pivot[p] = true;
    }
    (0..ambient_dim)
        .filter(|&c| !is_pivot[c])
        .map(|c| F2Vector::unit(ambient_dim, c))
        .collect()
}

/// A subspace held as a fully reduced echelon basis, so that `reduce`
/// returns a canonical coset representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<F2Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self::from_vectors(ambient, (0..ambient).map(|i| F2Vector::unit(ambient, i)))
    }

    pub fn from_vectors<I: IntoIterator<Item = F2Vector>>(ambient: usize, vectors: I) -> Self {
        let mut s = Self::zero(ambient);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[F2Vector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Canonical representative of `v` modulo this subspace.
    pub fn reduce(&self, v: &F2Vector) -> F2Vector {
        let mut v = v.clone();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(b);
            }
        }
        v
    }

    pub fn contains(&self, v: &F2Vector) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    /// Adds `v` to the spanning set; returns whether the dimension grew.
    pub fn insert(&mut self, v: F2Vector) -> bool {
        assert_eq!(v.len(), self.ambient, "ambient dimension mismatch");
        let v = self.reduce(&v);
        let Some(p) = v.leading_one() else {
            return false;
        };
        for b in &mut self.basis {
            if b.get(p) {
                b.xor_assign(&v);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.basis.insert(at, v);
        true
    }

    /// Representatives of a basis of `self / sub`; `sub` must be contained in `self`.
    pub fn complement_of(&self, sub: &Subspace) -> Vec<F2Vector> {
        let mut acc = sub.clone();
        let mut reps = Vec::new();
        for b in &self.basis {
            let r = acc.reduce(b);
            if !r.is_zero() {
                acc.insert(r.clone());
                reps.push(r);
            }
        }
        reps
    }
}

/// Expresses targets as combinations of a fixed, possibly dependent, list of vectors.
#[derive(Clone, Debug)]
pub struct LinearSolver {
    generators: usize,
    rows: Vec<(F2Vector, F2Vector)>,
    pivots: Vec<usize>,
}

impl LinearSolver {
    pub fn new(ambient: usize, vectors: &[F2Vector]) -> Self {
        let generators = vectors.len();
        let mut solver = Self {
            generators,
            rows: Vec::new(),
            pivots: Vec::new(),
        };
        for (i, v) in vectors.iter().enumerate() {
            assert_eq!(v.len(), ambient, "ambient dimension mismatch");
            let (mut r, mut c) = (v.clone(), F2Vector::unit(generators, i));
            for ((b, bc), &p) in solver.rows.iter().zip(&solver.pivots) {
                if r.get(p) {
                    r.xor_assign(b);
                    c.xor_assign(bc);
                }
            }
            if let Some(p) = r.leading_one() {
                solver.rows.push((r, c));
                solver.pivots.push(p);
            }
        }
        solver
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Coefficients `c` with `Σ c_i v_i = target`, if the target lies in the span.
    pub fn solve(&self, target: &F2Vector) -> Option<F2Vector> {
        let mut r = target.clone();
        let mut c = F2Vector::zeros(self.generators);
        for ((b, bc), &p) in self.rows.iter().zip(&self.pivots) {
            if r.get(p) {
                r.xor_assign(b);
                c.xor_assign(bc);
            }
        }
        r.is_zero().then_some(c)
    }
}

/// All invertible n×n matrices over F2, in lexicographic order of their entries.
pub fn general_linear_group(n: usize) -> Vec<F2Matrix> {
    assert!(n <= 4, "GL_n(F2) enumeration is limited to n <= 4");
    let bits = n * n;
    (0u64..(1u64 << bits))
        .map(|mask| {
            F2Matrix::from_rows(
                (0..n)
                    .map(|i| F2Vector::from_mask(n, (mask >> (i * n)) & ((1u64 << n) - 1)))
                    .collect(),
                n,
            )
        })
        .filter(|m| rref(m).rank == n)
        .collect()
}

/// Elementary transvections `I + E_ij` (i != j); they generate GL_n(F2).
pub fn elementary_generators(n: usize) -> Vec<F2Matrix> {
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut m = F2Matrix::identity(n);
                m.set(i, j, true);
                gens.push(m);
            }
        }
    }
    gens
}

/// |GL_n(F2)| = ∏_{i<n} (2^n − 2^i).
pub fn general_linear_order(n: u32) -> u128 {
    (0..n).map(|i| (1u128 << n) - (1u128 << i)).product()
}
