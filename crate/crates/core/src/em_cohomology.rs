//! Mod 2 cohomology of products of Eilenberg–Mac Lane spaces `K((Z/2)^s, n)`.
//!
//! `H*(K(Z/2, n); F2)` is the polynomial algebra on the classes `Sq^I ι_n`
//! with `I` admissible of excess `< n`. A factor of rank `s` contributes
//! one such family per summand, and products multiply by Künneth, so
//! every space here has cohomology a polynomial algebra on generators
//! tagged by `(factor, component, I)`. Squares of generators are always
//! stored as exponents, never as new generator labels.

mod cache;
mod label;

pub use cache::BasisCache;
pub use label::{generator_label, monomial_label, operation_label, parse_class, poly_label};

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign};
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2linalg::F2Vector;
use crate::steenrod::{adem_reduce, admissible_of_degree, AdmissibleSequence};

/// One factor `K((Z/2)^rank, degree)` of a product space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Factor {
    pub rank: u32,
    pub degree: u32,
    pub label: String,
}

impl Factor {
    pub fn new(rank: u32, degree: u32) -> Self {
        Self {
            rank,
            degree,
            label: format!("K({rank},{degree})"),
        }
    }

    pub fn labeled(rank: u32, degree: u32, label: impl Into<String>) -> Self {
        Self {
            rank,
            degree,
            label: label.into(),
        }
    }
}

/// A fundamental class position: `(factor index, component index)`.
pub type Slot = (usize, usize);

/// An ordered product of Eilenberg–Mac Lane spaces; the empty product is a point.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub factors: Vec<Factor>,
}

impl SpaceDescriptor {
    pub fn point() -> Self {
        Self::default()
    }

    pub fn em(rank: u32, degree: u32) -> Self {
        Self {
            factors: vec![Factor::new(rank, degree)],
        }
    }

    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        for f in &factors {
            if f.rank == 0 || f.degree == 0 {
                return Err(Error::InvalidParameters(format!(
                    "factor {} needs positive rank and degree",
                    f.label
                )));
            }
        }
        Ok(Self { factors })
    }

    /// The product `self × other`, factors of `other` appended.
    pub fn times(&self, other: &SpaceDescriptor) -> SpaceDescriptor {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        SpaceDescriptor { factors }
    }

    /// The sub-product on the listed factors, in the listed order.
    pub fn sub_space(&self, factors: &[usize]) -> Result<SpaceDescriptor> {
        let picked = factors
            .iter()
            .map(|&f| self.factors.get(f).cloned().ok_or(Error::MissingFactor(f)))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpaceDescriptor { factors: picked })
    }

    pub fn is_point(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn slots(&self) -> Vec<Slot> {
        self.factors
            .iter()
            .enumerate()
            .flat_map(|(f, fac)| (0..fac.rank as usize).map(move |c| (f, c)))
            .collect()
    }

    pub fn slot_degree(&self, slot: Slot) -> u32 {
        self.factors[slot.0].degree
    }

    pub fn fundamental_class(&self, slot: Slot) -> EMGenerator {
        EMGenerator::fundamental(slot.0, slot.1, self.slot_degree(slot))
    }

    /// Parses `K(s,n)xK(s,n)...`; `pt` is the point.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text == "pt" || text == "point" {
            return Ok(Self::point());
        }
        let re = regex::Regex::new(r"^K\(\s*(\d+)\s*,\s*(\d+)\s*\)$").expect("static regex");
        let factors = text
            .split('x')
            .map(|part| {
                let caps = re
                    .captures(part.trim())
                    .ok_or_else(|| Error::Parse(format!("bad factor '{part}', expected K(s,n)")))?;
                let rank = caps[1].parse().map_err(|_| Error::Parse(part.to_string()))?;
                let degree = caps[2].parse().map_err(|_| Error::Parse(part.to_string()))?;
                Ok(Factor::new(rank, degree))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "pt");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|x| format!("K({},{})", x.rank, x.degree))
            .collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// The polynomial generator `Sq^I ι` on the fundamental class at `(factor, component)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EMGenerator {
    pub factor: usize,
    pub component: usize,
    pub base_degree: u32,
    pub op: AdmissibleSequence,
}

impl EMGenerator {
    pub fn new(factor: usize, component: usize, base_degree: u32, op: AdmissibleSequence) -> Self {
        debug_assert!(op.is_empty() || op.excess() < base_degree);
        Self {
            factor,
            component,
            base_degree,
            op,
        }
    }

    pub fn fundamental(factor: usize, component: usize, base_degree: u32) -> Self {
        Self::new(factor, component, base_degree, AdmissibleSequence::empty())
    }

    pub fn degree(&self) -> u32 {
        self.base_degree + self.op.degree()
    }

    pub fn slot(&self) -> Slot {
        (self.factor, self.component)
    }

    pub fn is_fundamental(&self) -> bool {
        self.op.is_empty()
    }

    fn sort_key(&self) -> (usize, usize, u32, &AdmissibleSequence) {
        (self.factor, self.component, self.degree(), &self.op)
    }
}

impl Ord for EMGenerator {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key()
            .cmp(&other.sort_key())
            .then(self.base_degree.cmp(&other.base_degree))
    }
}

impl PartialOrd for EMGenerator {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A monomial: generators with positive exponents, sorted by generator.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial(Vec<(EMGenerator, u32)>);

impl Monomial {
    pub fn unit() -> Self {
        Self(Vec::new())
    }

    pub fn generator(g: EMGenerator) -> Self {
        Self(vec![(g, 1)])
    }

    pub fn from_powers<I: IntoIterator<Item = (EMGenerator, u32)>>(powers: I) -> Self {
        let mut m = Self::unit();
        for (g, e) in powers {
            m.multiply_generator(&g, e);
        }
        m
    }

    pub fn powers(&self) -> &[(EMGenerator, u32)] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(g, e)| g.degree() * e).sum()
    }

    /// Degree carried by generators on factors with index below `split`.
    pub fn degree_below(&self, split: usize) -> u32 {
        self.0
            .iter()
            .filter(|(g, _)| g.factor < split)
            .map(|(g, e)| g.degree() * e)
            .sum()
    }

    pub fn exponent(&self, g: &EMGenerator) -> u32 {
        self.0
            .binary_search_by(|(h, _)| h.cmp(g))
            .map_or(0, |i| self.0[i].1)
    }

    fn multiply_generator(&mut self, g: &EMGenerator, e: u32) {
        if e == 0 {
            return;
        }
        match self.0.binary_search_by(|(h, _)| h.cmp(g)) {
            Ok(i) => self.0[i].1 += e,
            Err(i) => self.0.insert(i, (g.clone(), e)),
        }
    }

    /// Divides by `g^e`; panics if the exponent is too small.
    pub fn divide_generator(&self, g: &EMGenerator, e: u32) -> Monomial {
        let mut out = self.clone();
        let i = out
            .0
            .binary_search_by(|(h, _)| h.cmp(g))
            .expect("generator not present");
        assert!(out.0[i].1 >= e, "exponent too small");
        out.0[i].1 -= e;
        if out.0[i].1 == 0 {
            out.0.remove(i);
        }
        out
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (g, e) in &other.0 {
            out.multiply_generator(g, *e);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Monomial {
        Monomial(self.0.iter().map(|(g, e)| (g.clone(), e * k)).collect())
    }

    /// Splits into the parts on factors below and at-or-above `split`.
    pub fn split_at_factor(&self, split: usize) -> (Monomial, Monomial) {
        let (lo, hi): (Vec<_>, Vec<_>) = self.0.iter().cloned().partition(|(g, _)| g.factor < split);
        (Monomial(lo), Monomial(hi))
    }

    /// Relabels factor indices through `map`; generators mapped to `None` make the result `None`.
    pub fn remap_factors(&self, map: impl Fn(usize) -> Option<usize>) -> Option<Monomial> {
        let mut out = Monomial::unit();
        for (g, e) in &self.0 {
            let f = map(g.factor)?;
            let mut h = g.clone();
            h.factor = f;
            out.multiply_generator(&h, *e);
        }
        Some(out)
    }
}

/// A polynomial over F2 in Eilenberg–Mac Lane generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Poly(BTreeSet<Monomial>);

impl Poly {
    pub fn zero() -> Self {
        Self(BTreeSet::new())
    }

    pub fn one() -> Self {
        Self::from(Monomial::unit())
    }

    pub fn generator(g: EMGenerator) -> Self {
        Self::from(Monomial::generator(g))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Monomial> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn toggle(&mut self, m: Monomial) {
        if !self.0.remove(&m) {
            self.0.insert(m);
        }
    }

    /// The common degree of all terms; `None` for zero or mixed degrees.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.0.iter().map(Monomial::degree);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for a in &self.0 {
            for b in &other.0 {
                out.toggle(a.mul(b));
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly(self.0.iter().map(|a| a.mul(m)).collect())
    }

    /// Frobenius: cross terms cancel in characteristic two.
    pub fn square(&self) -> Poly {
        Poly(self.0.iter().map(|m| m.pow(2)).collect())
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    pub fn retain(&mut self, keep: impl Fn(&Monomial) -> bool) {
        self.0.retain(keep);
    }

    pub fn map_monomials(&self, f: impl Fn(&Monomial) -> Option<Monomial>) -> Poly {
        let mut out = Poly::zero();
        for m in &self.0 {
            if let Some(x) = f(m) {
                out.toggle(x);
            }
        }
        out
    }
}

impl From<Monomial> for Poly {
    fn from(m: Monomial) -> Self {
        Poly(BTreeSet::from([m]))
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for m in &rhs.0 {
            self.toggle(m.clone());
        }
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;

    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

// ---------------------------------------------------------------------------
// Generators and bases
// ---------------------------------------------------------------------------

/// Generators `Sq^I ι_n^{(j)}` of `H*(K((Z/2)^s, n))` of degree at most `max_degree`,
/// on factor 0.
pub fn generators(n: u32, s: u32, max_degree: u32) -> Vec<EMGenerator> {
    factor_generators(0, &Factor::new(s, n), max_degree)
}

fn factor_generators(factor: usize, fac: &Factor, max_degree: u32) -> Vec<EMGenerator> {
    let n = fac.degree;
    if max_degree < n {
        return Vec::new();
    }
    let ops: Vec<AdmissibleSequence> = (0..=max_degree - n)
        .flat_map(admissible_of_degree)
        .filter(|i| i.excess() < n)
        .collect();
    let mut out: Vec<EMGenerator> = (0..fac.rank as usize)
        .flat_map(|c| {
            ops.iter()
                .map(move |op| EMGenerator::new(factor, c, n, op.clone()))
        })
        .collect();
    out.sort();
    out
}

/// All polynomial generators of the space in degrees `<= max_degree`.
pub fn space_generators(space: &SpaceDescriptor, max_degree: u32) -> Vec<EMGenerator> {
    let mut out: Vec<EMGenerator> = space
        .factors
        .iter()
        .enumerate()
        .flat_map(|(f, fac)| factor_generators(f, fac, max_degree))
        .collect();
    out.sort();
    out
}

/// Basis of one degree, with a lookup from monomial to coordinate.
#[derive(Debug)]
pub struct DegreeBasis {
    pub degree: u32,
    pub monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl DegreeBasis {
    fn new(degree: u32, monomials: Vec<Monomial>) -> Self {
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        Self {
            degree,
            monomials,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn coords(&self, p: &Poly) -> Result<F2Vector> {
        let mut v = F2Vector::zeros(self.dim());
        for m in p.terms() {
            let i = self.index_of(m).ok_or(Error::DegreeMismatch {
                expected: self.degree,
                found: m.degree(),
            })?;
            v.flip(i);
        }
        Ok(v)
    }

    pub fn poly(&self, v: &F2Vector) -> Poly {
        assert_eq!(v.len(), self.dim(), "coordinate length mismatch");
        Poly(v.ones().map(|i| self.monomials[i].clone()).collect())
    }
}

fn enumerate_monomials(gens: &[EMGenerator], degree: u32) -> Vec<Monomial> {
    fn go(gens: &[EMGenerator], remaining: u32, acc: &mut Vec<(EMGenerator, u32)>, out: &mut Vec<Monomial>) {
        if remaining == 0 {
            out.push(Monomial::from_powers(acc.iter().cloned()));
            return;
        }
        let Some((g, rest)) = gens.split_first() else {
            return;
        };
        let d = g.degree();
        for e in (0..=remaining / d).rev() {
            if e > 0 {
                acc.push((g.clone(), e));
            }
            go(rest, remaining - e * d, acc, out);
            if e > 0 {
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(gens, degree, &mut Vec::new(), &mut out);
    out.sort();
    out
}

type BasisKey = (SpaceDescriptor, u32);

fn basis_cache() -> &'static RwLock<HashMap<BasisKey, Arc<DegreeBasis>>> {
    static CACHE: OnceLock<RwLock<HashMap<BasisKey, Arc<DegreeBasis>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The canonical monomial basis of `H^t(space; F2)`, shared through a process-wide cache.
pub fn degree_basis(space: &SpaceDescriptor, t: u32) -> Arc<DegreeBasis> {
    let key = (space.clone(), t);
    if let Some(hit) = basis_cache().read().expect("basis cache poisoned").get(&key) {
        return Arc::clone(hit);
    }
    let gens = space_generators(space, t);
    let built = Arc::new(DegreeBasis::new(t, enumerate_monomials(&gens, t)));
    let mut w = basis_cache().write().expect("basis cache poisoned");
    Arc::clone(w.entry(key).or_insert(built))
}

/// Basis of `H^t(space; F2)` in canonical order.
pub fn basis(space: &SpaceDescriptor, t: u32) -> Vec<Monomial> {
    degree_basis(space, t).monomials.clone()
}

/// Dimensions of `H^t(space; F2)` for `t = 0..=max_degree`.
pub fn poincare_series(space: &SpaceDescriptor, max_degree: u32) -> Vec<usize> {
    (0..=max_degree).map(|t| degree_basis(space, t).dim()).collect()
}

/// Bases of a space in every degree up to a bound.
#[derive(Debug, Clone)]
pub struct GradedBasis {
    pub space: SpaceDescriptor,
    pub bound: u32,
    degrees: Vec<Arc<DegreeBasis>>,
}

impl GradedBasis {
    pub fn new(space: &SpaceDescriptor, bound: u32) -> Self {
        Self {
            space: space.clone(),
            bound,
            degrees: (0..=bound).map(|t| degree_basis(space, t)).collect(),
        }
    }

    pub fn degree(&self, t: u32) -> Option<&DegreeBasis> {
        self.degrees.get(t as usize).map(Arc::as_ref)
    }

    pub fn dim(&self, t: u32) -> usize {
        self.degree(t).map_or(0, DegreeBasis::dim)
    }
}

// ---------------------------------------------------------------------------
// Classes
// ---------------------------------------------------------------------------

/// A class in `H^degree(space; F2)`, in coordinates against the canonical basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CohomologyClass {
    pub space: SpaceDescriptor,
    pub degree: u32,
    pub coords: F2Vector,
}

impl CohomologyClass {
    pub fn zero(space: &SpaceDescriptor, degree: u32) -> Self {
        Self {
            space: space.clone(),
            degree,
            coords: F2Vector::zeros(degree_basis(space, degree).dim()),
        }
    }

    pub fn from_poly(space: &SpaceDescriptor, degree: u32, p: &Poly) -> Result<Self> {
        Ok(Self {
            space: space.clone(),
            degree,
            coords: degree_basis(space, degree).coords(p)?,
        })
    }

    pub fn to_poly(&self) -> Poly {
        degree_basis(&self.space, self.degree).poly(&self.coords)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_zero()
    }

    pub fn label(&self) -> String {
        poly_label(&self.space, &self.to_poly())
    }

    pub fn add(&self, other: &CohomologyClass) -> Result<CohomologyClass> {
        if self.space != other.space || self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(CohomologyClass {
            space: self.space.clone(),
            degree: self.degree,
            coords: &self.coords + &other.coords,
        })
    }

    pub fn mul(&self, other: &CohomologyClass) -> Result<CohomologyClass> {
        if self.space != other.space {
            return Err(Error::InvalidParameters("classes on different spaces".into()));
        }
        let p = self.to_poly().mul(&other.to_poly());
        CohomologyClass::from_poly(&self.space, self.degree + other.degree, &p)
    }
}

// ---------------------------------------------------------------------------
// Steenrod action
// ---------------------------------------------------------------------------

/// Evaluates an admissible `Sq^I` on the fundamental class at `(factor, component)` of degree `n`.
pub fn evaluate_admissible(op: &AdmissibleSequence, factor: usize, component: usize, n: u32) -> Poly {
    if op.is_empty() {
        return Poly::generator(EMGenerator::fundamental(factor, component, n));
    }
    let excess = op.excess();
    match excess.cmp(&n) {
        Ordering::Less => Poly::generator(EMGenerator::new(factor, component, n, op.clone())),
        // leading entry equals the degree of what it acts on
        Ordering::Equal => evaluate_admissible(&op.tail(), factor, component, n).square(),
        Ordering::Greater => Poly::zero(),
    }
}

type SqKey = (u32, EMGenerator);

fn sq_cache() -> &'static Mutex<HashMap<SqKey, Poly>> {
    static CACHE: OnceLock<Mutex<HashMap<SqKey, Poly>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `Sq^i` of a single polynomial generator.
pub fn sq_generator(i: u32, g: &EMGenerator) -> Poly {
    if i == 0 {
        return Poly::generator(g.clone());
    }
    if i > g.degree() {
        return Poly::zero();
    }
    let key = (i, g.clone());
    if let Some(hit) = sq_cache().lock().expect("sq cache poisoned").get(&key) {
        return hit.clone();
    }
    let mut word = vec![i];
    word.extend_from_slice(g.op.entries());
    let mut out = Poly::zero();
    for term in adem_reduce(&word).terms {
        out += &evaluate_admissible(&term, g.factor, g.component, g.base_degree);
    }
    sq_cache()
        .lock()
        .expect("sq cache poisoned")
        .insert(key, out.clone());
    out
}

/// `Sq^i` of a monomial, by the Cartan formula.
pub fn sq_monomial(i: u32, m: &Monomial) -> Poly {
    if i == 0 {
        return Poly::from(m.clone());
    }
    let d = m.degree();
    if i > d {
        return Poly::zero();
    }
    if i == d {
        return Poly::from(m.pow(2));
    }
    if let Some((g, _)) = m.powers().iter().find(|(_, e)| e % 2 == 1) {
        let g = g.clone();
        let rest = m.divide_generator(&g, 1);
        let mut out = Poly::zero();
        for j in 0..=i.min(g.degree()) {
            let left = sq_generator(j, &g);
            if left.is_zero() {
                continue;
            }
            let right = sq_monomial(i - j, &rest);
            if !right.is_zero() {
                out += &left.mul(&right);
            }
        }
        out
    } else {
        // m = h^2, so Sq^i m = (Sq^{i/2} h)^2 or 0
        if i % 2 == 1 {
            return Poly::zero();
        }
        let h = Monomial(m.powers().iter().map(|(g, e)| (g.clone(), e / 2)).collect());
        sq_monomial(i / 2, &h).square()
    }
}

pub fn sq_poly(i: u32, p: &Poly) -> Poly {
    let mut out = Poly::zero();
    for m in p.terms() {
        out += &sq_monomial(i, m);
    }
    out
}

/// Applies `Sq^{w_1} ⋯ Sq^{w_k}`, rightmost first.
pub fn sq_word(word: &[u32], p: &Poly) -> Poly {
    word.iter().rev().fold(p.clone(), |acc, &i| sq_poly(i, &acc))
}

pub fn sq_on_class(i: u32, c: &CohomologyClass) -> Result<CohomologyClass> {
    CohomologyClass::from_poly(&c.space, c.degree + i, &sq_poly(i, &c.to_poly()))
}

// ---------------------------------------------------------------------------
// Substitution and restriction
// ---------------------------------------------------------------------------

/// The ring endomorphism determined by images of fundamental classes,
/// extended to `Sq^I ι` by naturality. Slots without an image are fixed.
#[derive(Clone, Debug)]
pub struct Substitution {
    images: HashMap<Slot, Poly>,
    memo: HashMap<EMGenerator, Poly>,
}

impl Substitution {
    pub fn identity() -> Self {
        Self {
            images: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    pub fn new(space: &SpaceDescriptor, images: impl IntoIterator<Item = (Slot, Poly)>) -> Result<Self> {
        let mut map = HashMap::new();
        for (slot, p) in images {
            let fac = space.factors.get(slot.0).ok_or(Error::MissingFactor(slot.0))?;
            if slot.1 >= fac.rank as usize {
                return Err(Error::InvalidParameters(format!(
                    "component {} out of range for {}",
                    slot.1, fac.label
                )));
            }
            if let Some(d) = p.homogeneous_degree() {
                if d != fac.degree {
                    return Err(Error::DegreeMismatch {
                        expected: fac.degree,
                        found: d,
                    });
                }
            } else if !p.is_zero() {
                return Err(Error::InvalidParameters("image is not homogeneous".into()));
            }
            map.insert(slot, p);
        }
        Ok(Self {
            images: map,
            memo: HashMap::new(),
        })
    }

    fn generator_image(&mut self, g: &EMGenerator) -> Poly {
        if let Some(hit) = self.memo.get(g) {
            return hit.clone();
        }
        let out = match self.images.get(&g.slot()) {
            None => Poly::generator(g.clone()),
            Some(img) => sq_word(g.op.entries(), img),
        };
        self.memo.insert(g.clone(), out.clone());
        out
    }

    pub fn apply_monomial(&mut self, m: &Monomial) -> Poly {
        let mut acc = Poly::one();
        for (g, e) in m.powers() {
            let img = self.generator_image(g).pow(*e);
            acc = acc.mul(&img);
            if acc.is_zero() {
                break;
            }
        }
        acc
    }

    pub fn apply(&mut self, p: &Poly) -> Poly {
        let mut out = Poly::zero();
        for m in p.terms() {
            out += &self.apply_monomial(m);
        }
        out
    }
}

/// The image of `c` under the ring map sending each listed fundamental class to the given class.
pub fn substitute(c: &CohomologyClass, images: &BTreeMap<Slot, CohomologyClass>) -> Result<CohomologyClass> {
    for (slot, img) in images {
        let expected = c
            .space
            .factors
            .get(slot.0)
            .ok_or(Error::MissingFactor(slot.0))?
            .degree;
        if img.degree != expected {
            return Err(Error::DegreeMismatch {
                expected,
                found: img.degree,
            });
        }
    }
    let mut sub = Substitution::new(&c.space, images.iter().map(|(s, img)| (*s, img.to_poly())))?;
    CohomologyClass::from_poly(&c.space, c.degree, &sub.apply(&c.to_poly()))
}

/// Restriction to the sub-product on `fiber_factors`: every other fundamental class goes to zero.
pub fn restrict_to_fiber(c: &CohomologyClass, fiber_factors: &[usize]) -> Result<CohomologyClass> {
    let fiber = c.space.sub_space(fiber_factors)?;
    let p = c
        .to_poly()
        .map_monomials(|m| m.remap_factors(|f| fiber_factors.iter().position(|&x| x == f)));
    CohomologyClass::from_poly(&fiber, c.degree, &p)
}

/// Pulls a class back along the projection onto the listed factors of `product`.
pub fn include_from_factors(
    c: &CohomologyClass,
    product: &SpaceDescriptor,
    factors: &[usize],
) -> Result<CohomologyClass> {
    for (i, &f) in factors.iter().enumerate() {
        if product.factors.get(f) != c.space.factors.get(i) {
            return Err(Error::MissingFactor(f));
        }
    }
    let p = c.to_poly().map_monomials(|m| m.remap_factors(|i| factors.get(i).copied()));
    CohomologyClass::from_poly(product, c.degree, &p)
}
