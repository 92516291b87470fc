//! Classification of two- and three-stage Postnikov pieces by orbits of
//! k-invariants under self-equivalences.
//!
//! The self-equivalences of `K(A,m) × K(B,n)` used here are triples
//! `(α, β, f)`: `α ∈ GL_s` on the base fundamental classes, `β ∈ GL_t` on
//! the fiber fundamental classes, and a translation `f ∈ H^n(K(A,m))^t`
//! added to the fiber classes. They act on cohomology by substitution.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::em_cohomology::{
    degree_basis, operation_label, poly_label, CohomologyClass, Factor, Poly, SpaceDescriptor, Substitution,
};
use crate::error::{Error, Result};
use crate::f2linalg::{
    elementary_generators, general_linear_group, general_linear_order, rref, F2Matrix, F2Vector, LinearSolver,
    Subspace,
};
use crate::serre_ss::{em_fibration, FilteredComplex};

/// Largest set, as a power of two, that orbit enumeration will walk.
pub const MAX_ENUMERATION_BITS: u32 = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit<T> {
    pub rep: T,
    pub size: usize,
}

/// A partition of a finite set into orbits. Representatives are the least element of each orbit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport<T> {
    pub size: usize,
    pub orbits: Vec<Orbit<T>>,
    pub fixed_points: usize,
}

impl<T> OrbitReport<T> {
    pub fn count(&self) -> usize {
        self.orbits.len()
    }

    /// Number of orbits of each size.
    pub fn size_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for o in &self.orbits {
            *h.entry(o.size).or_insert(0) += 1;
        }
        h
    }

    pub fn map<U>(self, mut f: impl FnMut(T) -> U) -> OrbitReport<U> {
        OrbitReport {
            size: self.size,
            orbits: self
                .orbits
                .into_iter()
                .map(|o| Orbit {
                    rep: f(o.rep),
                    size: o.size,
                })
                .collect(),
            fixed_points: self.fixed_points,
        }
    }
}

/// A self-map of a finite set.
pub type SetMap<'a, T> = dyn Fn(&T) -> T + 'a;

/// Orbits of the group generated by `generators` acting on `set`.
///
/// Every generator must permute `set`; otherwise [`Error::NotClosed`].
pub fn orbit_enumerate<T: Ord + Clone>(set: &[T], generators: &[&SetMap<'_, T>]) -> Result<OrbitReport<T>> {
    let domain: BTreeSet<T> = set.iter().cloned().collect();
    for g in generators {
        let image: BTreeSet<T> = domain.iter().map(g).collect();
        if image != domain {
            return Err(Error::NotClosed);
        }
    }
    let mut seen = BTreeSet::new();
    let mut orbits = Vec::new();
    for x in &domain {
        if seen.contains(x) {
            continue;
        }
        let mut queue = VecDeque::from([x.clone()]);
        seen.insert(x.clone());
        let mut size = 0;
        while let Some(y) = queue.pop_front() {
            size += 1;
            for g in generators {
                let z = g(&y);
                if seen.insert(z.clone()) {
                    queue.push_back(z);
                }
            }
        }
        orbits.push(Orbit { rep: x.clone(), size });
    }
    let fixed_points = orbits.iter().filter(|o| o.size == 1).count();
    Ok(OrbitReport {
        size: domain.len(),
        orbits,
        fixed_points,
    })
}

/// Orbits of a group of linear maps on `F2^dim`, elements encoded as bit masks.
pub fn linear_orbits(dim: usize, maps: &[F2Matrix]) -> Result<OrbitReport<u64>> {
    if dim as u32 > MAX_ENUMERATION_BITS {
        return Err(Error::TooLarge(dim as u32));
    }
    let columns: Vec<Vec<u64>> = maps
        .iter()
        .map(|m| {
            assert_eq!((m.rows(), m.cols()), (dim, dim), "action matrix shape");
            (0..dim).map(|j| m.column(j).to_mask()).collect()
        })
        .collect();
    let apply = |cols: &[u64], x: u64| {
        let mut y = 0;
        let mut bits = x;
        while bits != 0 {
            y ^= cols[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        y
    };
    let total = 1usize << dim;
    let mut seen = vec![false; total];
    let mut orbits = Vec::new();
    let mut queue = Vec::new();
    for x in 0..total {
        if seen[x] {
            continue;
        }
        seen[x] = true;
        queue.push(x as u64);
        let mut size = 0;
        while let Some(y) = queue.pop() {
            size += 1;
            for cols in &columns {
                let z = apply(cols, y) as usize;
                if !seen[z] {
                    seen[z] = true;
                    queue.push(z as u64);
                }
            }
        }
        orbits.push(Orbit { rep: x as u64, size });
    }
    let fixed_points = orbits.iter().filter(|o| o.size == 1).count();
    Ok(OrbitReport {
        size: total,
        orbits,
        fixed_points,
    })
}

/// Rank and degree of an elementary abelian homotopy group `(Z/2)^rank` in a given degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupDegree {
    pub rank: u32,
    pub degree: u32,
}

impl GroupDegree {
    pub fn new(rank: u32, degree: u32) -> Self {
        Self { rank, degree }
    }

    pub fn space(&self) -> SpaceDescriptor {
        SpaceDescriptor::em(self.rank, self.degree)
    }
}

impl std::fmt::Display for GroupDegree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "K({},{})", self.rank, self.degree)
    }
}

/// `K(A,m) × K(B,n)`, factor 0 the base and factor 1 the fiber.
pub fn product_space(a: GroupDegree, b: GroupDegree) -> SpaceDescriptor {
    SpaceDescriptor {
        factors: vec![Factor::new(a.rank, a.degree), Factor::new(b.rank, b.degree)],
    }
}

/// A self-equivalence `(α, β, f)` of `K(A,m) × K(B,n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AutElement {
    pub alpha: F2Matrix,
    pub beta: F2Matrix,
    /// `f_j ∈ H^n(K(A,m))` for each fiber component `j`, as polynomials on factor 0.
    pub translation: Vec<Poly>,
}

impl AutElement {
    pub fn identity(s: usize, t: usize) -> Self {
        Self {
            alpha: F2Matrix::identity(s),
            beta: F2Matrix::identity(t),
            translation: vec![Poly::zero(); t],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.alpha == F2Matrix::identity(self.alpha.rows())
            && self.beta == F2Matrix::identity(self.beta.rows())
            && self.translation.iter().all(Poly::is_zero)
    }

    /// The substitution on any space whose first two factors are the base and fiber.
    pub fn substitution(&self, space: &SpaceDescriptor) -> Result<Substitution> {
        let (s, t) = (self.alpha.rows(), self.beta.rows());
        let base = space.factors.first().ok_or(Error::MissingFactor(0))?;
        let fiber = space.factors.get(1).ok_or(Error::MissingFactor(1))?;
        if base.rank as usize != s || fiber.rank as usize != t {
            return Err(Error::InvalidParameters("automorphism does not match the space".into()));
        }
        let mut images = Vec::new();
        for i in 0..s {
            let mut img = Poly::zero();
            for j in (0..s).filter(|&j| self.alpha.get(i, j)) {
                img += &Poly::generator(space.fundamental_class((0, j)));
            }
            images.push(((0, i), img));
        }
        for j in 0..t {
            let mut img = self.translation[j].clone();
            for i in (0..t).filter(|&i| self.beta.get(j, i)) {
                img += &Poly::generator(space.fundamental_class((1, i)));
            }
            images.push(((1, j), img));
        }
        Substitution::new(space, images)
    }

    /// `α*` on a polynomial in the base classes only.
    pub fn pull_back_base(&self, base: &SpaceDescriptor, p: &Poly) -> Result<Poly> {
        let images = (0..self.alpha.rows()).map(|i| {
            let mut img = Poly::zero();
            for j in (0..self.alpha.cols()).filter(|&j| self.alpha.get(i, j)) {
                img += &Poly::generator(base.fundamental_class((0, j)));
            }
            ((0, i), img)
        });
        Ok(Substitution::new(base, images)?.apply(p))
    }
}

/// The component group of self-equivalences of `K(A,m) × K(B,n)`.
#[derive(Clone, Debug)]
pub struct AutDescriptor {
    pub a: GroupDegree,
    pub b: GroupDegree,
    pub gl_s_order: u128,
    pub gl_t_order: u128,
    /// `t · dim H^n(K(A,m))`.
    pub translation_dim: u32,
    pub order: u128,
    pub generators: Vec<AutElement>,
}

fn check_two_stage(a: GroupDegree, b: GroupDegree) -> Result<()> {
    if a.rank == 0 || b.rank == 0 {
        return Err(Error::InvalidParameters("ranks must be positive".into()));
    }
    if !(b.degree > a.degree && a.degree > 1) {
        return Err(Error::InvalidParameters(format!(
            "need n > m > 1, got m = {}, n = {}",
            a.degree, b.degree
        )));
    }
    if a.rank > 4 || b.rank > 4 {
        return Err(Error::InvalidParameters("ranks above 4 are not supported".into()));
    }
    Ok(())
}

fn translation_basis(a: GroupDegree, b: GroupDegree) -> Vec<AutElement> {
    let (s, t) = (a.rank as usize, b.rank as usize);
    let hn = degree_basis(&a.space(), b.degree);
    let mut out = Vec::new();
    for j in 0..t {
        for m in &hn.monomials {
            let mut g = AutElement::identity(s, t);
            g.translation[j] = Poly::from(m.clone());
            out.push(g);
        }
    }
    out
}

pub fn aut_product_order(a: GroupDegree, b: GroupDegree) -> Result<AutDescriptor> {
    check_two_stage(a, b)?;
    let (s, t) = (a.rank as usize, b.rank as usize);
    let mut generators = Vec::new();
    for alpha in elementary_generators(s) {
        generators.push(AutElement {
            alpha,
            ..AutElement::identity(s, t)
        });
    }
    for beta in elementary_generators(t) {
        generators.push(AutElement {
            beta,
            ..AutElement::identity(s, t)
        });
    }
    let translations = translation_basis(a, b);
    let translation_dim = translations.len() as u32;
    generators.extend(translations);
    let gl_s_order = general_linear_order(a.rank);
    let gl_t_order = general_linear_order(b.rank);
    Ok(AutDescriptor {
        a,
        b,
        gl_s_order,
        gl_t_order,
        translation_dim,
        order: (gl_s_order * gl_t_order) << translation_dim,
        generators,
    })
}

/// The image of `c` under the substitution of `g`.
pub fn aut_action(g: &AutElement, c: &CohomologyClass) -> Result<CohomologyClass> {
    let mut sub = g.substitution(&c.space)?;
    CohomologyClass::from_poly(&c.space, c.degree, &sub.apply(&c.to_poly()))
}

/// Label of a k-invariant tuple, preferring `Sq[I]i{n}` forms.
pub fn tuple_label(space: &SpaceDescriptor, comps: &[Poly]) -> String {
    let one = |p: &Poly| {
        if p.is_zero() {
            "0".to_string()
        } else {
            operation_label(space, p).unwrap_or_else(|| poly_label(space, p))
        }
    };
    match comps {
        [p] => one(p),
        _ => format!("({})", comps.iter().map(one).collect::<Vec<_>>().join(", ")),
    }
}

/// Block-diagonal extension of `m` to `copies` copies.
fn block_diagonal(m: &F2Matrix, copies: usize) -> F2Matrix {
    let c = m.rows();
    let mut out = F2Matrix::zeros(c * copies, c * copies);
    for k in 0..copies {
        for i in 0..c {
            for j in (0..c).filter(|&j| m.get(i, j)) {
                out.set(k * c + i, k * c + j, true);
            }
        }
    }
    out
}

/// `GL_copies` transvections acting on `copies` blocks of width `c`: block `i` += block `j`.
fn coefficient_generators(c: usize, copies: usize) -> Vec<F2Matrix> {
    elementary_generators(copies)
        .into_iter()
        .map(|e| {
            let mut out = F2Matrix::zeros(c * copies, c * copies);
            for i in 0..copies {
                for j in (0..copies).filter(|&j| e.get(i, j)) {
                    for k in 0..c {
                        out.set(i * c + k, j * c + k, true);
                    }
                }
            }
            out
        })
        .collect()
}

fn unpack_tuple(mask: u64, basis: &[Poly], copies: usize) -> Vec<Poly> {
    let c = basis.len();
    (0..copies)
        .map(|j| {
            let mut p = Poly::zero();
            for (i, b) in basis.iter().enumerate() {
                if mask >> (j * c + i) & 1 == 1 {
                    p += b;
                }
            }
            p
        })
        .collect()
}

/// Two-stage orbits with the underlying masks and basis, for reuse by the three-stage pipeline.
#[derive(Clone, Debug)]
pub struct TwoStageOrbits {
    pub a: GroupDegree,
    pub b: GroupDegree,
    /// Basis of `H^{n+1}(K(A,m))`.
    pub basis: Vec<Poly>,
    pub orbits: OrbitReport<u64>,
}

impl TwoStageOrbits {
    /// The k-invariant tuple encoded by a mask.
    pub fn tuple(&self, mask: u64) -> Vec<Poly> {
        unpack_tuple(mask, &self.basis, self.b.rank as usize)
    }

    pub fn label(&self, mask: u64) -> String {
        tuple_label(&self.a.space(), &self.tuple(mask))
    }

    pub fn report(&self) -> OrbitReport<String> {
        self.orbits.clone().map(|m| self.label(m))
    }
}

/// The matrix of a base substitution `α*` on a degree of `K(A,m)`, in the monomial basis.
fn base_action_matrix(g: &AutElement, a: GroupDegree, degree: u32) -> Result<F2Matrix> {
    let space = a.space();
    let basis = degree_basis(&space, degree);
    let columns = basis
        .monomials
        .iter()
        .map(|m| basis.coords(&g.pull_back_base(&space, &Poly::from(m.clone()))?))
        .collect::<Result<Vec<_>>>()?;
    Ok(F2Matrix::from_columns(&columns, basis.dim()))
}

/// Orbits of `H^{n+1}(K(A,m); (Z/2)^t)` under `GL_t`, and also `GL_s` when `pairs` is set.
pub fn two_stage_orbits(a: GroupDegree, b: GroupDegree, pairs: bool) -> Result<TwoStageOrbits> {
    check_two_stage(a, b)?;
    let (s, t) = (a.rank as usize, b.rank as usize);
    let hb = degree_basis(&a.space(), b.degree + 1);
    let h = hb.dim();
    let dim = h * t;
    if dim as u32 > MAX_ENUMERATION_BITS {
        return Err(Error::TooLarge(dim as u32));
    }
    let mut maps = coefficient_generators(h, t);
    if pairs {
        for alpha in elementary_generators(s) {
            let g = AutElement {
                alpha,
                ..AutElement::identity(s, t)
            };
            maps.push(block_diagonal(&base_action_matrix(&g, a, b.degree + 1)?, t));
        }
    }
    Ok(TwoStageOrbits {
        a,
        b,
        basis: hb.monomials.iter().cloned().map(Poly::from).collect(),
        orbits: linear_orbits(dim, &maps)?,
    })
}

pub fn classify_two_stage(a: GroupDegree, b: GroupDegree, pairs: bool) -> Result<OrbitReport<String>> {
    Ok(two_stage_orbits(a, b, pairs)?.report())
}

/// Pairs `(α, β)` with `β k = α* k`, closed into a group and thinned to generators.
fn stabilizer_generators(a: GroupDegree, b: GroupDegree, k: &[Poly], pairs: bool) -> Result<Vec<AutElement>> {
    let (s, t) = (a.rank as usize, b.rank as usize);
    let base = a.space();
    let alphas = if pairs {
        general_linear_group(s)
    } else {
        vec![F2Matrix::identity(s)]
    };
    let betas = general_linear_group(t);
    let mut members = Vec::new();
    for alpha in &alphas {
        let g = AutElement {
            alpha: alpha.clone(),
            ..AutElement::identity(s, t)
        };
        let pulled = k
            .iter()
            .map(|p| g.pull_back_base(&base, p))
            .collect::<Result<Vec<_>>>()?;
        for beta in &betas {
            let fixes = (0..t).all(|j| {
                let mut combo = Poly::zero();
                for i in (0..t).filter(|&i| beta.get(j, i)) {
                    combo += &k[i];
                }
                combo == pulled[j]
            });
            if fixes {
                members.push((alpha.clone(), beta.clone()));
            }
        }
    }

    // greedy: keep an element only if it is outside the group generated so far
    let mut generated: BTreeSet<(Vec<u64>, Vec<u64>)> = BTreeSet::new();
    let key = |x: &F2Matrix, y: &F2Matrix| {
        let rows = |m: &F2Matrix| (0..m.rows()).map(|i| m.row(i).to_mask()).collect::<Vec<_>>();
        (rows(x), rows(y))
    };
    generated.insert(key(&F2Matrix::identity(s), &F2Matrix::identity(t)));
    let mut closure: Vec<(F2Matrix, F2Matrix)> = vec![(F2Matrix::identity(s), F2Matrix::identity(t))];
    let mut gens: Vec<(F2Matrix, F2Matrix)> = Vec::new();
    for (alpha, beta) in members {
        if generated.contains(&key(&alpha, &beta)) {
            continue;
        }
        gens.push((alpha, beta));
        let mut frontier = closure.clone();
        while let Some((x, y)) = frontier.pop() {
            for (ga, gb) in &gens {
                let (nx, ny) = (x.mul(ga), y.mul(gb));
                if generated.insert(key(&nx, &ny)) {
                    closure.push((nx.clone(), ny.clone()));
                    frontier.push((nx, ny));
                }
            }
        }
    }
    let mut out: Vec<AutElement> = gens
        .into_iter()
        .map(|(alpha, beta)| AutElement {
            alpha,
            beta,
            translation: vec![Poly::zero(); t],
        })
        .collect();
    out.extend(translation_basis(a, b));
    Ok(out)
}

/// Induced action of automorphisms on a space of classes `span(reps) + boundaries / boundaries`.
#[derive(Clone, Debug)]
pub struct InducedAction {
    pub matrices: Vec<F2Matrix>,
    /// Set when some automorphism did not preserve the class space; those were skipped.
    pub ambiguous: bool,
}

/// Builds the `c × c` matrices of `elements` acting on classes of `C^t` of a complex on `space`.
pub fn induced_action(
    space: &SpaceDescriptor,
    degree: u32,
    reps: &[F2Vector],
    boundaries: &Subspace,
    elements: &[AutElement],
) -> Result<InducedAction> {
    let basis = degree_basis(space, degree);
    let c = reps.len();
    let mut gens = reps.to_vec();
    gens.extend(boundaries.basis().iter().cloned());
    let solver = LinearSolver::new(basis.dim(), &gens);
    let mut matrices = Vec::new();
    let mut ambiguous = false;
    'elements: for g in elements {
        if g.is_identity() {
            continue;
        }
        let mut sub = g.substitution(space)?;
        let mut image = |v: &F2Vector| basis.coords(&sub.apply(&basis.poly(v)));
        for b in boundaries.basis() {
            if !boundaries.contains(&image(b)?) {
                ambiguous = true;
                continue 'elements;
            }
        }
        let mut columns = Vec::with_capacity(c);
        for v in reps {
            match solver.solve(&image(v)?) {
                Some(coeffs) => columns.push(F2Vector::from_bits((0..c).map(|i| coeffs.get(i)))),
                None => {
                    ambiguous = true;
                    continue 'elements;
                }
            }
        }
        let m = F2Matrix::from_columns(&columns, c);
        if rref(&m).rank != c {
            ambiguous = true;
            continue;
        }
        matrices.push(m);
    }
    Ok(InducedAction { matrices, ambiguous })
}

/// Orbit count of `u`-tuples of classes under an induced action and `GL_u`.
pub fn tuple_orbits(action: &InducedAction, c: usize, u: usize) -> Result<OrbitReport<u64>> {
    let mut maps: Vec<F2Matrix> = action.matrices.iter().map(|m| block_diagonal(m, u)).collect();
    maps.extend(coefficient_generators(c, u));
    linear_orbits(c * u, &maps)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub k1: String,
    pub candidates: u64,
    pub orbits: u64,
    pub ambiguous: bool,
    /// `[orbits, candidates]` bounds when the action could not be fully determined.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[u64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeStageReport {
    pub branches: Vec<Branch>,
    pub total: u64,
}

fn check_three_stage(a: GroupDegree, b: GroupDegree, c: GroupDegree) -> Result<()> {
    check_two_stage(a, b)?;
    if c.degree <= b.degree {
        return Err(Error::InvalidParameters(format!(
            "need r > n, got n = {}, r = {}",
            b.degree, c.degree
        )));
    }
    if c.rank > 4 {
        return Err(Error::InvalidParameters("ranks above 4 are not supported".into()));
    }
    Ok(())
}

/// Everything needed to count candidate second k-invariants over one first k-invariant.
pub struct BranchContext {
    pub a: GroupDegree,
    pub b: GroupDegree,
    pub c: GroupDegree,
    pub k1: Vec<Poly>,
    pub complex: FilteredComplex,
    pub stabilizer: Vec<AutElement>,
}

impl BranchContext {
    pub fn new(a: GroupDegree, b: GroupDegree, c: GroupDegree, k1: Vec<Poly>, pairs: bool) -> Result<Self> {
        check_three_stage(a, b, c)?;
        let spec = em_fibration(a.rank, a.degree, b.rank, b.degree, k1.clone())?;
        let complex = FilteredComplex::new(&spec, c.degree + 2);
        let stabilizer = stabilizer_generators(a, b, &k1, pairs)?;
        Ok(Self {
            a,
            b,
            c,
            k1,
            complex,
            stabilizer,
        })
    }

    /// The degree `r + 1` in which second k-invariants live.
    pub fn degree(&self) -> u32 {
        self.c.degree + 1
    }

    pub fn label(&self) -> String {
        tuple_label(&self.a.space(), &self.k1)
    }

    /// Counts orbits of `u`-tuples of the classes spanned by `reps` modulo coboundaries.
    pub fn count(&self, reps: &[F2Vector]) -> Result<Branch> {
        let t = self.degree();
        let boundaries = self.complex.coboundaries(t)?;
        let cdim = reps.len();
        let u = self.c.rank as usize;
        let bits = (cdim * u) as u32;
        if bits > MAX_ENUMERATION_BITS {
            return Err(Error::TooLarge(bits));
        }
        let action = induced_action(self.complex.space(), t, reps, &boundaries, &self.stabilizer)?;
        let orbits = tuple_orbits(&action, cdim, u)?.count() as u64;
        let candidates = 1u64 << bits;
        Ok(Branch {
            k1: self.label(),
            candidates,
            orbits,
            ambiguous: action.ambiguous,
            interval: action.ambiguous.then_some([orbits.min(candidates), candidates]),
        })
    }

    /// Classical candidates: `F^1 H^{r+1}(E)` from cocycles and coboundaries of the complex.
    pub fn classical(&self) -> Result<Branch> {
        let (reps, _) = self.complex.positive_filtration_cohomology(self.degree())?;
        self.count(&reps)
    }
}

/// First k-invariant orbit representatives, as tuples.
pub fn k1_representatives(a: GroupDegree, b: GroupDegree, pairs: bool) -> Result<Vec<Vec<Poly>>> {
    let two = two_stage_orbits(a, b, pairs)?;
    Ok(two.orbits.orbits.iter().map(|o| two.tuple(o.rep)).collect())
}

pub fn classify_three_stage(a: GroupDegree, b: GroupDegree, c: GroupDegree, pairs: bool) -> Result<ThreeStageReport> {
    check_three_stage(a, b, c)?;
    let branches = k1_representatives(a, b, pairs)?
        .into_iter()
        .map(|k1| BranchContext::new(a, b, c, k1, pairs)?.classical())
        .collect::<Result<Vec<_>>>()?;
    let total = branches.iter().map(|b| b.orbits).sum();
    Ok(ThreeStageReport { branches, total })
}
