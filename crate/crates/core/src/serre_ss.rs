//! Serre spectral sequence of a principal fibration `K((Z/2)^t, n) → E → B`
//! classified by `k ∈ H^{n+1}(B; (Z/2)^t)`, with `B` a product of
//! Eilenberg–Mac Lane spaces.
//!
//! Every polynomial generator of the fiber is transgressive, so by Borel's
//! theorem the spectral sequence is that of a Koszul-type complex
//! `H*(B) ⊗ H*(F)` filtered by base degree. A fiber monomial is read as the
//! product of the distinct powers `x^{2^k}` given by the binary digits of
//! its exponents, and
//!
//! ```text
//! d(b · y_1 ⋯ y_l) = Σ_i b · τ(y_i) · y_1 ⋯ ŷ_i ⋯ y_l
//! ```
//!
//! where `τ(Sq^I ι_j) = Sq^I k_j` and `τ(x^{2^k}) = Sq^{2^{k-1}q} ⋯ Sq^q τ(x)`
//! for `|x| = q` (Kudo). The pages are subquotients of `E_2 = C` computed
//! exactly from the leading parts of filtered cycles and boundaries.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::em_cohomology::{
    degree_basis, poly_label, space_generators, sq_word, CohomologyClass, DegreeBasis, EMGenerator,
    Factor, Poly, SpaceDescriptor,
};
use crate::error::{Error, Result};
use crate::f2linalg::{kernel, F2Matrix, F2Vector, LinearSolver, Subspace};

/// A principal fibration with fiber `K((Z/2)^fiber_rank, fiber_degree)` over `base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibrationSpec {
    pub base: SpaceDescriptor,
    pub fiber_rank: u32,
    pub fiber_degree: u32,
    pub k: Vec<CohomologyClass>,
}

impl FibrationSpec {
    pub fn new(base: SpaceDescriptor, fiber_rank: u32, fiber_degree: u32, k: Vec<CohomologyClass>) -> Result<Self> {
        if fiber_rank == 0 || fiber_degree == 0 {
            return Err(Error::InvalidParameters("fiber needs positive rank and degree".into()));
        }
        if k.len() != fiber_rank as usize {
            return Err(Error::InvalidParameters(format!(
                "expected {fiber_rank} k-invariant components, got {}",
                k.len()
            )));
        }
        for c in &k {
            if c.space != base {
                return Err(Error::InvalidParameters("k-invariant lives on another space".into()));
            }
            if c.degree != fiber_degree + 1 {
                return Err(Error::DegreeMismatch {
                    expected: fiber_degree + 1,
                    found: c.degree,
                });
            }
        }
        Ok(Self {
            base,
            fiber_rank,
            fiber_degree,
            k,
        })
    }

    pub fn trivial(base: SpaceDescriptor, fiber_rank: u32, fiber_degree: u32) -> Self {
        let k = (0..fiber_rank)
            .map(|_| CohomologyClass::zero(&base, fiber_degree + 1))
            .collect();
        Self {
            base,
            fiber_rank,
            fiber_degree,
            k,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.k.iter().all(CohomologyClass::is_zero)
    }

    /// Index of the fiber factor inside [`FibrationSpec::total_space`].
    pub fn fiber_factor(&self) -> usize {
        self.base.factors.len()
    }

    pub fn fiber(&self) -> SpaceDescriptor {
        SpaceDescriptor::em(self.fiber_rank, self.fiber_degree)
    }

    /// `base × fiber`, the space whose monomial basis spans `E_2`.
    pub fn total_space(&self) -> SpaceDescriptor {
        self.base.times(&self.fiber())
    }
}

/// Transgressions of the fiber generators of degree `<= max_degree`.
/// Keys are generators of the fiber alone (factor index 0).
pub fn transgression_targets(f: &FibrationSpec, max_degree: u32) -> BTreeMap<EMGenerator, CohomologyClass> {
    let k: Vec<Poly> = f.k.iter().map(CohomologyClass::to_poly).collect();
    space_generators(&f.fiber(), max_degree)
        .into_iter()
        .map(|g| {
            let target = sq_word(g.op.entries(), &k[g.component]);
            let class = CohomologyClass::from_poly(&f.base, g.degree() + 1, &target)
                .expect("Steenrod squares preserve the base");
            (g, class)
        })
        .collect()
}

struct Level {
    basis: Arc<DegreeBasis>,
    filtration: Vec<u32>,
    /// `d: C^t → C^{t+1}`, absent on the top level.
    differential: Option<F2Matrix>,
}

/// The filtered cochain complex whose spectral sequence is the Serre spectral sequence.
pub struct FilteredComplex {
    spec: FibrationSpec,
    space: SpaceDescriptor,
    levels: Vec<Level>,
}

impl FilteredComplex {
    /// Builds `C^t` for `t <= top` and `d` on `C^t` for `t < top`.
    pub fn new(spec: &FibrationSpec, top: u32) -> Self {
        let space = spec.total_space();
        let split = spec.fiber_factor();
        let k: Vec<Poly> = spec
            .k
            .iter()
            .map(CohomologyClass::to_poly)
            .collect();
        let mut tau: HashMap<(EMGenerator, u32), Poly> = HashMap::new();
        let mut transgression = |x: &EMGenerator, bit: u32| -> Poly {
            tau.entry((x.clone(), bit))
                .or_insert_with(|| {
                    let mut y = sq_word(x.op.entries(), &k[x.component]);
                    let q = x.degree();
                    for j in 0..bit {
                        y = sq_word(&[q << j], &y);
                    }
                    y
                })
                .clone()
        };

        let bases: Vec<Arc<DegreeBasis>> = (0..=top).map(|t| degree_basis(&space, t)).collect();
        let mut levels = Vec::with_capacity(bases.len());
        for t in 0..=top as usize {
            let basis = Arc::clone(&bases[t]);
            let filtration = basis.monomials.iter().map(|m| m.degree_below(split)).collect();
            let differential = (t < top as usize).then(|| {
                let target = &bases[t + 1];
                let columns: Vec<F2Vector> = basis
                    .monomials
                    .iter()
                    .map(|m| {
                        let mut image = Poly::zero();
                        for (x, e) in m.powers().iter().filter(|(g, _)| g.factor == split) {
                            for bit in (0..32).filter(|b| e >> b & 1 == 1) {
                                let rest = m.divide_generator(x, 1 << bit);
                                image += &transgression(x, bit).mul_monomial(&rest);
                            }
                        }
                        target.coords(&image).expect("differential raises degree by one")
                    })
                    .collect();
                F2Matrix::from_columns(&columns, target.dim())
            });
            levels.push(Level {
                basis,
                filtration,
                differential,
            });
        }
        Self {
            spec: spec.clone(),
            space,
            levels,
        }
    }

    pub fn spec(&self) -> &FibrationSpec {
        &self.spec
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn top(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn dim(&self, t: u32) -> usize {
        self.levels.get(t as usize).map_or(0, |l| l.basis.dim())
    }

    pub fn basis(&self, t: u32) -> &DegreeBasis {
        &self.levels[t as usize].basis
    }

    pub fn filtration(&self, t: u32) -> &[u32] {
        &self.levels[t as usize].filtration
    }

    /// `d: C^t → C^{t+1}`; requires `t < top`.
    pub fn differential(&self, t: u32) -> Result<&F2Matrix> {
        self.levels
            .get(t as usize)
            .and_then(|l| l.differential.as_ref())
            .ok_or(Error::OutOfRange)
    }

    pub fn label(&self, t: u32, v: &F2Vector) -> String {
        poly_label(&self.space, &self.basis(t).poly(v))
    }

    fn indices(&self, t: u32, keep: impl Fn(u32) -> bool) -> Vec<usize> {
        self.filtration(t)
            .iter()
            .enumerate()
            .filter(|(_, &p)| keep(p))
            .map(|(i, _)| i)
            .collect()
    }

    fn project(&self, t: u32, v: &F2Vector, p: u32) -> F2Vector {
        let f = self.filtration(t);
        let mut out = v.clone();
        for i in v.ones() {
            if f[i] != p {
                out.flip(i);
            }
        }
        out
    }

    /// Elements `x ∈ F^p C^t` with `dx ∈ F^{p+r}`, as full-length vectors.
    fn filtered_cycles(&self, t: u32, p: u32, r: u32) -> Result<Vec<F2Vector>> {
        let d = self.differential(t)?;
        let cols = self.indices(t, |q| q >= p);
        let rows = self.indices(t + 1, |q| q < p + r);
        Ok(kernel(&d.submatrix(&rows, &cols))
            .iter()
            .map(|v| v.scatter(&cols, self.dim(t)))
            .collect())
    }

    /// `Z_r^{p}`: leading parts in base degree `p` of elements of `F^p C^t` whose differential lies in `F^{p+r}`.
    pub fn leading_cycles(&self, t: u32, p: u32, r: u32) -> Result<Subspace> {
        let xs = self.filtered_cycles(t, p, r)?;
        Ok(Subspace::from_vectors(
            self.dim(t),
            xs.iter().map(|x| self.project(t, x, p)),
        ))
    }

    /// `B_r^{p}`: leading parts in base degree `p` of `dy` with `y ∈ F^{p-r+1} C^{t-1}` and `dy ∈ F^p`.
    pub fn leading_boundaries(&self, t: u32, p: u32, r: u32) -> Result<Subspace> {
        if t == 0 {
            return Ok(Subspace::zero(self.dim(0)));
        }
        let d = self.differential(t - 1)?;
        let lower = (p + 1).saturating_sub(r);
        let cols = self.indices(t - 1, |q| q >= lower);
        let rows = self.indices(t, |q| q < p);
        let ys = kernel(&d.submatrix(&rows, &cols));
        Ok(Subspace::from_vectors(
            self.dim(t),
            ys.iter().map(|y| {
                let y = y.scatter(&cols, self.dim(t - 1));
                self.project(t, &d.mul_vec(&y), p)
            }),
        ))
    }

    /// `E_r^{p, t-p}` as a subquotient of `C^t`.
    pub fn cell(&self, t: u32, p: u32, r: u32) -> Result<Subquotient> {
        Ok(Subquotient::new(
            self.leading_cycles(t, p, r)?,
            self.leading_boundaries(t, p, r)?,
        ))
    }

    /// The page past which nothing changes in total degree `t`.
    pub fn infinity_page(t: u32) -> u32 {
        t + 2
    }

    /// An element `x ∈ F^p C^t` with `dx ∈ F^{p+r}` and leading part `v`.
    pub fn lift(&self, t: u32, p: u32, r: u32, v: &F2Vector) -> Result<Option<F2Vector>> {
        let xs = self.filtered_cycles(t, p, r)?;
        let leads: Vec<F2Vector> = xs.iter().map(|x| self.project(t, x, p)).collect();
        let solver = LinearSolver::new(self.dim(t), &leads);
        Ok(solver.solve(v).map(|c| {
            let mut x = F2Vector::zeros(self.dim(t));
            for i in c.ones() {
                x.xor_assign(&xs[i]);
            }
            x
        }))
    }

    /// `d_r` on `E_r^{p, t-p}` in the representative bases of source and target.
    pub fn page_differential(&self, t: u32, p: u32, r: u32, source: &Subquotient) -> Result<F2Matrix> {
        let target = self.cell(t + 1, p + r, r)?;
        let d = self.differential(t)?;
        let columns = source
            .reps
            .iter()
            .map(|v| {
                let x = self.lift(t, p, r, v)?.expect("representatives are r-cycles");
                let w = self.project(t + 1, &d.mul_vec(&x), p + r);
                Ok(target
                    .coords(&w)
                    .expect("d_r lands in the r-cycles of the target"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(F2Matrix::from_columns(&columns, target.dim()))
    }

    /// Cocycles of `C^t`.
    pub fn cocycles(&self, t: u32) -> Result<Subspace> {
        Ok(Subspace::from_vectors(self.dim(t), kernel(self.differential(t)?)))
    }

    /// Coboundaries `d C^{t-1}`.
    pub fn coboundaries(&self, t: u32) -> Result<Subspace> {
        if t == 0 {
            return Ok(Subspace::zero(self.dim(0)));
        }
        let d = self.differential(t - 1)?;
        Ok(Subspace::from_vectors(
            self.dim(t),
            (0..d.cols()).map(|j| d.column(j)),
        ))
    }

    /// `F^1 H^t(E)`: cocycle representatives of classes restricting to zero on the fiber,
    /// together with the coboundaries they are taken modulo.
    pub fn positive_filtration_cohomology(&self, t: u32) -> Result<(Vec<F2Vector>, Subspace)> {
        let d = self.differential(t)?;
        let cols = self.indices(t, |q| q >= 1);
        let rows: Vec<usize> = (0..d.rows()).collect();
        let boundaries = self.coboundaries(t)?;
        let mut span = boundaries.clone();
        for z in kernel(&d.submatrix(&rows, &cols)) {
            span.insert(z.scatter(&cols, self.dim(t)));
        }
        Ok((span.complement_of(&boundaries), boundaries))
    }
}

/// `E_r^{p,q}` stored as cycles and boundaries over the `E_2` basis of its bidegree.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub cycles: Subspace,
    pub boundaries: Subspace,
    /// Representatives of a basis of `cycles / boundaries`.
    pub reps: Vec<F2Vector>,
    solver: LinearSolver,
}

impl Subquotient {
    pub fn new(cycles: Subspace, boundaries: Subspace) -> Self {
        debug_assert!(boundaries.is_subspace_of(&cycles));
        let reps = cycles.complement_of(&boundaries);
        let mut gens = reps.clone();
        gens.extend(boundaries.basis().iter().cloned());
        let solver = LinearSolver::new(cycles.ambient_dim(), &gens);
        Self {
            cycles,
            boundaries,
            reps,
            solver,
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Coordinates of `v` against `reps`, if `v` is a cycle.
    pub fn coords(&self, v: &F2Vector) -> Option<F2Vector> {
        let c = self.solver.solve(v)?;
        Some(F2Vector::from_bits((0..self.dim()).map(|i| c.get(i))))
    }
}

/// One page in the band `p + q <= max_degree`.
#[derive(Clone, Debug)]
pub struct SSPage {
    pub r: u32,
    pub max_degree: u32,
    pub cells: BTreeMap<(u32, u32), Subquotient>,
    /// `d_r: E_r^{p,q} → E_r^{p+r, q-r+1}`, keyed by source bidegree; only nonzero-dimensional ends.
    pub differentials: BTreeMap<(u32, u32), F2Matrix>,
}

impl SSPage {
    pub fn dim(&self, p: u32, q: u32) -> usize {
        self.cells.get(&(p, q)).map_or(0, Subquotient::dim)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurvivorCell {
    pub p: u32,
    pub q: u32,
    pub dim: usize,
    pub labels: Vec<String>,
}

/// `E_∞` on one anti-diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurvivorReport {
    pub degree: u32,
    pub cells: Vec<SurvivorCell>,
    pub total_dim: usize,
    pub positive_filtration_dim: usize,
}

/// A basis element of `Σ_{p≥1} E_∞^{p, t-p}` with its `E_2` representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurvivorClass {
    pub p: u32,
    pub q: u32,
    pub representative: F2Vector,
    pub label: String,
}

/// All pages `r = 2 ..= D+2` and the survivor report in each total degree `<= D`.
#[derive(Debug)]
pub struct SpectralSequence {
    pub complex: FilteredComplex,
    pub pages: Vec<SSPage>,
    pub survivors: Vec<SurvivorReport>,
}

fn survivor_report(complex: &FilteredComplex, t: u32) -> Result<SurvivorReport> {
    let r = FilteredComplex::infinity_page(t);
    let mut cells = Vec::new();
    for p in 0..=t {
        let cell = complex.cell(t, p, r)?;
        if cell.dim() > 0 {
            cells.push(SurvivorCell {
                p,
                q: t - p,
                dim: cell.dim(),
                labels: cell.reps.iter().map(|v| complex.label(t, v)).collect(),
            });
        }
    }
    let total_dim = cells.iter().map(|c| c.dim).sum();
    let positive_filtration_dim = cells.iter().filter(|c| c.p >= 1).map(|c| c.dim).sum();
    Ok(SurvivorReport {
        degree: t,
        cells,
        total_dim,
        positive_filtration_dim,
    })
}

/// Computes the spectral sequence in total degrees `<= max_degree`.
///
/// The complex is built two degrees higher so that differentials leaving
/// the top diagonal are seen.
pub fn compute_pages(f: &FibrationSpec, max_degree: u32) -> Result<SpectralSequence> {
    let complex = FilteredComplex::new(f, max_degree + 2);
    let mut pages = Vec::new();
    for r in 2..=max_degree + 2 {
        let mut cells = BTreeMap::new();
        let mut differentials = BTreeMap::new();
        for t in 0..=max_degree {
            for p in 0..=t {
                let cell = complex.cell(t, p, r)?;
                let q = t - p;
                if cell.dim() > 0 && q + 1 >= r {
                    let d = complex.page_differential(t, p, r, &cell)?;
                    if d.rows() > 0 {
                        differentials.insert((p, q), d);
                    }
                }
                cells.insert((p, q), cell);
            }
        }
        pages.push(SSPage {
            r,
            max_degree,
            cells,
            differentials,
        });
    }
    let survivors = (0..=max_degree)
        .map(|t| survivor_report(&complex, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralSequence {
        complex,
        pages,
        survivors,
    })
}

/// `E_∞` in total degree `t` alone.
pub fn survivors_in_degree(f: &FibrationSpec, t: u32) -> Result<SurvivorReport> {
    survivor_report(&FilteredComplex::new(f, t + 1), t)
}

/// A basis of the positive-filtration part of the `E_∞` diagonal in total degree `t`:
/// the classes of `H^t(E)` restricting to zero on the fiber, as `E_2` representatives.
pub fn vanishing_on_fiber_classes(f: &FibrationSpec, t: u32) -> Result<Vec<SurvivorClass>> {
    vanishing_classes_of(&FilteredComplex::new(f, t + 1), t)
}

pub fn vanishing_classes_of(complex: &FilteredComplex, t: u32) -> Result<Vec<SurvivorClass>> {
    let r = FilteredComplex::infinity_page(t);
    let mut out = Vec::new();
    for p in 1..=t {
        for v in complex.cell(t, p, r)?.reps {
            out.push(SurvivorClass {
                p,
                q: t - p,
                label: complex.label(t, &v),
                representative: v,
            });
        }
    }
    Ok(out)
}

/// ASCII grid of each page: rows `q` descending, columns `p` ascending, `.` for zero.
pub fn render_chart(pages: &[SSPage]) -> String {
    let mut out = String::new();
    for page in pages {
        let d = page.max_degree;
        let width = page
            .cells
            .values()
            .map(|c| c.dim().to_string().len())
            .max()
            .unwrap_or(1)
            .max(2);
        let _ = writeln!(out, "E_{}", page.r);
        for q in (0..=d).rev() {
            let _ = write!(out, "{q:>3} |");
            for p in 0..=d - q {
                let n = page.dim(p, q);
                let cell = if n == 0 { ".".to_string() } else { n.to_string() };
                let _ = write!(out, "{cell:>width$}");
            }
            out.push('\n');
        }
        let _ = write!(out, "    +");
        for _ in 0..=d {
            let _ = write!(out, "{}", "-".repeat(width));
        }
        out.push('\n');
        let _ = write!(out, "     ");
        for p in 0..=d {
            let _ = write!(out, "{p:>width$}");
        }
        out.push_str("\n\n");
    }
    out
}

/// Fibration over `K((Z/2)^s, m)` with fiber `K((Z/2)^t, n)` and the given k-invariant tuple.
pub fn em_fibration(s: u32, m: u32, t: u32, n: u32, k: Vec<Poly>) -> Result<FibrationSpec> {
    let base = SpaceDescriptor::new(vec![Factor::new(s, m)])?;
    let k = k
        .iter()
        .map(|p| CohomologyClass::from_poly(&base, n + 1, p))
        .collect::<Result<Vec<_>>>()?;
    FibrationSpec::new(base, t, n, k)
}

impl std::fmt::Debug for FilteredComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FilteredComplex")
            .field("space", &self.space.to_string())
            .field("top", &self.top())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em_cohomology::{parse_class, poincare_series, Monomial};

    fn e2_fibration() -> FibrationSpec {
        let base = SpaceDescriptor::em(1, 2);
        let k = parse_class(&base, "Sq[2]i2").unwrap();
        em_fibration(1, 2, 1, 3, vec![k]).unwrap()
    }

    #[test]
    fn transgressions_of_e2_fibration() {
        let f = e2_fibration();
        let targets = transgression_targets(&f, 5);
        let label = |g: &EMGenerator| targets[g].label();
        assert_eq!(label(&EMGenerator::fundamental(0, 0, 3)), "i2^2");
        // Sq^1 of i2^2 is zero, so Sq^1 i3 is a permanent cycle
        let sq1 = EMGenerator::new(0, 0, 3, crate::AdmissibleSequence::new(vec![1]).unwrap());
        assert_eq!(label(&sq1), "0");
        let sq2 = EMGenerator::new(0, 0, 3, crate::AdmissibleSequence::new(vec![2]).unwrap());
        assert_eq!(label(&sq2), "Sq[1]i2^2");
    }

    #[test]
    fn trivial_k_has_no_transgressions() {
        let f = FibrationSpec::trivial(SpaceDescriptor::em(1, 2), 1, 3);
        assert!(transgression_targets(&f, 8).values().all(CohomologyClass::is_zero));
    }

    #[test]
    fn e2_survivors_in_degree_six() {
        let report = survivors_in_degree(&e2_fibration(), 6).unwrap();
        let dims: Vec<(u32, u32, usize)> = report.cells.iter().map(|c| (c.p, c.q, c.dim)).collect();
        assert_eq!(dims, vec![(0, 6, 2), (2, 4, 1)]);
        assert_eq!(report.total_dim, 3);
        assert_eq!(report.positive_filtration_dim, 1);
        assert_eq!(report.cells[1].labels, vec!["i2*Sq[1]i3".to_string()]);
        let mut fiber_labels = report.cells[0].labels.clone();
        fiber_labels.sort();
        assert_eq!(fiber_labels, vec!["Sq[2,1]i3", "i3^2"]);
    }

    #[test]
    fn e2_known_differentials() {
        let ss = compute_pages(&e2_fibration(), 7).unwrap();
        // d_4(i3) = i2^2 kills E^{4,0}
        let e4 = &ss.pages[2];
        assert_eq!(e4.r, 4);
        assert_eq!(e4.dim(0, 3), 1);
        assert_eq!(e4.differentials[&(0, 3)].rows(), 1);
        assert!(!e4.differentials[&(0, 3)].is_zero());
        assert_eq!(ss.pages[3].dim(0, 3), 0);
        assert_eq!(ss.pages[3].dim(4, 0), 0);
        // d_7(i3^2) = Sq^3 Sq^2 i2 = 0
        let e7 = &ss.pages[5];
        assert_eq!(e7.r, 7);
        assert!(e7.differentials.get(&(0, 6)).iter().all(|d| d.is_zero()));
    }

    #[test]
    fn vanishing_on_fiber_examples() {
        let v = vanishing_on_fiber_classes(&e2_fibration(), 6).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].label, "i2*Sq[1]i3");
        assert_eq!((v[0].p, v[0].q), (2, 4));

        let trivial = FibrationSpec::trivial(SpaceDescriptor::em(1, 2), 1, 3);
        assert_eq!(vanishing_on_fiber_classes(&trivial, 6).unwrap().len(), 4);
        assert!(vanishing_on_fiber_classes(&trivial, 1).unwrap().is_empty());
    }

    #[test]
    fn trivial_k_gives_kunneth() {
        for (s, m, t, n) in [(1, 2, 1, 3), (2, 2, 1, 4), (1, 3, 2, 3)] {
            let f = FibrationSpec::trivial(SpaceDescriptor::em(s, m), t, n);
            let ss = compute_pages(&f, 7).unwrap();
            let kunneth = poincare_series(&f.total_space(), 7);
            for (t, report) in ss.survivors.iter().enumerate() {
                assert_eq!(report.total_dim, kunneth[t]);
            }
        }
    }

    #[test]
    fn pages_satisfy_d_squared_and_homology() {
        let ss = compute_pages(&e2_fibration(), 7).unwrap();
        for t in 0..ss.complex.top() - 1 {
            let d0 = ss.complex.differential(t).unwrap();
            let d1 = ss.complex.differential(t + 1).unwrap();
            assert!(d1.mul(d0).is_zero());
        }
        for (i, page) in ss.pages.iter().enumerate() {
            for (&(p, q), d) in &page.differentials {
                let r = page.r;
                if q + 1 >= 2 * r - 1 {
                    if let Some(next) = page.differentials.get(&(p + r, q + 1 - r)) {
                        assert!(next.mul(d).is_zero());
                    }
                }
            }
            // E_{r+1} = ker d_r / im d_r
            if let Some(next) = ss.pages.get(i + 1) {
                for (&(p, q), cell) in &page.cells {
                    let r = page.r;
                    let rank_out = page.differentials.get(&(p, q)).map_or(0, |d| crate::f2linalg::rref(d).rank);
                    let rank_in = if p >= r {
                        page.differentials
                            .get(&(p - r, q + r - 1))
                            .map_or(0, |d| crate::f2linalg::rref(d).rank)
                    } else {
                        0
                    };
                    assert_eq!(next.dim(p, q), cell.dim() - rank_out - rank_in, "E_{r} at ({p},{q})");
                }
            }
        }
    }

    #[test]
    fn stability_and_euler_bound() {
        let ss = compute_pages(&e2_fibration(), 7).unwrap();
        for report in &ss.survivors {
            let t = report.degree;
            let e2: usize = (0..=t).map(|p| ss.pages[0].dim(p, t - p)).sum();
            assert!(report.total_dim <= e2);
            let stable = &ss.pages[(t + 2 - 2) as usize];
            for c in &report.cells {
                assert_eq!(stable.dim(c.p, c.q), c.dim);
            }
            let touched = ss.pages.iter().any(|pg| {
                pg.differentials
                    .iter()
                    .any(|(&(p, q), d)| (p + q == t || p + q + 1 == t) && !d.is_zero())
            });
            assert_eq!(report.total_dim == e2, !touched, "degree {t}");
        }
    }

    #[test]
    fn differential_is_a_derivation_on_disjoint_products() {
        let f = e2_fibration();
        let c = FilteredComplex::new(&f, 9);
        let space = c.space().clone();
        let d_poly = |m: &Monomial| -> Poly {
            let t = m.degree();
            let v = c.basis(t).coords(&Poly::from(m.clone())).unwrap();
            c.basis(t + 1).poly(&c.differential(t).unwrap().mul_vec(&v))
        };
        let disjoint = |a: &Monomial, b: &Monomial| {
            a.powers()
                .iter()
                .all(|(g, e)| g.factor == 0 || b.exponent(g) & e == 0)
        };
        for ta in 1..=4 {
            for tb in 1..=(8 - ta) {
                for a in &degree_basis(&space, ta).monomials {
                    for b in &degree_basis(&space, tb).monomials {
                        if !disjoint(a, b) {
                            continue;
                        }
                        let ab = a.mul(b);
                        let lhs = d_poly(&ab);
                        let mut rhs = d_poly(a).mul_monomial(b);
                        rhs += &d_poly(b).mul_monomial(a);
                        assert_eq!(lhs, rhs, "d({})", poly_label(&space, &Poly::from(ab.clone())));
                    }
                }
            }
        }
    }
}
