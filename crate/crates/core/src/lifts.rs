//! Spaces of lifts and the global count of third-stage k-invariants.
//!
//! For a fibration with fiber `K((Z/2)^t, n)` the space of lifts over `X`
//! is a product of Eilenberg–Mac Lane spaces with `π_i` of dimension
//! `t · dim H^{n-i}(X)`. For a Postnikov-piece fiber the homotopy of the
//! space of lifts is reached through a third-octant spectral sequence whose
//! regraded `E²` term is the Serre `E_2` term; its `π₀` is counted from
//! the positive-filtration `E_∞` diagonal of the Serre spectral sequence.

use serde::{Deserialize, Serialize};

use crate::classify::{
    k1_representatives, product_space, tuple_label, AutElement, BranchContext, GroupDegree,
    InducedAction, MAX_ENUMERATION_BITS, tuple_orbits,
};
use crate::em_cohomology::{
    degree_basis, poincare_series, restrict_to_fiber, CohomologyClass, Poly, SpaceDescriptor, Substitution,
};
use crate::error::{Error, Result};
use crate::f2linalg::{elementary_generators, kernel, rref, F2Matrix, F2Vector, LinearSolver};
use crate::serre_ss::{em_fibration, vanishing_classes_of, FilteredComplex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomotopyLevel {
    pub i: u32,
    pub dim: usize,
}

/// Homotopy of the space of lifts with fiber `K((Z/2)^rank, degree)` over `source`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftsHomotopy {
    pub source: String,
    pub rank: u32,
    pub degree: u32,
    pub levels: Vec<HomotopyLevel>,
}

impl LiftsHomotopy {
    pub fn pi(&self, i: u32) -> usize {
        self.levels.iter().find(|l| l.i == i).map_or(0, |l| l.dim)
    }
}

fn check_simply_connected(x: &SpaceDescriptor) -> Result<()> {
    if let Some(f) = x.factors.iter().find(|f| f.degree < 2) {
        return Err(Error::InvalidParameters(format!(
            "source must be simply connected, found factor {}",
            f.label
        )));
    }
    Ok(())
}

/// `π_i ≅ H^{n-i}(X; (Z/2)^t)` for `0 <= i <= n`.
pub fn thom_moller(x: &SpaceDescriptor, rank: u32, degree: u32) -> Result<LiftsHomotopy> {
    check_simply_connected(x)?;
    let dims = poincare_series(x, degree);
    Ok(LiftsHomotopy {
        source: x.to_string(),
        rank,
        degree,
        levels: (0..=degree)
            .map(|i| HomotopyLevel {
                i,
                dim: rank as usize * dims[(degree - i) as usize],
            })
            .collect(),
    })
}

/// One entry `E²_{ij} = H^{-i}(X; π_j(F))` of the third-octant spectral sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridEntry {
    pub i: i32,
    pub j: u32,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftSSGrid {
    pub source: String,
    pub entries: Vec<GridEntry>,
}

impl LiftSSGrid {
    pub fn get(&self, i: i32, j: u32) -> usize {
        self.entries
            .iter()
            .find(|e| e.i == i && e.j == j)
            .map_or(0, |e| e.dim)
    }

    /// Entry at `(p, q) = (-i, top - j)`.
    pub fn regraded(&self, top: u32, p: u32, q: u32) -> Option<usize> {
        let j = top.checked_sub(q)?;
        Some(self.get(-(p as i32), j))
    }

    /// Total dimension contributing to `π_k`, i.e. entries with `i + j = k`.
    pub fn abutment_dim(&self, k: u32) -> usize {
        self.entries
            .iter()
            .filter(|e| e.i + e.j as i32 == k as i32)
            .map(|e| e.dim)
            .sum()
    }
}

/// The `E²` grid for a fiber with `π_j = (Z/2)^rank` at each listed `(rank, j)`.
pub fn lift_ss_grid(x: &SpaceDescriptor, fiber_levels: &[(u32, u32)]) -> Result<LiftSSGrid> {
    check_simply_connected(x)?;
    let top = fiber_levels.iter().map(|&(_, j)| j).max().unwrap_or(0);
    let dims = poincare_series(x, top);
    let mut entries = Vec::new();
    for &(rank, j) in fiber_levels {
        if rank == 0 {
            continue;
        }
        for d in 0..=j {
            let dim = rank as usize * dims[d as usize];
            if dim > 0 {
                entries.push(GridEntry { i: -(d as i32), j, dim });
            }
        }
    }
    entries.sort_by_key(|e| (e.j, -e.i));
    Ok(LiftSSGrid {
        source: x.to_string(),
        entries,
    })
}

/// Homotopy of `map(K(B,n), K(C, r+1))` as `(rank, j)` levels: `π_j = H^{r+1-j}(K(B,n); C)`.
pub fn mapping_space_levels(b: GroupDegree, c: GroupDegree) -> Vec<(u32, u32)> {
    let top = c.degree + 1;
    let dims = poincare_series(&b.space(), top);
    (0..=top)
        .map(|j| (c.rank * dims[(top - j) as usize] as u32, j))
        .collect()
}

/// Serre `E_2^{p,q}` dimensions with coefficients in `C`, from the page computation.
pub fn serre_e2_dims(a: GroupDegree, b: GroupDegree, c: GroupDegree) -> Result<Vec<Vec<usize>>> {
    let spec = em_fibration(a.rank, a.degree, b.rank, b.degree, vec![Poly::zero(); b.rank as usize])?;
    let top = c.degree + 1;
    let complex = FilteredComplex::new(&spec, top + 1);
    let mut grid = vec![vec![0usize; (top + 1) as usize]; (top + 1) as usize];
    for t in 0..=top {
        for p in 0..=t {
            grid[p as usize][(t - p) as usize] = c.rank as usize * complex.cell(t, p, 2)?.dim();
        }
    }
    Ok(grid)
}

/// Checks that the regraded lifts grid equals the Serre `E_2` grid for `p + q <= r + 1`.
pub fn regrading_matches(a: GroupDegree, b: GroupDegree, c: GroupDegree) -> Result<bool> {
    let levels = mapping_space_levels(b, c);
    let grid = lift_ss_grid(&a.space(), &levels)?;
    let serre = serre_e2_dims(a, b, c)?;
    let top = c.degree + 1;
    for p in 0..=top {
        for q in 0..=top - p {
            if grid.regraded(top, p, q) != Some(serre[p as usize][q as usize]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalCount {
    pub k1: String,
    pub lifts: u64,
    pub orbits: u64,
    pub ambiguous: bool,
}

/// `π₀` of the space of lifts over `k1` and its quotient by the automorphism action.
///
/// The basis is the positive-filtration `E_∞` diagonal in degree `r + 1`,
/// each `E_2` representative lifted to a cocycle.
pub fn global_pi0_count(
    a: GroupDegree,
    b: GroupDegree,
    c: GroupDegree,
    k1: &[Poly],
    pairs: bool,
) -> Result<GlobalCount> {
    let base = a.space();
    for p in k1 {
        if let Some(d) = p.homogeneous_degree() {
            if d != b.degree + 1 {
                return Err(Error::DegreeMismatch {
                    expected: b.degree + 1,
                    found: d,
                });
            }
        }
        CohomologyClass::from_poly(&base, b.degree + 1, p)?;
    }
    let ctx = BranchContext::new(a, b, c, k1.to_vec(), pairs)?;
    let t = ctx.degree();
    let r = FilteredComplex::infinity_page(t);
    let reps = vanishing_classes_of(&ctx.complex, t)?
        .iter()
        .map(|s| {
            ctx.complex
                .lift(t, s.p, r, &s.representative)
                .map(|x| x.expect("E_inf classes lift to cocycles"))
        })
        .collect::<Result<Vec<_>>>()?;
    let branch = ctx.count(&reps)?;
    Ok(GlobalCount {
        k1: branch.k1,
        lifts: branch.candidates,
        orbits: branch.orbits,
        ambiguous: branch.ambiguous,
    })
}

/// The `k1 = 0` count by Künneth arithmetic alone: classes of `H^{r+1}(K(A,m) × K(B,n))`
/// restricting to zero on `K(B,n)`, modulo the substitution action and `GL_u`.
pub fn global_pi0_count_kunneth(a: GroupDegree, b: GroupDegree, c: GroupDegree, pairs: bool) -> Result<GlobalCount> {
    let x = product_space(a, b);
    let t = c.degree + 1;
    let basis = degree_basis(&x, t);
    let restriction: Vec<F2Vector> = basis
        .monomials
        .iter()
        .map(|m| {
            let cls = CohomologyClass::from_poly(&x, t, &Poly::from(m.clone()))?;
            Ok(restrict_to_fiber(&cls, &[1])?.coords)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = restriction.first().map_or(degree_basis(&b.space(), t).dim(), F2Vector::len);
    let kernel_basis = kernel(&F2Matrix::from_columns(&restriction, rows));
    let cdim = kernel_basis.len();
    let u = c.rank as usize;
    let bits = (cdim * u) as u32;
    if bits > MAX_ENUMERATION_BITS {
        return Err(Error::TooLarge(bits));
    }

    let (s, tr) = (a.rank as usize, b.rank as usize);
    let mut elements: Vec<AutElement> = Vec::new();
    if pairs {
        for alpha in elementary_generators(s) {
            elements.push(AutElement {
                alpha,
                ..AutElement::identity(s, tr)
            });
        }
    }
    for beta in elementary_generators(tr) {
        elements.push(AutElement {
            beta,
            ..AutElement::identity(s, tr)
        });
    }
    let hn = degree_basis(&a.space(), b.degree);
    for j in 0..tr {
        for m in &hn.monomials {
            let mut g = AutElement::identity(s, tr);
            g.translation[j] = Poly::from(m.clone());
            elements.push(g);
        }
    }

    let solver = LinearSolver::new(basis.dim(), &kernel_basis);
    let mut matrices = Vec::new();
    for g in &elements {
        let mut sub: Substitution = g.substitution(&x)?;
        let columns = kernel_basis
            .iter()
            .map(|v| {
                let img = basis.coords(&sub.apply(&basis.poly(v)))?;
                solver.solve(&img).ok_or(Error::NotClosed)
            })
            .collect::<Result<Vec<_>>>()?;
        matrices.push(F2Matrix::from_columns(&columns, cdim));
    }
    debug_assert!(matrices.iter().all(|m| rref(m).rank == cdim));
    let action = InducedAction {
        matrices,
        ambiguous: false,
    };
    let orbits = tuple_orbits(&action, cdim, u)?;
    Ok(GlobalCount {
        k1: tuple_label(&a.space(), &vec![Poly::zero(); tr][..]),
        lifts: 1 << bits,
        orbits: orbits.count() as u64,
        ambiguous: false,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareRow {
    pub k1: String,
    pub classical: u64,
    pub global: u64,
    /// Independent count by Künneth arithmetic, present on the `k1 = 0` branch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kunneth: Option<u64>,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub all_equal: bool,
}

/// Classical and global counts for every first k-invariant orbit.
pub fn compare(a: GroupDegree, b: GroupDegree, c: GroupDegree, pairs: bool) -> Result<CompareReport> {
    let mut rows = Vec::new();
    for k1 in k1_representatives(a, b, pairs)? {
        let ctx = BranchContext::new(a, b, c, k1.clone(), pairs)?;
        let classical = ctx.classical()?;
        let global = global_pi0_count(a, b, c, &k1, pairs)?;
        let kunneth = if k1.iter().all(Poly::is_zero) {
            Some(global_pi0_count_kunneth(a, b, c, pairs)?.orbits)
        } else {
            None
        };
        let equal = classical.orbits == global.orbits
            && classical.candidates == global.lifts
            && kunneth.iter().all(|&k| k == global.orbits);
        rows.push(CompareRow {
            k1: classical.k1,
            classical: classical.orbits,
            global: global.orbits,
            kunneth,
            equal,
        });
    }
    let all_equal = rows.iter().all(|r| r.equal);
    Ok(CompareReport { rows, all_equal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em_cohomology::parse_class;

    fn gd(rank: u32, degree: u32) -> GroupDegree {
        GroupDegree::new(rank, degree)
    }

    #[test]
    fn thom_moller_over_k2() {
        let h = thom_moller(&SpaceDescriptor::em(1, 2), 1, 3).unwrap();
        let dims: Vec<usize> = h.levels.iter().map(|l| l.dim).collect();
        assert_eq!(dims, vec![1, 1, 0, 1]);
    }

    #[test]
    fn thom_moller_over_a_point() {
        let h = thom_moller(&SpaceDescriptor::point(), 3, 4).unwrap();
        for l in &h.levels {
            assert_eq!(l.dim, if l.i == 4 { 3 } else { 0 });
        }
        assert!(thom_moller(&SpaceDescriptor::em(1, 1), 1, 2).is_err());
    }

    #[test]
    fn thom_moller_is_exhaustive() {
        let x = SpaceDescriptor::parse("K(1,2)xK(2,3)").unwrap();
        for n in 0..=7 {
            let h = thom_moller(&x, 2, n).unwrap();
            let total: usize = h.levels.iter().map(|l| l.dim).sum();
            let direct: usize = poincare_series(&x, n).iter().map(|d| 2 * d).sum();
            assert_eq!(total, direct);
            assert_eq!(h.pi(0), 2 * degree_basis(&x, n).dim());
        }
    }

    #[test]
    fn single_level_grid_is_thom_moller() {
        let x = SpaceDescriptor::em(1, 2);
        let grid = lift_ss_grid(&x, &[(1, 3)]).unwrap();
        let h = thom_moller(&x, 1, 3).unwrap();
        for k in 0..=3 {
            assert_eq!(grid.abutment_dim(k), h.pi(k));
        }
    }

    #[test]
    fn mapping_space_levels_from_k3() {
        let levels = mapping_space_levels(gd(1, 3), gd(1, 5));
        let dims: Vec<u32> = levels.iter().map(|&(r, _)| r).collect();
        // H^{6-j}(K(Z/2,3)) for j = 0..6, from dims 1,0,0,1,1,1,2
        assert_eq!(dims, vec![2, 1, 1, 1, 0, 0, 1]);
    }

    #[test]
    fn regrading_on_reference_instance() {
        assert!(regrading_matches(gd(1, 2), gd(1, 3), gd(1, 5)).unwrap());
        assert!(regrading_matches(gd(2, 2), gd(1, 4), gd(2, 6)).unwrap());
    }

    #[test]
    fn global_counts_on_reference_instance() {
        let zero = global_pi0_count(gd(1, 2), gd(1, 3), gd(1, 5), &[Poly::zero()], false).unwrap();
        assert_eq!((zero.lifts, zero.orbits), (16, 12));
        let k = parse_class(&gd(1, 2).space(), "i2^2").unwrap();
        let sq2 = global_pi0_count(gd(1, 2), gd(1, 3), gd(1, 5), &[k], false).unwrap();
        assert_eq!((sq2.lifts, sq2.orbits), (2, 2));
        let kun = global_pi0_count_kunneth(gd(1, 2), gd(1, 3), gd(1, 5), false).unwrap();
        assert_eq!((kun.lifts, kun.orbits), (16, 12));
    }

    #[test]
    fn degree_mismatch_is_reported() {
        let k = parse_class(&gd(1, 2).space(), "i2").unwrap();
        assert!(matches!(
            global_pi0_count(gd(1, 2), gd(1, 3), gd(1, 5), &[k], false),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn compare_reference_instance() {
        let report = compare(gd(1, 2), gd(1, 3), gd(1, 5), false).unwrap();
        assert!(report.all_equal);
        let rows: Vec<(&str, u64, u64)> = report
            .rows
            .iter()
            .map(|r| (r.k1.as_str(), r.classical, r.global))
            .collect();
        assert_eq!(rows, vec![("0", 12, 12), ("Sq[2]i2", 2, 2)]);
        assert_eq!(report.rows[0].kunneth, Some(12));
    }

    #[test]
    fn trivial_coefficients_give_only_the_zero_lift() {
        let report = compare(gd(1, 2), gd(1, 3), gd(0, 5), false).unwrap();
        assert!(report.all_equal);
        for row in &report.rows {
            assert_eq!((row.classical, row.global), (1, 1));
        }
        let r = global_pi0_count_kunneth(gd(1, 2), gd(1, 3), gd(0, 5), false).unwrap();
        assert_eq!((r.lifts, r.orbits), (1, 1));
    }
}
