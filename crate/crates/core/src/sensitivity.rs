// SPDX-License-Identifier: Apache-2.0

//! Logarithmic PageRank derivative under a relative boost of one link of the
//! reduced matrix.
//!
//! Entry `(i, j)` of `GR` is multiplied by `1 + delta` and column `j` is
//! renormalized to unit sum, giving `G'`. With `P` and `P'` the stationary
//! vectors of `GR` and `G'`,
//!
//! ```text
//! D_{j->i}(k) = (P'_k - P_k) / (delta P_k)
//! ```
//!
//! The difference `e = P' - P` is iterated directly, `e <- G' e + P_j (G'_j - GR_j)`,
//! so its relative accuracy does not degrade for small `delta`.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::par;
use crate::reduced::ReducedSet;

pub const DEFAULT_DELTA: f64 = 0.03;

/// Boost of the reduced-matrix transition `source -> target` (member indices).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    source: usize,
    target: usize,
    delta: f64,
}

impl Perturbation {
    pub fn new(source: usize, target: usize, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParameter { name: "delta", reason: alloc::format!("{delta} must be positive") });
        }
        Ok(Self { source, target, delta })
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn check(&self, nr: usize) -> Result<()> {
        for index in [self.source, self.target] {
            if index >= nr {
                return Err(Error::MemberOutOfRange { index, size: nr });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub perturbation: Perturbation,
    /// Derivative per member.
    pub d: Vec<f64>,
    /// Stationary vector of the perturbed matrix.
    pub p_prime: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityParams {
    /// Relative L1 change of `P' - P` at which iteration stops.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SensitivityParams {
    fn default() -> Self {
        Self { tol: 1e-14, max_iters: 1_000_000 }
    }
}

/// Copy of `GR` with entry `(target, source)` boosted and column `source`
/// renormalized.
pub fn perturb_and_normalize(rs: &ReducedSet, pert: &Perturbation) -> Result<DenseMatrix> {
    pert.check(rs.nr())?;
    let mut m = rs.gr.clone();
    if m[(pert.target, pert.source)] == 0.0 {
        return Ok(m);
    }
    m[(pert.target, pert.source)] *= 1.0 + pert.delta;
    let col = m.col_mut(pert.source);
    let s: f64 = col.iter().sum();
    col.iter_mut().for_each(|v| *v /= s);
    Ok(m)
}

pub fn sensitivity(rs: &ReducedSet, pert: &Perturbation) -> Result<SensitivityReport> {
    sensitivity_with(rs, pert, &SensitivityParams::default())
}

pub fn sensitivity_with(rs: &ReducedSet, pert: &Perturbation, sp: &SensitivityParams) -> Result<SensitivityReport> {
    let nr = rs.nr();
    let p = &rs.pr_reduced;
    if let Some(k) = p.iter().position(|&v| v <= 0.0 || v.is_nan()) {
        return Err(Error::InvalidParameter {
            name: "pr_reduced",
            reason: alloc::format!("entry {k} is not positive"),
        });
    }
    let perturbed = perturb_and_normalize(rs, pert)?;
    let j = pert.source;
    let source: Vec<f64> = perturbed.col(j).iter().zip(rs.gr.col(j)).map(|(a, b)| p[j] * (a - b)).collect();
    let unchanged = || SensitivityReport { perturbation: *pert, d: vec![0.0; nr], p_prime: p.clone(), iterations: 0 };
    if source.iter().all(|&v| v == 0.0) {
        return Ok(unchanged());
    }

    let floor = sp.tol.max(4.0 * nr as f64 * f64::EPSILON);
    let mut e = source.clone();
    let mut next = vec![0.0; nr];
    let mut change = f64::INFINITY;
    for it in 1..=sp.max_iters {
        perturbed.mul_vec_into(&e, &mut next);
        for (x, b) in next.iter_mut().zip(&source) {
            *x += b;
        }
        // Remove drift along the stationary direction; `e` sums to zero.
        let drift: f64 = next.iter().sum();
        for (x, pk) in next.iter_mut().zip(p) {
            *x -= drift * pk;
        }
        change = e.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        let size: f64 = next.iter().map(|v| v.abs()).sum();
        core::mem::swap(&mut e, &mut next);
        if change <= floor * size {
            let d = e.iter().zip(p).map(|(ek, pk)| ek / (pert.delta * pk)).collect();
            let p_prime = e.iter().zip(p).map(|(ek, pk)| pk + ek).collect();
            return Ok(SensitivityReport { perturbation: *pert, d, p_prime, iterations: it });
        }
    }
    Err(Error::NotConverged { what: "perturbed reduced PageRank", iterations: sp.max_iters, residual: change })
}

/// Rows by columns table of derivative values, with member indices on both
/// axes.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityTable {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// Row-major, `rows.len() * cols.len()` values.
    pub values: Vec<f64>,
    pub delta: f64,
}

impl SensitivityTable {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols.len() + col]
    }

    /// `(min, max)` over all cells, `None` for an empty table.
    pub fn range(&self) -> Option<(f64, f64)> {
        let mut it = self.values.iter().copied();
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }
}

fn check_disjoint(nr: usize, a: &[usize], b: &[usize]) -> Result<()> {
    for &m in a.iter().chain(b) {
        if m >= nr {
            return Err(Error::MemberOutOfRange { index: m, size: nr });
        }
    }
    if a.iter().any(|m| b.contains(m)) {
        return Err(Error::InvalidParameter { name: "member lists", reason: "groups and countries overlap".into() });
    }
    Ok(())
}

/// `D_{j->i}(j)` for every country `j` (rows) and group `i` (columns).
pub fn influence_map(rs: &ReducedSet, groups: &[usize], countries: &[usize], delta: f64) -> Result<SensitivityTable> {
    check_disjoint(rs.nr(), groups, countries)?;
    Perturbation::new(0, 0, delta)?;
    let cells: Vec<(usize, usize)> = countries.iter().flat_map(|&j| groups.iter().map(move |&i| (j, i))).collect();
    let values = par::map(&cells, |&(j, i)| {
        let pert = Perturbation::new(j, i, delta)?;
        sensitivity(rs, &pert).map(|r| r.d[j])
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    Ok(SensitivityTable { rows: countries.to_vec(), cols: groups.to_vec(), values, delta })
}

/// `D_{c->i}(j)` for every group `i` (rows) and country `j != c` (columns).
pub fn country_link_matrix(
    rs: &ReducedSet,
    country: usize,
    groups: &[usize],
    countries: &[usize],
    delta: f64,
) -> Result<SensitivityTable> {
    check_disjoint(rs.nr(), groups, countries)?;
    if !countries.contains(&country) {
        return Err(Error::InvalidParameter { name: "country", reason: "not in the country list".into() });
    }
    let cols: Vec<usize> = countries.iter().copied().filter(|&j| j != country).collect();
    let rows = par::map(groups, |&i| {
        let pert = Perturbation::new(country, i, delta)?;
        sensitivity(rs, &pert).map(|r| cols.iter().map(|&j| r.d[j]).collect::<Vec<f64>>())
    })
    .into_iter()
    .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(SensitivityTable { rows: groups.to_vec(), cols, values: rows.concat(), delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduced::Weights;

    fn set_from(gr: DenseMatrix) -> ReducedSet {
        let n = gr.rows();
        let p = crate::dense::stationary_direct(&gr).unwrap();
        let zero = DenseMatrix::zeros(n, n);
        ReducedSet {
            members: (0..n).collect(),
            grr: gr.clone(),
            gr,
            gpr: zero.clone(),
            gqrd: zero.clone(),
            gqrnd: zero,
            lambda_c: None,
            weights: Weights { wrr: 1.0, wpr: 0.0, wqr: 0.0 },
            pr_reduced: p,
            series_terms: 0,
            truncation_error: 0.0,
            term_masses: Vec::new(),
        }
    }

    #[test]
    fn renormalizes_boosted_column() {
        let rs = set_from(DenseMatrix::from_fn(2, 2, |_, _| 0.5));
        let m = perturb_and_normalize(&rs, &Perturbation::new(0, 0, 1.0).unwrap()).unwrap();
        assert!((m[(0, 0)] - 2.0 / 3.0).abs() < 1e-15);
        assert!((m[(1, 0)] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.col(1), rs.gr.col(1));
    }

    #[test]
    fn zero_entry_leaves_matrix_and_derivative_unchanged() {
        let gr = DenseMatrix::from_fn(3, 3, |i, j| [[0.0, 0.5, 0.2], [0.6, 0.0, 0.8], [0.4, 0.5, 0.0]][i][j]);
        let rs = set_from(gr);
        let pert = Perturbation::new(1, 1, 0.03).unwrap();
        assert_eq!(perturb_and_normalize(&rs, &pert).unwrap(), rs.gr);
        let r = sensitivity(&rs, &pert).unwrap();
        assert_eq!(r.d, vec![0.0; 3]);
        assert_eq!(r.p_prime, rs.pr_reduced);
    }

    #[test]
    fn full_column_at_target_is_fixed() {
        let gr = DenseMatrix::from_fn(2, 2, |i, j| [[0.0, 0.3], [1.0, 0.7]][i][j]);
        let rs = set_from(gr);
        let m = perturb_and_normalize(&rs, &Perturbation::new(0, 1, 0.5).unwrap()).unwrap();
        assert_eq!(m, rs.gr);
    }

    #[test]
    fn rejects_bad_delta_and_indices() {
        assert!(Perturbation::new(0, 1, 0.0).is_err());
        assert!(Perturbation::new(0, 1, -0.1).is_err());
        assert!(Perturbation::new(0, 1, f64::NAN).is_err());
        let rs = set_from(DenseMatrix::from_fn(2, 2, |_, _| 0.5));
        let pert = Perturbation::new(0, 5, 0.1).unwrap();
        assert_eq!(sensitivity(&rs, &pert).unwrap_err(), Error::MemberOutOfRange { index: 5, size: 2 });
    }

    #[test]
    fn derivative_matches_direct_solve() {
        let gr = DenseMatrix::from_fn(3, 3, |i, j| [[0.1, 0.5, 0.2], [0.6, 0.2, 0.3], [0.3, 0.3, 0.5]][i][j]);
        let rs = set_from(gr);
        let pert = Perturbation::new(0, 1, 0.03).unwrap();
        let r = sensitivity(&rs, &pert).unwrap();
        let direct = crate::dense::stationary_direct(&perturb_and_normalize(&rs, &pert).unwrap()).unwrap();
        for k in 0..3 {
            let d = (direct[k] - rs.pr_reduced[k]) / (0.03 * rs.pr_reduced[k]);
            assert!((d - r.d[k]).abs() < 1e-10, "{k}: {d} vs {}", r.d[k]);
        }
        let mass: f64 = r.d.iter().zip(&rs.pr_reduced).map(|(d, p)| d * p).sum();
        assert!(mass.abs() < 1e-12);
    }

    #[test]
    fn tables_shape_and_overlap() {
        let gr = DenseMatrix::from_fn(3, 3, |i, j| [[0.1, 0.5, 0.2], [0.6, 0.2, 0.3], [0.3, 0.3, 0.5]][i][j]);
        let rs = set_from(gr);
        let t = country_link_matrix(&rs, 1, &[0], &[1, 2], 0.03).unwrap();
        assert_eq!((t.rows.len(), t.cols.len()), (1, 1));
        assert_eq!(t.cols, vec![2]);
        assert!(influence_map(&rs, &[0, 1], &[1, 2], 0.03).is_err());
        assert!(country_link_matrix(&rs, 0, &[0], &[1, 2], 0.03).is_err());
        let m = influence_map(&rs, &[0], &[1, 2], 0.03).unwrap();
        let single = sensitivity(&rs, &Perturbation::new(2, 0, 0.03).unwrap()).unwrap();
        assert_eq!(m.get(1, 0), single.d[2]);
        let (lo, hi) = m.range().unwrap();
        assert!(lo <= hi);
    }
}
