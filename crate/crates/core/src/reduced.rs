// SPDX-License-Identifier: Apache-2.0

//! Reduced Google matrix of a subset `r` of `Nr` nodes.
//!
//! With the remaining nodes forming the scattering set `s`,
//!
//! ```text
//! GR = G_rr + G_rs (1 - G_ss)^-1 G_sr
//! ```
//!
//! The inverse is never formed. `G_ss` has a leading eigenvalue `lambda_c`
//! just below one, with right and left eigenvectors `psi_R`, `psi_L`
//! (`sum psi_R = 1`, `psi_L . psi_R = 1`). Splitting off the projector
//! `P_c = psi_R psi_L^T` and its complement `Q_c = 1 - P_c` gives
//!
//! ```text
//! Gpr = (G_rs psi_R)(psi_L^T G_sr) / (1 - lambda_c)
//! Gqr = G_rs Q_c [sum_l (Q_c G_ss Q_c)^l] Q_c G_sr
//! ```
//!
//! and the series in `Gqr` contracts at the rate of the subleading
//! eigenvalue of `G_ss` instead of `lambda_c`. `GR = Grr + Gpr + Gqr`, with
//! `Grr = G_rr`, and `Gqr` is reported as its diagonal and off-diagonal parts.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::{self, DenseMatrix, Lu};
use crate::error::{Error, Result};
use crate::google::{rank_members, GoogleOperator, GoogleParams, LocalRank};
use crate::graph::DirectedGraph;
use crate::par;
use crate::subset::SubsetSpec;

/// Largest graph the dense oracle will materialize.
pub const DENSE_CAP: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams {
    /// A series term whose L1 column mass drops below this is not added.
    pub series_tol: f64,
    pub max_terms: usize,
    /// Convergence threshold for the scattering eigenpair.
    pub eig_tol: f64,
    pub eig_max_iters: usize,
    /// Number of right-hand sides pushed through the operator together.
    pub batch_width: usize,
    /// Tolerance of the dense power iteration for the reduced PageRank.
    pub pr_tol: f64,
    pub pr_max_iters: usize,
}

impl Default for ReducedParams {
    fn default() -> Self {
        Self {
            series_tol: 1e-12,
            max_terms: 100_000,
            eig_tol: 1e-13,
            eig_max_iters: 100_000,
            batch_width: 16,
            pr_tol: 1e-14,
            pr_max_iters: 1_000_000,
        }
    }
}

impl ReducedParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, reason: alloc::format!("{v} must be positive") })
            }
        };
        positive("series_tol", self.series_tol)?;
        positive("eig_tol", self.eig_tol)?;
        positive("pr_tol", self.pr_tol)?;
        if self.max_terms == 0 || self.eig_max_iters == 0 || self.batch_width == 0 || self.pr_max_iters == 0 {
            return Err(Error::InvalidParameter { name: "iteration caps", reason: "must be at least 1".into() });
        }
        Ok(())
    }
}

/// Component weights: sum of all entries of a component divided by `Nr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub wrr: f64,
    pub wpr: f64,
    pub wqr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSet {
    /// Graph node of each member, in member order.
    pub members: Vec<usize>,
    pub gr: DenseMatrix,
    pub grr: DenseMatrix,
    pub gpr: DenseMatrix,
    pub gqrd: DenseMatrix,
    pub gqrnd: DenseMatrix,
    /// Leading eigenvalue of `G_ss`; `None` when the scattering set is empty.
    pub lambda_c: Option<f64>,
    pub weights: Weights,
    pub pr_reduced: Vec<f64>,
    /// Largest number of series terms summed for any column.
    pub series_terms: usize,
    /// Largest geometric bound on the L1 mass of the dropped tail.
    pub truncation_error: f64,
    /// Largest column mass of each series term, over all columns.
    pub term_masses: Vec<f64>,
}

impl ReducedSet {
    pub fn nr(&self) -> usize {
        self.members.len()
    }

    pub fn gqr(&self) -> DenseMatrix {
        self.gqrd.add(&self.gqrnd)
    }

    /// `Grr + Gqrnd`, the direct plus hidden-link weights between members.
    pub fn friend_weights(&self) -> DenseMatrix {
        self.grr.add(&self.gqrnd)
    }

    /// Members by descending reduced PageRank, ties by ascending node id.
    pub fn local_ranking(&self) -> Vec<LocalRank> {
        rank_members(&self.pr_reduced, &self.members)
    }

    /// One-based local PageRank index per member.
    pub fn local_index(&self) -> Vec<usize> {
        let mut idx = vec![0; self.nr()];
        for l in self.local_ranking() {
            idx[l.member] = l.local_index;
        }
        idx
    }
}

fn split(gr: DenseMatrix, grr: DenseMatrix, gpr: DenseMatrix, gqr: &DenseMatrix) -> [DenseMatrix; 5] {
    [gr, grr, gpr, gqr.diagonal_part(), gqr.off_diagonal_part()]
}

fn weights_of(nr: usize, grr: &DenseMatrix, gpr: &DenseMatrix, gqrd: &DenseMatrix, gqrnd: &DenseMatrix) -> Weights {
    let nr = nr as f64;
    Weights { wrr: grr.sum() / nr, wpr: gpr.sum() / nr, wqr: (gqrd.sum() + gqrnd.sum()) / nr }
}

fn degenerate(op: &GoogleOperator<'_>, subset: &SubsetSpec, rp: &ReducedParams) -> Result<ReducedSet> {
    let nodes = subset.nodes();
    let nr = nodes.len();
    let columns: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&nj| {
            let col = op.column(nj);
            nodes.iter().map(|&ni| col[ni]).collect()
        })
        .collect();
    let gr = DenseMatrix::from_columns(nr, &columns);
    let pr = dense::stationary_power(&gr, None, rp.pr_tol, rp.pr_max_iters)?;
    let zero = DenseMatrix::zeros(nr, nr);
    Ok(ReducedSet {
        members: nodes,
        grr: gr.clone(),
        gr,
        gpr: zero.clone(),
        gqrd: zero.clone(),
        gqrnd: zero,
        lambda_c: None,
        // The only component is G itself.
        weights: Weights { wrr: 1.0, wpr: 0.0, wqr: 0.0 },
        pr_reduced: pr.p,
        series_terms: 0,
        truncation_error: 0.0,
        term_masses: Vec::new(),
    })
}

/// Leading eigenpair of `G_ss` by power iteration on the implicit operator.
/// Vectors are full length with zeros on the subset rows.
struct ScatteringEigen {
    lambda: f64,
    right: Vec<f64>,
    left: Vec<f64>,
}

fn l1_diff(a: &[f64], b: &[f64]) -> f64 {
    par::sum_by(a.len(), |i| (a[i] - b[i]).abs())
}

fn scattering_eigen(op: &GoogleOperator<'_>, in_r: &[bool], rp: &ReducedParams) -> Result<ScatteringEigen> {
    let n = in_r.len();
    let ns = in_r.iter().filter(|&&b| !b).count();
    let mask = |v: &mut [f64]| par::for_each_row(v, 1, |i, x| if in_r[i] { x[0] = 0.0 });

    let mut x: Vec<f64> = in_r.iter().map(|&r| if r { 0.0 } else { 1.0 / ns as f64 }).collect();
    let mut y = vec![0.0; n];
    let mut lambda = 0.0;
    let mut converged = false;
    let mut change = f64::INFINITY;
    let mut iters = 0;
    while iters < rp.eig_max_iters {
        iters += 1;
        op.apply(&x, &mut y);
        mask(&mut y);
        let l = par::sum_by(n, |i| y[i]);
        par::for_each_row(&mut y, 1, |_, e| e[0] /= l);
        change = l1_diff(&x, &y);
        core::mem::swap(&mut x, &mut y);
        let dl = (l - lambda).abs();
        lambda = l;
        if dl < rp.eig_tol && change < rp.eig_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::EigenStagnation { iterations: iters, lambda, change });
    }
    let right = x;

    let mut u: Vec<f64> = in_r.iter().map(|&r| if r { 0.0 } else { 1.0 }).collect();
    converged = false;
    iters = 0;
    while iters < rp.eig_max_iters {
        iters += 1;
        op.apply_transpose(&u, &mut y);
        mask(&mut y);
        let scale = par::sum_by(n, |i| y[i]) / ns as f64;
        par::for_each_row(&mut y, 1, |_, e| e[0] /= scale);
        change = l1_diff(&u, &y) / ns as f64;
        core::mem::swap(&mut u, &mut y);
        if change < rp.eig_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::EigenStagnation { iterations: iters, lambda, change });
    }
    let overlap = par::sum_by(n, |i| u[i] * right[i]);
    par::for_each_row(&mut u, 1, |_, e| e[0] /= overlap);
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::EigenStagnation { iterations: iters, lambda, change });
    }
    Ok(ScatteringEigen { lambda, right, left: u })
}

/// Per-column `psi_L . X[:, c]` for a row-major block.
fn left_dots(left: &[f64], x: &[f64], width: usize) -> Vec<f64> {
    let n = left.len();
    let chunks = n.div_ceil(par::SUM_CHUNK);
    let mut partials = vec![0.0; chunks * width];
    par::for_each_row(&mut partials, width, |c, acc| {
        let lo = c * par::SUM_CHUNK;
        let hi = (lo + par::SUM_CHUNK).min(n);
        for row in lo..hi {
            let l = left[row];
            if l != 0.0 {
                for (a, v) in acc.iter_mut().zip(&x[row * width..(row + 1) * width]) {
                    *a += l * v;
                }
            }
        }
    });
    let mut out = vec![0.0; width];
    for p in partials.chunks(width) {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    out
}

/// Applies `Q_c` to each column and zeroes the subset rows.
fn project(eig: &ScatteringEigen, in_r: &[bool], x: &mut [f64], width: usize) {
    let dots = left_dots(&eig.left, x, width);
    par::for_each_row(x, width, |row, xs| {
        if in_r[row] {
            xs.iter_mut().for_each(|e| *e = 0.0);
        } else {
            let r = eig.right[row];
            for (e, d) in xs.iter_mut().zip(&dots) {
                *e -= r * d;
            }
        }
    });
}

struct SeriesOutcome {
    gqr_columns: Vec<Vec<f64>>,
    terms: usize,
    tail: f64,
    term_masses: Vec<f64>,
}

fn hidden_series(
    op: &GoogleOperator<'_>,
    eig: &ScatteringEigen,
    in_r: &[bool],
    nodes: &[usize],
    rp: &ReducedParams,
) -> Result<SeriesOutcome> {
    let n = in_r.len();
    let nr = nodes.len();
    let mut gqr_columns = vec![Vec::new(); nr];
    let mut max_terms_used = 0;
    let mut max_tail: f64 = 0.0;
    let mut term_masses: Vec<f64> = Vec::new();

    for batch in (0..nr).collect::<Vec<_>>().chunks(rp.batch_width) {
        let w = batch.len();
        let mut x = vec![0.0; n * w];
        for (c, &m) in batch.iter().enumerate() {
            let col = op.column(nodes[m]);
            for (row, v) in col.into_iter().enumerate() {
                x[row * w + c] = v;
            }
        }
        project(eig, in_r, &mut x, w);
        let mut z = x.clone();
        let mut y = vec![0.0; n * w];
        let mut mass = par::column_sums(&x.iter().map(|v| v.abs()).collect::<Vec<_>>(), w, |_| true);
        record(&mut term_masses, 0, &mass);
        let mut active = vec![true; w];
        let mut terms = vec![1usize; w];
        let mut tails = vec![0.0f64; w];
        let mut l = 0;
        while active.iter().any(|&a| a) {
            l += 1;
            if l >= rp.max_terms {
                let (c, _) = active.iter().enumerate().find(|(_, &a)| a).expect("active column");
                return Err(Error::SeriesNotConverged {
                    terms: l,
                    series_tol: rp.series_tol,
                    last_term: mass[c],
                    radius: ratio(mass[c], tails[c]),
                });
            }
            op.apply_block(&x, w, &mut y);
            project(eig, in_r, &mut y, w);
            let abs: Vec<f64> = y.iter().map(|v| v.abs()).collect();
            let next_mass = par::column_sums(&abs, w, |_| true);
            record(&mut term_masses, l, &next_mass);
            for c in 0..w {
                if !active[c] {
                    continue;
                }
                if next_mass[c] < rp.series_tol {
                    active[c] = false;
                    let rho = (next_mass[c] / mass[c]).min(1.0 - 1e-6);
                    tails[c] = next_mass[c] / (1.0 - rho);
                } else {
                    terms[c] += 1;
                    // Reused as the previous-term mass for the radius estimate.
                    tails[c] = mass[c];
                }
            }
            let act = &active;
            par::for_each_row(&mut y, w, |_, ys| {
                for (c, e) in ys.iter_mut().enumerate() {
                    if !act[c] {
                        *e = 0.0;
                    }
                }
            });
            for (zv, yv) in z.iter_mut().zip(&y) {
                *zv += yv;
            }
            mass = next_mass;
            core::mem::swap(&mut x, &mut y);
        }
        op.apply_block(&z, w, &mut y);
        for (c, &m) in batch.iter().enumerate() {
            gqr_columns[m] = nodes.iter().map(|&ni| y[ni * w + c]).collect();
            max_terms_used = max_terms_used.max(terms[c]);
            max_tail = max_tail.max(tails[c]);
        }
    }
    Ok(SeriesOutcome { gqr_columns, terms: max_terms_used, tail: max_tail, term_masses })
}

fn ratio(mass: f64, previous: f64) -> f64 {
    if previous > 0.0 {
        mass / previous
    } else {
        f64::NAN
    }
}

fn record(masses: &mut Vec<f64>, term: usize, column_masses: &[f64]) {
    let m = column_masses.iter().copied().fold(0.0, f64::max);
    if masses.len() <= term {
        masses.resize(term + 1, 0.0);
    }
    masses[term] = masses[term].max(m);
}

/// Reduced Google matrix by the deflated series on the sparse operator.
pub fn compute_reduced(
    graph: &DirectedGraph,
    params: &GoogleParams,
    subset: &SubsetSpec,
    rp: &ReducedParams,
) -> Result<ReducedSet> {
    params.validate()?;
    rp.validate()?;
    check_subset(graph, subset)?;
    let op = GoogleOperator::new(graph, params.alpha);
    let n = graph.num_nodes();
    let nodes = subset.nodes();
    let nr = nodes.len();
    if nr == n {
        return degenerate(&op, subset, rp);
    }
    let mut in_r = vec![false; n];
    for &node in &nodes {
        in_r[node] = true;
    }

    let eig = scattering_eigen(&op, &in_r, rp)?;
    let mut tmp = vec![0.0; n];
    op.apply(&eig.right, &mut tmp);
    let into_r: Vec<f64> = nodes.iter().map(|&ni| tmp[ni]).collect();
    op.apply_transpose(&eig.left, &mut tmp);
    let from_r: Vec<f64> = nodes.iter().map(|&nj| tmp[nj]).collect();
    let denom = 1.0 - eig.lambda;
    let gpr = DenseMatrix::from_fn(nr, nr, |i, j| into_r[i] * from_r[j] / denom);

    let grr_cols: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&nj| {
            let col = op.column(nj);
            nodes.iter().map(|&ni| col[ni]).collect()
        })
        .collect();
    let grr = DenseMatrix::from_columns(nr, &grr_cols);

    let series = hidden_series(&op, &eig, &in_r, &nodes, rp)?;
    let gqr = DenseMatrix::from_columns(nr, &series.gqr_columns);
    let gr = grr.add(&gpr).add(&gqr);
    let [gr, grr, gpr, gqrd, gqrnd] = split(gr, grr, gpr, &gqr);
    let weights = weights_of(nr, &grr, &gpr, &gqrd, &gqrnd);
    let pr = dense::stationary_power(&gr, None, rp.pr_tol, rp.pr_max_iters)?;
    Ok(ReducedSet {
        members: nodes,
        gr,
        grr,
        gpr,
        gqrd,
        gqrnd,
        lambda_c: Some(eig.lambda),
        weights,
        pr_reduced: pr.p,
        series_terms: series.terms,
        truncation_error: series.tail,
        term_masses: series.term_masses,
    })
}

fn check_subset(graph: &DirectedGraph, subset: &SubsetSpec) -> Result<()> {
    for e in subset.entries() {
        if e.node >= graph.num_nodes() {
            return Err(Error::NodeOutOfRange { id: e.node, num_nodes: graph.num_nodes() });
        }
    }
    Ok(())
}

/// Dense reference computation: materializes `G`, inverts `1 - G_ss` by LU
/// and finds the scattering eigenpair by inverse iteration on the same
/// factorization.
pub fn dense_oracle_reduced(graph: &DirectedGraph, params: &GoogleParams, subset: &SubsetSpec) -> Result<ReducedSet> {
    params.validate()?;
    check_subset(graph, subset)?;
    let n = graph.num_nodes();
    if n > DENSE_CAP {
        return Err(Error::DenseCapExceeded { cap: DENSE_CAP, num_nodes: n });
    }
    let op = GoogleOperator::new(graph, params.alpha);
    let nodes = subset.nodes();
    let nr = nodes.len();
    let columns: Vec<Vec<f64>> = (0..n).map(|j| op.column(j)).collect();
    let g = DenseMatrix::from_columns(n, &columns);
    if nr == n {
        let gr = DenseMatrix::from_fn(nr, nr, |i, j| g[(nodes[i], nodes[j])]);
        let pr = dense::stationary_direct(&gr)?;
        let zero = DenseMatrix::zeros(nr, nr);
        return Ok(ReducedSet {
            members: nodes,
            grr: gr.clone(),
            gr,
            gpr: zero.clone(),
            gqrd: zero.clone(),
            gqrnd: zero,
            lambda_c: None,
            weights: Weights { wrr: 1.0, wpr: 0.0, wqr: 0.0 },
            pr_reduced: pr,
            series_terms: 0,
            truncation_error: 0.0,
            term_masses: Vec::new(),
        });
    }
    let mut in_r = vec![false; n];
    for &node in &nodes {
        in_r[node] = true;
    }
    let scat: Vec<usize> = (0..n).filter(|&v| !in_r[v]).collect();
    let ns = scat.len();
    let grr = DenseMatrix::from_fn(nr, nr, |i, j| g[(nodes[i], nodes[j])]);
    let grs = DenseMatrix::from_fn(nr, ns, |i, j| g[(nodes[i], scat[j])]);
    let gsr = DenseMatrix::from_fn(ns, nr, |i, j| g[(scat[i], nodes[j])]);
    let gss = DenseMatrix::from_fn(ns, ns, |i, j| g[(scat[i], scat[j])]);
    let a = DenseMatrix::identity(ns).sub(&gss);
    let lu = Lu::factor(&a)?;
    let mut x = gsr.clone();
    for j in 0..nr {
        lu.solve_in_place(x.col_mut(j));
    }
    let gr = grr.add(&grs.mul(&x));

    let right = inverse_iteration(&lu, ns);
    let lambda = gss.mul_vec(&right).iter().sum::<f64>() / right.iter().sum::<f64>();
    let lu_t = Lu::factor(&a.transpose())?;
    let mut left = inverse_iteration(&lu_t, ns);
    let overlap: f64 = left.iter().zip(&right).map(|(a, b)| a * b).sum();
    left.iter_mut().for_each(|v| *v /= overlap);
    let into_r = grs.mul_vec(&right);
    let from_r = gsr.transpose().mul_vec(&left);
    let gpr = DenseMatrix::from_fn(nr, nr, |i, j| into_r[i] * from_r[j] / (1.0 - lambda));
    let gqr = gr.sub(&grr).sub(&gpr);
    let [gr, grr, gpr, gqrd, gqrnd] = split(gr, grr, gpr, &gqr);
    let weights = weights_of(nr, &grr, &gpr, &gqrd, &gqrnd);
    let pr = dense::stationary_direct(&gr)?;
    Ok(ReducedSet {
        members: nodes,
        gr,
        grr,
        gpr,
        gqrd,
        gqrnd,
        lambda_c: Some(lambda),
        weights,
        pr_reduced: pr,
        series_terms: 0,
        truncation_error: 0.0,
        term_masses: Vec::new(),
    })
}

/// Inverse iteration with shift one: the Perron root of `G_ss` is the
/// eigenvalue closest to one, so repeated solves with `1 - G_ss` isolate it.
fn inverse_iteration(lu: &Lu, ns: usize) -> Vec<f64> {
    let mut v = vec![1.0 / ns as f64; ns];
    for _ in 0..500 {
        let mut w = lu.solve(&v);
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|e| *e /= s);
        let change: f64 = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        v = w;
        if change < 1e-16 {
            break;
        }
    }
    v
}
