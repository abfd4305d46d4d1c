//! Dense Bures metric for tiny systems.
//!
//! `rho(beta, h)` is built from the `2^N`-dimensional Hamiltonian, its
//! derivatives are taken by central differences, and the Hubner sum
//! `g_ab = 1/2 sum_{nm} <n|d_a rho|m><m|d_b rho|n> / (p_n + p_m)` is evaluated
//! in the eigenbasis of `rho`.
//!
//! All differences are taken in the eigenbasis `V` of the centre point: the
//! shifted Hamiltonian there is `Lambda + dh K` with `K = V^T (-2 S_z) V`, and
//! `rho` at the shifted point is rebuilt from the eigen-decomposition of that
//! small perturbation.

use crate::error::{Error, Result};
use crate::metric::MetricTensor2;
use crate::spectrum::dense_hamiltonian;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

pub const BURES_MAX_N: u32 = 8;

/// Default difference step for [`bures_dense`].
pub const BURES_DEFAULT_STEP: f64 = 2e-4;

/// Eigenvalues closer than this (relative to `max(1, |lambda|)`) form one cluster.
const CLUSTER_GAP: f64 = 1e-9;

/// Diagonal (eigenvalue) and off-diagonal (eigenvector) parts of the Bures metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricSplit {
    pub classical: MetricTensor2,
    pub nonclassical: MetricTensor2,
}

impl MetricSplit {
    pub fn total(&self) -> MetricTensor2 {
        self.classical.add(&self.nonclassical)
    }
}

/// Hubner sum for one state.
///
/// `p` are the eigenvalues of `rho`, `cluster[n]` labels degenerate groups,
/// and `d` holds `d_beta rho` and `d_h rho` in the eigenbasis. Pairs inside one
/// degenerate group are basis-dependent individually but their sum is not;
/// it is the eigenvalue (classical) contribution. Pairs across groups are the
/// eigenvector (non-classical) contribution.
pub fn hubner_metric(p: &[f64], cluster: &[usize], d: [&DMatrix<f64>; 2]) -> Result<MetricSplit> {
    let dim = p.len();
    if cluster.len() != dim || d.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
        return Err(Error::InvalidParams("hubner_metric: inconsistent dimensions".into()));
    }
    let mut cl = [0.0; 3];
    let mut nc = [0.0; 3];
    for n in 0..dim {
        for m in 0..dim {
            let w = 0.5 / (p[n] + p[m]);
            let (a, b) = (d[0][(n, m)], d[1][(n, m)]);
            let t = [a * a * w, a * b * w, b * b * w];
            let acc = if cluster[n] == cluster[m] { &mut cl } else { &mut nc };
            for k in 0..3 {
                acc[k] += t[k];
            }
        }
    }
    Ok(MetricSplit {
        classical: MetricTensor2::new(cl[0], cl[1], cl[2]),
        nonclassical: MetricTensor2::new(nc[0], nc[1], nc[2]),
    })
}

fn gibbs(lambda: &DVector<f64>, beta: f64) -> DVector<f64> {
    let lo = lambda.min();
    let w = lambda.map(|l| (-beta * (l - lo)).exp());
    let z = w.sum();
    w / z
}

/// Central difference with one Richardson level on matrix-valued functions.
fn richardson<F>(f: F, step: f64) -> DMatrix<f64>
where
    F: Fn(f64) -> DMatrix<f64>,
{
    let d = |s: f64| (f(s) - f(-s)) / (2.0 * s);
    let coarse = d(step);
    let fine = d(step / 2.0);
    (fine * 4.0 - coarse) / 3.0
}

/// Bures metric of the dense thermal state, split into classical and
/// non-classical parts.
pub fn bures_dense(n: u32, beta: f64, h: f64, step: f64) -> Result<MetricSplit> {
    if n > BURES_MAX_N {
        return Err(Error::Resource(format!("dense Bures metric limited to N <= {BURES_MAX_N}, got {n}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParams(format!("beta must be positive and finite, got {beta}")));
    }
    if !(step > 0.0 && step.is_finite()) || beta - step <= 0.0 {
        return Err(Error::Domain(format!("difference step {step} invalid for beta = {beta}")));
    }
    let ham = dense_hamiltonian(n, h)?;
    let dim = ham.nrows();
    let eig = SymmetricEigen::new(ham);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lambda = DVector::from_iterator(dim, order.iter().map(|&i| eig.eigenvalues[i]));
    let v = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);

    let mut cluster = vec![0usize; dim];
    for i in 1..dim {
        let gap = lambda[i] - lambda[i - 1];
        cluster[i] = cluster[i - 1] + usize::from(gap > CLUSTER_GAP * lambda[i].abs().max(1.0));
    }

    // -2 S_z is diagonal in the product basis: entry -(2 * ups - N)
    let sz2 = DVector::from_fn(dim, |b, _| -(2.0 * f64::from((b as u32).count_ones()) - f64::from(n)));
    let k = v.transpose() * DMatrix::from_diagonal(&sz2) * &v;
    let k = (&k + k.transpose()) * 0.5;

    let p = gibbs(&lambda, beta);

    let d_beta = richardson(|s| DMatrix::from_diagonal(&gibbs(&lambda, beta + s)), step);
    let d_h = richardson(
        |s| {
            let shifted = DMatrix::from_diagonal(&lambda) + &k * s;
            let e = SymmetricEigen::new(shifted);
            let q = gibbs(&e.eigenvalues, beta);
            &e.eigenvectors * DMatrix::from_diagonal(&q) * e.eigenvectors.transpose()
        },
        step,
    );

    hubner_metric(p.as_slice(), &cluster, [&d_beta, &d_h])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::metric_fluctuations;
    use crate::spectrum::ModelParams;

    #[test]
    fn two_spin_matches_fluctuations() {
        let s = bures_dense(2, 1.0, 0.0, BURES_DEFAULT_STEP).unwrap();
        let f = metric_fluctuations(ModelParams::new(2, 1.0, 0.0).unwrap()).unwrap();
        assert!(s.classical.rel_diff(&f, 1.0) < 1e-7, "{s:?} vs {f:?}");
        assert!(s.nonclassical.scale() < 1e-8);
    }

    #[test]
    fn diagonal_family_is_purely_classical() {
        // rho(a, b) = diag(p(a, b)) in a fixed basis: a softmax over three levels
        let e = [0.0, 1.0, 2.5];
        let probs = |a: f64, b: f64| {
            let w: Vec<f64> = e.iter().enumerate().map(|(i, &x)| (-a * x + b * i as f64).exp()).collect();
            let z: f64 = w.iter().sum();
            DVector::from_iterator(3, w.into_iter().map(|x| x / z))
        };
        let p = probs(1.0, 0.2);
        let da = richardson(|s| DMatrix::from_diagonal(&probs(1.0 + s, 0.2)), 1e-3);
        let db = richardson(|s| DMatrix::from_diagonal(&probs(1.0, 0.2 + s)), 1e-3);
        let split = hubner_metric(p.as_slice(), &[0, 1, 2], [&da, &db]).unwrap();
        assert_eq!(split.nonclassical, MetricTensor2::new(0.0, 0.0, 0.0));
        assert_eq!(split.total(), split.classical);
        // Fisher information of a softmax: covariance of the sufficient statistics, over 4
        let mean = |f: &dyn Fn(usize) -> f64| (0..3).map(|i| p[i] * f(i)).sum::<f64>();
        let me = mean(&|i| e[i]);
        let mi = mean(&|i| i as f64);
        let var_e = mean(&|i| (e[i] - me).powi(2));
        assert!((split.classical.g_bb - var_e / 4.0).abs() < 1e-10);
        let cov = mean(&|i| (e[i] - me) * (i as f64 - mi));
        assert!((split.classical.g_bh + cov / 4.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(bures_dense(10, 1.0, 0.0, 1e-4), Err(Error::Resource(_))));
        assert!(bures_dense(4, 1.0, 0.0, 0.0).is_err());
        assert!(bures_dense(4, 1e-5, 0.0, 1e-4).is_err());
        assert!(hubner_metric(&[1.0], &[0, 0], [&DMatrix::zeros(1, 1), &DMatrix::zeros(1, 1)]).is_err());
    }
}
