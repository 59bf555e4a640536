//! Duality diagnostics for the exponential and mixture connections.
//!
//! Two connections `∇`, `∇*` are dual for `g` when
//! `∂_i g_jk = g(∇_{∂_i}∂_j, ∂_k) + g(∂_j, ∇*_{∂_i}∂_k)` for every coordinate
//! triple. This module measures that residual for a family of monotone
//! metrics, together with the Legendre structure of the free energy
//! `Ψ̃(θ) = log Tr exp(Σ θ^i X_i)` whose Hessian is the BKM metric.
//!
//! Among monotone metrics only multiples of BKM make the residual vanish; the
//! [`uniqueness_scan`] reproduces this on a finite family of functions. It
//! cannot certify the statement over *all* operator monotone functions.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::connections::{covariant_derivative, parallel_transport, Connection};
use crate::error::{Error, Result};
use crate::fd;
use crate::hermitian::HermitianMatrix;
use crate::manifold::{Chart, ExpChart, MixtureChart, TangentVector};
use crate::metrics::{metric_matrix_at, metric_matrix_in_chart, monotone_metric, MetricKernel, OperatorMonotoneFunction};
use crate::sample::{random_coords, rng_for};

/// Radius of the coordinate ball used for sampled chart points.
pub const SAMPLE_RADIUS: f64 = 1.5;

/// Iteration cap for the Legendre inversion.
pub const NEWTON_MAX_ITER: usize = 100;

/// Stopping tolerance on `‖∇Ψ̃(θ) − η‖`.
pub const NEWTON_TOL: f64 = 1e-13;

/// `|∂_i g_jk − g(∇^(1)_i ∂_j, ∂_k) − g(∂_j, ∇^(−1)_i ∂_k)|` for all triples at
/// one point, indexed `[i][j][k]`.
#[derive(Clone, Debug)]
pub struct DualityTensor {
    n: usize,
    values: Vec<f64>,
}

impl DualityTensor {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[(i * self.n + j) * self.n + k]
    }

    /// Largest residual and its `(i, j, k)`.
    pub fn max(&self) -> (f64, [usize; 3]) {
        let n = self.n;
        let (idx, v) = self
            .values
            .iter()
            .enumerate()
            .fold((0, 0.0_f64), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
        (v, [idx / (n * n), (idx / n) % n, idx % n])
    }
}

pub fn duality_residuals(f: &OperatorMonotoneFunction, chart: &dyn Chart, coords: &[f64]) -> Result<DualityTensor> {
    let n = chart.len();
    let at = chart.point(coords)?;
    let h = fd::step(fd::SECOND_ORDER_STEP, coords);
    let dg: Vec<DMatrix<f64>> = (0..n)
        .map(|i| {
            fd::partial(
                |x| metric_matrix_in_chart(f, chart, x).map(|m| m.entries),
                coords,
                i,
                h,
                |p, q, w| (p - q) / w,
            )
        })
        .collect::<Result<_>>()?;

    let kernel = MetricKernel::new(f, at.state());
    let basis: Vec<HermitianMatrix> = chart
        .coordinate_vectors_minus(&at)
        .into_iter()
        .map(TangentVector::into_payload)
        .collect();
    let k_basis: Vec<HermitianMatrix> = basis.iter().map(|b| kernel.apply(b)).collect();

    let mut exp_terms = vec![HermitianMatrix::zeros(0); n * n];
    let mut mix_terms = vec![HermitianMatrix::zeros(0); n * n];
    for i in 0..n {
        for j in 0..n {
            exp_terms[i * n + j] = covariant_derivative(Connection::EXPONENTIAL, chart, &at, i, j).minus_payload();
            mix_terms[i * n + j] = covariant_derivative(Connection::MIXTURE, chart, &at, i, j).minus_payload();
        }
    }

    let mut values = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let lhs = dg[i][(j, k)];
                let first = exp_terms[i * n + j].trace_product(&k_basis[k]);
                let second = k_basis[j].trace_product(&mix_terms[i * n + k]);
                values[(i * n + j) * n + k] = (lhs - first - second).abs();
            }
        }
    }
    Ok(DualityTensor { n, values })
}

/// Residual of the duality identity for one coordinate triple.
pub fn duality_residual(
    f: &OperatorMonotoneFunction,
    chart: &dyn Chart,
    coords: &[f64],
    i: usize,
    j: usize,
    k: usize,
) -> Result<f64> {
    Ok(duality_residuals(f, chart, coords)?.get(i, j, k))
}

/// `|g_ρ₀(Y, Z) − g_ρ₁(τ^(1) Y, τ^(−1) Z)|`.
pub fn transport_pairing_residual(
    f: &OperatorMonotoneFunction,
    rho1: &crate::manifold::DensityMatrix,
    y: &TangentVector,
    z: &TangentVector,
) -> Result<f64> {
    let before = monotone_metric(f, y, z)?;
    let ty = parallel_transport(Connection::EXPONENTIAL, rho1, y)?;
    let tz = parallel_transport(Connection::MIXTURE, rho1, z)?;
    let after = monotone_metric(f, &ty, &tz)?;
    Ok((before - after).abs())
}

/// `Ψ̃(θ)`.
pub fn potential_psi(chart: &ExpChart, theta: &[f64]) -> Result<f64> {
    chart.psi(theta)
}

/// Dual coordinates `η_i = Tr(ρ(θ) X_i)`.
pub fn dual_coords(chart: &ExpChart, theta: &[f64]) -> Result<Vec<f64>> {
    let rho = chart.state(theta)?;
    Ok(chart.basis().project(rho.matrix()))
}

/// A point expressed in both affine coordinate systems with both potentials.
#[derive(Clone, Debug, Serialize)]
pub struct PotentialPair {
    pub theta: Vec<f64>,
    pub eta: Vec<f64>,
    pub psi: f64,
    pub phi: f64,
    /// `θ·η`
    pub pairing: f64,
    pub newton_residual: f64,
    pub iterations: usize,
}

impl PotentialPair {
    /// `|Ψ + Φ − θ·η|`.
    pub fn legendre_residual(&self) -> f64 {
        (self.psi + self.phi - self.pairing).abs()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Inverts `η = ∇Ψ̃(θ)` by damped Newton from `θ = 0` and returns the
/// Legendre-dual potential `Φ(η) = θ·η − Ψ̃(θ)`.
pub fn potential_phi(chart: &ExpChart, eta: &[f64]) -> Result<PotentialPair> {
    let n = chart.len();
    if eta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: eta.len(),
        });
    }
    // admissibility: the preimage exists iff 1/N + Σ η X is in the manifold
    MixtureChart::new(chart.basis().clone()).state(eta)?;

    let bkm = OperatorMonotoneFunction::bkm();
    let residual_at = |theta: &[f64]| -> Result<Vec<f64>> {
        Ok(dual_coords(chart, theta)?
            .iter()
            .zip(eta)
            .map(|(a, b)| a - b)
            .collect())
    };

    let mut theta = vec![0.0; n];
    let mut r = residual_at(&theta)?;
    let mut iterations = 0;
    while norm(&r) > NEWTON_TOL {
        if iterations == NEWTON_MAX_ITER {
            return Err(Error::InversionFailure {
                iterations,
                residual: norm(&r),
            });
        }
        iterations += 1;
        let jac = metric_matrix_in_chart(&bkm, chart, &theta)?.entries;
        let step = jac
            .lu()
            .solve(&DVector::from_column_slice(&r))
            .ok_or_else(|| Error::NumericalDegeneracy("singular BKM Jacobian".into()))?;
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t - scale * s).collect();
            if let Ok(r_trial) = residual_at(&trial) {
                if norm(&r_trial) < norm(&r) {
                    theta = trial;
                    r = r_trial;
                    accepted = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !accepted {
            // no decrease possible at double precision
            if norm(&r) < 1e3 * NEWTON_TOL {
                break;
            }
            return Err(Error::InversionFailure {
                iterations,
                residual: norm(&r),
            });
        }
    }
    let psi = chart.psi(&theta)?;
    let pairing: f64 = theta.iter().zip(eta).map(|(a, b)| a * b).sum();
    Ok(PotentialPair {
        theta,
        eta: eta.to_vec(),
        psi,
        phi: pairing - psi,
        pairing,
        newton_residual: norm(&r),
        iterations,
    })
}

/// `max |FD-Hessian(Ψ̃) − G^BKM|` entrywise.
pub fn hessian_check(chart: &ExpChart, theta: &[f64]) -> Result<f64> {
    let h = fd::step(fd::SECOND_ORDER_STEP, theta);
    let hess = fd::hessian(|x| chart.psi(x), theta, h)?;
    let g = metric_matrix_in_chart(&OperatorMonotoneFunction::bkm(), chart, theta)?.entries;
    Ok((hess - g).abs().max())
}

/// `max |∂Ψ̃/∂θ^i (FD) − η_i|`.
pub fn gradient_check(chart: &ExpChart, theta: &[f64]) -> Result<f64> {
    let h = fd::step(fd::FIRST_ORDER_STEP, theta);
    let grad = fd::gradient(|x| chart.psi(x), theta, h)?;
    let eta = dual_coords(chart, theta)?;
    Ok(grad.iter().zip(&eta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// `max |G_f · (∂η/∂θ)^{-1} − I|`, with `∂η/∂θ` by finite differences.
/// Vanishes when `θ` and `η` are dual coordinates for the `f`-metric.
pub fn biorthogonality_check(f: &OperatorMonotoneFunction, chart: &ExpChart, theta: &[f64]) -> Result<f64> {
    let h = fd::step(fd::FIRST_ORDER_STEP, theta);
    let jac = fd::jacobian(|x| dual_coords(chart, x), theta, h)?;
    let inv = jac
        .try_inverse()
        .ok_or_else(|| Error::NumericalDegeneracy("singular ∂η/∂θ".into()))?;
    let g = metric_matrix_in_chart(f, chart, theta)?.entries;
    let n = g.nrows();
    Ok((g * inv - DMatrix::<f64>::identity(n, n)).abs().max())
}

/// Per-point `M(θ) = G_f(θ) G_BKM(θ)^{-1}` and how far it is from constant.
#[derive(Clone, Debug)]
pub struct AffineRelationFit {
    pub per_point: Vec<DMatrix<f64>>,
    pub mean: DMatrix<f64>,
    /// `max_θ ‖M(θ) − M̄‖_F / ‖M̄‖_F`
    pub constancy_score: f64,
}

impl AffineRelationFit {
    /// `Tr(M̄)/n`; the scalar when `M̄` is a multiple of the identity.
    pub fn scalar(&self) -> f64 {
        self.mean.trace() / self.mean.nrows() as f64
    }

    /// `max_{i≠j} |M̄_ij|`.
    pub fn off_diagonal_max(&self) -> f64 {
        let n = self.mean.nrows();
        let mut m = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.mean[(i, j)].abs());
                }
            }
        }
        m
    }

    /// `max_i |M̄_ii − scalar|`.
    pub fn diagonal_spread(&self) -> f64 {
        let c = self.scalar();
        self.mean.diagonal().iter().map(|d| (d - c).abs()).fold(0.0, f64::max)
    }
}

pub fn affine_relation_fit(
    f: &OperatorMonotoneFunction,
    chart: &dyn Chart,
    samples: &[Vec<f64>],
) -> Result<AffineRelationFit> {
    if samples.len() < 2 {
        return Err(Error::InvalidParameter("affine relation fit needs at least 2 points".into()));
    }
    let bkm = OperatorMonotoneFunction::bkm();
    let per_point: Vec<DMatrix<f64>> = samples
        .par_iter()
        .map(|x| {
            let at = chart.point(x)?;
            let g = metric_matrix_at(f, chart, &at)?.entries;
            let gb = metric_matrix_at(&bkm, chart, &at)?.entries;
            let gb_inv = gb
                .try_inverse()
                .ok_or_else(|| Error::NumericalDegeneracy("singular BKM metric matrix".into()))?;
            Ok(g * gb_inv)
        })
        .collect::<Result<_>>()?;
    let n = per_point[0].nrows();
    let mean = per_point.iter().fold(DMatrix::zeros(n, n), |acc, m| acc + m) / per_point.len() as f64;
    let denom = mean.norm();
    let constancy_score = per_point
        .iter()
        .map(|m| (m - &mean).norm() / denom)
        .fold(0.0, f64::max);
    Ok(AffineRelationFit {
        per_point,
        mean,
        constancy_score,
    })
}

/// Location of the largest duality residual in a scan.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DualityWitness {
    pub sample: usize,
    pub coords: Vec<f64>,
    pub triple: [usize; 3],
    pub residual: f64,
}

/// Scan outcome for one function.
#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub f: String,
    pub n_samples: usize,
    pub per_point_max: Vec<f64>,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub constancy_score: f64,
    pub fitted_scale: f64,
    pub fitted_off_diagonal: f64,
    pub fitted_diagonal_spread: f64,
    pub witness: DualityWitness,
}

/// Seeded chart points in the ball of radius [`SAMPLE_RADIUS`].
pub fn sample_points(chart: &dyn Chart, count: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| random_coords(&mut rng_for(seed, i as u64), chart.len(), SAMPLE_RADIUS))
        .collect()
}

/// Duality residual and affine-relation fit for each `f` in `family`, sorted
/// by increasing maximal residual.
pub fn uniqueness_scan(
    family: &[OperatorMonotoneFunction],
    chart: &dyn Chart,
    samples: usize,
    seed: u64,
) -> Result<Vec<DualityReport>> {
    if family.is_empty() {
        return Err(Error::InvalidParameter("empty function family".into()));
    }
    let points = sample_points(chart, samples, seed);
    let mut reports = family
        .iter()
        .map(|f| scan_one(f, chart, &points))
        .collect::<Result<Vec<_>>>()?;
    reports.sort_by(|a, b| a.max_residual.total_cmp(&b.max_residual));
    Ok(reports)
}

fn scan_one(f: &OperatorMonotoneFunction, chart: &dyn Chart, points: &[Vec<f64>]) -> Result<DualityReport> {
    let tensors: Vec<(f64, [usize; 3])> = points
        .par_iter()
        .map(|x| duality_residuals(f, chart, x).map(|t| t.max()))
        .collect::<Result<_>>()?;
    let per_point_max: Vec<f64> = tensors.iter().map(|t| t.0).collect();
    let (sample, &(residual, triple)) = tensors
        .iter()
        .enumerate()
        .fold((0, &tensors[0]), |best, (i, t)| if t.0 > best.1 .0 { (i, t) } else { best });
    let fit = affine_relation_fit(f, chart, points)?;
    Ok(DualityReport {
        f: f.name().to_owned(),
        n_samples: points.len(),
        max_residual: residual,
        mean_residual: per_point_max.iter().sum::<f64>() / per_point_max.len() as f64,
        per_point_max,
        constancy_score: fit.constancy_score,
        fitted_scale: fit.scalar(),
        fitted_off_diagonal: fit.off_diagonal_max(),
        fitted_diagonal_spread: fit.diagonal_spread(),
        witness: DualityWitness {
            sample,
            coords: points[sample].clone(),
            triple,
            residual,
        },
    })
}
