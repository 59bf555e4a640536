//! The exponential (`α = +1`) and mixture (`α = −1`) connections, their
//! convex mixtures, closed-form parallel transports, Christoffel symbols and a
//! finite-difference curvature check.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fd;
use crate::hermitian::HermitianMatrix;
use crate::manifold::{Chart, ChartPoint, DensityMatrix, Rep, TangentVector};
use crate::metrics::{metric_matrix_at, MetricKernel, OperatorMonotoneFunction};

/// Step used when differentiating Christoffel symbols.
pub const CURVATURE_STEP: f64 = 1e-4;

/// `∇^(α) = (1+α)/2 ∇^(1) + (1−α)/2 ∇^(−1)`, `α ∈ [−1, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Connection {
    alpha: f64,
}

impl Connection {
    pub const EXPONENTIAL: Connection = Connection { alpha: 1.0 };
    pub const MIXTURE: Connection = Connection { alpha: -1.0 };

    pub fn new(alpha: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} outside [-1, 1]")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// `∇_{∂_i} ∂_j` at a chart point.
///
/// `α = +1` returns the plus-representation payload
/// `∂_i∂_j log ρ − Tr(ρ ∂_i∂_j log ρ)`; `α = −1` returns the minus-representation
/// payload `∂_i∂_j ρ`; interior `α` mixes the two in the minus representation.
pub fn covariant_derivative(conn: Connection, chart: &dyn Chart, at: &ChartPoint, i: usize, j: usize) -> TangentVector {
    let rho = at.state();
    let exponential = || {
        let l = chart.log_second_derivative(at, i, j);
        let payload = l.shift(-rho.matrix().trace_product(&l));
        TangentVector::from_parts_unchecked(rho.clone(), Rep::Plus, payload)
    };
    let mixture = || {
        let payload = chart.state_second_derivative(at, i, j);
        TangentVector::from_parts_unchecked(rho.clone(), Rep::Minus, payload)
    };
    let alpha = conn.alpha();
    if alpha == 1.0 {
        exponential()
    } else if alpha == -1.0 {
        mixture()
    } else {
        let e = exponential().minus_payload().scale(0.5 * (1.0 + alpha));
        let m = mixture().into_payload().scale(0.5 * (1.0 - alpha));
        TangentVector::from_parts_unchecked(rho.clone(), Rep::Minus, &e + &m)
    }
}

/// Closed-form parallel transport of `v` (based at `ρ₀`) to `rho1`.
///
/// `α = +1`: `A ↦ A − Tr(ρ₁ A)·1` on plus payloads. `α = −1`: minus payloads
/// are unchanged. Both are path independent.
pub fn parallel_transport(conn: Connection, rho1: &DensityMatrix, v: &TangentVector) -> Result<TangentVector> {
    if rho1.dim() != v.base().dim() {
        return Err(Error::DimensionMismatch {
            expected: v.base().dim(),
            got: rho1.dim(),
        });
    }
    match conn.alpha() {
        a if a == 1.0 => {
            let score = v.plus_payload();
            let shifted = score.shift(-rho1.matrix().trace_product(&score));
            Ok(TangentVector::from_parts_unchecked(rho1.clone(), Rep::Plus, shifted))
        }
        a if a == -1.0 => Ok(TangentVector::from_parts_unchecked(
            rho1.clone(),
            Rep::Minus,
            v.minus_payload(),
        )),
        a => Err(Error::UnsupportedTransport(a)),
    }
}

/// `Γ^k_ij` at one chart point, stored as `[k][i][j]`.
#[derive(Clone, Debug)]
pub struct ChristoffelField {
    coords: Vec<f64>,
    n: usize,
    values: Vec<f64>,
}

impl ChristoffelField {
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.values[(k * self.n + i) * self.n + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |Γ^k_ij − Γ^k_ji|`.
    pub fn torsion(&self) -> f64 {
        let n = self.n;
        let mut t = 0.0_f64;
        for k in 0..n {
            for i in 0..n {
                for j in 0..i {
                    t = t.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        t
    }
}

/// `Γ^k_ij = Σ_l g^{kl} g(∇_{∂_i}∂_j, ∂_l)` using the `f`-metric. The result does
/// not depend on `f`.
pub fn christoffels(
    conn: Connection,
    chart: &dyn Chart,
    f: &OperatorMonotoneFunction,
    coords: &[f64],
) -> Result<ChristoffelField> {
    let at = chart.point(coords)?;
    christoffels_at(conn, chart, f, &at)
}

pub fn christoffels_at(
    conn: Connection,
    chart: &dyn Chart,
    f: &OperatorMonotoneFunction,
    at: &ChartPoint,
) -> Result<ChristoffelField> {
    let n = chart.len();
    let g = metric_matrix_at(f, chart, at)?.entries;
    let g_inv = g
        .try_inverse()
        .ok_or_else(|| Error::NumericalDegeneracy("singular metric matrix".into()))?;
    let kernel = MetricKernel::new(f, at.state());
    let lowered_targets: Vec<HermitianMatrix> = chart
        .coordinate_vectors_minus(at)
        .iter()
        .map(|v| kernel.apply(v.payload()))
        .collect();

    let mut values = vec![0.0; n * n * n];
    for i in 0..n {
        for j in i..n {
            let nabla = covariant_derivative(conn, chart, at, i, j).minus_payload();
            let lowered = DMatrix::from_fn(n, 1, |l, _| nabla.trace_product(&lowered_targets[l]));
            let raised = &g_inv * lowered;
            for k in 0..n {
                values[(k * n + i) * n + j] = raised[k];
                values[(k * n + j) * n + i] = raised[k];
            }
        }
    }
    Ok(ChristoffelField {
        coords: at.coords().to_vec(),
        n,
        values,
    })
}

/// Largest entry of the curvature tensor
/// `R^l_kij = ∂_iΓ^l_jk − ∂_jΓ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik`
/// over `grid`, with `∂Γ` by central differences. Christoffels use the BKM
/// metric to lower and raise indices.
pub fn flatness_residual(conn: Connection, chart: &dyn Chart, grid: &[Vec<f64>]) -> Result<f64> {
    let f = OperatorMonotoneFunction::bkm();
    let per_point: Result<Vec<f64>> = grid
        .par_iter()
        .map(|x| curvature_max(conn, chart, &f, x))
        .collect();
    Ok(per_point?.into_iter().fold(0.0, f64::max))
}

fn curvature_max(conn: Connection, chart: &dyn Chart, f: &OperatorMonotoneFunction, x: &[f64]) -> Result<f64> {
    let n = chart.len();
    let h = CURVATURE_STEP;
    let gamma = christoffels(conn, chart, f, x)?;
    let dgamma: Vec<Vec<f64>> = (0..n)
        .map(|m| {
            fd::partial(
                |y| christoffels(conn, chart, f, y),
                x,
                m,
                h,
                |p, q, w| p.values.iter().zip(&q.values).map(|(a, b)| (a - b) / w).collect::<Vec<f64>>(),
            )
        })
        .collect::<Result<_>>()?;
    let d = |m: usize, l: usize, a: usize, b: usize| dgamma[m][(l * n + a) * n + b];

    let mut worst = 0.0_f64;
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..i {
                    let mut r = d(i, l, j, k) - d(j, l, i, k);
                    for m in 0..n {
                        r += gamma.get(l, i, m) * gamma.get(m, j, k) - gamma.get(l, j, m) * gamma.get(m, i, k);
                    }
                    worst = worst.max(r.abs());
                }
            }
        }
    }
    Ok(worst)
}
