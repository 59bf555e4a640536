//! Central finite differences over coordinate vectors.
//!
//! Step sizes scale as `base * (1 + ‖x‖)`.

use nalgebra::DMatrix;

use crate::error::Result;

/// Base step for first derivatives of chart maps.
pub const FIRST_ORDER_STEP: f64 = 1e-5;

/// Base step for derivatives of metric matrices, Christoffel symbols and
/// second derivatives of scalar potentials.
pub const SECOND_ORDER_STEP: f64 = 1e-4;

pub fn step(base: f64, x: &[f64]) -> f64 {
    base * (1.0 + x.iter().map(|v| v * v).sum::<f64>().sqrt())
}

fn shifted(x: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[i] += h;
    y
}

fn shifted2(x: &[f64], i: usize, hi: f64, j: usize, hj: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[i] += hi;
    y[j] += hj;
    y
}

/// `∂f/∂x_i` for every `i`.
pub fn gradient<F>(f: F, x: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    (0..x.len())
        .map(|i| Ok((f(&shifted(x, i, h))? - f(&shifted(x, i, -h))?) / (2.0 * h)))
        .collect()
}

/// Symmetric central-difference Hessian.
pub fn hessian<F>(f: F, x: &[f64], h: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let n = x.len();
    let f0 = f(x)?;
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        let fp = f(&shifted(x, i, h))?;
        let fm = f(&shifted(x, i, -h))?;
        out[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let v = (f(&shifted2(x, i, h, j, h))? - f(&shifted2(x, i, h, j, -h))?
                - f(&shifted2(x, i, -h, j, h))?
                + f(&shifted2(x, i, -h, j, -h))?)
                / (4.0 * h * h);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

/// `J_ij = ∂f_i/∂x_j`.
pub fn jacobian<F>(f: F, x: &[f64], h: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let fp = f(&shifted(x, j, h))?;
        let fm = f(&shifted(x, j, -h))?;
        cols.push(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>());
    }
    let m = cols.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(m, n, |i, j| cols[j][i]))
}

/// Central difference of a vector-valued map along one coordinate.
pub fn partial<T, U, F>(f: F, x: &[f64], i: usize, h: f64, combine: impl Fn(T, T, f64) -> U) -> Result<U>
where
    F: Fn(&[f64]) -> Result<T>,
{
    let fp = f(&shifted(x, i, h))?;
    let fm = f(&shifted(x, i, -h))?;
    Ok(combine(fp, fm, 2.0 * h))
}
