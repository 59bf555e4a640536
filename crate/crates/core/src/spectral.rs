//! Divided differences and Fréchet derivatives of matrix functions.
//!
//! For a Hermitian `H = U diag(λ) U†` and a smooth scalar `f`, the first and
//! second derivatives of `f(H)` act in the eigenbasis as
//!
//! ```text
//! [Df(H)[A]]_ab       = f[λa, λb] A_ab
//! [D²f(H)[A, B]]_ab   = Σ_c f[λa, λc, λb] (A_ac B_cb + B_ac A_cb)
//! ```
//!
//! where `f[..]` are divided differences. Near-coincident arguments switch to a
//! Taylor expansion about the mean, which avoids cancellation.

use nalgebra::DMatrix;

use crate::hermitian::{HermitianMatrix, Spectrum, C64};

/// Relative gap below which divided differences use the Taylor branch.
const TAYLOR_GAP: f64 = 1e-4;

/// Scalar functions with closed-form derivatives up to fifth order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarFn {
    Log,
    Exp,
}

impl ScalarFn {
    pub fn eval(self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    pub fn derivative(self, order: u32, x: f64) -> f64 {
        match self {
            ScalarFn::Exp => x.exp(),
            ScalarFn::Log => {
                if order == 0 {
                    return x.ln();
                }
                // (-1)^(k-1) (k-1)! / x^k
                let k = order as i32;
                let fact: f64 = (1..k).map(f64::from).product();
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * fact / x.powi(k)
            }
        }
    }

    fn gap_scale(self, x: f64) -> f64 {
        match self {
            ScalarFn::Log => x.abs(),
            ScalarFn::Exp => 1.0,
        }
    }
}

/// First divided difference `f[x, y]`.
pub fn divided_difference(f: ScalarFn, x: f64, y: f64) -> f64 {
    let h = x - y;
    let m = 0.5 * (x + y);
    if h.abs() <= TAYLOR_GAP * f.gap_scale(m) {
        let h2 = h * h;
        f.derivative(1, m) + f.derivative(3, m) * h2 / 24.0 + f.derivative(5, m) * h2 * h2 / 1920.0
    } else {
        (f.eval(x) - f.eval(y)) / h
    }
}

/// Second divided difference `f[x, y, z]` (symmetric in its arguments).
pub fn second_divided_difference(f: ScalarFn, x: f64, y: f64, z: f64) -> f64 {
    let mut v = [x, y, z];
    v.sort_by(f64::total_cmp);
    let [lo, mid, hi] = v;
    let m = (lo + mid + hi) / 3.0;
    if hi - lo <= TAYLOR_GAP * f.gap_scale(m) {
        let d = [lo - m, mid - m, hi - m];
        let p2: f64 = d.iter().map(|t| t * t).sum();
        let p3: f64 = d.iter().map(|t| t * t * t).sum();
        f.derivative(2, m) / 2.0 + f.derivative(4, m) * p2 / 48.0 + f.derivative(5, m) * p3 / 360.0
    } else {
        (divided_difference(f, lo, mid) - divided_difference(f, mid, hi)) / (lo - hi)
    }
}

/// First divided-difference table `f[λa, λb]` over a spectrum.
pub fn divided_difference_table(f: ScalarFn, spec: &Spectrum) -> DMatrix<f64> {
    let n = spec.dim();
    DMatrix::from_fn(n, n, |a, b| divided_difference(f, spec.values[a], spec.values[b]))
}

/// Fréchet derivative `Df(H)[A]`, with `H` given by its spectrum.
pub fn frechet_first(f: ScalarFn, spec: &Spectrum, a: &HermitianMatrix) -> HermitianMatrix {
    let table = divided_difference_table(f, spec);
    spec.schur_apply(a, |i, j| table[(i, j)])
}

/// Second Fréchet derivative `D²f(H)[A, B]`.
pub fn frechet_second(
    f: ScalarFn,
    spec: &Spectrum,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> HermitianMatrix {
    let n = spec.dim();
    let at = spec.to_eigenbasis(a);
    let bt = spec.to_eigenbasis(b);
    let mut out = DMatrix::<C64>::zeros(n, n);
    for p in 0..n {
        for q in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..n {
                let w = second_divided_difference(f, spec.values[p], spec.values[c], spec.values[q]);
                acc += (at[(p, c)] * bt[(c, q)] + bt[(p, c)] * at[(c, q)]) * w;
            }
            out[(p, q)] = acc;
        }
    }
    spec.from_eigenbasis(&out)
}
