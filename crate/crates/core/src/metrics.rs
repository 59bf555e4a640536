//! Monotone Riemannian metrics generated by symmetric operator monotone
//! functions, and the BKM metric in its three equivalent forms.
//!
//! A function `f` on `(0, ∞)` with `f(t) = t f(1/t)` defines the kernel
//! `K_ρ = (R_ρ^{1/2} f(L_ρ R_ρ^{-1}) R_ρ^{1/2})^{-1}`, where `L_ρ X = ρX` and
//! `R_ρ X = Xρ`. Since `L_ρ` and `R_ρ` commute, `K_ρ` acts on the
//! eigenbasis components of `X` as the Schur multiplier
//!
//! ```text
//! (K_ρ X)_ab = X_ab / (p_b f(p_a / p_b))
//! ```
//!
//! and the metric on minus-representation tangents is `g(A, B) = Tr(A K_ρ(B))`.
//! `K_ρ` here is the inverse of the superoperator that some authors call `K`.

use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, C64};
use crate::manifold::{Chart, ChartPoint, DensityMatrix, TangentVector};
use crate::quadrature::{log_trapezoid, GaussLegendre};

/// Node count of the Gauss-Legendre rule for the λ-integral.
pub const LAMBDA_NODES: usize = 64;

/// Step of the trapezoid rule in `u = log t` for the resolvent integral.
pub const RESOLVENT_STEP: f64 = 0.25;

/// Margin (in `u = log t`) beyond the spectrum covered by the resolvent rule.
pub const RESOLVENT_MARGIN: f64 = 40.0;

/// The named generating functions.
#[derive(Clone, Debug, PartialEq)]
pub enum MeanKind {
    /// `(t − 1)/log t`
    Bkm,
    /// `(1 + t)/2`
    Sld,
    /// `2t/(1 + t)`
    Rld,
    /// `((1 + √t)/2)²`
    WignerYanase,
    /// `(1 + t²)/(1 + t)`; symmetric but not operator monotone.
    Bad,
    /// `1/f = (1 − s)/f_a + s/f_b`, so the metric interpolates linearly.
    InverseMix {
        a: Box<MeanKind>,
        b: Box<MeanKind>,
        s: f64,
    },
}

impl MeanKind {
    fn eval(&self, t: f64) -> f64 {
        match self {
            MeanKind::Bkm => {
                let x = t - 1.0;
                if x == 0.0 {
                    1.0
                } else if x.abs() < 0.5 {
                    x / x.ln_1p()
                } else {
                    x / t.ln()
                }
            }
            MeanKind::Sld => 0.5 * (1.0 + t),
            MeanKind::Rld => 2.0 * t / (1.0 + t),
            MeanKind::WignerYanase => {
                let r = 0.5 * (1.0 + t.sqrt());
                r * r
            }
            MeanKind::Bad => (1.0 + t * t) / (1.0 + t),
            MeanKind::InverseMix { a, b, s } => 1.0 / ((1.0 - s) / a.eval(t) + s / b.eval(t)),
        }
    }

    fn monotone_claim(&self) -> bool {
        match self {
            MeanKind::Bad => false,
            MeanKind::InverseMix { a, b, .. } => a.monotone_claim() && b.monotone_claim(),
            _ => true,
        }
    }
}

/// A named symmetric function `f: (0, ∞) → (0, ∞)` generating a metric.
///
/// `scale` multiplies the resulting metric, i.e. the function actually
/// evaluated is `f / scale`. Registered functions have `scale = 1` and
/// `f(1) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMonotoneFunction {
    name: String,
    kind: MeanKind,
    scale: f64,
}

impl OperatorMonotoneFunction {
    fn named(name: &str, kind: MeanKind) -> Self {
        Self {
            name: name.to_owned(),
            kind,
            scale: 1.0,
        }
    }

    pub fn bkm() -> Self {
        Self::named("bkm", MeanKind::Bkm)
    }

    pub fn sld() -> Self {
        Self::named("sld", MeanKind::Sld)
    }

    pub fn rld() -> Self {
        Self::named("rld", MeanKind::Rld)
    }

    pub fn wy() -> Self {
        Self::named("wy", MeanKind::WignerYanase)
    }

    pub fn bad() -> Self {
        Self::named("bad", MeanKind::Bad)
    }

    /// Metric scaled by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!("metric scale must be positive, got {c}")));
        }
        Ok(Self {
            name: format!("{}*{}", fmt_scale(c * self.scale), self.base_name()),
            kind: self.kind.clone(),
            scale: c * self.scale,
        })
    }

    /// Metric `(1 − s) g_a + s g_b` for `s ∈ [0, 1]`.
    pub fn interpolate(a: &Self, b: &Self, s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidParameter(format!("interpolation weight {s} outside [0, 1]")));
        }
        if a.scale != 1.0 || b.scale != 1.0 {
            return Err(Error::InvalidParameter("interpolate unscaled functions".into()));
        }
        Ok(Self {
            name: format!("mix({},{};{})", a.name, b.name, s),
            kind: MeanKind::InverseMix {
                a: Box::new(a.kind.clone()),
                b: Box::new(b.kind.clone()),
                s,
            },
            scale: 1.0,
        })
    }

    /// Looks up `bkm|sld|rld|wy|bad`, optionally prefixed by a scale as in `2*bkm`.
    pub fn by_name(name: &str) -> Result<Self> {
        let name = name.trim();
        if let Some((c, base)) = name.split_once('*') {
            let c: f64 = c
                .trim()
                .parse()
                .map_err(|_| Error::UnknownFunction(name.to_owned()))?;
            return Self::by_name(base)?.scaled(c);
        }
        registered_functions()
            .into_iter()
            .find(|f| f.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::UnknownFunction(name.to_owned()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn base_name(&self) -> &str {
        self.name.split_once('*').map_or(&self.name, |(_, b)| b)
    }

    pub fn kind(&self) -> &MeanKind {
        &self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Whether `f` is claimed to be operator monotone.
    pub fn monotone_claim(&self) -> bool {
        self.kind.monotone_claim()
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.kind.eval(t) / self.scale
    }

    /// Kernel multiplier `1/(p_b f(p_a/p_b))`, evaluated with the larger
    /// eigenvalue on top so that it is exactly symmetric.
    pub fn multiplier(&self, pa: f64, pb: f64) -> f64 {
        let (hi, lo) = if pa >= pb { (pa, pb) } else { (pb, pa) };
        1.0 / (lo * self.eval(hi / lo))
    }
}

fn fmt_scale(c: f64) -> String {
    if c.fract() == 0.0 && c.abs() < 1e15 {
        format!("{}", c as i64)
    } else {
        format!("{c}")
    }
}

impl fmt::Display for OperatorMonotoneFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// BKM, SLD, RLD, WY and the non-monotone control `bad`.
pub fn registered_functions() -> Vec<OperatorMonotoneFunction> {
    vec![
        OperatorMonotoneFunction::bkm(),
        OperatorMonotoneFunction::sld(),
        OperatorMonotoneFunction::rld(),
        OperatorMonotoneFunction::wy(),
        OperatorMonotoneFunction::bad(),
    ]
}

/// Schur multipliers of `K_ρ` in the eigenbasis of `ρ`.
#[derive(Clone, Debug)]
pub struct MetricKernel {
    base: DensityMatrix,
    multipliers: DMatrix<f64>,
}

impl MetricKernel {
    pub fn new(f: &OperatorMonotoneFunction, base: &DensityMatrix) -> Self {
        let p = base.eigenvalues();
        let n = p.len();
        Self {
            base: base.clone(),
            multipliers: DMatrix::from_fn(n, n, |a, b| f.multiplier(p[a], p[b])),
        }
    }

    pub fn base(&self) -> &DensityMatrix {
        &self.base
    }

    pub fn multipliers(&self) -> &DMatrix<f64> {
        &self.multipliers
    }

    pub fn apply(&self, a: &HermitianMatrix) -> HermitianMatrix {
        self.base
            .spectrum()
            .schur_apply(a, |i, j| self.multipliers[(i, j)])
    }

    /// `Tr(A K_ρ(B))` for minus-representation payloads.
    pub fn pairing(&self, a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
        a.trace_product(&self.apply(b))
    }
}

/// `K_ρ(A)` for a minus-representation payload `A`.
pub fn petz_kernel_apply(f: &OperatorMonotoneFunction, rho: &DensityMatrix, a: &HermitianMatrix) -> HermitianMatrix {
    MetricKernel::new(f, rho).apply(a)
}

fn check_same_base(a: &TangentVector, b: &TangentVector) -> Result<()> {
    if a.base().same_point(b.base()) {
        Ok(())
    } else {
        Err(Error::BaseMismatch)
    }
}

/// `g_f(A, B) = Tr(A⁻ K_ρ(B⁻))`.
pub fn monotone_metric(f: &OperatorMonotoneFunction, a: &TangentVector, b: &TangentVector) -> Result<f64> {
    check_same_base(a, b)?;
    let kernel = MetricKernel::new(f, a.base());
    Ok(kernel.pairing(&a.minus_payload(), &b.minus_payload()))
}

/// The three equivalent expressions of the BKM metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BkmMethod {
    /// `Tr(A⁻ B⁺)`
    TracePairing,
    /// `∫₀¹ Tr(ρ^λ A⁺ ρ^{1−λ} B⁺) dλ`
    LambdaIntegral,
    /// `∫₀^∞ Tr((t+ρ)⁻¹ A⁻ (t+ρ)⁻¹ B⁻) dt`
    ResolventIntegral,
}

impl BkmMethod {
    pub const ALL: [BkmMethod; 3] = [
        BkmMethod::TracePairing,
        BkmMethod::LambdaIntegral,
        BkmMethod::ResolventIntegral,
    ];
}

pub fn bkm_metric(a: &TangentVector, b: &TangentVector, method: BkmMethod) -> Result<f64> {
    check_same_base(a, b)?;
    let rho = a.base();
    Ok(match method {
        BkmMethod::TracePairing => a.minus_payload().trace_product(&b.plus_payload()),
        BkmMethod::LambdaIntegral => lambda_integral(rho, &a.plus_payload(), &b.plus_payload()),
        BkmMethod::ResolventIntegral => resolvent_integral(rho, &a.minus_payload(), &b.minus_payload())?,
    })
}

fn lambda_integral(rho: &DensityMatrix, a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    let gl = GaussLegendre::new(LAMBDA_NODES);
    gl.integrate(|lambda| {
        let left = rho.power(lambda).as_matrix() * a.as_matrix();
        let right = rho.power(1.0 - lambda).as_matrix() * b.as_matrix();
        (left * right).trace().re
    })
}

/// The three BKM values for one pair of tangents.
#[derive(Clone, Debug, Serialize)]
pub struct BkmForms {
    pub trace_pairing: f64,
    pub lambda_integral: f64,
    pub resolvent_integral: f64,
    /// `max |x − y| / max(|x|, |y|, √(g(A,A) g(B,B)))` over pairs of forms.
    pub relative_deviation: f64,
}

/// Evaluates all three forms. The relative deviation is scaled by the
/// Cauchy-Schwarz bound so that nearly orthogonal pairs are not amplified.
pub fn bkm_forms(a: &TangentVector, b: &TangentVector) -> Result<BkmForms> {
    let values = [
        bkm_metric(a, b, BkmMethod::TracePairing)?,
        bkm_metric(a, b, BkmMethod::LambdaIntegral)?,
        bkm_metric(a, b, BkmMethod::ResolventIntegral)?,
    ];
    let norms = (bkm_metric(a, a, BkmMethod::TracePairing)? * bkm_metric(b, b, BkmMethod::TracePairing)?)
        .abs()
        .sqrt();
    let mut dev = 0.0_f64;
    for i in 0..3 {
        for j in 0..i {
            let scale = values[i].abs().max(values[j].abs()).max(norms);
            if scale > 0.0 {
                dev = dev.max((values[i] - values[j]).abs() / scale);
            }
        }
    }
    Ok(BkmForms {
        trace_pairing: values[0],
        lambda_integral: values[1],
        resolvent_integral: values[2],
        relative_deviation: dev,
    })
}

/// Resolvent form, with `(t + ρ)⁻¹` from a Cholesky factorization rather than
/// the eigendecomposition used elsewhere.
pub fn resolvent_integral(rho: &DensityMatrix, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    let n = rho.dim();
    let spec = rho.spectrum();
    let rule = log_trapezoid(
        spec.min().ln() - RESOLVENT_MARGIN,
        spec.max().ln() + RESOLVENT_MARGIN,
        RESOLVENT_STEP,
    );
    let mut acc = 0.0;
    for (t, w) in rule {
        let mut shifted = rho.matrix().as_matrix().clone();
        for i in 0..n {
            shifted[(i, i)] += C64::new(t, 0.0);
        }
        let inv = nalgebra::Cholesky::new(shifted)
            .ok_or_else(|| Error::NumericalDegeneracy("t + ρ not positive definite".into()))?
            .inverse();
        let left = &inv * a.as_matrix();
        let right = &inv * b.as_matrix();
        acc += w * (left * right).trace().re;
    }
    Ok(acc)
}

/// Gram matrix `g_ij = g_f(∂_i, ∂_j)` of the coordinate vectors of a chart.
#[derive(Clone, Debug)]
pub struct MetricMatrix {
    pub coords: Vec<f64>,
    pub entries: DMatrix<f64>,
}

impl MetricMatrix {
    pub fn min_eigenvalue(&self) -> f64 {
        self.entries.clone().symmetric_eigen().eigenvalues.min()
    }
}

pub fn metric_matrix_in_chart(
    f: &OperatorMonotoneFunction,
    chart: &dyn Chart,
    coords: &[f64],
) -> Result<MetricMatrix> {
    let at = chart.point(coords)?;
    metric_matrix_at(f, chart, &at)
}

pub fn metric_matrix_at(f: &OperatorMonotoneFunction, chart: &dyn Chart, at: &ChartPoint) -> Result<MetricMatrix> {
    let vectors: Vec<HermitianMatrix> = chart
        .coordinate_vectors_minus(at)
        .into_iter()
        .map(TangentVector::into_payload)
        .collect();
    let kernel = MetricKernel::new(f, at.state());
    let images: Vec<HermitianMatrix> = vectors.iter().map(|v| kernel.apply(v)).collect();
    let n = vectors.len();
    let mut g = DMatrix::from_fn(n, n, |i, j| vectors[i].trace_product(&images[j]));
    g = (&g + g.transpose()) * 0.5;
    if nalgebra::Cholesky::new(g.clone()).is_none() {
        return Err(Error::NumericalDegeneracy(
            "metric matrix is not positive definite; chart point too close to the boundary".into(),
        ));
    }
    Ok(MetricMatrix {
        coords: at.coords().to_vec(),
        entries: g,
    })
}

/// Metric extended to weight-space tangents: `Â = A₀ρ + A⁻` with `A₀ = Tr Â`,
/// and `ĝ(Â, B̂) = A₀B₀ + g(A⁻, B⁻)`.
pub fn extend_metric(
    f: &OperatorMonotoneFunction,
    rho: &DensityMatrix,
    a_hat: &HermitianMatrix,
    b_hat: &HermitianMatrix,
) -> f64 {
    let (a0, b0) = (a_hat.trace(), b_hat.trace());
    let a_minus = a_hat.axpy(-a0, rho.matrix());
    let b_minus = b_hat.axpy(-b0, rho.matrix());
    a0 * b0 + MetricKernel::new(f, rho).pairing(&a_minus, &b_minus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::ExpChart;

    fn sigma_x() -> HermitianMatrix {
        HermitianMatrix::from_parts(&[vec![0.0, 1.0], vec![1.0, 0.0]], &[vec![0.0; 2], vec![0.0; 2]]).unwrap()
    }

    fn qubit() -> DensityMatrix {
        DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap()
    }

    #[test]
    fn bkm_values_near_one_match_series() {
        let f = OperatorMonotoneFunction::bkm();
        assert_eq!(f.eval(1.0), 1.0);
        for &x in &[1e-3, -1e-3, 1e-6, 1e-9] {
            // x / log(1 + x) = 1 + x/2 − x²/12 + x³/24 − …
            let series = 1.0 + x / 2.0 - x * x / 12.0 + x * x * x / 24.0;
            assert!((f.eval(1.0 + x) - series).abs() < 1e-12);
        }
        assert!((f.eval(2.0) - 1.0 / 2f64.ln()).abs() < 1e-15);
        assert!((f.eval(2.0) - 1.442695).abs() < 1e-6);
        assert_eq!(OperatorMonotoneFunction::sld().eval(2.0), 1.5);
    }

    #[test]
    fn registry_lookup() {
        assert_eq!(registered_functions().len(), 5);
        assert!(!OperatorMonotoneFunction::by_name("bad").unwrap().monotone_claim());
        let two = OperatorMonotoneFunction::by_name("2*bkm").unwrap();
        assert_eq!(two.name(), "2*bkm");
        assert_eq!(two.scale(), 2.0);
        assert!(matches!(
            OperatorMonotoneFunction::by_name("fisher"),
            Err(Error::UnknownFunction(_))
        ));
        assert!(OperatorMonotoneFunction::by_name("x*bkm").is_err());
        assert!(OperatorMonotoneFunction::bkm().scaled(-1.0).is_err());
    }

    #[test]
    fn kernel_examples() {
        let rho = qubit();
        let out = petz_kernel_apply(&OperatorMonotoneFunction::bkm(), &rho, &sigma_x());
        assert!((out.get(0, 1).re - 3f64.ln() / 0.5).abs() < 1e-14);
        let out = petz_kernel_apply(&OperatorMonotoneFunction::rld(), &rho, &sigma_x());
        assert!((out.get(0, 1).re - 1.0 / 0.375).abs() < 1e-14);

        let mm = DensityMatrix::maximally_mixed(3).unwrap();
        let a = HermitianMatrix::from_real_diagonal(&[0.2, 0.3, -0.5]);
        for f in registered_functions() {
            let out = petz_kernel_apply(&f, &mm, &a);
            assert!((&out - &a.scale(3.0)).max_abs() < 1e-14, "{f}");
        }
    }

    #[test]
    fn metric_base_mismatch() {
        let a = TangentVector::minus(qubit(), sigma_x()).unwrap();
        let b = TangentVector::minus(DensityMatrix::maximally_mixed(2).unwrap(), sigma_x()).unwrap();
        assert!(matches!(
            monotone_metric(&OperatorMonotoneFunction::bkm(), &a, &b),
            Err(Error::BaseMismatch)
        ));
        assert!(matches!(bkm_metric(&a, &b, BkmMethod::TracePairing), Err(Error::BaseMismatch)));
    }

    #[test]
    fn extension_identities() {
        let rho = qubit();
        let f = OperatorMonotoneFunction::sld();
        assert!((extend_metric(&f, &rho, rho.matrix(), rho.matrix()) - 1.0).abs() < 1e-14);
        assert!(extend_metric(&f, &rho, rho.matrix(), &sigma_x()).abs() < 1e-14);
    }

    #[test]
    fn metric_matrix_at_origin() {
        let chart = ExpChart::with_dim(2).unwrap();
        let g = metric_matrix_in_chart(&OperatorMonotoneFunction::bkm(), &chart, &[0.0; 3]).unwrap();
        let want = DMatrix::<f64>::identity(3, 3) * 0.5;
        assert!((&g.entries - want).abs().max() < 1e-14);
    }
}
