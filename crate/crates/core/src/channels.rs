//! Completely positive trace-preserving maps in Kraus form, and the empirical
//! monotonicity test `g_{S(ρ)}(S(A), S(A)) ≤ g_ρ(A, A)`.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, C64};
use crate::manifold::{DensityMatrix, Rep, TangentVector, EIGENVALUE_FLOOR};
use crate::metrics::{extend_metric, monotone_metric, OperatorMonotoneFunction};
use crate::sample::{gaussian_matrix, random_hermitian, random_state, random_tangent, rng_for};

/// Tolerance on `‖Σ K†K − 1‖`.
pub const TRACE_PRESERVATION_TOL: f64 = 1e-10;

/// Minimal weight of `I/N` mixed into a channel output used as a base point.
pub const NUDGE_WEIGHT: f64 = 1e-9;

/// A CPTP map `X ↦ Σ K_i X K_i†`.
#[derive(Clone, Debug)]
pub struct CptpMap {
    label: String,
    kraus: Vec<DMatrix<C64>>,
}

impl CptpMap {
    /// Checks shapes and trace preservation.
    pub fn new(label: impl Into<String>, kraus: Vec<DMatrix<C64>>) -> Result<Self> {
        let dim = kraus.first().map(|k| k.nrows()).ok_or_else(|| {
            Error::InvalidParameter("a channel needs at least one Kraus operator".into())
        })?;
        for k in &kraus {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.nrows().max(k.ncols()),
                });
            }
        }
        let map = Self {
            label: label.into(),
            kraus,
        };
        let dev = map.trace_preservation_error();
        if dev > TRACE_PRESERVATION_TOL {
            return Err(Error::InvalidParameter(format!(
                "Kraus operators are not trace preserving (deviation {dev:e})"
            )));
        }
        Ok(map)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            label: "identity".into(),
            kraus: vec![DMatrix::identity(dim, dim)],
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kraus(&self) -> &[DMatrix<C64>] {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].nrows()
    }

    pub fn rank(&self) -> usize {
        self.kraus.len()
    }

    /// `max |Σ K†K − 1|` entrywise.
    pub fn trace_preservation_error(&self) -> f64 {
        let n = self.dim();
        let sum = self
            .kraus
            .iter()
            .fold(DMatrix::<C64>::zeros(n, n), |acc, k| acc + k.adjoint() * k);
        (sum - DMatrix::<C64>::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, x: &HermitianMatrix) -> HermitianMatrix {
        let n = self.dim();
        let out = self
            .kraus
            .iter()
            .fold(DMatrix::<C64>::zeros(n, n), |acc, k| acc + k * x.as_matrix() * k.adjoint());
        HermitianMatrix::new(out).expect("square")
    }

    /// `S(ρ)` as a base point. If an eigenvalue falls below the floor the output
    /// is mixed with `I/N`; the applied weight is returned.
    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<(DensityMatrix, Option<f64>)> {
        let mut out = self.apply(rho.matrix());
        if (out.trace() - 1.0).abs() > crate::manifold::TRACE_TOL {
            out = out.scale(1.0 / out.trace());
        }
        let min = out.eigh().min();
        if min >= EIGENVALUE_FLOOR {
            return Ok((DensityMatrix::new(out)?, None));
        }
        let n = self.dim() as f64;
        let target = 2.0 * EIGENVALUE_FLOOR;
        let w = ((target - min) / (1.0 / n - min)).max(NUDGE_WEIGHT);
        let nudged = out.scale(1.0 - w).shift(w / n);
        Ok((DensityMatrix::normalized(nudged)?, Some(w)))
    }
}

/// Random channel of Kraus rank `kraus_rank`: a Gaussian `(N·r) x N` matrix is
/// orthonormalized into an isometry `V`, whose `N x N` blocks are the Kraus
/// operators. Rank one gives a random unitary conjugation.
pub fn random_cptp(dim: usize, kraus_rank: usize, seed: u64) -> Result<CptpMap> {
    random_cptp_with(&mut rng_for(seed, 0), dim, kraus_rank)
}

pub fn random_cptp_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, kraus_rank: usize) -> Result<CptpMap> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if kraus_rank == 0 {
        return Err(Error::InvalidParameter("Kraus rank must be at least 1".into()));
    }
    let g = gaussian_matrix(rng, dim * kraus_rank, dim);
    let v = g.qr().q();
    let kraus = (0..kraus_rank)
        .map(|r| v.rows(r * dim, dim).into_owned())
        .collect();
    CptpMap::new(format!("random(rank={kraus_rank})"), kraus)
}

/// Dephasing in the computational basis, Kraus operators `|i⟩⟨i|`.
pub fn pinching_map(dim: usize) -> Result<CptpMap> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let kraus = (0..dim)
        .map(|i| {
            let mut k = DMatrix::zeros(dim, dim);
            k[(i, i)] = C64::new(1.0, 0.0);
            k
        })
        .collect();
    CptpMap::new("pinching", kraus)
}

/// `ρ ↦ (1 − p)ρ + p Tr(ρ) I/N`, Kraus operators `√(1−p)·1` and `√(p/N)|i⟩⟨j|`.
pub fn depolarizing_map(dim: usize, p: f64) -> Result<CptpMap> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("depolarizing probability {p} outside [0, 1]")));
    }
    let mut kraus = Vec::with_capacity(dim * dim + 1);
    if p < 1.0 {
        kraus.push(DMatrix::identity(dim, dim) * C64::new((1.0 - p).sqrt(), 0.0));
    }
    if p > 0.0 {
        let c = (p / dim as f64).sqrt();
        for i in 0..dim {
            for j in 0..dim {
                let mut k = DMatrix::zeros(dim, dim);
                k[(i, j)] = C64::new(c, 0.0);
                kraus.push(k);
            }
        }
    }
    CptpMap::new(format!("depolarizing(p={p})"), kraus)
}

/// Dephasing in the basis `(v_a ± e^{iφ} v_b)/√2` together with the remaining
/// eigenvectors `v_k` of `ρ`.
///
/// On the coherence [`eigen_coherence`]`(ρ, a, b, φ)` the metric increases
/// exactly when the kernel multiplier at `(p_a, p_b)` lies below the SLD value
/// `2/(p_a + p_b)`, which no monotone `f` with `f(1) = 1` can do.
pub fn coherence_pinching(rho: &DensityMatrix, a: usize, b: usize, phase: f64) -> Result<CptpMap> {
    let n = rho.dim();
    if a >= n || b >= n || a == b {
        return Err(Error::InvalidParameter(format!("eigenvector pair ({a}, {b}) invalid for N = {n}")));
    }
    let v = &rho.spectrum().vectors;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let e = C64::from_polar(1.0, phase);
    let va = v.column(a).into_owned();
    let vb = v.column(b).into_owned();
    let mut columns = vec![(&va + &vb * e) * C64::new(r, 0.0), (&va - &vb * e) * C64::new(r, 0.0)];
    columns.extend((0..n).filter(|&k| k != a && k != b).map(|k| v.column(k).into_owned()));
    let kraus = columns.iter().map(|u| u * u.adjoint()).collect();
    CptpMap::new(format!("coherence-pinching({a},{b})"), kraus)
}

/// Unit-norm coherence `(e^{−iφ}|v_a⟩⟨v_b| + h.c.)/√2` between two eigenvectors of `ρ`.
pub fn eigen_coherence(rho: &DensityMatrix, a: usize, b: usize, phase: f64) -> TangentVector {
    let n = rho.dim();
    let mut y = DMatrix::<C64>::zeros(n, n);
    let e = C64::from_polar(std::f64::consts::FRAC_1_SQRT_2, phase);
    y[(a, b)] = e.conj();
    y[(b, a)] = e;
    let payload = rho.spectrum().from_eigenbasis(&y);
    TangentVector::projected(rho.clone(), Rep::Minus, payload)
}

/// `S ∘ Ad_U`, e.g. a pinching in a rotated basis.
pub fn compose_with_unitary(map: &CptpMap, u: &DMatrix<C64>) -> Result<CptpMap> {
    let kraus = map.kraus.iter().map(|k| k * u).collect();
    CptpMap::new(format!("{}∘unitary", map.label), kraus)
}

pub fn apply_channel(map: &CptpMap, x: &HermitianMatrix) -> HermitianMatrix {
    map.apply(x)
}

/// Outcome of one monotonicity check.
#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityCheck {
    /// `g_{S(ρ)}(S A, S A) − g_ρ(A, A)`; positive means a violation.
    pub difference: f64,
    pub before: f64,
    pub after: f64,
    pub nudge: Option<f64>,
}

/// `g_f,S(ρ)(S(A), S(A)) − g_f,ρ(A, A)` for a tangent `A` at `ρ`.
pub fn monotonicity_check(f: &OperatorMonotoneFunction, map: &CptpMap, a: &TangentVector) -> Result<MonotonicityCheck> {
    let rho = a.base();
    let before = monotone_metric(f, a, a)?;
    let (image_state, nudge) = map.apply_state(rho)?;
    let pushed = map.apply(&a.minus_payload());
    let image = TangentVector::minus(image_state.clone(), pushed.clone())
        .unwrap_or_else(|_| TangentVector::projected(image_state, Rep::Minus, pushed));
    let after = monotone_metric(f, &image, &image)?;
    Ok(MonotonicityCheck {
        difference: after - before,
        before,
        after,
        nudge,
    })
}

/// Same comparison for the metric extended to non-traceless `Â` at `ρ`.
pub fn extended_monotonicity_check(
    f: &OperatorMonotoneFunction,
    map: &CptpMap,
    rho: &DensityMatrix,
    a_hat: &HermitianMatrix,
) -> Result<f64> {
    let before = extend_metric(f, rho, a_hat, a_hat);
    let (image_state, _) = map.apply_state(rho)?;
    let image = map.apply(a_hat);
    Ok(extend_metric(f, &image_state, &image, &image) - before)
}

/// Largest difference found in a sweep, with where it occurred.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MonotonicityWitness {
    pub trial: usize,
    pub channel: String,
    pub difference: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicitySweep {
    pub f: String,
    pub monotone_claim: bool,
    pub dim: usize,
    pub trials: usize,
    pub max_violation: f64,
    pub max_extended_violation: f64,
    pub violations_above_tol: usize,
    pub nudges: usize,
    pub witness: MonotonicityWitness,
}

/// Threshold above which a difference counts as a violation for monotone `f`.
pub const MONOTONE_VIOLATION_TOL: f64 = 1e-9;

/// Trial `i` uses channel kind `i % TRIAL_KINDS`: two random channels, a
/// pinching, a depolarizing map, and a coherence pinching.
const TRIAL_KINDS: usize = 5;

struct TrialOutcome {
    channel: String,
    difference: f64,
    extended: f64,
    nudged: bool,
}

fn run_trial(f: &OperatorMonotoneFunction, dim: usize, seed: u64, trial: usize) -> Result<TrialOutcome> {
    let mut rng = rng_for(seed, trial as u64);
    let rho = random_state(&mut rng, dim);
    let mut a = random_tangent(&mut rng, &rho);
    let map = match trial % TRIAL_KINDS {
        0 | 1 => {
            let rank = rng.random_range(1..=dim * dim);
            random_cptp_with(&mut rng, dim, rank)?
        }
        2 => pinching_map(dim)?,
        3 => depolarizing_map(dim, rng.random::<f64>())?,
        _ => {
            let p = rho.eigenvalues();
            let top = (0..dim).max_by(|&x, &y| p[x].total_cmp(&p[y])).unwrap_or(0);
            let bottom = (0..dim).min_by(|&x, &y| p[x].total_cmp(&p[y])).unwrap_or(1);
            let phase = rng.random::<f64>() * std::f64::consts::TAU;
            a = eigen_coherence(&rho, top, bottom, phase);
            coherence_pinching(&rho, top, bottom, phase)?
        }
    };
    let check = monotonicity_check(f, &map, &a)?;
    let a_hat = random_hermitian(&mut rng, dim);
    let a_hat = a_hat.scale(1.0 / a_hat.frobenius_norm());
    let extended = extended_monotonicity_check(f, &map, &rho, &a_hat)?;
    Ok(TrialOutcome {
        channel: map.label().to_owned(),
        difference: check.difference,
        extended,
        nudged: check.nudge.is_some(),
    })
}

/// Runs `trials` monotonicity checks over random channels (Kraus ranks
/// `1..=N²`), pinchings and depolarizing maps with random `(ρ, A)`, and
/// coherence pinchings of `ρ` applied to a random-phase coherence between its
/// largest and smallest eigenvectors. Trial `i`
/// draws everything from the RNG seeded by `seed ^ i`.
pub fn monotonicity_sweep(f: &OperatorMonotoneFunction, dim: usize, trials: usize, seed: u64) -> Result<MonotonicitySweep> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial required".into()));
    }
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(f, dim, seed, t))
        .collect::<Result<_>>()?;
    let (best, worst) = outcomes
        .iter()
        .enumerate()
        .fold((0, &outcomes[0]), |b, (i, o)| if o.difference > b.1.difference { (i, o) } else { b });
    Ok(MonotonicitySweep {
        f: f.name().to_owned(),
        monotone_claim: f.monotone_claim(),
        dim,
        trials,
        max_violation: worst.difference,
        max_extended_violation: outcomes.iter().map(|o| o.extended).fold(f64::NEG_INFINITY, f64::max),
        violations_above_tol: outcomes
            .iter()
            .filter(|o| o.difference > MONOTONE_VIOLATION_TOL)
            .count(),
        nudges: outcomes.iter().filter(|o| o.nudged).count(),
        witness: MonotonicityWitness {
            trial: best,
            channel: worst.channel.clone(),
            difference: worst.difference,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structured_channels() {
        let rho = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        let pin = pinching_map(2).unwrap();
        assert!((&pin.apply(rho.matrix()) - rho.matrix()).max_abs() < 1e-16);

        let dep = depolarizing_map(2, 0.5).unwrap();
        let out = dep.apply(rho.matrix());
        assert!((&out - &HermitianMatrix::from_real_diagonal(&[0.625, 0.375])).max_abs() < 1e-15);
        let full = depolarizing_map(3, 1.0).unwrap();
        let r3 = DensityMatrix::from_diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let out = full.apply(r3.matrix());
        assert!((&out - &HermitianMatrix::identity(3).scale(1.0 / 3.0)).max_abs() < 1e-15);
        let none = depolarizing_map(3, 0.0).unwrap();
        assert!((&none.apply(r3.matrix()) - r3.matrix()).max_abs() < 1e-15);

        assert!(depolarizing_map(2, 1.5).is_err());
        assert!(depolarizing_map(2, -0.1).is_err());
        assert!(random_cptp(2, 0, 1).is_err());
    }

    #[test]
    fn random_channels_preserve_trace() {
        for rank in 1..=4 {
            let map = random_cptp(2, rank, 9).unwrap();
            assert_eq!(map.rank(), rank);
            assert!(map.trace_preservation_error() < 1e-12);
        }
        let a = random_cptp(3, 2, 42).unwrap();
        let b = random_cptp(3, 2, 42).unwrap();
        assert_eq!(a.kraus(), b.kraus());
    }

    #[test]
    fn rejects_non_trace_preserving() {
        let k = DMatrix::<C64>::identity(2, 2) * C64::new(0.5, 0.0);
        assert!(CptpMap::new("half", vec![k]).is_err());
        assert!(CptpMap::new("empty", vec![]).is_err());
    }

    #[test]
    fn identity_channel_is_neutral() {
        let rho = DensityMatrix::from_diagonal(&[0.6, 0.3, 0.1]).unwrap();
        let a = TangentVector::minus(rho, HermitianMatrix::from_real_diagonal(&[1.0, 0.0, -1.0])).unwrap();
        for f in crate::metrics::registered_functions() {
            let c = monotonicity_check(&f, &CptpMap::identity(3), &a).unwrap();
            assert_eq!(c.difference, 0.0);
        }
    }

    #[test]
    fn nudge_near_boundary() {
        let rho = DensityMatrix::from_diagonal(&[0.5, 0.5]).unwrap();
        // replacement channel onto |0⟩⟨0|
        let mut k0 = DMatrix::<C64>::zeros(2, 2);
        k0[(0, 0)] = C64::new(1.0, 0.0);
        let mut k1 = DMatrix::<C64>::zeros(2, 2);
        k1[(0, 1)] = C64::new(1.0, 0.0);
        let map = CptpMap::new("reset", vec![k0, k1]).unwrap();
        let (out, nudge) = map.apply_state(&rho).unwrap();
        assert!(nudge.is_some());
        assert!(out.spectrum().min() >= EIGENVALUE_FLOOR);
    }
}
