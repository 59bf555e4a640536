//! Seeded random states, tangents and chart points.
//!
//! Every sampler takes an explicit RNG; [`rng_for`] derives the per-trial RNG
//! as `seed ^ index` so that parallel sweeps reproduce serial ones.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hermitian::{HermitianMatrix, C64};
use crate::manifold::{DensityMatrix, Rep, TangentVector};

/// Weight of `I/N` mixed into sampled states.
pub const STATE_MIXING: f64 = 1e-3;

pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index)
}

/// `rows x cols` matrix with independent standard Gaussian real and imaginary parts.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// `G G† / Tr(G G†)` mixed with `I/N` at weight [`STATE_MIXING`].
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = gaussian_matrix(rng, dim, dim);
    let w = HermitianMatrix::new(&g * g.adjoint()).expect("square");
    let w = w.scale(1.0 / w.trace());
    let mixed = w
        .scale(1.0 - STATE_MIXING)
        .shift(STATE_MIXING / dim as f64);
    DensityMatrix::normalized(mixed).expect("mixing keeps the spectrum above the floor")
}

/// Gaussian Hermitian matrix (GUE-like, unnormalized).
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianMatrix {
    HermitianMatrix::new(gaussian_matrix(rng, dim, dim)).expect("square")
}

/// Random traceless payload at `base`, in the minus representation, scaled to
/// unit Frobenius norm.
pub fn random_tangent<R: Rng + ?Sized>(rng: &mut R, base: &DensityMatrix) -> TangentVector {
    let v = TangentVector::projected(base.clone(), Rep::Minus, random_hermitian(rng, base.dim()));
    let norm = v.payload().frobenius_norm();
    v.scale(1.0 / norm)
}

/// Point drawn uniformly from the ball `‖x‖ ≤ radius` in `len` coordinates.
pub fn random_coords<R: Rng + ?Sized>(rng: &mut R, len: usize, radius: f64) -> Vec<f64> {
    let dir: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
    let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    let r = radius * rng.random::<f64>().powf(1.0 / len as f64);
    dir.into_iter().map(|x| x * r / norm).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::EIGENVALUE_FLOOR;

    #[test]
    fn states_are_valid_and_reproducible() {
        for dim in 2..=4 {
            let a = random_state(&mut rng_for(11, dim as u64), dim);
            let b = random_state(&mut rng_for(11, dim as u64), dim);
            assert_eq!(a.matrix(), b.matrix());
            assert!(a.eigenvalues().iter().all(|&p| p >= STATE_MIXING / dim as f64 - 1e-15));
            assert!(a.eigenvalues().iter().all(|&p| p > EIGENVALUE_FLOOR));
        }
    }

    #[test]
    fn coords_in_ball() {
        let mut rng = rng_for(5, 0);
        for _ in 0..100 {
            let c = random_coords(&mut rng, 8, 1.5);
            assert!(c.iter().map(|x| x * x).sum::<f64>().sqrt() <= 1.5 + 1e-12);
        }
    }
}
