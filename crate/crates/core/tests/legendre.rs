use qig::duality::{dual_coords, gradient_check, hessian_check, potential_phi, potential_psi, sample_points};
use qig::manifold::{Chart, DensityMatrix, ExpChart, MixtureChart};
use qig::sample::{random_coords, rng_for};
use qig::Error;

const THETA3: f64 = 0.776_836_199_212_093_2;

#[test]
fn qubit_closed_forms() {
    let chart = ExpChart::with_dim(2).unwrap();
    let theta = [0.0, 0.0, THETA3];
    let psi = potential_psi(&chart, &theta).unwrap();
    assert!((psi - (2.0 * (0.5 * 3f64.ln()).cosh()).ln()).abs() < 1e-15);
    assert!((psi - 0.836988).abs() < 1e-6);
    let eta = dual_coords(&chart, &theta).unwrap();
    assert!((eta[2] - 0.353553).abs() < 1e-6);
    assert!(eta[0].abs() < 1e-15 && eta[1].abs() < 1e-15);
}

#[test]
fn dual_potential_is_negative_entropy() {
    let chart = ExpChart::with_dim(2).unwrap();
    let eta3 = 0.5 / 2f64.sqrt();
    let pair = potential_phi(&chart, &[0.0, 0.0, eta3]).unwrap();
    assert!((pair.theta[2] - THETA3).abs() < 1e-10);
    let entropy = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap().entropy();
    assert!((pair.phi + entropy).abs() < 1e-10);
    assert!((pair.phi - (-0.5623351)).abs() < 1e-6);
    assert!(pair.legendre_residual() < 1e-12);

    // −S(ρ(η)) along random admissible η in N=3
    let chart3 = ExpChart::with_dim(3).unwrap();
    let mix = MixtureChart::with_dim(3).unwrap();
    for theta in sample_points(&chart3, 10, 19) {
        let rho = chart3.state(&theta).unwrap();
        let pair = potential_phi(&chart3, &mix.coords(&rho)).unwrap();
        assert!((pair.phi + rho.entropy()).abs() < 1e-9);
    }
}

#[test]
fn legendre_identity_and_round_trip() {
    for dim in [2, 3] {
        let chart = ExpChart::with_dim(dim).unwrap();
        for theta in sample_points(&chart, 50, 23) {
            let eta = dual_coords(&chart, &theta).unwrap();
            let pair = potential_phi(&chart, &eta).unwrap();
            assert!(pair.legendre_residual() < 1e-8);
            let back = dual_coords(&chart, &pair.theta).unwrap();
            let gap = back.iter().zip(&eta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(gap < 1e-9);
            let theta_gap = pair.theta.iter().zip(&theta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(theta_gap < 1e-8);
        }
    }
}

#[test]
fn gradient_and_hessian_of_free_energy() {
    for (dim, bound) in [(2, 1e-5), (3, 1e-4)] {
        let chart = ExpChart::with_dim(dim).unwrap();
        for theta in sample_points(&chart, 50, 29) {
            assert!(gradient_check(&chart, &theta).unwrap() < 1e-6);
            assert!(hessian_check(&chart, &theta).unwrap() < bound);
        }
    }
    let chart = ExpChart::with_dim(2).unwrap();
    assert!(hessian_check(&chart, &[0.0; 3]).unwrap() < 1e-5);
    assert!(hessian_check(&chart, &[0.0, 0.0, THETA3]).unwrap() < 1e-5);
}

#[test]
fn origin_and_inadmissible() {
    let chart = ExpChart::with_dim(2).unwrap();
    let pair = potential_phi(&chart, &[0.0; 3]).unwrap();
    assert!((pair.phi + 2f64.ln()).abs() < 1e-15);
    assert!(matches!(potential_phi(&chart, &[0.0, 0.6, 0.5]), Err(Error::OutOfManifold { .. })));
    assert!(matches!(potential_phi(&chart, &[0.0; 2]), Err(Error::DimensionMismatch { .. })));
    let near = random_coords(&mut rng_for(1, 1), 3, 0.69);
    assert!(potential_phi(&chart, &near).unwrap().legendre_residual() < 1e-8);
}
