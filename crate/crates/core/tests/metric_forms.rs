use proptest::prelude::*;
use qig::manifold::{Chart, DensityMatrix, ExpChart, TangentVector};
use qig::metrics::{
    bkm_forms, bkm_metric, extend_metric, metric_matrix_in_chart, monotone_metric, petz_kernel_apply,
    registered_functions, resolvent_integral, BkmMethod, OperatorMonotoneFunction,
};
use qig::sample::{random_coords, random_hermitian, random_state, random_tangent, rng_for};
use qig::HermitianMatrix;

fn sigma_x() -> HermitianMatrix {
    HermitianMatrix::from_parts(&[vec![0.0, 1.0], vec![1.0, 0.0]], &[vec![0.0; 2], vec![0.0; 2]]).unwrap()
}

fn qubit() -> DensityMatrix {
    DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap()
}

fn monotone() -> Vec<OperatorMonotoneFunction> {
    registered_functions().into_iter().filter(|f| f.monotone_claim()).collect()
}

/// `∫₀^∞ Tr((t+ρ)⁻¹A(t+ρ)⁻¹B) dt` for diagonal `ρ`, by adaptive Simpson on `t = s/(1−s)`.
fn diagonal_resolvent_oracle(p: &[f64], a: &HermitianMatrix) -> f64 {
    let n = p.len();
    let integrand = |s: f64| {
        if s >= 1.0 {
            return 0.0;
        }
        let t = s / (1.0 - s);
        let jac = 1.0 / ((1.0 - s) * (1.0 - s));
        let mut acc = 0.0;
        for x in 0..n {
            for y in 0..n {
                acc += a.get(x, y).norm_sqr() / ((t + p[x]) * (t + p[y]));
            }
        }
        acc * jac
    };
    simpson(&integrand, 0.0, 1.0, 1e-12, 40)
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let c = 0.5 * (a + b);
    let whole = (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
    refine(f, a, b, f(a), f(c), f(b), whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn refine(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fc: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let c = 0.5 * (a + b);
    let (d, e) = (0.5 * (a + c), 0.5 * (c + b));
    let (fd, fe) = (f(d), f(e));
    let left = (c - a) / 6.0 * (fa + 4.0 * fd + fc);
    let right = (b - c) / 6.0 * (fc + 4.0 * fe + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    refine(f, a, c, fa, fd, fc, left, 0.5 * tol, depth - 1) + refine(f, c, b, fc, fe, fb, right, 0.5 * tol, depth - 1)
}

#[test]
fn qubit_spot_values() {
    let a = TangentVector::minus(qubit(), sigma_x()).unwrap();
    let oracle = diagonal_resolvent_oracle(&[0.75, 0.25], &sigma_x());
    assert!((oracle - 4.394449).abs() < 1e-6);
    for method in BkmMethod::ALL {
        let v = bkm_metric(&a, &a, method).unwrap();
        assert!((v - oracle).abs() < 1e-9, "{method:?}: {v}");
    }
    let g = |f: OperatorMonotoneFunction| monotone_metric(&f, &a, &a).unwrap();
    assert!((g(OperatorMonotoneFunction::bkm()) - 4.0 * 3f64.ln()).abs() < 1e-13);
    assert!((g(OperatorMonotoneFunction::sld()) - 4.0).abs() < 1e-13);
    assert!((g(OperatorMonotoneFunction::rld()) - 16.0 / 3.0).abs() < 1e-13);
}

#[test]
fn commuting_direction_is_classical_fisher() {
    let a = TangentVector::minus(qubit(), HermitianMatrix::from_real_diagonal(&[1.0, -1.0])).unwrap();
    for f in monotone() {
        let v = monotone_metric(&f, &a, &a).unwrap();
        assert!((v - 16.0 / 3.0).abs() < 1e-12, "{f}: {v}");
    }
}

#[test]
fn maximally_mixed_values() {
    let mm = DensityMatrix::maximally_mixed(2).unwrap();
    let sz = HermitianMatrix::from_real_diagonal(&[1.0, -1.0]);
    for payload in [sigma_x(), sz] {
        let a = TangentVector::minus(mm.clone(), payload).unwrap();
        for f in registered_functions() {
            assert!((monotone_metric(&f, &a, &a).unwrap() - 4.0).abs() < 1e-12, "{f}");
        }
        for method in BkmMethod::ALL {
            assert!((bkm_metric(&a, &a, method).unwrap() - 4.0).abs() < 1e-10);
        }
    }
}

#[test]
fn three_forms_agree_on_random_inputs() {
    for dim in [2, 3, 4] {
        let worst = (0..100u64)
            .map(|i| {
                let mut rng = rng_for(1, i);
                let rho = random_state(&mut rng, dim);
                let a = random_tangent(&mut rng, &rho);
                let b = random_tangent(&mut rng, &rho);
                bkm_forms(&a, &b).unwrap().relative_deviation
            })
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "dim {dim}: {worst:e}");
    }
}

#[test]
fn registered_functions_are_symmetric_and_normalized() {
    let grid: Vec<f64> = (0..=120).map(|k| 10f64.powf(-6.0 + 0.1 * k as f64)).collect();
    for f in registered_functions() {
        assert!((f.eval(1.0) - 1.0).abs() < 1e-15);
        for &t in &grid {
            let rel = (f.eval(t) - t * f.eval(1.0 / t)).abs() / f.eval(t);
            assert!(rel < 1e-12, "{f} at {t}");
        }
    }
}

#[test]
fn rld_kernel_example() {
    let out = petz_kernel_apply(&OperatorMonotoneFunction::rld(), &qubit(), &sigma_x());
    assert!((&out - &sigma_x().scale(8.0 / 3.0)).max_abs() < 1e-14);
}

#[test]
fn metric_matrix_values() {
    let chart = ExpChart::with_dim(2).unwrap();
    let theta3 = 3f64.ln() / 2f64.sqrt();
    let g = metric_matrix_in_chart(&OperatorMonotoneFunction::bkm(), &chart, &[0.0, 0.0, theta3]).unwrap();
    // classical variance of X₃ = diag(1, −1)/√2 under (3/4, 1/4)
    let eta3 = 0.5 / 2f64.sqrt();
    assert!((g.entries[(2, 2)] - (0.5 - eta3 * eta3)).abs() < 1e-13);
    assert!((g.entries[(2, 2)] - 0.375).abs() < 1e-13);
    for s in 0..50u64 {
        let theta = random_coords(&mut rng_for(8, s), 3, 1.5);
        for f in registered_functions() {
            let g = metric_matrix_in_chart(&f, &chart, &theta).unwrap();
            assert!(g.min_eigenvalue() > 0.0);
        }
    }
}

#[test]
fn extension_matches_resolvent_form() {
    let bkm = OperatorMonotoneFunction::bkm();
    for dim in [2, 3] {
        for i in 0..20u64 {
            let mut rng = rng_for(31, i);
            let rho = random_state(&mut rng, dim);
            let a = random_hermitian(&mut rng, dim);
            let b = random_hermitian(&mut rng, dim);
            let ext = extend_metric(&bkm, &rho, &a, &b);
            let raw = resolvent_integral(&rho, &a, &b).unwrap();
            assert!((ext - raw).abs() < 1e-8 * (1.0 + ext.abs()), "{ext} vs {raw}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_ordering(dim in 2usize..=4, seed in any::<u64>()) {
        let mut rng = rng_for(seed, 0);
        let rho = random_state(&mut rng, dim);
        let a = random_tangent(&mut rng, &rho);
        let g = |f: OperatorMonotoneFunction| monotone_metric(&f, &a, &a).unwrap();
        let (rld, bkm, sld) = (g(OperatorMonotoneFunction::rld()), g(OperatorMonotoneFunction::bkm()), g(OperatorMonotoneFunction::sld()));
        prop_assert!(rld >= bkm - 1e-10 * rld);
        prop_assert!(bkm >= sld - 1e-10 * bkm);
    }

    #[test]
    fn symmetric_and_bilinear(dim in 2usize..=3, seed in any::<u64>(), c in -3.0f64..3.0) {
        let mut rng = rng_for(seed, 1);
        let rho = random_state(&mut rng, dim);
        let a = random_tangent(&mut rng, &rho);
        let b = random_tangent(&mut rng, &rho);
        let d = random_tangent(&mut rng, &rho);
        for f in registered_functions() {
            let ab = monotone_metric(&f, &a, &b).unwrap();
            let scale = monotone_metric(&f, &a, &a).unwrap().max(monotone_metric(&f, &b, &b).unwrap());
            prop_assert!((ab - monotone_metric(&f, &b, &a).unwrap()).abs() < 1e-12 * scale);
            let lin = monotone_metric(&f, &a, &b.axpy(c, &d).unwrap()).unwrap();
            let want = ab + c * monotone_metric(&f, &a, &d).unwrap();
            prop_assert!((lin - want).abs() < 1e-12 * scale * (1.0 + c.abs()));
        }
    }

    #[test]
    fn commuting_universality(dim in 2usize..=4, seed in any::<u64>()) {
        // diagonal ρ and diagonal traceless A commute
        let mut rng = rng_for(seed, 2);
        let rho = random_state(&mut rng, dim);
        let diag: Vec<f64> = rho.eigenvalues().to_vec();
        let rho = DensityMatrix::from_diagonal(&diag).unwrap();
        let mut a: Vec<f64> = (0..dim).map(|k| (k as f64 + 1.0).sin()).collect();
        let mean = a.iter().sum::<f64>() / dim as f64;
        a.iter_mut().for_each(|x| *x -= mean);
        let v = TangentVector::minus(rho, HermitianMatrix::from_real_diagonal(&a)).unwrap();
        let fisher: f64 = a.iter().zip(&diag).map(|(x, p)| x * x / p).sum();
        for f in monotone() {
            prop_assert!((monotone_metric(&f, &v, &v).unwrap() - fisher).abs() < 1e-10 * fisher.max(1.0));
        }
    }
}

#[test]
fn positive_on_nonzero_tangents() {
    let chart = ExpChart::with_dim(3).unwrap();
    assert_eq!(chart.len(), 8);
    for i in 0..20u64 {
        let mut rng = rng_for(5, i);
        let rho = random_state(&mut rng, 3);
        let a = random_tangent(&mut rng, &rho);
        for f in registered_functions() {
            assert!(monotone_metric(&f, &a, &a).unwrap() > 0.0);
        }
    }
}
