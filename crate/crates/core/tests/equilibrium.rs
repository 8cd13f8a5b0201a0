use qms_thermo::equilibrium::{trace_product_gap, EquilibriumResult};
use qms_thermo::random::{self, seeded};
use qms_thermo::{
    build_dbc_generator, entropy, entropy_via_generator, equilibrium, equilibrium_generator,
    pressure_functional, rate_functional, solve_kappa, transfer_apply, verify_rate_infimum,
    CMatrix, DensityMatrix,
};

fn paper_a() -> CMatrix {
    CMatrix::from_real_rows(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 2.0]])
        .unwrap()
}

#[test]
fn entropy_range_and_uniform_maximum() {
    let mut rng = seeded(300);
    for n in 2..=6 {
        for _ in 0..30 {
            let rho = random::density(n, &mut rng);
            let h = entropy(&rho);
            assert!(h <= 1e-12 && h >= 2.0 - 2.0 * n as f64 - 1e-12);
            assert!(h < -1e-10, "non-uniform spectrum should have negative entropy");
        }
        assert!(entropy(&DensityMatrix::maximally_mixed(n)).abs() < 1e-10);
    }
}

#[test]
fn entropy_formulas_agree() {
    let mut rng = seeded(301);
    for n in 2..=6 {
        for _ in 0..50 {
            let rho = random::density(n, &mut rng);
            assert!((entropy(&rho) - entropy_via_generator(&rho)).abs() < 1e-9);
        }
    }
}

#[test]
fn entropy_unitary_invariance() {
    let mut rng = seeded(302);
    for n in 2..=5 {
        for _ in 0..10 {
            let rho = random::density(n, &mut rng);
            let u = random::unitary(n, &mut rng);
            let rotated = u.matmul(rho.matrix()).matmul(&u.adjoint()).hermitian_part();
            let tr = rotated.trace().re;
            let rotated = DensityMatrix::new(rotated.scale_real(1.0 / tr)).unwrap();
            assert!((entropy(&rho) - entropy(&rotated)).abs() < 1e-10);
        }
    }
}

fn check_equilibrium(eq: &EquilibriumResult) {
    let n = eq.dim() as f64;
    assert!(eq.hamiltonian_spectrum.iter().all(|&a| eq.kappa > a));
    assert_eq!(eq.pressure, eq.kappa - 2.0 * n);
    let r = eq.residuals();
    assert!(r.lagrange_frame < 1e-9, "{r:?}");
    assert!(r.lagrange < 1e-9, "{r:?}");
    assert!(r.eigenrelation < 1e-9, "{r:?}");
    assert!(r.trace_identity < 1e-9, "{r:?}");
    assert!(r.quadratic < 1e-9, "{r:?}");
    assert!(r.normalization < 1e-12, "{r:?}");
    assert!(r.pressure < 1e-9, "{r:?}");
}

#[test]
fn maximizer_beats_random_densities() {
    let mut rng = seeded(303);
    let mut hamiltonians = vec![paper_a()];
    for k in 0..20 {
        let n = 2 + k % 4;
        hamiltonians.push(random::hermitian(n, &mut rng).scale_real(2.0));
    }
    for a in hamiltonians {
        let eq = equilibrium(&a).unwrap();
        check_equilibrium(&eq);
        let best = pressure_functional(&a, &eq.rho).unwrap();
        for _ in 0..200 {
            let rho = random::density(a.dim(), &mut rng);
            assert!(pressure_functional(&a, &rho).unwrap() <= best + 1e-9);
        }
        // local perturbations of the maximizer
        for _ in 0..20 {
            let d = random::density(a.dim(), &mut rng);
            let mix = (&eq.rho.matrix().scale_real(0.99) + &d.matrix().scale_real(0.01)).hermitian_part();
            let mix = DensityMatrix::new(mix.scale_real(1.0 / mix.trace().re)).unwrap();
            assert!(pressure_functional(&a, &mix).unwrap() <= best + 1e-9);
        }
    }
}

#[test]
fn scalar_shift_covariance() {
    let mut rng = seeded(304);
    for k in 0..10 {
        let n = 2 + k % 4;
        let a = random::hermitian(n, &mut rng);
        let c = -3.0 + 0.7 * k as f64;
        let base = equilibrium(&a).unwrap();
        let shifted = equilibrium(&a.shift(num_complex::Complex64::new(c, 0.0))).unwrap();
        assert!((shifted.kappa - base.kappa - c).abs() < 1e-10);
        assert!((shifted.pressure - base.pressure - c).abs() < 1e-10);
        assert!(shifted.rho.matrix().distance(base.rho.matrix()) < 1e-10);
    }
}

#[test]
fn kappa_root_properties() {
    let mut rng = seeded(305);
    for n in 1..=8 {
        for _ in 0..10 {
            let a: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(&mut rng, -10.0..10.0)).collect();
            let k = solve_kappa(&a).unwrap();
            let top = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!(k > top && k <= top + 2.0 * n as f64);
            let residual: f64 = a.iter().map(|x| 1.0 / (k - x)).sum::<f64>() - 0.5;
            assert!(residual.abs() < 1e-12, "n={n} residual={residual}");
        }
    }
}

#[test]
fn diagonal_hamiltonian_closed_form() {
    let a = [-1.0, 1.0, 2.0];
    let g = equilibrium_generator(&CMatrix::from_diag(&a)).unwrap();
    let k = solve_kappa(&a).unwrap();
    let w: Vec<f64> = a.iter().map(|x| (k - x).powi(-2)).collect();
    let total: f64 = w.iter().sum();
    let mut got = g.sigma_weights();
    got.sort_by(f64::total_cmp);
    let mut want: Vec<f64> = w.iter().map(|x| x / total).collect();
    want.sort_by(f64::total_cmp);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-12);
    }
}

#[test]
fn equilibrium_generator_is_stationary_on_rho() {
    let eq = equilibrium(&paper_a()).unwrap();
    let g = equilibrium_generator(&paper_a()).unwrap();
    assert!(g.apply_dual(eq.rho.matrix()).unwrap().frobenius_norm() < 1e-9);
    let r = g.check_dbc(20, 0);
    assert!(r.passed && r.symmetry_deviation < 1e-9 && r.modular_deviation < 1e-9);
}

#[test]
fn transfer_operator_linearity() {
    let mut rng = seeded(306);
    let a = random::hermitian(4, &mut rng);
    let x = random::gaussian_matrix(4, &mut rng);
    let y = random::gaussian_matrix(4, &mut rng);
    let (alpha, beta) = (num_complex::Complex64::new(0.3, -1.2), num_complex::Complex64::new(-2.0, 0.5));
    let lhs = transfer_apply(&a, &(&x.scale(alpha) + &y.scale(beta))).unwrap();
    let rhs = &transfer_apply(&a, &x).unwrap().scale(alpha) + &transfer_apply(&a, &y).unwrap().scale(beta);
    assert!(lhs.distance(&rhs) < 1e-12);
    let h = random::hermitian(4, &mut rng);
    assert!(transfer_apply(&a, &h).unwrap().is_hermitian(1e-12));
}

#[test]
fn rate_functional_lower_bound_and_equality() {
    let mut rng = seeded(307);
    for k in 0..20 {
        let n = 2 + k % 4;
        let rho = random::faithful_density(n, 0.05, &mut rng);
        let h = entropy(&rho);
        assert!((rate_functional(&rho, &rho.sqrt()).unwrap() - h).abs() < 1e-9);
        for _ in 0..100 {
            let w = random::positive_definite(n, 2.0, &mut rng);
            assert!(rate_functional(&rho, &w).unwrap() >= h - 1e-9);
        }
        // scaling the witness leaves the functional unchanged
        let w = random::positive_definite(n, 1.0, &mut rng);
        let a = rate_functional(&rho, &w).unwrap();
        let b = rate_functional(&rho, &w.scale_real(7.5)).unwrap();
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn rate_infimum_reports() {
    let rho = DensityMatrix::from_probabilities(&[0.5, 1.0 / 3.0, 1.0 / 6.0]).unwrap();
    let r = verify_rate_infimum(&rho, 50, 1).unwrap();
    assert!(r.passed);
    let s = 0.5_f64.sqrt() + (1.0_f64 / 3.0).sqrt() + (1.0_f64 / 6.0).sqrt();
    assert!((r.infimum_estimate - (2.0 * s * s - 6.0)).abs() < 1e-9);
    assert!(r.infimum_estimate >= r.entropy - 1e-9);

    let mut rng = seeded(308);
    for k in 0..20 {
        let rho = random::faithful_density(2 + k % 4, 0.05, &mut rng);
        let r = verify_rate_infimum(&rho, 40, k as u64).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.violations, 0);
    }
}

#[test]
fn trace_product_lemma() {
    let mut rng = seeded(309);
    for k in 0..500 {
        let n = 2 + k % 5;
        let b = random::positive_definite(n, 2.5, &mut rng);
        let g = random::gaussian_matrix(n, &mut rng);
        let u = g.matmul(&g.adjoint()).hermitian_part();
        let gap = trace_product_gap(&b, &u).unwrap();
        let scale = u.trace().re.powi(2);
        assert!(gap >= -1e-12 * scale, "gap {gap}");
    }
    // equality at B = I
    let mut rng = seeded(310);
    let g = random::gaussian_matrix(3, &mut rng);
    let u = g.matmul(&g.adjoint()).hermitian_part();
    assert!(trace_product_gap(&CMatrix::identity(3), &u).unwrap().abs() < 1e-12);
}

#[test]
fn equilibrium_generator_rejects_non_hermitian() {
    let a = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
    assert!(equilibrium(&a).is_err());
    assert!(equilibrium_generator(&a).is_err());
    // equilibrium densities are always faithful
    let mut rng = seeded(311);
    for _ in 0..10 {
        let a = random::hermitian(4, &mut rng).scale_real(5.0);
        let eq = equilibrium(&a).unwrap();
        assert!(eq.rho.is_faithful());
        assert!(build_dbc_generator(&eq.rho).is_ok());
    }
}
