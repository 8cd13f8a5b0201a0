use ndarray::Array2;
use num_complex::Complex64;
use qms_thermo::random::{self, seeded};
use qms_thermo::{
    build_dbc_generator, build_l0, embed_diagonal, evolve_classical, project_diagonal, reduce,
    CMatrix, ClassicalChain, DbcGenerator, DensityMatrix,
};

fn order_by_invariant(chain: &ClassicalChain, target: &[f64]) -> ClassicalChain {
    let perm: Vec<usize> = target
        .iter()
        .map(|t| {
            chain
                .invariant()
                .iter()
                .position(|s| (s - t).abs() < 1e-9)
                .expect("invariant entry not found")
        })
        .collect();
    chain.relabel(&perm).unwrap()
}

fn assert_q(chain: &ClassicalChain, want: [[f64; 3]; 3], tol: f64) {
    for i in 0..3 {
        for k in 0..3 {
            let got = chain.q()[[i, k]];
            assert!((got - want[i][k]).abs() < tol, "Q[{i}][{k}] = {got}, want {}", want[i][k]);
        }
    }
}

fn random_generators(count: usize, seed: u64) -> Vec<DbcGenerator> {
    let mut rng = seeded(seed);
    (0..count)
        .map(|k| build_dbc_generator(&random::faithful_density(2 + k % 4, 0.05, &mut rng)).unwrap())
        .collect()
}

#[test]
fn diagonal_sigma_example() {
    let target = [0.5, 1.0 / 3.0, 1.0 / 6.0];
    let g = build_dbc_generator(&DensityMatrix::from_probabilities(&target).unwrap()).unwrap();
    let chain = order_by_invariant(&reduce(&g), &target);
    let (s2, s3, s6) = (2.0_f64.sqrt(), 3.0_f64.sqrt(), 6.0_f64.sqrt());
    let want = [
        [-2.0 * (s2 / s3 + 1.0 / s3), 2.0 * s2 / s3, 2.0 / s3],
        [2.0 * s3 / s2, -2.0 * (s3 / s2 + s3 / s6), 2.0 * s3 / s6],
        [2.0 * s3, 2.0 * s2, -2.0 * (s3 + s2)],
    ];
    assert_q(&chain, want, 1e-12);
    assert!(chain.stationarity_residual() < 1e-12);
    for (got, want) in chain.invariant().iter().zip(target) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn complex_sigma_example() {
    let z = Complex64::new(0.0, 0.0);
    let sigma = CMatrix::from_row_major(
        3,
        vec![
            Complex64::new(0.25, 0.0),
            z,
            Complex64::new(0.0, 0.125),
            z,
            Complex64::new(0.5, 0.0),
            z,
            Complex64::new(0.0, -0.125),
            z,
            Complex64::new(0.25, 0.0),
        ],
    )
    .unwrap();
    let rho = DensityMatrix::new(sigma).unwrap();
    for (got, want) in rho.eigenvalues().iter().zip([0.125, 0.375, 0.5]) {
        assert!((got - want).abs() < 1e-12);
    }
    let target = [0.125, 0.375, 0.5];
    let chain = order_by_invariant(&reduce(&build_dbc_generator(&rho).unwrap()), &target);
    let s3 = 3.0_f64.sqrt();
    let want = [
        [-2.0 * (s3 + 2.0), 2.0 * s3, 4.0],
        [2.0 / s3, -6.0 / s3, 4.0 / s3],
        [1.0, s3, -(1.0 + s3)],
    ];
    assert_q(&chain, want, 1e-10);
    assert!(chain.stationarity_residual() < 1e-10);
}

#[test]
fn uniform_sigma_chain() {
    let chain = reduce(&build_l0(3).unwrap());
    assert_q(&chain, [[-4.0, 2.0, 2.0], [2.0, -4.0, 2.0], [2.0, 2.0, -4.0]], 1e-12);
}

#[test]
fn chain_invariants_for_random_sigma() {
    for g in random_generators(20, 400) {
        let chain = reduce(&g);
        assert!(chain.row_sum_residual() < 1e-12);
        assert!(chain.stationarity_residual() < 1e-12);
        assert!(chain.detailed_balance_residual() < 1e-10);
        let n = g.dim();
        for i in 0..n {
            for k in 0..n {
                if i != k {
                    assert!(chain.q()[[i, k]] > 0.0);
                }
            }
        }
        let spec = chain.spectrum().unwrap();
        assert!(spec[n - 1].abs() < 1e-10);
        assert!(spec[..n - 1].iter().all(|&x| x < -1e-10));
    }
}

#[test]
fn chain_matches_generator_matrix_elements() {
    for g in random_generators(10, 401) {
        let chain = reduce(&g);
        let n = g.dim();
        for l in 0..n {
            for k in 0..n {
                let fk = g.jump(k, k);
                let v = g.jump(l, l).matmul(&g.apply(&fk).unwrap()).trace();
                assert!((v.re - chain.q()[[l, k]]).abs() < 1e-10 && v.im.abs() < 1e-10);
            }
        }
    }
}

#[test]
fn chain_depends_only_on_spectrum() {
    let mut rng = seeded(402);
    for n in 2..=5 {
        let rho = random::faithful_density(n, 0.05, &mut rng);
        let u = random::unitary(n, &mut rng);
        let rotated = u.matmul(rho.matrix()).matmul(&u.adjoint()).hermitian_part();
        let rotated = DensityMatrix::new(rotated.scale_real(1.0 / rotated.trace().re)).unwrap();
        let a = reduce(&build_dbc_generator(&rho).unwrap());
        let b = reduce(&build_dbc_generator(&rotated).unwrap());
        let diff = (a.q() - b.q()).iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        assert!(diff < 1e-9, "{diff}");
    }
}

#[test]
fn quantum_and_classical_evolutions_agree() {
    let mut rng = seeded(403);
    for g in random_generators(10, 404) {
        let chain = reduce(&g);
        let p0 = random::probability_vector(g.dim(), &mut rng);
        let rho0 = embed_diagonal(&g, &p0).unwrap();
        for t in [0.1, 1.0, 5.0] {
            let quantum = project_diagonal(&g, &g.evolve(t, rho0.matrix(), true).unwrap()).unwrap();
            let classical = evolve_classical(&chain, t, &p0).unwrap();
            for (a, b) in quantum.iter().zip(&classical) {
                assert!((a - b).abs() < 1e-8, "t={t}: {a} vs {b}");
            }
        }
        let limit = evolve_classical(&chain, 100.0, &p0).unwrap();
        for (a, b) in limit.iter().zip(chain.invariant()) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}

#[test]
fn invalid_chains_and_inputs_are_rejected() {
    let bad_rows = Array2::from_shape_vec((2, 2), vec![-1.0, 2.0, 1.0, -1.0]).unwrap();
    assert!(ClassicalChain::new(bad_rows, vec![0.5, 0.5]).is_err());
    let good = Array2::from_shape_vec((2, 2), vec![-1.0, 1.0, 1.0, -1.0]).unwrap();
    assert!(ClassicalChain::new(good.clone(), vec![0.5, 0.5]).is_ok());
    assert!(ClassicalChain::new(good, vec![0.9, 0.1]).is_err());

    let chain = reduce(&build_l0(3).unwrap());
    assert!(evolve_classical(&chain, -1.0, &[1.0, 0.0, 0.0]).is_err());
    assert!(evolve_classical(&chain, 1.0, &[0.5, 0.6, -0.1]).is_err());
    assert!(evolve_classical(&chain, 1.0, &[0.5, 0.5]).is_err());
    assert!(chain.relabel(&[0, 0, 1]).is_err());
}

#[test]
fn chain_json_round_trip() {
    let chain = reduce(&random_generators(1, 405)[0]);
    let text = qms_thermo::json::to_string(&chain).unwrap();
    let back: ClassicalChain = serde_json::from_str(&text).unwrap();
    assert_eq!(back, chain);
}
