use num_complex::Complex64;
use proptest::prelude::*;
use qms_thermo::eigen::{herm_eig, sqrt_psd};
use qms_thermo::random::{self, seeded};
use qms_thermo::{expm, CMatrix, DensityMatrix};

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    a.distance(b) / b.frobenius_norm().max(f64::MIN_POSITIVE)
}

#[test]
fn eig_reconstructs_and_is_orthonormal() {
    let mut rng = seeded(100);
    for n in 1..=12 {
        for _ in 0..10 {
            let h = random::hermitian(n, &mut rng);
            let s = herm_eig(&h).unwrap();
            assert!(rel(&s.reconstruct(), &h) < 1e-10);
            let v = &s.eigenvectors;
            assert!(v.adjoint().matmul(v).distance(&CMatrix::identity(n)) < 1e-10);
            assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}

#[test]
fn eig_handles_degenerate_clusters() {
    let mut rng = seeded(101);
    let u = random::unitary(5, &mut rng);
    let h = u
        .matmul(&CMatrix::from_diag(&[1.0, 1.0, 1.0, -2.0, 3.0]))
        .matmul(&u.adjoint())
        .hermitian_part();
    let a = herm_eig(&h).unwrap();
    let b = herm_eig(&h).unwrap();
    assert!(a.degenerate);
    assert_eq!(a, b);
    assert!(rel(&a.reconstruct(), &h) < 1e-10);
}

#[test]
fn sqrt_squares_back_for_random_psd() {
    let mut rng = seeded(102);
    for k in 0..100 {
        let n = 2 + k % 7;
        let g = random::gaussian_matrix(n, &mut rng);
        // rank-deficient every third sample
        let g = if k % 3 == 0 {
            let mut m = g.into_array();
            m.column_mut(0).fill(Complex64::new(0.0, 0.0));
            CMatrix::new(m).unwrap()
        } else {
            g
        };
        let m = g.matmul(&g.adjoint()).hermitian_part();
        let r = sqrt_psd(&m).unwrap();
        assert!(r.is_hermitian(1e-12));
        assert!(r.matmul(&r).distance(&m) < 1e-10 * m.frobenius_norm().max(1.0));
        assert!(herm_eig(&r).unwrap().min_eigenvalue() >= -1e-12);
    }
}

#[test]
fn sqrt_of_equilibrium_density() {
    let a = CMatrix::from_real_rows(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 2.0]])
        .unwrap();
    let rho = qms_thermo::equilibrium(&a).unwrap().rho;
    let r = sqrt_psd(rho.matrix()).unwrap();
    assert!(r.matmul(&r).distance(rho.matrix()) < 1e-10);
}

#[test]
fn expm_matches_spectral_exponential() {
    let mut rng = seeded(103);
    for _ in 0..20 {
        let h = random::hermitian(4, &mut rng);
        let s = herm_eig(&h).unwrap();
        let spectral = s.map(f64::exp);
        assert!(rel(&expm(&h), &spectral) < 1e-10);
    }
}

#[test]
fn expm_inverse_pair() {
    let mut rng = seeded(104);
    for n in 2..=6 {
        for _ in 0..5 {
            let norm = 5.0 * (0.2 + 0.8 * (n as f64 / 6.0));
            let h = random::hermitian_with_norm(n, norm, &mut rng);
            let prod = expm(&(-&h)).matmul(&expm(&h));
            assert!(prod.distance(&CMatrix::identity(n)) < 1e-9);
        }
    }
}

#[test]
fn density_from_random_sampler_is_valid() {
    let mut rng = seeded(105);
    for n in 2..=6 {
        let rho = random::density(n, &mut rng);
        assert!(DensityMatrix::new(rho.matrix().clone()).is_ok());
    }
}

fn arb_matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n * n).prop_map(move |v| {
        CMatrix::from_row_major(n, v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect())
            .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vectorize_round_trip(m in (1usize..6).prop_flat_map(arb_matrix)) {
        let back = CMatrix::devectorize(&m.vectorize()).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn expm_scalar_shift(m in (1usize..6).prop_flat_map(arb_matrix), s in -3.0f64..3.0) {
        let lhs = expm(&m.shift(Complex64::new(s, 0.0)));
        let rhs = expm(&m).scale_real(s.exp());
        prop_assert!(rel(&lhs, &rhs) < 1e-10, "rel = {}", rel(&lhs, &rhs));
    }

    #[test]
    fn vec_of_product_is_kronecker(a in arb_matrix(3), x in arb_matrix(3), b in arb_matrix(3)) {
        // vec(A X B) = (Bᵀ ⊗ A) vec(X)
        let lhs = a.matmul(&x).matmul(&b).vectorize();
        let vx = x.vectorize();
        let mut rhs = vec![Complex64::new(0.0, 0.0); 9];
        for (r, slot) in rhs.iter_mut().enumerate() {
            let (i, j) = (r % 3, r / 3);
            for c in 0..9 {
                let (k, l) = (c % 3, c / 3);
                *slot += b.get(l, j) * a.get(i, k) * vx[c];
            }
        }
        for (p, q) in lhs.iter().zip(&rhs) {
            prop_assert!((p - q).norm() < 1e-12);
        }
    }
}
