//! Sanity checks on the test oracles themselves.

mod support;

use support::*;

#[test]
fn qr_oracle_on_triangular_and_companion() {
    let t = vec![
        vec![c(2.0, 0.0), c(1.0, 1.0), c(3.0, 0.0)],
        vec![c(0.0, 0.0), c(-1.0, 0.5), c(0.0, 2.0)],
        vec![c(0.0, 0.0), c(0.0, 0.0), c(0.25, 0.0)],
    ];
    let got = eigenvalues(&t);
    assert!(multiset_distance(&got, &[c(2.0, 0.0), c(-1.0, 0.5), c(0.25, 0.0)]) < 1e-12);

    // companion of (x − 1)(x − 2)(x − 3) = x³ − 6x² + 11x − 6
    let comp = vec![
        vec![c(6.0, 0.0), c(-11.0, 0.0), c(6.0, 0.0)],
        vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
    ];
    let got = eigenvalues(&comp);
    assert!(multiset_distance(&got, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]) < 1e-9);
}

#[test]
fn qr_oracle_on_rotation_and_permutation() {
    let rot = vec![vec![c(0.0, 0.0), c(-1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]];
    assert!(multiset_distance(&eigenvalues(&rot), &[c(0.0, 1.0), c(0.0, -1.0)]) < 1e-12);

    let n = 5;
    let shift: Dense = (0..n)
        .map(|i| (0..n).map(|j| if j == (i + 1) % n { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect())
        .collect();
    let roots: Vec<_> = (0..n)
        .map(|k| num_complex::Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    assert!(multiset_distance(&eigenvalues(&shift), &roots) < 1e-10);
}

#[test]
fn qr_oracle_trace_and_determinant_identities() {
    let mut rng = seeded(11);
    for n in 1..=7 {
        let entries = random_complex(&mut rng, n * n);
        let a: Dense = entries.chunks(n).map(|r| r.to_vec()).collect();
        let eig = eigenvalues(&a);
        let trace: num_complex::Complex64 = (0..n).map(|i| a[i][i]).sum();
        let prod: num_complex::Complex64 = eig.iter().product();
        assert!((eig.iter().sum::<num_complex::Complex64>() - trace).norm() < 1e-10);
        assert!((prod - det_cofactor(&a)).norm() < 1e-9);
    }
}

#[test]
fn cofactor_determinant_cases() {
    assert_eq!(det_cofactor(&identity(4)), c(1.0, 0.0));
    let a = vec![vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(3.0, 0.0), c(4.0, 0.0)]];
    assert_eq!(det_cofactor(&a), c(-2.0, 0.0));
}

#[test]
fn capacity_oracle_scalar_case() {
    // 1×1 at 0 dB: E[log₂(1 + |h|²)] with |h|² ~ Exp(1) equals e·E₁(1)/ln 2.
    let exact = 0.596_347_362_323_194 / std::f64::consts::LN_2;
    let got = capacity_oracle(1, 1, 0.0, 200_000, 5, None);
    assert!((got - exact).abs() < 0.01, "{got} vs {exact}");
}
