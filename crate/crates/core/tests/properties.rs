use proptest::prelude::*;
use realspec::numerics::{
    cumulative_integral, eig_dense, spectral_derivative, ComplexMatrix, Grid1D, Grid2D,
};
use realspec::potential::{
    build_eta_p, build_partial_pt_2d, build_type1, GeneratorFunction, SampledPotential,
};
use realspec::propagate::{propagate, PropagationOptions};
use realspec::spectrum::{conjugate_pairing, full_spectrum, full_spectrum_with, SpectrumOptions};
use realspec::zs::zs_eigenvalues;
use realspec::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gaussian(grid: &Grid1D, shift: f64, width: f64, amp: Complex64) -> Vec<Complex64> {
    grid.sample(|x| amp * (-((x - shift) / width).powi(2)).exp())
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Determinant by Gaussian elimination with partial pivoting.
fn det(m: &ComplexMatrix) -> Complex64 {
    let n = m.order();
    let mut a: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j)).collect())
        .collect();
    let mut d = c(1.0, 0.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))
            .unwrap();
        if p != k {
            a.swap(p, k);
            d = -d;
        }
        d *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                let t = a[k][j];
                a[i][j] -= f * t;
            }
        }
    }
    d
}

fn matrix(order: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), order * order).prop_map(move |v| {
        ComplexMatrix::from_row_major(order, v.into_iter().map(|(r, i)| c(r, i)).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn derivative_is_linear(
        a in (-3.0..3.0f64, -3.0..3.0f64),
        b in (-3.0..3.0f64, -3.0..3.0f64),
        s in -2.0..2.0f64,
        w in 0.8..2.0f64,
    ) {
        let grid = Grid1D::new(128, 12.0).unwrap();
        let f = gaussian(&grid, s, w, c(1.0, 0.0));
        let g = grid.sample(|x| c((x / 3.0).sin(), 0.0) * (-(x * x) / 8.0).exp());
        let (a, b) = (c(a.0, a.1), c(b.0, b.1));
        let mix: Vec<_> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let lhs = spectral_derivative(&mix, &grid, 1).unwrap();
        let df = spectral_derivative(&f, &grid, 1).unwrap();
        let dg = spectral_derivative(&g, &grid, 1).unwrap();
        let rhs: Vec<_> = df.iter().zip(&dg).map(|(x, y)| a * x + b * y).collect();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn first_derivative_twice_is_second(s in -2.0..2.0f64, w in 1.0..2.0f64) {
        let grid = Grid1D::new(128, 12.0).unwrap();
        let f = gaussian(&grid, s, w, c(0.5, -1.0));
        let d1 = spectral_derivative(&f, &grid, 1).unwrap();
        let dd = spectral_derivative(&d1, &grid, 1).unwrap();
        let d2 = spectral_derivative(&f, &grid, 2).unwrap();
        prop_assert!(max_diff(&dd, &d2) < 1e-9);
    }

    #[test]
    fn integral_then_derivative_is_identity(s in -2.0..2.0f64, w in 0.8..2.0f64, re in -2.0..2.0f64) {
        // Zero total integral keeps the antiderivative periodic.
        let grid = Grid1D::new(256, 15.0).unwrap();
        let f = grid.sample(|x| c(re, 1.0) * (x - s) * (-((x - s) / w).powi(2)).exp());
        let d = spectral_derivative(&cumulative_integral(&f, &grid).unwrap(), &grid, 1).unwrap();
        prop_assert!(max_diff(&d, &f) < 1e-6);
    }

    #[test]
    fn hermitian_matrices_have_real_eigenvalues(m in matrix(6)) {
        let h = ComplexMatrix::from_fn(6, |i, j| m.get(i, j) + m.get(j, i).conj());
        let e = eig_dense(&h, false).unwrap();
        prop_assert!(e.eigenvalues.iter().all(|z| z.im.abs() < 1e-10));
    }

    #[test]
    fn eigenvalues_sum_to_trace_and_multiply_to_det(m in matrix(5)) {
        let e = eig_dense(&m, true).unwrap();
        prop_assert_eq!(e.eigenvalues.len(), 5);
        prop_assert!(e.residuals_converged());
        let sum: Complex64 = e.eigenvalues.iter().sum();
        prop_assert!((sum - m.trace()).norm() < 1e-8 * m.frobenius_norm());
        let prod: Complex64 = e.eigenvalues.iter().product();
        let d = det(&m);
        prop_assert!((prod - d).norm() <= 1e-6 * d.norm().max(1e-12));
    }

    #[test]
    fn pairing_is_exact_for_conjugate_sets(
        pts in prop::collection::vec((-5.0..5.0f64, 0.01..3.0f64), 1..8),
        reals in prop::collection::vec(-5.0..5.0f64, 0..4),
    ) {
        let mut z: Vec<Complex64> = pts.iter().flat_map(|&(r, i)| [c(r, i), c(r, -i)]).collect();
        z.extend(reals.iter().map(|&r| c(r, 0.0)));
        let rep = conjugate_pairing(&z, 1e-12);
        prop_assert_eq!(rep.residual, 0.0);
        prop_assert_eq!(rep.unmatched, 0);
        z.push(c(0.0, 1.0));
        prop_assert!(conjugate_pairing(&z, 1e-8).unmatched >= 1);
    }

    #[test]
    fn type1_construction_identity(c0 in -1.0..1.0f64) {
        let grid = Grid1D::new(256, 20.0).unwrap();
        let g = GeneratorFunction::TanhPair { c0 };
        let v = build_type1(&g, &grid).unwrap();
        let s = g.sample(&grid, 1).unwrap();
        let worst = v.values.iter().zip(&s[1]).map(|(v, g1)| (v.im - g1.re).abs()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-12 * v.max_abs());
    }

    #[test]
    fn eta_p_construction_identity(d1 in 0.2..2.0f64, d2 in 0.0..2.5f64) {
        let grid = Grid1D::new(128, 20.0).unwrap();
        let h = GeneratorFunction::SechMix { d1, d2 };
        let v = build_eta_p(&h, &grid).unwrap();
        let s = h.sample(&grid, 1).unwrap();
        let worst = (0..128).map(|j| (v.values[j] - (s[1][j] - s[0][j] * s[0][j])).norm()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-12 * v.max_abs());
        let mirrored = (1..128).all(|j| (s[0][j].conj() - s[0][grid.mirror_index(j)]).norm() < 1e-15);
        prop_assert!(mirrored);
    }

    #[test]
    fn partial_pt_is_exact_on_the_grid(beta in 0.0..0.5f64, x0 in 0.5..2.5f64, y0 in 0.5..2.5f64) {
        let grid = Grid2D::square(16, 8.0).unwrap();
        let v = build_partial_pt_2d(x0, y0, beta, &grid).unwrap();
        let n = 16;
        for i in 1..n {
            for j in 0..n {
                let mirror = grid.index(n - i, j);
                prop_assert_eq!(v.values[grid.index(i, j)].conj(), v.values[mirror]);
            }
        }
        prop_assert!(v.symmetry.partial_pt_x);
    }

    #[test]
    fn real_propagation_conserves_norm(depth in 0.5..3.0f64, seed in any::<u64>()) {
        let grid = Grid1D::new(128, 15.0).unwrap();
        let v = SampledPotential::line(grid, grid.sample(|x| c(depth / x.cosh().powi(2), 0.0)), "well").unwrap();
        let psi0 = realspec::propagate::generic_initial_field(&v.domain, 1.0, 0.1, seed);
        let t = propagate(&v, &psi0, &PropagationOptions { z_end: 5.0, dz: 0.01, samples: 50 }).unwrap();
        prop_assert!(t.norms.iter().all(|n| *n > 0.0));
        prop_assert!(t.z_samples.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(t.norms.iter().all(|n| (n / t.norms[0] - 1.0).abs() < 1e-8));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn zs_eigenvalues_come_in_plus_minus_pairs(amp in 0.3..2.0f64, w in 0.7..1.5f64) {
        let grid = Grid1D::new(256, 30.0).unwrap();
        let g = grid.sample(|x| amp / (x / w).cosh());
        let r = zs_eigenvalues(&g, &grid).unwrap();
        for z in r.discrete_zeta() {
            let partner = r.discrete_zeta().iter().map(|y| (y + z).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(partner < 1e-8);
        }
        for (z, m) in r.zeta.iter().zip(&r.mu) {
            prop_assert_eq!(*m, -z * z);
        }
    }

    #[test]
    fn spectra_are_sorted_and_classified(depth in 0.5..3.0f64, tilt in -0.5..0.5f64) {
        let grid = Grid1D::new(128, 15.0).unwrap();
        let v = SampledPotential::line(
            grid,
            grid.sample(|x| c(depth / x.cosh().powi(2), tilt * x.tanh() / x.cosh())),
            "scarf",
        )
        .unwrap();
        let s = full_spectrum(&v, false).unwrap();
        prop_assert_eq!(s.eigenvalues.len(), 128);
        prop_assert_eq!(s.classification.len(), 128);
        prop_assert!(s.eigenvalues.windows(2).all(|w| (w[0].re, w[0].im) <= (w[1].re, w[1].im)));
        prop_assert!(s.localization_scores.iter().all(|l| l.is_finite() && (0.0..=1.0).contains(l)));
        prop_assert!(s.pairing_residual >= 0.0);
    }

    #[test]
    fn real_wells_have_real_spectra(depth in 0.5..4.0f64, w in 0.5..2.0f64) {
        let grid = Grid1D::new(128, 15.0).unwrap();
        let v = SampledPotential::line(grid, grid.sample(|x| c(depth / (x / w).cosh().powi(2), 0.0)), "well").unwrap();
        let s = full_spectrum(&v, false).unwrap();
        prop_assert!(s.eigenvalues.iter().all(|z| z.im.abs() < 1e-10));
    }

    #[test]
    fn pt_families_pair_their_discrete_eigenvalues(c0 in -0.1..0.6f64) {
        let grid = Grid1D::new(256, 20.0).unwrap();
        let v = build_type1(&GeneratorFunction::TanhPair { c0 }, &grid).unwrap();
        let s = full_spectrum_with(&v, &SpectrumOptions::default()).unwrap();
        prop_assert!(s.pairing_residual < 1e-8, "{}", s.pairing_residual);
    }
}
