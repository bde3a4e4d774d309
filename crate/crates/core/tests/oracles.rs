//! Independent oracles for the oscillator functions and the Dirac oscillator.

use jc_susy::fock::{hermite_functions, nonphysical_functions, phi_nonphys, FockTruncation};
use jc_susy::models::build_dirac_ho;
use jc_susy::spectra::numeric_spectrum;
use num_complex::Complex64;
use proptest::prelude::*;

/// Physicists' Hermite polynomial from the explicit sum.
fn hermite_sum(n: usize, z: Complex64) -> Complex64 {
    let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..=n / 2 {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        acc += (2.0 * z).powu((n - 2 * m) as u32) * (sign / (fact(m) * fact(n - 2 * m)));
    }
    acc * fact(n)
}

fn psi_oracle(n: usize, z: Complex64) -> Complex64 {
    let fact: f64 = (1..=n).map(|v| v as f64).product();
    let norm = std::f64::consts::PI.powf(-0.25) / (2f64.powi(n as i32) * fact).sqrt();
    hermite_sum(n, z) * (-z * z / 2.0).exp() * norm
}

/// `χₙ(x) = i⁻ⁿ ψₙ(ix)`.
fn chi_oracle(n: usize, x: f64) -> f64 {
    let v = psi_oracle(n, Complex64::new(0.0, x)) * Complex64::i().powi(-(n as i32));
    assert!(v.im.abs() <= 1e-9 * v.re.abs().max(1.0));
    v.re
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #[test]
    fn hermite_functions_match_sum(x in -4.0f64..4.0) {
        let v = hermite_functions(12, x).unwrap();
        for (n, got) in v.iter().enumerate() {
            let want = psi_oracle(n, Complex64::new(x, 0.0)).re;
            prop_assert!((got - want).abs() <= 1e-12 * want.abs() + 1e-13, "n = {n}: {got} vs {want}");
        }
    }

    #[test]
    fn nonphysical_match_complex_argument(x in -3.0f64..3.0) {
        let v = nonphysical_functions(12, x).unwrap();
        for (n, got) in v.iter().enumerate() {
            let want = chi_oracle(n, x);
            prop_assert!((got - want).abs() <= 1e-12 * want.abs() + 1e-13, "n = {n}: {got} vs {want}");
        }
    }
}

#[test]
fn phi_reference_values() {
    // φ₋₁ is the Gaussian growing mode; φ₋₂ = √2 x φ₋₁
    let g = std::f64::consts::PI.powf(-0.25) * 0.5f64.exp();
    assert!(rel(phi_nonphys(1, 1.0).unwrap(), g) < 1e-14);
    assert!(rel(phi_nonphys(2, 1.0).unwrap(), std::f64::consts::SQRT_2 * g) < 1e-14);
    assert!(rel(phi_nonphys(3, 2.0).unwrap(), chi_oracle(2, 2.0)) < 1e-13);
}

#[test]
fn hermite_functions_orthonormal() {
    let h = 0.005;
    let n_pts = (24.0 / h) as usize + 1;
    let samples: Vec<Vec<f64>> = (0..n_pts)
        .map(|i| hermite_functions(10, -12.0 + i as f64 * h).unwrap())
        .collect();
    for m in 0..=10 {
        for n in 0..=m {
            // integrand vanishes at the ends, so the plain sum is the trapezoid rule
            let s: f64 = samples.iter().map(|v| v[m] * v[n]).sum::<f64>() * h;
            let want = if m == n { 1.0 } else { 0.0 };
            assert!((s - want).abs() < 1e-10, "<{m}|{n}> = {s}");
        }
    }
}

#[test]
fn dirac_oscillator_spectrum() {
    let k = 2usize;
    let t = FockTruncation::new(12).unwrap();
    let num = numeric_spectrum(&build_dirac_ho(k, &t)).unwrap();
    let sk = (k as f64).sqrt();
    // paired blocks ±√(m + k), the unpaired lower ground −√k and the cut-off upper top +√k
    let mut want: Vec<f64> = (1..=12)
        .flat_map(|m| {
            let r = ((m + k) as f64).sqrt();
            [-r, r]
        })
        .chain([-sk, sk])
        .collect();
    want.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(num.len(), want.len());
    for (a, b) in num.iter().zip(&want) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}
