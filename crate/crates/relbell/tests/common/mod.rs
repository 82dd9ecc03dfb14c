//! Shared test oracles and helpers, independent of the library's own
//! numerics wherever they are used as evidence:
//!
//! * a two-qubit state-vector computation of the singlet correlator,
//! * a brute-force midpoint-rule integrator for cone-averaged S curves,
//! * seeded random direction generators.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use relbell::{chsh_s, ChshSettings, FrameConfig, MomentumShell, Vec3};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform direction on the unit sphere.
pub fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    let z = 1.0 - 2.0 * rng.random::<f64>();
    let phi = rng.random::<f64>() * std::f64::consts::TAU;
    let s = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(s * phi.cos(), s * phi.sin(), z)
}

/// Uniform direction perpendicular to `axis` (axis need not be unit).
pub fn random_perpendicular_unit(rng: &mut ChaCha8Rng, axis: Vec3) -> Vec3 {
    loop {
        let r = random_unit(rng);
        let p = r - axis * (r.dot(axis) / axis.norm_sqr());
        if p.norm() > 1e-3 {
            return p.normalized().unwrap();
        }
    }
}

/// <psi| (a.sigma) x (b.sigma) |psi> on the two-qubit singlet
/// (|01> - |10>)/sqrt(2), evaluated with explicit 2x2 Pauli matrices and a
/// 4-component state vector. Exact up to rounding: equals -(a.b).
pub fn singlet_oracle(a: Vec3, b: Vec3) -> f64 {
    fn pauli(n: Vec3) -> [[Complex64; 2]; 2] {
        [
            [Complex64::new(n.z, 0.0), Complex64::new(n.x, -n.y)],
            [Complex64::new(n.x, n.y), Complex64::new(-n.z, 0.0)],
        ]
    }
    let pa = pauli(a);
    let pb = pauli(b);
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    // Index 2*i_a + i_b over basis |i_a i_b>.
    let mut psi = [Complex64::new(0.0, 0.0); 4];
    psi[1] = Complex64::new(amp, 0.0);
    psi[2] = Complex64::new(-amp, 0.0);

    let mut acc = Complex64::new(0.0, 0.0);
    for ia in 0..2 {
        for ib in 0..2 {
            for ja in 0..2 {
                for jb in 0..2 {
                    acc += psi[2 * ia + ib].conj() * pa[ia][ja] * pb[ib][jb] * psi[2 * ja + jb];
                }
            }
        }
    }
    assert!(acc.im.abs() < 1e-14, "correlator should be real");
    acc.re
}

/// Brute-force cumulative cone averages of S by the midpoint rule on an
/// `n_theta` x `n_phi` full-sphere grid.
///
/// Returns the averages at theta' = j pi / steps for j = 1..=steps;
/// `n_theta` must be a multiple of `steps` so every cone boundary falls
/// exactly between grid rows. Rows are evaluated in parallel but summed in a
/// fixed order.
pub fn midpoint_cap_curve(
    settings: &ChshSettings,
    shell: &MomentumShell,
    frame: &FrameConfig,
    n_theta: usize,
    n_phi: usize,
    steps: usize,
) -> Vec<f64> {
    assert_eq!(n_theta % steps, 0, "grid must align with the theta' steps");
    let dtheta = std::f64::consts::PI / n_theta as f64;
    let dphi = std::f64::consts::TAU / n_phi as f64;

    let rows: Vec<f64> = (0..n_theta)
        .into_par_iter()
        .map(|i| {
            let theta = (i as f64 + 0.5) * dtheta;
            let mut acc = 0.0;
            for k in 0..n_phi {
                let phi = (k as f64 + 0.5) * dphi;
                acc += chsh_s(settings, theta, phi, shell, frame).unwrap();
            }
            theta.sin() * acc
        })
        .collect();

    let rows_per_step = n_theta / steps;
    let mut out = Vec::with_capacity(steps);
    let mut cum = 0.0;
    for (j, chunk) in rows.chunks(rows_per_step).enumerate() {
        cum += chunk.iter().sum::<f64>();
        let theta_prime = (j as f64 + 1.0) * std::f64::consts::PI / steps as f64;
        let solid_angle = std::f64::consts::TAU * (1.0 - theta_prime.cos());
        out.push(cum * dtheta * dphi / solid_angle);
    }
    out
}
