//! Reference computations shared by the integration tests. Everything here
//! is written from the closed-form expressions or from generic numerics and
//! deliberately avoids the library's own helpers.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

pub type Mat2 = [[Complex64; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[Complex64::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Dense `exp(X)` by scaling and squaring with a truncated Taylor series.
pub fn expm2(x: &Mat2) -> Mat2 {
    let norm = x.iter().flatten().map(|z| z.norm()).sum::<f64>();
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let y = x.map(|row| row.map(|z| z * scale));
    let one = Complex64::new(1.0, 0.0);
    let mut result = [[one, Complex64::default()], [Complex64::default(), one]];
    let mut term = result;
    for k in 1..=24 {
        term = mat_mul(&term, &y).map(|row| row.map(|z| z / k as f64));
        for i in 0..2 {
            for j in 0..2 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mat_mul(&result, &result);
    }
    result
}

/// `exp[−i T (2παp σx + M σz)]`.
pub fn dirac_propagator(p: f64, mass: f64, alpha: f64, period: f64) -> Mat2 {
    let a = Complex64::new(2.0 * PI * alpha * p, 0.0);
    let m = Complex64::new(mass, 0.0);
    let minus_i_t = Complex64::new(0.0, -period);
    expm2(&[[minus_i_t * m, minus_i_t * a], [minus_i_t * a, -minus_i_t * m]])
}

/// Drive amplitude and phase of the averaged Hamiltonian.
pub fn drive(kick: f64, period: f64, alpha: f64) -> (f64, f64) {
    let c = 1.0 / period + (PI * alpha).powi(2) / 3.0;
    let s = PI * alpha;
    (kick * (c * c + s * s).sqrt(), (s / c).atan())
}

/// Analytic packet-center momentum.
pub fn p_center(t: f64, p0: f64, kick: f64, period: f64, alpha: f64) -> f64 {
    let (a, ds) = drive(kick, period, alpha);
    let r = a / (2.0 * PI * alpha);
    p0 + r * ds.cos() - r * (2.0 * PI * alpha * t + ds).cos()
}

/// Zeros of `p_center` within one Bloch period, by sign scan and bisection.
pub fn p_center_zeros(p0: f64, kick: f64, period: f64, alpha: f64) -> Vec<f64> {
    let f = |t: f64| p_center(t, p0, kick, period, alpha);
    let tb = 1.0 / alpha;
    let steps = 10_000;
    let mut zeros = Vec::new();
    for i in 0..steps {
        let (mut lo, mut hi) = (tb * i as f64 / steps as f64, tb * (i + 1) as f64 / steps as f64);
        if f(lo).signum() == f(hi).signum() {
            continue;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if f(lo).signum() == f(mid).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        zeros.push(0.5 * (lo + hi));
    }
    zeros
}

/// Single-passage tunneling probability from the sweep rate at the crossing.
pub fn lz(mass: f64, kick: f64, period: f64, alpha: f64, p0: f64) -> f64 {
    let (a, ds) = drive(kick, period, alpha);
    let shifted = 2.0 * PI * alpha * p0 + a * ds.cos();
    (-mass * mass / (2.0 * alpha * (a * a - shifted * shifted).abs().sqrt())).exp()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
