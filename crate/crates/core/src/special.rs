//! Bessel and Hankel functions of integer order and real positive argument.
//!
//! `J_n` comes from Miller's backward recurrence normalised by
//! `J_0 + 2 Σ J_{2k} = 1`; `Y_0`, `Y_1` from Neumann series in the `J_n` for
//! moderate arguments and from the Hankel asymptotic expansion for large ones.
//! Higher `Y_n` use forward recurrence, which is stable for the second kind.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// Above this argument the asymptotic expansion is used for orders 0 and 1;
// its smallest term is then around exp(-2x).
const ASYMPTOTIC_THRESHOLD: f64 = 20.0;

const RESCALE_LIMIT: f64 = 1e200;

/// `J_0(x), J_1(x), Y_0(x), Y_1(x)` for `x > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bessel01 {
    pub j0: f64,
    pub j1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Bessel01 {
    pub fn h0(&self) -> Complex64 {
        Complex64::new(self.j0, self.y0)
    }

    pub fn h1(&self) -> Complex64 {
        Complex64::new(self.j1, self.y1)
    }
}

/// Orders 0 and 1 of both kinds at once. `x` must be positive and finite.
pub fn bessel01(x: f64) -> Bessel01 {
    debug_assert!(x > 0.0 && x.is_finite(), "bessel01 needs x > 0, got {x}");
    if x > ASYMPTOTIC_THRESHOLD {
        let (j0, y0) = hankel_asymptotic(0, x);
        let (j1, y1) = hankel_asymptotic(1, x);
        return Bessel01 { j0, j1, y0, y1 };
    }
    let start = miller_start(1, x);
    let j = miller_sequence(start, start, x);
    neumann01(x, &j)
}

/// `J_0(x), ..., J_nmax(x)` for `x >= 0`.
pub fn bessel_j_seq(nmax: usize, x: f64) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite(), "bessel_j_seq needs finite x >= 0, got {x}");
    if x == 0.0 {
        let mut out = vec![0.0; nmax + 1];
        out[0] = 1.0;
        return out;
    }
    let start = miller_start(nmax, x);
    miller_sequence(start, nmax, x)
}

/// `Y_0(x), ..., Y_nmax(x)` for `x > 0`. Large orders overflow to `-inf`.
pub fn bessel_y_seq(nmax: usize, x: f64) -> Vec<f64> {
    let b = bessel01(x);
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(b.y0);
    if nmax >= 1 {
        out.push(b.y1);
    }
    for n in 1..nmax {
        let next = 2.0 * n as f64 / x * out[n] - out[n - 1];
        out.push(next);
    }
    out
}

/// `H^(1)_0(x), ..., H^(1)_nmax(x)` for `x > 0`.
pub fn hankel1_seq(nmax: usize, x: f64) -> Vec<Complex64> {
    let j = bessel_j_seq(nmax, x);
    let y = bessel_y_seq(nmax, x);
    j.iter().zip(&y).map(|(&a, &b)| Complex64::new(a, b)).collect()
}

pub fn bessel_j(n: usize, x: f64) -> f64 {
    bessel_j_seq(n, x)[n]
}

pub fn bessel_y(n: usize, x: f64) -> f64 {
    bessel_y_seq(n, x)[n]
}

pub fn hankel1(n: usize, x: f64) -> Complex64 {
    Complex64::new(bessel_j(n, x), bessel_y(n, x))
}

/// Derivatives from a sequence `f_0..f_nmax` of cylinder functions using
/// `f_n' = (f_{n-1} - f_{n+1}) / 2` and `f_0' = -f_1`. The returned vector has
/// one entry fewer than the input (the last order lacks `f_{n+1}`).
pub fn derivative_seq<T>(f: &[T]) -> Vec<T>
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Neg<Output = T> + std::ops::Mul<f64, Output = T>,
{
    if f.len() < 2 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(f.len() - 1);
    out.push(-f[1]);
    for n in 1..f.len() - 1 {
        out.push((f[n - 1] - f[n + 1]) * 0.5);
    }
    out
}

fn miller_start(nmax: usize, x: f64) -> usize {
    let n = (nmax as f64).max(x);
    let m = (n + (160.0 * n.max(1.0)).sqrt() + 20.0).ceil() as usize;
    m + (m % 2)
}

/// Backward recurrence from the even order `start`, keeping orders `0..=nmax`.
fn miller_sequence(start: usize, nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    let mut next = 0.0; // J_{m+1}
    let mut cur = 1e-300; // J_m
    let mut even_sum = 0.0;
    let two_over_x = 2.0 / x;
    let mut m = start;
    loop {
        if m <= nmax {
            out[m] = cur;
        }
        if m % 2 == 0 && m > 0 {
            even_sum += cur;
        }
        if m == 0 {
            break;
        }
        let prev = m as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        m -= 1;
        if cur.abs() > RESCALE_LIMIT {
            let s = 1.0 / RESCALE_LIMIT;
            cur *= s;
            next *= s;
            even_sum *= s;
            for v in out.iter_mut() {
                *v *= s;
            }
        }
    }
    let norm = out[0] + 2.0 * even_sum;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

fn neumann01(x: f64, j: &[f64]) -> Bessel01 {
    // j holds J_0..J_start, enough that the tails below are negligible.
    let log_term = (0.5 * x).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k + 1 < j.len() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * j[2 * k] / k as f64;
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k as f64;
        k += 1;
    }
    let y0 = (log_term * j[0] - 2.0 * s0) / FRAC_PI_2;
    let y1 = (-j[0] / x + log_term * j[1] + s1) / FRAC_PI_2;
    Bessel01 { j0: j[0], j1: j[1], y0, y1 }
}

/// Hankel's large-argument expansion for `(J_n(x), Y_n(x))`.
fn hankel_asymptotic(n: u32, x: f64) -> (f64, f64) {
    let mu = 4.0 * (n as f64).powi(2);
    let mut p = 0.0_f64;
    let mut q = 0.0_f64;
    let mut term = 1.0_f64;
    let mut prev_abs = f64::INFINITY;
    for k in 0..200 {
        let abs = term.abs();
        if abs > prev_abs || abs < 1e-17 * (p.abs() + q.abs()).max(1e-300) {
            break;
        }
        prev_abs = abs;
        // term = a_k(n) / x^k without the alternating sign pattern
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        let odd = (2 * k + 1) as f64;
        term *= (mu - odd * odd) / ((k + 1) as f64 * 8.0 * x);
    }
    let phase = (0.5 * n as f64 + 0.25) * PI;
    let (s, c) = (x - phase).sin_cos();
    let amp = (2.0 / (PI * x)).sqrt();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

/// Fundamental solution `Φ_k(r) = (i/4) H_0^(1)(kr)` of `Δ + k²`.
pub fn helmholtz_green(k: f64, r: f64) -> Complex64 {
    Complex64::new(0.0, 0.25) * bessel01(k * r).h0()
}
