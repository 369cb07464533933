use std::f64::consts::PI;

/// Weights `w_j` with `Σ_j w_j g(t_j) = ∫₀^{2π} log sin²((s − t)/2) Q_N g(t) dt`
/// for `s = t_i = πi/N`, exact for trigonometric polynomials of degree `N`.
pub fn log_weight_row(n: usize, i: usize) -> Vec<f64> {
    let nf = n as f64;
    let log4 = 4f64.ln();
    (0..2 * n)
        .map(|j| {
            let d = PI * (i as f64 - j as f64) / nf;
            let mut sum = log4;
            for m in 1..n {
                sum += 2.0 * (m as f64 * d).cos() / m as f64;
            }
            sum += (nf * d).cos() / nf;
            -(PI / nf) * sum
        })
        .collect()
}

/// Row `i` is row 0 shifted cyclically by `i`, so one row determines all.
pub fn log_weight_base(n: usize) -> Vec<f64> {
    log_weight_row(n, 0)
}

/// Trapezoidal rule `(π/N) Σ g(t_j)` on the `2N`-point grid.
pub fn trapezoid(values: &[num_complex::Complex64]) -> num_complex::Complex64 {
    let n = values.len() as f64 / 2.0;
    values.iter().sum::<num_complex::Complex64>() * (PI / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn log_weight_identities() {
        for n in [8, 16, 32, 64] {
            for i in [0, 3, n] {
                let w = log_weight_row(n, i);
                let s: f64 = w.iter().sum();
                assert!((s + 2.0 * PI * 4f64.ln()).abs() < 1e-13, "{n} {s}");
                let si = PI * i as f64 / n as f64;
                let c: f64 = w.iter().enumerate().map(|(j, wj)| wj * (PI * j as f64 / n as f64 - si).cos()).sum();
                assert!((c + 2.0 * PI).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn rows_are_cyclic_shifts() {
        let n = 12;
        let base = log_weight_row(n, 0);
        let r = log_weight_row(n, 1);
        for j in 0..2 * n {
            assert!((r[(j + 1) % (2 * n)] - base[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn trapezoid_is_exact_on_exponentials() {
        let n = 10;
        for l in -(2 * n as i64 - 1)..(2 * n as i64) {
            // integer phase reduced modulo 2N before sampling
            let v: Vec<_> = (0..2 * n as i64)
                .map(|j| Complex64::from_polar(1.0, PI * (l * j).rem_euclid(2 * n as i64) as f64 / n as f64))
                .collect();
            let expect = if l == 0 { 2.0 * PI } else { 0.0 };
            assert!((trapezoid(&v) - expect).norm() < 1e-14, "l={l} {}", trapezoid(&v));
        }
    }
}
