//! Symmetric Gauss rules on the reference triangle (Dunavant), with weights
//! normalised to sum to one so that `∫_T f ≈ |T| Σ w_q f(x_q)`.

/// Barycentric point and normalised weight.
pub type QuadPoint = ([f64; 3], f64);

fn orbit3(a: f64, w: f64, out: &mut Vec<QuadPoint>) {
    let b = 1.0 - 2.0 * a;
    out.push(([b, a, a], w));
    out.push(([a, b, a], w));
    out.push(([a, a, b], w));
}

fn orbit6(a: f64, b: f64, w: f64, out: &mut Vec<QuadPoint>) {
    let c = 1.0 - a - b;
    for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
        out.push((p, w));
    }
}

/// Smallest available rule exact for polynomials of total degree `exact`
/// (at most 8).
pub fn triangle_rule(exact: usize) -> Vec<QuadPoint> {
    let mut q = Vec::new();
    match exact {
        0 | 1 => q.push(([1.0 / 3.0; 3], 1.0)),
        2 => orbit3(1.0 / 6.0, 1.0 / 3.0, &mut q),
        3 | 4 => {
            orbit3(0.445_948_490_915_965, 0.223_381_589_678_011, &mut q);
            orbit3(0.091_576_213_509_771, 0.109_951_743_655_322, &mut q);
        }
        5 | 6 => {
            orbit3(0.249_286_745_170_910, 0.116_786_275_726_379, &mut q);
            orbit3(0.063_089_014_491_502, 0.050_844_906_370_207, &mut q);
            orbit6(0.053_145_049_844_817, 0.310_352_451_033_784, 0.082_851_075_618_374, &mut q);
        }
        _ => {
            assert!(exact <= 8, "no triangle rule exact to degree {exact}");
            q.push(([1.0 / 3.0; 3], 0.144_315_607_677_787));
            orbit3(0.459_292_588_292_723, 0.095_091_634_267_285, &mut q);
            orbit3(0.170_569_307_751_760, 0.103_217_370_534_718, &mut q);
            orbit3(0.050_547_228_317_031, 0.032_458_497_623_198, &mut q);
            orbit6(0.008_394_777_409_958, 0.263_112_829_634_638, 0.027_230_314_174_435, &mut q);
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|i| i as f64).product()
    }

    #[test]
    fn rules_integrate_monomials_exactly() {
        // ∫_T λ1^a λ2^b λ3^c / |T| = 2 a! b! c! / (a+b+c+2)!
        for exact in [1, 2, 4, 6, 8] {
            let rule = triangle_rule(exact);
            for a in 0..=exact {
                for b in 0..=exact - a {
                    for c in 0..=exact - a - b {
                        let expect = 2.0 * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2);
                        let got: f64 = rule
                            .iter()
                            .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32))
                            .sum();
                        assert!((got - expect).abs() < 1e-14, "rule {exact} a={a} b={b} c={c}: {got} vs {expect}");
                    }
                }
            }
        }
    }
}
