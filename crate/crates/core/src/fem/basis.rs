use crate::geometry::{lattice, Point};

/// Degree-`d` Lagrange basis on a triangle in barycentric coordinates, built
/// from Silvester's products `φ_m(λ) = Π_i R_{m_i}(λ_i)` with
/// `R_a(λ) = Π_{s<a} (dλ − s)/(s + 1)`.
#[derive(Clone, Debug)]
pub struct LagrangeBasis {
    degree: usize,
    lattice: Vec<[usize; 3]>,
}

fn silvester(a: usize, d: f64, lambda: f64) -> (f64, f64) {
    let mut val = 1.0;
    let mut der = 0.0;
    for s in 0..a {
        let f = (d * lambda - s as f64) / (s as f64 + 1.0);
        let df = d / (s as f64 + 1.0);
        der = der * f + val * df;
        val *= f;
    }
    (val, der)
}

impl LagrangeBasis {
    pub fn new(degree: usize) -> Self {
        Self { degree, lattice: lattice(degree) }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    pub fn eval(&self, bary: [f64; 3]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.eval_into(bary, &mut out);
        out
    }

    pub fn eval_into(&self, bary: [f64; 3], out: &mut [f64]) {
        let d = self.degree as f64;
        for (o, m) in out.iter_mut().zip(&self.lattice) {
            *o = (0..3).map(|i| silvester(m[i], d, bary[i]).0).product();
        }
    }

    /// Partial derivatives with respect to the three barycentric coordinates.
    pub fn grad_bary(&self, bary: [f64; 3]) -> Vec<[f64; 3]> {
        let d = self.degree as f64;
        self.lattice
            .iter()
            .map(|m| {
                let r: [(f64, f64); 3] = std::array::from_fn(|i| silvester(m[i], d, bary[i]));
                [r[0].1 * r[1].0 * r[2].0, r[0].0 * r[1].1 * r[2].0, r[0].0 * r[1].0 * r[2].1]
            })
            .collect()
    }
}

/// Affine data of a triangle: twice the area and the constant barycentric gradients.
#[derive(Clone, Copy, Debug)]
pub struct ElementGeometry {
    pub vertices: [Point; 3],
    pub area: f64,
    pub grad_lambda: [[f64; 2]; 3],
}

impl ElementGeometry {
    pub fn new(v: [Point; 3]) -> Self {
        let det = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
        let grad_lambda = [
            [(v[1][1] - v[2][1]) / det, (v[2][0] - v[1][0]) / det],
            [(v[2][1] - v[0][1]) / det, (v[0][0] - v[2][0]) / det],
            [(v[0][1] - v[1][1]) / det, (v[1][0] - v[0][0]) / det],
        ];
        Self { vertices: v, area: 0.5 * det, grad_lambda }
    }

    pub fn point(&self, bary: [f64; 3]) -> Point {
        let v = &self.vertices;
        [
            bary[0] * v[0][0] + bary[1] * v[1][0] + bary[2] * v[2][0],
            bary[0] * v[0][1] + bary[1] * v[1][1] + bary[2] * v[2][1],
        ]
    }

    pub fn physical_gradient(&self, g: [f64; 3]) -> [f64; 2] {
        let gl = &self.grad_lambda;
        [
            g[0] * gl[0][0] + g[1] * gl[1][0] + g[2] * gl[2][0],
            g[0] * gl[0][1] + g[1] * gl[1][1] + g[2] * gl[2][1],
        ]
    }

    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        [(0, 1), (1, 2), (2, 0)]
            .iter()
            .map(|&(a, b)| (v[a][0] - v[b][0]).hypot(v[a][1] - v[b][1]))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_property_at_nodes() {
        for d in 1..=4 {
            let b = LagrangeBasis::new(d);
            for (j, m) in lattice(d).iter().enumerate() {
                let bary = m.map(|c| c as f64 / d as f64);
                let vals = b.eval(bary);
                for (i, v) in vals.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((v - expect).abs() < 1e-13, "d={d} i={i} j={j} {v}");
                }
            }
        }
    }

    #[test]
    fn partition_of_unity_and_zero_gradient_sum() {
        for d in 1..=4 {
            let b = LagrangeBasis::new(d);
            let bary = [0.2, 0.3, 0.5];
            let s: f64 = b.eval(bary).iter().sum();
            assert!((s - 1.0).abs() < 1e-13);
            let geo = ElementGeometry::new([[0.0, 0.0], [1.3, 0.2], [0.4, 0.9]]);
            let mut g = [0.0; 2];
            for gb in b.grad_bary(bary) {
                let p = geo.physical_gradient(gb);
                g[0] += p[0];
                g[1] += p[1];
            }
            assert!(g[0].abs() < 1e-12 && g[1].abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let b = LagrangeBasis::new(4);
        let geo = ElementGeometry::new([[0.1, 0.0], [1.0, 0.3], [0.2, 1.1]]);
        let bary = [0.25, 0.35, 0.4];
        let h = 1e-6;
        // move along x: barycentric change is grad_lambda_x * h
        let shift = |s: f64| std::array::from_fn::<f64, 3, _>(|i| bary[i] + s * geo.grad_lambda[i][0]);
        let fp = b.eval(shift(h));
        let fm = b.eval(shift(-h));
        for (i, gb) in b.grad_bary(bary).into_iter().enumerate() {
            let g = geo.physical_gradient(gb);
            assert!(((fp[i] - fm[i]) / (2.0 * h) - g[0]).abs() < 1e-7);
        }
    }
}
