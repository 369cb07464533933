use super::{point_in_polygon, polygon_distance, GeometryError, RefractiveField, SmoothCurve, Support, TriMesh};

const CURVE_SAMPLES: usize = 2048;

/// Clearances certifying `Ω̄₀ ⊂ Ω₁ ⊂ Ω̄₁ ⊂ Ω₂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NestingReport {
    /// Smallest distance from Γ to Σ.
    pub gamma_to_sigma: f64,
    /// Smallest distance from the heterogeneity boundary to Γ (infinite when `n ≡ 1`).
    pub hetero_to_gamma: f64,
    pub samples: usize,
}

/// Samples Γ and the heterogeneity boundary and checks the nesting required by
/// the overlapping decomposition.
pub fn validate_nesting(
    gamma: &SmoothCurve,
    mesh: &TriMesh,
    hetero: &RefractiveField,
) -> Result<NestingReport, GeometryError> {
    gamma.validate(CURVE_SAMPLES)?;
    let poly = gamma.polygon(CURVE_SAMPLES)?;
    let mut gamma_to_sigma = f64::INFINITY;
    for &p in &poly {
        if !mesh.contains(p) {
            return Err(GeometryError::Nesting { reason: "Γ leaves the meshed polygon Ω₂".into(), point: p });
        }
        let d = mesh.boundary_distance(p);
        if d <= 0.0 {
            return Err(GeometryError::Nesting { reason: "Γ touches Σ".into(), point: p });
        }
        gamma_to_sigma = gamma_to_sigma.min(d);
    }
    // every Σ vertex must be exterior to Γ
    for &[a, _] in mesh.boundary_edges() {
        let p = mesh.vertices()[a];
        if point_in_polygon(p, &poly) {
            return Err(GeometryError::Nesting { reason: "Σ enters the interior of Γ".into(), point: p });
        }
    }

    let support = hetero.support();
    let mut hetero_to_gamma = f64::INFINITY;
    if !matches!(support, Support::Empty) {
        for p in support.boundary_samples(CURVE_SAMPLES) {
            if !point_in_polygon(p, &poly) {
                return Err(GeometryError::Nesting { reason: "heterogeneity reaches outside Γ".into(), point: p });
            }
            let d = polygon_distance(p, &poly);
            if d <= 0.0 {
                return Err(GeometryError::Nesting { reason: "heterogeneity touches Γ".into(), point: p });
            }
            hetero_to_gamma = hetero_to_gamma.min(d);
        }
    }
    Ok(NestingReport { gamma_to_sigma, hetero_to_gamma, samples: CURVE_SAMPLES })
}
