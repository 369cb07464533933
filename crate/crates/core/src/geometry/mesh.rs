use std::collections::HashMap;
use std::sync::OnceLock;

use super::{GeometryError, Point, RefractiveField, Support};

/// Barycentric tolerance for accepting a point on a triangle edge.
const BARY_TOL: f64 = 1e-10;

/// Multi-indices `(a, b, c)` with `a + b + c = d` labelling the degree-`d`
/// Lagrange nodes of a triangle at barycentric position `(a, b, c)/d`.
/// Vertices come first, then edge nodes (edges 01, 12, 20), then interior nodes.
pub fn lattice(d: usize) -> Vec<[usize; 3]> {
    let mut out = vec![[d, 0, 0], [0, d, 0], [0, 0, d]];
    for s in 1..d {
        out.push([d - s, s, 0]);
    }
    for s in 1..d {
        out.push([0, d - s, s]);
    }
    for s in 1..d {
        out.push([s, 0, d - s]);
    }
    for a in 1..d {
        for b in 1..d - a {
            let c = d - a - b;
            if c >= 1 {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.x0 && p[0] <= self.x1 && p[1] >= self.y0 && p[1] <= self.y1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeRole {
    /// Position in the free-node list.
    Free(usize),
    /// Position in the Dirichlet-node list on Σ.
    Dirichlet(usize),
}

/// Which triangles cross the heterogeneity boundary.
#[derive(Clone, Debug, Default)]
pub struct AlignmentReport {
    pub straddling: Vec<usize>,
    pub polygonal: bool,
}

impl AlignmentReport {
    pub fn is_aligned(&self) -> bool {
        self.straddling.is_empty()
    }
}

/// Conforming triangulation with degree-`d` Lagrange nodes.
#[derive(Clone, Debug)]
pub struct TriMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    degree: usize,
    nodes: Vec<Point>,
    elements: Vec<Vec<usize>>,
    boundary_edges: Vec<[usize; 2]>,
    roles: Vec<NodeRole>,
    free: Vec<usize>,
    dirichlet: Vec<usize>,
    locator: OnceLock<PointLocator>,
}

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b { (a, b) } else { (b, a) }
}

impl TriMesh {
    /// Builds and validates a mesh from vertices and positively oriented triangles.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>, degree: usize) -> Result<Self, GeometryError> {
        if !(1..=4).contains(&degree) {
            return Err(GeometryError::InvalidDegree(degree));
        }
        validate_topology(&vertices, &triangles)?;

        let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edge_list: Vec<(usize, usize)> = Vec::new();
        let mut edge_count: Vec<u8> = Vec::new();
        for tri in &triangles {
            for (p, q) in [(0, 1), (1, 2), (2, 0)] {
                let key = edge_key(tri[p], tri[q]);
                let id = *edge_ids.entry(key).or_insert_with(|| {
                    edge_list.push(key);
                    edge_count.push(0);
                    edge_list.len() - 1
                });
                edge_count[id] += 1;
            }
        }

        let nv = vertices.len();
        let per_edge = degree - 1;
        let per_interior = if degree >= 3 { (degree - 1) * (degree - 2) / 2 } else { 0 };
        let edge_base = nv;
        let interior_base = edge_base + per_edge * edge_list.len();
        let n_nodes = interior_base + per_interior * triangles.len();

        let mut nodes = vec![[0.0, 0.0]; n_nodes];
        nodes[..nv].copy_from_slice(&vertices);
        let lat = lattice(degree);
        let d = degree as f64;
        let mut elements = Vec::with_capacity(triangles.len());
        for (ti, tri) in triangles.iter().enumerate() {
            let mut local = Vec::with_capacity(lat.len());
            let mut interior_slot = 0;
            for m in &lat {
                let zeros = m.iter().filter(|&&c| c == 0).count();
                let g = match zeros {
                    2 => tri[m.iter().position(|&c| c == degree).unwrap()],
                    1 => {
                        let r = m.iter().position(|&c| c == 0).unwrap();
                        let (p, q) = match r {
                            0 => (1, 2),
                            1 => (2, 0),
                            _ => (0, 1),
                        };
                        let (gp, gq) = (tri[p], tri[q]);
                        let id = edge_ids[&edge_key(gp, gq)];
                        let offset = if gp < gq { m[q] } else { m[p] };
                        edge_base + per_edge * id + offset - 1
                    }
                    _ => {
                        let g = interior_base + per_interior * ti + interior_slot;
                        interior_slot += 1;
                        g
                    }
                };
                if g >= nv {
                    let v = tri.map(|i| vertices[i]);
                    let w = [m[0] as f64 / d, m[1] as f64 / d, m[2] as f64 / d];
                    nodes[g] = [
                        w[0] * v[0][0] + w[1] * v[1][0] + w[2] * v[2][0],
                        w[0] * v[0][1] + w[1] * v[1][1] + w[2] * v[2][1],
                    ];
                }
                local.push(g);
            }
            elements.push(local);
        }

        let mut on_boundary = vec![false; n_nodes];
        let mut boundary_edges = Vec::new();
        for (id, &(a, b)) in edge_list.iter().enumerate() {
            if edge_count[id] == 1 {
                boundary_edges.push([a, b]);
                on_boundary[a] = true;
                on_boundary[b] = true;
                for s in 0..per_edge {
                    on_boundary[edge_base + per_edge * id + s] = true;
                }
            }
        }

        let mut roles = Vec::with_capacity(n_nodes);
        let mut free = Vec::new();
        let mut dirichlet = Vec::new();
        for (g, &b) in on_boundary.iter().enumerate() {
            if b {
                roles.push(NodeRole::Dirichlet(dirichlet.len()));
                dirichlet.push(g);
            } else {
                roles.push(NodeRole::Free(free.len()));
                free.push(g);
            }
        }

        Ok(Self {
            vertices,
            triangles,
            degree,
            nodes,
            elements,
            boundary_edges,
            roles,
            free,
            dirichlet,
            locator: OnceLock::new(),
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coordinates of all Lagrange nodes (vertices first).
    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    /// Global node indices of element `t`, in [`lattice`] order.
    pub fn element_nodes(&self, t: usize) -> &[usize] {
        &self.elements[t]
    }

    pub fn triangle_vertices(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|i| self.vertices[i])
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_vertices(t);
        signed_area(a, b, c)
    }

    pub fn boundary_edges(&self) -> &[[usize; 2]] {
        &self.boundary_edges
    }

    pub fn role(&self, node: usize) -> NodeRole {
        self.roles[node]
    }

    /// Free (interior) nodes, count L.
    pub fn free_nodes(&self) -> &[usize] {
        &self.free
    }

    /// Dirichlet nodes on Σ, count M.
    pub fn dirichlet_nodes(&self) -> &[usize] {
        &self.dirichlet
    }

    pub fn dirichlet_points(&self) -> Vec<Point> {
        self.dirichlet.iter().map(|&g| self.nodes[g]).collect()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Longest edge length.
    pub fn h(&self) -> f64 {
        let mut h: f64 = 0.0;
        for tri in &self.triangles {
            for (p, q) in [(0, 1), (1, 2), (2, 0)] {
                let a = self.vertices[tri[p]];
                let b = self.vertices[tri[q]];
                h = h.max((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        h
    }

    /// Distance from `p` to Σ, the mesh boundary.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.boundary_edges
            .iter()
            .map(|&[a, b]| super::segment_distance(p, self.vertices[a], self.vertices[b]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn locator(&self) -> &PointLocator {
        self.locator.get_or_init(|| PointLocator::new(self))
    }

    pub fn locate(&self, p: Point) -> Result<Location, GeometryError> {
        self.locator().locate(self, p).ok_or(GeometryError::OutsideMesh(p))
    }

    pub fn contains(&self, p: Point) -> bool {
        self.locator().locate(self, p).is_some()
    }

    /// Quadrisects every triangle through its edge midpoints.
    pub fn refine(&self) -> Result<Self, GeometryError> {
        let mut vertices = self.vertices.clone();
        let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
            *mids.entry(edge_key(a, b)).or_insert_with(|| {
                let (pa, pb) = (vertices[a], vertices[b]);
                vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        Self::new(vertices, triangles, self.degree)
    }

    /// Same triangulation with a different element degree.
    pub fn with_degree(&self, degree: usize) -> Result<Self, GeometryError> {
        Self::new(self.vertices.clone(), self.triangles.clone(), degree)
    }

    /// Classifies triangles against the heterogeneity support using a
    /// barycentric sample lattice pulled slightly inside each triangle.
    pub fn alignment(&self, field: &RefractiveField) -> AlignmentReport {
        let support = field.support();
        let polygonal = support.is_polygonal();
        if matches!(support, Support::Empty) {
            return AlignmentReport { straddling: Vec::new(), polygonal };
        }
        let probes = 6usize;
        let shrink = 1e-6;
        let mut straddling = Vec::new();
        for t in 0..self.triangles.len() {
            let v = self.triangle_vertices(t);
            let centroid = [(v[0][0] + v[1][0] + v[2][0]) / 3.0, (v[0][1] + v[1][1] + v[2][1]) / 3.0];
            let (mut inside, mut outside) = (false, false);
            for a in 0..=probes {
                for b in 0..=probes - a {
                    let c = probes - a - b;
                    let w = [a as f64, b as f64, c as f64].map(|x| x / probes as f64);
                    let p = [
                        w[0] * v[0][0] + w[1] * v[1][0] + w[2] * v[2][0],
                        w[0] * v[0][1] + w[1] * v[1][1] + w[2] * v[2][1],
                    ];
                    let q = [p[0] + shrink * (centroid[0] - p[0]), p[1] + shrink * (centroid[1] - p[1])];
                    inside |= support.contains(q);
                    outside |= support.excludes(q);
                }
            }
            if inside && outside {
                straddling.push(t);
            }
        }
        AlignmentReport { straddling, polygonal }
    }
}

fn validate_topology(vertices: &[Point], triangles: &[[usize; 3]]) -> Result<(), GeometryError> {
    if triangles.is_empty() {
        return Err(GeometryError::NonConforming { detail: "mesh has no triangles".into(), triangles: vec![] });
    }
    for (i, v) in vertices.iter().enumerate() {
        if !(v[0].is_finite() && v[1].is_finite()) {
            return Err(GeometryError::NonConforming { detail: format!("vertex {i} is not finite"), triangles: vec![] });
        }
    }
    let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
    let mut h2: f64 = 0.0;
    for tri in triangles {
        for (p, q) in [(0, 1), (1, 2), (2, 0)] {
            if let (Some(a), Some(b)) = (vertices.get(tri[p]), vertices.get(tri[q])) {
                h2 = h2.max((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2));
            }
        }
    }
    for (ti, tri) in triangles.iter().enumerate() {
        if tri.iter().any(|&i| i >= vertices.len()) {
            return Err(GeometryError::NonConforming {
                detail: format!("triangle {ti} references a missing vertex"),
                triangles: vec![ti],
            });
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            return Err(GeometryError::DegenerateTriangle { index: ti, area: 0.0 });
        }
        let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
        if area.abs() < 1e-14 * h2 {
            return Err(GeometryError::DegenerateTriangle { index: ti, area });
        }
        if area < 0.0 {
            return Err(GeometryError::InvertedTriangle { index: ti, area });
        }
        for (p, q) in [(0, 1), (1, 2), (2, 0)] {
            if let Some(other) = directed.insert((tri[p], tri[q]), ti) {
                return Err(GeometryError::NonConforming {
                    detail: format!("edge ({}, {}) is used twice with the same orientation", tri[p], tri[q]),
                    triangles: vec![other, ti],
                });
            }
        }
    }
    // hanging nodes: a vertex lying inside an unmatched edge
    let unmatched: Vec<(usize, usize, usize)> = directed
        .iter()
        .filter(|(&(a, b), _)| !directed.contains_key(&(b, a)))
        .map(|(&(a, b), &t)| (a, b, t))
        .collect();
    let used: Vec<bool> = {
        let mut u = vec![false; vertices.len()];
        for tri in triangles {
            for &i in tri {
                u[i] = true;
            }
        }
        u
    };
    for &(a, b, t) in &unmatched {
        let (pa, pb) = (vertices[a], vertices[b]);
        let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
        for (i, v) in vertices.iter().enumerate() {
            if !used[i] || i == a || i == b {
                continue;
            }
            if v[0] < pa[0].min(pb[0]) - 1e-12 * len
                || v[0] > pa[0].max(pb[0]) + 1e-12 * len
                || v[1] < pa[1].min(pb[1]) - 1e-12 * len
                || v[1] > pa[1].max(pb[1]) + 1e-12 * len
            {
                continue;
            }
            if super::segment_distance(*v, pa, pb) < 1e-10 * len {
                return Err(GeometryError::NonConforming {
                    detail: format!("vertex {i} hangs on edge ({a}, {b})"),
                    triangles: vec![t],
                });
            }
        }
    }
    Ok(())
}

/// Structured triangulation of `rect` with `nx × ny` base cells, each split
/// along its lower-left to upper-right diagonal, then quadrisected `level`
/// times. Polygonal supports must be resolved exactly by the resulting mesh;
/// smooth supports only produce a report of straddling triangles.
pub fn build_structured_mesh(
    rect: Rect,
    cells: [usize; 2],
    level: usize,
    degree: usize,
    hetero: &RefractiveField,
) -> Result<(TriMesh, AlignmentReport), GeometryError> {
    if !(1..=4).contains(&degree) {
        return Err(GeometryError::InvalidDegree(degree));
    }
    if !(rect.x1 > rect.x0 && rect.y1 > rect.y0) || cells[0] == 0 || cells[1] == 0 {
        return Err(GeometryError::InvalidRectangle(format!("{rect:?} with {cells:?} cells")));
    }
    let [nx, ny] = cells;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        let y = rect.y0 + (rect.y1 - rect.y0) * j as f64 / ny as f64;
        for i in 0..=nx {
            let x = rect.x0 + (rect.x1 - rect.x0) * i as f64 / nx as f64;
            vertices.push([x, y]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let mut mesh = TriMesh::new(vertices, triangles, degree)?;
    for _ in 0..level {
        mesh = mesh.refine()?;
    }
    let report = mesh.alignment(hetero);
    if !report.is_aligned() {
        if report.polygonal {
            return Err(GeometryError::Misaligned { triangles: report.straddling });
        }
        log::warn!(
            "{} triangles straddle the smooth heterogeneity boundary",
            report.straddling.len()
        );
    }
    Ok((mesh, report))
}

/// Result of locating a point: triangle index and barycentric coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Location {
    pub triangle: usize,
    pub bary: [f64; 3],
}

/// Uniform bucket grid over triangle bounding boxes.
#[derive(Clone, Debug)]
pub struct PointLocator {
    origin: Point,
    cell: [f64; 2],
    dims: [usize; 2],
    offsets: Vec<usize>,
    items: Vec<usize>,
}

fn barycentric(v: &[Point; 3], p: Point) -> [f64; 3] {
    let det = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
    let l1 = ((p[0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (p[1] - v[0][1])) / det;
    let l2 = ((v[1][0] - v[0][0]) * (p[1] - v[0][1]) - (p[0] - v[0][0]) * (v[1][1] - v[0][1])) / det;
    [1.0 - l1 - l2, l1, l2]
}

impl PointLocator {
    fn new(mesh: &TriMesh) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for v in &mesh.vertices {
            for a in 0..2 {
                lo[a] = lo[a].min(v[a]);
                hi[a] = hi[a].max(v[a]);
            }
        }
        let nt = mesh.triangles.len();
        let side = ((nt as f64).sqrt().ceil() as usize).max(1);
        let dims = [side, side];
        let cell = [
            ((hi[0] - lo[0]) / side as f64).max(f64::MIN_POSITIVE),
            ((hi[1] - lo[1]) / side as f64).max(f64::MIN_POSITIVE),
        ];
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); side * side];
        let clamp = |x: f64, a: usize| -> usize { (((x - lo[a]) / cell[a]).floor().max(0.0) as usize).min(dims[a] - 1) };
        for t in 0..nt {
            let v = mesh.triangle_vertices(t);
            let (mut bl, mut bh) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
            for p in &v {
                for a in 0..2 {
                    bl[a] = bl[a].min(p[a]);
                    bh[a] = bh[a].max(p[a]);
                }
            }
            for j in clamp(bl[1], 1)..=clamp(bh[1], 1) {
                for i in clamp(bl[0], 0)..=clamp(bh[0], 0) {
                    buckets[j * side + i].push(t);
                }
            }
        }
        let mut offsets = Vec::with_capacity(buckets.len() + 1);
        let mut items = Vec::new();
        offsets.push(0);
        for b in buckets {
            items.extend(b);
            offsets.push(items.len());
        }
        Self { origin: lo, cell, dims, offsets, items }
    }

    fn best_in<'a>(&self, mesh: &TriMesh, p: Point, cands: impl Iterator<Item = &'a usize>) -> Option<Location> {
        let mut best: Option<(f64, Location)> = None;
        for &t in cands {
            let bary = barycentric(&mesh.triangle_vertices(t), p);
            let m = bary[0].min(bary[1]).min(bary[2]);
            if m >= -BARY_TOL && best.is_none_or(|(bm, _)| m > bm) {
                best = Some((m, Location { triangle: t, bary }));
            }
        }
        best.map(|(_, l)| l)
    }

    /// Finds the triangle containing `p` (within barycentric tolerance 1e-10).
    pub fn locate(&self, mesh: &TriMesh, p: Point) -> Option<Location> {
        if !(p[0].is_finite() && p[1].is_finite()) {
            return None;
        }
        let fx = (p[0] - self.origin[0]) / self.cell[0];
        let fy = (p[1] - self.origin[1]) / self.cell[1];
        let slack = 1e-9;
        if fx >= -slack && fy >= -slack && fx <= self.dims[0] as f64 + slack && fy <= self.dims[1] as f64 + slack {
            let i = (fx.floor().max(0.0) as usize).min(self.dims[0] - 1);
            let j = (fy.floor().max(0.0) as usize).min(self.dims[1] - 1);
            let b = j * self.dims[0] + i;
            if let Some(l) = self.best_in(mesh, p, self.items[self.offsets[b]..self.offsets[b + 1]].iter()) {
                return Some(l);
            }
        }
        let all: Vec<usize> = (0..mesh.triangles.len()).collect();
        self.best_in(mesh, p, all.iter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square(level: usize, d: usize) -> TriMesh {
        build_structured_mesh(Rect::new(0.0, 1.0, 0.0, 1.0), [1, 1], level, d, &RefractiveField::Uniform)
            .unwrap()
            .0
    }

    #[test]
    fn lattice_sizes() {
        for d in 1..=4 {
            assert_eq!(lattice(d).len(), (d + 1) * (d + 2) / 2);
        }
    }

    #[test]
    fn node_counts() {
        let m = unit_square(0, 1);
        assert_eq!((m.free_nodes().len(), m.dirichlet_nodes().len()), (0, 4));
        let m = unit_square(0, 2);
        assert_eq!(m.n_nodes(), 9);
        assert_eq!((m.free_nodes().len(), m.dirichlet_nodes().len()), (1, 8));
        let m = unit_square(1, 1);
        assert_eq!((m.n_triangles(), m.n_nodes()), (8, 9));
        assert_eq!((m.free_nodes().len(), m.dirichlet_nodes().len()), (1, 8));
    }

    #[test]
    fn higher_degree_counts() {
        for d in 1..=4 {
            let m = build_structured_mesh(Rect::new(0.0, 2.0, 0.0, 1.0), [2, 1], 2, d, &RefractiveField::Uniform)
                .unwrap()
                .0;
            let (nx, ny) = (8 * d, 4 * d);
            assert_eq!(m.n_nodes(), (nx + 1) * (ny + 1));
            assert_eq!(m.dirichlet_nodes().len(), 2 * (nx + ny));
        }
    }

    #[test]
    fn refinement_quadruples_and_stays_conforming() {
        let mut m = unit_square(0, 3);
        for _ in 0..3 {
            let r = m.refine().unwrap();
            assert_eq!(r.n_triangles(), 4 * m.n_triangles());
            m = r;
        }
        // shared edge nodes coincide geometrically
        for t in 0..m.n_triangles() {
            for &g in m.element_nodes(t) {
                assert!(m.nodes()[g][0].is_finite());
            }
        }
    }

    #[test]
    fn element_nodes_match_lattice_positions() {
        let m = unit_square(1, 4);
        let lat = lattice(4);
        for t in 0..m.n_triangles() {
            let v = m.triangle_vertices(t);
            for (l, &g) in lat.iter().zip(m.element_nodes(t)) {
                let w = l.map(|c| c as f64 / 4.0);
                let p = [
                    w[0] * v[0][0] + w[1] * v[1][0] + w[2] * v[2][0],
                    w[0] * v[0][1] + w[1] * v[1][1] + w[2] * v[2][1],
                ];
                let q = m.nodes()[g];
                assert!((p[0] - q[0]).abs() < 1e-14 && (p[1] - q[1]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn clockwise_and_duplicate_triangles_rejected() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(matches!(
            TriMesh::new(v.clone(), vec![[0, 2, 1]], 1),
            Err(GeometryError::InvertedTriangle { index: 0, .. })
        ));
        assert!(matches!(
            TriMesh::new(v, vec![[0, 1, 2], [0, 1, 2]], 1),
            Err(GeometryError::NonConforming { .. })
        ));
    }

    #[test]
    fn hanging_node_rejected() {
        let v = vec![[0.0, 0.0], [2.0, 0.0], [0.0, 2.0], [1.0, 1.0], [2.0, 2.0]];
        // lower-left big triangle, upper-right split in two at (1,1)
        let t = vec![[0, 1, 2], [1, 4, 3], [3, 4, 2]];
        assert!(matches!(TriMesh::new(v, t, 1), Err(GeometryError::NonConforming { .. })));
    }

    #[test]
    fn locate_points() {
        let m = unit_square(3, 1);
        let l = m.locate([0.3, 0.7]).unwrap();
        assert!(l.bary.iter().all(|&b| b >= -1e-12));
        assert!(m.locate([1.5, 0.5]).is_err());
        assert!(m.contains([1.0, 1.0]));
    }

    #[test]
    fn pikachu_standin_is_aligned() {
        let (m, report) = build_structured_mesh(
            Rect::new(-8.0, 8.0, -8.0, 8.0),
            [32, 32],
            0,
            1,
            &RefractiveField::pikachu_standin(),
        )
        .unwrap();
        assert!(report.is_aligned());
        assert_eq!(m.n_triangles(), 2048);
    }

    #[test]
    fn misaligned_polygon_is_an_error() {
        let f = RefractiveField::Pikachu { polygon: vec![[0.1, 0.1], [0.7, 0.15], [0.4, 0.8]] };
        let r = build_structured_mesh(Rect::new(0.0, 1.0, 0.0, 1.0), [4, 4], 0, 1, &f);
        assert!(matches!(r, Err(GeometryError::Misaligned { .. })));
    }

    #[test]
    fn star_straddles_but_only_warns() {
        let (_, report) =
            build_structured_mesh(Rect::new(-6.0, 6.0, -8.0, 8.0), [12, 16], 0, 2, &RefractiveField::Star).unwrap();
        assert!(!report.is_aligned());
        assert!(!report.polygonal);
    }
}
