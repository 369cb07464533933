//! Triangle-style `.node` / `.ele` files. Node lines are
//! `index x y boundary-marker`, element lines `index v0 v1 v2`; indices may
//! start at 0 or 1. Higher-degree nodes are regenerated on load.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{GeometryError, Point, TriMesh};

fn with_ext(base: &Path, ext: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

/// Writes `<base>.node` and `<base>.ele` (0-based indices).
pub fn save_mesh(mesh: &TriMesh, base: &Path) -> Result<(), GeometryError> {
    let mut on_boundary = vec![false; mesh.vertices().len()];
    for &[a, b] in mesh.boundary_edges() {
        on_boundary[a] = true;
        on_boundary[b] = true;
    }
    let mut node = format!("{} 2 0 1\n", mesh.vertices().len());
    for (i, v) in mesh.vertices().iter().enumerate() {
        writeln!(node, "{i} {:?} {:?} {}", v[0], v[1], u8::from(on_boundary[i])).unwrap();
    }
    let mut ele = format!("{} 3 0\n", mesh.triangles().len());
    for (i, t) in mesh.triangles().iter().enumerate() {
        writeln!(ele, "{i} {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    fs::write(with_ext(base, ".node"), node)?;
    fs::write(with_ext(base, ".ele"), ele)?;
    Ok(())
}

struct Lines {
    path: PathBuf,
    rows: Vec<(usize, Vec<String>)>,
}

impl Lines {
    fn read(path: PathBuf) -> Result<Self, GeometryError> {
        let text = fs::read_to_string(&path)?;
        let rows = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let l = l.split('#').next().unwrap_or("").trim();
                (!l.is_empty()).then(|| (i + 1, l.split_whitespace().map(str::to_owned).collect()))
            })
            .collect();
        Ok(Self { path, rows })
    }

    fn err(&self, line: usize, message: impl Into<String>) -> GeometryError {
        GeometryError::Parse { path: self.path.clone(), line, message: message.into() }
    }

    fn parse<T: std::str::FromStr>(&self, line: usize, tok: Option<&String>, what: &str) -> Result<T, GeometryError> {
        let tok = tok.ok_or_else(|| self.err(line, format!("missing {what}")))?;
        tok.parse().map_err(|_| self.err(line, format!("cannot parse {what} from '{tok}'")))
    }

    fn header_count(&self) -> Result<(usize, &[(usize, Vec<String>)]), GeometryError> {
        let (line, head) = self.rows.first().ok_or_else(|| self.err(0, "empty file"))?;
        let n: usize = self.parse(*line, head.first(), "entry count")?;
        let body = &self.rows[1..];
        if body.len() != n {
            return Err(self.err(*line, format!("header declares {n} entries, found {}", body.len())));
        }
        Ok((n, body))
    }
}

/// Reads `<base>.node` / `<base>.ele` and validates the triangulation.
pub fn load_mesh(base: &Path, degree: usize) -> Result<TriMesh, GeometryError> {
    let nodes = Lines::read(with_ext(base, ".node"))?;
    let (nv, body) = nodes.header_count()?;
    let mut first_index = None;
    let mut vertices: Vec<Point> = vec![[f64::NAN; 2]; nv];
    for (line, toks) in body {
        let idx: usize = nodes.parse(*line, toks.first(), "node index")?;
        let base_idx = *first_index.get_or_insert(idx.min(1));
        let i = idx.checked_sub(base_idx).filter(|&i| i < nv).ok_or_else(|| nodes.err(*line, "node index out of range"))?;
        let x: f64 = nodes.parse(*line, toks.get(1), "x")?;
        let y: f64 = nodes.parse(*line, toks.get(2), "y")?;
        if !vertices[i][0].is_nan() {
            return Err(nodes.err(*line, format!("duplicate node index {idx}")));
        }
        vertices[i] = [x, y];
    }
    let base_idx = first_index.unwrap_or(0);

    let eles = Lines::read(with_ext(base, ".ele"))?;
    let (_, body) = eles.header_count()?;
    let mut triangles = Vec::with_capacity(body.len());
    for (line, toks) in body {
        let mut t = [0usize; 3];
        for (k, slot) in t.iter_mut().enumerate() {
            let v: usize = eles.parse(*line, toks.get(k + 1), "vertex index")?;
            *slot = v
                .checked_sub(base_idx)
                .filter(|&i| i < nv)
                .ok_or_else(|| eles.err(*line, format!("vertex index {v} out of range")))?;
        }
        triangles.push(t);
    }
    TriMesh::new(vertices, triangles, degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_structured_mesh, Rect, RefractiveField};

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let base = dir.path().join("mesh");
        let (m, _) = build_structured_mesh(Rect::new(-6.0, 6.0, -8.0, 8.0), [3, 4], 1, 2, &RefractiveField::Uniform)
            .unwrap();
        save_mesh(&m, &base).unwrap();
        let l = load_mesh(&base, 2).unwrap();
        assert_eq!(l.vertices(), m.vertices());
        assert_eq!(l.triangles(), m.triangles());
        assert_eq!(l.nodes(), m.nodes());
        assert_eq!(l.dirichlet_nodes(), m.dirichlet_nodes());
    }

    fn write(dir: &Path, node: &str, ele: &str) -> PathBuf {
        let base = dir.join("m");
        fs::write(with_ext(&base, ".node"), node).unwrap();
        fs::write(with_ext(&base, ".ele"), ele).unwrap();
        base
    }

    const SQUARE: &str = "4 2 0 1\n1 0 0 1\n2 1 0 1\n3 1 1 1\n4 0 1 1\n";

    #[test]
    fn one_based_indices_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let base = write(dir.path(), SQUARE, "2 3 0\n1 1 2 3\n2 1 3 4\n");
        let m = load_mesh(&base, 1).unwrap();
        assert_eq!(m.n_triangles(), 2);
    }

    #[test]
    fn duplicated_triangle_is_conformity_error() {
        let dir = tempfile::tempdir().unwrap();
        let base = write(dir.path(), SQUARE, "3 3 0\n1 1 2 3\n2 1 3 4\n3 1 3 4\n");
        assert!(matches!(load_mesh(&base, 1), Err(GeometryError::NonConforming { .. })));
    }

    #[test]
    fn clockwise_triangle_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let base = write(dir.path(), SQUARE, "2 3 0\n1 1 2 3\n2 1 4 3\n");
        match load_mesh(&base, 1) {
            Err(GeometryError::InvertedTriangle { index, .. }) => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let base = write(dir.path(), "4 2 0 1\n1 0 0 1\n2 x 0 1\n3 1 1 1\n4 0 1 1\n", "1 3 0\n1 1 2 3\n");
        match load_mesh(&base, 1) {
            Err(GeometryError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
