//! The line-oriented mesh text format.
//!
//! ```text
//! # comment
//! dim 2
//! vertices 3
//! 0 0
//! 1 0
//! 0 1
//! simplices 1
//! 0 1 2
//! ```
//!
//! Coordinates are rationals (`p/q` or integer), whitespace separated;
//! simplices are zero-based vertex indices; `#` starts a comment anywhere.

use anyhow::{anyhow, bail, Context, Result};
use crspace_core::mesh::{Mesh, Point};
use crspace_core::num::{parse_rational, render};

/// Parses the text format and validates the mesh.
pub fn parse_mesh(text: &str) -> Result<Mesh> {
    let mut lines = text
        .lines()
        .map(|l| match l.find('#') {
            Some(i) => &l[..i],
            None => l,
        })
        .map(str::trim)
        .filter(|l| !l.is_empty());

    let dim_line = lines.next().ok_or_else(|| anyhow!("empty mesh file"))?;
    let dim: usize = match dim_line.split_whitespace().collect::<Vec<_>>()[..] {
        ["dim", d] => d.parse().context("bad dimension")?,
        _ => bail!("expected 'dim d' header, got '{dim_line}'"),
    };

    let verts_line = lines.next().ok_or_else(|| anyhow!("missing 'vertices n'"))?;
    let nverts: usize = match verts_line.split_whitespace().collect::<Vec<_>>()[..] {
        ["vertices", n] => n.parse().context("bad vertex count")?,
        _ => bail!("expected 'vertices n', got '{verts_line}'"),
    };
    let mut vertices: Vec<Point> = Vec::with_capacity(nverts);
    for i in 0..nverts {
        let line = lines
            .next()
            .ok_or_else(|| anyhow!("missing vertex line {i}"))?;
        let coords: Vec<_> = line.split_whitespace().collect();
        if coords.len() != dim {
            bail!("vertex {i}: expected {dim} coordinates, got {}", coords.len());
        }
        let mut p = Point::with_capacity(dim);
        for c in coords {
            p.push(parse_rational(c).ok_or_else(|| anyhow!("vertex {i}: bad rational '{c}'"))?);
        }
        vertices.push(p);
    }

    let simp_line = lines.next().ok_or_else(|| anyhow!("missing 'simplices m'"))?;
    let nsimp: usize = match simp_line.split_whitespace().collect::<Vec<_>>()[..] {
        ["simplices", m] => m.parse().context("bad simplex count")?,
        _ => bail!("expected 'simplices m', got '{simp_line}'"),
    };
    let mut simplices = Vec::with_capacity(nsimp);
    for i in 0..nsimp {
        let line = lines
            .next()
            .ok_or_else(|| anyhow!("missing simplex line {i}"))?;
        let idx: Result<Vec<usize>> = line
            .split_whitespace()
            .map(|t| t.parse::<usize>().context("bad vertex index"))
            .collect();
        let idx = idx?;
        if idx.len() != dim + 1 {
            bail!("simplex {i}: expected {} indices, got {}", dim + 1, idx.len());
        }
        simplices.push(idx);
    }
    if let Some(extra) = lines.next() {
        bail!("trailing content after simplices: '{extra}'");
    }

    Mesh::new(dim, vertices, simplices).map_err(|e| anyhow!("{e}"))
}

/// Renders a mesh back into the text format (lossless: rationals in lowest
/// terms).
pub fn render_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    out.push_str(&format!("dim {}\n", mesh.dim()));
    out.push_str(&format!("vertices {}\n", mesh.num_vertices()));
    for v in mesh.vertices() {
        let coords: Vec<String> = v.iter().map(render).collect();
        out.push_str(&coords.join(" "));
        out.push('\n');
    }
    out.push_str(&format!("simplices {}\n", mesh.num_simplices()));
    for s in mesh.simplices() {
        let idx: Vec<String> = s.iter().map(|i| i.to_string()).collect();
        out.push_str(&idx.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crspace_core::mesh;

    #[test]
    fn roundtrip_generators() {
        for m in [
            mesh::reference_simplex(3).unwrap(),
            mesh::two_simplex(2).unwrap(),
            mesh::grid2d(2).unwrap(),
            mesh::kuhn_cube(3).unwrap(),
        ] {
            let text = render_mesh(&m);
            let back = parse_mesh(&text).unwrap();
            assert_eq!(back.dim(), m.dim());
            assert_eq!(back.num_vertices(), m.num_vertices());
            assert_eq!(back.simplices(), m.simplices());
            for (a, b) in back.vertices().iter().zip(m.vertices()) {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn comments_and_rationals() {
        let text = "# header\n dim 2 # trailing\nvertices 3\n0 0\n1/2 0 # half\n0 1/3\nsimplices 1\n0 1 2\n";
        let m = parse_mesh(text).unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.num_vertices(), 3);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_mesh("").is_err());
        assert!(parse_mesh("dim 2\nvertices 1\n0 0\nsimplices 1\n0 1 2\n").is_err());
        assert!(parse_mesh("dim 2\nvertices 3\n0 0\n1 0\n0 1\nsimplices 1\n0 1\n").is_err());
        // nonconforming content is also rejected at parse time
        let hanging = "dim 2\nvertices 5\n0 0\n2 0\n0 2\n1 1\n2 2\nsimplices 2\n0 1 2\n1 3 4\n";
        assert!(parse_mesh(hanging).is_err());
    }
}
