//! Straight-sided triangle meshes and their connectivity.
//!
//! Local face `f` of element `k` joins vertices `EToV[k][f]` and
//! `EToV[k][(f + 1) % 3]`, matching the reference face numbering.

mod geometry;
mod io;
mod surfinfo;

pub use geometry::GeomFactors;
pub use io::{parse_mesh, read_mesh};
pub use surfinfo::{SurfInfo, SurfRecord};

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
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

    pub fn unit() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    /// Counterclockwise vertex triples.
    pub etov: Vec<[usize; 3]>,
    /// Neighbor element per face; the element itself on the boundary.
    pub etoe: Vec<[usize; 3]>,
    /// Neighbor's local face per face; the face itself on the boundary.
    pub etof: Vec<[usize; 3]>,
}

fn signed_area(v: &[[f64; 2]], tri: [usize; 3]) -> f64 {
    let [a, b, c] = tri.map(|i| v[i]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

impl Mesh {
    /// Builds a mesh from raw vertices and triangles, reorienting clockwise
    /// elements and computing adjacency.
    pub fn new(vertices: Vec<[f64; 2]>, mut etov: Vec<[usize; 3]>) -> Result<Self> {
        let nv = vertices.len();
        for (k, tri) in etov.iter_mut().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&v| v >= nv) {
                return Err(Error::VertexOutOfRange {
                    element: k,
                    vertex: bad,
                    count: nv,
                });
            }
            let area = signed_area(&vertices, *tri);
            let scale = tri
                .iter()
                .map(|&i| vertices[i][0].abs().max(vertices[i][1].abs()))
                .fold(1.0, f64::max);
            if area.abs() <= 1e-14 * scale * scale {
                return Err(Error::DegenerateElement(k));
            }
            if area < 0.0 {
                log::warn!("element {k} is clockwise; swapping vertices 1 and 2");
                tri.swap(1, 2);
            }
        }
        let (etoe, etof) = connect(&etov)?;
        let mesh = Self {
            vertices,
            etov,
            etoe,
            etof,
        };
        mesh.check_conforming()?;
        Ok(mesh)
    }

    /// Structured triangulation of `rect` with `nx * ny` cells, each split
    /// along its lower-left to upper-right diagonal.
    pub fn rectangle(nx: usize, ny: usize, rect: Rect) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::DegenerateExtent(format!(
                "cell counts must be positive, got {nx}x{ny}"
            )));
        }
        if !(rect.width() > 0.0 && rect.height() > 0.0) || !rect.width().is_finite() {
            return Err(Error::DegenerateExtent(format!("{rect:?}")));
        }
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push([
                    rect.x0 + rect.width() * i as f64 / nx as f64,
                    rect.y0 + rect.height() * j as f64 / ny as f64,
                ]);
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut etov = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                etov.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                etov.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        Self::new(vertices, etov)
    }

    pub fn num_elements(&self) -> usize {
        self.etov.len()
    }

    pub fn face_vertices(&self, k: usize, f: usize) -> ([f64; 2], [f64; 2]) {
        let tri = self.etov[k];
        (self.vertices[tri[f]], self.vertices[tri[(f + 1) % 3]])
    }

    pub fn is_boundary(&self, k: usize, f: usize) -> bool {
        self.etoe[k][f] == k && self.etof[k][f] == f
    }

    pub fn element_area(&self, k: usize) -> f64 {
        signed_area(&self.vertices, self.etov[k])
    }

    pub fn area(&self) -> f64 {
        (0..self.num_elements()).map(|k| self.element_area(k)).sum()
    }

    pub fn bounding_box(&self) -> Rect {
        let mut b = Rect::new(f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &[x, y] in &self.vertices {
            b.x0 = b.x0.min(x);
            b.x1 = b.x1.max(x);
            b.y0 = b.y0.min(y);
            b.y1 = b.y1.max(y);
        }
        b
    }

    pub fn boundary_face_count(&self) -> usize {
        (0..self.num_elements())
            .flat_map(|k| (0..3).map(move |f| (k, f)))
            .filter(|&(k, f)| self.is_boundary(k, f))
            .count()
    }

    /// Rejects hanging nodes: a vertex lying strictly inside another boundary face.
    fn check_conforming(&self) -> Result<()> {
        let mut faces = Vec::new();
        let mut verts = Vec::new();
        for k in 0..self.num_elements() {
            for f in 0..3 {
                if self.is_boundary(k, f) {
                    let (a, b) = (self.etov[k][f], self.etov[k][(f + 1) % 3]);
                    faces.push((k, f, a, b));
                    verts.push(a);
                    verts.push(b);
                }
            }
        }
        verts.sort_unstable();
        verts.dedup();
        for &(k, f, a, b) in &faces {
            let (pa, pb) = (self.vertices[a], self.vertices[b]);
            let d = [pb[0] - pa[0], pb[1] - pa[1]];
            let len2 = d[0] * d[0] + d[1] * d[1];
            for &v in &verts {
                if v == a || v == b {
                    continue;
                }
                let p = self.vertices[v];
                let w = [p[0] - pa[0], p[1] - pa[1]];
                let t = (w[0] * d[0] + w[1] * d[1]) / len2;
                let cross = w[0] * d[1] - w[1] * d[0];
                if t > 1e-10 && t < 1.0 - 1e-10 && cross.abs() <= 1e-10 * len2 {
                    return Err(Error::NonConforming(format!(
                        "vertex {v} hangs on face {f} of element {k}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Element-to-element and element-to-face adjacency from sorted vertex pairs.
pub fn connect(etov: &[[usize; 3]]) -> Result<(Vec<[usize; 3]>, Vec<[usize; 3]>)> {
    let k_count = etov.len();
    let mut etoe: Vec<[usize; 3]> = (0..k_count).map(|k| [k; 3]).collect();
    let mut etof: Vec<[usize; 3]> = vec![[0, 1, 2]; k_count];
    let mut open: HashMap<(usize, usize), (usize, usize)> = HashMap::with_capacity(3 * k_count);
    let mut closed: HashMap<(usize, usize), ()> = HashMap::new();

    for (k, tri) in etov.iter().enumerate() {
        for f in 0..3 {
            let (a, b) = (tri[f], tri[(f + 1) % 3]);
            let key = (a.min(b), a.max(b));
            if closed.contains_key(&key) {
                return Err(Error::NonManifold(key.0, key.1));
            }
            match open.remove(&key) {
                Some((k2, f2)) => {
                    etoe[k][f] = k2;
                    etof[k][f] = f2;
                    etoe[k2][f2] = k;
                    etof[k2][f2] = f;
                    closed.insert(key, ());
                }
                None => {
                    open.insert(key, (k, f));
                }
            }
        }
    }
    Ok((etoe, etof))
}
