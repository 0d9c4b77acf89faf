mod common;

use std::io::Write;

use dgtd::mesh::{connect, read_mesh, GeomFactors, Mesh, Rect, SurfInfo};
use dgtd::refelem::ReferenceElement;
use dgtd::Error;
use proptest::prelude::*;

fn write_temp(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn rect_counts() {
    let m = Mesh::rectangle(1, 1, Rect::unit()).unwrap();
    assert_eq!((m.vertices.len(), m.num_elements()), (4, 2));
    let m = Mesh::rectangle(2, 2, Rect::unit()).unwrap();
    assert_eq!((m.vertices.len(), m.num_elements()), (9, 8));
    let m = Mesh::rectangle(3, 5, Rect::new(-1.0, 2.0, 0.0, 0.5)).unwrap();
    assert_eq!(m.num_elements(), 30);
    assert!((m.area() - 1.5).abs() < 1e-12);
}

#[test]
fn rect_rejects_degenerate_extent() {
    assert!(Mesh::rectangle(2, 2, Rect::new(0.0, 0.0, 0.0, 1.0)).is_err());
    assert!(Mesh::rectangle(0, 2, Rect::unit()).is_err());
}

#[test]
fn read_single_triangle() {
    let f = write_temp("3 1\n0 0\n1 0\n0 1\n0 1 2\n");
    let m = read_mesh(f.path()).unwrap();
    assert_eq!(m.num_elements(), 1);
    assert_eq!(m.etoe[0], [0, 0, 0]);
    assert_eq!(m.etof[0], [0, 1, 2]);
}

#[test]
fn read_two_triangle_square() {
    let f = write_temp("4 2\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n# markers\n1 2 3\n");
    let m = read_mesh(f.path()).unwrap();
    let shared: Vec<_> = (0..2)
        .flat_map(|k| (0..3).map(move |f| (k, f)))
        .filter(|&(k, f)| !m.is_boundary(k, f))
        .collect();
    assert_eq!(shared, vec![(0, 2), (1, 0)]);
    assert_eq!(m.boundary_face_count(), 4);
}

#[test]
fn truncated_file_names_line() {
    let f = write_temp("4 2\n0 0\n1 0\n1 1\n0 1\n0 1 2\n");
    match read_mesh(f.path()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
        other => panic!("{other:?}"),
    }
}

#[test]
fn missing_file_reports_path() {
    match read_mesh("/nonexistent/mesh.txt") {
        Err(Error::Io { path, .. }) => assert!(path.ends_with("mesh.txt")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn inverted_element_is_reoriented() {
    let m = Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 2, 1]]).unwrap();
    assert!(m.element_area(0) > 0.0);
}

#[test]
fn connect_rejects_non_manifold_edge() {
    let etov = [[0, 1, 2], [1, 0, 3], [0, 1, 4]];
    assert!(matches!(connect(&etov), Err(Error::NonManifold(..))));
}

#[test]
fn reference_congruent_element() {
    let m = Mesh::new(vec![[-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0]], vec![[0, 1, 2]]).unwrap();
    let re = ReferenceElement::new(2).unwrap();
    let g = GeomFactors::new(&m, &re).unwrap();
    assert_eq!(g.jacobian(0), [[1.0, 0.0], [0.0, 1.0]]);
    assert!((g.det[0] - 1.0).abs() < 1e-15);
    assert!((g.nx[0][0]).abs() < 1e-15 && (g.ny[0][0] + 1.0).abs() < 1e-15);
}

#[test]
fn unit_right_triangle() {
    let m = Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]]).unwrap();
    let re = ReferenceElement::new(1).unwrap();
    let g = GeomFactors::new(&m, &re).unwrap();
    let a = g.jacobian(0);
    assert!((a[0][0] - 0.5).abs() < 1e-15 && (a[1][1] - 0.5).abs() < 1e-15);
    assert!(a[0][1].abs() < 1e-15 && a[1][0].abs() < 1e-15);
    assert!((g.det[0] - 0.25).abs() < 1e-15);
    let h = 1.0 / 2f64.sqrt();
    assert!((g.nx[0][1] - h).abs() < 1e-15 && (g.ny[0][1] - h).abs() < 1e-15);
}

#[test]
fn two_triangle_surfinfo_pairs_shared_endpoints() {
    let m = Mesh::rectangle(1, 1, Rect::unit()).unwrap();
    let re = ReferenceElement::new(1).unwrap();
    let g = GeomFactors::new(&m, &re).unwrap();
    let s = SurfInfo::new(&m, &g, &re).unwrap();
    let interior: Vec<_> = s.records.iter().filter(|r| r.bsc > 0.0).collect();
    assert_eq!(interior.len(), 4);
    for r in interior {
        assert_eq!((g.x[r.id_m], g.y[r.id_m]), (g.x[r.id_p], g.y[r.id_p]));
        assert_ne!(r.id_m / re.np, r.id_p / re.np);
    }
}

#[test]
fn single_triangle_surfinfo_is_all_boundary() {
    let m = Mesh::new(vec![[0.0, 0.0], [2.0, 0.0], [0.5, 1.0]], vec![[0, 1, 2]]).unwrap();
    let re = ReferenceElement::new(3).unwrap();
    let g = GeomFactors::new(&m, &re).unwrap();
    let s = SurfInfo::new(&m, &g, &re).unwrap();
    assert_eq!(s.len(), 3 * re.nfp);
    assert!(s.records.iter().all(|r| r.id_p == r.id_m && r.bsc == -1.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adjacency_is_an_involution(mesh in common::mesh_strategy()) {
        for k in 0..mesh.num_elements() {
            for f in 0..3 {
                let (k2, f2) = (mesh.etoe[k][f], mesh.etof[k][f]);
                if k2 == k {
                    prop_assert_eq!(f2, f);
                } else {
                    prop_assert_eq!((mesh.etoe[k2][f2], mesh.etof[k2][f2]), (k, f));
                }
            }
        }
    }

    #[test]
    fn geometry_invariants(mesh in common::mesh_strategy()) {
        let re = ReferenceElement::new(2).unwrap();
        let g = GeomFactors::new(&mesh, &re).unwrap();
        let total: f64 = g.det.iter().map(|d| 2.0 * d).sum();
        prop_assert!((total - mesh.area()).abs() < 1e-10 * mesh.area());
        for k in 0..mesh.num_elements() {
            prop_assert!(g.det[k] > 0.0);
            let a = g.jacobian(k);
            let inv = [[g.rx[k], g.ry[k]], [g.sx[k], g.sy[k]]];
            for i in 0..2 {
                for j in 0..2 {
                    let p: f64 = (0..2).map(|l| inv[i][l] * a[l][j]).sum();
                    let id = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((p - id).abs() < 1e-12);
                }
            }
            let mut closure = [0.0; 2];
            for f in 0..3 {
                prop_assert!((g.nx[k][f].hypot(g.ny[k][f]) - 1.0).abs() < 1e-12);
                prop_assert!(g.fsc[k][f] > 0.0);
                let len = g.face_length(k, f);
                closure[0] += len * g.nx[k][f];
                closure[1] += len * g.ny[k][f];
                let (a, b) = mesh.face_vertices(k, f);
                prop_assert!((len - (b[0] - a[0]).hypot(b[1] - a[1])).abs() < 1e-12);
            }
            prop_assert!(closure[0].abs() < 1e-12 && closure[1].abs() < 1e-12);
        }
    }

    #[test]
    fn translation_leaves_geometry_unchanged(mesh in common::mesh_strategy(), dx in -5.0f64..5.0, dy in -5.0f64..5.0) {
        let re = ReferenceElement::new(1).unwrap();
        let moved = Mesh::new(mesh.vertices.iter().map(|v| [v[0] + dx, v[1] + dy]).collect(), mesh.etov.clone()).unwrap();
        let (g0, g1) = (GeomFactors::new(&mesh, &re).unwrap(), GeomFactors::new(&moved, &re).unwrap());
        for k in 0..mesh.num_elements() {
            prop_assert!((g0.det[k] - g1.det[k]).abs() < 1e-12);
            for f in 0..3 {
                prop_assert!((g0.nx[k][f] - g1.nx[k][f]).abs() < 1e-12);
                prop_assert!((g0.ny[k][f] - g1.ny[k][f]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn surfinfo_pairing(mesh in common::mesh_strategy(), n in 1usize..5) {
        let re = ReferenceElement::new(n).unwrap();
        let g = GeomFactors::new(&mesh, &re).unwrap();
        let s = SurfInfo::new(&mesh, &g, &re).unwrap();
        prop_assert_eq!(s.len(), mesh.num_elements() * 3 * re.nfp);
        let by_m: std::collections::HashMap<usize, Vec<usize>> =
            s.records.iter().enumerate().fold(Default::default(), |mut acc, (i, r)| {
                acc.entry(r.id_m).or_default().push(i);
                acc
            });
        for r in &s.records {
            if r.bsc < 0.0 {
                prop_assert_eq!(r.id_p, r.id_m);
                prop_assert_eq!(r.bsc, -1.0);
                continue;
            }
            prop_assert_eq!(r.bsc, 1.0);
            prop_assert!((g.x[r.id_m] - g.x[r.id_p]).abs() < 1e-9);
            prop_assert!((g.y[r.id_m] - g.y[r.id_p]).abs() < 1e-9);
            // some record on the neighbor side points back with the opposite normal
            let back = by_m[&r.id_p].iter().map(|&i| s.records[i]).any(|q| {
                q.id_p == r.id_m && (q.nx + r.nx).abs() < 1e-12 && (q.ny + r.ny).abs() < 1e-12
            });
            prop_assert!(back);
        }
    }
}
