use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::layout::FieldSet;
use crate::mesh::{GeomFactors, Mesh};
use crate::real::Real;
use crate::refelem::ReferenceElement;

const VTK_TRIANGLE: u8 = 5;

/// Writes a legacy ASCII VTK unstructured grid: every volume node is a point,
/// each element is split into `N^2` sub-triangles, and `Hx`, `Hy`, `Ez` are
/// attached as point scalars with six significant digits.
pub fn write_vtk<T: Real>(
    path: impl AsRef<Path>,
    state: &FieldSet<T>,
    mesh: &Mesh,
    reference: &ReferenceElement,
) -> Result<()> {
    let path = path.as_ref();
    let geom = GeomFactors::new(mesh, reference)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_body(&mut w, state, mesh, reference, &geom)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

fn write_body<T: Real>(
    w: &mut impl Write,
    state: &FieldSet<T>,
    mesh: &Mesh,
    reference: &ReferenceElement,
    geom: &GeomFactors,
) -> std::io::Result<()> {
    let k = mesh.num_elements();
    let np = reference.np;
    let npts = k * np;
    let tris = reference.sub_triangles();
    let ncells = k * tris.len();

    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "dgtd TM fields, degree {}", reference.degree)?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {npts} double")?;
    for (x, y) in geom.x.iter().zip(&geom.y) {
        writeln!(w, "{x:.9e} {y:.9e} 0")?;
    }
    writeln!(w, "CELLS {ncells} {}", 4 * ncells)?;
    for e in 0..k {
        for t in &tris {
            let off = e * np;
            writeln!(w, "3 {} {} {}", off + t[0], off + t[1], off + t[2])?;
        }
    }
    writeln!(w, "CELL_TYPES {ncells}")?;
    for _ in 0..ncells {
        writeln!(w, "{VTK_TRIANGLE}")?;
    }
    writeln!(w, "POINT_DATA {npts}")?;
    let values = state.gather();
    for (name, field) in ["Hx", "Hy", "Ez"].iter().zip(&values) {
        writeln!(w, "SCALARS {name} float 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for v in field {
            writeln!(w, "{v:.5e}")?;
        }
    }
    Ok(())
}
