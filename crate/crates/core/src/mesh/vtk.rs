//! Legacy ASCII VTK output (`# vtk DataFile Version 3.0`, unstructured grid).

use std::io::Write;

use super::TriMesh;
use crate::analysis::FemField;
use crate::{Error, Result};

const VTK_TRIANGLE: u8 = 5;

/// Writes `mesh` with one `POINT_DATA` scalar array per named field.
///
/// Point data holds the vertex values of each field; for P2 fields the
/// edge-midpoint coefficients are not representable on linear cells and are
/// dropped.
pub fn write_vtk<W: Write>(mesh: &TriMesh, fields: &[(&str, &FemField)], mut out: W) -> Result<()> {
    for (name, field) in fields {
        let dm = field.dofmap();
        if dm.mesh().num_vertices() != mesh.num_vertices() || dm.mesh().num_triangles() != mesh.num_triangles() {
            return Err(Error::Dimension(format!(
                "field '{name}' lives on a mesh with {} vertices, expected {}",
                dm.mesh().num_vertices(),
                mesh.num_vertices()
            )));
        }
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(Error::Config(format!("invalid VTK array name '{name}'")));
        }
    }

    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "dirichlet-control level {}", mesh.level)?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", mesh.num_vertices())?;
    for p in &mesh.vertices {
        // `{:?}` prints the shortest representation that round-trips.
        writeln!(out, "{:?} {:?} 0", p[0], p[1])?;
    }
    let nt = mesh.num_triangles();
    writeln!(out, "CELLS {} {}", nt, 4 * nt)?;
    for t in &mesh.triangles {
        writeln!(out, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(out, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(out, "{VTK_TRIANGLE}")?;
    }
    if !fields.is_empty() {
        writeln!(out, "POINT_DATA {}", mesh.num_vertices())?;
        for (name, field) in fields {
            writeln!(out, "SCALARS {name} double 1")?;
            writeln!(out, "LOOKUP_TABLE default")?;
            for v in &field.coefficients()[..mesh.num_vertices()] {
                writeln!(out, "{v:?}")?;
            }
        }
    }
    Ok(())
}

/// [`write_vtk`] into an in-memory byte buffer.
pub fn export_vtk(mesh: &TriMesh, fields: &[(&str, &FemField)]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_vtk(mesh, fields, &mut buf)?;
    Ok(buf)
}
