use std::io::Write;

use super::config::{Config, MeshSource, Precision};
use super::run::Simulation;
use crate::error::{Error, Result};
use crate::mesh::Rect;
use crate::real::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    /// Cells per side.
    pub cells: usize,
    pub h: f64,
    /// Combined L² error of `(Hx, Hy, Ez)` at the final time.
    pub error: f64,
    /// Observed order against the previous row.
    pub order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Order observed between the two finest levels.
    pub fn final_order(&self) -> f64 {
        self.rows
            .last()
            .and_then(|r| r.order)
            .unwrap_or(f64::NAN)
    }

    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "cells,h,error,order")?;
        for r in &self.rows {
            let order = r.order.map(|o| format!("{o:.4}")).unwrap_or_default();
            writeln!(w, "{},{:e},{:e},{order}", r.cells, r.h, r.error)?;
        }
        Ok(())
    }
}

/// Runs `cfg` on rectangular meshes with `levels[i]` cells per side of the
/// configured rectangle (the unit square for file meshes) and measures the
/// final-time error against the exact solution.
pub fn convergence_study(cfg: &Config, levels: &[usize]) -> Result<ConvergenceTable> {
    if levels.len() < 3 {
        return Err(Error::Config(format!(
            "a convergence study needs at least 3 levels, got {}",
            levels.len()
        )));
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("refinement levels must be strictly increasing".into()));
    }
    let extent = match &cfg.mesh {
        MeshSource::Rect { extent, .. } => *extent,
        MeshSource::File(_) => Rect::unit(),
    };
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels.len());
    for &cells in levels {
        let mut level = cfg.clone();
        level.mesh = MeshSource::Rect {
            nx: cells,
            ny: cells,
            extent,
        };
        level.out = None;
        let err = match cfg.precision {
            Precision::Single => final_error::<f32>(&level)?,
            Precision::Double => final_error::<f64>(&level)?,
        };
        let error = err.iter().map(|e| e * e).sum::<f64>().sqrt();
        let h = extent.width().max(extent.height()) / cells as f64;
        let order = rows
            .last()
            .map(|p| (p.error / error).ln() / (p.h / h).ln());
        log::info!("cells = {cells}, error = {error:.3e}, order = {order:?}");
        rows.push(ConvergenceRow {
            cells,
            h,
            error,
            order,
        });
    }
    Ok(ConvergenceTable { rows })
}

fn final_error<T: Real>(cfg: &Config) -> Result<[f64; 3]> {
    let mut sim = Simulation::<T>::new(cfg)?;
    sim.run_to_end()?;
    sim.errors().ok_or_else(|| {
        Error::UnsupportedReference("the initial condition has no exact solution to compare against".into())
    })
}
