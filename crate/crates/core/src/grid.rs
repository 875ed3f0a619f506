//! Rectangular parameter-domain sampling.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{ProfilePair, Window};
use crate::surface::{eval_surface_point, MaskTolerances, SurfacePoint};

/// Vertex lattice over a window, with the masking tolerances the samples
/// were produced under.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec {
    pub window: Window,
    /// Vertex count along `u1`.
    pub n1: usize,
    /// Vertex count along `u2`.
    pub n2: usize,
    pub tol: MaskTolerances,
}

impl GridSpec {
    pub fn new(window: Window, n1: usize, n2: usize, tol: MaskTolerances) -> Result<Self> {
        if n1 < 2 || n2 < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 vertices per axis, got {n1} x {n2}"
            )));
        }
        if !(window.u1_min < window.u1_max) || !(window.u2_min < window.u2_max) {
            return Err(Error::InvalidGrid("window must have positive extent".into()));
        }
        if ![window.u1_min, window.u1_max, window.u2_min, window.u2_max].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidGrid("window bounds must be finite".into()));
        }
        Ok(Self { window, n1, n2, tol })
    }

    /// Parameter point of vertex `(i1, i2)`.
    pub fn vertex(&self, i1: usize, i2: usize) -> (f64, f64) {
        let du1 = (self.window.u1_max - self.window.u1_min) / (self.n1 - 1) as f64;
        let du2 = (self.window.u2_max - self.window.u2_min) / (self.n2 - 1) as f64;
        (self.window.u1_min + i1 as f64 * du1, self.window.u2_min + i2 as f64 * du2)
    }
}

/// All vertex samples in row-major order with `u1` as the major axis:
/// index `i1 * n2 + i2`. Masked vertices stay in place, flagged.
#[derive(Debug, Clone)]
pub struct SampleTable {
    pub grid: GridSpec,
    pub rows: Vec<SurfacePoint>,
}

impl SampleTable {
    pub fn point(&self, i1: usize, i2: usize) -> &SurfacePoint {
        &self.rows[i1 * self.grid.n2 + i2]
    }

    pub fn masked_count(&self) -> usize {
        self.rows.iter().filter(|p| p.is_masked()).count()
    }
}

fn sample_row(pair: &ProfilePair, grid: &GridSpec, i1: usize) -> Vec<SurfacePoint> {
    (0..grid.n2)
        .map(|i2| {
            let (u1, u2) = grid.vertex(i1, i2);
            eval_surface_point(pair, u1, u2, grid.tol)
        })
        .collect()
}

/// Evaluate the surface at every vertex, sequentially.
pub fn sample_grid(pair: &ProfilePair, grid: &GridSpec) -> SampleTable {
    let rows = (0..grid.n1).flat_map(|i1| sample_row(pair, grid, i1)).collect();
    SampleTable { grid: *grid, rows }
}

/// Row-parallel sampling; bit-identical to [`sample_grid`] because each
/// vertex is computed by the same pure function and rows are reassembled in
/// index order.
pub fn sample_grid_parallel(pair: &ProfilePair, grid: &GridSpec) -> SampleTable {
    let rows: Vec<Vec<SurfacePoint>> =
        (0..grid.n1).into_par_iter().map(|i1| sample_row(pair, grid, i1)).collect();
    SampleTable { grid: *grid, rows: rows.into_iter().flatten().collect() }
}
