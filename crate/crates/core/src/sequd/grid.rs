//! Per-stage level grids: zooming, boundary shifting and snapping.

use crate::design::LevelDesign;
use crate::error::{Error, Result};

/// Level values of one unit-cube coordinate at some stage.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    /// The incumbent coordinate the axis was zoomed around.
    pub center: f64,
    /// `q` ascending values, equally spaced.
    pub levels: Vec<f64>,
    pub spacing: f64,
}

impl GridAxis {
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// Closed interval owning the levels: each level covers half a spacing
    /// on both sides.
    pub fn cell_box(&self) -> (f64, f64) {
        let first = self.levels[0];
        let last = self.levels[self.levels.len() - 1];
        (first - self.spacing / 2.0, last + self.spacing / 2.0)
    }

    /// Index of the nearest level, ties to the lower one.
    pub fn nearest(&self, x: f64) -> usize {
        let t = (x - self.levels[0]) / self.spacing;
        let k = (t - 0.5).ceil();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.levels.len() - 1)
        }
    }

    fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.cell_box();
        x >= lo && x <= hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceGrid {
    pub stage: usize,
    pub axes: Vec<GridAxis>,
}

/// Grid spacing `1 / (2^(j-1) q)` at stage `j`.
pub fn stage_spacing(j: usize, q: usize) -> f64 {
    let halvings = i32::try_from(j.saturating_sub(1)).unwrap_or(i32::MAX);
    0.5f64.powi(halvings) / q as f64
}

/// Index of the level placed on the zoom center: the middle one for odd
/// `q`, the lower of the two middle ones for even `q`.
pub fn center_index(q: usize) -> usize {
    (q - 1) / 2
}

impl SubspaceGrid {
    /// Stage-1 grid: levels `(2k - 1) / (2q)` on every axis.
    pub fn initial(s: usize, q: usize) -> Result<Self> {
        if s < 1 || q < 1 {
            return Err(Error::InvalidArgument("factors and levels must be >= 1".into()));
        }
        let levels: Vec<f64> = (1..=q).map(|k| (2 * k - 1) as f64 / (2 * q) as f64).collect();
        let axis = GridAxis {
            center: 0.5,
            levels,
            spacing: 1.0 / q as f64,
        };
        Ok(Self {
            stage: 1,
            axes: vec![axis; s],
        })
    }

    /// Stage-`j` grid zoomed around `x_star` and shifted inside `[0, 1]`.
    pub fn zoomed(x_star: &[f64], j: usize, q: usize) -> Result<Self> {
        let axes = x_star
            .iter()
            .map(|&x| zoom_levels(x, j, q).map(shift_into_bounds))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { stage: j, axes })
    }

    pub fn factors(&self) -> usize {
        self.axes.len()
    }

    pub fn level_count(&self) -> usize {
        self.axes.first().map_or(0, GridAxis::level_count)
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.axes.len() && self.axes.iter().zip(point).all(|(a, &x)| a.contains(x))
    }

    /// Unit-cube image of a 1-based level row.
    pub fn to_unit(&self, level_row: &[u32]) -> Vec<f64> {
        self.axes
            .iter()
            .zip(level_row)
            .map(|(a, &u)| a.levels[u as usize - 1])
            .collect()
    }

    /// 1-based level row of the nearest grid node.
    pub fn snap(&self, point: &[f64]) -> Vec<u32> {
        self.axes
            .iter()
            .zip(point)
            .map(|(a, &x)| a.nearest(x) as u32 + 1)
            .collect()
    }

    /// Axis-aligned box owning the grid, clipped to the unit cube.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.axes
            .iter()
            .map(|a| {
                let (lo, hi) = a.cell_box();
                (lo.max(0.0), hi.min(1.0))
            })
            .collect()
    }
}

/// Unshifted stage-`j` levels around `x_star`, `j >= 2`.
pub fn zoom_levels(x_star: f64, j: usize, q: usize) -> Result<GridAxis> {
    if j < 2 {
        return Err(Error::InvalidArgument(format!("zoom needs stage >= 2, got {j}")));
    }
    if q < 1 {
        return Err(Error::InvalidArgument("level count must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&x_star) {
        return Err(Error::InvalidArgument(format!("center {x_star} outside [0, 1]")));
    }
    let spacing = stage_spacing(j, q);
    let c = center_index(q) as f64;
    let levels = (0..q).map(|k| x_star + (k as f64 - c) * spacing).collect();
    Ok(GridAxis {
        center: x_star,
        levels,
        spacing,
    })
}

/// Translates the levels so all of them lie in `[0, 1]`.
///
/// # Panics
///
/// If the level span exceeds 1, which the zoom formulas never produce.
pub fn shift_into_bounds(axis: GridAxis) -> GridAxis {
    let q = axis.levels.len();
    let span = axis.spacing * (q as f64 - 1.0);
    assert!(span <= 1.0 + 1e-12, "level span {span} does not fit in [0, 1]");
    let first = axis.levels[0];
    let last = axis.levels[q - 1];
    let start = if first < 0.0 {
        0.0
    } else if last > 1.0 {
        1.0 - span
    } else {
        return axis;
    };
    let levels = (0..q)
        .map(|k| (start + k as f64 * axis.spacing).clamp(0.0, 1.0))
        .collect();
    GridAxis { levels, ..axis }
}

/// Snaps every point inside the grid's box onto its nearest node. Returns the
/// snapped block and the indices of the points used.
pub fn snap_existing<'a, I>(points: I, grid: &SubspaceGrid) -> Result<(LevelDesign, Vec<usize>)>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let s = grid.factors();
    let q = grid.level_count();
    let mut rows = Vec::new();
    let mut used = Vec::new();
    for (i, p) in points.into_iter().enumerate() {
        if p.len() != s {
            return Err(Error::DimensionMismatch {
                expected: s,
                found: p.len(),
            });
        }
        if grid.contains(p) {
            rows.push(grid.snap(p));
            used.push(i);
        }
    }
    let design = if rows.is_empty() {
        LevelDesign::empty(s, q)
    } else {
        LevelDesign::from_rows(&rows, s, q)?
    };
    Ok((design, used))
}
