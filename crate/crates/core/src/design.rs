//! Level designs, the unit-cube mapping and the centered L2 discrepancy.
//!
//! A [`LevelDesign`] is an `n x s` matrix of integer levels in `1..=q`. When
//! every column holds each level exactly `n / q` times it is a U-type design
//! ([`UTypeDesign`]). Level `u` maps to the cell midpoint `(2u - 1) / (2q)`.
//!
//! The discrepancy is optimized in its squared form. [`Cd2Cache`] keeps the
//! per-row and pairwise product terms so that a within-column exchange of two
//! entries can be scored in `O(n)` and committed in `O(n s)`.

use std::fmt::Write as _;
use std::ops::Deref;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeded_rng;

/// An `n x s` matrix of levels in `1..=q`, stored row-major. Balance is not
/// required; see [`UTypeDesign`] for the balanced form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelDesign {
    n: usize,
    s: usize,
    q: usize,
    levels: Vec<u32>,
}

impl LevelDesign {
    /// Builds a design from rows. Every row must have `s` entries in `1..=q`.
    pub fn from_rows(rows: &[Vec<u32>], s: usize, q: usize) -> Result<Self> {
        if q < 1 {
            return Err(Error::InvalidArgument("level count must be >= 1".into()));
        }
        let mut levels = Vec::with_capacity(rows.len() * s);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != s {
                return Err(Error::DimensionMismatch {
                    expected: s,
                    found: row.len(),
                });
            }
            for (j, &u) in row.iter().enumerate() {
                if u < 1 || u as usize > q {
                    return Err(Error::LevelOutOfRange {
                        row: i,
                        column: j,
                        level: u,
                        levels: q,
                    });
                }
            }
            levels.extend_from_slice(row);
        }
        Ok(Self {
            n: rows.len(),
            s,
            q,
            levels,
        })
    }

    /// An empty design with `s` columns; the fixed block of a plain
    /// uniform-design construction.
    pub fn empty(s: usize, q: usize) -> Self {
        Self {
            n: 0,
            s,
            q,
            levels: Vec::new(),
        }
    }

    pub(crate) fn from_flat(n: usize, s: usize, q: usize, levels: Vec<u32>) -> Self {
        debug_assert_eq!(levels.len(), n * s);
        Self { n, s, q, levels }
    }

    pub fn runs(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> usize {
        self.s
    }

    pub fn level_count(&self) -> usize {
        self.q
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.levels[row * self.s + col]
    }

    pub fn row(&self, row: usize) -> &[u32] {
        &self.levels[row * self.s..(row + 1) * self.s]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.levels.chunks(self.s.max(1)).take(self.n)
    }

    pub fn as_flat(&self) -> &[u32] {
        &self.levels
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.rows().map(<[u32]>::to_vec).collect()
    }

    /// Occurrences of each level in `col`; index 0 counts level 1.
    pub fn column_counts(&self, col: usize) -> Vec<usize> {
        let mut counts = vec![0; self.q];
        for i in 0..self.n {
            counts[self.get(i, col) as usize - 1] += 1;
        }
        counts
    }

    /// Checks the U-type balance condition.
    pub fn check_balanced(&self) -> Result<()> {
        if !self.n.is_multiple_of(self.q) {
            return Err(Error::NotDivisible {
                runs: self.n,
                levels: self.q,
            });
        }
        let expected = self.n / self.q;
        for col in 0..self.s {
            for (k, &count) in self.column_counts(col).iter().enumerate() {
                if count != expected {
                    return Err(Error::Unbalanced {
                        column: col,
                        level: k as u32 + 1,
                        count,
                        expected,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_balanced(&self) -> bool {
        self.check_balanced().is_ok()
    }

    /// Stacks `other` below `self`.
    pub fn stack(&self, other: &LevelDesign) -> Result<LevelDesign> {
        if self.s != other.s {
            return Err(Error::DimensionMismatch {
                expected: self.s,
                found: other.s,
            });
        }
        if self.q != other.q {
            return Err(Error::InvalidArgument(format!(
                "level counts differ: {} vs {}",
                self.q, other.q
            )));
        }
        let mut levels = self.levels.clone();
        levels.extend_from_slice(&other.levels);
        Ok(Self::from_flat(self.n + other.n, self.s, self.q, levels))
    }

    /// Maps every level to its cell midpoint `(2u - 1) / (2q)`.
    pub fn to_unit(&self) -> UnitDesign {
        let q2 = 2.0 * self.q as f64;
        let points = self
            .levels
            .iter()
            .map(|&u| (2.0 * u as f64 - 1.0) / q2)
            .collect();
        UnitDesign {
            n: self.n,
            s: self.s,
            points,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(u32::to_string).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    /// Parses the headerless CSV form. The level count is not stored in CSV.
    pub fn from_csv(text: &str, q: usize) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|field| {
                    field.trim().parse::<u32>().map_err(|e| {
                        Error::Parse(format!("line {}: '{}': {}", lineno + 1, field.trim(), e))
                    })
                })
                .collect::<Result<Vec<u32>>>()?;
            rows.push(row);
        }
        let s = rows.first().map_or(0, Vec::len);
        Self::from_rows(&rows, s, q)
    }

    pub fn to_json(&self) -> String {
        let doc = DesignDoc {
            n: self.n,
            s: self.s,
            q: self.q,
            levels: self.to_rows(),
        };
        serde_json::to_string(&doc).expect("design serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DesignDoc = serde_json::from_str(text)?;
        if doc.levels.len() != doc.n {
            return Err(Error::DimensionMismatch {
                expected: doc.n,
                found: doc.levels.len(),
            });
        }
        Self::from_rows(&doc.levels, doc.s, doc.q)
    }

    /// Reads a design file; `.json` files carry their level count, CSV files
    /// need `q`.
    pub fn read_file(path: &Path, q: Option<usize>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let is_json = path.extension().is_some_and(|e| e == "json")
            || text.trim_start().starts_with('{');
        if is_json {
            Self::from_json(&text)
        } else {
            let q = q.ok_or_else(|| {
                Error::InvalidArgument("CSV designs need an explicit level count".into())
            })?;
            Self::from_csv(&text, q)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct DesignDoc {
    n: usize,
    s: usize,
    q: usize,
    levels: Vec<Vec<u32>>,
}

/// A balanced level design: each column holds every level exactly `n / q`
/// times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UTypeDesign(LevelDesign);

impl UTypeDesign {
    pub fn new(design: LevelDesign) -> Result<Self> {
        design.check_balanced()?;
        Ok(Self(design))
    }

    pub fn into_inner(self) -> LevelDesign {
        self.0
    }
}

impl Deref for UTypeDesign {
    type Target = LevelDesign;

    fn deref(&self) -> &LevelDesign {
        &self.0
    }
}

/// Random balanced design: each column is an independent shuffle of the
/// multiset `{1 x n/q, ..., q x n/q}`.
pub fn random_balanced(n: usize, s: usize, q: usize, seed: u64) -> Result<UTypeDesign> {
    if n < 1 || s < 1 || q < 1 {
        return Err(Error::InvalidArgument(
            "runs, factors and levels must all be >= 1".into(),
        ));
    }
    if !n.is_multiple_of(q) {
        return Err(Error::NotDivisible { runs: n, levels: q });
    }
    let mut rng = seeded_rng(seed, 0);
    let base: Vec<u32> = (0..n).map(|i| (i / (n / q)) as u32 + 1).collect();
    let mut levels = vec![0u32; n * s];
    for col in 0..s {
        let mut column = base.clone();
        column.shuffle(&mut rng);
        for (i, u) in column.into_iter().enumerate() {
            levels[i * s + col] = u;
        }
    }
    Ok(UTypeDesign(LevelDesign::from_flat(n, s, q, levels)))
}

/// An `n x s` matrix of points in the unit cube, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitDesign {
    n: usize,
    s: usize,
    points: Vec<f64>,
}

impl UnitDesign {
    pub fn from_rows(rows: &[Vec<f64>], s: usize) -> Result<Self> {
        let mut points = Vec::with_capacity(rows.len() * s);
        for row in rows {
            if row.len() != s {
                return Err(Error::DimensionMismatch {
                    expected: s,
                    found: row.len(),
                });
            }
            points.extend_from_slice(row);
        }
        Ok(Self {
            n: rows.len(),
            s,
            points,
        })
    }

    pub fn empty(s: usize) -> Self {
        Self {
            n: 0,
            s,
            points: Vec::new(),
        }
    }

    pub(crate) fn from_flat(n: usize, s: usize, points: Vec<f64>) -> Self {
        debug_assert_eq!(points.len(), n * s);
        Self { n, s, points }
    }

    pub fn runs(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> usize {
        self.s
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.points[row * self.s + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.points[row * self.s..(row + 1) * self.s]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks(self.s.max(1)).take(self.n)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.points
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Entry-wise `1 - x`.
    pub fn reflect(&self) -> UnitDesign {
        Self::from_flat(self.n, self.s, self.points.iter().map(|x| 1.0 - x).collect())
    }

    pub fn stack(&self, other: &UnitDesign) -> Result<UnitDesign> {
        if self.s != other.s {
            return Err(Error::DimensionMismatch {
                expected: self.s,
                found: other.s,
            });
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        Ok(Self::from_flat(self.n + other.n, self.s, points))
    }

    fn check_unit(&self) -> Result<()> {
        for (idx, &x) in self.points.iter().enumerate() {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::OutOfUnitCube {
                    row: idx / self.s,
                    column: idx % self.s,
                    value: x,
                });
            }
        }
        Ok(())
    }
}

/// Recovers the level of a midpoint-mapped coordinate, if it is one.
pub fn level_of(x: f64, q: usize) -> Option<u32> {
    let u = (2.0 * q as f64 * x + 1.0) / 2.0;
    let r = u.round();
    ((u - r).abs() < 1e-9 && r >= 1.0 && r <= q as f64).then_some(r as u32)
}

#[inline]
fn center_term(x: f64) -> f64 {
    let z = (x - 0.5).abs();
    1.0 + 0.5 * z - 0.5 * z * z
}

#[inline]
fn pair_term(x: f64, y: f64) -> f64 {
    1.0 + 0.5 * (x - 0.5).abs() + 0.5 * (y - 0.5).abs() - 0.5 * (x - y).abs()
}

/// Squared centered L2 discrepancy.
pub fn cd2_squared(x: &UnitDesign) -> Result<f64> {
    if x.n == 0 {
        return Err(Error::EmptyDesign);
    }
    x.check_unit()?;
    let n = x.n as f64;
    let s = x.s;
    let first = (13.0f64 / 12.0).powi(s as i32);
    let second: f64 = x
        .rows()
        .map(|row| row.iter().map(|&v| center_term(v)).product::<f64>())
        .sum();
    let mut third = 0.0;
    for k in 0..x.n {
        let rk = x.row(k);
        // diagonal: pair_term(v, v) = 1 + |v - 1/2|
        third += rk.iter().map(|&v| 1.0 + (v - 0.5).abs()).product::<f64>();
        for l in (k + 1)..x.n {
            let rl = x.row(l);
            let prod: f64 = rk.iter().zip(rl).map(|(&a, &b)| pair_term(a, b)).product();
            third += 2.0 * prod;
        }
    }
    Ok((first - 2.0 / n * second + third / (n * n)).max(0.0))
}

/// Centered L2 discrepancy (root form).
pub fn cd2(x: &UnitDesign) -> Result<f64> {
    cd2_squared(x).map(f64::sqrt)
}

/// Discrepancy of `fixed` stacked on top of `free`.
pub fn cd2_combined(fixed: &UnitDesign, free: &UnitDesign) -> Result<f64> {
    cd2(&fixed.stack(free)?)
}

pub fn cd2_combined_squared(fixed: &UnitDesign, free: &UnitDesign) -> Result<f64> {
    cd2_squared(&fixed.stack(free)?)
}

const RESYNC_INTERVAL: usize = 1024;

/// Incremental state for the squared discrepancy under within-column
/// exchanges. Single writer; parallel searches own separate caches.
#[derive(Debug, Clone)]
pub struct Cd2Cache {
    n: usize,
    s: usize,
    points: Vec<f64>,
    row_terms: Vec<f64>,
    kernel: Vec<f64>,
    row_sum: f64,
    kernel_sum: f64,
    leading: f64,
    commits: usize,
}

impl Cd2Cache {
    pub fn new(x: &UnitDesign) -> Result<Self> {
        if x.n == 0 {
            return Err(Error::EmptyDesign);
        }
        x.check_unit()?;
        let n = x.n;
        let s = x.s;
        let mut cache = Self {
            n,
            s,
            points: x.points.clone(),
            row_terms: vec![0.0; n],
            kernel: vec![0.0; n * n],
            row_sum: 0.0,
            kernel_sum: 0.0,
            leading: (13.0f64 / 12.0).powi(s as i32),
            commits: 0,
        };
        for k in 0..n {
            cache.row_terms[k] = cache.compute_row_term(k);
            for l in k..n {
                let v = cache.compute_kernel(k, l);
                cache.kernel[k * n + l] = v;
                cache.kernel[l * n + k] = v;
            }
        }
        cache.resync();
        Ok(cache)
    }

    pub fn runs(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> usize {
        self.s
    }

    pub fn point(&self, row: usize, col: usize) -> f64 {
        self.points[row * self.s + col]
    }

    pub fn squared(&self) -> f64 {
        let n = self.n as f64;
        (self.leading - 2.0 / n * self.row_sum + self.kernel_sum / (n * n)).max(0.0)
    }

    pub fn value(&self) -> f64 {
        self.squared().sqrt()
    }

    pub fn to_unit_design(&self) -> UnitDesign {
        UnitDesign::from_flat(self.n, self.s, self.points.clone())
    }

    fn compute_row_term(&self, k: usize) -> f64 {
        self.points[k * self.s..(k + 1) * self.s]
            .iter()
            .map(|&v| center_term(v))
            .product()
    }

    fn compute_kernel(&self, k: usize, l: usize) -> f64 {
        let rk = &self.points[k * self.s..(k + 1) * self.s];
        let rl = &self.points[l * self.s..(l + 1) * self.s];
        rk.iter().zip(rl).map(|(&a, &b)| pair_term(a, b)).product()
    }

    fn resync(&mut self) {
        self.row_sum = self.row_terms.iter().sum();
        self.kernel_sum = self.kernel.iter().sum();
    }

    fn check_indices(&self, col: usize, a: usize, b: usize) -> Result<()> {
        if col >= self.s {
            return Err(Error::IndexOutOfRange(format!(
                "column {col} of {}",
                self.s
            )));
        }
        if a >= self.n || b >= self.n {
            return Err(Error::IndexOutOfRange(format!(
                "rows ({a}, {b}) of {}",
                self.n
            )));
        }
        if a == b {
            return Err(Error::InvalidArgument(format!(
                "exchange needs two distinct rows, got {a} twice"
            )));
        }
        Ok(())
    }

    /// Change in squared discrepancy if `(a, col)` and `(b, col)` were
    /// swapped. Does not mutate the cache.
    pub fn exchange_delta(&self, col: usize, a: usize, b: usize) -> Result<f64> {
        self.check_indices(col, a, b)?;
        Ok(self.delta(col, a, b))
    }

    pub(crate) fn delta(&self, col: usize, a: usize, b: usize) -> f64 {
        let s = self.s;
        let n = self.n;
        let u = self.points[a * s + col];
        let v = self.points[b * s + col];
        if u == v {
            return 0.0;
        }

        let cu = center_term(u);
        let cv = center_term(v);
        let row_delta =
            self.row_terms[a] * (cv / cu - 1.0) + self.row_terms[b] * (cu / cv - 1.0);

        let du = 1.0 + (u - 0.5).abs();
        let dv = 1.0 + (v - 0.5).abs();
        let mut kernel_delta =
            self.kernel[a * n + a] * (dv / du - 1.0) + self.kernel[b * n + b] * (du / dv - 1.0);
        // the (a, b) entry is symmetric in the swap and does not change
        let ka = &self.kernel[a * n..(a + 1) * n];
        let kb = &self.kernel[b * n..(b + 1) * n];
        let mut off = 0.0;
        for l in 0..n {
            if l == a || l == b {
                continue;
            }
            let w = self.points[l * s + col];
            let fu = pair_term(u, w);
            let fv = pair_term(v, w);
            off += ka[l] * (fv / fu - 1.0) + kb[l] * (fu / fv - 1.0);
        }
        kernel_delta += 2.0 * off;

        let nf = n as f64;
        -2.0 / nf * row_delta + kernel_delta / (nf * nf)
    }

    /// Applies the swap and refreshes the affected terms. Returns the new
    /// squared discrepancy.
    pub fn commit_exchange(&mut self, col: usize, a: usize, b: usize) -> Result<f64> {
        self.check_indices(col, a, b)?;
        self.commit(col, a, b);
        Ok(self.squared())
    }

    pub(crate) fn commit(&mut self, col: usize, a: usize, b: usize) {
        let s = self.s;
        let n = self.n;
        self.points.swap(a * s + col, b * s + col);

        for r in [a, b] {
            let fresh = self.compute_row_term(r);
            self.row_sum += fresh - self.row_terms[r];
            self.row_terms[r] = fresh;
        }
        for r in [a, b] {
            for l in 0..n {
                if r == b && l == a {
                    continue;
                }
                let fresh = self.compute_kernel(r, l);
                let old = self.kernel[r * n + l];
                let weight = if l == r { 1.0 } else { 2.0 };
                self.kernel_sum += weight * (fresh - old);
                self.kernel[r * n + l] = fresh;
                self.kernel[l * n + r] = fresh;
            }
        }

        self.commits += 1;
        if self.commits.is_multiple_of(RESYNC_INTERVAL) {
            self.resync();
        }
    }
}
