//! Uniform isotropic grids and sampled fields.
//!
//! The grid is node-centered: along each axis the sample points are
//! `x_j = center - L + j h` with `h = 2L/N`, so the origin is a sample
//! whenever `L` is a multiple of `h`. Each node owns the cell
//! `[x_j - h/2, x_j + h/2)` and all quadrature is the midpoint rule with
//! weight `h^dim`.

use crate::error::{FracError, Result};
use crate::scalar::Scalar;
use std::io::{Read, Write};

/// Uniformly sampled box `[center - L, center + L)^dim`, `dim` in {1, 2}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T: Scalar> {
    dim: usize,
    n: usize,
    half_width: T,
    center: [T; 2],
}

impl<T: Scalar> Grid<T> {
    pub fn new(dim: usize, n: usize, half_width: T) -> Result<Self> {
        Self::with_center(dim, n, half_width, [T::zero(); 2])
    }

    pub fn with_center(dim: usize, n: usize, half_width: T, center: [T; 2]) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(FracError::InvalidGrid(format!("dim {dim} not in {{1,2}}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(FracError::InvalidGrid(format!(
                "N = {n} must be a power of two >= 8"
            )));
        }
        if half_width <= T::zero() {
            return Err(FracError::InvalidGrid("half-width must be positive".into()));
        }
        Ok(Self { dim, n, half_width, center })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    pub fn center(&self) -> [T; 2] {
        self.center
    }

    /// Grid spacing h = 2L/N.
    pub fn spacing(&self) -> T {
        (self.half_width + self.half_width) / T::of_usize(self.n)
    }

    /// Cell volume h^dim.
    pub fn cell_volume(&self) -> T {
        let h = self.spacing();
        if self.dim == 1 {
            h
        } else {
            h * h
        }
    }

    pub fn num_cells(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Coordinate of node `j` along one axis (before recentring).
    pub fn axis_coord(&self, j: usize) -> T {
        self.center[0] - self.half_width + T::of_usize(j) * self.spacing()
    }

    /// Full coordinates of the node with linear index `idx`.
    pub fn coords(&self, idx: usize) -> [T; 2] {
        let h = self.spacing();
        let base = -self.half_width;
        match self.dim {
            1 => [self.center[0] + base + T::of_usize(idx) * h, T::zero()],
            _ => {
                let ix = idx % self.n;
                let iy = idx / self.n;
                [
                    self.center[0] + base + T::of_usize(ix) * h,
                    self.center[1] + base + T::of_usize(iy) * h,
                ]
            }
        }
    }

    /// Linear index of the cell whose node is nearest to `p`, or None if
    /// `p` lies outside the sampled box (cell membership by nearest node).
    pub fn cell_of(&self, p: [T; 2]) -> Option<usize> {
        let h = self.spacing();
        let half = T::of(0.5);
        let mut idx = [0usize; 2];
        for a in 0..self.dim {
            let t = (p[a] - self.center[a] + self.half_width) / h + half;
            if t < T::zero() {
                return None;
            }
            let j = t.floor().f64() as usize;
            if j >= self.n {
                return None;
            }
            idx[a] = j;
        }
        Some(if self.dim == 1 { idx[0] } else { idx[1] * self.n + idx[0] })
    }

    pub fn contains(&self, p: [T; 2]) -> bool {
        self.cell_of(p).is_some()
    }

    /// Grid with the same box and twice the resolution.
    pub fn refined(&self) -> Result<Self> {
        Self::with_center(self.dim, self.n * 2, self.half_width, self.center)
    }
}

/// Scalar field or dim-component vector field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    Scalar,
    Vector,
}

/// How the underlying function behaves outside the sampled box; drives the
/// far-field treatment of the direct backend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayClass<T: Scalar> {
    CompactSupport,
    PowerTail(T),
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridField<T: Scalar> {
    grid: Grid<T>,
    rank: Rank,
    /// component-major storage: all of component 0 (row-major), then component 1
    values: Vec<T>,
    decay: DecayClass<T>,
}

impl<T: Scalar> GridField<T> {
    pub fn zeros(grid: Grid<T>, rank: Rank) -> Self {
        let comps = match rank {
            Rank::Scalar => 1,
            Rank::Vector => grid.dim(),
        };
        Self {
            grid,
            rank,
            values: vec![T::zero(); grid.num_cells() * comps],
            decay: DecayClass::CompactSupport,
        }
    }

    pub fn constant(grid: Grid<T>, value: T) -> Self {
        let mut f = Self::zeros(grid, Rank::Scalar);
        f.values.fill(value);
        f.decay = DecayClass::Unknown;
        f
    }

    /// Scalar field sampled pointwise.
    pub fn from_fn(grid: Grid<T>, f: impl Fn([T; 2]) -> T) -> Self {
        let mut out = Self::zeros(grid, Rank::Scalar);
        for i in 0..grid.num_cells() {
            out.values[i] = f(grid.coords(i));
        }
        out
    }

    /// Vector field sampled pointwise, one closure call per component.
    pub fn from_fn_vector(grid: Grid<T>, f: impl Fn(usize, [T; 2]) -> T) -> Self {
        let mut out = Self::zeros(grid, Rank::Vector);
        let cells = grid.num_cells();
        for c in 0..grid.dim() {
            for i in 0..cells {
                out.values[c * cells + i] = f(c, grid.coords(i));
            }
        }
        out
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn components(&self) -> usize {
        match self.rank {
            Rank::Scalar => 1,
            Rank::Vector => self.grid.dim(),
        }
    }

    pub fn decay(&self) -> DecayClass<T> {
        self.decay
    }

    pub fn set_decay(&mut self, d: DecayClass<T>) {
        self.decay = d;
    }

    pub fn with_decay(mut self, d: DecayClass<T>) -> Self {
        self.decay = d;
        self
    }

    pub fn comp(&self, c: usize) -> &[T] {
        let cells = self.grid.num_cells();
        &self.values[c * cells..(c + 1) * cells]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [T] {
        let cells = self.grid.num_cells();
        &mut self.values[c * cells..(c + 1) * cells]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    /// True when the field vanishes (to roundoff) on the outermost two
    /// cells of the box, the compact-support invariant.
    pub fn vanishes_on_margin(&self) -> bool {
        let n = self.grid.n();
        let tol = T::of(1e-12) * self.sup_abs().max(T::one());
        let cells = self.grid.num_cells();
        let on_margin = |i: usize| -> bool {
            if self.grid.dim() == 1 {
                i < 2 || i >= n - 2
            } else {
                let ix = i % n;
                let iy = i / n;
                ix < 2 || ix >= n - 2 || iy < 2 || iy >= n - 2
            }
        };
        (0..cells).all(|i| {
            !on_margin(i) || (0..self.components()).all(|c| self.comp(c)[i].abs() <= tol)
        })
    }

    pub fn sup_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// h^dim * sum of all values of one component.
    pub fn integral(&self, c: usize) -> T {
        let w = self.grid.cell_volume();
        self.comp(c).iter().fold(T::zero(), |s, v| s + *v) * w
    }

    /// Pointwise Euclidean magnitude (scalar field). For scalar input this
    /// is |f|; for vector input the component-wise norm.
    pub fn magnitude(&self) -> GridField<T> {
        let mut out = GridField::zeros(self.grid, Rank::Scalar);
        let cells = self.grid.num_cells();
        for i in 0..cells {
            let mut s = T::zero();
            for c in 0..self.components() {
                let v = self.comp(c)[i];
                s += v * v;
            }
            out.values[i] = s.sqrt();
        }
        out.decay = self.decay;
        out
    }

    /// Circular whole-cell shift by `by` cells along each axis.
    pub fn shift_cells(&self, by: [isize; 2]) -> GridField<T> {
        let n = self.grid.n() as isize;
        let cells = self.grid.num_cells();
        let mut out = self.clone();
        for c in 0..self.components() {
            let src = self.comp(c);
            let dst = out.comp_mut(c);
            if self.grid.dim() == 1 {
                for i in 0..cells {
                    let j = (i as isize - by[0]).rem_euclid(n) as usize;
                    dst[i] = src[j];
                }
            } else {
                for i in 0..cells {
                    let ix = (i % self.grid.n()) as isize;
                    let iy = (i / self.grid.n()) as isize;
                    let jx = (ix - by[0]).rem_euclid(n) as usize;
                    let jy = (iy - by[1]).rem_euclid(n) as usize;
                    dst[i] = src[jy * self.grid.n() + jx];
                }
            }
        }
        out
    }

    /// Multilinear interpolation of component `c` at an interior point.
    pub fn interp(&self, c: usize, p: [T; 2]) -> Result<T> {
        let g = &self.grid;
        let h = g.spacing();
        let vals = self.comp(c);
        let mut lo = [0usize; 2];
        let mut frac = [T::zero(); 2];
        for a in 0..g.dim() {
            let t = (p[a] - g.center[a] + g.half_width) / h;
            if t < T::zero() || t > T::of_usize(g.n - 1) {
                return Err(FracError::AtomOutsideBox(p[0].f64(), p[1].f64()));
            }
            let j = t.floor().f64() as usize;
            let j = j.min(g.n - 2);
            lo[a] = j;
            frac[a] = t - T::of_usize(j);
        }
        if g.dim() == 1 {
            let a = vals[lo[0]];
            let b = vals[lo[0] + 1];
            Ok(a + (b - a) * frac[0])
        } else {
            let n = g.n;
            let idx = |ix: usize, iy: usize| iy * n + ix;
            let v00 = vals[idx(lo[0], lo[1])];
            let v10 = vals[idx(lo[0] + 1, lo[1])];
            let v01 = vals[idx(lo[0], lo[1] + 1)];
            let v11 = vals[idx(lo[0] + 1, lo[1] + 1)];
            let fx = frac[0];
            let fy = frac[1];
            let one = T::one();
            Ok(v00 * (one - fx) * (one - fy)
                + v10 * fx * (one - fy)
                + v01 * (one - fx) * fy
                + v11 * fx * fy)
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> GridField<T> {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v = f(*v);
        }
        out
    }

    pub fn zip_with(&self, other: &GridField<T>, f: impl Fn(T, T) -> T) -> Result<GridField<T>> {
        check_same_grid(self, other)?;
        if self.rank != other.rank {
            return Err(FracError::RankMismatch("zip_with requires equal ranks".into()));
        }
        let mut out = self.clone();
        for (v, w) in out.values.iter_mut().zip(other.values.iter()) {
            *v = f(*v, *w);
        }
        Ok(out)
    }

    pub fn scaled(&self, c: T) -> GridField<T> {
        self.map(|v| v * c)
    }
}

pub fn check_same_grid<T: Scalar>(a: &GridField<T>, b: &GridField<T>) -> Result<()> {
    if a.grid != b.grid {
        return Err(FracError::GridMismatch(format!(
            "dim/N/L/center differ: ({}, {}, {}) vs ({}, {}, {})",
            a.grid.dim,
            a.grid.n,
            a.grid.half_width,
            b.grid.dim,
            b.grid.n,
            b.grid.half_width
        )));
    }
    Ok(())
}

/// Midpoint-rule L2 pairing h^dim * sum f.g; bilinear and symmetric.
pub fn pair<T: Scalar>(f: &GridField<T>, g: &GridField<T>) -> Result<T> {
    check_same_grid(f, g)?;
    if f.rank != g.rank {
        return Err(FracError::RankMismatch(
            "pairing requires matching ranks".into(),
        ));
    }
    let mut s = T::zero();
    for (a, b) in f.values.iter().zip(g.values.iter()) {
        s += *a * *b;
    }
    Ok(s * f.grid.cell_volume())
}

// --- serialization ------------------------------------------------------
//
// Binary layout: header of four little-endian 64-bit values
// (dim: u64, N: u64, L: f64, rank: u64 = number of components),
// then the samples as row-major f64, component-major across components.

impl<T: Scalar> GridField<T> {
    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(&(self.grid.dim() as u64).to_le_bytes())?;
        w.write_all(&(self.grid.n() as u64).to_le_bytes())?;
        w.write_all(&self.grid.half_width().f64().to_le_bytes())?;
        w.write_all(&(self.components() as u64).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.f64().to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(r: &mut R) -> Result<Self> {
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let dim = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        r.read_exact(&mut b8)?;
        let half_width = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let comps = u64::from_le_bytes(b8) as usize;
        let grid = Grid::new(dim, n, T::of(half_width))?;
        let rank = if comps == 1 { Rank::Scalar } else { Rank::Vector };
        if comps != 1 && comps != dim {
            return Err(FracError::RankMismatch(format!(
                "{comps} components incompatible with dim {dim}"
            )));
        }
        let mut field = GridField::zeros(grid, rank);
        for v in field.values.iter_mut() {
            r.read_exact(&mut b8)?;
            *v = T::of(f64::from_le_bytes(b8));
        }
        field.decay = DecayClass::Unknown;
        Ok(field)
    }

    /// CSV with coordinates and component columns; intended for small grids.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        let dim = self.grid.dim();
        let mut header: Vec<String> = (0..dim).map(|a| ["x", "y"][a].to_string()).collect();
        for c in 0..self.components() {
            header.push(format!("c{c}"));
        }
        writeln!(w, "{}", header.join(","))?;
        for i in 0..self.grid.num_cells() {
            let p = self.grid.coords(i);
            let mut row: Vec<String> = (0..dim).map(|a| format!("{}", p[a])).collect();
            for c in 0..self.components() {
                row.push(format!("{}", self.comp(c)[i]));
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}
