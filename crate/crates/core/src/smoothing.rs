//! Mollifier and cut-off families.
//!
//! The mollifier profile is the classical bump exp(1/(|x|^2 - 1)) on the
//! unit ball, rescaled to width epsilon and renormalized so that its
//! *discrete* mass is exactly one. The plateau cutoff eta_R equals 1 on
//! B_R, vanishes outside B_2R, satisfies eta_R(x) = eta_1(x/R) and has
//! Lipschitz constant 2/R; the radial ramp is the piecewise-linear
//! profile with inner radius r and ramp width epsilon.

use crate::error::{FracError, Result};
use crate::grid::{DecayClass, GridField, Rank};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierSpec<T: Scalar> {
    pub epsilon: T,
}

impl<T: Scalar> MollifierSpec<T> {
    pub fn new(epsilon: T) -> Self {
        Self { epsilon }
    }
}

/// Unnormalized radial bump profile, supported in the unit ball.
fn bump<T: Scalar>(t2: T) -> T {
    if t2 < T::one() {
        (T::one() / (t2 - T::one())).exp()
    } else {
        T::zero()
    }
}

/// Discrete mollifier kernel on cell offsets, normalized to unit mass
/// under the h^dim weight.
fn mollifier_kernel<T: Scalar>(f: &GridField<T>, m: &MollifierSpec<T>) -> Result<(Vec<T>, usize)> {
    let g = f.grid();
    let h = g.spacing();
    let two_h = h + h;
    if m.epsilon < two_h {
        return Err(FracError::MollifierTooNarrow {
            eps: m.epsilon.f64(),
            min: two_h.f64(),
        });
    }
    let reach = (m.epsilon / h).f64().ceil() as usize;
    let side = 2 * reach + 1;
    let dim = g.dim();
    let len = side.pow(dim as u32);
    let mut ker = vec![T::zero(); len];
    let mut mass = T::zero();
    for (i, kv) in ker.iter_mut().enumerate() {
        let (kx, ky) = if dim == 1 {
            (i as isize - reach as isize, 0isize)
        } else {
            ((i % side) as isize - reach as isize, (i / side) as isize - reach as isize)
        };
        let dx = T::of_usize(kx.unsigned_abs()) * h / m.epsilon;
        let dy = T::of_usize(ky.unsigned_abs()) * h / m.epsilon;
        let v = bump(dx * dx + dy * dy);
        *kv = v;
        mass += v;
    }
    let w = g.cell_volume();
    let norm = T::one() / (mass * w);
    for v in ker.iter_mut() {
        *v = *v * norm;
    }
    Ok((ker, reach))
}

/// Discrete convolution f * rho_eps. Preserves the mass of compactly
/// supported fields exactly (the kernel is renormalized on-grid).
pub fn mollify<T: Scalar>(f: &GridField<T>, m: &MollifierSpec<T>) -> Result<GridField<T>> {
    let (ker, reach) = mollifier_kernel(f, m)?;
    let g = f.grid();
    let n = g.n();
    let cells = g.num_cells();
    let dim = g.dim();
    let side = 2 * reach + 1;
    let w = g.cell_volume();
    let mut out = f.clone();
    for c in 0..f.components() {
        let src = f.comp(c);
        let dst = out.comp_mut(c);
        if dim == 1 {
            for i in 0..cells {
                let mut s = T::zero();
                for (k, kv) in ker.iter().enumerate() {
                    let off = k as isize - reach as isize;
                    let j = i as isize - off;
                    if j >= 0 && (j as usize) < n {
                        s += *kv * src[j as usize];
                    }
                }
                dst[i] = s * w;
            }
        } else {
            for i in 0..cells {
                let ix = (i % n) as isize;
                let iy = (i / n) as isize;
                let mut s = T::zero();
                for (k, kv) in ker.iter().enumerate() {
                    if *kv == T::zero() {
                        continue;
                    }
                    let ox = (k % side) as isize - reach as isize;
                    let oy = (k / side) as isize - reach as isize;
                    let jx = ix - ox;
                    let jy = iy - oy;
                    if jx >= 0 && jx < n as isize && jy >= 0 && jy < n as isize {
                        s += *kv * src[(jy as usize) * n + jx as usize];
                    }
                }
                dst[i] = s * w;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffShape<T: Scalar> {
    /// Smooth: 1 on B_R, 0 outside B_2R, Lip <= 2/R.
    SmoothPlateau,
    /// Piecewise linear: 1 on B_r, linear ramp of the given width, Lip = 1/width.
    RadialRamp { width: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec<T: Scalar> {
    pub radius: T,
    pub center: [T; 2],
    pub shape: CutoffShape<T>,
}

impl<T: Scalar> CutoffSpec<T> {
    pub fn plateau(radius: T) -> Self {
        Self { radius, center: [T::zero(); 2], shape: CutoffShape::SmoothPlateau }
    }

    pub fn ramp(radius: T, width: T) -> Self {
        Self { radius, center: [T::zero(); 2], shape: CutoffShape::RadialRamp { width } }
    }

    pub fn at(mut self, center: [T; 2]) -> Self {
        self.center = center;
        self
    }

    pub fn eval(&self, p: [T; 2]) -> T {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        let d = (dx * dx + dy * dy).sqrt();
        match self.shape {
            CutoffShape::SmoothPlateau => smooth_step(T::of(2.0) - d / self.radius),
            CutoffShape::RadialRamp { width } => {
                if d <= self.radius {
                    T::one()
                } else if d >= self.radius + width {
                    T::zero()
                } else {
                    (self.radius + width - d) / width
                }
            }
        }
    }

    pub fn sample(&self, grid: crate::grid::Grid<T>) -> GridField<T> {
        let mut out = GridField::zeros(grid, Rank::Scalar);
        for i in 0..grid.num_cells() {
            out.values_mut()[i] = self.eval(grid.coords(i));
        }
        out.with_decay(DecayClass::CompactSupport)
    }
}

/// C-infinity transition: 0 for t <= 0, 1 for t >= 1, built from the
/// standard exponential bump.
fn smooth_step<T: Scalar>(t: T) -> T {
    if t <= T::zero() {
        T::zero()
    } else if t >= T::one() {
        T::one()
    } else {
        let a = (-T::one() / t).exp();
        let b = (-T::one() / (T::one() - t)).exp();
        a / (a + b)
    }
}

/// Pointwise product f . eta on the grid.
pub fn apply_cutoff<T: Scalar>(f: &GridField<T>, c: &CutoffSpec<T>) -> GridField<T> {
    let g = *f.grid();
    let cells = g.num_cells();
    let mut out = f.clone();
    let mut eta = vec![T::zero(); cells];
    for (i, e) in eta.iter_mut().enumerate() {
        *e = c.eval(g.coords(i));
    }
    for comp in 0..f.components() {
        let dst = out.comp_mut(comp);
        for i in 0..cells {
            dst[i] = dst[i] * eta[i];
        }
    }
    out.set_decay(DecayClass::CompactSupport);
    out
}
