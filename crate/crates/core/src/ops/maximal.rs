//! Hardy-Littlewood maximal function over dyadic ball radii.

use crate::grid::{GridField, Rank};
use crate::scalar::Scalar;

/// Mf(x) = max over swept radii of the ball average of |f|; the sweep runs
/// over dyadic multiples of h up to the box size, plus the single-cell
/// average, so Mf >= |f| pointwise.
pub fn maximal_function<T: Scalar>(f: &GridField<T>) -> GridField<T> {
    let g = *f.grid();
    let n = g.n();
    let mut out = GridField::zeros(g, Rank::Scalar);

    let abs: Vec<T> = if f.rank() == Rank::Scalar {
        f.comp(0).iter().map(|v| v.abs()).collect()
    } else {
        f.magnitude().comp(0).to_vec()
    };

    // start from the single-cell value
    out.comp_mut(0).copy_from_slice(&abs);

    let mut radius_cells = 1usize;
    while radius_cells <= n {
        // radius r = radius_cells * h
        match g.dim() {
            1 => {
                // sliding window over |j - i| <= radius_cells via prefix sums
                let mut prefix = vec![T::zero(); n + 1];
                for i in 0..n {
                    prefix[i + 1] = prefix[i] + abs[i];
                }
                let dst = out.comp_mut(0);
                for i in 0..n {
                    let lo = i.saturating_sub(radius_cells);
                    let hi = (i + radius_cells).min(n - 1);
                    let avg = (prefix[hi + 1] - prefix[lo]) / T::of_usize(hi + 1 - lo);
                    dst[i] = dst[i].max(avg);
                }
            }
            _ => {
                // per-row prefix sums; the disc is a stack of row spans
                let mut prefix = vec![T::zero(); (n + 1) * n];
                for iy in 0..n {
                    let row = iy * n;
                    let p = iy * (n + 1);
                    for ix in 0..n {
                        prefix[p + ix + 1] = prefix[p + ix] + abs[row + ix];
                    }
                }
                let r2 = (radius_cells * radius_cells) as f64;
                let dst = out.comp_mut(0);
                for iy in 0..n {
                    for ix in 0..n {
                        let mut sum = T::zero();
                        let mut count = 0usize;
                        let dy_lo = iy.saturating_sub(radius_cells);
                        let dy_hi = (iy + radius_cells).min(n - 1);
                        for jy in dy_lo..=dy_hi {
                            let dy = jy as f64 - iy as f64;
                            let span = (r2 - dy * dy).sqrt().floor() as usize;
                            let lo = ix.saturating_sub(span);
                            let hi = (ix + span).min(n - 1);
                            let p = jy * (n + 1);
                            sum += prefix[p + hi + 1] - prefix[p + lo];
                            count += hi + 1 - lo;
                        }
                        if count > 0 {
                            dst[iy * n + ix] = dst[iy * n + ix].max(sum / T::of_usize(count));
                        }
                    }
                }
            }
        }

        radius_cells *= 2;
    }
    out
}
