use fracvar_core::ops::direct::{frac_gradient_direct, DirectSpec};
use fracvar_core::ops::spectral::{gradient_field, SpectralEngine, SpectralSpec, ZeroModePolicy};
use fracvar_core::ops::Symbol;
use fracvar_core::{Grid, GridField};

#[test]
#[ignore]
fn localize_2d_gradient_error() {
    let alpha = 0.5f64;
    for n in [32usize, 64] {
        let g = Grid::<f64>::new(2, n, 2.0).unwrap();
        let f = GridField::from_fn(g, |p| (-4.0 * (p[0] * p[0] + p[1] * p[1])).exp());
        let (direct, _) = frac_gradient_direct(&f, alpha, &DirectSpec::default()).unwrap();
        let spec = SpectralSpec { zero_padding_factor: 8, zero_mode: ZeroModePolicy::Zero };
        let eng = SpectralEngine::new(g, spec).unwrap();
        let (spect, _) = gradient_field(&eng, &f, |a| Symbol::GradAxis { axis: a, alpha }).unwrap();
        // error along the x-axis row (iy = n/2 -> y=0)
        let iy = n / 2;
        println!("--- n={n}  (x, direct_x, spect_x, diff)");
        for ix in (0..n).step_by(n / 16) {
            let i = iy * n + ix;
            let x = g.coords(i)[0];
            println!(
                "{:8.4} {:12.6e} {:12.6e} {:12.3e}",
                x,
                direct.comp(0)[i],
                spect.comp(0)[i],
                direct.comp(0)[i] - spect.comp(0)[i]
            );
        }
        let mut sup = 0.0f64;
        let mut sup_at = 0;
        for c in 0..2 {
            for (i, (a, b)) in direct.comp(c).iter().zip(spect.comp(c)).enumerate() {
                if (a - b).abs() > sup {
                    sup = (a - b).abs();
                    sup_at = i;
                }
            }
        }
        println!(
            "sup diff {sup:.4e} at {:?} spect sup {:.4e}",
            g.coords(sup_at),
            spect.sup_abs()
        );
    }
}

#[test]
#[ignore]
fn localize_1d_gradient_error() {
    let alpha = 0.5f64;
    for n in [512usize, 1024] {
        let g = Grid::<f64>::new(1, n, 2.0).unwrap();
        let f = GridField::from_fn(g, |p| (-4.0 * p[0] * p[0]).exp());
        let (direct, _) = frac_gradient_direct(&f, alpha, &DirectSpec::default()).unwrap();
        let spec = SpectralSpec { zero_padding_factor: 8, zero_mode: ZeroModePolicy::Zero };
        let eng = SpectralEngine::new(g, spec).unwrap();
        let (spect, _) = gradient_field(&eng, &f, |a| Symbol::GradAxis { axis: a, alpha }).unwrap();
        let mut sup = 0.0f64;
        let mut at = 0usize;
        for (i, (a, b)) in direct.comp(0).iter().zip(spect.comp(0)).enumerate() {
            if (a - b).abs() > sup {
                sup = (a - b).abs();
                at = i;
            }
        }
        println!("1D n={n}: sup diff {sup:.4e} at x={:.3} (spect sup {:.4e})", g.coords(at)[0], spect.sup_abs());
        for ix in [n/2, n/2 + n/8, n/2 + n/4] {
            println!("  x={:6.3} direct {:12.6e} spect {:12.6e}", g.coords(ix)[0], direct.comp(0)[ix], spect.comp(0)[ix]);
        }
    }
}
