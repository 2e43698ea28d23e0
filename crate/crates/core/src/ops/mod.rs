//! Nonlocal operators with two cross-validating backends.

pub mod direct;
pub mod maximal;
pub mod spectral;

pub use direct::DirectSpec;
pub use maximal::maximal_function;
pub use spectral::{SpectralEngine, SpectralSpec, Symbol, ZeroModePolicy};

use crate::error::{FracError, Result};
use crate::grid::{GridField, Rank};
use crate::scalar::Scalar;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum BackendSpec<T: Scalar> {
    Direct(DirectSpec<T>),
    Spectral(SpectralSpec),
}

impl<T: Scalar> BackendSpec<T> {
    pub fn direct() -> Self {
        BackendSpec::Direct(DirectSpec::default())
    }

    pub fn spectral() -> Self {
        BackendSpec::Spectral(SpectralSpec::default())
    }

    pub fn name(&self) -> &'static str {
        match self {
            BackendSpec::Direct(_) => "direct",
            BackendSpec::Spectral(_) => "spectral",
        }
    }
}

/// Operator output with the backend echo and a heuristic error estimate.
#[derive(Debug, Clone)]
pub struct OperatorResult<T: Scalar> {
    pub field: GridField<T>,
    pub backend: BackendSpec<T>,
    /// Backend-reported heuristic: quadrature/truncation proxy for the
    /// direct backend, aliasing proxy for the spectral one. Nonnegative.
    pub est_error: T,
    pub wall_ms: f64,
}

impl<T: Scalar> OperatorResult<T> {
    fn new(field: GridField<T>, backend: &BackendSpec<T>, est_error: T, start: Instant) -> Self {
        Self {
            field,
            backend: *backend,
            est_error: est_error.max(T::zero()),
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    }

    /// One JSON line describing the invocation, for experiment logs.
    pub fn json_line(&self, op: &str, alpha: f64) -> String {
        let g = self.field.grid();
        serde_json::json!({
            "op": op,
            "alpha": alpha,
            "backend": self.backend.name(),
            "grid": {"dim": g.dim(), "N": g.n(), "L": g.half_width().f64()},
            "est_error": self.est_error.f64(),
            "wall_ms": self.wall_ms,
        })
        .to_string()
    }
}

fn check_alpha_unit<T: Scalar>(alpha: T) -> Result<()> {
    if alpha <= T::zero() || alpha >= T::one() {
        return Err(FracError::AlphaRange(format!(
            "order {} outside (0,1)",
            alpha.f64()
        )));
    }
    Ok(())
}

/// Fractional gradient of a scalar field.
pub fn frac_gradient<T: Scalar>(
    f: &GridField<T>,
    alpha: T,
    backend: &BackendSpec<T>,
) -> Result<OperatorResult<T>> {
    check_alpha_unit(alpha)?;
    let start = Instant::now();
    match backend {
        BackendSpec::Direct(spec) => {
            let (field, est) = direct::frac_gradient_direct(f, alpha, spec)?;
            Ok(OperatorResult::new(field, backend, est, start))
        }
        BackendSpec::Spectral(spec) => {
            let eng = SpectralEngine::new(*f.grid(), *spec)?;
            let (field, est) =
                spectral::gradient_field(&eng, f, |a| Symbol::GradAxis { axis: a, alpha })?;
            Ok(OperatorResult::new(field, backend, est, start))
        }
    }
}

/// Fractional divergence of a vector field; the exact dual of the gradient
/// under the discrete pairing.
pub fn frac_divergence<T: Scalar>(
    phi: &GridField<T>,
    alpha: T,
    backend: &BackendSpec<T>,
) -> Result<OperatorResult<T>> {
    check_alpha_unit(alpha)?;
    let start = Instant::now();
    match backend {
        BackendSpec::Direct(spec) => {
            let (field, est) = direct::frac_divergence_direct(phi, alpha, spec)?;
            Ok(OperatorResult::new(field, backend, est, start))
        }
        BackendSpec::Spectral(spec) => {
            let eng = SpectralEngine::new(*phi.grid(), *spec)?;
            let (field, est) =
                spectral::divergence_field(&eng, phi, |a| Symbol::GradAxis { axis: a, alpha })?;
            Ok(OperatorResult::new(field, backend, est, start))
        }
    }
}

/// Fractional Laplacian (-Delta)^{alpha/2}, positive on the peak of a
/// Gaussian; spectral symbol |2 pi xi|^alpha.
pub fn frac_laplacian<T: Scalar>(
    f: &GridField<T>,
    alpha: T,
    backend: &BackendSpec<T>,
) -> Result<OperatorResult<T>> {
    check_alpha_unit(alpha)?;
    let start = Instant::now();
    match backend {
        BackendSpec::Direct(spec) => {
            let (field, est) = direct::frac_laplacian_direct(f, alpha, spec)?;
            Ok(OperatorResult::new(field, backend, est, start))
        }
        BackendSpec::Spectral(spec) => {
            let eng = SpectralEngine::new(*f.grid(), *spec)?;
            let (field, est) = spectral::apply_chain_field(&eng, f, &[Symbol::FracLaplacian(alpha)])?;
            Ok(OperatorResult::new(field, backend, est, start))
        }
    }
}

/// Riesz potential I_alpha, alpha in (0, n); componentwise on vector fields.
pub fn riesz_potential<T: Scalar>(
    f: &GridField<T>,
    alpha: T,
    backend: &BackendSpec<T>,
) -> Result<OperatorResult<T>> {
    let n = f.grid().dim();
    if alpha <= T::zero() || alpha >= T::of_usize(n) {
        return Err(FracError::AlphaRange(format!(
            "Riesz potential order {} outside (0, {n})",
            alpha.f64()
        )));
    }
    let start = Instant::now();
    match backend {
        BackendSpec::Direct(spec) => {
            if f.rank() != Rank::Scalar {
                // componentwise application
                let mut out = f.clone();
                let mut est = T::zero();
                for c in 0..f.components() {
                    let mut comp = GridField::zeros(*f.grid(), Rank::Scalar);
                    comp.comp_mut(0).copy_from_slice(f.comp(c));
                    comp.set_decay(f.decay());
                    let (r, e) = direct::riesz_potential_direct(&comp, alpha, spec)?;
                    out.comp_mut(c).copy_from_slice(r.comp(0));
                    est = est.max(e);
                }
                return Ok(OperatorResult::new(out, backend, est, start));
            }
            let (field, est) = direct::riesz_potential_direct(f, alpha, spec)?;
            Ok(OperatorResult::new(field, backend, est, start))
        }
        BackendSpec::Spectral(spec) => {
            let eng = SpectralEngine::new(*f.grid(), *spec)?;
            let (field, est) = spectral::apply_chain_field(&eng, f, &[Symbol::RieszPotential(alpha)])?;
            Ok(OperatorResult::new(field, backend, est, start))
        }
    }
}

/// Riesz transform R with R = grad I_1; spectral only (the kernel decays
/// too slowly for the direct cell sum).
pub fn riesz_transform<T: Scalar>(
    f: &GridField<T>,
    backend: &BackendSpec<T>,
) -> Result<OperatorResult<T>> {
    match backend {
        BackendSpec::Direct(_) => Err(FracError::UnsupportedBackend(
            "riesz_transform is spectral-only".into(),
        )),
        BackendSpec::Spectral(spec) => {
            let start = Instant::now();
            let eng = SpectralEngine::new(*f.grid(), *spec)?;
            let (field, est) = spectral::gradient_field(&eng, f, Symbol::RieszAxis)?;
            Ok(OperatorResult::new(field, backend, est, start))
        }
    }
}

/// The absolute-difference companion of the gradient,
/// D^alpha f(x) = int |f(x+h) - f(x)| / |h|^{n+alpha} dh; direct only.
pub fn dcal_alpha<T: Scalar>(
    f: &GridField<T>,
    alpha: T,
    backend: &BackendSpec<T>,
) -> Result<OperatorResult<T>> {
    match backend {
        BackendSpec::Spectral(_) => Err(FracError::UnsupportedBackend(
            "the absolute value in dcal_alpha breaks the multiplier structure".into(),
        )),
        BackendSpec::Direct(spec) => {
            let start = Instant::now();
            let (field, est) = direct::dcal_alpha_direct(f, alpha, spec)?;
            Ok(OperatorResult::new(field, backend, est, start))
        }
    }
}

/// Nonlocal divergence remainder of the Leibniz rule; direct only.
pub fn nl_divergence<T: Scalar>(
    eta: &GridField<T>,
    phi: &GridField<T>,
    alpha: T,
) -> Result<OperatorResult<T>> {
    let start = Instant::now();
    let (field, est) = direct::nl_divergence_direct(eta, phi, alpha)?;
    Ok(OperatorResult::new(field, &BackendSpec::direct(), est, start))
}

/// Nonlocal gradient remainder of the Leibniz rule; direct only.
pub fn nl_gradient<T: Scalar>(
    f: &GridField<T>,
    eta: &GridField<T>,
    alpha: T,
) -> Result<OperatorResult<T>> {
    let start = Instant::now();
    let (field, est) = direct::nl_gradient_direct(f, eta, alpha)?;
    Ok(OperatorResult::new(field, &BackendSpec::direct(), est, start))
}

/// Composition of spectral symbols in one transform pass; this is the
/// route for identities that are exact at the multiplier level (semigroup,
/// Riesz lift, operator compositions).
pub fn spectral_compose<T: Scalar>(
    f: &GridField<T>,
    chain: &[Symbol<T>],
    spec: &SpectralSpec,
) -> Result<GridField<T>> {
    let eng = SpectralEngine::new(*f.grid(), *spec)?;
    let (field, _) = spectral::apply_chain_field(&eng, f, chain)?;
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{pair, Grid, GridField};

    fn bump(width: f64) -> impl Fn([f64; 2]) -> f64 {
        move |p| {
            let t = (p[0] * p[0] + p[1] * p[1]) / (width * width);
            if t < 1.0 {
                (1.0 / (t - 1.0)).exp()
            } else {
                0.0
            }
        }
    }

    #[test]
    fn duality_exact_spectral_1d() {
        let g = Grid::<f64>::new(1, 256, 4.0).unwrap();
        let f = GridField::from_fn(g, bump(1.5));
        let phi = GridField::from_fn_vector(g, |_, p| (p[0] * 1.3).sin() * bump(2.0)(p));
        for alpha in [0.25, 0.5, 0.75] {
            let be = BackendSpec::spectral();
            let grad = frac_gradient(&f, alpha, &be).unwrap();
            let div = frac_divergence(&phi, alpha, &be).unwrap();
            let lhs = pair(&f, &div.field).unwrap();
            let rhs = pair(&grad.field, &phi).unwrap();
            let scale = pair(&f, &f).unwrap().sqrt() * pair(&phi, &phi).unwrap().sqrt();
            assert!(
                (lhs + rhs).abs() / scale < 1e-13,
                "alpha={alpha}: duality defect {}",
                (lhs + rhs).abs() / scale
            );
        }
    }

    #[test]
    fn duality_exact_direct_1d() {
        let g = Grid::<f64>::new(1, 256, 4.0).unwrap();
        let f = GridField::from_fn(g, bump(1.5));
        let phi = GridField::from_fn_vector(g, |_, p| (p[0] * 1.3).sin() * bump(2.0)(p));
        let be = BackendSpec::direct();
        let alpha = 0.5;
        let grad = frac_gradient(&f, alpha, &be).unwrap();
        let div = frac_divergence(&phi, alpha, &be).unwrap();
        let lhs = pair(&f, &div.field).unwrap();
        let rhs = pair(&grad.field, &phi).unwrap();
        let scale = pair(&f, &f).unwrap().sqrt() * pair(&phi, &phi).unwrap().sqrt();
        // the 1D direct scheme is antisymmetric by construction
        assert!((lhs + rhs).abs() / scale < 1e-12, "defect {}", (lhs + rhs).abs() / scale);
    }

    #[test]
    fn duality_exact_spectral_2d() {
        let g = Grid::<f64>::new(2, 32, 2.0).unwrap();
        let f = GridField::from_fn(g, bump(1.0));
        let phi = GridField::from_fn_vector(g, |c, p| {
            bump(1.2)(p) * if c == 0 { p[0].sin() } else { p[1].cos() }
        });
        let be = BackendSpec::spectral();
        let alpha = 0.6;
        let grad = frac_gradient(&f, alpha, &be).unwrap();
        let div = frac_divergence(&phi, alpha, &be).unwrap();
        let lhs = pair(&f, &div.field).unwrap();
        let rhs = pair(&grad.field, &phi).unwrap();
        let scale = pair(&f, &f).unwrap().sqrt() * pair(&phi, &phi).unwrap().sqrt();
        assert!((lhs + rhs).abs() / scale < 1e-13);
    }

    #[test]
    fn composition_div_grad_is_minus_laplacian() {
        // composition at the multiplier level: div^a grad^a = -(-Delta)^a
        let g = Grid::<f64>::new(1, 512, 6.0).unwrap();
        let f = GridField::from_fn(g, |p| (-std::f64::consts::PI * p[0] * p[0]).exp());
        let alpha = 0.45;
        let divgrad = spectral_compose(
            &f,
            &[
                Symbol::GradAxis { axis: 0, alpha },
                Symbol::GradAxis { axis: 0, alpha },
            ],
            &SpectralSpec::default(),
        )
        .unwrap();
        let lap2a = spectral_compose(
            &f,
            &[Symbol::FracLaplacian(2.0 * alpha)],
            &SpectralSpec::default(),
        )
        .unwrap();
        let mut max = 0.0f64;
        for (a, b) in divgrad.comp(0).iter().zip(lap2a.comp(0)) {
            max = max.max((a + b).abs());
        }
        assert!(max < 1e-10, "max defect {max}");
    }

    #[test]
    fn gradient_is_riesz_of_laplacian_half() {
        // grad^alpha = R (-Delta)^{alpha/2} as symbols
        let g = Grid::<f64>::new(1, 512, 6.0).unwrap();
        let f = GridField::from_fn(g, |p| (-2.0 * p[0] * p[0]).exp());
        let alpha = 0.7;
        let grad = frac_gradient(&f, alpha, &BackendSpec::spectral()).unwrap();
        let composed = spectral_compose(
            &f,
            &[Symbol::FracLaplacian(alpha), Symbol::RieszAxis(0)],
            &SpectralSpec::default(),
        )
        .unwrap();
        for (a, b) in grad.field.comp(0).iter().zip(composed.comp(0)) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn riesz_lift_identity_as_multipliers() {
        // I_alpha grad^alpha f = R f
        let g = Grid::<f64>::new(1, 512, 6.0).unwrap();
        let f = GridField::from_fn(g, |p| p[0] * (-p[0] * p[0]).exp());
        let alpha = 0.35;
        let lhs = spectral_compose(
            &f,
            &[Symbol::GradAxis { axis: 0, alpha }, Symbol::RieszPotential(alpha)],
            &SpectralSpec::default(),
        )
        .unwrap();
        let r = riesz_transform(&f, &BackendSpec::spectral()).unwrap();
        for (a, b) in lhs.comp(0).iter().zip(r.field.comp(0)) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn homogeneity_of_gradient_under_dilation() {
        // grad^alpha (f(./lambda))(x) = lambda^{-alpha} (grad^alpha f)(x/lambda).
        // The dilated field lives on the dilated box at the same spacing, so
        // the periodized pictures match exactly and the defect is roundoff
        // plus (negligible) aliasing.
        let n0 = 512usize;
        let l0 = 4.0;
        let alpha = 0.55;
        let ga = Grid::<f64>::new(1, n0, l0).unwrap();
        let f = GridField::from_fn(ga, |p| (-std::f64::consts::PI * p[0] * p[0]).exp());
        let gf = frac_gradient(&f, alpha, &BackendSpec::spectral()).unwrap();
        for lambda in [2usize, 4] {
            let gb = Grid::<f64>::new(1, n0 * lambda, l0 * lambda as f64).unwrap();
            let fl = GridField::from_fn(gb, |p| {
                let q = p[0] / lambda as f64;
                (-std::f64::consts::PI * q * q).exp()
            });
            let gfl = frac_gradient(&fl, alpha, &BackendSpec::spectral()).unwrap();
            let scale = (lambda as f64).powf(-alpha);
            let sup = gf.field.sup_abs();
            let mut max_defect = 0.0f64;
            for m in 0..n0 {
                // node m of grid A sits at x_m; lambda x_m is node
                // lambda*m of grid B
                let j = lambda * m;
                let defect = (gfl.field.comp(0)[j] - scale * gf.field.comp(0)[m]).abs();
                max_defect = max_defect.max(defect);
            }
            assert!(max_defect / sup < 1e-6, "lambda={lambda}: {}", max_defect / sup);
        }
    }

    #[test]
    fn riesz_transform_rejects_direct() {
        let g = Grid::<f64>::new(1, 64, 1.0).unwrap();
        let f = GridField::zeros(g, Rank::Scalar);
        assert!(riesz_transform(&f, &BackendSpec::direct()).is_err());
    }

    #[test]
    fn dcal_rejects_spectral() {
        let g = Grid::<f64>::new(1, 64, 1.0).unwrap();
        let f = GridField::zeros(g, Rank::Scalar);
        assert!(dcal_alpha(&f, 0.5, &BackendSpec::spectral()).is_err());
    }

    #[test]
    fn riesz_of_odd_function_is_even() {
        let g = Grid::<f64>::new(1, 256, 6.0).unwrap();
        let f = GridField::from_fn(g, |p| p[0] * (-p[0] * p[0]).exp());
        let r = riesz_transform(&f, &BackendSpec::spectral()).unwrap();
        let n = g.n();
        // node j=0 is the unpaired Nyquist-position node
        for j in 1..n / 2 {
            let a = r.field.comp(0)[j];
            let b = r.field.comp(0)[n - j];
            assert!((a - b).abs() < 1e-10, "evenness broken at {j}: {a} vs {b}");
        }
    }

    #[test]
    fn translation_equivariance_whole_cells() {
        let g = Grid::<f64>::new(1, 256, 4.0).unwrap();
        let f = GridField::from_fn(g, bump(1.0));
        let alpha = 0.5;
        // spectral: the circular shift commutes exactly
        let be = BackendSpec::spectral();
        let a = frac_gradient(&f.shift_cells([9, 0]), alpha, &be).unwrap();
        let b = frac_gradient(&f, alpha, &be).unwrap().field.shift_cells([9, 0]);
        for (x, y) in a.field.comp(0).iter().zip(b.comp(0)) {
            assert!((x - y).abs() < 1e-12);
        }
        // direct: exact on cells whose truncated stencil never clips at
        // the array ends
        let be = BackendSpec::Direct(DirectSpec {
            far_field_radius: Some(1.0),
            ..Default::default()
        });
        let a = frac_gradient(&f.shift_cells([9, 0]), alpha, &be).unwrap();
        let b = frac_gradient(&f, alpha, &be).unwrap().field.shift_cells([9, 0]);
        let reach = (1.0 / g.spacing()).ceil() as usize;
        for i in reach + 9..g.n() - reach - 9 {
            let (x, y) = (a.field.comp(0)[i], b.comp(0)[i]);
            assert!((x - y).abs() < 1e-13, "at {i}: {x} vs {y}");
        }
    }

    #[test]
    fn operator_log_line_shape() {
        let g = Grid::<f64>::new(1, 64, 1.0).unwrap();
        let f = GridField::from_fn(g, bump(0.5));
        let r = frac_gradient(&f, 0.5, &BackendSpec::spectral()).unwrap();
        let line = r.json_line("frac_gradient", 0.5);
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["op"], "frac_gradient");
        assert_eq!(v["backend"], "spectral");
        assert_eq!(v["grid"]["N"], 64);
        assert!(v["est_error"].as_f64().unwrap() >= 0.0);
    }
}
