//! Small quadrature toolbox: Gauss-Legendre rules on [-1, 1] computed by
//! Newton iteration on the Legendre recurrence.

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integral of `f` over [a, b] with an n-point Gauss-Legendre rule.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (xs, ws) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    xs.iter()
        .zip(ws.iter())
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Integral over the rectangle [ax,bx] x [ay,by] with a tensor rule.
pub fn integrate_2d(f: impl Fn(f64, f64) -> f64, ax: f64, bx: f64, ay: f64, by: f64, n: usize) -> f64 {
    let (xs, ws) = gauss_legendre(n);
    let midx = 0.5 * (ax + bx);
    let halfx = 0.5 * (bx - ax);
    let midy = 0.5 * (ay + by);
    let halfy = 0.5 * (by - ay);
    let mut s = 0.0;
    for (x, wx) in xs.iter().zip(ws.iter()) {
        for (y, wy) in xs.iter().zip(ws.iter()) {
            s += wx * wy * f(midx + halfx * x, midy + halfy * y);
        }
    }
    s * halfx * halfy
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_order_rules_match_known_nodes() {
        let (x, w) = gauss_legendre(2);
        assert_relative_eq!(x[1], 1.0 / 3.0f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(w[0], 1.0, epsilon = 1e-14);
        let (_, w3) = gauss_legendre(3);
        assert_relative_eq!(w3[1], 8.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // degree 2n-1 exactness
        let v = integrate(|x| x.powi(7) - 3.0 * x.powi(4) + 2.0, -1.0, 2.0, 4);
        let exact = |x: f64| x.powi(8) / 8.0 - 3.0 * x.powi(5) / 5.0 + 2.0 * x;
        assert_relative_eq!(v, exact(2.0) - exact(-1.0), epsilon = 1e-12);
    }

    #[test]
    fn gaussian_integral_oracle() {
        // interval narrow enough for the node density to resolve the peak
        let v = integrate(|x| (-2.0 * std::f64::consts::PI * x * x).exp(), -3.0, 3.0, 64);
        assert_relative_eq!(v, 0.5f64.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn tensor_rule_2d() {
        let v = integrate_2d(|x, y| x * x * y + 1.0, 0.0, 1.0, 0.0, 2.0, 8);
        assert_relative_eq!(v, 2.0 / 3.0 + 2.0, epsilon = 1e-12);
    }
}
