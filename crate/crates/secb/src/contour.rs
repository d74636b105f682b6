//! Left-opening hyperbolic integration contour and its trapezoid nodes.
//!
//! The contour `z(y) = gamma - sqrt(nu^2 + y^2) + i sigma y` is placed so its
//! rightmost point satisfies `Re z(0) = log(Lambda)/T`, which encloses exactly
//! the eigenvalues below that threshold. Discretization uses midpoint-offset
//! uniform samples in `y`, so the node set is conjugate-symmetric and avoids
//! the real axis.
//!
//! The window half-width `y_max` fixes the node spacing `h = 2 y_max / n`.
//! `z'(y)` has square-root singularities at `y = ±i nu`, so the trapezoid
//! error carries a factor `Lambda^{t/T} e^{-2 pi nu / h}`; wide windows
//! therefore lose far more accuracy to node spacing than they gain in tail
//! truncation.

use num_complex::Complex64;

use crate::error::{positive, Error, Result};

/// Minimum allowed distance between a quadrature node and an eigenvalue.
pub const MIN_CLEARANCE: f64 = 1e-6;

/// Hyperbola `z(y) = gamma - sqrt(nu^2 + y^2) + i sigma y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contour {
    /// Real-axis offset.
    pub gamma: f64,
    /// Vertex smoothing parameter; `Re z(0) = gamma - nu`.
    pub nu: f64,
    /// Asymptotic slope of the imaginary part.
    pub sigma: f64,
}

impl Contour {
    pub fn point(&self, y: f64) -> Complex64 {
        Complex64::new(
            self.gamma - (self.nu * self.nu + y * y).sqrt(),
            self.sigma * y,
        )
    }

    pub fn derivative(&self, y: f64) -> Complex64 {
        Complex64::new(-y / (self.nu * self.nu + y * y).sqrt(), self.sigma)
    }

    /// Rightmost real part, `Re z(0) = gamma - nu`.
    pub fn vertex(&self) -> f64 {
        self.gamma - self.nu
    }
}

/// Builds the contour with `gamma = log(Lambda)/T + nu`, so that
/// `Re z(0) = log(Lambda)/T` exactly.
pub fn build_contour(lambda: f64, horizon: f64, nu: f64, sigma: f64) -> Result<Contour> {
    if !lambda.is_finite() || lambda <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "Lambda must exceed 1, got {lambda}"
        )));
    }
    if !positive(horizon) || !positive(nu) || !positive(sigma) {
        return Err(Error::InvalidParameter(
            "contour needs T > 0, nu > 0, sigma > 0".into(),
        ));
    }
    Ok(Contour {
        gamma: lambda.ln() / horizon + nu,
        nu,
        sigma,
    })
}

/// Midpoint-offset trapezoid discretization of a contour.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourQuadrature {
    pub contour: Contour,
    /// Parameter samples `y_j = (j + 1/2) dy`, `j = -n/2 .. n/2 - 1`.
    pub parameters: Vec<f64>,
    /// Contour points `z(y_j)`.
    pub nodes: Vec<Complex64>,
    /// Derivatives `z'(y_j)`.
    pub derivs: Vec<Complex64>,
    /// Uniform spacing `dy = 2 y_max / n`.
    pub step: f64,
}

impl ContourQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Indices of the nodes in the upper half-plane (positive parameter).
    pub fn upper_half(&self) -> std::ops::Range<usize> {
        self.nodes.len() / 2..self.nodes.len()
    }
}

/// Uniform midpoint-offset samples `y_j = (j + 1/2) dy` over `[-y_max, y_max]`.
///
/// The grid is symmetric, excludes `y = 0`, and keeps every node strictly
/// complex.
pub fn discretize(contour: &Contour, n_points: usize, y_max: f64) -> Result<ContourQuadrature> {
    if n_points == 0 || !n_points.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "node count must be even and positive, got {n_points}"
        )));
    }
    if !positive(y_max) {
        return Err(Error::InvalidParameter(format!(
            "y_max must be positive, got {y_max}"
        )));
    }
    let step = 2.0 * y_max / n_points as f64;
    let half = (n_points / 2) as isize;
    let mut parameters = Vec::with_capacity(n_points);
    let mut nodes = Vec::with_capacity(n_points);
    let mut derivs = Vec::with_capacity(n_points);
    for j in -half..half {
        let y = (j as f64 + 0.5) * step;
        parameters.push(y);
        nodes.push(contour.point(y));
        derivs.push(contour.derivative(y));
    }
    Ok(ContourQuadrature {
        contour: *contour,
        parameters,
        nodes,
        derivs,
        step,
    })
}

/// Minimum distance from any quadrature node to any listed eigenvalue.
///
/// Errors when the clearance drops below [`MIN_CLEARANCE`]; an empty
/// eigenvalue list yields infinity.
pub fn spectrum_clearance(quadrature: &ContourQuadrature, eigenvalues: &[f64]) -> Result<f64> {
    let mut clearance = f64::INFINITY;
    for node in &quadrature.nodes {
        for &lam in eigenvalues {
            clearance = clearance.min((node - lam).norm());
        }
    }
    if clearance < MIN_CLEARANCE {
        return Err(Error::SpectrumTooClose {
            clearance,
            min_clearance: MIN_CLEARANCE,
        });
    }
    Ok(clearance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::solve_lambda;
    use crate::spectral::eigenvalue;

    const T_FINAL: f64 = 4.0;
    const NU: f64 = 0.5;

    #[test]
    fn gamma_reproduces_the_benchmark_offsets() {
        // K = 0.142/delta at s = 3.8.
        let l = solve_lambda(1420.0, 3.8, T_FINAL, 1e-12).unwrap().lambda;
        let c = build_contour(l, T_FINAL, NU, 1.0).unwrap();
        assert!((c.gamma - 2.583).abs() <= 5e-3, "gamma = {}", c.gamma);

        let l = solve_lambda(142.0, 3.8, T_FINAL, 1e-12).unwrap().lambda;
        let c = build_contour(l, T_FINAL, NU, 1.0).unwrap();
        assert!((c.gamma - 2.067).abs() <= 5e-3, "gamma = {}", c.gamma);

        // For delta = 1e-2 the quoted 1.074 equals log(Lambda)/T, i.e. the
        // vertex rather than gamma; both relations are pinned here.
        let l = solve_lambda(14.2, 3.8, T_FINAL, 1e-12).unwrap().lambda;
        let c = build_contour(l, T_FINAL, NU, 1.0).unwrap();
        assert!(
            (c.vertex() - 1.074).abs() <= 5e-3,
            "vertex = {}",
            c.vertex()
        );
        assert!((c.gamma - 1.074).abs() > 0.4);
    }

    #[test]
    fn vertex_condition_holds_to_round_off() {
        for lambda in [1.5f64, 73.45, 527.4, 4166.5, (4.0f64 * T_FINAL).exp()] {
            let c = build_contour(lambda, T_FINAL, NU, 1.0).unwrap();
            let target = lambda.ln() / T_FINAL;
            assert!(
                (c.vertex() - target).abs() <= 1e-14 * target.abs().max(1.0),
                "vertex {} vs {target}",
                c.vertex()
            );
        }
        // nu -> 0 sends gamma to log(Lambda)/T itself.
        let c = build_contour((4.0f64 * T_FINAL).exp(), T_FINAL, 1e-12, 1.0).unwrap();
        assert!((c.gamma - 4.0).abs() < 1e-9);
    }

    #[test]
    fn build_contour_rejects_bad_inputs() {
        assert!(build_contour(1.0, T_FINAL, NU, 1.0).is_err());
        assert!(build_contour(2.0, T_FINAL, 0.0, 1.0).is_err());
        assert!(build_contour(2.0, T_FINAL, NU, 0.0).is_err());
    }

    #[test]
    fn discretization_is_conjugate_symmetric_and_off_axis() {
        let c = build_contour(73.45, T_FINAL, NU, 1.0).unwrap();
        let q = discretize(&c, 160, 50.0).unwrap();
        assert_eq!(q.len(), 160);
        assert!((q.step - 0.625).abs() < 1e-15);
        let n = q.len();
        for j in 0..n / 2 {
            let lower = q.nodes[n / 2 - 1 - j];
            let upper = q.nodes[n / 2 + j];
            assert_eq!(lower, upper.conj(), "node pair {j}");
            assert!(upper.im > 0.0, "node on or below the real axis");
        }
        // Re z at the window edge: gamma - sqrt(nu^2 + y_max^2).
        let edge = c.gamma - (NU * NU + 50.0f64 * 50.0).sqrt();
        assert!((edge - (c.gamma - 50.0025)).abs() < 1e-4);
        // Derivative tends to i*sigma at the vertex.
        let d = c.derivative(1e-12);
        assert!((d - Complex64::new(0.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn discretize_rejects_odd_counts() {
        let c = build_contour(73.45, T_FINAL, NU, 1.0).unwrap();
        assert!(discretize(&c, 159, 50.0).is_err());
        assert!(discretize(&c, 160, 0.0).is_err());
    }

    #[test]
    fn clearance_on_the_benchmark_configuration() {
        // Lambda for delta = 1e-4: the vertex 2.084 sits between the 8th and
        // 9th eigenvalues.
        let l = solve_lambda(1420.0, 3.8, T_FINAL, 1e-12).unwrap().lambda;
        let c = build_contour(l, T_FINAL, NU, 1.0).unwrap();
        assert!(c.vertex() > eigenvalue(8, 1.0 / 32.0));
        assert!(c.vertex() < eigenvalue(9, 1.0 / 32.0));
        let q = discretize(&c, 160, 12.0).unwrap();
        let eigs: Vec<f64> = (1..=9).map(|k| eigenvalue(k, 1.0 / 32.0)).collect();
        let clearance = spectrum_clearance(&q, &eigs).unwrap();
        assert!(clearance > 0.08, "clearance {clearance}");
    }

    #[test]
    fn clearance_survives_a_vertex_collision_thanks_to_midpoint_offsets() {
        let lam3 = eigenvalue(3, 1.0 / 32.0);
        let c = Contour {
            gamma: lam3 + NU,
            nu: NU,
            sigma: 1.0,
        };
        assert_eq!(c.vertex(), lam3);
        let q = discretize(&c, 160, 12.0).unwrap();
        let clearance = spectrum_clearance(&q, &[lam3]).unwrap();
        assert!(clearance > 0.0);
        assert!(clearance < 0.2);
    }

    #[test]
    fn clearance_of_an_empty_spectrum_is_infinite() {
        let c = build_contour(73.45, T_FINAL, NU, 1.0).unwrap();
        let q = discretize(&c, 8, 1.0).unwrap();
        assert_eq!(spectrum_clearance(&q, &[]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn clearance_error_fires_when_a_node_touches_an_eigenvalue() {
        let c = build_contour(73.45, T_FINAL, NU, 1.0).unwrap();
        // Wide window: the first node sits 0.25 above the axis, clear of any
        // real eigenvalue directly beneath it.
        let q = discretize(&c, 4, 1.0).unwrap();
        assert!(spectrum_clearance(&q, &[q.nodes[2].re]).is_ok());
        // Tiny window: the first node is within 1e-6 of the real axis.
        let tight = discretize(&c, 4, 2e-7).unwrap();
        let eig = tight.nodes[2].re;
        assert!(matches!(
            spectrum_clearance(&tight, &[eig]),
            Err(Error::SpectrumTooClose { .. })
        ));
    }

    /// Scalar dry run: the quadrature applied to `e^{zt}/(z - lambda_1)`
    /// must reproduce `e^{lambda_1 t}` once the window is matched to the
    /// node budget. This pins the default `y_max = 12` for n = 160.
    fn scalar_quadrature(q: &ContourQuadrature, pole: f64, t: f64) -> f64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for j in 0..q.len() {
            sum += (q.nodes[j] * t).exp() * q.derivs[j] / (q.nodes[j] - pole);
        }
        let val = Complex64::new(0.0, -1.0) * sum * q.step / (2.0 * std::f64::consts::PI);
        assert!(
            val.im.abs() <= 1e-10 * val.re.abs().max(1.0),
            "imaginary leak {}",
            val.im
        );
        val.re
    }

    #[test]
    fn scalar_pole_quadrature_is_accurate_on_the_default_window() {
        let lambda = solve_lambda(14.2, 3.8, T_FINAL, 1e-12).unwrap().lambda;
        let c = build_contour(lambda, T_FINAL, NU, 1.0).unwrap();
        let q = discretize(&c, 160, 12.0).unwrap();
        let pole = eigenvalue(1, 1.0 / 32.0);
        for t in [1.0, 2.0, 3.0, 4.0] {
            let approx = scalar_quadrature(&q, pole, t);
            let exact = (pole * t).exp();
            let rel = ((approx - exact) / exact).abs();
            assert!(rel <= 1e-6, "t = {t}: relative error {rel}");
        }
    }

    #[test]
    fn scalar_quadrature_error_decreases_with_node_count() {
        let lambda = solve_lambda(14.2, 3.8, T_FINAL, 1e-12).unwrap().lambda;
        let c = build_contour(lambda, T_FINAL, NU, 1.0).unwrap();
        let pole = eigenvalue(1, 1.0 / 32.0);
        let t = 2.0;
        let exact = (pole * t).exp();
        let mut errors = Vec::new();
        for n in [40usize, 80, 160] {
            let q = discretize(&c, n, 12.0).unwrap();
            errors.push(((scalar_quadrature(&q, pole, t) - exact) / exact).abs());
        }
        for pair in errors.windows(2) {
            assert!(pair[1] <= pair[0], "error must not grow with n: {errors:?}");
        }
        assert!(errors[2] < 1e-6);
    }
}
