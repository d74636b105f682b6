//! Analytic eigenstructure of the constant-coefficient operator on (0, pi).
//!
//! The operator `-c d2/dx2` with Dirichlet conditions has eigenvalues
//! `lambda_k = c k^2` and the orthonormal eigenfunctions
//! `phi_k(x) = sqrt(2/pi) sin(kx)`. This module provides sine-basis
//! transforms on the experiment mesh, the spectral-cutoff projection onto
//! the modes a contour encloses, the exact regularized solution (the oracle
//! the quadrature path is verified against), and the truncated-series
//! reference solution for the tent benchmark profile.

use crate::error::Result;
use crate::fem::{GridFunction, Mesh};

use std::f64::consts::PI;

/// Eigenvalue `c * k^2` of `-c d2/dx2`, `k >= 1`.
pub fn eigenvalue(k: usize, diffusivity: f64) -> f64 {
    assert!(k >= 1, "mode index starts at 1");
    diffusivity * (k * k) as f64
}

/// Orthonormal eigenfunction `sqrt(2/pi) sin(kx)`.
pub fn eigenfunction(k: usize, x: f64) -> f64 {
    (2.0 / PI).sqrt() * ((k as f64) * x).sin()
}

/// Eigenfunction `phi_k` sampled at the interior nodes.
pub fn sample_mode(mesh: Mesh, k: usize) -> GridFunction {
    GridFunction::from_fn(mesh, |x| eigenfunction(k, x))
}

/// Sine eigenbasis of `-c d2/dx2` on (0, pi) with a retained-mode count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBasis {
    pub diffusivity: f64,
    pub modes: usize,
}

impl SpectralBasis {
    pub fn eigenvalue(&self, k: usize) -> f64 {
        eigenvalue(k, self.diffusivity)
    }

    pub fn eigenfunction(&self, k: usize, x: f64) -> f64 {
        eigenfunction(k, x)
    }
}

/// Coefficients against the orthonormal sine basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralExpansion {
    pub coefficients: Vec<f64>,
}

impl SpectralExpansion {
    /// Euclidean norm of the coefficient vector (Parseval norm).
    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// Largest `N` with `c N^2` strictly below `log(Lambda)/T`; 0 when even the
/// first eigenvalue is at or above the threshold. A relative guard band of
/// 1e-12 keeps floating-point ties on the strict side.
pub fn truncation_index(lambda: f64, horizon: f64, diffusivity: f64) -> usize {
    assert!(lambda > 0.0 && horizon > 0.0 && diffusivity > 0.0);
    if lambda <= 1.0 {
        return 0;
    }
    let threshold = lambda.ln() / horizon * (1.0 - 1e-12);
    let mut n = (threshold / diffusivity).max(0.0).sqrt().floor() as usize;
    while eigenvalue(n + 1, diffusivity) < threshold {
        n += 1;
    }
    while n > 0 && eigenvalue(n, diffusivity) >= threshold {
        n -= 1;
    }
    n
}

/// Sine coefficients of `u` by composite trapezoid on its mesh.
///
/// With boundary values pinned at zero the trapezoid sum is plain
/// `h * sum_i u_i phi_k(x_i)`, which is exactly orthogonal on sampled sines
/// for `k` below the node count.
pub fn analyze(u: &GridFunction, n_modes: usize) -> SpectralExpansion {
    let mesh = u.mesh();
    let h = mesh.h();
    let mut coefficients = Vec::with_capacity(n_modes);
    for k in 1..=n_modes {
        let mut acc = 0.0;
        for (i, &v) in u.values().iter().enumerate() {
            acc += v * eigenfunction(k, mesh.interior_x(i));
        }
        coefficients.push(h * acc);
    }
    SpectralExpansion { coefficients }
}

/// Nodal synthesis `sum_k coef_k phi_k(x_i)`.
pub fn synthesize(expansion: &SpectralExpansion, mesh: Mesh) -> GridFunction {
    GridFunction::from_fn(mesh, |x| {
        expansion
            .coefficients
            .iter()
            .enumerate()
            .map(|(idx, c)| c * eigenfunction(idx + 1, x))
            .sum()
    })
}

/// Spectral-cutoff projection onto the first `n_modes` eigenmodes.
pub fn project_cutoff(u: &GridFunction, n_modes: usize) -> GridFunction {
    synthesize(&analyze(u, n_modes), u.mesh())
}

/// Exact regularized solution: grows each retained mode by `exp(lambda_k t)`
/// and drops everything above the cutoff set by `Lambda`.
///
/// This closed form is the oracle the contour-quadrature path must match.
pub fn spectral_regularized_solution(
    u0: &GridFunction,
    t: f64,
    lambda: f64,
    horizon: f64,
    diffusivity: f64,
) -> GridFunction {
    let n = truncation_index(lambda, horizon, diffusivity);
    let mut expansion = analyze(u0, n);
    for (idx, c) in expansion.coefficients.iter_mut().enumerate() {
        *c *= (eigenvalue(idx + 1, diffusivity) * t).exp();
    }
    synthesize(&expansion, u0.mesh())
}

/// Terminal tent profile of the bundled benchmark: peak 4 at `x = pi/4`,
/// supported on [0, pi/2].
pub fn tent(x: f64) -> f64 {
    let slope = 16.0 / PI;
    if x <= 0.0 || x >= PI / 2.0 {
        0.0
    } else if x <= PI / 4.0 {
        slope * x
    } else {
        8.0 - slope * x
    }
}

/// Sine coefficient of the tent against `sin(kx)` (not the orthonormal
/// basis): `(1/(c (k pi)^2)) * (2 sin(k pi/4) - sin(k pi/2))`.
fn tent_sine_coefficient(k: usize, diffusivity: f64) -> f64 {
    let kf = k as f64;
    (2.0 * (kf * PI / 4.0).sin() - (kf * PI / 2.0).sin()) / (diffusivity * (kf * PI).powi(2))
}

/// Truncated-series solution of the backward problem whose terminal state is
/// the tent: `sum_k b_k sin(kx) exp(-c k^2 (T - t))`.
pub fn reference_solution(x: f64, t: f64, n_terms: usize, diffusivity: f64, horizon: f64) -> f64 {
    let mut acc = 0.0;
    for k in 1..=n_terms {
        let decay = (-diffusivity * (k * k) as f64 * (horizon - t)).exp();
        if decay == 0.0 {
            break;
        }
        acc += tent_sine_coefficient(k, diffusivity) * ((k as f64) * x).sin() * decay;
    }
    acc
}

/// [`reference_solution`] sampled onto the interior nodes of a mesh.
pub fn reference_grid(
    mesh: Mesh,
    t: f64,
    n_terms: usize,
    diffusivity: f64,
    horizon: f64,
) -> GridFunction {
    GridFunction::from_fn(mesh, |x| {
        reference_solution(x, t, n_terms, diffusivity, horizon)
    })
}

/// Diagnostic upper bound for the squared norm of a difference solution at
/// the constraint time `s`:
/// `(2 K delta / (T - s))^2 + sum_{n <= l} z_n^2 (1 - lambda_n^2) e^{2 lambda_n s}`
/// where `l` is the largest index with `lambda_l < 1` (empty sum if none).
pub fn secb_difference_bound(
    expansion: &SpectralExpansion,
    secb_ratio: f64,
    delta: f64,
    secb_time: f64,
    horizon: f64,
    diffusivity: f64,
) -> Result<f64> {
    use crate::error::Error;
    if !(secb_time > 0.0 && secb_time < horizon) {
        return Err(Error::InvalidParameter(format!(
            "s must lie in (0, T); got s = {secb_time}, T = {horizon}"
        )));
    }
    let base = (2.0 * secb_ratio * delta / (horizon - secb_time)).powi(2);
    let mut sum = 0.0;
    for (idx, &z_n) in expansion.coefficients.iter().enumerate() {
        let lam = eigenvalue(idx + 1, diffusivity);
        if lam >= 1.0 {
            break;
        }
        sum += z_n * z_n * (1.0 - lam * lam) * (2.0 * lam * secb_time).exp();
    }
    Ok(base + sum)
}
