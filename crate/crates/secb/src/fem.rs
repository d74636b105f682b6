//! Piecewise-linear finite elements on a uniform Dirichlet mesh over (0, pi).
//!
//! Fields are stored at interior nodes only; the boundary values are an
//! implicit zero. The resolvent equation `z*v + A*v = u0` with `A = c*d2/dx2`
//! discretizes to the complex-shifted tridiagonal system
//! `(z*M - S_c) V = M U0`, solved by elimination without pivoting. The
//! complex shift keeps the system diagonally dominant away from the real
//! eigenvalues; a residual check backstops the no-pivot choice.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative residual bound enforced after every resolvent solve.
pub const RESOLVENT_RESIDUAL_TOL: f64 = 1e-10;

/// Uniform partition of [0, pi] with homogeneous Dirichlet boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mesh {
    n_elements: usize,
}

impl Mesh {
    pub fn new(n_elements: usize) -> Result<Self> {
        if n_elements < 2 {
            return Err(Error::InvalidParameter(format!(
                "mesh needs at least 2 elements, got {n_elements}"
            )));
        }
        Ok(Self { n_elements })
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    /// Element width `pi / n_elements`.
    pub fn h(&self) -> f64 {
        std::f64::consts::PI / self.n_elements as f64
    }

    /// Number of interior nodes.
    pub fn n_interior(&self) -> usize {
        self.n_elements - 1
    }

    /// Coordinate of interior node `i` (0-based), i.e. `(i + 1) * h`.
    pub fn interior_x(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.h()
    }

    /// Coordinate of global node `i` in `0..=n_elements`.
    pub fn node_x(&self, i: usize) -> f64 {
        i as f64 * self.h()
    }
}

/// Real nodal field at the interior nodes of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    mesh: Mesh,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(mesh: Mesh) -> Self {
        Self {
            values: vec![0.0; mesh.n_interior()],
            mesh,
        }
    }

    pub fn from_values(mesh: Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n_interior() {
            return Err(Error::InvalidParameter(format!(
                "expected {} interior values, got {}",
                mesh.n_interior(),
                values.len()
            )));
        }
        Ok(Self { mesh, values })
    }

    /// Samples `f` at the interior nodes.
    pub fn from_fn(mesh: Mesh, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..mesh.n_interior())
            .map(|i| f(mesh.interior_x(i)))
            .collect();
        Self { mesh, values }
    }

    pub fn mesh(&self) -> Mesh {
        self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn scaled(&self, a: f64) -> GridFunction {
        GridFunction {
            mesh: self.mesh,
            values: self.values.iter().map(|v| a * v).collect(),
        }
    }

    pub fn add(&self, other: &GridFunction) -> GridFunction {
        assert_eq!(
            self.mesh, other.mesh,
            "grid functions live on different meshes"
        );
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        GridFunction {
            mesh: self.mesh,
            values,
        }
    }

    pub fn sub(&self, other: &GridFunction) -> GridFunction {
        assert_eq!(
            self.mesh, other.mesh,
            "grid functions live on different meshes"
        );
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        GridFunction {
            mesh: self.mesh,
            values,
        }
    }
}

/// Complex nodal field; produced by resolvent solves.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGridFunction {
    mesh: Mesh,
    values: Vec<Complex64>,
}

impl ComplexGridFunction {
    pub fn from_values(mesh: Mesh, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != mesh.n_interior() {
            return Err(Error::InvalidParameter(format!(
                "expected {} interior values, got {}",
                mesh.n_interior(),
                values.len()
            )));
        }
        Ok(Self { mesh, values })
    }

    pub fn mesh(&self) -> Mesh {
        self.mesh
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn re(&self) -> GridFunction {
        GridFunction {
            mesh: self.mesh,
            values: self.values.iter().map(|v| v.re).collect(),
        }
    }

    pub fn im(&self) -> GridFunction {
        GridFunction {
            mesh: self.mesh,
            values: self.values.iter().map(|v| v.im).collect(),
        }
    }

    pub fn conj(&self) -> ComplexGridFunction {
        ComplexGridFunction {
            mesh: self.mesh,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }
}

/// Diffusion coefficient: constant or one positive value per element.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    Constant(f64),
    PerElement(Vec<f64>),
}

impl Coefficient {
    pub fn validate(&self, mesh: Mesh) -> Result<()> {
        match self {
            Coefficient::Constant(c) => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "diffusion coefficient must be positive, got {c}"
                    )));
                }
            }
            Coefficient::PerElement(cs) => {
                if cs.len() != mesh.n_elements() {
                    return Err(Error::InvalidParameter(format!(
                        "expected {} per-element values, got {}",
                        mesh.n_elements(),
                        cs.len()
                    )));
                }
                if cs.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
                    return Err(Error::InvalidParameter(
                        "diffusion coefficient must be positive on every element".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Midpoint sampling of `c(x)` on every element.
    pub fn from_fn(mesh: Mesh, c: impl Fn(f64) -> f64) -> Self {
        let h = mesh.h();
        Coefficient::PerElement(
            (0..mesh.n_elements())
                .map(|e| c((e as f64 + 0.5) * h))
                .collect(),
        )
    }

    pub fn on_element(&self, e: usize) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::PerElement(cs) => cs[e],
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Coefficient::Constant(c) => Some(*c),
            Coefficient::PerElement(_) => None,
        }
    }
}

/// Symmetric tridiagonal matrix over the interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    /// Off-diagonal entries; `off[i]` couples nodes `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        assert_eq!(v.len(), n);
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * v[i];
            if i > 0 {
                acc += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * v[i + 1];
            }
            out[i] = acc;
        }
        out
    }

    pub fn matvec_complex(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.diag.len();
        assert_eq!(v.len(), n);
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = self.diag[i] * v[i];
            if i > 0 {
                acc += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * v[i + 1];
            }
            out[i] = acc;
        }
        out
    }
}

/// Assembles the consistent P1 mass matrix and the `c`-weighted stiffness
/// matrix of `-d/dx (c du/dx)` over the interior nodes.
pub fn assemble(mesh: Mesh, coeff: &Coefficient) -> Result<(Tridiagonal, Tridiagonal)> {
    coeff.validate(mesh)?;
    let n = mesh.n_interior();
    let h = mesh.h();

    let mass = Tridiagonal {
        diag: vec![2.0 * h / 3.0; n],
        off: vec![h / 6.0; n.saturating_sub(1)],
    };

    let mut s_diag = vec![0.0; n];
    let mut s_off = vec![0.0; n.saturating_sub(1)];
    for i in 0..n {
        // Interior node i sits between elements i and i + 1.
        s_diag[i] = (coeff.on_element(i) + coeff.on_element(i + 1)) / h;
        if i + 1 < n {
            s_off[i] = -coeff.on_element(i + 1) / h;
        }
    }
    let stiffness = Tridiagonal {
        diag: s_diag,
        off: s_off,
    };
    Ok((mass, stiffness))
}

/// Solves `z*v + A*v = u0` for the complex shift `z`, returning the nodal
/// resolvent field. The discrete system is `(z*M - S_c) V = M U0`.
pub fn resolvent_solve(
    z: Complex64,
    u0: &GridFunction,
    coeff: &Coefficient,
) -> Result<ComplexGridFunction> {
    let mesh = u0.mesh();
    let (mass, stiffness) = assemble(mesh, coeff)?;

    let rhs_real = mass.matvec(u0.values());
    let rhs: Vec<Complex64> = rhs_real.iter().map(|&r| Complex64::new(r, 0.0)).collect();

    let n = mesh.n_interior();
    let diag: Vec<Complex64> = (0..n)
        .map(|i| z * mass.diag[i] - stiffness.diag[i])
        .collect();
    let off: Vec<Complex64> = (0..n - 1)
        .map(|i| z * mass.off[i] - stiffness.off[i])
        .collect();

    let solution = thomas_symmetric(&diag, &off, &rhs)?;

    // Residual backstop for the pivot-free elimination.
    let mut residual_sq = 0.0;
    let mut rhs_sq = 0.0;
    for i in 0..n {
        let mut acc = diag[i] * solution[i];
        if i > 0 {
            acc += off[i - 1] * solution[i - 1];
        }
        if i + 1 < n {
            acc += off[i] * solution[i + 1];
        }
        residual_sq += (acc - rhs[i]).norm_sqr();
        rhs_sq += rhs[i].norm_sqr();
    }
    let rel = (residual_sq / rhs_sq.max(f64::MIN_POSITIVE)).sqrt();
    if !rel.is_finite() || (rel > RESOLVENT_RESIDUAL_TOL && rhs_sq > 0.0) {
        return Err(Error::IllConditioned { z, residual: rel });
    }

    ComplexGridFunction::from_values(mesh, solution)
}

/// Elimination without pivoting for a symmetric complex tridiagonal system.
fn thomas_symmetric(
    diag: &[Complex64],
    off: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = diag.len();
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut g = vec![Complex64::new(0.0, 0.0); n];

    let mut pivot = diag[0];
    if pivot.norm_sqr() == 0.0 {
        return Err(Error::IllConditioned {
            z: pivot,
            residual: f64::INFINITY,
        });
    }
    if n > 1 {
        w[0] = off[0] / pivot;
    }
    g[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - off[i - 1] * w[i - 1];
        if pivot.norm_sqr() == 0.0 {
            return Err(Error::IllConditioned {
                z: pivot,
                residual: f64::INFINITY,
            });
        }
        if i + 1 < n {
            w[i] = off[i] / pivot;
        }
        g[i] = (rhs[i] - off[i - 1] * g[i - 1]) / pivot;
    }

    let mut x = g;
    for i in (0..n - 1).rev() {
        let upper = x[i + 1];
        x[i] -= w[i] * upper;
    }
    Ok(x)
}

/// L2 norm of the P1 interpolant, `sqrt(V^T M V)`, in closed form.
pub fn mass_norm(u: &GridFunction) -> f64 {
    let h = u.mesh().h();
    let v = u.values();
    let mut diag_sum = 0.0;
    let mut off_sum = 0.0;
    for i in 0..v.len() {
        diag_sum += v[i] * v[i];
        if i + 1 < v.len() {
            off_sum += v[i] * v[i + 1];
        }
    }
    ((2.0 * h / 3.0) * diag_sum + (h / 3.0) * off_sum)
        .max(0.0)
        .sqrt()
}

/// Mass norm of a complex field.
pub fn mass_norm_complex(u: &ComplexGridFunction) -> f64 {
    let h = u.mesh().h();
    let v = u.values();
    let mut diag_sum = 0.0;
    let mut off_sum = 0.0;
    for i in 0..v.len() {
        diag_sum += v[i].norm_sqr();
        if i + 1 < v.len() {
            off_sum += (v[i].conj() * v[i + 1]).re;
        }
    }
    ((2.0 * h / 3.0) * diag_sum + (h / 3.0) * off_sum)
        .max(0.0)
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral;

    #[test]
    fn mass_rows_sum_to_h_in_the_interior() {
        let mesh = Mesh::new(64).unwrap();
        let (mass, _) = assemble(mesh, &Coefficient::Constant(1.0)).unwrap();
        let ones = vec![1.0; mesh.n_interior()];
        let sums = mass.matvec(&ones);
        let h = mesh.h();
        for (i, s) in sums.iter().enumerate() {
            if i > 0 && i + 1 < mesh.n_interior() {
                assert!((s - h).abs() < 1e-15, "row {i}: {s} vs {h}");
            }
        }
    }

    #[test]
    fn stiffness_annihilates_constants_in_the_interior() {
        let mesh = Mesh::new(64).unwrap();
        let (_, stiffness) = assemble(mesh, &Coefficient::Constant(1.0 / 32.0)).unwrap();
        let ones = vec![1.0; mesh.n_interior()];
        let sums = stiffness.matvec(&ones);
        for (i, s) in sums.iter().enumerate() {
            if i > 0 && i + 1 < mesh.n_interior() {
                assert!(s.abs() < 1e-14, "row {i}: {s}");
            }
        }
    }

    #[test]
    fn assembled_matrices_are_symmetric() {
        let mesh = Mesh::new(16).unwrap();
        let coeff = Coefficient::from_fn(mesh, |x| 0.5 + x);
        let (mass, stiffness) = assemble(mesh, &coeff).unwrap();
        for mat in [&mass, &stiffness] {
            // Symmetry by representation: check e_i^T A e_j == e_j^T A e_i.
            let n = mesh.n_interior();
            for i in 0..n {
                let mut ei = vec![0.0; n];
                ei[i] = 1.0;
                let col = mat.matvec(&ei);
                for j in 0..n {
                    let mut ej = vec![0.0; n];
                    ej[j] = 1.0;
                    let row = mat.matvec(&ej);
                    assert_eq!(col[j], row[i]);
                }
            }
        }
    }

    #[test]
    fn nonpositive_coefficient_is_rejected() {
        let mesh = Mesh::new(8).unwrap();
        assert!(assemble(mesh, &Coefficient::Constant(0.0)).is_err());
        let mut per = vec![1.0; 8];
        per[3] = -2.0;
        assert!(assemble(mesh, &Coefficient::PerElement(per)).is_err());
    }

    #[test]
    fn resolvent_matches_single_mode_formula() {
        // With u0 = phi_1 and z = 1 the resolvent is phi_1 / (1 - c).
        let mesh = Mesh::new(1024).unwrap();
        let c = 1.0 / 32.0;
        let u0 = spectral::sample_mode(mesh, 1);
        let v = resolvent_solve(Complex64::new(1.0, 0.0), &u0, &Coefficient::Constant(c)).unwrap();
        let scale = 1.0 / (1.0 - c);
        let mut max_err: f64 = 0.0;
        for (i, val) in v.values().iter().enumerate() {
            let expected = scale * u0.values()[i];
            max_err = max_err.max((val.re - expected).abs().max(val.im.abs()));
        }
        assert!(max_err < 1e-5, "nodal max error {max_err}");
    }

    #[test]
    fn resolvent_of_zero_is_zero() {
        let mesh = Mesh::new(32).unwrap();
        let u0 = GridFunction::zeros(mesh);
        let v =
            resolvent_solve(Complex64::new(0.5, 2.0), &u0, &Coefficient::Constant(1.0)).unwrap();
        assert!(v.values().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn resolvent_respects_conjugate_symmetry() {
        let mesh = Mesh::new(256).unwrap();
        let coeff = Coefficient::from_fn(mesh, |x| (1.0 + 0.3 * (x).sin()) / 32.0);
        let u0 = GridFunction::from_fn(mesh, |x| (x * (std::f64::consts::PI - x)).sqrt());
        let z = Complex64::new(1.2, 0.8);
        let v_plus = resolvent_solve(z, &u0, &coeff).unwrap();
        let v_minus = resolvent_solve(z.conj(), &u0, &coeff).unwrap();
        let diff: f64 = v_plus
            .values()
            .iter()
            .zip(v_minus.conj().values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let scale: f64 = v_plus.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(
            diff <= 1e-13 * scale,
            "conjugate mismatch {diff} at scale {scale}"
        );
    }

    #[test]
    fn resolvent_converges_at_second_order() {
        let c = 1.0 / 32.0;
        let z = Complex64::new(1.0, 0.0);
        let scale = 1.0 / (1.0 - c);
        let mut errors = Vec::new();
        for n in [128usize, 256, 512] {
            let mesh = Mesh::new(n).unwrap();
            let u0 = spectral::sample_mode(mesh, 1);
            let v = resolvent_solve(z, &u0, &Coefficient::Constant(c)).unwrap();
            let err = v
                .values()
                .iter()
                .zip(u0.values())
                .map(|(vi, ui)| (vi - scale * ui).norm())
                .fold(0.0, f64::max);
            errors.push(err);
        }
        for pair in errors.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!(
                (3.5..=4.5).contains(&ratio),
                "expected ~4x error reduction per refinement, got {ratio}; errors {errors:?}"
            );
        }
    }

    #[test]
    fn discrete_eigenvalues_track_the_analytic_ones() {
        let mesh = Mesh::new(1024).unwrap();
        let c = 1.0 / 32.0;
        let (mass, stiffness) = assemble(mesh, &Coefficient::Constant(c)).unwrap();
        for k in 1..=16usize {
            let phi = spectral::sample_mode(mesh, k);
            let s_phi = stiffness.matvec(phi.values());
            let m_phi = mass.matvec(phi.values());
            // Sampled sines are exact eigenvectors of the discrete pencil.
            let num: f64 = phi.values().iter().zip(&s_phi).map(|(a, b)| a * b).sum();
            let den: f64 = phi.values().iter().zip(&m_phi).map(|(a, b)| a * b).sum();
            let lambda_h = num / den;
            let lambda = spectral::eigenvalue(k, c);
            assert!(
                ((lambda_h - lambda) / lambda).abs() < 0.01,
                "mode {k}: discrete {lambda_h} vs analytic {lambda}"
            );
        }
    }

    #[test]
    fn resolvent_residual_is_small_on_contour_nodes() {
        let mesh = Mesh::new(1024).unwrap();
        let c = Coefficient::Constant(1.0 / 32.0);
        let u0 = spectral::sample_mode(mesh, 3);
        for y in [0.075f64, 1.0, 6.0, 11.9] {
            let root = (0.25 + y * y).sqrt();
            let z = Complex64::new(2.5837 - root, y);
            // resolvent_solve enforces the residual bound internally.
            resolvent_solve(z, &u0, &c).unwrap();
        }
    }

    #[test]
    fn mass_norm_of_an_eigenmode_is_one() {
        let mesh = Mesh::new(1024).unwrap();
        let phi = spectral::sample_mode(mesh, 1);
        assert!((mass_norm(&phi) - 1.0).abs() < 1e-5);
        assert_eq!(mass_norm(&GridFunction::zeros(mesh)), 0.0);
    }

    #[test]
    fn mass_norm_of_the_interior_indicator() {
        let mesh = Mesh::new(1024).unwrap();
        let h = mesh.h();
        let ones = GridFunction::from_values(mesh, vec![1.0; mesh.n_interior()]).unwrap();
        let norm = mass_norm(&ones);
        // The interpolant ramps to zero over the boundary elements:
        // integral of its square is exactly pi - 4h/3.
        let exact = (std::f64::consts::PI - 4.0 * h / 3.0).sqrt();
        assert!((norm - exact).abs() < 1e-12);
        assert!((norm - std::f64::consts::PI.sqrt()).abs() < 2.0 * h);
    }
}
