//! The automorphism group `α_z(a) = ρ^{-iz} a ρ^{iz}` of a positive definite
//! density, the (graded) KMS residuals it is tested against, strip functions
//! `F_{a,b}(z) = ω(a α_z(b))` and Gaussian-smoothed analytic elements.
//!
//! With modular energies `E_j = −ln λ_j`, the flow multiplies entry `(j, k)`
//! of an element written in the eigenbasis of `ρ` by `exp(iz(E_j − E_k))`; in
//! particular `α_i(a) = ρ a ρ^{-1}`, which is the convention under which the
//! regularized supertrace `tr(·gρ)` is graded-KMS.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::graded::{Functional, GradedAlgebra};
use crate::linalg::{
    c, ensure_dim, ensure_positive_definite, hermitian_eigendecompose, re, CMatrix, EigenSystem,
    C64,
};

/// Flows with `cond(ρ)` above this are rejected unless built unguarded.
pub const CONDITION_GUARD: f64 = 1e6;

/// Default node count for the smoothing quadrature.
pub const QUADRATURE_NODES: usize = 64;

#[derive(Clone, Debug)]
pub struct ModularFlow {
    rho: CMatrix,
    eig: EigenSystem,
    energies: Vec<f64>,
}

impl ModularFlow {
    /// Flow of an arbitrary positive definite density.
    pub fn new(rho: &CMatrix) -> Result<Self> {
        Self::build(rho, hermitian_eigendecompose(rho)?, true)
    }

    /// Flow of an even density, diagonalized sector by sector so the cached
    /// eigenvectors are homogeneous for the grading.
    pub fn graded(algebra: &GradedAlgebra, rho: &CMatrix) -> Result<Self> {
        Self::build(rho, algebra.even_eigensystem(rho)?, true)
    }

    /// Like [`Self::new`] but without the condition-number guard.
    pub fn new_unguarded(rho: &CMatrix) -> Result<Self> {
        Self::build(rho, hermitian_eigendecompose(rho)?, false)
    }

    pub fn graded_unguarded(algebra: &GradedAlgebra, rho: &CMatrix) -> Result<Self> {
        Self::build(rho, algebra.even_eigensystem(rho)?, false)
    }

    fn build(rho: &CMatrix, eig: EigenSystem, guard: bool) -> Result<Self> {
        ensure_positive_definite(&eig)?;
        let cond = eig.eigenvalues[eig.dim() - 1] / eig.eigenvalues[0];
        if guard && cond > CONDITION_GUARD {
            return Err(Error::IllConditioned(cond));
        }
        let energies = eig.eigenvalues.iter().map(|l| -l.ln()).collect();
        Ok(Self {
            rho: rho.clone(),
            eig,
            energies,
        })
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    pub fn eigensystem(&self) -> &EigenSystem {
        &self.eig
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// `λ_max / λ_min`.
    pub fn condition_number(&self) -> f64 {
        self.eig.eigenvalues[self.dim() - 1] / self.eig.eigenvalues[0]
    }

    /// Largest Bohr frequency `max_jk |E_j − E_k|`.
    pub fn max_frequency(&self) -> f64 {
        self.energies[0] - self.energies[self.dim() - 1]
    }

    fn to_eigenbasis(&self, a: &CMatrix) -> CMatrix {
        let v = &self.eig.eigenvectors;
        v.adjoint() * a * v
    }

    fn from_eigenbasis(&self, a: &CMatrix) -> CMatrix {
        let v = &self.eig.eigenvectors;
        v * a * v.adjoint()
    }

    /// Multiply entry `(j, k)` in the eigenbasis by `f(E_j − E_k)`.
    fn spectral_multiplier(&self, a: &CMatrix, f: impl Fn(f64) -> C64) -> Result<CMatrix> {
        ensure_dim(a, self.dim(), "flow argument")?;
        let mut t = self.to_eigenbasis(a);
        for j in 0..self.dim() {
            for k in 0..self.dim() {
                t[(j, k)] *= f(self.energies[j] - self.energies[k]);
            }
        }
        Ok(self.from_eigenbasis(&t))
    }

    /// `α_z(a) = ρ^{-iz} a ρ^{iz}`.
    pub fn evolve(&self, a: &CMatrix, z: C64) -> Result<CMatrix> {
        let iz = c(0.0, 1.0) * z;
        self.spectral_multiplier(a, |nu| (iz * nu).exp())
    }

    /// Closed form of `a_{σ,z} = (√π σ)^{-1} ∫ α_t(a) exp(−(t−z)²/σ²) dt`.
    pub fn smooth(&self, a: &CMatrix, sigma: f64, z: C64) -> Result<CMatrix> {
        if !(sigma > 0.0) {
            return Err(Error::NonpositiveSigma(sigma));
        }
        let iz = c(0.0, 1.0) * z;
        self.spectral_multiplier(a, |nu| (iz * nu - sigma * sigma * nu * nu / 4.0).exp())
    }

    /// The smoothing integral by Gauss–Hermite quadrature along the
    /// horizontal line through `z`: `t = z + σu`, so
    /// `a_{σ,z} = π^{-1/2} Σ_k w_k α_{z + σ u_k}(a)`.
    pub fn smooth_quadrature(
        &self,
        a: &CMatrix,
        sigma: f64,
        z: C64,
        nodes: usize,
    ) -> Result<CMatrix> {
        if !(sigma > 0.0) {
            return Err(Error::NonpositiveSigma(sigma));
        }
        ensure_dim(a, self.dim(), "flow argument")?;
        let (xs, ws) = gauss_hermite(nodes);
        let mut acc = CMatrix::zeros(self.dim(), self.dim());
        for (x, w) in xs.iter().zip(&ws) {
            acc += self.evolve(a, z + re(sigma * x))? * re(*w);
        }
        Ok(acc / re(PI.sqrt()))
    }
}

/// Gauss–Hermite nodes and weights for `∫ e^{-x²} f(x) dx`, by Newton
/// iteration on the orthonormal Hermite recurrence.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    if n == 0 {
        return (x, w);
    }
    let nf = n as f64;
    let mut z: f64 = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 1.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let step = p1 / pp;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `‖a‖_F ‖b‖_F ‖T‖₁ max(1, cond ρ)`.
pub fn kms_scale(omega: &Functional, flow: &ModularFlow, a: &CMatrix, b: &CMatrix) -> f64 {
    a.norm() * b.norm() * omega.norm() * flow.condition_number().max(1.0)
}

fn relative(diff: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// `|ω(ab) − ω(b^γ α_i(a))| / scale`.
pub fn graded_kms_residual(
    omega: &Functional,
    flow: &ModularFlow,
    algebra: &GradedAlgebra,
    a: &CMatrix,
    b: &CMatrix,
) -> Result<f64> {
    let lhs = omega.eval(&(a * b))?;
    let rhs = omega.eval(&(algebra.gamma(b)? * flow.evolve(a, c(0.0, 1.0))?))?;
    Ok(relative((lhs - rhs).norm(), kms_scale(omega, flow, a, b)))
}

/// `|φ(ab) − φ(b α_i(a))| / scale`.
pub fn kms_residual(phi: &Functional, flow: &ModularFlow, a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let lhs = phi.eval(&(a * b))?;
    let rhs = phi.eval(&(b * flow.evolve(a, c(0.0, 1.0))?))?;
    Ok(relative((lhs - rhs).norm(), kms_scale(phi, flow, a, b)))
}

/// Largest [`graded_kms_residual`] over all pairs `left × right`.
pub fn graded_kms_sweep(
    omega: &Functional,
    flow: &ModularFlow,
    algebra: &GradedAlgebra,
    left: &[CMatrix],
    right: &[CMatrix],
) -> Result<f64> {
    let (on, cond) = (omega.norm(), flow.condition_number().max(1.0));
    let right: Vec<(CMatrix, CMatrix, f64)> = right
        .iter()
        .map(|b| Ok((b.clone(), algebra.gamma(b)?, b.norm())))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for a in left {
        let ai = flow.evolve(a, c(0.0, 1.0))?;
        let na = a.norm();
        for (b, gb, nb) in &right {
            let d = omega.eval_unchecked(&(a * b)) - omega.eval_unchecked(&(gb * &ai));
            worst = worst.max(relative(d.norm(), na * nb * on * cond));
        }
    }
    Ok(worst)
}

/// Largest [`kms_residual`] over all pairs `left × right`.
pub fn kms_sweep(
    phi: &Functional,
    flow: &ModularFlow,
    left: &[CMatrix],
    right: &[CMatrix],
) -> Result<f64> {
    let (on, cond) = (phi.norm(), flow.condition_number().max(1.0));
    for b in right {
        ensure_dim(b, flow.dim(), "KMS argument")?;
    }
    let mut worst: f64 = 0.0;
    for a in left {
        let ai = flow.evolve(a, c(0.0, 1.0))?;
        let na = a.norm();
        for b in right {
            let d = phi.eval_unchecked(&(a * b)) - phi.eval_unchecked(&(b * &ai));
            worst = worst.max(relative(d.norm(), na * b.norm() * on * cond));
        }
    }
    Ok(worst)
}

/// `F_{a,b}(z) = ω(a α_z(b))` by direct evaluation.
pub fn strip_function(
    omega: &Functional,
    flow: &ModularFlow,
    a: &CMatrix,
    b: &CMatrix,
    z: C64,
) -> Result<C64> {
    omega.eval(&(a * flow.evolve(b, z)?))
}

/// `ω(α_t(b) a^γ)`, the value `F_{a,b}` must take on the upper edge `t + i`
/// for a graded-KMS functional.
pub fn graded_upper_boundary(
    omega: &Functional,
    flow: &ModularFlow,
    algebra: &GradedAlgebra,
    a: &CMatrix,
    b: &CMatrix,
    t: f64,
) -> Result<C64> {
    omega.eval(&(flow.evolve(b, re(t))? * algebra.gamma(a)?))
}

/// `φ(α_t(b) a)`, the ungraded upper edge value.
pub fn upper_boundary(
    phi: &Functional,
    flow: &ModularFlow,
    a: &CMatrix,
    b: &CMatrix,
    t: f64,
) -> Result<C64> {
    phi.eval(&(flow.evolve(b, re(t))? * a))
}

/// `F_{a,b}` as an exponential sum `Σ c_m exp(iz ν_m)`, which makes it entire
/// and cheap to evaluate and differentiate.
#[derive(Clone, Debug)]
pub struct StripFunction {
    terms: Vec<(C64, f64)>,
}

impl StripFunction {
    pub fn new(omega: &Functional, flow: &ModularFlow, a: &CMatrix, b: &CMatrix) -> Result<Self> {
        let n = flow.dim();
        ensure_dim(a, n, "strip argument a")?;
        ensure_dim(b, n, "strip argument b")?;
        ensure_dim(omega.kernel(), n, "strip functional")?;
        // tr(a V(M∘b̃)V* T) = Σ_jk (V* T a V)_kj b̃_jk M_jk
        let x = flow.to_eigenbasis(&(omega.kernel() * a));
        let bt = flow.to_eigenbasis(b);
        let e = flow.energies();
        let mut terms = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                let coeff = x[(k, j)] * bt[(j, k)];
                if coeff != re(0.0) {
                    terms.push((coeff, e[j] - e[k]));
                }
            }
        }
        Ok(Self { terms })
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.derivative(0, z)
    }

    /// `F^{(order)}(z)`.
    pub fn derivative(&self, order: u32, z: C64) -> C64 {
        let i = c(0.0, 1.0);
        self.terms
            .iter()
            .map(|&(cf, nu)| cf * (i * nu).powu(order) * (i * z * nu).exp())
            .sum()
    }

    /// Taylor polynomial with `terms` terms around `center`, evaluated at `z`.
    pub fn taylor(&self, center: C64, terms: u32, z: C64) -> C64 {
        let h = z - center;
        let mut acc = re(0.0);
        let mut factorial = 1.0;
        for m in 0..terms {
            if m > 0 {
                factorial *= m as f64;
            }
            acc += self.derivative(m, center) * h.powu(m) / factorial;
        }
        acc
    }

    /// `max |F|` over the strip is bounded by `Σ|c_m| max(1, e^{-ν_m})`.
    pub fn strip_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|&(cf, nu)| cf.norm() * (-nu).exp().max(1.0))
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct GridPoint {
    pub t: f64,
    pub s: f64,
    pub abs: f64,
}

/// Constants of a polynomial envelope `|F(t + is)| ≤ C (1 + |t|)^N`.
#[derive(Clone, Debug)]
pub struct GrowthEstimate {
    pub c: f64,
    pub n: u32,
    pub grid: Vec<GridPoint>,
}

/// Largest exponent tried by [`growth_probe`].
pub const GROWTH_MAX_EXPONENT: u32 = 8;

/// Fits the smallest `N` whose envelope, calibrated on `|t| ≤ t_max/2`, also
/// covers the outer half of the grid within a factor 1.5, then reports the
/// `C` that makes the bound hold at every sampled point.
pub fn growth_probe(
    f: impl Fn(C64) -> C64,
    t_max: f64,
    t_samples: usize,
    s_samples: usize,
) -> GrowthEstimate {
    let t_samples = t_samples.max(2);
    let s_samples = s_samples.max(2);
    let mut grid = Vec::with_capacity(t_samples * s_samples);
    for it in 0..t_samples {
        let t = -t_max + 2.0 * t_max * it as f64 / (t_samples - 1) as f64;
        for is in 0..s_samples {
            let s = is as f64 / (s_samples - 1) as f64;
            grid.push(GridPoint {
                t,
                s,
                abs: f(c(t, s)).norm(),
            });
        }
    }
    let envelope = |n: u32, inner_only: bool| -> f64 {
        grid.iter()
            .filter(|p| !inner_only || p.t.abs() <= t_max / 2.0)
            .map(|p| p.abs / (1.0 + p.t.abs()).powi(n as i32))
            .fold(0.0, f64::max)
    };
    let n = (0..=GROWTH_MAX_EXPONENT)
        .find(|&n| envelope(n, false) <= 1.5 * envelope(n, true))
        .unwrap_or(GROWTH_MAX_EXPONENT);
    GrowthEstimate {
        c: envelope(n, false),
        n,
        grid,
    }
}
