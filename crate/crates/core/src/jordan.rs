//! Jordan decomposition `ω = ω₊ − ω₋`, the modulus `|ω| = ω₊ + ω₋`, the
//! support projections `χ±` and the polar links between `ω` and `|ω|`.

use crate::error::{Error, Result};
use crate::graded::{Functional, GradedAlgebra};
use crate::linalg::{
    hermitian_eigendecompose, identity, projection_spectrum_defect, re, trace_norm, CMatrix,
    EigenSystem,
};

/// Eigenvalues with `|λ| ≤ ZERO_RTOL · max|λ|` belong to neither support.
pub const ZERO_RTOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct JordanData {
    pub t_plus: CMatrix,
    pub t_minus: CMatrix,
    pub chi_plus: CMatrix,
    pub chi_minus: CMatrix,
    /// Modulus kernel `|T| = T₊ + T₋`.
    pub rho: CMatrix,
    /// `g′ = χ₊ − χ₋`.
    pub g_prime: CMatrix,
    kernel: CMatrix,
    spectrum: EigenSystem,
    faithful: bool,
}

/// Spectral split of a self-adjoint kernel.
pub fn jordan_decompose(omega: &Functional) -> Result<JordanData> {
    omega.ensure_self_adjoint(1e-10)?;
    let t = omega.kernel();
    let eig = hermitian_eigendecompose(t)?;
    let tol = ZERO_RTOL * eig.max_abs();
    let pos = |l: f64| l > tol;
    let neg = |l: f64| l < -tol;
    let chi_plus = eig.projector(pos);
    let chi_minus = eig.projector(neg);
    let t_plus = eig.apply_fn(|l| re(if pos(l) { l } else { 0.0 }));
    let t_minus = eig.apply_fn(|l| re(if neg(l) { -l } else { 0.0 }));
    let faithful = eig.max_abs() > 0.0 && eig.eigenvalues.iter().all(|&l| pos(l) || neg(l));
    Ok(JordanData {
        rho: &t_plus + &t_minus,
        g_prime: &chi_plus - &chi_minus,
        t_plus,
        t_minus,
        chi_plus,
        chi_minus,
        kernel: t.clone(),
        spectrum: eig,
        faithful,
    })
}

/// `|ω|` with kernel `|T|`.
pub fn modulus(omega: &Functional) -> Result<Functional> {
    Functional::new(jordan_decompose(omega)?.rho)
}

impl JordanData {
    /// `χ₊ + χ₋ = 1`, i.e. `|ω|` is faithful.
    pub fn is_faithful(&self) -> bool {
        self.faithful
    }

    pub fn kernel(&self) -> &CMatrix {
        &self.kernel
    }

    pub fn spectrum(&self) -> &EigenSystem {
        &self.spectrum
    }

    pub fn dim(&self) -> usize {
        self.kernel.nrows()
    }

    pub fn omega(&self) -> Functional {
        Functional::new(self.kernel.clone()).expect("square kernel")
    }

    pub fn omega_plus(&self) -> Functional {
        Functional::new(self.t_plus.clone()).expect("square kernel")
    }

    pub fn omega_minus(&self) -> Functional {
        Functional::new(self.t_minus.clone()).expect("square kernel")
    }

    pub fn modulus(&self) -> Functional {
        Functional::new(self.rho.clone()).expect("square kernel")
    }

    /// `‖χ₊ + χ₋ − 1‖_F`.
    pub fn completeness_defect(&self) -> f64 {
        (&self.chi_plus + &self.chi_minus - identity(self.dim())).norm()
    }

    /// Relative residuals of every structural invariant.
    pub fn residuals(&self) -> Result<JordanResiduals> {
        let tn = trace_norm(&self.kernel)?.max(f64::MIN_POSITIVE);
        let decomposition = (&self.t_plus - &self.t_minus - &self.kernel).norm() / tn;
        let orthogonality = (&self.t_plus * &self.t_minus).norm() / (tn * tn);
        let min_eig = |m: &CMatrix| -> Result<f64> {
            Ok(hermitian_eigendecompose(m)?.eigenvalues[0])
        };
        let positivity = (-min_eig(&self.t_plus)?).max(-min_eig(&self.t_minus)?).max(0.0) / tn;
        let projections = projection_spectrum_defect(&self.chi_plus)?
            .max(projection_spectrum_defect(&self.chi_minus)?);
        let support_product = (&self.chi_plus * &self.chi_minus).norm();
        let norm_additivity = (trace_norm(&self.t_plus)? + trace_norm(&self.t_minus)? - tn).abs() / tn;
        // ω±(a) = ±ω(aχ±) as kernels: T₊ = Tχ₊, T₋ = −Tχ₋
        let support_formula = ((&self.kernel * &self.chi_plus - &self.t_plus).norm()
            + (&self.kernel * &self.chi_minus + &self.t_minus).norm())
            / tn;
        Ok(JordanResiduals {
            decomposition,
            orthogonality,
            positivity,
            projections,
            support_product,
            norm_additivity,
            support_formula,
        })
    }

    /// `‖gχ±g − χ±‖_F`, zero when the functional is even.
    pub fn support_parity_defect(&self, algebra: &GradedAlgebra) -> f64 {
        let g = algebra.g();
        (&g * &self.chi_plus * &g - &self.chi_plus).norm()
            + (&g * &self.chi_minus * &g - &self.chi_minus).norm()
    }
}

#[derive(Clone, Debug, Default)]
pub struct JordanResiduals {
    pub decomposition: f64,
    pub orthogonality: f64,
    pub positivity: f64,
    pub projections: f64,
    pub support_product: f64,
    pub norm_additivity: f64,
    pub support_formula: f64,
}

impl JordanResiduals {
    pub fn max(&self) -> f64 {
        [
            self.decomposition,
            self.orthogonality,
            self.positivity,
            self.projections,
            self.support_product,
            self.norm_additivity,
            self.support_formula,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Outcome of sampling the bound that characterizes the modulus.
#[derive(Clone, Debug)]
pub struct CauchySchwarzReport {
    pub samples: usize,
    /// `min (‖ω‖·|ω|(a*a) − |ω(a)|²) / (‖ω‖²‖a‖²_F)`; nonnegative when the
    /// squared inequality holds.
    pub squared_min_slack: f64,
    /// How many samples violate the unsquared `|ω(a)| ≤ ‖ω‖·|ω|(a*a)`.
    pub unsquared_violations: usize,
}

/// Samples `|ω(a)|² ≤ ‖ω‖·|ω|(a*a)` and reports the unsquared variant alongside.
pub fn cauchy_schwarz(omega: &Functional, samples: &[CMatrix]) -> Result<CauchySchwarzReport> {
    let jd = jordan_decompose(omega)?;
    let modulus = jd.modulus();
    let norm = omega.norm();
    let mut slack = f64::INFINITY;
    let mut violations = 0;
    for a in samples {
        let w = omega.eval(a)?.norm();
        let m = modulus.eval(&(a.adjoint() * a))?.re;
        let scale = (norm * a.norm()).powi(2).max(f64::MIN_POSITIVE);
        slack = slack.min((norm * m - w * w) / scale);
        if w > norm * m * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    Ok(CauchySchwarzReport {
        samples: samples.len(),
        squared_min_slack: if samples.is_empty() { 0.0 } else { slack },
        unsquared_violations: violations,
    })
}

/// Positive contraction `z` separating the supports of `ω₊` and `ω₋`.
#[derive(Clone, Debug)]
pub struct OrthogonalityWitness {
    pub z: CMatrix,
    /// `ω₊(1 − z)`.
    pub plus_defect: f64,
    /// `ω₋(z)`.
    pub minus_defect: f64,
}

/// Returns `z = χ₊` and certifies `0 ⪯ z ⪯ 1`, `ω₊(1 − z) < ε`, `ω₋(z) < ε`.
pub fn orthogonality_witness(jd: &JordanData, epsilon: f64) -> Result<OrthogonalityWitness> {
    let z = jd.chi_plus.clone();
    let one = identity(jd.dim());
    let plus_defect = jd.omega_plus().eval(&(&one - &z))?.re;
    let minus_defect = jd.omega_minus().eval(&z)?.re;
    let spectrum = hermitian_eigendecompose(&z)?;
    let lo = spectrum.eigenvalues[0];
    let hi = *spectrum.eigenvalues.last().unwrap();
    if lo < -1e-12 || hi > 1.0 + 1e-12 {
        return Err(Error::InconsistentInputs(format!(
            "witness spectrum [{lo}, {hi}] leaves the unit interval"
        )));
    }
    if plus_defect >= epsilon || minus_defect >= epsilon {
        return Err(Error::InconsistentInputs(format!(
            "witness values {plus_defect:e}, {minus_defect:e} not below {epsilon:e}"
        )));
    }
    Ok(OrthogonalityWitness {
        z,
        plus_defect,
        minus_defect,
    })
}

/// `max_a ‖g′ a g′ − a^γ‖_F / ‖a‖_F` over the samples.
pub fn grading_from_functional(
    jd: &JordanData,
    algebra: &GradedAlgebra,
    samples: &[CMatrix],
) -> Result<f64> {
    if jd.completeness_defect() > 1e-10 {
        return Err(Error::NotFaithful);
    }
    let g = &jd.g_prime;
    let mut worst: f64 = 0.0;
    for a in samples {
        let n = a.norm();
        if n == 0.0 {
            continue;
        }
        let r = (g * a * g - algebra.gamma(a)?).norm() / n;
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Residuals of `|ω|(a) = ω(ag′)` and `ω(a) = |ω|(ag′)`, each relative to
/// `‖a‖_F·‖ω‖`.
pub fn sakai_links(omega: &Functional, jd: &JordanData, samples: &[CMatrix]) -> Result<(f64, f64)> {
    let modulus = jd.modulus();
    let scale0 = omega.norm().max(f64::MIN_POSITIVE);
    let mut r1: f64 = 0.0;
    let mut r2: f64 = 0.0;
    for a in samples {
        let scale = scale0 * a.norm().max(f64::MIN_POSITIVE);
        let ag = a * &jd.g_prime;
        r1 = r1.max((modulus.eval(a)? - omega.eval(&ag)?).norm() / scale);
        r2 = r2.max((omega.eval(a)? - modulus.eval(&ag)?).norm() / scale);
    }
    Ok((r1, r2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag_real, matrix_units, rel_diff, unit};
    use crate::sampling::SampleRng;

    fn fixture() -> Functional {
        Functional::new(diag_real(&[0.75, -0.25])).unwrap()
    }

    fn random_self_adjoint(n: usize, seed: u64) -> Functional {
        Functional::new(SampleRng::new(seed).gaussian_hermitian(n)).unwrap()
    }

    fn samples(n: usize, seed: u64) -> Vec<CMatrix> {
        let mut rng = SampleRng::new(seed);
        let mut v = matrix_units(n);
        v.extend((0..200).map(|_| rng.gaussian_matrix(n, n)));
        v
    }

    #[test]
    fn diagonal_split() {
        let jd = jordan_decompose(&fixture()).unwrap();
        assert_eq!(jd.chi_plus, diag_real(&[1.0, 0.0]));
        assert_eq!(jd.chi_minus, diag_real(&[0.0, 1.0]));
        assert!((fixture().norm() - 1.0).abs() < 1e-15);
        assert!(rel_diff(&jd.rho, &diag_real(&[0.75, 0.25])) < 1e-15);
        assert!(jd.is_faithful());
    }

    #[test]
    fn positive_functional_has_no_negative_part() {
        let jd = jordan_decompose(&Functional::new(diag_real(&[0.5, 0.2])).unwrap()).unwrap();
        assert_eq!(jd.t_minus.norm(), 0.0);
        assert_eq!(jd.chi_minus.norm(), 0.0);
        assert!(rel_diff(&jd.t_plus, &diag_real(&[0.5, 0.2])) < 1e-15);
    }

    #[test]
    fn random_invariants() {
        for seed in 0..5 {
            let jd = jordan_decompose(&random_self_adjoint(6, seed)).unwrap();
            let r = jd.residuals().unwrap();
            assert!(r.norm_additivity < 1e-11, "{r:?}");
            assert!(r.max() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn rejects_non_self_adjoint() {
        let f = Functional::new(unit(2, 0, 1)).unwrap();
        assert!(matches!(jordan_decompose(&f), Err(Error::NotSelfAdjoint(_))));
    }

    #[test]
    fn negation_swaps_parts() {
        let omega = random_self_adjoint(5, 3);
        let a = jordan_decompose(&omega).unwrap();
        let b = jordan_decompose(&omega.scaled(-1.0)).unwrap();
        assert!((&a.t_plus - &b.t_minus).norm() < 1e-13 * omega.norm());
        assert!((&a.chi_plus - &b.chi_minus).norm() < 1e-13);
        assert!((&a.chi_minus - &b.chi_plus).norm() < 1e-13);
    }

    #[test]
    fn modulus_is_idempotent() {
        let omega = random_self_adjoint(6, 8);
        let once = modulus(&omega).unwrap();
        let twice = modulus(&once).unwrap();
        assert!((once.kernel() - twice.kernel()).norm() < 1e-13 * once.norm());
    }

    #[test]
    fn supertrace_modulus_is_density() {
        let alg = GradedAlgebra::new(3, 2).unwrap();
        let rho = SampleRng::new(2).even_density(&alg);
        let omega = alg.supertrace_functional(&rho).unwrap();
        let m = modulus(&omega).unwrap();
        assert!(rel_diff(m.kernel(), &rho) < 1e-12);
        assert!((m.norm() - omega.norm()).abs() < 1e-12 * omega.norm());
        let jd = jordan_decompose(&omega).unwrap();
        assert!(rel_diff(&jd.g_prime, &alg.g()) < 1e-12);
        assert!(jd.support_parity_defect(&alg) < 1e-11);
    }

    #[test]
    fn cauchy_schwarz_squared_holds() {
        let omega = random_self_adjoint(4, 12);
        let rep = cauchy_schwarz(&omega, &samples(4, 1)).unwrap();
        assert!(rep.squared_min_slack >= -1e-10);
        assert_eq!(rep.samples, 216);
    }

    #[test]
    fn witness_cases() {
        let jd = jordan_decompose(&fixture()).unwrap();
        let w = orthogonality_witness(&jd, 1e-3).unwrap();
        assert_eq!(w.z, diag_real(&[1.0, 0.0]));
        assert_eq!(w.plus_defect, 0.0);
        assert_eq!(w.minus_defect, 0.0);

        let pos = jordan_decompose(&Functional::new(diag_real(&[0.4, 0.0])).unwrap()).unwrap();
        assert_eq!(orthogonality_witness(&pos, 1e-3).unwrap().z, diag_real(&[1.0, 0.0]));

        let omega = random_self_adjoint(6, 5);
        let jd = jordan_decompose(&omega).unwrap();
        let w = orthogonality_witness(&jd, 1e-12 * omega.norm()).unwrap();
        assert!(w.plus_defect.abs() < 1e-12 * omega.norm());
        assert!(w.minus_defect.abs() < 1e-12 * omega.norm());
    }

    #[test]
    fn grading_element_cases() {
        let alg = GradedAlgebra::new(1, 1).unwrap();
        let jd = jordan_decompose(&fixture()).unwrap();
        assert_eq!(jd.g_prime, diag_real(&[1.0, -1.0]));
        assert!(grading_from_functional(&jd, &alg, &samples(2, 3)).unwrap() < 1e-12);

        let ungraded = GradedAlgebra::new(3, 0).unwrap();
        let jd = jordan_decompose(&Functional::new(diag_real(&[0.5, 0.3, 0.2])).unwrap()).unwrap();
        assert_eq!(jd.g_prime, identity(3));
        assert_eq!(grading_from_functional(&jd, &ungraded, &samples(3, 4)).unwrap(), 0.0);

        let singular = jordan_decompose(&Functional::new(diag_real(&[0.5, 0.0])).unwrap()).unwrap();
        assert!(matches!(
            grading_from_functional(&singular, &alg, &samples(2, 3)),
            Err(Error::NotFaithful)
        ));
    }

    #[test]
    fn sakai_cases() {
        let omega = fixture();
        let jd = jordan_decompose(&omega).unwrap();
        let e11 = unit(2, 0, 0);
        assert!((jd.modulus().eval(&e11).unwrap().re - 0.75).abs() < 1e-15);
        assert!((omega.eval(&(&e11 * &jd.g_prime)).unwrap().re - 0.75).abs() < 1e-15);

        let alg = GradedAlgebra::new(4, 2).unwrap();
        let rho = SampleRng::new(6).even_density(&alg);
        let omega = alg.supertrace_functional(&rho).unwrap();
        let jd = jordan_decompose(&omega).unwrap();
        let (r1, r2) = sakai_links(&omega, &jd, &samples(6, 2)).unwrap();
        assert!(r1 < 1e-11 && r2 < 1e-11);
    }

    #[test]
    fn supports_fixed_by_symmetries_of_the_kernel() {
        let alg = GradedAlgebra::new(2, 2).unwrap();
        let mut rng = SampleRng::new(17);
        let rho = rng.even_density(&alg);
        let omega = alg.supertrace_functional(&rho).unwrap();
        // unitaries built from functions of ρ preserve the grading and fix T
        let u = alg
            .even_eigensystem(&rho)
            .unwrap()
            .apply_fn(|l| num_complex::Complex64::new(0.0, 3.0 * l).exp());
        let moved = Functional::new(&u * omega.kernel() * u.adjoint()).unwrap();
        let a = jordan_decompose(&omega).unwrap();
        let b = jordan_decompose(&moved).unwrap();
        assert!((&u * &a.chi_plus * u.adjoint() - &b.chi_plus).norm() < 1e-11);
        assert!((&a.chi_plus - &b.chi_plus).norm() < 1e-11);
    }
}
