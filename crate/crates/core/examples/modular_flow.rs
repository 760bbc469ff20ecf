// The modular flow of `ρ`, the graded-KMS boundary condition, and the
// analytic strip function behind it.

use graded_kms::flow::{graded_kms_residual, graded_upper_boundary, growth_probe, StripFunction};
use graded_kms::linalg::{c, diag_real, re, unit};
use graded_kms::{GradedAlgebra, ModularFlow, Result};

pub fn run_example() -> Result<()> {
    let alg = GradedAlgebra::new(1, 1)?;
    let rho = diag_real(&[0.75, 0.25]);
    let omega = alg.supertrace_functional(&rho)?;
    let flow = ModularFlow::graded(&alg, &rho)?;

    let (a, b) = (unit(2, 1, 0), unit(2, 0, 1));
    let lhs = omega.eval(&(&a * &b))?;
    let rhs = omega.eval(&(alg.gamma(&b)? * flow.evolve(&a, c(0.0, 1.0))?))?;
    println!("w(ab) = {lhs:.4}, w(gamma(b) alpha_i(a)) = {rhs:.4}");
    println!("relative residual {:.1e}", graded_kms_residual(&omega, &flow, &alg, &a, &b)?);

    let t = 0.8;
    let moved = flow.evolve(&b, re(t))?;
    println!("alpha_t(E12) at t = {t}: {:.4}", moved[(0, 1)]);

    let f = StripFunction::new(&omega, &flow, &a, &b)?;
    let edge = graded_upper_boundary(&omega, &flow, &alg, &a, &b, t)?;
    println!("F(t + i) = {:.4}, boundary value {:.4}", f.eval(c(t, 1.0)), edge);
    println!("sup over the strip {:.4}", f.strip_bound());

    let growth = growth_probe(|z| f.eval(z), 10.0, 21, 5);
    println!("growth: |F| <= {:.3} (1 + |t|)^{}", growth.c, growth.n);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
