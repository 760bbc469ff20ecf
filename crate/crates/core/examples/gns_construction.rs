// GNS space of `|ω|` with commutant projections `p±`, the grading operator
// `Γ`, and the four-fold split `H = H⁰₊ ⊕ H¹₊ ⊕ H⁰₋ ⊕ H¹₋`.

use graded_kms::gns::{GnsSpace, GradedGns};
use graded_kms::linalg::{diag_real, unit};
use graded_kms::{Functional, GradedAlgebra, Result};

pub fn run_example() -> Result<()> {
    let alg = GradedAlgebra::new(1, 1)?;
    let omega = alg.supertrace_functional(&diag_real(&[0.75, 0.25]))?;
    let gg = GradedGns::build(&alg, &omega)?;
    let gns = &gg.space;

    println!("dim H = {}, faithful: {}", gns.dim(), gns.is_faithful());
    let gram = gns.gram();
    let diag: Vec<f64> = (0..gram.nrows()).map(|k| gram[(k, k)].re).collect();
    println!("Gram diagonal on matrix units {diag:?}");

    let x = unit(2, 0, 1);
    let om = gns.omega();
    let graded = om.dotc(&(gns.pi(&x) * (&gg.projections.gamma * om)));
    println!("<Omega, pi(E12) Gamma Omega> = {graded:.3}, omega(E12) = {:.3}", omega.eval(&x)?);
    println!("<Omega, pi(1) Gamma Omega> = {:.3}", om.dotc(&(&gg.projections.gamma * om)).re);

    println!("subspace dimensions (H0+, H1+, H0-, H1-) = {:?}", gg.subspaces.dims());
    println!("projection residual {:.1e}", gg.projections.residuals(gns, &gg.jordan, &[x])?.max());

    // a rank-one density gives a quotient: N = n * rank
    let pure = Functional::new(diag_real(&[1.0, 0.0]))?;
    let q = GnsSpace::build(&alg, &pure)?;
    println!("rank-one modulus: dim H = {}, separating margin {:.1e}", q.dim(), q.separating_margin());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
