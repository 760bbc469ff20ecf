// Gradings on `Mat_n(C)`: the automorphism `a ↦ gag`, parity parts, and
// the regularized supertrace `str(·ρ)`.

use graded_kms::linalg::{c, diag_real, unit, CMatrix};
use graded_kms::{GradedAlgebra, Result};

pub fn run_example() -> Result<()> {
    let alg = GradedAlgebra::new(2, 1)?;
    println!("signs {:?}, n+ = {}, n- = {}", alg.signs(), alg.n_plus(), alg.n_minus());

    let a = CMatrix::from_fn(3, 3, |i, j| c(i as f64 + 1.0, j as f64 - 1.0));
    let (even, odd) = alg.parity_split(&a)?;
    println!("|even| = {:.4}, |odd| = {:.4}", even.norm(), odd.norm());
    println!("gamma(odd) = -odd: {:.1e}", (alg.gamma(&odd)? + &odd).norm());

    // E_13 links the sectors, E_12 stays inside one
    println!("E_12 even: {}, E_13 even: {}", alg.unit_parity(0, 1), alg.unit_parity(0, 2));

    let rho = diag_real(&[0.5, 0.3, 0.2]);
    let omega = alg.supertrace_functional(&rho)?;
    println!("str(rho) = {:.3}", omega.eval(&graded_kms::linalg::identity(3))?.re);
    println!("str(rho E_33) = {:.3}", omega.eval(&unit(3, 2, 2))?.re);
    println!("||omega|| = {:.3}", omega.norm());

    let chain = GradedAlgebra::from_signs(&[1, -1])?.tensor(&GradedAlgebra::from_signs(&[1, -1])?);
    println!("two-site grading {:?}", chain.signs());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
