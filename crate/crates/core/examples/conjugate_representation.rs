// The conjugate graded representation `π′ = Uπ(·)U*`, `U = KJ`, with
// grading operator `Uπ(g′)U*` and vacuum `UΩ`.

use graded_kms::gns::{compatibility_probe, conjugate_representation, conjugate_residuals, modular_conjugation, GradedGns};
use graded_kms::linalg::{matrix_units, unit};
use graded_kms::{GradedAlgebra, ModularFlow, Result, SampleRng};

pub fn run_example() -> Result<()> {
    let alg = GradedAlgebra::new(1, 1)?;
    let rho = graded_kms::linalg::diag_real(&[0.75, 0.25]);
    let gg = GradedGns::build(&alg, &alg.supertrace_functional(&rho)?)?;
    let flow = ModularFlow::graded(&alg, &rho)?;
    let j = modular_conjugation(&gg.space, &flow)?;
    let rep = conjugate_representation(&gg.space, &gg.jordan, &j)?;

    let image = rep.pi_prime(&gg.space, &unit(2, 0, 1));
    println!("pi'(E12) =\n{:.3}", image.map(|z| z.re));

    let res = conjugate_residuals(&gg, &rep, &matrix_units(2))?;
    println!("homomorphism {:.1e}, star {:.1e}", res.homomorphism, res.star);
    println!("Gamma pi'(a) Gamma = pi'(gamma(a)): {:.1e}", res.equivariance);
    println!("U pi(g') U* = Gamma: {:.1e}", res.grading_transport);
    println!("cyclic rank {} of {}", res.cyclic_rank, res.dim);

    let (plus_min, minus_max, leak) = compatibility_probe(&gg, &rep, &mut SampleRng::new(4), 8);
    println!("graded expectation on e <= chi+: min {plus_min:.3}; on e <= chi-: max {minus_max:.3}; leak {leak:.1e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
