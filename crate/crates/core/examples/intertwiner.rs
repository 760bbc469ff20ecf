// Two conjugate representations built from different complex conjugations
// `K` are unitarily equivalent as graded representations; flipping the
// grading operator breaks the hypothesis and is rejected.

use graded_kms::gns::{
    conjugate_representation, conjugate_representation_with, intertwiner, modular_conjugation,
    phase_rebased_conjugation, GradedGns,
};
use graded_kms::{Error, GradedAlgebra, ModularFlow, Result, SampleRng};

pub fn run_example() -> Result<()> {
    let alg = GradedAlgebra::new(2, 1)?;
    let mut rng = SampleRng::new(12);
    let rho = rng.even_density(&alg);
    let gg = GradedGns::build(&alg, &alg.supertrace_functional(&rho)?)?;
    let flow = ModularFlow::graded(&alg, &rho)?;
    let gns = &gg.space;
    let j = modular_conjugation(gns, &flow)?;

    let first = conjugate_representation(gns, &gg.jordan, &j)?.graded_representation(gns);
    let k = phase_rebased_conjugation(gns.dim(), &mut rng);
    let second = conjugate_representation_with(gns, &gg.jordan, &j, &k)?.graded_representation(gns);

    let v = intertwiner(&first, &second)?;
    println!(
        "V unitary {:.1e}, intertwines {:.1e}, grading {:.1e}, vacuum {:.1e}",
        v.unitarity, v.intertwining, v.grading, v.vacuum
    );
    println!("V equals the phase matrix of K': {:.1e}", (&v.v - &k.matrix).norm());

    let mut flipped = second.clone();
    flipped.gamma = -flipped.gamma;
    match intertwiner(&first, &flipped) {
        Err(Error::HypothesisViolation(gap)) => println!("flipped grading rejected (gap {gap:.3})"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
