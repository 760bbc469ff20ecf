// The modular conjugation `J`, the modular operator `Δ`, and the commutant
// property `Jπ(𝒜)J ⊂ π(𝒜)′`.

use graded_kms::gns::{
    commutant_check, conjugation_residuals, double_commutant, modular_conjugation, modular_operator,
    GradedGns,
};
use graded_kms::linalg::{diag_real, matrix_units, unit};
use graded_kms::{GradedAlgebra, ModularFlow, Result};

pub fn run_example() -> Result<()> {
    let alg = GradedAlgebra::new(1, 1)?;
    let rho = diag_real(&[0.75, 0.25]);
    let gg = GradedGns::build(&alg, &alg.supertrace_functional(&rho)?)?;
    let flow = ModularFlow::graded(&alg, &rho)?;
    let gns = &gg.space;

    let j = modular_conjugation(gns, &flow)?;
    let image = j.apply(&gns.eta(&unit(2, 0, 1)));
    let target = gns.eta(&unit(2, 1, 0)) / graded_kms::linalg::re(3f64.sqrt());
    println!("J eta(E12) - eta(E21)/sqrt3 = {:.1e}", (image - target).norm());

    let res = conjugation_residuals(&gg, &j);
    println!(
        "antiunitary {:.1e}, J^2 = 1 {:.1e}, odd swap {:.1e}, even fixed {:.1e}",
        res.antiunitarity, res.involution, res.odd_swap, res.even_fixed
    );

    let units = matrix_units(2);
    let comm = commutant_check(gns, &j, &units)?;
    println!("max |[J pi(a) J, pi(b)]| = {:.1e}", comm.commutator);
    println!("distance from the commutant {:.1e}", comm.membership.unwrap_or(f64::NAN));
    if let Some((dim, dist)) = double_commutant(gns)? {
        println!("double commutant: dim {dim}, distance of pi(E_ij) {dist:.1e}");
    }

    let op = modular_operator(gns, &flow, &j)?;
    let v = gns.eta(&unit(2, 0, 1));
    println!("Delta eta(E12) = {:.3} eta(E12)", (&op.delta * &v).dotc(&v).re / v.norm_squared());
    println!("residuals {:?}", op.residuals(gns, &flow, &units, &[0.5])?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
