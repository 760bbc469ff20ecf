// Jordan decomposition of a graded functional and the modulus `|ω|`.

use graded_kms::jordan::{cauchy_schwarz, orthogonality_witness, sakai_links};
use graded_kms::linalg::{matrix_units, rel_diff};
use graded_kms::{jordan_decompose, GradedAlgebra, Result, SampleRng};

pub fn run_example() -> Result<()> {
    let alg = GradedAlgebra::new(2, 2)?;
    let mut rng = SampleRng::new(7);
    let rho = rng.even_density(&alg);
    let omega = alg.supertrace_functional(&rho)?;
    let jd = jordan_decompose(&omega)?;

    println!("||omega|| = {:.6}", omega.norm());
    println!("||omega+|| + ||omega-|| = {:.6}", jd.omega_plus().norm() + jd.omega_minus().norm());
    println!("modulus kernel vs rho: {:.2e}", rel_diff(&jd.rho, &rho));
    println!("g' = g: {:.2e}", (&jd.g_prime - alg.g()).norm());
    println!("largest structural residual {:.2e}", jd.residuals()?.max());

    let units = matrix_units(4);
    let (to_modulus, to_omega) = sakai_links(&omega, &jd, &units)?;
    println!("links |w|(a) = w(ag'): {to_modulus:.1e}, w(a) = |w|(ag'): {to_omega:.1e}");

    let samples: Vec<_> = (0..20).map(|_| rng.gaussian_matrix(4, 4)).collect();
    let cs = cauchy_schwarz(&omega, &samples)?;
    println!(
        "|w(a)|^2 <= ||w|| |w|(a*a): slack {:.3e}, unsquared violations {}",
        cs.squared_min_slack, cs.unsquared_violations
    );

    let witness = orthogonality_witness(&jd, 1e-12)?;
    println!("witness defects {:.1e} {:.1e}", witness.plus_defect, witness.minus_defect);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
