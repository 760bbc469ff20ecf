// Gaussian smoothing `a_{σ,z}`: closed form against quadrature, the shift
// property, and the `σ → 0` limit.

use graded_kms::flow::QUADRATURE_NODES;
use graded_kms::linalg::{c, diag_real, rel_diff, unit};
use graded_kms::{GradedAlgebra, ModularFlow, Result};

pub fn run_example() -> Result<()> {
    let alg = GradedAlgebra::new(1, 1)?;
    let flow = ModularFlow::graded(&alg, &diag_real(&[0.75, 0.25]))?;
    let a = unit(2, 0, 1) + unit(2, 1, 0);
    let z = c(0.4, 0.3);

    for sigma in [1.0, 0.5, 0.1] {
        let closed = flow.smooth(&a, sigma, z)?;
        let quad = flow.smooth_quadrature(&a, sigma, z, QUADRATURE_NODES)?;
        println!("sigma {sigma}: closed vs quadrature {:.1e}", rel_diff(&closed, &quad));
    }

    let w = c(-1.0, 0.2);
    let shifted = flow.evolve(&flow.smooth(&a, 0.5, z)?, w)?;
    println!("alpha_w(a_z) vs a_(w+z): {:.1e}", rel_diff(&shifted, &flow.smooth(&a, 0.5, z + w)?));

    for sigma in [1e-1, 1e-2, 1e-3] {
        let d = (flow.smooth(&a, sigma, c(0.0, 0.0))? - &a).norm();
        println!("sigma {sigma:e}: |a_sigma - a| = {d:.2e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
