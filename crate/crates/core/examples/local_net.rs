// A graded spin chain as a net of local algebras: restrictions, the
// region-wise modulus discrepancy, region projections, and the modulus-KMS
// suite on local elements.

use graded_kms::gns::GradedGns;
use graded_kms::net::{local_gns_structure, local_modulus_probe, proposition4_suite, LocalNet};
use graded_kms::{GradedAlgebra, Result};

pub fn run_example() -> Result<()> {
    let site = GradedAlgebra::from_signs(&[1, -1])?;
    let sites = vec![site.clone(), site.clone(), site];
    for entangled in [false, true] {
        let net = LocalNet::random(&sites, entangled, 5)?;
        println!("{} chain, dim {}", if entangled { "entangled" } else { "product" }, net.dim());
        for k in 1..=net.sites() {
            println!("  region {k}: restriction residual {:.1e}", net.restriction_residual(k)?);
        }
        for d in local_modulus_probe(&net)? {
            println!(
                "  d({}, {}) = {:.6} (kernel-normalized {:.6})",
                d.k, d.k_outer, d.d, d.d_kernel_normalized
            );
        }
        let gg = GradedGns::build(net.algebra(), net.omega())?;
        for r in local_gns_structure(&net, &gg)? {
            println!(
                "  H(O_{}) dim {}: containment {:.1e}, agreement {:.1e}, projection defect {:.1e}, monotonicity margin {:.2e}",
                r.k, r.dim, r.containment, r.agreement, r.projection_defect, r.monotonicity_margin
            );
        }
        let suite = proposition4_suite(&net, &gg, 12, 1)?;
        println!(
            "  modulus KMS {:.1e}, identities {:.1e}, swap {:.1e}, growth N = {}",
            suite.modulus_kms, suite.identities, suite.kernel_swap, suite.growth_exponent
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
