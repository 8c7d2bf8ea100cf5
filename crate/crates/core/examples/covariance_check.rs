//! Which channels are covariant under the qubit Weyl group.

use chancap::channels::{check_generalized_covariance, weyl_group, KrausChannel};
use chancap::densemath::ComplexMatrix;

fn main() -> chancap::Result<()> {
    let group = weyl_group(2);
    let g: f64 = 0.3;
    let amplitude_damping = KrausChannel::new(
        2,
        2,
        vec![
            ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - g).sqrt()])?,
            ComplexMatrix::from_real(2, 2, &[0.0, g.sqrt(), 0.0, 0.0])?,
        ],
    )?;
    let channels = [
        ("depolarizing 0.3", KrausChannel::depolarizing(2, 0.3)?),
        ("erasure 0.25", KrausChannel::erasure(2, 0.25)?),
        ("dephasing 0.5", KrausChannel::dephasing(0.5)?),
        ("amplitude damping 0.3", amplitude_damping),
    ];
    for (name, ch) in &channels {
        let report = check_generalized_covariance(ch, &group);
        println!("{name:<22} covariant={} residual={:.2e}", report.covariant, report.worst_residual);
    }
    Ok(())
}
