//! A qubit channel given by its Bloch-ball action: canonical form and the
//! finite set of witness weights that decides membership.

use channelscope::channels::{canonicalize_d2, to_affine, ChannelSpec};
use channelscope::compat::check;
use channelscope::witness::critical_omegas;
use channelscope::Correlation;

fn main() -> channelscope::Result<()> {
    // squeeze the ball, rotate it about z and shift it along z
    let spec = ChannelSpec::custom_affine([[0.0, -0.6, 0.0], [0.6, 0.0, 0.0], [0.0, 0.0, 0.3]], [0.0, 0.0, 0.5])?;
    let can = canonicalize_d2(&to_affine(&spec)?);
    println!(
        "singular values ({:.3}, {:.3}, {:.3}), displacement {:.3}, dihedral symmetry: {}",
        can.d1, can.d2, can.d3, can.c3, can.is_d2_covariant
    );

    for (x, y) in [(0.0, 0.55), (0.3, 0.5), (0.6, 0.2), (0.2, 0.62)] {
        let p = Correlation::from_xy(x, y)?;
        let omegas = critical_omegas(&can, &p)?;
        let v = check(&spec, &p)?;
        println!(
            "({x:.2}, {y:.2}) {:<12} margin {:+.5} after testing {} weights",
            if v.compatible { "compatible" } else { "incompatible" },
            v.margin,
            omegas.len()
        );
    }
    Ok(())
}
