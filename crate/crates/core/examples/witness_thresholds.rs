//! Best achievable witness scores and the encodings that reach them.

use channelscope::channels::{canonicalize_d2, spectral_pairs, to_affine, ChannelSpec};
use channelscope::witness::{covariant_threshold, qubit_threshold, Strategy, Witness};

fn main() -> channelscope::Result<()> {
    let amp = ChannelSpec::amp_damp(0.5)?;
    let can = canonicalize_d2(&to_affine(&amp)?);
    println!("amplitude damping 0.5, canonical form d = {:?}, c3 = {:.3}", can.singular_values(), can.c3);
    for omega in [-1.0, -0.5, 0.0, 0.25, 0.5, 1.0] {
        let t = qubit_threshold(&can, &Witness::plus(omega))?;
        match (t.strategy, t.optimal_bloch) {
            (Strategy::Helstrom, Some(b)) => println!(
                "  w+({omega:+.2}) threshold {:.6}, send Bloch vectors ±({:.3}, {:.3}, {:.3})",
                t.value, b[0], b[1], b[2]
            ),
            _ => println!("  w+({omega:+.2}) threshold {:.6}, guessing is optimal", t.value),
        }
    }

    let cloner = ChannelSpec::cloning(3)?;
    let pairs = spectral_pairs(&cloner)?;
    println!("universal cloner d=3, spectral pairs {:?}", pairs.sorted());
    for omega in [0.0, 0.5, 0.9] {
        let t = covariant_threshold(&pairs, &Witness::minus(omega));
        println!("  w-({omega:+.2}) threshold {:.6} with any orthonormal pair", t.value);
    }
    Ok(())
}
