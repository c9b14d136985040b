//! Is an observed 2×2 correlation achievable through a given channel?

use channelscope::channels::ChannelSpec;
use channelscope::compat::check;
use channelscope::Correlation;

fn main() -> channelscope::Result<()> {
    // rows are inputs: p(1|1), p(2|1) then p(1|2), p(2|2)
    let observed = Correlation::binary(0.8, 0.2, 0.25, 0.75)?;
    let (x, y) = observed.xy();
    println!("observed point (x, y) = ({x:.3}, {y:.3})");

    let channels = [
        ("pauli 0.7/0.1/0.1/0.1", ChannelSpec::pauli([0.7, 0.1, 0.1, 0.1])?),
        ("amplitude damping 0.36", ChannelSpec::amp_damp(0.36)?),
        ("erasure d=2 λ=0.5", ChannelSpec::erasure(2, 0.5)?),
        ("universal cloner d=2", ChannelSpec::cloning(2)?),
        ("transposition d=3", ChannelSpec::transposition(3)?),
    ];
    for (name, spec) in &channels {
        let v = check(spec, &observed)?;
        let w = v.worst_witness.expect("binary correlations report a witness");
        println!(
            "{name:<24} {:<12} margin {:+.6}  worst witness w{}({:+.4})",
            if v.compatible { "compatible" } else { "incompatible" },
            v.margin,
            w.sign.symbol(),
            w.omega
        );
    }
    Ok(())
}
