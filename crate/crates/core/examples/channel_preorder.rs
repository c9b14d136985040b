//! Which channels can simulate the correlations of which others.

use channelscope::channels::ChannelSpec;
use channelscope::compat::{inclusion_counterexample, region_inclusion};

fn main() -> channelscope::Result<()> {
    let named = [
        ("erasure 0.5", ChannelSpec::erasure(2, 0.5)?),
        ("amp damp 0.3", ChannelSpec::amp_damp(0.3)?),
        ("amp damp 0.5", ChannelSpec::amp_damp(0.5)?),
        ("depolarizing 0.5", ChannelSpec::depolarizing(2, 0.5)?),
    ];
    for (a, sa) in &named {
        for (b, sb) in &named {
            if a == b {
                continue;
            }
            if region_inclusion(sa, sb, 201)? {
                println!("{a} covers {b}");
            } else if let Some((x, y)) = inclusion_counterexample(sa, sb, 201)? {
                println!("{a} misses {b} at ({x:.3}, {y:.3})");
            }
        }
    }
    Ok(())
}
