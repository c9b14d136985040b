//! Numerical sampling of achievable correlations, checked against the exact region.

use channelscope::channels::ChannelSpec;
use channelscope::compat::check_closed_form;
use channelscope::oracle::{sample_correlations, SampleMode};
use channelscope::Correlation;

fn main() -> channelscope::Result<()> {
    let spec = ChannelSpec::depolarizing(3, 0.5)?;
    let random = sample_correlations(&spec, 20_000, 1, SampleMode::Random)?;
    let worst = random
        .points
        .iter()
        .map(|&(x, y)| check_closed_form(&spec, &Correlation::from_xy(x, y).unwrap()).unwrap().margin)
        .fold(f64::NEG_INFINITY, f64::max);
    println!("{} random strategies, largest margin {worst:+.3e} (never positive)", random.points.len());

    let edge = sample_correlations(&spec, 800, 1, SampleMode::Boundary)?;
    println!(
        "boundary sweep: max |y| = {:.6} (band 0.5), max |y|/(1-|x|) = {:.6}",
        edge.max_abs_y(),
        edge.max_wedge_ratio()
    );
    let path = std::env::temp_dir().join("depolarizing_cloud.csv");
    edge.write_csv(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}
