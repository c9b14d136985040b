//! Outlines of compatible regions as CSV and SVG files.

use channelscope::channels::ChannelSpec;
use channelscope::geometry::{boundary_csv, boundary_svg, max_abs_y, region_boundary};

fn main() -> channelscope::Result<()> {
    let dir = std::env::args().nth(1).map(std::path::PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let shapes = [
        ("erasure", ChannelSpec::erasure(3, 0.5)?),
        ("cloning", ChannelSpec::cloning(2)?),
        ("transposition", ChannelSpec::transposition(4)?),
        ("depolarizing", ChannelSpec::depolarizing(3, 0.5)?),
        ("amp_damp", ChannelSpec::amp_damp(0.36)?),
    ];
    for (name, spec) in &shapes {
        let lines = region_boundary(spec, 400)?;
        std::fs::write(dir.join(format!("{name}.csv")), boundary_csv(&lines))?;
        std::fs::write(dir.join(format!("{name}.svg")), boundary_svg(&lines))?;
        println!("{name:<14} {} points, max |y| = {:.4}", lines[0].len(), max_abs_y(&lines));
    }
    println!("files in {}", dir.display());
    Ok(())
}
