//! Correlations reachable by classical d-level strategies, with separating
//! witnesses for the ones that are not.

use channelscope::polytope::{fw_vertices, hull_membership, Membership};
use channelscope::Correlation;

fn main() -> channelscope::Result<()> {
    for (m, n, d) in [(2, 2, 2), (3, 3, 2), (4, 4, 3)] {
        println!("m={m} n={n} d={d}: {} deterministic strategies", fw_vertices(m, n, d)?.len());
    }

    let perfect = Correlation::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]])?;
    let blurred = Correlation::new(vec![vec![0.5, 0.5, 0.0], vec![0.0, 0.5, 0.5], vec![0.5, 0.0, 0.5]])?;
    let bit = fw_vertices(3, 3, 2)?;
    for (name, p) in [("perfect trit", &perfect), ("blurred trit", &blurred)] {
        match hull_membership(&bit, p)? {
            Membership::Inside { weights } => {
                let used = weights.iter().filter(|&&w| w > 1e-12).count();
                println!("{name}: reachable with one bit, mixing {used} strategies");
            }
            Membership::Outside { witness, violation } => {
                println!("{name}: needs more than one bit, violation {violation:.4}");
                for row in witness {
                    println!("  {row:?}");
                }
            }
        }
    }
    Ok(())
}
