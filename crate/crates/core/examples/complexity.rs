//! Operation counts per stage and feedback volumes for the three schemes.

use wmmse_ic::complexity::{complexity_curves, feedback_amounts, flops, ComplexityParams, Method};

fn main() -> wmmse_ic::Result<()> {
    let params = ComplexityParams::with_default_iterations(4, 5, 5, 2);
    for method in Method::ALL {
        let report = flops(&params, method)?;
        println!("{} ({:.3e} flops)", method.label(), report.total);
        for (stage, value) in &report.stages {
            println!("  {stage:6} {value:12.0}");
        }
    }

    let fb = feedback_amounts(&params)?;
    for method in Method::ALL {
        let f = fb.for_method(method);
        println!("{:14} csi {:5} coefficients {:5} total {:5}", method.label(), f.csi, f.coefficients, f.total());
    }

    println!("\nK  gradient  sum-power  per-node   (total feedback)");
    let rows = complexity_curves(&params, 1..=10)?;
    for k in 1..=10 {
        let get = |m| rows.iter().find(|r| r.k == k && r.method == m).map_or(0.0, |r| r.total_feedback);
        println!(
            "{k:<2} {:9} {:10} {:9}",
            get(Method::Gradient),
            get(Method::ProposedSum),
            get(Method::ProposedInd)
        );
    }
    Ok(())
}
