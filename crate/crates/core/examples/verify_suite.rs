//! Full verification suite on the well, with a computed ground state, and the
//! same suite with θ forced to 0 to show a failing check and its witness.

use pohozaev::solver::{solve_fiber_descent, SolveOptions};
use pohozaev::verify::run_suite;
use pohozaev::{make_grid, FunctionalContext, NonlinearitySpec, PotentialSpec};

fn main() -> pohozaev::Result<()> {
    let ctx = FunctionalContext::new(
        make_grid(3, 30.0, 1024)?,
        PotentialSpec::algebraic_well(1.0, 0.2, 2.0)?,
        NonlinearitySpec::power(4.0)?,
    );
    let sol = solve_fiber_descent(&ctx, &SolveOptions::default())?;
    let rep = run_suite(&ctx, Some(&sol), 42)?;
    for c in &rep.checks {
        println!(
            "{:<18} {:<5} worst margin {:>11.3e}  ({} samples)",
            c.name, c.pass, c.worst_margin, c.samples
        );
    }
    println!(
        "overall {}; gamma1 = {:.4}, gamma2 = {:.4}, rho = {:.4}",
        rep.pass, rep.gamma1_hat, rep.gamma2_hat, rep.rho_hat
    );

    let broken = run_suite(&ctx.clone().with_theta(0.0)?, None, 42)?;
    if let Some(c) = broken.check("iip") {
        println!(
            "\ntheta = 0: iip pass = {}, witness {:?}",
            c.pass, c.witness
        );
    }
    Ok(())
}
