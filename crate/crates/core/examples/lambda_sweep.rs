//! λ-continuation: autonomous levels m_λ^∞ against the mountain-pass path
//! bound c̄_λ along dilations of the λ = 1 ground state. The explicit λ̄ is
//! conservative: the margin stays positive well below it.

use pohozaev::solver::sweep_lambda;
use pohozaev::{make_grid, FunctionalContext, NonlinearitySpec, PotentialSpec};

fn main() -> pohozaev::Result<()> {
    let ctx = FunctionalContext::new(
        make_grid(3, 30.0, 2048)?,
        PotentialSpec::algebraic_well(1.0, 0.2, 2.0)?,
        NonlinearitySpec::power(4.0)?,
    );
    let rep = sweep_lambda(&ctx, &[0.75, 0.8, 0.85, 0.9, 0.95, 1.0], 1e3)?;
    println!(
        "lambda_bar = {:.6}, T = {}, zeta0 = {}, ball radius = {:.3}",
        rep.lambda_bar, rep.t, rep.zeta0, rep.r_bar
    );
    println!(
        "{:>7} {:>14} {:>14} {:>10}",
        "lambda", "m_inf", "c_bar", "margin"
    );
    for r in &rep.limit_levels {
        let mark = if r.lambda > rep.lambda_bar {
            ""
        } else {
            "  (below lambda_bar)"
        };
        println!(
            "{:>7} {:>14.8} {:>14.8} {:>10.4}{mark}",
            r.lambda, r.m_inf, r.c_bar, r.margin
        );
    }
    Ok(())
}
