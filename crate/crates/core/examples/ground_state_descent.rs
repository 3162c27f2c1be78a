//! Ground state of `−Δu + V u = u³` in ℝ³ for a potential well by descent on
//! the Pohožaev manifold, compared with the autonomous level.

use pohozaev::solver::{solve_fiber_descent, SolveOptions};
use pohozaev::{make_grid, FunctionalContext, NonlinearitySpec, PotentialSpec};

fn main() -> pohozaev::Result<()> {
    let grid = make_grid(3, 30.0, 2048)?;
    let ctx = FunctionalContext::new(
        grid,
        PotentialSpec::algebraic_well(1.0, 0.2, 2.0)?,
        NonlinearitySpec::power(4.0)?,
    );
    let opts = SolveOptions::default();
    let m = solve_fiber_descent(&ctx, &opts)?;
    let m_inf = solve_fiber_descent(&ctx.limit(), &opts)?;
    println!(
        "m     = {:.8} (|P|/|u|^2 = {:.2e}, {} iterations)",
        m.energy, m.pohozaev_residual, m.iterations
    );
    println!("m_inf = {:.8}", m_inf.energy);
    println!(
        "u(0)  = {:.6} vs {:.6} without the well",
        m.u_at_zero, m_inf.u_at_zero
    );
    Ok(())
}
