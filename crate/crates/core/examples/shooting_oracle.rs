//! Radial shooting for `u″ + (2/r)u′ − u + u³ = 0`: bisection on u(0)
//! between overshoot and undershoot, with the λ-scaling law as a check.

use pohozaev::make_grid;
use pohozaev::model::NonlinearitySpec;
use pohozaev::solver::shoot_oracle;

fn main() -> pohozaev::Result<()> {
    let grid = make_grid(3, 30.0, 4096)?;
    let f = NonlinearitySpec::power(4.0)?;
    let one = shoot_oracle(&grid, 1.0, &f, 1.0)?;
    println!("u(0) = {:.12}", one.u_at_zero);
    println!("m    = {:.12}", one.energy);
    println!("|P|/|u|^2 = {:.3e}", one.pohozaev_residual);

    // for f = λu³ the ground state is u₁/√λ and the level m₁/λ
    let half = shoot_oracle(&grid, 1.0, &f, 0.5)?;
    println!(
        "lambda = 1/2: u(0)·sqrt(1/2) = {:.12}, m·(1/2) = {:.12}",
        half.u_at_zero * 0.5f64.sqrt(),
        half.energy * 0.5
    );
    Ok(())
}
