//! The dilation fiber t ↦ I(u_t) of a Gaussian bump: one sign change of
//! P(u_t), at the maximiser t_u.

use pohozaev::manifold::{fiber_profile, lambda_membership, project_to_m};
use pohozaev::model::log_space;
use pohozaev::{make_grid, FunctionalContext, NonlinearitySpec, PotentialSpec, RadialFunction};

fn main() -> pohozaev::Result<()> {
    let ctx = FunctionalContext::new(
        make_grid(3, 30.0, 2048)?,
        PotentialSpec::algebraic_well(1.0, 0.2, 2.0)?,
        NonlinearitySpec::power(4.0)?,
    );
    let u = RadialFunction::from_fn(ctx.grid().clone(), |r| 4.0 * (-r * r / 4.0).exp());
    let (member, q) = lambda_membership(&ctx, &u)?;
    println!("u in Lambda: {member} (q = {q:.4e})");

    let p = project_to_m(&ctx, &u)?;
    println!(
        "t_u = {:.10}, I(u_t) = {:.10}, |P| = {:.2e}",
        p.t_u, p.energy, p.residual
    );

    println!("\n{:>10} {:>14} {:>14}", "t", "I(u_t)", "P(u_t)");
    for pt in fiber_profile(&ctx, &u, &log_space(0.05, 2.0, 13))? {
        println!("{:>10.4} {:>14.6} {:>14.6}", pt.t, pt.zeta, pt.pohozaev);
    }
    Ok(())
}
