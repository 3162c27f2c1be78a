//! Sampled hypotheses for the well `V = 1 − b/(1+r²)`: θ_min of the decay
//! condition tracks 4b and crosses 1 at b = 1/4.

use pohozaev::model::{
    check_f, check_v1_v2, check_v3, default_radii, estimate_theta_v4, resolve_theta, Lattice,
    NonlinearitySpec, PotentialSpec,
};

fn main() -> pohozaev::Result<()> {
    let radii = default_radii(30.0);
    println!("{:>6} {:>10} {:>6}", "b", "theta_min", "V4");
    for b in [0.1, 0.2, 0.24, 0.26, 0.3] {
        let v = PotentialSpec::algebraic_well(1.0, b, 2.0)?;
        let rep = estimate_theta_v4(&v, 3, &radii);
        println!(
            "{b:>6} {:>10.6} {:>6}",
            rep.estimate.unwrap_or(f64::NAN),
            rep.pass
        );
    }

    let v = PotentialSpec::algebraic_well(1.0, 0.2, 2.0)?;
    let theta = resolve_theta(&v, 3, 30.0);
    println!("\nb = 0.2, resolved theta = {theta:.6}");
    for rep in [
        check_v1_v2(&v, &radii),
        check_v3(&v, 3, theta, &Lattice::standard(30.0)),
    ]
    .into_iter()
    .chain(check_f(&NonlinearitySpec::power(4.0)?, 3, 1.0))
    {
        println!(
            "  {:<24} pass = {:<5} margin = {:.3e}",
            rep.condition, rep.pass, rep.margin
        );
    }
    Ok(())
}
