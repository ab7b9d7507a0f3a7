//! Gelfand–Levitan route: spectral function ⇒ K(x, y) ⇒ q.

use weyl_inverse::forward::{jost_boundary, spectral_density, SquareWell};
use weyl_inverse::model::{Grid, GridKind};
use weyl_inverse::reconstruction::reconstruct_gl;

fn main() -> weyl_inverse::Result<()> {
    let well = SquareWell::new(4.0, 2.0);
    let rho = spectral_density(&jost_boundary(&well.potential(11), &Grid::default_momentum())?)?;
    let x = Grid::uniform(GridKind::Position, 0.0, 4.0, 161)?;

    let r = reconstruct_gl(&rho, &x, false)?;
    let rep = &r.kernel.report;
    println!(
        "residual {:.2e}, condition {:.2e}, K(X, X) = {:.4}",
        rep.residual, rep.condition, rep.corner
    );
    println!("jumps at {:?}", r.discontinuities);
    for (xv, qv) in x.points().iter().zip(r.potential.values()).step_by(20) {
        println!("x = {xv:4.2}  q = {qv:8.4}  exact {:5.1}", well.q(*xv));
    }
    Ok(())
}
