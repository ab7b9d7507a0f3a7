//! Forward map for the square well q = −4 on [0, 2]: Jost data, I(k),
//! bound states and norming constants, compared with the closed form.

use num_complex::Complex64;
use weyl_inverse::forward::{i_function, jost_boundary, s_matrix, spectral_density, SquareWell};
use weyl_inverse::model::Grid;

fn main() -> weyl_inverse::Result<()> {
    let well = SquareWell::new(4.0, 2.0);
    let q = well.potential(11);
    let grid = Grid::default_momentum();

    let jb = jost_boundary(&q, &grid)?;
    let i = i_function(&jb)?;
    let worst = i
        .points()
        .iter()
        .zip(i.values())
        .map(|(&k, v)| (v - well.jost(Complex64::new(k, 0.0)).i_function).norm() / (1.0 + k))
        .fold(0.0, f64::max);
    println!("max |I − I_exact|/(1 + k) over {} points: {worst:.2e}", grid.len());
    println!("Wronskian residual: {:.2e}", jb.wronskian_residual()?);

    let bound = &jb.bound;
    println!(
        "bound states: {:?} (closed form {:?})",
        bound.kappas(),
        well.bound_states()
    );
    println!("s_j = ‖f(·,iκ_j)‖⁻²: {:?}", bound.s().unwrap_or(&[]));
    println!("c_j = ‖φ(·,iκ_j)‖⁻²: {:?}", bound.c().unwrap_or(&[]));

    let triple = s_matrix(&jb)?;
    println!("|S(K) − 1| = {:.2e}", triple.tail_deviation());
    let rho = spectral_density(&jb)?;
    println!("spectral atoms: {:?}", rho.atoms());
    Ok(())
}
