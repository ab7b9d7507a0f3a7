//! Scattering data or the spectral function ⇒ I(k), with the high-k
//! estimate of A(0,0) = −½∫q.

use weyl_inverse::data_to_i::{a00_limit, i_from_scattering, i_from_spectral};
use weyl_inverse::forward::{i_function, jost_boundary, s_matrix, spectral_density, SquareWell};
use weyl_inverse::model::Grid;

fn main() -> weyl_inverse::Result<()> {
    let well = SquareWell::new(4.0, 2.0);
    let jb = jost_boundary(&well.potential(11), &Grid::default_momentum())?;
    let i = i_function(&jb)?;

    let from_s = i_from_scattering(&s_matrix(&jb)?)?;
    println!(
        "from S: max |I − I_forward|/(1 + k) = {:.2e}",
        scaled(&from_s.i_function, &i)
    );
    println!("  diagnostics {:?}", from_s.diagnostics);

    let from_rho = i_from_spectral(&spectral_density(&jb)?)?;
    println!(
        "from ρ: max |I − I_forward|/(1 + k) = {:.2e}",
        scaled(&from_rho.i_function, &i)
    );

    println!(
        "A(0,0) from the Jost tail: {:.5} (exact {})",
        a00_limit(&from_s.jost)?,
        well.a00()
    );
    Ok(())
}

fn scaled(a: &weyl_inverse::model::SampledComplexFunction, b: &weyl_inverse::model::SampledComplexFunction) -> f64 {
    a.points()
        .iter()
        .zip(a.values().iter().zip(b.values()))
        .map(|(&k, (x, y))| (x - y).norm() / (1.0 + k))
        .fold(0.0, f64::max)
}
