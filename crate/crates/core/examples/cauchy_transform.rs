//! Cauchy integral of h(s) = 1/(s² + 1) off and on the real axis.
//! Closed form: C(z) = i/(2(z + i)) for Im z > 0.

use num_complex::Complex64;
use weyl_inverse::cauchy::{cauchy_integral, plemelj_on_grid, TailModel};
use weyl_inverse::model::{Grid, GridKind, SampledComplexFunction, Symmetry};

fn main() -> weyl_inverse::Result<()> {
    let grid = Grid::uniform(GridKind::Momentum, 0.025, 60.0, 2400)?;
    let h = SampledComplexFunction::from_fn(&grid, Symmetry::Hermitian, |s| Complex64::new(1.0 / (s * s + 1.0), 0.0))?;
    let exact = |z: Complex64| Complex64::i() / (2.0 * (z + Complex64::i()));

    for tail in [TailModel::None, TailModel::InverseSquare(1.0), TailModel::Fitted] {
        let z = Complex64::new(1.5, 0.7);
        let c = cauchy_integral(&h, z, tail)?;
        println!("{tail:?}: C({z}) = {c:.8}, error {:.2e}", (c - exact(z)).norm());
    }

    let boundary = plemelj_on_grid(&h, TailModel::Fitted)?;
    let err = grid
        .points()
        .iter()
        .zip(&boundary)
        .map(|(&k, c)| (c - exact(Complex64::new(k, 0.0))).norm())
        .fold(0.0, f64::max);
    println!("boundary values C(k + i0): max error {err:.2e}");
    Ok(())
}
