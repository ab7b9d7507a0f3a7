//! I(k) ⇒ bound states, Jost function, S-matrix and spectral function.

use num_complex::Complex64;
use weyl_inverse::forward::SquareWell;
use weyl_inverse::i_to_data::{detect_poles, f_from_i, scattering_from_i, spectral_from_i};
use weyl_inverse::model::{Grid, SampledComplexFunction, Symmetry};

fn main() -> weyl_inverse::Result<()> {
    let well = SquareWell::new(4.0, 2.0);
    let grid = Grid::default_momentum();
    let i = SampledComplexFunction::from_fn(&grid, Symmetry::Hermitian, |k| {
        well.jost(Complex64::new(k, 0.0)).i_function
    })?;

    let poles = detect_poles(&i)?;
    println!("poles at κ = {:?}, residues {:?}", poles.kappas, poles.residues);
    println!(
        "exponential fit misfit {:.2e}, f(0) = 0: {}",
        poles.fit_residual, poles.zero_at_origin
    );

    let f = f_from_i(&i, &poles)?;
    let err = f
        .points()
        .iter()
        .zip(f.values())
        .map(|(&k, v)| (v - well.jost(Complex64::new(k, 0.0)).f).norm())
        .fold(0.0, f64::max);
    println!("max |f − f_exact| = {err:.2e}");

    let triple = scattering_from_i(&i, &poles)?;
    let s_exact = SampledComplexFunction::from_fn(&grid, Symmetry::Hermitian, |k| {
        let f = well.jost(Complex64::new(k, 0.0)).f;
        f.conj() / f
    })?;
    println!(
        "sup |S − S_exact| = {:.2e}",
        triple.s_matrix().sup_diff(&s_exact, 0.0, f64::INFINITY)
    );
    println!("norming constants s_j = {:?}", triple.bound().s().unwrap_or(&[]));

    let rho = spectral_from_i(&i, &poles)?;
    println!("spectral atoms {:?}", rho.atoms());
    Ok(())
}
