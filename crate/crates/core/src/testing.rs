//! Closed-form square-well data shared by unit tests.

use num_complex::Complex64;

use crate::forward::square_well::SquareWell;
use crate::model::{
    BoundStateSet, Grid, GridKind, SampledComplexFunction, ScatteringTriple, SpectralAtom, SpectralMeasure, Symmetry,
};

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub(crate) fn grid() -> Grid {
    Grid::default_momentum()
}

pub(crate) fn oracle_f(well: &SquareWell) -> SampledComplexFunction {
    SampledComplexFunction::from_fn(&grid(), Symmetry::Hermitian, |k| well.jost(c(k)).f).unwrap()
}

/// (κ_j, s_j, c_j) from the closed form; c = s·f'(0, iκ)².
pub(crate) fn oracle_bound(well: &SquareWell) -> Vec<(f64, f64, f64)> {
    well.bound_states()
        .into_iter()
        .map(|kappa| {
            let s = 1.0 / well.jost_norm_squared(kappa);
            let fp = well.jost(Complex64::new(0.0, kappa)).fprime0.re;
            (kappa, s, s * fp * fp)
        })
        .collect()
}

pub(crate) fn oracle_triple(well: &SquareWell) -> ScatteringTriple {
    let f = oracle_f(well);
    let s = f.map(Symmetry::Hermitian, |_, v| v.conj() / v).unwrap();
    let b = oracle_bound(well);
    let mut set = BoundStateSet::new(b.iter().map(|x| x.0).collect()).unwrap();
    if !b.is_empty() {
        set = set.with_s(b.iter().map(|x| x.1).collect()).unwrap();
    }
    ScatteringTriple::new(s, set).unwrap()
}

pub(crate) fn oracle_measure(well: &SquareWell) -> SpectralMeasure {
    let g = grid();
    let lam = Grid::new(GridKind::Spectral, g.points().iter().map(|k| k * k).collect()).unwrap();
    let density = g
        .points()
        .iter()
        .map(|&k| k / (std::f64::consts::PI * well.jost(c(k)).f.norm_sqr()))
        .collect();
    let atoms = oracle_bound(well)
        .iter()
        .map(|&(kappa, _, cj)| SpectralAtom {
            lambda: -kappa * kappa,
            mass: cj,
        })
        .collect();
    SpectralMeasure::new(lam, density, atoms, false).unwrap()
}
