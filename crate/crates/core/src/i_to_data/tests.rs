use super::*;
use crate::forward::square_well::SquareWell;
use approx::assert_abs_diff_eq;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn well_i(well: &SquareWell) -> SampledComplexFunction {
    SampledComplexFunction::from_fn(&Grid::default_momentum(), Symmetry::Hermitian, |k| {
        well.jost(c(k)).i_function
    })
    .unwrap()
}

fn free_i() -> SampledComplexFunction {
    SampledComplexFunction::from_fn(&Grid::default_momentum(), Symmetry::Hermitian, |k| I * k).unwrap()
}

/// Residue of I at iκ from the closed form: f'(0, iκ)/ḟ(iκ).
fn oracle_residue(well: &SquareWell, kappa: f64) -> Complex64 {
    let h = 1e-5;
    let fd =
        (well.jost(Complex64::new(0.0, kappa + h)).f - well.jost(Complex64::new(0.0, kappa - h)).f) / (I * 2.0 * h);
    well.jost(Complex64::new(0.0, kappa)).fprime0 / fd
}

fn max_rel(f: &SampledComplexFunction, well: &SquareWell, lo: f64, hi: f64) -> f64 {
    f.grid()
        .range_indices(lo, hi)
        .map(|i| {
            let k = f.points()[i];
            let exact = well.jost(c(k)).f;
            ((f.values()[i] - exact) / exact).norm()
        })
        .fold(0.0, f64::max)
}

#[test]
fn free_case_has_no_poles_and_unit_f() {
    let i = free_i();
    let r = detect_poles(&i).unwrap();
    assert_eq!(r.count, 0);
    assert!(!r.zero_at_origin);
    let f = f_from_i(&i, &r).unwrap();
    assert!(f.values().iter().all(|v| (v - 1.0).norm() < 1e-14));
    assert!(modulus_f_from_i(&i).unwrap().iter().all(|m| (m - 1.0).abs() < 1e-15));
    let s = scattering_from_i(&i, &r).unwrap();
    assert!(s.bound().is_empty());
    assert!(s.s_matrix().values().iter().all(|v| (v - 1.0).norm() < 1e-14));
    let rho = spectral_from_i(&i, &r).unwrap();
    for (l, d) in rho.grid().points().iter().zip(rho.density()) {
        assert_abs_diff_eq!(*d, l.sqrt() / std::f64::consts::PI, epsilon = 1e-14);
    }
    assert!(rho.atoms().is_empty());
}

#[test]
fn deep_well_has_one_pole() {
    let well = SquareWell::new(4.0, 2.0);
    let r = detect_poles(&well_i(&well)).unwrap();
    assert_eq!(r.count, 1, "{r:?}");
    assert!(!r.zero_at_origin);
    let kappa = well.bound_states()[0];
    assert_abs_diff_eq!(r.kappas[0], kappa, epsilon = 1e-3);
    assert_abs_diff_eq!(r.kappas[0], 1.5712, epsilon = 1e-3);
    let res = oracle_residue(&well, kappa);
    assert!(res.re.abs() < 1e-8 && res.im > 0.0);
    assert_eq!(r.residues[0].re, 0.0);
    assert!(
        (r.residues[0].im / res.im - 1.0).abs() < 1e-3,
        "{} vs {}",
        r.residues[0],
        res
    );
    assert!(r.fit_residual < 1e-5);
}

#[test]
fn shallow_well_has_no_pole() {
    let r = detect_poles(&well_i(&SquareWell::new(1.0, 1.0))).unwrap();
    assert_eq!(r.count, 0, "{r:?}");
    assert!(!r.zero_at_origin);
}

#[test]
fn jost_function_from_i_matches_oracle() {
    for well in [SquareWell::new(1.0, 1.0), SquareWell::new(4.0, 2.0)] {
        let i = well_i(&well);
        let r = detect_poles(&i).unwrap();
        let f = f_from_i(&i, &r).unwrap();
        let err = max_rel(&f, &well, 0.2, 10.0);
        assert!(err < 1e-3, "{well:?}: {err}");
        // |f|² = k/Im I on the grid
        let n = f.grid().len();
        for ((&k, v), iv) in f.points().iter().zip(f.values()).zip(i.values()).take(n - 1) {
            assert!((v.norm_sqr() * iv.im / k - 1.0).abs() < 1e-6);
        }
    }
}

#[test]
fn modulus_at_one() {
    let well = SquareWell::new(1.0, 1.0);
    let g = Grid::uniform(GridKind::Momentum, 0.5, 1.5, 11).unwrap();
    let i = SampledComplexFunction::from_fn(&g, Symmetry::Hermitian, |k| well.jost(c(k)).i_function).unwrap();
    let m = modulus_f_from_i(&i).unwrap();
    assert_abs_diff_eq!(m[5], 0.71566, epsilon = 1e-5);
    for ((&k, mv), iv) in g.points().iter().zip(&m).zip(i.values()) {
        assert_abs_diff_eq!(mv * mv * iv.im, k, epsilon = 1e-14);
    }
}

#[test]
fn scattering_matches_oracle() {
    let well = SquareWell::new(1.0, 1.0);
    let i = well_i(&well);
    let r = detect_poles(&i).unwrap();
    let s = scattering_from_i(&i, &r).unwrap();
    let mut worst: f64 = 0.0;
    for (&k, v) in s.s_matrix().points().iter().zip(s.s_matrix().values()) {
        let f = well.jost(c(k)).f;
        worst = worst.max((v - f.conj() / f).norm());
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }
    assert!(worst < 1e-3, "{worst}");

    let deep = SquareWell::new(4.0, 2.0);
    let i = well_i(&deep);
    let r = detect_poles(&i).unwrap();
    let s = scattering_from_i(&i, &r).unwrap();
    let kappa = deep.bound_states()[0];
    let s1 = 1.0 / deep.jost_norm_squared(kappa);
    let got = s.bound().s().unwrap()[0];
    assert!((got / s1 - 1.0).abs() < 1e-3, "{got} vs {s1}");
}

#[test]
fn spectral_matches_oracle() {
    let well = SquareWell::new(1.0, 1.0);
    let g = Grid::uniform(GridKind::Momentum, 0.05, 60.0, 2399).unwrap();
    // this grid does not hold k = 1; use the density formula on the oracle directly
    let i = SampledComplexFunction::from_fn(&g, Symmetry::Hermitian, |k| well.jost(c(k)).i_function).unwrap();
    let r = detect_poles(&i).unwrap();
    let rho = spectral_from_i(&i, &r).unwrap();
    let idx = rho.grid().points().partition_point(|&l| l < 1.0);
    let (l0, l1) = (rho.grid().points()[idx - 1], rho.grid().points()[idx]);
    let (d0, d1) = (rho.density()[idx - 1], rho.density()[idx]);
    let at_one = d0 + (d1 - d0) * (1.0 - l0) / (l1 - l0);
    assert_abs_diff_eq!(at_one, 0.62150, epsilon = 1e-3);
    assert_abs_diff_eq!(at_one, 0.62138, epsilon = 1e-3);

    let deep = SquareWell::new(4.0, 2.0);
    let i = well_i(&deep);
    let r = detect_poles(&i).unwrap();
    let rho = spectral_from_i(&i, &r).unwrap();
    let kappa = deep.bound_states()[0];
    // c = s·f'(0, iκ)²
    let fp = deep.jost(Complex64::new(0.0, kappa)).fprime0.re;
    let c1 = fp * fp / deep.jost_norm_squared(kappa);
    assert_eq!(rho.atoms().len(), 1);
    assert!(
        (rho.atoms()[0].mass / c1 - 1.0).abs() < 1e-3,
        "{} vs {c1}",
        rho.atoms()[0].mass
    );
    assert_abs_diff_eq!(rho.atoms()[0].lambda, -kappa * kappa, epsilon = 3e-3);
}

#[test]
fn rejects_invalid_i() {
    let g = Grid::default_momentum();
    let bad = SampledComplexFunction::from_fn(&g, Symmetry::Hermitian, |k| Complex64::new(1.0, -k)).unwrap();
    assert!(matches!(detect_poles(&bad), Err(Error::Invariant { .. })));
    assert!(modulus_f_from_i(&bad).is_err());
}

#[test]
fn synthetic_zero_at_origin() {
    // f(k) = k/(k + i): f(0) = 0, no bound states; I = f'(0,k)/f(k) with the
    // Wronskian fixing Im I = k/|f|² = (k² + 1)/k, and Re I chosen 0
    let g = Grid::default_momentum();
    let i =
        SampledComplexFunction::from_fn(&g, Symmetry::Hermitian, |k| Complex64::new(0.0, (k * k + 1.0) / k)).unwrap();
    let r = detect_poles(&i).unwrap();
    assert!(r.zero_at_origin, "{r:?}");
    assert_eq!(r.count, 0);
    // I − ik = i/k, so I₀ = i
    let i0 = r.origin_residue.unwrap();
    assert_abs_diff_eq!(i0.im, 1.0, epsilon = 1e-3);
}
