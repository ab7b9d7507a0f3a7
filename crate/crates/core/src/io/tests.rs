use super::*;
use proptest::prelude::*;

fn momentum(points: Vec<f64>) -> Grid {
    Grid::new(GridKind::Momentum, points).unwrap()
}

fn increasing(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3..10.0_f64, n).prop_map(|steps| {
        let mut acc = 0.0;
        steps
            .into_iter()
            .map(|s| {
                acc += s;
                acc
            })
            .collect()
    })
}

fn round_trip(ds: &Dataset) -> Dataset {
    dataset_from_json(&dataset_to_json(ds).unwrap()).unwrap()
}

proptest! {
    #[test]
    fn potential_round_trip(x in increasing(6), q in prop::collection::vec(-1e3..1e3_f64, 6)) {
        let grid = Grid::new(GridKind::Position, x).unwrap();
        let end = grid.last();
        let ds = Dataset::new(Data::Potential(Potential::new(grid, q, end).unwrap())).with_meta("note", "well");
        prop_assert_eq!(round_trip(&ds), ds);
    }

    #[test]
    fn ifunction_round_trip(k in increasing(5), re in prop::collection::vec(-1e6..1e6_f64, 5), im in prop::collection::vec(-1e-9..1e9_f64, 5)) {
        let values = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let f = SampledComplexFunction::new(momentum(k), values, Symmetry::Hermitian).unwrap();
        let ds = Dataset::new(Data::IFunction(f));
        prop_assert_eq!(round_trip(&ds), ds);
    }

    #[test]
    fn scattering_round_trip(k in increasing(5), phase in prop::collection::vec(-3.0..3.0_f64, 5), kappa in 0.1..5.0_f64, s in 0.1..10.0_f64) {
        let values = phase.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
        let sm = SampledComplexFunction::new(momentum(k), values, Symmetry::Hermitian).unwrap();
        let bound = BoundStateSet::new(vec![kappa]).unwrap().with_s(vec![s]).unwrap()
            .with_c(vec![2.0 * s]).unwrap()
            .with_residues(vec![Complex64::new(0.0, s)]).unwrap();
        let ds = Dataset::new(Data::Scattering(ScatteringTriple::new(sm, bound).unwrap()));
        prop_assert_eq!(round_trip(&ds), ds);
    }

    #[test]
    fn spectral_round_trip(l in increasing(5), d in prop::collection::vec(1e-6..1e3_f64, 5), lambda in -30.0..-0.01_f64, mass in 0.01..50.0_f64, zero: bool) {
        let grid = Grid::new(GridKind::Spectral, l).unwrap();
        let m = SpectralMeasure::new(grid, d, vec![SpectralAtom { lambda, mass }], zero).unwrap();
        let ds = Dataset::new(Data::Spectral(m));
        prop_assert_eq!(round_trip(&ds), ds);
    }

    #[test]
    fn kernel_round_trip(v in prop::collection::vec(-1e2..1e2_f64, 10), a: bool) {
        let grid = Grid::uniform(GridKind::Position, 0.0, 1.0, 4).unwrap();
        let kind = if a { KernelKind::A } else { KernelKind::K };
        let mut it = v.into_iter();
        let rows = (0..4).map(|i| it.by_ref().take(if a { 4 - i } else { i + 1 }).collect()).collect();
        let ds = Dataset::new(Data::Kernel(TriangularKernel::new(grid, rows, kind).unwrap()));
        prop_assert_eq!(round_trip(&ds), ds);
    }
}

#[test]
fn floats_carry_seventeen_digits() {
    let grid = Grid::uniform(GridKind::Position, 0.0, 1.0, 2).unwrap();
    let ds = Dataset::new(Data::Potential(Potential::new(grid, vec![0.5, 0.1], 1.0).unwrap()));
    let text = dataset_to_json(&ds).unwrap();
    assert!(text.contains("5.0000000000000000e-1"), "{text}");
    assert!(text.contains("1.0000000000000001e-1"), "{text}");
    assert_eq!(dataset_to_json(&round_trip(&ds)).unwrap(), text);
}

#[test]
fn non_increasing_grid_is_a_grid_error() {
    let text = r#"{"kind": "potential", "grid": [0.0, 1.0, 1.0], "re": [1, 2, 3]}"#;
    let err = dataset_from_json(text).unwrap_err();
    assert!(matches!(err, Error::Grid(_)), "{err}");
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn non_unitary_scattering_names_the_point() {
    let text =
        r#"{"kind": "scattering", "grid": [1.0, 2.0], "re": [1.0, 1.2], "im": [0.0, 0.0], "symmetry": "hermitian"}"#;
    let err = dataset_from_json(text).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("|S(2)| = 1.2"), "{msg}");
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn schema_errors_name_the_field() {
    let cases = [
        (r#"{"kind": "potential", "re": [1]}"#, "grid"),
        (
            r#"{"kind": "potential", "grid": [0], "re": [1], "colour": 3}"#,
            "colour",
        ),
        (
            r#"{"kind": "ifunction", "grid": [1, 2], "re": [1, 2], "symmetry": "hermitian"}"#,
            "im",
        ),
        (
            r#"{"kind": "ifunction", "grid": [1, 2], "re": [1], "im": [1, 2], "symmetry": "hermitian"}"#,
            "re",
        ),
        (
            r#"{"kind": "kernel", "grid": [0, 1], "re": [1, 2, 3], "symmetry": "B"}"#,
            "symmetry",
        ),
    ];
    for (text, field) in cases {
        match dataset_from_json(text).unwrap_err() {
            Error::Schema { field: f, .. } => assert_eq!(f, field, "{text}"),
            other => panic!("{text}: {other}"),
        }
    }
}

#[test]
fn syntax_errors_report_the_line() {
    let err = dataset_from_json("{\n  \"kind\": \"potential\",\n  \"grid\": [0, 1,]\n}").unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("line 3"), "{err}");
}

#[test]
fn csv_mirrors_columns() {
    let f = SampledComplexFunction::new(
        momentum(vec![1.0, 2.0]),
        vec![Complex64::new(1.0, 2.0), Complex64::new(3.0, 4.0)],
        Symmetry::None,
    )
    .unwrap();
    let csv = dataset_to_csv(&Dataset::new(Data::IFunction(f)));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k,re,im");
    assert_eq!(
        lines[2],
        "2.0000000000000000e0,3.0000000000000000e0,4.0000000000000000e0"
    );
    let k = TriangularKernel::zero(Grid::uniform(GridKind::Position, 0.0, 1.0, 3).unwrap(), KernelKind::K);
    assert_eq!(dataset_to_csv(&Dataset::new(Data::Kernel(k))).lines().count(), 1 + 6);
}
