//! Dataset files: JSON round trip, CSV export and schema errors.

use num_complex::Complex64;
use weyl_inverse::io::{dataset_from_json, dataset_to_csv, dataset_to_json, Data, Dataset};
use weyl_inverse::model::{Grid, GridKind, SampledComplexFunction, Symmetry};

fn main() -> weyl_inverse::Result<()> {
    let grid = Grid::uniform(GridKind::Momentum, 0.5, 2.0, 4)?;
    let i = SampledComplexFunction::from_fn(&grid, Symmetry::Hermitian, |k| Complex64::new(0.0, k))?;
    let ds = Dataset::new(Data::IFunction(i)).with_meta("note", "free I(k) = ik");

    let json = dataset_to_json(&ds)?;
    println!("{json}");
    let back = dataset_from_json(&json)?;
    println!("round trip kind: {}", back.kind());
    println!("{}", dataset_to_csv(&back));

    match dataset_from_json(r#"{"kind": "ifunction", "grid": [1.0, 2.0]}"#) {
        Err(e) => println!("malformed file: {e} (exit code {})", e.exit_code()),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
