//! The whole chain through the pipeline layer: q ⇒ I ⇒ (S, ρ) ⇒ I ⇒ q,
//! with files and diagnostic sidecars written to a temporary directory.

use weyl_inverse::forward::SquareWell;
use weyl_inverse::io::{Data, Dataset};
use weyl_inverse::pipeline::{convert, forward, reconstruct, write_output, write_sidecar, Conversion, PipelineConfig};
use weyl_inverse::reconstruction::Route;

fn main() -> weyl_inverse::Result<()> {
    let dir = std::env::temp_dir().join("weyl-inverse-pipeline-example");
    let cfg = PipelineConfig {
        out: dir.clone(),
        x_max: 4.0,
        n_x: 161,
        ..PipelineConfig::default()
    };
    cfg.validate()?;

    let q = SquareWell::new(1.0, 1.0).potential(11);
    let fwd = forward(&q, &cfg)?;
    std::fs::create_dir_all(&dir).expect("temporary directory is writable");
    write_output(&cfg, "ifunction", &Dataset::new(Data::IFunction(fwd.ifunction.clone())))?;
    write_sidecar(&cfg, "forward.diagnostics", &fwd.diagnostics)?;
    println!(
        "forward: J = {}, Wronskian {:.2e}",
        fwd.diagnostics.bound_state_count, fwd.diagnostics.wronskian_residual
    );

    let s = convert(Conversion::I2s, &Data::IFunction(fwd.ifunction.clone()))?;
    let back = convert(Conversion::S2i, &s.data)?;
    let Data::IFunction(i_back) = &back.data else {
        unreachable!()
    };
    println!(
        "I ⇒ S ⇒ I: sup |ΔI| on [0.5, 10] = {:.2e}",
        i_back.sup_diff(&fwd.ifunction, 0.5, 10.0)
    );

    for via in [Route::Marchenko, Route::Gl] {
        let out = reconstruct(&Data::IFunction(fwd.ifunction.clone()), via, &cfg)?;
        let q_hat = &out.reconstruction.potential;
        println!(
            "{via:?}: q̂(0.5) = {:.4}, q̂(2) = {:.4}, jumps {:?}, condition {:.1e}",
            q_hat.eval(0.5),
            q_hat.eval(2.0),
            out.report.discontinuities,
            out.report.solve.condition
        );
    }
    println!("files in {}", dir.display());
    Ok(())
}
