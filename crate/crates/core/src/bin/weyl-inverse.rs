use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use weyl_inverse::io::{read_dataset, Data, Dataset};
use weyl_inverse::model::Potential;
use weyl_inverse::pipeline::{
    self, convert, forward, parse_well, plot_data, reconstruct, selftest, write_output, write_sidecar, Conversion,
    Format, PipelineConfig, Quantity,
};
use weyl_inverse::reconstruction::Route;
use weyl_inverse::Result;

/// Maps between a half-line potential, its I-function, scattering data and
/// spectral function.
#[derive(Parser)]
#[command(name = "weyl-inverse", version)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    /// JSON config file; flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    kmin: Option<f64>,
    #[arg(long, global = true)]
    kmax: Option<f64>,
    #[arg(long, global = true)]
    nk: Option<usize>,
    #[arg(long, global = true)]
    xmax: Option<f64>,
    #[arg(long, global = true)]
    nx: Option<usize>,
    /// Wronskian tolerance on max |W − 2ik|/(1 + k).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    via: Option<Route>,
    /// 3-point smoothing of the recovered potential.
    #[arg(long, global = true)]
    smooth: bool,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// q ↦ I, scattering data and spectral function.
    Forward {
        /// Potential dataset; omit when --well is given.
        input: Option<PathBuf>,
        /// Square well q = −q0 on [0, a], as q0=..,a=..
        #[arg(long)]
        well: Option<String>,
    },
    /// Converts between I and the scattering or spectral data.
    Convert {
        #[arg(value_enum)]
        kind: Conversion,
        input: PathBuf,
    },
    /// Recovers q from I, scattering data or the spectral function.
    Reconstruct { input: PathBuf },
    /// Two-column CSV of one quantity, written to standard output.
    Plotdata {
        input: PathBuf,
        #[arg(long, value_enum)]
        what: Quantity,
    },
    /// Runs quick checks against closed-form results.
    Selftest,
}

fn config(o: &Overrides) -> Result<PipelineConfig> {
    let mut cfg = match &o.config {
        Some(path) => PipelineConfig::from_file(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(v) = o.kmin {
        cfg.k_min = v;
    }
    if let Some(v) = o.kmax {
        cfg.k_max = v;
    }
    if let Some(v) = o.nk {
        cfg.n_k = v;
    }
    if let Some(v) = o.xmax {
        cfg.x_max = v;
    }
    if let Some(v) = o.nx {
        cfg.n_x = v;
    }
    if let Some(v) = o.tol {
        cfg.tol = v;
    }
    if let Some(v) = o.via {
        cfg.via = v;
    }
    if o.smooth {
        cfg.smooth = true;
    }
    if let Some(v) = &o.out {
        cfg.out = v.clone();
    }
    if let Some(v) = o.format {
        cfg.format = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dataset(data: Data, source: &str) -> Dataset {
    Dataset::new(data).with_meta("source", source)
}

fn report(path: &std::path::Path) {
    println!("wrote {}", path.display());
}

fn run(cli: Cli) -> Result<()> {
    let cfg = config(&cli.overrides)?;
    let ensure_out = || {
        std::fs::create_dir_all(&cfg.out).map_err(|source| weyl_inverse::Error::Io {
            path: cfg.out.display().to_string(),
            source,
        })
    };
    match cli.command {
        Command::Forward { input, well } => {
            let q: Potential = match (input, well) {
                (_, Some(well)) => parse_well(&well)?.potential(11),
                (Some(path), None) => match read_dataset(&path)?.data {
                    Data::Potential(p) => p,
                    other => {
                        return Err(weyl_inverse::Error::Precondition(format!(
                            "forward expects a potential dataset, got {}",
                            other.kind()
                        )))
                    }
                },
                (None, None) => return Err(weyl_inverse::Error::schema("input", "give a potential file or --well")),
            };
            let out = forward(&q, &cfg)?;
            ensure_out()?;
            report(&write_output(
                &cfg,
                "ifunction",
                &dataset(Data::IFunction(out.ifunction), "forward"),
            )?);
            report(&write_output(
                &cfg,
                "scattering",
                &dataset(Data::Scattering(out.scattering), "forward"),
            )?);
            report(&write_output(
                &cfg,
                "spectral",
                &dataset(Data::Spectral(out.spectral), "forward"),
            )?);
            report(&write_sidecar(&cfg, "forward.diagnostics", &out.diagnostics)?);
            let d = &out.diagnostics;
            let kappas: Vec<f64> = d.bound_states.iter().map(|b| b.kappa).collect();
            println!(
                "J = {}, kappa = {:?}, Wronskian residual = {:e}",
                d.bound_state_count, kappas, d.wronskian_residual
            );
        }
        Command::Convert { kind, input } => {
            let data = read_dataset(&input)?.data;
            let out = convert(kind, &data)?;
            ensure_out()?;
            let stem = out.data.kind().to_string();
            report(&write_output(&cfg, &stem, &dataset(out.data, "convert"))?);
            report(&write_sidecar(&cfg, &format!("{stem}.diagnostics"), &out.diagnostics)?);
        }
        Command::Reconstruct { input } => {
            let data = read_dataset(&input)?.data;
            let out = reconstruct(&data, cfg.via, &cfg)?;
            ensure_out()?;
            let r = out.reconstruction;
            report(&write_output(
                &cfg,
                "potential",
                &dataset(Data::Potential(r.potential), "reconstruct"),
            )?);
            report(&write_output(
                &cfg,
                "kernel",
                &dataset(Data::Kernel(r.kernel.kernel), "reconstruct"),
            )?);
            report(&write_sidecar(&cfg, "reconstruct.report", &out.report)?);
            println!(
                "route {}: residual {:e}, condition {:e}, jumps at {:?}",
                pipeline::route_name(cfg.via),
                out.report.solve.residual,
                out.report.solve.condition,
                out.report.discontinuities
            );
        }
        Command::Plotdata { input, what } => {
            print!("{}", plot_data(&read_dataset(&input)?.data, what));
        }
        Command::Selftest => {
            let checks = selftest()?;
            for c in &checks {
                println!(
                    "{} {}: {:e} (limit {:e})",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.limit
                );
            }
            if let Some(c) = checks.iter().find(|c| !c.pass) {
                return Err(weyl_inverse::Error::invariant("self test", c.name.clone()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
