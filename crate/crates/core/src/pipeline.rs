//! Command drivers: configuration, the forward map, conversions between the
//! data sets, reconstruction of q, plot data and a quick self test.
//!
//! Every driver is a pure function of its inputs; writing files is left to
//! the caller.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::data_to_i::{
    a00_limit, f_from_scattering, f_from_spectral, i_from_scattering, i_from_spectral, Reconstruction,
};
use crate::forward::square_well::SquareWell;
use crate::forward::{i_function, jost_boundary, s_matrix, spectral_density};
use crate::i_to_data::{detect_poles, f_from_i, scattering_from_i, spectral_from_i, PoleDetectionReport};
use crate::io::{Data, Dataset};
use crate::model::{
    wronskian_scaled_residual, Grid, GridKind, Potential, SampledComplexFunction, Symmetry, DEFAULT_K_MAX,
    DEFAULT_K_MIN, DEFAULT_N_K,
};
use crate::reconstruction::{
    reconstruct_gl, reconstruct_marchenko, PotentialReconstruction, Route, SolveReport, DEFAULT_N_X, DEFAULT_X_MAX,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Grids, tolerances and output settings shared by all commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub n_k: usize,
    pub x_max: f64,
    pub n_x: usize,
    /// Limit on the scaled Wronskian residual max |W − 2ik|/(1 + k).
    pub tol: f64,
    pub via: Route,
    pub smooth: bool,
    pub out: PathBuf,
    pub format: Format,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            k_min: DEFAULT_K_MIN,
            k_max: DEFAULT_K_MAX,
            n_k: DEFAULT_N_K,
            x_max: DEFAULT_X_MAX,
            n_x: DEFAULT_N_X,
            tol: 1e-6,
            via: Route::Marchenko,
            smooth: false,
            out: PathBuf::from("."),
            format: Format::Json,
        }
    }
}

impl PipelineConfig {
    /// Reads a JSON config; absent keys keep their defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| Error::schema("config", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("k_min", self.k_min),
            ("k_max", self.k_max),
            ("x_max", self.x_max),
            ("tol", self.tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invariant("positive grid parameters", format!("{name} = {v}")));
            }
        }
        if self.k_max <= self.k_min {
            return Err(Error::invariant(
                "k_min < k_max",
                format!("[{}, {}]", self.k_min, self.k_max),
            ));
        }
        if self.n_k < 8 || self.n_x < 5 {
            return Err(Error::invariant(
                "enough grid points",
                format!("n_k = {}, n_x = {}", self.n_k, self.n_x),
            ));
        }
        Ok(())
    }

    pub fn momentum_grid(&self) -> Result<Grid> {
        Grid::uniform(GridKind::Momentum, self.k_min, self.k_max, self.n_k)
    }

    pub fn position_grid(&self) -> Result<Grid> {
        Grid::uniform(GridKind::Position, 0.0, self.x_max, self.n_x)
    }
}

/// K_max must exceed ten times the largest κ.
pub fn check_cutoff(k_max: f64, kappas: &[f64]) -> Result<()> {
    if let Some(&top) = kappas.iter().max_by(|a, b| a.total_cmp(b)) {
        if k_max <= 10.0 * top {
            return Err(Error::invariant(
                "K_max > 10·max κ",
                format!("K_max = {k_max}, κ₁ = {top}"),
            ));
        }
    }
    Ok(())
}

/// Parses `q0=4,a=2`.
pub fn parse_well(text: &str) -> Result<SquareWell> {
    let (mut q0, mut a) = (None, None);
    for part in text.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::schema("well", format!("expected key=value, got `{part}`")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::schema("well", format!("`{value}` is not a number")))?;
        match key.trim() {
            "q0" => q0 = Some(v),
            "a" => a = Some(v),
            other => return Err(Error::schema("well", format!("unknown key `{other}`"))),
        }
    }
    let q0 = q0.ok_or_else(|| Error::schema("well", "missing q0"))?;
    let a = a.ok_or_else(|| Error::schema("well", "missing a"))?;
    if !(q0 > 0.0 && a > 0.0) {
        return Err(Error::invariant("q0 > 0 and a > 0", format!("q0 = {q0}, a = {a}")));
    }
    Ok(SquareWell::new(q0, a))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundStateSummary {
    pub kappa: f64,
    pub s: Option<f64>,
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ForwardDiagnostics {
    /// max |W − 2ik|/(1 + k).
    pub wronskian_residual: f64,
    pub bound_state_count: usize,
    pub bound_states: Vec<BoundStateSummary>,
    pub zero_at_origin: bool,
    /// |S(K_max) − 1|.
    pub tail_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct ForwardOutput {
    pub ifunction: SampledComplexFunction,
    pub scattering: crate::model::ScatteringTriple,
    pub spectral: crate::model::SpectralMeasure,
    pub diagnostics: ForwardDiagnostics,
}

/// q ↦ (I, 𝒮, ρ) on the configured momentum grid.
pub fn forward(q: &Potential, cfg: &PipelineConfig) -> Result<ForwardOutput> {
    cfg.validate()?;
    let jb = jost_boundary(q, &cfg.momentum_grid()?)?;
    let wronskian = wronskian_scaled_residual(&jb.f, &jb.fprime0)?;
    if !(wronskian <= cfg.tol) {
        return Err(Error::invariant(
            "Wronskian",
            format!("scaled residual {wronskian:e} exceeds {:e}", cfg.tol),
        ));
    }
    check_cutoff(cfg.k_max, jb.bound.kappas())?;
    let scattering = s_matrix(&jb)?;
    let b = &jb.bound;
    let bound_states = (0..b.len())
        .map(|j| BoundStateSummary {
            kappa: b.kappas()[j],
            s: b.s().map(|s| s[j]),
            c: b.c().map(|c| c[j]),
        })
        .collect();
    Ok(ForwardOutput {
        ifunction: i_function(&jb)?,
        spectral: spectral_density(&jb)?,
        diagnostics: ForwardDiagnostics {
            wronskian_residual: wronskian,
            bound_state_count: b.len(),
            bound_states,
            zero_at_origin: b.zero_at_origin(),
            tail_deviation: scattering.tail_deviation(),
        },
        scattering,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Conversion {
    I2s,
    I2rho,
    S2i,
    Rho2i,
}

#[derive(Debug, Clone)]
pub struct ConvertOutput {
    pub data: Data,
    pub diagnostics: Value,
}

fn expect_ifunction(data: &Data) -> Result<&SampledComplexFunction> {
    match data {
        Data::IFunction(f) => Ok(f),
        other => Err(Error::Precondition(format!(
            "expected an ifunction dataset, got {}",
            other.kind()
        ))),
    }
}

/// Wronskian of f and f′(0,·) = I·f.
fn reconstructed_wronskian(r: &Reconstruction) -> Result<f64> {
    let fp = r.jost.map(Symmetry::Hermitian, |k, v| {
        v * r.i_function.evaluate(k).unwrap_or_default()
    })?;
    wronskian_scaled_residual(&r.jost, &fp)
}

fn data_to_i_diagnostics(r: &Reconstruction) -> Result<Value> {
    Ok(json!({
        "decay_check": r.diagnostics.decay_check,
        "jump_residual": r.diagnostics.jump_residual,
        "calibration_constant": r.diagnostics.calibration_constant,
        "winding_index": r.diagnostics.winding_index,
        "wronskian_residual": reconstructed_wronskian(r)?,
        "bound_state_count": r.bound.len(),
        "kappas": r.bound.kappas(),
    }))
}

fn poles(ifun: &SampledComplexFunction, k_max: f64) -> Result<PoleDetectionReport> {
    let report = detect_poles(ifun)?;
    check_cutoff(k_max, &report.kappas)?;
    Ok(report)
}

pub fn convert(conv: Conversion, input: &Data) -> Result<ConvertOutput> {
    match conv {
        Conversion::I2s | Conversion::I2rho => {
            let ifun = expect_ifunction(input)?;
            let report = poles(ifun, ifun.grid().last())?;
            let data = if conv == Conversion::I2s {
                Data::Scattering(scattering_from_i(ifun, &report)?)
            } else {
                Data::Spectral(spectral_from_i(ifun, &report)?)
            };
            Ok(ConvertOutput {
                data,
                diagnostics: serde_json::to_value(&report).expect("report serializes"),
            })
        }
        Conversion::S2i => match input {
            Data::Scattering(t) => {
                let r = i_from_scattering(t)?;
                Ok(ConvertOutput {
                    diagnostics: data_to_i_diagnostics(&r)?,
                    data: Data::IFunction(r.i_function),
                })
            }
            other => Err(Error::Precondition(format!(
                "s2i expects a scattering dataset, got {}",
                other.kind()
            ))),
        },
        Conversion::Rho2i => match input {
            Data::Spectral(m) => {
                let r = i_from_spectral(m)?;
                Ok(ConvertOutput {
                    diagnostics: data_to_i_diagnostics(&r)?,
                    data: Data::IFunction(r.i_function),
                })
            }
            other => Err(Error::Precondition(format!(
                "rho2i expects a spectral dataset, got {}",
                other.kind()
            ))),
        },
    }
}

/// Diagnostics of one reconstruction.
#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionReport {
    pub input: String,
    pub solve: SolveReport,
    /// A(0,0) from the large-k behaviour of f.
    pub a00_high_k: f64,
    /// Points where q̂ jumps.
    pub discontinuities: Vec<f64>,
    /// Intervals of two cells on each side of a jump, left out of error norms.
    pub excluded_cells: Vec<[f64; 2]>,
    pub x_max: f64,
    pub n_x: usize,
    pub smooth: bool,
    pub poles: Option<PoleDetectionReport>,
}

#[derive(Debug, Clone)]
pub struct ReconstructOutput {
    pub reconstruction: PotentialReconstruction,
    pub report: ReconstructionReport,
}

/// I, 𝒮 or ρ ⇒ q̂ by the chosen route. From I both routes are open; 𝒮 feeds
/// only the Marchenko route and ρ only the Gelfand–Levitan route.
pub fn reconstruct(input: &Data, via: Route, cfg: &PipelineConfig) -> Result<ReconstructOutput> {
    cfg.validate()?;
    let xgrid = cfg.position_grid()?;
    let mut pole_report = None;
    let (rec, f) = match (input, via) {
        (Data::IFunction(ifun), _) => {
            let report = poles(ifun, ifun.grid().last())?;
            let f = f_from_i(ifun, &report)?;
            let rec = match via {
                Route::Marchenko => reconstruct_marchenko(&scattering_from_i(ifun, &report)?, &xgrid, cfg.smooth)?,
                Route::Gl => reconstruct_gl(&spectral_from_i(ifun, &report)?, &xgrid, cfg.smooth)?,
            };
            pole_report = Some(report);
            (rec, f)
        }
        (Data::Scattering(t), Route::Marchenko) => {
            (reconstruct_marchenko(t, &xgrid, cfg.smooth)?, f_from_scattering(t)?)
        }
        (Data::Spectral(m), Route::Gl) => (reconstruct_gl(m, &xgrid, cfg.smooth)?, f_from_spectral(m)?),
        (other, route) => {
            return Err(Error::Precondition(format!(
                "route {} cannot start from a {} dataset",
                route_name(route),
                other.kind()
            )))
        }
    };
    let h = xgrid.spacing();
    let report = ReconstructionReport {
        input: input.kind().to_string(),
        solve: rec.kernel.report.clone(),
        a00_high_k: a00_limit(&f)?,
        excluded_cells: rec
            .discontinuities
            .iter()
            .map(|&x| [x - 2.0 * h, x + 2.0 * h])
            .collect(),
        discontinuities: rec.discontinuities.clone(),
        x_max: cfg.x_max,
        n_x: cfg.n_x,
        smooth: cfg.smooth,
        poles: pole_report,
    };
    Ok(ReconstructOutput {
        reconstruction: rec,
        report,
    })
}

pub fn route_name(route: Route) -> &'static str {
    match route {
        Route::Marchenko => "marchenko",
        Route::Gl => "gl",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Quantity {
    Re,
    Im,
    Abs,
    Phase,
}

fn quantity(v: Complex64, what: Quantity) -> f64 {
    match what {
        Quantity::Re => v.re,
        Quantity::Im => v.im,
        Quantity::Abs => v.norm(),
        Quantity::Phase => v.arg(),
    }
}

/// Two-column CSV of one quantity: functions of k against k, a potential
/// against x, a spectral density against λ and a kernel's diagonal against x.
pub fn plot_data(data: &Data, what: Quantity) -> String {
    let name = match what {
        Quantity::Re => "re",
        Quantity::Im => "im",
        Quantity::Abs => "abs",
        Quantity::Phase => "phase",
    };
    let (axis, pairs): (&str, Vec<(f64, Complex64)>) = match data {
        Data::Potential(p) => ("x", real_pairs(p.grid().points(), p.values())),
        Data::IFunction(f) => ("k", complex_pairs(f)),
        Data::Scattering(t) => ("k", complex_pairs(t.s_matrix())),
        Data::Spectral(m) => ("lambda", real_pairs(m.grid().points(), m.density())),
        Data::Kernel(k) => ("x", real_pairs(k.grid().points(), &k.diagonal())),
    };
    let mut out = format!("{axis},{name}\n");
    for (x, v) in pairs {
        out.push_str(&format!("{x:.16e},{:.16e}\n", quantity(v, what)));
    }
    out
}

fn real_pairs(x: &[f64], v: &[f64]) -> Vec<(f64, Complex64)> {
    x.iter().zip(v).map(|(&x, &v)| (x, Complex64::new(v, 0.0))).collect()
}

fn complex_pairs(f: &SampledComplexFunction) -> Vec<(f64, Complex64)> {
    f.points().iter().copied().zip(f.values().iter().copied()).collect()
}

/// One self-test line.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            limit,
            pass: value <= limit,
        }
    }
}

/// Quick end-to-end checks against closed forms on the default grids.
pub fn selftest() -> Result<Vec<Check>> {
    let cfg = PipelineConfig::default();
    let mut checks = Vec::new();

    let free = forward(&Potential::zero(1.0), &cfg)?;
    let i_err = free
        .ifunction
        .points()
        .iter()
        .zip(free.ifunction.values())
        .map(|(&k, v)| (v - Complex64::new(0.0, k)).norm())
        .fold(0.0, f64::max);
    checks.push(Check::new("free I = ik", i_err, 1e-10));
    let s_err = free
        .scattering
        .s_matrix()
        .values()
        .iter()
        .map(|v| (v - 1.0).norm())
        .fold(0.0, f64::max);
    checks.push(Check::new("free S = 1", s_err, 1e-10));
    let q_free = reconstruct(&Data::IFunction(free.ifunction.clone()), Route::Marchenko, &cfg)?;
    let q_sup = q_free
        .reconstruction
        .potential
        .values()
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    checks.push(Check::new("free reconstruction", q_sup, 1e-6));

    let well = SquareWell::new(1.0, 1.0);
    let out = forward(&well.potential(11), &cfg)?;
    let rel = out
        .ifunction
        .grid()
        .range_indices(0.1, 20.0)
        .map(|i| {
            let exact = well.jost(Complex64::new(out.ifunction.points()[i], 0.0)).i_function;
            ((out.ifunction.values()[i] - exact) / exact).norm()
        })
        .fold(0.0, f64::max);
    checks.push(Check::new("square well I vs closed form", rel, 1e-8));
    checks.push(Check::new(
        "square well Wronskian",
        out.diagnostics.wronskian_residual,
        cfg.tol,
    ));
    let back = convert(Conversion::S2i, &Data::Scattering(out.scattering.clone()))?;
    let Data::IFunction(i_back) = back.data else {
        unreachable!("s2i yields an ifunction")
    };
    checks.push(Check::new(
        "S to I round trip",
        i_back.sup_rel_diff(&out.ifunction, 0.2, 10.0),
        1e-3,
    ));
    let rec = reconstruct(&Data::IFunction(out.ifunction), Route::Marchenko, &cfg)?;
    let h = cfg.position_grid()?.spacing();
    let q_err = rec
        .reconstruction
        .potential
        .grid()
        .points()
        .iter()
        .zip(rec.reconstruction.potential.values())
        .filter(|(&x, _)| (x - well.width).abs() > 2.0 * h + 1e-12)
        .map(|(&x, &v)| (v - well.q(x)).abs())
        .fold(0.0, f64::max);
    checks.push(Check::new("square well reconstruction", q_err, 0.05 * well.depth));
    Ok(checks)
}

/// File name `<stem>.<json|csv>` under the output directory.
pub fn output_path(cfg: &PipelineConfig, stem: &str, format: Format) -> PathBuf {
    let ext = match format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    cfg.out.join(format!("{stem}.{ext}"))
}

/// Writes a dataset in the configured format.
pub fn write_output(cfg: &PipelineConfig, stem: &str, ds: &Dataset) -> Result<PathBuf> {
    let path = output_path(cfg, stem, cfg.format);
    let text = match cfg.format {
        Format::Json => crate::io::dataset_to_json(ds)?,
        Format::Csv => crate::io::dataset_to_csv(ds),
    };
    crate::io::write_text(&path, &text)?;
    Ok(path)
}

/// Writes a JSON sidecar `<stem>.json`.
pub fn write_sidecar<T: Serialize + ?Sized>(cfg: &PipelineConfig, stem: &str, value: &T) -> Result<PathBuf> {
    let path = output_path(cfg, stem, Format::Json);
    crate::io::write_text(&path, &crate::io::to_json_string(value)?)?;
    Ok(path)
}
