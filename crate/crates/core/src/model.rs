//! Shared data model: grids, sampled functions, potentials, bound-state
//! data, the scattering triple, the spectral measure and transformation
//! kernels, together with Blaschke products, the winding index and the
//! Wronskian check used by every pipeline.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_K_MIN: f64 = 0.05;
pub const DEFAULT_K_MAX: f64 = 60.0;
pub const DEFAULT_N_K: usize = 2400;

/// κ values closer than this are treated as the same bound state.
pub const KAPPA_MERGE_TOL: f64 = 1e-6;

/// Default tolerance for |S(k)| = 1 on stored scattering data.
pub const UNITARITY_TOL: f64 = 1e-6;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Momentum,
    Position,
    Spectral,
}

/// A strictly increasing list of sample points.
///
/// Momentum and spectral grids live on the open half-line; position grids may
/// include the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    kind: GridKind,
}

impl Grid {
    pub fn new(kind: GridKind, points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Grid("grid is empty".into()));
        }
        for (i, &p) in points.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::Grid(format!("point {i} is not finite")));
            }
            let positive = match kind {
                GridKind::Position => p >= 0.0,
                _ => p > 0.0,
            };
            if !positive {
                return Err(Error::Grid(format!("point {i} = {p} is not positive")));
            }
            if i > 0 && p <= points[i - 1] {
                return Err(Error::Grid(format!(
                    "grid is not strictly increasing at index {i} ({} then {p})",
                    points[i - 1]
                )));
            }
        }
        Ok(Grid { points, kind })
    }

    /// `n` equally spaced points from `start` to `end` inclusive.
    pub fn uniform(kind: GridKind, start: f64, end: f64, n: usize) -> Result<Self> {
        if n < 2 || !(end > start) {
            return Err(Error::Grid(format!(
                "uniform grid needs n >= 2 and end > start (got n={n}, [{start}, {end}])"
            )));
        }
        let h = (end - start) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| start + h * i as f64).collect();
        points[n - 1] = end;
        Grid::new(kind, points)
    }

    /// The default momentum grid: uniform on [0.05, 60] with 2400 points.
    pub fn default_momentum() -> Self {
        Grid::uniform(GridKind::Momentum, DEFAULT_K_MIN, DEFAULT_K_MAX, DEFAULT_N_K).expect("default grid is valid")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    /// Last point; for momentum grids this is the cutoff K_max.
    pub fn last(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Mean spacing.
    pub fn spacing(&self) -> f64 {
        if self.points.len() < 2 {
            return 0.0;
        }
        (self.last() - self.first()) / (self.points.len() - 1) as f64
    }

    pub fn is_uniform(&self) -> bool {
        let h = self.spacing();
        self.points
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.max(1.0))
    }

    /// Index of the grid point equal to `x` (within a relative 1e-12).
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let tol = 1e-12 * x.abs().max(1.0);
        let pos = self.points.partition_point(|&p| p < x - tol);
        (pos < self.points.len() && (self.points[pos] - x).abs() <= tol).then_some(pos)
    }

    /// Indices of points lying in [lo, hi].
    pub fn range_indices(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let a = self.points.partition_point(|&p| p < lo);
        let b = self.points.partition_point(|&p| p <= hi);
        a..b.max(a)
    }

    fn same_as(&self, other: &Grid) -> bool {
        self.points.len() == other.points.len()
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
    }

    pub(crate) fn ensure_same(&self, other: &Grid, what: &str) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(what.to_string()))
        }
    }
}

/// Rule for extending samples on k > 0 to k < 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    /// F(-k) = conj F(k)
    Hermitian,
    /// F(-k) = -conj F(k)
    Antihermitian,
    None,
}

impl Symmetry {
    /// Sign σ in F(-k) = σ conj F(k), if the rule defines one.
    pub fn sign(self) -> Option<f64> {
        match self {
            Symmetry::Hermitian => Some(1.0),
            Symmetry::Antihermitian => Some(-1.0),
            Symmetry::None => None,
        }
    }
}

/// Complex samples on a positive momentum grid with an extension rule.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledComplexFunction {
    grid: Grid,
    values: Vec<Complex64>,
    symmetry: Symmetry,
}

impl SampledComplexFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>, symmetry: Symmetry) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if grid.kind() == GridKind::Position {
            return Err(Error::Grid("sampled functions live on a momentum grid".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invariant(
                "finite values",
                format!("non-finite value at k = {}", grid.points()[i]),
            ));
        }
        Ok(SampledComplexFunction { grid, values, symmetry })
    }

    pub fn from_fn(grid: &Grid, symmetry: Symmetry, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.points().iter().map(|&k| f(k)).collect();
        Self::new(grid.clone(), values, symmetry)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn points(&self) -> &[f64] {
        self.grid.points()
    }

    /// Value at the mirrored point -k_i, using the symmetry rule.
    pub fn mirrored(&self, i: usize) -> Option<Complex64> {
        self.symmetry.sign().map(|s| self.values[i].conj() * s)
    }

    /// Linear interpolation at any real k covered by the grid or its mirror.
    pub fn evaluate(&self, k: f64) -> Option<Complex64> {
        if k < 0.0 {
            let s = self.symmetry.sign()?;
            return self.evaluate(-k).map(|v| v.conj() * s);
        }
        let pts = self.grid.points();
        if let Some(i) = self.grid.index_of(k) {
            return Some(self.values[i]);
        }
        if k < pts[0] || k > self.grid.last() {
            return None;
        }
        let j = pts.partition_point(|&p| p < k);
        let t = (k - pts[j - 1]) / (pts[j] - pts[j - 1]);
        Some(self.values[j - 1] * (1.0 - t) + self.values[j] * t)
    }

    pub fn map(&self, symmetry: Symmetry, f: impl Fn(f64, Complex64) -> Complex64) -> Result<Self> {
        let values = self.points().iter().zip(&self.values).map(|(&k, &v)| f(k, v)).collect();
        Self::new(self.grid.clone(), values, symmetry)
    }

    /// Sup norm of the difference on grid points within [lo, hi].
    pub fn sup_diff(&self, other: &Self, lo: f64, hi: f64) -> f64 {
        self.grid
            .range_indices(lo, hi)
            .map(|i| (self.values[i] - other.values[i]).norm())
            .fold(0.0, f64::max)
    }

    /// Sup of |a - b| / |b| on grid points within [lo, hi].
    pub fn sup_rel_diff(&self, reference: &Self, lo: f64, hi: f64) -> f64 {
        self.grid
            .range_indices(lo, hi)
            .map(|i| (self.values[i] - reference.values[i]).norm() / reference.values[i].norm())
            .fold(0.0, f64::max)
    }
}

/// A real potential sampled on a position grid, treated as zero beyond
/// `support_end` and piecewise linear between samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    grid: Grid,
    values: Vec<f64>,
    support_end: f64,
}

impl Potential {
    pub fn new(grid: Grid, values: Vec<f64>, support_end: f64) -> Result<Self> {
        if grid.kind() != GridKind::Position {
            return Err(Error::Grid("potential needs a position grid".into()));
        }
        if grid.len() != values.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invariant(
                "finite potential",
                format!("q is not finite at x = {}", grid.points()[i]),
            ));
        }
        if !(support_end > 0.0) || !support_end.is_finite() {
            return Err(Error::invariant("support_end > 0", format!("got {support_end}")));
        }
        let p = Potential {
            grid,
            values,
            support_end,
        };
        let moment = p.first_moment();
        if !moment.is_finite() {
            return Err(Error::invariant("q in L_{1,1}", "weighted L1 norm is not finite"));
        }
        Ok(p)
    }

    /// Samples `q` on `grid`, treating it as zero beyond the last grid point.
    pub fn from_fn(grid: Grid, q: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().iter().map(|&x| q(x)).collect();
        let end = grid.last();
        Potential::new(grid, values, end)
    }

    /// The identically zero potential.
    pub fn zero(support_end: f64) -> Self {
        let grid = Grid::uniform(GridKind::Position, 0.0, support_end, 2).expect("valid");
        Potential::new(grid, vec![0.0, 0.0], support_end).expect("valid")
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support_end(&self) -> f64 {
        self.support_end
    }

    /// Piecewise-linear value of q at x; zero beyond the support.
    pub fn eval(&self, x: f64) -> f64 {
        if x > self.support_end {
            return 0.0;
        }
        let pts = self.grid.points();
        if x <= pts[0] {
            return self.values[0];
        }
        if x >= self.grid.last() {
            return self.values[self.values.len() - 1];
        }
        let j = pts.partition_point(|&p| p < x);
        let t = (x - pts[j - 1]) / (pts[j] - pts[j - 1]);
        self.values[j - 1] * (1.0 - t) + self.values[j] * t
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Trapezoid estimate of ∫(1+x)|q(x)| dx over the sampled support.
    pub fn first_moment(&self) -> f64 {
        let pts = self.grid.points();
        pts.windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| 0.5 * (x[1] - x[0]) * ((1.0 + x[0]) * v[0].abs() + (1.0 + x[1]) * v[1].abs()))
            .sum()
    }

    /// Trapezoid estimate of ∫ q.
    pub fn integral(&self) -> f64 {
        let pts = self.grid.points();
        pts.windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| 0.5 * (x[1] - x[0]) * (v[0] + v[1]))
            .sum()
    }
}

/// Bound-state data: κ_j > 0 (eigenvalues -κ_j²) with optional norming
/// constants s_j, c_j and residues I_j of the I-function at iκ_j.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundStateSet {
    kappas: Vec<f64>,
    s: Option<Vec<f64>>,
    c: Option<Vec<f64>>,
    residues: Option<Vec<Complex64>>,
    zero_at_origin: bool,
    origin_residue: Option<Complex64>,
}

impl BoundStateSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates and sorts κ values (descending).
    pub fn new(mut kappas: Vec<f64>) -> Result<Self> {
        for &k in &kappas {
            if !(k > 0.0) || !k.is_finite() {
                return Err(Error::invariant("kappa > 0", format!("got {k}")));
            }
        }
        kappas.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        for w in kappas.windows(2) {
            if w[0] - w[1] < KAPPA_MERGE_TOL {
                return Err(Error::invariant(
                    "distinct kappa",
                    format!("{} and {} are closer than {KAPPA_MERGE_TOL:e}", w[0], w[1]),
                ));
            }
        }
        Ok(BoundStateSet {
            kappas,
            ..Self::default()
        })
    }

    pub fn with_zero_at_origin(mut self, flag: bool) -> Self {
        self.zero_at_origin = flag;
        self
    }

    pub fn with_s(mut self, s: Vec<f64>) -> Result<Self> {
        self.check_len(s.len(), "s")?;
        if let Some(j) = s.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::invariant("s_j > 0", format!("s[{j}] = {}", s[j])));
        }
        self.s = Some(s);
        Ok(self)
    }

    pub fn with_c(mut self, c: Vec<f64>) -> Result<Self> {
        self.check_len(c.len(), "c")?;
        if let Some(j) = c.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::invariant("c_j > 0", format!("c[{j}] = {}", c[j])));
        }
        self.c = Some(c);
        Ok(self)
    }

    /// Attaches residues I_j; each must be (numerically) purely imaginary
    /// with positive imaginary part.
    pub fn with_residues(mut self, residues: Vec<Complex64>) -> Result<Self> {
        self.check_len(residues.len(), "residues")?;
        for (j, r) in residues.iter().enumerate() {
            check_residue(*r).map_err(|d| Error::invariant("Re I_j = 0, Im I_j > 0", format!("I[{j}]: {d}")))?;
        }
        self.residues = Some(residues);
        Ok(self)
    }

    /// Residue I₀ at k = 0, meaningful only when f(0) = 0.
    pub fn with_origin_residue(mut self, r: Option<Complex64>) -> Result<Self> {
        if let Some(r) = r {
            check_residue(r).map_err(|d| Error::invariant("Re I_0 = 0, Im I_0 > 0", d))?;
        }
        self.origin_residue = r;
        Ok(self)
    }

    fn check_len(&self, n: usize, what: &str) -> Result<()> {
        if n != self.kappas.len() {
            return Err(Error::invariant(
                "bound-state arity",
                format!("{n} entries in `{what}` for {} bound states", self.kappas.len()),
            ));
        }
        Ok(())
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    pub fn len(&self) -> usize {
        self.kappas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappas.is_empty()
    }

    pub fn s(&self) -> Option<&[f64]> {
        self.s.as_deref()
    }

    pub fn c(&self) -> Option<&[f64]> {
        self.c.as_deref()
    }

    pub fn residues(&self) -> Option<&[Complex64]> {
        self.residues.as_deref()
    }

    pub fn zero_at_origin(&self) -> bool {
        self.zero_at_origin
    }

    pub fn origin_residue(&self) -> Option<Complex64> {
        self.origin_residue
    }
}

fn check_residue(r: Complex64) -> std::result::Result<(), String> {
    if !(r.im > 0.0) || !r.re.is_finite() {
        return Err(format!("Im = {} is not positive", r.im));
    }
    if r.re.abs() > 1e-3 * r.im {
        return Err(format!("Re = {} is not negligible against Im = {}", r.re, r.im));
    }
    Ok(())
}

/// Scattering data {S(k), κ_j, s_j}.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringTriple {
    s_matrix: SampledComplexFunction,
    bound: BoundStateSet,
}

impl ScatteringTriple {
    pub fn new(s_matrix: SampledComplexFunction, bound: BoundStateSet) -> Result<Self> {
        Self::with_tolerance(s_matrix, bound, UNITARITY_TOL)
    }

    pub fn with_tolerance(s_matrix: SampledComplexFunction, bound: BoundStateSet, tol: f64) -> Result<Self> {
        if s_matrix.symmetry() != Symmetry::Hermitian {
            return Err(Error::invariant("S hermitian", "S(k) must carry the hermitian rule"));
        }
        for (&k, v) in s_matrix.points().iter().zip(s_matrix.values()) {
            if (v.norm() - 1.0).abs() > tol {
                return Err(Error::invariant(
                    "|S(k)| = 1",
                    format!("|S({k})| = {} (tolerance {tol:e})", v.norm()),
                ));
            }
        }
        if !bound.is_empty() && bound.s().is_none() {
            return Err(Error::invariant(
                "s_j present",
                "bound states need norming constants s_j",
            ));
        }
        Ok(ScatteringTriple { s_matrix, bound })
    }

    pub fn s_matrix(&self) -> &SampledComplexFunction {
        &self.s_matrix
    }

    pub fn bound(&self) -> &BoundStateSet {
        &self.bound
    }

    /// |S(K_max) - 1|, the tail deviation at the cutoff.
    pub fn tail_deviation(&self) -> f64 {
        let v = self.s_matrix.values();
        (v[v.len() - 1] - 1.0).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralAtom {
    /// Location λ = -κ².
    pub lambda: f64,
    /// Mass c_j.
    pub mass: f64,
}

/// Spectral function: density dρ/dλ on λ > 0 plus atoms at -κ_j².
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    grid: Grid,
    density: Vec<f64>,
    atoms: Vec<SpectralAtom>,
    zero_at_origin: bool,
}

impl SpectralMeasure {
    pub fn new(grid: Grid, density: Vec<f64>, atoms: Vec<SpectralAtom>, zero_at_origin: bool) -> Result<Self> {
        if grid.kind() != GridKind::Spectral {
            return Err(Error::Grid("spectral density needs a spectral (λ) grid".into()));
        }
        if grid.len() != density.len() {
            return Err(Error::GridMismatch(format!(
                "{} density values for {} grid points",
                density.len(),
                grid.len()
            )));
        }
        if let Some(i) = density.iter().position(|&d| !(d > 0.0) || !d.is_finite()) {
            return Err(Error::invariant(
                "density > 0",
                format!("density({}) = {}", grid.points()[i], density[i]),
            ));
        }
        for a in &atoms {
            if !(a.mass > 0.0) || !(a.lambda < 0.0) {
                return Err(Error::invariant(
                    "atoms at -κ² with c > 0",
                    format!("atom ({}, {})", a.lambda, a.mass),
                ));
            }
        }
        Ok(SpectralMeasure {
            grid,
            density,
            atoms,
            zero_at_origin,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn atoms(&self) -> &[SpectralAtom] {
        &self.atoms
    }

    pub fn zero_at_origin(&self) -> bool {
        self.zero_at_origin
    }

    /// Momentum grid k = √λ matching the density samples.
    pub fn momentum_grid(&self) -> Grid {
        let pts = self.grid.points().iter().map(|l| l.sqrt()).collect();
        Grid::new(GridKind::Momentum, pts).expect("sqrt preserves order")
    }

    /// Bound states recovered from the atoms, with c_j attached.
    pub fn bound_states(&self) -> Result<BoundStateSet> {
        let mut pairs: Vec<(f64, f64)> = self.atoms.iter().map(|a| ((-a.lambda).sqrt(), a.mass)).collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite"));
        let set = BoundStateSet::new(pairs.iter().map(|p| p.0).collect())?;
        let set = if pairs.is_empty() {
            set
        } else {
            set.with_c(pairs.iter().map(|p| p.1).collect())?
        };
        Ok(set.with_zero_at_origin(self.zero_at_origin))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    /// Marchenko kernel A(x, y), y >= x.
    A,
    /// Gelfand–Levitan kernel K(x, y), y <= x.
    K,
}

/// Triangular kernel on a position grid. Row `i` of an A-kernel holds
/// A(x_i, x_j) for j >= i; row `i` of a K-kernel holds K(x_i, x_j) for j <= i.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularKernel {
    grid: Grid,
    rows: Vec<Vec<f64>>,
    kind: KernelKind,
}

impl TriangularKernel {
    pub fn new(grid: Grid, rows: Vec<Vec<f64>>, kind: KernelKind) -> Result<Self> {
        let n = grid.len();
        if rows.len() != n {
            return Err(Error::GridMismatch(format!("{} rows for {n} grid points", rows.len())));
        }
        for (i, r) in rows.iter().enumerate() {
            let expect = match kind {
                KernelKind::A => n - i,
                KernelKind::K => i + 1,
            };
            if r.len() != expect {
                return Err(Error::invariant(
                    "triangular shape",
                    format!("row {i} has {} entries, expected {expect}", r.len()),
                ));
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::invariant(
                    "finite kernel",
                    format!("row {i} has non-finite entries"),
                ));
            }
        }
        Ok(TriangularKernel { grid, rows, kind })
    }

    pub fn zero(grid: Grid, kind: KernelKind) -> Self {
        let n = grid.len();
        let rows = (0..n)
            .map(|i| match kind {
                KernelKind::A => vec![0.0; n - i],
                KernelKind::K => vec![0.0; i + 1],
            })
            .collect();
        TriangularKernel { grid, rows, kind }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// The trace x ↦ A(x,x) or K(x,x).
    pub fn diagonal(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| match self.kind {
                KernelKind::A => r[0],
                KernelKind::K => r[r.len() - 1],
            })
            .collect()
    }

    /// Entry at grid indices (i, j), zero outside the triangle.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        match self.kind {
            KernelKind::A if j >= i => self.rows[i][j - i],
            KernelKind::K if j <= i => self.rows[i][j],
            _ => 0.0,
        }
    }
}

/// Blaschke factor w(z) = Π (z - iκ_j)/(z + iκ_j), or w₁(z) = z/(z+i)·w(z)
/// when f(0) = 0 is flagged.
pub fn blaschke(z: Complex64, bound: &BoundStateSet) -> Result<Complex64> {
    const POLE_TOL: f64 = 1e-12;
    let mut w = Complex64::new(1.0, 0.0);
    for &kappa in bound.kappas() {
        let den = z + I * kappa;
        if den.norm() < POLE_TOL {
            return Err(Error::PoleProximity {
                z: format!("{z}"),
                distance: den.norm(),
            });
        }
        w *= (z - I * kappa) / den;
    }
    if bound.zero_at_origin() {
        let den = z + I;
        if den.norm() < POLE_TOL {
            return Err(Error::PoleProximity {
                z: format!("{z}"),
                distance: den.norm(),
            });
        }
        w *= z / den;
    }
    Ok(w)
}

/// Winding number of a unimodular hermitian function over the whole real
/// axis, counted positive for counter-clockwise rotation as k increases.
/// (k - i)/(k + i) has index +1.
pub fn winding_index(u: &SampledComplexFunction) -> Result<i64> {
    if u.symmetry() != Symmetry::Hermitian {
        return Err(Error::Precondition("winding index needs a hermitian function".into()));
    }
    let pts = u.points();
    let vals = u.values();
    if let Some(i) = vals.iter().position(|v| (v.norm() - 1.0).abs() > 1e-3) {
        return Err(Error::Precondition(format!(
            "|u({})| = {} is not within 1e-3 of 1",
            pts[i],
            vals[i].norm()
        )));
    }
    let theta = unwrap_phase(pts, vals)?;
    let first = theta[0];
    let last = theta[theta.len() - 1];
    // continuity through k = 0 fixes the offset of the mirrored branch
    let m = (first / std::f64::consts::PI).round();
    let total = 2.0 * last - 2.0 * std::f64::consts::PI * m;
    Ok((total / (2.0 * std::f64::consts::PI)).round() as i64)
}

/// Continuous phase along the grid, starting from the principal value at
/// the first point. Adjacent jumps of π or more are rejected.
pub fn unwrap_phase(points: &[f64], values: &[Complex64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev = values[0].arg();
    out.push(prev);
    for i in 1..values.len() {
        let step = (values[i] / values[i - 1]).arg();
        if step.abs() >= std::f64::consts::PI * (1.0 - 1e-9) {
            return Err(Error::PhaseJump {
                k0: points[i - 1],
                k1: points[i],
                jump: step,
            });
        }
        prev += step;
        out.push(prev);
    }
    Ok(out)
}

/// max_k |f'(0,k) f(-k) - f'(0,-k) f(k) - 2ik| over the grid.
pub fn check_wronskian(f: &SampledComplexFunction, fp: &SampledComplexFunction) -> Result<f64> {
    f.grid()
        .ensure_same(fp.grid(), "Wronskian check needs f and f' on the same grid")?;
    if f.symmetry() != Symmetry::Hermitian || fp.symmetry() != Symmetry::Hermitian {
        return Err(Error::Precondition("Wronskian check needs hermitian f and f'".into()));
    }
    Ok(f.points()
        .iter()
        .zip(f.values().iter().zip(fp.values()))
        .map(|(&k, (&fv, &fpv))| (fpv * fv.conj() - fpv.conj() * fv - I * (2.0 * k)).norm())
        .fold(0.0, f64::max))
}

/// max_k |W(k) - 2ik| / (1 + k): the scaled residual used by acceptance checks.
pub fn wronskian_scaled_residual(f: &SampledComplexFunction, fp: &SampledComplexFunction) -> Result<f64> {
    f.grid()
        .ensure_same(fp.grid(), "Wronskian check needs f and f' on the same grid")?;
    Ok(f.points()
        .iter()
        .zip(f.values().iter().zip(fp.values()))
        .map(|(&k, (&fv, &fpv))| (fpv * fv.conj() - fpv.conj() * fv - I * (2.0 * k)).norm() / (1.0 + k))
        .fold(0.0, f64::max))
}
