//! JSON and CSV datasets for potentials, I-functions, scattering triples,
//! spectral measures and kernels.
//!
//! Every float is written with 17 significant digits, so `write` followed by
//! `read` reproduces each value bit for bit.

use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::model::{
    BoundStateSet, Grid, GridKind, KernelKind, Potential, SampledComplexFunction, ScatteringTriple, SpectralAtom,
    SpectralMeasure, Symmetry, TriangularKernel,
};
use crate::{Error, Result};

/// Payload of a dataset file.
#[derive(Debug, Clone, PartialEq)]
pub enum Data {
    Potential(Potential),
    IFunction(SampledComplexFunction),
    Scattering(ScatteringTriple),
    Spectral(SpectralMeasure),
    Kernel(TriangularKernel),
}

impl Data {
    pub fn kind(&self) -> Kind {
        match self {
            Data::Potential(_) => Kind::Potential,
            Data::IFunction(_) => Kind::Ifunction,
            Data::Scattering(_) => Kind::Scattering,
            Data::Spectral(_) => Kind::Spectral,
            Data::Kernel(_) => Kind::Kernel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Potential,
    Ifunction,
    Scattering,
    Spectral,
    Kernel,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Kind::Potential => "potential",
            Kind::Ifunction => "ifunction",
            Kind::Scattering => "scattering",
            Kind::Spectral => "spectral",
            Kind::Kernel => "kernel",
        };
        f.write_str(s)
    }
}

/// A dataset with free-form metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub data: Data,
    pub meta: Map<String, Value>,
}

impl Dataset {
    pub fn new(data: Data) -> Self {
        Dataset { data, meta: Map::new() }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.meta.insert(key.into(), value.into());
        self
    }

    pub fn kind(&self) -> Kind {
        self.data.kind()
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    kind: Kind,
    grid: Vec<f64>,
    re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    symmetry: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bound: Option<BoundDoc>,
    #[serde(default)]
    meta: Map<String, Value>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundDoc {
    #[serde(default)]
    kappa: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    residues_re: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    residues_im: Option<Vec<f64>>,
    #[serde(default)]
    zero_at_origin: bool,
    /// [Re, Im] of the residue at k = 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    origin_residue: Option<[f64; 2]>,
    /// Atom locations λ_j of a spectral measure, aligned with `c`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<Vec<f64>>,
}

const SUPPORT_END: &str = "support_end";

fn symmetry_name(s: Symmetry) -> &'static str {
    match s {
        Symmetry::Hermitian => "hermitian",
        Symmetry::Antihermitian => "antihermitian",
        Symmetry::None => "none",
    }
}

fn parse_symmetry(s: Option<&str>) -> Result<Symmetry> {
    match s {
        Some("hermitian") => Ok(Symmetry::Hermitian),
        Some("antihermitian") => Ok(Symmetry::Antihermitian),
        Some("none") => Ok(Symmetry::None),
        Some(other) => Err(Error::schema("symmetry", format!("unknown value `{other}`"))),
        None => Err(Error::schema("symmetry", "missing")),
    }
}

fn split(values: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    values.iter().map(|v| (v.re, v.im)).unzip()
}

fn bound_doc(b: &BoundStateSet) -> BoundDoc {
    let (rr, ri) = match b.residues() {
        Some(r) => {
            let (a, b) = split(r);
            (Some(a), Some(b))
        }
        None => (None, None),
    };
    BoundDoc {
        kappa: b.kappas().to_vec(),
        s: b.s().map(<[f64]>::to_vec),
        c: b.c().map(<[f64]>::to_vec),
        residues_re: rr,
        residues_im: ri,
        zero_at_origin: b.zero_at_origin(),
        origin_residue: b.origin_residue().map(|r| [r.re, r.im]),
        lambda: None,
    }
}

fn to_document(ds: &Dataset) -> Document {
    let mut doc = Document {
        kind: ds.kind(),
        grid: Vec::new(),
        re: Vec::new(),
        im: None,
        symmetry: None,
        bound: None,
        meta: ds.meta.clone(),
    };
    match &ds.data {
        Data::Potential(p) => {
            doc.grid = p.grid().points().to_vec();
            doc.re = p.values().to_vec();
            doc.meta.insert(SUPPORT_END.into(), p.support_end().into());
        }
        Data::IFunction(f) => {
            doc.grid = f.points().to_vec();
            let (re, im) = split(f.values());
            doc.re = re;
            doc.im = Some(im);
            doc.symmetry = Some(symmetry_name(f.symmetry()).into());
        }
        Data::Scattering(t) => {
            let s = t.s_matrix();
            doc.grid = s.points().to_vec();
            let (re, im) = split(s.values());
            doc.re = re;
            doc.im = Some(im);
            doc.symmetry = Some(symmetry_name(s.symmetry()).into());
            doc.bound = Some(bound_doc(t.bound()));
        }
        Data::Spectral(m) => {
            doc.grid = m.grid().points().to_vec();
            doc.re = m.density().to_vec();
            doc.bound = Some(BoundDoc {
                kappa: m.atoms().iter().map(|a| (-a.lambda).sqrt()).collect(),
                c: Some(m.atoms().iter().map(|a| a.mass).collect()),
                zero_at_origin: m.zero_at_origin(),
                lambda: Some(m.atoms().iter().map(|a| a.lambda).collect()),
                ..BoundDoc::default()
            });
        }
        Data::Kernel(k) => {
            doc.grid = k.grid().points().to_vec();
            doc.re = k.rows().iter().flatten().copied().collect();
            doc.symmetry = Some(
                match k.kind() {
                    KernelKind::A => "A",
                    KernelKind::K => "K",
                }
                .into(),
            );
        }
    }
    doc
}

fn require<T>(v: Option<T>, field: &str) -> Result<T> {
    v.ok_or_else(|| Error::schema(field, "missing"))
}

fn check_len(field: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::schema(field, format!("has {got} entries, expected {want}")));
    }
    Ok(())
}

fn join(re: &[f64], im: &[f64]) -> Vec<Complex64> {
    re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect()
}

fn complex_samples(doc: &Document) -> Result<SampledComplexFunction> {
    let n = doc.grid.len();
    check_len("re", doc.re.len(), n)?;
    let im = require(doc.im.as_ref(), "im")?;
    check_len("im", im.len(), n)?;
    let symmetry = parse_symmetry(doc.symmetry.as_deref())?;
    let grid = Grid::new(GridKind::Momentum, doc.grid.clone())?;
    SampledComplexFunction::new(grid, join(&doc.re, im), symmetry)
}

fn bound_set(b: &BoundDoc) -> Result<BoundStateSet> {
    let n = b.kappa.len();
    if b.kappa.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::invariant(
            "kappa sorted descending",
            "bound.kappa is not strictly decreasing",
        ));
    }
    let mut set = BoundStateSet::new(b.kappa.clone())?.with_zero_at_origin(b.zero_at_origin);
    if let Some(s) = &b.s {
        check_len("bound.s", s.len(), n)?;
        set = set.with_s(s.clone())?;
    }
    if let Some(c) = &b.c {
        check_len("bound.c", c.len(), n)?;
        set = set.with_c(c.clone())?;
    }
    match (&b.residues_re, &b.residues_im) {
        (Some(re), Some(im)) => {
            check_len("bound.residues_re", re.len(), n)?;
            check_len("bound.residues_im", im.len(), n)?;
            set = set.with_residues(join(re, im))?;
        }
        (None, None) => {}
        (Some(_), None) => {
            return Err(Error::schema(
                "bound.residues_im",
                "missing while residues_re is present",
            ))
        }
        (None, Some(_)) => {
            return Err(Error::schema(
                "bound.residues_re",
                "missing while residues_im is present",
            ))
        }
    }
    set.with_origin_residue(b.origin_residue.map(|[re, im]| Complex64::new(re, im)))
}

fn from_document(doc: Document) -> Result<Dataset> {
    let n = doc.grid.len();
    let data = match doc.kind {
        Kind::Potential => {
            check_len("re", doc.re.len(), n)?;
            let end = match doc.meta.get(SUPPORT_END) {
                Some(v) => v
                    .as_f64()
                    .ok_or_else(|| Error::schema("meta.support_end", "not a number"))?,
                None => doc.grid.last().copied().unwrap_or(0.0),
            };
            let grid = Grid::new(GridKind::Position, doc.grid.clone())?;
            Data::Potential(Potential::new(grid, doc.re.clone(), end)?)
        }
        Kind::Ifunction => Data::IFunction(complex_samples(&doc)?),
        Kind::Scattering => {
            let s = complex_samples(&doc)?;
            let bound = match &doc.bound {
                Some(b) => bound_set(b)?,
                None => BoundStateSet::empty(),
            };
            Data::Scattering(ScatteringTriple::new(s, bound)?)
        }
        Kind::Spectral => {
            check_len("re", doc.re.len(), n)?;
            let b = doc.bound.as_ref();
            let kappa = b.map(|b| b.kappa.clone()).unwrap_or_default();
            let masses = match b.and_then(|b| b.c.clone()) {
                Some(c) => c,
                None if kappa.is_empty() => Vec::new(),
                None => return Err(Error::schema("bound.c", "missing for a spectral measure with atoms")),
            };
            check_len("bound.c", masses.len(), kappa.len())?;
            let lambda = match b.and_then(|b| b.lambda.clone()) {
                Some(l) => {
                    check_len("bound.lambda", l.len(), kappa.len())?;
                    l
                }
                None => kappa.iter().map(|k| -k * k).collect(),
            };
            let atoms = lambda
                .into_iter()
                .zip(masses)
                .map(|(lambda, mass)| SpectralAtom { lambda, mass })
                .collect();
            let grid = Grid::new(GridKind::Spectral, doc.grid.clone())?;
            let zero = b.map(|b| b.zero_at_origin).unwrap_or(false);
            Data::Spectral(SpectralMeasure::new(grid, doc.re.clone(), atoms, zero)?)
        }
        Kind::Kernel => {
            let kind = match doc.symmetry.as_deref() {
                Some("A") => KernelKind::A,
                Some("K") => KernelKind::K,
                Some(other) => {
                    return Err(Error::schema(
                        "symmetry",
                        format!("kernel kind must be A or K, got `{other}`"),
                    ))
                }
                None => return Err(Error::schema("symmetry", "missing kernel kind (A or K)")),
            };
            check_len("re", doc.re.len(), n * (n + 1) / 2)?;
            let mut it = doc.re.iter().copied();
            let rows = (0..n)
                .map(|i| {
                    let len = match kind {
                        KernelKind::A => n - i,
                        KernelKind::K => i + 1,
                    };
                    it.by_ref().take(len).collect()
                })
                .collect();
            let grid = Grid::new(GridKind::Position, doc.grid.clone())?;
            Data::Kernel(TriangularKernel::new(grid, rows, kind)?)
        }
    };
    let mut meta = doc.meta;
    if matches!(data, Data::Potential(_)) {
        meta.remove(SUPPORT_END);
    }
    Ok(Dataset { data, meta })
}

/// Writes f64 values as `{:.16e}`; non-finite values become `null`.
struct FixedDigits(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for FixedDigits {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
        if v.is_finite() {
            write!(w, "{v:.16e}")
        } else {
            w.write_all(b"null")
        }
    }
    fn begin_array<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + std::io::Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn end_object_key<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_key(w)
    }
    fn begin_object_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + std::io::Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Any serializable value as pretty JSON with 17 significant digits per float.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, FixedDigits(serde_json::ser::PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| Error::schema("document", e.to_string()))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn dataset_to_json(ds: &Dataset) -> Result<String> {
    to_json_string(&to_document(ds))
}

/// Field named in a serde_json message, if any.
fn field_of(message: &str) -> String {
    for marker in ["missing field `", "unknown field `"] {
        if let Some(rest) = message.split(marker).nth(1) {
            if let Some(name) = rest.split('`').next() {
                return name.into();
            }
        }
    }
    "document".into()
}

pub fn dataset_from_json(text: &str) -> Result<Dataset> {
    let doc: Document = serde_json::from_str(text).map_err(|e| {
        let message = e.to_string();
        Error::schema(field_of(&message), message)
    })?;
    from_document(doc)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    dataset_from_json(&text)
}

pub fn write_dataset(path: &Path, ds: &Dataset) -> Result<()> {
    write_text(path, &dataset_to_json(ds)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(io_err(path))?;
    f.write_all(text.as_bytes()).map_err(io_err(path))
}

/// CSV export: one row per sample. Functions of k give `k,re,im`, a
/// potential `x,q`, a spectral density `lambda,density` and a kernel
/// `x,y,value` over its triangle.
pub fn dataset_to_csv(ds: &Dataset) -> String {
    let (header, rows): (&str, Vec<Vec<f64>>) = match &ds.data {
        Data::Potential(p) => (
            "x,q",
            p.grid()
                .points()
                .iter()
                .zip(p.values())
                .map(|(&x, &q)| vec![x, q])
                .collect(),
        ),
        Data::IFunction(f) => ("k,re,im", complex_rows(f)),
        Data::Scattering(t) => ("k,re,im", complex_rows(t.s_matrix())),
        Data::Spectral(m) => (
            "lambda,density",
            m.grid()
                .points()
                .iter()
                .zip(m.density())
                .map(|(&l, &d)| vec![l, d])
                .collect(),
        ),
        Data::Kernel(k) => {
            let x = k.grid().points();
            let n = x.len();
            let rows = (0..n)
                .flat_map(|i| {
                    let cols = match k.kind() {
                        KernelKind::A => i..n,
                        KernelKind::K => 0..i + 1,
                    };
                    cols.map(move |j| vec![x[i], x[j], k.at(i, j)])
                })
                .collect();
            ("x,y,value", rows)
        }
    };
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn complex_rows(f: &SampledComplexFunction) -> Vec<Vec<f64>> {
    f.points()
        .iter()
        .zip(f.values())
        .map(|(&k, v)| vec![k, v.re, v.im])
        .collect()
}

#[cfg(test)]
mod tests;
