//! JSON, CSV and text renderings of analysis results.
//!
//! Floats in JSON and CSV are written with 17 significant digits
//! (`{:.16e}`), which round-trips every `f64` and keeps golden files stable.

use std::io;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::lens::LensSweep;
use crate::matrix::CMatrix;
use crate::morph::TransformReport;
use crate::quadrature::SpectralSummary;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty JSON formatter with fixed-width float output.
struct Fixed17<'a>(PrettyFormatter<'a>);

impl Formatter for Fixed17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` as indented JSON with 17-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(z: ComplexJson) -> Self {
        Complex64::new(z.re, z.im)
    }
}

fn matrix_json(m: &CMatrix) -> Vec<Vec<ComplexJson>> {
    m.to_rows().into_iter().map(|r| r.into_iter().map(Into::into).collect()).collect()
}

fn matrix_from_json(rows: Vec<Vec<ComplexJson>>) -> Result<CMatrix, String> {
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err("ragged matrix".into());
    }
    Ok(CMatrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(Into::into).collect()).collect()))
}

/// Documented JSON schema of a [`SpectralSummary`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummaryJson {
    pub lambda: f64,
    pub core: Vec<ComplexJson>,
    pub eta: Vec<Vec<ComplexJson>>,
    pub jacobian: Vec<Vec<ComplexJson>>,
    pub variance: f64,
    pub tail_energy: f64,
    pub est_error: f64,
    pub grid_n: usize,
}

impl From<&SpectralSummary> for SummaryJson {
    fn from(s: &SpectralSummary) -> Self {
        Self {
            lambda: s.lambda,
            core: s.core.iter().map(|&z| z.into()).collect(),
            eta: matrix_json(&s.eta),
            jacobian: matrix_json(&s.jacobian),
            variance: s.variance,
            tail_energy: s.tail_energy,
            est_error: s.est_error,
            grid_n: s.grid_n,
        }
    }
}

impl TryFrom<SummaryJson> for SpectralSummary {
    type Error = String;
    fn try_from(j: SummaryJson) -> Result<Self, String> {
        Ok(SpectralSummary {
            lambda: j.lambda,
            core: j.core.into_iter().map(Into::into).collect(),
            eta: matrix_from_json(j.eta)?,
            jacobian: matrix_from_json(j.jacobian)?,
            variance: j.variance,
            tail_energy: j.tail_energy,
            est_error: j.est_error,
            grid_n: j.grid_n,
        })
    }
}

pub fn summary_to_json(s: &SpectralSummary) -> String {
    to_json(&SummaryJson::from(s))
}

pub fn summary_from_json(text: &str) -> Result<SpectralSummary, String> {
    let j: SummaryJson = serde_json::from_str(text).map_err(|e| e.to_string())?;
    j.try_into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformJson {
    pub lambda: f64,
    pub tol: f64,
    pub eta_direct: Vec<Vec<ComplexJson>>,
    pub eta_predicted: Vec<Vec<ComplexJson>>,
    pub eta_residual: f64,
    pub jacobian_direct: Vec<Vec<ComplexJson>>,
    pub jacobian_predicted: Vec<Vec<ComplexJson>>,
    pub jacobian_residual: f64,
    pub jacobian_shift: Vec<Vec<ComplexJson>>,
    pub jacobian_residual_corrected: f64,
    pub passed: bool,
}

impl From<&TransformReport> for TransformJson {
    fn from(r: &TransformReport) -> Self {
        Self {
            lambda: r.lambda,
            tol: r.tol,
            eta_direct: matrix_json(&r.eta_direct),
            eta_predicted: matrix_json(&r.eta_predicted),
            eta_residual: r.eta_residual,
            jacobian_direct: matrix_json(&r.jacobian_direct),
            jacobian_predicted: matrix_json(&r.jacobian_predicted),
            jacobian_residual: r.jacobian_residual,
            jacobian_shift: matrix_json(&r.jacobian_shift),
            jacobian_residual_corrected: r.jacobian_residual_corrected,
            passed: r.passed(),
        }
    }
}

pub fn transform_to_json(r: &TransformReport) -> String {
    to_json(&TransformJson::from(r))
}

pub const CSV_HEADER: &str = "lambda,variance,variance_model,bound_gap,est_error";

/// Sweep rows as CSV, followed by `# lambda_star_*` comment lines.
pub fn sweep_to_csv(s: &LensSweep) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &s.rows {
        let cells = [r.lambda, r.variance, r.variance_model, r.bound_gap, r.est_error].map(fmt_f64);
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out.push_str(&format!("# lambda_star_closed={}\n", s.lambda_star_closed));
    match &s.lambda_star_empirical {
        Some(e) => {
            out.push_str(&format!("# lambda_star_empirical={}\n", fmt_f64(e.lambda)));
            if e.at_boundary {
                out.push_str("# lambda_star_empirical_at_boundary=true\n");
            }
        }
        None => out.push_str("# lambda_star_empirical=none\n"),
    }
    out
}

/// Human-readable real: 12 significant digits, trailing zeros trimmed.
pub fn fmt_short(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let digits = (11 - exp).max(0) as usize;
        let s = format!("{v:.digits$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.') } else { &s };
        s.to_string()
    } else {
        let s = format!("{v:.11e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{e}")
    }
}

/// Human-readable complex number. A part below `1e-12` of the modulus (or
/// of 1, whichever is larger) is printed as zero.
pub fn fmt_complex(z: Complex64) -> String {
    let floor = 1e-12 * z.norm().max(1.0);
    let chop = |x: f64| if x.abs() < floor { 0.0 } else { x };
    let (re, im) = (chop(z.re), chop(z.im));
    if im == 0.0 {
        fmt_short(re)
    } else if re == 0.0 {
        format!("{}i", fmt_short(im))
    } else if im < 0.0 {
        format!("{}-{}i", fmt_short(re), fmt_short(-im))
    } else {
        format!("{}+{}i", fmt_short(re), fmt_short(im))
    }
}

pub fn fmt_matrix(m: &CMatrix) -> String {
    let rows: Vec<String> = m
        .to_rows()
        .into_iter()
        .map(|r| format!("[{}]", r.into_iter().map(fmt_complex).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

pub fn summary_to_text(s: &SpectralSummary) -> String {
    let core = format!("[{}]", s.core.iter().map(|&z| fmt_complex(z)).collect::<Vec<_>>().join(", "));
    let lines = [
        ("lambda", fmt_short(s.lambda)),
        ("core", core),
        ("eta", fmt_matrix(&s.eta)),
        ("jacobian", fmt_matrix(&s.jacobian)),
        ("variance", fmt_short(s.variance)),
        ("variance_model", fmt_short(s.variance_model())),
        ("tail_energy", fmt_short(s.tail_energy)),
        ("sigma_bound", fmt_short(s.sigma_bound())),
        ("est_error", fmt_short(s.est_error)),
        ("grid_n", s.grid_n.to_string()),
    ];
    lines.iter().map(|(k, v)| format!("{k:<15}{v}\n")).collect()
}

pub fn transform_to_text(r: &TransformReport) -> String {
    let lines = [
        ("lambda", fmt_short(r.lambda)),
        ("eta_direct", fmt_matrix(&r.eta_direct)),
        ("eta_predicted", fmt_matrix(&r.eta_predicted)),
        ("eta_residual", fmt_short(r.eta_residual)),
        ("jac_direct", fmt_matrix(&r.jacobian_direct)),
        ("jac_predicted", fmt_matrix(&r.jacobian_predicted)),
        ("jac_residual", fmt_short(r.jacobian_residual)),
        ("jac_shift", fmt_matrix(&r.jacobian_shift)),
        ("jac_corrected", fmt_short(r.jacobian_residual_corrected)),
        ("status", if r.passed() { "pass".into() } else { format!("FAIL (tol {})", r.tol) }),
    ];
    lines.iter().map(|(k, v)| format!("{k:<15}{v}\n")).collect()
}
