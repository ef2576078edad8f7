//! Versioned JSON documents for branches, maps, and audits, plus the CSV
//! emitters.  All floating-point numbers are written with 17 significant
//! digits so that documents round-trip bit-exactly and repeated runs are
//! byte-identical.

use crate::audit::AuditReport;
use crate::conformal::{ConformalMapRecord, GeometryReport, MomentCurve};
use crate::error::{Error, Result};
use crate::fourier::TrigPolynomial;
use crate::measure::{MeasureKind, MeasureSpec};
use crate::series::PowerSeries;
use crate::solver::{Branch, BranchPoint, SolveMode};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::{self, Write};

pub const SCHEMA_VERSION: &str = "1.0";

/// Tool + schema identifier stamped into every document.
pub fn version_string() -> String {
    format!("qdom {} (schema {SCHEMA_VERSION})", env!("CARGO_PKG_VERSION"))
}

/// `f64` rendered with 17 significant digits (round-trips exactly).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// JSON formatter that writes every float through [`fmt_f64`].
pub struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }
}

/// Serialize any document with the fixed float format, newline-terminated.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serializer emits UTF-8"))
}

/// One Fourier mode of a real trigonometric polynomial (`n >= 0`; the
/// negative side is implied by conjugate symmetry).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModeEntry {
    pub n: i64,
    pub re: f64,
    pub im: f64,
}

fn poly_to_modes(p: &TrigPolynomial) -> Vec<ModeEntry> {
    p.iter_modes()
        .filter(|&(n, c)| n >= 0 && c != Complex64::ZERO)
        .map(|(n, c)| ModeEntry { n, re: c.re, im: c.im })
        .collect()
}

fn modes_to_poly(n_max: usize, modes: &[ModeEntry]) -> Result<TrigPolynomial> {
    let pairs: Vec<(i64, Complex64)> =
        modes.iter().map(|e| (e.n, Complex64::new(e.re, e.im))).collect();
    TrigPolynomial::from_modes(n_max, &pairs, true)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MeasureDoc {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    /// Coefficient band half-width the measure was materialized on.
    pub band: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<ModeEntry>>,
}

pub fn measure_doc(measure: &MeasureSpec) -> MeasureDoc {
    match *measure.kind() {
        MeasureKind::RieszProduct { depth } => MeasureDoc {
            kind: "riesz".into(),
            depth: Some(depth),
            band: measure.coeffs().n_max(),
            coeffs: None,
        },
        MeasureKind::Explicit => MeasureDoc {
            kind: "explicit".into(),
            depth: None,
            band: measure.coeffs().n_max(),
            coeffs: Some(poly_to_modes(measure.coeffs())),
        },
    }
}

pub fn doc_to_measure(doc: &MeasureDoc) -> Result<MeasureSpec> {
    match doc.kind.as_str() {
        "riesz" => {
            let depth = doc
                .depth
                .ok_or_else(|| Error::InvalidInput("riesz measure needs a depth".into()))?;
            MeasureSpec::riesz_product(depth, doc.band)
        }
        "explicit" => {
            let modes = doc
                .coeffs
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("explicit measure needs coeffs".into()))?;
            MeasureSpec::explicit(modes_to_poly(doc.band, modes)?)
        }
        other => Err(Error::InvalidInput(format!("unknown measure kind {other:?}"))),
    }
}

pub fn parse_mode(s: &str) -> Result<SolveMode> {
    match s {
        "singular" => Ok(SolveMode::Singular),
        "consistent" => Ok(SolveMode::Consistent),
        other => Err(Error::InvalidInput(format!(
            "unknown mode {other:?} (expected \"singular\" or \"consistent\")"
        ))),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchPointDoc {
    pub a: f64,
    pub log_c: f64,
    /// Quadrature constant `c = e^{log_c}/2`.
    pub c: f64,
    pub residual: f64,
    pub iterations: usize,
    pub contraction_est: f64,
    pub holder_seminorm: f64,
    pub projection_drift: f64,
    /// Band half-width the solve ran on.
    pub n_max: usize,
    pub w_modes: Vec<ModeEntry>,
}

pub fn point_doc(p: &BranchPoint) -> BranchPointDoc {
    BranchPointDoc {
        a: p.a,
        log_c: p.log_c,
        c: p.c_small(),
        residual: p.residual,
        iterations: p.iterations,
        contraction_est: p.contraction_est,
        holder_seminorm: p.holder_seminorm,
        projection_drift: p.projection_drift,
        n_max: p.w.n_max(),
        w_modes: poly_to_modes(&p.w),
    }
}

pub fn doc_to_point(doc: &BranchPointDoc) -> Result<BranchPoint> {
    Ok(BranchPoint {
        a: doc.a,
        w: modes_to_poly(doc.n_max, &doc.w_modes)?,
        log_c: doc.log_c,
        residual: doc.residual,
        contraction_est: doc.contraction_est,
        holder_seminorm: doc.holder_seminorm,
        projection_drift: doc.projection_drift,
        iterations: doc.iterations,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchDoc {
    pub schema: String,
    pub version: String,
    pub config: serde_json::Value,
    pub mode: String,
    pub measure: MeasureDoc,
    pub points: Vec<BranchPointDoc>,
    pub stop_reason: String,
    pub stop_detail: String,
}

pub fn branch_doc(
    branch: &Branch,
    mode: SolveMode,
    measure: &MeasureSpec,
    config: serde_json::Value,
) -> BranchDoc {
    BranchDoc {
        schema: format!("qdom.branch/{SCHEMA_VERSION}"),
        version: version_string(),
        config,
        mode: mode.as_str().to_string(),
        measure: measure_doc(measure),
        points: branch.points.iter().map(point_doc).collect(),
        stop_reason: branch.stop.as_str().to_string(),
        stop_detail: branch.stop_detail.clone().unwrap_or_default(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaylorEntry {
    pub k: usize,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapDoc {
    pub schema: String,
    pub version: String,
    pub mode: String,
    pub a: f64,
    pub log_c: f64,
    /// Series truncation order of `f'`.
    pub n_s: usize,
    pub w_n_max: usize,
    pub measure: MeasureDoc,
    pub w_modes: Vec<ModeEntry>,
    /// Nonzero Taylor coefficients of `f` (integrity check on load).
    pub f_taylor: Vec<TaylorEntry>,
}

pub fn map_doc(rec: &ConformalMapRecord) -> MapDoc {
    MapDoc {
        schema: format!("qdom.map/{SCHEMA_VERSION}"),
        version: version_string(),
        mode: rec.mode.as_str().to_string(),
        a: rec.a,
        log_c: rec.log_c,
        n_s: rec.n_s(),
        w_n_max: rec.w.n_max(),
        measure: measure_doc(&rec.measure),
        w_modes: poly_to_modes(&rec.w),
        f_taylor: rec
            .f
            .coeffs()
            .iter()
            .enumerate()
            .filter(|&(_, c)| *c != Complex64::ZERO)
            .map(|(k, c)| TaylorEntry { k, re: c.re, im: c.im })
            .collect(),
    }
}

/// Rebuild the full record from a map document.  The Taylor coefficients are
/// re-derived from `(W, a, μ)` — the document's own data — and compared with
/// the stored list; a mismatch means the file was edited or corrupted.
pub fn doc_to_map(doc: &MapDoc) -> Result<ConformalMapRecord> {
    let mode = parse_mode(&doc.mode)?;
    let measure = doc_to_measure(&doc.measure)?;
    let w = modes_to_poly(doc.w_n_max, &doc.w_modes)?;
    let nu = w.add_scaled(measure.coeffs(), Complex64::new(doc.a, 0.0));
    let herglotz = crate::measure::herglotz_coeffs(&nu, doc.n_s + 1);
    let fprime = herglotz.exp_neg();
    let f = fprime.integrate();
    let mut stored = PowerSeries::zeros(f.len());
    for e in &doc.f_taylor {
        if e.k >= f.len() {
            return Err(Error::InvalidInput(format!(
                "Taylor entry at order {} exceeds the declared truncation {}",
                e.k, doc.n_s
            )));
        }
        stored.set_coeff(e.k, Complex64::new(e.re, e.im));
    }
    let mut worst = 0.0f64;
    for k in 0..f.len() {
        worst = worst.max((f.coeff(k) - stored.coeff(k)).norm());
    }
    if worst > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "stored Taylor coefficients disagree with the document's own map data by {worst:.3e}"
        )));
    }
    Ok(ConformalMapRecord { mode, a: doc.a, w, measure, log_c: doc.log_c, herglotz, fprime, f })
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditDoc {
    pub schema: String,
    pub version: String,
    pub config: serde_json::Value,
    pub report: AuditReport,
}

pub fn audit_doc(report: AuditReport, config: serde_json::Value) -> AuditDoc {
    AuditDoc {
        schema: format!("qdom.audit/{SCHEMA_VERSION}"),
        version: version_string(),
        config,
        report,
    }
}

/// Two-column `x,y` CSV of a boundary polyline.
pub fn boundary_csv(points: &[Complex64]) -> String {
    let mut out = String::from("x,y\n");
    for p in points {
        out.push_str(&fmt_f64(p.re));
        out.push(',');
        out.push_str(&fmt_f64(p.im));
        out.push('\n');
    }
    out
}

/// Moment-curve table: one row per `(n, a)` pair.
pub fn moments_csv(curves: &[MomentCurve]) -> String {
    let mut out = String::from("n,a,re,im\n");
    for curve in curves {
        for &(a, v) in &curve.values {
            out.push_str(&format!(
                "{},{},{},{}\n",
                curve.n,
                fmt_f64(a),
                fmt_f64(v.re),
                fmt_f64(v.im)
            ));
        }
    }
    out
}

/// Per-point geometry table for a solved branch.
pub fn branch_geometry_csv(rows: &[(f64, GeometryReport)]) -> String {
    let mut out = String::from(
        "a,area,perimeter,perimeter_truncated,centroid_x,centroid_y,radius_mean,radius_std,circularity_deficit\n",
    );
    for (a, g) in rows {
        let cells = [
            *a,
            g.area,
            g.perimeter,
            g.perimeter_truncated,
            g.centroid.re,
            g.centroid.im,
            g.radius_mean,
            g.radius_std,
            g.circularity_deficit,
        ];
        let line: Vec<String> = cells.iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Write a file only through this helper so every artifact ends with exactly
/// one newline and identical bytes across reruns.
pub fn write_text(path: &std::path::Path, text: &str) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}
