//! File formats: the plain-text curve format, versioned JSON artifacts
//! and CSV exports. Serialization is deterministic: struct fields emit in
//! declaration order, floats render shortest-round-trip, and every list
//! is sorted upstream, so identical runs give identical bytes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use kspec_core::bracket::Fingerprint;
use kspec_core::curve::PolyCurve;
use kspec_core::genericity::{ConditionReport, GenericityReport};
use kspec_core::geom::{v3, Vec3};
use kspec_core::laurent::{display_in_var, Laurent};
use kspec_core::secants::Quadrisecant;
use kspec_core::spectrum::{
    BaseClasses, Comparison, FGradient, FMeasureResult, Provenance, Spectrum, SpectrumEntry,
    SpectrumKind, UnresolvedMass,
};
use kspec_core::{Error, Result};

pub const SPECTRUM_SCHEMA: &str = "kspec/spectrum/1";
pub const COMPARISON_SCHEMA: &str = "kspec/comparison/1";
pub const FMEASURE_SCHEMA: &str = "kspec/fmeasure/1";
pub const FGRADIENT_SCHEMA: &str = "kspec/fgradient/1";
pub const QUADRISECANTS_SCHEMA: &str = "kspec/quadrisecants/1";
pub const JONES_SCHEMA: &str = "kspec/jones/1";
pub const HEIGHT_SCHEMA: &str = "kspec/height/1";
pub const CLOSURE_SCHEMA: &str = "kspec/closure/1";
pub const NEIGHBORHOOD_SCHEMA: &str = "kspec/neighborhood/1";

// ---- Curve text format ----

/// Parse the plain-text curve format: first meaningful line "open" or
/// "closed", then one vertex per line as three decimals; '#' starts a
/// comment anywhere on a line.
pub fn parse_curve(text: &str, label: &str) -> Result<PolyCurve> {
    let mut closed: Option<bool> = None;
    let mut verts: Vec<Vec3> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        match closed {
            None => {
                closed = Some(match line {
                    "open" => false,
                    "closed" => true,
                    other => {
                        return Err(Error::Parse(format!(
                            "{label}:{}: expected \"open\" or \"closed\", got {other:?}",
                            lineno + 1
                        )))
                    }
                });
            }
            Some(_) => {
                let mut it = line.split_whitespace();
                let mut coord = || -> Result<f64> {
                    let tok = it.next().ok_or_else(|| {
                        Error::Parse(format!("{label}:{}: expected three coordinates", lineno + 1))
                    })?;
                    tok.parse::<f64>().map_err(|_| {
                        Error::Parse(format!("{label}:{}: bad number {tok:?}", lineno + 1))
                    })
                };
                let (x, y, z) = (coord()?, coord()?, coord()?);
                if it.next().is_some() {
                    return Err(Error::Parse(format!(
                        "{label}:{}: more than three coordinates",
                        lineno + 1
                    )));
                }
                verts.push(v3(x, y, z));
            }
        }
    }
    let closed = closed
        .ok_or_else(|| Error::Parse(format!("{label}: empty curve file")))?;
    PolyCurve::new(verts, closed, label)
}

/// Render a curve in the text format; numbers round-trip exactly.
pub fn format_curve(k: &PolyCurve) -> String {
    let mut s = String::new();
    s.push_str(if k.is_closed() { "closed\n" } else { "open\n" });
    for v in k.vertices() {
        s.push_str(&format!("{} {} {}\n", v.x, v.y, v.z));
    }
    s
}

pub fn load_curve(path: &Path) -> Result<PolyCurve> {
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "curve".to_string());
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_curve(&text, &label)
}

pub fn save_curve(path: &Path, k: &PolyCurve) -> Result<()> {
    fs::write(path, format_curve(k))
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

// ---- Shared JSON pieces ----

/// Laurent polynomial with both a readable rendering and exact terms,
/// ascending exponent order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyJson {
    pub display: String,
    pub terms: Vec<(i64, i64)>,
}

impl PolyJson {
    pub fn of(p: &Laurent, var: &str) -> PolyJson {
        PolyJson {
            display: display_in_var(p, var),
            terms: p.pairs().collect(),
        }
    }

    pub fn to_laurent(&self) -> Laurent {
        Laurent::from_pairs(&self.terms)
    }
}

/// Every run-configuration field, echoed into each artifact verbatim.
/// Fields that a subcommand does not use stay null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfigJson {
    pub seed: u64,
    pub directions: Option<u64>,
    pub samples_per_base: Option<u64>,
    pub h_frac: Option<f64>,
    pub bracket_cap: usize,
    pub simplify_budget: usize,
    pub tolerance: Option<f64>,
    pub output: Option<String>,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FingerprintJson {
    pub key: String,
    pub jones: PolyJson,
    pub under_jones: PolyJson,
    pub over_jones: PolyJson,
    pub height_bound: u32,
    pub knot_type: bool,
}

impl FingerprintJson {
    fn of(key: &str, fp: &Fingerprint) -> FingerprintJson {
        FingerprintJson {
            key: key.to_string(),
            jones: PolyJson::of(&fp.knotoid_jones, "A"),
            under_jones: PolyJson::of(&fp.under_jones, "A"),
            over_jones: PolyJson::of(&fp.over_jones, "A"),
            height_bound: fp.height_bound,
            knot_type: fp.knot_type,
        }
    }

    fn to_core(&self) -> Fingerprint {
        Fingerprint {
            knotoid_jones: self.jones.to_laurent(),
            under_jones: self.under_jones.to_laurent(),
            over_jones: self.over_jones.to_laurent(),
            height_bound: self.height_bound,
            knot_type: self.knot_type,
        }
    }
}

// ---- Spectrum artifact ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumEntryJson {
    pub fingerprint: FingerprintJson,
    pub count: u64,
    pub p_hat: f64,
    pub ci: (f64, f64),
    pub low_confidence: bool,
    pub representative: String,
    pub needs_review: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnresolvedJson {
    pub count: u64,
    pub p_hat: f64,
    pub ci: (f64, f64),
    pub max_crossings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseClassesJson {
    pub base: usize,
    pub keys: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProvenanceJson {
    pub label: String,
    pub seed: u64,
    pub n_dirs: u64,
    pub budget: usize,
    pub cap: usize,
    pub h: Option<f64>,
    pub bases: Vec<usize>,
    pub per_base: u64,
    pub config: RunConfigJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumJson {
    pub schema: String,
    pub kind: String,
    pub provenance: ProvenanceJson,
    pub entries: Vec<SpectrumEntryJson>,
    pub unresolved: UnresolvedJson,
    pub sampled: u64,
    pub failed: u64,
    pub degenerate: u64,
    pub per_base: Vec<BaseClassesJson>,
}

pub fn spectrum_to_json(s: &Spectrum, config: &RunConfigJson) -> SpectrumJson {
    SpectrumJson {
        schema: SPECTRUM_SCHEMA.to_string(),
        kind: match s.kind {
            SpectrumKind::OpenCurve => "open-curve".to_string(),
            SpectrumKind::KnotNeighborhood => "knot-neighborhood".to_string(),
        },
        provenance: ProvenanceJson {
            label: s.provenance.label.clone(),
            seed: s.provenance.seed,
            n_dirs: s.provenance.n_dirs,
            budget: s.provenance.budget,
            cap: s.provenance.cap,
            h: s.provenance.h,
            bases: s.provenance.bases.clone(),
            per_base: s.provenance.per_base,
            config: config.clone(),
        },
        entries: s
            .entries
            .iter()
            .map(|e| SpectrumEntryJson {
                fingerprint: FingerprintJson::of(&e.key, &e.fingerprint),
                count: e.count,
                p_hat: e.p_hat,
                ci: e.ci,
                low_confidence: e.low_confidence,
                representative: e.representative.clone(),
                needs_review: e.needs_review,
            })
            .collect(),
        unresolved: UnresolvedJson {
            count: s.unresolved.count,
            p_hat: s.unresolved.p_hat,
            ci: s.unresolved.ci,
            max_crossings: s.unresolved.max_crossings,
        },
        sampled: s.sampled,
        failed: s.failed,
        degenerate: s.degenerate,
        per_base: s
            .per_base
            .iter()
            .map(|b| BaseClassesJson { base: b.base, keys: b.keys.clone() })
            .collect(),
    }
}

/// Rebuild the in-memory spectrum from its artifact, exactly.
pub fn spectrum_from_json(j: &SpectrumJson) -> Result<Spectrum> {
    if j.schema != SPECTRUM_SCHEMA {
        return Err(Error::Parse(format!("unknown spectrum schema {:?}", j.schema)));
    }
    let kind = match j.kind.as_str() {
        "open-curve" => SpectrumKind::OpenCurve,
        "knot-neighborhood" => SpectrumKind::KnotNeighborhood,
        other => return Err(Error::Parse(format!("unknown spectrum kind {other:?}"))),
    };
    Ok(Spectrum {
        kind,
        provenance: Provenance {
            label: j.provenance.label.clone(),
            seed: j.provenance.seed,
            n_dirs: j.provenance.n_dirs,
            budget: j.provenance.budget,
            cap: j.provenance.cap,
            h: j.provenance.h,
            bases: j.provenance.bases.clone(),
            per_base: j.provenance.per_base,
        },
        entries: j
            .entries
            .iter()
            .map(|e| SpectrumEntry {
                fingerprint: e.fingerprint.to_core(),
                key: e.fingerprint.key.clone(),
                count: e.count,
                p_hat: e.p_hat,
                ci: e.ci,
                low_confidence: e.low_confidence,
                representative: e.representative.clone(),
                needs_review: e.needs_review,
            })
            .collect(),
        unresolved: UnresolvedMass {
            count: j.unresolved.count,
            p_hat: j.unresolved.p_hat,
            ci: j.unresolved.ci,
            max_crossings: j.unresolved.max_crossings,
        },
        sampled: j.sampled,
        failed: j.failed,
        degenerate: j.degenerate,
        per_base: j
            .per_base
            .iter()
            .map(|b| BaseClasses { base: b.base, keys: b.keys.clone() })
            .collect(),
    })
}

/// CSV of the entries table, one row per class plus an unresolved row.
pub fn spectrum_csv(s: &Spectrum) -> String {
    let mut out = String::from(
        "key,count,p_hat,ci_lo,ci_hi,height_bound,knot_type,low_confidence,needs_review,representative\n",
    );
    for e in &s.entries {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            csv_quote(&e.key),
            e.count,
            e.p_hat,
            e.ci.0,
            e.ci.1,
            e.fingerprint.height_bound,
            e.fingerprint.knot_type,
            e.low_confidence,
            e.needs_review,
            csv_quote(&e.representative)
        ));
    }
    out.push_str(&format!(
        "{},{},{},{},{},,,,,\n",
        csv_quote("(unresolved)"),
        s.unresolved.count,
        s.unresolved.p_hat,
        s.unresolved.ci.0,
        s.unresolved.ci.1
    ));
    out
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains(' ') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

// ---- Comparison artifact ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeightSliceJson {
    pub height: u32,
    pub shared: u64,
    pub only_a: u64,
    pub only_b: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonJson {
    pub schema: String,
    pub a_label: String,
    pub b_label: String,
    pub verdict: String,
    pub shared: Vec<String>,
    pub only_a: Vec<String>,
    pub only_b: Vec<String>,
    pub per_height: Vec<HeightSliceJson>,
}

pub fn comparison_to_json(c: &Comparison) -> ComparisonJson {
    ComparisonJson {
        schema: COMPARISON_SCHEMA.to_string(),
        a_label: c.a_label.clone(),
        b_label: c.b_label.clone(),
        verdict: c.verdict().to_string(),
        shared: c.shared.clone(),
        only_a: c.only_a.clone(),
        only_b: c.only_b.clone(),
        per_height: c
            .per_height
            .iter()
            .map(|hs| HeightSliceJson {
                height: hs.height,
                shared: hs.shared,
                only_a: hs.only_a,
                only_b: hs.only_b,
            })
            .collect(),
    }
}

// ---- f-measure and gradient artifacts ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FCoeffJson {
    pub exp: i64,
    pub num: i128,
    pub den: i128,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FMeasureJson {
    pub schema: String,
    pub label: String,
    pub n_dirs: u64,
    pub resolved: u64,
    pub unresolved: u64,
    pub failed: u64,
    pub degenerate: u64,
    pub coeffs: Vec<FCoeffJson>,
    pub config: RunConfigJson,
}

pub fn fmeasure_to_json(label: &str, f: &FMeasureResult, config: &RunConfigJson) -> FMeasureJson {
    FMeasureJson {
        schema: FMEASURE_SCHEMA.to_string(),
        label: label.to_string(),
        n_dirs: f.n_dirs,
        resolved: f.resolved,
        unresolved: f.unresolved,
        failed: f.failed,
        degenerate: f.degenerate,
        coeffs: f
            .coeffs
            .iter()
            .map(|c| FCoeffJson { exp: c.exp, num: c.num, den: c.den, se: c.se })
            .collect(),
        config: config.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradCoeffJson {
    pub exp: i64,
    pub value: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FGradientJson {
    pub schema: String,
    pub label: String,
    pub base: usize,
    pub eps: f64,
    pub n_dirs: u64,
    pub pairs: u64,
    pub skipped: u64,
    pub degenerate: u64,
    pub coeffs: Vec<GradCoeffJson>,
    pub config: RunConfigJson,
}

pub fn fgradient_to_json(
    label: &str,
    base: usize,
    g: &FGradient,
    config: &RunConfigJson,
) -> FGradientJson {
    FGradientJson {
        schema: FGRADIENT_SCHEMA.to_string(),
        label: label.to_string(),
        base,
        eps: g.eps,
        n_dirs: g.n_dirs,
        pairs: g.pairs,
        skipped: g.skipped,
        degenerate: g.degenerate,
        coeffs: g
            .coeffs
            .iter()
            .map(|c| GradCoeffJson { exp: c.exp, value: c.value, se: c.se })
            .collect(),
        config: config.clone(),
    }
}

// ---- Quadrisecant artifact ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadrisecantJson {
    pub point: [f64; 3],
    pub dir: [f64; 3],
    pub edges: [usize; 4],
    pub params: [f64; 4],
    pub line_params: [f64; 4],
    pub class: String,
}

/// Residuals may be infinite (no applicable configuration); JSON has no
/// infinity, so those serialize as null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionJson {
    pub name: String,
    pub pass: bool,
    pub residual: Option<f64>,
    pub offenders: Vec<usize>,
    pub detail: String,
}

impl ConditionJson {
    fn of(name: &str, c: &ConditionReport) -> ConditionJson {
        ConditionJson {
            name: name.to_string(),
            pass: c.pass,
            residual: if c.residual.is_finite() { Some(c.residual) } else { None },
            offenders: c.offenders.clone(),
            detail: c.detail.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenericityJson {
    pub tol: f64,
    pub pass: bool,
    pub conditions: Vec<ConditionJson>,
    pub notes: Vec<String>,
}

pub fn genericity_to_json(g: &GenericityReport) -> GenericityJson {
    GenericityJson {
        tol: g.tol,
        pass: g.pass(),
        conditions: vec![
            ConditionJson::of("ruled-surface", &g.ruled_surface),
            ConditionJson::of("secant-order", &g.secant_order),
            ConditionJson::of("corner-plane", &g.corner_plane),
        ],
        notes: g.notes.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadReportJson {
    pub schema: String,
    pub label: String,
    pub tol: f64,
    pub count: usize,
    pub simple: usize,
    pub flipped: usize,
    pub alternating: usize,
    pub genericity: GenericityJson,
    pub items: Vec<QuadrisecantJson>,
    pub config: RunConfigJson,
}

pub fn quadrisecants_to_json(
    label: &str,
    tol: f64,
    items: &[Quadrisecant],
    genericity: &GenericityReport,
    config: &RunConfigJson,
) -> QuadReportJson {
    use kspec_core::secants::AlternationClass;
    let class_count = |c: AlternationClass| items.iter().filter(|q| q.class == c).count();
    QuadReportJson {
        schema: QUADRISECANTS_SCHEMA.to_string(),
        label: label.to_string(),
        tol,
        count: items.len(),
        simple: class_count(AlternationClass::Simple),
        flipped: class_count(AlternationClass::Flipped),
        alternating: class_count(AlternationClass::Alternating),
        genericity: genericity_to_json(genericity),
        items: items
            .iter()
            .map(|q| QuadrisecantJson {
                point: [q.point.x, q.point.y, q.point.z],
                dir: [q.dir.x, q.dir.y, q.dir.z],
                edges: q.edges,
                params: q.params,
                line_params: q.line_params,
                class: q.class.name().to_string(),
            })
            .collect(),
        config: config.clone(),
    }
}

/// CSV summary of a quadrisecant run: one row per alternation class.
pub fn quadrisecant_csv(items: &[Quadrisecant]) -> String {
    use kspec_core::secants::AlternationClass;
    let mut out = String::from("class,count\n");
    for class in [
        AlternationClass::Simple,
        AlternationClass::Flipped,
        AlternationClass::Alternating,
    ] {
        let n = items.iter().filter(|q| q.class == class).count();
        out.push_str(&format!("{},{n}\n", class.name()));
    }
    out
}

// ---- Small artifacts: jones, height, closure, neighborhood ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JonesJson {
    pub schema: String,
    pub label: String,
    /// Simplified diagram the polynomials were computed from.
    pub code: String,
    pub closed: bool,
    /// Knot Jones for closed inputs; null for open ones.
    pub jones: Option<PolyJson>,
    /// Knotoid triple for open inputs; null for closed ones.
    pub knotoid_jones: Option<PolyJson>,
    pub under_jones: Option<PolyJson>,
    pub over_jones: Option<PolyJson>,
    pub height_bound: Option<u32>,
    pub knot_type: Option<bool>,
    pub config: RunConfigJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeightJson {
    pub schema: String,
    pub label: String,
    pub code: String,
    /// Exact diagrammatic height of the presented diagram.
    pub height: u32,
    /// Least height seen while simplifying: an upper bound for the
    /// knotoid's height. Equals `height` when no simplification ran.
    pub height_bound: u32,
    pub config: RunConfigJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosureJson {
    pub schema: String,
    pub label: String,
    pub kind: String,
    pub crossings_added: usize,
    pub code: String,
    /// Normalized Jones of the closed-up diagram; null for virtual
    /// closures, which leave the plane.
    pub jones: Option<PolyJson>,
    pub config: RunConfigJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeighborhoodJson {
    pub schema: String,
    pub label: String,
    pub base: usize,
    pub h: f64,
    pub samples: usize,
    /// Each sample as a vertex list; all curves are open.
    pub curves: Vec<Vec<[f64; 3]>>,
    pub config: RunConfigJson,
}

// ---- Pretty printing ----

/// Canonical artifact rendering: two-space pretty JSON plus newline.
pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact serialization");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use kspec_core::curve::{open_at, torus_knot};
    use kspec_core::spectrum::knotoid_spectrum;

    #[test]
    fn curve_text_round_trips_exactly() {
        let k = torus_knot(2, 3, 32).unwrap();
        let text = format_curve(&k);
        let back = parse_curve(&text, k.label()).unwrap();
        assert_eq!(back.vertices(), k.vertices());
        assert!(back.is_closed());
        assert_eq!(format_curve(&back), text);
    }

    #[test]
    fn curve_parser_reports_malformed_input() {
        assert!(matches!(parse_curve("", "t"), Err(Error::Parse(_))));
        assert!(matches!(parse_curve("sideways\n0 0 0\n", "t"), Err(Error::Parse(_))));
        assert!(matches!(parse_curve("open\n0 0\n", "t"), Err(Error::Parse(_))));
        assert!(matches!(parse_curve("open\n0 0 0 0\n", "t"), Err(Error::Parse(_))));
        assert!(matches!(parse_curve("open\n0 0 zero\n", "t"), Err(Error::Parse(_))));
        let commented = "# header\nopen # kind\n0 0 0\n# mid\n1 0 0 # tail\n";
        let k = parse_curve(commented, "t").unwrap();
        assert_eq!(k.vertices().len(), 2);
        assert!(!k.is_closed());
    }

    #[test]
    fn spectrum_json_round_trips_byte_identically() {
        let k = torus_knot(2, 3, 32).unwrap();
        let l = open_at(&k, 0).unwrap();
        let s = knotoid_spectrum(&l, 64, 11, 200, 16).unwrap();
        let config = RunConfigJson {
            seed: 11,
            directions: Some(64),
            bracket_cap: 16,
            simplify_budget: 200,
            workers: 1,
            ..RunConfigJson::default()
        };
        let j = spectrum_to_json(&s, &config);
        let text = to_pretty(&j);
        let back: SpectrumJson = serde_json::from_str(&text).unwrap();
        assert_eq!(to_pretty(&back), text);
        let rebuilt = spectrum_from_json(&back).unwrap();
        assert_eq!(rebuilt, s);
    }

    #[test]
    fn csv_quotes_fields_with_separators() {
        assert_eq!(csv_quote("plain"), "plain");
        assert_eq!(csv_quote("a,b"), "\"a,b\"");
        assert_eq!(csv_quote("J=1 U=1"), "\"J=1 U=1\"");
        assert_eq!(csv_quote("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
