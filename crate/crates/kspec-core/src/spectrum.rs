//! Monte Carlo spectra of open curves and knot neighborhoods.
//!
//! A spectrum samples projection directions, classifies each projected
//! diagram by its fingerprint, and reports class probabilities with
//! Wilson-score intervals. All counting is exact; floats appear only in
//! the derived estimates. Accumulation runs through [`Tally`], whose merge
//! is commutative and associative, so any direction-level work split
//! produces the identical spectrum.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::bracket::{classify_simplified, jones_normalized, Classification, Fingerprint};
use crate::curve::{open_at, sample_neighborhood, OpenCurve, PolyCurve};
use crate::diagram::Diagram;
use crate::geom::Vec3;
use crate::laurent::{display_in_var, Laurent};
use crate::moves::simplify;
use crate::projection::{direction_at, project, retry_direction};
use crate::rng::derive2;
use crate::{Error, Result};

/// Degenerate directions are redrawn at most this many times.
pub const RETRY_CAP: u32 = 10;

/// 95% two-sided normal quantile for Wilson intervals.
const Z95: f64 = 1.959963984540054;

/// Entries observed fewer than this many times carry a low-confidence flag.
const LOW_CONFIDENCE_BELOW: u64 = 5;

/// Height bounds above this are flagged for review instead of trusted.
const HEIGHT_CEILING: u32 = 3;

// ---- Direction classification ----

/// Result of projecting one direction index, after degeneracy retries.
#[derive(Debug, Clone)]
pub enum Projected {
    Diagram { diagram: Diagram, retries: u32 },
    /// Every allowed redraw stayed degenerate.
    Exhausted { retries: u32 },
}

/// Project one open curve along the direction for `index`, redrawing on
/// degeneracy up to [`RETRY_CAP`] times.
pub fn project_open(l: &OpenCurve, seed: u64, index: u64) -> Result<Projected> {
    let mut retries = 0u32;
    for attempt in 0..=RETRY_CAP {
        let dir = if attempt == 0 {
            direction_at(seed, index)
        } else {
            retry_direction(seed, index, attempt)
        };
        match project(&l.curve, dir.unit) {
            Ok(shadow) => {
                return Ok(Projected::Diagram {
                    diagram: Diagram::from_shadow(&shadow)?,
                    retries,
                })
            }
            Err(Error::DegenerateProjection(_)) => retries += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(Projected::Exhausted { retries })
}

/// One direction's contribution to a spectrum.
#[derive(Debug, Clone)]
pub enum DirOutcome {
    Classified {
        class: Classification,
        /// Code of the simplified diagram, kept as class representative.
        code: String,
        retries: u32,
    },
    Failed {
        retries: u32,
    },
}

/// Project, simplify and fingerprint one direction index. Deterministic in
/// (curve, seed, index), independent of every other index.
pub fn direction_outcome(
    l: &OpenCurve,
    seed: u64,
    index: u64,
    budget: usize,
    cap: usize,
) -> Result<DirOutcome> {
    match project_open(l, seed, index)? {
        Projected::Exhausted { retries } => Ok(DirOutcome::Failed { retries }),
        Projected::Diagram { diagram, retries } => {
            let s = simplify(&diagram, budget)?;
            let hb = s
                .height_bound
                .ok_or_else(|| Error::Internal(format!("open simplify without a height bound")))?;
            let class = classify_simplified(&s.diagram, hb, budget, cap)?;
            Ok(DirOutcome::Classified {
                class,
                code: s.diagram.code(),
                retries,
            })
        }
    }
}

// ---- Tally ----

fn class_key(fp: &Fingerprint) -> String {
    format!(
        "J={} U={} O={}",
        display_in_var(&fp.knotoid_jones, "A"),
        display_in_var(&fp.under_jones, "A"),
        display_in_var(&fp.over_jones, "A")
    )
}

#[derive(Debug, Clone, PartialEq)]
struct ClassAcc {
    fp: Fingerprint,
    count: u64,
    /// Lexicographically least simplified code seen; schedule-independent.
    rep: String,
}

/// Exact count table over fingerprint classes. `merge` is commutative and
/// associative, and `record` at distinct indices commutes through it, so
/// spectra never depend on how directions were scheduled.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tally {
    resolved: u64,
    unresolved: u64,
    unresolved_max: usize,
    failed: u64,
    degenerate: u64,
    classes: BTreeMap<String, ClassAcc>,
}

impl Tally {
    pub fn record(&mut self, out: &DirOutcome) {
        match out {
            DirOutcome::Failed { retries } => {
                self.degenerate += *retries as u64;
                self.failed += 1;
            }
            DirOutcome::Classified { class, code, retries } => {
                self.degenerate += *retries as u64;
                match class {
                    Classification::Unresolved { crossings } => {
                        self.unresolved += 1;
                        self.unresolved_max = self.unresolved_max.max(*crossings);
                    }
                    Classification::Resolved(fp) => {
                        self.resolved += 1;
                        let key = class_key(fp);
                        match self.classes.get_mut(&key) {
                            None => {
                                self.classes.insert(
                                    key,
                                    ClassAcc { fp: fp.clone(), count: 1, rep: code.clone() },
                                );
                            }
                            Some(acc) => {
                                acc.count += 1;
                                if fp.height_bound < acc.fp.height_bound {
                                    acc.fp.height_bound = fp.height_bound;
                                    acc.fp.knot_type = fp.height_bound == 0;
                                }
                                if *code < acc.rep {
                                    acc.rep = code.clone();
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.resolved += other.resolved;
        self.unresolved += other.unresolved;
        self.unresolved_max = self.unresolved_max.max(other.unresolved_max);
        self.failed += other.failed;
        self.degenerate += other.degenerate;
        for (key, acc) in other.classes {
            match self.classes.get_mut(&key) {
                None => {
                    self.classes.insert(key, acc);
                }
                Some(mine) => {
                    mine.count += acc.count;
                    if acc.fp.height_bound < mine.fp.height_bound {
                        mine.fp.height_bound = acc.fp.height_bound;
                        mine.fp.knot_type = acc.fp.height_bound == 0;
                    }
                    if acc.rep < mine.rep {
                        mine.rep = acc.rep;
                    }
                }
            }
        }
        self
    }

    /// Sorted fingerprint keys seen so far.
    pub fn class_keys(&self) -> Vec<String> {
        self.classes.keys().cloned().collect()
    }

    fn knot_type_keys(&self) -> Vec<&String> {
        self.classes
            .iter()
            .filter(|(_, a)| a.fp.knot_type)
            .map(|(k, _)| k)
            .collect()
    }
}

// ---- Spectrum ----

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    OpenCurve,
    KnotNeighborhood,
}

/// Everything needed to reproduce a spectrum run.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub label: String,
    pub seed: u64,
    /// Directions per sampled curve.
    pub n_dirs: u64,
    pub budget: usize,
    pub cap: usize,
    /// Neighborhood radius; open-curve spectra carry none.
    pub h: Option<f64>,
    pub bases: Vec<usize>,
    pub per_base: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry {
    /// Height fields aggregated: least bound observed in the class.
    pub fingerprint: Fingerprint,
    pub key: String,
    pub count: u64,
    pub p_hat: f64,
    /// 95% Wilson interval.
    pub ci: (f64, f64),
    pub low_confidence: bool,
    /// Simplified code of one member diagram.
    pub representative: String,
    /// Height bound above the generic ceiling; inspect by hand.
    pub needs_review: bool,
}

/// Directions whose diagram stayed above the bracket cap after simplifying.
#[derive(Debug, Clone, PartialEq)]
pub struct UnresolvedMass {
    pub count: u64,
    pub p_hat: f64,
    pub ci: (f64, f64),
    pub max_crossings: usize,
}

/// Per-base class sets of a knot-neighborhood spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseClasses {
    pub base: usize,
    pub keys: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub kind: SpectrumKind,
    pub provenance: Provenance,
    /// Sorted by fingerprint key.
    pub entries: Vec<SpectrumEntry>,
    pub unresolved: UnresolvedMass,
    /// Directions that produced a diagram; the p-hat denominator.
    /// Entry counts plus the unresolved count equal this exactly.
    pub sampled: u64,
    /// Directions abandoned after every redraw stayed degenerate.
    pub failed: u64,
    /// Total degenerate redraw events.
    pub degenerate: u64,
    pub per_base: Vec<BaseClasses>,
}

/// Wilson score interval at 95%, clamped into [0, 1] and widened to the
/// point estimate when roundoff would exclude it.
fn wilson(count: u64, total: u64) -> (f64, f64) {
    let n = total as f64;
    let p = count as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (Z95 / denom) * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

fn finalize(
    tally: Tally,
    kind: SpectrumKind,
    provenance: Provenance,
    per_base: Vec<BaseClasses>,
) -> Result<Spectrum> {
    let attempted = tally.resolved + tally.unresolved + tally.failed;
    if tally.failed * 100 > attempted {
        return Err(Error::DegeneracyExhausted {
            failed: tally.failed as usize,
            attempts: RETRY_CAP,
        });
    }
    let kt = tally.knot_type_keys();
    if kt.len() > 1 {
        return Err(Error::KnotTypeConflict(format!(
            "{} distinct knot-type classes in one spectrum: {} / {}",
            kt.len(),
            kt[0],
            kt[1]
        )));
    }
    let sampled = tally.resolved + tally.unresolved;
    let entries = tally
        .classes
        .iter()
        .map(|(key, acc)| SpectrumEntry {
            fingerprint: acc.fp.clone(),
            key: key.clone(),
            count: acc.count,
            p_hat: acc.count as f64 / sampled as f64,
            ci: wilson(acc.count, sampled),
            low_confidence: acc.count < LOW_CONFIDENCE_BELOW,
            representative: acc.rep.clone(),
            needs_review: acc.fp.height_bound > HEIGHT_CEILING,
        })
        .collect();
    let unresolved = UnresolvedMass {
        count: tally.unresolved,
        p_hat: tally.unresolved as f64 / sampled as f64,
        ci: if tally.unresolved == 0 {
            (0.0, 0.0)
        } else {
            wilson(tally.unresolved, sampled)
        },
        max_crossings: tally.unresolved_max,
    };
    Ok(Spectrum {
        kind,
        provenance,
        entries,
        unresolved,
        sampled,
        failed: tally.failed,
        degenerate: tally.degenerate,
        per_base,
    })
}

impl Spectrum {
    /// The knot-type entry, when one was observed.
    pub fn knot_type_entry(&self) -> Option<&SpectrumEntry> {
        self.entries.iter().find(|e| e.fingerprint.knot_type)
    }

    /// View without the knot-type class: the proper part of a knot
    /// spectrum. Totals are kept, so the view is not renormalized.
    pub fn pkspec(&self) -> Spectrum {
        let mut out = self.clone();
        out.entries.retain(|e| !e.fingerprint.knot_type);
        out
    }
}

/// Entries whose height bound equals `m`. Bounds-based: a class sits at its
/// least observed bound, which may still overestimate true height. Totals
/// and unresolved mass are kept from the source, not renormalized.
pub fn height_subset(s: &Spectrum, m: u32) -> Spectrum {
    let mut out = s.clone();
    out.entries.retain(|e| e.fingerprint.height_bound == m);
    out
}

// ---- Spectrum drivers ----

/// Assemble an open-curve spectrum from an externally accumulated tally.
/// The tally must cover exactly the direction indices `0..n_dirs` of
/// `seed`; merge order never matters. Seam for parallel drivers.
pub fn knotoid_spectrum_from_tally(
    l: &OpenCurve,
    n_dirs: u64,
    seed: u64,
    budget: usize,
    cap: usize,
    tally: Tally,
) -> Result<Spectrum> {
    let provenance = Provenance {
        label: l.curve.label().to_string(),
        seed,
        n_dirs,
        budget,
        cap,
        h: None,
        bases: Vec::new(),
        per_base: 0,
    };
    finalize(tally, SpectrumKind::OpenCurve, provenance, Vec::new())
}

/// Knotoid spectrum of one open curve over `n_dirs` sampled directions.
pub fn knotoid_spectrum(
    l: &OpenCurve,
    n_dirs: u64,
    seed: u64,
    budget: usize,
    cap: usize,
) -> Result<Spectrum> {
    if n_dirs == 0 {
        return Err(Error::InvalidParameter(format!("need at least one direction")));
    }
    let mut tally = Tally::default();
    for i in 0..n_dirs {
        tally.record(&direction_outcome(l, seed, i, budget, cap)?);
    }
    knotoid_spectrum_from_tally(l, n_dirs, seed, budget, cap, tally)
}

/// Knot-neighborhood spectrum: at every base, open the knot there, draw
/// `per_base` curves from the radius-`h` neighborhood, and aggregate their
/// direction classes. Weights are uniform over bases. Every base must show
/// the same single knot-type class, or the run fails loudly.
pub fn knot_spectrum(
    k: &PolyCurve,
    h: f64,
    bases: &[usize],
    per_base: u64,
    n_dirs: u64,
    seed: u64,
    budget: usize,
    cap: usize,
) -> Result<Spectrum> {
    if !k.is_closed() {
        return Err(Error::InvalidParameter(format!(
            "{}: knot spectra need a closed curve",
            k.label()
        )));
    }
    if bases.is_empty() || per_base == 0 || n_dirs == 0 {
        return Err(Error::InvalidParameter(format!(
            "need at least one base, sample and direction"
        )));
    }
    let tr = k.tube_radius();
    if !(h > 0.0) || h >= tr {
        return Err(Error::InvalidParameter(format!(
            "h = {h} outside (0, tube radius {tr})"
        )));
    }
    let mut per_base_tallies = Vec::with_capacity(bases.len());
    for &b in bases {
        let mut bt = Tally::default();
        for s in 0..per_base {
            bt = bt.merge(base_sample_tally(k, h, b, s, n_dirs, seed, budget, cap)?);
        }
        per_base_tallies.push(bt);
    }
    knot_spectrum_from_tallies(k, h, bases, per_base, n_dirs, seed, budget, cap, per_base_tallies)
}

/// Tally of one neighborhood sample: every direction of sample `s` drawn
/// at base `b`. The independent unit of work for parallel schedules; the
/// serial driver folds these in (base, sample) order, but any grouping
/// merges to the same tally.
pub fn base_sample_tally(
    k: &PolyCurve,
    h: f64,
    b: usize,
    s: u64,
    n_dirs: u64,
    seed: u64,
    budget: usize,
    cap: usize,
) -> Result<Tally> {
    let opened = open_at(k, b)?;
    let l = sample_neighborhood(&opened, h, derive2(seed, "neighborhood", b as u64, s))?;
    let dir_seed = derive2(seed, "directions", b as u64, s);
    let mut bt = Tally::default();
    for i in 0..n_dirs {
        bt.record(&direction_outcome(&l, dir_seed, i, budget, cap)?);
    }
    Ok(bt)
}

/// Assemble a knot-neighborhood spectrum from one merged tally per base,
/// in `bases` order. Applies the same per-base knot-type checks as the
/// serial driver. Seam for parallel drivers.
pub fn knot_spectrum_from_tallies(
    k: &PolyCurve,
    h: f64,
    bases: &[usize],
    per_base: u64,
    n_dirs: u64,
    seed: u64,
    budget: usize,
    cap: usize,
    per_base_tallies: Vec<Tally>,
) -> Result<Spectrum> {
    if per_base_tallies.len() != bases.len() {
        return Err(Error::Internal(format!(
            "{} tallies for {} bases",
            per_base_tallies.len(),
            bases.len()
        )));
    }
    let mut global = Tally::default();
    let mut per_base_out = Vec::with_capacity(bases.len());
    let mut knot_type_key: Option<String> = None;
    for (&b, bt) in bases.iter().zip(per_base_tallies) {
        let kt = bt.knot_type_keys();
        match kt.as_slice() {
            [] => {
                return Err(Error::KnotTypeConflict(format!(
                    "no knot-type class observed at base {b}; sample wider"
                )))
            }
            [one] => match &knot_type_key {
                None => knot_type_key = Some((*one).clone()),
                Some(prev) if *prev == **one => {}
                Some(prev) => {
                    return Err(Error::KnotTypeConflict(format!(
                        "bases disagree on the knot type: {prev} vs {one}"
                    )))
                }
            },
            [a, b2, ..] => {
                return Err(Error::KnotTypeConflict(format!(
                    "base {b} shows two knot-type classes: {a} / {b2}"
                )))
            }
        }
        per_base_out.push(BaseClasses { base: b, keys: bt.class_keys() });
        global = global.merge(bt);
    }
    let provenance = Provenance {
        label: k.label().to_string(),
        seed,
        n_dirs,
        budget,
        cap,
        h: Some(h),
        bases: bases.to_vec(),
        per_base,
    };
    finalize(global, SpectrumKind::KnotNeighborhood, provenance, per_base_out)
}

// ---- Comparison ----

#[derive(Debug, Clone, PartialEq)]
pub struct HeightSlice {
    pub height: u32,
    pub shared: u64,
    pub only_a: u64,
    pub only_b: u64,
}

/// Fingerprint-set comparison of two spectra. Differences certify the
/// sources distinct; coincidence never certifies equivalence, so the
/// verdict language stops at "not distinguished".
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub a_label: String,
    pub b_label: String,
    pub shared: Vec<String>,
    pub only_a: Vec<String>,
    pub only_b: Vec<String>,
    pub per_height: Vec<HeightSlice>,
}

impl Comparison {
    pub fn distinguished(&self) -> bool {
        !self.only_a.is_empty() || !self.only_b.is_empty()
    }

    pub fn verdict(&self) -> &'static str {
        if self.distinguished() {
            "distinguished"
        } else {
            "not distinguished"
        }
    }
}

impl core::fmt::Display for Comparison {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        writeln!(f, "{} vs {}: {}", self.a_label, self.b_label, self.verdict())?;
        writeln!(
            f,
            "  shared classes: {}; only in {}: {}; only in {}: {}",
            self.shared.len(),
            self.a_label,
            self.only_a.len(),
            self.b_label,
            self.only_b.len()
        )?;
        for hs in &self.per_height {
            writeln!(
                f,
                "  height {}: shared {}, only-a {}, only-b {}",
                hs.height, hs.shared, hs.only_a, hs.only_b
            )?;
        }
        Ok(())
    }
}

/// Compare the fingerprint sets of two spectra, overall and per height
/// level. Both runs must share the fingerprint configuration.
pub fn compare(a: &Spectrum, b: &Spectrum) -> Result<Comparison> {
    if a.provenance.budget != b.provenance.budget || a.provenance.cap != b.provenance.cap {
        return Err(Error::InvalidParameter(format!(
            "spectra use different fingerprint configurations"
        )));
    }
    let heights = |s: &Spectrum| -> BTreeMap<String, u32> {
        s.entries
            .iter()
            .map(|e| (e.key.clone(), e.fingerprint.height_bound))
            .collect()
    };
    let ka = heights(a);
    let kb = heights(b);
    let mut shared = Vec::new();
    let mut only_a = Vec::new();
    let mut only_b = Vec::new();
    let mut slices: BTreeMap<u32, HeightSlice> = BTreeMap::new();
    let blank = |h: u32| HeightSlice { height: h, shared: 0, only_a: 0, only_b: 0 };
    for (key, &h) in &ka {
        let hs = slices.entry(h).or_insert_with(|| blank(h));
        if kb.contains_key(key) {
            shared.push(key.clone());
            hs.shared += 1;
        } else {
            only_a.push(key.clone());
            hs.only_a += 1;
        }
    }
    for (key, &h) in &kb {
        if !ka.contains_key(key) {
            only_b.push(key.clone());
            slices.entry(h).or_insert_with(|| blank(h)).only_b += 1;
        }
    }
    Ok(Comparison {
        a_label: a.provenance.label.clone(),
        b_label: b.provenance.label.clone(),
        shared,
        only_a,
        only_b,
        per_height: slices.into_values().collect(),
    })
}

// ---- f-measure ----

/// One coefficient of the mean normalized Jones: exact rational mean plus
/// a standard error of that mean.
#[derive(Debug, Clone, PartialEq)]
pub struct FCoeff {
    pub exp: i64,
    pub num: i128,
    pub den: i128,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FMeasureResult {
    pub n_dirs: u64,
    pub resolved: u64,
    pub unresolved: u64,
    pub failed: u64,
    pub degenerate: u64,
    /// Sorted by exponent; zero mean with zero spread is dropped.
    pub coeffs: Vec<FCoeff>,
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Mean and standard error from exact per-exponent sums over n draws.
fn moment_stats(sum: i128, sumsq: i128, n: u64) -> (i128, i128, f64) {
    let g = gcd_i128(sum, n as i128).max(1);
    let (num, den) = (sum / g, n as i128 / g);
    let se = if n < 2 {
        0.0
    } else {
        let nf = n as f64;
        let var_num = (sumsq as f64 - (sum as f64) * (sum as f64) / nf).max(0.0);
        libm::sqrt(var_num / (nf - 1.0) / nf)
    };
    (num, den, se)
}

impl FMeasureResult {
    /// Exactly the unit polynomial with zero spread.
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
            && self.coeffs[0] == FCoeff { exp: 0, num: 1, den: 1, se: 0.0 }
    }

    /// Scalar evaluation of the mean polynomial at a bracket variable value.
    pub fn eval(&self, a: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.num as f64 / c.den as f64 * libm::pow(a, c.exp as f64))
            .sum()
    }
}

/// Mean normalized Jones over sampled directions: the entanglement measure
/// of one open curve. Equal, by construction, to the spectrum's
/// probability-weighted class polynomials over the same seed.
pub fn f_measure(
    l: &OpenCurve,
    n_dirs: u64,
    seed: u64,
    budget: usize,
    cap: usize,
) -> Result<FMeasureResult> {
    if n_dirs == 0 {
        return Err(Error::InvalidParameter(format!("need at least one direction")));
    }
    let mut acc: BTreeMap<i64, (i128, i128)> = BTreeMap::new();
    let (mut resolved, mut unresolved, mut failed, mut degenerate) = (0u64, 0u64, 0u64, 0u64);
    for i in 0..n_dirs {
        match project_open(l, seed, i)? {
            Projected::Exhausted { retries } => {
                degenerate += retries as u64;
                failed += 1;
            }
            Projected::Diagram { diagram, retries } => {
                degenerate += retries as u64;
                let s = simplify(&diagram, budget)?;
                if s.diagram.crossing_count() > cap {
                    unresolved += 1;
                    continue;
                }
                resolved += 1;
                for (exp, coeff) in jones_normalized(&s.diagram, cap)?.pairs() {
                    let e = acc.entry(exp).or_insert((0, 0));
                    e.0 += coeff as i128;
                    e.1 += (coeff as i128) * (coeff as i128);
                }
            }
        }
    }
    if failed * 100 > n_dirs {
        return Err(Error::DegeneracyExhausted { failed: failed as usize, attempts: RETRY_CAP });
    }
    let coeffs = acc
        .into_iter()
        .filter(|(_, (sum, sumsq))| *sum != 0 || *sumsq != 0)
        .map(|(exp, (sum, sumsq))| {
            let (num, den, se) = moment_stats(sum, sumsq, resolved);
            FCoeff { exp, num, den, se }
        })
        .collect();
    Ok(FMeasureResult { n_dirs, resolved, unresolved, failed, degenerate, coeffs })
}

// ---- f-gradient ----

#[derive(Debug, Clone, PartialEq)]
pub struct GradCoeff {
    pub exp: i64,
    pub value: f64,
    pub se: f64,
}

/// Central-difference directional derivative of the f-measure.
#[derive(Debug, Clone, PartialEq)]
pub struct FGradient {
    pub eps: f64,
    pub n_dirs: u64,
    /// Directions classified at both perturbed curves.
    pub pairs: u64,
    /// Directions dropped because either side failed or stayed unresolved.
    pub skipped: u64,
    pub degenerate: u64,
    /// Sorted by exponent; exponents that never differed are dropped.
    pub coeffs: Vec<GradCoeff>,
}

/// Default-step heuristic for [`f_gradient`].
pub fn default_step(k: &PolyCurve) -> f64 {
    1e-3 * k.diameter()
}

/// Rate of change of the f-measure of the knot opened at `base`, along the
/// per-vertex displacement field `v`. Both evaluation points share every
/// direction draw, so per-direction differences cancel the common noise;
/// the standard errors come from those paired differences.
pub fn f_gradient(
    k: &PolyCurve,
    base: usize,
    v: &[Vec3],
    eps: f64,
    n_dirs: u64,
    seed: u64,
    budget: usize,
    cap: usize,
) -> Result<FGradient> {
    if !k.is_closed() {
        return Err(Error::InvalidParameter(format!(
            "{}: gradient needs a closed curve",
            k.label()
        )));
    }
    if v.len() != k.vertices().len() {
        return Err(Error::InvalidParameter(format!(
            "displacement field has {} vertices, curve has {}",
            v.len(),
            k.vertices().len()
        )));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("step {eps} must be positive")));
    }
    if n_dirs == 0 {
        return Err(Error::InvalidParameter(format!("need at least one direction")));
    }
    let perturbed = |sign: f64| -> Result<OpenCurve> {
        let vs: Vec<Vec3> = k
            .vertices()
            .iter()
            .zip(v)
            .map(|(p, d)| *p + *d * (sign * eps))
            .collect();
        let kp = PolyCurve::new(vs, true, k.label()).map_err(|e| {
            Error::InvalidParameter(format!("step {eps} breaks the curve: {e}"))
        })?;
        open_at(&kp, base)
    };
    let plus = perturbed(1.0)?;
    let minus = perturbed(-1.0)?;
    let side = |l: &OpenCurve, i: u64, degenerate: &mut u64| -> Result<Option<Laurent>> {
        match project_open(l, seed, i)? {
            Projected::Exhausted { retries } => {
                *degenerate += retries as u64;
                Ok(None)
            }
            Projected::Diagram { diagram, retries } => {
                *degenerate += retries as u64;
                let s = simplify(&diagram, budget)?;
                if s.diagram.crossing_count() > cap {
                    return Ok(None);
                }
                Ok(Some(jones_normalized(&s.diagram, cap)?))
            }
        }
    };
    let mut acc: BTreeMap<i64, (i128, i128)> = BTreeMap::new();
    let (mut pairs, mut skipped, mut degenerate) = (0u64, 0u64, 0u64);
    for i in 0..n_dirs {
        let jp = side(&plus, i, &mut degenerate)?;
        let jm = side(&minus, i, &mut degenerate)?;
        let (jp, jm) = match (jp, jm) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                skipped += 1;
                continue;
            }
        };
        pairs += 1;
        let diff = &jp - &jm;
        for (exp, coeff) in diff.pairs() {
            let e = acc.entry(exp).or_insert((0, 0));
            e.0 += coeff as i128;
            e.1 += (coeff as i128) * (coeff as i128);
        }
    }
    let coeffs = acc
        .into_iter()
        .filter(|(_, (_, sumsq))| *sumsq != 0)
        .map(|(exp, (sum, sumsq))| {
            let (num, den, se) = moment_stats(sum, sumsq, pairs);
            GradCoeff {
                exp,
                value: num as f64 / den as f64 / (2.0 * eps),
                se: se / (2.0 * eps),
            }
        })
        .collect();
    Ok(FGradient { eps, n_dirs, pairs, skipped, degenerate, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::BRACKET_CAP;
    use crate::curve::{planar_ngon, torus_knot};
    use crate::geom::v3;
    use crate::rng::{range_f64, stream};
    use alloc::vec;
    use proptest::prelude::*;

    const BUDGET: usize = 400;

    /// Normalized Jones of the torus trefoil fixture: the variable-mirror
    /// of the all-positive diagram code pinned in the bracket tests.
    fn torus_trefoil_jones() -> Laurent {
        Laurent::from_pairs(&[(16, -1), (12, 1), (4, 1)])
    }

    fn segment() -> OpenCurve {
        OpenCurve::new(
            PolyCurve::new(vec![v3(0.0, 0.0, 0.0), v3(1.0, 0.0, 0.0)], false, "segment").unwrap(),
        )
        .unwrap()
    }

    fn trefoil_open() -> OpenCurve {
        open_at(&torus_knot(2, 3, 32).unwrap(), 0).unwrap()
    }

    fn entry_sanity(s: &Spectrum) {
        let mut mass = 0u64;
        for e in &s.entries {
            assert!(0.0 <= e.ci.0 && e.ci.0 <= e.p_hat && e.p_hat <= e.ci.1 && e.ci.1 <= 1.0);
            assert_eq!(e.low_confidence, e.count < 5);
            mass += e.count;
        }
        assert_eq!(mass + s.unresolved.count, s.sampled, "mass must be conserved exactly");
    }

    #[test]
    fn straight_segment_spectrum_is_purely_trivial() {
        let s = knotoid_spectrum(&segment(), 200, 7, BUDGET, BRACKET_CAP).unwrap();
        entry_sanity(&s);
        assert_eq!(s.entries.len(), 1);
        let e = &s.entries[0];
        assert!(e.fingerprint.knot_type);
        assert_eq!(e.fingerprint.height_bound, 0);
        assert!(e.fingerprint.knotoid_jones.is_one());
        assert_eq!(e.count, 200);
        assert_eq!(e.p_hat, 1.0);
        assert_eq!(s.unresolved.count, 0);
        assert_eq!(s.failed, 0);
    }

    #[test]
    fn planar_polygon_spectrum_is_trivial_after_jitter() {
        let opened = open_at(&planar_ngon(16).unwrap(), 0).unwrap();
        let h = 0.05 * opened.curve.tube_radius();
        let jittered = sample_neighborhood(&opened, h, 11).unwrap();
        let s = knotoid_spectrum(&jittered, 300, 23, BUDGET, BRACKET_CAP).unwrap();
        entry_sanity(&s);
        assert_eq!(s.entries.len(), 1);
        assert!(s.entries[0].fingerprint.knot_type);
        assert!(s.entries[0].fingerprint.knotoid_jones.is_one());
        assert_eq!(s.entries[0].count, 300);
    }

    #[test]
    fn trefoil_spectrum_has_one_knot_type_class_plus_pure_ones() {
        let s = knotoid_spectrum(&trefoil_open(), 400, 41, BUDGET, BRACKET_CAP).unwrap();
        entry_sanity(&s);
        let kt: Vec<_> = s.entries.iter().filter(|e| e.fingerprint.knot_type).collect();
        assert_eq!(kt.len(), 1, "exactly one knot-type class");
        assert_eq!(kt[0].fingerprint.under_jones, kt[0].fingerprint.over_jones);
        assert_eq!(kt[0].fingerprint.under_jones, torus_trefoil_jones());
        assert!(
            s.entries.iter().any(|e| !e.fingerprint.knot_type),
            "pure classes should appear at this sample size"
        );
        // Generic projections stay within the height ceiling.
        for e in &s.entries {
            assert!(e.fingerprint.height_bound <= 3, "height {} at {}", e.fingerprint.height_bound, e.key);
            assert!(!e.needs_review);
        }
        assert_eq!(s.unresolved.count, 0);
    }

    #[test]
    fn height_subsets_partition_the_entries() {
        let s = knotoid_spectrum(&trefoil_open(), 200, 41, BUDGET, BRACKET_CAP).unwrap();
        let h0 = height_subset(&s, 0);
        assert_eq!(h0.entries.len(), 1, "unique knot-type entry at height zero");
        let max_h = s.entries.iter().map(|e| e.fingerprint.height_bound).max().unwrap();
        let mut mass = 0u64;
        for m in 0..=max_h {
            let hm = height_subset(&s, m);
            for e in &hm.entries {
                assert_eq!(e.fingerprint.height_bound, m);
            }
            mass += hm.entries.iter().map(|e| e.count).sum::<u64>();
        }
        assert_eq!(mass, s.entries.iter().map(|e| e.count).sum::<u64>());
    }

    #[test]
    fn spectra_are_deterministic_and_merge_order_free() {
        let l = trefoil_open();
        let a = knotoid_spectrum(&l, 120, 99, BUDGET, BRACKET_CAP).unwrap();
        let b = knotoid_spectrum(&l, 120, 99, BUDGET, BRACKET_CAP).unwrap();
        assert_eq!(a, b);
        // Uneven chunks merged out of order reproduce the sequential run.
        let chunk = |lo: u64, hi: u64| -> Tally {
            let mut t = Tally::default();
            for i in lo..hi {
                t.record(&direction_outcome(&l, 99, i, BUDGET, BRACKET_CAP).unwrap());
            }
            t
        };
        let (t0, t1, t2) = (chunk(0, 50), chunk(50, 90), chunk(90, 120));
        let merged = t2.merge(t0).merge(t1);
        let c = finalize(merged, a.kind, a.provenance.clone(), vec![]).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn compare_separates_trefoil_from_unknot_and_mirror() {
        let tre = knotoid_spectrum(&trefoil_open(), 150, 5, BUDGET, BRACKET_CAP).unwrap();
        let same = compare(&tre, &tre).unwrap();
        assert!(!same.distinguished());
        assert_eq!(same.verdict(), "not distinguished");
        assert!(same.only_a.is_empty() && same.only_b.is_empty());

        let seg = knotoid_spectrum(&segment(), 150, 5, BUDGET, BRACKET_CAP).unwrap();
        let diff = compare(&tre, &seg).unwrap();
        assert!(diff.distinguished());
        assert_eq!(diff.verdict(), "distinguished");

        let k = torus_knot(2, 3, 32).unwrap();
        let mirrored: Vec<_> = k.vertices().iter().map(|p| v3(-p.x, p.y, p.z)).collect();
        let mk = PolyCurve::new(mirrored, true, "torus-2-3-32-mirror").unwrap();
        let mir = knotoid_spectrum(&open_at(&mk, 0).unwrap(), 150, 5, BUDGET, BRACKET_CAP).unwrap();
        let chiral = compare(&tre, &mir).unwrap();
        assert!(chiral.distinguished(), "mirror trefoil carries mirrored Jones");
        let mkt = mir.knot_type_entry().unwrap();
        assert_eq!(mkt.fingerprint.under_jones, torus_trefoil_jones().invert_var());

        let other = knotoid_spectrum(&segment(), 40, 5, BUDGET / 2, BRACKET_CAP).unwrap();
        assert!(matches!(compare(&tre, &other), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn f_measure_is_exactly_one_on_trivial_curves() {
        let f = f_measure(&segment(), 150, 3, BUDGET, BRACKET_CAP).unwrap();
        assert!(f.is_unit());
        assert_eq!(f.resolved, 150);
        let opened = open_at(&planar_ngon(16).unwrap(), 0).unwrap();
        let h = 0.05 * opened.curve.tube_radius();
        let jittered = sample_neighborhood(&opened, h, 31).unwrap();
        let f = f_measure(&jittered, 200, 17, BUDGET, BRACKET_CAP).unwrap();
        assert!(f.is_unit(), "planar curve projections are all trivial");
        assert_eq!(f.coeffs[0].se, 0.0);
        assert!((f.eval(0.7) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn f_measure_equals_the_class_expansion() {
        let l = trefoil_open();
        let (n, seed) = (250u64, 61u64);
        let f = f_measure(&l, n, seed, BUDGET, BRACKET_CAP).unwrap();
        let s = knotoid_spectrum(&l, n, seed, BUDGET, BRACKET_CAP).unwrap();
        assert_eq!(f.failed, 0);
        assert_eq!(f.unresolved, 0);
        assert_eq!(s.unresolved.count, 0);
        assert_eq!(f.resolved, s.sampled);
        // Per exponent, the direction sum must equal the count-weighted
        // class sum exactly: both runs saw the same diagrams.
        let mut expected: BTreeMap<i64, i128> = BTreeMap::new();
        for e in &s.entries {
            for (exp, c) in e.fingerprint.knotoid_jones.pairs() {
                *expected.entry(exp).or_insert(0) += e.count as i128 * c as i128;
            }
        }
        let mut got: BTreeMap<i64, i128> = BTreeMap::new();
        for c in &f.coeffs {
            assert_eq!(f.resolved as i128 % c.den, 0);
            got.insert(c.exp, c.num * (f.resolved as i128 / c.den));
        }
        assert_eq!(got, expected);
    }

    #[test]
    fn gradient_vanishes_on_zero_and_in_plane_directions() {
        let k = torus_knot(2, 3, 32).unwrap();
        let zero = vec![Vec3::ZERO; k.vertices().len()];
        let g = f_gradient(&k, 0, &zero, default_step(&k), 80, 9, BUDGET, BRACKET_CAP).unwrap();
        assert!(g.coeffs.is_empty(), "zero displacement moves nothing");
        assert_eq!(g.pairs, 80);

        // In-plane wiggles keep a planar polygon planar, hence trivial.
        let p = planar_ngon(16).unwrap();
        let mut rng = stream(77);
        let v: Vec<Vec3> = (0..p.vertices().len())
            .map(|_| v3(range_f64(&mut rng, -1.0, 1.0), range_f64(&mut rng, -1.0, 1.0), 0.0))
            .collect();
        let g = f_gradient(&p, 0, &v, default_step(&p), 80, 13, BUDGET, BRACKET_CAP).unwrap();
        assert!(g.coeffs.is_empty(), "all projections stay trivial at both steps");
    }

    #[test]
    fn gradient_estimates_agree_across_step_sizes() {
        let k = torus_knot(2, 3, 32).unwrap();
        let mut rng = stream(123);
        let v: Vec<Vec3> = (0..k.vertices().len())
            .map(|_| {
                v3(
                    range_f64(&mut rng, -1.0, 1.0),
                    range_f64(&mut rng, -1.0, 1.0),
                    range_f64(&mut rng, -1.0, 1.0),
                )
            })
            .collect();
        let eps = default_step(&k);
        let g1 = f_gradient(&k, 0, &v, eps, 200, 1001, BUDGET, BRACKET_CAP).unwrap();
        let g2 = f_gradient(&k, 0, &v, eps / 2.0, 200, 2002, BUDGET, BRACKET_CAP).unwrap();
        let take = |g: &FGradient, exp: i64| -> (f64, f64) {
            g.coeffs
                .iter()
                .find(|c| c.exp == exp)
                .map_or((0.0, 0.0), |c| (c.value, c.se))
        };
        let exps: alloc::collections::BTreeSet<i64> = g1
            .coeffs
            .iter()
            .chain(&g2.coeffs)
            .map(|c| c.exp)
            .collect();
        assert!(!exps.is_empty(), "a random field should disturb some class");
        for exp in exps {
            let (v1, s1) = take(&g1, exp);
            let (v2, s2) = take(&g2, exp);
            assert!(
                (v1 - v2).abs() <= 4.0 * (s1 + s2) + 1e-9,
                "exp {exp}: {v1}±{s1} vs {v2}±{s2}"
            );
        }
    }

    #[test]
    fn knot_spectrum_keeps_the_knot_type_at_every_base() {
        let k = torus_knot(2, 3, 32).unwrap();
        let h = 0.05 * k.tube_radius();
        let s = knot_spectrum(&k, h, &[0, 11, 21], 2, 50, 301, BUDGET, BRACKET_CAP).unwrap();
        entry_sanity(&s);
        assert_eq!(s.kind, SpectrumKind::KnotNeighborhood);
        assert_eq!(s.provenance.h, Some(h));
        assert_eq!(s.provenance.bases, vec![0, 11, 21]);
        let kt = s.knot_type_entry().expect("knot type class present");
        assert_eq!(kt.fingerprint.under_jones, torus_trefoil_jones());
        assert_eq!(s.per_base.len(), 3);
        for bc in &s.per_base {
            assert!(bc.keys.contains(&kt.key), "knot type missing at base {}", bc.base);
        }
        let pk = s.pkspec();
        assert!(pk.knot_type_entry().is_none());
        assert!(!pk.entries.is_empty(), "proper classes should appear");
        assert!(
            pk.entries.iter().any(|e| e.fingerprint.height_bound == 1),
            "a height-one class should appear"
        );
    }

    #[test]
    fn planar_knot_spectrum_is_trivial_only() {
        let p = planar_ngon(16).unwrap();
        let h = 0.05 * p.tube_radius();
        let bases = [0usize, 4, 8, 12];
        let s = knot_spectrum(&p, h, &bases, 1, 40, 5, BUDGET, BRACKET_CAP).unwrap();
        entry_sanity(&s);
        assert_eq!(s.entries.len(), 1);
        assert!(s.entries[0].fingerprint.knot_type);
        assert!(s.entries[0].fingerprint.knotoid_jones.is_one());
    }

    #[test]
    fn fingerprints_are_locally_constant_at_small_h() {
        let k = torus_knot(2, 3, 32).unwrap();
        let opened = open_at(&k, 0).unwrap();
        let h = 0.05 * k.tube_radius();
        let dirs = 16u64;
        let classify = |l: &OpenCurve| -> Vec<String> {
            (0..dirs)
                .map(|i| match direction_outcome(l, 555, i, BUDGET, BRACKET_CAP).unwrap() {
                    DirOutcome::Classified { class: Classification::Resolved(fp), .. } => {
                        class_key(&fp)
                    }
                    other => panic!("unexpected outcome {other:?}"),
                })
                .collect()
        };
        let reference = classify(&sample_neighborhood(&opened, h, 0).unwrap());
        for sample in 1..100u64 {
            let l = sample_neighborhood(&opened, h, sample).unwrap();
            assert_eq!(classify(&l), reference, "sample {sample} left the class cell");
        }
    }

    // ---- Property tests ----

    fn synth_outcome(kind: u8, class: u8, height: u32, retries: u32) -> DirOutcome {
        match kind {
            0 => DirOutcome::Failed { retries },
            1 => DirOutcome::Classified {
                class: Classification::Unresolved { crossings: 25 + class as usize },
                code: String::from("k:..."),
                retries,
            },
            _ => {
                let fp = Fingerprint {
                    knotoid_jones: Laurent::monomial(1, class as i64),
                    under_jones: Laurent::one(),
                    over_jones: Laurent::one(),
                    height_bound: height,
                    knot_type: height == 0,
                };
                DirOutcome::Classified {
                    class: Classification::Resolved(fp),
                    code: format!("k:rep{}", retries % 3),
                    retries,
                }
            }
        }
    }

    proptest! {
        #[test]
        fn wilson_interval_brackets_the_estimate(total in 1u64..5000, count_frac in 0.0f64..=1.0) {
            let count = ((total as f64) * count_frac) as u64;
            let (lo, hi) = wilson(count, total);
            let p = count as f64 / total as f64;
            prop_assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
        }

        #[test]
        fn tally_merge_is_commutative_and_associative(
            outs in proptest::collection::vec((0u8..3, 0u8..4, 1u32..4, 0u32..3), 0..60),
            cut_a in 0usize..60,
            cut_b in 0usize..60,
        ) {
            let outs: Vec<DirOutcome> =
                outs.iter().map(|&(k, c, h, r)| synth_outcome(k, c, h, r)).collect();
            let (a, b) = (cut_a.min(outs.len()), cut_b.min(outs.len()));
            let (lo, hi) = (a.min(b), a.max(b));
            let tally_of = |part: &[DirOutcome]| -> Tally {
                let mut t = Tally::default();
                for o in part {
                    t.record(o);
                }
                t
            };
            let (t0, t1, t2) = (tally_of(&outs[..lo]), tally_of(&outs[lo..hi]), tally_of(&outs[hi..]));
            let seq = tally_of(&outs);
            let left = t0.clone().merge(t1.clone()).merge(t2.clone());
            let right = t2.merge(t1).merge(t0);
            prop_assert_eq!(&left, &right);
            prop_assert_eq!(&left, &seq);
        }
    }
}
