//! Bound-versus-spectrum sweeps, remainder asymptotics and the
//! finite-dimensional averaged variational principle.

mod fit;
mod frame;
mod registry;

pub use fit::{asymptotic_fit, AsymptoticFit, FitKind, FIT_IDS};
pub use frame::{avp_check_matrix, avp_finite_check, random_psd, AvpCheck, RieszSample, TightFrameFamily};
pub use registry::{resolve_ids, DIRICHLET_IDS, NEUMANN_IDS};

use crate::bounds::{nan_as_null, null_as_nan, BoundResult, Functional, Side};
use crate::error::{Error, Result};
use crate::geometry::{summarize, Domain, DomainSpec, GeometricSummary};
use crate::numeric::{logspace, logspace_int};
use crate::spectra::{analytic_spectrum, fem_spectrum, Bc, FemOptions, Source, Spectrum};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Relative slack for analytic spectra.
pub const PASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// A violation smaller than the reference spectrum's error bounds.
    Inconclusive,
    Inapplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub theorem_id: String,
    pub query: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<f64>,
    pub side: Side,
    pub functional: Functional,
    #[serde(serialize_with = "nan_as_null", deserialize_with = "null_as_nan")]
    pub bound: f64,
    #[serde(serialize_with = "nan_as_null", deserialize_with = "null_as_nan")]
    pub reference: f64,
    /// Signed slack, positive when the bound is on the correct side.
    #[serde(serialize_with = "nan_as_null", deserialize_with = "null_as_nan")]
    pub margin: f64,
    pub applicable: bool,
    pub pass: bool,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    pub inapplicable: usize,
    /// Smallest margin among applicable records.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_margin: Option<f64>,
}

impl Summary {
    fn of(records: &[Record]) -> Self {
        let count = |s: Status| records.iter().filter(|r| r.status == s).count();
        let worst_margin = records
            .iter()
            .filter(|r| r.applicable && r.margin.is_finite())
            .map(|r| r.margin)
            .reduce(f64::min);
        Summary {
            total: records.len(),
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            inconclusive: count(Status::Inconclusive),
            inapplicable: count(Status::Inapplicable),
            worst_margin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub domain: DomainSpec,
    pub description: String,
    pub bc: Bc,
    pub source: Source,
    pub eigenvalues: usize,
    pub records: Vec<Record>,
    pub summary: Summary,
    pub fits: Vec<AsymptoticFit>,
}

impl VerificationReport {
    /// True when no applicable record fails.
    pub fn ok(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    /// One record per row; numbers carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theorem_id,query,bound,reference,margin,applicable,pass\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.theorem_id,
                r.query,
                fmt17(r.bound),
                fmt17(r.reference),
                fmt17(r.margin),
                r.applicable,
                r.pass
            );
        }
        out
    }

    /// Plot-ready table: k, the reference average, then every average bound.
    pub fn average_table(&self) -> String {
        let mut ids: Vec<&str> = Vec::new();
        let mut rows: BTreeMap<usize, (f64, BTreeMap<&str, f64>)> = BTreeMap::new();
        for r in &self.records {
            let (Functional::Average, Some(k)) = (r.functional, r.at) else {
                continue;
            };
            if !ids.contains(&r.theorem_id.as_str()) {
                ids.push(&r.theorem_id);
            }
            let row = rows.entry(k as usize).or_insert((r.reference, BTreeMap::new()));
            if r.applicable {
                row.1.insert(&r.theorem_id, r.bound);
            }
        }
        let mut out = String::from("k\taverage");
        for id in &ids {
            out.push('\t');
            out.push_str(id);
        }
        out.push('\n');
        for (k, (avg, vals)) in rows {
            let _ = write!(out, "{k}\t{}", fmt17(avg));
            for id in &ids {
                out.push('\t');
                out.push_str(&vals.get(id).map_or(String::new(), |v| fmt17(*v)));
            }
            out.push('\n');
        }
        out
    }
}

/// 17 significant digits, empty for NaN.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else {
        format!("{x:.16e}")
    }
}

/// Evaluation points. Empty vectors are skipped; an entirely empty grid is
/// an error.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub ks: Vec<usize>,
    pub zs: Vec<f64>,
    pub ts: Vec<f64>,
}

impl Grid {
    pub fn is_empty(&self) -> bool {
        self.ks.is_empty() && self.zs.is_empty() && self.ts.is_empty()
    }

    /// k log-spaced on 1..500, z from the first positive eigenvalue to the
    /// spectral cutoff, t on r²·[1e-4, 1] clipped where the truncated heat
    /// trace is exact to rounding.
    pub fn default_for(geom: &GeometricSummary, spectrum: &Spectrum) -> Self {
        let n = spectrum.count();
        let kmax = 500.min(n.saturating_sub(1)).max(1);
        let ks = logspace_int(1, kmax, 40);
        let cut = spectrum.cutoff();
        let zmin = spectrum.values.iter().copied().find(|&v| v > 0.0).unwrap_or(cut);
        let zs = if zmin < cut { logspace(zmin, cut, 30) } else { vec![cut] };
        let r2 = geom.inradius * geom.inradius;
        let tmin = (1e-4 * r2).max(36.0 / cut);
        let ts = if tmin < r2 { logspace(tmin, r2, 20) } else { vec![r2] };
        Grid { ks, zs, ts }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    /// Eigenvalues requested from closed forms.
    pub count: usize,
    /// Eigenvalues requested from finite elements when no closed form exists.
    pub fem_count: usize,
    pub fem: FemOptions,
    pub seed: u64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            count: 600,
            fem_count: 24,
            fem: FemOptions::default(),
            seed: 42,
        }
    }
}

/// Closed-form spectrum when available, otherwise finite elements on polygons.
pub fn reference_spectrum(domain: &Domain, bc: Bc, opts: &SpectrumOptions) -> Result<Spectrum> {
    match analytic_spectrum(domain, bc, opts.count) {
        Err(Error::UnsupportedDomain { .. }) => {
            let poly = domain.as_polygon().ok_or_else(|| Error::UnsupportedDomain {
                op: "reference_spectrum",
                reason: format!("no spectrum available for {}", domain.describe()),
            })?;
            Ok(fem_spectrum(&poly, bc, opts.fem_count, opts.fem)?.spectrum)
        }
        other => other,
    }
}

/// Evaluates the requested bounds on a grid against a reference spectrum.
/// An empty id list selects every bound for `bc`; `grid = None` uses
/// [`Grid::default_for`].
pub fn verify_domain(
    domain: &Domain,
    bc: Bc,
    theorem_ids: &[String],
    grid: Option<&Grid>,
    opts: &SpectrumOptions,
) -> Result<VerificationReport> {
    if grid.is_some_and(Grid::is_empty) {
        return Err(Error::InvalidArgument("verification grid is empty".into()));
    }
    let spectrum = reference_spectrum(domain, bc, opts)?;
    verify_with_spectrum(domain, &spectrum, theorem_ids, grid, opts.seed)
}

pub fn verify_with_spectrum(
    domain: &Domain,
    spectrum: &Spectrum,
    theorem_ids: &[String],
    grid: Option<&Grid>,
    seed: u64,
) -> Result<VerificationReport> {
    let (ids, records, _) = sweep(domain, None, spectrum, theorem_ids, grid, seed)?;
    let mut fits = Vec::new();
    for id in ids.iter().filter(|id| FIT_IDS.contains(id)) {
        match asymptotic_fit(id, domain, (100, 1_000_000)) {
            Ok(f) => fits.push(f),
            Err(Error::NotApplicable(_)) | Err(Error::UnsupportedDomain { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(VerificationReport {
        domain: domain.to_spec(),
        description: domain.describe(),
        bc: spectrum.bc,
        source: spectrum.source,
        eigenvalues: spectrum.count(),
        summary: Summary::of(&records),
        records,
        fits,
    })
}

/// The raw bound values behind a sweep, without judgement. The spectrum is
/// still needed for λ₁-dependent bounds and to limit k to available indices.
/// `geometry` replaces the computed summary, e.g. one saved by an earlier run.
pub fn evaluate_bounds(
    domain: &Domain,
    geometry: Option<&GeometricSummary>,
    spectrum: &Spectrum,
    theorem_ids: &[String],
    grid: Option<&Grid>,
    seed: u64,
) -> Result<Vec<BoundResult>> {
    Ok(sweep(domain, geometry, spectrum, theorem_ids, grid, seed)?.2)
}

type Sweep = (Vec<&'static str>, Vec<Record>, Vec<BoundResult>);

fn sweep(
    domain: &Domain,
    geometry: Option<&GeometricSummary>,
    spectrum: &Spectrum,
    theorem_ids: &[String],
    grid: Option<&Grid>,
    seed: u64,
) -> Result<Sweep> {
    spectrum.validate()?;
    let geom = match geometry {
        Some(g) => g.clone(),
        None => summarize(domain)?,
    };
    let grid = match grid {
        Some(g) if g.is_empty() => return Err(Error::InvalidArgument("verification grid is empty".into())),
        Some(g) => g.clone(),
        None => Grid::default_for(&geom, spectrum),
    };
    let ids = resolve_ids(spectrum.bc, theorem_ids)?;
    let (records, results) = registry::evaluate(domain, &geom, spectrum, &grid, &ids, seed)?;
    Ok((ids, records, results))
}
