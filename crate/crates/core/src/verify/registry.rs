//! Evaluation of every supported bound on a grid, with reference values and
//! pass/fail judgement.

use super::{Grid, Record, Status, PASS_TOLERANCE};
use crate::bounds::*;
use crate::error::{Error, Result};
use crate::geometry::{
    direction_width, neumann_curvature_max, neumann_z0_threshold, tube_volume_with, Domain, GeometricSummary,
};
use crate::riesz::{average, partial_sum, partition, riesz_mean};
use crate::spectra::{Bc, Spectrum};

pub const DIRICHLET_IDS: &[&str] = &[
    "thm2.1",
    "cor2.2",
    "cor2.3",
    "thm2.4",
    "thm2.4-alpha",
    "thm2.5",
    "rem2.1",
    "rem2.2",
    "protter",
    "thm2.7",
    "cor2.8",
    "thm2.9",
    "cor2.10",
    "thm2.11i",
    "thm2.11ii",
    "thm2.11iii",
    "thm2.11iv",
    "bly",
    "berezin",
    "appA.1",
    "appA.2",
];

pub const NEUMANN_IDS: &[&str] = &["thm3.1", "thm3.2", "thm3.3", "kroger"];

/// Widths of the cut-off family φ_h.
const PHI_WIDTHS: [f64; 3] = [0.05, 0.1, 0.2];
const AAA_ALPHA: f64 = 1.0;
const TWO_COMPONENT_ALPHA: f64 = 0.5;

/// Expands the requested ids; an empty request selects every bound for `bc`.
/// "thm2.11" selects all four planar cases.
pub fn resolve_ids(bc: Bc, requested: &[String]) -> Result<Vec<&'static str>> {
    if requested.is_empty() {
        return Ok(match bc {
            Bc::Dirichlet => DIRICHLET_IDS.to_vec(),
            Bc::Neumann => NEUMANN_IDS.to_vec(),
        });
    }
    let mut out = Vec::new();
    for r in requested {
        let r = r.trim();
        let matched: Vec<&'static str> = if r == "thm2.11" {
            DIRICHLET_IDS
                .iter()
                .copied()
                .filter(|id| id.starts_with("thm2.11"))
                .collect()
        } else {
            DIRICHLET_IDS
                .iter()
                .chain(NEUMANN_IDS)
                .copied()
                .filter(|id| *id == r)
                .collect()
        };
        if matched.is_empty() {
            return Err(Error::InvalidArgument(format!("unknown theorem id '{r}'")));
        }
        for m in matched {
            if !out.contains(&m) {
                out.push(m);
            }
        }
    }
    Ok(out)
}

/// Reference interval for a functional: `central` from the spectrum as given,
/// `lo`/`hi` after shifting every eigenvalue by its error bound.
#[derive(Debug, Clone, Copy)]
struct Reference {
    central: f64,
    lo: f64,
    hi: f64,
}

struct Ctx<'a> {
    domain: &'a Domain,
    geom: &'a GeometricSummary,
    spec: &'a Spectrum,
    down: Spectrum,
    up: Spectrum,
    grid: &'a Grid,
    seed: u64,
    current: &'static str,
    records: Vec<Record>,
    results: Vec<BoundResult>,
}

fn shifted(s: &Spectrum, sign: f64) -> Spectrum {
    let mut values: Vec<f64> = s
        .values
        .iter()
        .zip(&s.error_bounds)
        .map(|(v, e)| (v + sign * e).max(0.0))
        .collect();
    values.sort_by(f64::total_cmp);
    Spectrum {
        bc: s.bc,
        error_bounds: vec![0.0; values.len()],
        values,
        source: s.source,
        complete_below: s.complete_below,
    }
}

pub(super) fn evaluate(
    domain: &Domain,
    geom: &GeometricSummary,
    spec: &Spectrum,
    grid: &Grid,
    ids: &[&'static str],
    seed: u64,
) -> Result<(Vec<Record>, Vec<BoundResult>)> {
    let mut ctx = Ctx {
        domain,
        geom,
        spec,
        down: shifted(spec, -1.0),
        up: shifted(spec, 1.0),
        grid,
        seed,
        current: "-",
        records: Vec::new(),
        results: Vec::new(),
    };
    for id in ids {
        let wrong_bc = match spec.bc {
            Bc::Dirichlet => !DIRICHLET_IDS.contains(id),
            Bc::Neumann => !NEUMANN_IDS.contains(id),
        };
        if wrong_bc {
            ctx.skip(id, format!("{id} is not a {:?} bound", spec.bc));
            continue;
        }
        ctx.current = id;
        let r = ctx.run(id);
        match r {
            Ok(()) => {}
            Err(e @ (Error::NotApplicable(_) | Error::UnsupportedDomain { .. })) => ctx.skip(id, e.to_string()),
            Err(e) => return Err(e),
        }
    }
    Ok((ctx.records, ctx.results))
}

impl Ctx<'_> {
    fn n(&self) -> usize {
        self.spec.count()
    }

    fn ks(&self) -> Vec<usize> {
        self.grid.ks.iter().copied().filter(|&k| k >= 1).collect()
    }

    /// Grid k strictly below `n`.
    fn ks_below(&self, n: usize) -> Vec<usize> {
        self.ks().into_iter().filter(|&k| k < n).collect()
    }

    fn zs(&self) -> Vec<f64> {
        self.grid.zs.clone()
    }

    fn ts(&self) -> Vec<f64> {
        self.grid.ts.clone()
    }

    fn err(&self, k: usize) -> f64 {
        self.spec.error_bounds.get(k.saturating_sub(1)).copied().unwrap_or(0.0)
    }

    fn max_err_upto(&self, k: usize) -> f64 {
        self.spec.error_bounds.iter().take(k).copied().fold(0.0, f64::max)
    }

    fn lambda1(&self) -> f64 {
        self.spec.values[0]
    }

    fn tube(&self, h: f64) -> Result<f64> {
        Ok(tube_volume_with(self.domain, self.geom, h, self.seed)?.value)
    }

    /// Spread of a λ₁-dependent bound when λ₁ moves within its error bound.
    fn lambda1_sensitivity(&self, f: &dyn Fn(f64) -> Result<BoundResult>) -> f64 {
        let (l1, e1) = (self.lambda1(), self.err(1));
        if e1 == 0.0 {
            return 0.0;
        }
        let at = |l: f64| f(l).map(|b| b.value).unwrap_or(f64::NAN);
        let c = at(l1);
        let spread = (at(l1 + e1) - c)
            .abs()
            .max((at((l1 - e1).max(f64::MIN_POSITIVE)) - c).abs());
        if spread.is_finite() {
            spread
        } else {
            0.0
        }
    }

    fn skip(&mut self, id: &str, reason: String) {
        self.records.push(Record {
            theorem_id: id.into(),
            query: "-".into(),
            at: None,
            side: Side::Upper,
            functional: Functional::Average,
            bound: f64::NAN,
            reference: f64::NAN,
            margin: f64::NAN,
            applicable: false,
            pass: false,
            status: Status::Inapplicable,
            note: Some(reason),
        });
    }

    fn reference(&self, f: Functional, at: Option<f64>) -> Result<Reference> {
        let idx = |a: Option<f64>| -> Result<usize> {
            let k = a.map_or(1, |x| x as usize);
            if k == 0 || k > self.n() {
                return Err(Error::OutOfRange { k, available: self.n() });
            }
            Ok(k)
        };
        let (s, d, u) = (self.spec, &self.down, &self.up);
        Ok(match f {
            Functional::Average => {
                let k = idx(at)?;
                Reference {
                    central: average(s, k)?,
                    lo: average(d, k)?,
                    hi: average(u, k)?,
                }
            }
            Functional::GradientSum => {
                let k = idx(at)?;
                Reference {
                    central: partial_sum(s, k)?,
                    lo: partial_sum(d, k)?,
                    hi: partial_sum(u, k)?,
                }
            }
            Functional::Riesz1 => {
                let z = at.unwrap_or(0.0);
                Reference {
                    central: riesz_mean(s, z, 1.0)?,
                    lo: riesz_mean(u, z, 1.0)?,
                    hi: riesz_mean(d, z, 1.0)?,
                }
            }
            Functional::Partition => {
                let t = at.unwrap_or(1.0);
                let top = partition(d, t)?;
                Reference {
                    central: partition(s, t)?.value,
                    lo: partition(u, t)?.value,
                    hi: top.value + top.truncation,
                }
            }
            Functional::Single | Functional::Mu | Functional::Lambda1 => {
                let k = idx(at)?;
                let v = s.values[k - 1];
                let e = self.err(k);
                Reference {
                    central: v,
                    lo: v - e,
                    hi: v + e,
                }
            }
        })
    }

    /// Judges one bound. `unc` widens the reference interval for bounds whose
    /// value itself depends on computed eigenvalues.
    fn push(&mut self, label: String, res: Result<BoundResult>, unc: f64, note: Option<String>) -> Result<()> {
        let res = match res {
            Ok(r) => r,
            Err(e @ (Error::NotApplicable(_) | Error::UnsupportedDomain { .. })) => {
                self.skip_query(label, e.to_string());
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        self.results.push(res.clone());
        let at = match res.functional {
            Functional::Lambda1 => Some(1.0),
            _ => res.at,
        };
        let reference = match self.reference(res.functional, at) {
            Ok(r) => r,
            Err(e @ (Error::OutOfRange { .. } | Error::IncompleteSpectrum(_))) => {
                self.skip_query(label, e.to_string());
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        self.push_judged(&res, label, reference, unc, note);
        Ok(())
    }

    fn skip_query(&mut self, label: String, reason: String) {
        self.records.push(Record {
            theorem_id: self.current.into(),
            query: label,
            at: None,
            side: Side::Upper,
            functional: Functional::Average,
            bound: f64::NAN,
            reference: f64::NAN,
            margin: f64::NAN,
            applicable: false,
            pass: false,
            status: Status::Inapplicable,
            note: Some(reason),
        });
    }

    fn push_judged(&mut self, res: &BoundResult, label: String, r: Reference, unc: f64, note: Option<String>) {
        let v = res.value;
        let slack = PASS_TOLERANCE * v.abs().max(r.central.abs()).max(1.0);
        let (lo, hi) = (r.lo - unc, r.hi + unc);
        let status = if !res.applicable {
            Status::Inapplicable
        } else {
            match res.side {
                Side::Upper if hi <= v + slack => Status::Pass,
                Side::Upper if lo > v + slack => Status::Fail,
                Side::Lower if lo >= v - slack => Status::Pass,
                Side::Lower if hi < v - slack => Status::Fail,
                _ => Status::Inconclusive,
            }
        };
        let mut note = note;
        if note.is_none() && !res.flags.is_empty() {
            note = Some(res.flags.join("; "));
        }
        self.records.push(Record {
            theorem_id: res.theorem_id.clone(),
            query: label,
            at: res.at,
            side: res.side,
            functional: res.functional,
            bound: v,
            reference: r.central,
            margin: res.margin(r.central),
            applicable: res.applicable,
            pass: status == Status::Pass,
            status,
            note,
        });
    }

    fn run(&mut self, id: &str) -> Result<()> {
        let (d, v, p, r) = (
            self.geom.dim,
            self.geom.volume,
            self.geom.boundary_measure,
            self.geom.inradius,
        );
        match id {
            "thm2.1" | "cor2.2" | "cor2.3" => {
                for h in PHI_WIDTHS {
                    let norms = match self.tube(h).and_then(|w| phi_h_norms(PhiProfile::Linear, h, v, w)) {
                        Ok(n) => n,
                        Err(e @ Error::NotApplicable(_)) => {
                            self.skip_query(format!("{id} h={h}"), e.to_string());
                            continue;
                        }
                        Err(e) => return Err(e),
                    };
                    match id {
                        "thm2.1" => {
                            self.push(
                                format!("lambda1 h={h}"),
                                dirichlet_avp(&norms, v, d, Query::Lambda1),
                                0.0,
                                None,
                            )?;
                            for k in self.ks() {
                                self.push(
                                    format!("k={k} h={h}"),
                                    dirichlet_avp(&norms, v, d, Query::Average { k }),
                                    0.0,
                                    None,
                                )?;
                            }
                            for z in self.zs() {
                                self.push(
                                    format!("z={z} h={h}"),
                                    dirichlet_avp(&norms, v, d, Query::Riesz { z }),
                                    0.0,
                                    None,
                                )?;
                            }
                        }
                        "cor2.2" => {
                            for t in self.ts() {
                                self.push(
                                    format!("t={t} h={h}"),
                                    dirichlet_avp(&norms, v, d, Query::Partition { t }),
                                    0.0,
                                    None,
                                )?;
                            }
                        }
                        _ => self.bracket_dirichlet(&norms, h)?,
                    }
                }
            }
            "thm2.4" => {
                self.push("lambda1".into(), dirichlet_convex(Query::Lambda1, self.geom), 0.0, None)?;
                for k in self.ks() {
                    self.push(
                        format!("k={k}"),
                        dirichlet_convex(Query::Average { k }, self.geom),
                        0.0,
                        None,
                    )?;
                }
                for z in self.zs() {
                    self.push(
                        format!("z={z}"),
                        dirichlet_convex(Query::Riesz { z }, self.geom),
                        0.0,
                        None,
                    )?;
                }
            }
            "thm2.4-alpha" => {
                for z in self.zs() {
                    self.push(
                        format!("z={z} alpha={AAA_ALPHA}"),
                        dirichlet_convex_aaa(z, AAA_ALPHA, self.geom),
                        0.0,
                        None,
                    )?;
                }
            }
            "thm2.5" | "rem2.1" => {
                let l1 = self.lambda1();
                if id == "rem2.1" {
                    return self.push(
                        "lambda1".into(),
                        dirichlet_inradius(Query::Lambda1, l1, r, v, d),
                        0.0,
                        None,
                    );
                }
                for k in self.ks() {
                    let f = |l: f64| dirichlet_inradius(Query::Average { k }, l, r, v, d);
                    let unc = self.lambda1_sensitivity(&f);
                    self.push(format!("k={k}"), f(l1), unc, None)?;
                }
                for z in self.zs() {
                    let f = |l: f64| dirichlet_inradius(Query::Riesz { z }, l, r, v, d);
                    let unc = self.lambda1_sensitivity(&f);
                    self.push(format!("z={z}"), f(l1), unc, None)?;
                }
            }
            "rem2.2" => {
                let l1 = self.lambda1();
                for k in self.ks() {
                    let f = |l: f64| dirichlet_inradius_heat(Query::Average { k }, l, d);
                    let unc = self.lambda1_sensitivity(&f);
                    self.push(format!("k={k}"), f(l1), unc, None)?;
                }
                for z in self.zs() {
                    let f = |l: f64| dirichlet_inradius_heat(Query::Riesz { z }, l, d);
                    let unc = self.lambda1_sensitivity(&f);
                    self.push(format!("z={z}"), f(l1), unc, None)?;
                }
            }
            "protter" => self.push("lambda1".into(), protter_lower(r, self.geom.tags.convex), 0.0, None)?,
            "thm2.7" => {
                let tube = |h: f64| self.tube(h);
                let mut out = Vec::new();
                for k in self.ks() {
                    let res = dirichlet_class_s(Query::Average { k }, self.geom, &tube);
                    // Below the class-S threshold fall back to the inradius bound.
                    let fallback = match &res {
                        Ok(b) if !b.applicable => {
                            Some(dirichlet_inradius(Query::Average { k }, self.lambda1(), r, v, d))
                        }
                        _ => None,
                    };
                    out.push((k, res, fallback));
                }
                for (k, res, fallback) in out {
                    self.push(format!("k={k}"), res, 0.0, None)?;
                    if let Some(fb) = fallback {
                        let unc =
                            self.lambda1_sensitivity(&|l: f64| dirichlet_inradius(Query::Average { k }, l, r, v, d));
                        self.push(
                            format!("k={k}"),
                            fb,
                            unc,
                            Some("fallback for thm2.7 below its threshold".into()),
                        )?;
                    }
                }
            }
            "cor2.8" => {
                let tube = |h: f64| self.tube(h);
                let out: Vec<(f64, Result<BoundResult>)> = self
                    .ts()
                    .into_iter()
                    .map(|t| (t, dirichlet_class_s(Query::Partition { t }, self.geom, &tube)))
                    .collect();
                for (t, res) in out {
                    self.push(format!("t={t}"), res, 0.0, None)?;
                }
            }
            "thm2.9" => {
                dirichlet_c2(1, self.geom)?;
                for k in self.ks() {
                    self.push(format!("k={k}"), dirichlet_c2(k, self.geom), 0.0, None)?;
                }
            }
            "cor2.10" => {
                dirichlet_mean_convex(1, self.geom)?;
                for k in self.ks() {
                    self.push(format!("k={k}"), dirichlet_mean_convex(k, self.geom), 0.0, None)?;
                }
            }
            "thm2.11i" | "thm2.11ii" | "thm2.11iii" | "thm2.11iv" => {
                let case = match id {
                    "thm2.11i" => PlanarCase::C2,
                    "thm2.11ii" => PlanarCase::TwoComponents {
                        alpha: TWO_COMPONENT_ALPHA,
                    },
                    "thm2.11iii" => PlanarCase::Convex,
                    _ => PlanarCase::Polygon,
                };
                // Surface a class mismatch once rather than per k.
                dirichlet_planar(case, 1, self.geom)?;
                for k in self.ks() {
                    self.push(format!("k={k}"), dirichlet_planar(case, k, self.geom), 0.0, None)?;
                }
            }
            "bly" => {
                for k in self.ks() {
                    let s = semiclassical(d, v, k, Some(p))?;
                    self.push(format!("k={k}"), Ok(s.bounds[0].clone()), 0.0, None)?;
                }
            }
            "berezin" => {
                for z in self.zs() {
                    self.push(format!("z={z}"), berezin_riesz(d, v, z), 0.0, None)?;
                }
            }
            "appA.1" => {
                for k in self.ks_below(self.n() + 1) {
                    let sum = partial_sum(self.spec, k)?;
                    let res = bly_generalized(sum, k as f64, v, d, None).map(|mut b| {
                        b.at = Some(k as f64);
                        b
                    });
                    self.push(format!("k={k} phi=1"), res, 0.0, None)?;
                }
            }
            "appA.2" => {
                if !self.geom.tags.convex {
                    return Err(Error::NotApplicable(
                        "two-sided average bounds are used from the convex case".into(),
                    ));
                }
                let cd = classical_constant(d);
                let df = d as f64;
                let a = 2.0 * (2.0 * cd / (df + 2.0)).sqrt() * p / v;
                let b = 4.0 * p * p / (v * v);
                for k in self.ks_below(self.n()) {
                    let s = single_from_averages(k, a, b, 1, d, v)?;
                    let mk = |side, val: f64, at: usize| {
                        BoundResult::new(
                            "appA.2",
                            Bc::Dirichlet,
                            side,
                            Functional::Single,
                            val,
                            Some(at as f64),
                            Threshold::none(),
                            &[Assumption::Convex],
                        )
                        .with_extra("l", s.l as f64)
                    };
                    self.push(format!("k={k} lower"), Ok(mk(Side::Lower, s.lower_k, k)), 0.0, None)?;
                    self.push(
                        format!("k={k} upper"),
                        Ok(mk(Side::Upper, s.upper_k_next, k + 1)),
                        0.0,
                        None,
                    )?;
                }
            }
            "thm3.1" => self.neumann_classical_all()?,
            "thm3.2" => {
                for axis in 0..d {
                    let mut e = vec![0.0; d];
                    e[axis] = 1.0;
                    let w = direction_width(self.domain, &e)?;
                    for z in self.zs() {
                        self.push(format!("z={z} axis={axis}"), neumann_width(z, v, d, w), 0.0, None)?;
                    }
                }
            }
            "thm3.3" => {
                if !self.geom.tags.c2 {
                    return Err(Error::NotApplicable("bound requires a C2 domain".into()));
                }
                let z0 = neumann_z0_threshold(self.domain)?;
                let m = neumann_curvature_max(self.domain)?;
                let tube = |h: f64| self.tube(h);
                let mut out = Vec::new();
                for z in self.zs() {
                    out.push((
                        format!("z={z}"),
                        neumann_c2(Query::Riesz { z }, self.geom, z0, m, &tube),
                    ));
                }
                for k in self.ks() {
                    out.push((
                        format!("k={k}"),
                        neumann_c2(Query::Average { k }, self.geom, z0, m, &tube),
                    ));
                }
                for (label, res) in out {
                    self.push(label, res, 0.0, None)?;
                }
            }
            "kroger" => {
                for k in self.ks() {
                    let s = semiclassical(d, v, k, Some(p))?;
                    self.push(format!("k={k}"), Ok(s.bounds[1].clone()), 0.0, None)?;
                }
            }
            other => return Err(Error::InvalidArgument(format!("unknown theorem id '{other}'"))),
        }
        Ok(())
    }

    fn bracket_dirichlet(&mut self, norms: &TestFunctionNorms, h: f64) -> Result<()> {
        let v = self.geom.volume;
        let d = self.geom.dim;
        for k in self.ks_below(self.n()) {
            let avg = average(self.spec, k)?;
            let (mut lo, mut hi) = dirichlet_avp_bracket(norms, v, d, k, avg)?;
            // The bracket needs λ_k ≥ g, checked on the reference spectrum.
            let lk = self.spec.values[k - 1];
            if !lo.threshold.admits(lk - self.err(k)) {
                let why = format!("lambda_k = {lk} below the Rayleigh quotient {}", norms.rayleigh());
                lo = lo.inapplicable(why.clone());
                hi = hi.inapplicable(why);
            }
            let unc = self.max_err_upto(k + 1);
            self.push(format!("k={k} h={h} lower"), Ok(lo), unc, None)?;
            self.push(format!("k={k} h={h} upper"), Ok(hi), unc, None)?;
        }
        Ok(())
    }

    fn neumann_classical_all(&mut self) -> Result<()> {
        let (d, v) = (self.geom.dim, self.geom.volume);
        for k in self.ks() {
            self.push(
                format!("k={k}"),
                neumann_classical(Query::Average { k }, v, d),
                0.0,
                None,
            )?;
        }
        for z in self.zs() {
            self.push(format!("z={z}"), neumann_classical(Query::Riesz { z }, v, d), 0.0, None)?;
        }
        for t in self.ts() {
            self.push(
                format!("t={t}"),
                neumann_classical(Query::Partition { t }, v, d),
                0.0,
                None,
            )?;
        }
        for k in self.ks_below(self.n()) {
            let avg = average(self.spec, k)?;
            let unc = self.max_err_upto(k + 1);
            let (lo, hi) = neumann_bracket(k, v, d, avg)?;
            self.push(format!("k={k} bracket lower"), Ok(lo), unc, None)?;
            self.push(format!("k={k} bracket upper"), Ok(hi), unc, None)?;
            let rec = neumann_quadratic_record(k, v, d, avg, self.spec.values[k])?;
            let status = if rec.holds {
                Status::Pass
            } else if unc > 0.0 {
                Status::Inconclusive
            } else {
                Status::Fail
            };
            self.records.push(Record {
                theorem_id: "thm3.1".into(),
                query: format!("k={k} quadratic"),
                at: Some(k as f64),
                side: Side::Upper,
                functional: Functional::Mu,
                bound: rec.rhs,
                reference: rec.lhs,
                margin: rec.rhs - rec.lhs,
                applicable: true,
                pass: status == Status::Pass,
                status,
                note: None,
            });
        }
        Ok(())
    }
}
