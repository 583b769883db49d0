//! Closed-form spectra by separation of variables.

use super::bessel::{bessel_jy_int, bessel_zeros_below, ZeroKind};
use super::{Bc, Source, Spectrum};
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::numeric::{bisect, unit_ball_volume};
use std::f64::consts::PI;

/// Lowest `count` eigenvalues of a Box, Disk or Annulus.
pub fn analytic_spectrum(domain: &Domain, bc: Bc, count: usize) -> Result<Spectrum> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let (volume, d) = match domain {
        Domain::Box { lengths } => (lengths.iter().product::<f64>(), lengths.len()),
        Domain::Disk { radius } => (PI * radius * radius, 2),
        Domain::Annulus { r_in, r_out } => (PI * (r_out * r_out - r_in * r_in), 2),
        _ => {
            return Err(Error::UnsupportedDomain {
                op: "analytic_spectrum",
                reason: format!("no closed-form spectrum for {}", domain.describe()),
            })
        }
    };
    // Weyl guess for the cutoff, grown geometrically until the enumeration
    // holds more than `count` values strictly below it.
    let cd = 4.0 * PI * PI * unit_ball_volume(d).powf(-2.0 / d as f64);
    let mut lambda = 1.5 * cd * ((count + 1) as f64 / volume).powf(2.0 / d as f64) + 10.0 / volume.powf(2.0 / d as f64);
    loop {
        let mut all = enumerate_below(domain, bc, lambda)?;
        all.sort_by(|a, b| a.total_cmp(b));
        let below = all.iter().filter(|&&v| v < lambda).count();
        if below > count {
            let next = all[count];
            all.truncate(count);
            let mut s = Spectrum::exact(bc, all, Source::Analytic)?;
            s.complete_below = Some(next);
            return Ok(s);
        }
        lambda *= 1.5;
    }
}

fn enumerate_below(domain: &Domain, bc: Bc, lambda: f64) -> Result<Vec<f64>> {
    match domain {
        Domain::Box { lengths } => Ok(box_spectrum(lengths, bc, lambda)),
        Domain::Disk { radius } => disk_below(*radius, bc, lambda),
        Domain::Annulus { r_in, r_out } => annulus_below(*r_in, *r_out, bc, lambda),
        _ => unreachable!(),
    }
}

/// All values Σ π²mᵢ²/Lᵢ² ≤ `lambda` (mᵢ ≥ 1 Dirichlet, mᵢ ≥ 0 Neumann).
pub fn box_spectrum(lengths: &[f64], bc: Bc, lambda: f64) -> Vec<f64> {
    let m0 = match bc {
        Bc::Dirichlet => 1u64,
        Bc::Neumann => 0,
    };
    let mut out = Vec::new();
    fn rec(lengths: &[f64], m0: u64, acc: f64, lambda: f64, out: &mut Vec<f64>) {
        let Some((&l, rest)) = lengths.split_first() else {
            out.push(acc);
            return;
        };
        let mut m = m0;
        loop {
            let v = acc + PI * PI * (m * m) as f64 / (l * l);
            if v > lambda {
                break;
            }
            rec(rest, m0, v, lambda, out);
            m += 1;
        }
    }
    rec(lengths, m0, 0.0, lambda, &mut out);
    out
}

fn disk_below(radius: f64, bc: Bc, lambda: f64) -> Result<Vec<f64>> {
    let xmax = lambda.sqrt() * radius;
    let kind = match bc {
        Bc::Dirichlet => ZeroKind::J,
        Bc::Neumann => ZeroKind::JPrime,
    };
    let mut out = Vec::new();
    if bc == Bc::Neumann {
        out.push(0.0);
    }
    let mut n = 0usize;
    while (n as f64) < xmax {
        let zeros = bessel_zeros_below(n as f64, xmax, kind)?;
        let mult = if n == 0 { 1 } else { 2 };
        for z in zeros {
            let v = (z / radius).powi(2);
            for _ in 0..mult {
                out.push(v);
            }
        }
        n += 1;
    }
    Ok(out)
}

/// Radial cross product whose zeros in x give annulus eigenvalues x².
fn annulus_cross(n: usize, x: f64, a: f64, b: f64, bc: Bc) -> f64 {
    let (ja, ya) = bessel_jy_int(n + 1, x * a);
    let (jb, yb) = bessel_jy_int(n + 1, x * b);
    let nf = n as f64;
    let (pa, qa, pb, qb) = match bc {
        Bc::Dirichlet => (ja[n], ya[n], jb[n], yb[n]),
        Bc::Neumann => (
            nf / (x * a) * ja[n] - ja[n + 1],
            nf / (x * a) * ya[n] - ya[n + 1],
            nf / (x * b) * jb[n] - jb[n + 1],
            nf / (x * b) * yb[n] - yb[n + 1],
        ),
    };
    // Normalize so that large Y values cannot overflow the sign test.
    let scale = qa.abs() + qb.abs() + 1.0;
    (pa * qb - pb * qa) / scale
}

/// Roots x ≤ xmax of the angular mode n on the annulus a < r < b.
pub fn annulus_radial_roots(n: usize, a: f64, b: f64, bc: Bc, xmax: f64) -> Result<Vec<f64>> {
    let step = (PI / (b - a)) / 100.0;
    let mut x = (n as f64 / b).max(step);
    let mut out = Vec::new();
    if x >= xmax {
        return Ok(out);
    }
    let f = |x: f64| annulus_cross(n, x, a, b, bc);
    let mut fx = f(x);
    while x < xmax {
        let y = x + step;
        let fy = f(y);
        if fx != 0.0 && fx.signum() != fy.signum() {
            let r = bisect(f, x, y, 0.0)?;
            if r <= xmax {
                out.push(r);
            }
        }
        x = y;
        fx = fy;
    }
    Ok(out)
}

fn annulus_below(a: f64, b: f64, bc: Bc, lambda: f64) -> Result<Vec<f64>> {
    let xmax = lambda.sqrt();
    let mut out = Vec::new();
    if bc == Bc::Neumann {
        out.push(0.0);
    }
    let mut n = 0usize;
    while (n as f64) / b < xmax {
        let mult = if n == 0 { 1 } else { 2 };
        for r in annulus_radial_roots(n, a, b, bc, xmax)? {
            for _ in 0..mult {
                out.push(r * r);
            }
        }
        n += 1;
    }
    Ok(out)
}
