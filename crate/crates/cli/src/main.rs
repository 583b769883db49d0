use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spectral_bounds::bounds::BoundResult;
use spectral_bounds::geometry::{summarize, Domain, GeometricSummary};
use spectral_bounds::riesz::{evaluate_detailed, SpectralQuery};
use spectral_bounds::spectra::{Bc, Spectrum};
use spectral_bounds::verify::{
    evaluate_bounds, fmt17, reference_spectrum, verify_with_spectrum, Grid, SpectrumOptions, Status, VerificationReport,
};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "spectral-bounds",
    version,
    about = "Semiclassical eigenvalue bounds and their verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Domain spec: a JSON file or inline JSON.
    #[arg(long, global = true)]
    domain: Option<String>,

    #[arg(long, global = true, default_value = "dirichlet")]
    bc: Bc,

    /// Number of eigenvalues (default 600 closed-form, 24 finite-element).
    #[arg(long, global = true)]
    count: Option<usize>,

    /// Eigenvalue indices as A:B or A:B:step.
    #[arg(long, global = true)]
    k: Option<String>,

    /// Comma-separated spectral parameters for Riesz means.
    #[arg(long, global = true, value_delimiter = ',')]
    z: Vec<f64>,

    /// Comma-separated heat-trace times.
    #[arg(long, global = true, value_delimiter = ',')]
    t: Vec<f64>,

    /// Riesz mean order for the `riesz` table.
    #[arg(long, global = true, default_value_t = 1.0)]
    sigma: f64,

    /// Comma-separated theorem ids; all bounds for the boundary condition if omitted.
    #[arg(long, global = true, value_delimiter = ',')]
    theorems: Vec<String>,

    /// Spectrum JSON to use instead of computing one.
    #[arg(long, global = true)]
    spectrum: Option<PathBuf>,

    /// Geometric summary JSON (as printed by `geometry`) overriding the computed one.
    #[arg(long, global = true)]
    geometry: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,

    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Geometric summary of the domain.
    Geometry,
    /// Reference spectrum, closed form or finite elements.
    Spectrum,
    /// Bound values at the grid points, without judgement.
    Bounds,
    /// Spectral functionals of the reference spectrum.
    Riesz,
    /// Bounds against the reference spectrum; exit 1 on any failure.
    Verify,
    /// Human-readable summary plus a (k, average, bounds) table.
    Report,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Tsv,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Compute(_) => 3,
        }
    }
}

impl From<spectral_bounds::Error> for CliError {
    fn from(e: spectral_bounds::Error) -> Self {
        use spectral_bounds::Error as E;
        match e {
            E::Parse(_) | E::InvalidDomain(_) | E::InvalidArgument(_) => CliError::Input(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> CliResult<u8> {
    let domain = load_domain(cli.domain.as_deref())?;
    let (text, code) = match cli.command {
        Command::Geometry => (geometry(cli, &domain)?, 0),
        Command::Spectrum => (spectrum_out(cli, &load_spectrum(cli, &domain)?)?, 0),
        Command::Bounds => (bounds(cli, &domain)?, 0),
        Command::Riesz => (riesz(cli, &domain)?, 0),
        Command::Verify => {
            let report = verify(cli, &domain)?;
            let text = match cli.format {
                Format::Json => report.to_json()?,
                Format::Csv => report.to_csv(),
                Format::Tsv => report.average_table(),
            };
            (text, if report.ok() { 0 } else { 1 })
        }
        Command::Report => {
            let report = verify(cli, &domain)?;
            let code = if report.ok() { 0 } else { 1 };
            let summary = human_summary(&report);
            let table = report.average_table();
            // with --out the table goes to the file and the summary to stdout
            if let Some(p) = &cli.out {
                std::fs::write(p, &table)
                    .map_err(|e| CliError::Compute(format!("cannot write {}: {e}", p.display())))?;
                (summary, code)
            } else {
                (format!("{summary}\n{table}"), code)
            }
        }
    };
    if cli.command == Command::Report && cli.out.is_some() {
        write_stdout(&text)?;
    } else {
        emit(cli, &text)?;
    }
    Ok(code)
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Compute(format!("cannot write {}: {e}", p.display()))),
        None => write_stdout(text),
    }
}

/// A closed pipe (e.g. `| head`) is not an error.
fn write_stdout(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    let tail = if text.ends_with('\n') { "" } else { "\n" };
    match out
        .write_all(text.as_bytes())
        .and_then(|_| out.write_all(tail.as_bytes()))
    {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(CliError::Compute(format!("cannot write output: {e}")))
        }
        _ => Ok(()),
    }
}

fn load_domain(arg: Option<&str>) -> CliResult<Domain> {
    let arg = arg.ok_or_else(|| CliError::Input("--domain is required".into()))?;
    let json = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::Input(format!("cannot read domain spec {arg}: {e}")))?
    };
    Ok(Domain::from_json(&json)?)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf, what: &str) -> CliResult<T> {
    let s = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&s).map_err(|e| CliError::Input(format!("malformed {what} {}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> CliResult<String> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Compute(e.to_string()))
}

fn load_spectrum(cli: &Cli, domain: &Domain) -> CliResult<Spectrum> {
    if let Some(p) = &cli.spectrum {
        let s: Spectrum = read_json(p, "spectrum")?;
        s.validate()?;
        if s.bc != cli.bc {
            return Err(CliError::Input(format!(
                "spectrum is {:?} but --bc is {:?}",
                s.bc, cli.bc
            )));
        }
        return Ok(s);
    }
    let defaults = SpectrumOptions::default();
    let opts = SpectrumOptions {
        count: cli.count.unwrap_or(defaults.count),
        fem_count: cli.count.unwrap_or(defaults.fem_count),
        seed: cli.seed,
        ..defaults
    };
    Ok(reference_spectrum(domain, cli.bc, &opts)?)
}

fn load_geometry(cli: &Cli, domain: &Domain) -> CliResult<GeometricSummary> {
    match &cli.geometry {
        Some(p) => read_json(p, "geometry"),
        None => Ok(summarize(domain)?),
    }
}

/// Parses `A:B` or `A:B:step`, inclusive.
fn parse_k_range(s: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::Input(format!("--k expects A:B or A:B:step with 1 <= A <= B, got '{s}'"));
    let parts: Vec<usize> = s
        .split(':')
        .map(|p| p.trim().parse().map_err(|_| bad()))
        .collect::<CliResult<_>>()?;
    let (a, b, step) = match parts[..] {
        [a, b] => (a, b, 1),
        [a, b, step] => (a, b, step),
        _ => return Err(bad()),
    };
    if a == 0 || b < a || step == 0 {
        return Err(bad());
    }
    Ok((a..=b).step_by(step).collect())
}

/// Explicit axes replace the matching axis of the default grid.
fn grid(cli: &Cli, geom: &GeometricSummary, spectrum: &Spectrum) -> CliResult<Grid> {
    let mut g = Grid::default_for(geom, spectrum);
    if let Some(k) = &cli.k {
        g.ks = parse_k_range(k)?;
    }
    if !cli.z.is_empty() {
        g.zs = cli.z.clone();
    }
    if !cli.t.is_empty() {
        g.ts = cli.t.clone();
    }
    Ok(g)
}

fn geometry(cli: &Cli, domain: &Domain) -> CliResult<String> {
    let g = load_geometry(cli, domain)?;
    match cli.format {
        Format::Json => to_json(&g),
        Format::Csv | Format::Tsv => {
            let sep = if cli.format == Format::Csv { ',' } else { '\t' };
            let mut rows = vec![
                ("dim", g.dim as f64),
                ("volume", g.volume),
                ("boundary_measure", g.boundary_measure),
                ("inradius", g.inradius),
                ("max_tube_radius", g.max_tube_radius),
                ("boundary_components", g.boundary_components as f64),
            ];
            let curv: Vec<(String, f64)> = g
                .curvature_integrals
                .iter()
                .flatten()
                .enumerate()
                .map(|(j, v)| (format!("curvature_integral_{}", j + 1), *v))
                .collect();
            let mut out = format!("field{sep}value\n");
            for (name, v) in rows.drain(..) {
                let _ = writeln!(out, "{name}{sep}{}", fmt17(v));
            }
            for (name, v) in curv {
                let _ = writeln!(out, "{name}{sep}{}", fmt17(v));
            }
            Ok(out)
        }
    }
}

fn spectrum_out(cli: &Cli, s: &Spectrum) -> CliResult<String> {
    match cli.format {
        Format::Json => to_json(s),
        Format::Csv | Format::Tsv => {
            let sep = if cli.format == Format::Csv { ',' } else { '\t' };
            let mut out = format!("k{sep}value{sep}error_bound\n");
            for (i, (v, e)) in s.values.iter().zip(&s.error_bounds).enumerate() {
                let _ = writeln!(out, "{}{sep}{}{sep}{}", i + 1, fmt17(*v), fmt17(*e));
            }
            Ok(out)
        }
    }
}

fn bounds(cli: &Cli, domain: &Domain) -> CliResult<String> {
    let geom = load_geometry(cli, domain)?;
    let spectrum = load_spectrum(cli, domain)?;
    let g = grid(cli, &geom, &spectrum)?;
    let results: Vec<BoundResult> = evaluate_bounds(domain, Some(&geom), &spectrum, &cli.theorems, Some(&g), cli.seed)?;
    match cli.format {
        Format::Json => to_json(&results),
        Format::Csv | Format::Tsv => {
            let sep = if cli.format == Format::Csv { ',' } else { '\t' };
            let mut out = format!("theorem_id{sep}functional{sep}at{sep}side{sep}value{sep}applicable\n");
            for r in &results {
                let _ = writeln!(
                    out,
                    "{}{sep}{}{sep}{}{sep}{}{sep}{}{sep}{}",
                    r.theorem_id,
                    enum_name(&r.functional),
                    r.at.map_or(String::new(), fmt17),
                    enum_name(&r.side),
                    fmt17(r.value),
                    r.applicable
                );
            }
            Ok(out)
        }
    }
}

fn enum_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|x| x.as_str().map(str::to_owned))
        .unwrap_or_default()
}

#[derive(Serialize)]
struct FunctionalRow {
    query: SpectralQuery,
    value: f64,
    truncation: f64,
}

fn riesz(cli: &Cli, domain: &Domain) -> CliResult<String> {
    let spectrum = load_spectrum(cli, domain)?;
    let geom = load_geometry(cli, domain)?;
    let g = grid(cli, &geom, &spectrum)?;
    let mut queries: Vec<SpectralQuery> =
        g.ks.iter()
            .filter(|&&k| k <= spectrum.count())
            .map(|&k| SpectralQuery::Average { k })
            .collect();
    for &z in &g.zs {
        queries.push(SpectralQuery::RieszMean { z, sigma: cli.sigma });
        queries.push(SpectralQuery::Counting { lambda: z });
    }
    queries.extend(g.ts.iter().map(|&t| SpectralQuery::Partition { t }));
    let mut rows = Vec::with_capacity(queries.len());
    for q in queries {
        let e = evaluate_detailed(&spectrum, q)?;
        rows.push(FunctionalRow {
            query: q,
            value: e.value,
            truncation: e.truncation,
        });
    }
    match cli.format {
        Format::Json => to_json(&rows),
        Format::Csv | Format::Tsv => {
            let sep = if cli.format == Format::Csv { ',' } else { '\t' };
            let mut out = format!("functional{sep}parameter{sep}value{sep}truncation\n");
            for r in &rows {
                let (name, p) = match r.query {
                    SpectralQuery::Average { k } => ("average", k as f64),
                    SpectralQuery::RieszMean { z, .. } => ("riesz", z),
                    SpectralQuery::Counting { lambda } => ("counting", lambda),
                    SpectralQuery::Partition { t } => ("partition", t),
                    SpectralQuery::Legendre { w } => ("legendre", w),
                };
                let _ = writeln!(
                    out,
                    "{name}{sep}{}{sep}{}{sep}{}",
                    fmt17(p),
                    fmt17(r.value),
                    fmt17(r.truncation)
                );
            }
            Ok(out)
        }
    }
}

fn verify(cli: &Cli, domain: &Domain) -> CliResult<VerificationReport> {
    let spectrum = load_spectrum(cli, domain)?;
    let geom = load_geometry(cli, domain)?;
    let g = grid(cli, &geom, &spectrum)?;
    Ok(verify_with_spectrum(
        domain,
        &spectrum,
        &cli.theorems,
        Some(&g),
        cli.seed,
    )?)
}

fn human_summary(r: &VerificationReport) -> String {
    let s = &r.summary;
    let mut out = String::new();
    let _ = writeln!(out, "domain: {}", r.description);
    let _ = writeln!(
        out,
        "boundary condition: {:?}, spectrum: {} eigenvalues ({:?})",
        r.bc, r.eigenvalues, r.source
    );
    let _ = writeln!(
        out,
        "records: {} ({} pass, {} fail, {} inconclusive, {} inapplicable)",
        s.total, s.passed, s.failed, s.inconclusive, s.inapplicable
    );
    if let Some(m) = s.worst_margin {
        let _ = writeln!(out, "worst margin: {m:e}");
    }
    let mut ids: Vec<&str> = Vec::new();
    for rec in &r.records {
        if !ids.contains(&rec.theorem_id.as_str()) {
            ids.push(&rec.theorem_id);
        }
    }
    for id in ids {
        let of = |st: Status| {
            r.records
                .iter()
                .filter(|x| x.theorem_id == id && x.status == st)
                .count()
        };
        let _ = writeln!(
            out,
            "  {id:<12} pass {:>5}  fail {:>4}  inconclusive {:>4}  inapplicable {:>4}",
            of(Status::Pass),
            of(Status::Fail),
            of(Status::Inconclusive),
            of(Status::Inapplicable)
        );
    }
    for f in &r.fits {
        let _ = writeln!(
            out,
            "fit {}: estimate {:.6} vs prediction {:.6} on k in [{}, {}]",
            f.theorem_id, f.estimate, f.prediction, f.k_min, f.k_max
        );
    }
    let _ = writeln!(out, "result: {}", if r.ok() { "no failures" } else { "FAILED" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_ranges() {
        assert_eq!(parse_k_range("1:5").unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(parse_k_range("2:10:4").unwrap(), vec![2, 6, 10]);
        for bad in ["0:3", "5:1", "1:2:0", "1", "a:b", "1:2:3:4"] {
            assert!(matches!(parse_k_range(bad), Err(CliError::Input(_))), "{bad}");
        }
    }

    #[test]
    fn error_codes() {
        let e: CliError = spectral_bounds::Error::Parse("x".into()).into();
        assert_eq!(e.code(), 2);
        let e: CliError = spectral_bounds::Error::Mesh("x".into()).into();
        assert_eq!(e.code(), 3);
    }
}
