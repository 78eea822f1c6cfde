//! The `akdq` subcommands.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use super::expr::parse_jet;
use super::report::{Report, Section};
use super::spec::GeometrySpec;
use crate::error::Result;
use crate::fedosov::{
    base_values, canonical_class_check, flatness_suite, kahler_degeneration, kappa_via_c2,
    kappa_via_formula, lemma_suite, poisson_bracket, star_suite, FedosovSolution, StarProduct,
    Variant,
};
use crate::geometry::{CheckResult, DerivedGeometry, Tensor};
use crate::jets::scalar::{gi, imag_unit};
use crate::wick::operator_suite;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "akdq", version, about = "Fedosov star products on almost-Kähler charts, in exact arithmetic")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a chart and verify the identities of its derived tensors.
    Check {
        file: PathBuf,
        /// Override the jet order of the file.
        #[arg(long)]
        jet_order: Option<u32>,
    },
    /// Print Γ, T, N, R, γ and μ.
    Connection {
        file: PathBuf,
        #[arg(long)]
        jet_order: Option<u32>,
    },
    /// Coefficients C_r(f, g) at the base point for r up to --order.
    Star {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: u32,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        /// Use the normalized product built from the Weyl fibre product.
        #[arg(long)]
        normalized: bool,
        #[arg(long)]
        jet_order: Option<u32>,
    },
    /// κ by every route, and the exactness witness for the class c_0.
    Class {
        file: PathBuf,
        #[arg(long)]
        jet_order: Option<u32>,
    },
    /// Run the invariant suites on the bundled corpus.
    Selftest {
        /// Random samples per identity.
        #[arg(long, default_value_t = 3)]
        samples: usize,
        /// Restrict to one bundled chart.
        #[arg(long)]
        chart: Option<String>,
    },
}

/// Parse `argv` (including the program name), run, and return the exit code
/// and the rendered report.
pub fn run_command<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.to_string());
        }
    };
    let report = execute(&cli.command);
    let out = match cli.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    (report.exit_code(), out)
}

/// A query against one chart, independent of where the chart came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    Check,
    Connection,
    Star {
        order: u32,
        f: String,
        g: String,
        normalized: bool,
    },
    Class,
}

impl Query {
    pub fn name(&self) -> &'static str {
        match self {
            Query::Check => "check",
            Query::Connection => "connection",
            Query::Star { .. } => "star",
            Query::Class => "class",
        }
    }
}

/// Run one subcommand; errors are folded into the report.
pub fn execute(command: &Command) -> Report {
    let (file, query, jet_order) = match command {
        Command::Selftest { samples, chart } => {
            let mut report = Report::new("selftest");
            if let Err(e) = selftest(&mut report, *samples, chart.as_deref()) {
                report.fail(&e);
            }
            return report;
        }
        Command::Check { file, jet_order } => (file, Query::Check, *jet_order),
        Command::Connection { file, jet_order } => (file, Query::Connection, *jet_order),
        Command::Star {
            file,
            order,
            f,
            g,
            normalized,
            jet_order,
        } => {
            let query = Query::Star {
                order: *order,
                f: f.clone(),
                g: g.clone(),
                normalized: *normalized,
            };
            (file, query, *jet_order)
        }
        Command::Class { file, jet_order } => (file, Query::Class, *jet_order),
    };
    match GeometrySpec::load(file) {
        Ok(spec) => evaluate(&spec, &query, jet_order),
        Err(e) => {
            let mut report = Report::new(query.name());
            report.fail(&e);
            report
        }
    }
}

/// Answer `query` on `spec`, optionally overriding its jet order.
pub fn evaluate(spec: &GeometrySpec, query: &Query, jet_order: Option<u32>) -> Report {
    let mut report = Report::new(query.name());
    let outcome = match query {
        Query::Check => check(&mut report, spec, jet_order),
        Query::Connection => connection(&mut report, spec, jet_order),
        Query::Star {
            order,
            f,
            g,
            normalized,
        } => star(&mut report, spec, *order, f, g, *normalized, jet_order),
        Query::Class => class(&mut report, spec, jet_order),
    };
    if let Err(e) = outcome {
        report.fail(&e);
    }
    report
}

fn load(report: &mut Report, spec: &GeometrySpec, order: Option<u32>) -> Result<DerivedGeometry> {
    let chart = spec.to_chart(order)?;
    report.chart = Some(spec.name.clone());
    report.jet_order = Some(chart.order());
    let validation = chart.validate();
    let valid = validation.all_passed();
    report.checks(validation.checks);
    if !valid {
        return Err(crate::geometry::validate_chart(&chart).unwrap_err());
    }
    let geo = DerivedGeometry::derive(&chart)?;
    report.checks(geo.checks.iter().cloned());
    Ok(geo)
}

fn check(report: &mut Report, spec: &GeometrySpec, order: Option<u32>) -> Result<()> {
    let geo = load(report, spec, order)?;
    let mut s = Section::new("metric at the base point");
    s.base_matrix("g", &geo.metric.g.constant_part());
    report.sections.push(s);
    Ok(())
}

fn tensor_section(title: &str, name: &str, t: &Tensor) -> Section {
    let mut s = Section::new(title);
    for (idx, jet) in t.values() {
        if jet.is_zero() {
            continue;
        }
        let label: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
        s.jet(format!("{name}[{}]", label.join(",")), jet);
    }
    s
}

fn connection(report: &mut Report, spec: &GeometrySpec, order: Option<u32>) -> Result<()> {
    let geo = load(report, spec, order)?;
    report.sections.extend([
        tensor_section("Christoffel symbols Gamma^l_jk as [l,j,k]", "Gamma", &geo.gamma),
        tensor_section("torsion T^l_jk", "T", &geo.torsion),
        tensor_section("Nijenhuis tensor N^l_jk", "N", &geo.nijenhuis),
        tensor_section("curvature R^s_tkl", "R", &geo.curvature),
    ]);
    let mut s = Section::new("Chern-Weil form gamma = sum_{k<l} gamma_kl dx^k ^ dx^l");
    s.two_form("gamma", &geo.gamma_form);
    report.sections.push(s);
    let mut s = Section::new("one-form mu = mu_l dx^l");
    for (l, m) in geo.mu_form.iter().enumerate() {
        s.jet(format!("mu[{}]", l + 1), m);
    }
    report.sections.push(s);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn star(
    report: &mut Report,
    spec: &GeometrySpec,
    n: u32,
    f: &str,
    g: &str,
    normalized: bool,
    order: Option<u32>,
) -> Result<()> {
    // values of C_r at the base point read τ up to Deg 2r
    let max_deg = (2 * n + 1).max(3);
    let k = order.unwrap_or(spec.jet_order.max(max_deg));
    let geo = load(report, spec, Some(k))?;
    let dim = geo.dim();
    let f = parse_jet(f, dim, k)?;
    let g = parse_jet(g, dim, k)?;
    let sol = FedosovSolution::solve(&geo, max_deg)?;
    report.checks(sol.checks.iter().cloned());
    let variant = if normalized { Variant::Primed } else { Variant::Plain };
    let mut product = StarProduct::new(&sol, variant);
    let series = product.multiply(&f, &g, n)?;

    let pointwise = (&f * &g).value();
    report.check(CheckResult::from_witness(
        "C_0(f, g) = f g at the base point",
        (series.values()[0] != pointwise).then(|| "values differ".to_string()),
    ));
    if n >= 1 {
        let bracket = poisson_bracket(&sol, &f, &g)?.value();
        let (identity, lhs, rhs) = if normalized {
            ("C'_1(f, g) = (i/2){f, g}", series.values()[1].clone(), &bracket * &gi(1, 2))
        } else {
            let swapped = product.bidifferential(&g, &f, 1)?.value();
            (
                "C_1(f, g) - C_1(g, f) = i{f, g}",
                &series.values()[1] - &swapped,
                &bracket * &imag_unit(),
            )
        };
        report.check(CheckResult::from_witness(
            identity,
            (lhs != rhs).then(|| "values differ".to_string()),
        ));
    }
    let mut s = Section::new(if normalized {
        "C'_r(f, g) at the base point"
    } else {
        "C_r(f, g) at the base point"
    });
    for (r, v) in series.values().iter().enumerate() {
        s.scalar(format!("C_{r}"), v);
    }
    report.sections.push(s);
    Ok(())
}

fn class(report: &mut Report, spec: &GeometrySpec, order: Option<u32>) -> Result<()> {
    let geo = load(report, spec, order)?;
    let sol = FedosovSolution::solve(&geo, 4)?;
    report.checks(sol.checks.iter().cloned());
    let routes = kappa_via_formula(&sol)?;
    report.checks(routes.checks.iter().cloned());
    let extracted = kappa_via_c2(&sol)?;
    report.check(CheckResult::from_witness(
        "kappa from C_2^- = kappa from the formula at the base point",
        (extracted != base_values(&routes.via_chern_weil)).then(|| "base-point matrices differ".into()),
    ));
    report.checks(canonical_class_check(&sol, &routes.via_chern_weil)?);

    let mut s = Section::new("kappa = sum_{k<l} kappa_kl dx^k ^ dx^l");
    s.two_form("kappa (i/nu) delta (r')^(3)_1", &routes.via_primed);
    s.two_form("kappa -i Delta(R + nabla r^(2))", &routes.via_laplacian);
    s.two_form("kappa (i/2) gamma - i d mu", &routes.via_chern_weil);
    s.base_matrix("kappa from C_2^-", &extracted);
    report.sections.push(s);
    let mut s = Section::new("ingredients");
    s.two_form("gamma", &geo.gamma_form);
    s.two_form("lambda", &routes.lambda);
    s.two_form("d mu", &routes.d_mu);
    report.sections.push(s);
    let mut s = Section::new("class");
    let holds = report.passed;
    s.push(
        "c_0(*) = [kappa] = -(1/2i) [gamma]",
        if holds { "holds exactly at the reliable jet order" } else { "not established" },
    );
    report.sections.push(s);
    Ok(())
}

fn selftest(report: &mut Report, samples: usize, only: Option<&str>) -> Result<()> {
    let specs: Vec<GeometrySpec> = GeometrySpec::all_bundled()
        .into_iter()
        .filter(|s| only.map_or(true, |name| s.name == name))
        .collect();
    if specs.is_empty() {
        return Err(crate::Error::MalformedInput(format!(
            "no bundled chart named {}",
            only.unwrap_or_default()
        )));
    }
    let mut summary = Section::new("charts");
    for (seed, spec) in specs.iter().enumerate() {
        let seed = seed as u64;
        let tag = |cs: Vec<CheckResult>| {
            cs.into_iter().map(|c| CheckResult {
                identity: format!("{}: {}", spec.name, c.identity),
                ..c
            })
        };
        let chart = spec.to_chart(Some(6))?;
        let validation = chart.validate();
        report.checks(tag(validation.checks));
        let geo = DerivedGeometry::derive(&chart)?;
        report.checks(tag(geo.checks.clone()));
        report.checks(tag(operator_suite(&geo, samples, seed)?));
        report.checks(tag(vec![lemma_suite(&geo, samples, seed)?]));

        let sol = FedosovSolution::solve(&geo, 5)?;
        report.checks(tag(sol.checks.clone()));
        report.checks(tag(sol.equation_residuals()?.into_iter().map(|(_, c)| c).collect()));
        report.checks(tag(flatness_suite(&sol, samples, seed)?));
        report.checks(tag(star_suite(&sol, 2, samples, 3, seed)?));
        let routes = kappa_via_formula(&sol)?;
        report.checks(tag(routes.checks.clone()));
        report.checks(tag(canonical_class_check(&sol, &routes.via_chern_weil)?));
        let extracted = kappa_via_c2(&sol)?;
        report.checks(tag(vec![CheckResult::from_witness(
            "kappa from C_2^- matches at the base point",
            (extracted != base_values(&routes.via_chern_weil)).then(|| "base-point matrices differ".into()),
        )]));
        if geo.nijenhuis.is_zero() {
            report.checks(tag(kahler_degeneration(&sol)?));
        }
        summary.push(spec.name.clone(), spec.description.clone());
    }
    report.sections.push(summary);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String) {
        run_command(std::iter::once("akdq").chain(args.iter().copied()))
    }

    #[test]
    fn check_on_bundled_chart_passes() {
        let (code, out) = run(&["check", "examples/flat2d.json"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("verdict: pass"));
    }

    #[test]
    fn star_prints_exact_values() {
        let (code, out) = run(&[
            "star", "nonintegrable4d.json", "--order", "2", "--f", "x1*x2", "--g", "x2^2",
        ]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("C_2 = "));
    }

    #[test]
    fn json_output_is_deterministic_and_round_trips() {
        let args = ["--format", "json", "class", "kahler2d", "--jet-order", "5"];
        let (code, first) = run(&args);
        assert_eq!(code, 0, "{first}");
        let (_, second) = run(&args);
        assert_eq!(first, second);
        let parsed = Report::from_json(&first).unwrap();
        assert_eq!(parsed.to_json(), first);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(&["check", "/nonexistent/chart.json"]).0, 2);
        assert_eq!(run(&["star", "flat2d", "--f", "x3", "--g", "x1"]).0, 2);
        assert_eq!(run(&["frobnicate"]).0, 2);
        assert_eq!(run(&["--help"]).0, 0);
    }
}
