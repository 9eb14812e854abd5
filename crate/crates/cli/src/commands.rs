use std::fmt::Write as _;
use std::time::Instant;

use multislice::certify::{verify_all, CompositionReport, Status, SuiteOptions};
use multislice::coarsening::{audit_pairs, coarsen_composition, coarsening_pairs, is_coarser, CoarseningAudit, CoarseningMap};
use multislice::composition::Composition;
use multislice::error::{Error, Result};
use multislice::limits::Limits;
use multislice::multislice::Multislice;
use multislice::operators::{k_matrix, laplacian, p_matrix};
use multislice::report::{write_summary_csv, Envelope, Timing};
use multislice::scalar::{Rational, Scalar, ScalarKind};
use multislice::spectral::{
    k_spectrum, laplacian_nullity, laplacian_spectrum, mk_tensor_spectrum, p_spectrum, Spectrum,
};
use multislice::walk::{
    decay_target, simulate, stationarity_test, write_autocorrelation_csv, ChiSquareTest, Observable, WalkConfig,
    WalkStats,
};
use serde::Serialize;

use crate::args::{
    CoarsenArgs, Command, ExportArgs, Format, Global, Operator, SpectrumArgs, Target, VerifyArgs, WalkArgs,
};

/// Rendered output and whether every certificate passed.
pub struct Outcome {
    pub body: Vec<u8>,
    pub pass: bool,
}

fn unsupported(format: Format, command: &str) -> Error {
    Error::Parse(format!("format {format:?} is not supported by {command}").to_lowercase())
}

fn limits(g: &Global) -> Limits {
    Limits { enumeration_budget: g.budget, dense_cap: g.dense_cap, tolerance: g.tolerance, ..Limits::default() }
}

fn arithmetic(g: &Global) -> ScalarKind {
    if g.float {
        ScalarKind::Floating
    } else {
        ScalarKind::Exact
    }
}

#[derive(Serialize)]
struct Config<'a, A: Serialize> {
    #[serde(flatten)]
    global: &'a Global,
    limits: Limits,
    arithmetic: ScalarKind,
    args: &'a A,
}

fn envelope<A: Serialize, R: Serialize>(name: &str, g: &Global, args: &A, results: &R) -> Result<Envelope> {
    let config = Config { global: g, limits: limits(g), arithmetic: arithmetic(g), args };
    Envelope::new(name, &config, results)
}

fn json(env: &Envelope) -> Result<Vec<u8>> {
    let mut body = Vec::new();
    env.write_json(&mut body)?;
    Ok(body)
}

pub fn run(command: &Command, g: &Global) -> Result<Outcome> {
    let start = Instant::now();
    let finish = |mut env: Envelope, text: Option<String>, csv: Option<Vec<u8>>, name: &str| -> Result<Outcome> {
        if g.timing {
            env.timing = Some(Timing { seconds: start.elapsed().as_secs_f64() });
        }
        let pass = env.all_pass();
        let body = match g.format {
            Format::Json => json(&env)?,
            Format::Text => text.ok_or_else(|| unsupported(g.format, name))?.into_bytes(),
            Format::Csv => csv.ok_or_else(|| unsupported(g.format, name))?,
            other => return Err(unsupported(other, name)),
        };
        Ok(Outcome { body, pass })
    };
    match command {
        Command::Info { composition } => {
            let (env, text, csv) = info(composition, g)?;
            finish(env, Some(text), Some(csv), "info")
        }
        Command::Verify(a) => {
            let (env, text, csv) = verify(a, g)?;
            finish(env, Some(text), Some(csv), "verify")
        }
        Command::Spectrum(a) => {
            let (env, text, csv) = spectrum(a, g)?;
            finish(env, Some(text), Some(csv), "spectrum")
        }
        Command::Coarsen(a) => {
            let (env, text) = coarsen(a, g)?;
            finish(env, Some(text), None, "coarsen")
        }
        Command::Walk(a) => {
            let (env, text, csv) = walk(a, g)?;
            finish(env, Some(text), Some(csv), "walk")
        }
        Command::Export(a) => export(a, g),
    }
}

#[derive(Serialize)]
struct InfoResult {
    composition: Composition,
    n: usize,
    r: usize,
    r_eff: usize,
    cardinality: String,
    degree: u64,
    trivial: bool,
    reduced: bool,
    reduction: Composition,
}

fn info(k: &Composition, g: &Global) -> Result<(Envelope, String, Vec<u8>)> {
    let red = k.reduce().composition;
    let res = InfoResult {
        composition: k.clone(),
        n: k.n(),
        r: k.r(),
        r_eff: k.r_eff(),
        cardinality: k.cardinality().to_string(),
        degree: k.degree(),
        trivial: red.is_trivial(),
        reduced: k.is_reduced(),
        reduction: red,
    };
    let text = format!(
        "{}: N = {}, r_eff = {}, {} vertices, degree {}{}\n",
        res.composition,
        res.n,
        res.r_eff,
        res.cardinality,
        res.degree,
        if res.trivial { ", trivial slice" } else { "" }
    );
    let csv = format!(
        "composition,n,r,r_eff,cardinality,degree,trivial\n\"{}\",{},{},{},{},{},{}\n",
        res.composition, res.n, res.r, res.r_eff, res.cardinality, res.degree, res.trivial
    );
    Ok((envelope("info", g, &serde_json::json!({ "composition": k }), &res)?, text, csv.into_bytes()))
}

fn verify(a: &VerifyArgs, g: &Global) -> Result<(Envelope, String, Vec<u8>)> {
    let ks = match (&a.composition, &a.sweep) {
        (Some(k), _) => vec![k.clone()],
        (None, Some(s)) => s.compositions(),
        (None, None) => return Err(Error::Parse("verify needs -k or --sweep".into())),
    };
    let opts = SuiteOptions { arithmetic: arithmetic(g), samples: a.samples, seed: g.seed, form_budget: a.form_budget };
    let reports = verify_all(&ks, &limits(g), &opts);
    let mut env = envelope("verify", g, a, &reports)?;
    env.certify_reports(&reports);
    let mut text = String::new();
    for r in &reports {
        text += &report_line(r);
    }
    let mut csv = Vec::new();
    write_summary_csv(&reports, &mut csv)?;
    Ok((env, text, csv))
}

fn report_line(r: &CompositionReport) -> String {
    let show = |v: &Option<multislice::spectral::GapValue>| {
        v.as_ref().map_or("-".to_string(), |v| v.exact.as_ref().map_or_else(|| format!("{:.10}", v.value), Rational::to_string))
    };
    let mut line = format!("{} {}", r.composition, serde_json::to_value(r.status).unwrap().as_str().unwrap_or("?"));
    if r.status != Status::SkippedTrivial {
        let _ = write!(
            line,
            " gamma={} delta={} multiplicity={}",
            show(&r.gap),
            show(&r.delta),
            r.gap_multiplicity.map_or("-".into(), |m| m.to_string())
        );
    }
    for c in r.certificates.iter().filter(|c| !c.pass) {
        let _ = write!(line, " FAILED:{}", c.name);
    }
    if let Some(e) = &r.error {
        let _ = write!(line, " error[{}]: {}", e.code, e.message);
    }
    line + "\n"
}

#[derive(Serialize)]
struct ExactMultiplicity {
    value: Rational,
    nullity: usize,
    exact: bool,
    matches_floating: bool,
}

#[derive(Serialize)]
struct SpectrumResult {
    composition: Composition,
    operator: Operator,
    spectrum: Spectrum,
    summary: Vec<SummaryEntry>,
    exact_multiplicities: Option<Vec<ExactMultiplicity>>,
}

#[derive(Serialize)]
struct SummaryEntry {
    value: String,
    multiplicity: usize,
}

fn spectrum(a: &SpectrumArgs, g: &Global) -> Result<(Envelope, String, Vec<u8>)> {
    let lim = limits(g);
    let k = &a.composition;
    let mut exact_multiplicities = None;
    let spectrum = match a.operator {
        Operator::Laplacian => {
            let graph = Multislice::new(k, lim.enumeration_budget)?;
            let s = laplacian_spectrum(&graph, &lim)?;
            if arithmetic(g) == ScalarKind::Exact {
                let mut rows = Vec::new();
                for e in &s.eigenvalues {
                    let value = e.exact.clone().ok_or_else(|| {
                        Error::Parse(format!("eigenvalue {} has no small rational form; use --float", e.value))
                    })?;
                    let nul = laplacian_nullity(&graph, &value, &lim)?;
                    rows.push(ExactMultiplicity {
                        value,
                        nullity: nul.dimension,
                        exact: nul.exact,
                        matches_floating: nul.dimension == e.multiplicity,
                    });
                }
                exact_multiplicities = Some(rows);
            }
            s
        }
        Operator::P => p_spectrum(&Multislice::new(k, lim.enumeration_budget)?, &lim)?,
        Operator::K => k_spectrum(k, &lim)?,
        Operator::Mk => mk_tensor_spectrum(k, &lim)?,
    };
    let summary: Vec<SummaryEntry> =
        spectrum.summary().into_iter().map(|(value, multiplicity)| SummaryEntry { value, multiplicity }).collect();
    let text = summary.iter().map(|e| format!("{}:{}", e.value, e.multiplicity)).collect::<Vec<_>>().join(" ") + "\n";
    let mut csv = String::from("value,multiplicity\n");
    for e in &summary {
        let _ = writeln!(csv, "{},{}", e.value, e.multiplicity);
    }
    let res = SpectrumResult { composition: k.clone(), operator: a.operator, spectrum, summary, exact_multiplicities };
    let mut env = envelope("spectrum", g, a, &res)?;
    env.certify(k, "complete", res.spectrum.is_complete());
    if let Some(rows) = &res.exact_multiplicities {
        let total: usize = rows.iter().map(|r| r.nullity).sum();
        let ok = rows.iter().all(|r| r.exact && r.matches_floating) && total == res.spectrum.dimension;
        env.certify(k, "exact_multiplicities", ok);
    }
    Ok((env, text, csv.into_bytes()))
}

#[derive(Serialize)]
struct CoarsenResult {
    witness: Option<CoarseningMap>,
    audits: Vec<CoarseningAudit>,
}

fn coarsen(a: &CoarsenArgs, g: &Global) -> Result<(Envelope, String)> {
    let lim = limits(g);
    let mut witness = None;
    let pairs = if let Some(s) = &a.sweep {
        s.n.clone().flat_map(coarsening_pairs).collect()
    } else {
        let from = a.from.as_ref().ok_or_else(|| Error::Parse("coarsen needs --from".into()))?;
        let phi = match (&a.map, &a.to) {
            (Some(table), to) => {
                let phi = CoarseningMap::new(table.clone())?;
                let image = coarsen_composition(&phi, from)?;
                if let Some(to) = to.as_ref().filter(|&to| to != &image) {
                    return Err(Error::InvalidCoarsening(format!("map sends {from} to {image}, not {to}")));
                }
                Some(phi)
            }
            (None, Some(to)) => is_coarser(to, from),
            (None, None) => return Err(Error::Parse("coarsen needs --to or --map".into())),
        };
        witness = phi.clone();
        phi.map(|p| vec![(from.clone(), p)]).unwrap_or_default()
    };
    let audits = audit_pairs(pairs, a.samples, g.seed, &lim)?;
    let mut text = String::new();
    for au in &audits {
        let _ = writeln!(
            text,
            "{} -> {} map {:?}: {} (intertwined {}/{}, lift {}, contained {}, monotone {})",
            au.fine,
            au.coarse,
            au.map.table(),
            if au.pass { "pass" } else { "FAIL" },
            au.intertwined,
            au.samples,
            au.eigenfunctions_lift,
            au.containment.contained,
            au.containment.monotone
        );
    }
    let res = CoarsenResult { witness, audits };
    let mut env = envelope("coarsen", g, a, &res)?;
    if a.sweep.is_none() && res.witness.is_none() {
        let from = a.from.clone().expect("checked above");
        env.certify(&from, "witness", false);
        text += "no coarsening map exists\n";
    }
    for au in &res.audits {
        env.certify(&au.fine, &format!("coarsen{:?}", au.map.table()), au.pass);
    }
    Ok((env, text))
}

#[derive(Serialize)]
struct WalkResult {
    stats: WalkStats,
    target: Rational,
    sigmas: f64,
    within: Option<bool>,
    stationarity: Option<ChiSquareTest>,
}

fn walk(a: &WalkArgs, g: &Global) -> Result<(Envelope, String, Vec<u8>)> {
    let k = a.composition.reduce().composition;
    let mut cfg = WalkConfig::new(k.clone(), a.steps, g.seed);
    cfg.burn_in = a.burn_in;
    cfg.observable = Observable::GapMember { generator: a.generator, position: a.position };
    cfg.max_lag = a.max_lag;
    cfg.batches = a.batches;
    cfg.chains = a.chains;
    cfg.trajectory_limit = a.trajectory_limit;
    cfg.occupation_budget = cfg.occupation_budget.min(g.budget);
    let stats = simulate(&cfg)?;
    let target = decay_target(&k)?;
    let within = stats.relaxation.as_ref().map(|r| r.within(target.to_f64(), a.sigmas));
    let stationarity = a.chi_square.map(|n| stationarity_test(&k, n, a.stride, g.seed, 0.99)).transpose()?;
    let mut text = String::new();
    if let Some(r) = &stats.relaxation {
        let _ = writeln!(
            text,
            "{}: decay {:.6} +/- {:.6} ({:?}, {} lags), target {} = {:.6}",
            k,
            r.ratio,
            r.stderr,
            r.method,
            r.lags_used,
            target,
            target.to_f64()
        );
    }
    if let Some(t) = &stationarity {
        let _ = writeln!(text, "chi-square {:.4} on {} dof, 99% critical {:.4}", t.statistic, t.degrees_of_freedom, t.critical_value);
    }
    let mut csv = Vec::new();
    write_autocorrelation_csv(&stats, &mut csv)?;
    let res = WalkResult { stats, target, sigmas: a.sigmas, within, stationarity };
    let mut env = envelope("walk", g, a, &res)?;
    env.certify(&k, "decay", res.within == Some(true));
    if let Some(t) = &res.stationarity {
        env.certify(&k, "stationarity", t.pass);
    }
    Ok((env, text, csv))
}

fn export(a: &ExportArgs, g: &Global) -> Result<Outcome> {
    let lim = limits(g);
    let k = &a.composition;
    let graph = Multislice::new(k, lim.enumeration_budget)?;
    let mut body = Vec::new();
    match (a.what, g.format) {
        (Target::Graph, Format::Dot) => graph.write_dot(&mut body)?,
        (Target::Graph, Format::Edgelist) => graph.write_edge_list(&mut body)?,
        (Target::Graph, Format::Json) => {
            let vertices: Vec<_> = (0..graph.len()).map(|v| graph.vertex(v)).collect();
            let res = serde_json::json!({ "composition": k, "vertices": vertices, "edges": graph.edges() });
            body = json(&envelope("export", g, a, &res)?)?;
        }
        (Target::Laplacian, Format::Coordinate) => laplacian(&graph, &lim).write_coordinate(&mut body)?,
        (Target::P, Format::Coordinate) => p_matrix::<Rational>(&graph, lim.dense_cap)?.write_coordinate(&mut body)?,
        (Target::K, Format::Coordinate) => k_matrix(k)?.entries().write_coordinate(&mut body)?,
        (_, f) => return Err(unsupported(f, "export")),
    }
    Ok(Outcome { body, pass: true })
}
