//! Sweep ranges, the JSON envelope shared by every command, and CSV
//! summaries.

use std::io::Write;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::Serialize;

use crate::certify::{CompositionReport, Status};
use crate::composition::Composition;
use crate::error::{Error, Result};

/// `N=a..b` with an optional `r=c..d` filter on the number of levels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepRange {
    pub n: RangeInclusive<usize>,
    pub r: Option<RangeInclusive<usize>>,
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>> {
    let bad = || Error::Parse(format!("bad range {s:?}, expected a..b or a"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

impl FromStr for SweepRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut n = None;
        let mut r = None;
        for part in s.split(',') {
            let (key, value) =
                part.split_once('=').ok_or_else(|| Error::Parse(format!("bad sweep term {part:?}")))?;
            match key.trim() {
                "N" | "n" => n = Some(parse_range(value)?),
                "r" | "R" => r = Some(parse_range(value)?),
                other => return Err(Error::Parse(format!("unknown sweep key {other:?}"))),
            }
        }
        let n = n.ok_or_else(|| Error::Parse("sweep needs N=a..b".into()))?;
        if *n.start() == 0 {
            return Err(Error::Parse("sweep N must start at 1 or more".into()));
        }
        Ok(SweepRange { n, r })
    }
}

impl SweepRange {
    /// Every reduced composition in range, sorted by `N` then
    /// lexicographically.
    pub fn compositions(&self) -> Vec<Composition> {
        self.n
            .clone()
            .flat_map(Composition::all_reduced)
            .filter(|k| self.r.as_ref().is_none_or(|r| r.contains(&k.r())))
            .collect()
    }
}

/// Wall-clock timing, reported only on request so outputs stay reproducible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub seconds: f64,
}

/// Pass/fail line for one certificate of one composition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateStatus {
    pub composition: String,
    pub name: String,
    pub pass: bool,
}

/// Uniform output of every command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Envelope {
    pub command: String,
    pub config: serde_json::Value,
    pub results: serde_json::Value,
    pub certificates: Vec<CertificateStatus>,
    pub timing: Option<Timing>,
}

impl Envelope {
    pub fn new<C: Serialize, R: Serialize>(command: &str, config: &C, results: &R) -> Result<Self> {
        let json = |e: serde_json::Error| Error::Io(e.to_string());
        Ok(Envelope {
            command: command.to_string(),
            config: serde_json::to_value(config).map_err(json)?,
            results: serde_json::to_value(results).map_err(json)?,
            certificates: Vec::new(),
            timing: None,
        })
    }

    pub fn certify(&mut self, composition: &Composition, name: &str, pass: bool) {
        self.certificates.push(CertificateStatus { composition: composition.to_string(), name: name.to_string(), pass });
    }

    /// Adds every certificate of the reports; errors count as failures.
    pub fn certify_reports(&mut self, reports: &[CompositionReport]) {
        for r in reports {
            for c in &r.certificates {
                self.certify(&r.composition, &c.name, c.pass);
            }
            if r.status == Status::Error {
                self.certify(&r.composition, "run", false);
            }
        }
    }

    pub fn all_pass(&self) -> bool {
        self.certificates.iter().all(|c| c.pass)
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out).map_err(|e| Error::Io(e.to_string()))
    }
}

/// One row per composition: `composition,n,r_eff,cardinality,degree,status,gamma,delta,gap_multiplicity,failed`.
pub fn write_summary_csv<W: Write>(reports: &[CompositionReport], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "composition",
        "n",
        "r_eff",
        "cardinality",
        "degree",
        "status",
        "gamma",
        "delta",
        "gap_multiplicity",
        "failed",
    ])
    .map_err(io)?;
    let value = |g: &Option<crate::spectral::GapValue>| {
        g.as_ref().map_or(String::new(), |g| g.exact.as_ref().map_or_else(|| g.value.to_string(), |e| e.to_string()))
    };
    for r in reports {
        let status = serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        let failed: Vec<&str> = r.certificates.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        w.write_record([
            r.composition.to_string(),
            r.n.to_string(),
            r.r_eff.to_string(),
            r.cardinality.clone(),
            r.degree.to_string(),
            status,
            value(&r.gap),
            value(&r.delta),
            r.gap_multiplicity.map_or(String::new(), |m| m.to_string()),
            failed.join(";"),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}
