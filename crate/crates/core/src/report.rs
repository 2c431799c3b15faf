//! Pass/fail records for identity checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

/// C-style `%.12e`, e.g. `1.234567890123e+00`.
pub fn fmt_e12(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    // no "-0" in reports
    let v = if v == 0.0 { 0.0 } else { v };
    let s = format!("{v:.12e}");
    match s.split_once('e') {
        Some((mant, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ('-', d),
                None => ('+', exp),
            };
            format!("{mant}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub identity: String,
    pub subject: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerificationReport {
    pub title: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Per-identity aggregate used in summaries.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentitySummary {
    pub identity: String,
    pub checks: usize,
    pub failures: usize,
    pub max_residual: f64,
}

impl VerificationReport {
    pub fn new(title: impl Into<String>) -> Self {
        VerificationReport { title: title.into(), ..Default::default() }
    }

    pub fn record(&mut self, identity: &str, subject: impl Into<String>, residual: f64, tol: f64) -> bool {
        let pass = residual <= tol;
        self.checks.push(Check {
            identity: identity.to_string(),
            subject: subject.into(),
            residual,
            tol,
            pass,
        });
        pass
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.notes.extend(other.notes);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Identities that failed at least once, in first-failure order.
    pub fn failing_identities(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in self.failures() {
            if !out.contains(&c.identity) {
                out.push(c.identity.clone());
            }
        }
        out
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn summary(&self) -> Vec<IdentitySummary> {
        let mut order: Vec<String> = Vec::new();
        let mut acc: BTreeMap<String, IdentitySummary> = BTreeMap::new();
        for c in &self.checks {
            let e = acc.entry(c.identity.clone()).or_insert_with(|| {
                order.push(c.identity.clone());
                IdentitySummary { identity: c.identity.clone(), checks: 0, failures: 0, max_residual: 0.0 }
            });
            e.checks += 1;
            e.failures += usize::from(!c.pass);
            e.max_residual = e.max_residual.max(c.residual);
        }
        order.into_iter().map(|k| acc.remove(&k).expect("summary key")).collect()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.title, if self.pass() { "PASS" } else { "FAIL" })?;
        for s in self.summary() {
            writeln!(
                f,
                "  {:<14} checks={:<6} failures={:<4} max_residual={}",
                s.identity,
                s.checks,
                s.failures,
                fmt_e12(s.max_residual)
            )?;
        }
        for c in self.failures().take(20) {
            writeln!(f, "  FAILED {} [{}] residual={}", c.identity, c.subject, fmt_e12(c.residual))?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}
