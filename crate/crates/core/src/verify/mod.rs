//! Named numerical checks. Each check measures quantities, compares them
//! with explicit bounds and returns a [`CheckReport`] that serialises to
//! JSON. Checks work in double precision.

mod band;
mod identities;
mod polarized;
mod ring;
mod spectra;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub use band::{
    calibrate_theorem2, check_band_decay, check_epsilon_sequence, check_lemma31, check_theorem1, check_theorem2,
    check_truncation_convergence, measure_epsilon_lambda, Theorem2Constants,
};
pub use identities::{check_appendix_closed_forms, check_droplet_estimates, marble_transport_cost, ClosedFormLimits};
pub use polarized::{check_polarized_interval, StateSource};
pub use ring::{calibrate_ring, check_ring, RingConstants};
pub use spectra::{check_cut_identities, check_kink_gap, check_prop24, check_solver_agreement, check_two_site_tables, check_xxz_gap};

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub measured: BTreeMap<String, f64>,
    pub bound: BTreeMap<String, f64>,
    pub pass: bool,
    /// Smallest signed slack over all asserted comparisons; negative on
    /// failure.
    pub margin: f64,
    pub notes: String,
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(
            f,
            "{} {} [{}] margin {:.3e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            params.join(" "),
            self.margin
        )
    }
}

/// Accumulates measurements and comparisons into a report.
#[derive(Debug, Clone)]
pub struct ReportBuilder {
    report: CheckReport,
    asserted: usize,
}

impl ReportBuilder {
    pub fn new(name: &str) -> Self {
        Self {
            report: CheckReport {
                name: name.to_string(),
                params: BTreeMap::new(),
                measured: BTreeMap::new(),
                bound: BTreeMap::new(),
                pass: true,
                margin: f64::MAX,
                notes: String::new(),
            },
            asserted: 0,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.report.params.insert(key.to_string(), value.into());
        self
    }

    fn compare(&mut self, key: &str, measured: f64, bound: f64, slack: f64) {
        self.report.measured.insert(key.to_string(), measured);
        self.report.bound.insert(key.to_string(), bound);
        self.asserted += 1;
        // NaN slack fails.
        let ok = slack >= 0.0;
        self.report.pass &= ok;
        self.report.margin = if ok { self.report.margin.min(slack) } else { self.report.margin.min(slack).min(-0.0) };
        if slack.is_nan() {
            self.report.margin = f64::NAN;
        }
    }

    /// Asserts measured ≤ bound.
    pub fn upper(&mut self, key: &str, measured: f64, bound: f64) -> &mut Self {
        self.compare(key, measured, bound, bound - measured);
        self
    }

    /// Asserts measured ≥ bound.
    pub fn lower(&mut self, key: &str, measured: f64, bound: f64) -> &mut Self {
        self.compare(key, measured, bound, measured - bound);
        self
    }

    /// Asserts a boolean condition, recorded as 1/0 against 1.
    pub fn require(&mut self, key: &str, ok: bool) -> &mut Self {
        self.compare(key, if ok { 1.0 } else { 0.0 }, 1.0, if ok { 0.0 } else { -1.0 });
        self
    }

    /// Records an informational value without asserting anything.
    pub fn record(&mut self, key: &str, value: f64) -> &mut Self {
        self.report.measured.insert(key.to_string(), value);
        self
    }

    pub fn note(&mut self, text: &str) -> &mut Self {
        if !self.report.notes.is_empty() {
            self.report.notes.push_str("; ");
        }
        self.report.notes.push_str(text);
        self
    }

    pub fn finish(mut self) -> CheckReport {
        if self.asserted == 0 {
            self.report.margin = 0.0;
        }
        if self.report.margin.is_nan() {
            self.report.pass = false;
        }
        self.report
    }
}

/// Optional inputs shared by the named checks; unset fields fall back to
/// the check's defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CheckArgs {
    pub l: Option<usize>,
    pub n: Option<usize>,
    pub q: Option<f64>,
    pub block: Option<usize>,
    pub lambda: Option<f64>,
    pub seed: Option<u64>,
}

/// Parameter scale of the full suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Small chains; the whole suite runs in seconds.
    Quick,
    /// The acceptance scale (chains up to L = 12).
    Desk,
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Profile::Quick),
            "desk" | "full" => Ok(Profile::Desk),
            _ => Err(Error::Domain(format!("unknown profile '{s}' (expected quick or desk)"))),
        }
    }
}

/// Every check name understood by [`run_check`].
pub const CHECK_NAMES: &[&str] = &[
    "kink_gap",
    "xxz_gap",
    "prop24",
    "two_site_tables",
    "cut_identities",
    "theorem1",
    "theorem2",
    "band_decay",
    "lemma31",
    "polarized_interval",
    "ring",
    "epsilon_lambda",
    "epsilon_sequence",
    "truncation_convergence",
    "appendix_closed_forms",
    "droplet_estimates",
    "solver_agreement",
];

const DEFAULT_Q: f64 = 0.25;

/// Runs a named check. Checks over a range (theorem2 without `n`, for
/// instance) return one report per point.
pub fn run_check(name: &str, args: &CheckArgs) -> Result<Vec<CheckReport>> {
    let q = args.q.unwrap_or(DEFAULT_Q);
    let l = args.l;
    let one = |r: Result<CheckReport>| r.map(|x| vec![x]);
    match name {
        "kink_gap" => one(check_kink_gap(l.unwrap_or(12), q)),
        "xxz_gap" => one(check_xxz_gap(l.unwrap_or(10), q)),
        "prop24" => one(check_prop24(l.unwrap_or(10), q)),
        "two_site_tables" => one(check_two_site_tables(q)),
        "cut_identities" => one(check_cut_identities(l.unwrap_or(8), q)),
        "theorem1" => {
            let l = l.unwrap_or(12);
            match args.n {
                Some(n) => one(check_theorem1(l, n, q)),
                None => [4, 6, 8].iter().filter(|&&n| n <= l).map(|&n| check_theorem1(l, n, q)).collect(),
            }
        }
        "theorem2" => {
            let l = l.unwrap_or(12);
            let c = Theorem2Constants::FROZEN;
            match args.n {
                Some(n) => one(check_theorem2(l, n, q, &c)),
                None => (3..=9).filter(|&n| n <= l).map(|n| check_theorem2(l, n, q, &c)).collect(),
            }
        }
        "band_decay" => one(check_band_decay(l.unwrap_or(12), q)),
        "lemma31" => {
            let l = l.unwrap_or(10);
            match args.n {
                Some(n) => one(check_lemma31(l, n, q)),
                None => (3..=5).filter(|&n| n <= l).map(|n| check_lemma31(l, n, q)).collect(),
            }
        }
        "polarized_interval" => {
            let l = l.unwrap_or(12);
            let n = args.n.unwrap_or(l / 2);
            match args.block {
                Some(b) => one(check_polarized_interval(l, q, b, StateSource::GroundState { n })),
                None => [2, 3].iter().map(|&b| check_polarized_interval(l, q, b, StateSource::GroundState { n })).collect(),
            }
        }
        "ring" => {
            let l = l.unwrap_or(12);
            one(check_ring(l, args.n.unwrap_or(l / 2), q, &RingConstants::FROZEN))
        }
        "epsilon_lambda" => {
            let l = l.unwrap_or(12);
            let p = crate::qcore::AnisotropyParams::from_q(q)?;
            one(measure_epsilon_lambda(l, args.n.unwrap_or(l / 2), q, args.lambda.unwrap_or(p.gamma / 2.0)))
        }
        "epsilon_sequence" => one(check_epsilon_sequence(l.unwrap_or(12), q)),
        "truncation_convergence" => one(check_truncation_convergence(q, &[2, 3, 4, 5, 6])),
        "appendix_closed_forms" => {
            let limits = ClosedFormLimits { max_l: l.unwrap_or(10), qs: vec![q] };
            one(check_appendix_closed_forms(&limits))
        }
        "droplet_estimates" => one(check_droplet_estimates(l.unwrap_or(12), q)),
        "solver_agreement" => {
            let l = l.unwrap_or(10);
            let sectors: Vec<usize> = match args.n {
                Some(n) => vec![n],
                None => (0..=l).collect(),
            };
            one(check_solver_agreement(l, &sectors, q, 5, args.seed.unwrap_or(0)))
        }
        other => Err(Error::Domain(format!("unknown check '{other}'; known checks: {}", CHECK_NAMES.join(", ")))),
    }
}

/// The (name, arguments) pairs making up the suite at a given scale.
pub fn suite(profile: Profile) -> Vec<(&'static str, CheckArgs)> {
    let at = |l: usize| CheckArgs { l: Some(l), ..CheckArgs::default() };
    let ln = |l: usize, n: usize| CheckArgs { l: Some(l), n: Some(n), ..CheckArgs::default() };
    match profile {
        Profile::Quick => vec![
            ("kink_gap", at(8)),
            ("xxz_gap", at(6)),
            ("prop24", at(6)),
            ("two_site_tables", CheckArgs::default()),
            ("cut_identities", at(6)),
            ("theorem1", ln(8, 4)),
            ("theorem2", ln(10, 5)),
            ("band_decay", at(10)),
            ("lemma31", ln(8, 3)),
            ("polarized_interval", CheckArgs { l: Some(8), n: Some(4), block: Some(2), ..CheckArgs::default() }),
            ("ring", ln(8, 4)),
            ("epsilon_lambda", ln(8, 4)),
            ("epsilon_sequence", at(8)),
            ("truncation_convergence", CheckArgs::default()),
            ("appendix_closed_forms", at(7)),
            ("droplet_estimates", at(8)),
            ("solver_agreement", at(8)),
        ],
        Profile::Desk => CHECK_NAMES.iter().map(|&n| (n, CheckArgs::default())).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_margin_and_pass() {
        let mut b = ReportBuilder::new("demo").param("L", 4);
        b.upper("x", 1.0, 3.0).lower("y", 5.0, 4.5);
        let r = b.finish();
        assert!(r.pass);
        assert_eq!(r.margin, 0.5);
        let mut b = ReportBuilder::new("demo");
        b.upper("x", 4.0, 3.0).upper("nan", f64::NAN, 1.0);
        let r = b.finish();
        assert!(!r.pass);
    }

    #[test]
    fn report_json_roundtrip() {
        let mut b = ReportBuilder::new("demo").param("q", 0.25).param("bc", "++");
        b.upper("x", 0.1, 0.2).note("hello");
        let r = b.finish();
        let s = serde_json::to_string(&r).unwrap();
        let back: CheckReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn unknown_check() {
        assert!(matches!(run_check("no_such", &CheckArgs::default()), Err(Error::Domain(_))));
    }
}
