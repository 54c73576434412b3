//! Brute-force checks of the transfer bound and its supporting lemmas on
//! tiny discrete instances, plus the qualitative noise sweep.
//!
//! Every check returns a [`VerificationReport`]. A report whose hypotheses
//! are violated carries flags and never counts as a failure.

mod bounds;
mod info;
mod instance;
mod sweep;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::seeding::{derive, tag};
use crate::Result;

pub use bounds::{verify_reduction, verify_thm1};
pub use info::{
    fano_instance, riskinfo_instance, tc_instance, verify_fano, verify_riskinfo, verify_tc_invariance, verify_xplusy,
    FanoInstance, RiskInstance, TcInstance,
};
pub use instance::{reduction_instance, thm1_instance, DiscreteInstance, Loss};
pub use sweep::{sweep_alpha_tc, SweepRow};

/// Slack below which an inequality check fails.
pub const SLACK_TOLERANCE: f64 = 1e-9;
/// Tolerance for checks that assert exact equality.
pub const EQUALITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    Thm1,
    Reduction,
    Fano,
    Riskinfo,
    Xplusy,
    TcInvariance,
}

impl LemmaId {
    pub const ALL: [LemmaId; 6] = [
        LemmaId::Thm1,
        LemmaId::Reduction,
        LemmaId::Fano,
        LemmaId::Riskinfo,
        LemmaId::Xplusy,
        LemmaId::TcInvariance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::Thm1 => "thm1",
            LemmaId::Reduction => "reduction",
            LemmaId::Fano => "fano",
            LemmaId::Riskinfo => "riskinfo",
            LemmaId::Xplusy => "xplusy",
            LemmaId::TcInvariance => "tc_invariance",
        }
    }
}

/// A violated hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    AsymmetricLoss,
    TriangleInequality,
    IndependenceViolated,
    QBelowHalf,
    SeparationViolated,
    RiskTooLarge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub lemma: LemmaId,
    /// Seed the instance was generated from (0 for hand-built instances).
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs` for inequalities, `−|rhs − lhs|` for equalities.
    pub slack: f64,
    pub tolerance: f64,
    pub flags: Vec<Flag>,
    pub pass: bool,
    /// Auxiliary quantities worth keeping in the JSON report.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
}

impl VerificationReport {
    /// `lhs ≤ rhs` up to [`SLACK_TOLERANCE`].
    pub fn inequality(lemma: LemmaId, seed: u64, lhs: f64, rhs: f64, flags: Vec<Flag>) -> Self {
        Self::build(lemma, seed, lhs, rhs, rhs - lhs, SLACK_TOLERANCE, flags)
    }

    /// `lhs = rhs` up to [`EQUALITY_TOLERANCE`].
    pub fn equality(lemma: LemmaId, seed: u64, lhs: f64, rhs: f64, flags: Vec<Flag>) -> Self {
        Self::build(lemma, seed, lhs, rhs, -(rhs - lhs).abs(), EQUALITY_TOLERANCE, flags)
    }

    fn build(lemma: LemmaId, seed: u64, lhs: f64, rhs: f64, slack: f64, tolerance: f64, flags: Vec<Flag>) -> Self {
        let pass = flags.is_empty() && slack >= -tolerance;
        Self {
            lemma,
            seed,
            lhs,
            rhs,
            slack,
            tolerance,
            flags,
            pass,
            details: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_owned(), value);
        self
    }

    pub fn flagged(&self) -> bool {
        !self.flags.is_empty()
    }

    /// Hypotheses held and the conclusion did not.
    pub fn failed(&self) -> bool {
        !self.pass && !self.flagged()
    }
}

/// Instance counts and seed for a full run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub thm1: usize,
    pub reduction: usize,
    pub fano: usize,
    pub riskinfo: usize,
    pub tc_invariance: usize,
    /// Monte Carlo sample count for the X + Y check; 0 skips it.
    pub xplusy_samples: usize,
    /// Appends one theorem instance scored with an asymmetric loss, to
    /// exercise hypothesis gating.
    pub inject_asymmetric: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            thm1: 100,
            reduction: 100,
            fano: 200,
            riskinfo: 200,
            tc_invariance: 100,
            xplusy_samples: 1_000_000,
            inject_asymmetric: false,
        }
    }
}

impl SuiteConfig {
    /// Every count zero.
    pub fn empty(seed: u64) -> Self {
        Self {
            seed,
            thm1: 0,
            reduction: 0,
            fano: 0,
            riskinfo: 0,
            tc_invariance: 0,
            xplusy_samples: 0,
            inject_asymmetric: false,
        }
    }

    /// Seed of instance `i` of lemma `id`.
    pub fn instance_seed(&self, id: LemmaId, i: usize) -> u64 {
        derive(self.seed, &[tag(id.name()), i as u64])
    }
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    let seeds = |id, n| (0..n).map(move |i| cfg.instance_seed(id, i));
    for s in seeds(LemmaId::Thm1, cfg.thm1) {
        out.push(verify_thm1(&thm1_instance(s)?)?.reseeded(s));
    }
    if cfg.inject_asymmetric {
        let s = cfg.instance_seed(LemmaId::Thm1, cfg.thm1);
        let mut inst = thm1_instance(s)?;
        inst.loss = Loss::Skewed;
        out.push(verify_thm1(&inst)?.reseeded(s));
    }
    for s in seeds(LemmaId::Reduction, cfg.reduction) {
        out.push(verify_reduction(&reduction_instance(s)?)?.reseeded(s));
    }
    for s in seeds(LemmaId::Fano, cfg.fano) {
        out.push(verify_fano(&fano_instance(s)?)?.reseeded(s));
    }
    for s in seeds(LemmaId::Riskinfo, cfg.riskinfo) {
        out.push(verify_riskinfo(&riskinfo_instance(s)?)?.reseeded(s));
    }
    if cfg.xplusy_samples > 0 {
        out.push(verify_xplusy(cfg.xplusy_samples, cfg.seed)?);
    }
    for s in seeds(LemmaId::TcInvariance, cfg.tc_invariance) {
        out.push(verify_tc_invariance(&tc_instance(s)?)?.reseeded(s));
    }
    Ok(out)
}

impl VerificationReport {
    fn reseeded(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub lemma: LemmaId,
    pub instances: usize,
    pub passes: usize,
    pub flags: usize,
    pub failures: usize,
    /// Over unflagged instances.
    pub min_slack: Option<f64>,
}

/// One row per lemma that appears in `reports`, in [`LemmaId::ALL`] order.
pub fn summarize(reports: &[VerificationReport]) -> Vec<SummaryRow> {
    LemmaId::ALL
        .iter()
        .filter_map(|&id| {
            let rs: Vec<_> = reports.iter().filter(|r| r.lemma == id).collect();
            (!rs.is_empty()).then(|| SummaryRow {
                lemma: id,
                instances: rs.len(),
                passes: rs.iter().filter(|r| r.pass).count(),
                flags: rs.iter().filter(|r| r.flagged()).count(),
                failures: rs.iter().filter(|r| r.failed()).count(),
                min_slack: rs
                    .iter()
                    .filter(|r| !r.flagged())
                    .map(|r| r.slack)
                    .min_by(f64::total_cmp),
            })
        })
        .collect()
}

pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut s = format!(
        "{:<14} {:>9} {:>7} {:>6} {:>8} {:>13}\n",
        "lemma", "instances", "passes", "flags", "failures", "min slack"
    );
    for r in rows {
        let slack = r.min_slack.map_or("-".to_owned(), |v| format!("{v:.3e}"));
        let _ = writeln!(
            s,
            "{:<14} {:>9} {:>7} {:>6} {:>8} {:>13}",
            r.lemma.name(),
            r.instances,
            r.passes,
            r.flags,
            r.failures,
            slack
        );
    }
    s
}

/// A uniform draw from the probability simplex.
pub(crate) fn dirichlet_ones<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig {
            thm1: 5,
            reduction: 5,
            fano: 5,
            riskinfo: 5,
            tc_invariance: 5,
            xplusy_samples: 10_000,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn empty_suite_gives_empty_report() {
        let r = run_suite(&SuiteConfig::empty(3)).unwrap();
        assert!(r.is_empty());
        assert!(summarize(&r).is_empty());
    }

    #[test]
    fn suite_is_reproducible() {
        assert_eq!(run_suite(&small()).unwrap(), run_suite(&small()).unwrap());
    }

    #[test]
    fn injected_asymmetric_instance_is_flagged_not_failed() {
        let r = run_suite(&SuiteConfig {
            inject_asymmetric: true,
            ..small()
        })
        .unwrap();
        let rows = summarize(&r);
        let thm = rows.iter().find(|row| row.lemma == LemmaId::Thm1).unwrap();
        assert_eq!((thm.instances, thm.flags, thm.failures), (6, 1, 0));
        let injected = r.iter().filter(|x| x.lemma == LemmaId::Thm1).last().unwrap();
        assert_eq!(injected.flags, vec![Flag::AsymmetricLoss]);
        assert!(!injected.pass && !injected.failed());
    }

    #[test]
    fn verdicts_follow_slack_and_flags() {
        let ok = VerificationReport::inequality(LemmaId::Fano, 0, 1.0, 1.0 - 5e-10, vec![]);
        assert!(ok.pass);
        let bad = VerificationReport::inequality(LemmaId::Fano, 0, 1.0, 1.0 - 2e-9, vec![]);
        assert!(bad.failed());
        let gated = VerificationReport::inequality(LemmaId::Fano, 0, 2.0, 1.0, vec![Flag::QBelowHalf]);
        assert!(!gated.pass && !gated.failed());
        let eq = VerificationReport::equality(LemmaId::TcInvariance, 0, 0.5, 0.5 + 2e-12, vec![]);
        assert!(eq.failed());
    }

    #[test]
    fn summary_table_lists_each_lemma_once() {
        let r = run_suite(&small()).unwrap();
        let rows = summarize(&r);
        assert_eq!(rows.len(), 6);
        let table = format_summary(&rows);
        assert_eq!(table.lines().count(), 7);
        assert!(table.contains("tc_invariance"));
    }

    #[test]
    fn report_json_is_an_array() {
        let r = run_suite(&small()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v.as_array().unwrap().len(), r.len());
        assert_eq!(v[0]["lemma"], "thm1");
    }
}
