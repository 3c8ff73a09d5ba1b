//! Flat run reports with binomial standard errors, rendered as JSON or a
//! one-row CSV.

use serde::Serialize;

use vopq::protocol::{
    effectiveness_report, EveMode, EveVerdict, ProtocolConfig, ProtocolKind,
    ProtocolTranscript,
};
use vopq::stats::binomial_se;
use vopq::Result;

/// Everything a run prints: the configuration echo, point estimates with
/// standard errors, raw counters, and the eavesdropper verdict when one
/// was requested.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub protocol: String,
    pub encoding: String,
    pub detection: Option<String>,
    pub theta0: Option<f64>,
    pub theta1: Option<f64>,
    pub phi0: Option<f64>,
    pub phi1: Option<f64>,
    pub gamma: f64,
    pub alpha_db_per_km: Option<f64>,
    pub length_km: Option<f64>,
    pub eve: bool,
    pub n_signals: u64,
    pub seed: u64,
    pub n_q: u64,
    pub n_b: u64,
    pub n_err: u64,
    pub n_p_expected: f64,
    pub n_p_sampled: u64,
    pub h: f64,
    pub h_se: f64,
    pub k_expected: f64,
    pub k_expected_se: f64,
    pub k_sampled: f64,
    pub k_sampled_se: f64,
    pub observed_arrival_rate: f64,
    pub non_arrival_rate: f64,
    pub eve_verdict: Option<String>,
    pub eve_p_value: Option<f64>,
    pub significance: Option<f64>,
}

pub struct VerdictInfo {
    pub verdict: EveVerdict,
    pub p_value: f64,
    pub significance: f64,
}

impl RunReport {
    pub fn build(
        config: &ProtocolConfig,
        transcript: &ProtocolTranscript,
        verdict: Option<VerdictInfo>,
    ) -> Result<Self> {
        let estimates = effectiveness_report(transcript)?;
        // The sifted-key count is the binomially fluctuating quantity; its
        // smoothed standard error propagates to each ratio through the
        // (deterministic or near-deterministic) denominators.
        let sifted_se_counts = binomial_se(transcript.n_b, transcript.n_q) * transcript.n_q as f64;
        let (detection, theta0, theta1, phi0, phi1) = match &config.protocol {
            ProtocolKind::Bb84 => (None, None, None, None, None),
            ProtocolKind::B92 {
                psi0,
                psi1,
                detection,
            } => (
                Some(format!("{detection:?}").to_lowercase()),
                Some(psi0.theta()),
                Some(psi1.theta()),
                Some(psi0.phi()),
                Some(psi1.phi()),
            ),
        };
        Ok(Self {
            protocol: match config.protocol {
                ProtocolKind::Bb84 => "bb84".into(),
                ProtocolKind::B92 { .. } => "b92".into(),
            },
            encoding: match config.encoding {
                vopq::protocol::Encoding::PolarizationLike => "pol".into(),
                vopq::protocol::Encoding::Vopq => "vopq".into(),
            },
            detection,
            theta0,
            theta1,
            phi0,
            phi1,
            gamma: config.loss.gamma(),
            alpha_db_per_km: config.loss.fiber().map(|f| f.alpha_db_per_km),
            length_km: config.loss.fiber().map(|f| f.length_km),
            eve: config.eve == EveMode::InterceptResend,
            n_signals: config.n_signals,
            seed: config.seed,
            n_q: transcript.n_q,
            n_b: transcript.n_b,
            n_err: transcript.n_err,
            n_p_expected: transcript.n_p_expected,
            n_p_sampled: transcript.n_p_sampled,
            h: estimates.h,
            h_se: binomial_se(transcript.n_b, transcript.n_q),
            k_expected: estimates.k_expected,
            k_expected_se: sifted_se_counts / transcript.n_p_expected,
            k_sampled: estimates.k_sampled,
            k_sampled_se: sifted_se_counts / transcript.n_p_sampled.max(1) as f64,
            observed_arrival_rate: transcript.observed_arrival_rate,
            non_arrival_rate: 1.0 - transcript.observed_arrival_rate,
            eve_verdict: verdict.as_ref().map(|v| match v.verdict {
                EveVerdict::Clean => "clean".into(),
                EveVerdict::Suspect => "suspect".into(),
            }),
            eve_p_value: verdict.as_ref().map(|v| v.p_value),
            significance: verdict.as_ref().map(|v| v.significance),
        })
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn to_csv(&self) -> String {
        let columns: Vec<(&str, String)> = vec![
            ("protocol", self.protocol.clone()),
            ("encoding", self.encoding.clone()),
            ("detection", opt_str(&self.detection)),
            ("theta0", opt_f64(self.theta0)),
            ("theta1", opt_f64(self.theta1)),
            ("phi0", opt_f64(self.phi0)),
            ("phi1", opt_f64(self.phi1)),
            ("gamma", fmt_f64(self.gamma)),
            ("alpha_db_per_km", opt_f64(self.alpha_db_per_km)),
            ("length_km", opt_f64(self.length_km)),
            ("eve", self.eve.to_string()),
            ("n_signals", self.n_signals.to_string()),
            ("seed", self.seed.to_string()),
            ("n_q", self.n_q.to_string()),
            ("n_b", self.n_b.to_string()),
            ("n_err", self.n_err.to_string()),
            ("n_p_expected", fmt_f64(self.n_p_expected)),
            ("n_p_sampled", self.n_p_sampled.to_string()),
            ("h", fmt_f64(self.h)),
            ("h_se", fmt_f64(self.h_se)),
            ("k_expected", fmt_f64(self.k_expected)),
            ("k_expected_se", fmt_f64(self.k_expected_se)),
            ("k_sampled", fmt_f64(self.k_sampled)),
            ("k_sampled_se", fmt_f64(self.k_sampled_se)),
            ("observed_arrival_rate", fmt_f64(self.observed_arrival_rate)),
            ("non_arrival_rate", fmt_f64(self.non_arrival_rate)),
            ("eve_verdict", opt_str(&self.eve_verdict)),
            ("eve_p_value", opt_f64(self.eve_p_value)),
            ("significance", opt_f64(self.significance)),
        ];
        let header: Vec<&str> = columns.iter().map(|(name, _)| *name).collect();
        let row: Vec<String> = columns.into_iter().map(|(_, value)| value).collect();
        format!("{}\n{}\n", header.join(","), row.join(","))
    }
}

/// Full-precision float formatting (17 significant digits) so files
/// regenerate byte-identically.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

fn opt_f64(value: Option<f64>) -> String {
    value.map(fmt_f64).unwrap_or_else(|| "NA".into())
}

fn opt_str(value: &Option<String>) -> String {
    value.clone().unwrap_or_else(|| "NA".into())
}
