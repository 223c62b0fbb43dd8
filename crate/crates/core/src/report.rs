//! Verification reports: per-claim verdicts with exact integer data.

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimRecord {
    pub claim: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<u64>,
    pub lhs: String,
    pub rhs: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl ClaimRecord {
    pub fn new(claim: impl Into<String>, lhs: impl ToString, rhs: impl ToString, ok: bool) -> Self {
        ClaimRecord {
            claim: claim.into(),
            level: None,
            length: None,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            verdict: Verdict::from_bool(ok),
            witness: None,
        }
    }

    pub fn at_level(mut self, n: usize) -> Self {
        self.level = Some(n);
        self
    }

    pub fn at_length(mut self, l: u64) -> Self {
        self.length = Some(l);
        self
    }

    pub fn with_witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub subject: String,
    pub tool_version: String,
    pub config_hash: String,
    /// Depth up to which every claim is certified.
    pub horizon: usize,
    pub claims: Vec<ClaimRecord>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>, config: &str, horizon: usize) -> Self {
        VerificationReport {
            subject: subject.into(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash(config),
            horizon,
            claims: Vec::new(),
            notes: vec![format!(
                "all verdicts are relative to horizon {horizon}; zero means zero as witnessed at that depth"
            )],
        }
    }

    pub fn push(&mut self, c: ClaimRecord) {
        self.claims.push(c);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn pass(&self) -> bool {
        self.claims.iter().all(|c| c.passed())
    }

    pub fn failures(&self) -> impl Iterator<Item = &ClaimRecord> {
        self.claims.iter().filter(|c| !c.passed())
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.claims.extend(other.claims);
        for n in other.notes {
            if !self.notes.contains(&n) {
                self.notes.push(n);
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} (horizon {}, config {}, v{})\n",
            self.subject,
            self.horizon,
            &self.config_hash[..12],
            self.tool_version
        );
        for c in &self.claims {
            let at = match (c.level, c.length) {
                (Some(n), _) => format!(" n={n}"),
                (None, Some(l)) => format!(" l={l}"),
                _ => String::new(),
            };
            s.push_str(&format!(
                "{} {}{}: {} vs {}",
                if c.passed() { "PASS" } else { "FAIL" },
                c.claim,
                at,
                c.lhs,
                c.rhs
            ));
            if let Some(w) = &c.witness {
                s.push_str(&format!(" [{w}]"));
            }
            s.push('\n');
        }
        for n in &self.notes {
            s.push_str(&format!("note: {n}\n"));
        }
        s
    }
}

/// Hex sha256 of a configuration string.
pub fn config_hash(config: &str) -> String {
    hex::encode(Sha256::digest(config.as_bytes()))
}
