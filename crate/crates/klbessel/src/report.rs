//! Machine-readable reports: JSON schemas and a minimal CSV emitter.
//! Every report embeds the exact invocation and library version so a result
//! file is reproducible on its own.

use crate::cyclotomic::{EqualityPath, ScaledCyc};
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One verified data point of an identity: both exact sides are serialized.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityRow {
    pub identity: String,
    pub p: u64,
    pub s: u32,
    pub n: u32,
    /// base-p coefficients of the point a
    pub a: Vec<u64>,
    pub lhs: ScaledCyc,
    pub rhs: ScaledCyc,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<EqualityPath>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub invocation: String,
    pub version: String,
    pub pass: bool,
    pub rows: Vec<IdentityRow>,
}

impl IdentityReport {
    pub fn new(identity: &str, rows: Vec<IdentityRow>) -> IdentityReport {
        IdentityReport {
            identity: identity.to_string(),
            invocation: std::env::args().collect::<Vec<_>>().join(" "),
            version: VERSION.to_string(),
            pass: rows.iter().all(|r| r.pass),
            rows,
        }
    }

    /// First failing row, if any; reports abort with the counterexample.
    pub fn counterexample(&self) -> Option<&IdentityRow> {
        self.rows.iter().find(|r| !r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("identity,p,s,n,a,lhs,rhs,pass\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:?},{},{},{}\n",
                r.identity,
                r.p,
                r.s,
                r.n,
                r.a,
                serde_json::to_string(&r.lhs).unwrap().replace(',', ";"),
                serde_json::to_string(&r.rhs).unwrap().replace(',', ";"),
                r.pass
            ));
        }
        out
    }
}

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub runtime_ms: u128,
    pub detail: String,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {} ({} ms): {}",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.runtime_ms,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryReport {
    pub invocation: String,
    pub version: String,
    pub profile: String,
    pub pass: bool,
    pub criteria: Vec<CriterionReport>,
}
