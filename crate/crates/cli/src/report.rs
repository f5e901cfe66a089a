use serde::{Deserialize, Serialize};

use crate::format::AlgebraJson;
use crate::scenario::Suite;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance_override: Option<f64>,
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn suite(&self, suite: Suite) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.suite == suite)
    }

    /// The report with timings zeroed, for run-to-run comparison.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        for s in &mut r.suites {
            s.elapsed_ms = 0.0;
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub status: Status,
    pub elapsed_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<SuiteDetail>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteDetail {
    Validate(ValidateDetail),
    Factorize(FactorizeDetail),
    Dilate(DilateDetail),
    Gns(GnsDetail),
    Bridge(BridgeDetail),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateDetail {
    pub domain: AlgebraJson,
    pub kraus_count: usize,
    pub unital_residual: f64,
    pub tp_residual: f64,
    pub choi_min_eigenvalue: f64,
    pub choi_rank: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliffordDetail {
    pub rank: usize,
    pub generator_dim: usize,
    pub pairing_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizeDetail {
    pub method: String,
    pub environment: AlgebraJson,
    /// Block dimensions of the environment algebra.
    pub environment_signature: Vec<usize>,
    pub kraus_count: usize,
    pub max_residual: f64,
    pub expectation_residual: f64,
    pub unitarity_residual: f64,
    /// Choi distance between the factorized channel and the configured one.
    pub channel_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outside_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clifford: Option<CliffordDetail>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub basis_index: usize,
    #[serde(rename = "M")]
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AutomorphismDetail {
    pub multiplicative: f64,
    pub adjoint: f64,
    pub trace: f64,
    pub unital: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilateDetail {
    #[serde(rename = "N")]
    pub n: usize,
    pub max_residual: f64,
    pub worst_case: WorstCase,
    pub pass: bool,
    /// Concrete dimension `d_A d_B^N`.
    pub dim: usize,
    /// Largest residual for each `M = 1, …, N`.
    pub residuals_by_power: Vec<f64>,
    pub automorphism: AutomorphismDetail,
    pub nested_expectation_residual: f64,
    pub commute_residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainDetail {
    pub dim: usize,
    pub angle: f64,
    pub closure_residual: f64,
    pub bimodule_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableDetail {
    pub history: Vec<usize>,
    pub stabilized_at: usize,
    pub converged: bool,
    pub iterative_dim: usize,
    pub closed_form_dim: usize,
    pub angle: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnsDetail {
    pub gns_dim: usize,
    pub classification: String,
    pub classification_consistent: bool,
    pub singular_values: Vec<f64>,
    pub fixed_point_residual: f64,
    pub conjugation_residual: f64,
    /// Kronecker formula against column evaluation; full blocks only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kronecker_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicative_domain: Option<DomainDetail>,
    pub defect_index: usize,
    /// Unital *-subalgebra dimensions of a full block domain, for comparison
    /// with `defect_index`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subalgebra_dimensions: Option<Vec<usize>>,
    pub stable_domain: StableDetail,
    pub kernel_selfadjoint: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeDetail {
    #[serde(rename = "N")]
    pub n: usize,
    pub gns_dim: usize,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub unitarity_residual: f64,
    pub projection_residual: f64,
    pub base_classification: String,
    pub tolerance: f64,
}
