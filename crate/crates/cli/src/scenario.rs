//! Scenario configuration and the channel/factorization it describes.

use std::collections::HashSet;
use std::fmt;

use matdil_core::algebra::{self, AlgebraElement, MatrixAlgebra};
use matdil_core::channel::Channel;
use matdil_core::factorization::{
    self, CliffordFactorization, CorrelationMatrix, HullMembership, UnitaryFactorization,
};
use matdil_core::linalg::{self, CMatrix};
use matdil_core::{matrix_tol, random};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;
use crate::format::{self, AlgebraJson, ElementJson, MatrixJson};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Validate,
    Factorize,
    Dilate,
    Gns,
    Bridge,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Validate,
        Suite::Factorize,
        Suite::Dilate,
        Suite::Gns,
        Suite::Bridge,
    ];

    /// Suites whose failure makes this one meaningless.
    pub fn prerequisites(self) -> &'static [Suite] {
        match self {
            Suite::Validate => &[],
            Suite::Factorize | Suite::Gns => &[Suite::Validate],
            Suite::Dilate => &[Suite::Validate, Suite::Factorize],
            Suite::Bridge => &[Suite::Validate, Suite::Factorize, Suite::Dilate],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Validate => "validate",
            Suite::Factorize => "factorize",
            Suite::Dilate => "dilate",
            Suite::Gns => "gns",
            Suite::Bridge => "bridge",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepolarizingFactorization {
    /// `Σ E_ij ⊗ E_ji` through `C^{n×n}`.
    #[default]
    Swap,
    /// `Σ σ_i ⊗ E_ii` through `C⁴`; only for `n = 2`.
    Pauli,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ChannelSpec {
    Dft {
        n: usize,
        m: usize,
    },
    RandomUnitary {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unitaries: Option<Vec<MatrixJson>>,
        probs: Vec<f64>,
        /// Draw `probs.len()` Haar unitaries of this size when `unitaries`
        /// is absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        haar_dim: Option<usize>,
    },
    Schur {
        #[serde(rename = "C")]
        c: MatrixJson,
    },
    Kraus {
        algebra: AlgebraJson,
        kraus: Vec<ElementJson>,
        /// Kronecker-picture unitary on `C^{d_A} ⊗ C^{d_B}`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unitary: Option<MatrixJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        environment: Option<AlgebraJson>,
    },
    Depolarizing {
        n: usize,
        #[serde(default)]
        factorization: DepolarizingFactorization,
    },
}

fn default_steps() -> usize {
    2
}

fn all_suites() -> Vec<Suite> {
    Suite::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub channel: ChannelSpec,
    /// Dilation order `N`.
    #[serde(rename = "N", default = "default_steps")]
    pub steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default = "all_suites")]
    pub suites: Vec<Suite>,
    /// Order used by the bridge suite; defaults to `min(N, 2)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bridge_steps: Option<usize>,
}

impl Scenario {
    pub fn new(name: &str, channel: ChannelSpec, steps: usize) -> Self {
        Self {
            name: name.into(),
            channel,
            steps,
            tolerance: None,
            suites: all_suites(),
            bridge_steps: None,
        }
    }

    pub fn with_suites(mut self, suites: &[Suite]) -> Self {
        self.suites = suites.to_vec();
        self
    }

    pub fn bridge_order(&self) -> usize {
        self.bridge_steps.unwrap_or(self.steps.min(2))
    }

    /// Requested suites in execution order.
    pub fn ordered_suites(&self) -> Vec<Suite> {
        let mut s = self.suites.clone();
        s.sort();
        s.dedup();
        s
    }

    pub fn check(&self, location: &str) -> Result<(), CliError> {
        if self.suites.is_empty() {
            return Err(CliError::config(
                format!("{location}.suites"),
                "no suites requested",
            ));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = self.suites.iter().find(|s| !seen.insert(**s)) {
            return Err(CliError::config(
                format!("{location}.suites"),
                format!("suite {dup} listed twice"),
            ));
        }
        let needs_order = self
            .suites
            .iter()
            .any(|s| matches!(s, Suite::Dilate | Suite::Bridge));
        if needs_order && self.steps == 0 {
            return Err(CliError::config(
                format!("{location}.N"),
                "N must be at least 1 for dilate",
            ));
        }
        if self.suites.contains(&Suite::Bridge) && self.bridge_order() == 0 {
            return Err(CliError::config(
                format!("{location}.bridge_steps"),
                "must be at least 1",
            ));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::config(
                    format!("{location}.tolerance"),
                    "must be positive",
                ));
            }
        }
        match &self.channel {
            ChannelSpec::Dft { n, m } if *n == 0 || *m == 0 => Err(CliError::config(
                format!("{location}.channel"),
                "n and m must be positive",
            )),
            ChannelSpec::Depolarizing { n: 0, .. } => Err(CliError::config(
                format!("{location}.channel.n"),
                "must be positive",
            )),
            ChannelSpec::Depolarizing {
                n,
                factorization: DepolarizingFactorization::Pauli,
            } if *n != 2 => Err(CliError::config(
                format!("{location}.channel.factorization"),
                "the Pauli factorization needs n = 2",
            )),
            ChannelSpec::RandomUnitary {
                unitaries,
                probs,
                haar_dim,
            } => match (unitaries, haar_dim) {
                (Some(u), None) if u.len() == probs.len() => Ok(()),
                (Some(u), None) => Err(CliError::config(
                    format!("{location}.channel.probs"),
                    format!("{} unitaries but {} probabilities", u.len(), probs.len()),
                )),
                (None, Some(d)) if *d > 0 => Ok(()),
                (None, Some(_)) => Err(CliError::config(
                    format!("{location}.channel.haar_dim"),
                    "must be positive",
                )),
                _ => Err(CliError::config(
                    format!("{location}.channel"),
                    "give exactly one of `unitaries` and `haar_dim`",
                )),
            },
            ChannelSpec::Kraus {
                unitary,
                environment,
                ..
            } if unitary.is_some() != environment.is_some() => Err(CliError::config(
                format!("{location}.channel"),
                "`unitary` and `environment` must be given together",
            )),
            _ => Ok(()),
        }
    }
}

/// Parses either a single scenario or `{"scenarios": [...]}`.
pub fn parse_config(text: &str, path: &str) -> Result<Vec<Scenario>, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|source| CliError::Json {
        path: path.into(),
        source,
    })?;
    let items: Vec<(String, Value)> = match value {
        Value::Object(mut map) if map.contains_key("scenarios") => match map.remove("scenarios") {
            Some(Value::Array(list)) => list
                .into_iter()
                .enumerate()
                .map(|(i, v)| (format!("scenarios[{i}]"), v))
                .collect(),
            _ => return Err(CliError::config("scenarios", "expected an array")),
        },
        other => vec![("$".into(), other)],
    };
    if items.is_empty() {
        return Err(CliError::config("scenarios", "empty scenario list"));
    }
    items
        .into_iter()
        .map(|(loc, v)| {
            let s: Scenario =
                serde_json::from_value(v).map_err(|e| CliError::config(&loc, e.to_string()))?;
            s.check(&loc)?;
            Ok(s)
        })
        .collect()
}

/// How the factorize suite obtained its unitary.
#[derive(Debug, Clone)]
pub enum FactorSource {
    Built {
        method: &'static str,
        factorization: UnitaryFactorization,
    },
    Clifford(Box<CliffordFactorization>),
    /// Supplied in the config; the channel is the configured Kraus set.
    Supplied {
        factorization: UnitaryFactorization,
        outside_weight: f64,
    },
    Unavailable(String),
}

impl FactorSource {
    pub fn factorization(&self) -> Option<&UnitaryFactorization> {
        match self {
            FactorSource::Built { factorization, .. }
            | FactorSource::Supplied { factorization, .. } => Some(factorization),
            FactorSource::Clifford(c) => Some(&c.factorization),
            FactorSource::Unavailable(_) => None,
        }
    }

    pub fn method(&self) -> &'static str {
        match self {
            FactorSource::Built { method, .. } => method,
            FactorSource::Clifford(_) => "clifford",
            FactorSource::Supplied { .. } => "supplied",
            FactorSource::Unavailable(_) => "none",
        }
    }
}

/// The configured channel before validation, and its factorization.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub domain: MatrixAlgebra,
    pub kraus: Vec<AlgebraElement>,
    pub factor: FactorSource,
}

fn unavailable(e: impl ToString) -> FactorSource {
    FactorSource::Unavailable(e.to_string())
}

fn built(method: &'static str, f: matdil_core::Result<UnitaryFactorization>) -> FactorSource {
    match f {
        Ok(factorization) => FactorSource::Built {
            method,
            factorization,
        },
        Err(e) => unavailable(e),
    }
}

impl Prepared {
    fn from_factorization(f: UnitaryFactorization, method: &'static str) -> Self {
        Self {
            domain: f.system().clone(),
            kraus: f.channel().kraus().to_vec(),
            factor: FactorSource::Built {
                method,
                factorization: f,
            },
        }
    }
}

/// Builds the configured channel; shape problems are config errors, while
/// mathematical failures are left for the suites to report.
pub fn prepare(
    spec: &ChannelSpec,
    rng: &mut ChaCha8Rng,
    location: &str,
) -> Result<Prepared, CliError> {
    let cfg = |e: matdil_core::Error| CliError::config(location, e.to_string());
    match spec {
        ChannelSpec::Depolarizing { n, factorization } => {
            let ch = Channel::depolarizing(*n);
            let factor = match factorization {
                DepolarizingFactorization::Swap => {
                    built("swap", Ok(factorization::depolarizing_swap(*n)))
                }
                DepolarizingFactorization::Pauli => {
                    built("pauli", Ok(factorization::depolarizing_pauli()))
                }
            };
            Ok(Prepared {
                domain: ch.domain().clone(),
                kraus: ch.kraus().to_vec(),
                factor,
            })
        }
        ChannelSpec::Dft { n, m } => {
            let f = factorization::dft_channel(*n, *m).map_err(cfg)?;
            Ok(Prepared::from_factorization(f, "dft"))
        }
        ChannelSpec::RandomUnitary {
            unitaries,
            probs,
            haar_dim,
        } => {
            let us: Vec<CMatrix> = match (unitaries, haar_dim) {
                (Some(list), _) => list
                    .iter()
                    .enumerate()
                    .map(|(i, m)| {
                        format::matrix_from_json(m, &format!("{location}.unitaries[{i}]"))
                    })
                    .collect::<Result<_, _>>()?,
                (None, Some(d)) => probs
                    .iter()
                    .map(|_| random::haar_unitary(*d, rng))
                    .collect(),
                (None, None) => return Err(CliError::config(location, "missing unitaries")),
            };
            let n = us[0].nrows();
            if us.iter().any(|u| u.nrows() != n || u.ncols() != n) {
                return Err(CliError::config(
                    format!("{location}.unitaries"),
                    "unitaries must be square and equal-sized",
                ));
            }
            let domain = MatrixAlgebra::full(n);
            let kraus = us
                .iter()
                .zip(probs)
                .map(|(u, p)| domain.project_concrete(&(u * linalg::r(p.max(0.0).sqrt()))))
                .collect();
            Ok(Prepared {
                domain,
                kraus,
                factor: built(
                    "random-unitary",
                    factorization::random_unitary_channel(&us, probs),
                ),
            })
        }
        ChannelSpec::Schur { c } => {
            let m = format::matrix_from_json(c, &format!("{location}.C"))?;
            let corr = CorrelationMatrix::new(m)
                .map_err(|e| CliError::config(format!("{location}.C"), e.to_string()))?;
            let ch = factorization::schur_channel(&corr);
            let factor = if corr.max_imag() <= matdil_core::SCALAR_TOL {
                match factorization::real_correlation_factorization(&corr) {
                    Ok(cf) => FactorSource::Clifford(Box::new(cf)),
                    Err(e) => unavailable(e),
                }
            } else {
                match factorization::rank_one_hull_member(&corr) {
                    HullMembership::RankOne { unitary, .. } => built(
                        "rank-one",
                        factorization::factorization_from_unitary(
                            &unitary,
                            ch.domain(),
                            &MatrixAlgebra::full(1),
                        ),
                    ),
                    HullMembership::Unknown { rank } => unavailable(format!(
                        "complex correlation matrix of rank {rank}: no factorization is constructed"
                    )),
                }
            };
            Ok(Prepared {
                domain: ch.domain().clone(),
                kraus: ch.kraus().to_vec(),
                factor,
            })
        }
        ChannelSpec::Kraus {
            algebra: alg,
            kraus,
            unitary,
            environment,
        } => {
            let domain = alg.to_algebra(&format!("{location}.algebra"))?;
            let kraus: Vec<AlgebraElement> = kraus
                .iter()
                .enumerate()
                .map(|(i, k)| {
                    format::element_from_json(&domain, k, &format!("{location}.kraus[{i}]"))
                })
                .collect::<Result<_, _>>()?;
            if kraus.is_empty() {
                return Err(CliError::config(
                    format!("{location}.kraus"),
                    "empty Kraus set",
                ));
            }
            let factor = match (unitary, environment) {
                (Some(u), Some(env)) => {
                    let env = env.to_algebra(&format!("{location}.environment"))?;
                    let u = format::matrix_from_json(u, &format!("{location}.unitary"))?;
                    let dim = domain.concrete_dim() * env.concrete_dim();
                    if u.nrows() != dim || u.ncols() != dim {
                        return Err(CliError::config(
                            format!("{location}.unitary"),
                            format!("expected {dim}x{dim}, got {}x{}", u.nrows(), u.ncols()),
                        ));
                    }
                    supplied(&domain, &env, &u, &kraus)
                }
                _ => {
                    unavailable("no unitary supplied; add `unitary` and `environment` to factorize")
                }
            };
            Ok(Prepared {
                domain,
                kraus,
                factor,
            })
        }
    }
}

fn supplied(
    domain: &MatrixAlgebra,
    env: &MatrixAlgebra,
    u: &CMatrix,
    kraus: &[AlgebraElement],
) -> FactorSource {
    let channel = match Channel::new(domain.clone(), kraus.to_vec()) {
        Ok(ch) => ch,
        Err(e) => return unavailable(e),
    };
    let factors = [domain, env];
    let element = algebra::kron_to_tensor(&factors, u);
    let outside_weight = linalg::distance(&algebra::tensor_to_kron(&factors, &element), u);
    match UnitaryFactorization::from_parts(domain.clone(), env.clone(), element, channel) {
        Ok(factorization) => FactorSource::Supplied {
            factorization,
            outside_weight,
        },
        Err(e) => unavailable(e),
    }
}

/// Tolerance for a comparison in dimension `d`, honoring an override.
pub fn tol_or(override_tol: Option<f64>, d: usize) -> f64 {
    override_tol.unwrap_or_else(|| matrix_tol(d))
}
