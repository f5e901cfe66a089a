//! Executes scenarios suite by suite.

use std::fmt::Write as _;
use std::time::Instant;

use matdil_core::algebra::{AlgebraElement, MatrixAlgebra};
use matdil_core::channel::{self, Channel};
use matdil_core::dilation::{self, NDilation};
use matdil_core::factorization::{self, UnitaryFactorization};
use matdil_core::linalg::{self, r};
use matdil_core::{gns, unitary_dilation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::CliError;
use crate::format::AlgebraJson;
use crate::report::*;
use crate::scenario::{prepare, tol_or, FactorSource, Prepared, Scenario, Suite};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    /// Replaces every default tolerance when set.
    pub tolerance: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            tolerance: None,
        }
    }
}

struct Outcome {
    status: Status,
    reason: Option<String>,
    detail: Option<SuiteDetail>,
}

impl Outcome {
    fn judged(pass: bool, reason: &str, detail: SuiteDetail) -> Self {
        Self {
            status: if pass { Status::Pass } else { Status::Fail },
            reason: (!pass).then(|| reason.to_string()),
            detail: Some(detail),
        }
    }

    fn error(e: impl ToString) -> Self {
        Self {
            status: Status::Fail,
            reason: Some(e.to_string()),
            detail: None,
        }
    }
}

/// State shared between suites of one scenario.
struct Context<'a> {
    scenario: &'a Scenario,
    prepared: Prepared,
    tol: Option<f64>,
    rng: ChaCha8Rng,
    channel: Option<Channel>,
    dilation: Option<NDilation>,
}

pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> Result<Report, CliError> {
    scenario.check("$")?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let prepared = prepare(&scenario.channel, &mut rng, "$.channel")?;
    let mut ctx = Context {
        scenario,
        prepared,
        tol: opts.tolerance.or(scenario.tolerance),
        rng,
        channel: None,
        dilation: None,
    };
    let mut suites: Vec<SuiteReport> = Vec::new();
    for suite in scenario.ordered_suites() {
        let blocked = suite.prerequisites().iter().find(|pre| {
            suites
                .iter()
                .any(|s| s.suite == **pre && s.status != Status::Pass)
        });
        if let Some(pre) = blocked {
            suites.push(SuiteReport {
                suite,
                status: Status::Skipped,
                elapsed_ms: 0.0,
                reason: Some(format!("prerequisite {pre} did not pass")),
                detail: None,
            });
            continue;
        }
        let start = Instant::now();
        let outcome = match suite {
            Suite::Validate => run_validate(&mut ctx),
            Suite::Factorize => run_factorize(&mut ctx),
            Suite::Dilate => run_dilate(&mut ctx),
            Suite::Gns => run_gns(&mut ctx),
            Suite::Bridge => run_bridge(&mut ctx),
        };
        suites.push(SuiteReport {
            suite,
            status: outcome.status,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            reason: outcome.reason,
            detail: outcome.detail,
        });
    }
    Ok(Report {
        scenario: scenario.name.clone(),
        seed: opts.seed,
        tolerance_override: opts.tolerance,
        pass: suites.iter().all(|s| s.status == Status::Pass),
        suites,
    })
}

/// Runs every scenario; with `parallel` they run concurrently on the rayon
/// pool. Reports come back in input order.
pub fn run_all(
    scenarios: &[Scenario],
    opts: &RunOptions,
    parallel: bool,
) -> Result<Vec<Report>, CliError> {
    if parallel {
        scenarios
            .par_iter()
            .map(|s| run_scenario(s, opts))
            .collect()
    } else {
        scenarios.iter().map(|s| run_scenario(s, opts)).collect()
    }
}

/// Validates the configured Kraus set; later suites use the validated
/// channel. Every suite other than validate needs the channel, so without
/// a validate run the channel is still constructed here.
fn ensure_channel<'c>(ctx: &'c mut Context) -> Result<&'c Channel, String> {
    if ctx.channel.is_none() {
        let ch = Channel::new(ctx.prepared.domain.clone(), ctx.prepared.kraus.clone())
            .map_err(|e| e.to_string())?;
        ctx.channel = Some(ch);
    }
    Ok(ctx.channel.as_ref().expect("set above"))
}

fn run_validate(ctx: &mut Context) -> Outcome {
    let domain = &ctx.prepared.domain;
    let d = domain.concrete_dim();
    let v = match channel::validate(domain, &ctx.prepared.kraus) {
        Ok(v) => v,
        Err(e) => return Outcome::error(e),
    };
    let tolerance = tol_or(ctx.tol, d * d);
    let pass = v.is_unital(tolerance)
        && v.is_trace_preserving(tolerance)
        && v.is_completely_positive(tolerance);
    let choi_rank = if pass {
        ctx.channel = Channel::new(domain.clone(), ctx.prepared.kraus.clone()).ok();
        ctx.channel.as_ref().map_or(0, |c| c.choi_matrix().rank())
    } else {
        0
    };
    let detail = ValidateDetail {
        domain: AlgebraJson::from_algebra(domain),
        kraus_count: ctx.prepared.kraus.len(),
        unital_residual: v.unital_residual,
        tp_residual: v.tp_residual,
        choi_min_eigenvalue: v.choi_min_eigenvalue,
        choi_rank,
        tolerance,
    };
    Outcome::judged(
        pass && ctx.channel.is_some(),
        "channel is not unital, trace-preserving and completely positive",
        SuiteDetail::Validate(detail),
    )
}

fn run_factorize(ctx: &mut Context) -> Outcome {
    let reference = match ensure_channel(ctx) {
        Ok(ch) => ch.clone(),
        Err(e) => return Outcome::error(e),
    };
    let factor = &ctx.prepared.factor;
    let Some(fact) = factor.factorization() else {
        let FactorSource::Unavailable(why) = factor else {
            unreachable!()
        };
        return Outcome::error(why);
    };
    let one = factorization::verify_one_dilation(fact);
    let d = fact.system().concrete_dim();
    let tolerance = tol_or(ctx.tol, d * fact.environment().concrete_dim());
    let channel_residual = fact.channel().choi_distance(&reference);
    let channel_tol = tol_or(ctx.tol, d * d);
    let (outside_weight, clifford) = match factor {
        FactorSource::Supplied { outside_weight, .. } => (Some(*outside_weight), None),
        FactorSource::Clifford(cf) => (
            None,
            Some(CliffordDetail {
                rank: cf.gram.nrows(),
                generator_dim: cf.generators.first().map_or(1, |g| g.nrows()),
                pairing_residual: cf.pairing_residual,
            }),
        ),
        _ => (None, None),
    };
    let pass = one.max_residual <= tolerance
        && one.expectation_residual <= tolerance
        && one.unitarity_residual <= tolerance
        && channel_residual <= channel_tol
        && outside_weight.is_none_or(|w| w <= tolerance)
        && clifford
            .as_ref()
            .is_none_or(|c| c.pairing_residual <= ctx.tol.unwrap_or(1e-9));
    let detail = FactorizeDetail {
        method: factor.method().into(),
        environment: AlgebraJson::from_algebra(fact.environment()),
        environment_signature: fact.environment().blocks().iter().map(|b| b.dim).collect(),
        kraus_count: fact.channel().kraus_count(),
        max_residual: one.max_residual,
        expectation_residual: one.expectation_residual,
        unitarity_residual: one.unitarity_residual,
        channel_residual,
        outside_weight,
        clifford,
        tolerance,
    };
    Outcome::judged(
        pass,
        "the unitary does not reproduce the channel by partial trace",
        SuiteDetail::Factorize(detail),
    )
}

fn factorization_of<'c>(ctx: &'c Context) -> &'c UnitaryFactorization {
    ctx.prepared
        .factor
        .factorization()
        .expect("factorize passed")
}

fn unit_random(a: &MatrixAlgebra, rng: &mut ChaCha8Rng) -> AlgebraElement {
    let x = a.random_element(rng);
    let norm = x.frobenius();
    x.scale(r(1.0 / norm))
}

fn run_dilate(ctx: &mut Context) -> Outcome {
    let fact = factorization_of(ctx).clone();
    let n = ctx.scenario.steps;
    let dil = match dilation::build_n_dilation(&fact, n) {
        Ok(d) => d,
        Err(e) => return Outcome::error(e),
    };
    let report = dilation::verify_n_dilation(&dil);
    let tolerance = tol_or(ctx.tol, dil.dim());
    let big = dil.big_algebra().clone();
    let pairs: Vec<(AlgebraElement, AlgebraElement)> = (0..2)
        .map(|_| {
            (
                unit_random(&big, &mut ctx.rng),
                unit_random(&big, &mut ctx.rng),
            )
        })
        .collect();
    let auto = match dil.automorphism_residuals(&pairs) {
        Ok(a) => a,
        Err(e) => return Outcome::error(e),
    };
    let x = unit_random(&big, &mut ctx.rng);
    let nested = match (dil.phi(&x), dil.phi_nested(&x)) {
        (Ok(a), Ok(b)) => a.distance(&b),
        (Err(e), _) | (_, Err(e)) => return Outcome::error(e),
    };
    let commute =
        match dilation::commute_identity_check(fact.system(), fact.environment(), fact.channel()) {
            Ok(c) => c,
            Err(e) => return Outcome::error(e),
        };
    let commute_tol = tol_or(
        ctx.tol,
        fact.system().concrete_dim() * fact.environment().concrete_dim(),
    );
    let residuals_by_power = report
        .residuals
        .iter()
        .map(|row| row.iter().copied().fold(0.0, f64::max))
        .collect();
    let pass = report.max_residual <= tolerance
        && [auto.multiplicative, auto.adjoint, auto.trace, auto.unital]
            .iter()
            .all(|&v| v <= tolerance)
        && nested <= ctx.tol.unwrap_or(1e-10)
        && commute <= commute_tol;
    let detail = DilateDetail {
        n,
        max_residual: report.max_residual,
        worst_case: WorstCase {
            basis_index: report.worst_basis_index,
            m: report.worst_power,
        },
        pass,
        dim: dil.dim(),
        residuals_by_power,
        automorphism: AutomorphismDetail {
            multiplicative: auto.multiplicative,
            adjoint: auto.adjoint,
            trace: auto.trace,
            unital: auto.unital,
        },
        nested_expectation_residual: nested,
        commute_residual: commute,
        tolerance,
    };
    ctx.dilation = Some(dil);
    Outcome::judged(
        pass,
        "the compressions of alpha do not reproduce the channel powers",
        SuiteDetail::Dilate(detail),
    )
}

fn class_name(c: gns::Classification) -> String {
    match c {
        gns::Classification::Unitary => "UNITARY",
        gns::Classification::Projection => "PROJECTION",
        gns::Classification::PartialIsometry => "PARTIAL_ISOMETRY",
        gns::Classification::GenericContraction => "GENERIC_CONTRACTION",
    }
    .into()
}

fn run_gns(ctx: &mut Context) -> Outcome {
    let ch = match ensure_channel(ctx) {
        Ok(ch) => ch.clone(),
        Err(e) => return Outcome::error(e),
    };
    let t = gns::representing_matrix(&ch);
    let g = t.dim();
    let tolerance = tol_or(ctx.tol, g);
    let class = match gns::classify_channel(&ch) {
        Ok(c) => c,
        Err(e) => return Outcome::error(e),
    };
    let singular_values = t.singular_values();
    let kronecker_residual = gns::representing_matrix_kron(&ch)
        .ok()
        .map(|k| linalg::max_abs(&(k - t.matrix())));
    let (domain, domain_error) = match gns::multiplicative_domain(&ch) {
        Ok(m) => (
            Some(DomainDetail {
                dim: m.dim,
                angle: m.angle,
                closure_residual: m.closure_residual,
                bimodule_residual: m.bimodule_residual,
            }),
            None,
        ),
        Err(e) => (None, Some(e.to_string())),
    };
    let defect = match gns::defect_indices(t.matrix()) {
        Ok(d) => d,
        Err(e) => return Outcome::error(e),
    };
    let stable = match gns::stable_multiplicative_domain(&ch, gns::default_max_power(ch.domain())) {
        Ok(s) => s,
        Err(e) => return Outcome::error(e),
    };
    let kernel = gns::kernel_selfadjointness_check(&ch);
    let conjugation_residual = gns::check_conjugation_commutes(&t);
    let fixed_point_residual = t.fixed_point_residual();
    let pass = class.consistent
        && singular_values
            .iter()
            .all(|&s| s <= 1.0 + gns::CONTRACTION_SLACK)
        && fixed_point_residual <= tolerance
        && conjugation_residual <= 1e-10
        && kronecker_residual.is_none_or(|k| k <= 1e-12)
        && domain.is_some()
        && stable.converged
        && stable.stabilized_at <= g
        && kernel.passed();
    let detail = GnsDetail {
        gns_dim: g,
        classification: class_name(class.class),
        classification_consistent: class.consistent,
        singular_values,
        fixed_point_residual,
        conjugation_residual,
        kronecker_residual,
        multiplicative_domain: domain,
        defect_index: defect.kernel,
        subalgebra_dimensions: ch.domain().full_block_dim().map(gns::subalgebra_dimensions),
        stable_domain: StableDetail {
            history: stable.history,
            stabilized_at: stable.stabilized_at,
            converged: stable.converged,
            iterative_dim: stable.iterative.ncols(),
            closed_form_dim: stable.closed_form.ncols(),
            angle: stable.angle,
            agrees: stable.agrees,
        },
        kernel_selfadjoint: kernel.passed(),
    };
    let reason = domain_error.unwrap_or_else(|| "representing contraction checks failed".into());
    Outcome::judged(pass, &reason, SuiteDetail::Gns(detail))
}

fn run_bridge(ctx: &mut Context) -> Outcome {
    let order = ctx.scenario.bridge_order();
    let owned;
    let dil = match &ctx.dilation {
        Some(d) if d.order() == order => d,
        _ => match dilation::build_n_dilation(factorization_of(ctx), order) {
            Ok(d) => {
                owned = d;
                &owned
            }
            Err(e) => return Outcome::error(e),
        },
    };
    let report = match unitary_dilation::bridge_check(dil) {
        Ok(r) => r,
        Err(e) => return Outcome::error(e),
    };
    let tolerance = tol_or(ctx.tol, report.gns_dim);
    let pass = report.max_residual <= tolerance
        && report.unitarity_residual <= tolerance
        && report.projection_residual <= tolerance;
    let detail = BridgeDetail {
        n: order,
        gns_dim: report.gns_dim,
        residuals: report.residuals,
        max_residual: report.max_residual,
        unitarity_residual: report.unitarity_residual,
        projection_residual: report.projection_residual,
        base_classification: class_name(report.base_classification),
        tolerance,
    };
    Outcome::judged(
        pass,
        "T_alpha is not a unitary dilation of T_q",
        SuiteDetail::Bridge(detail),
    )
}

/// One line per suite, followed by the overall verdict.
pub fn summary(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario {} (seed {})", report.scenario, report.seed);
    for s in &report.suites {
        let status = match s.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        };
        let extra = match &s.detail {
            Some(SuiteDetail::Validate(v)) => format!(
                "unital {:.2e}, tp {:.2e}, choi min {:.2e}",
                v.unital_residual, v.tp_residual, v.choi_min_eigenvalue
            ),
            Some(SuiteDetail::Factorize(f)) => format!(
                "{} through {:?}, residual {:.2e}",
                f.method, f.environment_signature, f.max_residual
            ),
            Some(SuiteDetail::Dilate(d)) => format!(
                "N={} dim {} max residual {:.2e} at unit {} M={}",
                d.n, d.dim, d.max_residual, d.worst_case.basis_index, d.worst_case.m
            ),
            Some(SuiteDetail::Gns(g)) => format!(
                "{} (dim {}), mult domain {}, defect index {}",
                g.classification,
                g.gns_dim,
                g.multiplicative_domain
                    .as_ref()
                    .map_or("?".into(), |m| m.dim.to_string()),
                g.defect_index
            ),
            Some(SuiteDetail::Bridge(b)) => format!(
                "N={} gns dim {} max residual {:.2e}",
                b.n, b.gns_dim, b.max_residual
            ),
            None => String::new(),
        };
        let reason = s
            .reason
            .as_deref()
            .map(|r| format!(" ({r})"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "  {:<9} {:<7} {}{}",
            s.suite.to_string(),
            status,
            extra,
            reason
        );
    }
    let _ = writeln!(
        out,
        "  overall   {}",
        if report.pass { "PASS" } else { "FAIL" }
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{ChannelSpec, DepolarizingFactorization};

    fn depol(n: usize) -> Scenario {
        Scenario::new(
            "depol",
            ChannelSpec::Depolarizing {
                n,
                factorization: DepolarizingFactorization::Swap,
            },
            2,
        )
    }

    #[test]
    fn depolarizing_passes_everything() {
        let report = run_scenario(&depol(2), &RunOptions::default()).unwrap();
        assert!(report.pass, "{}", summary(&report));
        let Some(SuiteDetail::Gns(g)) = &report.suite(Suite::Gns).unwrap().detail else {
            panic!()
        };
        assert_eq!(g.classification, "PROJECTION");
        assert_eq!(g.defect_index, 3);
        assert_eq!(g.subalgebra_dimensions, Some(vec![1, 2, 4]));
    }

    #[test]
    fn invalid_channel_skips_dependents() {
        let spec: ChannelSpec = serde_json::from_str(
            r#"{"type":"kraus","algebra":{"blocks":[{"dim":2,"weight":1.0}]},
                "kraus":[[[[[1,0],[0,0]],[[0,0],[0,0]]]],[[[[0,0],[1,0]],[[0,0],[0,0]]]]]}"#,
        )
        .unwrap();
        let report = run_scenario(&Scenario::new("bad", spec, 2), &RunOptions::default()).unwrap();
        assert!(!report.pass);
        assert_eq!(report.suites[0].status, Status::Fail);
        assert!(report.suites[1..]
            .iter()
            .all(|s| s.status == Status::Skipped));
    }

    #[test]
    fn missing_unitary_fails_factorize_but_gns_runs() {
        let spec: ChannelSpec = serde_json::from_str(
            r#"{"type":"kraus","algebra":{"blocks":[{"dim":1,"weight":1.0}]},"kraus":[[[[[1,0]]]]]}"#,
        )
        .unwrap();
        let report =
            run_scenario(&Scenario::new("scalar", spec, 1), &RunOptions::default()).unwrap();
        let status: Vec<Status> = report.suites.iter().map(|s| s.status).collect();
        assert_eq!(
            status,
            vec![
                Status::Pass,
                Status::Fail,
                Status::Skipped,
                Status::Pass,
                Status::Skipped
            ]
        );
    }

    #[test]
    fn tolerance_override_is_applied() {
        let opts = RunOptions {
            tolerance: Some(1e-30),
            ..RunOptions::default()
        };
        let report = run_scenario(&depol(2).with_suites(&[Suite::Validate]), &opts).unwrap();
        let Some(SuiteDetail::Validate(v)) = &report.suites[0].detail else {
            panic!()
        };
        assert_eq!(v.tolerance, 1e-30);
        assert_eq!(report.tolerance_override, Some(1e-30));
    }
}
