use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use rearrange_lab_core::functionals::{self, DEFAULT_SAMPLES};
use rearrange_lab_core::integrand::{self, vanishes_on_hyperplanes, Variables};
use rearrange_lab_core::necessity::{
    build_hl_counterexample, build_kernel_monotonicity_counterexample, build_riesz_counterexample,
    verify_kernel_radial_monotone, RieszConstructionOptions,
};
use rearrange_lab_core::supermod::{
    check_strict_supermodular, check_supermodular, StrictVerdict, SupermodularVerdict,
};
use rearrange_lab_core::{
    CounterexampleReport, Integrand, LatticeSpec, RieszOptions, SimpleFunction,
    SupermodularityWitness,
};

use crate::cli::{Command, Demo, IntegrandArgs, LatticeArgs, SamplingArgs};
use crate::config::{
    kernel_arg, read_json, resolve_seed, HlDemoConfig, KernelDemoConfig, RieszDemoConfig,
    WitnessInput,
};
use crate::error::{CliError, CliResult};
use crate::output::{to_value, Outcome};

/// Variable indices above this are rejected when inferring the arity.
const MAX_INFERRED_ARITY: usize = 64;

pub fn run(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::CheckSupermodular {
            integrand,
            strict,
            lattice,
        } => check(integrand, *strict, lattice),
        Command::Rearrange { f } => rearrange(f),
        Command::EvalHl {
            integrand,
            functions,
        } => eval_hl(integrand, functions),
        Command::EvalRiesz {
            integrand,
            kernel,
            f,
            g,
            sampling,
        } => eval_riesz(integrand, kernel, f, g, sampling),
        Command::FindWitness { integrand, lattice } => find_witness(integrand, lattice),
        Command::Demo {
            which,
            config,
            sampling,
        } => demo(*which, config, sampling),
    }
}

fn parse_integrand(text: &str, arity: Option<usize>) -> CliResult<Integrand> {
    let arity = match arity {
        Some(m) => m,
        None => {
            let expr = integrand::parse(text, Variables::Indexed(MAX_INFERRED_ARITY))
                .map_err(rearrange_lab_core::Error::from)?;
            expr.variable_count().max(2)
        }
    };
    Ok(Integrand::parse(text, arity)?)
}

fn integrand_echo(f: &Integrand) -> Value {
    json!({ "integrand": f.source(), "arity": f.arity() })
}

fn lattice(args: &LatticeArgs) -> CliResult<LatticeSpec> {
    Ok(LatticeSpec::new(args.ymax, args.step, Vec::new())?)
}

fn read_function(path: &Path) -> CliResult<SimpleFunction> {
    read_json(path)
}

fn riesz_options(
    sampling: &SamplingArgs,
    samples: Option<u64>,
    seed: Option<u64>,
) -> CliResult<RieszOptions> {
    let samples = sampling.samples.or(samples).unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(CliError::Usage("--samples must be positive".into()));
    }
    Ok(RieszOptions {
        samples,
        seed: resolve_seed(sampling.seed, seed)?,
    })
}

fn check(args: &IntegrandArgs, strict: bool, lattice_args: &LatticeArgs) -> CliResult<Outcome> {
    let f = parse_integrand(&args.integrand, args.arity)?;
    let lattice = lattice(lattice_args)?;
    let mut config = integrand_echo(&f);
    config["strict"] = json!(strict);
    config["lattice"] = to_value(&lattice);

    let (result, violated) = if strict {
        let v = check_strict_supermodular(&f, &lattice)?;
        let violated = matches!(v, StrictVerdict::NonStrict { .. });
        (to_value(&v), violated)
    } else {
        let v = check_supermodular(&f, &lattice)?;
        (
            to_value(&v),
            matches!(v, SupermodularVerdict::Violation { .. }),
        )
    };
    let mut outcome = Outcome::from_tagged("check-supermodular", config, None, result);
    outcome.exit_code = u8::from(violated);
    Ok(outcome)
}

fn rearrange(path: &Path) -> CliResult<Outcome> {
    let f = read_function(path)?;
    let config = json!({ "f": path });
    let result = json!({
        "dim": f.dim(),
        "rearranged": f.rearrange(),
    });
    Ok(Outcome::from_tagged("rearrange", config, None, result))
}

fn eval_hl(args: &IntegrandArgs, paths: &[PathBuf]) -> CliResult<Outcome> {
    let f = parse_integrand(&args.integrand, Some(args.arity.unwrap_or(paths.len())))?;
    let us = paths
        .iter()
        .map(|p| read_function(p))
        .collect::<CliResult<Vec<_>>>()?;
    let estimate = functionals::eval_hl(&f, &us)?;
    let mut config = integrand_echo(&f);
    config["functions"] = to_value(&paths);
    Ok(Outcome::from_tagged(
        "eval-hl",
        config,
        None,
        to_value(&estimate),
    ))
}

fn eval_riesz(
    args: &IntegrandArgs,
    kernel: &str,
    f_path: &Path,
    g_path: &Path,
    sampling: &SamplingArgs,
) -> CliResult<Outcome> {
    let psi = parse_integrand(&args.integrand, Some(args.arity.unwrap_or(2)))?;
    let k = kernel_arg(kernel)?;
    let f = read_function(f_path)?;
    let g = read_function(g_path)?;
    let opts = riesz_options(sampling, None, None)?;
    let estimate = functionals::eval_riesz2(&psi, &f, &g, &k, &opts)?;

    let mut config = integrand_echo(&psi);
    config["kernel"] = to_value(&k);
    config["f"] = to_value(&f_path);
    config["g"] = to_value(&g_path);
    config["samples"] = json!(opts.samples);
    let seed = estimate.method.is_stochastic().then_some(opts.seed);
    Ok(Outcome::from_tagged(
        "eval-riesz",
        config,
        seed,
        to_value(&estimate),
    ))
}

fn find_witness(args: &IntegrandArgs, lattice_args: &LatticeArgs) -> CliResult<Outcome> {
    let f = parse_integrand(&args.integrand, args.arity)?;
    let lattice = lattice(lattice_args)?;
    let mut config = integrand_echo(&f);
    config["lattice"] = to_value(&lattice);

    match check_supermodular(&f, &lattice)? {
        SupermodularVerdict::PassedOnLattice {
            min_deficit,
            quadruples,
        } => {
            let mut outcome = Outcome::from_tagged(
                "find-witness",
                config,
                None,
                json!({ "min_deficit": min_deficit, "quadruples": quadruples }),
            );
            outcome.verdict = "PassedOnLattice".into();
            outcome.rows = Some(Vec::new());
            Ok(outcome)
        }
        SupermodularVerdict::Violation {
            witness,
            quadruples,
        } => {
            let gate = vanishes_on_hyperplanes(&f, &lattice)?;
            let mut result = json!({
                "witness": witness,
                "quadruples": quadruples,
                "hyperplane_check": gate,
            });
            let mut rows = Vec::new();
            if gate.holds {
                let report = build_hl_counterexample(&f, &witness, 1)?;
                rows = report.rows.clone();
                result["counterexample"] = to_value(&report);
            }
            let mut outcome = Outcome::from_tagged("find-witness", config, None, result);
            outcome.verdict = "Violation".into();
            outcome.rows = Some(rows);
            outcome.exit_code = 1;
            Ok(outcome)
        }
    }
}

fn witness(f: &Integrand, w: &WitnessInput) -> CliResult<SupermodularityWitness> {
    Ok(SupermodularityWitness::evaluate(
        f,
        w.i,
        w.j,
        w.y.clone(),
        w.h,
        w.k,
    )?)
}

/// The configured witness, or the most negative lattice quadruple.
fn witness_or_search(
    f: &Integrand,
    given: Option<&WitnessInput>,
    lattice: &LatticeSpec,
) -> CliResult<Result<SupermodularityWitness, SupermodularVerdict>> {
    if let Some(w) = given {
        return Ok(Ok(witness(f, w)?));
    }
    Ok(match check_supermodular(f, lattice)? {
        SupermodularVerdict::Violation { witness, .. } => Ok(witness),
        passed => Err(passed),
    })
}

fn counterexample_outcome(
    which: Demo,
    config: Value,
    seed: Option<u64>,
    report: &CounterexampleReport,
    extra: Option<(&str, Value)>,
) -> Outcome {
    let mut result = to_value(report);
    if let Some((key, value)) = extra {
        result[key] = value;
    }
    let mut outcome = Outcome::from_tagged(&format!("demo {}", which.name()), config, seed, result);
    outcome.verdict = if report.certified {
        "certified"
    } else {
        "not_certified"
    }
    .into();
    outcome.exit_code = u8::from(report.certified);
    outcome.rows = Some(report.rows.clone());
    outcome
}

fn passed_outcome(which: Demo, config: Value, verdict: SupermodularVerdict) -> Outcome {
    let mut outcome = Outcome::from_tagged(
        &format!("demo {}", which.name()),
        config,
        None,
        to_value(&verdict),
    );
    outcome.verdict = "passed_on_lattice".into();
    outcome.rows = Some(Vec::new());
    outcome
}

fn demo(which: Demo, path: &Path, sampling: &SamplingArgs) -> CliResult<Outcome> {
    match which {
        Demo::Prop31 => {
            let cfg: HlDemoConfig = read_json(path)?;
            let f = Integrand::parse(&cfg.integrand, cfg.arity)?;
            cfg.lattice.validate()?;
            let config = to_value(&cfg);
            match witness_or_search(&f, cfg.witness.as_ref(), &cfg.lattice)? {
                Ok(w) => {
                    let report = build_hl_counterexample(&f, &w, cfg.dim)?;
                    Ok(counterexample_outcome(which, config, None, &report, None))
                }
                Err(passed) => Ok(passed_outcome(which, config, passed)),
            }
        }
        Demo::Prop32 => {
            let cfg: RieszDemoConfig = read_json(path)?;
            let psi = Integrand::parse(&cfg.integrand, cfg.arity)?;
            cfg.lattice.validate()?;
            let riesz = riesz_options(sampling, cfg.samples, cfg.seed)?;
            let mut config = to_value(&cfg);
            config["samples"] = json!(riesz.samples);
            config["seed"] = json!(riesz.seed);
            match witness_or_search(&psi, cfg.witness.as_ref(), &cfg.lattice)? {
                Ok(w) => {
                    let opts = RieszConstructionOptions {
                        eps_t0: cfg.eps_t0,
                        r_list: cfg.r_list.clone(),
                        riesz,
                    };
                    let report = build_riesz_counterexample(&psi, &w, &cfg.kernel, cfg.dim, &opts)?;
                    let seed = stochastic(&report).then_some(riesz.seed);
                    Ok(counterexample_outcome(which, config, seed, &report, None))
                }
                Err(passed) => Ok(passed_outcome(which, config, passed)),
            }
        }
        Demo::Prop33 => {
            let cfg: KernelDemoConfig = read_json(path)?;
            let psi = Integrand::parse(&cfg.integrand, cfg.arity)?;
            let riesz = riesz_options(sampling, cfg.samples, cfg.seed)?;
            let mut config = to_value(&cfg);
            config["samples"] = json!(riesz.samples);
            config["seed"] = json!(riesz.seed);
            let report = build_kernel_monotonicity_counterexample(
                &psi,
                &cfg.kernel,
                &cfg.z1,
                &cfg.z2,
                cfg.eps,
                cfg.a,
                cfg.b,
                &riesz,
            )?;
            let radius = cfg
                .probe_radius
                .unwrap_or_else(|| 2.0 * norm(&cfg.z1).max(norm(&cfg.z2)).max(1.0));
            let probe = verify_kernel_radial_monotone(
                &cfg.kernel,
                cfg.z1.len(),
                cfg.pairs,
                riesz.seed,
                radius,
            )?;
            Ok(counterexample_outcome(
                which,
                config,
                Some(riesz.seed),
                &report,
                Some(("radial_monotone", to_value(&probe))),
            ))
        }
    }
}

fn stochastic(report: &CounterexampleReport) -> bool {
    report.lhs.method.is_stochastic() || report.rhs.method.is_stochastic()
}

fn norm(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum::<f64>().sqrt()
}
