//! `jackmoment` command-line front end. Every invocation prints one JSON
//! object on standard output; bulk data goes to CSV files via `--out`.

mod record;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use jackmoment::asymptotics::{
    bk_delta, circular_exponent, group_exponent_with, jacobi_exponent_with, AsymptoticForm, Convention,
};
use jackmoment::fit::{fit_divergence, log_spaced_grid, Evaluator, FitModel, FitReport, MomentFamily};
use jackmoment::integrate::mcmc::{mc_moment, mcmc_sample, ChainConfig};
use jackmoment::integrate::quadrature::quadrature_auto;
use jackmoment::rmt::{
    circular_moment, circular_reflect, group_moment, group_reduction, jacobi_moment, EnsembleSpec, GroupFamily,
    MomentQuery,
};
use jackmoment::szego::circular_limit;
use jackmoment::toeplitz::circular_moment_toeplitz;
use jackmoment::verify::{run_suite, Suite, VerifyOptions};
use jackmoment::{hyp2f1_equal_with, Hyp2F1Params, Param, SeriesConfig, SeriesResult};

use record::{Failure, Record};

#[derive(Parser, Debug)]
#[command(name = "jackmoment", version, about = "Characteristic-polynomial moments via Jack hypergeometric series")]
struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "JACKMOMENT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate ₂F₁^(α)(a, b; c; t·1^N).
    Hyp(HypArgs),
    /// Moment of |characteristic polynomial|^{2μ}.
    Moment {
        #[command(subcommand)]
        ensemble: MomentCmd,
    },
    /// Predicted divergence exponent.
    Exponent {
        #[command(subcommand)]
        which: ExponentCmd,
    },
    /// Fit the divergence exponent on an ε-sweep.
    Fit(FitArgs),
    /// Large-N limit of the circular moment.
    Limit(LimitArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Dump Metropolis samples as CSV.
    Sample(SampleArgs),
}

#[derive(Args, Debug)]
struct HypArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: Param,
    #[arg(long, allow_hyphen_values = true)]
    b: Param,
    #[arg(long, allow_hyphen_values = true)]
    c: Param,
    #[arg(long)]
    alpha: Param,
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true)]
    t: Param,
    #[arg(long, default_value_t = 1e-12)]
    rtol: f64,
    #[arg(long)]
    max_weight: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Series,
    Toeplitz,
    Quadrature,
    Mc,
}

#[derive(Args, Debug, Clone)]
struct MethodArgs {
    #[arg(long, value_enum, default_value = "series")]
    method: Method,
    #[arg(long, default_value_t = 1e-12)]
    rtol: f64,
    /// Seed for `--method mc`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Samples for `--method mc`.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
}

#[derive(Subcommand, Debug)]
enum MomentCmd {
    Circular {
        #[arg(long)]
        beta: Param,
        #[arg(long, allow_hyphen_values = true)]
        mu: Param,
        #[arg(long, required_unless_present = "eps")]
        absz: Option<Param>,
        /// Distance 1 − |z| from the unit circle, instead of --absz.
        #[arg(long, conflicts_with = "absz")]
        eps: Option<Param>,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        m: MethodArgs,
    },
    Jacobi {
        #[arg(long, allow_hyphen_values = true)]
        a: Param,
        #[arg(long, allow_hyphen_values = true)]
        b: Param,
        #[arg(long)]
        beta: Param,
        #[arg(long, allow_hyphen_values = true)]
        mu: Param,
        #[arg(long, allow_hyphen_values = true)]
        x: Param,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        m: MethodArgs,
    },
    Group {
        #[arg(long)]
        family: GroupFamily,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        mu: Param,
        #[arg(long)]
        eps: Param,
        #[command(flatten)]
        m: MethodArgs,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConventionArg {
    Printed,
    Exact,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Printed => Convention::Printed,
            ConventionArg::Exact => Convention::Exact,
        }
    }
}

#[derive(Subcommand, Debug)]
enum ExponentCmd {
    Circular {
        #[arg(long)]
        beta: Param,
        #[arg(long, allow_hyphen_values = true)]
        mu: Param,
        #[arg(long)]
        n: usize,
    },
    Jacobi {
        #[arg(long, allow_hyphen_values = true)]
        b: Param,
        #[arg(long)]
        beta: Param,
        #[arg(long, allow_hyphen_values = true)]
        mu: Param,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "printed")]
        convention: ConventionArg,
    },
    Group {
        #[arg(long)]
        family: GroupFamily,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        mu: Param,
        #[arg(long, value_enum, default_value = "printed")]
        convention: ConventionArg,
    },
    Bk {
        #[arg(long)]
        k: Param,
        #[arg(long)]
        beta: Param,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FitKind {
    Circular,
    Jacobi,
    Group,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EvaluatorArg {
    Auto,
    Series,
    Toeplitz,
}

impl From<EvaluatorArg> for Evaluator {
    fn from(e: EvaluatorArg) -> Self {
        match e {
            EvaluatorArg::Auto => Evaluator::Auto,
            EvaluatorArg::Series => Evaluator::Series,
            EvaluatorArg::Toeplitz => Evaluator::Toeplitz,
        }
    }
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(value_enum)]
    kind: FitKind,
    #[arg(long, allow_hyphen_values = true)]
    mu: Param,
    #[arg(long)]
    n: usize,
    /// β (circular and Jacobi).
    #[arg(long)]
    beta: Option<Param>,
    /// Jacobi weight exponents.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<Param>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<Param>,
    #[arg(long)]
    family: Option<GroupFamily>,
    #[arg(long, default_value = "0.01")]
    eps_max: f64,
    #[arg(long, default_value = "0.001")]
    eps_min: f64,
    #[arg(long, default_value_t = 10)]
    points: usize,
    #[arg(long, value_enum, default_value = "auto")]
    evaluator: EvaluatorArg,
    /// Exponent reading used for the prediction (Jacobi and group).
    #[arg(long, value_enum, default_value = "exact")]
    convention: ConventionArg,
    #[arg(long, default_value_t = 1e-12)]
    rtol: f64,
    /// Per-ε CSV output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LimitArgs {
    #[arg(long)]
    beta: Param,
    #[arg(long, allow_hyphen_values = true)]
    mu: Param,
    #[arg(long)]
    absz: Param,
    /// Also evaluate the finite-N moment and the gap.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1e-12)]
    rtol: f64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum, default_value = "all")]
    suite: SuiteArg,
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = VerifyOptions::default().mc_samples)]
    mc_samples: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Jack,
    Binomial,
    Quadrature,
    Mc,
    Exponents,
    Fit,
    Limit,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Jack => Suite::Jack,
            SuiteArg::Binomial => Suite::Binomial,
            SuiteArg::Quadrature => Suite::Quadrature,
            SuiteArg::Mc => Suite::Mc,
            SuiteArg::Exponents => Suite::Exponents,
            SuiteArg::Fit => Suite::Fit,
            SuiteArg::Limit => Suite::Limit,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(value_enum)]
    kind: SampleKind,
    #[arg(long)]
    beta: Param,
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    a: Param,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    b: Param,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 2_000)]
    burn_in: usize,
    #[arg(long, default_value_t = 1)]
    thinning: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SampleKind {
    Circular,
    Jacobi,
}

type CmdResult = std::result::Result<Record, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    let mut rec = Record::new();
    let outcome = match cli.command {
        Command::Hyp(a) => cmd_hyp(&mut rec, a),
        Command::Moment { ensemble } => cmd_moment(&mut rec, ensemble),
        Command::Exponent { which } => cmd_exponent(&mut rec, which),
        Command::Fit(a) => cmd_fit(&mut rec, a),
        Command::Limit(a) => cmd_limit(&mut rec, a),
        Command::Verify(a) => cmd_verify(&mut rec, a),
        Command::Sample(a) => cmd_sample(&mut rec, a),
    };
    match outcome {
        Ok(r) => r.emit(),
        Err(f) => f.emit(rec),
    }
}

fn series_meta(r: &SeriesResult) -> Value {
    json!({
        "converged": r.converged,
        "trunc_weight": r.trunc_weight,
        "tail_estimate": r.tail_estimate,
        "terms_summed": r.terms_summed,
    })
}

fn finish_series(mut rec: Record, r: &SeriesResult, extra: Value) -> CmdResult {
    let mut result = json!({ "value": r.value });
    if let (Value::Object(m), Value::Object(e)) = (&mut result, extra) {
        m.extend(e);
    }
    rec.result = result;
    rec.convergence = Some(series_meta(r));
    if r.converged {
        Ok(rec)
    } else {
        Err(Failure::non_convergence(rec, "series did not converge within its budget"))
    }
}

fn cmd_hyp(rec: &mut Record, a: HypArgs) -> CmdResult {
    rec.input("a", &a.a).input("b", &a.b).input("c", &a.c).input("alpha", &a.alpha);
    rec.input_raw("n", json!(a.n)).input("t", &a.t).input_raw("rtol", json!(a.rtol));
    let p = Hyp2F1Params {
        a: a.a.to_f64(),
        b: a.b.to_f64(),
        c: a.c.to_f64(),
        alpha: a.alpha.to_f64(),
        n: a.n,
        t: a.t.to_f64(),
    };
    let mut cfg = SeriesConfig::new(a.rtol);
    if let Some(w) = a.max_weight {
        rec.input_raw("max_weight", json!(w));
        cfg = cfg.with_max_weight(w);
    }
    let r = hyp2f1_equal_with(&p, &cfg).map_err(Failure::from)?;
    finish_series(rec.clone(), &r, json!({}))
}

fn mc_config(m: &MethodArgs) -> ChainConfig {
    ChainConfig {
        n_samples: (m.samples / 4).max(2),
        chains: 4,
        seed: m.seed,
        ..ChainConfig::default()
    }
}

fn run_oracle(rec: &mut Record, q: &MomentQuery, m: &MethodArgs) -> CmdResult {
    match m.method {
        Method::Quadrature => {
            let r = quadrature_auto(q).map_err(Failure::from)?;
            rec.result = json!({ "value": r.value });
            rec.convergence = Some(json!({
                "converged": true,
                "nodes_per_dim": r.nodes_per_dim,
                "previous": r.previous,
                "rel_change": r.rel_change,
            }));
            Ok(rec.clone())
        }
        Method::Mc => {
            let s = mc_moment(q, &mc_config(m)).map_err(Failure::from)?;
            rec.seed = Some(m.seed);
            rec.warnings.extend(s.warnings.iter().cloned());
            rec.result = json!({ "value": s.estimate, "std_error": s.std_error });
            rec.convergence = Some(serde_json::to_value(&s).unwrap_or(Value::Null));
            Ok(rec.clone())
        }
        _ => Err(Failure::invalid(rec.clone(), "method not available for this ensemble")),
    }
}

fn method_inputs(rec: &mut Record, m: &MethodArgs) {
    let name = format!("{:?}", m.method).to_lowercase();
    rec.input_raw("method", json!(name)).input_raw("rtol", json!(m.rtol));
    if let Method::Mc = m.method {
        rec.input_raw("samples", json!(m.samples));
    }
}

fn cmd_moment(rec: &mut Record, cmd: MomentCmd) -> CmdResult {
    match cmd {
        MomentCmd::Circular { beta, mu, absz, eps, n, m } => {
            rec.input("beta", &beta).input("mu", &mu).input_raw("n", json!(n));
            let absz = match (absz, eps) {
                (Some(r), _) => r,
                (None, Some(e)) => {
                    rec.input("eps", &e);
                    Param::int(1) - e
                }
                (None, None) => return Err(Failure::invalid(rec.clone(), "one of --absz or --eps is required")),
            };
            rec.input("absz", &absz);
            method_inputs(rec, &m);
            let q = MomentQuery::circular(beta.to_f64(), n, mu.to_f64(), absz.to_f64());
            q.validate().map_err(Failure::from)?;
            match m.method {
                Method::Series => {
                    if q.point > 1.0 {
                        let (pref, inner) = circular_reflect(&q).map_err(Failure::from)?;
                        let r = circular_moment(&inner, m.rtol).map_err(Failure::from)?;
                        let scaled = r.clone().scaled(pref);
                        finish_series(
                            rec.clone(),
                            &scaled,
                            json!({ "reflected": true, "prefactor": pref, "inner_value": r.value }),
                        )
                    } else {
                        let r = circular_moment(&q, m.rtol).map_err(Failure::from)?;
                        finish_series(rec.clone(), &r, json!({ "reflected": false }))
                    }
                }
                Method::Toeplitz => {
                    if q.ensemble.beta() != 2.0 {
                        return Err(Failure::invalid(rec.clone(), "the Toeplitz method needs beta = 2"));
                    }
                    let v = circular_moment_toeplitz(q.mu, q.point, n).map_err(Failure::from)?;
                    rec.result = json!({ "value": v });
                    rec.convergence = Some(json!({ "converged": v.is_finite(), "determinant_order": n }));
                    Ok(rec.clone())
                }
                _ => run_oracle(rec, &q, &m),
            }
        }
        MomentCmd::Jacobi { a, b, beta, mu, x, n, m } => {
            rec.input("a", &a).input("b", &b).input("beta", &beta).input("mu", &mu).input("x", &x);
            rec.input_raw("n", json!(n));
            method_inputs(rec, &m);
            let q = MomentQuery::jacobi(a.to_f64(), b.to_f64(), beta.to_f64(), n, mu.to_f64(), x.to_f64());
            q.validate().map_err(Failure::from)?;
            match m.method {
                Method::Series => {
                    let r = jacobi_moment(&q, m.rtol).map_err(Failure::from)?;
                    finish_series(rec.clone(), &r, json!({}))
                }
                Method::Toeplitz => Err(Failure::invalid(rec.clone(), "the Toeplitz method is circular only")),
                _ => run_oracle(rec, &q, &m),
            }
        }
        MomentCmd::Group { family, n, mu, eps, m } => {
            rec.input_raw("family", json!(family.name())).input_raw("n", json!(n));
            rec.input("mu", &mu).input("eps", &eps);
            method_inputs(rec, &m);
            let (muf, epsf) = (mu.to_f64(), eps.to_f64());
            match m.method {
                Method::Series => {
                    let red = group_reduction(family, n, muf, epsf).map_err(Failure::from)?;
                    let r = group_moment(family, n, muf, epsf, m.rtol).map_err(Failure::from)?;
                    finish_series(
                        rec.clone(),
                        &r,
                        json!({ "x_tilde": red.x_tilde, "prefactor": red.prefactor }),
                    )
                }
                Method::Quadrature => run_oracle(rec, &MomentQuery::group(family, n, muf, epsf), &m),
                _ => Err(Failure::invalid(rec.clone(), "group moments support the series and quadrature methods")),
            }
        }
    }
}

fn lattice_warning(rec: &mut Record, params: &[(&str, &Param)]) {
    for (name, p) in params {
        if !p.is_exact() {
            rec.warnings.push(format!(
                "{name} = {p} is a decimal; lattice (log-case) detection uses tolerance 1e-12, pass p/q for an exact decision"
            ));
        }
    }
}

fn form_json(f: &AsymptoticForm) -> Value {
    json!({
        "regime": f.regime,
        "case": f.case,
        "j": f.j,
        "delta": f.delta,
        "log_flag": f.log_flag,
        "gamma": f.gamma,
    })
}

fn cmd_exponent(rec: &mut Record, which: ExponentCmd) -> CmdResult {
    let form = match which {
        ExponentCmd::Circular { beta, mu, n } => {
            rec.input("beta", &beta).input("mu", &mu).input_raw("n", json!(n));
            lattice_warning(rec, &[("beta", &beta), ("mu", &mu)]);
            circular_exponent(&mu, &beta, n)
        }
        ExponentCmd::Jacobi { b, beta, mu, n, convention } => {
            rec.input("b", &b).input("beta", &beta).input("mu", &mu).input_raw("n", json!(n));
            rec.input_raw("convention", json!(Convention::from(convention)));
            lattice_warning(rec, &[("b", &b), ("beta", &beta), ("mu", &mu)]);
            jacobi_exponent_with(&mu, &b, &beta, n, convention.into())
        }
        ExponentCmd::Group { family, n, mu, convention } => {
            rec.input_raw("family", json!(family.name())).input_raw("n", json!(n)).input("mu", &mu);
            rec.input_raw("convention", json!(Convention::from(convention)));
            lattice_warning(rec, &[("mu", &mu)]);
            group_exponent_with(family, n, &mu, convention.into())
        }
        ExponentCmd::Bk { k, beta } => {
            rec.input("k", &k).input("beta", &beta);
            let d = bk_delta(k.to_f64(), beta.to_f64()).map_err(Failure::from)?;
            rec.result = json!({ "delta": d });
            return Ok(rec.clone());
        }
    };
    let form = form.map_err(Failure::from)?;
    rec.result = form_json(&form);
    Ok(rec.clone())
}

fn need<T: Clone>(rec: &Record, v: &Option<T>, flag: &str) -> std::result::Result<T, Failure> {
    v.clone()
        .ok_or_else(|| Failure::invalid(rec.clone(), &format!("--{flag} is required for this fit")))
}

fn write_fit_csv(path: &PathBuf, rep: &FitReport) -> std::result::Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| e.to_string())?;
    let log = rep.model == FitModel::Log;
    let mut header = vec!["eps", "value", "trunc_weight", "converged"];
    if log {
        header.push("log_coeff");
    }
    w.write_record(&header).map_err(|e| e.to_string())?;
    for p in &rep.points {
        let mut row = vec![
            p.eps.to_string(),
            p.value.to_string(),
            p.trunc_weight.to_string(),
            p.converged.to_string(),
        ];
        if log {
            row.push(rep.fitted_log_coeff.to_string());
        }
        w.write_record(&row).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())
}

fn cmd_fit(rec: &mut Record, a: FitArgs) -> CmdResult {
    rec.input_raw("kind", json!(format!("{:?}", a.kind).to_lowercase()));
    rec.input("mu", &a.mu).input_raw("n", json!(a.n));
    rec.input_raw("eps_max", json!(a.eps_max)).input_raw("eps_min", json!(a.eps_min));
    rec.input_raw("points", json!(a.points)).input_raw("rtol", json!(a.rtol));
    rec.input_raw("evaluator", json!(Evaluator::from(a.evaluator)));
    let conv: Convention = a.convention.into();
    let (family, predicted) = match a.kind {
        FitKind::Circular => {
            let beta = need(rec, &a.beta, "beta")?;
            rec.input("beta", &beta);
            let fam = MomentFamily::Circular {
                beta: beta.to_f64(),
                n: a.n,
                mu: a.mu.to_f64(),
            };
            (fam, circular_exponent(&a.mu, &beta, a.n))
        }
        FitKind::Jacobi => {
            let beta = need(rec, &a.beta, "beta")?;
            let (ja, jb) = (need(rec, &a.a, "a")?, need(rec, &a.b, "b")?);
            rec.input("beta", &beta).input("a", &ja).input("b", &jb);
            rec.input_raw("convention", json!(conv));
            let fam = MomentFamily::Jacobi {
                a: ja.to_f64(),
                b: jb.to_f64(),
                beta: beta.to_f64(),
                n: a.n,
                mu: a.mu.to_f64(),
            };
            (fam, jacobi_exponent_with(&a.mu, &jb, &beta, a.n, conv))
        }
        FitKind::Group => {
            let family = need(rec, &a.family, "family")?;
            rec.input_raw("family", json!(family.name()));
            rec.input_raw("convention", json!(conv));
            let fam = MomentFamily::Group {
                family,
                n: a.n,
                mu: a.mu.to_f64(),
            };
            (fam, group_exponent_with(family, a.n, &a.mu, conv))
        }
    };
    let predicted = predicted.map_err(Failure::from)?;
    let grid = log_spaced_grid(a.eps_max, a.eps_min, a.points).map_err(Failure::from)?;
    let rep = fit_divergence(&family, &grid, &predicted, a.rtol, a.evaluator.into()).map_err(Failure::from)?;
    if let Some(path) = &a.out {
        rec.input_raw("out", json!(path.display().to_string()));
        write_fit_csv(path, &rep).map_err(|e| Failure::invalid(rec.clone(), &format!("cannot write CSV: {e}")))?;
    }
    let unconverged = rep.points.iter().filter(|p| !p.converged).count();
    rec.result = json!({
        "fitted_delta": rep.fitted_delta,
        "fitted_log_coeff": rep.fitted_log_coeff,
        "intercept": rep.intercept,
        "model": rep.model,
        "evaluator": rep.evaluator,
        "predicted": form_json(&rep.predicted),
        "epsilons": rep.epsilons,
        "residual_rms": rep.residual_rms,
    });
    rec.convergence = Some(json!({
        "all_converged": rep.all_converged,
        "unconverged_points": unconverged,
    }));
    Ok(rec.clone())
}

fn cmd_limit(rec: &mut Record, a: LimitArgs) -> CmdResult {
    rec.input("beta", &a.beta).input("mu", &a.mu).input("absz", &a.absz);
    let (beta, mu, r) = (a.beta.to_f64(), a.mu.to_f64(), a.absz.to_f64());
    let lim = circular_limit(beta, mu, r).map_err(Failure::from)?;
    rec.result = json!({ "limit": lim });
    if let Some(n) = a.n {
        rec.input_raw("n", json!(n)).input_raw("rtol", json!(a.rtol));
        let s = circular_moment(&MomentQuery::circular(beta, n, mu, r), a.rtol).map_err(Failure::from)?;
        let gap = (s.value - lim).abs() / lim.abs();
        if let Value::Object(m) = &mut rec.result {
            m.insert("finite_n".into(), json!(s.value));
            m.insert("gap".into(), json!(gap));
        }
        rec.convergence = Some(series_meta(&s));
        if !s.converged {
            return Err(Failure::non_convergence(rec.clone(), "finite-N series did not converge"));
        }
    }
    Ok(rec.clone())
}

fn cmd_verify(rec: &mut Record, a: VerifyArgs) -> CmdResult {
    let suite: Suite = a.suite.into();
    rec.input_raw("suite", json!(suite.name())).input_raw("mc_samples", json!(a.mc_samples));
    rec.seed = Some(a.seed);
    let opts = VerifyOptions {
        seed: a.seed,
        mc_samples: a.mc_samples,
    };
    let checks = run_suite(suite, &opts);
    for c in &checks {
        eprintln!(
            "{} {}: measured {:.3e}, tolerance {:.1e} ({})",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.measured,
            c.tolerance,
            c.detail
        );
    }
    let passed = checks.iter().all(|c| c.passed);
    rec.result = json!({ "passed": passed, "checks": checks });
    if passed {
        Ok(rec.clone())
    } else {
        Err(Failure::verification(rec.clone()))
    }
}

fn cmd_sample(rec: &mut Record, a: SampleArgs) -> CmdResult {
    rec.input_raw("kind", json!(format!("{:?}", a.kind).to_lowercase()));
    rec.input("beta", &a.beta).input_raw("n", json!(a.n));
    let ens = match a.kind {
        SampleKind::Circular => EnsembleSpec::Circular {
            beta: a.beta.to_f64(),
            n: a.n,
        },
        SampleKind::Jacobi => {
            rec.input("a", &a.a).input("b", &a.b);
            EnsembleSpec::Jacobi {
                a: a.a.to_f64(),
                b: a.b.to_f64(),
                beta: a.beta.to_f64(),
                n: a.n,
            }
        }
    };
    rec.input_raw("samples", json!(a.samples)).input_raw("burn_in", json!(a.burn_in));
    rec.input_raw("thinning", json!(a.thinning)).input_raw("out", json!(a.out.display().to_string()));
    rec.seed = Some(a.seed);
    let cfg = ChainConfig {
        n_samples: a.samples,
        burn_in: a.burn_in,
        thinning: a.thinning,
        seed: a.seed,
        ..ChainConfig::default()
    };
    let (rows, rate) = mcmc_sample(&ens, &cfg).map_err(Failure::from)?;
    let write = || -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_path(&a.out)?;
        w.write_record((0..a.n).map(|l| format!("x{l}")))?;
        for r in &rows {
            w.write_record(r.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    };
    write().map_err(|e| Failure::invalid(rec.clone(), &format!("cannot write CSV: {e}")))?;
    rec.result = json!({ "rows": rows.len(), "acceptance_rate": rate });
    Ok(rec.clone())
}
