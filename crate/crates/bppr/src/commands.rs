//! Subcommand implementations. Each returns a key=value report for stdout.

use std::path::PathBuf;
use std::time::Instant;

use bppr_core::dataset::{prepare_multivariate, FeatureSource, Features};
use bppr_core::diagnostics::{ale_one_way, coverage, effective_sample_size, rmse, split_rhat};
use bppr_core::multivariate::{predict_multivariate, Truncation};
use bppr_core::testbed::{simulate_samples, Sample, Scenario};
use bppr_core::{chain::predict_features, math, prepare_dataset, run_chain, Hyperparams, PosteriorChain, Prediction, Roles};
use clap::{Args, ValueEnum};

use crate::csvio::{self, OutColumn};
use crate::error::{CliError, Result};
use crate::modelfile::Model;
use crate::parallel::fit_multivariate_parallel;

/// Ordered `key=value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report(pub Vec<(String, String)>);

impl Report {
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.0.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn lines(&self) -> impl Iterator<Item = String> + '_ {
        self.0.iter().map(|(k, v)| format!("{k}={v}"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Training CSV with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Response column (univariate fits).
    #[arg(long)]
    pub response: Option<String>,
    /// Comma-separated categorical columns.
    #[arg(long, value_delimiter = ',')]
    pub categorical: Vec<String>,
    /// Output model file.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pub iters: usize,
    /// Burn-in iterations [default: 9000, or 90% of --iters when that is changed].
    #[arg(long)]
    pub burn: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub basis_size: Option<usize>,
    #[arg(long)]
    pub max_active: Option<usize>,
    #[arg(long)]
    pub p0: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long)]
    pub upsilon0: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Fit a vector response through a principal-component basis.
    #[arg(long, requires = "response_cols")]
    pub multivariate: bool,
    /// Comma-separated response columns (multivariate fits).
    #[arg(long, value_delimiter = ',')]
    pub response_cols: Vec<String>,
    /// Number of retained components.
    #[arg(long, conflicts_with = "var_threshold")]
    pub components: Option<usize>,
    /// Keep the fewest components explaining this fraction of variance.
    #[arg(long)]
    pub var_threshold: Option<f64>,
    /// Worker threads for multivariate fits [default: logical cores].
    #[arg(long, env = "BPPR_THREADS")]
    pub threads: Option<usize>,
}

impl FitArgs {
    fn hyperparams(&self, features: &Features) -> Hyperparams {
        let mut h = Hyperparams::defaults(features.n(), features.p_real(), features.p_dummy());
        h.n_mcmc = self.iters;
        h.n_burn = self.burn.unwrap_or(if self.iters == 10_000 { 9_000 } else { self.iters * 9 / 10 });
        h.seed = self.seed;
        macro_rules! over {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { h.$f = v; } )* };
        }
        over!(lambda, basis_size, max_active, p0, q, omega0, upsilon0, kappa);
        h
    }
}

pub fn fit(args: &FitArgs) -> Result<Report> {
    let table = csvio::read_table(&args.data, &args.categorical)?;
    let start = Instant::now();
    let mut report = Report::default();
    let model = if args.multivariate {
        if args.response.is_some() {
            return Err(CliError::input("use --response-cols, not --response, with --multivariate"));
        }
        let roles = Roles { response: args.response_cols.clone(), categorical: args.categorical.clone() };
        let (features, y) = prepare_multivariate(&table, &roles)?;
        let truncation = match (args.components, args.var_threshold) {
            (Some(k), _) => Truncation::Components(k),
            (None, Some(f)) => Truncation::VarianceFraction(f),
            (None, None) => return Err(CliError::input("multivariate fits need --components or --var-threshold")),
        };
        let hyper = args.hyperparams(&features);
        hyper.validate(features.p())?;
        let fit = fit_multivariate_parallel(&features, &y, &hyper, truncation, args.threads)?;
        Model::Multivariate { hyper, fit }
    } else {
        let response = args.response.as_deref().ok_or_else(|| CliError::input("--response is required"))?;
        if table.column(response).is_none() {
            return Err(CliError::input(format!("response column {response} not found")));
        }
        let data = prepare_dataset(&table, &Roles { response: vec![response.to_string()], categorical: args.categorical.clone() })?;
        let hyper = args.hyperparams(&data.features);
        Model::Univariate(run_chain(&data, &hyper)?)
    };
    let seconds = start.elapsed().as_secs_f64();
    model.save(&args.out)?;
    chain_report(&model, 5, &mut report);
    report.push("wall_seconds", format!("{seconds:.3}"));
    Ok(report)
}

fn chain_report(model: &Model, splits: usize, report: &mut Report) {
    let chains = model.chains();
    if let Model::Multivariate { fit, .. } = model {
        report.push("components", fit.basis.d_minus());
    }
    for (d, chain) in chains.iter().enumerate() {
        let prefix = if chains.len() > 1 { format!("component{d}.") } else { String::new() };
        for (k, v) in chain_summary(chain, splits).0 {
            report.push(format!("{prefix}{k}"), v);
        }
    }
}

/// Posterior summary of one chain's retained sigma draws and move counts.
pub fn chain_summary(chain: &PosteriorChain, splits: usize) -> Report {
    let mut r = Report::default();
    let sigma = chain.retained_sigma();
    let mut sorted = sigma.clone();
    math::sort_floats(&mut sorted);
    r.push("retained", sigma.len());
    r.push("sigma_mean", math::mean(&sigma));
    r.push("sigma_lower", math::quantile_sorted(&sorted, 0.025));
    r.push("sigma_upper", math::quantile_sorted(&sorted, 0.975));
    let max_m = chain.states.iter().map(|s| s.m()).max().unwrap_or(0);
    let mut hist = vec![0usize; max_m + 1];
    chain.states.iter().for_each(|s| hist[s.m()] += 1);
    let mode = (0..hist.len()).max_by_key(|&m| (hist[m], std::cmp::Reverse(m))).unwrap_or(0);
    let hist_text: Vec<String> = hist.iter().enumerate().filter(|(_, &c)| c > 0).map(|(m, c)| format!("{m}:{c}")).collect();
    r.push("m_hist", hist_text.join(","));
    r.push("m_mode", mode);
    let na = |v: bppr_core::Result<f64>| v.map_or_else(|_| "NA".to_string(), |x| x.to_string());
    r.push("ess_sigma", na(effective_sample_size(&sigma)));
    r.push("rhat_sigma", na(split_rhat(&sigma, splits)));
    let moves = &chain.traces.moves;
    for (name, c) in [("birth", moves.birth), ("death", moves.death), ("change", moves.change)] {
        r.push(format!("accept_{name}"), format!("{}/{}", c[1], c[0]));
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IntervalKind {
    /// Posterior mean only.
    Mean,
    /// Credible interval for the noiseless response.
    Credible,
    /// Prediction interval for a new noisy response.
    Predictive,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// CSV with the training feature columns.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, value_enum, default_value_t = IntervalKind::Predictive)]
    pub kind: IntervalKind,
    /// Seed for predictive noise draws.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

fn load_features(model: &Model, path: &std::path::Path) -> Result<Features> {
    let text: Vec<String> = model.standardization().categoricals.iter().map(|c| c.column.clone()).collect();
    let table = csvio::read_table(path, &text)?;
    model.standardization().apply(&table).map_err(CliError::from_core_against_model)
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(CliError::input(format!("--level must lie in (0, 1), got {level}")))
    }
}

type Band = Option<(Vec<f64>, Vec<f64>)>;

fn summarize(p: &Prediction, kind: IntervalKind, level: f64, seed: u64) -> (Vec<f64>, Band) {
    let mean = p.mean();
    let band = match kind {
        IntervalKind::Mean => None,
        IntervalKind::Credible => Some(p.credible(level)),
        IntervalKind::Predictive => Some(p.predictive(level, seed)),
    };
    (mean, band)
}

/// Writes `row,mean[,lower,upper]`; multivariate models write one block per
/// output dimension with an extra `dim` column.
pub fn predict(args: &PredictArgs) -> Result<Report> {
    check_level(args.level)?;
    let model = Model::load(&args.model)?;
    let features = load_features(&model, &args.data)?;
    let n = features.n();
    let mut report = Report::default();
    report.push("rows", n);
    match &model {
        Model::Univariate(chain) => {
            let p = predict_features(chain, &features).map_err(CliError::from_core_against_model)?;
            let (mean, band) = summarize(&p, args.kind, args.level, args.seed);
            let rows: Vec<usize> = (0..n).collect();
            match &band {
                None => csvio::write_columns(&args.out, &["row", "mean"], &[OutColumn::Index(&rows), OutColumn::Float(&mean)])?,
                Some((lo, hi)) => csvio::write_columns(
                    &args.out,
                    &["row", "mean", "lower", "upper"],
                    &[OutColumn::Index(&rows), OutColumn::Float(&mean), OutColumn::Float(lo), OutColumn::Float(hi)],
                )?,
            }
            report.push("draws", p.n_draws());
        }
        Model::Multivariate { fit, .. } => {
            let mp = predict_multivariate(fit, &features).map_err(CliError::from_core_against_model)?;
            let dims = fit.basis.output_dim();
            let (mut rows, mut dim, mut mean, mut lower, mut upper) = (vec![], vec![], vec![], vec![], vec![]);
            for k in 0..dims {
                // Distinct noise streams per output dimension.
                let seed = args.seed.wrapping_add(k as u64);
                let (m, band) = summarize(&mp.output(k), args.kind, args.level, seed);
                rows.extend(0..n);
                dim.extend(std::iter::repeat_n(k, n));
                mean.extend(m);
                if let Some((lo, hi)) = band {
                    lower.extend(lo);
                    upper.extend(hi);
                }
            }
            if args.kind == IntervalKind::Mean {
                csvio::write_columns(
                    &args.out,
                    &["row", "dim", "mean"],
                    &[OutColumn::Index(&rows), OutColumn::Index(&dim), OutColumn::Float(&mean)],
                )?;
            } else {
                csvio::write_columns(
                    &args.out,
                    &["row", "dim", "mean", "lower", "upper"],
                    &[
                        OutColumn::Index(&rows),
                        OutColumn::Index(&dim),
                        OutColumn::Float(&mean),
                        OutColumn::Float(&lower),
                        OutColumn::Float(&upper),
                    ],
                )?;
            }
            report.push("outputs", dims);
            report.push("draws", mp.components[0].n_draws());
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Args)]
pub struct DiagnoseArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Sub-chains for split R-hat.
    #[arg(long, default_value_t = 5)]
    pub splits: usize,
    /// Optional CSV of the whole-run traces: component,iteration,sigma,m,tau,retained.
    #[arg(long)]
    pub traces: Option<PathBuf>,
}

pub fn diagnose(args: &DiagnoseArgs) -> Result<Report> {
    let model = Model::load(&args.model)?;
    let mut report = Report::default();
    chain_report(&model, args.splits, &mut report);
    if let Some(path) = &args.traces {
        let (mut comp, mut iter, mut sigma, mut m, mut tau, mut kept) = (vec![], vec![], vec![], vec![], vec![], vec![]);
        for (d, chain) in model.chains().iter().enumerate() {
            let t = &chain.traces;
            for i in 0..t.sigma.len() {
                comp.push(d);
                iter.push(i);
                sigma.push(t.sigma[i]);
                m.push(t.m[i]);
                tau.push(t.tau[i]);
                kept.push(usize::from(i >= chain.hyper.n_burn));
            }
        }
        csvio::write_columns(
            path,
            &["component", "iteration", "sigma", "m", "tau", "retained"],
            &[
                OutColumn::Index(&comp),
                OutColumn::Index(&iter),
                OutColumn::Float(&sigma),
                OutColumn::Index(&m),
                OutColumn::Float(&tau),
                OutColumn::Index(&kept),
            ],
        )?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Args)]
pub struct AleArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Data defining the bins and the rows to average over (usually the training data).
    #[arg(long)]
    pub data: PathBuf,
    /// Real-valued feature column.
    #[arg(long)]
    pub feature: String,
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Principal component whose chain is summarized (multivariate models).
    #[arg(long, default_value_t = 0)]
    pub component: usize,
    /// Output CSV: center,lower_edge,upper_edge,count,mean,lower,upper.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn ale(args: &AleArgs) -> Result<Report> {
    check_level(args.level)?;
    let model = Model::load(&args.model)?;
    let chains = model.chains();
    let chain = chains
        .get(args.component)
        .ok_or_else(|| CliError::input(format!("component {} out of range (model has {})", args.component, chains.len())))?;
    let features = load_features(&model, &args.data)?;
    let std = model.standardization();
    let j = std
        .features
        .iter()
        .position(|f| f.name == args.feature)
        .ok_or_else(|| CliError::input(format!("feature {} not found in the model", args.feature)))?;
    if !matches!(std.features[j].source, FeatureSource::Numeric { .. }) {
        return Err(CliError::input(format!("feature {} is a dummy; ALE needs a real-valued feature", args.feature)));
    }
    let curve = ale_one_way(chain, &features, j, args.bins, args.level)?;
    let lo_edge = &curve.edges[..curve.edges.len() - 1];
    let hi_edge = &curve.edges[1..];
    csvio::write_columns(
        &args.out,
        &["center", "lower_edge", "upper_edge", "count", "mean", "lower", "upper"],
        &[
            OutColumn::Float(&curve.centers),
            OutColumn::Float(lo_edge),
            OutColumn::Float(hi_edge),
            OutColumn::Index(&curve.counts),
            OutColumn::Float(&curve.mean),
            OutColumn::Float(&curve.lower),
            OutColumn::Float(&curve.upper),
        ],
    )?;
    let mut report = Report::default();
    report.push("feature", &args.feature);
    report.push("bins", curve.centers.len());
    report.push("draws", curve.draws.len());
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    Friedman,
    Noise,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub scenario: ScenarioArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2000)]
    pub n_test: usize,
    /// Training CSV: x1..xp,y.
    #[arg(long)]
    pub out: PathBuf,
    /// Test CSV: x1..xp,y,f where f is the noiseless response.
    #[arg(long)]
    pub test_out: Option<PathBuf>,
}

fn write_sample(path: &std::path::Path, s: &Sample, with_truth: bool) -> Result<()> {
    let names: Vec<String> = (1..=s.p).map(|j| format!("x{j}")).collect();
    let cols: Vec<Vec<f64>> = (0..s.p).map(|j| s.x.iter().map(|r| r[j]).collect()).collect();
    let mut header: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut out: Vec<OutColumn<'_>> = cols.iter().map(|c| OutColumn::Float(c)).collect();
    header.push("y");
    out.push(OutColumn::Float(&s.y));
    if with_truth {
        header.push("f");
        out.push(OutColumn::Float(&s.truth));
    }
    csvio::write_columns(path, &header, &out)
}

pub fn simulate(args: &SimulateArgs) -> Result<Report> {
    if args.sigma.is_nan() || args.sigma < 0.0 {
        return Err(CliError::input("--sigma must be nonnegative"));
    }
    let scenario = match args.scenario {
        ScenarioArg::Friedman => Scenario::Friedman,
        ScenarioArg::Noise => Scenario::Noise,
    };
    let n_test = if args.test_out.is_some() { args.n_test } else { 0 };
    let (train, test) = simulate_samples(scenario, args.n, args.p, args.sigma, args.seed, n_test)?;
    write_sample(&args.out, &train, false)?;
    if let Some(path) = &args.test_out {
        write_sample(path, &test, true)?;
    }
    let mut report = Report::default();
    report.push("train_rows", train.len());
    report.push("test_rows", test.len());
    Ok(report)
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    /// Predictions CSV from `predict` (mean, and optionally lower/upper).
    #[arg(long)]
    pub predictions: PathBuf,
    /// CSV holding the truth, row-aligned with the predictions.
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long, default_value = "y")]
    pub truth_column: String,
}

pub fn score(args: &ScoreArgs) -> Result<Report> {
    let pred = csvio::read_table(&args.predictions, &[])?;
    let truth_table = csvio::read_table(&args.truth, &[])?;
    if pred.column("dim").is_some() {
        return Err(CliError::input("score expects univariate predictions (no dim column)"));
    }
    let mean = csvio::numeric_column(&pred, "mean")?;
    let truth = csvio::numeric_column(&truth_table, &args.truth_column)?;
    if mean.len() != truth.len() {
        return Err(CliError::input(format!("{} predictions but {} truth rows", mean.len(), truth.len())));
    }
    if mean.is_empty() {
        return Err(CliError::input("no rows to score"));
    }
    let mut report = Report::default();
    report.push("n", mean.len());
    report.push("rmse", rmse(&mean, &truth));
    if pred.column("lower").is_some() && pred.column("upper").is_some() {
        let lo = csvio::numeric_column(&pred, "lower")?;
        let hi = csvio::numeric_column(&pred, "upper")?;
        report.push("coverage", coverage(&lo, &hi, &truth));
    }
    Ok(report)
}
