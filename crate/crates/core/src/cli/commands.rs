use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::baselines::CvRule;
use crate::bench::{expand_grid, generate_dataset, run_benchmark, write_csv, BenchRow, Method, Scenario, SimConfig};
use crate::cli::config::resolve;
use crate::cli::{CliError, Output};
use crate::factor::{center_columns, covariance_eigenvalues, estimate_k, pca_decompose, FactorDecomposition};
use crate::forecast::{
    ingest_csv, rolling_forecast, synthetic_panel, ForecastMethod, ImputePolicy, IngestOptions, KPolicy, PanelData,
    RollingConfig, SyntheticPanelConfig,
};
use crate::gibbs::{run_chain, ChainConfig, PriorConfig};
use crate::linalg::Matrix;
use crate::rng::RngStream;

/// Copies every flag that was given over the resolved settings.
macro_rules! overlay {
    ($settings:ident, $args:ident; $($field:ident),* $(,)?) => {
        $(if let Some(v) = $args.$field { $settings.$field = v; })*
    };
}

fn json_err(e: impl std::fmt::Display) -> CliError {
    CliError::runtime(e.to_string())
}

fn ingest(path: &Path, responses: Vec<String>, date_column: Option<String>, impute: ImputePolicy) -> Result<PanelData<f64>, CliError> {
    let opts = IngestOptions {
        responses,
        date_column,
        impute,
        min_rows: 3,
    };
    Ok(ingest_csv(path, &opts)?)
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub scenario: Option<Scenario>,
    /// Methods to compare; all see the same datasets.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub method: Option<Vec<Method>>,
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<usize>>,
    /// Sparsity of the idiosyncratic coefficients.
    #[arg(long, value_delimiter = ',')]
    pub s: Option<Vec<usize>>,
    /// Factors in the generator.
    #[arg(long)]
    pub k: Option<usize>,
    /// Factors fitted by the factor-adjusted methods.
    #[arg(long, value_delimiter = ',')]
    pub khat: Option<Vec<usize>>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub s0: Option<f64>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Penalty choice for the lasso methods.
    #[arg(long, value_enum)]
    pub cv_rule: Option<CvRule>,
    /// Also write the first replicate's dataset of the first setting as CSV.
    #[arg(long)]
    pub write_data: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimulateSettings {
    pub scenario: Scenario,
    pub method: Vec<Method>,
    pub n: Vec<usize>,
    pub p: Vec<usize>,
    pub s: Vec<usize>,
    pub k: usize,
    pub khat: Vec<usize>,
    pub replicates: usize,
    pub s0: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub cv_rule: CvRule,
    pub write_data: Option<PathBuf>,
}

impl Default for SimulateSettings {
    fn default() -> Self {
        let base = SimConfig::default();
        Self {
            scenario: base.scenario,
            method: vec![base.method],
            n: vec![base.n],
            p: vec![base.p],
            s: vec![base.s],
            k: base.k,
            khat: vec![base.khat_used],
            replicates: base.replicates,
            s0: base.s0,
            iterations: base.iterations,
            burn_in: base.burn_in,
            cv_rule: base.cv_rule,
            write_data: None,
        }
    }
}

impl SimulateSettings {
    pub fn configs(&self) -> Vec<SimConfig> {
        let mut out = Vec::new();
        for &method in &self.method {
            let mut base = SimConfig {
                scenario: self.scenario,
                method,
                k: self.k,
                replicates: self.replicates,
                s0: self.s0,
                iterations: self.iterations,
                burn_in: self.burn_in,
                cv_rule: self.cv_rule,
                ..SimConfig::default()
            };
            base.resize();
            out.extend(expand_grid(&base, &self.n, &self.p, &self.s, &self.khat));
        }
        out
    }
}

pub(crate) fn simulate(a: SimulateArgs, file: Option<Map<String, Value>>, seed: u64, mut out: Output) -> Result<(), CliError> {
    let mut s: SimulateSettings = resolve(file)?;
    overlay!(s, a; scenario, method, n, p, s, k, khat, replicates, s0, iterations, burn_in, cv_rule);
    if a.write_data.is_some() {
        s.write_data = a.write_data;
    }
    let configs = s.configs();
    if configs.is_empty() {
        return Err(CliError::usage("no method selected"));
    }
    for c in &configs {
        c.validate()?;
    }
    let rng = RngStream::new(seed);
    if let Some(path) = &s.write_data {
        let data = generate_dataset(&configs[0], &mut rng.substream(0))?;
        let bytes = dataset_csv(&data.x, &data.y).map_err(json_err)?;
        out.write(path, &bytes)?;
    }
    let mut outcomes = Vec::with_capacity(configs.len());
    for c in &configs {
        outcomes.push(run_benchmark(c, &rng)?);
    }
    let rows: Vec<BenchRow> = outcomes.iter().map(BenchRow::new).collect();
    let mut table = Vec::new();
    write_csv(&rows, &mut table).map_err(json_err)?;
    print!("{}", String::from_utf8_lossy(&table));
    let csv_path = out.path("csv");
    out.write(&csv_path, &table)?;
    out.write_json("json", &outcomes)?;
    let mut derived = Map::new();
    derived.insert("settings".into(), Value::from(configs.len()));
    out.finish("simulate", &s, seed, derived)
}

fn dataset_csv(x: &Matrix<f64>, y: &[f64]) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["y".to_string()];
    header.extend((1..=x.cols()).map(|j| format!("x{j}")));
    w.write_record(&header)?;
    for (i, yi) in y.iter().enumerate() {
        let mut rec = vec![yi.to_string()];
        rec.extend(x.row(i).iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.into_inner().map_err(|e| csv::Error::from(e.into_error()))
}

// --------------------------------------------------------------------- fit

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV panel with a header row.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Response column; every other non-date column is a covariate.
    #[arg(long)]
    pub response: Option<String>,
    #[arg(long)]
    pub date_column: Option<String>,
    /// Number of factors; estimated when absent.
    #[arg(long)]
    pub k: Option<usize>,
    /// Upper bound for the estimated number of factors.
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub s0: Option<f64>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long, value_enum)]
    pub impute: Option<ImputePolicy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct FitSettings {
    pub data: Option<PathBuf>,
    pub response: Option<String>,
    pub date_column: Option<String>,
    pub k: Option<usize>,
    pub k_max: usize,
    pub s0: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub impute: ImputePolicy,
}

impl Default for FitSettings {
    fn default() -> Self {
        Self {
            data: None,
            response: None,
            date_column: None,
            k: None,
            k_max: 10,
            s0: 1.0,
            iterations: 20,
            burn_in: 10,
            impute: ImputePolicy::Reject,
        }
    }
}

/// Contents of `fit.json`. Coefficients are on the scale of the centered
/// covariates; `intercept` is the response mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub response: String,
    pub n: usize,
    pub p: usize,
    pub k: usize,
    pub k_estimated: bool,
    pub covariates: Vec<String>,
    pub intercept: f64,
    pub posterior_mean_alpha: Vec<f64>,
    pub posterior_mean_beta: Vec<f64>,
    pub posterior_mean_sigma2: f64,
    pub inclusion_probabilities: Vec<f64>,
    pub modal_model: Vec<String>,
    pub threshold_selection: Vec<String>,
    pub avg_model_size: f64,
    pub diagnostics: FitDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub iterations: usize,
    pub burn_in: usize,
    pub retained: usize,
    /// Leading eigenvalues of the sample covariance.
    pub eigenvalues: Vec<f64>,
    pub degenerate_gap: bool,
    pub model_size_trace: Vec<usize>,
    pub sigma2_trace: Vec<f64>,
}

pub(crate) fn fit(a: FitArgs, file: Option<Map<String, Value>>, seed: u64, mut out: Output) -> Result<(), CliError> {
    let mut s: FitSettings = resolve(file)?;
    overlay!(s, a; s0, iterations, burn_in, impute, k_max);
    if a.data.is_some() {
        s.data = a.data;
    }
    if a.response.is_some() {
        s.response = a.response;
    }
    if a.date_column.is_some() {
        s.date_column = a.date_column;
    }
    if a.k.is_some() {
        s.k = a.k;
    }
    let data = s.data.clone().ok_or_else(|| CliError::usage("fit needs --data"))?;
    let response = s.response.clone().ok_or_else(|| CliError::usage("fit needs --response"))?;
    if s.burn_in >= s.iterations {
        return Err(CliError::usage(format!(
            "burn-in {} leaves no draws out of {} iterations",
            s.burn_in, s.iterations
        )));
    }
    let panel = ingest(&data, vec![response.clone()], s.date_column.clone(), s.impute)?;
    let dm = center_columns(&panel.x_raw)?;
    let (n, p) = (dm.n(), dm.p());
    let (k, k_estimated) = match s.k {
        Some(k) => (k, false),
        None => {
            let k_max = s.k_max.min(n.min(p) - 1);
            let k = if k_max == 0 { 0 } else { estimate_k(&dm, k_max)? };
            (k, true)
        }
    };
    let dec = if k == 0 {
        FactorDecomposition::without_factors(&dm)
    } else {
        pca_decompose(&dm, k)?
    };
    let y = &panel.y[0];
    let intercept = y.iter().sum::<f64>() / n as f64;
    let yc: Vec<f64> = y.iter().map(|v| v - intercept).collect();
    let prior = PriorConfig::default().with_s0(s.s0);
    let mut rng = RngStream::new(seed);
    let chain = run_chain(&dec, &yc, &prior, &ChainConfig::new(s.iterations, s.burn_in), None, &mut rng)?;
    let names = |idx: &[usize]| idx.iter().map(|&j| panel.covariate_names[j].clone()).collect::<Vec<_>>();
    let spectrum = covariance_eigenvalues(&dm.x)?;
    let report = FitReport {
        response: response.clone(),
        n,
        p,
        k,
        k_estimated,
        covariates: panel.covariate_names.clone(),
        intercept,
        posterior_mean_alpha: chain.posterior_mean_alpha.clone(),
        posterior_mean_beta: chain.posterior_mean_beta.clone(),
        posterior_mean_sigma2: chain.posterior_mean_sigma2,
        inclusion_probabilities: chain.inclusion_probabilities(),
        modal_model: names(&chain.modal_model),
        threshold_selection: names(&chain.threshold_selection(n)),
        avg_model_size: chain.avg_model_size(),
        diagnostics: FitDiagnostics {
            iterations: s.iterations,
            burn_in: s.burn_in,
            retained: chain.samples.len(),
            eigenvalues: spectrum.into_iter().take(s.k_max + 1).collect(),
            degenerate_gap: dec.degenerate_gap,
            model_size_trace: chain.samples.iter().map(|st| st.model_size()).collect(),
            sigma2_trace: chain.samples.iter().map(|st| st.sigma2).collect(),
        },
    };
    println!(
        "{response}: k = {k}, modal model [{}], posterior mean sigma^2 = {:.4}",
        report.modal_model.join(", "),
        report.posterior_mean_sigma2
    );
    out.write_json("json", &report)?;
    let mut derived = Map::new();
    derived.insert("k".into(), Value::from(k));
    out.finish("fit", &s, seed, derived)
}

// ---------------------------------------------------------------- forecast

#[derive(Debug, Args)]
pub struct ForecastArgs {
    #[arg(long, conflicts_with = "synthetic")]
    pub data: Option<PathBuf>,
    /// Use the built-in synthetic panel instead of a CSV.
    #[arg(long)]
    pub synthetic: bool,
    #[arg(long)]
    pub response: Option<String>,
    #[arg(long)]
    pub date_column: Option<String>,
    /// Observations per training window.
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, value_enum)]
    pub method: Option<ForecastMethod>,
    /// Fixed number of factors; re-estimated in every window when absent.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub s0: Option<f64>,
    /// Principal components kept by `pcr`.
    #[arg(long)]
    pub components: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Fixed lasso penalty; cross-validated per window when absent.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_enum)]
    pub cv_rule: Option<CvRule>,
    #[arg(long, value_enum)]
    pub impute: Option<ImputePolicy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ForecastSettings {
    pub data: Option<PathBuf>,
    pub synthetic: bool,
    pub response: Option<String>,
    pub date_column: Option<String>,
    pub window: usize,
    pub method: ForecastMethod,
    pub k: Option<usize>,
    pub k_max: usize,
    pub s0: f64,
    pub components: usize,
    pub iterations: usize,
    pub burn_in: usize,
    pub lambda: Option<f64>,
    pub cv_rule: CvRule,
    pub impute: ImputePolicy,
}

impl Default for ForecastSettings {
    fn default() -> Self {
        let r = RollingConfig::default();
        Self {
            data: None,
            synthetic: false,
            response: None,
            date_column: None,
            window: r.window,
            method: r.method,
            k: None,
            k_max: 10,
            s0: r.s0,
            components: r.pcr_components,
            iterations: r.iterations,
            burn_in: r.burn_in,
            lambda: None,
            cv_rule: r.lasso_cv_rule,
            impute: ImputePolicy::Reject,
        }
    }
}

impl ForecastSettings {
    pub fn rolling_config(&self) -> RollingConfig {
        RollingConfig {
            window: self.window,
            method: self.method,
            k_policy: match self.k {
                Some(k) => KPolicy::Fixed(k),
                None => KPolicy::Estimate(self.k_max),
            },
            s0: self.s0,
            pcr_components: self.components,
            response: 0,
            iterations: self.iterations,
            burn_in: self.burn_in,
            lasso_lambda: self.lambda,
            lasso_cv_rule: self.cv_rule,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastSummary {
    pub response: String,
    pub method: String,
    pub window: usize,
    pub forecasts: usize,
    pub r2: f64,
    pub avg_model_size: f64,
}

pub(crate) fn forecast(a: ForecastArgs, file: Option<Map<String, Value>>, seed: u64, mut out: Output) -> Result<(), CliError> {
    let mut s: ForecastSettings = resolve(file)?;
    overlay!(s, a; window, method, k_max, s0, components, iterations, burn_in, impute, cv_rule);
    if a.data.is_some() {
        s.data = a.data;
        s.synthetic = false;
    }
    if a.synthetic {
        s.synthetic = true;
        s.data = None;
    }
    for (dst, src) in [(&mut s.response, a.response), (&mut s.date_column, a.date_column)] {
        if src.is_some() {
            *dst = src;
        }
    }
    if a.k.is_some() {
        s.k = a.k;
    }
    if a.lambda.is_some() {
        s.lambda = a.lambda;
    }
    let root = RngStream::new(seed);
    let panel = match (&s.data, s.synthetic) {
        (Some(path), false) => {
            let response = s
                .response
                .clone()
                .ok_or_else(|| CliError::usage("forecast on a CSV needs --response"))?;
            ingest(path, vec![response], s.date_column.clone(), s.impute)?
        }
        (None, true) => synthetic_panel(&SyntheticPanelConfig::default(), &mut root.substream(0))?,
        _ => return Err(CliError::usage("forecast needs exactly one of --data and --synthetic")),
    };
    let cfg = s.rolling_config();
    let result = rolling_forecast(&panel, &cfg, &root.substream(1))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["t"];
    if panel.dates.is_some() {
        header.push("date");
    }
    header.extend(["actual", "prediction", "rolling_mean", "model_size"]);
    w.write_record(&header).map_err(json_err)?;
    for i in 0..result.t.len() {
        let t = result.t[i];
        let mut rec = vec![t.to_string()];
        if let Some(d) = &panel.dates {
            rec.push(d[t - 1].clone());
        }
        rec.extend([
            result.actuals[i].to_string(),
            result.predictions[i].to_string(),
            result.rolling_means[i].to_string(),
            result.model_sizes[i].to_string(),
        ]);
        w.write_record(&rec).map_err(json_err)?;
    }
    let table = w.into_inner().map_err(json_err)?;
    let summary = ForecastSummary {
        response: panel.series_names[0].clone(),
        method: cfg.method.name().into(),
        window: cfg.window,
        forecasts: result.t.len(),
        r2: result.r2,
        avg_model_size: result.avg_model_size(),
    };
    println!(
        "{} {}: out-of-sample R^2 = {:.4} over {} forecasts, average model size {:.2}",
        summary.response, summary.method, summary.r2, summary.forecasts, summary.avg_model_size
    );
    let csv_path = out.path("csv");
    out.write(&csv_path, &table)?;
    out.write_json("json", &summary)?;
    let mut derived = Map::new();
    derived.insert("r2".into(), Value::from(result.r2));
    out.finish("forecast", &s, seed, derived)
}

// -------------------------------------------------------------- estimate-k

#[derive(Debug, Args)]
pub struct EstimateKArgs {
    #[arg(long, conflicts_with = "synthetic")]
    pub data: Option<PathBuf>,
    /// Use a dataset from the default simulation setting.
    #[arg(long)]
    pub synthetic: bool,
    /// Columns to leave out of the covariate panel.
    #[arg(long, value_delimiter = ',')]
    pub exclude: Option<Vec<String>>,
    #[arg(long)]
    pub date_column: Option<String>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, value_enum)]
    pub impute: Option<ImputePolicy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct EstimateKSettings {
    pub data: Option<PathBuf>,
    pub synthetic: bool,
    pub exclude: Vec<String>,
    pub date_column: Option<String>,
    pub k_max: usize,
    pub impute: ImputePolicy,
}

impl Default for EstimateKSettings {
    fn default() -> Self {
        Self {
            data: None,
            synthetic: false,
            exclude: Vec::new(),
            date_column: None,
            k_max: 10,
            impute: ImputePolicy::Reject,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateKReport {
    pub k: usize,
    pub k_max: usize,
    pub n: usize,
    pub p: usize,
    /// The `k_max + 1` leading covariance eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// `eigenvalues[i] / eigenvalues[i + 1]`.
    pub ratios: Vec<f64>,
}

pub(crate) fn estimate_k_cmd(
    a: EstimateKArgs,
    file: Option<Map<String, Value>>,
    seed: u64,
    mut out: Output,
) -> Result<(), CliError> {
    let mut s: EstimateKSettings = resolve(file)?;
    overlay!(s, a; exclude, k_max, impute);
    if a.data.is_some() {
        s.data = a.data;
        s.synthetic = false;
    }
    if a.synthetic {
        s.synthetic = true;
        s.data = None;
    }
    if a.date_column.is_some() {
        s.date_column = a.date_column;
    }
    let x = match (&s.data, s.synthetic) {
        (Some(path), false) => ingest(path, s.exclude.clone(), s.date_column.clone(), s.impute)?.x_raw,
        (None, true) => generate_dataset(&SimConfig::default(), &mut RngStream::new(seed).substream(0))?.x,
        _ => return Err(CliError::usage("estimate-k needs exactly one of --data and --synthetic")),
    };
    let dm = center_columns(&x)?;
    let k = estimate_k(&dm, s.k_max)?;
    let eigenvalues: Vec<f64> = covariance_eigenvalues(&dm.x)?.into_iter().take(s.k_max + 1).collect();
    let ratios = eigenvalues.windows(2).map(|w| w[0] / w[1]).collect();
    let report = EstimateKReport {
        k,
        k_max: s.k_max,
        n: dm.n(),
        p: dm.p(),
        eigenvalues,
        ratios,
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "eigenvalue", "ratio"]).map_err(json_err)?;
    for (i, ev) in report.eigenvalues.iter().enumerate() {
        let ratio = report.ratios.get(i).map(f64::to_string).unwrap_or_default();
        w.write_record([(i + 1).to_string(), ev.to_string(), ratio]).map_err(json_err)?;
    }
    let table = w.into_inner().map_err(json_err)?;
    println!("k = {k}");
    let csv_path = out.path("csv");
    out.write(&csv_path, &table)?;
    out.write_json("json", &report)?;
    let mut derived = Map::new();
    derived.insert("k".into(), Value::from(k));
    out.finish("estimate-k", &s, seed, derived)
}
