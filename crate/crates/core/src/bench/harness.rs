use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::lasso_cv_default;
use crate::bench::eval::{average, evaluate_chain, evaluate_lasso, EvalReport};
use crate::bench::sim::{generate_dataset, SimConfig};
use crate::error::{Error, Result};
use crate::factor::{center_columns, pca_decompose, FactorDecomposition};
use crate::gibbs::{run_chain, PriorConfig};
use crate::rng::RngStream;

/// Aggregate over replicates together with the per-replicate reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkOutcome {
    pub config: SimConfig,
    pub mean: EvalReport,
    pub replicates: Vec<EvalReport>,
}

/// Generate, decompose, fit and score one dataset. The stream is consumed
/// by the generator first, so every method sees the same data for a seed.
pub fn run_replicate(cfg: &SimConfig, rng: &mut RngStream) -> Result<EvalReport> {
    let data = generate_dataset(cfg, rng)?;
    let dm = center_columns(&data.x)?;
    let khat = cfg.effective_khat();
    let dec = if khat == 0 {
        FactorDecomposition::without_factors(&dm)
    } else {
        pca_decompose(&dm, khat)?
    };
    // the centered design has no intercept, so the response is centered too
    let mean = data.y.iter().sum::<f64>() / data.y.len() as f64;
    let y: Vec<f64> = data.y.iter().map(|v| v - mean).collect();
    if cfg.method.is_bayes() {
        let prior = PriorConfig::default().with_s0(cfg.s0);
        let chain = run_chain(&dec, &y, &prior, &cfg.chain(), None, rng)?;
        Ok(evaluate_chain(&chain, &data.truth))
    } else {
        let fit = lasso_cv_default(&dec, &y, cfg.cv_rule, rng)?;
        Ok(evaluate_lasso(&fit, &dec, &y, &data.truth))
    }
}

/// Runs one replicate per stream, concurrently, keeping stream order.
pub fn run_with_streams(cfg: &SimConfig, streams: Vec<RngStream>) -> Result<Vec<EvalReport>> {
    cfg.validate()?;
    streams
        .into_par_iter()
        .enumerate()
        .map(|(index, mut rng)| {
            run_replicate(cfg, &mut rng).map_err(|e| Error::Replicate {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

/// `cfg.replicates` replicates on the disjoint substreams `0..replicates`
/// of `rng`, averaged.
pub fn run_benchmark(cfg: &SimConfig, rng: &RngStream) -> Result<BenchmarkOutcome> {
    let streams = (0..cfg.replicates as u64).map(|r| rng.substream(r)).collect();
    let replicates = run_with_streams(cfg, streams)?;
    Ok(BenchmarkOutcome {
        config: cfg.clone(),
        mean: average(&replicates),
        replicates,
    })
}

/// One line of the benchmark table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub scenario: String,
    pub method: String,
    pub khat: usize,
    pub n: usize,
    pub p: usize,
    pub s: usize,
    pub beta_l2_error: f64,
    pub model_selection_rate: f64,
    pub sure_screening_rate: f64,
    pub avg_model_size: f64,
    pub sigma2_rel_error: f64,
}

impl BenchRow {
    pub fn new(outcome: &BenchmarkOutcome) -> Self {
        let c = &outcome.config;
        let m = &outcome.mean;
        Self {
            scenario: c.scenario.name().into(),
            method: c.method.name().into(),
            khat: c.effective_khat(),
            n: c.n,
            p: c.p,
            s: c.s,
            beta_l2_error: m.beta_l2_error,
            model_selection_rate: m.model_selection_rate,
            sure_screening_rate: m.sure_screening_rate,
            avg_model_size: m.avg_model_size,
            sigma2_rel_error: m.sigma2_rel_error,
        }
    }
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Cartesian product over the sweep axes; empty axes keep the base value.
pub fn expand_grid(base: &SimConfig, ns: &[usize], ps: &[usize], ss: &[usize], khats: &[usize]) -> Vec<SimConfig> {
    let pick = |v: &[usize], d: usize| if v.is_empty() { vec![d] } else { v.to_vec() };
    let mut out = Vec::new();
    for &n in &pick(ns, base.n) {
        for &p in &pick(ps, base.p) {
            for &s in &pick(ss, base.s) {
                for &khat in &pick(khats, base.khat_used) {
                    let mut c = base.clone();
                    c.n = n;
                    c.p = p;
                    c.s = s;
                    c.khat_used = khat;
                    c.resize();
                    out.push(c);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::sim::Method;

    fn small(method: Method) -> SimConfig {
        SimConfig {
            n: 60,
            p: 80,
            replicates: 4,
            method,
            ..SimConfig::default()
        }
    }

    #[test]
    fn single_replicate_is_the_replicate() {
        let cfg = SimConfig {
            replicates: 1,
            ..small(Method::FaBayes)
        };
        let rng = RngStream::new(11);
        let out = run_benchmark(&cfg, &rng).unwrap();
        let direct = run_replicate(&cfg, &mut rng.substream(0)).unwrap();
        assert_eq!(out.mean, direct);
        assert_eq!(out.replicates, vec![direct]);
    }

    #[test]
    fn permuting_streams_permutes_reports() {
        let cfg = small(Method::FaBayes);
        let rng = RngStream::new(12);
        let out = run_benchmark(&cfg, &rng).unwrap();
        let perm = [2u64, 0, 3, 1];
        let reports = run_with_streams(&cfg, perm.iter().map(|&r| rng.substream(r)).collect()).unwrap();
        for (i, &r) in perm.iter().enumerate() {
            assert_eq!(reports[i], out.replicates[r as usize]);
        }
        assert_eq!(average(&reports), out.mean);
    }

    #[test]
    fn full_screening_means_every_draw_covers_the_truth() {
        let cfg = SimConfig {
            replicates: 1,
            ..small(Method::FaBayes)
        };
        let mut rng = RngStream::new(13);
        let data = generate_dataset(&cfg, &mut rng.clone()).unwrap();
        let dm = center_columns(&data.x).unwrap();
        let dec = pca_decompose(&dm, 3).unwrap();
        generate_dataset(&cfg, &mut rng).unwrap();
        let chain = run_chain(&dec, &data.y, &PriorConfig::default(), &cfg.chain(), None, &mut rng).unwrap();
        let r = evaluate_chain(&chain, &data.truth);
        if r.sure_screening_rate == 1.0 {
            for s in &chain.samples {
                assert!(data.truth.support.iter().all(|j| s.xi.contains(j)));
            }
        }
        assert!(r.sure_screening_rate >= r.model_selection_rate);
    }

    #[test]
    fn lasso_methods_run() {
        for m in [Method::FaLasso, Method::GenericLasso] {
            let cfg = SimConfig {
                replicates: 2,
                ..small(m)
            };
            let out = run_benchmark(&cfg, &RngStream::new(14)).unwrap();
            for r in &out.replicates {
                assert!(r.model_selection_rate == 0.0 || r.model_selection_rate == 1.0);
                assert!(r.sure_screening_rate >= r.model_selection_rate);
            }
        }
    }

    #[test]
    fn invalid_config_is_rejected_before_any_replicate() {
        let mut broken = small(Method::FaBayes);
        broken.burn_in = 50;
        assert!(matches!(
            run_with_streams(&broken, vec![RngStream::new(1)]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn grid_expansion() {
        let base = SimConfig::default();
        let grid = expand_grid(&base, &[100, 200], &[], &[1, 10], &[3, 6]);
        assert_eq!(grid.len(), 8);
        assert!(grid.iter().all(|c| c.validate().is_ok()));
        assert_eq!((grid[1].s, grid[1].khat_used), (1, 6));
        assert_eq!(grid[2].beta_star_values.len(), 10);
    }

    #[test]
    fn csv_layout() {
        let out = BenchmarkOutcome {
            config: SimConfig::default(),
            mean: EvalReport::default(),
            replicates: vec![],
        };
        let mut buf = Vec::new();
        write_csv(&[BenchRow::new(&out)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "scenario,method,khat,n,p,s,beta_l2_error,model_selection_rate,sure_screening_rate,avg_model_size,sigma2_rel_error\n"
        ));
        assert!(text.contains("factor-adjusted,fa-bayes,3,200,500,5,"));
    }
}
