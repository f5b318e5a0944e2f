//! Bayesian experiments: degeneracy of MCMC-within-SMC, its marginal
//! posteriors, and a matched-cost comparison with particle Gibbs.

use std::io::Write;

use sspe::bayes::{mcmc_within_smc, pgibbs, MwsOptions, MwsOutput, PgibbsOptions};
use sspe::model::Param;
use sspe::rng::replicate_seed;
use sspe::stats::{mean, std_dev, variance};

use super::ml::start;
use super::{fail, free_params, to_json, Context, ExperimentError, Report};
use crate::config::ExperimentConfig;
use crate::io::{num, write_file};
use crate::oracle::{localized_grid, Grid, Target};

/// Posterior summaries of one run at one recording time.
#[derive(Debug, Clone)]
struct Snapshot {
    mean: [f64; 3],
    var: [f64; 3],
    loglik: f64,
    unique_theta: usize,
    unique_ancestors: usize,
}

fn mws_options(cfg: &ExperimentConfig, n: usize, every: usize) -> MwsOptions {
    MwsOptions {
        n,
        init: cfg.initial_law(),
        proposal: cfg.proposal(),
        scheme: cfg.filter_options().scheme,
        refresh: cfg.algorithm.refresh,
        diagnostics_every: every,
    }
}

fn snapshots(out: &MwsOutput, times: &[usize]) -> Vec<Snapshot> {
    times
        .iter()
        .map(|&n| {
            let d = out.diag_times.iter().position(|&t| t == n);
            Snapshot {
                mean: out.post_mean[n],
                var: out.post_var[n],
                loglik: out.loglik[n],
                unique_theta: d.map(|d| out.unique_theta[d]).unwrap_or(0),
                unique_ancestors: d.map(|d| out.unique_ancestors[d]).unwrap_or(0),
            }
        })
        .collect()
}

fn write_mws(ctx: &Context, r: usize, prefix: &str, out: &MwsOutput, particles: bool) -> std::io::Result<()> {
    write_file(&ctx.replicate_file(r, &format!("{prefix}moments.csv")), |w| out.write_moments_csv(w))?;
    write_file(&ctx.replicate_file(r, &format!("{prefix}diagnostics.csv")), |w| out.write_diagnostics_csv(w))?;
    if particles {
        write_file(&ctx.replicate_file(r, &format!("{prefix}final_particles.csv")), |w| {
            writeln!(w, "rho,tau2,sigma2,weight")?;
            for (t, wt) in out.final_thetas.iter().zip(&out.final_weights) {
                writeln!(w, "{},{},{},{}", num(t.rho), num(t.tau2), num(t.sigma2), num(*wt))?;
            }
            Ok(())
        })?;
    }
    Ok(())
}

type MwsStudy = (Vec<usize>, Vec<Grid>, Vec<(usize, Vec<Snapshot>)>, Report);

/// Runs the MCMC-within-SMC replicates and the grid oracle at `times`.
fn mws_study(ctx: &Context, particles: bool) -> Result<MwsStudy, ExperimentError> {
    let cfg = ctx.cfg;
    let truth = cfg.theta()?;
    let prior = cfg.prior_spec().map_err(|e| ExperimentError::Setup(e.to_string()))?;
    let horizon = cfg.algorithm.t[0];
    let y = ctx.data.prefix(horizon);
    let times = cfg.record_times(horizon);
    let grids: Vec<Grid> = times
        .iter()
        .map(|&n| {
            localized_grid(
                &prior,
                &y[..=n],
                &truth,
                cfg.initial_law(),
                cfg.algorithm.grid_points,
                cfg.algorithm.grid_rounds,
                Target::Posterior,
            )
        })
        .collect::<sspe::Result<_>>()?;
    let opts = mws_options(cfg, cfg.algorithm.mws_n, cfg.algorithm.record_every);
    let (done, failures) = ctx.run_replicates(|r, seed| {
        let out = mcmc_within_smc(y, &prior, &truth, &opts, seed).map_err(fail)?;
        write_mws(ctx, r, "", &out, particles).map_err(fail)?;
        Ok(snapshots(&out, &times))
    });
    Ok((times, grids, done, Report { failures, ..Default::default() }))
}

pub fn degeneracy(ctx: &Context) -> Result<Report, ExperimentError> {
    let (times, grids, done, mut report) = mws_study(ctx, false)?;
    let tau = Param::Tau2.index();
    write_file(&ctx.aggregate_path(), |w| {
        writeln!(
            w,
            "n,unique_theta,unique_ancestors,rel_var_tau2,var_loglik,mean_estimate_tau2,avg_var_ratio_tau2,grid_mean_tau2,grid_var_tau2"
        )?;
        if done.is_empty() {
            return Ok(());
        }
        for (k, &n) in times.iter().enumerate() {
            let col = |f: &dyn Fn(&Snapshot) -> f64| -> Vec<f64> { done.iter().map(|(_, s)| f(&s[k])).collect() };
            let est = col(&|s| s.mean[tau]);
            let gv = grids[k].post.var(Param::Tau2);
            writeln!(
                w,
                "{n},{},{},{},{},{},{},{},{}",
                num(mean(&col(&|s| s.unique_theta as f64))),
                num(mean(&col(&|s| s.unique_ancestors as f64))),
                num(variance(&est) / gv),
                num(variance(&col(&|s| s.loglik))),
                num(mean(&est)),
                num(mean(&col(&|s| s.var[tau])) / gv),
                num(grids[k].post.mean(Param::Tau2)),
                num(gv),
            )?;
        }
        Ok(())
    })?;
    let last = grids.last().unwrap();
    report.oracle.insert("grid_mean_tau2".into(), to_json(last.post.mean(Param::Tau2)));
    report.oracle.insert("grid_var_tau2".into(), to_json(last.post.var(Param::Tau2)));
    Ok(report)
}

pub fn posterior(ctx: &Context) -> Result<Report, ExperimentError> {
    let (times, grids, done, mut report) = mws_study(ctx, true)?;
    let params = free_params(&ctx.cfg.theta()?);
    write_file(&ctx.aggregate_path(), |w| {
        writeln!(w, "n,param,mean_estimate,sd_estimate,mean_post_var,grid_mean,grid_var")?;
        if done.is_empty() {
            return Ok(());
        }
        for (k, &n) in times.iter().enumerate() {
            for &p in &params {
                let est: Vec<f64> = done.iter().map(|(_, s)| s[k].mean[p.index()]).collect();
                let pv: Vec<f64> = done.iter().map(|(_, s)| s[k].var[p.index()]).collect();
                writeln!(
                    w,
                    "{n},{},{},{},{},{},{}",
                    p.name(),
                    num(mean(&est)),
                    num(std_dev(&est)),
                    num(mean(&pv)),
                    num(grids[k].post.mean(p)),
                    num(grids[k].post.var(p)),
                )?;
            }
        }
        Ok(())
    })?;
    for p in params {
        report.oracle.insert(format!("grid_mean_{}", p.name()), to_json(grids.last().unwrap().post.mean(p)));
    }
    Ok(report)
}

pub fn pgibbs_compare(ctx: &Context) -> Result<Report, ExperimentError> {
    let cfg = ctx.cfg;
    let truth = cfg.theta()?;
    let prior = cfg.prior_spec().map_err(|e| ExperimentError::Setup(e.to_string()))?;
    let horizon = cfg.algorithm.t[0];
    let y = ctx.data.prefix(horizon);
    let params = free_params(&truth);
    let grid = localized_grid(
        &prior,
        y,
        &truth,
        cfg.initial_law(),
        cfg.algorithm.grid_points,
        cfg.algorithm.grid_rounds,
        Target::Posterior,
    )?;
    let pg_opts = PgibbsOptions {
        n: cfg.algorithm.pg_n,
        iters: cfg.algorithm.pg_iters,
        init: cfg.initial_law(),
        proposal: cfg.proposal(),
        filter: cfg.filter_options(),
        store_paths: false,
    };
    let mws_opts = mws_options(cfg, cfg.algorithm.mws_n, horizon);
    let burn = cfg.algorithm.burn_in;

    let (done, failures) = ctx.run_replicates(|r, seed| {
        let t0 = start(cfg, &prior, seed)?;
        let chain = pgibbs(y, &prior, &t0, &pg_opts, replicate_seed(seed, 0)).map_err(fail)?;
        write_file(&ctx.replicate_file(r, "pgibbs_chain.csv"), |w| chain.write_csv(w)).map_err(fail)?;
        let pg: Vec<f64> = params.iter().map(|&p| mean(&chain.trace(p)[burn..])).collect();
        let out = mcmc_within_smc(y, &prior, &truth, &mws_opts, replicate_seed(seed, 1)).map_err(fail)?;
        write_mws(ctx, r, "mws_", &out, false).map_err(fail)?;
        let last = out.post_mean.last().unwrap();
        let mws: Vec<f64> = params.iter().map(|p| last[p.index()]).collect();
        Ok((pg, mws))
    });

    write_file(&ctx.aggregate_path(), |w| {
        writeln!(w, "method,param,N,iterations,replicates,mean_estimate,sd_estimate,grid_mean,grid_sd")?;
        if done.is_empty() {
            return Ok(());
        }
        for (method, n, iters) in [("pgibbs", pg_opts.n, pg_opts.iters), ("mcmc_within_smc", mws_opts.n, 1)] {
            for (j, &p) in params.iter().enumerate() {
                let est: Vec<f64> =
                    done.iter().map(|(_, (pg, mws))| if method == "pgibbs" { pg[j] } else { mws[j] }).collect();
                writeln!(
                    w,
                    "{method},{},{n},{iters},{},{},{},{},{}",
                    p.name(),
                    done.len(),
                    num(mean(&est)),
                    num(std_dev(&est)),
                    num(grid.post.mean(p)),
                    num(grid.post.var(p).sqrt()),
                )?;
            }
        }
        Ok(())
    })?;
    let mut report = Report { failures, ..Default::default() };
    for p in params {
        report.oracle.insert(format!("grid_mean_{}", p.name()), to_json(grid.post.mean(p)));
    }
    Ok(report)
}
