//! Single-estimator runs on simulated or ingested data.

use std::io::Write;

use sspe::bayes::{mcmc_within_smc, pgibbs, pmmh, tune_pmmh_n, LikelihoodBackend, PgibbsOptions, PmmhOptions};
use sspe::filter::run_filter;
use sspe::kalman::{exact_additive, kalman_loglik};
use sspe::ml::{
    offline_em, offline_gradient, online_em, online_gradient, EmOptions, GradientOptions, GradientStep, OnlineOptions,
    OnlineSmoothing, OnlineTrace, ParticleConfig,
};
use sspe::model::{LinearGaussian, Theta};
use sspe::rng::{replicate_seed, streams, substream};
use sspe::smooth::QuadraticFunctional;
use sspe::stats::mean;

use super::ml::start;
use super::smoothing::{arms, run_arms, write_traces, Arm};
use super::{fail, free_params, to_json, Context, ExperimentError, Report};
use crate::config::{Estimator, Method};
use crate::io::{num, write_file};
use crate::oracle::{localized_grid, Target};

/// Rows `(quantity, estimate)` of one replicate.
type Rows = Vec<(String, f64)>;

pub fn run(ctx: &Context) -> Result<Report, ExperimentError> {
    let cfg = ctx.cfg;
    let a = &cfg.algorithm;
    let truth = cfg.theta()?;
    let init = cfg.initial_law();
    let prior = cfg.prior_spec().map_err(|e| ExperimentError::Setup(e.to_string()))?;
    let y = ctx.data.prefix(a.t[0]);
    let method = a.methods[0];
    let particles = ParticleConfig { n: a.n[0], proposal: cfg.proposal(), filter: cfg.filter_options() };
    let params = free_params(&truth);
    let mut report = Report::default();
    let mut oracle: Vec<(String, f64)> = Vec::new();

    let needs_grid = !matches!(a.estimator, Estimator::Filter | Estimator::Smooth);
    if needs_grid && !(1..=2).contains(&params.len()) {
        return Err(ExperimentError::Setup("the grid oracle needs one or two free parameters".into()));
    }
    let target = match a.estimator {
        Estimator::Pmmh | Estimator::Pgibbs | Estimator::McmcWithinSmc => Target::Posterior,
        _ => Target::Likelihood,
    };
    let grid = if needs_grid {
        Some(localized_grid(&prior, y, &truth, init, a.grid_points, a.grid_rounds, target)?)
    } else {
        None
    };
    if let Some(g) = &grid {
        for &p in &params {
            let v = if target == Target::Posterior { g.post.mean(p) } else { g.ml().get(p) };
            oracle.push((p.name().to_string(), v));
        }
    }

    let smooth_arms: Vec<Arm> = arms(ctx);
    let times = [a.t[0]];
    let s = QuadraticFunctional::lag_product();
    match a.estimator {
        Estimator::Filter => oracle.push(("loglik".into(), kalman_loglik(&truth, init, y)?)),
        Estimator::Smooth => {
            let exact = exact_additive(&truth, init, y, &s)?[0];
            for arm in &smooth_arms {
                oracle.push((arm.label(), exact));
            }
        }
        _ => {}
    }

    let pmmh_backend = if a.estimator == Estimator::Pmmh && method != Method::Exact {
        if a.candidates.is_empty() {
            LikelihoodBackend::Particle(particles)
        } else {
            let tuned = tune_pmmh_n(
                y,
                &truth,
                init,
                LikelihoodBackend::Particle(particles),
                &a.candidates,
                a.tune_replicates,
                a.target_sd,
                cfg.seed,
            )?;
            let table: Vec<_> =
                tuned.table.iter().map(|(n, sd)| serde_json::json!({ "n": n, "sd": to_json(*sd) })).collect();
            report.oracle.insert("tuning_table".into(), serde_json::Value::Array(table));
            report.oracle.insert("tuned_n".into(), tuned.chosen.into());
            if !tuned.reached {
                report.warn("tuning_target_not_reached", 1);
            }
            LikelihoodBackend::Particle(ParticleConfig { n: tuned.chosen, ..particles })
        }
    } else {
        LikelihoodBackend::Exact
    };

    let online_opts = OnlineOptions {
        schedule: cfg.step_size()?,
        particles,
        init,
        smoothing: if method == Method::Pathspace { OnlineSmoothing::PathSpace } else { OnlineSmoothing::Forward },
        n_freeze: a.n_freeze,
        record_increments: false,
    };
    let theta_rows = |t: &Theta| -> Rows { params.iter().map(|p| (p.name().to_string(), t.get(*p))).collect() };
    let online_rows = |r: usize, trace: OnlineTrace| -> Result<Rows, String> {
        write_file(&ctx.replicate_file(r, "trace.csv"), |w| sspe::io::write_theta_trace(w, &trace.thetas, None))
            .map_err(fail)?;
        Ok(theta_rows(trace.last()))
    };

    let (done, failures) = ctx.run_replicates(|r, seed| -> Result<(Rows, u64), String> {
        let file = |name: &str| ctx.replicate_file(r, name);
        match a.estimator {
            Estimator::Filter => {
                let model = LinearGaussian::new(truth, init, cfg.proposal()).map_err(fail)?;
                let mut rng = substream(seed, streams::FILTER);
                let out = run_filter(&model, y, a.n[0], &particles.filter, &mut rng).map_err(fail)?;
                write_file(&file("filter_summary.csv"), |w| out.write_summary_csv(w)).map_err(fail)?;
                Ok((vec![("loglik".into(), out.loglik())], 0))
            }
            Estimator::Smooth => {
                let values = run_arms(ctx, &smooth_arms, &s, y, &times, seed)?;
                let labels: Vec<String> = smooth_arms.iter().map(Arm::label).collect();
                write_file(&file("traces.csv"), |w| write_traces(w, &labels, &times, &values)).map_err(fail)?;
                Ok((labels.into_iter().zip(values.iter().map(|v| v[0][0])).collect(), 0))
            }
            Estimator::OfflineEm | Estimator::OfflineGradient => {
                let t0 = start(cfg, &prior, seed)?;
                let trace = if a.estimator == Estimator::OfflineEm {
                    let opts = EmOptions { iters: a.iters, backend: cfg.backend(method), particles, init };
                    offline_em(y, &t0, &opts, seed)
                } else {
                    let opts = GradientOptions {
                        iters: a.iters,
                        backend: cfg.backend(method),
                        particles,
                        init,
                        step: GradientStep::Fixed { step: a.step_scale, halving: true },
                    };
                    offline_gradient(y, &t0, &opts, seed)
                }
                .map_err(fail)?;
                write_file(&file("trace.csv"), |w| {
                    sspe::io::write_theta_trace(w, &trace.thetas, Some(&trace.exact_loglik))
                })
                .map_err(fail)?;
                Ok((theta_rows(trace.last()), trace.boundary_hits as u64))
            }
            Estimator::OnlineEm => {
                let t0 = start(cfg, &prior, seed)?;
                Ok((online_rows(r, online_em(y, &t0, &online_opts, seed).map_err(fail)?)?, 0))
            }
            Estimator::OnlineGradient => {
                let t0 = start(cfg, &prior, seed)?;
                Ok((online_rows(r, online_gradient(y, &t0, &online_opts, seed).map_err(fail)?)?, 0))
            }
            Estimator::Pmmh => {
                let t0 = start(cfg, &prior, seed)?;
                let opts = PmmhOptions {
                    iters: a.iters,
                    rw_scale: a.rw_scale,
                    backend: pmmh_backend,
                    init,
                    ..Default::default()
                };
                let chain = pmmh(y, &prior, &t0, &opts, seed).map_err(fail)?;
                write_file(&file("chain.csv"), |w| chain.write_csv(w)).map_err(fail)?;
                let rows = params.iter().map(|p| (p.name().to_string(), mean(&chain.trace(*p)[a.burn_in..]))).collect();
                Ok((rows, chain.collapses as u64))
            }
            Estimator::Pgibbs => {
                let t0 = start(cfg, &prior, seed)?;
                let opts = PgibbsOptions {
                    n: a.pg_n,
                    iters: a.pg_iters,
                    init,
                    proposal: cfg.proposal(),
                    filter: cfg.filter_options(),
                    store_paths: false,
                };
                let chain = pgibbs(y, &prior, &t0, &opts, seed).map_err(fail)?;
                write_file(&file("chain.csv"), |w| chain.write_csv(w)).map_err(fail)?;
                let rows = params.iter().map(|p| (p.name().to_string(), mean(&chain.trace(*p)[a.burn_in..]))).collect();
                Ok((rows, 0))
            }
            Estimator::McmcWithinSmc => {
                let opts = sspe::bayes::MwsOptions {
                    n: a.mws_n,
                    init,
                    proposal: cfg.proposal(),
                    scheme: cfg.filter_options().scheme,
                    refresh: a.refresh,
                    diagnostics_every: a.record_every,
                };
                let out = mcmc_within_smc(y, &prior, &truth, &opts, replicate_seed(seed, 1)).map_err(fail)?;
                write_file(&file("moments.csv"), |w| out.write_moments_csv(w)).map_err(fail)?;
                write_file(&file("diagnostics.csv"), |w| out.write_diagnostics_csv(w)).map_err(fail)?;
                let last = out.post_mean.last().unwrap();
                Ok((params.iter().map(|p| (p.name().to_string(), last[p.index()])).collect(), 0))
            }
        }
    });

    write_file(&ctx.aggregate_path(), |w| {
        writeln!(w, "replicate,quantity,estimate,oracle")?;
        for (r, (rows, _)) in &done {
            for (q, v) in rows {
                let o = oracle.iter().find(|o| &o.0 == q).map(|o| num(o.1)).unwrap_or_default();
                writeln!(w, "{r},{q},{},{o}", num(*v))?;
            }
        }
        Ok(())
    })?;
    let flagged: u64 = done.iter().map(|(_, (_, c))| c).sum();
    match a.estimator {
        Estimator::Pmmh => report.warn("pmmh_filter_collapses", flagged),
        _ => report.warn("em_boundary_hits", flagged),
    }
    for (q, v) in oracle {
        report.oracle.insert(q, to_json(v));
    }
    report.failures = failures;
    Ok(report)
}
