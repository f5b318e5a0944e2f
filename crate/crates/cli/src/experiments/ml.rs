//! Maximum-likelihood experiments: off-line EM over several horizons and
//! on-line EM along one long record.

use std::io::Write;

use sspe::bayes::PriorSpec;
use sspe::ml::{offline_em, online_em, Backend, EmOptions, OnlineOptions, OnlineSmoothing, ParticleConfig};
use sspe::model::{Param, Theta};
use sspe::rng::{replicate_seed, streams, substream};
use sspe::stats::quantile;

use super::smoothing::{arms, Arm};
use super::{fail, free_params, to_json, Context, ExperimentError, Report};
use crate::config::{ExperimentConfig, Method};
use crate::io::{num, write_file};
use crate::oracle::{localized_grid, Grid, Target};

/// Reported coordinate of a parameter: `rho`, or the standard deviation.
pub(crate) fn coord(p: Param, theta: &Theta) -> f64 {
    let v = theta.get(p);
    if p == Param::Rho {
        v
    } else {
        v.sqrt()
    }
}

pub(crate) fn coord_name(p: Param) -> &'static str {
    match p {
        Param::Rho => "rho",
        Param::Tau2 => "tau",
        Param::Sigma2 => "sigma",
    }
}

/// Starting point: configured, or drawn from the prior for this replicate.
pub(crate) fn start(cfg: &ExperimentConfig, prior: &PriorSpec, seed: u64) -> Result<Theta, String> {
    match cfg.theta0() {
        Some(t) => Ok(t),
        None => {
            let base = cfg.theta().map_err(fail)?;
            let mut rng = substream(seed, streams::DATA);
            let mut t = prior.sample(&base, &mut rng);
            if cfg.initial_law().depends_on_theta() {
                t.rho = t.rho.clamp(-0.999, 0.999);
            }
            Ok(t)
        }
    }
}

fn particles(cfg: &ExperimentConfig, arm: &Arm) -> ParticleConfig {
    ParticleConfig { n: arm.particles, proposal: cfg.proposal(), filter: cfg.filter_options() }
}

/// `min,q25,median,q75,max` cells.
pub(crate) fn five_numbers(v: &[f64]) -> String {
    [0.0, 0.25, 0.5, 0.75, 1.0].iter().map(|&q| num(quantile(v, q))).collect::<Vec<_>>().join(",")
}

pub fn offline(ctx: &Context) -> Result<Report, ExperimentError> {
    let cfg = ctx.cfg;
    let truth = cfg.theta()?;
    let prior = cfg.prior_spec().map_err(|e| ExperimentError::Setup(e.to_string()))?;
    let init = cfg.initial_law();
    let horizons = cfg.algorithm.t.clone();
    let arms = arms(ctx);
    let params = free_params(&truth);
    let mut report = Report::default();

    let mut grids: Vec<Grid> = Vec::new();
    let mut exact_em: Vec<Option<Theta>> = Vec::new();
    for &t in &horizons {
        let y = ctx.data.prefix(t);
        let g = localized_grid(
            &prior,
            y,
            &truth,
            init,
            cfg.algorithm.grid_points,
            cfg.algorithm.grid_rounds,
            Target::Likelihood,
        )?;
        let em = match cfg.theta0() {
            Some(t0) => {
                let opts = EmOptions {
                    iters: cfg.algorithm.iters,
                    backend: Backend::Exact,
                    particles: ParticleConfig::new(1, cfg.proposal()),
                    init,
                };
                Some(*offline_em(y, &t0, &opts, 0)?.last())
            }
            None => None,
        };
        for p in &params {
            report.oracle.insert(format!("grid_ml_{}_T{t}", coord_name(*p)), to_json(coord(*p, &g.ml())));
        }
        grids.push(g);
        exact_em.push(em);
    }

    let (done, failures) = ctx.run_replicates(|r, seed| {
        let t0 = start(cfg, &prior, seed)?;
        let mut finals = Vec::new();
        let mut hits = 0u64;
        for (ti, &t) in horizons.iter().enumerate() {
            for (ai, arm) in arms.iter().enumerate() {
                let opts = EmOptions {
                    iters: cfg.algorithm.iters,
                    backend: cfg.backend(arm.method),
                    particles: particles(cfg, arm),
                    init,
                };
                let k = (ti * arms.len() + ai) as u64;
                let trace = offline_em(ctx.data.prefix(t), &t0, &opts, replicate_seed(seed, k))
                    .map_err(|e| format!("T={t} {}: {e}", arm.label()))?;
                write_file(&ctx.replicate_file(r, &format!("em_T{t}_{}.csv", arm.label())), |w| {
                    sspe::io::write_theta_trace(w, &trace.thetas, Some(&trace.exact_loglik))
                })
                .map_err(fail)?;
                hits += trace.boundary_hits as u64;
                finals.push(*trace.last());
            }
        }
        Ok((finals, hits))
    });

    write_file(&ctx.aggregate_path(), |w| {
        writeln!(w, "T,method,N,param,min,q25,median,q75,max,grid_ml,cell,exact_em")?;
        for (ti, &t) in horizons.iter().enumerate() {
            for (ai, arm) in arms.iter().enumerate() {
                if done.is_empty() {
                    continue;
                }
                for &p in &params {
                    let v: Vec<f64> = done.iter().map(|(_, (f, _))| coord(p, &f[ti * arms.len() + ai])).collect();
                    let em = exact_em[ti].map(|e| num(coord(p, &e))).unwrap_or_default();
                    writeln!(
                        w,
                        "{t},{},{},{},{},{},{},{em}",
                        arm.method.name(),
                        arm.n,
                        coord_name(p),
                        five_numbers(&v),
                        num(coord(p, &grids[ti].ml())),
                        num(grids[ti].cell(p)),
                    )?;
                }
            }
        }
        Ok(())
    })?;
    report.warn("em_boundary_hits", done.iter().map(|(_, (_, h))| h).sum());
    report.failures = failures;
    Ok(report)
}

pub fn online(ctx: &Context) -> Result<Report, ExperimentError> {
    let cfg = ctx.cfg;
    let truth = cfg.theta()?;
    let prior = cfg.prior_spec().map_err(|e| ExperimentError::Setup(e.to_string()))?;
    let init = cfg.initial_law();
    let horizon = cfg.algorithm.t[0];
    let y = ctx.data.prefix(horizon);
    let times = cfg.record_times(horizon);
    let arms = arms(ctx);
    let params = free_params(&truth);
    let mut report = Report::default();

    let grids: Vec<Grid> = times
        .iter()
        .map(|&n| {
            localized_grid(
                &prior,
                &y[..=n],
                &truth,
                init,
                cfg.algorithm.grid_points,
                cfg.algorithm.grid_rounds,
                Target::Likelihood,
            )
        })
        .collect::<sspe::Result<_>>()?;
    for p in &params {
        report.oracle.insert(format!("grid_ml_{}", coord_name(*p)), to_json(coord(*p, &grids.last().unwrap().ml())));
    }
    let schedule = cfg.step_size()?;

    let (done, failures) = ctx.run_replicates(|r, seed| {
        let t0 = start(cfg, &prior, seed)?;
        let mut out = Vec::new();
        for (ai, arm) in arms.iter().enumerate() {
            let opts = OnlineOptions {
                schedule,
                particles: particles(cfg, arm),
                init,
                smoothing: match arm.method {
                    Method::Pathspace => OnlineSmoothing::PathSpace,
                    _ => OnlineSmoothing::Forward,
                },
                n_freeze: cfg.algorithm.n_freeze,
                record_increments: false,
            };
            let trace = online_em(y, &t0, &opts, replicate_seed(seed, ai as u64))
                .map_err(|e| format!("{}: {e}", arm.label()))?;
            // Estimate after observing y_{0:n}.
            let at: Vec<Theta> = times.iter().map(|&n| trace.thetas[n + 1]).collect();
            write_file(&ctx.replicate_file(r, &format!("online_em_{}.csv", arm.label())), |w| {
                writeln!(w, "iter_or_n,rho,tau2,sigma2,exact_loglik")?;
                for (n, t) in times.iter().zip(&at) {
                    writeln!(w, "{n},{},{},{},", num(t.rho), num(t.tau2), num(t.sigma2))?;
                }
                Ok(())
            })
            .map_err(fail)?;
            out.push(at);
        }
        Ok(out)
    });

    write_file(&ctx.aggregate_path(), |w| {
        writeln!(w, "n,method,N,param,min,q25,median,q75,max,grid_ml,cell")?;
        for (ai, arm) in arms.iter().enumerate() {
            for (k, &n) in times.iter().enumerate() {
                if done.is_empty() {
                    continue;
                }
                for &p in &params {
                    let v: Vec<f64> = done.iter().map(|(_, a)| coord(p, &a[ai][k])).collect();
                    writeln!(
                        w,
                        "{n},{},{},{},{},{},{}",
                        arm.method.name(),
                        arm.n,
                        coord_name(p),
                        five_numbers(&v),
                        num(coord(p, &grids[k].ml())),
                        num(grids[k].cell(p)),
                    )?;
                }
            }
        }
        Ok(())
    })?;
    report.failures = failures;
    Ok(report)
}
