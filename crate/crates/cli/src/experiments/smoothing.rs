//! Bias and variance of `S_hat_n` for `s_k = x_{k-1} x_k` at fixed `theta`.

use std::io::Write;

use sspe::kalman::exact_additive_trace;
use sspe::ml::{additive_trace, ParticleConfig};
use sspe::rng::{replicate_seed, streams, substream};
use sspe::smooth::QuadraticFunctional;
use sspe::stats::{mean, variance};

use super::{fail, to_json, Context, ExperimentError, Report};
use crate::config::Method;
use crate::io::{num, write_file};

/// One estimator configuration: method and base particle count.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Arm {
    pub method: Method,
    pub n: usize,
    pub particles: usize,
}

impl Arm {
    pub fn label(&self) -> String {
        format!("{}_N{}", self.method.name(), self.n)
    }
}

pub(crate) fn arms(ctx: &Context) -> Vec<Arm> {
    let mut v = Vec::new();
    for &method in &ctx.cfg.algorithm.methods {
        for &n in &ctx.cfg.algorithm.n {
            v.push(Arm { method, n, particles: ctx.cfg.particles_for(method, n) });
        }
    }
    v
}

/// `S_hat_n` at `times` for every arm, on `y`.
pub(crate) fn run_arms(
    ctx: &Context,
    arms: &[Arm],
    s: &QuadraticFunctional,
    y: &[f64],
    times: &[usize],
    seed: u64,
) -> Result<Vec<Vec<Vec<f64>>>, String> {
    let theta = ctx.cfg.theta().map_err(fail)?;
    arms.iter()
        .enumerate()
        .map(|(k, arm)| {
            let mut rng = substream(replicate_seed(seed, k as u64), streams::SMOOTHER);
            let particles =
                ParticleConfig { n: arm.particles, proposal: ctx.cfg.proposal(), filter: ctx.cfg.filter_options() };
            additive_trace(
                ctx.cfg.backend(arm.method),
                &theta,
                ctx.cfg.initial_law(),
                y,
                s,
                &particles,
                times,
                &mut rng,
            )
            .map_err(|e| format!("{}: {e}", arm.label()))
        })
        .collect()
}

/// CSV `n,estimator,component,value` for several estimators.
pub(crate) fn write_traces<W: Write>(
    mut w: W,
    labels: &[String],
    times: &[usize],
    values: &[Vec<Vec<f64>>],
) -> std::io::Result<()> {
    writeln!(w, "n,estimator,component,value")?;
    for (label, trace) in labels.iter().zip(values) {
        for (n, v) in times.iter().zip(trace) {
            for (c, x) in v.iter().enumerate() {
                writeln!(w, "{n},{label},{c},{}", num(*x))?;
            }
        }
    }
    Ok(())
}

pub fn run(ctx: &Context) -> Result<Report, ExperimentError> {
    let cfg = ctx.cfg;
    let horizon = cfg.algorithm.t[0];
    let y = ctx.data.prefix(horizon);
    let times = cfg.record_times(horizon);
    let s = QuadraticFunctional::lag_product();
    let exact: Vec<f64> =
        exact_additive_trace(&cfg.theta()?, cfg.initial_law(), y, &s, &times)?.into_iter().map(|v| v[0]).collect();
    let arms = arms(ctx);
    let labels: Vec<String> = arms.iter().map(Arm::label).collect();

    let (done, failures) = ctx.run_replicates(|r, seed| {
        let values = run_arms(ctx, &arms, &s, y, &times, seed)?;
        write_file(&ctx.replicate_file(r, "traces.csv"), |w| write_traces(w, &labels, &times, &values))
            .map_err(fail)?;
        Ok(values)
    });

    write_file(&ctx.aggregate_path(), |w| {
        writeln!(w, "n,method,N,bias,var_scaled,mse_scaled,particles,exact")?;
        for (a, arm) in arms.iter().enumerate() {
            for (k, &n) in times.iter().enumerate() {
                let est: Vec<f64> = done.iter().map(|(_, v)| v[a][k][0]).collect();
                if est.is_empty() {
                    continue;
                }
                let err: Vec<f64> = est.iter().map(|e| e - exact[k]).collect();
                let sq: Vec<f64> = err.iter().map(|e| e * e).collect();
                writeln!(
                    w,
                    "{n},{},{},{},{},{},{},{}",
                    arm.method.name(),
                    arm.n,
                    num(mean(&err)),
                    num(variance(&est) / n as f64),
                    num(mean(&sq) / n as f64),
                    arm.particles,
                    num(exact[k])
                )?;
            }
        }
        Ok(())
    })?;

    let mut report = Report { failures, ..Default::default() };
    report.oracle.insert("exact_final".into(), to_json(*exact.last().unwrap()));
    Ok(report)
}
