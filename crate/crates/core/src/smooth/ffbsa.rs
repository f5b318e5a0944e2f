//! Forward filtering backward sampling: whole paths drawn from the backward
//! kernel `p_hat(dx_n | y_{0:n}, X_{n+1}) ∝ W_n^i f(X_{n+1} | X_n^i)`.

use rand::Rng;

use super::{backward_row, log_norm_weights};
use crate::error::{Error, Result};
use crate::filter::FilterOutput;
use crate::model::StateSpaceModel;
use crate::particle::{Categorical, ParticleSystem};

/// How each backward index is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackwardMode {
    /// Evaluate the full kernel row, `O(N)` per draw.
    #[default]
    Direct,
    /// Propose from the filter weights and accept with `f / C`; falls back to
    /// `Direct` after `100 N` rejected proposals.
    Rejection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledPaths {
    pub paths: Vec<Vec<f64>>,
    /// Draws that hit the rejection cap and used the direct sampler.
    pub fallbacks: usize,
    /// Total rejection proposals made.
    pub proposals: usize,
}

/// Draws one index from a normalised row.
#[inline]
pub(crate) fn draw_from_row<R: Rng + ?Sized>(row: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut cum = 0.0;
    let mut last = 0;
    for (i, w) in row.iter().enumerate() {
        if *w > 0.0 {
            cum += w;
            last = i;
            if u < cum {
                return i;
            }
        }
    }
    last
}

/// Backward index sampler for one time step.
pub(crate) struct BackwardSampler<'a> {
    prev: &'a ParticleSystem,
    ln_w: Vec<f64>,
    cat: Option<Categorical>,
    log_bound: f64,
    cap: usize,
    row: Vec<f64>,
}

impl<'a> BackwardSampler<'a> {
    pub(crate) fn new<M: StateSpaceModel + ?Sized>(
        prev: &'a ParticleSystem,
        model: &M,
        mode: BackwardMode,
    ) -> Result<Self> {
        let (cat, log_bound) = match mode {
            BackwardMode::Direct => (None, 0.0),
            BackwardMode::Rejection => {
                let b = model.trans_log_bound().ok_or(Error::MissingTransitionBound)?;
                (Some(Categorical::new(&prev.norm_weights)), b)
            }
        };
        Ok(BackwardSampler {
            prev,
            ln_w: log_norm_weights(prev),
            cat,
            log_bound,
            cap: 100 * prev.len(),
            row: Vec::new(),
        })
    }

    /// Index `i` drawn with probability `∝ W^i f(x | X^i)`.
    pub(crate) fn draw<M: StateSpaceModel + ?Sized, R: Rng + ?Sized>(
        &mut self,
        model: &M,
        x: f64,
        time: usize,
        stats: &mut (usize, usize),
        rng: &mut R,
    ) -> Result<usize> {
        if let Some(cat) = &self.cat {
            for _ in 0..self.cap {
                stats.1 += 1;
                let i = cat.sample(rng);
                let log_acc = model.trans_logpdf(x, self.prev.positions[i]) - self.log_bound;
                assert!(log_acc <= 1e-12, "transition density exceeds its bound");
                if rng.random::<f64>().ln() < log_acc {
                    return Ok(i);
                }
            }
            stats.0 += 1;
        }
        if !backward_row(model, &self.prev.positions, &self.ln_w, x, &mut self.row) {
            return Err(Error::UnreachableParticle { time, index: 0 });
        }
        Ok(draw_from_row(&self.row, rng))
    }
}

/// Draws `m` paths `x_{0:T}`.
pub fn ffbsa_sample<M, R>(
    output: &FilterOutput,
    model: &M,
    m: usize,
    mode: BackwardMode,
    rng: &mut R,
) -> Result<SampledPaths>
where
    M: StateSpaceModel + ?Sized,
    R: Rng + ?Sized,
{
    if mode == BackwardMode::Rejection && model.trans_log_bound().is_none() {
        return Err(Error::MissingTransitionBound);
    }
    let t_max = output.horizon();
    let mut paths = vec![vec![0.0; t_max + 1]; m];
    let last = Categorical::new(&output.systems[t_max].norm_weights);
    for p in paths.iter_mut() {
        p[t_max] = output.systems[t_max].positions[last.sample(rng)];
    }
    let mut stats = (0usize, 0usize);
    for n in (0..t_max).rev() {
        let mut sampler = BackwardSampler::new(&output.systems[n], model, mode)?;
        for p in paths.iter_mut() {
            let i = sampler.draw(model, p[n + 1], n + 1, &mut stats, rng)?;
            p[n] = output.systems[n].positions[i];
        }
    }
    Ok(SampledPaths { paths, fallbacks: stats.0, proposals: stats.1 })
}
