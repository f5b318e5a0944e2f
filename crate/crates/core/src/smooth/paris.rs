//! Forward smoothing with `K` backward draws per particle:
//! `V_n(X_n^j) = (1/K) sum_k [V_{n-1}(X_{n-1}^{J_k}) + s_n(X_{n-1}^{J_k}, X_n^j)]`
//! with `J_k` drawn from the backward kernel by rejection sampling.

use rand::Rng;

use super::ffbsa::{BackwardMode, BackwardSampler};
use super::{initial_values, AdditiveFunctional, OnlineSmoother, Weighting};
use crate::error::{Error, Result};
use crate::filter::FilterOutput;
use crate::model::StateSpaceModel;
use crate::particle::ParticleSystem;

#[derive(Debug, Clone)]
pub struct ParisSmoother {
    dim: usize,
    k: usize,
    values: Vec<f64>,
    next: Vec<f64>,
    pair: Vec<f64>,
    /// Draws that exhausted the rejection cap.
    pub fallbacks: usize,
    pub proposals: usize,
}

impl ParisSmoother {
    pub fn new(dim: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("K must be >= 1".into()));
        }
        Ok(ParisSmoother {
            dim,
            k,
            values: Vec::new(),
            next: Vec::new(),
            pair: vec![0.0; dim],
            fallbacks: 0,
            proposals: 0,
        })
    }
}

impl OnlineSmoother for ParisSmoother {
    fn dim(&self) -> usize {
        self.dim
    }

    fn values(&self) -> &[f64] {
        &self.values
    }

    fn update<M, S, R>(
        &mut self,
        model: &M,
        s: &S,
        prev: Option<&ParticleSystem>,
        cur: &ParticleSystem,
        y: f64,
        weighting: Weighting,
        rng: &mut R,
    ) -> Result<()>
    where
        M: StateSpaceModel + ?Sized,
        S: AdditiveFunctional + ?Sized,
        R: Rng + ?Sized,
    {
        let dim = self.dim;
        let Some(prev) = prev else {
            if model.trans_log_bound().is_none() {
                return Err(Error::MissingTransitionBound);
            }
            initial_values(s, cur, y, weighting.add, &mut self.values);
            return Ok(());
        };
        let mut sampler = BackwardSampler::new(prev, model, BackwardMode::Rejection)?;
        let mut stats = (0, 0);
        self.next.clear();
        self.next.resize(cur.len() * dim, 0.0);
        let scale = 1.0 / self.k as f64;
        for j in 0..cur.len() {
            let x = cur.positions[j];
            let out = &mut self.next[j * dim..(j + 1) * dim];
            for _ in 0..self.k {
                let i = sampler.draw(model, x, cur.time_index, &mut stats, rng)?;
                s.eval(cur.time_index, prev.positions[i], x, y, &mut self.pair);
                let v = &self.values[i * dim..(i + 1) * dim];
                for d in 0..dim {
                    out[d] += scale * (weighting.keep * v[d] + weighting.add * self.pair[d]);
                }
            }
        }
        self.fallbacks += stats.0;
        self.proposals += stats.1;
        std::mem::swap(&mut self.values, &mut self.next);
        Ok(())
    }
}

/// PaRIS estimates `S_hat_n` for every `n` of a stored run.
pub fn paris_additive<M, S, R>(output: &FilterOutput, model: &M, s: &S, k: usize, rng: &mut R) -> Result<Vec<Vec<f64>>>
where
    M: StateSpaceModel + ?Sized,
    S: AdditiveFunctional + ?Sized,
    R: Rng + ?Sized,
{
    let mut sm = ParisSmoother::new(s.dim(), k)?;
    let mut out = Vec::with_capacity(output.systems.len());
    for (t, sys) in output.systems.iter().enumerate() {
        let prev = if t == 0 { None } else { Some(&output.systems[t - 1]) };
        sm.update(model, s, prev, sys, output.observations[t], Weighting::PLAIN, rng)?;
        out.push(sm.estimate(sys));
    }
    Ok(out)
}
