//! Path-space estimator: `S_hat_n = sum_i W_n^i sum_k s_k` along the
//! ancestral path of particle `i`. Accumulated per particle, so only the
//! current values are stored.

use rand::Rng;

use super::{initial_values, AdditiveFunctional, OnlineSmoother, Weighting};
use crate::error::{Error, Result};
use crate::filter::FilterOutput;
use crate::model::StateSpaceModel;
use crate::particle::ParticleSystem;

#[derive(Debug, Clone)]
pub struct PathSpaceSmoother {
    dim: usize,
    values: Vec<f64>,
    next: Vec<f64>,
    pair: Vec<f64>,
}

impl PathSpaceSmoother {
    pub fn new(dim: usize) -> Self {
        PathSpaceSmoother { dim, values: Vec::new(), next: Vec::new(), pair: vec![0.0; dim] }
    }
}

impl OnlineSmoother for PathSpaceSmoother {
    fn dim(&self) -> usize {
        self.dim
    }

    fn values(&self) -> &[f64] {
        &self.values
    }

    fn update<M, S, R>(
        &mut self,
        _model: &M,
        s: &S,
        prev: Option<&ParticleSystem>,
        cur: &ParticleSystem,
        y: f64,
        weighting: Weighting,
        _rng: &mut R,
    ) -> Result<()>
    where
        M: StateSpaceModel + ?Sized,
        S: AdditiveFunctional + ?Sized,
        R: Rng + ?Sized,
    {
        let dim = self.dim;
        let Some(prev) = prev else {
            initial_values(s, cur, y, weighting.add, &mut self.values);
            return Ok(());
        };
        self.next.clear();
        self.next.resize(cur.len() * dim, 0.0);
        for j in 0..cur.len() {
            let a = cur.ancestors[j];
            s.eval(cur.time_index, prev.positions[a], cur.positions[j], y, &mut self.pair);
            let out = &mut self.next[j * dim..(j + 1) * dim];
            let carried = &self.values[a * dim..(a + 1) * dim];
            for d in 0..dim {
                out[d] = weighting.keep * carried[d] + weighting.add * self.pair[d];
            }
        }
        std::mem::swap(&mut self.values, &mut self.next);
        Ok(())
    }
}

/// Path-space estimates `S_hat_n` for every `n` from a stored run. Requires
/// trajectory storage.
pub fn pathspace_additive<S: AdditiveFunctional + ?Sized>(output: &FilterOutput, s: &S) -> Result<Vec<Vec<f64>>> {
    if output.trajectories.is_none() {
        return Err(Error::MissingTrajectories);
    }
    let mut sm = PathSpaceSmoother::new(s.dim());
    let mut rng = crate::rng::from_seed(0);
    let model = NoModel;
    let mut out = Vec::with_capacity(output.systems.len());
    for (t, sys) in output.systems.iter().enumerate() {
        let prev = if t == 0 { None } else { Some(&output.systems[t - 1]) };
        sm.update(&model, s, prev, sys, output.observations[t], Weighting::PLAIN, &mut rng)?;
        out.push(sm.estimate(sys));
    }
    Ok(out)
}

/// Placeholder model for smoothers that never evaluate densities.
pub(crate) struct NoModel;

impl StateSpaceModel for NoModel {
    fn init_sample<R: Rng + ?Sized>(&self, _rng: &mut R) -> f64 {
        unreachable!()
    }
    fn init_logpdf(&self, _x0: f64) -> f64 {
        unreachable!()
    }
    fn trans_sample<R: Rng + ?Sized>(&self, _x: f64, _rng: &mut R) -> f64 {
        unreachable!()
    }
    fn trans_logpdf(&self, _x_new: f64, _x: f64) -> f64 {
        unreachable!()
    }
    fn obs_logpdf(&self, _y: f64, _x: f64) -> f64 {
        unreachable!()
    }
}
