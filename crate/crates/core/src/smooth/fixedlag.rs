//! Fixed-lag estimator: term `s_k` is evaluated along the ancestral paths of
//! the system at time `min(k + L, n)` and frozen afterwards. Only the last
//! `L + 2` systems are retained.

use std::collections::VecDeque;

use super::AdditiveFunctional;
use crate::error::Result;
use crate::filter::FilterOutput;
use crate::particle::ParticleSystem;

#[derive(Debug, Clone)]
struct Slice {
    positions: Vec<f64>,
    ancestors: Vec<usize>,
    y: f64,
}

#[derive(Debug, Clone)]
pub struct FixedLagSmoother {
    lag: usize,
    dim: usize,
    window: VecDeque<Slice>,
    frozen: Vec<f64>,
    estimate: Vec<f64>,
    time: usize,
}

impl FixedLagSmoother {
    pub fn new(dim: usize, lag: usize) -> Self {
        FixedLagSmoother {
            lag,
            dim,
            window: VecDeque::with_capacity(lag + 2),
            frozen: vec![0.0; dim],
            estimate: vec![0.0; dim],
            time: 0,
        }
    }

    pub fn lag(&self) -> usize {
        self.lag
    }

    /// Incorporates the system at the next time index and updates the estimate.
    pub fn update<S: AdditiveFunctional + ?Sized>(&mut self, s: &S, cur: &ParticleSystem, y: f64) -> Result<()> {
        let n = cur.time_index;
        self.time = n;
        self.window.push_back(Slice { positions: cur.positions.clone(), ancestors: cur.ancestors.clone(), y });
        while self.window.len() > self.lag + 2 {
            self.window.pop_front();
        }
        let dim = self.dim;
        let first = n + 1 - self.window.len();
        let lo = n.saturating_sub(self.lag);
        let mut pending = vec![0.0; dim];
        let mut buf = vec![0.0; dim];
        let mut finalised = vec![0.0; dim];
        for j in 0..cur.len() {
            let w = cur.norm_weights[j];
            if w == 0.0 {
                continue;
            }
            let mut idx = j;
            // Walk m = n, n-1, ..., lo.
            for m in (lo.max(1)..=n).rev() {
                let sl = &self.window[m - first];
                let a = sl.ancestors[idx];
                let xp = self.window[m - 1 - first].positions[a];
                s.eval(m, xp, sl.positions[idx], sl.y, &mut buf);
                let target = if self.lag <= n && m == n - self.lag { &mut finalised } else { &mut pending };
                for (t, b) in target.iter_mut().zip(&buf) {
                    *t += w * b;
                }
                idx = a;
            }
            if lo == 0 && s.has_initial_term() {
                let sl = &self.window[0];
                debug_assert_eq!(first, 0);
                s.initial(sl.positions[idx], sl.y, &mut buf);
                let target = if n == self.lag { &mut finalised } else { &mut pending };
                for (t, b) in target.iter_mut().zip(&buf) {
                    *t += w * b;
                }
            }
        }
        for (f, v) in self.frozen.iter_mut().zip(&finalised) {
            *f += v;
        }
        for ((e, f), p) in self.estimate.iter_mut().zip(&self.frozen).zip(&pending) {
            *e = f + p;
        }
        Ok(())
    }

    pub fn estimate(&self) -> &[f64] {
        &self.estimate
    }
}

/// Fixed-lag estimates `S_hat_n` for every `n` of a stored run.
pub fn fixedlag_additive<S: AdditiveFunctional + ?Sized>(
    output: &FilterOutput,
    s: &S,
    lag: usize,
) -> Result<Vec<Vec<f64>>> {
    let mut sm = FixedLagSmoother::new(s.dim(), lag);
    let mut out = Vec::with_capacity(output.systems.len());
    for (t, sys) in output.systems.iter().enumerate() {
        sm.update(s, sys, output.observations[t])?;
        out.push(sm.estimate().to_vec());
    }
    Ok(out)
}
