//! Forward-only smoothing: per-particle value functions
//!
//! ```text
//! V_n(X_n^j) = sum_i B_n^j(i) [V_{n-1}(X_{n-1}^i) + s_n(X_{n-1}^i, X_n^j)],
//! B_n^j(i) ∝ W_{n-1}^i f(X_n^j | X_{n-1}^i)
//! ```
//!
//! and `S_hat_n = sum_j W_n^j V_n(X_n^j)`. The result coincides with FFBSm on
//! the same particle systems while needing only `O(N * dim)` memory.

use rand::Rng;

use super::{backward_row, initial_values, log_norm_weights, AdditiveFunctional, OnlineSmoother, Weighting};
use crate::error::{Error, Result};
use crate::filter::FilterOutput;
use crate::model::StateSpaceModel;
use crate::particle::ParticleSystem;

#[derive(Debug, Clone)]
pub struct ForwardSmoother {
    dim: usize,
    values: Vec<f64>,
    next: Vec<f64>,
    row: Vec<f64>,
    pair: Vec<f64>,
}

impl ForwardSmoother {
    pub fn new(dim: usize) -> Self {
        ForwardSmoother { dim, values: Vec::new(), next: Vec::new(), row: Vec::new(), pair: vec![0.0; dim] }
    }
}

impl OnlineSmoother for ForwardSmoother {
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
        let ln_w = log_norm_weights(prev);
        let quad = s.quadratic();
        self.next.clear();
        self.next.resize(cur.len() * dim, 0.0);
        let Weighting { keep, add } = weighting;
        for j in 0..cur.len() {
            let x = cur.positions[j];
            if !backward_row(model, &prev.positions, &ln_w, x, &mut self.row) {
                if cur.norm_weights[j] > 0.0 {
                    return Err(Error::UnreachableParticle { time: cur.time_index, index: j });
                }
                continue;
            }
            let out = &mut self.next[j * dim..(j + 1) * dim];
            // Carried values.
            for (i, b) in self.row.iter().enumerate() {
                if *b == 0.0 {
                    continue;
                }
                let v = &self.values[i * dim..(i + 1) * dim];
                for (o, vi) in out.iter_mut().zip(v) {
                    *o += b * vi;
                }
            }
            if keep != 1.0 {
                out.iter_mut().for_each(|o| *o *= keep);
            }
            // New term.
            match quad {
                Some(q) => {
                    let (mut m1, mut m2) = (0.0, 0.0);
                    for (b, xp) in self.row.iter().zip(&prev.positions) {
                        let bx = b * xp;
                        m1 += bx;
                        m2 += bx * xp;
                    }
                    q.eval_backward_moments(1.0, m1, m2, x, y, &mut self.pair);
                    for (o, p) in out.iter_mut().zip(&self.pair) {
                        *o += add * p;
                    }
                }
                None => {
                    let mut acc = vec![0.0; dim];
                    for (b, xp) in self.row.iter().zip(&prev.positions) {
                        if *b == 0.0 {
                            continue;
                        }
                        s.eval(cur.time_index, *xp, x, y, &mut self.pair);
                        for (a, p) in acc.iter_mut().zip(&self.pair) {
                            *a += b * p;
                        }
                    }
                    for (o, a) in out.iter_mut().zip(&acc) {
                        *o += add * a;
                    }
                }
            }
        }
        std::mem::swap(&mut self.values, &mut self.next);
        Ok(())
    }
}

/// Forward smoothing over a stored filter run; returns `S_hat_n` for every `n`.
pub fn forward_smooth<M, S>(output: &FilterOutput, model: &M, s: &S) -> Result<Vec<Vec<f64>>>
where
    M: StateSpaceModel + ?Sized,
    S: AdditiveFunctional + ?Sized,
{
    let mut sm = ForwardSmoother::new(s.dim());
    let mut rng = crate::rng::from_seed(0);
    let mut out = Vec::with_capacity(output.systems.len());
    for (t, sys) in output.systems.iter().enumerate() {
        let prev = if t == 0 { None } else { Some(&output.systems[t - 1]) };
        sm.update(model, s, prev, sys, output.observations[t], Weighting::PLAIN, &mut rng)?;
        out.push(sm.estimate(sys));
    }
    Ok(out)
}
