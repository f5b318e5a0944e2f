//! Forward filtering backward smoothing.
//!
//! Backward kernel rows `B_n^j(i) = W_{n-1}^i f(X_n^j | X_{n-1}^i) / sum_l (...)`
//! are normalised per `(n, j)` with a log-sum-exp, then
//!
//! ```text
//! W_{n-1|T}^i = sum_j W_{n|T}^j B_n^j(i),      P_n(i, j) = W_{n|T}^j B_n^j(i)
//! S_hat_T = sum_n sum_{i,j} P_n(i, j) s_n(X_{n-1}^i, X_n^j)
//! ```

use super::{backward_row, log_norm_weights, AdditiveFunctional};
use crate::error::{Error, Result};
use crate::filter::FilterOutput;
use crate::model::StateSpaceModel;

#[derive(Debug, Clone, PartialEq)]
pub struct FfbsmResult {
    /// `weights[n][i] = W_{n|T}^i`.
    pub weights: Vec<Vec<f64>>,
    /// `S_hat_T` (empty when no functional was given).
    pub estimate: Vec<f64>,
}

/// Backward weights and, when `s` is given, the smoothed additive functional.
pub fn ffbsm<M, S>(output: &FilterOutput, model: &M, s: Option<&S>) -> Result<FfbsmResult>
where
    M: StateSpaceModel + ?Sized,
    S: AdditiveFunctional + ?Sized,
{
    let t_max = output.horizon();
    let dim = s.map_or(0, |s| s.dim());
    let mut weights = vec![Vec::new(); t_max + 1];
    weights[t_max] = output.systems[t_max].norm_weights.clone();
    let mut estimate = vec![0.0; dim];
    let mut row = Vec::new();
    let mut pair = vec![0.0; dim];
    let quad = s.and_then(|s| s.quadratic());
    for n in (1..=t_max).rev() {
        let prev = &output.systems[n - 1];
        let cur = &output.systems[n];
        let ln_w = log_norm_weights(prev);
        let y = output.observations[n];
        let mut acc = vec![0.0; prev.len()];
        #[allow(clippy::needless_range_loop)]
        for j in 0..cur.len() {
            let wj = weights[n][j];
            let x = cur.positions[j];
            if !backward_row(model, &prev.positions, &ln_w, x, &mut row) {
                if wj > 0.0 {
                    return Err(Error::UnreachableParticle { time: n, index: j });
                }
                continue;
            }
            if wj == 0.0 {
                continue;
            }
            for (a, b) in acc.iter_mut().zip(&row) {
                *a += wj * b;
            }
            if let Some(s) = s {
                match quad {
                    Some(q) => {
                        let (mut m1, mut m2) = (0.0, 0.0);
                        for (b, xp) in row.iter().zip(&prev.positions) {
                            let bx = b * xp;
                            m1 += bx;
                            m2 += bx * xp;
                        }
                        q.eval_backward_moments(1.0, m1, m2, x, y, &mut pair);
                        for (e, p) in estimate.iter_mut().zip(&pair) {
                            *e += wj * p;
                        }
                    }
                    None => {
                        for (b, xp) in row.iter().zip(&prev.positions) {
                            if *b == 0.0 {
                                continue;
                            }
                            s.eval(n, *xp, x, y, &mut pair);
                            for (e, p) in estimate.iter_mut().zip(&pair) {
                                *e += wj * b * p;
                            }
                        }
                    }
                }
            }
        }
        weights[n - 1] = acc;
    }
    if let Some(s) = s {
        if s.has_initial_term() {
            let y0 = output.observations[0];
            for (x0, w) in output.systems[0].positions.iter().zip(&weights[0]) {
                s.initial(*x0, y0, &mut pair);
                for (e, p) in estimate.iter_mut().zip(&pair) {
                    *e += w * p;
                }
            }
        }
    }
    Ok(FfbsmResult { weights, estimate })
}

/// Backward smoothing weights `W_{n|T}` for every `n`.
pub fn ffbsm_weights<M: StateSpaceModel + ?Sized>(output: &FilterOutput, model: &M) -> Result<Vec<Vec<f64>>> {
    Ok(ffbsm::<M, super::QuadraticFunctional>(output, model, None)?.weights)
}

/// `S_hat_T` under the FFBSm pair law.
pub fn ffbsm_additive<M, S>(output: &FilterOutput, model: &M, s: &S) -> Result<Vec<f64>>
where
    M: StateSpaceModel + ?Sized,
    S: AdditiveFunctional + ?Sized,
{
    Ok(ffbsm(output, model, Some(s))?.estimate)
}
