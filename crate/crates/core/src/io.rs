//! Plain-text serialisation helpers shared by the CSV exporters.

use std::io::Write;

/// Formats with 17 significant digits, which round-trips every `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Writes a trajectory as `t,x,y`.
pub fn write_trajectory<W: Write>(mut w: W, states: &[f64], observations: &[f64]) -> std::io::Result<()> {
    writeln!(w, "t,x,y")?;
    for (t, (x, y)) in states.iter().zip(observations).enumerate() {
        writeln!(w, "{t},{},{}", fmt_f64(*x), fmt_f64(*y))?;
    }
    Ok(())
}

/// Writes an estimate trace as `iter_or_n,rho,tau2,sigma2,exact_loglik`;
/// the last column is left empty when no exact value is available.
pub fn write_theta_trace<W: Write>(
    mut w: W,
    thetas: &[crate::model::Theta],
    exact_loglik: Option<&[f64]>,
) -> std::io::Result<()> {
    writeln!(w, "iter_or_n,rho,tau2,sigma2,exact_loglik")?;
    for (i, t) in thetas.iter().enumerate() {
        let ll = exact_loglik.and_then(|v| v.get(i)).map(|v| fmt_f64(*v)).unwrap_or_default();
        writeln!(w, "{i},{},{},{},{ll}", fmt_f64(t.rho), fmt_f64(t.tau2), fmt_f64(t.sigma2))?;
    }
    Ok(())
}
