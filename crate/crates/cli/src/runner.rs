//! Replicate execution with bounded concurrency.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use rayon::prelude::*;
use sspe::rng::replicate_seed;

/// Result of one replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome<T> {
    pub replicate: usize,
    pub seed: u64,
    pub result: Result<T, String>,
}

/// Runs `job(replicate, seed)` for `replicates` indices on at most
/// `parallelism` threads. The seed of replicate `r` is
/// `replicate_seed(master_seed, r)`, so results do not depend on scheduling.
/// A failing or panicking job is recorded and the others proceed. Outcomes
/// are returned in replicate order.
pub fn replicate_runner<T, F>(replicates: usize, master_seed: u64, parallelism: usize, job: F) -> Vec<Outcome<T>>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T, String> + Sync,
{
    let run = |r: usize| {
        let seed = replicate_seed(master_seed, r as u64);
        let result = match catch_unwind(AssertUnwindSafe(|| job(r, seed))) {
            Ok(res) => res,
            Err(panic) => Err(panic_message(panic.as_ref())),
        };
        Outcome { replicate: r, seed, result }
    };
    if parallelism <= 1 {
        return (0..replicates).map(run).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(parallelism).build().expect("thread pool");
    pool.install(|| (0..replicates).into_par_iter().map(run).collect())
}

fn panic_message(p: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        format!("panic: {s}")
    } else if let Some(s) = p.downcast_ref::<String>() {
        format!("panic: {s}")
    } else {
        "panic".into()
    }
}

/// A replicate that did not complete.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Failure {
    pub replicate: usize,
    pub seed: u64,
    pub error: String,
}

/// Splits outcomes into completed results and failures.
pub fn partition<T>(outcomes: Vec<Outcome<T>>) -> (Vec<(usize, T)>, Vec<Failure>) {
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for o in outcomes {
        match o.result {
            Ok(v) => ok.push((o.replicate, v)),
            Err(error) => failed.push(Failure { replicate: o.replicate, seed: o.seed, error }),
        }
    }
    (ok, failed)
}

/// Writes CSV `replicate,seed,error`.
pub fn write_failure_manifest(path: &Path, failures: &[Failure]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["replicate", "seed", "error"])?;
    for f in failures {
        w.write_record([f.replicate.to_string(), f.seed.to_string(), f.error.clone()])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outcomes_come_back_in_order() {
        let out = replicate_runner(20, 5, 4, |r, seed| Ok((r, seed)));
        for (i, o) in out.iter().enumerate() {
            assert_eq!(o.replicate, i);
            assert_eq!(o.result, Ok((i, replicate_seed(5, i as u64))));
        }
    }

    #[test]
    fn panics_become_failures() {
        let out = replicate_runner(3, 0, 2, |r, _| if r == 1 { panic!("boom") } else { Ok(r) });
        let (ok, failed) = partition(out);
        assert_eq!(ok.len(), 2);
        assert_eq!(failed.len(), 1);
        assert!(failed[0].error.contains("boom"));
    }
}
