use std::fs;
use std::path::Path;
use std::process::Command;

use rand::Rng;
use sspe::rng::from_seed;
use sspe_cli::io::{read_observations, write_observations};
use sspe_cli::runner::{partition, write_failure_manifest};
use sspe_cli::{replicate_runner, run_experiment, ExperimentConfig, ExperimentId, Overrides};

const SMALL: &str = "
[algorithm]
n = [8]
t = [120]
record_every = 40
iters = 3
mws_n = 100
pg_n = 8
pg_iters = 40
burn_in = 5
grid_points = 11
grid_rounds = 1
";

fn config(
    id: ExperimentId,
    text: &str,
    out: &Path,
    replicates: usize,
    parallelism: usize,
) -> (ExperimentConfig, Vec<String>) {
    let o = Overrides {
        seed: Some(11),
        out: Some(out.to_path_buf()),
        replicates: Some(replicates),
        parallelism: Some(parallelism),
    };
    ExperimentConfig::from_toml(text, id, &o).unwrap()
}

fn run(id: ExperimentId, text: &str, out: &Path, replicates: usize, parallelism: usize) {
    let (cfg, d) = config(id, text, out, replicates, parallelism);
    let s = run_experiment(cfg, d).unwrap();
    assert_eq!(s.exit_code(), 0);
}

fn read(p: &Path) -> Vec<u8> {
    fs::read(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn replicate_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v = Vec::new();
    for rep in fs::read_dir(dir.join("replicates")).unwrap() {
        let rep = rep.unwrap().path();
        for f in fs::read_dir(&rep).unwrap() {
            let f = f.unwrap().path();
            v.push((f.strip_prefix(dir).unwrap().display().to_string(), read(&f)));
        }
    }
    v.sort();
    v
}

#[test]
fn same_seed_gives_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    for id in
        [ExperimentId::SmoothingBiasVar, ExperimentId::OfflineEm, ExperimentId::Degeneracy, ExperimentId::PgibbsCompare]
    {
        let a = tmp.path().join(format!("{}_a", id.name()));
        let b = tmp.path().join(format!("{}_b", id.name()));
        run(id, SMALL, &a, 3, 1);
        run(id, SMALL, &b, 3, 1);
        assert_eq!(read(&a.join("aggregate.csv")), read(&b.join("aggregate.csv")), "{}", id.name());
        assert_eq!(replicate_files(&a), replicate_files(&b), "{}", id.name());
        assert_eq!(read(&a.join("data.csv")), read(&b.join("data.csv")));
    }
}

#[test]
fn parallelism_does_not_change_results() {
    let tmp = tempfile::tempdir().unwrap();
    for id in [ExperimentId::SmoothingBiasVar, ExperimentId::OnlineEm, ExperimentId::PosteriorMcmcSmc] {
        let a = tmp.path().join(format!("{}_p1", id.name()));
        let b = tmp.path().join(format!("{}_p8", id.name()));
        run(id, SMALL, &a, 8, 1);
        run(id, SMALL, &b, 8, 8);
        assert_eq!(read(&a.join("aggregate.csv")), read(&b.join("aggregate.csv")), "{}", id.name());
        assert_eq!(replicate_files(&a), replicate_files(&b));
    }
}

#[test]
fn single_replicate_aggregate_is_that_replicate() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("one");
    run(ExperimentId::SmoothingBiasVar, SMALL, &out, 1, 1);
    let mut agg = csv::Reader::from_path(out.join("aggregate.csv")).unwrap();
    let mut rep = csv::Reader::from_path(out.join("replicates/rep_0000/traces.csv")).unwrap();
    let reps: Vec<csv::StringRecord> = rep.records().map(|r| r.unwrap()).collect();
    let mut rows = 0;
    for row in agg.records() {
        let row = row.unwrap();
        let n: usize = row[0].parse().unwrap();
        let label = format!("{}_N{}", &row[1], &row[2]);
        let bias: f64 = row[3].parse().unwrap();
        let mse: f64 = row[5].parse().unwrap();
        let exact: f64 = row[7].parse().unwrap();
        let est: f64 = reps.iter().find(|r| r[0] == *n.to_string() && r[1] == *label).unwrap()[3].parse().unwrap();
        assert_eq!(bias, est - exact);
        assert_eq!(mse, (est - exact) * (est - exact) / n as f64);
        assert_eq!(&row[4], "0.0000000000000000e0");
        rows += 1;
    }
    assert_eq!(rows, 2 * 3);
}

#[test]
fn one_forced_failure_is_recorded_and_others_complete() {
    let outcomes =
        replicate_runner(10, 3, 4, |r, seed| if r == 6 { Err(format!("forced failure {seed}")) } else { Ok(r * 2) });
    let (ok, failed) = partition(outcomes);
    assert_eq!(ok.len(), 9);
    assert!(ok.iter().all(|(r, v)| *v == r * 2 && *r != 6));
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0].replicate, 6);
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("failures.csv");
    write_failure_manifest(&path, &failed).unwrap();
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "6");
    assert!(rows[0][2].starts_with("forced failure"));
}

#[test]
fn observation_round_trip_is_bit_exact() {
    let mut rng = from_seed(5);
    let y: Vec<f64> = (0..1000)
        .map(|i| match i % 4 {
            0 => rng.random::<f64>(),
            1 => -rng.random::<f64>() * 1e300,
            2 => f64::from_bits(rng.random::<u64>() >> 2),
            _ => rng.random::<f64>() * 1e-300,
        })
        .collect();
    let mut buf = Vec::new();
    write_observations(&mut buf, &y).unwrap();
    let back = read_observations(buf.as_slice()).unwrap();
    assert_eq!(back.len(), y.len());
    for (a, b) in y.iter().zip(&back) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn observation_errors() {
    let e = read_observations("t,y\n".as_bytes()).unwrap_err();
    assert_eq!(e.to_string(), "no observations");
    assert_eq!(read_observations("".as_bytes()).unwrap_err().to_string(), "no observations");
    let e = read_observations("t,y\n0,1.0\n1,2.0\n3,0.5\n".as_bytes()).unwrap_err();
    assert_eq!(e.to_string(), "line 4: gap in t (expected 2, found 3)");
}

fn sspe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sspe"))
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let good = tmp.path().join("good.toml");
    fs::write(&good, SMALL).unwrap();
    let status = |args: &[&str]| sspe().args(args).status().unwrap().code().unwrap();
    let out = tmp.path().join("ok");
    let ok = status(&[
        "custom",
        "--config",
        good.to_str().unwrap(),
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
        "--replicates",
        "2",
    ]);
    assert_eq!(ok, 0);
    let meta: serde_json::Value = serde_json::from_slice(&read(&out.join("metadata.json"))).unwrap();
    assert_eq!(meta["replicate_seeds"].as_array().unwrap().len(), 2);
    assert_eq!(meta["config"]["seed"], 1);
    assert!(meta["defaulted"].as_array().unwrap().iter().any(|k| k == "model.rho"));

    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "[algorithm]\nparticles = 10\n").unwrap();
    let out = tmp.path().join("bad");
    assert_eq!(
        status(&["custom", "--config", bad.to_str().unwrap(), "--seed", "1", "--out", out.to_str().unwrap()]),
        2
    );
    assert_eq!(
        status(&["nonsense", "--config", good.to_str().unwrap(), "--seed", "1", "--out", out.to_str().unwrap()]),
        2
    );

    // Every replicate collapses: the observation density underflows for all particles.
    let obs = tmp.path().join("y.csv");
    fs::write(&obs, "t,y\n0,50.0\n1,-50.0\n2,50.0\n").unwrap();
    let collapse = tmp.path().join("collapse.toml");
    fs::write(
        &collapse,
        format!("observations = \"{}\"\n[model]\nsigma2 = 5e-324\n[algorithm]\nn = [5]\n", obs.display()),
    )
    .unwrap();
    let out = tmp.path().join("collapse");
    let code = status(&[
        "custom",
        "--config",
        collapse.to_str().unwrap(),
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
        "--replicates",
        "3",
    ]);
    assert_eq!(code, 1);
    let manifest = fs::read_to_string(out.join("failures.csv")).unwrap();
    assert_eq!(manifest.lines().count(), 4, "{manifest}");
    assert!(manifest.contains("collapse"));
}

#[test]
fn ingested_observations_set_the_horizon() {
    let tmp = tempfile::tempdir().unwrap();
    let obs = tmp.path().join("y.csv");
    let y: Vec<f64> = (0..31).map(|i| (i as f64 * 0.3).sin()).collect();
    let mut buf = Vec::new();
    write_observations(&mut buf, &y).unwrap();
    fs::write(&obs, buf).unwrap();
    let text = format!("observations = \"{}\"\n", obs.display());
    let out = tmp.path().join("o");
    let (cfg, d) = config(ExperimentId::Custom, &text, &out, 1, 1);
    let s = run_experiment(cfg, d).unwrap();
    assert_eq!(s.metadata.config.algorithm.t, vec![30]);
    assert_eq!(read(&out.join("data.csv")), {
        let mut b = Vec::new();
        write_observations(&mut b, &y).unwrap();
        b
    });
}
