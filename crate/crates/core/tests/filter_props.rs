#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use rand::Rng;
use sspe::filter::filter_step;
use sspe::particle::offspring_counts;
use sspe::prelude::*;
use sspe::rng::{from_seed, replicate_seed, substream};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalized_weights_are_a_softmax(logw in prop::collection::vec(-50.0f64..50.0, 1..60), shift in -1e3f64..1e3) {
        let a = normalize_log_weights(&logw, 0).unwrap();
        let shifted: Vec<f64> = logw.iter().map(|v| v + shift).collect();
        let b = normalize_log_weights(&shifted, 0).unwrap();
        prop_assert!((a.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = logw.iter().map(|v| (v - max).exp()).sum();
        for (i, w) in a.weights.iter().enumerate() {
            prop_assert!(*w >= 0.0);
            prop_assert!((w - (logw[i] - max).exp() / z).abs() < 1e-12);
            prop_assert!((w - b.weights[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn ess_is_bounded_and_permutation_invariant(logw in prop::collection::vec(-20.0f64..20.0, 1..80), seed in 0u64..1000) {
        let w = normalize_log_weights(&logw, 0).unwrap().weights;
        let e = ess(&w);
        prop_assert!(e >= 1.0 - 1e-9 && e <= w.len() as f64 + 1e-9);
        let mut perm = w.clone();
        let mut rng = from_seed(seed);
        for i in (1..perm.len()).rev() {
            let j = rng.random_range(0..=i);
            perm.swap(i, j);
        }
        prop_assert!((ess(&perm) - e).abs() < 1e-9 * e);
    }

    #[test]
    fn systematic_counts_are_within_one(logw in prop::collection::vec(-5.0f64..5.0, 1..40), n_out in 1usize..200, seed in 0u64..1000) {
        let w = normalize_log_weights(&logw, 0).unwrap().weights;
        let idx = resample(&w, n_out, ResamplingScheme::Systematic, &mut from_seed(seed));
        prop_assert_eq!(idx.len(), n_out);
        let counts = offspring_counts(&idx, w.len());
        for (c, wi) in counts.iter().zip(&w) {
            prop_assert!((*c as f64 - n_out as f64 * wi).abs() < 1.0 + 1e-9);
        }
    }

    #[test]
    fn filter_output_paths_reconstruct(seed in 0u64..200, n in 1usize..30, t in 1usize..20) {
        let theta = Theta::new(0.7, 0.4, 0.9).unwrap();
        let data = simulate_lgssm(&theta, InitialLaw::Stationary, t, seed).unwrap();
        let model = lg_densities(theta, InitialLaw::Stationary).unwrap();
        let out = run_filter(&model, &data.observations, n, &FilterOptions::default().with_trajectories(), &mut from_seed(seed)).unwrap();
        let total: f64 = out.loglik_increments.iter().sum();
        prop_assert!((total - out.loglik()).abs() < 1e-12);
        for (i, path) in out.trajectories.as_ref().unwrap().iter().enumerate() {
            prop_assert_eq!(path.len(), t + 1);
            prop_assert_eq!(path[t], out.systems[t].positions[i]);
        }
        for sys in &out.systems {
            prop_assert!((sys.norm_weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(sys.ancestors.iter().all(|&a| a < n));
        }
    }
}

#[test]
fn resampling_is_unbiased_for_both_schemes() {
    let mut wrng = from_seed(99);
    for v in 0..10 {
        let k = 2 + v % 5;
        let raw: Vec<f64> = (0..k).map(|_| wrng.random_range(0.05..1.0)).collect();
        let s: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / s).collect();
        for scheme in [ResamplingScheme::Multinomial, ResamplingScheme::Systematic] {
            let (n_out, trials) = (10usize, 100_000usize);
            let mut rng = substream(replicate_seed(1000, v as u64), scheme as u64);
            let mut sum = vec![0.0; k];
            let mut sq = vec![0.0; k];
            for _ in 0..trials {
                let c = offspring_counts(&resample(&w, n_out, scheme, &mut rng), k);
                for i in 0..k {
                    sum[i] += c[i] as f64;
                    sq[i] += (c[i] * c[i]) as f64;
                }
            }
            for i in 0..k {
                let m = sum[i] / trials as f64;
                let var = (sq[i] / trials as f64 - m * m).max(0.0);
                let se = (var / trials as f64).sqrt();
                let target = n_out as f64 * w[i];
                assert!((m - target).abs() <= 3.0 * se + 1e-12, "{scheme:?} w={w:?} i={i}: {m} vs {target}");
            }
        }
    }
}

/// Delegates to the optimal-proposal model but drops the predictive factor.
struct Sisr(LinearGaussian);

impl StateSpaceModel for Sisr {
    fn init_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.0.init_sample(rng)
    }
    fn init_logpdf(&self, x0: f64) -> f64 {
        self.0.init_logpdf(x0)
    }
    fn trans_sample<R: Rng + ?Sized>(&self, x: f64, rng: &mut R) -> f64 {
        self.0.trans_sample(x, rng)
    }
    fn trans_logpdf(&self, x_new: f64, x: f64) -> f64 {
        self.0.trans_logpdf(x_new, x)
    }
    fn obs_logpdf(&self, y: f64, x: f64) -> f64 {
        self.0.obs_logpdf(y, x)
    }
    fn init_proposal_sample<R: Rng + ?Sized>(&self, y0: f64, rng: &mut R) -> f64 {
        self.0.init_proposal_sample(y0, rng)
    }
    fn init_proposal_logpdf(&self, x0: f64, y0: f64) -> f64 {
        self.0.init_proposal_logpdf(x0, y0)
    }
    fn proposal_sample<R: Rng + ?Sized>(&self, y: f64, x: f64, rng: &mut R) -> f64 {
        self.0.proposal_sample(y, x, rng)
    }
    fn proposal_logpdf(&self, x_new: f64, y: f64, x: f64) -> f64 {
        self.0.proposal_logpdf(x_new, y, x)
    }
}

#[test]
fn unit_predictive_factor_reduces_to_sisr() {
    let theta = Theta::new(0.8, 0.5, 1.0).unwrap();
    let y = simulate_lgssm(&theta, InitialLaw::Stationary, 25, 4).unwrap().observations;
    let model = Sisr(lg_optimal_proposal(theta, InitialLaw::Stationary).unwrap());
    let n = 40;
    let out = run_filter(&model, &y, n, &FilterOptions::default(), &mut from_seed(17)).unwrap();

    // Hand-written SISR with the same draws.
    let mut rng = from_seed(17);
    let mut x: Vec<f64> = (0..n).map(|_| model.init_proposal_sample(y[0], &mut rng)).collect();
    let lw: Vec<f64> = x.iter().map(|&v| model.initial_logweight(y[0], v)).collect();
    let mut norm = normalize_log_weights(&lw, 0).unwrap();
    let mut ll = norm.log_mean_weight;
    for t in 1..y.len() {
        let anc = resample(&norm.weights, n, ResamplingScheme::Multinomial, &mut rng);
        let prev = x.clone();
        x = anc.iter().map(|&a| model.proposal_sample(y[t], prev[a], &mut rng)).collect();
        let lw: Vec<f64> = anc.iter().zip(&x).map(|(&a, &v)| model.incremental_logweight(y[t], prev[a], v)).collect();
        norm = normalize_log_weights(&lw, t).unwrap();
        ll += norm.log_mean_weight;
        assert_eq!(out.systems[t].positions, x);
    }
    assert!((out.loglik() - ll).abs() < 1e-10);
}

#[test]
fn single_particle_increment_is_the_log_weight() {
    let theta = Theta::new(0.8, 0.1, 1.0).unwrap();
    let y = simulate_lgssm(&theta, InitialLaw::Stationary, 10, 2).unwrap().observations;
    let model = lg_densities(theta, InitialLaw::Stationary).unwrap();
    let out = run_filter(&model, &y, 1, &FilterOptions::default(), &mut from_seed(3)).unwrap();
    for t in 0..y.len() {
        let inc = out.loglik_increments[t];
        assert!((inc - out.systems[t].log_weights[0]).abs() < 1e-12);
    }
}

#[test]
fn optimal_apf_matches_kalman() {
    let theta = Theta::new(0.8, 0.1, 1.0).unwrap();
    let y = simulate_lgssm(&theta, InitialLaw::Stationary, 50, 6).unwrap().observations;
    let model = lg_optimal_proposal(theta, InitialLaw::Stationary).unwrap();
    let exact = kalman_loglik(&theta, InitialLaw::Stationary, &y).unwrap();
    let est: Vec<f64> = (0..30)
        .map(|r| run_filter(&model, &y, 5000, &FilterOptions::default(), &mut substream(r, 1)).unwrap().loglik())
        .collect();
    let sd = sspe::stats::std_dev(&est);
    assert!((est[0] - exact).abs() < 3.0 * sd.max(1e-6), "{} vs {exact} (sd {sd})", est[0]);
}

#[test]
fn likelihood_estimate_is_unbiased_for_each_variant() {
    let theta = Theta::new(0.8, 0.1, 1.0).unwrap();
    let y = simulate_lgssm(&theta, InitialLaw::Stationary, 20, 1).unwrap().observations;
    let exact = kalman_loglik(&theta, InitialLaw::Stationary, &y).unwrap();
    let boot = lg_densities(theta, InitialLaw::Stationary).unwrap();
    let opt = lg_optimal_proposal(theta, InitialLaw::Stationary).unwrap();
    let sisr = Sisr(opt);
    let reps = 2000u64;
    let check = |name: &str, f: &dyn Fn(u64) -> f64| {
        let ratios: Vec<f64> = (0..reps).map(|r| (f(r) - exact).exp()).collect();
        let m = sspe::stats::mean(&ratios);
        let se = sspe::stats::std_error(&ratios);
        assert!((m - 1.0).abs() < 3.0 * se, "{name}: mean ratio {m} (se {se})");
    };
    let opts = FilterOptions::default();
    let trig = FilterOptions::default().with_ess_trigger();
    check("bootstrap", &|r| {
        run_filter(&boot, &y, 100, &opts, &mut substream(replicate_seed(1, r), 1)).unwrap().loglik()
    });
    check("apf", &|r| run_filter(&opt, &y, 100, &opts, &mut substream(replicate_seed(2, r), 1)).unwrap().loglik());
    check("sisr", &|r| run_filter(&sisr, &y, 100, &opts, &mut substream(replicate_seed(3, r), 1)).unwrap().loglik());
    check("bootstrap+ess", &|r| {
        run_filter(&boot, &y, 100, &trig, &mut substream(replicate_seed(4, r), 1)).unwrap().loglik()
    });
    let sys = FilterOptions { scheme: ResamplingScheme::Systematic, ..FilterOptions::default() };
    check("bootstrap+systematic", &|r| {
        run_filter(&boot, &y, 100, &sys, &mut substream(replicate_seed(5, r), 1)).unwrap().loglik()
    });
}

#[test]
fn uninformative_observations_give_flat_weights() {
    let theta = Theta::new(0.8, 0.1, 1e8).unwrap();
    let y = vec![0.3, -1.0, 2.0, 0.5];
    let model = lg_densities(theta, InitialLaw::Stationary).unwrap();
    let out = run_filter(&model, &y, 200, &FilterOptions::default(), &mut from_seed(1)).unwrap();
    for sys in &out.systems {
        let max = sys.norm_weights.iter().copied().fold(0.0, f64::max);
        let min = sys.norm_weights.iter().copied().fold(1.0, f64::min);
        assert!(max / min <= 1.01);
    }
}

#[test]
fn loglik_variance_grows_with_horizon() {
    let theta = Theta::new(0.8, 0.1, 1.0).unwrap();
    let y = simulate_lgssm(&theta, InitialLaw::Stationary, 2000, 5).unwrap().observations;
    let model = lg_densities(theta, InitialLaw::Stationary).unwrap();
    let (mut at500, mut at2000) = (Vec::new(), Vec::new());
    for r in 0..500u64 {
        let mut pf = ParticleFilter::new(100, FilterOptions::default()).unwrap();
        let mut rng = substream(replicate_seed(8, r), 1);
        for (t, &yt) in y.iter().enumerate() {
            pf.step(&model, yt, &mut rng).unwrap();
            if t == 500 {
                at500.push(pf.loglik());
            }
        }
        at2000.push(pf.loglik());
    }
    assert!(sspe::stats::variance(&at2000) > sspe::stats::variance(&at500));
}

#[test]
fn filtered_mean_error_shrinks_with_n() {
    let theta = Theta::new(0.8, 0.5, 1.0).unwrap();
    let y = simulate_lgssm(&theta, InitialLaw::Stationary, 50, 11).unwrap().observations;
    let kf = kalman_filter(&theta, InitialLaw::Stationary, &y).unwrap();
    let model = lg_densities(theta, InitialLaw::Stationary).unwrap();
    let err = |n: usize| {
        let mut total = 0.0;
        for r in 0..100u64 {
            let out =
                run_filter(&model, &y, n, &FilterOptions::default(), &mut substream(replicate_seed(n as u64, r), 1))
                    .unwrap();
            total +=
                out.systems.iter().zip(&kf.filt_mean).map(|(s, m)| (s.mean() - m).abs()).sum::<f64>() / y.len() as f64;
        }
        total / 100.0
    };
    let (a, b, c) = (err(50), err(200), err(800));
    assert!(a > b && b > c, "{a} {b} {c}");
}

#[test]
fn optimal_weights_vary_less_than_bootstrap() {
    let theta = Theta::new(0.8, 1.0, 0.2).unwrap();
    let y = simulate_lgssm(&theta, InitialLaw::Stationary, 30, 2).unwrap().observations;
    let boot = lg_densities(theta, InitialLaw::Stationary).unwrap();
    let opt = lg_optimal_proposal(theta, InitialLaw::Stationary).unwrap();
    let wvar = |sys: &ParticleSystem| sspe::stats::variance(&sys.norm_weights);
    let (mut vb, mut vo) = (0.0, 0.0);
    for r in 0..100u64 {
        let ob = run_filter(&boot, &y, 200, &FilterOptions::default(), &mut substream(r, 1)).unwrap();
        let oo = run_filter(&opt, &y, 200, &FilterOptions::default(), &mut substream(r, 2)).unwrap();
        vb += ob.systems[1..].iter().map(wvar).sum::<f64>();
        vo += oo.systems[1..].iter().map(wvar).sum::<f64>();
    }
    assert!(vo <= vb, "{vo} vs {vb}");
}

#[test]
fn chained_filter_steps_match_a_full_run() {
    let theta = Theta::new(0.5, 1.0, 1.0).unwrap();
    let y = simulate_lgssm(&theta, InitialLaw::Stationary, 10, 3).unwrap().observations;
    let model = lg_densities(theta, InitialLaw::Stationary).unwrap();
    let opts = FilterOptions::default();
    let full = run_filter(&model, &y, 25, &opts, &mut from_seed(4)).unwrap();
    let mut rng = from_seed(4);
    let (mut sys, mut ll) = filter_step(None, &model, y[0], 25, &opts, &mut rng).unwrap();
    for &yt in &y[1..] {
        let (next, inc) = filter_step(Some(&sys), &model, yt, 25, &opts, &mut rng).unwrap();
        sys = next;
        ll += inc;
    }
    assert_eq!(sys.positions, full.systems.last().unwrap().positions);
    assert!((ll - full.loglik()).abs() < 1e-12);
}
