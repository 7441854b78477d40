use pml_core::distribution::{discretize_distribution, sample_sequence};
use pml_core::oracle::{exact_log_profile_probability, profiles_of_length};
use pml_core::profile::{build_profile, log_multinomial_coefficient};
use pml_core::{DiscretizationGrid, Distribution, PmlError, Profile, PseudoDistribution};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn profile(e: &[(u64, u64)]) -> Profile {
    Profile::new(e.to_vec()).unwrap()
}

/// Pr(p, phi) by walking every sequence over the domain.
fn brute_force(weights: &[f64], target: &Profile) -> f64 {
    let d = weights.len();
    let n = target.n() as usize;
    let mut seq = vec![0usize; n];
    let mut total = 0.0;
    loop {
        let mut counts = vec![0u64; d];
        let mut p = 1.0;
        for &x in &seq {
            counts[x] += 1;
            p *= weights[x];
        }
        if p > 0.0 && Profile::from_counts(counts).ok().as_ref() == Some(target) {
            total += p;
        }
        let mut i = 0;
        loop {
            if i == n {
                return total;
            }
            seq[i] += 1;
            if seq[i] < d {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
    }
}

fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}

#[test]
fn build_profile_examples() {
    let p = build_profile(&[0, 1, 0, 2, 2]).unwrap();
    assert_eq!(p.entries(), &[(1, 1), (2, 2)]);
    assert_eq!((p.n(), p.k()), (5, 2));
    let p = build_profile(&[0, 0, 0]).unwrap();
    assert_eq!(p.entries(), &[(3, 1)]);
    assert_eq!((p.n(), p.k()), (3, 1));
    match build_profile(&[]) {
        Err(PmlError::Invalid(m)) => assert!(m.contains("empty sample")),
        other => panic!("expected an empty-sample error, got {other:?}"),
    }
}

#[test]
fn random_sequence_profile_recount() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let seq: Vec<usize> = (0..100).map(|_| rng.gen_range(0..17)).collect();
    let p = build_profile(&seq).unwrap();
    let total: u64 = p.entries().iter().map(|&(m, phi)| m * phi).sum();
    assert_eq!(total, 100);
    let mut tally = std::collections::HashMap::new();
    for &x in &seq {
        *tally.entry(x).or_insert(0u64) += 1;
    }
    let mut by_freq = std::collections::BTreeMap::new();
    for &c in tally.values() {
        *by_freq.entry(c).or_insert(0u64) += 1;
    }
    assert_eq!(p.entries(), by_freq.into_iter().collect::<Vec<_>>().as_slice());
}

#[test]
fn profile_validation() {
    assert!(Profile::new(vec![(2, 1), (1, 1)]).is_err());
    assert!(Profile::new(vec![(0, 1)]).is_err());
    assert!(Profile::new(vec![(1, 0)]).is_err());
}

#[test]
fn multinomial_examples() {
    assert!((log_multinomial_coefficient(&profile(&[(1, 3)])) - 6f64.ln()).abs() < 1e-12);
    assert!((log_multinomial_coefficient(&profile(&[(2, 2)])) - 6f64.ln()).abs() < 1e-12);
    assert!((log_multinomial_coefficient(&profile(&[(1, 2), (3, 1)])) - 20f64.ln()).abs() < 1e-12);
}

#[test]
fn multinomial_matches_integer_factorials() {
    for n in 1..=20 {
        for p in profiles_of_length(n) {
            let mut denom: u128 = 1;
            for &(m, phi) in p.entries() {
                denom *= factorial(m).pow(phi as u32);
            }
            let exact = (factorial(n) / denom) as f64;
            assert!((log_multinomial_coefficient(&p) - exact.ln()).abs() < 1e-9, "{p:?}");
        }
    }
}

#[test]
fn oracle_examples() {
    let u2 = PseudoDistribution::new(vec![0.5, 0.5]).unwrap();
    let half = 0.5f64.ln();
    assert!((exact_log_profile_probability(&u2, &profile(&[(1, 2)])).unwrap() - half).abs() < 1e-12);
    assert!((exact_log_profile_probability(&u2, &profile(&[(2, 1)])).unwrap() - half).abs() < 1e-12);
    let point = PseudoDistribution::new(vec![1.0]).unwrap();
    assert!(exact_log_profile_probability(&point, &profile(&[(2, 1)])).unwrap().abs() < 1e-12);
}

#[test]
fn oracle_scale_limit() {
    let u = PseudoDistribution::new(vec![0.5, 0.5]).unwrap();
    match exact_log_profile_probability(&u, &profile(&[(40, 1)])) {
        Err(PmlError::TooLarge(m)) => assert!(m.contains("oracle scale exceeded")),
        other => panic!("expected a scale error, got {other:?}"),
    }
}

#[test]
fn oracle_matches_sequence_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..25 {
        let d = rng.gen_range(1..=4);
        // A few repeated weights exercise the class grouping.
        let levels = [0.05, 0.1, 0.2, 0.3];
        let weights: Vec<f64> = (0..d).map(|_| levels[rng.gen_range(0..4)]).collect();
        let n = rng.gen_range(1..=6);
        let q = PseudoDistribution::new(weights.clone()).unwrap_or_else(|_| {
            let s: f64 = weights.iter().sum();
            PseudoDistribution::new(weights.iter().map(|w| w / s).collect()).unwrap()
        });
        for p in profiles_of_length(n) {
            let want = brute_force(q.weights(), &p);
            let got = exact_log_profile_probability(&q, &p).unwrap();
            if want == 0.0 {
                assert_eq!(got, f64::NEG_INFINITY);
            } else {
                assert!((got - want.ln()).abs() < 1e-9, "{:?} {p:?}", q.weights());
            }
        }
    }
}

#[test]
fn profile_probabilities_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=10 {
        let d = rng.gen_range(1..=8);
        let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(0.05..1.0)).collect();
        let s: f64 = raw.iter().sum();
        let dist = Distribution::new(raw.iter().map(|w| w / s).collect()).unwrap();
        let total: f64 = profiles_of_length(n)
            .iter()
            .map(|p| exact_log_profile_probability(&dist.as_pseudo(), p).unwrap().exp())
            .sum();
        assert!((total - 1.0).abs() < 1e-9, "n={n} total={total}");
    }
}

#[test]
fn grid_examples() {
    let g = DiscretizationGrid::geometric(0.5, 1.0 / 200.0, 1.0).unwrap();
    let v = g.values();
    for (i, &r) in v[..v.len() - 1].iter().enumerate() {
        assert!((r - 1.5f64.powi(i as i32) / 200.0).abs() < 1e-15);
    }
    assert_eq!(*v.last().unwrap(), 1.0);
    assert!(v[v.len() - 2] < 1.0);
    let single = DiscretizationGrid::geometric(0.3, 0.5, 0.5).unwrap();
    assert_eq!(single.values(), &[0.5]);
    assert!(DiscretizationGrid::geometric(0.1, 0.6, 0.5).is_err());
}

#[test]
fn default_grid_ratio() {
    for &(n, k) in &[(10u64, 2usize), (100, 5), (1000, 12)] {
        let g = DiscretizationGrid::default_v1(n, k).unwrap();
        let alpha = g.alpha().unwrap();
        let nf = n as f64;
        assert!((alpha - (k as f64 * nf.ln() / nf).min(0.5)).abs() < 1e-15);
        assert!((g.min() - 1.0 / (2.0 * nf * nf)).abs() < 1e-18);
        let v = g.values();
        for w in v[..v.len() - 1].windows(2) {
            assert!((w[1] / w[0] - (1.0 + alpha)).abs() < 1e-9);
        }
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        let bound = ((2.0 * nf * nf).ln() / (1.0 + alpha).ln()).ceil() as usize + 1;
        assert!(v.len() <= bound);
    }
}

#[test]
fn discretize_examples() {
    let g = DiscretizationGrid::from_levels(vec![0.25, 0.5, 1.0]).unwrap();
    let on = Distribution::new(vec![0.25, 0.25, 0.5]).unwrap();
    assert_eq!(discretize_distribution(&on, &g).unwrap().weights(), on.weights());
    let d = Distribution::new(vec![0.7, 0.2, 0.1]).unwrap();
    // Weights under the smallest level are raised to it.
    assert_eq!(discretize_distribution(&d, &g).unwrap().weights(), &[0.5, 0.25, 0.25]);
}

#[test]
fn discretization_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..40 {
        let raw: Vec<f64> = (0..4).map(|_| rng.gen_range(0.05..1.0)).collect();
        let s: f64 = raw.iter().sum();
        let dist = Distribution::new(raw.iter().map(|w| w / s).collect()).unwrap();
        let n = 4u64;
        let alpha = 0.25;
        let rmin = dist.weights().iter().copied().fold(1.0, f64::min);
        let grid = DiscretizationGrid::geometric(alpha, rmin, 1.0).unwrap();
        let q = discretize_distribution(&dist, &grid).unwrap();
        assert!(q.weights().iter().zip(dist.weights()).all(|(a, b)| a <= b));
        for p in profiles_of_length(n) {
            let hi = exact_log_profile_probability(&dist.as_pseudo(), &p).unwrap();
            let lo = exact_log_profile_probability(&q, &p).unwrap();
            assert!(lo <= hi + 1e-12, "{p:?}");
            assert!(lo >= hi - alpha * n as f64 - 6.0, "{p:?} {lo} {hi}");
        }
    }
}

#[test]
fn sampling_examples() {
    let point = Distribution::new(vec![1.0]).unwrap();
    assert_eq!(sample_sequence(&point, 3, 0).unwrap(), vec![0, 0, 0]);
    let u = Distribution::uniform(2).unwrap();
    let n = 100_000;
    let s = sample_sequence(&u, n, 17).unwrap();
    let ones = s.iter().filter(|&&x| x == 1).count() as f64;
    assert!((ones - n as f64 / 2.0).abs() <= 3.0 * (n as f64 / 4.0).sqrt());
    assert_eq!(s, sample_sequence(&u, n, 17).unwrap());
}

proptest! {
    #[test]
    fn profile_total_is_sequence_length(seq in prop::collection::vec(0usize..12, 1..200)) {
        let p = build_profile(&seq).unwrap();
        let total: u64 = p.entries().iter().map(|&(m, phi)| m * phi).sum();
        prop_assert_eq!(total, seq.len() as u64);
        prop_assert_eq!(p.n(), seq.len() as u64);
        prop_assert!(p.entries().windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn discretize_never_raises_weights_above_floor(raw in prop::collection::vec(0.01f64..1.0, 1..10)) {
        let s: f64 = raw.iter().sum();
        let dist = Distribution::new(raw.iter().map(|w| w / s).collect()).unwrap();
        let grid = DiscretizationGrid::geometric(0.2, 1e-3, 1.0).unwrap();
        let q = discretize_distribution(&dist, &grid).unwrap();
        for (a, b) in q.weights().iter().zip(dist.weights()) {
            prop_assert!(a <= b || *a == grid.min());
        }
        prop_assert!(q.mass() <= 1.0 + 1e-9);
    }
}
