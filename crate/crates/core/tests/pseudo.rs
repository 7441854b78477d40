use pml_core::approx::PmlOptions;
use pml_core::distribution::sample_sequence;
use pml_core::oracle::exact_log_profile_probability;
use pml_core::profile::PseudoProfile;
use pml_core::pseudo::*;
use pml_core::synth::{distance_to_uniformity, make_distribution, DistributionKind};
use pml_core::{Distribution, Profile, PseudoDistribution};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn window(lo: u64, hi: u64) -> FrequencyWindow {
    FrequencyWindow::new(lo, hi).unwrap()
}

fn rmse(xs: &[f64], truth: f64) -> f64 {
    (xs.iter().map(|x| (x - truth).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

#[test]
fn window_validation() {
    assert!(FrequencyWindow::new(3, 2).is_err());
    let w = FrequencyWindow::default();
    assert_eq!((w.lo(), w.hi()), (0, 18));
    assert!(w.contains(0) && w.contains(18) && !w.contains(19));
}

#[test]
fn selection_examples() {
    let samples = [0, 1, 1, 2, 2, 2, 3, 3, 3, 3];
    let all = split_and_select(&samples, window(1, 10), false).unwrap();
    assert_eq!(all.subset, vec![0, 1, 2, 3]);
    assert_eq!(all.pseudo_profile.entries(), &[(1, 1), (2, 1), (3, 1), (4, 1)]);
    assert_eq!(all.pseudo_profile.n1(), 10);
    assert!(all.complement().is_empty());

    let none = split_and_select(&samples, window(5, 5), false).unwrap();
    assert!(none.subset.is_empty());
    assert!(none.pseudo_profile.is_empty());
    assert_eq!(none.complement().len(), 4);

    let some = split_and_select(&samples, window(2, 3), false).unwrap();
    assert_eq!(some.subset, vec![1, 2]);
    assert_eq!(some.pseudo_profile.entries(), &[(2, 1), (3, 1)]);
    assert_eq!((some.pseudo_profile.n1(), some.n()), (5, 10));
    assert_eq!(some.complement(), vec![(0, 1), (3, 4)]);
}

#[test]
fn strict_split_example() {
    // First half picks S by frequency, second half is tallied.
    let samples = [0, 0, 1, 2, 2, 0, 1, 1, 3, 2];
    let sel = split_and_select(&samples, window(1, 1), true).unwrap();
    assert_eq!(sel.subset, vec![1]);
    assert_eq!(sel.pseudo_profile.entries(), &[(2, 1)]);
    assert_eq!(sel.n(), 5);
    assert_eq!(sel.pseudo_profile.subset_size(), 1);
    // Element 3 only appears in the second half: first-half frequency 0.
    let sel = split_and_select(&samples, window(0, 1), true).unwrap();
    assert_eq!(sel.subset, vec![1, 3]);
    assert_eq!(sel.pseudo_profile.entries(), &[(1, 1), (2, 1)]);
    assert!(split_and_select(&samples[..9], window(0, 1), true).is_err());
}

#[test]
fn selection_partitions_observed_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let n = rng.gen_range(2..200) * 2;
        let samples: Vec<usize> = (0..n).map(|_| rng.gen_range(0..30)).collect();
        let lo = rng.gen_range(0..4);
        let w = window(lo, lo + rng.gen_range(0..6));
        for strict in [false, true] {
            let sel = split_and_select(&samples, w, strict).unwrap();
            let rest: Vec<usize> = sel.complement().iter().map(|c| c.0).collect();
            for x in 0..sel.counts.len() {
                let in_s = sel.subset.contains(&x);
                let in_rest = rest.contains(&x);
                assert!(!(in_s && in_rest));
                if sel.counts[x] > 0 {
                    assert!(in_s || in_rest);
                }
            }
            let n1: u64 = sel.subset.iter().map(|&x| sel.counts[x]).sum();
            assert_eq!(n1, sel.pseudo_profile.n1());
        }
    }
}

#[test]
fn subset_mass_is_n1_over_n() {
    let full = PseudoProfile::new(vec![(1, 3), (2, 1)], 4, 5).unwrap();
    let sub = pml_on_subset(&full, 0.01, 0.5, &PmlOptions::default()).unwrap();
    assert_eq!(sub.scale, 1.0);
    assert!((sub.mass() - 1.0).abs() < 1e-12);

    let half = PseudoProfile::new(vec![(1, 2), (3, 1)], 3, 10).unwrap();
    let sub = pml_on_subset(&half, 0.01, 0.5, &PmlOptions::default()).unwrap();
    assert_eq!(sub.scale, 0.5);
    assert!((sub.mass() - 0.5).abs() < 1e-12);

    let empty = PseudoProfile::new(vec![], 0, 10).unwrap();
    assert!(pml_on_subset(&empty, 0.01, 0.5, &PmlOptions::default()).unwrap().weights.is_empty());

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let n = rng.gen_range(20..300);
        let samples: Vec<usize> = (0..n).map(|_| rng.gen_range(0..40)).collect();
        let sel = split_and_select(&samples, window(1, rng.gen_range(1..8)), false).unwrap();
        let sub = pml_on_subset(&sel.pseudo_profile, 1.0 / (2.0 * (n * n) as f64), 0.5, &PmlOptions::default()).unwrap();
        let want = sel.pseudo_profile.n1() as f64 / n as f64;
        assert!((sub.mass() - want).abs() < 1e-12, "{} {want}", sub.mass());
    }
}

#[test]
fn scale_maximizes_split_likelihood() {
    // alpha^n1 (1 - alpha)^(n - n1) peaks at n1 / n.
    for &(n1, n) in &[(3u64, 10u64), (7, 7), (1, 9), (5, 8)] {
        let ll = |a: f64| n1 as f64 * a.ln() + (n - n1) as f64 * (1.0 - a).ln();
        let star = n1 as f64 / n as f64;
        let best = (1..10000).map(|i| i as f64 / 10000.0).fold(f64::NEG_INFINITY, |b, a| b.max(ll(a)));
        assert!(ll(star.min(1.0 - 1e-12)) >= best - 1e-9);
    }
}

/// Probability that a length-`n` sequence from `q` has S-pseudo profile
/// `target`, by enumerating every sequence.
fn brute_pseudo_probability(q: &[f64], in_s: &[bool], n: usize, target: &[(u64, u64)]) -> f64 {
    let d = q.len();
    let mut seq = vec![0usize; n];
    let mut total = 0.0;
    loop {
        let mut counts = vec![0u64; d];
        let mut p = 1.0;
        for &x in &seq {
            counts[x] += 1;
            p *= q[x];
        }
        let mut freq = std::collections::BTreeMap::new();
        for x in 0..d {
            if in_s[x] && counts[x] > 0 {
                *freq.entry(counts[x]).or_insert(0u64) += 1;
            }
        }
        if freq.into_iter().collect::<Vec<_>>() == target {
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

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[test]
fn pseudo_profile_probability_factorizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 40 {
        let d = rng.gen_range(2..5);
        let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let q: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let in_s: Vec<bool> = (0..d).map(|_| rng.gen_bool(0.6)).collect();
        if !in_s.iter().any(|&b| b) {
            continue;
        }
        let n = rng.gen_range(1..6);
        let n1 = rng.gen_range(1..=n);
        let s_count = in_s.iter().filter(|&&b| b).count() as u64;
        let parts = pml_core::oracle::profiles_of_length(n1 as u64);
        let target = &parts[rng.gen_range(0..parts.len())];
        if target.support() > s_count {
            continue;
        }
        let want = brute_pseudo_probability(&q, &in_s, n, target.entries());
        let mass_s: f64 = q.iter().zip(&in_s).filter(|(_, &b)| b).map(|(w, _)| w).sum();
        let q_s: Vec<f64> = q.iter().zip(&in_s).filter(|(_, &b)| b).map(|(w, _)| w / mass_s).collect();
        let inner = exact_log_profile_probability(&PseudoDistribution::new(q_s).unwrap(), target).unwrap();
        let rest = if n == n1 { 0.0 } else { (n - n1) as f64 * (1.0 - mass_s).max(0.0).ln() };
        let got = binomial(n as u64, n1 as u64).ln() + n1 as f64 * mass_s.ln() + rest + inner;
        if want == 0.0 {
            assert!(got == f64::NEG_INFINITY || got.exp() < 1e-300);
        } else {
            assert!((got - want.ln()).abs() < 1e-9, "{got} {}", want.ln());
        }
        checked += 1;
    }
}

#[test]
fn empirical_entropy_examples() {
    assert_eq!(empirical_entropy_with_correction(&[0, 0, 0]).unwrap(), 0.0);
    let v = empirical_entropy_with_correction(&[0, 1]).unwrap();
    assert!((v - (2f64.ln() + 0.25)).abs() < 1e-15);
    let u = Distribution::uniform(2).unwrap();
    let s = sample_sequence(&u, 200_000, 7).unwrap();
    let v = empirical_entropy_with_correction(&s).unwrap();
    // Plug-in entropy of a binomial split: deviation is second order.
    assert!((v - 2f64.ln()).abs() < 1e-3);
    assert!(empirical_entropy_with_correction(&[]).is_err());
}

#[test]
fn entropy_of_point_mass() {
    let samples = vec![4usize; 500];
    let r = estimate_entropy(&samples, &EstimatorOptions::default()).unwrap();
    assert!(r.estimate.abs() < 1e-12);
    assert_eq!(r.subset_size, 0);
}

#[test]
fn report_fields_add_up() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for t in 0..20 {
        let d = make_distribution(DistributionKind::Zipf(1.0), 200).unwrap();
        let samples = sample_sequence(&d, rng.gen_range(50..600), t).unwrap();
        let r = estimate_entropy(&samples, &EstimatorOptions::default()).unwrap();
        assert!((r.estimate - (r.pml_part + r.empirical_part + r.bias_correction)).abs() < 1e-12);
        let u = estimate_distance_to_uniformity(&samples, 200, &EstimatorOptions::default()).unwrap();
        assert!((u.estimate - (u.pml_part + u.empirical_part + u.bias_correction)).abs() < 1e-12);
        assert!(u.estimate >= 0.0 && u.estimate <= 2.0 + 1e-9);
    }
}

/// At n = 20N the corrected plug-in is already nearly unbiased; the PML part
/// spreads the window's elements over two adjacent levels and lands about
/// 0.01 nats low. Both stay small.
#[test]
fn entropy_on_uniform_is_accurate() {
    let d = Distribution::uniform(100).unwrap();
    let truth = d.entropy();
    let (mut pml, mut mle) = (Vec::new(), Vec::new());
    for t in 0..20 {
        let s = sample_sequence(&d, 2000, 100 + t).unwrap();
        pml.push(estimate_entropy(&s, &EstimatorOptions { seed: t, ..Default::default() }).unwrap().estimate);
        mle.push(empirical_entropy_with_correction(&s).unwrap());
    }
    assert!(rmse(&pml, truth) < 0.02, "{}", rmse(&pml, truth));
    assert!(rmse(&mle, truth) < 0.02, "{}", rmse(&mle, truth));
}

#[test]
fn entropy_beats_plug_in_when_undersampled() {
    let d = Distribution::uniform(1000).unwrap();
    let truth = d.entropy();
    let (mut pml, mut mle) = (Vec::new(), Vec::new());
    for t in 0..20 {
        let s = sample_sequence(&d, 500, 200 + t).unwrap();
        pml.push(estimate_entropy(&s, &EstimatorOptions { seed: t, ..Default::default() }).unwrap().estimate);
        mle.push(empirical_entropy_with_correction(&s).unwrap());
    }
    assert!(rmse(&pml, truth) < rmse(&mle, truth), "{} {}", rmse(&pml, truth), rmse(&mle, truth));
}

#[test]
fn uniformity_examples() {
    let d = Distribution::uniform(50).unwrap();
    let s = sample_sequence(&d, 50_000, 5).unwrap();
    let r = estimate_distance_to_uniformity(&s, 50, &EstimatorOptions::default()).unwrap();
    assert!(r.estimate < 0.1, "{}", r.estimate);

    let s = vec![0usize; 10_000];
    let r = estimate_distance_to_uniformity(&s, 2, &EstimatorOptions::default()).unwrap();
    assert!((r.estimate - 1.0).abs() < 1e-9, "{}", r.estimate);

    assert!(estimate_distance_to_uniformity(&[0, 1, 2], 2, &EstimatorOptions::default()).is_err());
    assert!(estimate_distance_to_uniformity(&[0], 0, &EstimatorOptions::default()).is_err());
    assert!((empirical_distance_to_uniformity(&[0, 0], 2).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn uniformity_window_and_interval() {
    let w = uniformity_window(1000, 100, 1.0).unwrap();
    let half = (1000.0f64 * 1000f64.ln() / 100.0).sqrt();
    assert_eq!(w.lo(), (10.0 - half).ceil().max(0.0) as u64);
    assert_eq!(w.hi(), (10.0 + half).floor() as u64);
    let (lo, hi) = uniformity_interval(100_000, 100, 1.0);
    let half = (2.0 * 100_000f64.ln() / (100_000.0 * 100.0)).sqrt();
    assert!((lo - (0.01 - half)).abs() < 1e-15 && (hi - (0.01 + half)).abs() < 1e-15);
    // A negative lower end is replaced by 1/(2nN).
    let (lo, _) = uniformity_interval(1000, 100, 1.0);
    assert_eq!(lo, 1.0 / (2.0 * 1000.0 * 100.0));
}

#[test]
fn uniformity_beats_plug_in_on_mixture() {
    let big_n = 1000;
    let d = make_distribution(DistributionKind::Mix2, big_n).unwrap();
    let truth = distance_to_uniformity(&d);
    let (mut pml, mut mle) = (Vec::new(), Vec::new());
    for t in 0..20 {
        let s = sample_sequence(&d, 1000, 300 + t).unwrap();
        let opts = EstimatorOptions { seed: t, ..Default::default() };
        pml.push(estimate_distance_to_uniformity(&s, big_n, &opts).unwrap().estimate);
        mle.push(empirical_distance_to_uniformity(&s, big_n).unwrap());
    }
    assert!(rmse(&pml, truth) <= rmse(&mle, truth), "{} {}", rmse(&pml, truth), rmse(&mle, truth));
}

#[test]
fn synthetic_distributions() {
    assert_eq!(make_distribution(DistributionKind::Uniform, 4).unwrap().weights(), &[0.25; 4]);
    let m = make_distribution(DistributionKind::Mix2, 10).unwrap();
    assert!((m.weights()[0] - 0.5).abs() < 1e-15);
    assert!(m.weights()[1..].iter().all(|&w| (w - 1.0 / 18.0).abs() < 1e-15));
    let z = make_distribution(DistributionKind::Zipf(1.0), 3).unwrap();
    for (w, want) in z.weights().iter().zip([6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0]) {
        assert!((w - want).abs() < 1e-15);
    }
    assert!(make_distribution(DistributionKind::Mix2, 9).is_err());
    assert!(make_distribution(DistributionKind::Uniform, 0).is_err());
    assert!(distance_to_uniformity(&make_distribution(DistributionKind::Uniform, 7).unwrap()) < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn subset_mass_property(samples in prop::collection::vec(0usize..25, 4..120), hi in 1u64..6) {
        let sel = split_and_select(&samples, window(1, hi), false).unwrap();
        let n = samples.len() as f64;
        let sub = pml_on_subset(&sel.pseudo_profile, 1.0 / (2.0 * n * n), 1.0, &PmlOptions::default()).unwrap();
        let want = sel.pseudo_profile.n1() as f64 / n;
        prop_assert!((sub.mass() - want).abs() < 1e-12);
        let profile = sel.pseudo_profile.restricted();
        prop_assert_eq!(profile.is_none(), sel.pseudo_profile.is_empty());
        if let Some(p) = profile {
            prop_assert_eq!(p.n(), sel.pseudo_profile.n1());
            prop_assert!(p.support() as usize <= sub.weights.len());
            let _ = Profile::new(p.entries().to_vec()).unwrap();
        }
    }
}
