use covert_core::adversary::*;
use covert_core::channels::{bsc_apply, trial_rng, BitVector};
use covert_core::codec::Codebook;
use covert_core::harness::{exact_tv, lr_error_sum, mc_tv, mc_tv_ensemble};
use covert_core::Execution;

fn q0(z: u64, n: usize, q: f64) -> f64 {
    let w = z.count_ones() as i32;
    q.powi(w) * (1.0 - q).powi(n as i32 - w)
}

fn q1(z: u64, words: &[u64], n: usize, q: f64) -> f64 {
    words.iter().map(|&x| q0(z ^ x, n, q)).sum::<f64>() / words.len() as f64
}

fn random_words(n: usize, count: usize, rho: f64, seed: u64) -> Vec<u64> {
    let mut rng = trial_rng(seed, 0);
    (0..count)
        .map(|_| BitVector::bernoulli(n, rho, &mut rng).words()[0])
        .collect()
}

fn book_of(words: &[u64], n: usize) -> Codebook {
    Codebook::from_words(words.iter().map(|&w| BitVector::from_u64(w, n)).collect()).unwrap()
}

#[test]
fn exact_tv_matches_enumeration() {
    for (n, count, seed) in [(6usize, 3usize, 1u64), (8, 5, 2), (10, 8, 3)] {
        let words = random_words(n, count, 0.2, seed);
        let book = book_of(&words, n);
        let q = 0.2;
        let oracle: f64 = (0..(1u64 << n))
            .map(|z| (q0(z, n, q) - q1(z, &words, n, q)).max(0.0))
            .sum();
        let got = exact_tv(&book, q, Execution::Parallel).unwrap();
        assert!((got - oracle).abs() < 1e-12, "{got} vs {oracle}");
        let lr = lr_error_sum(&book, q, Execution::Sequential).unwrap();
        assert!((lr + got - 1.0).abs() < 1e-12);
    }
}

#[test]
fn output_distributions_normalize() {
    let n = 10;
    let words = random_words(n, 4, 0.3, 7);
    let book = book_of(&words, n);
    let (mut s0, mut s1) = (0.0, 0.0);
    for z in 0..(1u64 << n) {
        let zb = BitVector::from_u64(z, n);
        s0 += q0_prob(&zb, 0.3);
        let p1 = q1_prob(&zb, &book, 0.3).unwrap();
        assert!((p1 - q1(z, &words, n, 0.3)).abs() < 1e-15);
        s1 += p1;
    }
    assert!((s0 - 1.0).abs() < 1e-12 && (s1 - 1.0).abs() < 1e-12);
}

#[test]
fn sampled_tv_brackets_exact_tv() {
    let n = 12;
    let words = random_words(n, 16, 0.15, 11);
    let book = book_of(&words, n);
    let exact = exact_tv(&book, 0.25, Execution::Parallel).unwrap();
    let est = mc_tv(&book, 0.25, 40_000, 5, Execution::Parallel).unwrap();
    assert!((est.estimate - exact).abs() < 2.0 * est.ci_half_width, "{est:?} vs {exact}");
}

#[test]
fn ensemble_tv_matches_average_over_random_books() {
    let n = 12;
    let (rho, q) = (0.12, 0.2);
    for count_bits in [2u32, 4] {
        let books = 4000;
        let tvs: Vec<f64> = (0..books)
            .map(|b| {
                let words = random_words(n, 1 << count_bits, rho, 1000 + b);
                exact_tv(&book_of(&words, n), q, Execution::Sequential).unwrap()
            })
            .collect();
        let mean = tvs.iter().sum::<f64>() / books as f64;
        let sd = (tvs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (books - 1) as f64).sqrt();
        let book_half = 1.96 * sd / (books as f64).sqrt();
        let est = mc_tv_ensemble(n, rho, count_bits as f64, q, 200_000, 3, Execution::Parallel).unwrap();
        let tol = 2.0 * (book_half.powi(2) + est.ci_half_width.powi(2)).sqrt();
        assert!((est.estimate - mean).abs() < tol, "size 2^{count_bits}: {} vs {mean} (tol {tol})", est.estimate);
    }
}

#[test]
fn ensemble_tv_shrinks_with_book_size() {
    let a = mc_tv_ensemble(400, 0.02, 4.0, 0.25, 20_000, 1, Execution::Parallel).unwrap();
    let b = mc_tv_ensemble(400, 0.02, 40.0, 0.25, 20_000, 1, Execution::Parallel).unwrap();
    assert!(b.estimate < a.estimate);
    assert_eq!(b.route, "ensemble");
}

#[test]
fn detector_false_alarm_near_five_percent() {
    let n = 10_000;
    let q = 0.25;
    let c = default_weight_constant(q);
    let zero = BitVector::zeros(n);
    let trials = 4000;
    let alarms = (0..trials)
        .filter(|&t| {
            let mut rng = trial_rng(8, t);
            let z = bsc_apply(&zero, q, &mut rng).unwrap();
            weight_detector(&z, q, c).t_hat
        })
        .count();
    let rate = alarms as f64 / trials as f64;
    assert!((rate - 0.05).abs() < 0.015, "{rate}");
}

#[test]
fn likelihood_detector_is_optimal_on_small_books() {
    let n = 10;
    let words = random_words(n, 4, 0.3, 21);
    let book = book_of(&words, n);
    let q = 0.2;
    let mut err = 0.0;
    for z in 0..(1u64 << n) {
        let zb = BitVector::from_u64(z, n);
        let v = lr_detector(&zb, &book, q).unwrap();
        err += if v.t_hat { q0(z, n, q) } else { q1(z, &words, n, q) };
    }
    let tv = exact_tv(&book, q, Execution::Sequential).unwrap();
    assert!((err - (1.0 - tv)).abs() < 1e-12);
}
