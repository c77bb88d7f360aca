use covert_core::channels::{trial_rng, BitVector};
use covert_core::codec::*;
use covert_core::specmath::{code_weight_param, mi_bob, ChannelSpec, CovertParams, KeyGrowth, KeyRegime};
use covert_core::Execution;
use rand::Rng;

fn passes_by_hand(x: &BitVector, y: &BitVector, n: usize, rho: f64, spec: &ChannelSpec) -> bool {
    let (p, q) = (spec.p, spec.q);
    let lg = (n as f64).log2();
    let e1 = 1.0 / lg;
    let e2 = (p - p * q) / ((q - p + p * q) * lg);
    let mut c10 = 0;
    let mut c11 = 0;
    for k in 0..n {
        match (x.get(k), y.get(k)) {
            (true, false) => c10 += 1,
            (true, true) => c11 += 1,
            _ => {}
        }
    }
    let flip = p * (1.0 - q) / q;
    (c10 as f64) < rho * n as f64 * flip * (1.0 + e1) && (c11 as f64) > rho * n as f64 * (1.0 - flip) * (1.0 - e2)
}

#[test]
fn list_matches_brute_force_on_every_output() {
    let spec = ChannelSpec::new(0.1, 0.3).unwrap();
    for n in [8usize, 10, 12] {
        let book = Codebook::lazy(n, 3, 2, 0.35, n as u64).unwrap();
        let words: Vec<(u128, u64, BitVector)> = (0..8u128)
            .flat_map(|i| (0..4u64).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, book.word(i, j).unwrap()))
            .collect();
        let cfg = ListDecoderConfig::standard(n, &spec);
        for y in 0..(1u64 << n) {
            let y = BitVector::from_u64(y, n);
            let list = list_decode(&y, &book, &spec, &cfg, Execution::Sequential).unwrap();
            let expect: Vec<(u128, u64)> = words
                .iter()
                .filter(|(_, _, x)| passes_by_hand(x, &y, n, book.rho, &spec))
                .map(|&(i, j, _)| (i, j))
                .collect();
            assert_eq!(list.entries, expect, "n = {n}, y = {y}");
        }
    }
}

#[test]
fn spurious_pass_probability_matches_sampling() {
    let spec = ChannelSpec::new(0.05, 0.25).unwrap();
    let n = 400;
    let rho = 0.1;
    let cfg = ListDecoderConfig::standard(n, &spec);
    let th = cfg.thresholds(n, rho, &spec);
    let mut rng = trial_rng(5, 0);
    let y = BitVector::bernoulli(n, 0.1, &mut rng);
    let prob = spurious_pass_probability(&y, rho, th);
    let trials = 200_000;
    let mut hits = 0;
    for _ in 0..trials {
        let x = BitVector::bernoulli(n, rho, &mut rng);
        let f = pair_fractions(&x, &y).unwrap();
        if (f.counts[2] as f64) < th.0 && (f.counts[3] as f64) > th.1 {
            hits += 1;
        }
    }
    let rate = hits as f64 / trials as f64;
    let sd = (prob * (1.0 - prob) / trials as f64).sqrt();
    assert!((rate - prob).abs() < 5.0 * sd + 1e-6, "{rate} vs {prob}");
}

#[test]
fn lazy_words_are_reproducible_and_bernoulli() {
    let book = Codebook::lazy(5000, 20, 10, 0.02, 77).unwrap();
    let again = Codebook::lazy(5000, 20, 10, 0.02, 77).unwrap();
    let other = Codebook::lazy(5000, 20, 10, 0.02, 78).unwrap();
    assert_eq!(book.word(123, 9).unwrap(), again.word(123, 9).unwrap());
    assert_ne!(book.word(123, 9).unwrap(), other.word(123, 9).unwrap());
    assert_ne!(book.word(123, 9).unwrap(), book.word(123, 8).unwrap());
    let words = 2000u128;
    let mut total = 0usize;
    let mut per_pos = vec![0u32; 5000];
    for i in 0..words {
        let ones = book.word_ones(i, 0).unwrap();
        assert!(ones.windows(2).all(|w| w[0] < w[1]));
        total += ones.len();
        for p in ones {
            per_pos[p] += 1;
        }
    }
    let mean = total as f64 / words as f64;
    let sd = (5000.0 * 0.02 * 0.98 / words as f64).sqrt();
    assert!((mean - 100.0).abs() < 4.0 * sd, "{mean}");
    // ones are spread over positions: first and second half agree
    let first: u32 = per_pos[..2500].iter().sum();
    let second: u32 = per_pos[2500..].iter().sum();
    assert!((first as f64 - second as f64).abs() < 4.0 * (total as f64).sqrt());
}

#[test]
fn materialized_book_equals_lazy_book() {
    let book = Codebook::lazy(64, 4, 3, 0.2, 9).unwrap();
    let dense = book.materialize(1 << 20).unwrap();
    assert!(dense.is_dense());
    for i in 0..16 {
        for j in 0..8 {
            assert_eq!(book.word(i, j).unwrap(), dense.word(i, j).unwrap());
        }
    }
    assert!(matches!(book.materialize(10), Err(covert_core::Error::TooLarge { .. })));
}

#[test]
fn scheme_book_shape() {
    let spec = ChannelSpec::new(0.05, 0.25).unwrap();
    let r = 0.5 * code_weight_param(0.25, 0.5).unwrap() * mi_bob(0.05, 0.25).unwrap();
    let params = CovertParams::new(2500, 0.5, KeyRegime::Small, r).unwrap();
    let book = scheme_book(&spec, &params, 1).unwrap();
    assert!((book.rho - 0.023365).abs() < 1e-5);
    assert_eq!(book.message_bits(), 90);
    let layout = KeyLayout::for_params(&params, 90).unwrap();
    assert_eq!(layout.field_degree, 34);
    assert_eq!(book.hash_bits, 34);
    assert_eq!(book.size_log2(), 90.0 + 34.0);
}

#[test]
fn key_index_covers_the_key_space() {
    let params = CovertParams::new(2500, 0.5, KeyRegime::Exact { bits: 6, growth: KeyGrowth::Logarithmic }, 1.8).unwrap();
    let layout = KeyLayout::for_params(&params, 90).unwrap();
    assert_eq!(layout.total_bits(), 6);
    let keys: std::collections::BTreeSet<_> = (0..64u128)
        .map(|k| {
            let key = layout.key_from_index(k);
            (key.k1.value, key.k2.value, key.subcode)
        })
        .collect();
    assert_eq!(keys.len(), 64);
}

#[test]
fn hash_indices_stay_in_range_and_spread() {
    let book = Codebook::lazy(100, 40, 8, 0.1, 3).unwrap();
    let layout = KeyLayout {
        hash_key_bits: 8,
        field_degree: 8,
        subcode_bits: 0,
    };
    let mut rng = trial_rng(1, 1);
    let key = layout.random_key(&mut rng);
    let mut hist = [0u32; 256];
    for _ in 0..25_600 {
        let msg = rng.random::<u128>() % book.num_messages;
        let j = hash_index(msg, &key, &book).unwrap();
        hist[j as usize] += 1;
    }
    // each bucket expects 100 hits
    assert!(hist.iter().all(|&c| (40..=170).contains(&c)), "{hist:?}");
}

#[test]
fn silent_encoding_is_all_zero() {
    let book = Codebook::lazy(50, 4, 0, 0.2, 3).unwrap();
    let key = KeyLayout { hash_key_bits: 0, field_degree: 0, subcode_bits: 0 }.key_from_index(0);
    assert_eq!(encode(false, 3, &key, &book).unwrap().weight(), 0);
    assert_eq!(encode(true, 3, &key, &book).unwrap(), book.word(3, 0).unwrap());
    assert!(encode(true, 16, &key, &book).is_err());
}

#[test]
fn disambiguation_rules() {
    let book = Codebook::lazy(50, 4, 3, 0.2, 3).unwrap();
    let layout = KeyLayout { hash_key_bits: 3, field_degree: 3, subcode_bits: 0 };
    let key = layout.key_from_index(13);
    let own = |i: u128| (i, hash_index(i, &key, &book).unwrap());
    let wrong = |i: u128| (i, (hash_index(i, &key, &book).unwrap() + 1) % 8);
    assert_eq!(disambiguate(&[], &key, &book).unwrap(), DecodeOutcome::Silent);
    assert_eq!(disambiguate(&[wrong(2)], &key, &book).unwrap(), DecodeOutcome::Silent);
    assert_eq!(disambiguate(&[own(2), wrong(5)], &key, &book).unwrap(), DecodeOutcome::Message(2));
    assert_eq!(disambiguate(&[own(2), own(5)], &key, &book).unwrap(), DecodeOutcome::Error);
}

#[test]
fn parallel_scan_agrees_with_sequential() {
    let spec = ChannelSpec::new(0.05, 0.25).unwrap();
    let book = Codebook::lazy(200, 10, 4, 0.1, 4).unwrap();
    let cfg = ListDecoderConfig::standard(200, &spec);
    // a word at least as heavy as expected always passes against itself
    let i = (700..).find(|&i| book.word(i, 3).unwrap().weight() >= 20).unwrap();
    let y = book.word(i, 3).unwrap();
    let a = list_decode(&y, &book, &spec, &cfg, Execution::Sequential).unwrap();
    let b = list_decode(&y, &book, &spec, &cfg, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    assert!(a.entries.contains(&(i, 3)));
}
