//! Finite-field arithmetic and the keyed hash against brute force.

use covert_core::channels::trial_rng;
use covert_core::galois::*;
use proptest::prelude::*;

fn e(v: u64, m: u8) -> FieldElem {
    FieldElem::new(v, m).unwrap()
}

/// Polynomial remainder over GF(2).
fn poly_mod(mut a: u128, f: u128) -> u128 {
    let df = 127 - f.leading_zeros();
    while a != 0 && 127 - a.leading_zeros() >= df {
        a ^= f << (127 - a.leading_zeros() - df);
    }
    a
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = poly_mod(a, b);
        a = b;
        b = r;
    }
    a
}

/// `x^(2^k) mod f` by repeated squaring in the field.
fn frobenius_x(m: u8, k: u32) -> u64 {
    let mut x = e(2, m);
    for _ in 0..k {
        x = ff_mul(x, x).unwrap();
    }
    x.value
}

fn prime_factors(mut m: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

#[test]
fn every_modulus_is_irreducible() {
    for m in 2u8..=64 {
        let f = modulus(m).unwrap();
        let x = 2u64;
        assert_eq!(frobenius_x(m, m as u32), x, "x^(2^m) != x for m = {m}");
        for r in prime_factors(m as u32) {
            let g = frobenius_x(m, m as u32 / r) ^ x;
            assert_eq!(poly_gcd(f, g as u128), 1, "m = {m}, r = {r}");
        }
    }
}

#[test]
fn gf8_matches_log_table() {
    // powers of x modulo x^3 + x + 1, built by shift-and-reduce
    let mut antilog = [0u64; 7];
    let mut v = 1u64;
    for slot in antilog.iter_mut() {
        *slot = v;
        v <<= 1;
        if v & 8 != 0 {
            v ^= 0b1011;
        }
    }
    let log = |a: u64| antilog.iter().position(|&p| p == a).unwrap();
    for a in 1..8 {
        for b in 1..8 {
            let expect = antilog[(log(a) + log(b)) % 7];
            assert_eq!(ff_mul(e(a, 3), e(b, 3)).unwrap().value, expect);
        }
    }
}

#[test]
fn field_axioms_small_degrees() {
    for m in 1u8..=4 {
        let size = 1u64 << m;
        for a in 0..size {
            let (ea, zero, one) = (e(a, m), FieldElem::zero(m), FieldElem::one(m));
            assert!(ff_add(ea, ea).unwrap().is_zero());
            assert_eq!(ff_mul(ea, one).unwrap(), ea);
            assert_eq!(ff_add(ea, zero).unwrap(), ea);
            if a != 0 {
                assert_eq!(ff_mul(ea, ff_inv(ea).unwrap()).unwrap(), one);
            }
            for b in 0..size {
                let eb = e(b, m);
                assert_eq!(ff_mul(ea, eb).unwrap(), ff_mul(eb, ea).unwrap());
                for c in 0..size {
                    let ec = e(c, m);
                    assert_eq!(
                        ff_mul(ff_mul(ea, eb).unwrap(), ec).unwrap(),
                        ff_mul(ea, ff_mul(eb, ec).unwrap()).unwrap()
                    );
                    assert_eq!(
                        ff_mul(ea, ff_add(eb, ec).unwrap()).unwrap(),
                        ff_add(ff_mul(ea, eb).unwrap(), ff_mul(ea, ec).unwrap()).unwrap()
                    );
                }
            }
        }
    }
}

fn all_messages(m: u8, l: u32) -> Vec<Vec<FieldElem>> {
    let size = 1u64 << m;
    let total = size.pow(l);
    (0..total)
        .map(|mut code| {
            (0..l)
                .map(|_| {
                    let v = code % size;
                    code /= size;
                    e(v, m)
                })
                .collect()
        })
        .collect()
}

#[test]
fn consistent_key_count_is_field_size() {
    for (m, l) in [(3u8, 1u32), (3, 2), (3, 3), (4, 1), (4, 2)] {
        for msg in all_messages(m, l) {
            for g in 0..(1u64 << m) {
                let g = e(g, m);
                assert_eq!(count_consistent_keys(&msg, g).unwrap(), 1 << m);
                // one consistent k2 for each k1
                for k1 in 0..(1u64 << m) {
                    let k1 = e(k1, m);
                    let hits = (0..(1u64 << m))
                        .filter(|&k2| poly_hash(&msg, k1, e(k2, m)).unwrap() == g)
                        .count();
                    assert_eq!(hits, 1);
                }
            }
        }
    }
}

#[test]
fn collision_bound() {
    let mut rng = trial_rng(12, 0);
    let a: Vec<_> = (0..4).map(|_| FieldElem::random(12, &mut rng)).collect();
    let mut b = a.clone();
    b[2] = ff_add(b[2], FieldElem::one(12)).unwrap();
    let rate = collision_rate(&a, &b, 100_000, &mut rng).unwrap();
    assert!(rate <= 2.0 * 4.0 / 4096.0, "{rate}");
    assert_eq!(collision_rate(&a, &a, 100, &mut rng).unwrap(), 1.0);
}

#[test]
fn single_chunk_messages_never_collide_off_zero() {
    // G(a) - G(b) = k1·(a - b) vanishes only at k1 = 0
    for a in 0..8u64 {
        for b in (0..8u64).filter(|&b| b != a) {
            let hits = (0..8u64)
                .filter(|&k1| {
                    poly_hash(&[e(a, 3)], e(k1, 3), e(0, 3)).unwrap()
                        == poly_hash(&[e(b, 3)], e(k1, 3), e(0, 3)).unwrap()
                })
                .count();
            assert!(hits <= 1);
        }
    }
}

proptest! {
    #[test]
    fn wide_field_distributes(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), m in 5u8..=64) {
        let mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
        let (a, b, c) = (e(a & mask, m), e(b & mask, m), e(c & mask, m));
        prop_assert_eq!(
            ff_mul(a, ff_add(b, c).unwrap()).unwrap(),
            ff_add(ff_mul(a, b).unwrap(), ff_mul(a, c).unwrap()).unwrap()
        );
        prop_assert_eq!(ff_mul(a, b).unwrap(), ff_mul(b, a).unwrap());
    }

    #[test]
    fn hash_is_affine_in_k2(msg in prop::collection::vec(0u64..(1 << 20), 1..6), k1 in 0u64..(1 << 20), k2 in 0u64..(1 << 20)) {
        let chunks: Vec<_> = msg.iter().map(|&v| e(v, 20)).collect();
        let base = poly_hash(&chunks, e(k1, 20), FieldElem::zero(20)).unwrap();
        let full = poly_hash(&chunks, e(k1, 20), e(k2, 20)).unwrap();
        prop_assert_eq!(full.value, base.value ^ k2);
    }
}
