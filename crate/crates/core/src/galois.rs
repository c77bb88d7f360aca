//! GF(2^m) arithmetic for `1 <= m <= 64` and the keyed polynomial hash
//! `G = k2 + sum_u k1^u * M_u` that binds codewords to the shared key.
//!
//! Every degree uses one fixed modulus from [`IRREDUCIBLE_LOW`]: the lowest
//! trinomial `x^m + x^a + 1` when one exists, otherwise the lowest pentanomial.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Low bits (everything below `x^m`) of the modulus for `m = 2..=64`; index `m - 2`.
/// Degree 1 uses `x + 1`.
pub const IRREDUCIBLE_LOW: [u64; 63] = [
    0x3, 0x3, 0x3, 0x5, 0x3, 0x3, 0x1b, 0x3, 0x9, 0x5, 0x9, 0x1b, 0x21, 0x3, 0x2b, 0x9, 0x9,
    0x27, 0x9, 0x5, 0x3, 0x21, 0x1b, 0x9, 0x1b, 0x27, 0x3, 0x5, 0x3, 0x9, 0x8d, 0x401, 0x81,
    0x5, 0x201, 0x53, 0x63, 0x11, 0x39, 0x9, 0x81, 0x59, 0x21, 0x1b, 0x3, 0x21, 0x2d, 0x201,
    0x1d, 0x4b, 0x9, 0x47, 0x201, 0x81, 0x95, 0x11, 0x80001, 0x95, 0x3, 0x27, 0x20000001, 0x3,
    0x1b,
];

/// Full modulus polynomial of degree `m` as a bit mask (bit `i` is the `x^i` coefficient).
pub fn modulus(m: u8) -> Result<u128> {
    match m {
        1 => Ok(0b11),
        2..=64 => Ok((1u128 << m) | IRREDUCIBLE_LOW[m as usize - 2] as u128),
        _ => Err(Error::UnsupportedDegree(m)),
    }
}

/// Field degree used for hash keys at blocklength `n`: `⌈3 log2 n⌉`, capped at 64.
pub fn field_degree_for(n: u64) -> u8 {
    ((3.0 * (n as f64).log2() - 1e-9).ceil() as u8).clamp(1, 64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldElem {
    pub value: u64,
    pub m: u8,
}

fn mask(m: u8) -> u64 {
    if m == 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

impl FieldElem {
    pub fn new(value: u64, m: u8) -> Result<Self> {
        if !(1..=64).contains(&m) {
            return Err(Error::UnsupportedDegree(m));
        }
        if value & !mask(m) != 0 {
            return domain(format!("{value} is not an element of GF(2^{m})"));
        }
        Ok(Self { value, m })
    }

    pub fn zero(m: u8) -> Self {
        Self { value: 0, m }
    }

    pub fn one(m: u8) -> Self {
        Self { value: 1, m }
    }

    pub fn random<R: Rng + ?Sized>(m: u8, rng: &mut R) -> Self {
        Self {
            value: rng.random::<u64>() & mask(m),
            m,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

fn same_degree(a: &FieldElem, b: &FieldElem) -> Result<()> {
    if a.m != b.m {
        return Err(Error::DegreeMismatch {
            left: a.m,
            right: b.m,
        });
    }
    Ok(())
}

pub fn ff_add(a: FieldElem, b: FieldElem) -> Result<FieldElem> {
    same_degree(&a, &b)?;
    Ok(FieldElem {
        value: a.value ^ b.value,
        m: a.m,
    })
}

#[inline]
fn clmul(a: u64, b: u64) -> u128 {
    let mut acc = 0u128;
    let wide = a as u128;
    let mut rest = b;
    while rest != 0 {
        let i = rest.trailing_zeros();
        acc ^= wide << i;
        rest &= rest - 1;
    }
    acc
}

#[inline]
fn reduce(mut prod: u128, m: u8, modulus: u128) -> u64 {
    let m = m as u32;
    while prod >> m != 0 {
        let top = 127 - prod.leading_zeros();
        prod ^= modulus << (top - m);
    }
    prod as u64
}

#[inline]
fn mul_raw(a: u64, b: u64, m: u8, modulus: u128) -> u64 {
    reduce(clmul(a, b), m, modulus)
}

pub fn ff_mul(a: FieldElem, b: FieldElem) -> Result<FieldElem> {
    same_degree(&a, &b)?;
    let f = modulus(a.m)?;
    Ok(FieldElem {
        value: mul_raw(a.value, b.value, a.m, f),
        m: a.m,
    })
}

pub fn ff_pow(a: FieldElem, mut e: u64) -> Result<FieldElem> {
    let f = modulus(a.m)?;
    let mut base = a.value;
    let mut acc = 1u64;
    while e != 0 {
        if e & 1 == 1 {
            acc = mul_raw(acc, base, a.m, f);
        }
        base = mul_raw(base, base, a.m, f);
        e >>= 1;
    }
    Ok(FieldElem { value: acc, m: a.m })
}

/// Multiplicative inverse `a^(2^m - 2)`.
pub fn ff_inv(a: FieldElem) -> Result<FieldElem> {
    if a.is_zero() {
        return domain("zero has no multiplicative inverse");
    }
    let order = if a.m == 64 { u64::MAX } else { (1u64 << a.m) - 1 };
    ff_pow(a, order - 1)
}

/// Chunk layout of the hashed message: `l` chunks of `m` bits each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashParams {
    pub m: u8,
    pub l: u32,
}

impl HashParams {
    pub fn new(m: u8, l: u32) -> Result<Self> {
        modulus(m)?;
        if l == 0 {
            return domain("a hashed message needs at least one chunk");
        }
        if m < 64 && (l as u64) >= (1u64 << m) {
            return domain(format!("l = {l} chunks need l < 2^{m}"));
        }
        Ok(Self { m, l })
    }

    /// `l = ⌈bits / m⌉` chunks (one chunk for a 0-bit message).
    pub fn for_message(bits: u32, m: u8) -> Result<Self> {
        Self::new(m, bits.div_ceil(m as u32).max(1))
    }
}

/// Split the low `bits` bits of `msg` into `⌈bits/m⌉` little-endian chunks, zero padded.
pub fn message_chunks(msg: u128, bits: u32, m: u8) -> Result<Vec<FieldElem>> {
    modulus(m)?;
    if bits > 128 {
        return domain(format!("messages are limited to 128 bits, got {bits}"));
    }
    if bits < 128 && msg >> bits != 0 {
        return domain(format!("message {msg} does not fit in {bits} bits"));
    }
    let params = HashParams::for_message(bits, m)?;
    let mk = mask(m) as u128;
    Ok((0..params.l)
        .map(|u| {
            let shift = u * m as u32;
            let v = if shift >= 128 { 0 } else { (msg >> shift) & mk };
            FieldElem { value: v as u64, m }
        })
        .collect())
}

/// `k2 + sum_{u=1..l} k1^u * chunks[u-1]`, evaluated by Horner's rule.
pub fn poly_hash(chunks: &[FieldElem], k1: FieldElem, k2: FieldElem) -> Result<FieldElem> {
    same_degree(&k1, &k2)?;
    for c in chunks {
        same_degree(c, &k1)?;
    }
    let m = k1.m;
    let f = modulus(m)?;
    let mut acc = 0u64;
    for c in chunks.iter().rev() {
        acc = mul_raw(acc ^ c.value, k1.value, m, f);
    }
    Ok(FieldElem {
        value: acc ^ k2.value,
        m,
    })
}

/// Number of keys `(k1, k2)` with `poly_hash(msg, k1, k2) == g`. Brute force, `m <= 8`.
pub fn count_consistent_keys(msg: &[FieldElem], g: FieldElem) -> Result<u64> {
    if g.m > 8 {
        return domain(format!("key enumeration is limited to m <= 8, got {}", g.m));
    }
    let size = 1u64 << g.m;
    let mut count = 0;
    for k1 in 0..size {
        for k2 in 0..size {
            let h = poly_hash(msg, FieldElem { value: k1, m: g.m }, FieldElem { value: k2, m: g.m })?;
            if h == g {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Empirical frequency of `G_K(a) == G_K(b)` over uniformly drawn keys.
pub fn collision_rate<R: Rng + ?Sized>(
    a: &[FieldElem],
    b: &[FieldElem],
    trials: u64,
    rng: &mut R,
) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let Some(first) = a.first() else {
        return domain("messages must have at least one chunk");
    };
    let m = first.m;
    let mut hits = 0u64;
    for _ in 0..trials {
        let k1 = FieldElem::random(m, rng);
        let k2 = FieldElem::random(m, rng);
        if poly_hash(a, k1, k2)? == poly_hash(b, k1, k2)? {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials.max(1) as f64)
}
