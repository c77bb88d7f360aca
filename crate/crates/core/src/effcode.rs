//! Polynomial-time covert scheme: a capacity-oriented code for the induced
//! asymmetric channel, hidden at key-selected positions in a key-selected order.
//!
//! The inner engine is a random trellis code. Each step consumes
//! `symbol_bits` message bits and emits a `label_len`-bit label chosen by the
//! current input and the previous `memory` inputs. Labels have one-density
//! close to the capacity-achieving input probability `ρ*`. Decoding is
//! maximum-likelihood by the Viterbi algorithm with exact BAC branch metrics,
//! followed by a typicality check on the implied flip counts.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{seq::SliceRandom, Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use statrs::function::gamma::ln_gamma;

use crate::channels::BitVector;
use crate::error::{domain, Error, Result};
use crate::specmath::{bac_capacity, code_weight_param, ChannelSpec, CovertParams};

/// `C(n, k)` as a big integer.
pub fn binomial_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial_big(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * i)
}

/// Bits needed to index `count` objects: `⌈log2 count⌉`.
pub fn index_bits(count: &BigUint) -> u64 {
    if count <= &BigUint::one() {
        0
    } else {
        (count - 1u32).bits()
    }
}

fn out_of_range(rank: &BigUint, limit: &BigUint) -> Error {
    Error::OutOfRange {
        index: format!("rank {rank}"),
        limit: limit.to_string(),
    }
}

/// The `rank`-th `k`-subset of `{0..n}` in lexicographic order.
pub fn comb_unrank(rank: &BigUint, n: u64, k: u64) -> Result<Vec<u64>> {
    let total = binomial_big(n, k);
    if rank >= &total {
        return Err(out_of_range(rank, &total));
    }
    let mut out = Vec::with_capacity(k as usize);
    if k == 0 {
        return Ok(out);
    }
    let mut r = rank.clone();
    let mut left = k;
    // c = number of subsets whose next element is `a`: C(n - a - 1, left - 1)
    let mut c = binomial_big(n - 1, k - 1);
    for a in 0..n {
        let rest = n - a - 1;
        if r < c {
            out.push(a);
            left -= 1;
            if left == 0 {
                break;
            }
            c = c * left / rest;
        } else {
            r -= &c;
            c = c * (rest - (left - 1)) / rest;
        }
    }
    Ok(out)
}

/// Inverse of [`comb_unrank`]; `set` must be strictly increasing.
pub fn comb_rank(set: &[u64], n: u64) -> Result<BigUint> {
    let k = set.len() as u64;
    if set.windows(2).any(|w| w[0] >= w[1]) || set.last().is_some_and(|&v| v >= n) {
        return domain("a combination must be strictly increasing and below n");
    }
    let mut r = BigUint::zero();
    if k == 0 {
        return Ok(r);
    }
    let mut left = k;
    let mut c = binomial_big(n - 1, k - 1);
    let mut next = 0usize;
    for a in 0..n {
        let rest = n - a - 1;
        if set[next] == a {
            next += 1;
            left -= 1;
            if left == 0 {
                break;
            }
            c = c * left / rest;
        } else {
            r += &c;
            c = c * (rest - (left - 1)) / rest;
        }
    }
    Ok(r)
}

/// The `rank`-th permutation of `0..k` in Lehmer-code order; rank 0 is the identity.
pub fn perm_unrank(rank: &BigUint, k: u64) -> Result<Vec<u64>> {
    let total = factorial_big(k);
    if rank >= &total {
        return Err(out_of_range(rank, &total));
    }
    let mut pool: Vec<u64> = (0..k).collect();
    let mut out = Vec::with_capacity(k as usize);
    let mut r = rank.clone();
    let mut f = if k == 0 { BigUint::one() } else { total / k };
    for i in 0..k {
        let d = (&r / &f).to_usize().expect("digit below k");
        r %= &f;
        out.push(pool.remove(d));
        let remaining = k - i - 1;
        if remaining > 0 {
            f /= remaining;
        }
    }
    Ok(out)
}

pub fn perm_rank(perm: &[u64]) -> Result<BigUint> {
    let k = perm.len() as u64;
    let mut seen = vec![false; perm.len()];
    for &v in perm {
        if v >= k || seen[v as usize] {
            return domain("not a permutation of 0..k");
        }
        seen[v as usize] = true;
    }
    let mut pool: Vec<u64> = (0..k).collect();
    let mut r = BigUint::zero();
    for (i, &v) in perm.iter().enumerate() {
        let d = pool.iter().position(|&p| p == v).expect("present");
        pool.remove(d);
        r = r * (k - i as u64) + d;
    }
    Ok(r)
}

/// Uniform integer in `[0, bound)` by rejection.
pub fn random_below<R: Rng + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    assert!(!bound.is_zero());
    let bits = bound.bits();
    let bytes = bits.div_ceil(8) as usize;
    let excess = (bytes as u64 * 8 - bits) as u32;
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill_bytes(&mut buf);
        if let Some(top) = buf.last_mut() {
            *top &= 0xffu8 >> excess;
        }
        let v = BigUint::from_bytes_le(&buf);
        if &v < bound {
            return v;
        }
    }
}

/// Position selector and in-support permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermKeys {
    pub pi1_rank: BigUint,
    pub pi2_rank: BigUint,
}

impl PermKeys {
    pub fn identity() -> Self {
        Self {
            pi1_rank: BigUint::zero(),
            pi2_rank: BigUint::zero(),
        }
    }

    pub fn random<R: Rng + ?Sized>(n: u64, k: u64, rng: &mut R) -> Self {
        Self {
            pi1_rank: random_below(&binomial_big(n, k), rng),
            pi2_rank: random_below(&factorial_big(k), rng),
        }
    }

    /// Keys read from a bit string: the first `⌈log2 C(n,k)⌉` bits select
    /// the positions, the next `⌈log2 k!⌉` the order, each reduced modulo its range.
    pub fn from_key_bits(bits: &BitVector, n: u64, k: u64) -> Result<Self> {
        let (b1, b2) = key_bits(n, k);
        if (bits.len() as u64) < b1 + b2 {
            return domain(format!("need {} key bits, got {}", b1 + b2, bits.len()));
        }
        let read = |from: u64, len: u64| {
            let mut v = BigUint::zero();
            for i in (from..from + len).rev() {
                v <<= 1;
                if bits.get(i as usize) {
                    v += 1u32;
                }
            }
            v
        };
        Ok(Self {
            pi1_rank: read(0, b1) % binomial_big(n, k),
            pi2_rank: read(b1, b2) % factorial_big(k),
        })
    }
}

/// `(⌈log2 C(n,k)⌉, ⌈log2 k!⌉)`.
pub fn key_bits(n: u64, k: u64) -> (u64, u64) {
    (index_bits(&binomial_big(n, k)), index_bits(&factorial_big(k)))
}

/// Stirling-type estimates of [`key_bits`] from `ln Γ`.
pub fn key_bits_estimate(n: u64, k: u64) -> (f64, f64) {
    let lg = |x: u64| ln_gamma(x as f64 + 1.0) / std::f64::consts::LN_2;
    (lg(n) - lg(k) - lg(n - k), lg(k))
}

/// Geometry and channel model of the inner code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacCodeSpec {
    pub n: u64,
    /// Bits per trellis label.
    pub inner_len: u32,
    /// Data-carrying trellis steps.
    pub outer_symbols: u32,
    pub symbol_bits: u32,
    /// Steps of input memory; also the number of zero tail steps.
    pub memory: u32,
    pub message_bits: u32,
    /// Message bits per transmitted bit.
    pub rate: f64,
    /// Used length divided by `√n`.
    pub d: f64,
    pub rho_star: f64,
    pub p01: f64,
    pub p10: f64,
    pub seed: u64,
}

/// Symbol width and memory of the default trellis.
pub const DEFAULT_SYMBOL_BITS: u32 = 5;
pub const DEFAULT_MEMORY: u32 = 2;
/// Default length multiplier as a fraction of its ceiling `t/ρ*`.
pub const DEFAULT_D_FRACTION: f64 = 0.9;

impl BacCodeSpec {
    /// Code carrying `⌊r·√n⌋` message bits inside `⌊0.9·(t/ρ*)·√n⌋` positions.
    pub fn design(spec: &ChannelSpec, params: &CovertParams, r: f64, seed: u64) -> Result<Self> {
        let t = code_weight_param(spec.q, params.eps_d)?;
        let (_, rho_star) = bac_capacity(spec.p, spec.q)?;
        let sqrt_n = params.sqrt_n();
        let message_bits = (r * sqrt_n + 1e-9).floor() as u32;
        if message_bits == 0 || message_bits > 127 {
            return domain(format!("{message_bits} message bits; need 1..=127"));
        }
        let steps = message_bits.div_ceil(DEFAULT_SYMBOL_BITS);
        let budget = (DEFAULT_D_FRACTION * t / rho_star * sqrt_n).floor() as u32;
        let label = budget / (steps + DEFAULT_MEMORY);
        if label == 0 || label > 16 {
            return domain(format!(
                "{budget} positions cannot hold {steps} trellis steps with 1..=16 bit labels"
            ));
        }
        let used = (steps + DEFAULT_MEMORY) * label;
        Ok(Self {
            n: params.n,
            inner_len: label,
            outer_symbols: steps,
            symbol_bits: DEFAULT_SYMBOL_BITS,
            memory: DEFAULT_MEMORY,
            message_bits,
            rate: message_bits as f64 / used as f64,
            d: used as f64 / sqrt_n,
            rho_star,
            p01: spec.p,
            p10: spec.induced_one_to_zero(),
            seed,
        })
    }

    /// Positions used, `d√n`.
    pub fn used_len(&self) -> u64 {
        ((self.outer_symbols + self.memory) * self.inner_len) as u64
    }

    fn states(&self) -> usize {
        1usize << (self.symbol_bits * self.memory)
    }

    fn inputs(&self) -> usize {
        1usize << self.symbol_bits
    }
}

/// A spec together with its label table.
#[derive(Debug, Clone)]
pub struct BacCode {
    pub spec: BacCodeSpec,
    /// Label of branch `(state, input)` at `state * inputs + input`.
    labels: Vec<u16>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "message", rename_all = "lowercase")]
pub enum EffOutcome {
    Message(u128),
    Failure,
}

impl BacCode {
    pub fn new(spec: BacCodeSpec) -> Result<Self> {
        if spec.inner_len == 0 || spec.inner_len > 16 {
            return domain("labels must have 1..=16 bits");
        }
        if spec.symbol_bits == 0 || spec.symbol_bits * spec.memory > 16 {
            return domain("trellis too wide");
        }
        if spec.message_bits > spec.outer_symbols * spec.symbol_bits {
            return domain("message does not fit the data steps");
        }
        let labels = Self::label_table(&spec);
        Ok(Self { spec, labels })
    }

    /// Labels of weight `w` or `w + 1` with `w = ⌊ρ*·len⌋`, heavy ones placed so
    /// the table, each state's outgoing branches, and the zero-input branches
    /// all average close to `ρ*·len`.
    fn label_table(spec: &BacCodeSpec) -> Vec<u16> {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let len = spec.inner_len as usize;
        let states = spec.states();
        let inputs = spec.inputs();
        let target = spec.rho_star * len as f64;
        let base = target.floor() as usize;
        let frac = target - base as f64;
        let mut heavy = vec![false; states * inputs];

        // zero-input branches, used by the tail steps
        let h0 = (frac * states as f64).round() as usize;
        let mut rows: Vec<usize> = (0..states).collect();
        rows.shuffle(&mut rng);
        for &s in &rows[..h0] {
            heavy[s * inputs] = true;
        }
        // the other branches, spread evenly across states
        let others = inputs - 1;
        let h_rest = (frac * (states * others) as f64).round() as usize;
        let per = h_rest / states;
        let extra = h_rest % states;
        rows.shuffle(&mut rng);
        let mut cols: Vec<usize> = (1..inputs).collect();
        for (rank, &s) in rows.iter().enumerate() {
            let count = per + usize::from(rank < extra);
            cols.shuffle(&mut rng);
            for &u in &cols[..count] {
                heavy[s * inputs + u] = true;
            }
        }
        let mut positions: Vec<usize> = (0..len).collect();
        heavy
            .iter()
            .map(|&h| {
                let w = (base + usize::from(h)).min(len);
                positions.shuffle(&mut rng);
                positions[..w].iter().fold(0u16, |acc, &p| acc | (1 << p))
            })
            .collect()
    }

    fn next_state(&self, state: usize, input: usize) -> usize {
        let sb = self.spec.symbol_bits;
        let keep = (self.spec.memory - 1) * sb;
        (input | ((state & ((1 << keep) - 1)) << sb)) & (self.spec.states() - 1)
    }

    fn steps(&self) -> usize {
        (self.spec.outer_symbols + self.spec.memory) as usize
    }

    fn symbols(&self, msg: u128) -> Vec<usize> {
        let sb = self.spec.symbol_bits;
        let mut out: Vec<usize> = (0..self.spec.outer_symbols)
            .map(|s| ((msg >> (s * sb)) & ((1u128 << sb) - 1)) as usize)
            .collect();
        out.extend(std::iter::repeat_n(0, self.spec.memory as usize));
        out
    }

    /// Trellis codeword of `msg`, length `d√n`.
    pub fn inner_encode(&self, msg: u128) -> Result<Vec<bool>> {
        if self.spec.message_bits < 128 && msg >> self.spec.message_bits != 0 {
            return Err(Error::OutOfRange {
                index: format!("message {msg}"),
                limit: format!("2^{}", self.spec.message_bits),
            });
        }
        let len = self.spec.inner_len as usize;
        let inputs = self.spec.inputs();
        let mut out = Vec::with_capacity(self.spec.used_len() as usize);
        let mut state = 0usize;
        for u in self.symbols(msg) {
            let label = self.labels[state * inputs + u];
            out.extend((0..len).map(|b| (label >> b) & 1 == 1));
            state = self.next_state(state, u);
        }
        Ok(out)
    }

    /// Viterbi decoding of a received trellis word, then a flip-count typicality check.
    pub fn inner_decode(&self, y: &[bool]) -> Result<EffOutcome> {
        let used = self.spec.used_len() as usize;
        if y.len() != used {
            return Err(Error::LengthMismatch {
                left: y.len(),
                right: used,
            });
        }
        let len = self.spec.inner_len as usize;
        let states = self.spec.states();
        let inputs = self.spec.inputs();
        let (a, b) = (self.spec.p01, self.spec.p10);
        let l00 = (1.0 - a).ln();
        let l01 = a.ln();
        let l10 = b.ln();
        let l11 = (1.0 - b).ln();
        let data = self.spec.outer_symbols as usize;
        let mut metric = vec![f64::NEG_INFINITY; states];
        metric[0] = 0.0;
        let mut back: Vec<Vec<u32>> = Vec::with_capacity(self.steps());
        let mut branch = vec![0f64; 1 << len];
        for step in 0..self.steps() {
            let r: u32 = (0..len).fold(0, |acc, i| acc | (u32::from(y[step * len + i]) << i));
            for (c, m) in branch.iter_mut().enumerate() {
                let c = c as u32;
                let n11 = (c & r).count_ones() as f64;
                let n10 = (c & !r).count_ones() as f64;
                let n01 = (!c & r).count_ones() as f64;
                let n00 = len as f64 - n11 - n10 - n01;
                *m = n00 * l00 + n01 * l01 + n10 * l10 + n11 * l11;
            }
            let allowed = if step < data { inputs } else { 1 };
            let mut next = vec![f64::NEG_INFINITY; states];
            let mut from = vec![u32::MAX; states];
            for (s, &ms) in metric.iter().enumerate() {
                if ms == f64::NEG_INFINITY {
                    continue;
                }
                for u in 0..allowed {
                    let ns = self.next_state(s, u);
                    let cand = ms + branch[self.labels[s * inputs + u] as usize];
                    if cand > next[ns] {
                        next[ns] = cand;
                        from[ns] = s as u32;
                    }
                }
            }
            metric = next;
            back.push(from);
        }
        // trace back from the all-zero terminal state
        let mut state = 0usize;
        let mut syms = vec![0usize; self.steps()];
        for step in (0..self.steps()).rev() {
            let prev = back[step][state];
            if prev == u32::MAX {
                return Ok(EffOutcome::Failure);
            }
            syms[step] = state & (inputs - 1);
            state = prev as usize;
        }
        let sb = self.spec.symbol_bits;
        let msg = syms[..data]
            .iter()
            .enumerate()
            .fold(0u128, |acc, (i, &u)| acc | ((u as u128) << (i as u32 * sb)));
        if self.spec.message_bits < 128 && msg >> self.spec.message_bits != 0 {
            return Ok(EffOutcome::Failure);
        }
        let x = self.inner_encode(msg)?;
        if !self.typical(&x, y) {
            return Ok(EffOutcome::Failure);
        }
        Ok(EffOutcome::Message(msg))
    }

    /// Whether the flip counts implied by `x -> y` are within four standard deviations.
    fn typical(&self, x: &[bool], y: &[bool]) -> bool {
        let (mut zeros, mut ones, mut up, mut down) = (0f64, 0f64, 0f64, 0f64);
        for (&xi, &yi) in x.iter().zip(y) {
            match (xi, yi) {
                (false, v) => {
                    zeros += 1.0;
                    up += f64::from(u8::from(v));
                }
                (true, v) => {
                    ones += 1.0;
                    down += f64::from(u8::from(!v));
                }
            }
        }
        let limit = |count: f64, p: f64| count * p + 4.0 * (count * p * (1.0 - p)).sqrt() + 1.0;
        up <= limit(zeros, self.spec.p01) && down <= limit(ones, self.spec.p10)
    }
}

/// Trellis-encode, permute by `Π₂`, scatter into the `Π₁` positions of a zero word.
pub fn eff_encode(msg: u128, keys: &PermKeys, code: &BacCode) -> Result<BitVector> {
    let inner = code.inner_encode(msg)?;
    let k = inner.len() as u64;
    let n = code.spec.n;
    let positions = comb_unrank(&keys.pi1_rank, n, k)?;
    let perm = perm_unrank(&keys.pi2_rank, k)?;
    let mut out = BitVector::zeros(n as usize);
    for (slot, &src) in perm.iter().enumerate() {
        if inner[src as usize] {
            out.set(positions[slot] as usize, true);
        }
    }
    Ok(out)
}

/// Gather the `Π₁` positions, undo `Π₂`, decode.
pub fn eff_decode(y: &BitVector, keys: &PermKeys, code: &BacCode) -> Result<EffOutcome> {
    let n = code.spec.n;
    if y.len() as u64 != n {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: n as usize,
        });
    }
    let k = code.spec.used_len();
    let positions = comb_unrank(&keys.pi1_rank, n, k)?;
    let perm = perm_unrank(&keys.pi2_rank, k)?;
    let mut inner = vec![false; k as usize];
    for (slot, &src) in perm.iter().enumerate() {
        inner[src as usize] = y.get(positions[slot] as usize);
    }
    code.inner_decode(&inner)
}

/// Stretches a short shared seed into a longer key.
pub trait KeyExpander {
    fn expand(&self, seed: &BitVector, out_len: usize) -> BitVector;
}

/// Test double: the seed followed by SHA-256 blocks of `(seed, counter)`.
/// Deterministic, statistically unremarkable, not a security claim.
#[derive(Debug, Clone, Copy, Default)]
pub struct CounterHashExpander;

impl KeyExpander for CounterHashExpander {
    fn expand(&self, seed: &BitVector, out_len: usize) -> BitVector {
        let mut out = BitVector::zeros(out_len);
        for i in 0..seed.len().min(out_len) {
            out.set(i, seed.get(i));
        }
        let seed_bytes: Vec<u8> = seed
            .words()
            .iter()
            .flat_map(|w| w.to_le_bytes())
            .chain((seed.len() as u64).to_le_bytes())
            .collect();
        let mut pos = seed.len();
        let mut counter = 0u64;
        while pos < out_len {
            let mut h = Sha256::new();
            h.update(&seed_bytes);
            h.update(counter.to_le_bytes());
            let block = h.finalize();
            for byte in block.iter() {
                for b in 0..8 {
                    if pos < out_len && (byte >> b) & 1 == 1 {
                        out.set(pos, true);
                    }
                    pos += 1;
                }
            }
            counter += 1;
        }
        out
    }
}

pub fn expand_key(seed: &BitVector, out_len: usize, expander: &dyn KeyExpander) -> Result<BitVector> {
    if out_len < seed.len() {
        return domain(format!("cannot expand {} bits into {out_len}", seed.len()));
    }
    Ok(expander.expand(seed, out_len))
}

/// Draw a short uniform seed.
pub fn random_seed_bits(len: usize, rng: &mut dyn RngCore) -> BitVector {
    let mut v = BitVector::zeros(len);
    for i in 0..len {
        if rng.next_u32() & 1 == 1 {
            v.set(i, true);
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::trial_rng;
    use crate::specmath::KeyRegime;

    #[test]
    fn comb_endpoints() {
        let first = comb_unrank(&BigUint::zero(), 9, 4).unwrap();
        assert_eq!(first, vec![0, 1, 2, 3]);
        let last = comb_unrank(&(binomial_big(9, 4) - 1u32), 9, 4).unwrap();
        assert_eq!(last, vec![5, 6, 7, 8]);
        assert!(comb_unrank(&binomial_big(9, 4), 9, 4).is_err());
        assert!(comb_rank(&[3, 2], 9).is_err());
    }

    #[test]
    fn perm_endpoints() {
        assert_eq!(perm_unrank(&BigUint::zero(), 5).unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(perm_unrank(&BigUint::from(119u32), 5).unwrap(), vec![4, 3, 2, 1, 0]);
        assert!(perm_unrank(&BigUint::from(120u32), 5).is_err());
        assert!(perm_rank(&[0, 0, 1]).is_err());
    }

    #[test]
    fn large_round_trip() {
        let mut rng = trial_rng(5, 5);
        let keys = PermKeys::random(10_000, 216, &mut rng);
        let set = comb_unrank(&keys.pi1_rank, 10_000, 216).unwrap();
        assert_eq!(comb_rank(&set, 10_000).unwrap(), keys.pi1_rank);
        let perm = perm_unrank(&keys.pi2_rank, 216).unwrap();
        assert_eq!(perm_rank(&perm).unwrap(), keys.pi2_rank);
    }

    fn code() -> BacCode {
        let spec = ChannelSpec::new(0.05, 0.25).unwrap();
        let params = CovertParams::new(10_000, 0.5, KeyRegime::Large, 0.0).unwrap();
        let t = code_weight_param(0.25, 0.5).unwrap();
        let (c, rho) = bac_capacity(0.05, 0.25).unwrap();
        BacCode::new(BacCodeSpec::design(&spec, &params, 0.6 * t / rho * c, 17).unwrap()).unwrap()
    }

    #[test]
    fn designed_geometry() {
        let c = code();
        assert_eq!(c.spec.message_bits, 80);
        assert_eq!(c.spec.used_len(), 216);
        assert!(c.spec.d <= code_weight_param(0.25, 0.5).unwrap() / c.spec.rho_star);
    }

    #[test]
    fn placement_with_identity_keys() {
        let c = code();
        let msg = 0x1234_5678_9abc_def0_1234u128;
        let inner = c.inner_encode(msg).unwrap();
        let x = eff_encode(msg, &PermKeys::identity(), &c).unwrap();
        for (i, &b) in inner.iter().enumerate() {
            assert_eq!(x.get(i), b);
        }
        assert!(x.iter_ones().all(|p| p < 216));
        assert_eq!(eff_decode(&x, &PermKeys::identity(), &c).unwrap(), EffOutcome::Message(msg));
    }

    #[test]
    fn heavy_corruption_fails() {
        let c = code();
        let mut rng = trial_rng(1, 1);
        let keys = PermKeys::random(10_000, 216, &mut rng);
        let x = eff_encode(77, &keys, &c).unwrap();
        let y = x.xor(&BitVector::ones(10_000)).unwrap();
        assert_eq!(eff_decode(&y, &keys, &c).unwrap(), EffOutcome::Failure);
    }

    #[test]
    fn expansion_prefix() {
        let mut rng = trial_rng(3, 3);
        let seed = random_seed_bits(40, &mut rng);
        assert_eq!(expand_key(&seed, 40, &CounterHashExpander).unwrap(), seed);
        let a = expand_key(&seed, 1000, &CounterHashExpander).unwrap();
        let b = expand_key(&seed, 1000, &CounterHashExpander).unwrap();
        assert_eq!(a, b);
        assert!(expand_key(&seed, 10, &CounterHashExpander).is_err());
    }
}
