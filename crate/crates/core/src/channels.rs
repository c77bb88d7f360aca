//! Binary vectors, the memoryless channels around the link, and the jammer's
//! flip budget.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// A packed length-`n` bit string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        v.clear_tail();
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Bits `0..len` from the low end of `value`.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value;
            v.clear_tail();
        }
        v
    }

    pub fn from_positions(len: usize, positions: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for p in positions {
            v.set(p, true);
        }
        v
    }

    /// Parse a string of `0`/`1` characters, position 0 first.
    pub fn parse(s: &str) -> Result<Self> {
        let bits: Result<Vec<bool>> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => domain(format!("`{c}` is not a bit")),
            })
            .collect();
        Ok(Self::from_bits(&bits?))
    }

    /// Random vector whose bits are i.i.d. Bernoulli(`rho`).
    pub fn bernoulli<R: Rng + ?Sized>(len: usize, rho: f64, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            if rng.random::<f64>() < rho {
                v.set(i, true);
            }
        }
        v
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let m = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(())
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(Self {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
            len: self.len,
        })
    }

    pub fn xor_assign(&mut self, other: &Self) -> Result<()> {
        self.check_len(other)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    /// `|self ∧ other|`.
    pub fn and_weight(&self, other: &Self) -> Result<usize> {
        self.check_len(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum())
    }

    pub fn distance(&self, other: &Self) -> Result<usize> {
        self.check_len(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl std::fmt::Display for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// At most `⌊p·n⌋` flips per block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JamBudget {
    pub n: usize,
    pub max_flips: usize,
}

impl JamBudget {
    pub fn new(n: usize, p: f64) -> Self {
        Self {
            n,
            max_flips: (p * n as f64 + 1e-9).floor() as usize,
        }
    }
}

/// Flip each bit independently with probability `q`.
pub fn bsc_apply<R: Rng + ?Sized>(x: &BitVector, q: f64, rng: &mut R) -> Result<BitVector> {
    if !(0.0..0.5).contains(&q) {
        return domain(format!("BSC crossover {q} must lie in [0, 1/2)"));
    }
    let mut out = x.clone();
    if q > 0.0 {
        for i in 0..x.len() {
            if rng.random::<f64>() < q {
                out.flip(i);
            }
        }
    }
    Ok(out)
}

/// Flip zeros with probability `p01` and ones with probability `p10`.
pub fn bac_apply<R: Rng + ?Sized>(
    x: &BitVector,
    p01: f64,
    p10: f64,
    rng: &mut R,
) -> Result<BitVector> {
    if !(0.0..1.0).contains(&p01) || !(0.0..1.0).contains(&p10) {
        return domain(format!("BAC flip probabilities ({p01}, {p10}) must lie in [0, 1)"));
    }
    let mut out = x.clone();
    for i in 0..x.len() {
        let p = if x.get(i) { p10 } else { p01 };
        if p > 0.0 && rng.random::<f64>() < p {
            out.flip(i);
        }
    }
    Ok(out)
}

pub fn check_budget(s: &BitVector, budget: &JamBudget) -> Result<bool> {
    if s.len() != budget.n {
        return Err(Error::LengthMismatch {
            left: s.len(),
            right: budget.n,
        });
    }
    Ok(s.weight() <= budget.max_flips)
}

/// Clear uniformly chosen excess flips until `s` is within budget.
/// Returns whether anything was cleared.
pub fn enforce_budget<R: Rng + ?Sized>(
    s: &mut BitVector,
    budget: &JamBudget,
    rng: &mut R,
) -> Result<bool> {
    if check_budget(s, budget)? {
        return Ok(false);
    }
    let mut ones: Vec<usize> = s.iter_ones().collect();
    let excess = ones.len() - budget.max_flips;
    // partial Fisher-Yates picks the positions to clear
    for k in 0..excess {
        let j = rng.random_range(k..ones.len());
        ones.swap(k, j);
        s.set(ones[k], false);
    }
    Ok(true)
}

/// Independent per-trial generator: the master seed keys the cipher and the
/// trial index selects the stream, so trials can run in any order.
pub fn trial_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Count of successes among `n` Bernoulli(`p`) draws.
pub(crate) fn sample_binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("valid binomial").sample(rng)
}
