//! The warden-jammer: detectors on his BSC(q) view, the two output
//! likelihoods, and jamming strategies behind a common trait.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::channels::{BitVector, JamBudget};
use crate::codec::{hash_index, Codebook, KeyLayout};
use crate::error::{domain, Result};
use crate::specmath::{gaussian_tail_inv, ChannelSpec};
use crate::stats::log_sum_exp;

/// Books larger than this are not enumerated for likelihood evaluation.
pub const LIKELIHOOD_WORD_CAP: u128 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorVerdict {
    pub t_hat: bool,
    pub statistic: f64,
}

/// `ln Q0(z)` under silence: `z ~ BSC(q)` of the zero word.
pub fn q0_ln_prob(z: &BitVector, q: f64) -> f64 {
    let w = z.weight() as f64;
    let n = z.len() as f64;
    w * q.ln() + (n - w) * (-q).ln_1p()
}

pub fn q0_prob(z: &BitVector, q: f64) -> f64 {
    q0_ln_prob(z, q).exp()
}

/// Words of a book with their weights, held for repeated likelihood evaluation.
#[derive(Debug, Clone)]
pub struct Mixture {
    words: Vec<BitVector>,
    weights: Vec<usize>,
}

impl Mixture {
    pub fn from_book(book: &Codebook) -> Result<Self> {
        let words = book.all_words(LIKELIHOOD_WORD_CAP)?;
        let weights = words.iter().map(|w| w.weight()).collect();
        Ok(Self { words, weights })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// `ln(Q1(z)/Q0(z))`. Each word contributes `θ^(2a - w)` with
    /// `θ = (1-q)/q`, `a = |x ∧ z|`, `w = |x|`.
    pub fn ln_ratio(&self, z: &BitVector, q: f64) -> Result<f64> {
        let ln_theta = ((1.0 - q) / q).ln();
        let terms = self
            .words
            .iter()
            .zip(&self.weights)
            .map(|(x, &w)| Ok((2.0 * x.and_weight(z)? as f64 - w as f64) * ln_theta))
            .collect::<Result<Vec<f64>>>()?;
        Ok(log_sum_exp(&terms) - (terms.len() as f64).ln())
    }
}

/// `ln Q1(z)`: uniform mixture over the book of BSC(q) likelihoods.
pub fn q1_ln_prob(z: &BitVector, book: &Codebook, q: f64) -> Result<f64> {
    Ok(Mixture::from_book(book)?.ln_ratio(z, q)? + q0_ln_prob(z, q))
}

pub fn q1_prob(z: &BitVector, book: &Codebook, q: f64) -> Result<f64> {
    Ok(q1_ln_prob(z, book, q)?.exp())
}

/// Default weight-detector constant: a 5% false-alarm rate under the Gaussian approximation.
pub fn default_weight_constant(q: f64) -> f64 {
    (q * (1.0 - q)).sqrt() * gaussian_tail_inv(0.05).expect("0.05 is in range")
}

/// Declare a transmission when `wt(z) > qn + c_t√n`.
pub fn weight_detector(z: &BitVector, q: f64, c_t: f64) -> DetectorVerdict {
    let n = z.len() as f64;
    let w = z.weight() as f64;
    DetectorVerdict {
        t_hat: w > q * n + c_t * n.sqrt(),
        statistic: w,
    }
}

/// Declare a transmission when `Q1(z) >= Q0(z)`; the statistic is `log2(Q1/Q0)`.
pub fn lr_detector(z: &BitVector, book: &Codebook, q: f64) -> Result<DetectorVerdict> {
    lr_detector_with(z, &Mixture::from_book(book)?, q)
}

pub fn lr_detector_with(z: &BitVector, mix: &Mixture, q: f64) -> Result<DetectorVerdict> {
    let stat = mix.ln_ratio(z, q)? / std::f64::consts::LN_2;
    Ok(DetectorVerdict {
        t_hat: stat >= 0.0,
        statistic: stat,
    })
}

/// A word the jammer pulled from the public book.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchedWord {
    pub subcode: u64,
    pub msg: u128,
    pub hash: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JamOutput {
    pub s: BitVector,
    pub fetched: Vec<FetchedWord>,
    /// Strategy-specific condition, e.g. the spoofing budget rounded to zero.
    pub flagged: bool,
}

impl JamOutput {
    pub fn silent(n: usize) -> Self {
        Self {
            s: BitVector::zeros(n),
            fetched: Vec::new(),
            flagged: false,
        }
    }
}

/// Everything a jammer may look at.
pub struct JamContext<'a> {
    pub z: &'a BitVector,
    pub book: &'a Codebook,
    pub layout: &'a KeyLayout,
    pub spec: &'a ChannelSpec,
    pub budget: &'a JamBudget,
    /// Code-weight parameter of the scheme under attack.
    pub t: f64,
}

/// A jamming strategy. Output may exceed the budget; the channel truncates it.
pub trait Jammer: Send + Sync {
    fn name(&self) -> &str;
    fn jam(&self, ctx: &JamContext<'_>, rng: &mut dyn RngCore) -> Result<JamOutput>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoJammer;

impl Jammer for NoJammer {
    fn name(&self) -> &str {
        "none"
    }

    fn jam(&self, ctx: &JamContext<'_>, _rng: &mut dyn RngCore) -> Result<JamOutput> {
        Ok(JamOutput::silent(ctx.z.len()))
    }
}

/// Flip only inside the observed support: `S_i ~ Bern(p(1-ν)/q)` where `z_i = 1`.
pub fn myopic_jammer<R: Rng + ?Sized>(z: &BitVector, spec: &ChannelSpec, nu: f64, rng: &mut R) -> Result<BitVector> {
    let target = spec.p * (1.0 - nu);
    if target > spec.q {
        return domain(format!("p(1 - nu) = {target} exceeds q = {}", spec.q));
    }
    let prob = target / spec.q;
    let mut s = BitVector::zeros(z.len());
    for i in z.iter_ones() {
        if rng.random::<f64>() < prob {
            s.set(i, true);
        }
    }
    Ok(s)
}

/// Slack `ν`; `None` uses `n^(-1/3)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MyopicJammer {
    pub nu: Option<f64>,
}

impl MyopicJammer {
    pub fn slack(&self, n: usize) -> f64 {
        self.nu.unwrap_or_else(|| (n as f64).powf(-1.0 / 3.0))
    }
}

impl Jammer for MyopicJammer {
    fn name(&self) -> &str {
        "myopic"
    }

    fn jam(&self, ctx: &JamContext<'_>, rng: &mut dyn RngCore) -> Result<JamOutput> {
        let s = myopic_jammer(ctx.z, ctx.spec, self.slack(ctx.z.len()), rng)?;
        Ok(JamOutput {
            s,
            fetched: Vec::new(),
            flagged: false,
        })
    }
}

/// Messages spoofed per key value: `min(⌊p√n / (2t·2^Δ)⌋, N/2)`.
pub fn spoof_count(spec: &ChannelSpec, n: usize, t: f64, key_bits: u32, num_messages: u128) -> u128 {
    if t <= 0.0 {
        return 0;
    }
    let raw = spec.p * (n as f64).sqrt() / (2.0 * t * 2f64.powi(key_bits as i32));
    (raw.floor() as u128).min(num_messages / 2)
}

/// Ignore `z`; for every key value XOR the words of `b` random messages.
pub fn oblivious_jammer<R: Rng + ?Sized>(
    book: &Codebook,
    layout: &KeyLayout,
    spec: &ChannelSpec,
    t: f64,
    rng: &mut R,
) -> Result<JamOutput> {
    if book.num_messages < 2 {
        return domain("the oblivious attack needs at least two messages");
    }
    let key_bits = layout.total_bits();
    let b = spoof_count(spec, book.n, t, key_bits, book.num_messages);
    if b == 0 {
        return Ok(JamOutput {
            flagged: true,
            ..JamOutput::silent(book.n)
        });
    }
    let mut s = BitVector::zeros(book.n);
    let mut fetched = Vec::new();
    // b > 0 forces 2^key_bits <= p√n/(2t), so the key space is small
    for kv in 0..(1u128 << key_bits) {
        let key = layout.key_from_index(kv);
        let sub = book.subcode(key.subcode);
        let mut chosen: Vec<u128> = Vec::with_capacity(b as usize);
        while (chosen.len() as u128) < b {
            let i = rng.random::<u128>() % book.num_messages;
            if !chosen.contains(&i) {
                chosen.push(i);
            }
        }
        for i in chosen {
            let j = hash_index(i, &key, &sub)?;
            s.xor_assign(&sub.word(i, j)?)?;
            fetched.push(FetchedWord {
                subcode: key.subcode,
                msg: i,
                hash: j,
            });
        }
    }
    Ok(JamOutput {
        s,
        fetched,
        flagged: false,
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ObliviousJammer;

impl Jammer for ObliviousJammer {
    fn name(&self) -> &str {
        "oblivious"
    }

    fn jam(&self, ctx: &JamContext<'_>, rng: &mut dyn RngCore) -> Result<JamOutput> {
        oblivious_jammer(ctx.book, ctx.layout, ctx.spec, ctx.t, rng)
    }
}
