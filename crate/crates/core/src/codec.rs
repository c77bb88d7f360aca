//! Random-codebook encoder and list decoder with key disambiguation.
//!
//! A book holds `N x L` words of length `n`, with i.i.d. Bernoulli(ρ) bits.
//! Message `i` is sent on word `(i, j)` where `j = G_k(i)` is the keyed
//! polynomial hash. Bob keeps every word whose joint type with the received
//! vector clears two thresholds, then keeps the candidates consistent with the key.
//!
//! Words are a pure function of `(seed, i, j)`, so a book can be held in
//! memory or regenerated on demand with bit-identical results.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::channels::{sample_binomial, BitVector};
use crate::error::{domain, Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::galois::{self, message_chunks, poly_hash, FieldElem};
use crate::specmath::{code_weight_param, ChannelSpec, CovertParams, KeyRegime};
use crate::stats::{binomial_above, binomial_below};

/// Default ceiling on dense codebook storage, in bytes.
pub const DEFAULT_MEMORY_CAP: u64 = 1 << 30;
/// Largest book the exhaustive list decoder will scan.
pub const DEFAULT_SCAN_CAP: u128 = 1 << 24;
/// Message indices are `u128`; books have at most `2^127` messages.
pub const MAX_MESSAGE_BITS: u32 = 127;
/// Sub-code selectors are drawn from at most this many key bits.
pub const MAX_SUBCODE_BITS: u32 = 64;

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    Dense(Vec<BitVector>),
    Lazy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub n: usize,
    /// Number of messages `N`.
    pub num_messages: u128,
    /// `log2 L`; zero means one word per message and no hashing.
    pub hash_bits: u8,
    pub rho: f64,
    pub seed: u64,
    storage: Storage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookManifest {
    pub seed: u64,
    pub n: usize,
    /// Decimal string, since `N` can exceed 64 bits.
    pub num_messages: String,
    pub message_bits: u32,
    pub hashes_per_message: String,
    pub rho: f64,
    pub field_degree: u8,
    /// Modulus of the hash field as a hex bit mask, empty when unhashed.
    pub irreducible_poly: String,
    pub storage: String,
}

fn ceil_log2(v: u128) -> u32 {
    if v <= 1 {
        0
    } else {
        128 - (v - 1).leading_zeros()
    }
}

pub(crate) fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng.random()
}

impl Codebook {
    /// A book whose words are regenerated from `(seed, i, j)` on every access.
    pub fn lazy(n: usize, message_bits: u32, hash_bits: u8, rho: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return domain("blocklength must be positive");
        }
        if message_bits > MAX_MESSAGE_BITS {
            return domain(format!("at most {MAX_MESSAGE_BITS} message bits are supported, got {message_bits}"));
        }
        if hash_bits > 64 {
            return Err(Error::UnsupportedDegree(hash_bits));
        }
        if !(rho > 0.0 && rho < 0.5) {
            return domain(format!("codeword density rho = {rho} must lie in (0, 1/2)"));
        }
        Ok(Self {
            n,
            num_messages: 1u128 << message_bits,
            hash_bits,
            rho,
            seed,
            storage: Storage::Lazy,
        })
    }

    /// A book built from explicit words, one per message (`L = 1`).
    pub fn from_words(words: Vec<BitVector>) -> Result<Self> {
        let Some(first) = words.first() else {
            return domain("a codebook needs at least one word");
        };
        let n = first.len();
        if let Some(bad) = words.iter().find(|w| w.len() != n) {
            return Err(Error::LengthMismatch {
                left: n,
                right: bad.len(),
            });
        }
        let ones: usize = words.iter().map(|w| w.weight()).sum();
        Ok(Self {
            n,
            num_messages: words.len() as u128,
            hash_bits: 0,
            rho: ones as f64 / (n * words.len()) as f64,
            seed: 0,
            storage: Storage::Dense(words),
        })
    }

    /// Materialize every word, refusing if the storage would exceed `cap` bytes.
    pub fn materialize(&self, cap: u64) -> Result<Self> {
        let total = self.size();
        let bytes = (self.n.div_ceil(64) * 8) as u128 * total;
        if bytes > cap as u128 {
            return Err(Error::TooLarge {
                what: "dense codebook",
                required: format!("{bytes} bytes"),
                cap: format!("{cap} bytes"),
            });
        }
        let l = self.hashes_per_message() as u128;
        let words = (0..total)
            .map(|idx| self.word(idx / l, (idx % l) as u64))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            storage: Storage::Dense(words),
            ..self.clone()
        })
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn message_bits(&self) -> u32 {
        ceil_log2(self.num_messages)
    }

    /// `L`.
    pub fn hashes_per_message(&self) -> u64 {
        if self.hash_bits >= 64 {
            u64::MAX
        } else {
            1u64 << self.hash_bits
        }
    }

    /// `N·L`, saturating.
    pub fn size(&self) -> u128 {
        self.num_messages.saturating_mul(self.hashes_per_message() as u128)
    }

    /// `log2(N·L)`.
    pub fn size_log2(&self) -> f64 {
        (self.num_messages as f64).log2() + self.hash_bits as f64
    }

    fn check_index(&self, i: u128, j: u64) -> Result<()> {
        if i >= self.num_messages {
            return Err(Error::OutOfRange {
                index: format!("message {i}"),
                limit: self.num_messages.to_string(),
            });
        }
        if self.hash_bits < 64 && j >= self.hashes_per_message() {
            return Err(Error::OutOfRange {
                index: format!("hash {j}"),
                limit: self.hashes_per_message().to_string(),
            });
        }
        Ok(())
    }

    fn word_rng(&self, i: u128, j: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..24].copy_from_slice(&i.to_le_bytes());
        key[24..].copy_from_slice(&j.to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }

    /// Sorted one-positions of word `(i, j)`.
    pub fn word_ones(&self, i: u128, j: u64) -> Result<Vec<usize>> {
        self.check_index(i, j)?;
        if let Storage::Dense(words) = &self.storage {
            let idx = i * self.hashes_per_message() as u128 + j as u128;
            return Ok(words[idx as usize].iter_ones().collect());
        }
        // geometric gaps between ones give i.i.d. Bernoulli(rho) bits
        let mut rng = self.word_rng(i, j);
        let log_miss = (-self.rho).ln_1p();
        let mut ones = Vec::with_capacity((self.rho * self.n as f64 * 1.5) as usize + 4);
        let mut pos: u64 = 0;
        loop {
            let u: f64 = 1.0 - rng.random::<f64>();
            let gap = (u.ln() / log_miss).floor();
            // NaN gaps also stop the walk
            if gap.is_nan() || gap >= self.n as f64 {
                break;
            }
            pos += gap as u64;
            if pos >= self.n as u64 {
                break;
            }
            ones.push(pos as usize);
            pos += 1;
        }
        Ok(ones)
    }

    pub fn word(&self, i: u128, j: u64) -> Result<BitVector> {
        if let Storage::Dense(words) = &self.storage {
            self.check_index(i, j)?;
            let idx = i * self.hashes_per_message() as u128 + j as u128;
            return Ok(words[idx as usize].clone());
        }
        Ok(BitVector::from_positions(self.n, self.word_ones(i, j)?))
    }

    /// All words in `(i, j)` lexicographic order. Only for books below `cap` words.
    pub fn all_words(&self, cap: u128) -> Result<Vec<BitVector>> {
        if self.size() > cap {
            return Err(Error::TooLarge {
                what: "codebook enumeration",
                required: format!("{} words", self.size()),
                cap: format!("{cap} words"),
            });
        }
        let l = self.hashes_per_message() as u128;
        (0..self.size())
            .map(|idx| self.word(idx / l, (idx % l) as u64))
            .collect()
    }

    /// Independent sub-book number `index`; index 0 is the book itself.
    pub fn subcode(&self, index: u64) -> Self {
        if index == 0 {
            return self.clone();
        }
        Self {
            seed: derive_seed(self.seed, index),
            storage: Storage::Lazy,
            ..self.clone()
        }
    }

    pub fn manifest(&self) -> CodebookManifest {
        CodebookManifest {
            seed: self.seed,
            n: self.n,
            num_messages: self.num_messages.to_string(),
            message_bits: self.message_bits(),
            hashes_per_message: if self.hash_bits >= 64 {
                "18446744073709551616".into()
            } else {
                self.hashes_per_message().to_string()
            },
            rho: self.rho,
            field_degree: self.hash_bits,
            irreducible_poly: galois::modulus(self.hash_bits)
                .map(|f| format!("{f:#x}"))
                .unwrap_or_default(),
            storage: if self.is_dense() { "dense" } else { "lazy" }.into(),
        }
    }
}

/// Per-word density `t(q, eps_d)/√n` of the covert scheme.
pub fn scheme_density(spec: &ChannelSpec, params: &CovertParams) -> Result<f64> {
    let rho = code_weight_param(spec.q, params.eps_d)? / params.sqrt_n();
    if rho <= 0.0 {
        return domain("eps_d = 0 forces an all-zero codebook");
    }
    if rho >= 0.5 {
        return domain(format!("codeword density {rho} is not below 1/2"));
    }
    Ok(rho)
}

/// Dense book for the given parameters, capped at [`DEFAULT_MEMORY_CAP`].
pub fn generate_codebook(spec: &ChannelSpec, params: &CovertParams, seed: u64) -> Result<Codebook> {
    generate_codebook_capped(spec, params, seed, DEFAULT_MEMORY_CAP)
}

pub fn generate_codebook_capped(
    spec: &ChannelSpec,
    params: &CovertParams,
    seed: u64,
    cap: u64,
) -> Result<Codebook> {
    scheme_book(spec, params, seed)?.materialize(cap)
}

/// Lazy book for the given parameters.
pub fn scheme_book(spec: &ChannelSpec, params: &CovertParams, seed: u64) -> Result<Codebook> {
    let rho = scheme_density(spec, params)?;
    let bits = params.message_bits();
    if bits == 0 {
        return domain("r·√n must be at least 1");
    }
    let layout = KeyLayout::for_params(params, bits)?;
    Codebook::lazy(params.n as usize, bits, layout.field_degree, rho, seed)
}

/// How the shared key is spent: `hash_key_bits` for each of `k1` and `k2`,
/// the rest on the sub-code selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyLayout {
    pub hash_key_bits: u8,
    /// Degree of the hash field, zero when there is no hash.
    pub field_degree: u8,
    pub subcode_bits: u32,
}

impl KeyLayout {
    pub fn for_params(params: &CovertParams, message_bits: u32) -> Result<Self> {
        let full = galois::field_degree_for(params.n);
        let (h, sub) = match params.regime {
            KeyRegime::Small => (full, 0),
            KeyRegime::Moderate { sigma } => (full, (sigma * params.sqrt_n() - 1e-9).ceil() as u32),
            KeyRegime::Large => (full, MAX_SUBCODE_BITS),
            KeyRegime::Exact { bits, .. } => {
                let h = (bits / 2).min(full as u32) as u8;
                (h, bits - 2 * h as u32)
            }
        };
        if sub > MAX_SUBCODE_BITS {
            return domain(format!("sub-code selector of {sub} bits exceeds {MAX_SUBCODE_BITS}"));
        }
        let field_degree = if h == 0 {
            0
        } else {
            // short keys live in the smallest field that still admits the chunk count
            let mut m = h;
            while m < 64 && (message_bits.div_ceil(m as u32) as u64) >= (1u64 << m) {
                m += 1;
            }
            m
        };
        Ok(Self {
            hash_key_bits: h,
            field_degree,
            subcode_bits: sub,
        })
    }

    pub fn total_bits(&self) -> u32 {
        2 * self.hash_key_bits as u32 + self.subcode_bits
    }

    pub fn random_key<R: Rng + ?Sized>(&self, rng: &mut R) -> KeyMaterial {
        let m = self.field_degree.max(1);
        let kmask = low_mask(self.hash_key_bits as u32);
        let k1 = rng.random::<u64>() & kmask;
        let k2 = rng.random::<u64>() & kmask;
        let subcode = rng.random::<u64>() & low_mask(self.subcode_bits);
        KeyMaterial {
            k1: FieldElem { value: k1, m },
            k2: FieldElem { value: k2, m },
            subcode,
        }
    }

    /// Key number `index`: low bits to `k1`, then `k2`, then the sub-code selector.
    pub fn key_from_index(&self, index: u128) -> KeyMaterial {
        let m = self.field_degree.max(1);
        let h = self.hash_key_bits as u32;
        let kmask = low_mask(h) as u128;
        let k1 = (index & kmask) as u64;
        let k2 = ((index >> h) & kmask) as u64;
        let subcode = (index >> (2 * h)) as u64 & low_mask(self.subcode_bits);
        KeyMaterial {
            k1: FieldElem { value: k1, m },
            k2: FieldElem { value: k2, m },
            subcode,
        }
    }
}

fn low_mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Shared secret: hash keys and the sub-code selector.
/// For unhashed books (`L = 1`) the hash keys are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyMaterial {
    pub k1: FieldElem,
    pub k2: FieldElem,
    pub subcode: u64,
}

/// Hash index `G_k(i)` of message `i` in `book`.
pub fn hash_index(msg: u128, key: &KeyMaterial, book: &Codebook) -> Result<u64> {
    if book.hash_bits == 0 {
        return Ok(0);
    }
    if key.k1.m != book.hash_bits {
        return Err(Error::DegreeMismatch {
            left: key.k1.m,
            right: book.hash_bits,
        });
    }
    let chunks = message_chunks(msg, book.message_bits(), book.hash_bits)?;
    Ok(poly_hash(&chunks, key.k1, key.k2)?.value)
}

/// Transmitted word: all zeros when silent, word `(msg, G_k(msg))` when active.
pub fn encode(active: bool, msg: u128, key: &KeyMaterial, book: &Codebook) -> Result<BitVector> {
    if !active {
        return Ok(BitVector::zeros(book.n));
    }
    if msg >= book.num_messages {
        return Err(Error::OutOfRange {
            index: format!("message {msg}"),
            limit: book.num_messages.to_string(),
        });
    }
    book.word(msg, hash_index(msg, key, book)?)
}

/// Joint type of `(x, y)`: `fuv` is the fraction of positions with `x = u`, `y = v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairFractions {
    pub f00: f64,
    pub f01: f64,
    pub f10: f64,
    pub f11: f64,
    pub counts: [usize; 4],
}

pub fn pair_fractions(x: &BitVector, y: &BitVector) -> Result<PairFractions> {
    let c11 = x.and_weight(y)?;
    let wx = x.weight();
    let wy = y.weight();
    let n = x.len();
    let c10 = wx - c11;
    let c01 = wy - c11;
    let c00 = n - c11 - c10 - c01;
    let nf = n as f64;
    Ok(PairFractions {
        f00: c00 as f64 / nf,
        f01: c01 as f64 / nf,
        f10: c10 as f64 / nf,
        f11: c11 as f64 / nf,
        counts: [c00, c01, c10, c11],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ListDecoderConfig {
    pub eps1: f64,
    pub eps2: f64,
    pub list_cap: u128,
}

impl ListDecoderConfig {
    /// `eps1 = 1/log2 n`, `eps2 = (p - pq)/((q - p + pq) log2 n)`, cap `n^2`.
    pub fn standard(n: usize, spec: &ChannelSpec) -> Self {
        let ln = (n as f64).log2();
        let (p, q) = (spec.p, spec.q);
        Self {
            eps1: 1.0 / ln,
            eps2: (p - p * q) / ((q - p + p * q) * ln),
            list_cap: (n as u128) * (n as u128),
        }
    }

    /// Strict bounds `(c10 < upper, c11 > lower)` on the `(1,0)` and `(1,1)` pair counts.
    pub fn thresholds(&self, n: usize, rho: f64, spec: &ChannelSpec) -> (f64, f64) {
        let flip = spec.induced_one_to_zero();
        let rn = rho * n as f64;
        (
            rn * spec.p * (1.0 - spec.q) / spec.q * (1.0 + self.eps1),
            rn * (1.0 - flip) * (1.0 - self.eps2),
        )
    }
}

#[inline]
fn passes(c10: usize, c11: usize, th: (f64, f64)) -> bool {
    (c10 as f64) < th.0 && (c11 as f64) > th.1
}

fn counts_against(ones: &[usize], y: &BitVector) -> (usize, usize) {
    let c11 = ones.iter().filter(|&&p| y.get(p)).count();
    (ones.len() - c11, c11)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedList {
    /// Passing `(i, j)` pairs in lexicographic order.
    pub entries: Vec<(u128, u64)>,
    /// The list reached the configured cap.
    pub overflow: bool,
}

/// Exhaustive scan of the book for words clearing both thresholds.
pub fn list_decode(
    y: &BitVector,
    book: &Codebook,
    spec: &ChannelSpec,
    cfg: &ListDecoderConfig,
    mode: Execution,
) -> Result<DecodedList> {
    list_decode_capped(y, book, spec, cfg, mode, DEFAULT_SCAN_CAP)
}

pub fn list_decode_capped(
    y: &BitVector,
    book: &Codebook,
    spec: &ChannelSpec,
    cfg: &ListDecoderConfig,
    mode: Execution,
    scan_cap: u128,
) -> Result<DecodedList> {
    if y.len() != book.n {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: book.n,
        });
    }
    let total = book.size();
    if total > scan_cap {
        return Err(Error::TooLarge {
            what: "exhaustive list decoding",
            required: format!("{total} words"),
            cap: format!("{scan_cap} words"),
        });
    }
    let th = cfg.thresholds(book.n, book.rho, spec);
    let l = book.hashes_per_message() as u128;
    let chunk = 1024u128;
    let blocks = total.div_ceil(chunk) as u64;
    let parts = map_indexed(blocks, mode, |b| {
        let lo = b as u128 * chunk;
        let hi = (lo + chunk).min(total);
        let mut hits = Vec::new();
        for idx in lo..hi {
            let (i, j) = (idx / l, (idx % l) as u64);
            let ones = book.word_ones(i, j).expect("index in range");
            let (c10, c11) = counts_against(&ones, y);
            if passes(c10, c11, th) {
                hits.push((i, j));
            }
        }
        hits
    });
    let entries: Vec<_> = parts.into_iter().flatten().collect();
    let overflow = entries.len() as u128 >= cfg.list_cap;
    Ok(DecodedList { entries, overflow })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "message", rename_all = "lowercase")]
pub enum DecodeOutcome {
    Silent,
    Message(u128),
    Error,
}

/// Keep key-consistent candidates; none decodes silence, one message decodes it,
/// several distinct messages is a decoding error.
pub fn disambiguate(cands: &[(u128, u64)], key: &KeyMaterial, book: &Codebook) -> Result<DecodeOutcome> {
    let mut messages = BTreeSet::new();
    for &(i, j) in cands {
        if hash_index(i, key, book)? == j {
            messages.insert(i);
        }
    }
    Ok(match messages.len() {
        0 => DecodeOutcome::Silent,
        1 => DecodeOutcome::Message(*messages.iter().next().unwrap()),
        _ => DecodeOutcome::Error,
    })
}

pub fn select_subcode(index: u64, books: &[Codebook]) -> Result<&Codebook> {
    books.get(index as usize).ok_or_else(|| Error::OutOfRange {
        index: format!("sub-code {index}"),
        limit: books.len().to_string(),
    })
}

/// Probability that a fresh Bernoulli(ρ) word clears both thresholds against `y`.
pub fn spurious_pass_probability(y: &BitVector, rho: f64, th: (f64, f64)) -> f64 {
    let n = y.len() as u64;
    let wy = y.weight() as u64;
    binomial_below(n - wy, rho, th.0) * binomial_above(wy, rho, th.1)
}

/// Draw `Bin(count, p)` for counts beyond 64 bits by Poisson or normal approximation.
fn sample_large_binomial<R: Rng + ?Sized>(count: f64, p: f64, rng: &mut R) -> f64 {
    if count <= 0.0 || p <= 0.0 {
        return 0.0;
    }
    if count < 1.8e19 {
        return sample_binomial(count as u64, p, rng) as f64;
    }
    let mean = count * p;
    if mean < 1e-12 {
        // P(at least one) is below 1e-12: draw the rare event directly
        return if rng.random::<f64>() < mean { 1.0 } else { 0.0 };
    }
    if mean < 1e6 {
        return Poisson::new(mean).expect("positive mean").sample(rng).floor();
    }
    let sd = (mean * (1.0 - p)).sqrt();
    Normal::new(mean, sd).expect("finite").sample(rng).round().max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleDecode {
    pub outcome: DecodeOutcome,
    /// Total list size (exact for revealed words, sampled for the rest).
    pub list_size: f64,
    pub overflow: bool,
}

/// List decoding for books too large to scan.
///
/// Words in `revealed` (the transmitted word and any word the jammer fetched)
/// are tested exactly. Every other word is independent of `y`, so the number of
/// them that clear the thresholds is binomial with the spurious-pass
/// probability; consistent and inconsistent pools are drawn separately.
pub fn ensemble_decode<R: Rng + ?Sized>(
    y: &BitVector,
    book: &Codebook,
    key: &KeyMaterial,
    spec: &ChannelSpec,
    cfg: &ListDecoderConfig,
    revealed: &[(u128, u64)],
    rng: &mut R,
) -> Result<EnsembleDecode> {
    if y.len() != book.n {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: book.n,
        });
    }
    let th = cfg.thresholds(book.n, book.rho, spec);
    let unique: BTreeSet<(u128, u64)> = revealed.iter().copied().collect();
    let mut consistent_revealed = 0f64;
    let mut inconsistent_revealed = 0f64;
    let mut passing = Vec::new();
    for &(i, j) in &unique {
        if hash_index(i, key, book)? == j {
            consistent_revealed += 1.0;
        } else {
            inconsistent_revealed += 1.0;
        }
        let (c10, c11) = counts_against(&book.word_ones(i, j)?, y);
        if passes(c10, c11, th) {
            passing.push((i, j));
        }
    }
    let pi = spurious_pass_probability(y, book.rho, th);
    let n_msgs = book.num_messages as f64;
    let total = n_msgs * book.hashes_per_message() as f64;
    let extra_consistent = sample_large_binomial(n_msgs - consistent_revealed, pi, rng);
    let extra_other = sample_large_binomial(total - n_msgs - inconsistent_revealed, pi, rng);
    let list_size = passing.len() as f64 + extra_consistent + extra_other;

    let mut outcome = disambiguate(&passing, key, book)?;
    if extra_consistent >= 1.0 {
        outcome = match outcome {
            DecodeOutcome::Silent if extra_consistent < 1.5 => {
                // a single unseen word decodes to a message Bob did not receive
                let seen: BTreeSet<u128> = unique.iter().map(|&(i, _)| i).collect();
                let mut pick = rng.random::<u128>() % book.num_messages;
                while seen.contains(&pick) && seen.len() < book.num_messages as usize {
                    pick = rng.random::<u128>() % book.num_messages;
                }
                DecodeOutcome::Message(pick)
            }
            _ => DecodeOutcome::Error,
        };
    }
    Ok(EnsembleDecode {
        outcome,
        list_size,
        overflow: list_size >= cfg.list_cap as f64,
    })
}
