//! Experiment engine: reliability and covertness Monte Carlo, the spoofing
//! attack, exact small-instance evaluators, and capacity/region sweeps.
//!
//! Every trial owns a generator derived from `(master_seed, trial index)`, and
//! tallies are reduced in index order, so a configuration always reproduces
//! the same report whether it runs sequentially or in parallel.

use std::io::Write;

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::adversary::{
    default_weight_constant, lr_detector_with, spoof_count, weight_detector, JamContext, Jammer,
    Mixture, MyopicJammer, NoJammer, ObliviousJammer, LIKELIHOOD_WORD_CAP,
};
use crate::channels::{bsc_apply, enforce_budget, sample_binomial, trial_rng, BitVector, JamBudget};
use crate::codec::{
    disambiguate, encode, ensemble_decode, hash_index, list_decode_capped, scheme_book, Codebook,
    CodebookManifest, DecodeOutcome, KeyLayout, ListDecoderConfig, DEFAULT_SCAN_CAP,
};
use crate::effcode::{eff_decode, eff_encode, BacCode, BacCodeSpec, EffOutcome, PermKeys};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::specmath::{
    code_weight_param, covert_capacity, gaussian_tail, ChannelSpec, CovertParams, KeyRegime,
};
use crate::stats::{binomial_ln_pmf, mean_ci, wilson, RateCi};

/// Exact TV enumerates `2^n` outputs; beyond these sizes it refuses.
pub const EXACT_TV_MAX_N: usize = 16;
pub const EXACT_TV_MAX_WORDS: u128 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Random codebook, list decoding and hash disambiguation.
    RandomCode,
    /// Permutation-based scheme with the trellis inner code.
    Efficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JammerSpec {
    None,
    Myopic { nu: Option<f64> },
    Oblivious,
}

impl JammerSpec {
    pub fn build(&self) -> Box<dyn Jammer> {
        match *self {
            JammerSpec::None => Box::new(NoJammer),
            JammerSpec::Myopic { nu } => Box::new(MyopicJammer { nu }),
            JammerSpec::Oblivious => Box::new(ObliviousJammer),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DetectorSpec {
    /// `c_t = None` uses the 5% false-alarm default.
    Weight { c_t: Option<f64> },
    LikelihoodRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub spec: ChannelSpec,
    pub params: CovertParams,
    pub scheme: Scheme,
    pub jammer: JammerSpec,
    pub detector: DetectorSpec,
    /// Trials per arm.
    pub trials: u64,
    pub master_seed: u64,
    /// Codebook / label-table seed; defaults to the master seed.
    pub book_seed: Option<u64>,
    /// Crossover of the eavesdropper's channel when it differs from `spec.q`
    /// (`0` gives him a noiseless view).
    pub james_noise: Option<f64>,
    /// Samples for the covertness estimate; 0 skips it.
    pub tv_samples: u64,
    /// Largest book decoded by exhaustive scan.
    pub scan_cap: u64,
    pub execution: Execution,
}

impl ExperimentConfig {
    pub fn new(spec: ChannelSpec, params: CovertParams, master_seed: u64) -> Self {
        Self {
            spec,
            params,
            scheme: Scheme::RandomCode,
            jammer: JammerSpec::Myopic { nu: None },
            detector: DetectorSpec::Weight { c_t: None },
            trials: 200,
            master_seed,
            book_seed: None,
            james_noise: None,
            tv_samples: 0,
            scan_cap: DEFAULT_SCAN_CAP as u64,
            execution: Execution::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if let Some(q) = self.james_noise {
            if !(0.0..0.5).contains(&q) {
                return Err(Error::Config(format!("james_noise = {q} must lie in [0, 1/2)")));
            }
        }
        Ok(())
    }

    fn book_seed(&self) -> u64 {
        self.book_seed.unwrap_or(self.master_seed)
    }

    fn james_q(&self) -> f64 {
        self.james_noise.unwrap_or(self.spec.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvEstimate {
    pub estimate: f64,
    pub ci_half_width: f64,
    pub samples: u64,
    /// `exact_book` when the book was enumerated, `ensemble` otherwise.
    pub route: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub scheme: Scheme,
    pub jammer: JammerSpec,
    /// `exhaustive`, `ensemble` or `trellis`.
    pub decoder: &'static str,
    pub trials: u64,
    pub err_active: u64,
    pub err_silent: u64,
    /// Sum of the two per-arm error rates.
    pub p_err: f64,
    pub active_error: RateCi,
    pub silent_error: RateCi,
    pub false_alarms: u64,
    pub missed_detections: u64,
    pub fa_rate: RateCi,
    pub md_rate: RateCi,
    pub list_overflow: u64,
    pub budget_truncations: u64,
    pub jammer_flags: u64,
    pub key_bits: u64,
    pub tv: Option<TvEstimate>,
    pub book: Option<CodebookManifest>,
    pub code: Option<BacCodeSpec>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    error: bool,
    detected: bool,
    overflow: bool,
    truncated: bool,
    flagged: bool,
}

enum Engine {
    Random {
        book: Codebook,
        layout: KeyLayout,
        mixture: Option<Mixture>,
        exhaustive: bool,
        t: f64,
    },
    Efficient {
        code: BacCode,
    },
}

impl Engine {
    fn build(cfg: &ExperimentConfig) -> Result<Self> {
        match cfg.scheme {
            Scheme::RandomCode => {
                let book = scheme_book(&cfg.spec, &cfg.params, cfg.book_seed())?;
                let layout = KeyLayout::for_params(&cfg.params, book.message_bits())?;
                let mixture = match cfg.detector {
                    DetectorSpec::LikelihoodRatio => Some(james_mixture(&book, &layout)?),
                    DetectorSpec::Weight { .. } => None,
                };
                let exhaustive = book.size() <= cfg.scan_cap as u128;
                let t = code_weight_param(cfg.spec.q, cfg.params.eps_d)?;
                Ok(Engine::Random {
                    book,
                    layout,
                    mixture,
                    exhaustive,
                    t,
                })
            }
            Scheme::Efficient => {
                if cfg.jammer == JammerSpec::Oblivious {
                    return Err(Error::Config(
                        "the oblivious attack targets the random-code scheme".into(),
                    ));
                }
                if cfg.detector == DetectorSpec::LikelihoodRatio {
                    return Err(Error::Config(
                        "the likelihood-ratio detector needs an enumerable codebook".into(),
                    ));
                }
                let spec = BacCodeSpec::design(&cfg.spec, &cfg.params, cfg.params.r, cfg.book_seed())?;
                Ok(Engine::Efficient {
                    code: BacCode::new(spec)?,
                })
            }
        }
    }

    fn decoder_name(&self) -> &'static str {
        match self {
            Engine::Random { exhaustive: true, .. } => "exhaustive",
            Engine::Random { .. } => "ensemble",
            Engine::Efficient { .. } => "trellis",
        }
    }

    fn key_bits(&self) -> u64 {
        match self {
            Engine::Random { layout, .. } => layout.total_bits() as u64,
            Engine::Efficient { code } => {
                let (a, b) = crate::effcode::key_bits(code.spec.n, code.spec.used_len());
                a + b
            }
        }
    }
}

/// All words the eavesdropper must consider: every sub-book, every hash.
fn james_mixture(book: &Codebook, layout: &KeyLayout) -> Result<Mixture> {
    if layout.subcode_bits > 0 {
        return Err(Error::TooLarge {
            what: "likelihood-ratio detector over sub-codes",
            required: format!("2^{} sub-books", layout.subcode_bits),
            cap: "1 sub-book".into(),
        });
    }
    Mixture::from_book(book)
}

fn detect(cfg: &ExperimentConfig, z: &BitVector, mixture: Option<&Mixture>) -> Result<bool> {
    let q = cfg.spec.q;
    Ok(match (cfg.detector, mixture) {
        (DetectorSpec::LikelihoodRatio, Some(mix)) => lr_detector_with(z, mix, q)?.t_hat,
        (DetectorSpec::Weight { c_t }, _) => {
            weight_detector(z, q, c_t.unwrap_or_else(|| default_weight_constant(q))).t_hat
        }
        (DetectorSpec::LikelihoodRatio, None) => {
            return Err(Error::Config("likelihood-ratio detector without a book".into()))
        }
    })
}

fn run_trial(
    cfg: &ExperimentConfig,
    engine: &Engine,
    jammer: &dyn Jammer,
    active: bool,
    rng: &mut dyn RngCore,
) -> Result<Tally> {
    let n = cfg.params.n as usize;
    let budget = JamBudget::new(n, cfg.spec.p);
    let cfg_list = ListDecoderConfig::standard(n, &cfg.spec);
    let mut tally = Tally::default();
    match engine {
        Engine::Random {
            book,
            layout,
            mixture,
            exhaustive,
            t,
        } => {
            let key = layout.random_key(rng);
            let sub = book.subcode(key.subcode);
            let msg = rng.random::<u128>() % sub.num_messages;
            let x = encode(active, msg, &key, &sub)?;
            let z = bsc_apply(&x, cfg.james_q(), rng)?;
            tally.detected = detect(cfg, &z, mixture.as_ref())?;
            let ctx = JamContext {
                z: &z,
                book,
                layout,
                spec: &cfg.spec,
                budget: &budget,
                t: *t,
            };
            let mut out = jammer.jam(&ctx, rng)?;
            tally.flagged = out.flagged;
            tally.truncated = enforce_budget(&mut out.s, &budget, rng)?;
            let y = x.xor(&out.s)?;
            let outcome = if *exhaustive {
                let list = list_decode_capped(&y, &sub, &cfg.spec, &cfg_list, cfg.execution, cfg.scan_cap as u128)?;
                tally.overflow = list.overflow;
                disambiguate(&list.entries, &key, &sub)?
            } else {
                let mut revealed: Vec<(u128, u64)> = out
                    .fetched
                    .iter()
                    .filter(|f| f.subcode == key.subcode)
                    .map(|f| (f.msg, f.hash))
                    .collect();
                if active {
                    revealed.push((msg, hash_index(msg, &key, &sub)?));
                }
                let dec = ensemble_decode(&y, &sub, &key, &cfg.spec, &cfg_list, &revealed, rng)?;
                tally.overflow = dec.overflow;
                dec.outcome
            };
            tally.error = if active {
                outcome != DecodeOutcome::Message(msg)
            } else {
                outcome != DecodeOutcome::Silent
            };
        }
        Engine::Efficient { code } => {
            let k = code.spec.used_len();
            let keys = PermKeys::random(cfg.params.n, k, rng);
            let msg = rng.random::<u128>() & ((1u128 << code.spec.message_bits) - 1);
            let x = if active {
                eff_encode(msg, &keys, code)?
            } else {
                BitVector::zeros(n)
            };
            let z = bsc_apply(&x, cfg.james_q(), rng)?;
            tally.detected = detect(cfg, &z, None)?;
            // the jammer contract wants a book; the efficient scheme has none to expose
            let placeholder = Codebook::from_words(vec![BitVector::zeros(n)])?;
            let layout = KeyLayout {
                hash_key_bits: 0,
                field_degree: 0,
                subcode_bits: 0,
            };
            let ctx = JamContext {
                z: &z,
                book: &placeholder,
                layout: &layout,
                spec: &cfg.spec,
                budget: &budget,
                t: code_weight_param(cfg.spec.q, cfg.params.eps_d)?,
            };
            let mut out = jammer.jam(&ctx, rng)?;
            tally.flagged = out.flagged;
            tally.truncated = enforce_budget(&mut out.s, &budget, rng)?;
            let y = x.xor(&out.s)?;
            let outcome = eff_decode(&y, &keys, code)?;
            // a failure to find a typical codeword is the silent decision
            tally.error = if active {
                outcome != EffOutcome::Message(msg)
            } else {
                outcome != EffOutcome::Failure
            };
        }
    }
    Ok(tally)
}

/// Separate silent and active arms of `cfg.trials` each.
pub fn run_reliability(cfg: &ExperimentConfig) -> Result<TrialReport> {
    run_reliability_with(cfg, cfg.jammer.build().as_ref())
}

/// As [`run_reliability`] with a caller-supplied jamming strategy.
pub fn run_reliability_with(cfg: &ExperimentConfig, jammer: &dyn Jammer) -> Result<TrialReport> {
    cfg.validate()?;
    let engine = Engine::build(cfg)?;
    let trials = cfg.trials;
    // indices [0, trials) are the active arm, [trials, 2·trials) the silent arm
    let tallies = map_indexed(2 * trials, cfg.execution, |idx| {
        let mut rng = trial_rng(cfg.master_seed, idx);
        run_trial(cfg, &engine, jammer, idx < trials, &mut rng)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (active, silent) = tallies.split_at(trials as usize);
    let count = |arm: &[Tally], f: fn(&Tally) -> bool| arm.iter().filter(|t| f(t)).count() as u64;
    let err_active = count(active, |t| t.error);
    let err_silent = count(silent, |t| t.error);
    let false_alarms = count(silent, |t| t.detected);
    let missed = count(active, |t| !t.detected);
    let tv = if cfg.tv_samples > 0 {
        covertness_estimate(cfg, &engine)?
    } else {
        None
    };
    let (book, code) = match &engine {
        Engine::Random { book, .. } => (Some(book.manifest()), None),
        Engine::Efficient { code } => (None, Some(code.spec.clone())),
    };
    Ok(TrialReport {
        scheme: cfg.scheme,
        jammer: cfg.jammer,
        decoder: engine.decoder_name(),
        trials,
        err_active,
        err_silent,
        p_err: err_active as f64 / trials as f64 + err_silent as f64 / trials as f64,
        active_error: wilson(err_active, trials),
        silent_error: wilson(err_silent, trials),
        false_alarms,
        missed_detections: missed,
        fa_rate: wilson(false_alarms, trials),
        md_rate: wilson(missed, trials),
        list_overflow: count(&tallies, |t| t.overflow),
        budget_truncations: count(&tallies, |t| t.truncated),
        jammer_flags: count(&tallies, |t| t.flagged),
        key_bits: engine.key_bits(),
        tv,
        book,
        code,
    })
}

/// Covertness estimate of the configured random-code book alone, without
/// reliability trials. `None` when James's channel is noiseless.
pub fn estimate_covertness(cfg: &ExperimentConfig) -> Result<Option<TvEstimate>> {
    if cfg.scheme != Scheme::RandomCode {
        return Err(Error::Config("covertness is estimated for the random-code scheme".into()));
    }
    let cfg = ExperimentConfig {
        detector: DetectorSpec::Weight { c_t: None },
        ..cfg.clone()
    };
    covertness_estimate(&cfg, &Engine::build(&cfg)?)
}

fn covertness_estimate(cfg: &ExperimentConfig, engine: &Engine) -> Result<Option<TvEstimate>> {
    let Engine::Random { book, layout, .. } = engine else {
        return Ok(None);
    };
    let seed = crate::codec::derive_seed(cfg.master_seed, u64::MAX);
    let q = cfg.james_q();
    if q <= 0.0 {
        return Ok(None);
    }
    if layout.subcode_bits == 0 && book.size() <= LIKELIHOOD_WORD_CAP {
        return mc_tv(book, q, cfg.tv_samples, seed, cfg.execution).map(Some);
    }
    let log2_size = book.size_log2() + layout.subcode_bits as f64;
    mc_tv_ensemble(book.n, book.rho, log2_size, q, cfg.tv_samples, seed, cfg.execution).map(Some)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackReport {
    pub key_bits: u32,
    /// Messages spoofed per key value.
    pub spoofed_per_key: String,
    pub trials: u64,
    pub err_active: u64,
    pub active_error: RateCi,
    pub flagged: u64,
    pub budget_truncations: u64,
    /// `1 - 2/N`, the large-book limit of the error lower bound.
    pub bound_large_book: f64,
    pub decoder: &'static str,
}

/// Active-arm error of the random-code scheme under the oblivious spoofing attack.
pub fn run_attack(cfg: &ExperimentConfig) -> Result<AttackReport> {
    let cfg = ExperimentConfig {
        jammer: JammerSpec::Oblivious,
        scheme: Scheme::RandomCode,
        detector: DetectorSpec::Weight { c_t: None },
        ..cfg.clone()
    };
    cfg.validate()?;
    let engine = Engine::build(&cfg)?;
    let Engine::Random { book, layout, t, .. } = &engine else {
        unreachable!("random-code engine");
    };
    let jammer = ObliviousJammer;
    let tallies = map_indexed(cfg.trials, cfg.execution, |idx| {
        let mut rng = trial_rng(cfg.master_seed, idx);
        run_trial(&cfg, &engine, &jammer, true, &mut rng)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let err = tallies.iter().filter(|t| t.error).count() as u64;
    let b = spoof_count(&cfg.spec, book.n, *t, layout.total_bits(), book.num_messages);
    Ok(AttackReport {
        key_bits: layout.total_bits(),
        spoofed_per_key: b.to_string(),
        trials: cfg.trials,
        err_active: err,
        active_error: wilson(err, cfg.trials),
        flagged: tallies.iter().filter(|t| t.flagged).count() as u64,
        budget_truncations: tallies.iter().filter(|t| t.truncated).count() as u64,
        bound_large_book: 1.0 - 2.0 / book.num_messages as f64,
        decoder: engine.decoder_name(),
    })
}

fn small_instance(book: &Codebook) -> Result<(usize, Vec<u64>)> {
    if book.n > EXACT_TV_MAX_N || book.size() > EXACT_TV_MAX_WORDS {
        return Err(Error::TooLarge {
            what: "exact enumeration",
            required: format!("n = {}, {} words", book.n, book.size()),
            cap: format!("n <= {EXACT_TV_MAX_N}, {EXACT_TV_MAX_WORDS} words"),
        });
    }
    let words = book
        .all_words(EXACT_TV_MAX_WORDS)?
        .iter()
        .map(|w| w.words().first().copied().unwrap_or(0))
        .collect();
    Ok((book.n, words))
}

/// `(Q0(z), Q1(z))` for every `z` in `0..2^n`, folded per block.
fn enumerate_outputs<T, F>(book: &Codebook, q: f64, mode: Execution, fold: F) -> Result<Vec<T>>
where
    T: Send + Default,
    F: Fn(&mut T, f64, f64) + Sync + Send,
{
    let (n, words) = small_instance(book)?;
    let weights: Vec<i32> = words.iter().map(|w| w.count_ones() as i32).collect();
    let ln_theta = ((1.0 - q) / q).ln();
    let inv = 1.0 / words.len() as f64;
    let total: u64 = 1 << n;
    let block = 1024u64.min(total);
    Ok(map_indexed(total / block, mode, |b| {
        let mut acc = T::default();
        for z in b * block..(b + 1) * block {
            let wz = z.count_ones() as f64;
            let q0 = (wz * q.ln() + (n as f64 - wz) * (-q).ln_1p()).exp();
            let ratio: f64 = words
                .iter()
                .zip(&weights)
                .map(|(x, &w)| ((2 * (x & z).count_ones() as i32 - w) as f64 * ln_theta).exp())
                .sum::<f64>()
                * inv;
            fold(&mut acc, q0, q0 * ratio);
        }
        acc
    }))
}

/// `V(Q0, Q1) = Σ_z max(0, Q0(z) - Q1(z))` by full enumeration.
pub fn exact_tv(book: &Codebook, q: f64, mode: Execution) -> Result<f64> {
    let parts = enumerate_outputs(book, q, mode, |acc: &mut f64, q0, q1| {
        *acc += (q0 - q1).max(0.0);
    })?;
    Ok(parts.iter().sum())
}

/// `P_FA + P_MD` of the likelihood-ratio detector by full enumeration.
pub fn lr_error_sum(book: &Codebook, q: f64, mode: Execution) -> Result<f64> {
    let parts = enumerate_outputs(book, q, mode, |acc: &mut f64, q0, q1| {
        // declare active iff Q1 >= Q0
        *acc += if q1 >= q0 { q0 } else { q1 };
    })?;
    Ok(parts.iter().sum())
}

/// Unbiased estimate of `E_{z~Q0}[(1 - Q1(z)/Q0(z))^+]` over an enumerable book.
pub fn mc_tv(book: &Codebook, q: f64, samples: u64, seed: u64, mode: Execution) -> Result<TvEstimate> {
    let mix = Mixture::from_book(book)?;
    let zero = BitVector::zeros(book.n);
    let vals = map_indexed(samples, mode, |idx| {
        let mut rng = trial_rng(seed, idx);
        let z = bsc_apply(&zero, q, &mut rng)?;
        Ok((1.0 - mix.ln_ratio(&z, q)?.exp()).max(0.0))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let (estimate, half) = mean_ci(&vals);
    Ok(TvEstimate {
        estimate,
        ci_half_width: half,
        samples,
        route: "exact_book",
    })
}

/// Probability floor below which a likelihood cell is treated as empty.
const CELL_FLOOR: f64 = 1e-25;

fn pmf_support(n: u64, p: f64, floor_ln: f64) -> (u64, Vec<f64>) {
    let mode = ((n + 1) as f64 * p).floor() as u64;
    let mut lo = mode.min(n);
    while lo > 0 && binomial_ln_pmf(n, p, lo - 1) > floor_ln {
        lo -= 1;
    }
    let mut hi = mode.min(n);
    while hi < n && binomial_ln_pmf(n, p, hi + 1) > floor_ln {
        hi += 1;
    }
    (lo, (lo..=hi).map(|k| binomial_ln_pmf(n, p, k).exp()).collect())
}

/// Covertness of a typical random book of `2^log2_size` i.i.d. Bernoulli(ρ) words.
///
/// Given `z`, a random word contributes `θ^(a-b)` to `Q1/Q0`, where
/// `a ~ Bin(wt z, ρ)` and `b ~ Bin(n - wt z, ρ)` count its ones on and off the
/// support of `z`. The book's words fall into cells of equal `a - b` with
/// multinomial counts, so each sample draws those counts instead of the
/// words. Averaged over samples this is the ensemble mean of `V(Q0, Q1)`.
pub fn mc_tv_ensemble(
    n: usize,
    rho: f64,
    log2_size: f64,
    q: f64,
    samples: u64,
    seed: u64,
    mode: Execution,
) -> Result<TvEstimate> {
    if !(rho > 0.0 && rho < 1.0) || !(q > 0.0 && q < 0.5) || log2_size < 0.0 {
        return Err(Error::Domain(format!(
            "ensemble TV needs rho in (0,1), q in (0,1/2), size >= 1; got {rho}, {q}, 2^{log2_size}"
        )));
    }
    let ln_theta = ((1.0 - q) / q).ln();
    let size = 2f64.powf(log2_size);
    let floor_ln = (CELL_FLOOR / size).ln() - 5.0;
    let vals = map_indexed(samples, mode, |idx| {
        let mut rng = trial_rng(seed, idx);
        let wz = sample_binomial(n as u64, q, &mut rng);
        let (a0, pa) = pmf_support(wz, rho, floor_ln);
        let (b0, pb) = pmf_support(n as u64 - wz, rho, floor_ln);
        // cell d = a - b, offset so the smallest difference sits at index 0
        let d_min = a0 as i64 - (b0 + pb.len() as u64 - 1) as i64;
        let mut cells = vec![0f64; pa.len() + pb.len() - 1];
        for (i, &x) in pa.iter().enumerate() {
            for (j, &y) in pb.iter().enumerate() {
                let d = (a0 + i as u64) as i64 - (b0 + j as u64) as i64;
                cells[(d - d_min) as usize] += x * y;
            }
        }
        let ratio = multinomial_ratio(&cells, d_min, ln_theta, size, &mut rng);
        (1.0 - ratio).max(0.0)
    });
    let (estimate, half) = mean_ci(&vals);
    Ok(TvEstimate {
        estimate,
        ci_half_width: half,
        samples,
        route: "ensemble",
    })
}

/// `Σ_d count_d θ^d / size` with `count ~ Multinomial(size, cells)`.
fn multinomial_ratio<R: Rng + ?Sized>(cells: &[f64], d_min: i64, ln_theta: f64, size: f64, rng: &mut R) -> f64 {
    let exact = size <= (1u64 << 62) as f64;
    let mut left = size;
    let mut mass_left: f64 = cells.iter().sum::<f64>().min(1.0);
    let mut acc = 0.0;
    // descending order so large-likelihood cells are drawn while mass_left is accurate
    for (k, &pk) in cells.iter().enumerate().rev() {
        if pk <= 0.0 || pk * size < CELL_FLOOR {
            mass_left -= pk;
            continue;
        }
        let count = if exact {
            if left < 1.0 {
                break;
            }
            let cond = (pk / mass_left.max(pk)).min(1.0);
            let c = sample_binomial(left as u64, cond, rng) as f64;
            left -= c;
            c
        } else {
            let mean = pk * size;
            if mean < 1e6 {
                Poisson::new(mean).map(|d| d.sample(rng)).unwrap_or(0.0)
            } else {
                let sd = (mean * (1.0 - pk)).sqrt();
                Normal::new(mean, sd).map(|d| d.sample(rng)).unwrap_or(mean).max(0.0)
            }
        };
        mass_left -= pk;
        if count > 0.0 {
            let d = d_min + k as i64;
            acc += (count / size) * (d as f64 * ln_theta).exp();
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BudgetStudy {
    pub n: u64,
    pub trials: u64,
    pub truncations: u64,
    pub rate: RateCi,
    /// `Q(p·n^(2/3)/σ)` with `σ^2 = n·p(1-ν)(1 - p(1-ν))`.
    pub predicted: f64,
}

/// How often the myopic jammer overshoots `⌊pn⌋` while Alice is silent.
pub fn myopic_budget_study(
    spec: &ChannelSpec,
    n: u64,
    nu: Option<f64>,
    trials: u64,
    seed: u64,
    mode: Execution,
) -> Result<BudgetStudy> {
    let jam = MyopicJammer { nu };
    let nu = jam.slack(n as usize);
    let budget = JamBudget::new(n as usize, spec.p);
    let zero = BitVector::zeros(n as usize);
    let over = map_indexed(trials, mode, |idx| {
        let mut rng = trial_rng(seed, idx);
        let z = bsc_apply(&zero, spec.q, &mut rng)?;
        let s = crate::adversary::myopic_jammer(&z, spec, nu, &mut rng)?;
        Ok(s.weight() > budget.max_flips)
    })
    .into_iter()
    .collect::<Result<Vec<bool>>>()?;
    let truncations = over.iter().filter(|&&b| b).count() as u64;
    let pe = spec.p * (1.0 - nu);
    let sigma = (n as f64 * pe * (1.0 - pe)).sqrt();
    Ok(BudgetStudy {
        n,
        trials,
        truncations,
        rate: wilson(truncations, trials),
        predicted: gaussian_tail(spec.p * (n as f64).powf(2.0 / 3.0) / sigma),
    })
}

/// One capacity/region evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub q: f64,
    pub eps_d: f64,
    pub regime: &'static str,
    pub sigma: f64,
    pub t: f64,
    pub i_b: Option<f64>,
    pub i_j: f64,
    pub r_star: f64,
    pub in_region: bool,
}

pub const CSV_HEADER: &str = "p,q,eps_d,regime,sigma,t,i_b,i_j,r_star,in_region";

/// `k·step` for `k = 1, 2, ...` strictly inside (0, 1/2).
pub fn grid(step: f64) -> Vec<f64> {
    (1..)
        // rounded so grid points print as written, e.g. 0.3 rather than 0.30000000000000004
        .map(|k| (k as f64 * step * 1e12).round() / 1e12)
        .take_while(|&v| v < 0.5 - 1e-12)
        .collect()
}

fn evaluate(p: f64, q: f64, params: &CovertParams) -> Result<SweepRow> {
    let spec = ChannelSpec::new(p, q)?;
    let rep = covert_capacity(&spec, params);
    Ok(SweepRow {
        p,
        q,
        eps_d: params.eps_d,
        regime: params.regime.name(),
        sigma: params.regime.sigma(),
        t: rep.t,
        i_b: rep.i_b,
        i_j: rep.i_j,
        r_star: rep.r_star,
        in_region: rep.in_region,
    })
}

/// Every `(p, q)` pair under every regime; rows ordered by regime, then q, then p.
pub fn sweep_region(ps: &[f64], qs: &[f64], n: u64, eps_d: f64, regimes: &[KeyRegime]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(ps.len() * qs.len() * regimes.len());
    for &regime in regimes {
        let params = CovertParams::new(n, eps_d, regime, 0.0)?;
        for &q in qs {
            for &p in ps {
                rows.push(evaluate(p, q, &params)?);
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Vary `p` at the given `q`.
    P { q: f64 },
    /// Vary `q` at the given `p`.
    Q { p: f64 },
}

/// `r*` along one axis for each `eps_d` and regime.
pub fn sweep_capacity(
    axis: SweepAxis,
    values: &[f64],
    n: u64,
    eps_values: &[f64],
    regimes: &[KeyRegime],
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &eps in eps_values {
        for &regime in regimes {
            let params = CovertParams::new(n, eps, regime, 0.0)?;
            for &v in values {
                let (p, q) = match axis {
                    SweepAxis::P { q } => (v, q),
                    SweepAxis::Q { p } => (p, v),
                };
                rows.push(evaluate(p, q, &params)?);
            }
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let i_b = r.i_b.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.p, r.q, r.eps_d, r.regime, r.sigma, r.t, i_b, r.i_j, r.r_star, r.in_region
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_book_has_zero_distance() {
        let book = Codebook::from_words(vec![BitVector::zeros(10)]).unwrap();
        assert!(exact_tv(&book, 0.25, Execution::Sequential).unwrap().abs() < 1e-15);
        let est = mc_tv(&book, 0.25, 200, 1, Execution::Sequential).unwrap();
        assert!(est.estimate.abs() < 1e-12);
    }

    #[test]
    fn full_word_nearly_disjoint() {
        let book = Codebook::from_words(vec![BitVector::ones(12)]).unwrap();
        let v = exact_tv(&book, 0.001, Execution::Sequential).unwrap();
        assert!(v > 0.999, "{v}");
    }

    #[test]
    fn refuses_large_enumeration() {
        let book = Codebook::lazy(20, 2, 0, 0.1, 1).unwrap();
        assert!(matches!(exact_tv(&book, 0.2, Execution::Sequential), Err(Error::TooLarge { .. })));
        let many = Codebook::lazy(10, 9, 0, 0.1, 1).unwrap();
        assert!(exact_tv(&many, 0.2, Execution::Sequential).is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = sweep_region(&[0.1, 0.3], &[0.25], 10_000, 0.02, &[KeyRegime::Large]).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].ends_with(",true"));
        assert!(lines[2].contains(",large,0,") && lines[2].ends_with(",0,false"));
        assert_eq!(grid(0.125), vec![0.125, 0.25, 0.375]);
    }
}
