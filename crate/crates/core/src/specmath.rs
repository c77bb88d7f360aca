//! Closed-form capacity and parameter formulas for covert communication over
//! a BSC(q)-eavesdropped, p-bounded adversarially jammed binary channel.
//!
//! All logarithms are base 2. The Gaussian tail is the standard one,
//! `Q(x) = P(Z > x)` for `Z ~ N(0, 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Jamming budget fraction `p` and eavesdrop crossover `q`, both in (0, 1/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub p: f64,
    pub q: f64,
}

impl ChannelSpec {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && p < 0.5) {
            return domain(format!("p = {p} must lie in (0, 1/2)"));
        }
        if !(q > 0.0 && q < 0.5) {
            return domain(format!("q = {q} must lie in (0, 1/2)"));
        }
        Ok(Self { p, q })
    }

    /// Flip probability `1 -> 0` of the channel induced by the myopic jammer.
    pub fn induced_one_to_zero(&self) -> f64 {
        self.p * (1.0 - self.q) / self.q
    }
}

/// How the shared key grows with the blocklength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum KeyGrowth {
    /// Θ(log n) bits.
    Logarithmic,
    /// σ·√n bits.
    SqrtN { sigma: f64 },
    /// ω(√n) bits.
    SuperSqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KeyRegime {
    Small,
    Moderate { sigma: f64 },
    Large,
    /// A concrete key length in bits plus the asymptotic class it stands for.
    Exact { bits: u32, growth: KeyGrowth },
}

impl KeyRegime {
    pub fn name(&self) -> &'static str {
        match self {
            KeyRegime::Small => "small",
            KeyRegime::Moderate { .. } => "moderate",
            KeyRegime::Large => "large",
            KeyRegime::Exact { .. } => "exact",
        }
    }

    /// σ for the moderate regime (or an exact key of class √n), else 0.
    pub fn sigma(&self) -> f64 {
        match *self {
            KeyRegime::Moderate { sigma } => sigma,
            KeyRegime::Exact {
                growth: KeyGrowth::SqrtN { sigma },
                ..
            } => sigma,
            _ => 0.0,
        }
    }
}

/// Blocklength, covertness slack, key regime and relative throughput.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovertParams {
    pub n: u64,
    pub eps_d: f64,
    pub regime: KeyRegime,
    /// Relative throughput in bits per √n.
    pub r: f64,
}

impl CovertParams {
    pub fn new(n: u64, eps_d: f64, regime: KeyRegime, r: f64) -> Result<Self> {
        if n < 4 {
            return domain(format!("blocklength n = {n} must be at least 4"));
        }
        // eps_d = 0 is admitted so that the perfectly covert corner (t = 0) can be evaluated.
        if !(0.0..1.0).contains(&eps_d) {
            return domain(format!("eps_d = {eps_d} must lie in [0, 1)"));
        }
        if !(r >= 0.0 && r.is_finite()) {
            return domain(format!("relative throughput r = {r} must be a finite value >= 0"));
        }
        match regime {
            KeyRegime::Moderate { sigma } | KeyRegime::Exact { growth: KeyGrowth::SqrtN { sigma }, .. }
                if !(sigma > 0.0 && sigma.is_finite()) =>
            {
                return domain(format!("sigma = {sigma} must be positive"));
            }
            _ => {}
        }
        Ok(Self { n, eps_d, regime, r })
    }

    pub fn sqrt_n(&self) -> f64 {
        (self.n as f64).sqrt()
    }

    /// Number of message bits `⌈r√n⌉`.
    pub fn message_bits(&self) -> u32 {
        (self.r * self.sqrt_n() - 1e-9).ceil().max(0.0) as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub t: f64,
    /// `None` when `p > q`, where the weight-normalized Bob information is undefined.
    pub i_b: Option<f64>,
    pub i_j: f64,
    pub r_star: f64,
    pub in_region: bool,
}

/// Standard Gaussian tail `P(Z > x)`.
pub fn gaussian_tail(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

/// Inverse of [`gaussian_tail`] by monotone bisection.
pub fn gaussian_tail_inv(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("Q^-1 needs alpha in (0, 1), got {alpha}"));
    }
    let (mut lo, mut hi) = (-60.0_f64, 60.0_f64);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if gaussian_tail(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * mid.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Code-weight parameter `t(q, eps_d)`: typical codewords weigh about `t√n`.
pub fn code_weight_param(q: f64, eps_d: f64) -> Result<f64> {
    if !(q > 0.0 && q < 0.5) {
        return domain(format!("t(q, eps_d) needs q in (0, 1/2), got {q}"));
    }
    if !(0.0..1.0).contains(&eps_d) {
        return domain(format!("t(q, eps_d) needs eps_d in [0, 1), got {eps_d}"));
    }
    let scale = 2.0 * (q * (1.0 - q)).sqrt() / (1.0 - 2.0 * q);
    Ok((scale * gaussian_tail_inv((1.0 - eps_d) / 2.0)?).max(0.0))
}

/// Weight-normalized mutual information of the BSC(q) to the eavesdropper.
pub fn mi_james(q: f64) -> f64 {
    (1.0 - 2.0 * q) * ((1.0 - q) / q).log2()
}

/// Weight-normalized mutual information to Bob under the myopic jammer's
/// induced asymmetric channel. Defined for `0 < p <= q < 1/2`.
pub fn mi_bob(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && q < 0.5 && p <= q) {
        return domain(format!("I_B(p, q) needs 0 < p <= q < 1/2, got p = {p}, q = {q}"));
    }
    let u = q - p + p * q;
    let first = p * (q - 1.0) / q * ((u * (1.0 - p)) / (p * p * (1.0 - q))).log2();
    let second = (u / (p * q)).log2();
    Ok((first + second).max(0.0))
}

pub(crate) fn h2(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("entropy argument {x} outside [0, 1]"));
    }
    Ok(h2(x))
}

/// `D(Bern(a) || Bern(b))` in bits.
pub fn kl_bernoulli(a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) || !(b > 0.0 && b < 1.0) {
        return domain(format!("KL needs a in [0, 1] and b in (0, 1), got a = {a}, b = {b}"));
    }
    let term = |x: f64, y: f64| if x == 0.0 { 0.0 } else { x * (x / y).log2() };
    Ok((term(a, b) + term(1.0 - a, 1.0 - b)).max(0.0))
}

/// `I(X; Y)` for a binary channel with `W(1|0) = zero_to_one`, `W(0|1) = one_to_zero`
/// and input `X ~ Bern(rho)`.
pub fn bac_mutual_information(rho: f64, zero_to_one: f64, one_to_zero: f64) -> f64 {
    let y1 = (1.0 - rho) * zero_to_one + rho * (1.0 - one_to_zero);
    h2(y1) - (1.0 - rho) * h2(zero_to_one) - rho * h2(one_to_zero)
}

/// Capacity of the asymmetric channel `W(1|0) = p`, `W(0|1) = (1-q)p/q` and the
/// maximizing input one-probability `rho*`.
pub fn bac_capacity(p: f64, q: f64) -> Result<(f64, f64)> {
    if !(p > 0.0 && p < q && q < 0.5) {
        return domain(format!("C_BAC needs 0 < p < q < 1/2, got p = {p}, q = {q}"));
    }
    let b = (1.0 - q) * p / q;
    let f = |rho: f64| bac_mutual_information(rho, p, b);
    // golden-section search on the concave map rho -> I(X;Y)
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let rho = 0.5 * (lo + hi);
    Ok((f(rho), rho))
}

/// Achievable-region predicate for the three key regimes.
pub fn region_member(spec: &ChannelSpec, params: &CovertParams) -> bool {
    if spec.p >= spec.q {
        return false;
    }
    let Ok(t) = code_weight_param(spec.q, params.eps_d) else {
        return false;
    };
    if t <= 0.0 {
        return false;
    }
    let i_b = match mi_bob(spec.p, spec.q) {
        Ok(v) => v,
        Err(_) => return false,
    };
    let i_j = mi_james(spec.q);
    let small = || i_b > i_j;
    let moderate = |sigma: f64| i_b + sigma / t > i_j;
    match params.regime {
        KeyRegime::Small => small(),
        KeyRegime::Moderate { sigma } => moderate(sigma),
        KeyRegime::Large => true,
        KeyRegime::Exact { bits, growth } => {
            if (bits as f64) < 0.5 * (params.n as f64).log2() {
                return false;
            }
            match growth {
                KeyGrowth::Logarithmic => small(),
                KeyGrowth::SqrtN { sigma } => moderate(sigma),
                KeyGrowth::SuperSqrt => true,
            }
        }
    }
}

/// Covert capacity `t·I_B` on the achievable region, zero elsewhere.
pub fn covert_capacity(spec: &ChannelSpec, params: &CovertParams) -> CapacityReport {
    let t = code_weight_param(spec.q, params.eps_d).unwrap_or(0.0);
    let i_j = mi_james(spec.q);
    let i_b = mi_bob(spec.p, spec.q).ok();
    let in_region = region_member(spec, params);
    let r_star = match (in_region, i_b) {
        (true, Some(ib)) => t * ib,
        _ => 0.0,
    };
    CapacityReport {
        t,
        i_b,
        i_j,
        r_star,
        in_region,
    }
}

/// Jamming fraction `p*` at which `I_B(p*, q) = I_J(q)`; the small-key region is `p < p*`.
/// Returns `None` when no crossing exists in (0, q).
pub fn small_key_boundary(q: f64) -> Option<f64> {
    let i_j = mi_james(q);
    let g = |p: f64| mi_bob(p, q).map(|v| v - i_j).unwrap_or(f64::NAN);
    let (mut lo, mut hi) = (1e-9, q);
    if g(lo).is_nan() || g(lo) <= 0.0 || g(hi) >= 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

impl std::str::FromStr for KeyRegime {
    type Err = Error;

    /// Parses `small`, `large`, `moderate:<sigma>`, or `exact:<bits>[:log|:sqrt:<sigma>|:super]`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number `{v}` in key regime `{s}`")))
        };
        match parts.as_slice() {
            ["small"] => Ok(KeyRegime::Small),
            ["large"] => Ok(KeyRegime::Large),
            ["moderate", sigma] => Ok(KeyRegime::Moderate { sigma: num(sigma)? }),
            ["exact", bits, rest @ ..] => {
                let bits = bits
                    .parse::<u32>()
                    .map_err(|_| Error::Config(format!("bad key length in `{s}`")))?;
                let growth = match rest {
                    [] | ["log"] => KeyGrowth::Logarithmic,
                    ["sqrt", sigma] => KeyGrowth::SqrtN { sigma: num(sigma)? },
                    ["super"] => KeyGrowth::SuperSqrt,
                    _ => return Err(Error::Config(format!("bad growth class in `{s}`"))),
                };
                Ok(KeyRegime::Exact { bits, growth })
            }
            _ => Err(Error::Config(format!("unknown key regime `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Composite Simpson quadrature of the standard normal density over [x, x + 12].
    fn tail_by_quadrature(x: f64) -> f64 {
        let phi = |u: f64| (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let (a, b) = (x, x + 12.0);
        let steps = 20_000;
        let h = (b - a) / steps as f64;
        let mut s = phi(a) + phi(b);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * phi(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn tail_matches_quadrature() {
        assert_eq!(gaussian_tail(0.0), 0.5);
        for &x in &[-2.0, -0.3, 0.5, 0.67449, 1.0, 2.5, 4.0] {
            assert_abs_diff_eq!(gaussian_tail(x), tail_by_quadrature(x), epsilon = 1e-10);
        }
        assert_abs_diff_eq!(gaussian_tail(1.0), 0.158655, epsilon = 1e-6);
        assert_abs_diff_eq!(gaussian_tail(0.67449), 0.25, epsilon = 1e-5);
    }

    #[test]
    fn tail_inverse() {
        assert_abs_diff_eq!(gaussian_tail_inv(0.5).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(gaussian_tail_inv(0.25).unwrap(), 0.67449, epsilon = 1e-5);
        assert_abs_diff_eq!(gaussian_tail_inv(0.49).unwrap(), 0.025069, epsilon = 1e-6);
        assert!(gaussian_tail_inv(0.0).is_err());
        assert!(gaussian_tail_inv(1.0).is_err());
        let mut a = 0.01;
        while a < 0.99 {
            let x = gaussian_tail_inv(a).unwrap();
            assert_abs_diff_eq!(gaussian_tail(x), a, epsilon = 1e-12);
            a += 0.0137;
        }
    }

    #[test]
    fn code_weight_examples() {
        assert_eq!(code_weight_param(0.25, 0.0).unwrap(), 0.0);
        // 2·√(3/16)/0.5 · Q^-1(0.25) with Q^-1(0.25) = 0.6744897502
        assert_abs_diff_eq!(code_weight_param(0.25, 0.5).unwrap(), 1.1682505, epsilon = 1e-6);
        assert_abs_diff_eq!(code_weight_param(0.25, 0.02).unwrap(), 0.043421, epsilon = 1e-6);
        assert!(code_weight_param(0.5, 0.1).is_err());
        // increasing in both arguments
        assert!(code_weight_param(0.3, 0.2).unwrap() > code_weight_param(0.2, 0.2).unwrap());
        assert!(code_weight_param(0.2, 0.3).unwrap() > code_weight_param(0.2, 0.2).unwrap());
    }

    #[test]
    fn mutual_information_examples() {
        assert_abs_diff_eq!(mi_james(0.25), 0.79248, epsilon = 1e-5);
        assert_abs_diff_eq!(mi_james(0.1), 2.53594, epsilon = 1e-5);
        assert!(mi_james(0.4999999) < 1e-5);
        assert_abs_diff_eq!(mi_bob(0.1, 0.25).unwrap(), 1.48966, epsilon = 1e-5);
        assert_abs_diff_eq!(mi_bob(0.05, 0.4).unwrap(), 3.6190, epsilon = 1e-4);
        assert_abs_diff_eq!(mi_bob(0.2, 0.2).unwrap(), 0.0, epsilon = 1e-12);
        assert!(mi_bob(0.3, 0.25).is_err());
    }

    #[test]
    fn entropy_and_kl() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(binary_entropy(0.11).unwrap(), 0.4999160, epsilon = 1e-6);
        assert_eq!(kl_bernoulli(0.3, 0.3).unwrap(), 0.0);
        assert!(binary_entropy(1.2).is_err());
        assert!(kl_bernoulli(0.2, 0.0).is_err());
    }

    #[test]
    fn capacity_examples() {
        let large = CovertParams::new(10_000, 0.02, KeyRegime::Large, 0.0).unwrap();
        let spec = ChannelSpec::new(0.1, 0.25).unwrap();
        let rep = covert_capacity(&spec, &large);
        assert_abs_diff_eq!(rep.r_star, 0.043421 * 1.48966, epsilon = 2e-6);
        assert!(rep.in_region);

        let flipped = ChannelSpec::new(0.3, 0.25).unwrap();
        let rep = covert_capacity(&flipped, &large);
        assert_eq!(rep.r_star, 0.0);
        assert!(rep.i_b.is_none());

        let silent = CovertParams::new(10_000, 0.0, KeyRegime::Large, 0.0).unwrap();
        assert_eq!(covert_capacity(&spec, &silent).r_star, 0.0);
    }

    #[test]
    fn region_examples() {
        let mk = |regime| CovertParams::new(10_000, 0.02, regime, 0.0).unwrap();
        let s = |p, q| ChannelSpec::new(p, q).unwrap();
        for regime in [KeyRegime::Small, KeyRegime::Moderate { sigma: 0.03 }, KeyRegime::Large] {
            assert!(!region_member(&s(0.3, 0.25), &mk(regime)));
        }
        assert!(region_member(&s(0.1, 0.25), &mk(KeyRegime::Small)));
        assert!(!region_member(&s(0.2, 0.25), &mk(KeyRegime::Small)));
        assert!(region_member(&s(0.2, 0.25), &mk(KeyRegime::Large)));
        // finite keys below half a log are never enough
        let short = KeyRegime::Exact { bits: 6, growth: KeyGrowth::SuperSqrt };
        assert!(!region_member(&s(0.1, 0.25), &mk(short)));
        let long = KeyRegime::Exact { bits: 7, growth: KeyGrowth::Logarithmic };
        assert!(region_member(&s(0.1, 0.25), &mk(long)));
    }

    #[test]
    fn boundary_near_reference() {
        let p = small_key_boundary(0.25).unwrap();
        assert!((p - 0.1375).abs() < 0.002, "p* = {p}");
    }

    #[test]
    fn regime_parsing() {
        assert_eq!("small".parse::<KeyRegime>().unwrap(), KeyRegime::Small);
        assert_eq!(
            "moderate:0.03".parse::<KeyRegime>().unwrap(),
            KeyRegime::Moderate { sigma: 0.03 }
        );
        assert_eq!(
            "exact:8".parse::<KeyRegime>().unwrap(),
            KeyRegime::Exact { bits: 8, growth: KeyGrowth::Logarithmic }
        );
        assert!("tiny".parse::<KeyRegime>().is_err());
    }
}
