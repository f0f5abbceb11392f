//! Airy functions Ai and Ai' on the real line.
//!
//! Near the origin the Maclaurin series is summed directly. On `[-10, 10]`
//! values are obtained by a short Taylor step of the Airy equation
//! `y'' = x y` from a table of anchor points; the anchors are produced once by
//! stepping outward from the origin on the oscillatory side and inward from
//! the asymptotic expansion at `x = 10` on the decaying side, which is the
//! stable direction for the recessive solution. Outside `[-10, 10]` the
//! standard Poincaré expansions are summed to their smallest term.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Ai(0).
pub const AI_ZERO: f64 = 0.355_028_053_887_817_239_3;
/// Ai'(0).
pub const AI_PRIME_ZERO: f64 = -0.258_819_403_792_806_798_4;

/// Above this argument Ai is reported as an exact zero.
pub const X_MAX: f64 = 100.0;

const SERIES_RADIUS: f64 = 1.0;
const ASYMPTOTIC_CUTOFF: f64 = 10.0;
const ANCHOR_STEP: f64 = 0.25;

/// Value of Ai and Ai' at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValue {
    pub ai: f64,
    pub ai_prime: f64,
    /// Set when the argument exceeds [`X_MAX`] and both values were flushed to zero.
    pub underflow: bool,
}

/// Airy values with the exponential decay factored out.
///
/// The true values are `ai * exp(-exponent)` and `ai_prime * exp(-exponent)`,
/// where `exponent = 2/3 x^{3/2}` for `x > 0` and zero otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledAiry {
    pub ai: f64,
    pub ai_prime: f64,
    pub exponent: f64,
}

impl ScaledAiry {
    pub fn unscaled(&self) -> (f64, f64) {
        let f = (-self.exponent).exp();
        (self.ai * f, self.ai_prime * f)
    }
}

/// `2/3 x^{3/2}` for positive `x`, zero otherwise.
#[inline]
pub fn decay_exponent(x: f64) -> f64 {
    if x > 0.0 {
        2.0 / 3.0 * x * x.sqrt()
    } else {
        0.0
    }
}

/// Ai(x) and Ai'(x).
pub fn airy(x: f64) -> AiryValue {
    assert!(x.is_finite(), "airy: non-finite argument {x}");
    if x > X_MAX {
        return AiryValue { ai: 0.0, ai_prime: 0.0, underflow: true };
    }
    let s = airy_scaled(x);
    let (ai, ai_prime) = s.unscaled();
    AiryValue { ai, ai_prime, underflow: false }
}

/// Ai and Ai' with `exp(-2/3 x^{3/2})` removed for positive arguments.
///
/// Valid for every finite argument; this is what the wavefunction code uses
/// so that ratios of Airy values stay representable deep in the forbidden
/// region.
pub fn airy_scaled(x: f64) -> ScaledAiry {
    assert!(x.is_finite(), "airy_scaled: non-finite argument {x}");
    let exponent = decay_exponent(x);
    if x >= ASYMPTOTIC_CUTOFF {
        let (ai, ai_prime) = asymptotic_positive_scaled(x);
        return ScaledAiry { ai, ai_prime, exponent };
    }
    let (ai, ai_prime) = if x <= -ASYMPTOTIC_CUTOFF {
        asymptotic_negative(-x)
    } else if x.abs() <= SERIES_RADIUS {
        maclaurin(x)
    } else {
        from_anchors(x)
    };
    let scale = exponent.exp();
    ScaledAiry { ai: ai * scale, ai_prime: ai_prime * scale, exponent }
}

/// Bi(x) and Bi'(x) by the Maclaurin series; only meant for `|x| <= 5`,
/// where it is used to check the Wronskian of the Ai evaluator.
pub fn airy_bi_series(x: f64) -> (f64, f64) {
    assert!(x.abs() <= 5.0, "airy_bi_series: |x| = {} too large", x.abs());
    let (f, fp, g, gp) = maclaurin_parts(x);
    let s3 = 3f64.sqrt();
    (s3 * (AI_ZERO * f - AI_PRIME_ZERO * g), s3 * (AI_ZERO * fp - AI_PRIME_ZERO * gp))
}

fn maclaurin(x: f64) -> (f64, f64) {
    let (f, fp, g, gp) = maclaurin_parts(x);
    (AI_ZERO * f + AI_PRIME_ZERO * g, AI_ZERO * fp + AI_PRIME_ZERO * gp)
}

/// The two canonical solutions `f = 1 + x^3/6 + ...`, `g = x + x^4/12 + ...`
/// and their derivatives.
fn maclaurin_parts(x: f64) -> (f64, f64, f64, f64) {
    let x3 = x * x * x;
    let mut f = 1.0;
    let mut g = x;
    let mut fp = 0.0;
    let mut gp = 1.0;
    let mut tf = 1.0;
    let mut tg = x;
    let mut tfp = x * x / 2.0;
    let mut tgp = 1.0;
    fp += tfp;
    for k in 0..200 {
        let kf = k as f64;
        tf *= x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        tg *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        tgp *= x3 / ((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        f += tf;
        g += tg;
        gp += tgp;
        if k >= 1 {
            tfp *= x3 / (3.0 * kf * (3.0 * kf + 2.0));
            fp += tfp;
        }
        let small = 1e-18;
        if tf.abs() <= small * f.abs()
            && tg.abs() <= small * g.abs().max(1e-300)
            && tgp.abs() <= small * gp.abs()
            && tfp.abs() <= small * fp.abs().max(1e-300)
            && k >= 2
        {
            break;
        }
    }
    (f, fp, g, gp)
}

/// One Taylor step of `y'' = x y` from `x0` to `x0 + h`.
pub(crate) fn taylor_step(x0: f64, y: f64, yp: f64, h: f64) -> (f64, f64) {
    if h == 0.0 {
        return (y, yp);
    }
    // d_k = c_k h^k with c_{k+2} = (x0 c_k + c_{k-1}) / ((k+1)(k+2)).
    let h2 = h * h;
    let h3 = h2 * h;
    let mut dm1 = 0.0; // d_{k-1}
    let mut d0 = y; // d_k
    let mut d1 = yp * h; // d_{k+1}
    let mut sum = d0 + d1;
    let mut dsum = d1; // sum of k d_k
    let scale = y.abs() + (yp * h).abs();
    let mut quiet = 0;
    for k in 0..400usize {
        let kf = k as f64;
        let d2 = (x0 * h2 * d0 + h3 * dm1) / ((kf + 1.0) * (kf + 2.0));
        sum += d2;
        dsum += (kf + 2.0) * d2;
        if d2.abs() <= 1e-18 * scale {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        dm1 = d0;
        d0 = d1;
        d1 = d2;
    }
    (sum, dsum / h)
}

struct Anchors {
    ai: Vec<f64>,
    ai_prime: Vec<f64>,
}

fn anchors() -> &'static Anchors {
    static TABLE: OnceLock<Anchors> = OnceLock::new();
    TABLE.get_or_init(|| {
        let half = (ASYMPTOTIC_CUTOFF / ANCHOR_STEP).round() as usize;
        let len = 2 * half + 1;
        let mut ai = vec![0.0; len];
        let mut ai_prime = vec![0.0; len];
        // Oscillatory side: start at the origin and walk left.
        ai[half] = AI_ZERO;
        ai_prime[half] = AI_PRIME_ZERO;
        for i in (0..half).rev() {
            let x0 = (i as f64 + 1.0 - half as f64) * ANCHOR_STEP;
            let (y, yp) = taylor_step(x0, ai[i + 1], ai_prime[i + 1], -ANCHOR_STEP);
            ai[i] = y;
            ai_prime[i] = yp;
        }
        // Decaying side: start from the asymptotic expansion and walk left,
        // which is the direction in which Ai dominates Bi.
        let (s, sp) = asymptotic_positive_scaled(ASYMPTOTIC_CUTOFF);
        let damp = (-decay_exponent(ASYMPTOTIC_CUTOFF)).exp();
        ai[len - 1] = s * damp;
        ai_prime[len - 1] = sp * damp;
        for i in (half + 1..len - 1).rev() {
            let x0 = (i as f64 + 1.0 - half as f64) * ANCHOR_STEP;
            let (y, yp) = taylor_step(x0, ai[i + 1], ai_prime[i + 1], -ANCHOR_STEP);
            ai[i] = y;
            ai_prime[i] = yp;
        }
        Anchors { ai, ai_prime }
    })
}

fn from_anchors(x: f64) -> (f64, f64) {
    let table = anchors();
    let half = (ASYMPTOTIC_CUTOFF / ANCHOR_STEP).round() as isize;
    let i = ((x / ANCHOR_STEP).round() as isize + half).clamp(0, 2 * half) as usize;
    let x0 = (i as f64 - half as f64) * ANCHOR_STEP;
    taylor_step(x0, table.ai[i], table.ai_prime[i], x - x0)
}

/// Coefficients u_k and v_k of the Airy asymptotic expansions.
fn expansion_coefficients() -> &'static (Vec<f64>, Vec<f64>) {
    static COEFFS: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let n = 60;
        let mut u = vec![1.0; n];
        let mut v = vec![1.0; n];
        for k in 1..n {
            let kf = k as f64;
            u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / ((2.0 * kf - 1.0) * 216.0 * kf);
            v[k] = -u[k] * (6.0 * kf + 1.0) / (6.0 * kf - 1.0);
        }
        (u, v)
    })
}

/// Sums `sum_k sign(k) c_k / zeta^k` up to the smallest term.
fn optimally_truncated(coeffs: &[f64], zeta: f64, sign: impl Fn(usize) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut power = 1.0;
    let mut last = f64::INFINITY;
    for (k, c) in coeffs.iter().enumerate() {
        let term = c * power;
        if term.abs() > last {
            break;
        }
        sum += sign(k) * term;
        last = term.abs();
        if last < 1e-18 * sum.abs() {
            break;
        }
        power /= zeta;
    }
    sum
}

/// Scaled Ai, Ai' for large positive argument.
fn asymptotic_positive_scaled(x: f64) -> (f64, f64) {
    let (u, v) = expansion_coefficients();
    let zeta = decay_exponent(x);
    let alt = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let su = optimally_truncated(u, zeta, alt);
    let sv = optimally_truncated(v, zeta, alt);
    let q = x.sqrt().sqrt();
    let c = 0.5 / PI.sqrt();
    (c * su / q, -c * q * sv)
}

/// Ai(-z), Ai'(-z) for large positive `z`.
fn asymptotic_negative(z: f64) -> (f64, f64) {
    let (u, v) = expansion_coefficients();
    let zeta = decay_exponent(z);
    // Even and odd parts with alternating signs.
    let split = |c: &[f64]| {
        let even: Vec<f64> = c.iter().step_by(2).copied().collect();
        let odd: Vec<f64> = c.iter().skip(1).step_by(2).copied().collect();
        let z2 = zeta * zeta;
        let alt = |k: usize| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let e = optimally_truncated(&even, z2, alt);
        let o = optimally_truncated(&odd, z2, alt) / zeta;
        (e, o)
    };
    let (pu, qu) = split(u);
    let (pv, qv) = split(v);
    let phase = zeta - PI / 4.0;
    let (sn, cs) = phase.sin_cos();
    let q = z.sqrt().sqrt();
    let c = 1.0 / PI.sqrt();
    let ai = c / q * (cs * pu + sn * qu);
    let ai_prime = c * q * (sn * pv - cs * qv);
    (ai, ai_prime)
}
