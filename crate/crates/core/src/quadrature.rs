//! Adaptive Gauss–Kronrod integration, half-line Fourier transforms and the
//! closed-form large-momentum tails.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and cutoffs shared by every quadrature in the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Wavefunction magnitude, relative to its peak, below which the
    /// `x -> -inf` tail is dropped.
    pub x_cut_threshold: f64,
    /// Multiple of the state's momentum scale `max(sqrt|E|, F^{1/3}, |beta|)`
    /// beyond which the momentum wavefunction is taken from its large-`k`
    /// expansion instead of direct quadrature.
    pub k_tail_factor: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
            x_cut_threshold: 1e-17,
            k_tail_factor: 20.0,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::Invalid("abs_tol and rel_tol must be positive".into()));
        }
        if self.max_subdivisions < 32 {
            return Err(Error::Invalid("max_subdivisions must be at least 32".into()));
        }
        if !(self.x_cut_threshold > 0.0 && self.x_cut_threshold <= 1e-14) {
            return Err(Error::Invalid("x_cut_threshold must lie in (0, 1e-14]".into()));
        }
        if !(self.k_tail_factor >= 4.0) {
            return Err(Error::Invalid("k_tail_factor must be at least 4".into()));
        }
        Ok(())
    }

    /// Same configuration with both tolerances scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        ToleranceConfig { abs_tol: self.abs_tol * factor, rel_tol: self.rel_tol * factor, ..*self }
    }
}

/// Integral together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
    pub subdivisions: usize,
}

// 21-point Kronrod rule with its embedded 10-point Gauss rule.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_940_470,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
}

fn gk21<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Panel<N>
where
    F: FnMut(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];
    let mut resabs = [0.0; N];
    let mut fvals = [[0.0; N]; 21];
    fvals[10] = fc;
    for i in 0..N {
        kron[i] = WGK[10] * fc[i];
        resabs[i] = (WGK[10] * fc[i]).abs();
    }
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fvals[j] = f1;
        fvals[20 - j] = f2;
        for i in 0..N {
            kron[i] += WGK[j] * (f1[i] + f2[i]);
            resabs[i] += WGK[j] * (f1[i].abs() + f2[i].abs());
            if j % 2 == 1 {
                gauss[i] += WG[j / 2] * (f1[i] + f2[i]);
            }
        }
    }
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for i in 0..N {
        let mean = 0.5 * kron[i];
        let mut resasc = WGK[10] * (fc[i] - mean).abs();
        for j in 0..10 {
            resasc += WGK[j] * ((fvals[j][i] - mean).abs() + (fvals[20 - j][i] - mean).abs());
        }
        let resasc = resasc * half.abs();
        let resabs = resabs[i] * half.abs();
        let mut err = ((kron[i] - gauss[i]) * half).abs();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (1.0f64).min((200.0 * err / resasc).powf(1.5));
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * resabs);
        }
        value[i] = kron[i] * half;
        error[i] = err;
    }
    Panel { a, b, value, error }
}

/// Globally adaptive integration of a vector-valued integrand over `[a, b]`,
/// starting from the panels delimited by `breaks` (sorted, strictly inside).
///
/// Every component must meet `error <= max(abs_tol, rel_tol * |value|)`.
pub fn integrate_vec<const N: usize, F>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &ToleranceConfig,
) -> Result<Estimate<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    if !(a < b) {
        return Err(Error::Invalid(format!("integration bounds must satisfy a < b, got [{a}, {b}]")));
    }
    let mut edges = vec![a];
    edges.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    edges.push(b);
    edges.dedup();
    let mut panels: Vec<Panel<N>> =
        edges.windows(2).map(|w| gk21(&mut f, w[0], w[1])).collect();

    loop {
        let mut total = [0.0; N];
        let mut err = [0.0; N];
        for p in &panels {
            for i in 0..N {
                total[i] += p.value[i];
                err[i] += p.error[i];
            }
        }
        let tol: Vec<f64> =
            (0..N).map(|i| cfg.abs_tol.max(cfg.rel_tol * total[i].abs())).collect();
        if (0..N).all(|i| err[i] <= tol[i]) {
            return Ok(Estimate { value: total, error: err, subdivisions: panels.len() });
        }
        // Bisect the panel with the worst error relative to the tolerances.
        let (worst, _) = panels
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let score = (0..N).map(|i| p.error[i] / tol[i]).fold(0.0, f64::max);
                (k, score)
            })
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let p = &panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if panels.len() >= cfg.max_subdivisions || !(mid > p.a && mid < p.b) {
            let worst_component = (0..N)
                .max_by(|&i, &j| (err[i] / tol[i]).total_cmp(&(err[j] / tol[j])))
                .unwrap_or(0);
            return Err(Error::NotConverged {
                estimate: total[worst_component],
                error: err[worst_component],
                subdivisions: panels.len(),
            });
        }
        let (pa, pb) = (p.a, p.b);
        let left = gk21(&mut f, pa, mid);
        let right = gk21(&mut f, mid, pb);
        panels[worst] = left;
        panels.push(right);
    }
}

/// Adaptive integral of a scalar function over `[a, b]`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, cfg: &ToleranceConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate_vec(|x| [f(x)], a, b, &[], cfg).map(|e| e.value[0])
}

/// Integral over `[a, +inf)` through the map `x = a + (1 - t) / t`.
pub fn integrate_to_infinity<const N: usize, F>(
    mut f: F,
    a: f64,
    cfg: &ToleranceConfig,
) -> Result<Estimate<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    integrate_vec(
        |t| {
            let x = a + (1.0 - t) / t;
            let mut v = f(x);
            let jac = 1.0 / (t * t);
            v.iter_mut().for_each(|c| *c *= jac);
            v
        },
        0.0,
        1.0,
        &[],
        cfg,
    )
}

/// Integral over `(-inf, b]`.
pub fn integrate_from_minus_infinity<F>(mut f: F, b: f64, cfg: &ToleranceConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate_to_infinity(|y| [f(2.0 * b - y)], b, cfg).map(|e| e.value[0])
}

/// `(2 pi)^{-1/2} int_{x_cut}^0 exp(-i k x) psi(x) dx`.
///
/// `psi` is assumed negligible below `x_cut`. Initial panels are half an
/// oscillation period of `exp(-i k x)` wide; adaptivity handles the rest.
pub fn fourier_half_line<F>(mut psi: F, k: f64, x_cut: f64, cfg: &ToleranceConfig) -> Result<Complex64>
where
    F: FnMut(f64) -> f64,
{
    if !(x_cut < 0.0) {
        return Err(Error::Invalid(format!("x_cut must be negative, got {x_cut}")));
    }
    let span = -x_cut;
    let width = if k == 0.0 { span } else { (PI / k.abs()).min(span) };
    let count = ((span / width).ceil() as usize).clamp(1, cfg.max_subdivisions / 2);
    let breaks: Vec<f64> = (1..count).map(|i| x_cut + span * i as f64 / count as f64).collect();
    let est = integrate_vec(
        |x| {
            let p = psi(x);
            let (s, c) = (k * x).sin_cos();
            [p * c, -p * s]
        },
        x_cut,
        0.0,
        &breaks,
        cfg,
    )?;
    let norm = 1.0 / (2.0 * PI).sqrt();
    Ok(Complex64::new(est.value[0] * norm, est.value[1] * norm))
}

/// Smallest momentum at which the leading-order tail `psi0^2 / (2 pi k^2)` is
/// accepted; the next correction is relative order `(psi'(0)/psi(0))^2 / k^2`
/// and the boundary log-derivative is of order one in wall units.
pub const MIN_TAIL_MOMENTUM: f64 = 10.0;

/// `int_{|k| > K} k^p gamma_asym(k) dk` for `gamma_asym = psi0^2 / (2 pi k^2)`.
///
/// Only `p <= 0` converges; odd `p` vanishes by symmetry.
pub fn momentum_tail_moment(psi0: f64, p: i32, k_switch: f64) -> Result<f64> {
    if !(k_switch >= MIN_TAIL_MOMENTUM) {
        return Err(Error::Refused(format!(
            "tail switch {k_switch} is below {MIN_TAIL_MOMENTUM}; the k^-2 asymptote is not yet valid"
        )));
    }
    if p >= 1 {
        return Err(Error::Domain(format!("moment k^{p} of a k^-2 tail diverges")));
    }
    if p % 2 != 0 {
        return Ok(0.0);
    }
    let amp = psi0 * psi0 / (2.0 * PI);
    let q = f64::from(p);
    Ok(2.0 * amp * k_switch.powf(q - 1.0) / (1.0 - q))
}

/// `-int_{|k| > K} gamma_asym ln gamma_asym dk` for the same asymptote.
pub fn momentum_entropy_tail(psi0: f64, k_switch: f64) -> Result<f64> {
    if !(k_switch >= MIN_TAIL_MOMENTUM) {
        return Err(Error::Refused(format!("tail switch {k_switch} is below {MIN_TAIL_MOMENTUM}")));
    }
    Ok(entropy_tail_closed_form(psi0 * psi0 / (2.0 * PI), k_switch))
}

/// `-int_{|k| > K} (A/k^2) ln(A/k^2) dk` without the validity check.
pub(crate) fn entropy_tail_closed_form(amp: f64, k_switch: f64) -> f64 {
    if amp == 0.0 {
        return 0.0;
    }
    2.0 * amp / k_switch * (2.0 * k_switch.ln() + 2.0 - amp.ln())
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The 20-point rule used for the fixed panels of the momentum transform.
pub(crate) fn gauss_legendre_20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}
