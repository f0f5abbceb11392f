//! Position and momentum wavefunctions of a solved level.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{entropy_tail_closed_form, gauss_legendre_20, integrate_vec, ToleranceConfig};
use crate::spectrum::{BoundState, BoundarySpec, Regime};
use crate::special::{ai_prime_zero, ai_zero, airy, airy_scaled};

/// Location and value of a wavefunction extremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremumInfo {
    pub m: usize,
    pub x: f64,
    pub psi_value: f64,
}

/// Integrals over the position density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionIntegrals {
    /// `int rho`
    pub norm: f64,
    /// `-int rho ln rho`
    pub entropy: f64,
    /// `int rho^2`
    pub onicescu: f64,
    /// `int rho'^2 / rho = 4 int psi'^2`
    pub fisher: f64,
    /// `int x rho`
    pub mean_x: f64,
    /// Largest component error estimate.
    pub error: f64,
}

/// Integrals over the momentum density, including the large-`|k|` tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumIntegrals {
    pub norm: f64,
    pub entropy: f64,
    pub onicescu: f64,
    pub fisher: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    /// `sqrt(2) e^x`, the zero-field attractive-wall level.
    FieldFree,
    /// `amp * Ai_s(z) * exp(zeta0 - zeta(z))`, `z = z0 - s x`, where `Ai_s`
    /// carries the factor `exp(zeta(z))`.
    Airy { s: f64, z0: f64, zeta0: f64, amp: f64 },
}

/// Evaluable wavefunctions of one level.
///
/// The momentum wavefunction is a fixed Gauss–Legendre sum over the position
/// wavefunction for `|k| < k_switch` and the convergent large-`k` expansion in
/// boundary derivatives beyond. Density integrals are computed once and cached.
#[derive(Debug)]
pub struct StateFunctions {
    pub state: BoundState,
    /// Below this coordinate `|psi|` is under `x_cut_threshold` of its scale.
    pub x_cut: f64,
    /// Momentum at which `phi` switches to the large-`k` expansion.
    pub k_switch: f64,
    cfg: ToleranceConfig,
    shape: Shape,
    nodes_x: Vec<f64>,
    weighted_psi: Vec<f64>,
    /// `psi^{(j)}(0) / sigma^j`.
    boundary_series: Vec<f64>,
    sigma: f64,
    position: OnceLock<Result<PositionIntegrals>>,
    momentum: OnceLock<Result<MomentumIntegrals>>,
}

const SERIES_TERMS: usize = 90;

/// Build the wavefunctions of a level and check their normalization.
pub fn build_state(state: BoundState, cfg: &ToleranceConfig) -> Result<StateFunctions> {
    cfg.validate()?;
    let shape = shape_of(&state)?;
    let tail_log = -cfg.x_cut_threshold.ln();
    let x_cut = match shape {
        Shape::FieldFree => -tail_log,
        Shape::Airy { s, z0, zeta0, .. } => {
            let z_cut = (1.5 * (zeta0 + tail_log)).powf(2.0 / 3.0);
            (z0 - z_cut) / s
        }
    };

    let e = state.energy;
    let f = state.field;
    let s = f.cbrt();
    let wall_rate = state.bc.log_derivative().unwrap_or(0.0).abs();
    let sigma = e.abs().sqrt().max(s).max(wall_rate);

    let mut sf = StateFunctions {
        state,
        x_cut,
        k_switch: 0.0,
        cfg: *cfg,
        shape,
        nodes_x: Vec::new(),
        weighted_psi: Vec::new(),
        boundary_series: Vec::new(),
        sigma,
        position: OnceLock::new(),
        momentum: OnceLock::new(),
    };

    // Boundary derivatives from psi'' = -(E + F x) psi, scaled by sigma^j.
    let mut d = vec![0.0; SERIES_TERMS];
    d[0] = sf.psi(0.0);
    d[1] = sf.psi_prime(0.0) / sigma;
    for j in 0..SERIES_TERMS - 2 {
        let mut next = -(e / (sigma * sigma)) * d[j];
        if j >= 1 {
            next -= (f / sigma.powi(3)) * j as f64 * d[j - 1];
        }
        d[j + 2] = next;
    }
    sf.boundary_series = d;

    let mut k_switch = cfg.k_tail_factor * sigma;
    for _ in 0..40 {
        if sf.series_converged(k_switch) {
            break;
        }
        k_switch *= 1.5;
    }
    if !sf.series_converged(k_switch) {
        return Err(Error::NotConverged { estimate: k_switch, error: f64::NAN, subdivisions: SERIES_TERMS });
    }
    sf.k_switch = k_switch;

    // Fixed panels for the direct transform; 20 nodes resolve a panel spanning
    // a few oscillations of exp(-i k x) at |k| <= k_switch.
    let span = -x_cut;
    let width = (12.0 / k_switch).min(span / 4.0);
    let panels = (span / width).ceil() as usize;
    let h = span / panels as f64;
    let (gx, gw) = gauss_legendre_20();
    let norm = 1.0 / (2.0 * PI).sqrt();
    for p in 0..panels {
        let mid = x_cut + (p as f64 + 0.5) * h;
        for (t, w) in gx.iter().zip(gw) {
            let x = mid + 0.5 * h * t;
            sf.nodes_x.push(x);
            sf.weighted_psi.push(0.5 * h * w * sf.psi(x) * norm);
        }
    }

    let pos = sf.position_integrals()?;
    let tol = (10.0 * cfg.abs_tol).max(1e-11);
    if (pos.norm - 1.0).abs() > tol {
        return Err(Error::Inconsistent(format!(
            "{} n={} F={}: closed-form normalization gives int rho = {}",
            state.bc, state.n, state.field, pos.norm
        )));
    }
    Ok(sf)
}

fn shape_of(state: &BoundState) -> Result<Shape> {
    let f = state.field;
    if f == 0.0 {
        return if state.bc == BoundarySpec::RobinMinus && state.n == 0 {
            Ok(Shape::FieldFree)
        } else {
            Err(Error::Refused(format!(
                "{} level {} is field-induced; at zero field its momentum density is a delta function",
                state.bc, state.n
            )))
        };
    }
    let s = f.cbrt();
    match state.bc {
        BoundarySpec::Dirichlet => {
            let a = ai_zero(state.n + 1);
            let amp = s.sqrt() / airy(a).ai_prime;
            Ok(Shape::Airy { s, z0: a, zeta0: 0.0, amp })
        }
        BoundarySpec::Neumann => {
            let a = ai_prime_zero(state.n + 1);
            let amp = s.sqrt() / ((-a).sqrt() * airy(a).ai);
            Ok(Shape::Airy { s, z0: a, zeta0: 0.0, amp })
        }
        BoundarySpec::RobinMinus | BoundarySpec::RobinPlus => {
            let e = state.energy;
            if !(e + 1.0 > 0.0) {
                return Err(Error::Inconsistent(format!("Robin level with E = {e} <= -1")));
            }
            let z0 = -e / (s * s);
            let v = airy_scaled(z0);
            // At the root Ai(z0) = -beta s Ai'(z0); use whichever side is larger
            // so that a near-Dirichlet level does not divide by a tiny Ai.
            let beta = state.bc.log_derivative().unwrap_or(0.0);
            let reference = if v.ai.abs() >= (s * v.ai_prime).abs() {
                v.ai
            } else {
                -beta * s * v.ai_prime
            };
            if reference.abs() < 1e-300 {
                return Err(Error::Refused(format!(
                    "Ai(z0) and Ai'(z0) both vanish at z0 = {z0}; root misclassified"
                )));
            }
            let amp = (f / (e + 1.0)).sqrt() / reference;
            Ok(Shape::Airy { s, z0, zeta0: v.exponent, amp })
        }
    }
}

impl StateFunctions {
    pub fn tolerances(&self) -> &ToleranceConfig {
        &self.cfg
    }

    /// `Psi(x)`; zero for `x > 0`.
    pub fn psi(&self, x: f64) -> f64 {
        if x > 0.0 {
            return 0.0;
        }
        match self.shape {
            Shape::FieldFree => 2f64.sqrt() * x.exp(),
            Shape::Airy { s, z0, zeta0, amp } => {
                let z = z0 - s * x;
                let v = airy_scaled(z);
                amp * v.ai * (zeta0 - v.exponent).exp()
            }
        }
    }

    /// `Psi'(x)`, the one-sided derivative at the wall.
    pub fn psi_prime(&self, x: f64) -> f64 {
        if x > 0.0 {
            return 0.0;
        }
        match self.shape {
            Shape::FieldFree => 2f64.sqrt() * x.exp(),
            Shape::Airy { s, z0, zeta0, amp } => {
                let z = z0 - s * x;
                let v = airy_scaled(z);
                -s * amp * v.ai_prime * (zeta0 - v.exponent).exp()
            }
        }
    }

    pub fn rho(&self, x: f64) -> f64 {
        let p = self.psi(x);
        p * p
    }

    /// `Phi(k) = (2 pi)^{-1/2} int exp(-i k x) Psi(x) dx`.
    pub fn phi(&self, k: f64) -> Complex64 {
        self.phi_with_derivative(k).0
    }

    pub fn gamma(&self, k: f64) -> f64 {
        self.phi(k).norm_sqr()
    }

    /// `Phi(k)` and `dPhi/dk`.
    pub fn phi_with_derivative(&self, k: f64) -> (Complex64, Complex64) {
        if k.abs() >= self.k_switch {
            return self.phi_series(k);
        }
        let (mut re, mut im, mut dre, mut dim) = (0.0, 0.0, 0.0, 0.0);
        for (&x, &wp) in self.nodes_x.iter().zip(&self.weighted_psi) {
            let (sn, cs) = (k * x).sin_cos();
            re += wp * cs;
            im -= wp * sn;
            // d/dk exp(-i k x) = -i x exp(-i k x)
            dre -= x * wp * sn;
            dim -= x * wp * cs;
        }
        (Complex64::new(re, im), Complex64::new(dre, dim))
    }

    /// `gamma(k)` and `gamma'(k)`.
    pub fn gamma_with_derivative(&self, k: f64) -> (f64, f64) {
        let (p, dp) = self.phi_with_derivative(k);
        (p.norm_sqr(), 2.0 * (p.conj() * dp).re)
    }

    /// Large-`k` expansion `sqrt(2 pi) Phi = sum_j i (-i)^j Psi^{(j)}(0) / k^{j+1}`.
    fn phi_series(&self, k: f64) -> (Complex64, Complex64) {
        let r = self.sigma / k;
        let mut pw = 1.0 / k;
        let (mut re, mut im, mut dre, mut dim) = (0.0, 0.0, 0.0, 0.0);
        for (j, &dj) in self.boundary_series.iter().enumerate() {
            let term = dj * pw;
            let dterm = -((j + 1) as f64) * term / k;
            match j % 4 {
                0 => {
                    im += term;
                    dim += dterm;
                }
                1 => {
                    re += term;
                    dre += dterm;
                }
                2 => {
                    im -= term;
                    dim -= dterm;
                }
                _ => {
                    re -= term;
                    dre -= dterm;
                }
            }
            pw *= r;
        }
        let norm = 1.0 / (2.0 * PI).sqrt();
        (Complex64::new(re, im) * norm, Complex64::new(dre, dim) * norm)
    }

    fn series_converged(&self, k: f64) -> bool {
        let r = self.sigma / k;
        let mut pw = 1.0;
        let mut terms = Vec::with_capacity(self.boundary_series.len());
        for &d in &self.boundary_series {
            terms.push((d * pw).abs());
            pw *= r;
        }
        let largest = terms.iter().cloned().fold(0.0, f64::max);
        largest.is_finite()
            && terms[terms.len() - 3..].iter().all(|&t| t <= 1e-16 * largest)
    }

    /// `gamma(0)`.
    pub fn momentum_density_peak(&self) -> f64 {
        self.gamma(0.0)
    }

    /// Nodes of `Psi` on `x < 0`, nearest the wall first.
    pub fn nodes(&self) -> Vec<f64> {
        match self.shape {
            Shape::FieldFree => Vec::new(),
            Shape::Airy { s, z0, .. } => (1..)
                .map(ai_zero)
                .take_while(|&a| a > z0)
                .map(|a| (z0 - a) / s)
                .filter(|&x| x < 0.0)
                .collect(),
        }
    }

    /// Exact extrema: `Psi'` vanishes where the Airy argument hits `a'_k`.
    pub fn exact_extrema(&self) -> Vec<f64> {
        match self.shape {
            Shape::FieldFree => Vec::new(),
            Shape::Airy { s, z0, .. } => (1..)
                .map(ai_prime_zero)
                .take_while(|&a| a > z0)
                .map(|a| (z0 - a) / s)
                .filter(|&x| x < 0.0)
                .collect(),
        }
    }

    /// `|Psi(0) - beta Psi'(0)|`-type boundary residual.
    pub fn boundary_residual(&self) -> f64 {
        let p = self.psi(0.0);
        let dp = self.psi_prime(0.0);
        match self.state.bc.log_derivative() {
            None => p.abs(),
            Some(beta) => (dp - beta * p).abs(),
        }
    }

    /// Cached position-space integrals.
    pub fn position_integrals(&self) -> Result<PositionIntegrals> {
        self.position.get_or_init(|| self.compute_position()).clone()
    }

    /// Cached momentum-space integrals.
    pub fn momentum_integrals(&self) -> Result<MomentumIntegrals> {
        self.momentum.get_or_init(|| self.compute_momentum()).clone()
    }

    fn compute_position(&self) -> Result<PositionIntegrals> {
        let mut breaks = self.nodes();
        breaks.extend(self.exact_extrema());
        breaks.sort_by(f64::total_cmp);
        let est = integrate_vec(
            |x| {
                let p = self.psi(x);
                let dp = self.psi_prime(x);
                let r = p * p;
                [r, xlnx_neg(r), r * r, 4.0 * dp * dp, x * r]
            },
            self.x_cut,
            0.0,
            &breaks,
            &self.cfg,
        )?;
        let v = est.value;
        Ok(PositionIntegrals {
            norm: v[0],
            entropy: v[1],
            onicescu: v[2],
            fisher: v[3],
            mean_x: v[4],
            error: est.error.iter().cloned().fold(0.0, f64::max),
        })
    }

    fn compute_momentum(&self) -> Result<MomentumIntegrals> {
        let k_sw = self.k_switch;
        let integrand = |k: f64| {
            let (g, dg) = self.gamma_with_derivative(k);
            let fisher = if g > 1e-300 { dg * dg / g } else { 0.0 };
            [g, xlnx_neg(g), g * g, fisher]
        };
        let head = integrate_vec(integrand, 0.0, k_sw, &[], &self.cfg)?;

        // Beyond k_switch gamma -> A / k^2; its entropy is added in closed form
        // and only the remainder is integrated, in t = k_switch / k.
        let psi0 = self.psi(0.0);
        let amp = psi0 * psi0 / (2.0 * PI);
        let tail = integrate_vec(
            |t| {
                if t <= 0.0 {
                    return [0.0; 4];
                }
                let k = k_sw / t;
                let jac = k_sw / (t * t);
                let mut v = integrand(k);
                v[1] -= xlnx_neg(amp / (k * k));
                v.iter_mut().for_each(|c| *c *= jac);
                v
            },
            0.0,
            1.0,
            &[],
            &self.cfg,
        )?;
        let entropy_tail = 0.5 * entropy_tail_closed_form(amp, k_sw);
        let err = head.error.iter().chain(&tail.error).cloned().fold(0.0, f64::max);
        Ok(MomentumIntegrals {
            norm: 2.0 * (head.value[0] + tail.value[0]),
            entropy: 2.0 * (head.value[1] + tail.value[1] + entropy_tail),
            onicescu: 2.0 * (head.value[2] + tail.value[2]),
            fisher: 2.0 * (head.value[3] + tail.value[3]),
            error: 2.0 * err,
        })
    }

    /// Extrema refined by Newton's method on `Psi'` from the weak- or
    /// strong-field location formulas, numbered as in those formulas.
    pub fn extrema(&self, regime: Regime) -> Result<Vec<ExtremumInfo>> {
        let bc = self.state.bc;
        if !bc.is_robin() {
            return Err(Error::Refused(format!("extremum asymptotics are for Robin walls, got {bc}")));
        }
        let n = self.state.n;
        let s = self.state.field.cbrt();
        if s == 0.0 {
            return Err(Error::Domain("extrema need a positive field".into()));
        }
        let minus = bc == BoundarySpec::RobinMinus;
        let seeds: Vec<(usize, f64)> = match regime {
            Regime::Weak => {
                if minus {
                    if n == 0 {
                        return Err(Error::Regime("weak-field extrema need n >= 1".into()));
                    }
                    (1..=n).map(|m| (m, (ai_zero(n) - ai_prime_zero(m)) / s - 1.0)).collect()
                } else {
                    (1..=n + 1)
                        .map(|m| (m, (ai_zero(n + 1) - ai_prime_zero(m)) / s + 1.0))
                        .collect()
                }
            }
            Regime::Strong => {
                let ap = ai_prime_zero(n + 1);
                let shift = if minus { -1.0 } else { 1.0 } / (ap * s * s);
                (0..=n).map(|m| (m, (ap - ai_prime_zero(m + 1)) / s + shift)).collect()
            }
        };
        let mut out = Vec::new();
        for (m, seed) in seeds {
            if seed >= 0.0 {
                // The extremum sits beyond the wall for this sign of the
                // extrapolation length.
                continue;
            }
            let x = self.newton_extremum(seed)?;
            if (x - seed).abs() > 0.2 * seed.abs() {
                return Err(Error::Regime(format!(
                    "extremum m={m} moved from {seed} to {x}; field {} is outside the {regime:?} regime",
                    self.state.field
                )));
            }
            out.push(ExtremumInfo { m, x, psi_value: self.psi(x) });
        }
        Ok(out)
    }

    fn newton_extremum(&self, seed: f64) -> Result<f64> {
        let e = self.state.energy;
        let f = self.state.field;
        let mut x = seed;
        for _ in 0..100 {
            let d1 = self.psi_prime(x);
            let d2 = -(e + f * x) * self.psi(x);
            if d2 == 0.0 {
                break;
            }
            let step = d1 / d2;
            x = (x - step).min(0.0);
            if step.abs() <= 1e-14 * x.abs().max(1.0) {
                break;
            }
        }
        let scale = self.psi(x).abs().max(1e-300);
        if self.psi_prime(x).abs() > 1e-8 * scale.max(1.0) {
            return Err(Error::RootNotFound(format!("Newton on Psi' did not settle near {seed}")));
        }
        Ok(x)
    }
}

/// `-x ln x` with the limit value 0 at `x = 0`.
#[inline]
pub(crate) fn xlnx_neg(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.ln()
    } else {
        0.0
    }
}

/// `sqrt(2) [1 + (F/4)(1/2 - x^2)] e^x`, the attractive-wall ground state to
/// first order in the field.
pub fn weak_field_ground_state(x: f64, field: f64) -> f64 {
    2f64.sqrt() * (1.0 + 0.25 * field * (0.5 - x * x)) * x.exp()
}
