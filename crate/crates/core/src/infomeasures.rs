//! Shannon entropies, Fisher informations, Onicescu energies and CGL
//! complexities in position and momentum space.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::ToleranceConfig;
use crate::roots::{bisect, golden_max};
use crate::spectrum::{energy, BoundarySpec};
use crate::special::ai_zero;
use crate::states::{build_state, StateFunctions};

/// Momentum entropy of the ground state of a unit-width infinite well.
pub const UNIT_WELL_MOMENTUM_ENTROPY: f64 = 2.5189;

/// Lower bound `1 + ln pi` on `S_x + S_k`.
pub fn entropic_bound() -> f64 {
    1.0 + PI.ln()
}

/// All information measures of one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoRecord {
    #[serde(rename = "S_x")]
    pub s_x: f64,
    #[serde(rename = "S_k")]
    pub s_k: f64,
    #[serde(rename = "S_t")]
    pub s_t: f64,
    #[serde(rename = "I_x")]
    pub i_x: f64,
    #[serde(rename = "I_k")]
    pub i_k: f64,
    pub fisher_product: f64,
    #[serde(rename = "O_x")]
    pub o_x: f64,
    #[serde(rename = "O_k")]
    pub o_k: f64,
    pub onicescu_product: f64,
    #[serde(rename = "CGL_x")]
    pub cgl_x: f64,
    #[serde(rename = "CGL_k")]
    pub cgl_k: f64,
    pub cgl_product: f64,
}

/// `(S_x, S_k)`.
pub fn shannon(sf: &StateFunctions) -> Result<(f64, f64)> {
    Ok((sf.position_integrals()?.entropy, sf.momentum_integrals()?.entropy))
}

/// Closed-form position Fisher information; `None` at zero field, where the
/// Robin expression is `0/0`.
pub fn position_fisher_closed_form(bc: BoundarySpec, field: f64, e: f64) -> Option<f64> {
    if field == 0.0 {
        return None;
    }
    Some(match bc.log_derivative() {
        Some(beta) if beta != 0.0 => 4.0 / 3.0 * (2.0 * beta * field + e + e * e) / (e + 1.0),
        _ => 4.0 / 3.0 * e,
    })
}

/// `(I_x, I_k)`. `I_x` is computed both in closed form and by quadrature and
/// the two must agree to `1e-6`.
pub fn fisher(sf: &StateFunctions) -> Result<(f64, f64)> {
    let st = sf.state;
    let numeric = sf.position_integrals()?.fisher;
    let i_x = match position_fisher_closed_form(st.bc, st.field, st.energy) {
        Some(v) => {
            if (v - numeric).abs() > 1e-6 * v.abs().max(1.0) {
                return Err(Error::Inconsistent(format!(
                    "{} n={} F={}: I_x closed form {v} vs quadrature {numeric}",
                    st.bc, st.n, st.field
                )));
            }
            v
        }
        None => numeric,
    };
    Ok((i_x, sf.momentum_integrals()?.fisher))
}

/// `(O_x, O_k)`.
pub fn onicescu(sf: &StateFunctions) -> Result<(f64, f64)> {
    Ok((sf.position_integrals()?.onicescu, sf.momentum_integrals()?.onicescu))
}

/// `(CGL_x, CGL_k, CGL_x CGL_k)` from the entropies and Onicescu energies of
/// a record.
pub fn cgl(info: &InfoRecord) -> (f64, f64, f64) {
    let x = info.s_x.exp() * info.o_x;
    let k = info.s_k.exp() * info.o_k;
    (x, k, x * k)
}

/// Every measure of a built level.
pub fn info_record(sf: &StateFunctions) -> Result<InfoRecord> {
    let (s_x, s_k) = shannon(sf)?;
    let (i_x, i_k) = fisher(sf)?;
    let (o_x, o_k) = onicescu(sf)?;
    let mut rec = InfoRecord {
        s_x,
        s_k,
        s_t: s_x + s_k,
        i_x,
        i_k,
        fisher_product: i_x * i_k,
        o_x,
        o_k,
        onicescu_product: o_x * o_k,
        cgl_x: 0.0,
        cgl_k: 0.0,
        cgl_product: 0.0,
    };
    let (cx, ck, cp) = cgl(&rec);
    rec.cgl_x = cx;
    rec.cgl_k = ck;
    rec.cgl_product = cp;
    Ok(rec)
}

/// Solve, build and measure one level.
pub fn measure(bc: BoundarySpec, n: usize, field: f64, cfg: &ToleranceConfig) -> Result<InfoRecord> {
    info_record(&build_state(energy(bc, n, field)?, cfg)?)
}

/// Entropies of the Dirichlet ground level modelled as the ground state of a
/// flat well of width `2 |a_1| / F^{1/3}`: `(S_x, S_k, S_t)`.
pub fn flat_well_approximation(field: f64) -> Result<(f64, f64, f64)> {
    if !(field > 0.0) {
        return Err(Error::Domain(format!("field must be positive, got {field}")));
    }
    let shift = ai_zero(1).abs().ln() - field.ln() / 3.0;
    let s_x = 2.0 * LN_2 - 1.0 + shift;
    let s_k = UNIT_WELL_MOMENTUM_ENTROPY - LN_2 - shift;
    Ok((s_x, s_k, s_x + s_k))
}

/// Field at which the total entropies of the two lowest attractive-wall
/// levels cross, located by bisection on `[0.1, 5]` to `1e-3`.
pub fn entropy_crossing(cfg: &ToleranceConfig) -> Result<f64> {
    let diff = |f: f64| -> Result<f64> {
        let s0 = measure_entropy(BoundarySpec::RobinMinus, 0, f, cfg)?;
        let s1 = measure_entropy(BoundarySpec::RobinMinus, 1, f, cfg)?;
        Ok(s0 - s1)
    };
    bisect(diff, 0.1, 5.0, 1e-3)
}

fn measure_entropy(bc: BoundarySpec, n: usize, field: f64, cfg: &ToleranceConfig) -> Result<f64> {
    let sf = build_state(energy(bc, n, field)?, cfg)?;
    let (sx, sk) = shannon(&sf)?;
    Ok(sx + sk)
}

/// `I_x I_k` of one level.
pub fn fisher_product(bc: BoundarySpec, n: usize, field: f64, cfg: &ToleranceConfig) -> Result<f64> {
    let sf = build_state(energy(bc, n, field)?, cfg)?;
    let (ix, ik) = fisher(&sf)?;
    Ok(ix * ik)
}

/// Maximum over `F in (1e-4, 1)` of `I_x I_k` for the attractive-wall level
/// `n >= 1`, by golden-section search in `ln F`. Returns `(F_max, value)`.
pub fn fisher_product_maximum(n: usize, cfg: &ToleranceConfig) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Invalid("the ground level product decreases monotonically; need n >= 1".into()));
    }
    let (lo, hi) = (1e-4f64.ln(), 0.0);
    let (x, v) = golden_max(|u| fisher_product(BoundarySpec::RobinMinus, n, u.exp(), cfg), lo, hi, 0.01)?;
    if x - lo < 0.05 || hi - x < 0.05 {
        let trace = vec![(lo.exp(), f64::NAN), (x.exp(), v), (hi.exp(), f64::NAN)];
        return Err(Error::Bracket { lo: lo.exp(), hi: hi.exp(), trace });
    }
    Ok((x.exp(), v))
}

/// Field-independent coefficient `C_n = I_k F^{2/3}` of the Dirichlet and
/// Neumann momentum Fisher information.
pub fn momentum_fisher_coefficient(bc: BoundarySpec, n: usize, cfg: &ToleranceConfig) -> Result<f64> {
    if bc.is_robin() {
        return Err(Error::Refused("the coefficient is field-independent only for Dirichlet and Neumann".into()));
    }
    let sf = build_state(energy(bc, n, 1.0)?, cfg)?;
    Ok(sf.momentum_integrals()?.fisher)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn field_free_values() {
        let r = measure(BoundarySpec::RobinMinus, 0, 0.0, &cfg()).unwrap();
        assert!((r.s_x - (1.0 - LN_2)).abs() < 1e-9);
        assert!((r.s_k - (2.0 * LN_2 + PI.ln())).abs() < 1e-9);
        assert!((r.i_x - 4.0).abs() < 1e-9);
        assert!((r.i_k - 0.5).abs() < 1e-9);
        assert!((r.o_x - 1.0).abs() < 1e-9);
        assert!((r.o_k - 0.5 / PI).abs() < 1e-9);
        assert!((r.cgl_x - std::f64::consts::E / 2.0).abs() < 1e-8);
        assert!((r.cgl_k - 2.0).abs() < 1e-8);
    }

    #[test]
    fn weak_field_ground_level() {
        // First-order perturbation theory about the field-free state.
        let r = measure(BoundarySpec::RobinMinus, 0, 0.05, &cfg()).unwrap();
        assert!((r.s_x - (1.0 - LN_2 - 0.025)).abs() < 2e-3);
        assert!((r.s_k - ((4.0 * PI).ln() + 0.375 * 0.05)).abs() < 2e-3);
        assert!((r.onicescu_product - (1.0 - 0.05 / 8.0) / (2.0 * PI)).abs() < 2e-3);
        let r = measure(BoundarySpec::RobinMinus, 0, 0.01, &cfg()).unwrap();
        assert!((r.i_k - (1.0 - 11.0 / 8.0 * 0.01) / 2.0).abs() < 5e-4);
        assert!((r.fisher_product - (2.0 - 1.75 * 0.01)).abs() < 1e-3);
    }

    #[test]
    fn dirichlet_logarithmic_law() {
        let a = measure(BoundarySpec::Dirichlet, 0, 1.0, &cfg()).unwrap();
        let b = measure(BoundarySpec::Dirichlet, 0, 8.0, &cfg()).unwrap();
        assert!((b.s_x - a.s_x + 8f64.ln() / 3.0).abs() < 1e-6);
        assert!((a.i_x - 4.0 / 3.0 * 2.338_107_410_459_767).abs() < 1e-9);
        assert!((a.s_t - 2.254).abs() < 5e-3);
    }

    #[test]
    fn flat_well() {
        let (sx, _, st) = flat_well_approximation(1.0).unwrap();
        assert!((st - 2.212).abs() < 1e-3);
        assert!((sx - 1.235_64).abs() < 1e-5);
        assert!(flat_well_approximation(0.0).is_err());
    }

    #[test]
    fn cgl_is_exponential_of_entropy_times_onicescu() {
        let r = measure(BoundarySpec::RobinPlus, 2, 3.0, &cfg()).unwrap();
        assert!((r.cgl_x - r.s_x.exp() * r.o_x).abs() < 1e-14);
        assert!((r.cgl_product - r.cgl_x * r.cgl_k).abs() < 1e-14);
        assert!(r.s_t >= entropic_bound());
    }
}
