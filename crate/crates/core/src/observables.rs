//! Dipole moments: mean coordinate, polarization and transition matrix
//! elements.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_vec, ToleranceConfig};
use crate::spectrum::{energy, BoundState, BoundarySpec};
use crate::special::{ai_prime_zero, ai_zero};
use crate::states::{build_state, StateFunctions};

/// Field-induced shift of the mean coordinate of one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarizationRecord {
    pub state: BoundState,
    pub mean_x: f64,
    pub zero_field_mean_x: f64,
    /// `P = <x> - <x>_0`, in units of `e |Lambda|`.
    pub p: f64,
}

/// Dipole matrix `P_nm = int x Psi_n Psi_m dx` over the lowest levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DipoleMatrix {
    pub bc: BoundarySpec,
    pub field: f64,
    pub dimension: usize,
    pub entries: Vec<Vec<f64>>,
}

impl DipoleMatrix {
    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.entries[n][m]
    }
}

/// `<x>` at zero field: `-1/2` for the attractive-wall ground level, zero for
/// every field-induced level.
pub fn zero_field_mean_x(bc: BoundarySpec, n: usize) -> f64 {
    if bc == BoundarySpec::RobinMinus && n == 0 {
        -0.5
    } else {
        0.0
    }
}

/// Closed-form `<x>`. `None` where the Robin formula has its pole at `E = -1`.
pub fn mean_x_closed_form(state: &BoundState) -> Option<f64> {
    let f = state.field;
    let e = state.energy;
    if f == 0.0 {
        return (state.bc == BoundarySpec::RobinMinus && state.n == 0).then_some(-0.5);
    }
    let s = f.cbrt();
    match state.bc {
        BoundarySpec::Dirichlet => Some(2.0 / 3.0 * ai_zero(state.n + 1) / s),
        BoundarySpec::Neumann => Some(2.0 / 3.0 * ai_prime_zero(state.n + 1) / s),
        BoundarySpec::RobinMinus | BoundarySpec::RobinPlus => {
            if e + 1.0 == 0.0 {
                return None;
            }
            let sign = if state.bc == BoundarySpec::RobinMinus { 1.0 } else { -1.0 };
            Some(-(2.0 * e * (e + 1.0) / f + sign) / (3.0 * (e + 1.0)))
        }
    }
}

/// Polarization of a built level. The closed form is checked against the
/// quadrature of `x rho`; a mismatch beyond `1e-6` is reported as an error.
pub fn polarization(sf: &StateFunctions) -> Result<PolarizationRecord> {
    let state = sf.state;
    let numeric = sf.position_integrals()?.mean_x;
    let mean_x = match mean_x_closed_form(&state) {
        Some(v) => {
            if (v - numeric).abs() > 1e-6 * v.abs().max(1.0) {
                return Err(Error::Inconsistent(format!(
                    "{} n={} F={}: <x> closed form {v} vs quadrature {numeric}",
                    state.bc, state.n, state.field
                )));
            }
            v
        }
        None => numeric,
    };
    let zero = zero_field_mean_x(state.bc, state.n);
    Ok(PolarizationRecord { state, mean_x, zero_field_mean_x: zero, p: mean_x - zero })
}

/// `-dE/dF` by a central difference with step `max(1e-4 F, 1e-6)`.
pub fn hellmann_feynman_mean_x(bc: BoundarySpec, n: usize, field: f64) -> Result<f64> {
    let h = (1e-4 * field).max(1e-6);
    if field - h <= 0.0 {
        return Err(Error::Domain(format!("field {field} too small for a central difference")));
    }
    let up = energy(bc, n, field + h)?.energy;
    let down = energy(bc, n, field - h)?.energy;
    Ok(-(up - down) / (2.0 * h))
}

/// Closed-form off-diagonal element between levels `n != m`.
pub fn dipole_element_closed_form(a: &BoundState, b: &BoundState) -> Result<f64> {
    if a.bc != b.bc || a.field != b.field {
        return Err(Error::Invalid("matrix elements need two levels of the same problem".into()));
    }
    if a.n == b.n {
        return mean_x_closed_form(a).ok_or_else(|| Error::Domain("diagonal formula pole".into()));
    }
    let f = a.field;
    let s = f.cbrt();
    Ok(match a.bc {
        BoundarySpec::Dirichlet => {
            let d = ai_zero(a.n + 1) - ai_zero(b.n + 1);
            2.0 / (d * d * s)
        }
        BoundarySpec::Neumann => {
            let (p, q) = (ai_prime_zero(a.n + 1), ai_prime_zero(b.n + 1));
            -(p + q) / ((p * q).sqrt() * (p - q).powi(2) * s)
        }
        BoundarySpec::RobinMinus | BoundarySpec::RobinPlus => {
            let (en, em) = (a.energy, b.energy);
            f / ((en + 1.0) * (em + 1.0)).sqrt() * (en + em + 2.0) / (en - em).powi(2)
        }
    })
}

/// `int x Psi_a Psi_b dx` by quadrature.
pub fn dipole_element_quadrature(a: &StateFunctions, b: &StateFunctions, cfg: &ToleranceConfig) -> Result<f64> {
    let lo = a.x_cut.min(b.x_cut);
    let mut breaks = a.nodes();
    breaks.extend(b.nodes());
    breaks.sort_by(f64::total_cmp);
    let est = integrate_vec(|x| [x * a.psi(x) * b.psi(x)], lo, 0.0, &breaks, cfg)?;
    Ok(est.value[0])
}

/// Levels whose off-diagonal closed forms are re-derived by quadrature.
const CHECKED_LEVELS: usize = 4;

/// Dipole matrix of the lowest `dimension` levels from the closed forms;
/// elements among the lowest four levels are cross-checked by quadrature.
pub fn dipole_matrix(bc: BoundarySpec, field: f64, dimension: usize, cfg: &ToleranceConfig) -> Result<DipoleMatrix> {
    if dimension < 2 {
        return Err(Error::Invalid(format!("dipole matrix dimension must be >= 2, got {dimension}")));
    }
    if !(field > 0.0) {
        return Err(Error::Domain(format!("dipole matrix needs a positive field, got {field}")));
    }
    let states: Vec<BoundState> =
        (0..dimension).into_par_iter().map(|n| energy(bc, n, field)).collect::<Result<_>>()?;
    let checked: Vec<StateFunctions> = states[..dimension.min(CHECKED_LEVELS)]
        .par_iter()
        .map(|st| build_state(*st, cfg))
        .collect::<Result<_>>()?;

    let pairs: Vec<(usize, usize)> =
        (0..dimension).flat_map(|n| (n..dimension).map(move |m| (n, m))).collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(n, m)| {
            let closed = dipole_element_closed_form(&states[n], &states[m])?;
            if n < checked.len() && m < checked.len() {
                let quad = dipole_element_quadrature(&checked[n], &checked[m], cfg)?;
                if (closed - quad).abs() > 1e-6 * closed.abs().max(1.0) {
                    return Err(Error::Inconsistent(format!(
                        "{bc} F={field}: P_{n}{m} closed form {closed} vs quadrature {quad}"
                    )));
                }
            }
            Ok(closed)
        })
        .collect::<Result<_>>()?;

    let mut entries = vec![vec![0.0; dimension]; dimension];
    for (&(n, m), v) in pairs.iter().zip(values) {
        entries[n][m] = v;
        entries[m][n] = v;
    }
    Ok(DipoleMatrix { bc, field, dimension, entries })
}

/// Weak-field coupling of the attractive-wall ground level to level `n`:
/// `sqrt(2 F)` while `|a_{n+1}| F^{2/3} << 1`, `(-2/a_{n+1}^3)^{1/2} F^{-1/2}`
/// once it is large. The flag is set in the crossover `[0.5, 2]`, where
/// neither branch is accurate.
pub fn ground_coupling_asymptote(n: usize, field: f64) -> Result<(f64, bool)> {
    if n == 0 {
        return Err(Error::Invalid("ground coupling needs n >= 1".into()));
    }
    if !(field > 0.0) {
        return Err(Error::Domain(format!("field must be positive, got {field}")));
    }
    let a = ai_zero(n + 1);
    let measure = a.abs() * field.powf(2.0 / 3.0);
    let value = if measure < 1.0 {
        (2.0 * field).sqrt()
    } else {
        (-2.0 / a.powi(3)).sqrt() / field.sqrt()
    };
    Ok((value, (0.5..=2.0).contains(&measure)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn pol(bc: BoundarySpec, n: usize, f: f64) -> PolarizationRecord {
        polarization(&build_state(energy(bc, n, f).unwrap(), &cfg()).unwrap()).unwrap()
    }

    #[test]
    fn closed_forms_match_quadrature_and_hellmann_feynman() {
        for bc in BoundarySpec::ALL {
            for &f in &[0.3, 2.0, 15.0] {
                for n in 0..3 {
                    let p = pol(bc, n, f);
                    let hf = hellmann_feynman_mean_x(bc, n, f).unwrap();
                    assert!((p.mean_x - hf).abs() < 1e-6, "{bc} {n} {f}: {} vs {hf}", p.mean_x);
                }
            }
        }
    }

    #[test]
    fn polarization_examples() {
        let p0 = pol(BoundarySpec::RobinMinus, 0, 0.01);
        assert!((p0.p - 0.0025).abs() < 1e-4, "{}", p0.p);
        assert_eq!(p0.zero_field_mean_x, -0.5);
        let p1 = pol(BoundarySpec::RobinMinus, 1, 0.001);
        let leading = 2.0 / 3.0 * ai_zero(1) / 0.1;
        assert!((leading + 15.587).abs() < 1e-3);
        // The next weak-field correction is a shift of -1 in <x>.
        assert!((p1.p - (leading - 1.0)).abs() < 0.05, "{}", p1.p);
        let d = pol(BoundarySpec::Dirichlet, 0, 1.0);
        assert!((d.mean_x + 2.0 / 3.0 * 2.338_107_410_459_767).abs() < 1e-12);
    }

    #[test]
    fn strong_field_polarization_law() {
        for &f in &[1e3, 1e4] {
            for n in 0..3 {
                let p = pol(BoundarySpec::RobinMinus, n, f).p;
                let law = 2.0 / 3.0 * ai_prime_zero(n + 1) / f.cbrt() + if n == 0 { 0.5 } else { 0.0 };
                assert!((p / law - 1.0).abs() < 0.05, "n={n} F={f}: {p} vs {law}");
            }
        }
    }

    #[test]
    fn matrices_are_symmetric_and_verified() {
        for bc in BoundarySpec::ALL {
            let m = dipole_matrix(bc, 1.0, 5, &cfg()).unwrap();
            for i in 0..5 {
                for j in 0..5 {
                    assert_eq!(m.get(i, j), m.get(j, i));
                }
                let diag = mean_x_closed_form(&energy(bc, i, 1.0).unwrap()).unwrap();
                assert!((m.get(i, i) - diag).abs() < 1e-8);
            }
        }
        let d = dipole_matrix(BoundarySpec::Dirichlet, 1.0, 2, &cfg()).unwrap();
        let gap = ai_zero(2) - ai_zero(1);
        assert!((d.get(0, 1) - 2.0 / (gap * gap)).abs() < 1e-12);
        assert!((d.get(0, 1) - 0.653_18).abs() < 1e-5);
    }

    #[test]
    fn dirichlet_and_neumann_elements_scale_exactly() {
        for bc in [BoundarySpec::Dirichlet, BoundarySpec::Neumann] {
            let a = dipole_element_closed_form(&energy(bc, 0, 1.5).unwrap(), &energy(bc, 2, 1.5).unwrap()).unwrap();
            let b = dipole_element_closed_form(&energy(bc, 0, 12.0).unwrap(), &energy(bc, 2, 12.0).unwrap()).unwrap();
            assert!((b / a - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn robin_elements_reach_dirichlet_and_neumann_limits() {
        let element = |bc, f| {
            dipole_element_closed_form(&energy(bc, 1, f).unwrap(), &energy(bc, 2, f).unwrap()).unwrap()
        };
        let weak = element(BoundarySpec::RobinMinus, 1e-3);
        // Field-induced level n of the attractive wall tends to Dirichlet n-1.
        let d = dipole_element_closed_form(
            &energy(BoundarySpec::Dirichlet, 0, 1e-3).unwrap(),
            &energy(BoundarySpec::Dirichlet, 1, 1e-3).unwrap(),
        )
        .unwrap();
        assert!((weak / d - 1.0).abs() < 0.02, "{weak} vs {d}");
        let strong = element(BoundarySpec::RobinMinus, 1e3);
        let nm = element(BoundarySpec::Neumann, 1e3);
        assert!((strong / nm - 1.0).abs() < 0.02, "{strong} vs {nm}");
    }

    #[test]
    fn ground_coupling() {
        let (v, flag) = ground_coupling_asymptote(1, 1e-4).unwrap();
        assert!((v - 0.014_142).abs() < 1e-6 && !flag);
        let exact = dipole_element_closed_form(
            &energy(BoundarySpec::RobinMinus, 0, 1e-4).unwrap(),
            &energy(BoundarySpec::RobinMinus, 1, 1e-4).unwrap(),
        )
        .unwrap();
        assert!((exact.abs() / v - 1.0).abs() < 0.05, "{exact} vs {v}");
        let (_, flag) = ground_coupling_asymptote(1, 0.2).unwrap();
        assert!(flag);
    }
}
