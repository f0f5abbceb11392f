//! Bound-state energies for the four wall types.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::brent;
use crate::special::{ai_prime_zero, ai_zero, airy_scaled};

/// Boundary condition at the wall `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundarySpec {
    /// `Psi(0) = 0`.
    Dirichlet,
    /// `Psi'(0) = 0`.
    Neumann,
    /// `Psi'(0) = Psi(0)`: negative extrapolation length, attractive wall.
    RobinMinus,
    /// `-Psi'(0) = Psi(0)`: positive extrapolation length.
    RobinPlus,
}

impl BoundarySpec {
    pub const ALL: [BoundarySpec; 4] = [
        BoundarySpec::Dirichlet,
        BoundarySpec::Neumann,
        BoundarySpec::RobinMinus,
        BoundarySpec::RobinPlus,
    ];

    pub fn is_robin(self) -> bool {
        matches!(self, BoundarySpec::RobinMinus | BoundarySpec::RobinPlus)
    }

    /// `beta` in `Psi'(0) = beta Psi(0)`; `None` for Dirichlet.
    pub fn log_derivative(self) -> Option<f64> {
        match self {
            BoundarySpec::Dirichlet => None,
            BoundarySpec::Neumann => Some(0.0),
            BoundarySpec::RobinMinus => Some(1.0),
            BoundarySpec::RobinPlus => Some(-1.0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BoundarySpec::Dirichlet => "dirichlet",
            BoundarySpec::Neumann => "neumann",
            BoundarySpec::RobinMinus => "robin-",
            BoundarySpec::RobinPlus => "robin+",
        }
    }
}

impl fmt::Display for BoundarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundarySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" | "d" => Ok(BoundarySpec::Dirichlet),
            "neumann" | "n" => Ok(BoundarySpec::Neumann),
            "robin-" | "robinminus" | "r-" => Ok(BoundarySpec::RobinMinus),
            "robin+" | "robinplus" | "r+" => Ok(BoundarySpec::RobinPlus),
            other => Err(Error::Invalid(format!(
                "unknown boundary '{other}', expected dirichlet|neumann|robin+|robin-"
            ))),
        }
    }
}

/// Weak- or strong-field limit of an asymptotic formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Weak,
    Strong,
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(Regime::Weak),
            "strong" => Ok(Regime::Strong),
            other => Err(Error::Invalid(format!("unknown regime '{other}', expected weak|strong"))),
        }
    }
}

/// A solved level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub bc: BoundarySpec,
    pub n: usize,
    pub field: f64,
    pub energy: f64,
    /// `|s Ai'(z0) ± Ai(z0)| / (s |Ai'(z0)| + |Ai(z0)|)` at the root; zero
    /// for the closed-form Dirichlet and Neumann levels.
    pub residual: f64,
    /// Energy interval that isolated the root.
    pub bracket: (f64, f64),
}

impl BoundState {
    /// `F^{1/3}`.
    pub fn field_scale(&self) -> f64 {
        self.field.cbrt()
    }

    /// Airy argument at the wall, `-E / F^{2/3}`.
    pub fn wall_argument(&self) -> f64 {
        let s = self.field_scale();
        -self.energy / (s * s)
    }
}

const RESIDUAL_TOL: f64 = 1e-11;

/// Eigenvalue function `s Ai'(z) ± Ai(z)` with `z = -E / s^2`, scaled by the
/// positive factor `exp(2/3 z^{3/2})` on the decaying side; returns the value
/// and the magnitude it is compared against.
fn robin_function(bc: BoundarySpec, s: f64, z: f64) -> (f64, f64) {
    let a = airy_scaled(z);
    let sign = if bc == BoundarySpec::RobinMinus { 1.0 } else { -1.0 };
    (s * a.ai_prime + sign * a.ai, s * a.ai_prime.abs() + a.ai.abs())
}

/// The eigenvalue function at `(E, F)`, up to a positive factor. Zero exactly
/// at a level of the given boundary.
pub fn eigen_function(bc: BoundarySpec, energy: f64, field: f64) -> Result<f64> {
    check_field(field)?;
    let s = field.cbrt();
    let z = -energy / (s * s);
    let a = airy_scaled(z);
    Ok(match bc {
        BoundarySpec::Dirichlet => a.ai,
        BoundarySpec::Neumann => a.ai_prime,
        _ => robin_function(bc, s, z).0,
    })
}

fn check_field(field: f64) -> Result<()> {
    if !field.is_finite() || field <= 0.0 {
        return Err(Error::Domain(format!(
            "field must be positive and finite (got {field}); non-positive fields have a continuous spectrum"
        )));
    }
    Ok(())
}

/// Energy of level `n` (number of nodes) for the given wall and field.
///
/// Robin levels are isolated between neighbouring Dirichlet and Neumann
/// levels, which interlace them: for the attractive wall
/// `E^D_{n-1} < E^{R-}_n < E^N_n`, for the repulsive one
/// `E^N_n < E^{R+}_n < E^D_n`.
pub fn energy(bc: BoundarySpec, n: usize, field: f64) -> Result<BoundState> {
    if bc == BoundarySpec::RobinMinus && n == 0 && field == 0.0 {
        return Ok(BoundState { bc, n, field, energy: -1.0, residual: 0.0, bracket: (-1.0, -1.0) });
    }
    check_field(field)?;
    let s = field.cbrt();
    let s2 = s * s;
    match bc {
        BoundarySpec::Dirichlet => {
            let e = -s2 * ai_zero(n + 1);
            Ok(BoundState { bc, n, field, energy: e, residual: 0.0, bracket: (e, e) })
        }
        BoundarySpec::Neumann => {
            let e = -s2 * ai_prime_zero(n + 1);
            Ok(BoundState { bc, n, field, energy: e, residual: 0.0, bracket: (e, e) })
        }
        BoundarySpec::RobinMinus | BoundarySpec::RobinPlus => robin_energy(bc, n, field),
    }
}

fn robin_energy(bc: BoundarySpec, n: usize, field: f64) -> Result<BoundState> {
    let s = field.cbrt();
    let s2 = s * s;
    // Bracket in the wall argument z = -E / s^2 (decreasing in E).
    let (z_lo, z_hi) = match (bc, n) {
        (BoundarySpec::RobinMinus, 0) => {
            // The ground level rises from E = -1; below that F keeps one sign.
            let mut z_hi = 1.5 / s2;
            let mut trace = Vec::new();
            loop {
                let f = robin_function(bc, s, z_hi).0;
                trace.push((-s2 * z_hi, f));
                if f < 0.0 {
                    break;
                }
                z_hi *= 2.0;
                if trace.len() > 60 {
                    return Err(Error::Bracket { lo: -s2 * z_hi, hi: -s2 * ai_prime_zero(1), trace });
                }
            }
            (ai_prime_zero(1), z_hi)
        }
        (BoundarySpec::RobinMinus, _) => (ai_prime_zero(n + 1), ai_zero(n)),
        _ => (ai_zero(n + 1), ai_prime_zero(n + 1)),
    };
    let f = |z: f64| robin_function(bc, s, z).0;
    let (f_lo, f_hi) = (f(z_lo), f(z_hi));
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket {
            lo: -s2 * z_hi,
            hi: -s2 * z_lo,
            trace: vec![(-s2 * z_hi, f_hi), (-s2 * z_lo, f_lo)],
        });
    }
    let z = brent(f, z_lo, z_hi, 0.0, 0.0)?;
    let (value, scale) = robin_function(bc, s, z);
    let residual = if scale > 0.0 { value.abs() / scale } else { value.abs() };
    if residual > RESIDUAL_TOL {
        return Err(Error::RootNotFound(format!(
            "{bc} n={n}: residual {residual:e} exceeds {RESIDUAL_TOL:e} at E = {}",
            -s2 * z
        )));
    }
    let nodes = count_zeros_above(z);
    if nodes != n {
        return Err(Error::Inconsistent(format!(
            "{bc} level {n} has {nodes} nodes at E = {}",
            -s2 * z
        )));
    }
    Ok(BoundState {
        bc,
        n,
        field,
        energy: -s2 * z,
        residual,
        bracket: (-s2 * z_hi, -s2 * z_lo),
    })
}

/// Number of Ai zeros `a_k > z`, i.e. nodes of `Ai(z - s x)` on `x < 0`.
pub(crate) fn count_zeros_above(z: f64) -> usize {
    let mut k = 0;
    while ai_zero(k + 1) > z {
        k += 1;
    }
    k
}

/// Energies of levels `0..count` at one field.
pub fn levels(bc: BoundarySpec, field: f64, count: usize) -> Result<Vec<BoundState>> {
    (0..count).map(|n| energy(bc, n, field)).collect()
}

/// Closed-form weak- or strong-field expansion of a Robin energy.
pub fn energy_asymptotic(bc: BoundarySpec, n: usize, field: f64, regime: Regime) -> Result<f64> {
    if !bc.is_robin() {
        return Err(Error::Refused(format!(
            "{bc} energies are exact closed forms; no expansion needed"
        )));
    }
    if !(field >= 0.0) {
        return Err(Error::Domain(format!("field must be non-negative, got {field}")));
    }
    let s = field.cbrt();
    let s2 = s * s;
    let minus = bc == BoundarySpec::RobinMinus;
    Ok(match regime {
        Regime::Weak if minus && n == 0 => -1.0 + field / 2.0 - field * field / 8.0,
        Regime::Weak if minus => -ai_zero(n) * s2 + field,
        Regime::Weak => -ai_zero(n + 1) * s2 - field,
        Regime::Strong => {
            let ap = ai_prime_zero(n + 1);
            let sign = if minus { -1.0 } else { 1.0 };
            -ap * s2 * (1.0 + sign / (ap * ap * s))
        }
    })
}

/// `E_{n+1} - E_n`.
pub fn level_spacing(bc: BoundarySpec, n: usize, field: f64) -> Result<f64> {
    Ok(energy(bc, n + 1, field)?.energy - energy(bc, n, field)?.energy)
}

/// Field at which the attractive-wall ground level crosses `E = 0`, found as
/// a root of the spectrum rather than from the Gamma-function closed form.
pub fn zero_energy_field_root() -> Result<f64> {
    brent(
        |f| energy(BoundarySpec::RobinMinus, 0, f).map(|s| s.energy).unwrap_or(f64::NAN),
        2.0,
        3.0,
        1e-13,
        0.0,
    )
}
