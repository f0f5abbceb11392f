//! Finite-difference reference solver, independent of the Airy machinery.
//!
//! The Hamiltonian `-d^2/dx^2 - F x` is discretised on `x_i = -i h`. The wall
//! condition `Psi'(0) = beta Psi(0)` enters through a ghost node,
//! `u_{-1} = u_1 + 2 h beta u_0`, which makes the first row
//! `((2 - 2 h beta) u_0 - 2 u_1) / h^2`; rescaling `u_0 = sqrt(2) v_0` turns
//! the matrix symmetric without changing its spectrum, and the Euclidean norm
//! of `v` is then the trapezoid norm of `u`. The boundary error is `O(h^2)`,
//! removed together with the bulk error by Richardson extrapolation over
//! `h, h/2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::BoundarySpec;
use crate::special::{ai_zero, decay_exponent};

/// Uniform grid on `[x_min, 0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub n_points: usize,
    pub h: f64,
}

/// Default number of grid points.
pub const DEFAULT_POINTS: usize = 4000;

/// Decay exponent below which the truncated tail would exceed `1e-12`.
const REQUIRED_DECAY: f64 = 27.7;
/// Decay exponent used for default grids, fifteen Airy lengths past the
/// turning point.
const DEFAULT_DECAY: f64 = 38.7;

impl GridSpec {
    pub fn new(x_min: f64, n_points: usize) -> Result<Self> {
        if !(x_min < 0.0) || n_points < 16 {
            return Err(Error::Invalid(format!("grid needs x_min < 0 and >= 16 points, got {x_min}, {n_points}")));
        }
        Ok(GridSpec { x_min, n_points, h: -x_min / (n_points - 1) as f64 })
    }

    /// A grid deep enough for levels `0..levels`, sized from the Dirichlet
    /// levels, which lie above every other boundary's level of the same index.
    pub fn default_for(field: f64, levels: usize) -> Result<Self> {
        check_field(field)?;
        let s = field.cbrt();
        let e_max = -s * s * ai_zero(levels.max(1));
        GridSpec::new(required_depth(e_max, field, DEFAULT_DECAY), DEFAULT_POINTS)
    }

    fn halved(&self) -> GridSpec {
        let n = 2 * self.n_points - 1;
        GridSpec { x_min: self.x_min, n_points: n, h: self.h / 2.0 }
    }
}

fn check_field(field: f64) -> Result<()> {
    if !(field > 0.0 && field.is_finite()) {
        return Err(Error::Domain(format!("oracle needs a positive field, got {field}")));
    }
    Ok(())
}

/// `x_min` at which a level of energy `e` has decayed by `exp(-decay)` from
/// its peak.
fn required_depth(e: f64, field: f64, decay: f64) -> f64 {
    let s = field.cbrt();
    let z0 = -e / (s * s);
    let z_min = (1.5 * (decay_exponent(z0) + decay)).powf(2.0 / 3.0);
    (z0 - z_min) / s
}

struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
    /// Coordinates of the unknowns.
    xs: Vec<f64>,
}

fn assemble(bc: BoundarySpec, field: f64, grid: &GridSpec) -> Tridiagonal {
    let h = grid.h;
    let h2 = h * h;
    // Node N-1 carries the far Dirichlet condition and is not an unknown.
    let first = if bc == BoundarySpec::Dirichlet { 1 } else { 0 };
    let last = grid.n_points - 2;
    let xs: Vec<f64> = (first..=last).map(|i| -(i as f64) * h).collect();
    let mut diag: Vec<f64> = xs.iter().map(|&x| 2.0 / h2 - field * x).collect();
    let mut off = vec![-1.0 / h2; xs.len() - 1];
    if let Some(beta) = bc.log_derivative() {
        diag[0] = (2.0 - 2.0 * h * beta) / h2;
        off[0] = -(2f64.sqrt()) / h2;
    }
    Tridiagonal { diag, off, xs }
}

impl Tridiagonal {
    /// Number of eigenvalues below `lambda`.
    fn sturm_count(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.diag.len() {
            let b2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - lambda - if i == 0 { 0.0 } else { b2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + lambda.abs()).max(1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn eigenvalue(&self, k: usize) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.diag.len() {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i < self.off.len() { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Unit eigenvector of the symmetric matrix by inverse iteration.
    fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.diag.len();
        let shift = lambda + 1e-10 * lambda.abs().max(1.0);
        let mut v = vec![1.0; n];
        for _ in 0..4 {
            v = self.solve_shifted(shift, &v);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }

    /// Thomas algorithm for `(T - shift) x = b`.
    fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0] - shift;
        c[0] = if n > 1 { self.off[0] / denom } else { 0.0 };
        d[0] = b[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - shift - self.off[i - 1] * c[i - 1];
            if denom == 0.0 {
                denom = f64::EPSILON;
            }
            c[i] = if i < n - 1 { self.off[i] / denom } else { 0.0 };
            d[i] = (b[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        d
    }
}

fn check_decay(energies: &[f64], field: f64, grid: &GridSpec) -> Result<()> {
    let s = field.cbrt();
    for &e in energies {
        let z0 = -e / (s * s);
        let z_min = z0 - s * grid.x_min;
        if decay_exponent(z_min) - decay_exponent(z0) < REQUIRED_DECAY {
            let suggested = required_depth(e, field, DEFAULT_DECAY);
            return Err(Error::Refused(format!(
                "grid ends at x_min = {} where a level at E = {e} has not decayed below 1e-12; use x_min <= {suggested:.4}",
                grid.x_min
            )));
        }
    }
    Ok(())
}

fn raw_energies(bc: BoundarySpec, field: f64, levels: usize, grid: &GridSpec) -> Vec<f64> {
    let t = assemble(bc, field, grid);
    (0..levels).map(|k| t.eigenvalue(k)).collect()
}

/// Lowest `levels` eigenvalues, Richardson-extrapolated over `h` and `h/2`.
pub fn fd_energies(bc: BoundarySpec, field: f64, levels: usize, grid: &GridSpec) -> Result<Vec<f64>> {
    check_field(field)?;
    let coarse = raw_energies(bc, field, levels, grid);
    check_decay(&coarse, field, grid)?;
    let fine = raw_energies(bc, field, levels, &grid.halved());
    Ok(coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect())
}

/// Unextrapolated eigenvalues on one grid; exposes the convergence order.
pub fn fd_energies_single(bc: BoundarySpec, field: f64, levels: usize, grid: &GridSpec) -> Result<Vec<f64>> {
    check_field(field)?;
    Ok(raw_energies(bc, field, levels, grid))
}

fn raw_moment(bc: BoundarySpec, field: f64, n: usize, power: i32, grid: &GridSpec) -> (f64, f64) {
    let t = assemble(bc, field, grid);
    let lambda = t.eigenvalue(n);
    let v = t.eigenvector(lambda);
    // With u_0 = sqrt(2) v_0 and the half trapezoid weight at the wall,
    // h sum w x^p u^2 = sum x^p v^2.
    let m = t.xs.iter().zip(&v).map(|(&x, &vi)| x.powi(power) * vi * vi).sum();
    (m, lambda)
}

/// `<x^power>` of level `n` from the normalized eigenvector,
/// Richardson-extrapolated like the energies.
pub fn fd_moment(bc: BoundarySpec, field: f64, n: usize, power: i32, grid: &GridSpec) -> Result<f64> {
    check_field(field)?;
    if power < 0 {
        return Err(Error::Invalid("negative moments are not supported".into()));
    }
    let (coarse, lambda) = raw_moment(bc, field, n, power, grid);
    check_decay(&[lambda], field, grid)?;
    let (fine, _) = raw_moment(bc, field, n, power, &grid.halved());
    Ok((4.0 * fine - coarse) / 3.0)
}
