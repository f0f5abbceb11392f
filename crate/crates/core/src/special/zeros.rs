//! Negative zeros `a_n` of Ai and `a'_n` of Ai'.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::airy::airy;

/// Which family of zeros.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZeroKind {
    /// Zeros `a_n` of Ai.
    Ai,
    /// Zeros `a'_n` of Ai'.
    AiPrime,
}

/// Number of zeros of each kind kept in the shared table.
pub const TABLE_SIZE: usize = 100;

/// Cached zeros `a_1 .. a_count` and `a'_1 .. a'_count`.
#[derive(Debug, Clone)]
pub struct AiryRootTable {
    pub a: Vec<f64>,
    pub a_prime: Vec<f64>,
    pub count: usize,
}

impl AiryRootTable {
    pub fn build(count: usize) -> Self {
        let a = (1..=count).map(|n| refine(ZeroKind::Ai, n)).collect();
        let a_prime = (1..=count).map(|n| refine(ZeroKind::AiPrime, n)).collect();
        AiryRootTable { a, a_prime, count }
    }

    /// The shared, lazily built table of the first [`TABLE_SIZE`] zeros.
    pub fn shared() -> &'static AiryRootTable {
        static TABLE: OnceLock<AiryRootTable> = OnceLock::new();
        TABLE.get_or_init(|| AiryRootTable::build(TABLE_SIZE))
    }

    pub fn get(&self, kind: ZeroKind, n: usize) -> Option<f64> {
        if n == 0 || n > self.count {
            return None;
        }
        Some(match kind {
            ZeroKind::Ai => self.a[n - 1],
            ZeroKind::AiPrime => self.a_prime[n - 1],
        })
    }
}

/// The `n`-th negative zero (`n >= 1`) of Ai or Ai'.
pub fn airy_root(kind: ZeroKind, n: usize) -> f64 {
    assert!(n >= 1, "airy_root: zeros are numbered from 1");
    AiryRootTable::shared().get(kind, n).unwrap_or_else(|| refine(kind, n))
}

/// `a_n` shorthand.
pub fn ai_zero(n: usize) -> f64 {
    airy_root(ZeroKind::Ai, n)
}

/// `a'_n` shorthand.
pub fn ai_prime_zero(n: usize) -> f64 {
    airy_root(ZeroKind::AiPrime, n)
}

/// Large-`n` expansion of the zeros.
pub fn asymptotic_root(kind: ZeroKind, n: usize) -> f64 {
    let nf = n as f64;
    match kind {
        ZeroKind::Ai => {
            let t = 3.0 * PI / 8.0 * (4.0 * nf - 1.0);
            -t.powf(2.0 / 3.0) * series_t(t)
        }
        ZeroKind::AiPrime => {
            let t = 3.0 * PI / 8.0 * (4.0 * nf - 3.0);
            -t.powf(2.0 / 3.0) * series_u(t)
        }
    }
}

fn series_t(t: f64) -> f64 {
    let w = 1.0 / (t * t);
    1.0 + w * (5.0 / 48.0
        + w * (-5.0 / 36.0 + w * (77125.0 / 82944.0 + w * (-108056875.0 / 6967296.0))))
}

fn series_u(t: f64) -> f64 {
    let w = 1.0 / (t * t);
    1.0 + w * (-7.0 / 48.0
        + w * (35.0 / 288.0 + w * (-181223.0 / 207360.0 + w * (18683371.0 / 1244160.0))))
}

/// Newton iteration from the asymptotic seed. For Ai' zeros the Airy
/// equation gives `Ai'' = x Ai`.
fn refine(kind: ZeroKind, n: usize) -> f64 {
    // The expansion is too crude for the first Ai' zero to land in its basin.
    let mut x = match (kind, n) {
        (ZeroKind::AiPrime, 1) => -1.0188,
        _ => asymptotic_root(kind, n),
    };
    for _ in 0..60 {
        let v = airy(x);
        let step = match kind {
            ZeroKind::Ai => v.ai / v.ai_prime,
            ZeroKind::AiPrime => v.ai_prime / (x * v.ai),
        };
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}
