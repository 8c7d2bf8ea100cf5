//! Closed-form capacities of the erasure and qubit depolarizing channels.

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};

/// Erasure-channel quantities at a mutual-information constraint `y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QecClosedForms {
    /// Unitary-encoding lower bound C_E·(1 − y/(2 log₂ d)).
    pub chi_l_i: f64,
    /// Entanglement-assisted capacity (1−ε)·2 log₂ d.
    pub c_e: f64,
    /// One-shot unassisted capacity, C_E/2.
    pub c1: f64,
}

pub fn qec_closed_forms(eps: f64, d: usize, y: f64) -> Result<QecClosedForms> {
    check_range("eps", eps, 0.0, 1.0)?;
    if d < 2 {
        return Err(Error::Dimension(format!("erasure closed forms need d >= 2, got {d}")));
    }
    let log_d = (d as f64).log2();
    check_range("y", y, 0.0, 2.0 * log_d)?;
    let c_e = (1.0 - eps) * 2.0 * log_d;
    Ok(QecClosedForms {
        chi_l_i: c_e * (1.0 - y / (2.0 * log_d)),
        c_e,
        c1: c_e / 2.0,
    })
}

fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Qubit depolarizing channel capacities at noise `lam`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepolarizingClosedForms {
    pub lam: f64,
    /// 2 + (1−3λ/4) log₂(1−3λ/4) + (3λ/4) log₂(λ/4)
    pub c_e: f64,
    /// 1 + (1−λ/2) log₂(1−λ/2) + (λ/2) log₂(λ/2)
    pub c: f64,
}

impl DepolarizingClosedForms {
    /// C_E·(1 − q/2), the line the unitary-encoding scan maxima follow.
    pub fn chi_star(&self, q: f64) -> f64 {
        self.c_e * (1.0 - q / 2.0)
    }
}

pub fn depolarizing_closed_forms(lam: f64) -> Result<DepolarizingClosedForms> {
    check_range("lam", lam, 0.0, 1.0)?;
    let a = 0.75 * lam;
    // (3λ/4) log₂(λ/4) = 3·(λ/4) log₂(λ/4)
    let c_e = 2.0 + xlog2x(1.0 - a) + 3.0 * xlog2x(lam / 4.0);
    let h = lam / 2.0;
    let c = 1.0 + xlog2x(1.0 - h) + xlog2x(h);
    Ok(DepolarizingClosedForms { lam, c_e, c })
}
