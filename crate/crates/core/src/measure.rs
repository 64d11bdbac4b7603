//! The measure estimate for intersections of nearby translates:
//!
//! Θ(∩_{a∈Σ_n} (C − γ_a)) ≥ Θ(C)·(1 − Σ_{j=1}^n 2^{j−1} η^C(δ_j^n)),
//!
//! with γ_a = Σ_j ξ_{a_1…a_j}, δ_j^n = Σ_{ℓ=j}^n ε_ℓ and
//! η^C(ε) = Θ(B_ε(C))/Θ(C) − 1. Both sides are computed exactly; the
//! right side is multiplied through by Θ(C) so no division is needed.

use std::cmp::Ordering;

use serde::Serialize;

use crate::arith::OrbitNumber;
use crate::error::{Error, Result};
use crate::interval::IntervalSet;

/// ξ indexed by word: `xi[ℓ-1][a]` for the word a of length ℓ read as a
/// binary number with a_1 most significant.
pub type XiFamily = Vec<Vec<OrbitNumber>>;

#[derive(Clone, Debug, Serialize)]
pub struct MeasureEstimate {
    pub lhs: OrbitNumber,
    pub rhs: OrbitNumber,
    pub holds: bool,
    /// Θ(C)·η^C(δ_j^n) = Θ(B_δ(C)) − Θ(C), j = 1..n
    pub excess: Vec<OrbitNumber>,
}

pub fn measure_estimate_check(c: &IntervalSet, xi: &XiFamily, eps: &[OrbitNumber]) -> Result<MeasureEstimate> {
    let rot = c.rotation();
    let n = eps.len();
    if xi.len() != n {
        return Err(Error::Precondition(format!("{} ξ levels for {n} ε values", xi.len())));
    }
    let theta = c.measure();
    if rot.sign(&theta) != Ordering::Greater {
        return Err(Error::Precondition("C must have positive measure".into()));
    }
    for (l, (level, e)) in xi.iter().zip(eps).enumerate() {
        if level.len() != 1 << (l + 1) {
            return Err(Error::Precondition(format!(
                "level {} needs {} ξ values, got {}",
                l + 1,
                1 << (l + 1),
                level.len()
            )));
        }
        if let Some(bad) = level.iter().position(|x| rot.lt(e, &rot.norm(x))) {
            return Err(Error::Precondition(format!(
                "ε_{} = {} below |ξ| = {} at word {bad}",
                l + 1,
                rot.to_f64(e),
                rot.to_f64(&rot.norm(&level[bad]))
            )));
        }
    }

    // γ over Σ_n, built level by level
    let mut gamma = vec![OrbitNumber::ZERO];
    for level in xi {
        gamma = (0..level.len()).map(|a| gamma[a >> 1] + level[a]).collect();
    }
    let mut meet = c.translate(&-gamma[0]);
    for g in &gamma[1..] {
        meet = meet.intersect(&c.translate(&-*g));
        if meet.is_empty() {
            break;
        }
    }
    let lhs = meet.measure();

    let mut excess = Vec::with_capacity(n);
    let mut rhs = theta;
    for j in 1..=n {
        let delta = eps[j - 1..].iter().fold(OrbitNumber::ZERO, |a, e| a + *e);
        let ex = c.thicken(&delta).measure() - theta;
        rhs = rhs - ex.scale(1 << (j - 1), 1);
        excess.push(ex);
    }
    Ok(MeasureEstimate {
        holds: rot.le(&rhs, &lhs),
        lhs,
        rhs,
        excess,
    })
}
