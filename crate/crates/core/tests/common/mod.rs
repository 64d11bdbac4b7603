//! Oracles shared by the integration tests and the acceptance runner. None of
//! them call into the code paths they check.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

use cps_windows::arith::{OrbitNumber, Rotation};
use cps_windows::pseudolines::Cps3;
use cps_windows::window::WindowSpec;
use num_bigint::BigInt;
use num_traits::{One, Signed};

/// Fixed-point bits of the numeric evaluation.
pub const BITS: u32 = 200;

/// (a + bω)/d evaluated as a fraction N/Q with N carrying √D to BITS bits.
fn numeric(rot: &Rotation, x: &OrbitNumber) -> (BigInt, BigInt) {
    let s = rot.spec();
    let (dd, p, q, r) = (BigInt::from(s.d), BigInt::from(s.p), BigInt::from(s.q), BigInt::from(s.r));
    let scale = BigInt::one() << BITS;
    let sqrt_d = (dd * &scale * &scale).sqrt();
    let (a, b, d) = (BigInt::from(x.a()), BigInt::from(x.b()), BigInt::from(x.den()));
    let num = (&a * &r + &b * &p) * &scale + &b * &q * sqrt_d;
    (num, r * d)
}

/// Comparison by 256-bit-class numeric evaluation; None when the two values
/// are too close for the evaluation to separate them.
pub fn numeric_cmp(rot: &Rotation, x: &OrbitNumber, y: &OrbitNumber) -> Option<Ordering> {
    let (nx, qx) = numeric(rot, x);
    let (ny, qy) = numeric(rot, y);
    let diff = nx * &qy - ny * &qx;
    // rounding of √D·2^BITS contributes at most |b·q·den| per side
    let slack = BigInt::from(1u8) << 140;
    if diff.abs() <= slack {
        if x == y {
            return Some(Ordering::Equal);
        }
        return None;
    }
    // denominators r·d: their product has the sign of (r_x r_y) = +
    Some(if diff.is_positive() { Ordering::Greater } else { Ordering::Less })
}

/// Successive strict minima of ‖ℓω‖ for 1 ≤ ℓ ≤ limit.
pub fn brute_returns(rot: &Rotation, limit: i128) -> Vec<i128> {
    let mut best: Option<OrbitNumber> = None;
    let mut out = Vec::new();
    for l in 1..=limit {
        let d = rot.norm(&OrbitNumber::new(0, l));
        if best.is_none_or(|b| rot.lt(&d, &b)) {
            best = Some(d);
            out.push(l);
        }
    }
    out
}

/// Distinct length-n factors of k ↦ [{kω} ∈ [lo, hi)] along 0 ≤ k < len.
pub fn factor_count(rot: &Rotation, lo: &OrbitNumber, hi: &OrbitNumber, n: usize, len: usize) -> usize {
    let bits: Vec<bool> = (0..len as i128)
        .map(|k| {
            let y = rot.frac(&OrbitNumber::new(0, k));
            rot.le(lo, &y) && rot.lt(&y, hi)
        })
        .collect();
    bits.windows(n).map(|w| w.to_vec()).collect::<HashSet<_>>().len()
}

fn inverse3(m: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ([1, 0, 0][j], [2, 2, 1][j]);
            let (c0, c1) = ([1, 0, 0][i], [2, 2, 1][i]);
            let minor = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
            inv[i][j] = if (i + j) % 2 == 0 { minor } else { -minor } / det;
        }
    }
    inv
}

/// s ∈ [0, 1] lies in one of the sorted closed pieces.
pub fn lift_member(rot: &Rotation, pieces: &[(OrbitNumber, OrbitNumber)], s: &OrbitNumber) -> bool {
    let i = pieces.partition_point(|p| rot.le(&p.0, s));
    i > 0 && rot.le(s, &pieces[i - 1].1)
}

/// Λ(W + t) ∩ B_M for the (ℝ², ℝ) scheme as lattice triples (n, m, k): loop
/// over (n, m) in a box from A⁻¹, k from a float floor ±1, exact membership.
pub fn pseudoline_oracle(cps: &Cps3, w: &WindowSpec, t: &OrbitNumber, radius: i128) -> BTreeSet<(i128, i128, i128)> {
    let rot = cps.omega;
    let a = [
        cps.external[0].map(|x| rot.to_f64(&x)),
        cps.external[1].map(|x| rot.to_f64(&x)),
        [rot.omega_f64(), rot.to_f64(&cps.omega2), 1.0],
    ];
    let inv = inverse3(a);
    // |internal − t| ≤ 1 on the lift, so the preimage lies in a box
    let tf = rot.to_f64(t);
    let reach = [radius as f64, radius as f64, tf.abs() + 1.0];
    let bound = |i: usize| -> i128 { (0..3).map(|j| inv[i][j].abs() * reach[j]).sum::<f64>().ceil() as i128 + 2 };
    let (bn, bm) = (bound(0), bound(1));
    let pieces = w.set.pieces();
    let r2 = OrbitNumber::rational(radius * radius, 1);
    let mut out = BTreeSet::new();
    for n in -bn..=bn {
        for m in -bm..=bm {
            let y = OrbitNumber::new(0, n) + cps.omega2.scale(m, 1) - *t;
            let k0 = -(rot.to_f64(&y).floor() as i128);
            for k in k0 - 1..=k0 + 1 {
                let s = y + OrbitNumber::int(k);
                if !lift_member(&rot, pieces, &s) || w.excluded.contains(&rot.frac(&s)) {
                    continue;
                }
                let x = cps.external_point(n, m, k);
                if rot.le(&(rot.mul(&x[0], &x[0]) + rot.mul(&x[1], &x[1])), &r2) {
                    out.insert((n, m, k));
                }
            }
        }
    }
    out
}
