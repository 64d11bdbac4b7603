//! Birkhoff averages of f_{g0;ε}(Γ) = max{0, 1 − d(Γ, B_ε(g0))/ε} over the
//! fibre candidates at a critical shift.
//!
//! f(Γ − s) = φ(dist(g0 + s, Γ)) with φ = 1 on [0, ε], linear down to 0 at
//! 2ε. The average (1/2N)∫_{−N}^{N} is evaluated exactly, cell by cell of
//! the nearest-point partition. One isolated point carries ∫φ(|y|)dy = 3ε,
//! so two candidates differing in one isolated point differ by 3ε/(2N).

use serde::Serialize;

use crate::arith::{OrbitNumber, Rotation};
use crate::cps::{check_ldc, fiber_enumerate, PlanarCps};
use crate::error::{Error, Result};
use crate::window::WindowSpec;

#[derive(Clone, Debug, Serialize)]
pub struct BirkhoffReport {
    pub n: i128,
    pub eps: OrbitNumber,
    pub g0: OrbitNumber,
    pub candidates: usize,
    /// A_N(f, Γ) per candidate, exact
    pub averages: Vec<OrbitNumber>,
    pub averages_f64: Vec<f64>,
    pub max_deviation: OrbitNumber,
    pub max_deviation_f64: f64,
    /// largest symmetric difference between two candidates
    pub point_differences: usize,
    /// 2ε·sup f/(2N) per differing point
    pub one_point_bound: OrbitNumber,
    /// 3ε·sup f/(2N) per differing point: the mass of φ around one point
    pub isolated_point_bound: OrbitNumber,
    pub within_one_point_bound: bool,
    pub within_isolated_point_bound: bool,
}

// odd antiderivative of φ(|v|)
fn g(rot: &Rotation, v: &OrbitNumber, eps: &OrbitNumber) -> OrbitNumber {
    let u = rot.abs(*v);
    let two = *eps + *eps;
    let f = if rot.le(&u, eps) {
        u
    } else if rot.le(&u, &two) {
        // ε + 2(u − ε) − (u² − ε²)/(2ε)
        let q = rot.div(&(rot.mul(&u, &u) - rot.mul(eps, eps)), &two);
        *eps + (u - *eps) + (u - *eps) - q
    } else {
        eps.scale(3, 2)
    };
    if rot.sign(v).is_lt() {
        -f
    } else {
        f
    }
}

/// ∫_{lo}^{hi} φ(dist(y, pts)) dy for sorted points.
pub fn integral(rot: &Rotation, pts: &[OrbitNumber], lo: &OrbitNumber, hi: &OrbitNumber, eps: &OrbitNumber) -> OrbitNumber {
    let mut total = OrbitNumber::ZERO;
    for (i, p) in pts.iter().enumerate() {
        let mut a = *lo;
        let mut b = *hi;
        if i > 0 {
            a = rot.max(a, (pts[i - 1] + *p).half());
        }
        if i + 1 < pts.len() {
            b = rot.min(b, (*p + pts[i + 1]).half());
        }
        if rot.lt(&a, &b) {
            total = total + g(rot, &(b - *p), eps) - g(rot, &(a - *p), eps);
        }
    }
    total
}

pub fn birkhoff_fiber_agreement(
    cps: &PlanarCps,
    w: &WindowSpec,
    t: &OrbitNumber,
    g0: &OrbitNumber,
    eps: &OrbitNumber,
    n: i128,
) -> Result<BirkhoffReport> {
    let rot = cps.omega;
    if rot.sign(eps).is_le() || n <= 0 {
        return Err(Error::Precondition("ε and N must be positive".into()));
    }
    let big = OrbitNumber::rational(n, 1);
    let lo = *g0 - big;
    let hi = *g0 + big;
    let two = *eps + *eps;
    let reach = rot.abs(*g0) + big + two + OrbitNumber::ONE;
    let fib = fiber_enumerate(cps, w, t, &reach)?;
    let ks: Vec<i128> = {
        let mut v: Vec<i128> = fib.hits.iter().map(|p| p.n).collect();
        v.dedup();
        v
    };
    if !ks.is_empty() && !check_ldc(w, t, &ks)?.ldc {
        return Err(Error::Precondition("window fails locally disjoint complements at t".into()));
    }

    let averages: Vec<OrbitNumber> = (0..fib.candidates.len())
        .map(|i| {
            let xs: Vec<OrbitNumber> = fib.candidate_points(&rot, i).into_iter().map(|p| p.x).collect();
            integral(&rot, &xs, &lo, &hi, eps).scale(1, 2 * n)
        })
        .collect();
    let mut max_dev = OrbitNumber::ZERO;
    let mut diffs = 0;
    for i in 0..averages.len() {
        for j in i + 1..averages.len() {
            max_dev = rot.max(max_dev, rot.abs(averages[i] - averages[j]));
            let (a, b) = (&fib.candidates[i], &fib.candidates[j]);
            let d = a.iter().filter(|x| !b.contains(x)).count() + b.iter().filter(|x| !a.contains(x)).count();
            diffs = diffs.max(d);
        }
    }
    let per = |c: i128| eps.scale(c, 2 * n).scale(diffs.max(1) as i128, 1);
    let one_point_bound = per(2);
    let isolated_point_bound = per(3);
    Ok(BirkhoffReport {
        n,
        eps: *eps,
        g0: *g0,
        candidates: averages.len(),
        averages_f64: averages.iter().map(|a| rot.to_f64(a)).collect(),
        averages,
        max_deviation_f64: rot.to_f64(&max_dev),
        within_one_point_bound: rot.le(&max_dev, &one_point_bound),
        within_isolated_point_bound: rot.le(&max_dev, &isolated_point_bound),
        max_deviation: max_dev,
        point_differences: diffs,
        one_point_bound,
        isolated_point_bound,
    })
}
