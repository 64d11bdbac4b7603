//! Pseudolines of a cut-and-project scheme (ℝ², ℝ, A·ℤ³).
//!
//! Columns v_1, v_2, v_3 of the external rows and internal row (ω_1, ω_2, 1),
//! with ω_1 the base rotation. The lattice point (n, m, k) ↦ n·v_1 + m·v_2 +
//! k·v_3 has star nω_1 + mω_2 + k, and the pseudoline
//!
//! G(m) = { n·v_1 + k·v_3 + m·v_2 : nω_1 + k ∈ W + t − mω_2 }
//!
//! is a translate by m·v_2 of the planar model set for A_1 = [[a11, a13],
//! [ω_1, 1]] with window W + t − mω_2.
//!
//! Tube. Put dir = v_1/ω_1 − v_3 and s = nω_1 + k + mω_2 − t ∈ W ⊆ [0, 1].
//! Then
//!
//! p = nω_1·dir + m·(v_2 − ω_2·v_3) + (t + s)·v_3,
//!
//! so G(m) lies within C = ½·diam(W)·|v_3 ∧ dir|/|dir| of the axis
//! ℓ(m) = m·(v_2 − ω_2·v_3) + (t + c)·v_3 + ℝ·dir, with c the centre of the
//! hull of W. Consecutive axes are h = |(v_2 − ω_2·v_3) ∧ dir|/|dir| apart,
//! so at most 2(M + C)/h + 1 pseudolines meet B_M, which is ≤ κ·2M for
//! M ≥ 1 with κ = (1 + C)/h + ½.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{OrbitNumber, Rotation};
use crate::complexity::ComplexityTable;
use crate::cps::{lift_offsets, PatchPoint, PlanarCps, PointPatch};
use crate::error::{Error, Result};
use crate::window::WindowSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cps3 {
    /// ω_1, the first internal entry
    pub omega: Rotation,
    /// ω_2, the second internal entry
    pub omega2: OrbitNumber,
    /// the two external rows (a_{j1}, a_{j2}, a_{j3})
    pub external: [[OrbitNumber; 3]; 2],
}

fn irrational_ratio(rot: &Rotation, x: &OrbitNumber, y: &OrbitNumber) -> bool {
    !x.is_zero() && !y.is_zero() && rot.div(x, y).b() != 0
}

// x = (a + bω)/d as rational coordinates over (1, √D): numerators and a
// common denominator
fn coords(rot: &Rotation, x: &OrbitNumber) -> (i128, i128, i128) {
    let s = rot.spec();
    let (p, q, r) = (s.p as i128, s.q as i128, s.r as i128);
    (x.a() * r + x.b() * p, x.b() * q, r * x.den())
}

fn det3(m: [[i128; 3]; 3]) -> i128 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

impl Cps3 {
    pub fn new(omega: Rotation, omega2: OrbitNumber, external: [[OrbitNumber; 3]; 2]) -> Result<Self> {
        let cps = Cps3 { omega, omega2, external };
        let rows = [external[0], external[1], [omega.omega(), omega2, OrbitNumber::ONE]];
        for (j, row) in rows.iter().enumerate() {
            for a in 0..3 {
                for b in a + 1..3 {
                    if !irrational_ratio(&omega, &row[a], &row[b]) {
                        return Err(Error::Precondition(format!(
                            "row {}: entries {} and {} are rationally dependent",
                            j + 1,
                            a + 1,
                            b + 1
                        )));
                    }
                }
            }
        }
        if cps.det().is_zero() {
            return Err(Error::Precondition("lattice matrix is singular".into()));
        }
        if (external[0][0] - omega.mul(&omega.omega(), &external[0][2])).is_zero() {
            return Err(Error::Precondition("the pseudoline scheme (a11, a13; ω, 1) is singular".into()));
        }
        if !cps.external_injective() {
            return Err(Error::Precondition("external projection is not injective on the lattice".into()));
        }
        Ok(cps)
    }

    /// Rows (1, √D, 2 + √D), (√D, 1, 2 − √D), (ω, (1 + √D)/3, 1).
    pub fn example(omega: Rotation) -> Result<Self> {
        let sd = omega.sqrt_d();
        let one = OrbitNumber::ONE;
        let two = OrbitNumber::int(2);
        Cps3::new(
            omega,
            (one + sd).scale(1, 3),
            [[one, sd, two + sd], [sd, one, two - sd]],
        )
    }

    pub fn det(&self) -> OrbitNumber {
        let rot = &self.omega;
        let a = [self.external[0], self.external[1], [rot.omega(), self.omega2, OrbitNumber::ONE]];
        let minor = |i: usize, j: usize, k: usize, l: usize| rot.mul(&a[1][i], &a[2][j]) - rot.mul(&a[1][k], &a[2][l]);
        rot.mul(&a[0][0], &minor(1, 2, 2, 1)) - rot.mul(&a[0][1], &minor(0, 2, 2, 0))
            + rot.mul(&a[0][2], &minor(0, 1, 1, 0))
    }

    // no nonzero integer vector has zero external image: the four rational
    // functionals (two per external row) have rank 3
    fn external_injective(&self) -> bool {
        let mut rows = [[0i128; 3]; 4];
        for j in 0..2 {
            let c: Vec<_> = self.external[j].iter().map(|x| coords(&self.omega, x)).collect();
            let scale: i128 = c.iter().map(|x| x.2).product();
            for i in 0..3 {
                rows[2 * j][i] = c[i].0 * (scale / c[i].2);
                rows[2 * j + 1][i] = c[i].1 * (scale / c[i].2);
            }
        }
        (0..4).any(|skip| {
            let mut m = [[0; 3]; 3];
            for (r, row) in (0..4).filter(|&r| r != skip).enumerate() {
                m[r] = rows[row];
            }
            det3(m) != 0
        })
    }

    /// (ℝ, ℝ, L_1) with external row (a11, a13): the scheme of one pseudoline.
    pub fn planar(&self) -> PlanarCps {
        PlanarCps::new(self.omega, self.external[0][0], self.external[0][2])
            .expect("checked in Cps3::new")
    }

    /// External image of the lattice point (n, m, k).
    pub fn external_point(&self, n: i128, m: i128, k: i128) -> [OrbitNumber; 2] {
        let e = &self.external;
        [0, 1].map(|j| e[j][0].scale(n, 1) + e[j][1].scale(m, 1) + e[j][2].scale(k, 1))
    }

    pub fn star(&self, n: i128, m: i128, k: i128) -> OrbitNumber {
        OrbitNumber::new(k, n) + self.omega2.scale(m, 1)
    }

    fn column(&self, i: usize) -> [f64; 2] {
        [0, 1].map(|j| self.omega.to_f64(&self.external[j][i]))
    }

    /// Tube radius, axis spacing and line-count constant for windows with
    /// hull [lo, hi] ⊆ [0, 1].
    pub fn tube(&self, w: &WindowSpec) -> Tube {
        let rot = &self.omega;
        let (lo, hi) = hull(w);
        let w1 = rot.omega_f64();
        let w2 = rot.to_f64(&self.omega2);
        let (v1, v2, v3) = (self.column(0), self.column(1), self.column(2));
        let dir = [v1[0] / w1 - v3[0], v1[1] / w1 - v3[1]];
        let len = dir[0].hypot(dir[1]);
        let unit = [dir[0] / len, dir[1] / len];
        let normal = [-unit[1], unit[0]];
        let u2 = [v2[0] - w2 * v3[0], v2[1] - w2 * v3[1]];
        let dot = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
        let radius = 0.5 * (hi - lo) * dot(v3, normal).abs();
        let spacing = dot(u2, normal).abs();
        Tube {
            radius,
            spacing,
            kappa: (1.0 + radius) / spacing + 0.5,
            centre: 0.5 * (lo + hi),
            dir,
            normal,
            u2,
            v3,
        }
    }
}

fn hull(w: &WindowSpec) -> (f64, f64) {
    let rot = &w.rotation;
    let p = w.set.pieces();
    match (p.first(), p.last()) {
        (Some(a), Some(b)) => (rot.to_f64(&a.0), rot.to_f64(&b.1)),
        _ => (0.0, 0.0),
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Tube {
    /// C: every point of G(m) is within C of ℓ(m)
    pub radius: f64,
    /// h: distance between consecutive axes
    pub spacing: f64,
    /// κ: at most κ·2M pseudolines meet B_M for M ≥ 1
    pub kappa: f64,
    /// centre of the hull of W
    pub centre: f64,
    pub dir: [f64; 2],
    pub normal: [f64; 2],
    pub u2: [f64; 2],
    pub v3: [f64; 2],
}

impl Tube {
    /// Signed distance from 0 to ℓ(m), measured along the unit normal.
    pub fn axis_offset(&self, m: i128, t: f64) -> f64 {
        let dot = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
        m as f64 * dot(self.u2, self.normal) + (t + self.centre) * dot(self.v3, self.normal)
    }

    /// Distance from x to ℓ(m).
    pub fn distance(&self, m: i128, t: f64, x: [f64; 2]) -> f64 {
        (x[0] * self.normal[0] + x[1] * self.normal[1] - self.axis_offset(m, t)).abs()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinePoint {
    pub n: i128,
    pub k: i128,
    pub m: i128,
    #[serde(skip)]
    pub x: [OrbitNumber; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct Pseudoline {
    pub m: i128,
    /// t − mω_2: the window shift of the planar model set behind G(m)
    pub shift: OrbitNumber,
    /// ordered by first coordinate
    pub points: Vec<LinePoint>,
}

fn in_ball(rot: &Rotation, x: &[OrbitNumber; 2], r2: &OrbitNumber) -> bool {
    rot.le(&(rot.mul(&x[0], &x[0]) + rot.mul(&x[1], &x[1])), r2)
}

/// The nonempty pseudolines of Λ(W + t) ∩ B_M, ordered by m.
pub fn decompose(cps: &Cps3, w: &WindowSpec, t: &OrbitNumber, radius: &OrbitNumber) -> Result<Vec<Pseudoline>> {
    let rot = cps.omega;
    if rot.sign(radius).is_le() {
        return Err(Error::Precondition("radius must be positive".into()));
    }
    if w.rotation != rot {
        return Err(Error::Precondition("window and scheme use different rotations".into()));
    }
    if w.set.is_empty() {
        return Ok(Vec::new());
    }
    let tube = cps.tube(w);
    let r = rot.to_f64(radius);
    let tf = rot.to_f64(t);
    let r2 = rot.mul(radius, radius);

    // axes within M + C of the origin, with slack for rounding
    let reach = r + tube.radius + 1.0;
    let m0 = tube.axis_offset(0, tf);
    let step = tube.axis_offset(1, tf) - m0;
    let (a, b) = ((-reach - m0) / step, (reach - m0) / step);
    let (m_lo, m_hi) = (a.min(b).floor() as i128 - 1, a.max(b).ceil() as i128 + 1);

    let w1 = rot.omega_f64();
    let len = tube.dir[0].hypot(tube.dir[1]);
    let unit = [tube.dir[0] / len, tube.dir[1] / len];
    let along = |v: [f64; 2]| v[0] * unit[0] + v[1] * unit[1];
    let speed = (w1 * len).abs();

    let lines: Vec<Pseudoline> = (m_lo..=m_hi)
        .into_par_iter()
        .map(|m| {
            let shift = *t - cps.omega2.scale(m, 1);
            let centre = -(m as f64 * along(tube.u2) + (tf + 0.5) * along(tube.v3)) / w1 / len;
            let half = (r + along(tube.v3).abs()) / speed + 2.0;
            let (n_lo, n_hi) = ((centre - half).floor() as i128, (centre + half).ceil() as i128);
            let mut points = Vec::new();
            for n in n_lo..=n_hi {
                let Some(lift) = lift_offsets(w, &(OrbitNumber::new(0, n) - shift)) else {
                    continue;
                };
                if !lift.member {
                    continue;
                }
                for k in lift.offsets {
                    let x = cps.external_point(n, m, k);
                    if in_ball(&rot, &x, &r2) {
                        points.push(LinePoint { n, k, m, x });
                    }
                }
            }
            points.sort_by(|p, q| rot.cmp(&p.x[0], &q.x[0]));
            Pseudoline { m, shift, points }
        })
        .filter(|l| !l.points.is_empty())
        .collect();
    Ok(lines)
}

/// π_1 of a pseudoline as a planar patch of (ℝ, ℝ, L_1): lattice indices
/// (n, k), external coordinates including the m·a12 offset, window shift
/// t − mω_2.
pub fn project_line(pl: &Pseudoline, cps: &Cps3, radius: &OrbitNumber) -> PointPatch {
    let rot = cps.omega;
    let points: Vec<PatchPoint> = pl
        .points
        .iter()
        .map(|p| PatchPoint {
            n: p.n,
            m: p.k,
            x: p.x[0],
            boundary: false,
        })
        .collect();
    // π_1 is injective on G(m) since a11/a13 is irrational
    debug_assert!(points.windows(2).all(|w| rot.lt(&w[0].x, &w[1].x)));
    PointPatch {
        radius: *radius,
        t: pl.shift,
        points,
    }
}

pub fn write_csv<W: std::io::Write>(lines: &[Pseudoline], rot: &Rotation, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["m", "n", "k", "x1", "x2"])?;
    for l in lines {
        for p in &l.points {
            wr.write_record([
                p.m.to_string(),
                p.n.to_string(),
                p.k.to_string(),
                format!("{:.12}", rot.to_f64(&p.x[0])),
                format!("{:.12}", rot.to_f64(&p.x[1])),
            ])?;
        }
    }
    wr.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct SpanningBound {
    pub radius: f64,
    pub eps: f64,
    pub kappa: f64,
    /// κ·2(M + 1/ε): pseudolines meeting the enlarged ball
    pub lines: f64,
    /// planar word length used for P_1
    pub word_length: usize,
    /// true when the table was too short and its last entry was used
    pub clamped: bool,
    pub p1: u64,
    /// κ·2(M + 1/ε)·ln P_1
    pub log_bound: f64,
    /// log_bound / (πM²)
    pub exponent: f64,
}

/// Planar word length matching a pseudoline's passage through B_{M+1/ε}:
/// consecutive n advance ω_1·|dir| along the line.
pub fn rows_needed(cps: &Cps3, w: &WindowSpec, eps: f64, radius: f64) -> usize {
    let tube = cps.tube(w);
    let speed = (cps.omega.omega_f64() * tube.dir[0].hypot(tube.dir[1])).abs();
    ((2.0 * (radius + 1.0 / eps) / speed).ceil() as usize).max(1)
}

/// log of P_1(ε, M)^{κ·2(M + 1/ε)}, the spanning-set bound assembled from
/// one planar spanning set per pseudoline, and its exponent per unit area.
///
/// P_1(ε, M) is read off the planar word complexity at the number of
/// lattice rows a pseudoline crosses inside B_{M+1/ε}.
pub fn fiber_spanning_bound(
    cps: &Cps3,
    w: &WindowSpec,
    eps: f64,
    radius: f64,
    planar: &ComplexityTable,
) -> Result<SpanningBound> {
    if !(eps > 0.0 && radius > 0.0) {
        return Err(Error::Precondition("ε and M must be positive".into()));
    }
    if planar.p.is_empty() {
        return Err(Error::Precondition("empty complexity table".into()));
    }
    let tube = cps.tube(w);
    let reach = radius + 1.0 / eps;
    let want = rows_needed(cps, w, eps, radius);
    let clamped = want > planar.p.len();
    let word_length = want.min(planar.p.len());
    let p1 = planar.p[word_length - 1];
    let lines = tube.kappa * 2.0 * reach;
    let log_bound = lines * (p1 as f64).ln();
    Ok(SpanningBound {
        radius,
        eps,
        kappa: tube.kappa,
        lines,
        word_length,
        clamped,
        p1,
        log_bound,
        exponent: log_bound / (std::f64::consts::PI * radius * radius),
    })
}
