//! Planar cut-and-project schemes over ℚ(√D): model sets, codings along the
//! orbit of 0, critical shifts, similarity classes and fibres of the torus
//! parametrisation.
//!
//! A lattice point (n, m) has internal coordinate nω + m and external
//! coordinate n·a11 + m·a12. Windows live on the circle; the model set uses
//! their closed lift to [0, 1], so for each n at most the lattice points with
//! nω + m − t ∈ [0, 1] can be selected.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::arith::{OrbitNumber, Rotation};
use crate::error::{Error, Result};
use crate::window::WindowSpec;

/// Largest number of similarity classes whose subsets are enumerated.
pub const CLASS_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanarCps {
    pub omega: Rotation,
    pub a11: OrbitNumber,
    pub a12: OrbitNumber,
}

impl PlanarCps {
    pub fn new(omega: Rotation, a11: OrbitNumber, a12: OrbitNumber) -> Result<Self> {
        if a11.is_zero() || a12.is_zero() {
            return Err(Error::Precondition("external row has a zero entry".into()));
        }
        if omega.div(&a11, &a12).b() == 0 {
            return Err(Error::Precondition("a11/a12 is rational".into()));
        }
        let cps = PlanarCps { omega, a11, a12 };
        if cps.slope().is_zero() {
            return Err(Error::Precondition("lattice matrix is singular".into()));
        }
        Ok(cps)
    }

    /// a11 = 1, a12 = √D.
    pub fn standard(omega: Rotation) -> Self {
        PlanarCps::new(omega, OrbitNumber::ONE, omega.sqrt_d()).expect("1 and √D are independent")
    }

    /// a11 − ω·a12: external displacement per unit of n at fixed star.
    fn slope(&self) -> OrbitNumber {
        self.a11 - self.omega.mul(&self.omega.omega(), &self.a12)
    }

    pub fn external(&self, n: i128, m: i128) -> OrbitNumber {
        self.a11.scale(n, 1) + self.a12.scale(m, 1)
    }

    pub fn star(&self, n: i128, m: i128) -> OrbitNumber {
        OrbitNumber::new(m, n)
    }

    /// Range of n that can reach |external| ≤ r for stars in [t, t+1].
    fn n_range(&self, t: &OrbitNumber, r: &OrbitNumber) -> (i128, i128) {
        let rot = &self.omega;
        let c = rot.to_f64(&self.slope()).abs();
        let a12 = rot.to_f64(&self.a12).abs();
        let tt = rot.to_f64(t).abs();
        let span = (rot.to_f64(r) + a12 * (tt + 2.0)) / c;
        let n = span.ceil() as i128 + 2;
        (-n, n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchPoint {
    pub n: i128,
    pub m: i128,
    #[serde(skip)]
    pub x: OrbitNumber,
    /// Star on ∂W + t.
    #[serde(skip)]
    pub boundary: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointPatch {
    pub radius: OrbitNumber,
    pub t: OrbitNumber,
    pub points: Vec<PatchPoint>,
}

impl PointPatch {
    /// Smallest distance between consecutive points.
    pub fn min_gap(&self, rot: &Rotation) -> Option<OrbitNumber> {
        self.points
            .windows(2)
            .map(|w| w[1].x - w[0].x)
            .min_by(|a, b| rot.cmp(a, b))
    }

    pub fn write_csv<W: std::io::Write>(&self, rot: &Rotation, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["n", "m", "external"])?;
        for p in &self.points {
            wr.write_record([p.n.to_string(), p.m.to_string(), format!("{:.12}", rot.to_f64(&p.x))])?;
        }
        wr.flush()?;
        Ok(())
    }
}

pub(crate) struct Lift {
    /// integers m with y + m in the closed lift of W to [0, 1]
    pub offsets: Vec<i128>,
    pub member: bool,
    pub boundary: bool,
}

pub(crate) fn lift_offsets(w: &WindowSpec, y: &OrbitNumber) -> Option<Lift> {
    let rot = &w.rotation;
    let fl = rot.floor(y);
    let u = *y - OrbitNumber::int(fl);
    if !w.set.contains(&u) {
        return None;
    }
    // the lift is the union of the linear pieces in [0, 1]
    let pieces = w.set.pieces();
    let mut offsets = Vec::with_capacity(2);
    if !u.is_zero() || pieces.first().is_some_and(|p| p.0.is_zero()) {
        offsets.push(-fl);
    }
    if u.is_zero() && pieces.last().is_some_and(|p| p.1 == OrbitNumber::ONE) {
        offsets.push(-fl + 1);
    }
    Some(Lift {
        offsets,
        member: !w.excluded.contains(&u),
        boundary: !w.set.interior_contains(&u),
    })
}

struct Scanned {
    n: i128,
    m: i128,
    x: OrbitNumber,
    member: bool,
    boundary: bool,
}

fn scan(cps: &PlanarCps, w: &WindowSpec, t: &OrbitNumber, r: &OrbitNumber) -> Vec<Scanned> {
    let rot = &cps.omega;
    let (n0, n1) = cps.n_range(t, r);
    let mut out = Vec::new();
    for n in n0..=n1 {
        let Some(lift) = lift_offsets(w, &(OrbitNumber::new(0, n) - *t)) else {
            continue;
        };
        let (member, boundary) = (lift.member, lift.boundary);
        for m in lift.offsets {
            let x = cps.external(n, m);
            if rot.le(&rot.abs(x), r) {
                out.push(Scanned { n, m, x, member, boundary });
            }
        }
    }
    out.sort_by(|a, b| rot.cmp(&a.x, &b.x));
    out
}

/// Λ(W + t) ∩ [−R, R].
pub fn model_set(cps: &PlanarCps, w: &WindowSpec, t: &OrbitNumber, r: &OrbitNumber) -> Result<PointPatch> {
    if w.set.is_empty() {
        return Err(Error::EmptyWindow);
    }
    if cps.omega.sign(r) != Ordering::Greater {
        return Err(Error::Precondition("radius must be positive".into()));
    }
    let points = scan(cps, w, t, r)
        .into_iter()
        .filter(|s| s.member)
        .map(|s| PatchPoint {
            n: s.n,
            m: s.m,
            x: s.x,
            boundary: s.boundary,
        })
        .collect();
    Ok(PointPatch {
        radius: *r,
        t: *t,
        points,
    })
}

/// w_k = 1 iff {kω} ∈ W + t, for k0 ≤ k ≤ k1.
pub fn coding_word(w: &WindowSpec, t: &OrbitNumber, k0: i128, k1: i128) -> Result<Vec<u8>> {
    if k0 > k1 {
        return Err(Error::Precondition(format!("k0 = {k0} > k1 = {k1}")));
    }
    Ok((k0..=k1)
        .map(|k| w.contains(&(OrbitNumber::new(0, k) - *t)) as u8)
        .collect())
}

/// All |k| ≤ K with {kω} ∈ ∂W + t, increasing.
pub fn critical_points(w: &WindowSpec, t: &OrbitNumber, bound: i128) -> Vec<i128> {
    let mut ks: Vec<i128> = w
        .boundary()
        .iter()
        .filter_map(|e| {
            let z = *e + *t;
            (z.is_integral() && z.b().abs() <= bound).then_some(z.b())
        })
        .collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}

/// Whether some orbit point of 0 lands on ∂W + t (exact, no bound needed).
pub fn is_critical(w: &WindowSpec, t: &OrbitNumber) -> bool {
    w.boundary().iter().any(|e| (*e + *t).is_integral())
}

#[derive(Clone, Debug, Serialize)]
pub struct Classes {
    pub classes: Vec<Vec<i128>>,
    /// Common germ radius used for the comparison.
    pub eps: OrbitNumber,
}

fn hit_point(w: &WindowSpec, t: &OrbitNumber, k: i128) -> OrbitNumber {
    w.rotation.frac(&(OrbitNumber::new(0, k) - *t))
}

/// Half the smallest distance from a hit's boundary point to another boundary point.
fn germ_radius(w: &WindowSpec, t: &OrbitNumber, hits: &[i128]) -> Result<OrbitNumber> {
    let rot = &w.rotation;
    let bd = w.boundary();
    let mut best: Option<OrbitNumber> = None;
    for &k in hits {
        let e = hit_point(w, t, k);
        let i = bd.binary_search_by(|b| rot.cmp(b, &e)).map_err(|_| {
            Error::Precondition(format!("k = {k} is not a boundary hit"))
        })?;
        if bd.len() < 2 {
            continue;
        }
        let prev = bd[(i + bd.len() - 1) % bd.len()];
        let next = bd[(i + 1) % bd.len()];
        for o in [prev, next] {
            let d = rot.norm(&(o - e));
            best = Some(match best {
                None => d,
                Some(b) => rot.min(b, d),
            });
        }
    }
    let eps = match best {
        Some(d) => d.half(),
        None => OrbitNumber::rational(1, 4),
    };
    if let Some(res) = &w.resolution {
        if rot.lt(&eps, res) {
            return Err(Error::GermUndecidable {
                radius: rot.to_f64(&eps),
                resolution: rot.to_f64(res),
            });
        }
    }
    Ok(eps)
}

/// Partition of the hits by equality of the local window germs.
pub fn similarity_classes(w: &WindowSpec, t: &OrbitNumber, hits: &[i128]) -> Result<Classes> {
    let eps = germ_radius(w, t, hits)?;
    let mut keys: Vec<(Vec<(OrbitNumber, OrbitNumber)>, bool)> = Vec::new();
    let mut classes: Vec<Vec<i128>> = Vec::new();
    for &k in hits {
        let e = hit_point(w, t, k);
        let key = (w.set.germ(&e, &eps), w.excluded.contains(&e));
        match keys.iter().position(|x| *x == key) {
            Some(i) => classes[i].push(k),
            None => {
                keys.push(key);
                classes.push(vec![k]);
            }
        }
    }
    Ok(Classes { classes, eps })
}

#[derive(Clone, Debug, Serialize)]
pub struct LdcReport {
    pub ldc: bool,
    pub eps: OrbitNumber,
    /// First pair whose complement germs overlap.
    pub witness: Option<(i128, i128)>,
}

/// Pairwise disjointness of the complement germs at the hits.
pub fn check_ldc(w: &WindowSpec, t: &OrbitNumber, hits: &[i128]) -> Result<LdcReport> {
    let rot = &w.rotation;
    let eps = germ_radius(w, t, hits)?;
    let comp = w.set.complement();
    let germs: Vec<Vec<(OrbitNumber, OrbitNumber)>> = hits
        .iter()
        .map(|&k| comp.germ(&hit_point(w, t, k), &eps))
        .collect();
    for i in 0..hits.len() {
        for j in i + 1..hits.len() {
            let overlap = germs[i].iter().any(|a| {
                germs[j]
                    .iter()
                    .any(|b| rot.lt(&rot.max(a.0, b.0), &rot.min(a.1, b.1)))
            });
            if overlap {
                return Ok(LdcReport {
                    ldc: false,
                    eps,
                    witness: Some((hits[i], hits[j])),
                });
            }
        }
    }
    Ok(LdcReport {
        ldc: true,
        eps,
        witness: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateRule {
    /// No boundary hit in range.
    Singleton,
    /// Subsets constant on similarity classes.
    Classes,
    /// Γ+ and Γ+ minus one point.
    LocallyDisjoint,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberReport {
    pub t: OrbitNumber,
    pub critical: bool,
    /// Lattice points with star in int(W + t), always present.
    pub base: Vec<PatchPoint>,
    /// Lattice points in range with star on ∂W + t.
    pub hits: Vec<PatchPoint>,
    pub classes: Vec<Vec<i128>>,
    /// Each candidate lists the indices of the hits it contains.
    pub candidates: Vec<Vec<usize>>,
    pub bound: u64,
    pub rule: CandidateRule,
    /// False when the candidate list may over-approximate the fibre.
    pub exact: bool,
}

impl FiberReport {
    /// Points of candidate i sorted by external coordinate.
    pub fn candidate_points(&self, rot: &Rotation, i: usize) -> Vec<PatchPoint> {
        let mut v = self.base.clone();
        v.extend(self.candidates[i].iter().map(|&h| self.hits[h].clone()));
        v.sort_by(|a, b| rot.cmp(&a.x, &b.x));
        v
    }
}

pub fn fiber_enumerate(cps: &PlanarCps, w: &WindowSpec, t: &OrbitNumber, r: &OrbitNumber) -> Result<FiberReport> {
    if w.set.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let scanned = scan(cps, w, t, r);
    let mut base = Vec::new();
    let mut hits = Vec::new();
    for s in scanned {
        let p = PatchPoint {
            n: s.n,
            m: s.m,
            x: s.x,
            boundary: s.boundary,
        };
        if s.boundary {
            hits.push(p);
        } else {
            base.push(p);
        }
    }
    let critical = is_critical(w, t);
    if hits.is_empty() {
        return Ok(FiberReport {
            t: *t,
            critical,
            base,
            hits,
            classes: Vec::new(),
            candidates: vec![Vec::new()],
            bound: 1,
            rule: CandidateRule::Singleton,
            exact: true,
        });
    }
    let ks: Vec<i128> = {
        let mut v: Vec<i128> = hits.iter().map(|p| p.n).collect();
        v.dedup();
        v
    };
    let cl = similarity_classes(w, t, &ks)?;
    let ldc = check_ldc(w, t, &ks)?;
    let nc = cl.classes.len();
    let bound = if nc >= 64 { u64::MAX } else { 1u64 << nc };
    let class_of = |k: i128| cl.classes.iter().position(|c| c.contains(&k)).unwrap();
    let all: Vec<usize> = (0..hits.len()).collect();
    let (candidates, rule, exact) = if ldc.ldc {
        let mut c = vec![all.clone()];
        for (i, h) in hits.iter().enumerate() {
            if cl.classes[class_of(h.n)].len() == 1 {
                c.push(all.iter().copied().filter(|&j| j != i).collect());
            }
        }
        (c, CandidateRule::LocallyDisjoint, true)
    } else {
        if nc > CLASS_LIMIT {
            return Err(Error::Precondition(format!("{nc} similarity classes exceed the enumeration limit")));
        }
        let mut c = Vec::with_capacity(1 << nc);
        for mask in 0u64..(1u64 << nc) {
            c.push(
                all.iter()
                    .copied()
                    .filter(|&j| mask >> class_of(hits[j].n) & 1 == 1)
                    .collect(),
            );
        }
        (c, CandidateRule::Classes, nc == 1)
    };
    Ok(FiberReport {
        t: *t,
        critical,
        base,
        hits,
        classes: cl.classes,
        candidates,
        bound,
        rule,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::IntervalSet;

    fn silver() -> Rotation {
        Rotation::silver()
    }

    fn iv(lo: OrbitNumber, hi: OrbitNumber, open_hi: bool) -> WindowSpec {
        WindowSpec::interval(silver(), lo, hi, false, open_hi).unwrap()
    }

    #[test]
    fn sturmian_coding() {
        let w = iv(OrbitNumber::ZERO, silver().omega(), true);
        assert_eq!(coding_word(&w, &OrbitNumber::ZERO, 0, 4).unwrap(), vec![1, 0, 0, 1, 0]);
        let full = WindowSpec::custom(IntervalSet::full(silver()));
        assert!(coding_word(&full, &OrbitNumber::ZERO, -5, 5).unwrap().iter().all(|&b| b == 1));
        let empty = WindowSpec::custom(IntervalSet::empty(silver()));
        assert!(coding_word(&empty, &OrbitNumber::ZERO, -5, 5).unwrap().iter().all(|&b| b == 0));
    }

    #[test]
    fn model_set_matches_double_loop() {
        let rot = silver();
        let cps = PlanarCps::standard(rot);
        let w = iv(OrbitNumber::ZERO, rot.omega(), false);
        let r = OrbitNumber::int(100);
        let patch = model_set(&cps, &w, &OrbitNumber::ZERO, &r).unwrap();
        let s2 = 2f64.sqrt();
        let om = s2 - 1.0;
        let mut brute = Vec::new();
        for n in -1000i64..=1000 {
            for m in -1000i64..=1000 {
                let x = n as f64 + m as f64 * s2;
                let y = n as f64 * om + m as f64;
                if x.abs() <= 100.0 && (-1e-12..=om + 1e-12).contains(&y) {
                    brute.push((n as i128, m as i128));
                }
            }
        }
        brute.sort();
        let mut got: Vec<(i128, i128)> = patch.points.iter().map(|p| (p.n, p.m)).collect();
        got.sort();
        assert_eq!(got, brute);
        assert!(got.contains(&(0, 0)));
        assert!(rot.sign(&patch.min_gap(&rot).unwrap()) == Ordering::Greater);
    }

    #[test]
    fn interval_critical_points_and_classes() {
        let rot = silver();
        let w = iv(OrbitNumber::ZERO, rot.omega(), false);
        let hits = critical_points(&w, &OrbitNumber::ZERO, 100);
        assert_eq!(hits, vec![0, 1]);
        let cl = similarity_classes(&w, &OrbitNumber::ZERO, &hits).unwrap();
        assert_eq!(cl.classes.len(), 2);
        let one = similarity_classes(&w, &OrbitNumber::ZERO, &[0]).unwrap();
        assert_eq!(one.classes.len(), 1);
        assert!(check_ldc(&w, &OrbitNumber::ZERO, &[0]).unwrap().ldc);
    }

    #[test]
    fn generic_shift_has_singleton_fibre() {
        let rot = silver();
        let cps = PlanarCps::standard(rot);
        let w = iv(OrbitNumber::ZERO, rot.omega(), false);
        let t = OrbitNumber::rational(1, 3);
        assert!(critical_points(&w, &t, 10_000).is_empty());
        let f = fiber_enumerate(&cps, &w, &t, &OrbitNumber::int(50)).unwrap();
        assert!(!f.critical);
        assert_eq!(f.candidates.len(), 1);
    }

    #[test]
    fn coding_is_shift_equivariant() {
        let rot = silver();
        let w = iv(OrbitNumber::rational(1, 5), OrbitNumber::new(0, 1), false);
        let t = OrbitNumber::rational(1, 7);
        let base = coding_word(&w, &t, -60, 60).unwrap();
        for k in [-7i128, 3, 11] {
            let tk = t + rot.orbit_point(k);
            let shifted = coding_word(&w, &tk, -60 + k, 60 + k).unwrap();
            assert_eq!(shifted, base);
        }
    }

    #[test]
    fn rejects_degenerate_cps() {
        let rot = silver();
        assert!(PlanarCps::new(rot, OrbitNumber::ONE, OrbitNumber::int(2)).is_err());
        // a11 = ω·a12 makes the star map non-injective
        assert!(PlanarCps::new(rot, rot.omega(), OrbitNumber::ONE).is_err());
    }
}
