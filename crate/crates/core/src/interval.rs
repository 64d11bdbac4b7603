//! Finite unions of closed circle intervals with exact endpoints.
//!
//! Components are kept as linear pieces of [0, 1], split at 0; a wrapping
//! interval is the pair [x, 1] ∪ [0, y]. The algebra is that of
//! regular-closed sets: intersection is the closure of the interiors' meet,
//! complement is the closure of the set-theoretic complement, and degenerate
//! point components never survive.

use std::cmp::Ordering;

use crate::arith::{OrbitNumber, Rotation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalSet {
    rot: Rotation,
    comps: Vec<(OrbitNumber, OrbitNumber)>,
}

type Piece = (OrbitNumber, OrbitNumber);

impl IntervalSet {
    pub fn empty(rot: Rotation) -> Self {
        IntervalSet { rot, comps: Vec::new() }
    }

    pub fn full(rot: Rotation) -> Self {
        IntervalSet {
            rot,
            comps: vec![(OrbitNumber::ZERO, OrbitNumber::ONE)],
        }
    }

    /// Arc starting at `lo` (any real) of length `len`, wrapped onto the circle.
    pub fn arc(rot: Rotation, lo: OrbitNumber, len: OrbitNumber) -> Self {
        let mut pieces = Vec::new();
        push_arc(&rot, lo, len, &mut pieces);
        Self::from_pieces(rot, pieces)
    }

    /// Canonical form of arbitrary linear pieces inside [0, 1].
    pub fn from_pieces(rot: Rotation, mut pieces: Vec<Piece>) -> Self {
        pieces.retain(|(l, h)| rot.lt(l, h));
        pieces.sort_by(|x, y| rot.cmp(&x.0, &y.0));
        let mut comps: Vec<Piece> = Vec::with_capacity(pieces.len());
        for (l, h) in pieces {
            if let Some(last) = comps.last_mut() {
                if rot.le(&l, &last.1) {
                    if rot.lt(&last.1, &h) {
                        last.1 = h;
                    }
                    continue;
                }
            }
            comps.push((l, h));
        }
        IntervalSet { rot, comps }
    }

    pub fn rotation(&self) -> Rotation {
        self.rot
    }

    /// Linear components in [0, 1], sorted.
    pub fn pieces(&self) -> &[Piece] {
        &self.comps
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.comps.len() == 1 && self.comps[0].0.is_zero() && self.comps[0].1 == OrbitNumber::ONE
    }

    fn wraps(&self) -> bool {
        !self.is_full()
            && self.comps.first().is_some_and(|c| c.0.is_zero())
            && self.comps.last().is_some_and(|c| c.1 == OrbitNumber::ONE)
    }

    /// Circle components with a wrapping piece re-joined as (lo, hi) where hi may exceed 1.
    pub fn components(&self) -> Vec<Piece> {
        if !self.wraps() {
            return self.comps.clone();
        }
        let n = self.comps.len();
        let first = self.comps[0];
        let last = self.comps[n - 1];
        let mut out: Vec<Piece> = self.comps[1..n - 1].to_vec();
        out.push((last.0, first.1 + OrbitNumber::ONE));
        out
    }

    pub fn measure(&self) -> OrbitNumber {
        self.comps.iter().fold(OrbitNumber::ZERO, |acc, (l, h)| acc + (*h - *l))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut v = self.comps.clone();
        v.extend_from_slice(&other.comps);
        Self::from_pieces(self.rot, v)
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let rot = &self.rot;
        let (a, b) = (&self.comps, &other.comps);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = rot.max(a[i].0, b[j].0);
            let hi = rot.min(a[i].1, b[j].1);
            if rot.lt(&lo, &hi) {
                out.push((lo, hi));
            }
            if rot.lt(&a[i].1, &b[j].1) {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet { rot: self.rot, comps: out }
    }

    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::new();
        let mut cur = OrbitNumber::ZERO;
        for (l, h) in &self.comps {
            if self.rot.lt(&cur, l) {
                out.push((cur, *l));
            }
            cur = *h;
        }
        if self.rot.lt(&cur, &OrbitNumber::ONE) {
            out.push((cur, OrbitNumber::ONE));
        }
        IntervalSet { rot: self.rot, comps: out }
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.intersect(&other.complement())
    }

    pub fn translate(&self, t: &OrbitNumber) -> IntervalSet {
        if self.is_full() || self.is_empty() {
            return self.clone();
        }
        let mut pieces = Vec::with_capacity(self.comps.len() + 1);
        for (l, h) in &self.comps {
            push_arc(&self.rot, *l + *t, *h - *l, &mut pieces);
        }
        Self::from_pieces(self.rot, pieces)
    }

    /// Closed δ-neighbourhood B_δ(A).
    pub fn thicken(&self, delta: &OrbitNumber) -> IntervalSet {
        assert!(self.rot.sign(delta) != Ordering::Less, "negative thickening");
        if self.is_empty() || self.is_full() {
            return self.clone();
        }
        let mut pieces = Vec::with_capacity(self.comps.len() + 1);
        for (l, h) in self.components() {
            let len = (h - l) + *delta + *delta;
            if self.rot.le(&OrbitNumber::ONE, &len) {
                return IntervalSet::full(self.rot);
            }
            push_arc(&self.rot, l - *delta, len, &mut pieces);
        }
        Self::from_pieces(self.rot, pieces)
    }

    // index of the piece with the largest lo ≤ x
    fn locate(&self, x: &OrbitNumber) -> Option<usize> {
        let k = self.comps.partition_point(|(l, _)| self.rot.le(l, x));
        k.checked_sub(1)
    }

    /// Closed membership.
    pub fn contains(&self, x: &OrbitNumber) -> bool {
        let x = self.rot.frac(x);
        if x.is_zero() && self.comps.last().is_some_and(|c| c.1 == OrbitNumber::ONE) {
            return true;
        }
        self.locate(&x).is_some_and(|i| self.rot.le(&x, &self.comps[i].1))
    }

    /// Membership in the interior.
    pub fn interior_contains(&self, x: &OrbitNumber) -> bool {
        if self.is_full() {
            return true;
        }
        let x = self.rot.frac(x);
        match self.locate(&x) {
            None => false,
            Some(i) => {
                let (l, h) = self.comps[i];
                if !self.rot.lt(&x, &h) {
                    return false;
                }
                if self.rot.lt(&l, &x) {
                    return true;
                }
                // x == l: interior only at a wrap through 0
                x.is_zero() && self.wraps()
            }
        }
    }

    /// Whether the closed arc [lo, lo+len] lies in the interior.
    pub fn interior_contains_arc(&self, lo: &OrbitNumber, len: &OrbitNumber) -> bool {
        if self.is_full() {
            return true;
        }
        let rot = &self.rot;
        if !rot.lt(len, &OrbitNumber::ONE) || !self.interior_contains(lo) {
            return false;
        }
        let x = rot.frac(lo);
        let Some(i) = self.locate(&x) else {
            return false;
        };
        let mut end = self.comps[i].1;
        if end == OrbitNumber::ONE && self.wraps() {
            end = self.comps[0].1 + OrbitNumber::ONE;
        }
        rot.lt(&(x + *len), &end)
    }

    /// Whether the open arc (lo, lo+len) meets the interior.
    pub fn overlaps_arc(&self, lo: &OrbitNumber, len: &OrbitNumber) -> bool {
        let mut parts = Vec::with_capacity(2);
        push_arc(&self.rot, *lo, *len, &mut parts);
        parts.iter().any(|(a, b)| {
            let k = self.comps.partition_point(|(_, h)| self.rot.le(h, a));
            k < self.comps.len() && self.rot.lt(&self.comps[k].0, b)
        })
    }

    /// Topological boundary points, in [0, 1).
    pub fn boundary(&self) -> Vec<OrbitNumber> {
        if self.is_full() {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(2 * self.comps.len());
        for (l, h) in self.components() {
            out.push(self.rot.frac(&l));
            out.push(self.rot.frac(&h));
        }
        out.sort_by(|x, y| self.rot.cmp(x, y));
        out
    }

    /// Local germ (B_ε(p) ∩ A) − p as sorted relative pieces inside [−ε, ε].
    pub fn germ(&self, p: &OrbitNumber, eps: &OrbitNumber) -> Vec<Piece> {
        let rot = self.rot;
        if self.is_full() {
            return vec![(-*eps, *eps)];
        }
        let x = rot.frac(p);
        let (lo, hi) = (x - *eps, x + *eps);
        let mut out: Vec<Piece> = Vec::new();
        for shift in [-OrbitNumber::ONE, OrbitNumber::ZERO, OrbitNumber::ONE] {
            // pieces (l, h) + shift meeting (lo, hi); pieces are sorted and disjoint
            let start = self.comps.partition_point(|(_, h)| rot.le(&(*h + shift), &lo));
            for (l, h) in &self.comps[start..] {
                let (l, h) = (*l + shift, *h + shift);
                if !rot.lt(&l, &hi) {
                    break;
                }
                let (a, b) = (rot.max(l, lo), rot.min(h, hi));
                if rot.lt(&a, &b) {
                    out.push((a - x, b - x));
                }
            }
        }
        out.sort_by(|x, y| rot.cmp(&x.0, &y.0));
        // re-join across 0
        let mut merged: Vec<Piece> = Vec::with_capacity(out.len());
        for (l, h) in out {
            if let Some(last) = merged.last_mut() {
                if last.1 == l {
                    last.1 = h;
                    continue;
                }
            }
            merged.push((l, h));
        }
        merged
    }

    /// Exact circle distance between two points.
    pub fn circle_distance(rot: &Rotation, x: &OrbitNumber, y: &OrbitNumber) -> OrbitNumber {
        rot.norm(&(*x - *y))
    }
}

fn push_arc(rot: &Rotation, lo: OrbitNumber, len: OrbitNumber, out: &mut Vec<Piece>) {
    if rot.sign(&len) != Ordering::Greater {
        return;
    }
    if rot.le(&OrbitNumber::ONE, &len) {
        out.push((OrbitNumber::ZERO, OrbitNumber::ONE));
        return;
    }
    let l = rot.frac(&lo);
    let h = l + len;
    if rot.le(&h, &OrbitNumber::ONE) {
        out.push((l, h));
    } else {
        out.push((l, OrbitNumber::ONE));
        out.push((OrbitNumber::ZERO, h - OrbitNumber::ONE));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i128, m: i128) -> OrbitNumber {
        OrbitNumber::rational(n, m)
    }

    #[test]
    fn examples() {
        let w = Rotation::silver();
        assert!(IntervalSet::full(w).complement().is_empty());
        let om = w.omega();
        let a = IntervalSet::arc(w, OrbitNumber::ZERO, om);
        let b = a.translate(&om);
        assert_eq!(b.pieces(), &[(om, OrbitNumber::new(0, 2))]);
        assert_eq!(b.measure(), om);
        let x = IntervalSet::arc(w, OrbitNumber::ZERO, r(1, 4));
        let y = IntervalSet::arc(w, r(1, 8), r(3, 8));
        let z = x.intersect(&y);
        assert_eq!(z.pieces(), &[(r(1, 8), r(1, 4))]);
        assert_eq!(z.measure(), r(1, 8));
    }

    #[test]
    fn wrap_interior_and_boundary() {
        let w = Rotation::silver();
        let a = IntervalSet::arc(w, r(-1, 10), r(2, 10));
        assert_eq!(a.pieces().len(), 2);
        assert!(a.interior_contains(&OrbitNumber::ZERO));
        assert_eq!(a.boundary(), vec![r(1, 10), r(9, 10)]);
        assert_eq!(a.components(), vec![(r(9, 10), r(11, 10))]);
        let g = a.germ(&r(1, 10), &r(1, 100));
        assert_eq!(g, vec![(r(-1, 100), OrbitNumber::ZERO)]);
        let g0 = a.germ(&OrbitNumber::ZERO, &r(1, 100));
        assert_eq!(g0, vec![(r(-1, 100), r(1, 100))]);
    }

    #[test]
    fn thicken_caps_at_full() {
        let w = Rotation::silver();
        let a = IntervalSet::arc(w, OrbitNumber::ZERO, r(1, 4));
        assert_eq!(a.thicken(&r(1, 8)).measure(), r(1, 2));
        assert!(a.thicken(&r(1, 2)).is_full());
    }

    fn arb_set() -> impl Strategy<Value = IntervalSet> {
        prop::collection::vec((-50i128..50, -50i128..50, 1i128..40, 0i128..30), 0..6).prop_map(|v| {
            let w = Rotation::silver();
            let mut pieces = Vec::new();
            for (a, b, la, lb) in v {
                let lo = OrbitNumber::new(a, b);
                let len = OrbitNumber::ratio(la, lb, 200);
                if w.sign(&len) == Ordering::Greater {
                    push_arc(&w, lo, len, &mut pieces);
                }
            }
            IntervalSet::from_pieces(w, pieces)
        })
    }

    proptest! {
        #[test]
        fn measure_inclusion_exclusion(a in arb_set(), b in arb_set()) {
            prop_assert_eq!(a.union(&b).measure() + a.intersect(&b).measure(), a.measure() + b.measure());
        }

        #[test]
        fn complement_involution(a in arb_set()) {
            prop_assert_eq!(a.complement().complement(), a.clone());
            prop_assert_eq!(a.measure() + a.complement().measure(), OrbitNumber::ONE);
        }

        #[test]
        fn translate_roundtrip(a in arb_set(), x in -100i128..100, y in -100i128..100) {
            let t = OrbitNumber::new(x, y);
            let b = a.translate(&t);
            prop_assert_eq!(b.measure(), a.measure());
            prop_assert_eq!(b.translate(&-t), a);
        }

        #[test]
        fn germ_matches_translate_oracle(a in arb_set(), x in -30i128..30, y in -30i128..30, e in 1i128..60) {
            let w = Rotation::silver();
            let p = OrbitNumber::new(x, y);
            let eps = OrbitNumber::rational(e, 200);
            // oracle: shift p to 1/2, cut the ball there, shift back
            let half = OrbitNumber::rational(1, 2);
            let moved = a.translate(&(half - p));
            let ball = IntervalSet::arc(w, half - eps, eps + eps);
            let expected: Vec<Piece> = moved
                .intersect(&ball)
                .pieces()
                .iter()
                .map(|(l, h)| (*l - half, *h - half))
                .collect();
            prop_assert_eq!(a.germ(&p, &eps), expected);
        }

        #[test]
        fn arc_queries_match_intersection_oracle(a in arb_set(), x in -30i128..30, y in -30i128..30, e in 1i128..400) {
            let w = Rotation::silver();
            let lo = OrbitNumber::new(x, y);
            let len = OrbitNumber::rational(e, 400);
            let arc = IntervalSet::arc(w, lo, len);
            let meet = a.intersect(&arc).measure();
            prop_assert_eq!(a.overlaps_arc(&lo, &len), !meet.is_zero());
            let inside = a.interior_contains_arc(&lo, &len);
            // inside ⇒ full overlap; full overlap with both endpoints interior ⇒ inside
            let full = meet == len;
            let ends = a.interior_contains(&lo) && a.interior_contains(&(lo + len));
            prop_assert_eq!(inside, full && ends);
        }
    }
}
