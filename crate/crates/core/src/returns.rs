//! Closest return times, return intervals I_n and the partitions 𝒫_n.
//!
//! 𝒫_n consists of the tiles R^j(I_n), 1 ≤ j ≤ q_{n+1}, and R^j(I_{n+1}),
//! 1 ≤ j ≤ q_n. Passing from level n to n+1, tiles over I_{n+1} survive
//! unchanged and each tile over I_n splits into one tile over I_{n+2} and
//! a_{n+2} tiles over I_{n+1}, where q_{n+2} = q_n + a_{n+2}·q_{n+1}.

use std::cmp::Ordering;

use crate::arith::{OrbitNumber, Rotation};
use crate::error::{Error, Result};
use crate::interval::IntervalSet;

/// Largest return time accepted by default (f64-exact integers).
pub const DEFAULT_BUDGET: i128 = 1 << 53;

/// Largest partition materialized in one go.
pub const TILE_BUDGET: u64 = 1 << 24;

#[derive(Clone, Debug)]
pub struct ReturnData {
    rot: Rotation,
    q: Vec<i128>,
    lens: Vec<OrbitNumber>,
    right: Vec<bool>,
}

/// A tile R^j(I_base) of the partition 𝒫_level; base ∈ {level, level+1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tile {
    pub level: usize,
    pub base: usize,
    pub j: i128,
}

impl ReturnData {
    /// Return data for n = 0..=n_max (q_0 = 1, I_0 = [0, ω]).
    pub fn new(rot: Rotation, n_max: usize) -> Result<Self> {
        Self::with_budget(rot, n_max, DEFAULT_BUDGET)
    }

    /// All levels whose return time fits the default budget.
    pub fn deepest(rot: Rotation) -> Self {
        let mut n = 8;
        let mut best = Self::new(rot, n).expect("return data for small levels");
        while let Ok(r) = Self::new(rot, n + 1) {
            best = r;
            n += 1;
        }
        best
    }

    pub fn with_budget(rot: Rotation, n_max: usize, budget: i128) -> Result<Self> {
        let mut q = vec![1i128];
        let mut lens = vec![rot.omega()];
        let (mut q_prev, mut d_prev) = (0i128, OrbitNumber::ONE);
        while q.len() <= n_max {
            let (qn, dn) = (*q.last().unwrap(), *lens.last().unwrap());
            let a = rot.floor(&rot.div(&d_prev, &dn));
            let q_next = q_prev
                .checked_add(a.checked_mul(qn).ok_or_else(|| overflow(q.len()))?)
                .ok_or_else(|| overflow(q.len()))?;
            if q_next > budget {
                return Err(Error::DepthOverflow(format!(
                    "q_{} = {q_next} exceeds the integer budget {budget}",
                    q.len()
                )));
            }
            let d_next = d_prev - dn.scale(a, 1);
            q_prev = qn;
            d_prev = dn;
            q.push(q_next);
            lens.push(d_next);
        }
        let right = q
            .iter()
            .map(|&k| rot.lt(&rot.orbit_point(k), &OrbitNumber::rational(1, 2)))
            .collect();
        Ok(ReturnData { rot, q, lens, right })
    }

    pub fn rotation(&self) -> Rotation {
        self.rot
    }

    pub fn max_level(&self) -> usize {
        self.q.len() - 1
    }

    pub fn q(&self, n: usize) -> i128 {
        self.q[n]
    }

    /// q_1..q_N as a list.
    pub fn times(&self, count: usize) -> Vec<i128> {
        self.q[1..=count].to_vec()
    }

    /// |I_n| = ‖q_n ω‖.
    pub fn len(&self, n: usize) -> OrbitNumber {
        self.lens[n]
    }

    /// Whether I_n lies to the right of 0.
    pub fn is_right(&self, n: usize) -> bool {
        self.right[n]
    }

    /// I_n as a circle interval.
    pub fn return_interval(&self, n: usize) -> IntervalSet {
        let lo = if self.right[n] { OrbitNumber::ZERO } else { -self.lens[n] };
        IntervalSet::arc(self.rot, lo, self.lens[n])
    }

    /// a_n with q_n = q_{n−2} + a_n·q_{n−1} (n ≥ 2).
    pub fn quotient(&self, n: usize) -> i128 {
        (self.q[n] - self.q[n - 2]) / self.q[n - 1]
    }

    fn need(&self, n: usize) -> Result<()> {
        if n > self.max_level() {
            Err(Error::DepthOverflow(format!(
                "level {n} beyond computed return data ({})",
                self.max_level()
            )))
        } else {
            Ok(())
        }
    }

    pub fn tile_len(&self, t: &Tile) -> OrbitNumber {
        self.lens[t.base]
    }

    /// Left endpoint in [0, 1).
    pub fn tile_left(&self, t: &Tile) -> OrbitNumber {
        let x = OrbitNumber::new(0, t.j);
        if self.right[t.base] {
            self.rot.frac(&x)
        } else {
            self.rot.frac(&(x - self.lens[t.base]))
        }
    }

    pub fn tile_interval(&self, t: &Tile) -> IntervalSet {
        IntervalSet::arc(self.rot, self.tile_left(t), self.tile_len(t))
    }

    /// Tiles of 𝒫_n sorted by left endpoint.
    pub fn partition(&self, n: usize) -> Result<Vec<Tile>> {
        self.need(n + 1)?;
        let count = (self.q[n + 1] + self.q[n]) as u64;
        if count > TILE_BUDGET {
            return Err(Error::DepthOverflow(format!("𝒫_{n} has {count} tiles")));
        }
        let mut tiles: Vec<(OrbitNumber, Tile)> = (1..=self.q[n + 1])
            .map(|j| Tile { level: n, base: n, j })
            .chain((1..=self.q[n]).map(|j| Tile { level: n, base: n + 1, j }))
            .map(|t| (self.tile_left(&t), t))
            .collect();
        tiles.sort_by(|a, b| self.rot.cmp(&a.0, &b.0));
        Ok(tiles.into_iter().map(|(_, t)| t).collect())
    }

    /// Tiles of 𝒫_{level+1} inside `t`, left to right.
    pub fn children(&self, t: &Tile) -> Result<Vec<Tile>> {
        let n = t.level;
        if t.base == n + 1 {
            return Ok(vec![Tile { level: n + 1, base: n + 1, j: t.j }]);
        }
        self.need(n + 2)?;
        let a = self.quotient(n + 2);
        let short = Tile { level: n + 1, base: n + 2, j: t.j };
        let long = |i: i128| Tile {
            level: n + 1,
            base: n + 1,
            j: t.j + self.q[n + 2] - i * self.q[n + 1],
        };
        let mut out = Vec::with_capacity(a as usize + 1);
        if self.right[n] {
            out.push(short);
            out.extend((1..=a).map(long));
        } else {
            out.extend((1..=a).rev().map(long));
            out.push(short);
        }
        Ok(out)
    }

    /// Number of 𝒫_target tiles inside a tile over I_base at any level ≤ base.
    pub fn child_count(&self, base: usize, target: usize) -> u64 {
        // f(b) = 1 if b ≥ target, else f(b+2) + a_{b+2}·f(b+1)
        if base >= target {
            return 1;
        }
        let mut f_hi = 1u64; // f(target + 1)
        let mut f_mid = 1u64; // f(target)
        let mut b = target;
        while b > base {
            b -= 1;
            let a = self.quotient(b + 2) as u64;
            let f = f_hi.saturating_add(a.saturating_mul(f_mid));
            f_hi = f_mid;
            f_mid = f;
        }
        f_mid
    }

    /// 𝒬_{J,m}: the 𝒫_m tiles inside `t`, left to right.
    pub fn refine(&self, t: &Tile, m: usize) -> Result<Vec<Tile>> {
        if m < t.level {
            return Err(Error::Precondition(format!(
                "refinement level {m} below tile level {}",
                t.level
            )));
        }
        self.need(m + 1)?;
        let count = self.child_count(t.base, m);
        if count > TILE_BUDGET {
            return Err(Error::DepthOverflow(format!("refinement has {count} tiles")));
        }
        let mut out = Vec::with_capacity(count as usize);
        self.walk(t, m, &mut |c| {
            out.push(c);
            true
        })?;
        Ok(out)
    }

    /// Depth-first left-to-right walk over the 𝒫_m tiles inside `t`; the
    /// callback returns false to stop early.
    pub fn walk(&self, t: &Tile, m: usize, f: &mut dyn FnMut(Tile) -> bool) -> Result<bool> {
        if t.level == m {
            return Ok(f(*t));
        }
        if t.base == t.level + 1 && t.base >= m {
            return Ok(f(Tile { level: m, base: t.base, j: t.j }));
        }
        for c in self.children(t)? {
            if !self.walk(&c, m, f)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The first (`from_left`) or last `k` tiles of 𝒫_m inside `t`, in left-to-right order.
    pub fn edge_tiles(&self, t: &Tile, m: usize, from_left: bool, k: usize) -> Result<Vec<Tile>> {
        let mut out = Vec::with_capacity(k);
        self.edge_walk(t, m, from_left, k, &mut out)?;
        if !from_left {
            out.reverse();
        }
        Ok(out)
    }

    fn edge_walk(&self, t: &Tile, m: usize, from_left: bool, k: usize, out: &mut Vec<Tile>) -> Result<()> {
        if out.len() >= k {
            return Ok(());
        }
        if t.level == m || (t.base == t.level + 1 && t.base >= m) {
            out.push(Tile { level: m, base: t.base, j: t.j });
            return Ok(());
        }
        let mut cs = self.children(t)?;
        if !from_left {
            cs.reverse();
        }
        for c in cs {
            self.edge_walk(&c, m, from_left, k, out)?;
            if out.len() >= k {
                break;
            }
        }
        Ok(())
    }

    /// Orbit index i of a tile endpoint R^i(0).
    pub fn left_index(&self, t: &Tile) -> i128 {
        if self.right[t.base] {
            t.j
        } else {
            t.j + self.q[t.base]
        }
    }

    pub fn right_index(&self, t: &Tile) -> i128 {
        if self.right[t.base] {
            t.j + self.q[t.base]
        } else {
            t.j
        }
    }

    /// Smallest k ≥ 1 with {kω} in the open arc (lo, lo + len).
    ///
    /// The endpoints of 𝒫_n are exactly R^k(0), 1 ≤ k ≤ q_{n+1} + q_n, so
    /// descending the tile tree until some new endpoint falls inside the arc
    /// finds the first hit without scanning the orbit.
    pub fn first_hit(&self, lo: &OrbitNumber, len: &OrbitNumber) -> Option<i128> {
        let rot = &self.rot;
        if rot.sign(len) != Ordering::Greater {
            return None;
        }
        let inside = |k: i128| {
            let d = rot.frac(&(OrbitNumber::new(0, k) - *lo));
            rot.sign(&d) == Ordering::Greater && rot.lt(&d, len)
        };
        let holds = |t: &Tile| {
            let d = rot.frac(&(*lo - self.tile_left(t)));
            rot.lt(&d, &self.tile_len(t))
        };
        let tiles = self.partition(0).ok()?;
        if let Some(k) = tiles.iter().map(|t| self.left_index(t)).filter(|&k| inside(k)).min() {
            return Some(k);
        }
        let mut cur = *tiles.iter().find(|t| holds(t))?;
        while cur.level + 2 <= self.max_level() {
            let cs = self.children(&cur).ok()?;
            let hit = cs[..cs.len() - 1]
                .iter()
                .map(|c| self.right_index(c))
                .filter(|&k| inside(k))
                .min();
            if hit.is_some() {
                return hit;
            }
            cur = *cs.iter().find(|c| holds(c))?;
        }
        None
    }

    /// Smallest |k| (k ≠ 0, positive preferred on ties) with {kω} in the open arc.
    pub fn first_hit_signed(&self, lo: &OrbitNumber, len: &OrbitNumber) -> Option<i128> {
        let pos = self.first_hit(lo, len);
        let neg = self.first_hit(&-(*lo + *len), len).map(|k| -k);
        match (pos, neg) {
            (Some(p), Some(n)) => Some(if p <= -n { p } else { n }),
            (p, n) => p.or(n),
        }
    }

    /// Sign comparison helper shared by callers needing exact ordering.
    pub fn cmp(&self, x: &OrbitNumber, y: &OrbitNumber) -> Ordering {
        self.rot.cmp(x, y)
    }
}

fn overflow(n: usize) -> Error {
    Error::DepthOverflow(format!("q_{n} overflows i128"))
}
