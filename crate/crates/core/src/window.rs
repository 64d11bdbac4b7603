//! Windows built from a Cantor approximation: W (even gaps filled), V (one
//! gap per level left open) and bit-string fillings W(x), plus plain
//! intervals and arbitrary interval sets.
//!
//! At finite depth every gap endpoint is an orbit point of 0, so endpoints of
//! different kinds share one orbit — something the limit set avoids because
//! each endpoint keeps moving by a tail that depends only on its side and on
//! the parity of its level. [`Genericity::Separated`] emulates that tail: the
//! endpoints of every unfilled gap move outward by a dyadic offset δ_c ∉ ℤ+ℤω,
//! with one offset per (side, parity) class.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{OrbitNumber, Rotation};
use crate::cantor::{arcs, CantorApprox};
use crate::error::{Error, Result};
use crate::interval::IntervalSet;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Genericity {
    /// Raw depth-L endpoints.
    Exact,
    /// Unfilled gaps widened by class offsets so the four endpoint classes
    /// lie on distinct orbits.
    #[default]
    Separated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WindowKind {
    W,
    V,
    Wx { bits: String, seed: u64 },
    Interval,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowGap {
    pub lo: OrbitNumber,
    pub len: OrbitNumber,
    pub level: usize,
    pub filled: bool,
    pub lo_index: i128,
    pub hi_index: i128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowSpec {
    pub kind: WindowKind,
    pub rotation: Rotation,
    pub depth: usize,
    pub set: IntervalSet,
    pub gaps: Vec<WindowGap>,
    /// Boundary points excluded from the window (open ends).
    pub excluded: Vec<OrbitNumber>,
    /// Smallest scale on which the depth-L set is meaningful.
    pub resolution: Option<OrbitNumber>,
    pub genericity: Genericity,
    /// Unit ρ of the class offsets δ_c = c·ρ (zero for exact endpoints).
    pub rho: OrbitNumber,
}

/// Endpoint class: left/right end of a gap, odd/even level.
pub fn endpoint_class(left: bool, level: usize) -> i128 {
    match (left, level % 2 == 1) {
        (true, true) => 1,
        (false, true) => 2,
        (true, false) => 3,
        (false, false) => 4,
    }
}

fn dyadic_unit(rot: &Rotation, res: &OrbitNumber) -> OrbitNumber {
    // ρ = 2^−k with 2^k ≥ 64/res
    let mut k = 0u32;
    loop {
        let rho = OrbitNumber::rational(1, 1i128 << k);
        if rot.le(&rho.scale(64, 1), res) {
            return rho;
        }
        k += 1;
    }
}

impl WindowSpec {
    fn from_gaps(
        c: &CantorApprox,
        kind: WindowKind,
        filled: impl Fn(usize, &crate::cantor::Gap) -> bool,
        genericity: Genericity,
    ) -> Self {
        let rot = c.rotation();
        let res = c.resolution();
        let rho = match genericity {
            Genericity::Exact => OrbitNumber::ZERO,
            Genericity::Separated => dyadic_unit(&rot, &res),
        };
        let gaps: Vec<WindowGap> = c
            .canonical_gaps()
            .iter()
            .enumerate()
            .map(|(i, g)| WindowGap {
                lo: g.lo,
                len: g.len,
                level: g.level,
                filled: filled(i, g),
                lo_index: g.lo_index,
                hi_index: g.hi_index,
            })
            .collect();
        let set = window_set(&rot, &gaps, &rho);
        WindowSpec {
            kind,
            rotation: rot,
            depth: c.depth(),
            set,
            gaps,
            excluded: Vec::new(),
            resolution: Some(res),
            genericity,
            rho,
        }
    }

    /// W = C_L ∪ (even-level gaps).
    pub fn w(c: &CantorApprox, genericity: Genericity) -> Self {
        Self::from_gaps(c, WindowKind::W, |_, g| g.level % 2 == 0, genericity)
    }

    /// V = 𝕋¹ minus J(k; J_k) for k = 2..L, J_k the k-th canonical gap.
    pub fn v(c: &CantorApprox, genericity: Genericity) -> Self {
        let removed = v_choice(c);
        Self::from_gaps(c, WindowKind::V, |i, _| !removed.contains(&i), genericity)
    }

    /// W(x): gap i of the canonical enumeration is filled iff x_i = 1; bits
    /// beyond the given prefix come from a ChaCha stream seeded with `seed`.
    pub fn random(c: &CantorApprox, bits: &str, seed: u64, genericity: Genericity) -> Result<Self> {
        let n = c.gaps().len();
        if bits.len() > n {
            return Err(Error::Precondition(format!("{} bits for {n} gaps", bits.len())));
        }
        let mut x: Vec<bool> = bits
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("bit string contains {ch:?}"))),
            })
            .collect::<Result<_>>()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while x.len() < n {
            x.push(rng.gen::<bool>());
        }
        let kind = WindowKind::Wx {
            bits: bits.to_string(),
            seed,
        };
        Ok(Self::from_gaps(c, kind, |i, _| x[i], genericity))
    }

    /// W(x) for an explicit full filling vector.
    pub fn filling(c: &CantorApprox, x: &[bool], genericity: Genericity) -> Result<Self> {
        if x.len() != c.gaps().len() {
            return Err(Error::Precondition(format!("{} bits for {} gaps", x.len(), c.gaps().len())));
        }
        let bits: String = x.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let kind = WindowKind::Wx { bits, seed: 0 };
        Ok(Self::from_gaps(c, kind, |i, _| x[i], genericity))
    }

    /// [lo, hi] with optionally open ends; lo and hi are circle points, the
    /// arc runs counterclockwise from lo to hi.
    pub fn interval(rot: Rotation, lo: OrbitNumber, hi: OrbitNumber, open_lo: bool, open_hi: bool) -> Result<Self> {
        let len = rot.frac(&(hi - lo));
        if len.is_zero() {
            return Err(Error::EmptyWindow);
        }
        let set = IntervalSet::arc(rot, lo, len);
        let mut excluded = Vec::new();
        if open_lo {
            excluded.push(rot.frac(&lo));
        }
        if open_hi {
            excluded.push(rot.frac(&hi));
        }
        Ok(WindowSpec {
            kind: WindowKind::Interval,
            rotation: rot,
            depth: 0,
            set,
            gaps: Vec::new(),
            excluded,
            resolution: None,
            genericity: Genericity::Exact,
            rho: OrbitNumber::ZERO,
        })
    }

    pub fn custom(set: IntervalSet) -> Self {
        WindowSpec {
            kind: WindowKind::Custom,
            rotation: set.rotation(),
            depth: 0,
            set,
            gaps: Vec::new(),
            excluded: Vec::new(),
            resolution: None,
            genericity: Genericity::Exact,
            rho: OrbitNumber::ZERO,
        }
    }

    pub fn is_proper(&self) -> bool {
        !self.set.is_empty()
    }

    /// Membership of x in the window (closed, minus excluded points).
    pub fn contains(&self, x: &OrbitNumber) -> bool {
        let f = self.rotation.frac(x);
        self.set.contains(&f) && !self.excluded.contains(&f)
    }

    pub fn boundary(&self) -> Vec<OrbitNumber> {
        self.set.boundary()
    }

    /// Offset δ applied to an endpoint of the given class.
    pub fn offset(&self, left: bool, level: usize) -> OrbitNumber {
        self.rho.scale(endpoint_class(left, level), 1)
    }

    /// The circle points bounding unfilled gaps, with (left, level) tags.
    pub fn tagged_boundary(&self) -> Vec<(OrbitNumber, bool, usize)> {
        let rot = &self.rotation;
        let mut out = Vec::new();
        for g in self.gaps.iter().filter(|g| !g.filled) {
            out.push((rot.frac(&(g.lo - self.offset(true, g.level))), true, g.level));
            out.push((rot.frac(&(g.lo + g.len + self.offset(false, g.level))), false, g.level));
        }
        out
    }

    /// Whether unfilled-gap endpoints of distinct (side, parity) classes lie
    /// on distinct orbits while each class stays on one orbit.
    pub fn orbit_separation(&self) -> bool {
        let tagged = self.tagged_boundary();
        let mut reps: Vec<(i128, OrbitNumber)> = Vec::new();
        for (x, left, level) in tagged {
            let c = endpoint_class(left, level);
            match reps.iter().find(|(k, _)| *k == c) {
                Some((_, y)) => {
                    if !(x - *y).is_integral() {
                        return false;
                    }
                }
                None => reps.push((c, x)),
            }
        }
        for i in 0..reps.len() {
            for j in i + 1..reps.len() {
                if (reps[i].1 - reps[j].1).is_integral() {
                    return false;
                }
            }
        }
        true
    }

    /// Nonzero periods h with h + W = W among differences of boundary points
    /// whose ω-coefficient is at most `bound` in absolute value.
    pub fn check_irredundant(&self, bound: i128) -> IrredundancyReport {
        let rot = &self.rotation;
        if self.set.is_full() || self.set.is_empty() {
            return IrredundancyReport {
                degenerate: true,
                candidates: 0,
                periods: Vec::new(),
            };
        }
        let comps = self.set.components();
        let (l0, h0) = comps[0];
        let len0 = h0 - l0;
        let mut starts: Vec<OrbitNumber> = comps.iter().map(|c| rot.frac(&c.0)).collect();
        starts.sort_by(|a, b| rot.cmp(a, b));
        let is_start = |x: OrbitNumber| {
            let x = rot.frac(&x);
            starts.binary_search_by(|s| rot.cmp(s, &x)).is_ok()
        };
        let mut periods = Vec::new();
        let mut candidates = 0usize;
        for &(l, h) in &comps[1..] {
            let hcand = rot.frac(&(l - l0));
            if (h - l) != len0 || hcand.b().abs() > bound {
                continue;
            }
            candidates += 1;
            // a period permutes component starts; most candidates fail fast
            if !comps.iter().all(|c| is_start(c.0 + hcand)) {
                continue;
            }
            if self.set.translate(&hcand) == self.set {
                periods.push(hcand);
            }
        }
        IrredundancyReport {
            degenerate: false,
            candidates,
            periods,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IrredundancyReport {
    pub degenerate: bool,
    pub candidates: usize,
    pub periods: Vec<OrbitNumber>,
}

fn window_set(rot: &Rotation, gaps: &[WindowGap], rho: &OrbitNumber) -> IntervalSet {
    let open: Vec<(OrbitNumber, OrbitNumber)> = gaps
        .iter()
        .filter(|g| !g.filled)
        .map(|g| {
            let dl = rho.scale(endpoint_class(true, g.level), 1);
            let dr = rho.scale(endpoint_class(false, g.level), 1);
            (g.lo - dl, g.len + dl + dr)
        })
        .collect();
    arcs(rot, &open).complement()
}

/// Canonical indices of the gaps removed for V.
fn v_choice(c: &CantorApprox) -> Vec<usize> {
    let rot = c.rotation();
    let gaps = c.canonical_gaps();
    let mut out = Vec::new();
    for k in 2..=c.depth() {
        let Some(target) = gaps.get(k - 1) else { break };
        let mut best: Option<(usize, OrbitNumber, OrbitNumber)> = None;
        for (i, g) in gaps.iter().enumerate().filter(|(_, g)| g.level == k) {
            let d = gap_distance(&rot, g, target);
            // clockwise offset from the target back to the candidate
            let cw = rot.frac(&(target.lo - (g.lo + g.len)));
            let better = match &best {
                None => true,
                Some((_, bd, bcw)) => match rot.cmp(&d, bd) {
                    Ordering::Less => true,
                    Ordering::Equal => rot.lt(&cw, bcw),
                    Ordering::Greater => false,
                },
            };
            if better {
                best = Some((i, d, cw));
            }
        }
        if let Some((i, _, _)) = best {
            out.push(i);
        }
    }
    out
}

/// Nearest-endpoint distance between two gaps (0 when they coincide).
fn gap_distance(rot: &Rotation, a: &crate::cantor::Gap, b: &crate::cantor::Gap) -> OrbitNumber {
    if a.lo == b.lo {
        return OrbitNumber::ZERO;
    }
    let ea = [a.lo, a.lo + a.len];
    let eb = [b.lo, b.lo + b.len];
    let mut best = OrbitNumber::ONE;
    for x in &ea {
        for y in &eb {
            best = rot.min(best, rot.norm(&(*x - *y)));
        }
    }
    best
}

// ---- JSON form ----

#[derive(Serialize, Deserialize)]
struct Comp {
    lo: OrbitNumber,
    hi: OrbitNumber,
}

#[derive(Serialize, Deserialize)]
struct GapRepr {
    lo: OrbitNumber,
    hi: OrbitNumber,
    level: usize,
    filled: bool,
    lo_index: i128,
    hi_index: i128,
}

#[derive(Serialize, Deserialize)]
struct WindowRepr {
    kind: WindowKind,
    omega: Rotation,
    depth: usize,
    genericity: Genericity,
    rho: OrbitNumber,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    resolution: Option<OrbitNumber>,
    components: Vec<Comp>,
    gaps: Vec<GapRepr>,
    #[serde(default)]
    excluded: Vec<OrbitNumber>,
}

impl Serialize for WindowSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rot = &self.rotation;
        let repr = WindowRepr {
            kind: self.kind.clone(),
            omega: *rot,
            depth: self.depth,
            genericity: self.genericity,
            rho: self.rho,
            resolution: self.resolution,
            components: self
                .set
                .components()
                .into_iter()
                .map(|(lo, hi)| Comp { lo, hi })
                .collect(),
            gaps: self
                .gaps
                .iter()
                .map(|g| GapRepr {
                    lo: g.lo,
                    hi: g.lo + g.len,
                    level: g.level,
                    filled: g.filled,
                    lo_index: g.lo_index,
                    hi_index: g.hi_index,
                })
                .collect(),
            excluded: self.excluded.clone(),
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for WindowSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = WindowRepr::deserialize(d)?;
        let rot = r.omega;
        let pieces: Vec<(OrbitNumber, OrbitNumber)> =
            r.components.iter().map(|c| (c.lo, c.hi - c.lo)).collect();
        for (_, len) in &pieces {
            if rot.sign(len) != Ordering::Greater {
                return Err(serde::de::Error::custom("component with hi ≤ lo"));
            }
        }
        let set = if pieces.len() == 1 && pieces[0].1 == OrbitNumber::ONE {
            IntervalSet::full(rot)
        } else {
            arcs(&rot, &pieces)
        };
        Ok(WindowSpec {
            kind: r.kind,
            rotation: rot,
            depth: r.depth,
            set,
            gaps: r
                .gaps
                .into_iter()
                .map(|g| WindowGap {
                    lo: g.lo,
                    len: g.hi - g.lo,
                    level: g.level,
                    filled: g.filled,
                    lo_index: g.lo_index,
                    hi_index: g.hi_index,
                })
                .collect(),
            excluded: r.excluded,
            resolution: r.resolution,
            genericity: r.genericity,
            rho: r.rho,
        })
    }
}
