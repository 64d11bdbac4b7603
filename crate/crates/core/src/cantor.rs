//! Depth-L approximations C_L of the self-similar Cantor set.
//!
//! C_1 is the whole circle, viewed as the tiles of 𝒫_{n_1}. Every tile J of
//! 𝒫_{n_ℓ} kept in C_ℓ loses one or two of the 𝒫_{n_{ℓ+1}} tiles at each end
//! of 𝒬_{J,n_{ℓ+1}}; the remaining children form one component of C_{ℓ+1}.
//! Only the first and last kept child of a component can border a gap, so a
//! component is stored as its parent tile plus the number of children dropped
//! on each side, and the tiles of C_L are enumerated lazily.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::arith::{OrbitNumber, Rotation};
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::returns::{ReturnData, Tile};

/// Largest number of components a single level may have.
pub const COMPONENT_BUDGET: u64 = 1 << 20;

/// Which side receives two removals under rule (1).
///
/// The construction text pairs "two left-most/right-most" with
/// "right-most/left-most"; `NearSide` reads this as two removals next to the
/// gap the tile is accessible from, `FarSide` as two on the opposite end.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleOne {
    #[default]
    NearSide,
    FarSide,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstructionPlan {
    pub rotation: Rotation,
    pub epsilon: OrbitNumber,
    pub depth: usize,
    pub beta: Vec<OrbitNumber>,
    pub n_seq: Vec<usize>,
    #[serde(default)]
    pub rule_one: RuleOne,
}

impl ConstructionPlan {
    /// Greedy parameter choice: β_ℓ = ε/(6·2^ℓ), n_1 = 1 and n_{ℓ+1} the
    /// smallest level ≥ n_ℓ + 6 with β_ℓ·|I_{n_ℓ+1}| > |I_{n_{ℓ+1}}|.
    pub fn new(rot: Rotation, epsilon: OrbitNumber, depth: usize) -> Result<Self> {
        if epsilon.b() != 0
            || rot.sign(&epsilon) != Ordering::Greater
            || rot.le(&OrbitNumber::ONE, &epsilon)
        {
            return Err(Error::Precondition(format!("ε = {epsilon} must be rational in (0, 1)")));
        }
        if depth < 2 {
            return Err(Error::Precondition(format!("depth {depth} < 2")));
        }
        let beta: Vec<OrbitNumber> = (1..=depth)
            .map(|l| epsilon.scale(1, 6 * (1i128 << l)))
            .collect();
        let mut n_seq = vec![1usize];
        let mut ret = ReturnData::new(rot, 8)?;
        for l in 0..depth - 1 {
            let n = n_seq[l];
            let target = rot.mul(&beta[l], &ret.len(n + 1));
            let mut m = n + 6;
            loop {
                if m + 2 > ret.max_level() {
                    ret = ReturnData::new(rot, m + 8)?;
                }
                if rot.lt(&ret.len(m), &target) {
                    break;
                }
                m += 1;
            }
            n_seq.push(m);
        }
        // the deepest level needs 𝒫_{n_L} and its two successors
        ReturnData::new(rot, n_seq[depth - 1] + 2)?;
        Ok(ConstructionPlan {
            rotation: rot,
            epsilon,
            depth,
            beta,
            n_seq,
            rule_one: RuleOne::NearSide,
        })
    }

    pub fn with_rule_one(mut self, r: RuleOne) -> Self {
        self.rule_one = r;
        self
    }

    /// Exact check of Σ3β_ℓ < ε, n_{ℓ+1} ≥ n_ℓ + 6 and the length ratios.
    pub fn validate(&self) -> Result<()> {
        let rot = &self.rotation;
        let sum = self
            .beta
            .iter()
            .fold(OrbitNumber::ZERO, |acc, b| acc + b.scale(3, 1));
        if !rot.lt(&sum, &self.epsilon) {
            return Err(Error::Precondition("Σ3β_ℓ ≥ ε".into()));
        }
        let ret = ReturnData::new(*rot, self.n_seq[self.depth - 1] + 2)?;
        for l in 0..self.depth - 1 {
            let (n, m) = (self.n_seq[l], self.n_seq[l + 1]);
            if m < n + 6 {
                return Err(Error::Precondition(format!("n_{} < n_{} + 6", l + 2, l + 1)));
            }
            if !rot.lt(&ret.len(m), &rot.mul(&self.beta[l], &ret.len(n + 1))) {
                return Err(Error::Precondition(format!("length ratio fails at ℓ = {}", l + 1)));
            }
        }
        Ok(())
    }

    /// Finest resolution |I_{n_L+1}| of the depth-L construction.
    pub fn resolution(&self) -> Result<OrbitNumber> {
        let n = self.n_seq[self.depth - 1];
        Ok(ReturnData::new(self.rotation, n + 2)?.len(n + 1))
    }
}

/// A component of C_ℓ (ℓ ≥ 2): the kept children of one 𝒫_{n_{ℓ−1}} tile.
#[derive(Clone, Debug)]
pub struct Component {
    pub parent: Tile,
    pub skip_left: u64,
    pub skip_right: u64,
    pub count: u64,
    pub first: Tile,
    pub last: Tile,
    /// Level of the gap bordering the first kept child on the left.
    pub left_access: usize,
    pub right_access: usize,
}

impl Component {
    pub fn kept(&self) -> u64 {
        self.count - self.skip_left - self.skip_right
    }
}

/// Side from which a tile of C_ℓ touches a gap, with that gap's level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Access {
    None,
    Left(usize),
    Right(usize),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Gap {
    /// Left endpoint in [0, 1).
    pub lo: OrbitNumber,
    pub len: OrbitNumber,
    pub level: usize,
    /// Orbit indices i with endpoint = R^i(0).
    pub lo_index: i128,
    pub hi_index: i128,
}

impl Gap {
    pub fn hi(&self, rot: &Rotation) -> OrbitNumber {
        rot.frac(&(self.lo + self.len))
    }
}

#[derive(Clone, Debug)]
pub struct LevelData {
    pub body: IntervalSet,
    pub components: Vec<Component>,
    pub gaps: Vec<Gap>,
}

#[derive(Clone, Debug)]
pub struct CantorApprox {
    pub plan: ConstructionPlan,
    ret: ReturnData,
    /// Index ℓ−1 holds C_ℓ; level 1 has no components.
    levels: Vec<LevelData>,
    /// Exact measure removed when passing from C_ℓ to C_{ℓ+1}.
    pub removed: Vec<OrbitNumber>,
}

impl CantorApprox {
    pub fn build(plan: &ConstructionPlan) -> Result<Self> {
        plan.validate()?;
        let rot = plan.rotation;
        let ret = ReturnData::new(rot, plan.n_seq[plan.depth - 1] + 2)?;
        let mut levels = vec![LevelData {
            body: IntervalSet::full(rot),
            components: Vec::new(),
            gaps: Vec::new(),
        }];
        let mut removed = Vec::new();
        for l in 1..plan.depth {
            let next = next_level(plan, &ret, l, &levels[l - 1])?;
            let prev_m = levels[l - 1].body.measure();
            removed.push(prev_m - next.body.measure());
            levels.push(next);
        }
        Ok(CantorApprox {
            plan: plan.clone(),
            ret,
            levels,
            removed,
        })
    }

    pub fn rotation(&self) -> Rotation {
        self.plan.rotation
    }

    pub fn returns(&self) -> &ReturnData {
        &self.ret
    }

    pub fn depth(&self) -> usize {
        self.plan.depth
    }

    /// C_ℓ, 1 ≤ ℓ ≤ L.
    pub fn level(&self, l: usize) -> &LevelData {
        &self.levels[l - 1]
    }

    pub fn body(&self) -> &IntervalSet {
        &self.levels[self.plan.depth - 1].body
    }

    pub fn gaps(&self) -> &[Gap] {
        &self.levels[self.plan.depth - 1].gaps
    }

    /// Gaps sorted by (level, left endpoint): the canonical enumeration.
    pub fn canonical_gaps(&self) -> Vec<Gap> {
        let rot = self.rotation();
        let mut g = self.gaps().to_vec();
        g.sort_by(|a, b| a.level.cmp(&b.level).then_with(|| rot.cmp(&a.lo, &b.lo)));
        g
    }

    pub fn resolution(&self) -> OrbitNumber {
        self.ret.len(self.plan.n_seq[self.plan.depth - 1] + 1)
    }

    /// Number of 𝒫_{n_ℓ} tiles in C_ℓ.
    pub fn tile_count(&self, l: usize) -> u64 {
        if l == 1 {
            let n = self.plan.n_seq[0];
            return (self.ret.q(n + 1) + self.ret.q(n)) as u64;
        }
        self.level(l).components.iter().map(Component::kept).sum()
    }

    /// Visits the 𝒫_{n_ℓ} tiles of C_ℓ with their accessibility, component by component.
    pub fn for_each_tile(&self, l: usize, f: &mut dyn FnMut(Tile, Access) -> bool) -> Result<()> {
        visit_tiles(&self.plan, &self.ret, l, &self.levels[l - 1], f)
    }

    /// Lengths per gap level: Ok when every level has one length and distinct
    /// levels have distinct lengths; Err names the first clash.
    pub fn gap_lengths_by_level(&self) -> std::result::Result<Vec<(usize, OrbitNumber)>, String> {
        let mut out: Vec<(usize, OrbitNumber)> = Vec::new();
        for g in self.gaps() {
            match out.iter().find(|(k, _)| *k == g.level) {
                Some((_, len)) if *len != g.len => {
                    return Err(format!("two level-{} gaps of lengths {len} and {}", g.level, g.len));
                }
                Some(_) => {}
                None => out.push((g.level, g.len)),
            }
        }
        out.sort_by_key(|x| x.0);
        for i in 0..out.len() {
            for j in i + 1..out.len() {
                if out[i].1 == out[j].1 {
                    return Err(format!("levels {} and {} share a gap length", out[i].0, out[j].0));
                }
            }
        }
        Ok(out)
    }
}

fn removal(plan: &ConstructionPlan, l: usize, acc: Access) -> (u64, u64) {
    let rule_one = |k: usize| k <= l && (l - k).is_multiple_of(2);
    match (acc, plan.rule_one) {
        (Access::Left(k), RuleOne::NearSide) if rule_one(k) => (2, 1),
        (Access::Left(k), RuleOne::FarSide) if rule_one(k) => (1, 2),
        (Access::Right(k), RuleOne::NearSide) if rule_one(k) => (1, 2),
        (Access::Right(k), RuleOne::FarSide) if rule_one(k) => (2, 1),
        _ => (1, 1),
    }
}

fn visit_tiles(
    plan: &ConstructionPlan,
    ret: &ReturnData,
    l: usize,
    data: &LevelData,
    f: &mut dyn FnMut(Tile, Access) -> bool,
) -> Result<()> {
    if l == 1 {
        for t in ret.partition(plan.n_seq[0])? {
            if !f(t, Access::None) {
                break;
            }
        }
        return Ok(());
    }
    let m = plan.n_seq[l - 1];
    for c in &data.components {
        let (lo, hi) = (c.skip_left, c.count - c.skip_right);
        let mut i = 0u64;
        let mut go_on = true;
        ret.walk(&c.parent, m, &mut |t| {
            let keep = i >= lo && i < hi;
            let acc = if i == lo {
                Access::Left(c.left_access)
            } else if i + 1 == hi {
                Access::Right(c.right_access)
            } else {
                Access::None
            };
            i += 1;
            if keep {
                go_on = f(t, acc);
            }
            go_on && i < hi
        })?;
        if !go_on {
            break;
        }
    }
    Ok(())
}

fn next_level(plan: &ConstructionPlan, ret: &ReturnData, l: usize, cur: &LevelData) -> Result<LevelData> {
    let rot = ret.rotation();
    let total: u64 = if l == 1 {
        let n = plan.n_seq[0];
        (ret.q(n + 1) + ret.q(n)) as u64
    } else {
        cur.components.iter().map(Component::kept).sum()
    };
    if total > COMPONENT_BUDGET {
        return Err(Error::DepthOverflow(format!(
            "C_{} would have {total} components (budget {COMPONENT_BUDGET})",
            l + 1
        )));
    }
    let m = plan.n_seq[l];
    let mut comps = Vec::with_capacity(total as usize);
    let mut err = None;
    visit_tiles(plan, ret, l, cur, &mut |t, acc| {
        let (sl, sr) = removal(plan, l, acc);
        let count = ret.child_count(t.base, m);
        assert!(
            count >= sl + sr + 2,
            "tile {t:?} keeps fewer than two children and would be accessible from both sides"
        );
        let first = match ret.edge_tiles(&t, m, true, sl as usize + 1) {
            Ok(v) => v[sl as usize],
            Err(e) => {
                err = Some(e);
                return false;
            }
        };
        let last = match ret.edge_tiles(&t, m, false, sr as usize + 1) {
            Ok(v) => v[0],
            Err(e) => {
                err = Some(e);
                return false;
            }
        };
        let (la, ra) = match acc {
            Access::Left(k) => (k, l + 1),
            Access::Right(k) => (l + 1, k),
            Access::None => (l + 1, l + 1),
        };
        comps.push(Component {
            parent: t,
            skip_left: sl,
            skip_right: sr,
            count,
            first,
            last,
            left_access: la,
            right_access: ra,
        });
        true
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    let lo = |c: &Component| ret.tile_left(&c.first);
    comps.sort_by(|a, b| rot.cmp(&lo(a), &lo(b)));

    let mut pieces = Vec::with_capacity(comps.len());
    for c in &comps {
        let start = ret.tile_left(&c.first);
        let end = ret.tile_left(&c.last) + ret.tile_len(&c.last);
        pieces.push((start, rot.frac(&(end - start))));
    }
    let body = arcs(&rot, &pieces);

    let mut gaps = Vec::with_capacity(comps.len());
    for i in 0..comps.len() {
        let (a, b) = (&comps[i], &comps[(i + 1) % comps.len()]);
        assert_eq!(
            a.right_access, b.left_access,
            "gap between {:?} and {:?} has inconsistent levels",
            a.parent, b.parent
        );
        let g_lo = rot.frac(&(ret.tile_left(&a.last) + ret.tile_len(&a.last)));
        let g_hi = ret.tile_left(&b.first);
        let len = rot.frac(&(g_hi - g_lo));
        gaps.push(Gap {
            lo: g_lo,
            len,
            level: a.right_access,
            lo_index: ret.right_index(&a.last),
            hi_index: ret.left_index(&b.first),
        });
    }
    Ok(LevelData {
        body,
        components: comps,
        gaps,
    })
}

/// Union of arcs (start, length).
pub(crate) fn arcs(rot: &Rotation, arcs: &[(OrbitNumber, OrbitNumber)]) -> IntervalSet {
    let mut pieces = Vec::with_capacity(arcs.len() + 1);
    for (lo, len) in arcs {
        let l = rot.frac(lo);
        let h = l + *len;
        if rot.le(&h, &OrbitNumber::ONE) {
            pieces.push((l, h));
        } else {
            pieces.push((l, OrbitNumber::ONE));
            pieces.push((OrbitNumber::ZERO, h - OrbitNumber::ONE));
        }
    }
    IntervalSet::from_pieces(*rot, pieces)
}
