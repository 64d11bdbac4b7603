//! Independence (free) sets for a pair of windows with disjoint interiors.
//!
//! For S = {t_1, …, t_ℓ} and a word a ∈ {0,1}^ℓ the pattern region is
//! R_a = ∩_j (V_{a_j} − t_j ω), an exact regular-closed set. S extends by t
//! when every R_a + {tω} meets both int(V_0) and int(V_1); candidates are
//! scanned in increasing |k| and the first admissible one wins.
//!
//! Witnesses: each leaf word gets one closed arc strictly inside its region;
//! a prefix a gets, for every component of R_a holding descendant arcs, the
//! hull of those arcs. So U_a is a finite union of closed arcs, nested
//! arc-by-arc in its parent. The single-arc induction (one ball per word,
//! pushed across boundary points) is kept as [`Strategy::Arcs`]; at finite
//! depth V_0 ∩ V_1 is a finite set and that induction stalls early.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::arith::{OrbitNumber, Rotation};
use crate::error::{Error, Result};
use crate::interval::IntervalSet;
use crate::returns::ReturnData;
use crate::window::WindowSpec;

/// Largest |k| tried for a new index by default.
pub const DEFAULT_INDEX_BUDGET: i128 = 1 << 16;

// float overlaps closer than this are re-decided exactly
const FLOAT_SLACK: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Exact pattern regions, union-of-arcs witnesses.
    #[default]
    Regions,
    /// One arc per word; U_{ai} is the longest piece of U_a on side i.
    Arcs,
    /// One arc per word; U_{ai} is the piece nearest the pushed left end of U_a.
    EndpointPush,
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub budget: i128,
    pub strategy: Strategy,
    /// On exhaustion return the certificate for the indices found so far.
    pub partial: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            budget: DEFAULT_INDEX_BUDGET,
            strategy: Strategy::Regions,
            partial: false,
        }
    }
}

/// One closed arc [lo, hi] of U_a; a word may own several.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub bits: String,
    pub lo: OrbitNumber,
    /// lo + arc length, not reduced mod 1
    pub hi: OrbitNumber,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Parameters {
    /// ε_ℓ: the longest witness arc at each level
    pub eps: Vec<OrbitNumber>,
    pub strategy: Strategy,
    pub budget: i128,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IndependenceCertificate {
    #[serde(rename = "S")]
    pub s: Vec<i128>,
    pub witnesses: Vec<Witness>,
    pub omega: Rotation,
    pub depth: usize,
    pub parameters: Parameters,
    pub v0: WindowSpec,
    pub v1: WindowSpec,
    /// why a partial build stopped short of the requested size
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhausted: Option<String>,
}

impl IndependenceCertificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Arc {
    lo: OrbitNumber,
    len: OrbitNumber,
}

pub fn build_independence_set(v0: &WindowSpec, v1: &WindowSpec, n: usize) -> Result<IndependenceCertificate> {
    build_with(v0, v1, n, &BuildOptions::default())
}

pub fn build_with(v0: &WindowSpec, v1: &WindowSpec, n: usize, opts: &BuildOptions) -> Result<IndependenceCertificate> {
    let rot = v1.rotation;
    if v0.rotation != rot {
        return Err(Error::Precondition("windows over different rotations".into()));
    }
    for (name, v) in [("V0", v0), ("V1", v1)] {
        if v.set.is_empty() || v.set.is_full() {
            return Err(Error::Precondition(format!("{name} is not a proper window")));
        }
    }
    if !v0.set.intersect(&v1.set).is_empty() {
        return Err(Error::Precondition("int(V0) and int(V1) intersect".into()));
    }
    let rd = ReturnData::deepest(rot);
    let targets = [&v0.set, &v1.set];
    let (s, levels, exhausted) = match opts.strategy {
        Strategy::Regions => regions_build(&rot, &rd, &targets, n, opts)?,
        Strategy::Arcs | Strategy::EndpointPush => {
            let (s, levels, why) = arcs_build(&rot, &rd, &targets, n, opts)?;
            (s, levels.into_iter().map(|l| l.into_iter().map(|a| vec![a]).collect()).collect(), why)
        }
    };

    let mut witnesses = Vec::new();
    let mut eps = Vec::new();
    for (l, us) in levels.iter().enumerate() {
        let mut longest = OrbitNumber::ZERO;
        for (a, arcs) in us.iter().enumerate() {
            for u in arcs {
                longest = rot.max(longest, u.len);
                witnesses.push(Witness {
                    bits: format!("{:0width$b}", a, width = l + 1),
                    lo: u.lo,
                    hi: u.lo + u.len,
                });
            }
        }
        eps.push(longest);
    }
    Ok(IndependenceCertificate {
        s,
        witnesses,
        omega: rot,
        depth: v1.depth.max(v0.depth),
        parameters: Parameters {
            eps,
            strategy: opts.strategy,
            budget: opts.budget,
        },
        v0: v0.clone(),
        v1: v1.clone(),
        exhausted,
    })
}

// stop (partial) or fail on an exhausted step
fn give_up(opts: &BuildOptions, msg: String) -> Result<String> {
    if opts.partial {
        Ok(msg)
    } else {
        Err(Error::SearchExhausted(msg))
    }
}

// ---- pattern regions ----

type Levels = Vec<Vec<Vec<Arc>>>;

fn floats(rot: &Rotation, set: &IntervalSet) -> Vec<(f64, f64)> {
    set.pieces().iter().map(|(l, h)| (rot.to_f64(l), rot.to_f64(h))).collect()
}

#[derive(PartialEq)]
enum Tri {
    Yes,
    Maybe,
    No,
}

// does the linear arc (lo, lo+len), lo in [0,1), overlap the float pieces?
fn overlap_f64(v: &[(f64, f64)], lo: f64, len: f64) -> Tri {
    let mut parts = [(lo, (lo + len).min(1.0)), (0.0, lo + len - 1.0)];
    if lo + len <= 1.0 {
        parts[1] = (0.0, -1.0);
    }
    let mut out = Tri::No;
    for (a, b) in parts {
        if b < a {
            continue;
        }
        let mut k = v.partition_point(|p| p.1 < a - FLOAT_SLACK);
        while k < v.len() && v[k].0 < b + FLOAT_SLACK {
            let ov = v[k].1.min(b) - v[k].0.max(a);
            if ov > FLOAT_SLACK {
                return Tri::Yes;
            }
            if ov > -FLOAT_SLACK {
                out = Tri::Maybe;
            }
            k += 1;
        }
    }
    out
}

struct Target<'a> {
    set: &'a IntervalSet,
    fl: Vec<(f64, f64)>,
}

// R + tω meets int(V)
fn meets(r: &IntervalSet, rf: &[(f64, f64)], v: &Target, tw: &OrbitNumber, twf: f64) -> bool {
    let mut unsure = Vec::new();
    for (i, &(l, h)) in rf.iter().enumerate() {
        match overlap_f64(&v.fl, (l + twf).rem_euclid(1.0), h - l) {
            Tri::Yes => return true,
            Tri::Maybe => unsure.push(i),
            Tri::No => {}
        }
    }
    unsure.into_iter().any(|i| {
        let (l, h) = r.pieces()[i];
        v.set.overlaps_arc(&(l + *tw), &(h - l))
    })
}

fn regions_build(
    rot: &Rotation,
    rd: &ReturnData,
    targets: &[&IntervalSet; 2],
    n: usize,
    opts: &BuildOptions,
) -> Result<(Vec<i128>, Levels, Option<String>)> {
    let budget = opts.budget;
    let tg: Vec<Target> = targets
        .iter()
        .map(|set| Target {
            set,
            fl: floats(rot, set),
        })
        .collect();
    let mut s: Vec<i128> = Vec::with_capacity(n);
    let mut regions: Vec<Vec<IntervalSet>> = Vec::with_capacity(n);
    let mut cur = vec![IntervalSet::full(*rot)];
    let mut stop = None;
    for step in 0..n {
        let fl: Vec<Vec<(f64, f64)>> = cur.iter().map(|r| floats(rot, r)).collect();
        let admissible = |k: i128| {
            let tw = rot.frac(&rot.orbit_point(k));
            let twf = rot.to_f64(&tw);
            cur.iter()
                .zip(&fl)
                .all(|(r, rf)| tg.iter().all(|v| meets(r, rf, v, &tw, twf)))
        };
        let Some(k) = (0..=budget)
            .flat_map(|m| if m == 0 { vec![0] } else { vec![m, -m] })
            .find(|k| !s.contains(k) && admissible(*k))
        else {
            stop = Some(give_up(opts, format!("no admissible index with |k| ≤ {budget} at step {}", step + 1))?);
            break;
        };
        let tw = rot.orbit_point(k);
        let sides: Vec<IntervalSet> = targets.iter().map(|v| v.translate(&-tw)).collect();
        cur = cur.iter().flat_map(|r| sides.iter().map(move |v| r.intersect(v))).collect();
        s.push(k);
        regions.push(cur.clone());
    }

    // leaves first, then hulls per component upwards
    let n = s.len();
    let mut levels: Levels = vec![Vec::new(); n];
    if n == 0 {
        return Ok((s, levels, stop));
    }
    levels[n - 1] = regions[n - 1]
        .iter()
        .map(|r| {
            let (l, h) = r
                .components()
                .into_iter()
                .max_by(|x, y| rot.cmp(&(x.1 - x.0), &(y.1 - y.0)))
                .expect("admissible regions are nonempty");
            let (lo, len) = shrink(rot, rd, l, h - l);
            vec![Arc { lo, len }]
        })
        .collect();
    for l in (0..n - 1).rev() {
        let below = std::mem::take(&mut levels[l + 1]);
        levels[l] = regions[l]
            .iter()
            .enumerate()
            .map(|(a, r)| hulls(rot, r, below[2 * a].iter().chain(&below[2 * a + 1])))
            .collect();
        levels[l + 1] = below;
    }
    Ok((s, levels, stop))
}

// for each component of r holding some of the arcs, the hull of those arcs
fn hulls<'a>(rot: &Rotation, r: &IntervalSet, arcs: impl Iterator<Item = &'a Arc>) -> Vec<Arc> {
    let comps = r.components();
    let mut spans: Vec<Option<(OrbitNumber, OrbitNumber)>> = vec![None; comps.len()];
    for a in arcs {
        let (i, off) = comps
            .iter()
            .enumerate()
            .find_map(|(i, (l, h))| {
                let off = rot.frac(&(a.lo - *l));
                rot.le(&(off + a.len), &(*h - *l)).then_some((i, off))
            })
            .expect("child arc lies in a component of its parent region");
        let end = off + a.len;
        spans[i] = Some(match spans[i] {
            None => (off, end),
            Some((x, y)) => (rot.min(x, off), rot.max(y, end)),
        });
    }
    comps
        .iter()
        .zip(spans)
        .filter_map(|((l, _), sp)| sp.map(|(x, y)| Arc { lo: rot.frac(&(*l + x)), len: y - x }))
        .collect()
}

/// Indices, witness arcs per level, and why a partial build stopped.
type Built = (Vec<i128>, Vec<Vec<Arc>>, Option<String>);

// ---- single-arc induction ----

fn arcs_build(
    rot: &Rotation,
    rd: &ReturnData,
    targets: &[&IntervalSet; 2],
    n: usize,
    opts: &BuildOptions,
) -> Result<Built> {
    let mut s: Vec<i128> = Vec::with_capacity(n);
    let mut levels: Vec<Vec<Arc>> = Vec::with_capacity(n);
    for step in 0..n {
        let t = match levels.last().map(|us| next_index(rot, rd, targets, us, opts.budget)) {
            None => 0,
            Some(Ok(t)) => t,
            Some(Err(Error::SearchExhausted(msg))) => return Ok((s, levels, Some(give_up(opts, msg)?))),
            Some(Err(e)) => return Err(e),
        };
        let tw = rot.orbit_point(t);
        let parents: Vec<Option<Arc>> = match levels.last() {
            None => vec![None],
            Some(us) => us.iter().copied().map(Some).collect(),
        };
        let mut next = Vec::with_capacity(2 * parents.len());
        for p in &parents {
            for v in targets {
                let Some(a) = child(rot, rd, p.as_ref(), v, &tw, opts.strategy) else {
                    let why = give_up(opts, format!("no room for a witness at step {}", step + 1))?;
                    return Ok((s, levels, Some(why)));
                };
                next.push(a);
            }
        }
        s.push(t);
        levels.push(next);
    }
    Ok((s, levels, None))
}

// smallest |k| with every U_a + {kω} meeting both interiors
fn next_index(rot: &Rotation, rd: &ReturnData, targets: &[&IntervalSet; 2], us: &[Arc], budget: i128) -> Result<i128> {
    let mut adm = IntervalSet::full(*rot);
    for u in us {
        let half = u.len.half();
        for v in targets {
            // {θ : (U + θ) ∩ int V ≠ ∅}, closed up
            let a = v.translate(&-(u.lo + half)).thicken(&half);
            adm = adm.intersect(&a);
        }
        if adm.is_empty() {
            return Err(Error::SearchExhausted("admissible set is empty".into()));
        }
    }
    let admissible = |k: i128| {
        let tw = rot.orbit_point(k);
        us.iter()
            .all(|u| targets.iter().all(|v| v.overlaps_arc(&(u.lo + tw), &u.len)))
    };
    // open arcs still to search; split where the closure adds a false point
    let mut arcs: Vec<(OrbitNumber, OrbitNumber)> =
        adm.components().into_iter().map(|(l, h)| (l, h - l)).collect();
    for _ in 0..64 {
        let best = arcs
            .iter()
            .enumerate()
            .filter_map(|(i, (l, len))| rd.first_hit_signed(l, len).map(|k| (k.abs(), k < 0, k, i)))
            .min();
        let Some((abs, _, k, i)) = best else {
            return Err(Error::SearchExhausted("no orbit point in the admissible set".into()));
        };
        if abs > budget {
            return Err(Error::SearchExhausted(format!("first admissible index {k} exceeds budget {budget}")));
        }
        if admissible(k) {
            return Ok(k);
        }
        let (l, len) = arcs.swap_remove(i);
        let cut = l + rot.frac(&(rot.orbit_point(k) - l));
        arcs.push((l, cut - l));
        arcs.push((cut, l + len - cut));
    }
    Err(Error::SearchExhausted("admissible set degenerates at touching points".into()))
}

// U_{ai}: a piece of U_a ∩ (V − t), shrunk into the interior
fn child(rot: &Rotation, rd: &ReturnData, parent: Option<&Arc>, v: &IntervalSet, tw: &OrbitNumber, strategy: Strategy) -> Option<Arc> {
    let moved = match parent {
        None => v.clone(),
        Some(p) => IntervalSet::arc(*rot, p.lo + *tw, p.len).intersect(v),
    };
    let comps = moved.components();
    let pick = match (strategy, parent) {
        (Strategy::EndpointPush, Some(p)) => {
            // nearest piece clockwise-after the left end of U_a + t
            let start = p.lo + *tw;
            comps.iter().min_by(|x, y| rot.cmp(&rot.frac(&(x.0 - start)), &rot.frac(&(y.0 - start))))
        }
        _ => comps.iter().max_by(|x, y| rot.cmp(&(x.1 - x.0), &(y.1 - y.0))),
    }?;
    let (l, h) = *pick;
    let (lo, len) = shrink(rot, rd, l - *tw, h - l);
    (rot.sign(&len) == Ordering::Greater).then_some(Arc { lo, len })
}

// closed sub-arc of the open arc (l, l+len) with orbit-point endpoints near its ends
fn shrink(rot: &Rotation, rd: &ReturnData, l: OrbitNumber, len: OrbitNumber) -> (OrbitNumber, OrbitNumber) {
    let m = len.scale(1, 16);
    let lift = |k: i128, base: &OrbitNumber| *base + rot.frac(&(rot.orbit_point(k) - *base));
    let end = l + len - m;
    match (rd.first_hit(&l, &m), rd.first_hit(&end, &m)) {
        (Some(a), Some(b)) => {
            let lo = lift(a, &l);
            let hi = lift(b, &end);
            (rot.frac(&lo), hi - lo)
        }
        _ => (rot.frac(&(l + m)), len - m - m),
    }
}

/// Result of checking all 2^|S| combinations of translates.
#[derive(Clone, Debug, Serialize)]
pub struct FreeSetReport {
    pub s: Vec<i128>,
    pub subsets: u64,
    /// P (bit ℓ set iff s_ℓ ∈ P) whose H(S*, P*) is empty
    pub empty: Vec<String>,
    pub free: bool,
}

/// H(S*, P*) = ∩_{s∈P}(W − s*) ∩ ∩_{s∉P}(W^c − s*) for every P ⊆ S.
///
/// Sets are regular closed, so a nonempty result contains an open arc and
/// hence generic shifts off the finitely many boundary orbits.
pub fn verify_free_set(w: &WindowSpec, s: &[i128]) -> FreeSetReport {
    let rot = w.rotation;
    let wc = w.set.complement();
    let shifted: Vec<[IntervalSet; 2]> = s
        .iter()
        .map(|&k| {
            let t = -rot.orbit_point(k);
            [wc.translate(&t), w.set.translate(&t)]
        })
        .collect();
    let mut empty = Vec::new();
    let mut stack = vec![(IntervalSet::full(rot), String::new())];
    while let Some((h, bits)) = stack.pop() {
        let l = bits.len();
        if l == s.len() {
            continue;
        }
        // push 1 first so 0 pops first: lexicographic output
        for b in [1usize, 0] {
            let next = h.intersect(&shifted[l][b]);
            let mut nb = bits.clone();
            nb.push(if b == 1 { '1' } else { '0' });
            if next.is_empty() {
                empty.push(nb);
            } else {
                stack.push((next, nb));
            }
        }
    }
    // an empty node makes all of its extensions empty; report full patterns
    let mut full: Vec<String> = Vec::new();
    for prefix in &empty {
        let free_bits = s.len() - prefix.len();
        for tail in 0..(1u64 << free_bits) {
            let t = if free_bits == 0 {
                String::new()
            } else {
                format!("{:0width$b}", tail, width = free_bits)
            };
            full.push(format!("{prefix}{t}"));
        }
    }
    full.sort();
    FreeSetReport {
        s: s.to_vec(),
        subsets: 1 << s.len(),
        free: full.is_empty(),
        empty: full,
    }
}
