//! Acceptance runner: one PASS/FAIL line per criterion. Exits nonzero on an
//! unexpected failure, or when a criterion listed as infeasible passes.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use cps_windows::arith::{OrbitNumber, Rotation};
use cps_windows::birkhoff::birkhoff_fiber_agreement;
use cps_windows::cantor::{Access, CantorApprox, ConstructionPlan};
use cps_windows::certificate::verify_certificate;
use cps_windows::complexity::{patch_complexity, ComplexityTable};
use cps_windows::cps::{critical_points, fiber_enumerate, model_set, similarity_classes, check_ldc, PlanarCps};
use cps_windows::independence::{build_with, verify_free_set, BuildOptions};
use cps_windows::interval::IntervalSet;
use cps_windows::measure::measure_estimate_check;
use cps_windows::pseudolines::{decompose, project_line, Cps3};
use cps_windows::window::{Genericity, WindowSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_returns, factor_count, numeric_cmp, pseudoline_oracle};

/// Criteria that cannot pass as stated, with the reason.
const KNOWN_INFEASIBLE: &[(usize, &str)] = &[
    (
        6,
        "no index extends the size-3 independence set of window_W within |k| <= 2^20 at depth 3; \
         a size-10 set needs a deeper window than the component budget allows",
    ),
    (
        11,
        "an isolated fibre point carries mass 3*eps of f, so candidates differing in one point \
         deviate by 3*eps/(2N), above the stated 2*eps/(2N) bound once eps is small",
    ),
];

type Outcome = Result<String, String>;
type Criterion = (usize, &'static str, fn() -> Outcome);

fn r(n: i128, m: i128) -> OrbitNumber {
    OrbitNumber::rational(n, m)
}

fn silver() -> Rotation {
    Rotation::silver()
}

fn cantor(depth: usize) -> CantorApprox {
    CantorApprox::build(&ConstructionPlan::new(silver(), r(1, 10), depth).unwrap()).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---- 1 ----

fn random_number(rng: &mut ChaCha8Rng) -> OrbitNumber {
    let big = 1i128 << 40;
    OrbitNumber::ratio(rng.gen_range(-big..=big), rng.gen_range(-big..=big), rng.gen_range(1..=1 << 20))
}

fn random_set(rot: Rotation, rng: &mut ChaCha8Rng) -> IntervalSet {
    let mut s = IntervalSet::empty(rot);
    for _ in 0..rng.gen_range(1..=4) {
        let lo = OrbitNumber::ratio(rng.gen_range(-50..=50), rng.gen_range(-50..=50), rng.gen_range(1..=60));
        let len = r(rng.gen_range(1..=40), 100);
        s = s.union(&IntervalSet::arc(rot, rot.frac(&lo), len));
    }
    s
}

fn criterion_1() -> Outcome {
    let rot = silver();
    let rd = cps_windows::returns::ReturnData::deepest(rot);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut undecided = 0;
    for i in 0..100_000 {
        let x = random_number(&mut rng);
        let y = match i % 3 {
            0 => random_number(&mut rng),
            // tiny gap: x ± ‖q_n ω‖ with q_n up to the deepest level
            1 => {
                let n = rng.gen_range(1..=rd.max_level());
                let step = rd.len(n);
                if rng.gen() {
                    x + step
                } else {
                    x - step
                }
            }
            _ => {
                let k = rng.gen_range(2..=1000);
                OrbitNumber::ratio(x.a() * k, x.b() * k, x.den() * k)
            }
        };
        match numeric_cmp(&rot, &x, &y) {
            Some(o) => ensure(rot.cmp(&x, &y) == o, || format!("{x} vs {y}: exact {:?}, numeric {o:?}", rot.cmp(&x, &y)))?,
            None => undecided += 1,
        }
    }
    ensure(undecided == 0, || format!("{undecided} comparisons undecided numerically"))?;
    for _ in 0..10_000 {
        let (a, b) = (random_set(rot, &mut rng), random_set(rot, &mut rng));
        let lhs = a.union(&b).measure() + a.intersect(&b).measure();
        ensure(lhs == a.measure() + b.measure(), || "measure additivity fails".into())?;
        ensure(a.difference(&b).measure() + a.intersect(&b).measure() == a.measure(), || "difference split fails".into())?;
    }
    Ok("1e5 comparisons agree with 200-bit fixed point; 1e4 pairs additive".into())
}

// ---- 2 ----

fn criterion_2() -> Outcome {
    let rot = silver();
    let rd = cps_windows::returns::ReturnData::new(rot, 16).map_err(|e| e.to_string())?;
    let brute = brute_returns(&rot, 100_000);
    let expect = vec![2, 5, 12, 29, 70, 169];
    ensure(rd.times(6) == expect, || format!("times = {:?}", rd.times(6)))?;
    // the brute minima start at ℓ = 1 (‖ω‖ itself)
    ensure(brute[1..7] == expect[..], || format!("brute force gives {:?}", &brute[..8]))?;
    let deep: Vec<i128> = (1..=rd.max_level()).map(|n| rd.q(n)).filter(|&q| q <= 100_000).collect();
    ensure(brute[1..] == deep[..], || format!("brute {brute:?} vs q {deep:?}"))?;
    for n in 0..=10 {
        let lhs = rd.len(n).scale(rd.q(n + 1), 1) + rd.len(n + 1).scale(rd.q(n), 1);
        ensure(lhs == OrbitNumber::ONE, || format!("q-length identity fails at n = {n}: {lhs}"))?;
    }
    Ok(format!("times {expect:?}; brute minima up to 1e5: {brute:?}"))
}

// ---- 3 ----

fn criterion_3() -> Outcome {
    let c = cantor(3);
    let rot = c.rotation();
    let p = &c.plan;
    let floor = p.beta[..p.depth - 1].iter().fold(OrbitNumber::ONE, |acc, b| acc - b.scale(3, 1));
    ensure(rot.le(&floor, &c.body().measure()), || "measure(C_L) below 1 - sum 3 beta".into())?;
    for l in 0..p.depth - 1 {
        ensure(rot.lt(&c.removed[l], &p.beta[l].scale(3, 1)), || format!("step {} removes too much", l + 1))?;
    }
    let ret = c.returns();
    let mut tiles = 0u64;
    for l in 2..=p.depth {
        let gaps = &c.level(l).gaps;
        let by_hi: HashMap<OrbitNumber, usize> = gaps.iter().map(|g| (g.hi(&rot), g.level)).collect();
        let by_lo: HashMap<OrbitNumber, usize> = gaps.iter().map(|g| (g.lo, g.level)).collect();
        let mut bad = None;
        c.for_each_tile(l, &mut |t, acc| {
            tiles += 1;
            let lo = rot.frac(&ret.tile_left(&t));
            let hi = rot.frac(&(lo + ret.tile_len(&t)));
            let (left, right) = (by_hi.get(&lo).copied(), by_lo.get(&hi).copied());
            let ok = match acc {
                Access::None => left.is_none() && right.is_none(),
                Access::Left(k) => left == Some(k) && right.is_none(),
                Access::Right(k) => right == Some(k) && left.is_none(),
            };
            if !ok {
                bad = Some(format!("level {l} tile {t:?}: reported {acc:?}, gaps left {left:?} right {right:?}"));
            }
            ok
        })
        .map_err(|e| e.to_string())?;
        if let Some(b) = bad {
            return Err(b);
        }
    }
    // gap length determines level and vice versa
    let mut len_level: HashMap<OrbitNumber, usize> = HashMap::new();
    let mut level_len: HashMap<usize, OrbitNumber> = HashMap::new();
    for g in c.gaps() {
        ensure(*len_level.entry(g.len).or_insert(g.level) == g.level, || format!("length {} at two levels", g.len))?;
        ensure(*level_len.entry(g.level).or_insert(g.len) == g.len, || format!("level {} has two lengths", g.level))?;
    }
    c.gap_lengths_by_level()?;
    Ok(format!(
        "measure {:.6} >= {:.6}; {tiles} tiles one-sided; {} gaps over {} levels",
        rot.to_f64(&c.body().measure()),
        rot.to_f64(&floor),
        c.gaps().len(),
        level_len.len()
    ))
}

// ---- 4, 5 ----

/// Critical shifts t = {kω} − e with at least two hits of orbit index ≤ 10^4.
fn critical_shifts(w: &WindowSpec, want: usize) -> Vec<(OrbitNumber, Vec<i128>)> {
    let rot = w.rotation;
    let bd = w.boundary();
    let stride = (bd.len() / want).max(1);
    let mut out = Vec::new();
    'outer: for k in [0i128, 1, 7, 40, 333] {
        for e in bd.iter().step_by(stride) {
            let t = rot.frac(&(rot.orbit_point(k) - *e));
            let hits = critical_points(w, &t, 10_000);
            if hits.len() >= 2 {
                out.push((t, hits));
                if out.len() >= want {
                    break 'outer;
                }
            }
        }
    }
    out
}

/// Radius reaching every orbit index up to 10^4 in the standard scheme.
fn fiber_radius(cps: &PlanarCps) -> OrbitNumber {
    let rot = cps.omega;
    let slope = (rot.to_f64(&cps.a11) - rot.omega_f64() * rot.to_f64(&cps.a12)).abs();
    r((10_000.0 * slope).ceil() as i128 + 2, 1)
}

fn criterion_4() -> Outcome {
    let c = cantor(3);
    let w = WindowSpec::w(&c, Genericity::Separated);
    let cps = PlanarCps::standard(w.rotation);
    let radius = fiber_radius(&cps);
    let shifts = critical_shifts(&w, 105);
    ensure(shifts.len() >= 100, || format!("only {} critical shifts with two hits", shifts.len()))?;
    let mut most = 0;
    for (t, hits) in &shifts {
        let cl = similarity_classes(&w, t, hits).map_err(|e| e.to_string())?;
        ensure(cl.classes.len() == 1, || format!("{} classes at t = {t}", cl.classes.len()))?;
        let fib = fiber_enumerate(&cps, &w, t, &radius).map_err(|e| e.to_string())?;
        ensure(fib.candidates.len() <= 2, || format!("{} candidates at t = {t}", fib.candidates.len()))?;
        most = most.max(hits.len());
    }
    Ok(format!("{} shifts, up to {most} hits each: 1 class, <= 2 candidates", shifts.len()))
}

fn criterion_5() -> Outcome {
    let c = cantor(3);
    let w = WindowSpec::v(&c, Genericity::Separated);
    let rot = w.rotation;
    let cps = PlanarCps::standard(rot);
    let radius = fiber_radius(&cps);
    // the four endpoint classes lie on distinct orbits, so every critical
    // shift has a single hit; sample t = {kω} − e over k and the endpoints
    let mut shifts = Vec::new();
    for e in w.boundary() {
        for i in 0..30 {
            let t = rot.frac(&(rot.orbit_point(-9_000 + 600 * i + 13 * i * i % 97) - e));
            let hits = critical_points(&w, &t, 10_000);
            if !hits.is_empty() {
                shifts.push((t, hits));
            }
        }
    }
    ensure(shifts.len() >= 100, || format!("only {} critical shifts", shifts.len()))?;
    for (t, hits) in &shifts {
        let rep = check_ldc(&w, t, hits).map_err(|e| e.to_string())?;
        ensure(rep.ldc, || format!("LDC fails at t = {t}: {:?}", rep.witness))?;
        let fib = fiber_enumerate(&cps, &w, t, &radius).map_err(|e| e.to_string())?;
        let h = fib.hits.len();
        ensure(h == hits.len(), || format!("fibre sees {h} hits, critical_points {}", hits.len()))?;
        ensure(fib.candidates.len() == h + 1, || format!("{} candidates for {h} hits at t = {t}", fib.candidates.len()))?;
        // Γ+ first, then Γ+ minus each hit once
        let all: Vec<usize> = (0..h).collect();
        ensure(fib.candidates[0] == all, || "first candidate is not the maximal one".into())?;
        let mut dropped = BTreeSet::new();
        for cand in &fib.candidates[1..] {
            ensure(cand.len() + 1 == h, || "candidate misses more than one point".into())?;
            dropped.insert(all.iter().find(|i| !cand.contains(i)).copied());
        }
        ensure(dropped.len() == h, || "two candidates drop the same point".into())?;
    }
    // for contrast: raw endpoints share one orbit, and two left ends of
    // removed gaps hit together at the centred shift
    let exact = WindowSpec::v(&c, Genericity::Exact);
    let bd = exact.boundary();
    let k = -(bd[3].b() - bd[0].b()) / 2;
    let t = rot.frac(&(rot.orbit_point(k) - bd[0]));
    let hits = critical_points(&exact, &t, 2_000_000);
    let raw = check_ldc(&exact, &t, &hits).map_err(|e| e.to_string())?;
    Ok(format!(
        "{} single-hit shifts: LDC holds, 2 candidates (maximal, maximal minus the hit); \
         raw-endpoint V at a {}-hit shift: LDC {}",
        shifts.len(),
        hits.len(),
        if raw.ldc { "holds" } else { "fails" }
    ))
}

// ---- 6 ----

fn criterion_6() -> Outcome {
    let c = cantor(3);
    let w = WindowSpec::w(&c, Genericity::Separated);
    let v0 = WindowSpec::custom(w.set.complement());
    let opts = BuildOptions { budget: 1 << 12, partial: true, ..BuildOptions::default() };
    let cert = build_with(&v0, &w, 10, &opts).map_err(|e| e.to_string())?;
    let rep = verify_certificate(&cert.to_json().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let prefix = &cert.s[..cert.s.len().min(8)];
    let free = verify_free_set(&w, prefix);
    let detail = format!(
        "largest S = {:?} (n = {}), certificate {} over {} assignments, free set over {} subsets {}",
        cert.s,
        cert.s.len(),
        if rep.ok { "verified" } else { "REJECTED" },
        rep.assignments,
        free.subsets,
        if free.free { "ok" } else { "fails" }
    );
    ensure(rep.ok && free.free, || detail.clone())?;
    ensure(cert.s.len() >= 10 && free.subsets == 256, || detail.clone())?;
    Ok(detail)
}

// ---- 7 ----

fn criterion_7() -> Outcome {
    let rot = silver();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let bodies: Vec<(String, IntervalSet)> = {
        let c2 = cantor(2);
        let c3 = cantor(3);
        vec![
            ("C_2".into(), c2.body().clone()),
            ("C_3".into(), c3.body().clone()),
            ("W_3".into(), WindowSpec::w(&c3, Genericity::Separated).set),
            ("V_3".into(), WindowSpec::v(&c3, Genericity::Separated).set),
        ]
    };
    let mut checked = 0;
    let mut tightest = f64::INFINITY;
    for i in 0..64 {
        let (name, c) = if i % 5 == 4 {
            ("random".to_string(), random_set(rot, &mut rng))
        } else {
            bodies[i % 4].clone()
        };
        let levels = 1 + i % 3;
        let scale = r(1, [50, 100, 1000, 10_000][rng.gen_range(0..4)]);
        let eps: Vec<OrbitNumber> = (0..levels).map(|l| scale.scale(1, 1 << l)).collect();
        let xi: Vec<Vec<OrbitNumber>> = eps
            .iter()
            .enumerate()
            .map(|(l, e)| (0..2usize << l).map(|_| e.scale(rng.gen_range(-1000..=1000), 1000)).collect())
            .collect();
        let rep = measure_estimate_check(&c, &xi, &eps).map_err(|e| format!("{name}: {e}"))?;
        ensure(rep.holds, || format!("{name} family {i}: lhs {} < rhs {}", rot.to_f64(&rep.lhs), rot.to_f64(&rep.rhs)))?;
        tightest = tightest.min(rot.to_f64(&(rep.lhs - rep.rhs)));
        checked += 1;
    }
    Ok(format!("{checked} families hold exactly; smallest slack {tightest:.3e}"))
}

// ---- 8 ----

fn criterion_8() -> Outcome {
    let rot = silver();
    let w = WindowSpec::interval(rot, OrbitNumber::ZERO, rot.omega(), false, true).map_err(|e| e.to_string())?;
    let t = patch_complexity(&w, 20).map_err(|e| e.to_string())?;
    for n in 1..=20 {
        let brute = factor_count(&rot, &OrbitNumber::ZERO, &rot.omega(), n, 20_000) as u64;
        ensure(t.get(n) == Some(n as u64 + 1) && brute == n as u64 + 1, || {
            format!("n = {n}: cells {:?}, factors {brute}", t.get(n))
        })?;
    }
    Ok("p(n) = n + 1 for n <= 20, equal to factor enumeration".into())
}

// ---- 9 ----

fn table_ok(name: &str, t: &ComplexityTable) -> Result<(), String> {
    ensure(t.is_monotone(), || format!("{name}: p(n) not monotone"))?;
    let bad = t.subadditivity_violations();
    ensure(bad.is_empty(), || format!("{name}: p(n+m) > p(n)p(m) at {:?}", &bad[..bad.len().min(3)]))
}

fn criterion_9() -> Outcome {
    let c = cantor(3);
    let w = WindowSpec::w(&c, Genericity::Separated);
    let x = WindowSpec::random(&c, "", 7, Genericity::Separated).map_err(|e| e.to_string())?;
    let tw = patch_complexity(&w, 64).map_err(|e| e.to_string())?;
    let tx = patch_complexity(&x, 64).map_err(|e| e.to_string())?;
    table_ok("window_W", &tw)?;
    table_ok("random", &tx)?;
    let row = |t: &ComplexityTable| [1, 2, 4, 8, 16, 32, 64].map(|n| t.get(n).unwrap());
    let detail = format!("n = [1,2,4,8,16,32,64]: W {:?}, random(seed 7) {:?}", row(&tw), row(&tx));
    ensure(tx.get(64) > tw.get(64), || detail.clone())?;
    Ok(detail)
}

// ---- 10 ----

fn criterion_10() -> Outcome {
    let rot = silver();
    let cps = Cps3::example(rot).map_err(|e| e.to_string())?;
    let planar = cps.planar();
    let windows = [
        ("W_3", WindowSpec::w(&cantor(3), Genericity::Separated)),
        ("interval", WindowSpec::interval(rot, r(1, 10), r(3, 5), false, false).map_err(|e| e.to_string())?),
    ];
    let mut points = 0usize;
    for (name, w) in &windows {
        let tube = cps.tube(w);
        for m_ball in [3i128, 10, 25, 50] {
            for t in [OrbitNumber::ZERO, r(2, 7), rot.frac(&(rot.omega() - w.boundary()[0]))] {
                let radius = r(m_ball, 1);
                let lines = decompose(&cps, w, &t, &radius).map_err(|e| e.to_string())?;
                let got: BTreeSet<(i128, i128, i128)> =
                    lines.iter().flat_map(|l| l.points.iter().map(|p| (p.n, p.m, p.k))).collect();
                let total: usize = lines.iter().map(|l| l.points.len()).sum();
                ensure(total == got.len(), || format!("{name}: a point lies on two pseudolines"))?;
                let want = pseudoline_oracle(&cps, w, &t, m_ball);
                ensure(got == want, || {
                    format!("{name} M={m_ball} t={t}: {} points vs oracle {}", got.len(), want.len())
                })?;
                points += got.len();
                let cap = tube.kappa * 2.0 * m_ball as f64;
                ensure(lines.len() as f64 <= cap, || {
                    format!("{name} M={m_ball}: {} lines > kappa*2M = {cap:.1}", lines.len())
                })?;
                let r2 = rot.mul(&radius, &radius);
                for l in &lines {
                    let proj = project_line(l, &cps, &radius);
                    let off = cps.external[0][1].scale(l.m, 1);
                    let reach = radius + rot.abs(off);
                    let expect: Vec<(i128, i128, OrbitNumber)> = model_set(&planar, w, &l.shift, &reach)
                        .map_err(|e| e.to_string())?
                        .points
                        .into_iter()
                        .filter(|q| {
                            let x = cps.external_point(q.n, l.m, q.m);
                            rot.le(&(rot.mul(&x[0], &x[0]) + rot.mul(&x[1], &x[1])), &r2)
                        })
                        .map(|q| (q.n, q.m, q.x + off))
                        .collect();
                    let have: Vec<(i128, i128, OrbitNumber)> = proj.points.iter().map(|q| (q.n, q.m, q.x)).collect();
                    ensure(have == expect, || format!("{name} M={m_ball}: projection of line {} differs", l.m))?;
                }
            }
        }
    }
    Ok(format!("{points} points match the oracle; line counts within kappa*2M; projections exact"))
}

// ---- 11 ----

fn criterion_11() -> Outcome {
    let c = cantor(3);
    let w = WindowSpec::v(&c, Genericity::Separated);
    let cps = PlanarCps::standard(w.rotation);
    let t = -w.boundary()[0];
    let mut rows = Vec::new();
    let mut within_two = true;
    let mut within_three = true;
    for eps in [r(1, 100), r(1, 10), r(1, 3), r(2, 1)] {
        let rep = birkhoff_fiber_agreement(&cps, &w, &t, &OrbitNumber::ZERO, &eps, 10_000).map_err(|e| e.to_string())?;
        within_two &= rep.within_one_point_bound;
        within_three &= rep.within_isolated_point_bound;
        rows.push(format!(
            "eps={} dev={:.3e} 2eps-bound={:.3e} 3eps-bound={:.3e}",
            eps,
            rep.max_deviation_f64,
            w.rotation.to_f64(&rep.one_point_bound),
            w.rotation.to_f64(&rep.isolated_point_bound)
        ));
    }
    let detail = format!("{}; 3eps bound {}", rows.join("; "), if within_three { "holds" } else { "fails" });
    ensure(within_two, || detail.clone())?;
    Ok(detail)
}

// ---- 12 ----

fn cpsw(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cpsw")).args(args).output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("cpsw {} exited {:?}: {}", args.join(" "), out.status.code(), String::from_utf8_lossy(&out.stderr))
    })
}

fn criterion_12() -> Outcome {
    let first = tempfile::tempdir().map_err(|e| e.to_string())?;
    let second = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (first.path().to_str().unwrap(), second.path().to_str().unwrap());
    let runs: [&[&str]; 4] = [
        &["construct", "--kind", "w", "--out", "w.json", "--svg", "w.svg"],
        &["complexity", "--kind", "random", "--seed", "3", "--nmax", "32", "--csv", "p.csv"],
        &["pseudolines", "--kind", "interval", "--radius", "20", "--csv", "lines.csv"],
        &["independence", "--kind", "interval", "--n", "2", "--out", "cert.json"],
    ];
    let mut files = 0;
    for run in runs {
        let mut args = vec!["--outdir", a];
        args.extend_from_slice(run);
        cpsw(&args)?;
        let manifest = format!("{a}/{}.manifest.json", run[0]);
        cpsw(&["--outdir", b, "rerun", &manifest])?;
    }
    for entry in std::fs::read_dir(first.path()).map_err(|e| e.to_string())? {
        let name = entry.map_err(|e| e.to_string())?.file_name();
        let (x, y) = (std::fs::read(first.path().join(&name)), std::fs::read(Path::new(b).join(&name)));
        ensure(matches!((&x, &y), (Ok(x), Ok(y)) if x == y), || format!("{name:?} differs on rerun"))?;
        files += 1;
    }
    Ok(format!("4 manifests rerun; {files} files byte-identical"))
}

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "exact arithmetic", criterion_1),
        (2, "return times", criterion_2),
        (3, "Cantor construction", criterion_3),
        (4, "perfect self-similarity", criterion_4),
        (5, "locally disjoint complements", criterion_5),
        (6, "independence certificate n=10", criterion_6),
        (7, "measure estimate", criterion_7),
        (8, "Sturmian complexity", criterion_8),
        (9, "complexity separation", criterion_9),
        (10, "pseudolines", criterion_10),
        (11, "Birkhoff fibre agreement", criterion_11),
        (12, "reproducibility", criterion_12),
    ];
    let limits: HashMap<usize, Duration> =
        [(1, 10), (2, 5), (3, 30), (6, 120), (10, 60)].map(|(i, s)| (i, Duration::from_secs(s))).into();
    let mut unexpected = 0;
    for (id, name, f) in criteria {
        let start = Instant::now();
        let mut outcome = f();
        let took = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, limits.get(&id)) {
            if took > *limit {
                outcome = Err(format!("took {took:.1?}, limit {limit:?}"));
            }
        }
        let known = KNOWN_INFEASIBLE.iter().find(|k| k.0 == id);
        match (&outcome, known) {
            (Ok(d), None) => println!("PASS {id:>2} {name}: {d} [{took:.1?}]"),
            (Err(d), Some((_, why))) => println!("FAIL {id:>2} {name} (known infeasible: {why}): {d} [{took:.1?}]"),
            (Err(d), None) => {
                unexpected += 1;
                println!("FAIL {id:>2} {name}: {d} [{took:.1?}]");
            }
            (Ok(d), Some(_)) => {
                unexpected += 1;
                println!("PASS {id:>2} {name} (listed infeasible but passed; update the list): {d} [{took:.1?}]");
            }
        }
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected result(s)");
        std::process::exit(1);
    }
}
