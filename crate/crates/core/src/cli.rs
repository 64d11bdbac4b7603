//! The `cpsw` front end: one subcommand per diagnostic, JSON configs that
//! override flags, and a manifest per run.
//!
//! A manifest records the merged config (with its SHA-256), the crate
//! version, seeds, input and output hashes. `cpsw rerun` executes the stored
//! config again and compares every output byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::arith::{parse_rational, OrbitNumber, Rotation};
use crate::birkhoff::birkhoff_fiber_agreement;
use crate::cantor::{CantorApprox, ConstructionPlan};
use crate::certificate::verify_certificate;
use crate::complexity::{entropy_semicontinuity_experiment, patch_complexity};
use crate::cps::{check_ldc, coding_word, critical_points, fiber_enumerate, model_set, PlanarCps};
use crate::error::{Error, Result};
use crate::independence::{build_with, verify_free_set, BuildOptions, Strategy, DEFAULT_INDEX_BUDGET};
use crate::measure::measure_estimate_check;
use crate::pseudolines::{self, decompose, fiber_spanning_bound, Cps3};
use crate::window::{Genericity, WindowSpec};

pub const MANIFEST_FORMAT: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "cpsw", version, about = "Irregular cut-and-project windows: construction and diagnostics")]
pub struct Cli {
    /// JSON object whose keys override this command's flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Cap on worker threads; outputs do not depend on it
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory receiving outputs and the manifest
    #[arg(long, global = true, default_value = ".")]
    pub outdir: PathBuf,
    /// Manifest file name (default: <command>.manifest.json)
    #[arg(long, global = true)]
    pub manifest: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Build a window and write it as JSON
    Construct(ConstructArgs),
    /// Exact measure of a window (and the Cantor body bound when built here)
    Measure(MeasureArgs),
    /// Points of Λ(W + t) in [−R, R]
    Modelset(ModelsetArgs),
    /// Coding word k ↦ [{kω} ∈ W + t]
    Coding(CodingArgs),
    /// Word complexity p(n), 1 ≤ n ≤ nmax
    Complexity(ComplexityArgs),
    /// Fibre candidates of the torus parametrisation at t
    Fiber(FiberArgs),
    /// Locally-disjoint-complements check at t
    LdcCheck(FiberArgs),
    /// Independence certificate for V0 = closure(W^c), V1 = W
    Independence(IndependenceArgs),
    /// Check a certificate from its JSON alone
    VerifyCert(VerifyArgs),
    /// Exhaustive free-set check for an index list
    FreeSet(FreeSetArgs),
    /// Both sides of the measure estimate for a ξ family
    MeasureEstimate(EstimateArgs),
    /// Birkhoff averages over fibre candidates
    Birkhoff(BirkhoffArgs),
    /// Pseudoline decomposition of a (ℝ², ℝ) model set
    Pseudolines(PseudolineArgs),
    /// Complexity of spliced fillings W(z(n; x, y))
    Semicontinuity(SemicontinuityArgs),
    /// Re-execute a manifest and compare outputs byte for byte
    #[serde(skip)]
    Rerun(RerunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Construct(_) => "construct",
            Command::Measure(_) => "measure",
            Command::Modelset(_) => "modelset",
            Command::Coding(_) => "coding",
            Command::Complexity(_) => "complexity",
            Command::Fiber(_) => "fiber",
            Command::LdcCheck(_) => "ldc-check",
            Command::Independence(_) => "independence",
            Command::VerifyCert(_) => "verify-cert",
            Command::FreeSet(_) => "free-set",
            Command::MeasureEstimate(_) => "measure-estimate",
            Command::Birkhoff(_) => "birkhoff",
            Command::Pseudolines(_) => "pseudolines",
            Command::Semicontinuity(_) => "semicontinuity",
            Command::Rerun(_) => "rerun",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    W,
    V,
    Random,
    Interval,
}

/// Where the window comes from: a JSON file or construction flags.
#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct WindowArgs {
    /// WindowSpec JSON written by `construct`
    #[arg(long)]
    pub window: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "w")]
    pub kind: Kind,
    /// Rotation as D,p,q,r for ω = (p + q√D)/r
    #[arg(long, default_value = "2,-1,1,1")]
    pub omega: String,
    #[arg(long, default_value = "1/10")]
    pub eps: String,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    /// Filling bits for --kind random (default: seeded)
    #[arg(long)]
    pub bits: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep the raw depth-L endpoints instead of separating the classes
    #[arg(long)]
    pub exact: bool,
    /// Interval ends for --kind interval
    #[arg(long, default_value = "0")]
    pub lo: String,
    #[arg(long, default_value = "1/3")]
    pub hi: String,
}

/// t = T + {kω} − e_i with k = --t-index and e_i = --t-boundary.
#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ShiftArgs {
    /// Rational or {"a":..,"b":..,"d":..}
    #[arg(long, default_value = "0")]
    pub t: String,
    #[arg(long)]
    pub t_index: Option<i64>,
    /// Subtract the i-th boundary point, giving a critical shift
    #[arg(long)]
    pub t_boundary: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ConstructArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    #[arg(long)]
    pub out: Option<String>,
    /// Window bar diagram
    #[arg(long)]
    pub svg: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct MeasureArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ModelsetArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub shift: ShiftArgs,
    #[arg(long, default_value = "20")]
    pub radius: String,
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub csv: Option<String>,
    #[arg(long)]
    pub svg: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct CodingArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub shift: ShiftArgs,
    #[arg(long, default_value_t = 0)]
    pub k0: i64,
    #[arg(long, default_value_t = 63)]
    pub k1: i64,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ComplexityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    #[arg(long, default_value_t = 20)]
    pub nmax: usize,
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub csv: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct FiberArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub shift: ShiftArgs,
    #[arg(long, default_value = "1000")]
    pub radius: String,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct IndependenceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_INDEX_BUDGET as i64)]
    pub budget: i64,
    #[arg(long, value_enum, default_value = "regions")]
    pub strategy: StrategyArg,
    /// Emit the certificate reached so far instead of failing on exhaustion
    #[arg(long)]
    pub partial: bool,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyArg {
    Regions,
    Arcs,
    EndpointPush,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Regions => Strategy::Regions,
            StrategyArg::Arcs => Strategy::Arcs,
            StrategyArg::EndpointPush => Strategy::EndpointPush,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct VerifyArgs {
    pub certificate: PathBuf,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct FreeSetArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    /// Comma-separated orbit indices
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub s: String,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    /// Use the Cantor body C_L instead of the window set
    #[arg(long)]
    pub body: bool,
    /// JSON {"xi": [[...], ...], "eps": [...]}; random family when absent
    #[arg(long)]
    pub xi: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// ε_1 of the random family; ε_ℓ = scale/2^{ℓ−1}
    #[arg(long, default_value = "1/100")]
    pub scale: String,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct BirkhoffArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub shift: ShiftArgs,
    #[arg(long, default_value = "0")]
    pub g0: String,
    /// ε of the test function f_{g0;ε}
    #[arg(long, default_value = "1/10")]
    pub f_eps: String,
    #[arg(long, default_value_t = 10_000)]
    pub n: i64,
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct PseudolineArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub shift: ShiftArgs,
    #[arg(long, default_value = "20")]
    pub radius: String,
    /// ε of the spanning bound
    #[arg(long, default_value = "1")]
    pub bound_eps: String,
    /// Radii for the spanning-bound table
    #[arg(long, default_value = "10,20,50,100,200")]
    pub bound_radii: String,
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub csv: Option<String>,
    #[arg(long)]
    pub svg: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SemicontinuityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    #[arg(long, default_value = "0,10,100,1000")]
    pub prefixes: String,
    #[arg(long, default_value_t = 64)]
    pub nword: usize,
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub csv: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct RerunArgs {
    /// Manifest written by an earlier run
    pub file: PathBuf,
}

// ---- parsing helpers ----

fn parse_number(s: &str) -> Result<OrbitNumber> {
    if s.trim_start().starts_with('{') {
        Ok(serde_json::from_str(s)?)
    } else {
        parse_rational(s)
    }
}

fn parse_rotation(s: &str) -> Result<Rotation> {
    let v: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad rotation {s:?}"))))
        .collect::<Result<_>>()?;
    match v[..] {
        [d, p, q, r] => Rotation::new(d, p, q, r),
        _ => Err(Error::Parse(format!("rotation needs D,p,q,r, got {s:?}"))),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|_| Error::Parse(format!("bad list entry {x:?}"))))
        .collect()
}

fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

struct Built {
    window: WindowSpec,
    cantor: Option<CantorApprox>,
    plan: Option<ConstructionPlan>,
}

/// Output collector; every byte written is hashed into the manifest.
struct Sink {
    outdir: PathBuf,
    outputs: Vec<(String, String)>,
    inputs: Vec<(String, String)>,
    stdout: String,
}

impl Sink {
    fn file(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.outdir.join(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, bytes)?;
        self.outputs.push((name.to_string(), sha256_hex(bytes)));
        Ok(())
    }

    fn json<T: Serialize>(&mut self, out: &Option<String>, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        match out {
            Some(name) => self.file(name, text.as_bytes()),
            None => {
                self.stdout.push_str(&text);
                Ok(())
            }
        }
    }

    fn read(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = fs::read(path)?;
        self.inputs.push((path.display().to_string(), sha256_hex(&bytes)));
        Ok(bytes)
    }

    fn window(&mut self, a: &WindowArgs) -> Result<Built> {
        if let Some(path) = &a.window {
            let bytes = self.read(path)?;
            return Ok(Built {
                window: serde_json::from_slice(&bytes)?,
                cantor: None,
                plan: None,
            });
        }
        let rot = parse_rotation(&a.omega)?;
        let genericity = if a.exact { Genericity::Exact } else { Genericity::Separated };
        if a.kind == Kind::Interval {
            return Ok(Built {
                window: WindowSpec::interval(rot, parse_number(&a.lo)?, parse_number(&a.hi)?, false, false)?,
                cantor: None,
                plan: None,
            });
        }
        let plan = ConstructionPlan::new(rot, parse_rational(&a.eps)?, a.depth)?;
        let c = CantorApprox::build(&plan)?;
        let window = match a.kind {
            Kind::W => WindowSpec::w(&c, genericity),
            Kind::V => WindowSpec::v(&c, genericity),
            Kind::Random => WindowSpec::random(&c, a.bits.as_deref().unwrap_or(""), a.seed, genericity)?,
            Kind::Interval => unreachable!(),
        };
        Ok(Built {
            window,
            cantor: Some(c),
            plan: Some(plan),
        })
    }
}

fn shift(w: &WindowSpec, s: &ShiftArgs) -> Result<OrbitNumber> {
    let rot = w.rotation;
    let mut t = parse_number(&s.t)?;
    if let Some(k) = s.t_index {
        t = t + rot.orbit_point(k as i128);
    }
    if let Some(i) = s.t_boundary {
        let b = w.boundary();
        let e = b
            .get(i)
            .ok_or_else(|| Error::Precondition(format!("window has {} boundary points, asked for #{i}", b.len())))?;
        t = t - *e;
    }
    Ok(t)
}

// ---- SVG ----

fn svg_window(w: &WindowSpec) -> String {
    let rot = w.rotation;
    let (width, height) = (1000.0, 80.0);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n\
         <rect x=\"0\" y=\"30\" width=\"{width}\" height=\"20\" fill=\"#eeeeee\"/>\n"
    );
    for (lo, hi) in w.set.pieces() {
        let x0 = rot.to_f64(lo) * width;
        let x1 = rot.to_f64(hi) * width;
        s.push_str(&format!(
            "<rect x=\"{x0:.3}\" y=\"30\" width=\"{:.3}\" height=\"20\" fill=\"#1f4e79\"/>\n",
            (x1 - x0).max(0.2)
        ));
    }
    s.push_str("</svg>\n");
    s
}

fn svg_points(points: &[(f64, f64)], radius: f64) -> String {
    let size = 800.0;
    let scale = size / (2.0 * radius.max(1e-9));
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n\
         <rect width=\"{size}\" height=\"{size}\" fill=\"white\"/>\n"
    );
    for (x, y) in points {
        s.push_str(&format!(
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"2\" fill=\"black\"/>\n",
            (x + radius) * scale,
            (radius - y) * scale
        ));
    }
    s.push_str("</svg>\n");
    s
}

// ---- commands ----

fn execute(cmd: &Command, sink: &mut Sink) -> Result<()> {
    match cmd {
        Command::Construct(a) => {
            let b = sink.window(&a.window)?;
            sink.json(&a.out, &b.window)?;
            if let Some(svg) = &a.svg {
                sink.file(svg, svg_window(&b.window).as_bytes())?;
            }
        }
        Command::Measure(a) => {
            let b = sink.window(&a.window)?;
            let w = &b.window;
            let rot = w.rotation;
            let m = w.set.measure();
            let mut out = json!({
                "measure": m,
                "measure_f64": rot.to_f64(&m),
                "components": w.set.components().len(),
                "boundary_points": w.boundary().len(),
                "proper": w.is_proper(),
            });
            if let (Some(c), Some(plan)) = (&b.cantor, &b.plan) {
                let body = c.body().measure();
                let bound = plan.beta.iter().fold(OrbitNumber::ONE, |acc, x| acc - x.scale(3, 1));
                out["body_measure"] = json!(body);
                out["body_measure_f64"] = json!(rot.to_f64(&body));
                out["body_lower_bound"] = json!(bound);
                out["body_bound_holds"] = json!(rot.le(&bound, &body));
            }
            sink.json(&a.out, &out)?;
        }
        Command::Modelset(a) => {
            let w = sink.window(&a.window)?.window;
            let t = shift(&w, &a.shift)?;
            let r = parse_number(&a.radius)?;
            let cps = PlanarCps::standard(w.rotation);
            let patch = model_set(&cps, &w, &t, &r)?;
            sink.json(&a.out, &patch)?;
            if let Some(csv) = &a.csv {
                let mut buf = Vec::new();
                patch.write_csv(&w.rotation, &mut buf)?;
                sink.file(csv, &buf)?;
            }
            if let Some(svg) = &a.svg {
                let pts: Vec<(f64, f64)> = patch.points.iter().map(|p| (w.rotation.to_f64(&p.x), 0.0)).collect();
                sink.file(svg, svg_points(&pts, w.rotation.to_f64(&r)).as_bytes())?;
            }
        }
        Command::Coding(a) => {
            let w = sink.window(&a.window)?.window;
            let t = shift(&w, &a.shift)?;
            let word = coding_word(&w, &t, a.k0 as i128, a.k1 as i128)?;
            let text: String = word.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect();
            sink.json(&a.out, &json!({ "t": t, "k0": a.k0, "k1": a.k1, "word": text }))?;
        }
        Command::Complexity(a) => {
            let w = sink.window(&a.window)?.window;
            let table = patch_complexity(&w, a.nmax)?;
            sink.json(&a.out, &table)?;
            if let Some(csv) = &a.csv {
                let mut buf = Vec::new();
                table.write_csv(&mut buf)?;
                sink.file(csv, &buf)?;
            }
        }
        Command::Fiber(a) => {
            let w = sink.window(&a.window)?.window;
            let t = shift(&w, &a.shift)?;
            let cps = PlanarCps::standard(w.rotation);
            let rep = fiber_enumerate(&cps, &w, &t, &parse_number(&a.radius)?)?;
            sink.json(&a.out, &rep)?;
        }
        Command::LdcCheck(a) => {
            let w = sink.window(&a.window)?.window;
            let t = shift(&w, &a.shift)?;
            let bound = w.rotation.floor(&parse_number(&a.radius)?);
            let hits = critical_points(&w, &t, bound);
            let rep = check_ldc(&w, &t, &hits)?;
            sink.json(&a.out, &json!({ "t": t, "hits": hits, "report": rep }))?;
        }
        Command::Independence(a) => {
            let v1 = sink.window(&a.window)?.window;
            let v0 = WindowSpec::custom(v1.set.complement());
            let opts = BuildOptions {
                budget: a.budget as i128,
                strategy: a.strategy.into(),
                partial: a.partial,
            };
            let cert = build_with(&v0, &v1, a.n, &opts)?;
            sink.json(&a.out, &cert)?;
        }
        Command::VerifyCert(a) => {
            let bytes = sink.read(&a.certificate)?;
            let text = String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))?;
            let rep = verify_certificate(&text)?;
            sink.json(&a.out, &rep)?;
            if !rep.ok {
                return Err(Error::Precondition(format!("certificate invalid: {} failures", rep.failures.len())));
            }
        }
        Command::FreeSet(a) => {
            let w = sink.window(&a.window)?.window;
            let s: Vec<i128> = parse_list(&a.s)?;
            sink.json(&a.out, &verify_free_set(&w, &s))?;
        }
        Command::MeasureEstimate(a) => {
            let b = sink.window(&a.window)?;
            let rot = b.window.rotation;
            let c = if a.body {
                b.cantor
                    .as_ref()
                    .ok_or_else(|| Error::Precondition("--body needs a window built from flags".into()))?
                    .body()
                    .clone()
            } else {
                b.window.set.clone()
            };
            let (xi, eps) = match &a.xi {
                Some(path) => {
                    #[derive(Deserialize)]
                    struct Family {
                        xi: Vec<Vec<OrbitNumber>>,
                        eps: Vec<OrbitNumber>,
                    }
                    let f: Family = serde_json::from_slice(&sink.read(path)?)?;
                    (f.xi, f.eps)
                }
                None => random_family(&parse_rational(&a.scale)?, a.levels, a.window.seed),
            };
            let rep = measure_estimate_check(&c, &xi, &eps)?;
            sink.json(
                &a.out,
                &json!({
                    "lhs": rep.lhs, "rhs": rep.rhs, "holds": rep.holds,
                    "lhs_f64": rot.to_f64(&rep.lhs), "rhs_f64": rot.to_f64(&rep.rhs),
                    "excess": rep.excess, "eps": eps, "xi": xi,
                }),
            )?;
        }
        Command::Birkhoff(a) => {
            let w = sink.window(&a.window)?.window;
            let t = shift(&w, &a.shift)?;
            let cps = PlanarCps::standard(w.rotation);
            let rep = birkhoff_fiber_agreement(
                &cps,
                &w,
                &t,
                &parse_number(&a.g0)?,
                &parse_rational(&a.f_eps)?,
                a.n as i128,
            )?;
            sink.json(&a.out, &rep)?;
        }
        Command::Pseudolines(a) => {
            let w = sink.window(&a.window)?.window;
            let rot = w.rotation;
            let t = shift(&w, &a.shift)?;
            let cps = Cps3::example(rot)?;
            let r = parse_number(&a.radius)?;
            let lines = decompose(&cps, &w, &t, &r)?;
            let tube = cps.tube(&w);
            let eps = rot.to_f64(&parse_rational(&a.bound_eps)?);
            let radii: Vec<f64> = parse_list(&a.bound_radii)?;
            let longest = radii
                .iter()
                .map(|m| pseudolines::rows_needed(&cps, &w, eps, *m))
                .max()
                .unwrap_or(1);
            let table = patch_complexity(&w, longest)?;
            let bounds = radii
                .iter()
                .map(|m| fiber_spanning_bound(&cps, &w, eps, *m, &table))
                .collect::<Result<Vec<_>>>()?;
            let summary: Vec<Value> = lines.iter().map(|l| json!({ "m": l.m, "points": l.points.len() })).collect();
            let rf = rot.to_f64(&r);
            sink.json(
                &a.out,
                &json!({
                    "cps": cps, "t": t, "radius": r, "tube": tube,
                    "lines": summary, "line_count": lines.len(),
                    "line_bound": tube.kappa * 2.0 * rf,
                    "spanning_bounds": bounds,
                }),
            )?;
            if let Some(csv) = &a.csv {
                let mut buf = Vec::new();
                pseudolines::write_csv(&lines, &rot, &mut buf)?;
                sink.file(csv, &buf)?;
            }
            if let Some(svg) = &a.svg {
                let pts: Vec<(f64, f64)> = lines
                    .iter()
                    .flat_map(|l| l.points.iter().map(|p| (rot.to_f64(&p.x[0]), rot.to_f64(&p.x[1]))))
                    .collect();
                sink.file(svg, svg_points(&pts, rf).as_bytes())?;
            }
        }
        Command::Semicontinuity(a) => {
            let b = sink.window(&a.window)?;
            let c = b
                .cantor
                .ok_or_else(|| Error::Precondition("semicontinuity needs a Cantor construction".into()))?;
            let genericity = if a.window.exact { Genericity::Exact } else { Genericity::Separated };
            let prefixes: Vec<usize> = parse_list(&a.prefixes)?;
            let rep = entropy_semicontinuity_experiment(&c, &prefixes, a.nword, a.window.seed, genericity)?;
            sink.json(&a.out, &rep)?;
            if let Some(csv) = &a.csv {
                let mut wr = csv::Writer::from_writer(Vec::new());
                wr.write_record(["n_prefix", "p_xy", "p_yx"])?;
                for row in &rep.rows {
                    wr.write_record([row.n_prefix.to_string(), row.p_xy.to_string(), row.p_yx.to_string()])?;
                }
                let buf = wr.into_inner().map_err(|e| Error::Io(e.into_error()))?;
                sink.file(csv, &buf)?;
            }
        }
        Command::Rerun(_) => unreachable!("handled by run"),
    }
    Ok(())
}

/// ξ at level ℓ uniform on multiples of ε_ℓ/1000 in [−ε_ℓ, ε_ℓ].
fn random_family(scale: &OrbitNumber, levels: usize, seed: u64) -> (Vec<Vec<OrbitNumber>>, Vec<OrbitNumber>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps: Vec<OrbitNumber> = (0..levels).map(|l| scale.scale(1, 1 << l)).collect();
    let xi = eps
        .iter()
        .enumerate()
        .map(|(l, e)| (0..2usize << l).map(|_| e.scale(rng.gen_range(-1000..=1000), 1000)).collect())
        .collect();
    (xi, eps)
}

// ---- config, manifest, rerun ----

fn merge_config(cmd: Command, config: Option<&Path>) -> Result<Command> {
    let Some(path) = config else {
        return Ok(cmd);
    };
    let overrides: Map<String, Value> = serde_json::from_slice(&fs::read(path)?)?;
    let mut value = serde_json::to_value(&cmd)?;
    let obj = value.as_object_mut().expect("commands serialize as objects");
    for (k, v) in overrides {
        if k == "command" && v.as_str() != Some(cmd.name()) {
            return Err(Error::Precondition(format!("config is for {v}, not {}", cmd.name())));
        }
        obj.insert(k, v);
    }
    Ok(serde_json::from_value(value)?)
}

#[derive(Serialize, Deserialize)]
struct FileHash {
    path: String,
    sha256: String,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    format: u32,
    tool: String,
    version: String,
    command: String,
    config: Value,
    config_sha256: String,
    seeds: Vec<u64>,
    inputs: Vec<FileHash>,
    outputs: Vec<FileHash>,
    stdout_sha256: String,
    rerun: String,
}

fn seeds(config: &Value) -> Vec<u64> {
    config.get("seed").and_then(Value::as_u64).into_iter().collect()
}

fn run_one(cmd: &Command, outdir: &Path, manifest: Option<&str>) -> Result<(Sink, Manifest)> {
    fs::create_dir_all(outdir)?;
    let mut sink = Sink {
        outdir: outdir.to_path_buf(),
        outputs: Vec::new(),
        inputs: Vec::new(),
        stdout: String::new(),
    };
    execute(cmd, &mut sink)?;
    let config = serde_json::to_value(cmd)?;
    let name = manifest.map(str::to_string).unwrap_or_else(|| format!("{}.manifest.json", cmd.name()));
    let hashes = |v: &[(String, String)]| {
        v.iter()
            .map(|(p, h)| FileHash {
                path: p.clone(),
                sha256: h.clone(),
            })
            .collect()
    };
    let m = Manifest {
        format: MANIFEST_FORMAT,
        tool: "cpsw".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: cmd.name().into(),
        config_sha256: sha256_hex(serde_json::to_string(&config)?.as_bytes()),
        seeds: seeds(&config),
        config,
        inputs: hashes(&sink.inputs),
        outputs: hashes(&sink.outputs),
        stdout_sha256: sha256_hex(sink.stdout.as_bytes()),
        rerun: format!("cpsw rerun {name} --outdir <dir>"),
    };
    let mut text = serde_json::to_string_pretty(&m)?;
    text.push('\n');
    fs::write(outdir.join(&name), text)?;
    Ok((sink, m))
}

#[derive(Serialize)]
pub struct RerunReport {
    pub identical: bool,
    pub mismatches: Vec<String>,
}

fn rerun(path: &Path, outdir: &Path, manifest: Option<&str>) -> Result<RerunReport> {
    let old: Manifest = serde_json::from_slice(&fs::read(path)?)?;
    let cmd: Command = serde_json::from_value(old.config.clone())?;
    let (_, new) = run_one(&cmd, outdir, manifest)?;
    let mut mismatches = Vec::new();
    for (what, a, b) in [("input", &old.inputs, &new.inputs), ("output", &old.outputs, &new.outputs)] {
        if a.len() != b.len() {
            mismatches.push(format!("{what} count {} vs {}", a.len(), b.len()));
        }
        for (x, y) in a.iter().zip(b) {
            if x.path != y.path || x.sha256 != y.sha256 {
                mismatches.push(format!("{what} {} differs", x.path));
            }
        }
    }
    if old.stdout_sha256 != new.stdout_sha256 {
        mismatches.push("stdout differs".into());
    }
    if old.config_sha256 != new.config_sha256 {
        mismatches.push("config hash differs".into());
    }
    Ok(RerunReport {
        identical: mismatches.is_empty(),
        mismatches,
    })
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = (|| -> Result<i32> {
        if let Some(n) = cli.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::Precondition(e.to_string()))?;
        }
        if let Command::Rerun(r) = &cli.command {
            let rep = rerun(&r.file, &cli.outdir, cli.manifest.as_deref())?;
            println!("{}", serde_json::to_string_pretty(&rep)?);
            return Ok(if rep.identical { 0 } else { 1 });
        }
        let cmd = merge_config(cli.command.clone(), cli.config.as_deref())?;
        let (sink, _) = run_one(&cmd, &cli.outdir, cli.manifest.as_deref())?;
        print!("{}", sink.stdout);
        Ok(0)
    })();
    match result {
        Ok(code) => code,
        Err(e) => {
            let diag = json!({ "error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() });
            eprintln!("{diag}");
            e.exit_code()
        }
    }
}

pub fn main() -> i32 {
    run(Cli::parse())
}
