//! Standalone checker for serialized independence certificates.
//!
//! Reads only the JSON: the index list S, the witness arcs, the rotation and
//! the component lists of the two target windows. Nothing from the builder
//! is reused; the checks are exact arc containments.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{OrbitNumber, Rotation};
use crate::error::{Error, Result};
use crate::interval::IntervalSet;

#[derive(Deserialize)]
struct Comp {
    lo: OrbitNumber,
    hi: OrbitNumber,
}

#[derive(Deserialize)]
struct Target {
    components: Vec<Comp>,
}

#[derive(Deserialize)]
struct Arc {
    bits: String,
    lo: OrbitNumber,
    hi: OrbitNumber,
}

#[derive(Deserialize)]
struct Raw {
    #[serde(rename = "S")]
    s: Vec<i128>,
    witnesses: Vec<Arc>,
    omega: Rotation,
    v0: Target,
    v1: Target,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub n: usize,
    /// full-length assignments a ∈ {0,1}^n checked
    pub assignments: u64,
    /// witness arcs read
    pub witnesses: usize,
    /// human-readable failures, in lexicographic witness order
    pub failures: Vec<String>,
    pub ok: bool,
}

pub fn verify_certificate(json: &str) -> Result<CertificateReport> {
    let raw: Raw = serde_json::from_str(json)?;
    let rot = raw.omega;
    let n = raw.s.len();
    if n > 24 {
        return Err(Error::Precondition(format!("{n} indices is beyond exhaustive checking")));
    }
    let target = |t: &Target| {
        let mut set = IntervalSet::empty(rot);
        for c in &t.components {
            set = set.union(&IntervalSet::arc(rot, c.lo, c.hi - c.lo));
        }
        set
    };
    let v = [target(&raw.v0), target(&raw.v1)];
    let mut failures = Vec::new();
    if !v[0].intersect(&v[1]).is_empty() {
        failures.push("target interiors intersect".to_string());
    }

    // U_a is the union of all arcs carrying the word a
    let mut by_bits: HashMap<&str, Vec<&Arc>> = HashMap::new();
    for w in &raw.witnesses {
        let well_formed = !w.bits.is_empty() && w.bits.len() <= n && w.bits.bytes().all(|b| b == b'0' || b == b'1');
        if well_formed {
            by_bits.entry(&w.bits).or_default().push(w);
        } else {
            failures.push(format!("malformed witness word {:?}", w.bits));
        }
    }
    let mut words: Vec<String> = Vec::new();
    for l in 1..=n {
        for a in 0..(1u64 << l) {
            words.push(format!("{:0width$b}", a, width = l));
        }
    }
    let missing: Vec<String> = words
        .iter()
        .filter(|w| !by_bits.contains_key(w.as_str()))
        .map(|w| format!("missing witness {w}"))
        .collect();
    failures.extend(missing);

    let orbit: Vec<OrbitNumber> = raw.s.iter().map(|&k| rot.orbit_point(k)).collect();
    let inside = |u: &Arc, p: &Arc| {
        let off = rot.frac(&(u.lo - p.lo));
        rot.le(&(off + (u.hi - u.lo)), &(p.hi - p.lo))
    };
    let checks: Vec<Vec<String>> = words
        .par_iter()
        .map(|word| {
            let mut bad = Vec::new();
            let Some(arcs) = by_bits.get(word.as_str()) else {
                return bad;
            };
            let parent = (word.len() > 1).then(|| by_bits.get(&word[..word.len() - 1])).flatten();
            for (j, u) in arcs.iter().enumerate() {
                let len = u.hi - u.lo;
                if rot.sign(&len).is_le() || !rot.lt(&len, &OrbitNumber::ONE) {
                    bad.push(format!("{word}#{j}: arc length out of (0, 1)"));
                    continue;
                }
                if let Some(ps) = parent {
                    if !ps.iter().any(|p| inside(u, p)) {
                        bad.push(format!("{word}#{j}: not nested in its parent"));
                    }
                }
                for (l, b) in word.bytes().enumerate() {
                    let side = (b - b'0') as usize;
                    if !v[side].interior_contains_arc(&(u.lo + orbit[l]), &len) {
                        bad.push(format!("{word}#{j}: U + t_{} not inside int(V{side})", l + 1));
                    }
                }
            }
            bad
        })
        .collect();
    failures.extend(checks.into_iter().flatten());
    Ok(CertificateReport {
        n,
        assignments: 1 << n,
        witnesses: raw.witnesses.len(),
        ok: failures.is_empty(),
        failures,
    })
}
