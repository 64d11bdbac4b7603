//! Word complexity of the rotation coding k ↦ [{kω} ∈ W + t].
//!
//! For fixed n the word w_0..w_{n−1} is constant on each open cell cut out of
//! the t-circle by the points kω − e (e ∈ ∂W, 0 ≤ k < n). Sweeping t once
//! around the circle, crossing kω − e flips exactly bit k, so all words of
//! length n_max are collected with one sort and one flip per cut. Sorting
//! the words and taking longest common prefixes of neighbours gives p(n)
//! for every n ≤ n_max at once. Only open cells are counted: the words seen
//! at the finitely many critical t (cell endpoints) are excluded.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::OrbitNumber;
use crate::cantor::CantorApprox;
use crate::cps::coding_word;
use crate::error::{Error, Result};
use crate::window::{Genericity, WindowSpec};

/// Cap on cells × 64-bit limbs held during the sweep.
pub const SWEEP_BUDGET: usize = 1 << 27;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexityTable {
    pub n: Vec<usize>,
    pub p: Vec<u64>,
    /// log₂ p(n) / n
    pub log_slope: Vec<f64>,
}

impl ComplexityTable {
    fn from_counts(p: Vec<u64>) -> Self {
        let n: Vec<usize> = (1..=p.len()).collect();
        let log_slope = n.iter().zip(&p).map(|(&n, &p)| (p as f64).log2() / n as f64).collect();
        ComplexityTable { n, p, log_slope }
    }

    /// p(n) for 1 ≤ n ≤ n_max.
    pub fn get(&self, n: usize) -> Option<u64> {
        n.checked_sub(1).and_then(|i| self.p.get(i).copied())
    }

    pub fn is_monotone(&self) -> bool {
        self.p.windows(2).all(|w| w[0] <= w[1])
    }

    /// Pairs (n, m) with n + m in range and p(n+m) > p(n)·p(m).
    pub fn subadditivity_violations(&self) -> Vec<(usize, usize)> {
        let k = self.p.len();
        let mut out = Vec::new();
        for n in 1..=k {
            for m in 1..=k - n {
                let (a, b, c) = (self.p[n - 1], self.p[m - 1], self.p[n + m - 1]);
                if u128::from(c) > u128::from(a) * u128::from(b) {
                    out.push((n, m));
                }
            }
        }
        out
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["n", "p_n"])?;
        for (n, p) in self.n.iter().zip(&self.p) {
            wr.write_record([n.to_string(), p.to_string()])?;
        }
        wr.flush()?;
        Ok(())
    }
}

// bit k lives in limb k/64 at position 63 − k%64, so Vec order is word order
fn flip(word: &mut [u64], k: usize) {
    word[k / 64] ^= 1u64 << (63 - k % 64);
}

fn common_prefix(a: &[u64], b: &[u64]) -> usize {
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        if x != y {
            return 64 * i + (x ^ y).leading_zeros() as usize;
        }
    }
    64 * a.len()
}

/// Exact p(n), 1 ≤ n ≤ n_max, by cell counting.
pub fn patch_complexity(w: &WindowSpec, n_max: usize) -> Result<ComplexityTable> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    let rot = w.rotation;
    let boundary = w.boundary();
    if boundary.is_empty() {
        return Ok(ComplexityTable::from_counts(vec![1; n_max]));
    }
    let limbs = n_max.div_ceil(64);
    let cells = boundary.len() * n_max;
    if cells.saturating_mul(limbs) > SWEEP_BUDGET {
        return Err(Error::DepthOverflow(format!(
            "{cells} cells of {n_max}-bit words exceed the sweep budget"
        )));
    }
    let mut cuts: Vec<(OrbitNumber, u32)> = Vec::with_capacity(cells);
    for k in 0..n_max {
        let kw = OrbitNumber::new(0, k as i128);
        for e in &boundary {
            cuts.push((rot.frac(&(kw - *e)), k as u32));
        }
    }
    cuts.sort_by(|x, y| rot.cmp(&x.0, &y.0).then(x.1.cmp(&y.1)));

    // word on the cell following the last cut (wrapping to the first)
    let last = cuts[cuts.len() - 1].0;
    let start = if last == cuts[0].0 {
        // every cut coincides: one cell, the whole circle minus a point
        last + OrbitNumber::rational(1, 2)
    } else {
        (last + cuts[0].0 + OrbitNumber::ONE).half()
    };
    let bits = coding_word(w, &start, 0, n_max as i128 - 1)?;
    let mut word = vec![0u64; limbs];
    for (k, &b) in bits.iter().enumerate() {
        if b == 1 {
            flip(&mut word, k);
        }
    }

    let mut words: Vec<Vec<u64>> = vec![word.clone()];
    let mut i = 0;
    while i < cuts.len() {
        let x = cuts[i].0;
        while i < cuts.len() && cuts[i].0 == x {
            flip(&mut word, cuts[i].1 as usize);
            i += 1;
        }
        words.push(word.clone());
    }
    words.sort_unstable();
    words.dedup();

    // p(n) = 1 + #{neighbours first differing before bit n}
    let mut first_diff = vec![0u64; n_max + 1];
    for pair in words.windows(2) {
        first_diff[common_prefix(&pair[0], &pair[1]).min(n_max)] += 1;
    }
    let mut p = Vec::with_capacity(n_max);
    let mut acc = 1u64;
    for n in 1..=n_max {
        acc += first_diff[n - 1];
        p.push(acc);
    }
    Ok(ComplexityTable::from_counts(p))
}

/// One row of the semicontinuity experiment.
#[derive(Clone, Debug, Serialize)]
pub struct SpliceRow {
    pub n_prefix: usize,
    /// p(n_word) for W(z(n; x, y))
    pub p_xy: u64,
    /// p(n_word) for W(z(n; y, x))
    pub p_yx: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SemicontinuityReport {
    pub n_word: usize,
    pub seed: u64,
    pub p_x: u64,
    pub p_y: u64,
    pub rows: Vec<SpliceRow>,
}

/// z(n; x, y): the first n bits of x followed by the tail of y.
pub fn splice(x: &[bool], y: &[bool], n: usize) -> Vec<bool> {
    let n = n.min(x.len());
    x[..n].iter().chain(&y[n..]).copied().collect()
}

/// The filling bits of window_W over the canonical gap order.
pub fn w_filling(c: &CantorApprox) -> Vec<bool> {
    c.canonical_gaps().iter().map(|g| g.level % 2 == 0).collect()
}

/// Complexity of W(z(n; x, y)) and W(z(n; y, x)) as the prefix n grows, with
/// x the window_W filling and y a seeded random filling.
pub fn entropy_semicontinuity_experiment(
    c: &CantorApprox,
    prefixes: &[usize],
    n_word: usize,
    seed: u64,
    genericity: Genericity,
) -> Result<SemicontinuityReport> {
    let x = w_filling(c);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y: Vec<bool> = (0..x.len()).map(|_| rng.gen()).collect();
    let p_of = |bits: &[bool]| -> Result<u64> {
        let w = WindowSpec::filling(c, bits, genericity)?;
        let t = patch_complexity(&w, n_word)?;
        Ok(t.p[n_word - 1])
    };
    let rows = prefixes
        .iter()
        .map(|&n| {
            Ok(SpliceRow {
                n_prefix: n,
                p_xy: p_of(&splice(&x, &y, n))?,
                p_yx: p_of(&splice(&y, &x, n))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SemicontinuityReport {
        n_word,
        seed,
        p_x: p_of(&x)?,
        p_y: p_of(&y)?,
        rows,
    })
}
