//! Shannon quantities in bits, the binary entropy function and its inverse,
//! binary convolution, and the Mrs. Gerber's Lemma lower bound.

use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-12;
const INV_TOLERANCE: f64 = 1e-12;
const INV_MAX_ITERATIONS: usize = 200;
const LOG_FLOOR: f64 = 1e-300;

/// Compensated (Kahan-Babuska) accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut k = KahanSum::new();
        for x in iter {
            k.add(x);
        }
        k
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<KahanSum>().value()
}

/// `-p log2 p`, with `0 log 0 = 0`.
fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.max(LOG_FLOOR).log2()
    }
}

fn check_probability(p: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} = {p} is not in [0, 1]")))
    }
}

/// h(p) = -p log2 p - (1-p) log2 (1-p).
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_probability(p, "probability")?;
    Ok(plogp(p) + plogp(1.0 - p))
}

fn h(p: f64) -> f64 {
    plogp(p) + plogp(1.0 - p)
}

/// The unique `p` in `[0, 1/2]` with `h(p) = y`, by bisection.
pub fn binary_entropy_inv(y: f64) -> Result<f64> {
    check_probability(y, "entropy")?;
    if y == 0.0 {
        return Ok(0.0);
    }
    if y == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..INV_MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (p, gap) = [lo, hi]
        .into_iter()
        .map(|p| (p, (h(p) - y).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("two candidates");
    if gap > INV_TOLERANCE {
        return Err(Error::NotConverged { iterations: INV_MAX_ITERATIONS, gap });
    }
    Ok(p)
}

/// a ⋆ b = a(1-b) + b(1-a): crossover of two cascaded BSCs.
pub fn star(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

/// q ⋆ q ⋆ ... ⋆ q (n times) = (1 - (1-2q)^n) / 2. For `n = 0` this is 0, the
/// crossover of an empty XOR.
pub fn star_iter(q: f64, n: u32) -> f64 {
    if n == 0 {
        return 0.0;
    }
    0.5 * (1.0 - (1.0 - 2.0 * q).powi(n as i32))
}

/// h( h⁻¹(y_1) ⋆ ... ⋆ h⁻¹(y_n) ), a lower bound on H(A_1 ⊕ ... ⊕ A_n | B)
/// for independent bits with side information `H(A_i | B_i) = y_i`.
pub fn mgl_lower_bound(cond_entropies: &[f64]) -> Result<f64> {
    if cond_entropies.is_empty() {
        return Err(Error::Domain("Mrs. Gerber's Lemma needs at least one input".into()));
    }
    let mut acc = 0.0;
    for &y in cond_entropies {
        acc = star(acc, binary_entropy_inv(y)?);
    }
    binary_entropy(acc.clamp(0.0, 1.0))
}

/// Probability vector over a finite outcome set.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
}

fn validate_probs(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::Domain("empty distribution".into()));
    }
    if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::Domain(format!("invalid probability {p}")));
    }
    let total = kahan_sum(probs.iter().copied());
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::Domain(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

impl DiscreteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        validate_probs(&probs)?;
        Ok(DiscreteDistribution { probs })
    }

    pub fn uniform(size: usize) -> Self {
        DiscreteDistribution { probs: vec![1.0 / size as f64; size] }
    }

    /// All mass on `index`.
    pub fn point(size: usize, index: usize) -> Result<Self> {
        if index >= size {
            return Err(Error::Domain(format!("point mass index {index} outside 0..{size}")));
        }
        let mut probs = vec![0.0; size];
        probs[index] = 1.0;
        Ok(DiscreteDistribution { probs })
    }

    /// Renormalizes nonnegative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total = kahan_sum(weights.iter().copied());
        if total.is_nan() || total <= 0.0 || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Domain("weights must be nonnegative with positive sum".into()));
        }
        Ok(DiscreteDistribution { probs: weights.iter().map(|w| w / total).collect() })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        kahan_sum(self.probs.iter().map(|&p| plogp(p)))
    }
}

pub fn entropy(dist: &DiscreteDistribution) -> f64 {
    dist.entropy()
}

/// Joint distribution of `(A, B)` stored row-major: entry `(a, b)` at `a * cols + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(rows: usize, cols: usize, probs: Vec<f64>) -> Result<Self> {
        if rows * cols != probs.len() {
            return Err(Error::Domain(format!("{rows}x{cols} joint needs {} entries, got {}", rows * cols, probs.len())));
        }
        validate_probs(&probs)?;
        Ok(JointDistribution { rows, cols, probs })
    }

    /// Joint of an input distribution and a row-stochastic kernel `P(b | a)`.
    pub fn from_input_and_kernel(input: &DiscreteDistribution, kernel: &[f64], cols: usize) -> Result<Self> {
        let rows = input.len();
        if kernel.len() != rows * cols {
            return Err(Error::Domain("kernel shape does not match input".into()));
        }
        let probs = (0..rows).flat_map(|a| (0..cols).map(move |b| (a, b))).map(|(a, b)| input.probs[a] * kernel[a * cols + b]).collect();
        JointDistribution::new(rows, cols, probs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.probs[a * self.cols + b]
    }

    pub fn marginal_a(&self) -> Vec<f64> {
        (0..self.rows).map(|a| kahan_sum(self.probs[a * self.cols..(a + 1) * self.cols].iter().copied())).collect()
    }

    pub fn marginal_b(&self) -> Vec<f64> {
        let mut acc = vec![KahanSum::new(); self.cols];
        for row in self.probs.chunks(self.cols) {
            for (k, &p) in acc.iter_mut().zip(row) {
                k.add(p);
            }
        }
        acc.iter().map(KahanSum::value).collect()
    }

    /// `P(A = a | B = b)`, or `None` when `P(B = b) = 0`.
    pub fn conditional_a_given_b(&self, a: usize, b: usize) -> Option<f64> {
        let pb = kahan_sum((0..self.rows).map(|r| self.get(r, b)));
        (pb > 0.0).then(|| self.get(a, b) / pb)
    }

    pub fn entropy(&self) -> f64 {
        kahan_sum(self.probs.iter().map(|&p| plogp(p)))
    }

    /// H(A | B) = H(A, B) - H(B).
    pub fn conditional_entropy(&self) -> f64 {
        let hb = kahan_sum(self.marginal_b().into_iter().map(plogp));
        (self.entropy() - hb).max(0.0)
    }

    /// I(A; B) = sum p(a,b) log p(a,b) / (p(a) p(b)).
    pub fn mutual_information(&self) -> f64 {
        let pa = self.marginal_a();
        let pb = self.marginal_b();
        let mut acc = KahanSum::new();
        for (a, &pa_) in pa.iter().enumerate() {
            for (b, &pb_) in pb.iter().enumerate() {
                let p = self.get(a, b);
                if p > 0.0 {
                    acc.add(p * (p / (pa_ * pb_)).log2());
                }
            }
        }
        acc.value()
    }
}

pub fn conditional_entropy(joint: &JointDistribution) -> f64 {
    joint.conditional_entropy()
}

pub fn mutual_information(joint: &JointDistribution) -> f64 {
    joint.mutual_information()
}
