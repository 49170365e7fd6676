//! Exact leakage by exhaustive enumeration.
//!
//! For a sharing rule and per-share channels the oracle builds the kernel
//! `P(Z = z | S = s)` by summing over every randomness tuple and every channel
//! transition. Information quantities for any secret distribution then follow
//! from the kernel without sampling.
//!
//! Kernel rows are computed independently per secret value (in parallel) with
//! compensated sums in a fixed order, so results do not depend on the number
//! of worker threads.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{bsc, Channel, DEFAULT_ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::infotheory::{kahan_sum, DiscreteDistribution, JointDistribution, KahanSum};
use crate::scheme::{collusion_reduce, ShamirParams, ShareMap};

/// Information values below this are rounding noise and reported as zero.
pub const NOISE_FLOOR: f64 = 1e-14;

fn snap(v: f64) -> f64 {
    if v < NOISE_FLOOR {
        0.0
    } else {
        v
    }
}

/// Exact `I(S; Z)` and `I(S^i; Z)` for one configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactLeakageResult {
    pub total_mi: f64,
    pub per_bit_mi: Vec<f64>,
    /// Enumerated outcomes: |S| * |F|^r * prod |out_i|.
    pub space: u64,
    /// Wall time in milliseconds; not part of the deterministic payload.
    pub ms: u64,
}

impl ExactLeakageResult {
    pub fn max_per_bit(&self) -> f64 {
        self.per_bit_mi.iter().copied().fold(0.0, f64::max)
    }
}

/// `P(Z | S)` for every secret value, rows of length `outputs`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeakageKernel {
    l: u32,
    outputs: usize,
    rows: Vec<Vec<f64>>,
    space: u64,
}

impl LeakageKernel {
    pub fn secrets(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn row(&self, secret: usize) -> &[f64] {
        &self.rows[secret]
    }

    pub fn space(&self) -> u64 {
        self.space
    }

    fn check_prior(&self, prior: &DiscreteDistribution) -> Result<()> {
        if prior.len() != self.rows.len() {
            return Err(Error::Domain(format!(
                "secret distribution has {} outcomes, field has {}",
                prior.len(),
                self.rows.len()
            )));
        }
        Ok(())
    }

    fn output_marginal(&self, weights: &[f64]) -> Vec<f64> {
        let mut acc = vec![KahanSum::new(); self.outputs];
        for (w, row) in weights.iter().zip(&self.rows) {
            if *w > 0.0 {
                for (a, &k) in acc.iter_mut().zip(row) {
                    a.add(w * k);
                }
            }
        }
        acc.iter().map(KahanSum::value).collect()
    }

    /// I(S; Z) in bits.
    pub fn mutual_information(&self, prior: &DiscreteDistribution) -> Result<f64> {
        self.check_prior(prior)?;
        let pz = self.output_marginal(prior.probs());
        let mut acc = KahanSum::new();
        for (&ps, row) in prior.probs().iter().zip(&self.rows) {
            if ps > 0.0 {
                let inner = kahan_sum(
                    row.iter().zip(&pz).filter(|(k, _)| **k > 0.0).map(|(&k, &z)| k * (k / z).log2()),
                );
                acc.add(ps * inner);
            }
        }
        Ok(snap(acc.value()))
    }

    /// Joint of bit `bit` of the secret and Z.
    pub fn bit_joint(&self, prior: &DiscreteDistribution, bit: u32) -> Result<JointDistribution> {
        self.check_prior(prior)?;
        if bit >= self.l {
            return Err(Error::Parameter(format!("bit {bit} out of range for l={}", self.l)));
        }
        let mut weights = [vec![0.0; self.rows.len()], vec![0.0; self.rows.len()]];
        for (s, &p) in prior.probs().iter().enumerate() {
            weights[(s >> bit) & 1][s] = p;
        }
        let probs: Vec<f64> = weights.iter().flat_map(|w| self.output_marginal(w)).collect();
        JointDistribution::new(2, self.outputs, probs)
    }

    /// I(S^bit; Z) in bits.
    pub fn bit_mutual_information(&self, prior: &DiscreteDistribution, bit: u32) -> Result<f64> {
        Ok(snap(self.bit_joint(prior, bit)?.mutual_information()))
    }
}

/// Exhaustive-enumeration oracle with a cap on the enumerated outcome count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Oracle {
    cap: u64,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle { cap: DEFAULT_ENUMERATION_CAP }
    }
}

impl Oracle {
    pub fn new(cap: u64) -> Self {
        Oracle { cap }
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// Builds `P(Z | S)` for the given sharing rule and per-share channels.
    pub fn kernel<S: ShareMap>(&self, scheme: &S, channels: &[Channel]) -> Result<LeakageKernel> {
        let field = scheme.field();
        let q = field.order();
        let n = scheme.parties();
        if channels.len() != n {
            return Err(Error::Parameter(format!("{n} parties but {} channels", channels.len())));
        }
        if let Some(c) = channels.iter().find(|c| c.input_size() != q) {
            return Err(Error::Parameter(format!("channel has {} inputs, shares take {q} values", c.input_size())));
        }
        let r = scheme.randomness_len();
        let outputs: u128 = channels.iter().map(|c| c.output_size() as u128).product();
        let tuples = (q as u128).checked_pow(r as u32).unwrap_or(u128::MAX);
        let space = (q as u128).saturating_mul(tuples).saturating_mul(outputs);
        if space > self.cap as u128 {
            return Err(Error::StateSpaceTooLarge { size: space, cap: self.cap });
        }
        let outputs = outputs as usize;
        let tuples = tuples as usize;
        let weight = 1.0 / tuples as f64;

        let rows: Vec<Vec<f64>> = (0..q)
            .into_par_iter()
            .map(|s| {
                let secret = FieldElement::new(s as u32);
                let mut sum = vec![0.0; outputs];
                let mut comp = vec![0.0; outputs];
                let mut randomness = vec![FieldElement::ZERO; r];
                let mut shares = vec![FieldElement::ZERO; n];
                let mut outer = Vec::with_capacity(outputs);
                let mut next = Vec::with_capacity(outputs);
                for idx in 0..tuples {
                    let mut v = idx;
                    for x in randomness.iter_mut() {
                        *x = FieldElement::new((v % q) as u32);
                        v /= q;
                    }
                    scheme.fill_shares(secret, &randomness, &mut shares);
                    // Outer product of the per-share rows, share 0 least significant.
                    outer.clear();
                    outer.push(weight);
                    for (ch, u) in channels.iter().zip(&shares) {
                        next.clear();
                        for &p in ch.row(u.value() as usize) {
                            next.extend(outer.iter().map(|&o| o * p));
                        }
                        std::mem::swap(&mut outer, &mut next);
                    }
                    for ((acc, c), &x) in sum.iter_mut().zip(comp.iter_mut()).zip(&outer) {
                        let t = *acc + x;
                        if acc.abs() >= x.abs() {
                            *c += (*acc - t) + x;
                        } else {
                            *c += (x - t) + *acc;
                        }
                        *acc = t;
                    }
                }
                sum.iter().zip(&comp).map(|(a, c)| a + c).collect()
            })
            .collect();
        Ok(LeakageKernel { l: field.bits(), outputs, rows, space: space as u64 })
    }

    /// Exact `I(S; Z)` and every `I(S^i; Z)`.
    pub fn exact_mi<S: ShareMap>(
        &self,
        scheme: &S,
        channels: &[Channel],
        secret: &DiscreteDistribution,
    ) -> Result<ExactLeakageResult> {
        let start = Instant::now();
        let kernel = self.kernel(scheme, channels)?;
        let total_mi = kernel.mutual_information(secret)?;
        let per_bit_mi = (0..kernel.l).map(|b| kernel.bit_mutual_information(secret, b)).collect::<Result<Vec<_>>>()?;
        Ok(ExactLeakageResult { total_mi, per_bit_mi, space: kernel.space, ms: start.elapsed().as_millis() as u64 })
    }

    /// Exact `I(S^bit; Z)`.
    pub fn exact_bitwise_mi<S: ShareMap>(
        &self,
        scheme: &S,
        channels: &[Channel],
        secret: &DiscreteDistribution,
        bit: u32,
    ) -> Result<f64> {
        self.kernel(scheme, channels)?.bit_mutual_information(secret, bit)
    }

    /// `I(S; honest leakages, colluder shares)` for ShamirSS(N, t): the full
    /// scheme enumerated with the colluders' channels replaced by identities.
    /// `channels` has one entry per party; colluder entries are ignored.
    pub fn exact_conditional_mi_given_colluders(
        &self,
        params: &ShamirParams,
        colluders: &[usize],
        channels: &[Channel],
        secret: &DiscreteDistribution,
    ) -> Result<f64> {
        if colluders.len() >= params.t() {
            return Err(Error::ColludersCanReconstruct { colluders: colluders.len(), threshold: params.t() });
        }
        if colluders.iter().any(|&c| c >= params.n()) {
            return Err(Error::Parameter("colluder index out of range".into()));
        }
        let q = params.spec().order();
        let chans: Vec<Channel> = channels
            .iter()
            .enumerate()
            .map(|(i, c)| if colluders.contains(&i) { Channel::identity(q) } else { c.clone() })
            .collect();
        self.kernel(params, &chans)?.mutual_information(secret)
    }

    /// The same quantity through the reduced scheme: average over colluder
    /// share values of `I(S; Z_honest)` in the ShamirSS(N - t', t - t') scheme
    /// returned by [`collusion_reduce`]. Colluder shares are uniform and
    /// independent of `S` because `t' < t`.
    pub fn reduced_conditional_mi(
        &self,
        params: &ShamirParams,
        colluders: &[usize],
        channels: &[Channel],
        secret: &DiscreteDistribution,
    ) -> Result<f64> {
        let q = params.spec().order();
        let tp = colluders.len();
        let honest: Vec<Channel> =
            (0..params.n()).filter(|i| !colluders.contains(i)).map(|i| channels[i].clone()).collect();
        let combos = q.pow(tp as u32);
        let mut acc = KahanSum::new();
        for idx in 0..combos {
            let mut v = idx;
            let shares: Vec<FieldElement> = (0..tp)
                .map(|_| {
                    let s = FieldElement::new((v % q) as u32);
                    v /= q;
                    s
                })
                .collect();
            let reduced = collusion_reduce(params, colluders, &shares)?;
            acc.add(self.kernel(&reduced, &honest)?.mutual_information(secret)?);
        }
        Ok(acc.value() / combos as f64)
    }

    /// Largest per-bit exact leakage over the uniform distribution, every point
    /// mass, and `trials` Dirichlet(1) draws. This is a lower estimate of the
    /// bit-wise MIS metric, not the maximum.
    pub fn mis_estimate<S: ShareMap>(
        &self,
        scheme: &S,
        channels: &[Channel],
        trials: usize,
        seed: u64,
    ) -> Result<MisEstimate> {
        if trials == 0 {
            return Err(Error::Parameter("mis_estimate needs at least one trial".into()));
        }
        let kernel = self.kernel(scheme, channels)?;
        let size = kernel.secrets();
        let mut candidates = vec![DiscreteDistribution::uniform(size)];
        candidates.extend((0..size).map(|s| DiscreteDistribution::point(size, s).expect("in range")));
        candidates.extend(sample_dirichlet(size, trials, seed));
        let mut best = MisEstimate { value: 0.0, bit: 0, candidate: 0, evaluated: candidates.len(), lower_estimate: true };
        for (ci, dist) in candidates.iter().enumerate() {
            for b in 0..kernel.l {
                let v = kernel.bit_mutual_information(dist, b)?;
                if v > best.value {
                    best.value = v;
                    best.bit = b;
                    best.candidate = ci;
                }
            }
        }
        Ok(best)
    }
}

/// Result of [`Oracle::mis_estimate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MisEstimate {
    /// Max over candidates and bits of I(S^i; Z).
    pub value: f64,
    pub bit: u32,
    /// Index into [uniform, point masses..., Dirichlet draws...].
    pub candidate: usize,
    pub evaluated: usize,
    /// Always true: sampled, not maximized.
    pub lower_estimate: bool,
}

/// `count` draws from the symmetric Dirichlet(1) on `size` outcomes.
pub fn sample_dirichlet(size: usize, count: usize, seed: u64) -> Vec<DiscreteDistribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let w: Vec<f64> = (0..size).map(|_| Exp1.sample(&mut rng)).collect();
            DiscreteDistribution::from_weights(&w).expect("positive exponential weights")
        })
        .collect()
}

/// Distribution on `{0,1}^k` whose mass depends only on parity:
/// `alpha / 2^(k-1)` on each even vector and `(1 - alpha) / 2^(k-1)` on each odd one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParityDistribution {
    k: u32,
    alpha: f64,
}

impl ParityDistribution {
    pub fn new(k: u32, alpha: f64) -> Result<Self> {
        if !(1..=20).contains(&k) {
            return Err(Error::Domain(format!("parity distribution length {k} out of range")));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!("alpha = {alpha} is not in [0, 1]")));
        }
        Ok(ParityDistribution { k, alpha })
    }

    pub fn probs(&self) -> Vec<f64> {
        let half = (1u64 << (self.k - 1)) as f64;
        (0..1u32 << self.k)
            .map(|x| if x.count_ones() % 2 == 0 { self.alpha / half } else { (1.0 - self.alpha) / half })
            .collect()
    }
}

/// Gaps measuring how far `S(X) - S(Y) - Y` is from a Markov chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovGap {
    /// |I(S(X); Y) - I(S(X); S(Y))|.
    pub gap_mi: f64,
    /// max over y, s of |P(S(X)=s | Y=y) - P(S(X)=s | S(Y)=parity(y))|.
    pub gap_markov: f64,
}

/// Markov gaps for an arbitrary input distribution on `{0,1}^k` (indexed by
/// packed bit vector) sent through independent BSC(q) on each bit.
pub fn markov_gap_for(input: &[f64], k: u32, q: f64) -> Result<MarkovGap> {
    if input.len() != 1usize << k {
        return Err(Error::Domain("input distribution length must be 2^k".into()));
    }
    let ch = bsc(q)?;
    let size = 1usize << k;
    let parity = |v: usize| v.count_ones() as usize & 1;
    // P(S(X) = s, Y = y)
    let mut sy = vec![KahanSum::new(); 2 * size];
    for (x, &px) in input.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        for y in 0..size {
            let flips = (x ^ y).count_ones() as i32;
            let p = px * ch.prob(0, 1).powi(flips) * ch.prob(0, 0).powi(k as i32 - flips);
            sy[parity(x) * size + y].add(p);
        }
    }
    let sy: Vec<f64> = sy.iter().map(KahanSum::value).collect();
    let joint_sy = JointDistribution::new(2, size, sy.clone())?;
    let mut ss = [0.0f64; 4];
    for s in 0..2 {
        for y in 0..size {
            ss[s * 2 + parity(y)] += sy[s * size + y];
        }
    }
    let joint_ss = JointDistribution::new(2, 2, ss.to_vec())?;
    let gap_mi = (joint_sy.mutual_information() - joint_ss.mutual_information()).abs();
    let mut gap_markov = 0.0f64;
    for y in 0..size {
        for s in 0..2 {
            if let (Some(a), Some(b)) =
                (joint_sy.conditional_a_given_b(s, y), joint_ss.conditional_a_given_b(s, parity(y)))
            {
                gap_markov = gap_markov.max((a - b).abs());
            }
        }
    }
    Ok(MarkovGap { gap_mi, gap_markov })
}

/// Markov gaps for the parity-form distribution with parameters `(k, alpha)`.
pub fn markov_gap(k: u32, q: f64, alpha: f64) -> Result<MarkovGap> {
    if !(2..=12).contains(&k) {
        return Err(Error::Domain(format!("k = {k} outside 2..=12")));
    }
    markov_gap_for(&ParityDistribution::new(k, alpha)?.probs(), k, q)
}
