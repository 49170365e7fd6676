//! Leakage channels as dense row-stochastic matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infotheory::{binary_entropy, binary_entropy_inv, kahan_sum};

const ROW_TOLERANCE: f64 = 1e-12;

/// Largest dense matrix (inputs x outputs) or joint outcome space we enumerate.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

pub const CAPACITY_TOLERANCE: f64 = 1e-9;
pub const CAPACITY_MAX_ITERATIONS: usize = 10_000;

/// A discrete memoryless channel `P(out | in)`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    input_size: usize,
    output_size: usize,
    matrix: Vec<f64>,
}

impl Channel {
    pub fn new(input_size: usize, output_size: usize, matrix: Vec<f64>) -> Result<Self> {
        if input_size == 0 || output_size == 0 {
            return Err(Error::Domain("channel alphabets must be nonempty".into()));
        }
        if matrix.len() != input_size * output_size {
            return Err(Error::Domain(format!(
                "{input_size}x{output_size} channel needs {} entries, got {}",
                input_size * output_size,
                matrix.len()
            )));
        }
        let ch = Channel { input_size, output_size, matrix };
        ch.check_stochastic()?;
        Ok(ch)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let output_size = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != output_size) {
            return Err(Error::Domain("channel rows have different lengths".into()));
        }
        Channel::new(rows.len(), output_size, rows.concat())
    }

    fn check_stochastic(&self) -> Result<()> {
        for (x, row) in self.matrix.chunks(self.output_size).enumerate() {
            if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return Err(Error::Domain(format!("row {x} has a negative or non-finite entry")));
            }
            let s = kahan_sum(row.iter().copied());
            if (s - 1.0).abs() > ROW_TOLERANCE {
                return Err(Error::Domain(format!("row {x} sums to {s}")));
            }
        }
        Ok(())
    }

    /// Noiseless channel on `size` symbols.
    pub fn identity(size: usize) -> Self {
        let mut matrix = vec![0.0; size * size];
        for i in 0..size {
            matrix[i * size + i] = 1.0;
        }
        Channel { input_size: size, output_size: size, matrix }
    }

    /// Channel with a single output symbol: the adversary learns nothing.
    pub fn silent(input_size: usize) -> Self {
        Channel { input_size, output_size: 1, matrix: vec![1.0; input_size] }
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn prob(&self, input: usize, output: usize) -> f64 {
        self.matrix[input * self.output_size + output]
    }

    pub fn row(&self, input: usize) -> &[f64] {
        &self.matrix[input * self.output_size..(input + 1) * self.output_size]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    /// Follows this channel by the deterministic map `out -> map[out]` onto `outputs` symbols.
    pub fn post_process(&self, map: &[usize], outputs: usize) -> Result<Channel> {
        if map.len() != self.output_size || map.iter().any(|&m| m >= outputs) {
            return Err(Error::Domain("post-processing map does not fit the channel".into()));
        }
        let mut matrix = vec![0.0; self.input_size * outputs];
        for x in 0..self.input_size {
            for (y, &m) in map.iter().enumerate() {
                matrix[x * outputs + m] += self.prob(x, y);
            }
        }
        Channel::new(self.input_size, outputs, matrix)
    }

    /// Relabels inputs: the new channel on input `x` behaves like this one on `perm[x]`.
    pub fn permute_inputs(&self, perm: &[usize]) -> Result<Channel> {
        if perm.len() != self.input_size || perm.iter().any(|&p| p >= self.input_size) {
            return Err(Error::Domain("input permutation does not fit the channel".into()));
        }
        let matrix = perm.iter().flat_map(|&p| self.row(p).iter().copied()).collect();
        Ok(Channel { input_size: self.input_size, output_size: self.output_size, matrix })
    }
}

/// BSC(q) for `q` in `[0, 1/2]`.
pub fn bsc(q: f64) -> Result<Channel> {
    if !(0.0..=0.5).contains(&q) {
        return Err(Error::Domain(format!("BSC crossover {q} is not in [0, 1/2]")));
    }
    Ok(Channel { input_size: 2, output_size: 2, matrix: vec![1.0 - q, q, q, 1.0 - q] })
}

/// Applies a binary-input channel independently to each of `l` bits (LSB-first).
///
/// Output symbols are mixed-radix indices: output digit `i` is the output of bit `i`.
pub fn per_bit_channel(base: &Channel, l: u32) -> Result<Channel> {
    if base.input_size != 2 {
        return Err(Error::Domain(format!("per-bit channel needs a binary-input base, got {} inputs", base.input_size)));
    }
    product_channel(&vec![base.clone(); l as usize], DEFAULT_ENUMERATION_CAP)
}

/// Independent parallel use of `channels`. Input and output symbols are
/// mixed-radix with component 0 least significant.
pub fn product_channel(channels: &[Channel], cap: u64) -> Result<Channel> {
    if channels.is_empty() {
        return Err(Error::Domain("product of zero channels".into()));
    }
    let ins: u128 = channels.iter().map(|c| c.input_size as u128).product();
    let outs: u128 = channels.iter().map(|c| c.output_size as u128).product();
    if ins * outs > cap as u128 {
        return Err(Error::StateSpaceTooLarge { size: ins * outs, cap });
    }
    let (ins, outs) = (ins as usize, outs as usize);
    let mut matrix = vec![0.0; ins * outs];
    let digits = |mut v: usize, radix: &dyn Fn(&Channel) -> usize| -> Vec<usize> {
        channels
            .iter()
            .map(|c| {
                let r = radix(c);
                let d = v % r;
                v /= r;
                d
            })
            .collect()
    };
    for x in 0..ins {
        let xd = digits(x, &|c| c.input_size);
        for y in 0..outs {
            let yd = digits(y, &|c| c.output_size);
            matrix[x * outs + y] = channels.iter().zip(&xd).zip(&yd).map(|((c, &a), &b)| c.prob(a, b)).product();
        }
    }
    Ok(Channel { input_size: ins, output_size: outs, matrix })
}

/// Per-bit leakage rate of BSC(q): ε = 1 - h(q).
pub fn bsc_eps(q: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&q) {
        return Err(Error::Domain(format!("BSC crossover {q} is not in [0, 1/2]")));
    }
    Ok(1.0 - binary_entropy(q)?)
}

/// Inverse of [`bsc_eps`]: q = h⁻¹(1 - ε).
pub fn q_from_eps(eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("leakage rate {eps} is not in [0, 1]")));
    }
    binary_entropy_inv(1.0 - eps)
}

/// Capacity in bits by Blahut-Arimoto, stopping once the upper and lower
/// capacity estimates are within `tol`. Returns the lower estimate.
///
/// Convergence is slow when the optimal input leaves some symbols unused. If
/// the iteration budget runs out with a gap below `1e-6`, the upper estimate
/// is returned so the result still over-approximates the capacity.
pub fn capacity(channel: &Channel, tol: f64, max_iterations: usize) -> Result<f64> {
    let nx = channel.input_size;
    let ny = channel.output_size;
    let mut p = vec![1.0 / nx as f64; nx];
    let mut d = vec![0.0; nx];
    let mut r = vec![0.0; ny];
    let mut gap = f64::INFINITY;
    for _ in 0..max_iterations {
        r.iter_mut().for_each(|v| *v = 0.0);
        for (x, &px) in p.iter().enumerate() {
            for (y, rv) in r.iter_mut().enumerate() {
                *rv += px * channel.prob(x, y);
            }
        }
        for (x, dx) in d.iter_mut().enumerate() {
            *dx = kahan_sum(channel.row(x).iter().zip(&r).filter(|(w, _)| **w > 0.0).map(|(&w, &ry)| w * (w / ry).log2()));
        }
        let z = kahan_sum(p.iter().zip(&d).map(|(&px, &dx)| px * dx.exp2()));
        let lower = z.log2();
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        gap = upper - lower;
        if gap <= tol {
            return Ok(lower.max(0.0));
        }
        for (px, &dx) in p.iter_mut().zip(&d) {
            *px *= dx.exp2() / z;
        }
    }
    if gap <= 1e-6 {
        return Ok(upper_estimate(channel, &p).max(0.0));
    }
    Err(Error::NotConverged { iterations: max_iterations, gap })
}

fn upper_estimate(channel: &Channel, p: &[f64]) -> f64 {
    let mut r = vec![0.0; channel.output_size];
    for (x, &px) in p.iter().enumerate() {
        for (y, rv) in r.iter_mut().enumerate() {
            *rv += px * channel.prob(x, y);
        }
    }
    (0..channel.input_size)
        .map(|x| kahan_sum(channel.row(x).iter().zip(&r).filter(|(w, _)| **w > 0.0).map(|(&w, &ry)| w * (w / ry).log2())))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Smallest per-bit leakage rate ε valid for every input distribution:
/// capacity / l, for a channel on `2^l` inputs.
pub fn channel_leakage_rate(channel: &Channel, l: u32) -> Result<f64> {
    if channel.input_size != 1usize << l {
        return Err(Error::Domain(format!(
            "channel has {} inputs, expected 2^{l} = {}",
            channel.input_size,
            1usize << l
        )));
    }
    Ok(capacity(channel, CAPACITY_TOLERANCE, CAPACITY_MAX_ITERATIONS)? / l as f64)
}

/// Per-share leakage assumptions: honest rates ε_i plus scheme shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageProfile {
    /// ε for each honest share, length `N - t'`.
    pub eps: Vec<f64>,
    pub l: u32,
    pub n: usize,
    pub t: usize,
    pub t_prime: usize,
    /// Every honest share leaks through independent per-bit BSCs.
    #[serde(default)]
    pub per_bit_bsc: bool,
}

impl LeakageProfile {
    pub fn new(eps: Vec<f64>, l: u32, n: usize, t: usize, t_prime: usize) -> Result<Self> {
        let p = LeakageProfile { eps, l, n, t, t_prime, per_bit_bsc: false };
        p.validate()?;
        Ok(p)
    }

    pub fn with_per_bit_bsc(mut self, yes: bool) -> Self {
        self.per_bit_bsc = yes;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_prime >= self.t {
            return Err(Error::ColludersCanReconstruct { colluders: self.t_prime, threshold: self.t });
        }
        if self.t == 0 || self.t > self.n {
            return Err(Error::Parameter(format!("need 1 <= t <= N, got t={} N={}", self.t, self.n)));
        }
        if self.eps.len() != self.n - self.t_prime {
            return Err(Error::Parameter(format!(
                "expected {} honest leakage rates, got {}",
                self.n - self.t_prime,
                self.eps.len()
            )));
        }
        if let Some(e) = self.eps.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(Error::Domain(format!("leakage rate {e} is not in [0, 1]")));
        }
        Ok(())
    }
}

/// Channel description as it appears in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelConfig {
    /// Independent BSC(q) on every bit of the share.
    Bsc { q: f64 },
    /// Explicit `2^l x outputs` matrix.
    Matrix { rows: Vec<Vec<f64>> },
    Identity,
    Silent,
}

impl ChannelConfig {
    /// Materializes the channel acting on shares of `l` bits.
    pub fn build(&self, l: u32) -> Result<Channel> {
        match self {
            ChannelConfig::Bsc { q } => per_bit_channel(&bsc(*q)?, l),
            ChannelConfig::Matrix { rows } => {
                let ch = Channel::from_rows(rows)?;
                if ch.input_size != 1 << l {
                    return Err(Error::Config(format!("matrix channel has {} rows, expected {}", ch.input_size, 1 << l)));
                }
                Ok(ch)
            }
            ChannelConfig::Identity => Ok(Channel::identity(1 << l)),
            ChannelConfig::Silent => Ok(Channel::silent(1 << l)),
        }
    }
}
