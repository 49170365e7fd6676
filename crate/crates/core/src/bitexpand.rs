//! Per-bit expansion of a recovery equation `s = sum_j c_j s_j` over GF(2^l).
//!
//! Bit `i` of the secret is the XOR of bit `b` of share `j` over every `(j, b)`
//! with entry `(i, b)` of the multiplication matrix of `c_j` set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::{FieldElement, FieldSpec};
use crate::scheme::{LinearScheme, ShamirParams};

/// The `l` XOR equations for the secret bits and their summand counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitwiseSystem {
    pub l: u32,
    /// `equations[i]` lists `(share_index, bit_index)` pairs, sorted.
    pub equations: Vec<Vec<(usize, u32)>>,
    pub n_tilde: usize,
}

impl BitwiseSystem {
    /// Ñ_i: number of summands in each equation.
    pub fn counts(&self) -> Vec<usize> {
        self.equations.iter().map(Vec::len).collect()
    }

    /// Evaluates every equation on the given shares, returning the packed secret bits.
    pub fn evaluate(&self, shares: &[FieldElement]) -> u32 {
        self.equations.iter().enumerate().fold(0, |acc, (i, eq)| {
            let parity = eq.iter().fold(0u8, |p, &(j, b)| p ^ shares.get(j).map_or(0, |s| s.bit(b)));
            acc | (u32::from(parity) << i)
        })
    }
}

pub fn expand(coefficients: &[FieldElement], spec: &FieldSpec) -> BitwiseSystem {
    let l = spec.bits() as usize;
    let mut equations = vec![Vec::new(); l];
    for (j, &c) in coefficients.iter().enumerate() {
        let m = spec.mul_matrix(c);
        for (i, eq) in equations.iter_mut().enumerate() {
            let row = m.row_mask(i);
            eq.extend((0..l as u32).filter(|b| (row >> b) & 1 == 1).map(|b| (j, b)));
        }
    }
    let n_tilde = equations.iter().map(Vec::len).min().unwrap_or(0);
    BitwiseSystem { l: spec.bits(), equations, n_tilde }
}

/// Ñ for a scheme's recovery coefficients.
pub fn n_tilde_of(scheme: &LinearScheme) -> usize {
    expand(scheme.recovery_coefficients(), &scheme.spec()).n_tilde
}

/// Checks that every equation reproduces the matching bit of `sum c_j s_j`.
///
/// Exhaustive over all share vectors when `l * N <= 16`. Otherwise the check
/// runs on the `l * N` unit share vectors plus zero, which is complete because
/// both sides are GF(2)-linear in the share bits.
pub fn verify_system(system: &BitwiseSystem, coefficients: &[FieldElement], spec: &FieldSpec) -> bool {
    let l = spec.bits() as usize;
    let n = coefficients.len();
    if system.l != spec.bits() || system.equations.len() != l {
        return false;
    }
    let total_bits = l * n;
    let check = |packed: u64| -> bool {
        let shares: Vec<FieldElement> =
            (0..n).map(|j| FieldElement::new(((packed >> (j * l)) & ((1 << l) - 1)) as u32)).collect();
        let expected = coefficients
            .iter()
            .zip(&shares)
            .fold(FieldElement::ZERO, |acc, (&c, &s)| spec.add(acc, spec.mul(c, s)));
        system.evaluate(&shares) == expected.value()
    };
    if total_bits <= 16 {
        (0..1u64 << total_bits).all(check)
    } else {
        check(0) && (0..total_bits).all(|k| check(1u64 << k))
    }
}

/// Summary of Ñ over random Shamir evaluation points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NTildeSample {
    pub n: usize,
    pub trials: usize,
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}

/// Draws `trials` random sets of N distinct nonzero evaluation points for
/// ShamirSS(N, N) and records Ñ of the resulting recovery equation.
pub fn sample_n_tilde(spec: &FieldSpec, n: usize, trials: usize, seed: u64) -> Result<NTildeSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut pool: Vec<u32> = (1..spec.order() as u32).collect();
        for k in 0..n.min(pool.len()) {
            let pick = rng.random_range(k..pool.len());
            pool.swap(k, pick);
        }
        let gammas = pool[..n.min(pool.len())].iter().map(|&v| FieldElement::new(v)).collect();
        let scheme = LinearScheme::shamir(ShamirParams::new(*spec, n, n, gammas)?)?;
        values.push(n_tilde_of(&scheme));
    }
    let min = values.iter().copied().min().unwrap_or(0);
    let max = values.iter().copied().max().unwrap_or(0);
    let mean = if values.is_empty() { 0.0 } else { values.iter().sum::<usize>() as f64 / values.len() as f64 };
    Ok(NTildeSample { n, trials, min, max, mean })
}
