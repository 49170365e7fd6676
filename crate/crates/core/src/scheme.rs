//! Shamir sharing over GF(2^l), the all-ones additive variant, and the
//! reduction of a colluded Shamir scheme to a smaller one.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

/// Anything that maps `(secret, randomness)` to a vector of shares, where the
/// randomness is uniform over `F^randomness_len()`. The exact oracles enumerate
/// through this interface.
pub trait ShareMap: Sync {
    fn field(&self) -> FieldSpec;
    fn parties(&self) -> usize;
    fn randomness_len(&self) -> usize;
    /// Writes the `parties()` shares for the given secret and randomness into `out`.
    fn fill_shares(&self, secret: FieldElement, randomness: &[FieldElement], out: &mut [FieldElement]);
}

/// A dealt share vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ShareVector(pub Vec<FieldElement>);

impl ShareVector {
    pub fn as_slice(&self) -> &[FieldElement] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_points(spec: &FieldSpec, points: &[FieldElement]) -> Result<()> {
    let mut seen = HashSet::with_capacity(points.len());
    for &p in points {
        if !spec.contains(p) {
            return Err(Error::Parameter(format!("point {p} is not a field element")));
        }
        if p.is_zero() {
            return Err(Error::Parameter("evaluation point 0 is reserved for the secret".into()));
        }
        if !seen.insert(p) {
            return Err(Error::Parameter(format!("duplicate evaluation point {p}")));
        }
    }
    Ok(())
}

/// Evaluates `c0 + c1 x + ... ` at `x` by Horner's rule.
fn eval_poly(spec: &FieldSpec, constant: FieldElement, coeffs: &[FieldElement], x: FieldElement) -> FieldElement {
    let mut acc = FieldElement::ZERO;
    for &c in coeffs.iter().rev() {
        acc = spec.add(spec.mul(acc, x), c);
    }
    spec.add(spec.mul(acc, x), constant)
}

/// Multipliers `c_i` with `P(0) = sum c_i P(points[i])` for every polynomial of
/// degree below `points.len()`.
///
/// In characteristic 2, `c_i = prod_{j != i} points[j] / (points[i] + points[j])`.
pub fn lagrange_coefficients(points: &[FieldElement], spec: &FieldSpec) -> Result<Vec<FieldElement>> {
    if points.is_empty() {
        return Err(Error::Parameter("need at least one point".into()));
    }
    check_points(spec, points)?;
    points
        .iter()
        .enumerate()
        .map(|(i, &gi)| {
            let mut num = FieldElement::ONE;
            let mut den = FieldElement::ONE;
            for (j, &gj) in points.iter().enumerate() {
                if i != j {
                    num = spec.mul(num, gj);
                    den = spec.mul(den, spec.add(gi, gj));
                }
            }
            spec.div(num, den)
        })
        .collect()
}

/// Parameters of ShamirSS(N, t).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShamirParams {
    spec: FieldSpec,
    n: usize,
    t: usize,
    gammas: Vec<FieldElement>,
}

impl ShamirParams {
    pub fn new(spec: FieldSpec, n: usize, t: usize, gammas: Vec<FieldElement>) -> Result<Self> {
        if t == 0 || t > n {
            return Err(Error::Parameter(format!("need 1 <= t <= N, got t={t}, N={n}")));
        }
        if n > spec.order() - 1 {
            return Err(Error::Parameter(format!(
                "N={n} exceeds the {} nonzero elements of the field",
                spec.order() - 1
            )));
        }
        if gammas.len() != n {
            return Err(Error::Parameter(format!("expected {n} evaluation points, got {}", gammas.len())));
        }
        check_points(&spec, &gammas)?;
        Ok(ShamirParams { spec, n, t, gammas })
    }

    /// Evaluation points `1, 2, ..., N` taken as field elements.
    pub fn with_default_points(spec: FieldSpec, n: usize, t: usize) -> Result<Self> {
        let gammas = (1..=n as u32).map(FieldElement::new).collect();
        ShamirParams::new(spec, n, t, gammas)
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn gammas(&self) -> &[FieldElement] {
        &self.gammas
    }

    /// Shares of `secret` under the polynomial `secret + p_1 x + ... + p_{t-1} x^{t-1}`.
    pub fn share(&self, secret: FieldElement, coeffs: &[FieldElement]) -> Result<ShareVector> {
        if coeffs.len() != self.t - 1 {
            return Err(Error::Parameter(format!(
                "expected {} polynomial coefficients, got {}",
                self.t - 1,
                coeffs.len()
            )));
        }
        for &v in std::iter::once(&secret).chain(coeffs) {
            if !self.spec.contains(v) {
                return Err(Error::Parameter(format!("{v} is not a field element")));
            }
        }
        let mut out = vec![FieldElement::ZERO; self.n];
        self.fill_shares(secret, coeffs, &mut out);
        Ok(ShareVector(out))
    }

    /// Shares with coefficients drawn uniformly from `rng`.
    pub fn share_random<R: Rng + ?Sized>(&self, secret: FieldElement, rng: &mut R) -> Result<ShareVector> {
        let order = self.spec.order() as u32;
        let coeffs: Vec<_> = (1..self.t).map(|_| FieldElement::new(rng.random_range(0..order))).collect();
        self.share(secret, &coeffs)
    }

    /// Shares with coefficients drawn from a ChaCha8 stream keyed by `seed`.
    pub fn share_seeded(&self, secret: FieldElement, seed: u64) -> Result<ShareVector> {
        self.share_random(secret, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Recovers `P(0)` from at least `t` `(point, share)` pairs.
    pub fn reconstruct(&self, pairs: &[(FieldElement, FieldElement)]) -> Result<FieldElement> {
        if pairs.len() < self.t {
            return Err(Error::Threshold { needed: self.t, got: pairs.len() });
        }
        let points: Vec<_> = pairs.iter().map(|p| p.0).collect();
        for p in &points {
            if !self.gammas.contains(p) {
                return Err(Error::Parameter(format!("{p} is not one of the evaluation points")));
            }
        }
        for &(_, s) in pairs {
            if !self.spec.contains(s) {
                return Err(Error::Parameter(format!("share {s} is not a field element")));
            }
        }
        let coeffs = lagrange_coefficients(&points, &self.spec)?;
        Ok(coeffs
            .iter()
            .zip(pairs)
            .fold(FieldElement::ZERO, |acc, (&c, &(_, s))| self.spec.add(acc, self.spec.mul(c, s))))
    }
}

impl ShareMap for ShamirParams {
    fn field(&self) -> FieldSpec {
        self.spec
    }

    fn parties(&self) -> usize {
        self.n
    }

    fn randomness_len(&self) -> usize {
        self.t - 1
    }

    fn fill_shares(&self, secret: FieldElement, randomness: &[FieldElement], out: &mut [FieldElement]) {
        for (o, &g) in out.iter_mut().zip(&self.gammas) {
            *o = eval_poly(&self.spec, secret, randomness, g);
        }
    }
}

/// First row of the inverse of the Vandermonde matrix `V[i][k] = gamma_i^k`,
/// computed by Gauss-Jordan elimination. Requires `t = N`.
pub fn vandermonde_inverse_first_row(params: &ShamirParams) -> Result<Vec<FieldElement>> {
    if params.t != params.n {
        return Err(Error::Parameter(format!(
            "full-set recovery row needs t = N, got t={} N={}",
            params.t, params.n
        )));
    }
    let f = params.spec;
    let n = params.n;
    // Augmented [V | I].
    let mut m: Vec<Vec<FieldElement>> = params
        .gammas
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            let mut row: Vec<_> = (0..n as u64).map(|k| f.pow(g, k)).collect();
            row.extend((0..n).map(|j| if i == j { FieldElement::ONE } else { FieldElement::ZERO }));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| Error::Internal("singular Vandermonde matrix".into()))?;
        m.swap(col, pivot);
        let inv = f.inv(m[col][col])?;
        for x in m[col].iter_mut() {
            *x = f.mul(*x, inv);
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let factor = row[col];
                for (x, &p) in row.iter_mut().zip(&pivot_row) {
                    *x = f.add(*x, f.mul(factor, p));
                }
            }
        }
    }
    Ok(m[0][n..].to_vec())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchemeKind {
    Shamir(ShamirParams),
    AllOnes,
}

/// An N-party linear scheme with a full-set recovery rule `s = sum c_i s_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearScheme {
    spec: FieldSpec,
    n: usize,
    t: usize,
    coefficients: Vec<FieldElement>,
    kind: SchemeKind,
}

impl LinearScheme {
    /// Wraps Shamir parameters. For `t = N` the recovery coefficients come from
    /// the Vandermonde inverse; for `t < N` they are the Lagrange multipliers on
    /// all N points, which is still a valid recovery rule.
    pub fn shamir(params: ShamirParams) -> Result<Self> {
        let coefficients = if params.t == params.n {
            vandermonde_inverse_first_row(&params)?
        } else {
            lagrange_coefficients(&params.gammas, &params.spec)?
        };
        Ok(LinearScheme { spec: params.spec, n: params.n, t: params.t, coefficients, kind: SchemeKind::Shamir(params) })
    }

    /// Additive N-out-of-N sharing: `s_1..s_{N-1}` uniform, `s_N = s + s_1 + ... + s_{N-1}`.
    pub fn all_ones(n: usize, spec: FieldSpec) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("all-ones scheme needs N >= 1".into()));
        }
        Ok(LinearScheme { spec, n, t: n, coefficients: vec![FieldElement::ONE; n], kind: SchemeKind::AllOnes })
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn kind(&self) -> &SchemeKind {
        &self.kind
    }

    pub fn recovery_coefficients(&self) -> &[FieldElement] {
        &self.coefficients
    }

    pub fn is_all_ones(&self) -> bool {
        matches!(self.kind, SchemeKind::AllOnes)
    }

    /// `sum c_i s_i`.
    pub fn recover(&self, shares: &[FieldElement]) -> Result<FieldElement> {
        if shares.len() != self.n {
            return Err(Error::Threshold { needed: self.n, got: shares.len() });
        }
        Ok(self
            .coefficients
            .iter()
            .zip(shares)
            .fold(FieldElement::ZERO, |acc, (&c, &s)| self.spec.add(acc, self.spec.mul(c, s))))
    }

    pub fn share_with(&self, secret: FieldElement, randomness: &[FieldElement]) -> Result<ShareVector> {
        if randomness.len() != self.randomness_len() {
            return Err(Error::Parameter(format!(
                "expected {} random field elements, got {}",
                self.randomness_len(),
                randomness.len()
            )));
        }
        let mut out = vec![FieldElement::ZERO; self.n];
        self.fill_shares(secret, randomness, &mut out);
        Ok(ShareVector(out))
    }

    pub fn share_seeded(&self, secret: FieldElement, seed: u64) -> Result<ShareVector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let order = self.spec.order() as u32;
        let r: Vec<_> = (0..self.randomness_len()).map(|_| FieldElement::new(rng.random_range(0..order))).collect();
        self.share_with(secret, &r)
    }
}

impl ShareMap for LinearScheme {
    fn field(&self) -> FieldSpec {
        self.spec
    }

    fn parties(&self) -> usize {
        self.n
    }

    fn randomness_len(&self) -> usize {
        match &self.kind {
            SchemeKind::Shamir(p) => p.randomness_len(),
            SchemeKind::AllOnes => self.n - 1,
        }
    }

    fn fill_shares(&self, secret: FieldElement, randomness: &[FieldElement], out: &mut [FieldElement]) {
        match &self.kind {
            SchemeKind::Shamir(p) => p.fill_shares(secret, randomness, out),
            SchemeKind::AllOnes => {
                let mut last = secret;
                for (o, &r) in out.iter_mut().zip(randomness) {
                    *o = r;
                    last = self.spec.add(last, r);
                }
                out[self.n - 1] = last;
            }
        }
    }
}

/// The honest-party view of ShamirSS(N, t) once `t'` colluders' shares are fixed.
///
/// Writing `lambda(x) = prod_c (x + gamma_c)` over the colluders, every dealing
/// polynomial consistent with the colluders' shares is
/// `P(x) = L(x) + x lambda(x) R(x)` where `L` interpolates `(0, s)` and the
/// colluder points and `R` is uniform of degree below `t - t' - 1`. Hence honest
/// share `i` equals `m_i V_i + b_i` where `V` is a ShamirSS(N - t', t - t')
/// dealing of `s / lambda(0)` on the honest points, `m_i = lambda(gamma_i)` and
/// `b_i` depends only on the colluders' shares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedScheme {
    params: ShamirParams,
    honest: Vec<usize>,
    secret_scale: FieldElement,
    multipliers: Vec<FieldElement>,
    offsets: Vec<FieldElement>,
}

impl ReducedScheme {
    /// The plain ShamirSS(N - t', t - t') on the honest evaluation points.
    pub fn params(&self) -> &ShamirParams {
        &self.params
    }

    /// Original party indices of the honest parties, in order.
    pub fn honest_parties(&self) -> &[usize] {
        &self.honest
    }

    /// Factor `1 / lambda(0)` mapping the original secret to the reduced one.
    pub fn secret_scale(&self) -> FieldElement {
        self.secret_scale
    }

    pub fn multipliers(&self) -> &[FieldElement] {
        &self.multipliers
    }

    pub fn offsets(&self) -> &[FieldElement] {
        &self.offsets
    }
}

impl ShareMap for ReducedScheme {
    fn field(&self) -> FieldSpec {
        self.params.spec
    }

    fn parties(&self) -> usize {
        self.params.n
    }

    fn randomness_len(&self) -> usize {
        self.params.t - 1
    }

    /// `secret` is the original secret; the scaling into the reduced scheme is applied here.
    fn fill_shares(&self, secret: FieldElement, randomness: &[FieldElement], out: &mut [FieldElement]) {
        let f = self.params.spec;
        self.params.fill_shares(f.mul(secret, self.secret_scale), randomness, out);
        for ((o, &m), &b) in out.iter_mut().zip(&self.multipliers).zip(&self.offsets) {
            *o = f.add(f.mul(m, *o), b);
        }
    }
}

/// Conditions ShamirSS(N, t) on the shares of the parties in `colluders`
/// (0-based indices), yielding the equivalent scheme over the honest parties.
pub fn collusion_reduce(
    params: &ShamirParams,
    colluders: &[usize],
    colluder_shares: &[FieldElement],
) -> Result<ReducedScheme> {
    let f = params.spec;
    let tp = colluders.len();
    if tp >= params.t {
        return Err(Error::ColludersCanReconstruct { colluders: tp, threshold: params.t });
    }
    if colluder_shares.len() != tp {
        return Err(Error::Parameter(format!("{tp} colluders but {} colluder shares", colluder_shares.len())));
    }
    let mut seen = HashSet::new();
    for &c in colluders {
        if c >= params.n || !seen.insert(c) {
            return Err(Error::Parameter(format!("invalid or repeated colluder index {c}")));
        }
    }
    for &s in colluder_shares {
        if !f.contains(s) {
            return Err(Error::Parameter(format!("colluder share {s} is not a field element")));
        }
    }

    let colluder_points: Vec<_> = colluders.iter().map(|&c| params.gammas[c]).collect();
    let lambda = |x: FieldElement| colluder_points.iter().fold(FieldElement::ONE, |acc, &g| f.mul(acc, f.add(x, g)));

    // Lagrange basis on the nodes {0} ∪ colluder points, evaluated at an honest point;
    // only the colluder-node terms are needed for the offsets.
    let offset_at = |x: FieldElement| -> Result<FieldElement> {
        let mut acc = FieldElement::ZERO;
        for (k, (&gk, &uk)) in colluder_points.iter().zip(colluder_shares).enumerate() {
            // basis_k(x) = x * prod_{j != k}(x + g_j) / (g_k * prod_{j != k}(g_k + g_j))
            let mut num = x;
            let mut den = gk;
            for (j, &gj) in colluder_points.iter().enumerate() {
                if j != k {
                    num = f.mul(num, f.add(x, gj));
                    den = f.mul(den, f.add(gk, gj));
                }
            }
            acc = f.add(acc, f.mul(uk, f.div(num, den)?));
        }
        Ok(acc)
    };

    let honest: Vec<usize> = (0..params.n).filter(|i| !seen.contains(i)).collect();
    let honest_points: Vec<_> = honest.iter().map(|&i| params.gammas[i]).collect();
    let multipliers = honest_points.iter().map(|&g| lambda(g)).collect();
    let offsets = honest_points.iter().map(|&g| offset_at(g)).collect::<Result<Vec<_>>>()?;
    let secret_scale = f.inv(lambda(FieldElement::ZERO))?;
    let reduced = ShamirParams::new(f, params.n - tp, params.t - tp, honest_points)?;
    Ok(ReducedScheme { params: reduced, honest, secret_scale, multipliers, offsets })
}
