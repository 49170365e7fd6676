//! Closed-form leakage bounds and conversions between security metrics.

use serde::{Deserialize, Serialize};

use crate::bitexpand::n_tilde_of;
use crate::channels::LeakageProfile;
use crate::error::{Error, Result};
use crate::infotheory::{binary_entropy_inv, kahan_sum};
use crate::scheme::LinearScheme;

/// `δ = 1 - 2 h⁻¹(1 - ε)`.
pub fn delta_from_eps(eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("leakage rate {eps} is not in [0, 1]")));
    }
    Ok((1.0 - 2.0 * binary_entropy_inv(1.0 - eps)?).clamp(0.0, 1.0))
}

/// Per-bit sum bound `Σ ε_i` over the honest shares.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumBound {
    pub raw: f64,
    /// `min(raw, 1)`.
    pub clamped: f64,
}

pub fn bound_sum(profile: &LeakageProfile) -> SumBound {
    let raw = kahan_sum(profile.eps.iter().copied());
    SumBound { raw, clamped: raw.min(1.0) }
}

/// `δ^{2(Ñ - t')}`; equals 1 when `Ñ = t'`.
pub fn bound_bitwise(n_tilde: usize, t_prime: usize, eps: f64) -> Result<f64> {
    if n_tilde < t_prime {
        return Err(Error::Parameter(format!("n_tilde = {n_tilde} is smaller than t' = {t_prime}")));
    }
    let delta = delta_from_eps(eps)?;
    if n_tilde == t_prime {
        return Ok(1.0);
    }
    Ok(delta.powi(2 * (n_tilde - t_prime) as i32))
}

/// `(η_DS, η_SS)` upper bounds from an η_MIS value: both `√(2 η_MIS)`.
pub fn mis_to_ds_ss(eta_mis: f64) -> Result<(f64, f64)> {
    if eta_mis.is_nan() || eta_mis < 0.0 {
        return Err(Error::Domain(format!("eta_mis = {eta_mis} is negative")));
    }
    let v = (2.0 * eta_mis).sqrt();
    Ok((v, v))
}

/// What is known about the secret distribution when assembling a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SecretModel {
    Uniform,
    #[default]
    Arbitrary,
}

/// Every bound for one configuration, with the inputs echoed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub scheme: String,
    pub l: u32,
    pub n: usize,
    pub t: usize,
    pub t_prime: usize,
    pub eps: Vec<f64>,
    pub per_bit_bsc: bool,
    pub secret: SecretModel,
    pub n_tilde: usize,
    /// δ for the largest honest ε.
    pub delta: f64,
    /// Per-bit sum bound, unclamped and clamped.
    pub sum_bound_raw: f64,
    pub sum_bound: f64,
    /// Whole-secret bound `l Σ ε_i` and its conversions.
    pub eta_mis_bound: f64,
    pub eta_ds_bound: f64,
    pub eta_ss_bound: f64,
    /// `δ^{2(Ñ - t')}` and `√2 δ^{Ñ - t'}`, absent when no bitwise bound applies.
    pub per_bit_bound: Option<f64>,
    pub per_bit_ds_bound: Option<f64>,
    pub per_bit_ss_bound: Option<f64>,
    pub note: Option<String>,
}

/// Assembles all bounds. `n_tilde` defaults to the value computed from the
/// scheme's recovery coefficients; all-ones schemes always use `Ñ = N`.
///
/// The bitwise bound needs independent uniform shares (t = N) and either a
/// uniform secret, or per-bit BSC leakage with `l = 1`; otherwise it is
/// omitted with a note.
pub fn report(
    profile: &LeakageProfile,
    scheme: &LinearScheme,
    n_tilde: Option<usize>,
    secret: SecretModel,
) -> Result<BoundReport> {
    profile.validate()?;
    if profile.n != scheme.n() || profile.t != scheme.t() || profile.l != scheme.spec().bits() {
        return Err(Error::Parameter("leakage profile does not match the scheme".into()));
    }
    let n_tilde = if scheme.is_all_ones() { scheme.n() } else { n_tilde.unwrap_or_else(|| n_tilde_of(scheme)) };
    let sum = bound_sum(profile);
    let eta_mis = profile.l as f64 * sum.raw;
    let (eta_ds, eta_ss) = mis_to_ds_ss(eta_mis)?;
    let eps_max = profile.eps.iter().copied().fold(0.0, f64::max);
    let delta = delta_from_eps(eps_max)?;

    let mut note = None;
    let (mut per_bit, mut per_bit_ds, mut per_bit_ss) = (None, None, None);
    if scheme.t() != scheme.n() {
        note = Some("no applicable bitwise bound: shares are not independent (t < N)".to_string());
    } else if secret == SecretModel::Arbitrary && !profile.per_bit_bsc {
        note = Some("no applicable bitwise bound: non-uniform secret without per-bit BSC leakage".to_string());
    } else if secret == SecretModel::Arbitrary && profile.l > 1 {
        // The other bit planes of the shares are observed too and, under a
        // non-uniform prior, correlate with S^i; exact enumeration exceeds
        // δ^{2(Ñ - t')} already for GF(4).
        note = Some("no applicable bitwise bound: non-uniform secret over GF(2^l) with l > 1".to_string());
    } else {
        let b = bound_bitwise(n_tilde, profile.t_prime, eps_max)?;
        let (ds, ss) = mis_to_ds_ss(b)?;
        per_bit = Some(b);
        per_bit_ds = Some(ds);
        per_bit_ss = Some(ss);
    }

    Ok(BoundReport {
        scheme: if scheme.is_all_ones() { "all_ones" } else { "shamir" }.to_string(),
        l: profile.l,
        n: profile.n,
        t: profile.t,
        t_prime: profile.t_prime,
        eps: profile.eps.clone(),
        per_bit_bsc: profile.per_bit_bsc,
        secret,
        n_tilde,
        delta,
        sum_bound_raw: sum.raw,
        sum_bound: sum.clamped,
        eta_mis_bound: eta_mis,
        eta_ds_bound: eta_ds,
        eta_ss_bound: eta_ss,
        per_bit_bound: per_bit,
        per_bit_ds_bound: per_bit_ds,
        per_bit_ss_bound: per_bit_ss,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::bsc_eps;
    use crate::field::{FieldElement, FieldSpec};
    use crate::scheme::ShamirParams;
    use proptest::prelude::*;

    #[test]
    fn delta_examples() {
        assert!(delta_from_eps(0.0).unwrap().abs() < 1e-12);
        assert!((delta_from_eps(1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((delta_from_eps(0.5).unwrap() - 0.779944).abs() < 1e-6);
        assert!(delta_from_eps(1.5).is_err());
        // For a BSC the rate inverts back to 1 - 2q.
        let e = bsc_eps(0.1).unwrap();
        assert!((delta_from_eps(e).unwrap() - 0.8).abs() < 1e-9);
    }

    #[test]
    fn sum_examples() {
        let p = LeakageProfile::new(vec![0.0; 3], 2, 3, 2, 0).unwrap();
        assert_eq!(bound_sum(&p).raw, 0.0);
        let p = LeakageProfile::new(vec![0.1, 0.2, 0.3], 2, 4, 2, 1).unwrap();
        assert!((bound_sum(&p).raw - 0.6).abs() < 1e-12);
        let e = bsc_eps(0.2).unwrap();
        let p = LeakageProfile::new(vec![e; 3], 2, 3, 2, 0).unwrap();
        assert!((bound_sum(&p).raw - 0.834216).abs() < 1e-6);
        let p = LeakageProfile::new(vec![0.6, 0.7], 1, 2, 2, 0).unwrap();
        let s = bound_sum(&p);
        assert!((s.raw - 1.3).abs() < 1e-12);
        assert_eq!(s.clamped, 1.0);
    }

    #[test]
    fn bitwise_examples() {
        for n in 0..6 {
            assert!((bound_bitwise(n + 1, 0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        }
        let e = bsc_eps(0.1).unwrap();
        assert!((bound_bitwise(2, 0, e).unwrap() - 0.4096).abs() < 1e-9);
        assert_eq!(bound_bitwise(3, 3, 0.2).unwrap(), 1.0);
        assert!(bound_bitwise(1, 2, 0.2).is_err());
        let a = bound_bitwise(3, 0, 0.4).unwrap();
        let b = bound_bitwise(6, 0, 0.4).unwrap();
        assert!((a * a - b).abs() < 1e-12);
    }

    #[test]
    fn conversion_examples() {
        assert_eq!(mis_to_ds_ss(0.0).unwrap(), (0.0, 0.0));
        assert_eq!(mis_to_ds_ss(0.5).unwrap(), (1.0, 1.0));
        assert!(mis_to_ds_ss(-0.1).is_err());
        let d = delta_from_eps(0.3).unwrap();
        let (ds, ss) = mis_to_ds_ss(bound_bitwise(4, 1, 0.3).unwrap()).unwrap();
        assert!((ds - 2f64.sqrt() * d.powi(3)).abs() < 1e-12);
        assert!(ss <= ds);
    }

    #[test]
    fn report_all_ones() {
        let f = FieldSpec::with_default_poly(2).unwrap();
        let s = LinearScheme::all_ones(4, f).unwrap();
        let p = LeakageProfile::new(vec![0.5; 3], 2, 4, 4, 1).unwrap();
        let r = report(&p, &s, Some(1), SecretModel::Uniform).unwrap();
        assert_eq!(r.n_tilde, 4);
        assert!((r.delta - 0.779944).abs() < 1e-6);
        assert!((r.per_bit_bound.unwrap() - 0.225103).abs() < 1e-6);
        assert!((r.per_bit_bound.unwrap() - r.delta.powi(6)).abs() < 1e-12);
        assert!(r.eta_ss_bound <= r.eta_ds_bound);
    }

    #[test]
    fn report_zero_leak() {
        let f = FieldSpec::with_default_poly(1).unwrap();
        let s = LinearScheme::all_ones(3, f).unwrap();
        let p = LeakageProfile::new(vec![0.0; 3], 1, 3, 3, 0).unwrap();
        let r = report(&p, &s, None, SecretModel::Arbitrary).unwrap();
        assert!(r.note.is_some());
        let r = report(&p.with_per_bit_bsc(true), &s, None, SecretModel::Arbitrary).unwrap();
        assert_eq!(r.sum_bound, 0.0);
        assert_eq!(r.eta_mis_bound, 0.0);
        assert_eq!(r.eta_ds_bound, 0.0);
        assert_eq!(r.per_bit_bound, Some(0.0));
    }

    #[test]
    fn report_shamir_echoes_n_tilde() {
        let f = FieldSpec::new(3, 0b1011).unwrap();
        let params =
            ShamirParams::new(f, 3, 3, vec![FieldElement::new(1), FieldElement::new(2), FieldElement::new(3)]).unwrap();
        let s = LinearScheme::shamir(params).unwrap();
        let p = LeakageProfile::new(vec![0.2; 3], 3, 3, 3, 0).unwrap();
        let r = report(&p, &s, None, SecretModel::Uniform).unwrap();
        assert_eq!(r.n_tilde, n_tilde_of(&s));
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["n_tilde"], r.n_tilde);
        assert_eq!(json["eps"], serde_json::json!([0.2, 0.2, 0.2]));
    }

    #[test]
    fn report_nonuniform_secret_needs_single_bit_field() {
        let f = FieldSpec::with_default_poly(2).unwrap();
        let s = LinearScheme::all_ones(2, f).unwrap();
        let p = LeakageProfile::new(vec![0.3; 2], 2, 2, 2, 0).unwrap().with_per_bit_bsc(true);
        let r = report(&p, &s, None, SecretModel::Arbitrary).unwrap();
        assert!(r.per_bit_bound.is_none());
        assert!(report(&p, &s, None, SecretModel::Uniform).unwrap().per_bit_bound.is_some());
        let g = LinearScheme::all_ones(2, FieldSpec::with_default_poly(1).unwrap()).unwrap();
        let p1 = LeakageProfile::new(vec![0.3; 2], 1, 2, 2, 0).unwrap().with_per_bit_bsc(true);
        assert!(report(&p1, &g, None, SecretModel::Arbitrary).unwrap().per_bit_bound.is_some());
    }

    #[test]
    fn report_threshold_below_n_has_no_bitwise_bound() {
        let f = FieldSpec::with_default_poly(2).unwrap();
        let s = LinearScheme::shamir(ShamirParams::with_default_points(f, 3, 2).unwrap()).unwrap();
        let p = LeakageProfile::new(vec![0.2; 3], 2, 3, 2, 0).unwrap().with_per_bit_bsc(true);
        let r = report(&p, &s, None, SecretModel::Uniform).unwrap();
        assert!(r.per_bit_bound.is_none());
        assert!(r.note.unwrap().contains("no applicable bitwise bound"));
    }

    proptest! {
        #[test]
        fn bitwise_decreasing_and_log_linear(eps in 0.01f64..0.99, k in 1usize..10) {
            let d = delta_from_eps(eps).unwrap();
            let a = bound_bitwise(k, 0, eps).unwrap();
            let b = bound_bitwise(k + 1, 0, eps).unwrap();
            prop_assert!(b < a);
            prop_assert!((b.ln() - a.ln() - 2.0 * d.ln()).abs() < 1e-9);
        }

        #[test]
        fn delta_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(delta_from_eps(lo).unwrap() <= delta_from_eps(hi).unwrap() + 1e-12);
        }
    }
}
