//! Experiment configuration files (TOML) and command-line overrides.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{report, BoundReport, SecretModel};
use crate::channels::{bsc_eps, channel_leakage_rate, q_from_eps, Channel, ChannelConfig, LeakageProfile};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::infotheory::DiscreteDistribution;
use crate::oracle::sample_dirichlet;
use crate::scheme::{LinearScheme, ShamirParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKindConfig {
    Shamir,
    AllOnes,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub kind: SchemeKindConfig,
    pub n: usize,
    /// Defaults to `n`.
    pub t: Option<usize>,
    /// Evaluation points; defaults to `1..=n`.
    pub gammas: Option<Vec<u32>>,
    pub field: FieldSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SecretMode {
    #[default]
    Uniform,
    Point,
    Dirichlet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecretConfig {
    #[serde(default)]
    pub mode: SecretMode,
    /// Secret value for `point` mode.
    #[serde(default)]
    pub value: u32,
    /// Number of Dirichlet draws for `dirichlet` mode.
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_trials() -> usize {
    20
}

impl Default for SecretConfig {
    fn default() -> Self {
        SecretConfig { mode: SecretMode::Uniform, value: 0, trials: default_trials(), seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    N,
    Q,
    Eps,
    TPrime,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::N => "n",
            SweepAxis::Q => "q",
            SweepAxis::Eps => "eps",
            SweepAxis::TPrime => "t_prime",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Compare {
    #[default]
    Bitwise,
    Sum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    #[serde(default)]
    pub compare: Compare,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkovConfig {
    pub k: Vec<u32>,
    pub q: Vec<f64>,
    pub alpha: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<String>,
    pub json: Option<String>,
    pub svg: Option<String>,
}

/// One experiment. Either `scheme` (bound-vs-oracle runs) or `markov`
/// (Markov-gap grids) must be present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: Option<SchemeConfig>,
    /// Channel applied to every share.
    pub channel: Option<ChannelConfig>,
    /// Per-share channels; overrides `channel`.
    pub channels: Option<Vec<ChannelConfig>>,
    /// Explicit per-bit leakage rate(s); derived from the channels when absent.
    pub eps: Option<EpsConfig>,
    /// Colluders are parties `0..t_prime`.
    #[serde(default)]
    pub t_prime: usize,
    #[serde(default)]
    pub secret: SecretConfig,
    pub sweep: Option<SweepConfig>,
    pub markov: Option<MarkovConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsConfig {
    Single(f64),
    PerShare(Vec<f64>),
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub t: Option<usize>,
    pub t_prime: Option<usize>,
    pub q: Option<f64>,
    pub eps: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(scheme) = self.scheme.as_mut() {
            if let Some(n) = o.n {
                scheme.n = n;
                scheme.gammas = None;
            }
            if o.t.is_some() {
                scheme.t = o.t;
            }
        }
        if let Some(tp) = o.t_prime {
            self.t_prime = tp;
        }
        if let Some(q) = o.q {
            self.channel = Some(ChannelConfig::Bsc { q });
            self.channels = None;
        }
        if let Some(e) = o.eps {
            self.eps = Some(EpsConfig::Single(e));
        }
        if let Some(s) = o.seed {
            self.secret.seed = s;
        }
        if let Some(t) = o.trials {
            self.secret.trials = t;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.scheme, &self.markov) {
            (None, None) => return Err(Error::Config("missing [scheme] or [markov] section".into())),
            (Some(_), Some(_)) => return Err(Error::Config("[scheme] and [markov] are mutually exclusive".into())),
            _ => {}
        }
        if let Some(m) = &self.markov {
            if m.k.is_empty() || m.q.is_empty() || m.alpha.is_empty() {
                return Err(Error::Config("markov.k, markov.q and markov.alpha must be nonempty".into()));
            }
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(Error::Config("sweep.values must be nonempty".into()));
            }
        }
        if self.secret.mode == SecretMode::Dirichlet && self.secret.trials == 0 {
            return Err(Error::Config("secret.trials must be positive in dirichlet mode".into()));
        }
        if self.scheme.is_some() && self.channel.is_none() && self.channels.is_none() && self.eps.is_none() {
            return Err(Error::Config("missing channel, channels or eps".into()));
        }
        Ok(())
    }

    /// Config with the sweep axis set to `value`.
    pub fn at(&self, axis: SweepAxis, value: f64) -> Result<ExperimentConfig> {
        let mut c = self.clone();
        let whole = |v: f64| -> Result<usize> {
            if v < 0.0 || v.fract() != 0.0 {
                return Err(Error::Config(format!("sweep value {v} must be a nonnegative integer for axis {}", axis.name())));
            }
            Ok(v as usize)
        };
        match axis {
            SweepAxis::N => {
                let scheme = c.scheme.as_mut().ok_or_else(|| Error::Config("n sweep needs [scheme]".into()))?;
                scheme.n = whole(value)?;
                scheme.gammas = None;
                if let Some(ch) = &c.channels {
                    c.channel = ch.first().cloned();
                    c.channels = None;
                }
            }
            SweepAxis::Q => {
                c.channel = Some(ChannelConfig::Bsc { q: value });
                c.channels = None;
                c.eps = None;
            }
            SweepAxis::Eps => {
                c.channel = Some(ChannelConfig::Bsc { q: q_from_eps(value)? });
                c.channels = None;
                c.eps = None;
            }
            SweepAxis::TPrime => c.t_prime = whole(value)?,
        }
        Ok(c)
    }

    /// Instantiated scheme, channels and leakage rates.
    pub fn build(&self) -> Result<Experiment> {
        let sc = self.scheme.as_ref().ok_or_else(|| Error::Config("missing [scheme] section".into()))?;
        let spec = sc.field;
        let n = sc.n;
        let t = sc.t.unwrap_or(n);
        let scheme = match sc.kind {
            SchemeKindConfig::AllOnes => {
                if t != n {
                    return Err(Error::Config("all_ones scheme requires t = n".into()));
                }
                LinearScheme::all_ones(n, spec)?
            }
            SchemeKindConfig::Shamir => {
                let params = match &sc.gammas {
                    Some(g) => ShamirParams::new(spec, n, t, g.iter().map(|&v| FieldElement::new(v)).collect())?,
                    None => ShamirParams::with_default_points(spec, n, t)?,
                };
                LinearScheme::shamir(params)?
            }
        };
        let configs: Option<Vec<ChannelConfig>> = match (&self.channels, &self.channel) {
            (Some(list), _) => {
                if list.len() != n {
                    return Err(Error::Config(format!("{} channels listed for {n} shares", list.len())));
                }
                Some(list.clone())
            }
            (None, Some(c)) => Some(vec![c.clone(); n]),
            (None, None) => None,
        };
        let channels = match &configs {
            Some(list) => Some(list.iter().map(|c| c.build(spec.bits())).collect::<Result<Vec<Channel>>>()?),
            None => None,
        };
        let per_bit_bsc = configs.as_ref().is_some_and(|l| l.iter().all(|c| matches!(c, ChannelConfig::Bsc { .. })));
        if self.t_prime >= t {
            return Err(Error::ColludersCanReconstruct { colluders: self.t_prime, threshold: t });
        }
        let honest = n - self.t_prime;
        let eps = match (&self.eps, &configs, &channels) {
            (Some(EpsConfig::Single(e)), _, _) => vec![*e; honest],
            (Some(EpsConfig::PerShare(v)), _, _) => {
                if v.len() != honest {
                    return Err(Error::Config(format!("eps lists {} values for {honest} honest shares", v.len())));
                }
                v.clone()
            }
            (None, Some(cfgs), Some(chans)) => cfgs[self.t_prime..]
                .iter()
                .zip(&chans[self.t_prime..])
                .map(|(cfg, ch)| match cfg {
                    ChannelConfig::Bsc { q } => bsc_eps(*q),
                    _ => channel_leakage_rate(ch, spec.bits()),
                })
                .collect::<Result<Vec<f64>>>()?,
            _ => return Err(Error::Config("missing channel, channels or eps".into())),
        };
        Ok(Experiment {
            scheme,
            channels,
            eps,
            t_prime: self.t_prime,
            per_bit_bsc,
            secret_model: if self.secret.mode == SecretMode::Uniform { SecretModel::Uniform } else { SecretModel::Arbitrary },
            secrets: self.secret_distributions(spec.order())?,
        })
    }

    fn secret_distributions(&self, size: usize) -> Result<Vec<DiscreteDistribution>> {
        Ok(match self.secret.mode {
            SecretMode::Uniform => vec![DiscreteDistribution::uniform(size)],
            SecretMode::Point => vec![DiscreteDistribution::point(size, self.secret.value as usize)?],
            SecretMode::Dirichlet => {
                let mut v = vec![DiscreteDistribution::uniform(size)];
                v.extend(sample_dirichlet(size, self.secret.trials, self.secret.seed));
                v
            }
        })
    }
}

/// A fully instantiated configuration.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub scheme: LinearScheme,
    /// Absent when the config only states leakage rates.
    pub channels: Option<Vec<Channel>>,
    /// ε for each honest share (parties `t_prime..N`).
    pub eps: Vec<f64>,
    pub t_prime: usize,
    pub per_bit_bsc: bool,
    pub secret_model: SecretModel,
    pub secrets: Vec<DiscreteDistribution>,
}

impl Experiment {
    /// Bound report with Ñ computed from the scheme's recovery coefficients.
    pub fn report(&self) -> Result<BoundReport> {
        let spec = self.scheme.spec();
        let profile = LeakageProfile::new(self.eps.clone(), spec.bits(), self.scheme.n(), self.scheme.t(), self.t_prime)?
            .with_per_bit_bsc(self.per_bit_bsc);
        report(&profile, &self.scheme, None, self.secret_model)
    }
}
