//! JSON configuration: one file fully determines a shift system, the
//! window, and the period search bound. Rationals are strings ("3/4"),
//! words are digit strings, tree words use the "v|m" syntax.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Deserialize;

use nbws_core::partition::{remainder_class, PartitionContext};
use nbws_core::scalar::Scalar;
use nbws_core::tree::{TreeWord, Window};
use nbws_core::weights::{ShiftSpec, WeightRule};
use nbws_core::words::{AperiodicGenerator, FiniteWord, InfiniteWord};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad<E: fmt::Display>(what: &str) -> impl FnOnce(E) -> ConfigError + '_ {
    move |e| ConfigError(format!("{}: {}", what, e))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecConfig {
    pub n: u32,
    pub omega: OmegaDesc,
    pub weights: WeightDesc,
    #[serde(default)]
    pub window: Option<WindowDesc>,
    #[serde(default)]
    pub kmax: Option<usize>,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum OmegaDesc {
    Periodic { period: String },
    EventuallyPeriodic { preperiod: String, period: String },
    BuiltinAperiodic { name: String },
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightDesc {
    /// The same weight everywhere.
    Constant { value: String },
    /// Explicit table keyed by "v|m" tree words, with a fallback.
    Tabulated {
        entries: BTreeMap<String, String>,
        default: String,
    },
    /// k-periodic by construction: one value per remainder class of the
    /// canonical partition (over the periodic tail of omega).
    ClassPeriodic { k: usize, values: Vec<String> },
    /// Named demonstration rules.
    Builtin { name: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowDesc {
    pub pos: usize,
    pub neg: usize,
}

/// Everything a command needs, resolved and validated.
pub struct Loaded {
    pub spec: ShiftSpec,
    pub window: Window,
    pub kmax: usize,
}

pub const DEFAULT_KMAX: usize = 8;
pub const DEFAULT_POS: usize = 6;
pub const DEFAULT_NEG: usize = 12;

fn parse_scalar(s: &str) -> Result<Scalar, ConfigError> {
    let v: Scalar = s.parse().map_err(bad("weight value"))?;
    if !v.is_positive() {
        return Err(ConfigError(format!("weight value {} is not positive", s)));
    }
    Ok(v)
}

fn build_omega(desc: &OmegaDesc) -> Result<InfiniteWord, ConfigError> {
    match desc {
        OmegaDesc::Periodic { period } => {
            let p = FiniteWord::parse(period).map_err(bad("period"))?;
            InfiniteWord::periodic(p).map_err(bad("period"))
        }
        OmegaDesc::EventuallyPeriodic { preperiod, period } => {
            let u = FiniteWord::parse(preperiod).map_err(bad("preperiod"))?;
            let p = FiniteWord::parse(period).map_err(bad("period"))?;
            InfiniteWord::eventually_periodic(u, p).map_err(bad("omega"))
        }
        OmegaDesc::BuiltinAperiodic { name } => AperiodicGenerator::builtin(name)
            .map(InfiniteWord::aperiodic)
            .ok_or_else(|| ConfigError(format!("unknown aperiodic builtin {:?}", name))),
    }
}

fn check_letters(w: &FiniteWord, n: u32) -> Result<(), ConfigError> {
    for l in w.letters() {
        if l.value() > n {
            return Err(ConfigError(format!(
                "letter {} exceeds alphabet size {}",
                l, n
            )));
        }
    }
    Ok(())
}

fn build_weights(
    desc: &WeightDesc,
    omega: &InfiniteWord,
) -> Result<WeightRule, ConfigError> {
    match desc {
        WeightDesc::Constant { value } => Ok(WeightRule::Constant(parse_scalar(value)?)),
        WeightDesc::Tabulated { entries, default } => {
            let mut table = BTreeMap::new();
            for (k, v) in entries {
                let u = TreeWord::parse(k).map_err(bad("table key"))?;
                table.insert(u, parse_scalar(v)?);
            }
            Ok(WeightRule::Tabulated {
                entries: table,
                default: parse_scalar(default)?,
            })
        }
        WeightDesc::ClassPeriodic { k, values } => {
            if values.len() != *k {
                return Err(ConfigError(format!(
                    "class_periodic needs exactly k={} values, got {}",
                    k,
                    values.len()
                )));
            }
            let (tail, offset) = omega
                .shift_tail_normalize()
                .map_err(bad("class_periodic weights"))?;
            let ctx = PartitionContext::new(tail.clone(), *k).map_err(bad("partition"))?;
            let parsed: Vec<Scalar> = values
                .iter()
                .map(|v| parse_scalar(v))
                .collect::<Result<_, _>>()?;
            let inner = ctx.clone();
            let rule = WeightRule::ClassPeriodic {
                ctx,
                base: Box::new(WeightRule::Custom {
                    name: "remainder_values".to_string(),
                    f: Arc::new(move |u: &TreeWord| {
                        parsed[remainder_class(u, &inner)].clone()
                    }),
                }),
            };
            if offset == 0 {
                Ok(rule)
            } else {
                Ok(WeightRule::ShiftTailTransport {
                    offset,
                    tail,
                    base: Box::new(rule),
                })
            }
        }
        WeightDesc::Builtin { name } => match name.as_str() {
            // a distinct value in every component: defeats every period
            "depth_injective" => Ok(WeightRule::Custom {
                name: "depth_injective".to_string(),
                f: Arc::new(|u: &TreeWord| {
                    let d = u.depth() as i64;
                    let l = u.positive().len() as i64;
                    Scalar::one() + Scalar::from_ratio(1, 2 + 3 * d + 5 * l)
                }),
            }),
            _ => Err(ConfigError(format!("unknown weight builtin {:?}", name))),
        },
    }
}

impl SpecConfig {
    pub fn load(path: &std::path::Path) -> Result<SpecConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(bad("reading config"))?;
        serde_json::from_str(&text).map_err(bad("parsing config"))
    }

    pub fn resolve(
        &self,
        window_override: Option<(usize, usize)>,
        kmax_override: Option<usize>,
    ) -> Result<Loaded, ConfigError> {
        if self.n == 0 {
            return Err(ConfigError("n must be at least 1".to_string()));
        }
        let omega = build_omega(&self.omega)?;
        if let OmegaDesc::Periodic { period } = &self.omega {
            check_letters(&FiniteWord::parse(period).map_err(bad("period"))?, self.n)?;
        }
        if let OmegaDesc::EventuallyPeriodic { preperiod, period } = &self.omega {
            check_letters(&FiniteWord::parse(preperiod).map_err(bad("preperiod"))?, self.n)?;
            check_letters(&FiniteWord::parse(period).map_err(bad("period"))?, self.n)?;
        }
        let weights = build_weights(&self.weights, &omega)?;
        let (pos, neg) = window_override.unwrap_or_else(|| {
            self.window
                .as_ref()
                .map(|w| (w.pos, w.neg))
                .unwrap_or((DEFAULT_POS, DEFAULT_NEG))
        });
        let kmax = kmax_override
            .or(self.kmax)
            .unwrap_or(DEFAULT_KMAX);
        if kmax == 0 {
            return Err(ConfigError("kmax must be at least 1".to_string()));
        }
        Ok(Loaded {
            spec: ShiftSpec {
                n: self.n,
                omega,
                weights,
            },
            window: Window::new(pos, neg),
            kmax,
        })
    }
}
