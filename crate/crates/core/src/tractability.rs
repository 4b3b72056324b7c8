//! Symbolic tractability classification and the empirical ratio probe.
//!
//! Classification never evaluates a sequence at large indices: each covered
//! condition is a limit whose class is known per family kind, so verdicts
//! are exact. Explicit lists carry no tail information and classify as
//! unknown.

use serde::{Deserialize, Serialize};

use crate::caps::ResourceCaps;
use crate::complexity::{info_complexity_avg, info_complexity_worst, Criterion};
use crate::counting::ln_biguint;
use crate::error::{Error, Result};
use crate::sequences::{SequenceFamily, WeightSpec};

/// Tractability notions. The (s,t) parameters belong to `EcSt` only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Notion {
    EcSpt,
    EcPt,
    EcQpt,
    EcUwt,
    EcWt,
    EcSt { s: f64, t: f64 },
}

impl Notion {
    pub fn check(&self) -> Result<()> {
        if let Notion::EcSt { s, t } = self {
            if !(*s > 0.0 && s.is_finite() && *t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "s and t must be positive finite, got s={s}, t={t}"
                )));
            }
        }
        Ok(())
    }

    pub fn parse(name: &str, s: Option<f64>, t: Option<f64>) -> Result<Notion> {
        let notion = match name {
            "EC-SPT" => Notion::EcSpt,
            "EC-PT" => Notion::EcPt,
            "EC-QPT" => Notion::EcQpt,
            "EC-UWT" => Notion::EcUwt,
            "EC-WT" => Notion::EcWt,
            "EC-(s,t)-WT" => {
                let (s, t) = match (s, t) {
                    (Some(s), Some(t)) => (s, t),
                    _ => {
                        return Err(Error::InvalidArgument(
                            "EC-(s,t)-WT requires both s and t".into(),
                        ))
                    }
                };
                Notion::EcSt { s, t }
            }
            other => {
                return Err(Error::InvalidArgument(format!("unknown notion `{other}`")));
            }
        };
        if !matches!(notion, Notion::EcSt { .. }) && (s.is_some() || t.is_some()) {
            return Err(Error::InvalidArgument(format!(
                "notion {name} does not take s or t parameters"
            )));
        }
        notion.check()?;
        Ok(notion)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Setting {
    Worst,
    AvgAbs,
    AvgNor,
}

impl Setting {
    pub fn parse(name: &str) -> Result<Setting> {
        match name.to_ascii_lowercase().as_str() {
            "worst" => Ok(Setting::Worst),
            "avg-abs" => Ok(Setting::AvgAbs),
            "avg-nor" => Ok(Setting::AvgNor),
            other => Err(Error::InvalidArgument(format!("unknown setting `{other}`"))),
        }
    }
}

/// Class of a limit (or of a sup/liminf, where `Infinite` means unbounded
/// and `Zero`/`FinitePositive` carry their literal meaning).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitClass {
    Zero,
    FinitePositive,
    Infinite,
    Undecidable,
}

/// The limit forms the classifier evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitForm {
    /// lim ln j / a_j.
    LnJOverA,
    /// lim j^{(1-s)/s} / a_j for 0 < s < 1.
    PowerOverA { s: f64 },
    /// lim j^{1-t} a_j omega^{a_j}.
    PolyDecay { t: f64, omega: f64 },
    /// lim a_j (Infinite means the sequence diverges to infinity).
    SequenceItself,
    /// lim ln a_k / ln k.
    LnAOverLnK,
    /// liminf ln a_k / k.
    LiminfLnAOverK,
    /// liminf (1 + ln k) ln a_k / k.
    LiminfLogLnAOverK,
    /// sum over k of 1/b_k: FinitePositive when convergent, Infinite when
    /// divergent.
    SumInvB,
    /// sup over d of (sum_{k<=d} 1/b_k) / (1 + ln d).
    SupSumInvBOverLogD,
}

/// Classifies a limit form against a parametric family. Power families with
/// p = 0 and log-power families with p = 0 degenerate to constants and are
/// classified as such.
pub fn limit_eval(form: LimitForm, family: &SequenceFamily) -> LimitClass {
    use LimitClass::*;
    use SequenceFamily::*;

    // collapse degenerate parameters so each arm sees a true representative
    let family = match family {
        Power { c, p } if *p == 0.0 => Constant { c: *c },
        LogPower { c, p } if *p == 0.0 => Constant { c: *c },
        other => other.clone(),
    };

    match form {
        LimitForm::LnJOverA => match family {
            Constant { .. } => Infinite,
            Power { .. } => Zero,
            LogPower { c, p } => {
                if p > 1.0 {
                    Zero
                } else if p == 1.0 {
                    let _ = c; // limit is 1/c
                    FinitePositive
                } else {
                    Infinite
                }
            }
            Exponential { .. } => Zero,
            ExplicitList { .. } => Undecidable,
        },
        LimitForm::PowerOverA { s } => {
            let q = (1.0 - s) / s;
            match family {
                Constant { .. } => {
                    if q > 0.0 {
                        Infinite
                    } else {
                        FinitePositive
                    }
                }
                Power { p, .. } => {
                    if p > q {
                        Zero
                    } else if p == q {
                        FinitePositive
                    } else {
                        Infinite
                    }
                }
                LogPower { .. } => {
                    if q > 0.0 {
                        Infinite
                    } else {
                        Zero
                    }
                }
                Exponential { .. } => Zero,
                ExplicitList { .. } => Undecidable,
            }
        }
        LimitForm::PolyDecay { t, omega } => {
            let r = 1.0 - t;
            match family {
                Constant { .. } => {
                    if r > 0.0 {
                        Infinite
                    } else if r == 0.0 {
                        FinitePositive
                    } else {
                        Zero
                    }
                }
                // omega^{a_j} decays super-polynomially whenever a_j grows
                // at least like a power of j
                Power { .. } => Zero,
                Exponential { .. } => Zero,
                LogPower { c, p } => {
                    if p > 1.0 {
                        Zero
                    } else if p == 1.0 {
                        // omega^{a_j} = (j+1)^{-c ln(1/omega)}
                        let decay = c * (1.0 / omega).ln();
                        if decay > r {
                            Zero
                        } else {
                            Infinite
                        }
                    } else if r > 0.0 {
                        Infinite
                    } else {
                        Zero
                    }
                }
                ExplicitList { .. } => Undecidable,
            }
        }
        LimitForm::SequenceItself => match family {
            Constant { .. } => FinitePositive,
            Power { .. } | LogPower { .. } | Exponential { .. } => Infinite,
            ExplicitList { .. } => Undecidable,
        },
        LimitForm::LnAOverLnK => match family {
            Constant { .. } | LogPower { .. } => Zero,
            Power { .. } => FinitePositive,
            Exponential { .. } => Infinite,
            ExplicitList { .. } => Undecidable,
        },
        LimitForm::LiminfLnAOverK => match family {
            Constant { .. } | Power { .. } | LogPower { .. } => Zero,
            Exponential { .. } => FinitePositive,
            ExplicitList { .. } => Undecidable,
        },
        LimitForm::LiminfLogLnAOverK => match family {
            Constant { .. } | Power { .. } | LogPower { .. } => Zero,
            Exponential { .. } => Infinite,
            ExplicitList { .. } => Undecidable,
        },
        LimitForm::SumInvB => match family {
            Constant { .. } | LogPower { .. } => Infinite,
            Power { p, .. } => {
                if p > 1.0 {
                    FinitePositive
                } else {
                    Infinite
                }
            }
            Exponential { .. } => FinitePositive,
            ExplicitList { .. } => Undecidable,
        },
        LimitForm::SupSumInvBOverLogD => match family {
            Constant { .. } | LogPower { .. } => Infinite,
            Power { p, .. } => {
                if p >= 1.0 {
                    FinitePositive
                } else {
                    Infinite
                }
            }
            Exponential { .. } => FinitePositive,
            ExplicitList { .. } => Undecidable,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Holds,
    Fails,
    Unknown,
}

/// A classification with the governing condition and the limit classes that
/// decided it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub governing_condition: String,
    pub limit_values: Vec<(String, LimitClass)>,
}

impl Verdict {
    fn unconditional(tag: &str) -> Verdict {
        Verdict {
            outcome: Outcome::Holds,
            governing_condition: tag.to_string(),
            limit_values: Vec::new(),
        }
    }
}

fn verdict_from_zero_limit(tag: &str, label: &str, class: LimitClass) -> Verdict {
    let outcome = match class {
        LimitClass::Zero => Outcome::Holds,
        LimitClass::FinitePositive | LimitClass::Infinite => Outcome::Fails,
        LimitClass::Undecidable => Outcome::Unknown,
    };
    Verdict {
        outcome,
        governing_condition: tag.to_string(),
        limit_values: vec![(label.to_string(), class)],
    }
}

fn verdict_a_diverges(family: &SequenceFamily) -> Verdict {
    let class = limit_eval(LimitForm::SequenceItself, family);
    let outcome = match class {
        LimitClass::Infinite => Outcome::Holds,
        LimitClass::Zero | LimitClass::FinitePositive => Outcome::Fails,
        LimitClass::Undecidable => Outcome::Unknown,
    };
    Verdict {
        outcome,
        governing_condition: "bullet: lim a_k = inf".to_string(),
        limit_values: vec![("lim a_k".to_string(), class)],
    }
}

fn two_part(tag: &str, parts: Vec<(String, LimitClass, bool)>) -> Verdict {
    // a part records (label, class, satisfied); Unknown dominates Fails
    let mut outcome = Outcome::Holds;
    for (_, class, ok) in &parts {
        if *class == LimitClass::Undecidable {
            outcome = Outcome::Unknown;
            break;
        }
        if !ok {
            outcome = Outcome::Fails;
        }
    }
    Verdict {
        outcome,
        governing_condition: tag.to_string(),
        limit_values: parts.into_iter().map(|(l, c, _)| (l, c)).collect(),
    }
}

fn classify_worst(spec: &WeightSpec, notion: Notion) -> Result<Verdict> {
    let a = spec.a_family();
    let b = spec.b_family();
    Ok(match notion {
        Notion::EcSpt | Notion::EcPt => {
            let sum_b = limit_eval(LimitForm::SumInvB, b);
            let liminf_a = limit_eval(LimitForm::LiminfLnAOverK, a);
            two_part(
                "bullet: sum 1/b_k < inf and liminf ln(a_k)/k > 0",
                vec![
                    ("sum 1/b_k".to_string(), sum_b, sum_b == LimitClass::FinitePositive),
                    (
                        "liminf ln(a_k)/k".to_string(),
                        liminf_a,
                        matches!(liminf_a, LimitClass::FinitePositive | LimitClass::Infinite),
                    ),
                ],
            )
        }
        Notion::EcQpt => {
            let sup_b = limit_eval(LimitForm::SupSumInvBOverLogD, b);
            let liminf_a = limit_eval(LimitForm::LiminfLogLnAOverK, a);
            two_part(
                "bullet: sup_d sum 1/b_k / (1+ln d) < inf and liminf (1+ln k) ln(a_k)/k > 0",
                vec![
                    ("sup_d sum 1/b_k / (1+ln d)".to_string(), sup_b, sup_b == LimitClass::FinitePositive),
                    (
                        "liminf (1+ln k) ln(a_k)/k".to_string(),
                        liminf_a,
                        matches!(liminf_a, LimitClass::FinitePositive | LimitClass::Infinite),
                    ),
                ],
            )
        }
        Notion::EcUwt => {
            let class = limit_eval(LimitForm::LnAOverLnK, a);
            let outcome = match class {
                LimitClass::Infinite => Outcome::Holds,
                LimitClass::Zero | LimitClass::FinitePositive => Outcome::Fails,
                LimitClass::Undecidable => Outcome::Unknown,
            };
            Verdict {
                outcome,
                governing_condition: "bullet: lim ln(a_k)/ln k = inf".to_string(),
                limit_values: vec![("lim ln(a_k)/ln k".to_string(), class)],
            }
        }
        Notion::EcWt => verdict_a_diverges(a),
        Notion::EcSt { s, t } => {
            if s.max(t) > 1.0 {
                Verdict::unconditional("always: max(s,t) > 1")
            } else if s == 1.0 && t == 1.0 {
                verdict_a_diverges(a)
            } else if s == 1.0 {
                verdict_from_zero_limit("(1.7)", "lim ln j / a_j", limit_eval(LimitForm::LnJOverA, a))
            } else {
                verdict_from_zero_limit(
                    "(1.8)",
                    "lim j^{(1-s)/s} / a_j",
                    limit_eval(LimitForm::PowerOverA { s }, a),
                )
            }
        }
    })
}

fn classify_avg(spec: &WeightSpec, notion: Notion, setting: Setting) -> Result<Verdict> {
    let a = spec.a_family();
    match notion {
        Notion::EcWt => Ok(verdict_a_diverges(a)),
        Notion::EcUwt => {
            if setting == Setting::AvgAbs {
                // coincides with the worst case under ABS
                classify_worst(spec, notion)
            } else {
                Err(Error::Unsupported(
                    "EC-UWT under NOR is not covered; nearest covered cell is EC-UWT under ABS"
                        .into(),
                ))
            }
        }
        Notion::EcSpt | Notion::EcPt | Notion::EcQpt => Err(Error::Unsupported(
            "EC-SPT/EC-PT/EC-QPT are covered in the worst case setting only".into(),
        )),
        Notion::EcSt { s, t } => {
            if t > 1.0 {
                Ok(Verdict::unconditional("always: t > 1"))
            } else if t == 1.0 && s >= 1.0 {
                Ok(verdict_a_diverges(a))
            } else if s < 1.0 {
                Ok(verdict_from_zero_limit(
                    "(1.11)",
                    "lim j^{(1-s)/s} / a_j",
                    limit_eval(LimitForm::PowerOverA { s }, a),
                ))
            } else if s == 1.0 {
                if setting == Setting::AvgAbs {
                    Ok(verdict_from_zero_limit(
                        "(1.10)",
                        "lim ln j / a_j",
                        limit_eval(LimitForm::LnJOverA, a),
                    ))
                } else {
                    Err(Error::Unsupported(
                        "EC-(1,t)-WT with t < 1 under NOR is not covered; nearest covered cell \
                         is ABS via (1.10)"
                            .into(),
                    ))
                }
            } else {
                Ok(verdict_from_zero_limit(
                    "(1.12)",
                    "lim j^{1-t} a_j omega^{a_j}",
                    limit_eval(LimitForm::PolyDecay { t, omega: spec.omega() }, a),
                ))
            }
        }
    }
}

/// Decides whether `notion` holds for the problem defined by `spec` in the
/// given setting.
pub fn classify(spec: &WeightSpec, notion: Notion, setting: Setting) -> Result<Verdict> {
    notion.check()?;
    match setting {
        Setting::Worst => classify_worst(spec, notion),
        Setting::AvgAbs | Setting::AvgNor => classify_avg(spec, notion, setting),
    }
}

/// The ratio table of the probe: ln n(eps, d) / ((ln 1/eps)^s + d^t) over a
/// grid, with max and min along complete antidiagonals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeTable {
    pub s: f64,
    pub t: f64,
    /// Sorted so eps decreases (1/eps increases) along the axis.
    pub eps_grid: Vec<f64>,
    pub d_grid: Vec<usize>,
    /// ratios[i][j] for eps_grid[i], d_grid[j].
    pub ratios: Vec<Vec<f64>>,
    /// Maxima over the complete antidiagonals (those of full length
    /// min(|eps_grid|, |d_grid|)), in sweep order of increasing 1/eps + d.
    pub antidiagonal_max: Vec<f64>,
    pub antidiagonal_min: Vec<f64>,
}

pub fn probe_ratio(
    spec: &WeightSpec,
    s: f64,
    t: f64,
    setting: Setting,
    eps_grid: &[f64],
    d_grid: &[usize],
    caps: ResourceCaps,
) -> Result<ProbeTable> {
    if eps_grid.is_empty() || d_grid.is_empty() {
        return Err(Error::InvalidArgument("probe grids must be nonempty".into()));
    }
    if !(s > 0.0 && t > 0.0) {
        return Err(Error::InvalidArgument("s and t must be positive".into()));
    }
    let mut eps_grid: Vec<f64> = eps_grid.to_vec();
    eps_grid.sort_by(|x, y| y.total_cmp(x));
    let mut d_grid: Vec<usize> = d_grid.to_vec();
    d_grid.sort_unstable();

    let mut ratios = Vec::with_capacity(eps_grid.len());
    for &eps in &eps_grid {
        let mut row = Vec::with_capacity(d_grid.len());
        for &d in &d_grid {
            let ln_n = match setting {
                Setting::Worst => {
                    let n = info_complexity_worst(spec, d, eps, caps)?;
                    if n.bits() == 0 {
                        0.0
                    } else {
                        ln_biguint(&n)
                    }
                }
                Setting::AvgAbs => {
                    ((info_complexity_avg(spec, d, eps, Criterion::Abs, caps)?).max(1) as f64).ln()
                }
                Setting::AvgNor => {
                    ((info_complexity_avg(spec, d, eps, Criterion::Nor, caps)?).max(1) as f64).ln()
                }
            };
            row.push(ln_n / ((1.0 / eps).ln().powf(s) + (d as f64).powf(t)));
        }
        ratios.push(row);
    }

    let (rows, cols) = (eps_grid.len(), d_grid.len());
    let full = rows.min(cols);
    let mut antidiagonal_max = Vec::new();
    let mut antidiagonal_min = Vec::new();
    for k in 0..rows + cols - 1 {
        let mut cells = Vec::new();
        for i in 0..rows {
            if k >= i && k - i < cols {
                cells.push(ratios[i][k - i]);
            }
        }
        if cells.len() == full {
            antidiagonal_max.push(cells.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            antidiagonal_min.push(cells.iter().copied().fold(f64::INFINITY, f64::min));
        }
    }
    Ok(ProbeTable { s, t, eps_grid, d_grid, ratios, antidiagonal_max, antidiagonal_min })
}
