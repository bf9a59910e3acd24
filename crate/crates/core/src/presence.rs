//! Presence of attributes against target bounds, and diversity scores
//! built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::{AttributeSchema, Instance, Item, MeasuredAttribute};
use crate::social_choice::{cumulate, Mechanism};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measurement {
    /// Share of items carrying the attribute.
    #[default]
    ItemProportion,
    /// Share of instances with at least one item carrying the attribute.
    InstanceProportion,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresenceFunction {
    #[default]
    Indicator,
    /// 1 on [lower, upper], linear ramps to 0 at 0 and at 1.
    Trapezoid,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregator {
    #[default]
    Min,
    Max,
    Mean,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetMode {
    /// Score the union of the set's items as one virtual instance.
    #[default]
    Pooled,
    /// Cumulate per-instance diversity with a social-choice mechanism.
    PerInstance,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PresenceTarget {
    pub attribute: MeasuredAttribute,
    pub lower: f64,
    pub upper: f64,
}

impl PresenceTarget {
    pub fn new(attribute: impl Into<MeasuredAttribute>, lower: f64, upper: f64) -> Result<Self> {
        let attribute = attribute.into();
        if !(0.0 <= lower && lower <= upper && upper <= 1.0) {
            return Err(Error::Parse(format!(
                "target for `{attribute}` needs 0 <= lower <= upper <= 1, got [{lower}, {upper}]"
            )));
        }
        Ok(PresenceTarget {
            attribute,
            lower,
            upper,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PresenceConfig {
    pub targets: Vec<PresenceTarget>,
    pub measurement: Measurement,
    pub function: PresenceFunction,
    pub aggregator: Aggregator,
    pub set_mode: SetMode,
}

impl PresenceConfig {
    /// Same bounds for every measured attribute in `schema`.
    pub fn uniform(schema: &AttributeSchema, lower: f64, upper: f64) -> Result<Self> {
        let targets = schema
            .measured_attributes
            .iter()
            .map(|a| PresenceTarget::new(a.clone(), lower, upper))
            .collect::<Result<_>>()?;
        Ok(PresenceConfig {
            targets,
            measurement: Measurement::default(),
            function: PresenceFunction::default(),
            aggregator: Aggregator::default(),
            set_mode: SetMode::default(),
        })
    }

    pub fn target(&self, attribute: &MeasuredAttribute) -> Option<&PresenceTarget> {
        self.targets.iter().find(|t| &t.attribute == attribute)
    }

    /// Messages for measured attributes with zero or several targets,
    /// and targets for attributes that are not measured.
    pub fn coverage_problems(&self, schema: &AttributeSchema) -> Vec<String> {
        let mut out = Vec::new();
        for a in &schema.measured_attributes {
            match self.targets.iter().filter(|t| &t.attribute == a).count() {
                1 => {}
                0 => out.push(format!("no target for `{a}`")),
                n => out.push(format!("{n} targets for `{a}`")),
            }
        }
        for t in &self.targets {
            if !schema.measured_attributes.contains(&t.attribute) {
                out.push(format!("target for unmeasured attribute `{}`", t.attribute));
            }
        }
        out
    }
}

/// Measures `a` over the union of `instances`.
pub fn measure_pooled(a: &MeasuredAttribute, instances: &[&Instance], measurement: Measurement) -> Result<f64> {
    if instances.is_empty() {
        return Err(Error::EmptySet);
    }
    match measurement {
        Measurement::ItemProportion => {
            let items: Vec<&Item> = instances.iter().flat_map(|x| x.items.iter()).collect();
            if items.is_empty() {
                return Err(Error::EmptySet);
            }
            let hits = items.iter().filter(|i| a.matches(**i)).count();
            Ok(hits as f64 / items.len() as f64)
        }
        Measurement::InstanceProportion => {
            let hits = instances
                .iter()
                .filter(|x| x.items.iter().any(|i| a.matches(i)))
                .count();
            Ok(hits as f64 / instances.len() as f64)
        }
    }
}

/// Proportion of `a` in one instance.
pub fn measure_presence(a: &MeasuredAttribute, x: &Instance, measurement: Measurement) -> Result<f64> {
    measure_pooled(a, &[x], measurement)
}

/// Maps a measured proportion onto [0, 1] given the target bounds.
pub fn presence_value(measured: f64, target: &PresenceTarget, function: PresenceFunction) -> f64 {
    let (lo, hi) = (target.lower, target.upper);
    let inside = lo <= measured && measured <= hi;
    match function {
        PresenceFunction::Indicator => f64::from(u8::from(inside)),
        PresenceFunction::Trapezoid => {
            if inside {
                1.0
            } else if measured < lo {
                (measured / lo).clamp(0.0, 1.0)
            } else {
                (1.0 - (measured - hi) / (1.0 - hi)).clamp(0.0, 1.0)
            }
        }
    }
}

pub fn presence_score(
    x: &Instance,
    target: &PresenceTarget,
    measurement: Measurement,
    function: PresenceFunction,
) -> Result<f64> {
    let m = measure_presence(&target.attribute, x, measurement)?;
    Ok(presence_value(m, target, function))
}

pub fn aggregate(scores: &[f64], aggregator: Aggregator) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::NoMeasuredAttributes);
    }
    Ok(match aggregator {
        Aggregator::Min => cumulate(scores, Mechanism::Egalitarian)?,
        Aggregator::Mean => cumulate(scores, Mechanism::Utilitarian)?,
        Aggregator::Max => scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Presence of one measured attribute.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttributePresence {
    pub attribute: String,
    pub measured: f64,
    pub presence: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiversityScore {
    pub value: f64,
    pub attributes: Vec<AttributePresence>,
}

/// Diversity of the pooled items of `instances`.
pub fn pooled_diversity(
    schema: &AttributeSchema,
    instances: &[&Instance],
    config: &PresenceConfig,
) -> Result<DiversityScore> {
    let mut attributes = Vec::with_capacity(schema.measured_attributes.len());
    for a in &schema.measured_attributes {
        let target = config.target(a).ok_or_else(|| Error::MissingTarget(a.to_string()))?;
        let measured = measure_pooled(a, instances, config.measurement)?;
        attributes.push(AttributePresence {
            attribute: a.to_string(),
            measured,
            presence: presence_value(measured, target, config.function),
        });
    }
    let scores: Vec<f64> = attributes.iter().map(|p| p.presence).collect();
    Ok(DiversityScore {
        value: aggregate(&scores, config.aggregator)?,
        attributes,
    })
}

pub fn diversity_score(schema: &AttributeSchema, x: &Instance, config: &PresenceConfig) -> Result<DiversityScore> {
    pooled_diversity(schema, &[x], config)
}

/// Cumulative diversity of a set, in the configured [`SetMode`].
/// `cumulation` is only used in per-instance mode.
pub fn set_diversity(
    schema: &AttributeSchema,
    set: &[&Instance],
    config: &PresenceConfig,
    cumulation: Mechanism,
) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    match config.set_mode {
        SetMode::Pooled => Ok(pooled_diversity(schema, set, config)?.value),
        SetMode::PerInstance => {
            let per = set
                .iter()
                .map(|x| diversity_score(schema, x, config).map(|d| d.value))
                .collect::<Result<Vec<_>>>()?;
            cumulate(&per, cumulation)
        }
    }
}
