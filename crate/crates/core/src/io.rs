//! Config (TOML) and catalog (JSON lines) formats.
//!
//! A catalog file starts with a header record and then holds one
//! instance per line:
//!
//! ```text
//! {"query_text":"Scientist","polarity":1.0,"polarity_weight":1.0}
//! {"id":"x1","items":[{"id":"x1.person","attributes":{"gender":"woman","skin":5,"age":31},"relevance":1.0}]}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inclusion::{Combiner, InclusionConfig, KernelForm};
use crate::presence::{Aggregator, Measurement, PresenceConfig, PresenceFunction, PresenceTarget, SetMode};
use crate::schema::{
    cross_group_types, AttrValue, AttributeSchema, Catalog, GroupType, Instance, MeasuredAttribute, Profile, Query,
    Violation,
};
use crate::selection::{EgalitarianVector, Objective, ObjectiveMode, Scenario, SelectionSettings};
use crate::social_choice::Mechanism;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    query_text: String,
    #[serde(default = "one")]
    polarity: f64,
    #[serde(default = "one")]
    polarity_weight: f64,
}

fn one() -> f64 {
    1.0
}

/// Parses a catalog file. Errors carry 1-based line numbers.
pub fn parse_catalog(text: &str) -> Result<Catalog> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, first) = lines
        .next()
        .ok_or_else(|| Error::Parse("catalog is empty; expected a header record".into()))?;
    let header: Header =
        serde_json::from_str(first).map_err(|e| Error::Parse(format!("catalog line {line} (header): {e}")))?;
    let mut instances = Vec::new();
    for (line, record) in lines {
        let x: Instance =
            serde_json::from_str(record).map_err(|e| Error::Parse(format!("catalog line {line}: {e}")))?;
        instances.push(x);
    }
    Ok(Catalog {
        query: Query {
            text: header.query_text,
            polarity: header.polarity,
            polarity_weight: header.polarity_weight,
        },
        instances,
    })
}

pub fn write_catalog(catalog: &Catalog) -> String {
    let header = Header {
        query_text: catalog.query.text.clone(),
        polarity: catalog.query.polarity,
        polarity_weight: catalog.query.polarity_weight,
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for x in &catalog.instances {
        out.push_str(&serde_json::to_string(x).expect("instance serializes"));
        out.push('\n');
    }
    out
}

/// A bound written as a number or as a fraction such as `"1/3"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Bound {
    Number(f64),
    Text(String),
}

impl Bound {
    fn value(&self) -> std::result::Result<f64, String> {
        match self {
            Bound::Number(v) => Ok(*v),
            Bound::Text(t) => {
                let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("bad bound `{t}`"));
                match t.split_once('/') {
                    Some((n, d)) => Ok(parse(n)? / parse(d)?),
                    None => parse(t),
                }
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchema {
    groups: Vec<GroupType>,
    #[serde(default)]
    measured: Vec<String>,
    #[serde(default)]
    intersections: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTarget {
    attribute: String,
    lower: Bound,
    upper: Bound,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawPresence {
    measurement: Measurement,
    function: PresenceFunction,
    aggregator: Aggregator,
    set_mode: SetMode,
    default_lower: Option<Bound>,
    default_upper: Option<Bound>,
    targets: Vec<RawTarget>,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawInclusion {
    combiner: Combiner,
    relevance_threshold: f64,
    attribute_cumulator: Mechanism,
    set_cumulator: Mechanism,
    apply_polarity: bool,
    nash_rescale: bool,
    kernels: BTreeMap<String, KernelForm>,
}

impl Default for RawInclusion {
    fn default() -> Self {
        let d = InclusionConfig::default();
        RawInclusion {
            combiner: d.combiner,
            relevance_threshold: d.relevance_threshold,
            attribute_cumulator: d.attribute_cumulator,
            set_cumulator: d.set_cumulator,
            apply_polarity: d.apply_polarity,
            nash_rescale: d.nash_rescale,
            kernels: d.kernels,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeights {
    diversity: f64,
    inclusion: f64,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawSelection {
    mode: ObjectiveMode,
    mechanism: Mechanism,
    diversity_floor: f64,
    weights: RawWeights,
    egalitarian_vector: EgalitarianVector,
    cap: u64,
    seed: u64,
    restarts: usize,
}

impl Default for RawSelection {
    fn default() -> Self {
        let o = Objective::default();
        let s = SelectionSettings::default();
        RawSelection {
            mode: o.mode,
            mechanism: o.mechanism,
            diversity_floor: o.diversity_floor,
            weights: RawWeights {
                diversity: o.diversity_weight,
                inclusion: o.inclusion_weight,
            },
            egalitarian_vector: o.egalitarian_vector,
            cap: s.cap,
            seed: s.seed,
            restarts: s.restarts,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema: RawSchema,
    #[serde(default)]
    presence: RawPresence,
    #[serde(default)]
    inclusion: RawInclusion,
    #[serde(default)]
    selection: RawSelection,
    #[serde(default)]
    profile: BTreeMap<String, AttrValue>,
}

/// Everything a config file carries; pair it with a catalog via
/// [`Config::scenario`].
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub schema: AttributeSchema,
    pub presence: PresenceConfig,
    pub inclusion: InclusionConfig,
    pub objective: Objective,
    pub settings: SelectionSettings,
    pub profile: Profile,
}

impl Config {
    pub fn scenario(&self, catalog: Catalog) -> Scenario {
        Scenario {
            schema: self.schema.clone(),
            catalog,
            profile: self.profile.clone(),
            presence: self.presence.clone(),
            inclusion: self.inclusion.clone(),
            objective: self.objective.clone(),
            settings: self.settings.clone(),
        }
    }

    /// Uses `mechanism` at every cumulation level.
    pub fn set_mechanism(&mut self, mechanism: Mechanism) {
        self.inclusion.attribute_cumulator = mechanism;
        self.inclusion.set_cumulator = mechanism;
        self.objective.mechanism = mechanism;
    }
}

fn push(out: &mut Vec<Violation>, locator: &str, message: impl Into<String>) {
    out.push(Violation {
        locator: locator.to_owned(),
        message: message.into(),
    });
}

/// Parses a TOML config. Syntax and shape problems are `Error::Parse`;
/// semantic problems found while assembling it are `Error::Invalid`.
pub fn parse_config(text: &str) -> Result<Config> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
    let mut problems = Vec::new();

    let mut schema = AttributeSchema {
        group_types: raw.schema.groups,
        measured_attributes: Vec::new(),
    };
    for text in &raw.schema.measured {
        match MeasuredAttribute::parse(text, Some(&schema)) {
            Ok(m) => schema.measured_attributes.push(m),
            Err(e) => push(&mut problems, &format!("schema / measured `{text}`"), e.to_string()),
        }
    }
    for groups in &raw.schema.intersections {
        let names: Vec<&str> = groups.iter().map(String::as_str).collect();
        match cross_group_types(&schema, &names) {
            Ok(crossed) => schema = crossed,
            Err(e) => push(
                &mut problems,
                &format!("schema / intersections {groups:?}"),
                e.to_string(),
            ),
        }
    }

    let p = raw.presence;
    let mut targets = Vec::new();
    let mut explicit = Vec::new();
    for t in &p.targets {
        let loc = format!("presence / target `{}`", t.attribute);
        let attribute = match MeasuredAttribute::parse(&t.attribute, Some(&schema)) {
            Ok(a) => a,
            Err(e) => {
                push(&mut problems, &loc, e.to_string());
                continue;
            }
        };
        match (t.lower.value(), t.upper.value()) {
            (Ok(lo), Ok(hi)) => match PresenceTarget::new(attribute.clone(), lo, hi) {
                Ok(target) => targets.push(target),
                Err(e) => push(&mut problems, &loc, e.to_string()),
            },
            (Err(e), _) | (_, Err(e)) => push(&mut problems, &loc, e),
        }
        explicit.push(attribute);
    }
    if let (Some(lo), Some(hi)) = (&p.default_lower, &p.default_upper) {
        match (lo.value(), hi.value()) {
            (Ok(lo), Ok(hi)) => {
                for a in &schema.measured_attributes {
                    if explicit.contains(a) {
                        continue;
                    }
                    match PresenceTarget::new(a.clone(), lo, hi) {
                        Ok(t) => targets.push(t),
                        Err(e) => {
                            push(&mut problems, "presence / defaults", e.to_string());
                            break;
                        }
                    }
                }
            }
            (Err(e), _) | (_, Err(e)) => push(&mut problems, "presence / defaults", e),
        }
    } else if p.default_lower.is_some() || p.default_upper.is_some() {
        push(
            &mut problems,
            "presence / defaults",
            "default_lower and default_upper must be given together",
        );
    }

    if !problems.is_empty() {
        return Err(Error::Invalid(problems));
    }

    let i = raw.inclusion;
    let s = raw.selection;
    Ok(Config {
        presence: PresenceConfig {
            targets,
            measurement: p.measurement,
            function: p.function,
            aggregator: p.aggregator,
            set_mode: p.set_mode,
        },
        inclusion: InclusionConfig {
            combiner: i.combiner,
            relevance_threshold: i.relevance_threshold,
            attribute_cumulator: i.attribute_cumulator,
            set_cumulator: i.set_cumulator,
            apply_polarity: i.apply_polarity,
            nash_rescale: i.nash_rescale,
            kernels: i.kernels,
        },
        objective: Objective {
            mode: s.mode,
            mechanism: s.mechanism,
            diversity_floor: s.diversity_floor,
            diversity_weight: s.weights.diversity,
            inclusion_weight: s.weights.inclusion,
            egalitarian_vector: s.egalitarian_vector,
        },
        settings: SelectionSettings {
            cap: s.cap,
            seed: s.seed,
            restarts: s.restarts,
        },
        profile: Profile {
            attributes: raw.profile,
        },
        schema,
    })
}
