//! Representativeness of items for a profile, and inclusion of
//! instances and sets built on it.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::{
    AttrValue, AttributeRef, AttributeSchema, Bearer, GroupKind, GroupType, Instance, Item, Profile, Query,
};
use crate::social_choice::{affine_rescale, cumulate, Mechanism};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelForm {
    CategoricalEquality,
    OrdinalSimilarity,
    NumericSimilarity,
    CompositeAnyMatch,
}

impl KernelForm {
    pub fn default_for(kind: GroupKind) -> Self {
        match kind {
            GroupKind::Categorical => KernelForm::CategoricalEquality,
            GroupKind::Ordinal => KernelForm::OrdinalSimilarity,
            GroupKind::Numeric => KernelForm::NumericSimilarity,
            GroupKind::Composite => KernelForm::CompositeAnyMatch,
        }
    }

    /// Exact equality works on any kind; the similarity kernels need
    /// their own kind.
    pub fn compatible_with(self, kind: GroupKind) -> bool {
        match self {
            KernelForm::CategoricalEquality => true,
            KernelForm::OrdinalSimilarity => kind == GroupKind::Ordinal,
            KernelForm::NumericSimilarity => kind == GroupKind::Numeric,
            KernelForm::CompositeAnyMatch => kind == GroupKind::Composite,
        }
    }

    fn name(self) -> &'static str {
        match self {
            KernelForm::CategoricalEquality => "categorical-equality",
            KernelForm::OrdinalSimilarity => "ordinal-similarity",
            KernelForm::NumericSimilarity => "numeric-similarity",
            KernelForm::CompositeAnyMatch => "composite-any-match",
        }
    }
}

/// A representativeness kernel bound to one group type.
#[derive(Clone, Debug, PartialEq)]
pub struct RepKernel {
    pub group: String,
    pub form: KernelForm,
    scale_max: f64,
}

impl RepKernel {
    pub fn new(group: &GroupType, form: Option<KernelForm>) -> Result<Self> {
        let form = form.unwrap_or_else(|| KernelForm::default_for(group.kind));
        if !form.compatible_with(group.kind) {
            return Err(Error::IncompatibleKernel {
                group: group.name.clone(),
                kind: group.kind.to_string(),
                form: form.name().to_owned(),
            });
        }
        Ok(RepKernel {
            group: group.name.clone(),
            form,
            scale_max: group.scale_max.unwrap_or(1.0),
        })
    }

    /// Similarity of two values of this kernel's group, before polarity.
    pub fn similarity(&self, item: &AttrValue, profile: &AttrValue) -> f64 {
        match self.form {
            KernelForm::CategoricalEquality => f64::from(u8::from(item == profile)),
            KernelForm::OrdinalSimilarity | KernelForm::NumericSimilarity => {
                match (item.as_number(), profile.as_number()) {
                    (Some(a), Some(b)) => {
                        let d = (a - b).abs();
                        if self.form == KernelForm::OrdinalSimilarity {
                            ((self.scale_max - d) / self.scale_max).max(0.0)
                        } else {
                            (1.0 - d / self.scale_max).max(0.0)
                        }
                    }
                    _ => 0.0,
                }
            }
            KernelForm::CompositeAnyMatch => match (item, profile) {
                (AttrValue::Composite(a), AttrValue::Composite(b)) => {
                    f64::from(u8::from(a.iter().any(|(k, v)| b.get(k) == Some(v))))
                }
                _ => 0.0,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Combiner {
    SingleItem,
    #[default]
    RelevanceWeightedMean,
    MedianAboveThreshold,
    Max,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InclusionConfig {
    pub combiner: Combiner,
    /// θ for [`Combiner::MedianAboveThreshold`].
    pub relevance_threshold: f64,
    pub attribute_cumulator: Mechanism,
    pub set_cumulator: Mechanism,
    pub apply_polarity: bool,
    /// Map scores through `(s + 1) / 2` before nash cumulation.
    pub nash_rescale: bool,
    /// Per-group kernel overrides; other groups use their kind's default.
    pub kernels: BTreeMap<String, KernelForm>,
}

impl Default for InclusionConfig {
    fn default() -> Self {
        InclusionConfig {
            combiner: Combiner::default(),
            relevance_threshold: 0.5,
            attribute_cumulator: Mechanism::Utilitarian,
            set_cumulator: Mechanism::Utilitarian,
            apply_polarity: true,
            nash_rescale: false,
            kernels: BTreeMap::new(),
        }
    }
}

impl InclusionConfig {
    pub fn kernel(&self, schema: &AttributeSchema, group: &str) -> Result<RepKernel> {
        RepKernel::new(schema.require_group(group)?, self.kernels.get(group).copied())
    }

    /// Cumulates with `mechanism`, applying the nash rescale if enabled.
    pub fn cumulate(&self, scores: &[f64], mechanism: Mechanism) -> Result<f64> {
        if mechanism == Mechanism::Nash && self.nash_rescale {
            let mapped: Vec<f64> = scores.iter().copied().map(affine_rescale).collect();
            cumulate(&mapped, mechanism)
        } else {
            cumulate(scores, mechanism)
        }
    }
}

/// Representativeness of `item` for `profile` along the kernel's group.
/// `None` when either side has no value for the group.
pub fn representativeness(
    kernel: &RepKernel,
    item: &Item,
    profile: &Profile,
    query: &Query,
    apply_polarity: bool,
) -> Option<f64> {
    let held = item.value_of(&kernel.group)?;
    let wanted = profile.value_of(&kernel.group)?;
    let base = kernel.similarity(held, wanted);
    if apply_polarity {
        Some((base * query.polarity_weight * query.polarity).clamp(-1.0, 1.0))
    } else {
        Some(base)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ItemScore {
    pub item: String,
    /// Item's value for the group, if any.
    pub value: Option<String>,
    pub relevance: f64,
    pub representativeness: Option<f64>,
}

/// Inclusion of one instance along one group type.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttributeInclusion {
    pub group: String,
    pub items: Vec<ItemScore>,
    pub value: Option<f64>,
    /// Why `value` is undefined.
    pub excluded: Option<String>,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

fn combine(defined: &[(&ItemScore, f64)], config: &InclusionConfig) -> std::result::Result<f64, String> {
    match config.combiner {
        Combiner::SingleItem => {
            let best = defined
                .iter()
                .max_by(|a, b| {
                    a.0.relevance
                        .total_cmp(&b.0.relevance)
                        .then_with(|| b.0.item.cmp(&a.0.item))
                })
                .expect("nonempty");
            Ok(best.1)
        }
        Combiner::RelevanceWeightedMean => {
            let mut pairs: Vec<(f64, f64)> = defined.iter().map(|(s, r)| (s.relevance, *r)).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            let total: f64 = pairs.iter().map(|p| p.0).sum();
            if total <= 0.0 {
                return Err("total relevance is zero".into());
            }
            let weighted: f64 = pairs.iter().map(|(w, r)| w * r).sum();
            let lo = pairs.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
            let hi = pairs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
            Ok((weighted / total).clamp(lo, hi))
        }
        Combiner::MedianAboveThreshold => {
            let mut reps: Vec<f64> = defined
                .iter()
                .filter(|(s, _)| s.relevance >= config.relevance_threshold)
                .map(|(_, r)| *r)
                .collect();
            if reps.is_empty() {
                return Err(format!("no item with relevance >= {}", config.relevance_threshold));
            }
            reps.sort_by(f64::total_cmp);
            Ok(median(&reps))
        }
        Combiner::Max => Ok(defined.iter().map(|(_, r)| *r).fold(f64::NEG_INFINITY, f64::max)),
    }
}

/// Inclusion of instance `x` for `profile` along the kernel's group.
pub fn instance_inclusion(
    kernel: &RepKernel,
    x: &Instance,
    profile: &Profile,
    query: &Query,
    config: &InclusionConfig,
) -> AttributeInclusion {
    let items: Vec<ItemScore> = x
        .items
        .iter()
        .map(|i| ItemScore {
            item: i.id.clone(),
            value: i.value_of(&kernel.group).map(|v| v.to_string()),
            relevance: i.relevance,
            representativeness: representativeness(kernel, i, profile, query, config.apply_polarity),
        })
        .collect();
    let defined: Vec<(&ItemScore, f64)> = items
        .iter()
        .filter_map(|s| s.representativeness.map(|r| (s, r)))
        .collect();

    let (value, excluded) = if profile.value_of(&kernel.group).is_none() {
        (None, Some(format!("profile has no `{}` value", kernel.group)))
    } else if defined.is_empty() {
        (None, Some(format!("no item carries `{}`", kernel.group)))
    } else {
        match combine(&defined, config) {
            Ok(v) => (Some(v), None),
            Err(why) => (None, Some(why)),
        }
    };
    AttributeInclusion {
        group: kernel.group.clone(),
        items,
        value,
        excluded,
    }
}

/// Inclusion of one instance across every group type in the profile.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiInclusion {
    pub instance: String,
    pub attributes: Vec<AttributeInclusion>,
}

impl MultiInclusion {
    /// Scores of the attributes that are defined, in profile group order.
    pub fn defined(&self) -> Vec<f64> {
        self.attributes.iter().filter_map(|a| a.value).collect()
    }

    pub fn value_of(&self, group: &str) -> Option<f64> {
        self.attributes.iter().find(|a| a.group == group)?.value
    }

    pub fn cumulate(&self, config: &InclusionConfig, mechanism: Mechanism) -> Result<f64> {
        let scores = self.defined();
        if scores.is_empty() {
            return Err(Error::UndefinedInclusion(self.instance.clone()));
        }
        config.cumulate(&scores, mechanism)
    }
}

/// Per-attribute inclusion for every profile group; cumulate with
/// [`MultiInclusion::cumulate`].
pub fn attribute_inclusions(
    schema: &AttributeSchema,
    x: &Instance,
    profile: &Profile,
    query: &Query,
    config: &InclusionConfig,
) -> Result<MultiInclusion> {
    let mut attributes = Vec::with_capacity(profile.attributes.len());
    for group in profile.attributes.keys() {
        let kernel = config.kernel(schema, group)?;
        attributes.push(instance_inclusion(&kernel, x, profile, query, config));
    }
    Ok(MultiInclusion {
        instance: x.id.clone(),
        attributes,
    })
}

/// Cumulated multi-attribute inclusion with the configured attribute
/// cumulator.
pub fn multi_attribute_inclusion(
    schema: &AttributeSchema,
    x: &Instance,
    profile: &Profile,
    query: &Query,
    config: &InclusionConfig,
) -> Result<f64> {
    attribute_inclusions(schema, x, profile, query, config)?.cumulate(config, config.attribute_cumulator)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InclusionScope {
    Attribute(String),
    AllAttributes,
}

/// Cumulative inclusion of a set with the configured set cumulator.
pub fn set_inclusion(
    schema: &AttributeSchema,
    scope: &InclusionScope,
    set: &[&Instance],
    profile: &Profile,
    query: &Query,
    config: &InclusionConfig,
) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut per = Vec::with_capacity(set.len());
    for x in set {
        let v = match scope {
            InclusionScope::AllAttributes => multi_attribute_inclusion(schema, x, profile, query, config)?,
            InclusionScope::Attribute(group) => {
                let kernel = config.kernel(schema, group)?;
                instance_inclusion(&kernel, x, profile, query, config)
                    .value
                    .ok_or_else(|| Error::UndefinedAttribute {
                        group: group.clone(),
                        instance: x.id.clone(),
                    })?
            }
        };
        per.push(v);
    }
    config.cumulate(&per, config.set_cumulator)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValueShare {
    pub value: String,
    pub count: usize,
    pub share: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Homogeneity {
    pub group: String,
    pub restrict: Option<String>,
    pub carrying: usize,
    pub shares: Vec<ValueShare>,
    /// Largest share of a single value: 1 is fully homogeneous.
    pub value: f64,
}

/// Concentration of `group` values across the items of `set`,
/// optionally among items matching `restrict`.
pub fn homogeneity(
    schema: &AttributeSchema,
    group: &str,
    set: &[&Instance],
    restrict: Option<&AttributeRef>,
) -> Result<Homogeneity> {
    schema.require_group(group)?;
    if let Some(r) = restrict {
        schema.require_group(&r.group)?;
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut carrying = 0;
    for item in set.iter().flat_map(|x| x.items.iter()) {
        if restrict.is_some_and(|r| !r.matches(item)) {
            continue;
        }
        if let Some(v) = item.value_of(group) {
            carrying += 1;
            *counts.entry(v.to_string()).or_default() += 1;
        }
    }
    if carrying == 0 {
        let what = match restrict {
            Some(r) => format!("{group} among {r}"),
            None => group.to_owned(),
        };
        return Err(Error::Unpopulated(what));
    }
    let mut shares: Vec<ValueShare> = counts
        .into_iter()
        .map(|(value, count)| ValueShare {
            share: count as f64 / carrying as f64,
            value,
            count,
        })
        .collect();
    shares.sort_by(|a, b| match b.count.cmp(&a.count) {
        Ordering::Equal => a.value.cmp(&b.value),
        o => o,
    });
    Ok(Homogeneity {
        group: group.to_owned(),
        restrict: restrict.map(|r| r.to_string()),
        carrying,
        value: shares[0].share,
        shares,
    })
}
