//! Attribute universe, catalogs and profiles.
//!
//! Everything here is plain data. Construction never fails; the
//! `validate_*` functions report every broken invariant at once so a
//! caller can print them all. [`crate::Scenario`] refuses to build from
//! anything these functions reject.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Categorical,
    Ordinal,
    Numeric,
    Composite,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::Categorical => "categorical",
            GroupKind::Ordinal => "ordinal",
            GroupKind::Numeric => "numeric",
            GroupKind::Composite => "composite",
        })
    }
}

/// A group type such as `gender`, `skin` or `hair`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupType {
    pub name: String,
    pub kind: GroupKind,
    /// Top of the scale for ordinal and numeric groups.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_max: Option<f64>,
    /// Named parts of a composite group.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subfields: Vec<String>,
}

impl GroupType {
    pub fn categorical(name: &str) -> Self {
        GroupType {
            name: name.to_owned(),
            kind: GroupKind::Categorical,
            scale_max: None,
            subfields: Vec::new(),
        }
    }

    pub fn ordinal(name: &str, scale_max: f64) -> Self {
        GroupType {
            name: name.to_owned(),
            kind: GroupKind::Ordinal,
            scale_max: Some(scale_max),
            subfields: Vec::new(),
        }
    }

    pub fn numeric(name: &str, scale_max: f64) -> Self {
        GroupType {
            name: name.to_owned(),
            kind: GroupKind::Numeric,
            scale_max: Some(scale_max),
            subfields: Vec::new(),
        }
    }

    pub fn composite(name: &str, subfields: &[&str]) -> Self {
        GroupType {
            name: name.to_owned(),
            kind: GroupKind::Composite,
            scale_max: None,
            subfields: subfields.iter().map(|s| (*s).to_owned()).collect(),
        }
    }

    /// Checks that `value` has the shape this group's kind requires.
    pub fn check_value(&self, value: &AttrValue) -> std::result::Result<(), String> {
        match (self.kind, value) {
            (GroupKind::Categorical, AttrValue::Label(l)) if !l.is_empty() => Ok(()),
            (GroupKind::Categorical, _) => Err("expected a non-empty label".into()),
            (GroupKind::Ordinal, AttrValue::Number(v)) => {
                let max = self.scale_max.unwrap_or(0.0);
                if v.fract() != 0.0 || !v.is_finite() {
                    Err(format!("ordinal level {v} is not an integer"))
                } else if *v < 1.0 || *v > max {
                    Err(format!("ordinal level {v} outside [1, {max}]"))
                } else {
                    Ok(())
                }
            }
            (GroupKind::Ordinal, _) => Err("expected an integer level".into()),
            (GroupKind::Numeric, AttrValue::Number(v)) => {
                let max = self.scale_max.unwrap_or(0.0);
                if !v.is_finite() || *v < 0.0 || *v > max {
                    Err(format!("numeric value {v} outside [0, {max}]"))
                } else {
                    Ok(())
                }
            }
            (GroupKind::Numeric, _) => Err("expected a number".into()),
            (GroupKind::Composite, AttrValue::Composite(m)) => {
                if m.is_empty() {
                    return Err("composite value has no subfields".into());
                }
                match m.keys().find(|k| !self.subfields.contains(k)) {
                    Some(k) => Err(format!("unknown subfield `{k}`")),
                    None => Ok(()),
                }
            }
            (GroupKind::Composite, _) => Err("expected a subfield map".into()),
        }
    }
}

/// The value half of an attribute.
///
/// Ordinal levels and numeric values share the `Number` variant; the
/// owning group's kind decides how a number is read.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttrValue {
    Label(String),
    Number(f64),
    Composite(BTreeMap<String, String>),
}

impl AttrValue {
    pub fn label(s: &str) -> Self {
        AttrValue::Label(s.to_owned())
    }

    pub fn composite(pairs: &[(&str, &str)]) -> Self {
        AttrValue::Composite(pairs.iter().map(|(k, v)| ((*k).to_owned(), (*v).to_owned())).collect())
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            AttrValue::Number(v) => Some(*v),
            _ => None,
        }
    }

    /// Parses the textual form used in config files and CLI flags.
    /// `kind` disambiguates numeric-looking categorical labels.
    pub fn parse(text: &str, kind: Option<GroupKind>) -> Self {
        if kind == Some(GroupKind::Composite) || (kind.is_none() && text.contains('=')) {
            let map = text
                .split(';')
                .filter(|s| !s.is_empty())
                .map(|pair| match pair.split_once('=') {
                    Some((k, v)) => (k.trim().to_owned(), v.trim().to_owned()),
                    None => (pair.trim().to_owned(), String::new()),
                })
                .collect();
            return AttrValue::Composite(map);
        }
        if kind != Some(GroupKind::Categorical) {
            if let Ok(v) = text.trim().parse::<f64>() {
                return AttrValue::Number(v);
            }
        }
        AttrValue::Label(text.to_owned())
    }

    /// Does a bearer's value satisfy this (query) value? Composite
    /// values match when every subfield named here agrees.
    pub fn satisfied_by(&self, held: &AttrValue) -> bool {
        match (self, held) {
            (AttrValue::Composite(want), AttrValue::Composite(have)) => {
                want.iter().all(|(k, v)| have.get(k).is_some_and(|h| h == v))
            }
            _ => self == held,
        }
    }
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Label(l) => f.write_str(l),
            AttrValue::Number(v) if v.fract() == 0.0 && v.abs() < 1e15 => write!(f, "{v:.0}"),
            AttrValue::Number(v) => write!(f, "{v}"),
            AttrValue::Composite(m) => {
                let s = m.iter().map(|(k, v)| format!("{k}={v}")).join(";");
                f.write_str(&s)
            }
        }
    }
}

/// One attribute `group:value`, e.g. `age:70`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeRef {
    pub group: String,
    pub value: AttrValue,
}

impl AttributeRef {
    pub fn new(group: &str, value: AttrValue) -> Self {
        AttributeRef {
            group: group.to_owned(),
            value,
        }
    }

    /// Parses `group:value`, using the schema (if given) to read the value.
    pub fn parse(text: &str, schema: Option<&AttributeSchema>) -> Result<Self> {
        let (group, value) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("`{text}` is not of the form group:value")))?;
        let group = group.trim();
        let kind = schema.and_then(|s| s.group(group)).map(|g| g.kind);
        Ok(AttributeRef::new(group, AttrValue::parse(value.trim(), kind)))
    }

    pub fn matches<B: Bearer + ?Sized>(&self, bearer: &B) -> bool {
        bearer
            .value_of(&self.group)
            .is_some_and(|held| self.value.satisfied_by(held))
    }
}

impl fmt::Display for AttributeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.group, self.value)
    }
}

/// A measured attribute: one `AttributeRef`, or a conjunction of several
/// for intersectional scoring.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasuredAttribute {
    parts: Vec<AttributeRef>,
}

impl MeasuredAttribute {
    pub fn unit(attr: AttributeRef) -> Self {
        MeasuredAttribute { parts: vec![attr] }
    }

    /// Conjunction of `parts`, kept in group-name order.
    pub fn intersection(mut parts: Vec<AttributeRef>) -> Self {
        parts.sort_by(|a, b| a.group.cmp(&b.group));
        MeasuredAttribute { parts }
    }

    pub fn parts(&self) -> &[AttributeRef] {
        &self.parts
    }

    pub fn is_intersection(&self) -> bool {
        self.parts.len() > 1
    }

    pub fn matches<B: Bearer + ?Sized>(&self, bearer: &B) -> bool {
        !self.parts.is_empty() && self.parts.iter().all(|p| p.matches(bearer))
    }

    /// Parses `g:v` or `g1:v1&g2:v2`.
    pub fn parse(text: &str, schema: Option<&AttributeSchema>) -> Result<Self> {
        let parts = text
            .split('&')
            .map(|p| AttributeRef::parse(p, schema))
            .collect::<Result<Vec<_>>>()?;
        Ok(if parts.len() == 1 {
            MeasuredAttribute { parts }
        } else {
            MeasuredAttribute::intersection(parts)
        })
    }
}

impl From<AttributeRef> for MeasuredAttribute {
    fn from(a: AttributeRef) -> Self {
        MeasuredAttribute::unit(a)
    }
}

impl fmt::Display for MeasuredAttribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.parts.iter().map(|p| p.to_string()).join("&"))
    }
}

impl Serialize for MeasuredAttribute {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The attribute universe: group types plus the attributes scored for
/// diversity.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AttributeSchema {
    pub group_types: Vec<GroupType>,
    pub measured_attributes: Vec<MeasuredAttribute>,
}

impl AttributeSchema {
    pub fn group(&self, name: &str) -> Option<&GroupType> {
        self.group_types.iter().find(|g| g.name == name)
    }

    pub fn require_group(&self, name: &str) -> Result<&GroupType> {
        self.group(name).ok_or_else(|| Error::UnknownGroup(name.to_owned()))
    }
}

/// Anything that carries at most one value per group type.
pub trait Bearer {
    fn value_of(&self, group: &str) -> Option<&AttrValue>;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub id: String,
    #[serde(default)]
    pub attributes: BTreeMap<String, AttrValue>,
    pub relevance: f64,
}

impl Item {
    pub fn new(id: &str, relevance: f64) -> Self {
        Item {
            id: id.to_owned(),
            attributes: BTreeMap::new(),
            relevance,
        }
    }

    pub fn with(mut self, group: &str, value: AttrValue) -> Self {
        self.attributes.insert(group.to_owned(), value);
        self
    }
}

impl Bearer for Item {
    fn value_of(&self, group: &str) -> Option<&AttrValue> {
        self.attributes.get(group)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub id: String,
    pub items: Vec<Item>,
}

impl Instance {
    pub fn new(id: &str, items: Vec<Item>) -> Self {
        Instance {
            id: id.to_owned(),
            items,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub text: String,
    /// Sentiment of the query in [-1, 1].
    pub polarity: f64,
    /// Multiplier applied together with `polarity`.
    #[serde(default = "default_polarity_weight")]
    pub polarity_weight: f64,
}

fn default_polarity_weight() -> f64 {
    1.0
}

impl Query {
    pub fn neutral(text: &str) -> Self {
        Query {
            text: text.to_owned(),
            polarity: 1.0,
            polarity_weight: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Catalog {
    pub query: Query,
    pub instances: Vec<Instance>,
}

impl Catalog {
    pub fn instance(&self, id: &str) -> Option<&Instance> {
        self.instances.iter().find(|x| x.id == id)
    }

    pub fn position(&self, id: &str) -> Result<usize> {
        self.instances
            .iter()
            .position(|x| x.id == id)
            .ok_or_else(|| Error::UnknownInstance(id.to_owned()))
    }
}

/// The individual (or policy attribute set) inclusion is measured for.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Profile {
    pub attributes: BTreeMap<String, AttrValue>,
}

impl Profile {
    pub fn with(mut self, group: &str, value: AttrValue) -> Self {
        self.attributes.insert(group.to_owned(), value);
        self
    }
}

impl Bearer for Profile {
    fn value_of(&self, group: &str) -> Option<&AttrValue> {
        self.attributes.get(group)
    }
}

/// One broken invariant, with a locator such as `instance x2 / item a / relevance`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub locator: String,
    pub message: String,
}

impl Violation {
    fn new(locator: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            locator: locator.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.locator, self.message)
    }
}

/// Returns every schema invariant violation; empty means ok.
pub fn validate_schema(schema: &AttributeSchema) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for g in &schema.group_types {
        let loc = format!("schema / group {}", g.name);
        if g.name.is_empty() || g.name.contains([':', '&']) {
            out.push(Violation::new(&loc, "name must be non-empty without ':' or '&'"));
        }
        if !seen.insert(g.name.as_str()) {
            out.push(Violation::new(&loc, format!("duplicate group type `{}`", g.name)));
        }
        let scaled = matches!(g.kind, GroupKind::Ordinal | GroupKind::Numeric);
        match (scaled, g.scale_max) {
            (true, None) => out.push(Violation::new(&loc, format!("{} group needs scale_max", g.kind))),
            (true, Some(m)) if !(m.is_finite() && m > 0.0) => {
                out.push(Violation::new(&loc, format!("scale_max must be positive, got {m}")))
            }
            (false, Some(_)) => out.push(Violation::new(&loc, format!("{} group must not set scale_max", g.kind))),
            _ => {}
        }
        let composite = g.kind == GroupKind::Composite;
        if composite && g.subfields.is_empty() {
            out.push(Violation::new(&loc, "composite group needs subfields"));
        }
        if !composite && !g.subfields.is_empty() {
            out.push(Violation::new(
                &loc,
                format!("{} group must not list subfields", g.kind),
            ));
        }
        if g.subfields.iter().collect::<BTreeSet<_>>().len() != g.subfields.len() {
            out.push(Violation::new(&loc, "duplicate subfield"));
        }
    }

    for (idx, m) in schema.measured_attributes.iter().enumerate() {
        let loc = format!("schema / measured[{idx}] {m}");
        if m.parts.is_empty() {
            out.push(Violation::new(&loc, "empty attribute"));
        }
        let groups: BTreeSet<_> = m.parts.iter().map(|p| p.group.as_str()).collect();
        if groups.len() != m.parts.len() {
            out.push(Violation::new(&loc, "group repeated inside an intersection"));
        }
        for p in &m.parts {
            match schema.group(&p.group) {
                None => out.push(Violation::new(&loc, format!("undefined group `{}`", p.group))),
                Some(g) => {
                    if let Err(e) = g.check_value(&p.value) {
                        out.push(Violation::new(&loc, e));
                    }
                }
            }
        }
        if schema.measured_attributes[..idx].contains(m) {
            out.push(Violation::new(&loc, "duplicate measured attribute"));
        }
    }
    out
}

fn check_bearer(
    schema: &AttributeSchema,
    attributes: &BTreeMap<String, AttrValue>,
    loc: &str,
    out: &mut Vec<Violation>,
) {
    for (group, value) in attributes {
        let aloc = format!("{loc} / {group}");
        match schema.group(group) {
            None => out.push(Violation::new(aloc, format!("undefined group `{group}`"))),
            Some(g) => {
                if let Err(e) = g.check_value(value) {
                    out.push(Violation::new(aloc, e));
                }
            }
        }
    }
}

/// Validates a catalog against `schema`.
pub fn validate_catalog(schema: &AttributeSchema, catalog: &Catalog) -> Vec<Violation> {
    let mut out = Vec::new();
    let q = &catalog.query;
    if !(-1.0..=1.0).contains(&q.polarity) {
        out.push(Violation::new(
            "query / polarity",
            format!("{} outside [-1, 1]", q.polarity),
        ));
    }
    if !(q.polarity_weight.is_finite() && q.polarity_weight >= 0.0) {
        out.push(Violation::new(
            "query / polarity_weight",
            format!("{} must be a non-negative number", q.polarity_weight),
        ));
    }
    let mut ids = BTreeSet::new();
    for x in &catalog.instances {
        let loc = format!("instance {}", x.id);
        if !ids.insert(x.id.as_str()) {
            out.push(Violation::new(&loc, "duplicate instance id"));
        }
        if x.items.is_empty() {
            out.push(Violation::new(&loc, "instance has no items"));
        }
        let mut item_ids = BTreeSet::new();
        for item in &x.items {
            let iloc = format!("{loc} / item {}", item.id);
            if !item_ids.insert(item.id.as_str()) {
                out.push(Violation::new(&iloc, "duplicate item id"));
            }
            if !(0.0..=1.0).contains(&item.relevance) {
                out.push(Violation::new(
                    format!("{iloc} / relevance"),
                    format!("{} outside [0, 1]", item.relevance),
                ));
            }
            check_bearer(schema, &item.attributes, &iloc, &mut out);
        }
    }
    out
}

pub fn validate_profile(schema: &AttributeSchema, profile: &Profile) -> Vec<Violation> {
    let mut out = Vec::new();
    check_bearer(schema, &profile.attributes, "profile", &mut out);
    out
}

/// 1 if `bearer` carries `a`, else 0.
pub fn attribute_indicator<B: Bearer + ?Sized>(schema: &AttributeSchema, a: &AttributeRef, bearer: &B) -> Result<u8> {
    schema.require_group(&a.group)?;
    Ok(u8::from(a.matches(bearer)))
}

/// Adds the Cartesian product of the named groups' observed values as
/// intersectional measured attributes. Existing attributes are kept.
pub fn cross_group_types(schema: &AttributeSchema, groups: &[&str]) -> Result<AttributeSchema> {
    if groups.len() < 2 {
        return Err(Error::TooFewGroups(groups.len()));
    }
    let mut axes = Vec::with_capacity(groups.len());
    for name in groups {
        let g = schema.require_group(name)?;
        if !matches!(g.kind, GroupKind::Categorical | GroupKind::Ordinal) {
            return Err(Error::UncrossableGroup {
                group: g.name.clone(),
                kind: g.kind.to_string(),
            });
        }
        let mut values: Vec<AttrValue> = Vec::new();
        for m in &schema.measured_attributes {
            if let [only] = m.parts() {
                if only.group == g.name && !values.contains(&only.value) {
                    values.push(only.value.clone());
                }
            }
        }
        if values.is_empty() && g.kind == GroupKind::Ordinal {
            let max = g.scale_max.unwrap_or(0.0) as u32;
            values = (1..=max).map(|l| AttrValue::Number(l as f64)).collect();
        }
        if values.is_empty() {
            return Err(Error::NoObservedValues(g.name.clone()));
        }
        axes.push(
            values
                .into_iter()
                .map(|v| AttributeRef::new(&g.name, v))
                .collect::<Vec<_>>(),
        );
    }

    let mut out = schema.clone();
    for combo in axes.into_iter().multi_cartesian_product() {
        let m = MeasuredAttribute::intersection(combo);
        if !out.measured_attributes.contains(&m) {
            out.measured_attributes.push(m);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::worked_schema;

    fn gender(v: &str) -> AttributeRef {
        AttributeRef::new("gender", AttrValue::label(v))
    }

    #[test]
    fn worked_schema_is_valid() {
        assert!(validate_schema(&worked_schema()).is_empty());
    }

    #[test]
    fn duplicate_group_is_named() {
        let mut s = worked_schema();
        s.group_types.push(GroupType::categorical("gender"));
        let v = validate_schema(&s);
        assert_eq!(v.len(), 1);
        assert!(v[0].message.contains("duplicate group type `gender`"));
    }

    #[test]
    fn zero_scale_is_rejected() {
        let mut s = worked_schema();
        s.group_types[1].scale_max = Some(0.0);
        let v = validate_schema(&s);
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(v[0].locator.contains("skin"));
    }

    #[test]
    fn kind_metadata_rules() {
        let mut s = worked_schema();
        s.group_types[0].scale_max = Some(3.0);
        s.group_types[3].subfields.clear();
        s.group_types[2].scale_max = None;
        assert_eq!(validate_schema(&s).len(), 3);
    }

    #[test]
    fn measured_attributes_must_resolve() {
        let mut s = worked_schema();
        s.measured_attributes
            .push(AttributeRef::new("eyecolor", AttrValue::label("blue")).into());
        s.measured_attributes
            .push(AttributeRef::new("skin", AttrValue::Number(7.0)).into());
        s.measured_attributes.push(gender("woman").into());
        let v = validate_schema(&s);
        assert_eq!(v.len(), 3, "{v:?}");
    }

    #[test]
    fn indicator_is_exact_match() {
        let s = worked_schema();
        let woman = Item::new("i", 1.0).with("gender", AttrValue::label("woman"));
        let man = Item::new("j", 1.0).with("gender", AttrValue::label("man"));
        assert_eq!(attribute_indicator(&s, &gender("woman"), &woman).unwrap(), 1);
        assert_eq!(attribute_indicator(&s, &gender("woman"), &man).unwrap(), 0);

        let p = Profile::default().with("skin", AttrValue::Number(6.0));
        let skin5 = AttributeRef::new("skin", AttrValue::Number(5.0));
        assert_eq!(attribute_indicator(&s, &skin5, &p).unwrap(), 0);

        let bad = AttributeRef::new("eyecolor", AttrValue::label("blue"));
        assert!(matches!(attribute_indicator(&s, &bad, &p), Err(Error::UnknownGroup(_))));
    }

    #[test]
    fn composite_indicator_checks_named_subfields_only() {
        let s = worked_schema();
        let item = Item::new("i", 1.0).with(
            "hair",
            AttrValue::composite(&[("length", "short"), ("color", "grey"), ("texture", "coily")]),
        );
        let want = AttributeRef::new("hair", AttrValue::composite(&[("length", "short"), ("color", "grey")]));
        assert_eq!(attribute_indicator(&s, &want, &item).unwrap(), 1);
        let other = AttributeRef::new("hair", AttrValue::composite(&[("color", "black")]));
        assert_eq!(attribute_indicator(&s, &other, &item).unwrap(), 0);
    }

    #[test]
    fn cross_gender_by_skin() {
        let s = worked_schema();
        let crossed = cross_group_types(&s, &["gender", "skin"]).unwrap();
        let product: Vec<_> = crossed
            .measured_attributes
            .iter()
            .filter(|m| m.is_intersection())
            .collect();
        assert_eq!(product.len(), 18);
        assert_eq!(crossed.measured_attributes.len(), 21);
        assert!(validate_schema(&crossed).is_empty());

        let p = Profile::default()
            .with("gender", AttrValue::label("woman"))
            .with("skin", AttrValue::Number(6.0));
        let target = MeasuredAttribute::parse("gender:woman&skin:6", Some(&s)).unwrap();
        assert!(crossed.measured_attributes.contains(&target));
        assert!(target.matches(&p));
    }

    #[test]
    fn crossing_numeric_is_unsupported() {
        let s = worked_schema();
        assert!(matches!(
            cross_group_types(&s, &["gender", "age"]),
            Err(Error::UncrossableGroup { .. })
        ));
        assert!(matches!(
            cross_group_types(&s, &["gender"]),
            Err(Error::TooFewGroups(1))
        ));
    }

    #[test]
    fn catalog_violations_carry_locators() {
        let s = worked_schema();
        let catalog = Catalog {
            query: Query::neutral("scientist"),
            instances: vec![Instance::new(
                "x1",
                vec![
                    Item::new("a", 1.5).with("gender", AttrValue::label("woman")),
                    Item::new("b", 1.0).with("eyecolor", AttrValue::label("blue")),
                ],
            )],
        };
        let v = validate_catalog(&s, &catalog);
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].locator, "instance x1 / item a / relevance");
        assert!(v[1].message.contains("eyecolor"));
    }

    #[test]
    fn parse_uses_group_kind() {
        let s = AttributeSchema {
            group_types: vec![GroupType::categorical("decade")],
            measured_attributes: vec![],
        };
        let a = AttributeRef::parse("decade:1970", Some(&s)).unwrap();
        assert_eq!(a.value, AttrValue::label("1970"));
        let b = AttributeRef::parse("decade:1970", None).unwrap();
        assert_eq!(b.value, AttrValue::Number(1970.0));
        let h = AttributeRef::parse("hair:length=short;color=grey", None).unwrap();
        assert_eq!(h.to_string(), "hair:color=grey;length=short");
    }
}
