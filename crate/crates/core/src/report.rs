//! Reports built from scores and selections.
//!
//! Each report renders two ways: an aligned text table with reals at
//! four decimals, and a JSON document with full precision. Both are
//! built from ordered collections only, so identical inputs give
//! identical bytes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::inclusion::{homogeneity, AttributeInclusion, Homogeneity};
use crate::presence::{diversity_score, AttributePresence};
use crate::schema::{AttributeRef, Instance, Violation};
use crate::selection::{
    score_subset, select, select_exhaustive, select_greedy, Evaluator, Method, Scenario, SelectionResult, SubsetScore,
};
use crate::social_choice::Mechanism;

fn fixed(v: f64) -> String {
    format!("{v:.4}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_owned(), fixed)
}

/// Left-aligned text table with two-space gutters.
struct Table {
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new() -> Self {
        Table { rows: Vec::new() }
    }

    fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.rows.push(cells.into_iter().map(Into::into).collect());
    }

    fn render(&self, out: &mut String) {
        let cols = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let widths: Vec<usize> = (0..cols)
            .map(|c| {
                self.rows
                    .iter()
                    .filter_map(|r| r.get(c))
                    .map(|s| s.chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        for r in &self.rows {
            let mut line = String::new();
            for (c, cell) in r.iter().enumerate() {
                if c + 1 == r.len() {
                    line.push_str(cell);
                } else {
                    let _ = write!(line, "{cell:<w$}  ", w = widths[c]);
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MechanismScore {
    pub mechanism: Mechanism,
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn mechanism_score(mechanism: Mechanism, r: Result<f64>) -> MechanismScore {
    match r {
        Ok(v) => MechanismScore {
            mechanism,
            value: Some(v),
            error: None,
        },
        Err(e) => MechanismScore {
            mechanism,
            value: None,
            error: Some(e.to_string()),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Exclusion {
    pub instance: String,
    pub group: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceReport {
    pub id: String,
    pub status: Status,
    pub attributes: Vec<AttributeInclusion>,
    /// Multi-attribute inclusion under each mechanism.
    pub cumulative: Vec<MechanismScore>,
    /// Multi-attribute inclusion under the configured attribute cumulator.
    pub configured: MechanismScore,
    pub presence: Vec<AttributePresence>,
    pub diversity: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Undefined,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetReport {
    pub ids: Vec<String>,
    /// Each mechanism applied at both the attribute and the set level.
    pub cumulative: Vec<MechanismScore>,
    pub presence: Vec<AttributePresence>,
    pub diversity: Option<f64>,
    pub objective: Option<SubsetScore>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective_error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryInfo {
    pub text: String,
    pub polarity: f64,
    pub polarity_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigInfo {
    pub mode: String,
    pub mechanism: Mechanism,
    pub attribute_cumulator: Mechanism,
    pub set_cumulator: Mechanism,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreReport {
    pub query: QueryInfo,
    pub profile: Vec<String>,
    pub config: ConfigInfo,
    pub status: Status,
    pub instances: Vec<InstanceReport>,
    pub set: Option<SetReport>,
    pub exclusions: Vec<Exclusion>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Each,
    Ids(Vec<String>),
}

impl Target {
    pub fn parse(text: &str) -> Self {
        if text.trim() == "each" {
            Target::Each
        } else {
            Target::Ids(
                text.split(',')
                    .map(|s| s.trim().to_owned())
                    .filter(|s| !s.is_empty())
                    .collect(),
            )
        }
    }
}

fn mode_name(scenario: &Scenario) -> String {
    serde_json::to_value(scenario.objective.mode)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn header(scenario: &Scenario) -> (QueryInfo, Vec<String>, ConfigInfo) {
    let q = &scenario.catalog.query;
    (
        QueryInfo {
            text: q.text.clone(),
            polarity: q.polarity,
            polarity_weight: q.polarity_weight,
        },
        scenario
            .profile
            .attributes
            .iter()
            .map(|(g, v)| format!("{g}:{v}"))
            .collect(),
        ConfigInfo {
            mode: mode_name(scenario),
            mechanism: scenario.objective.mechanism,
            attribute_cumulator: scenario.inclusion.attribute_cumulator,
            set_cumulator: scenario.inclusion.set_cumulator,
        },
    )
}

fn instance_report(eval: &Evaluator<'_>, index: usize) -> Result<InstanceReport> {
    let s = eval.scenario();
    let x: &Instance = &s.catalog.instances[index];
    let inc = eval.inclusion(index);
    let defined = !inc.defined().is_empty();
    let cumulative = Mechanism::ALL
        .iter()
        .map(|&m| mechanism_score(m, eval.instance_inclusion(index, m)))
        .collect();
    let configured = mechanism_score(
        s.inclusion.attribute_cumulator,
        eval.instance_inclusion(index, s.inclusion.attribute_cumulator),
    );
    let (presence, diversity) = if s.schema.measured_attributes.is_empty() {
        (Vec::new(), None)
    } else {
        let d = diversity_score(&s.schema, x, &s.presence)?;
        (d.attributes, Some(d.value))
    };
    Ok(InstanceReport {
        id: x.id.clone(),
        status: if defined { Status::Ok } else { Status::Undefined },
        attributes: inc.attributes.clone(),
        cumulative,
        configured,
        presence,
        diversity,
    })
}

/// Scores every instance (`Target::Each`) or the listed instances and
/// the set they form.
pub fn score_report(scenario: &Scenario, target: &Target) -> Result<ScoreReport> {
    let eval = Evaluator::new(scenario)?;
    let indices: Vec<usize> = match target {
        Target::Each => (0..eval.len()).collect(),
        Target::Ids(ids) => {
            if ids.is_empty() {
                return Err(Error::EmptySet);
            }
            let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
            let mut idx = eval.indices(&refs)?;
            idx.sort_unstable();
            idx.dedup();
            idx
        }
    };
    let instances = indices
        .iter()
        .map(|&i| instance_report(&eval, i))
        .collect::<Result<Vec<_>>>()?;

    let set = match target {
        Target::Each => None,
        Target::Ids(_) => Some(set_report(scenario, &eval, &indices)?),
    };

    let exclusions = instances
        .iter()
        .flat_map(|r| {
            r.attributes.iter().filter_map(move |a| {
                a.excluded.as_ref().map(|why| Exclusion {
                    instance: r.id.clone(),
                    group: a.group.clone(),
                    reason: why.clone(),
                })
            })
        })
        .collect();
    let status = if instances.iter().all(|r| r.status == Status::Ok) {
        Status::Ok
    } else {
        Status::Undefined
    };
    let (query, profile, config) = header(scenario);
    Ok(ScoreReport {
        query,
        profile,
        config,
        status,
        instances,
        set,
        exclusions,
    })
}

fn set_report(scenario: &Scenario, eval: &Evaluator<'_>, indices: &[usize]) -> Result<SetReport> {
    let cumulative = Mechanism::ALL
        .iter()
        .map(|&m| {
            let per: Result<Vec<f64>> = indices.iter().map(|&i| eval.instance_inclusion(i, m)).collect();
            mechanism_score(m, per.and_then(|p| scenario.inclusion.cumulate(&p, m)))
        })
        .collect();
    let ids: Vec<String> = indices
        .iter()
        .map(|&i| scenario.catalog.instances[i].id.clone())
        .collect();
    let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
    let (objective, objective_error) = match score_subset(scenario, &refs) {
        Ok(r) => (Some(r.score), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let (presence, diversity) = if scenario.schema.measured_attributes.is_empty() {
        (Vec::new(), None)
    } else {
        let d = eval.pooled_detail(indices)?;
        let value = eval.set_diversity(indices, scenario.objective.mechanism)?;
        (d.attributes, Some(value))
    };
    Ok(SetReport {
        ids,
        cumulative,
        presence,
        diversity,
        objective,
        objective_error,
    })
}

fn set_label(ids: &[String]) -> String {
    format!("{{{}}}", ids.join(","))
}

impl ScoreReport {
    pub fn to_machine(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let q = &self.query;
        let _ = writeln!(
            out,
            "query    {} (polarity {} x {})",
            q.text,
            fixed(q.polarity),
            fixed(q.polarity_weight)
        );
        let _ = writeln!(out, "profile  {}", self.profile.join(" "));
        let _ = writeln!(
            out,
            "config   mode {}, mechanism {}, attribute cumulator {}, set cumulator {}",
            self.config.mode, self.config.mechanism, self.config.attribute_cumulator, self.config.set_cumulator
        );
        out.push('\n');

        let mut t = Table::new();
        let mut head = vec!["inclusion".to_owned()];
        for r in &self.instances {
            head.push(r.id.clone());
            head.push(String::new());
        }
        t.row(head);
        for (gi, group) in self.profile.iter().enumerate() {
            let mut row = vec![group.clone()];
            for r in &self.instances {
                let a = &r.attributes[gi];
                let values: Vec<&str> = a.items.iter().filter_map(|i| i.value.as_deref()).collect();
                row.push(if values.is_empty() {
                    "-".to_owned()
                } else {
                    values.join(",")
                });
                row.push(opt(a.value));
            }
            t.row(row);
        }
        t.render(&mut out);
        out.push('\n');

        let mut t = Table::new();
        let mut head = vec!["cumulative".to_owned()];
        head.extend(self.instances.iter().map(|r| r.id.clone()));
        if let Some(set) = &self.set {
            head.push(set_label(&set.ids));
        }
        t.row(head);
        for (mi, m) in Mechanism::ALL.iter().enumerate() {
            let mut row = vec![m.to_string()];
            row.extend(self.instances.iter().map(|r| opt(r.cumulative[mi].value)));
            if let Some(set) = &self.set {
                row.push(opt(set.cumulative[mi].value));
            }
            t.row(row);
        }
        t.render(&mut out);

        let has_presence = self.instances.iter().any(|r| !r.presence.is_empty());
        if has_presence {
            out.push('\n');
            let mut t = Table::new();
            let mut head = vec!["presence".to_owned()];
            head.extend(self.instances.iter().map(|r| r.id.clone()));
            if let Some(set) = &self.set {
                head.push(format!("{} pooled", set_label(&set.ids)));
            }
            t.row(head);
            for (ai, attr) in self.instances[0].presence.iter().enumerate() {
                let mut row = vec![attr.attribute.clone()];
                row.extend(self.instances.iter().map(|r| fixed(r.presence[ai].presence)));
                if let Some(set) = &self.set {
                    row.push(fixed(set.presence[ai].presence));
                }
                t.row(row);
            }
            let mut row = vec!["diversity".to_owned()];
            row.extend(self.instances.iter().map(|r| opt(r.diversity)));
            if let Some(set) = &self.set {
                row.push(opt(set.diversity));
            }
            t.row(row);
            t.render(&mut out);
        }

        if let Some(set) = &self.set {
            out.push('\n');
            match (&set.objective, &set.objective_error) {
                (Some(o), _) => {
                    let _ = writeln!(
                        out,
                        "objective {} ({}, {}): {}{}",
                        set_label(&set.ids),
                        self.config.mode,
                        self.config.mechanism,
                        fixed(o.objective),
                        if o.feasible { "" } else { " [below diversity floor]" }
                    );
                }
                (None, Some(e)) => {
                    let _ = writeln!(out, "objective {}: undefined ({e})", set_label(&set.ids));
                }
                _ => {}
            }
        }

        if !self.exclusions.is_empty() {
            out.push('\n');
            out.push_str("excluded\n");
            for e in &self.exclusions {
                let _ = writeln!(out, "  {} {}: {}", e.instance, e.group, e.reason);
            }
        }
        let _ = writeln!(
            out,
            "\nstatus   {}",
            match self.status {
                Status::Ok => "ok",
                Status::Undefined => "undefined",
            }
        );
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionReport {
    pub query: QueryInfo,
    pub profile: Vec<String>,
    pub config: ConfigInfo,
    pub diversity_floor: f64,
    pub result: SelectionResult,
    /// Full scoring of the chosen set.
    pub chosen: Option<ScoreReport>,
}

/// Runs selection (`method` forces a selector; `None` picks by the cap).
pub fn selection_report(scenario: &Scenario, k: usize, method: Option<Method>) -> Result<SelectionReport> {
    let result = match method {
        None => select(scenario, k)?,
        Some(Method::Exhaustive) => select_exhaustive(scenario, k)?,
        Some(Method::GreedySwap) => select_greedy(scenario, k)?,
    };
    let chosen = if result.feasible {
        Some(score_report(scenario, &Target::Ids(result.chosen.clone()))?)
    } else {
        None
    };
    let (query, profile, config) = header(scenario);
    Ok(SelectionReport {
        query,
        profile,
        config,
        diversity_floor: scenario.objective.diversity_floor,
        result,
        chosen,
    })
}

impl SelectionReport {
    pub fn to_machine(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let r = &self.result;
        let method = match r.method {
            Method::Exhaustive => "exhaustive",
            Method::GreedySwap => "greedy-swap",
        };
        let _ = writeln!(out, "query    {}", self.query.text);
        let _ = writeln!(out, "profile  {}", self.profile.join(" "));
        let _ = writeln!(
            out,
            "select   k={} mode {} mechanism {} method {}",
            r.k, self.config.mode, self.config.mechanism, method
        );
        if r.feasible {
            let _ = writeln!(out, "chosen   {}", set_label(&r.chosen));
            let _ = writeln!(out, "score    {}", opt(r.score));
            let co: Vec<String> = r.co_optima.iter().map(|c| set_label(c)).collect();
            let _ = writeln!(out, "co-optima {}", co.join(" "));
        } else {
            let _ = writeln!(
                out,
                "infeasible: no subset reaches diversity floor {} (best diversity seen {})",
                fixed(self.diversity_floor),
                opt(r.max_diversity)
            );
        }
        if !r.candidates.is_empty() {
            out.push('\n');
            let mut t = Table::new();
            t.row(["candidate", "objective", "feasible"]);
            for c in &r.candidates {
                t.row([set_label(&c.ids), fixed(c.objective), c.feasible.to_string()]);
            }
            t.render(&mut out);
        }
        if !r.improvements.is_empty() {
            out.push('\n');
            let mut t = Table::new();
            t.row(["step", "subset", "objective"]);
            for s in &r.improvements {
                t.row([s.step.clone(), set_label(&s.ids), fixed(s.objective)]);
            }
            t.render(&mut out);
            let _ = writeln!(out, "swaps    {}", r.swaps);
        }
        if let Some(chosen) = &self.chosen {
            out.push('\n');
            out.push_str(&chosen.render_text());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomogeneityReport {
    pub overall: Homogeneity,
    pub restricted: Option<Homogeneity>,
}

/// Homogeneity of `group` across the catalog (or `ids`), overall and
/// within the `restrict` subpopulation.
pub fn homogeneity_report(
    scenario: &Scenario,
    group: &str,
    restrict: Option<&AttributeRef>,
    ids: Option<&[String]>,
) -> Result<HomogeneityReport> {
    scenario.ensure_valid()?;
    let c = &scenario.catalog;
    let set: Vec<&Instance> = match ids {
        None => c.instances.iter().collect(),
        Some(ids) => ids
            .iter()
            .map(|id| c.instance(id).ok_or_else(|| Error::UnknownInstance(id.clone())))
            .collect::<Result<_>>()?,
    };
    let overall = homogeneity(&scenario.schema, group, &set, None)?;
    let restricted = match restrict {
        Some(r) => Some(homogeneity(&scenario.schema, group, &set, Some(r))?),
        None => None,
    };
    Ok(HomogeneityReport { overall, restricted })
}

impl HomogeneityReport {
    pub fn to_machine(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for h in std::iter::once(&self.overall).chain(&self.restricted) {
            let scope = h.restrict.as_deref().unwrap_or("all items");
            let _ = writeln!(
                out,
                "homogeneity of {} among {} ({} carrying)",
                h.group, scope, h.carrying
            );
            let mut t = Table::new();
            t.row(["value", "count", "share"]);
            for s in &h.shares {
                t.row([s.value.clone(), s.count.to_string(), fixed(s.share)]);
            }
            t.render(&mut out);
            let _ = writeln!(out, "homogeneity {}\n", fixed(h.value));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new(violations: Vec<Violation>) -> Self {
        ValidationReport {
            ok: violations.is_empty(),
            violations,
        }
    }

    pub fn to_machine(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        if self.ok {
            return "ok\n".to_owned();
        }
        let mut out = String::new();
        for v in &self.violations {
            let _ = writeln!(out, "{v}");
        }
        out
    }
}
