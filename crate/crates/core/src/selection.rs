//! k-subset selection under a diversity/inclusion objective.
//!
//! Both selectors evaluate candidates through [`Evaluator::score`], the
//! same path [`score_subset`] uses, so reported and optimized scores
//! cannot drift apart.

use std::cmp::Ordering;

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inclusion::{attribute_inclusions, InclusionConfig, MultiInclusion};
use crate::presence::{diversity_score, pooled_diversity, DiversityScore, PresenceConfig, SetMode};
use crate::schema::{
    validate_catalog, validate_profile, validate_schema, AttributeSchema, Catalog, Instance, Profile, Violation,
};
use crate::social_choice::{cumulate, leximin_cmp, Mechanism};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveMode {
    #[default]
    InclusionOnly,
    DiversityOnly,
    /// Maximize inclusion among subsets whose diversity meets the floor.
    Constrained,
    /// `w_div * Div + w_inc * Inc`, weights normalized to sum 1.
    Weighted,
}

/// Which vector egalitarian comparison runs on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EgalitarianVector {
    /// One cumulated inclusion score per instance.
    #[default]
    PerInstance,
    /// Every defined per-attribute inclusion score of every instance.
    AttributeScores,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Objective {
    pub mode: ObjectiveMode,
    pub mechanism: Mechanism,
    pub diversity_floor: f64,
    pub diversity_weight: f64,
    pub inclusion_weight: f64,
    pub egalitarian_vector: EgalitarianVector,
}

impl Default for Objective {
    fn default() -> Self {
        Objective {
            mode: ObjectiveMode::InclusionOnly,
            mechanism: Mechanism::Utilitarian,
            diversity_floor: 0.0,
            diversity_weight: 0.5,
            inclusion_weight: 0.5,
            egalitarian_vector: EgalitarianVector::PerInstance,
        }
    }
}

impl Objective {
    fn needs_inclusion(&self) -> bool {
        self.mode != ObjectiveMode::DiversityOnly
    }

    fn needs_diversity(&self) -> bool {
        self.mode != ObjectiveMode::InclusionOnly
    }

    fn normalized_weights(&self) -> (f64, f64) {
        let total = self.diversity_weight + self.inclusion_weight;
        (self.diversity_weight / total, self.inclusion_weight / total)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionSettings {
    /// Largest C(n, k) the exhaustive selector will enumerate.
    pub cap: u64,
    pub seed: u64,
    /// Random starting subsets the greedy selector also improves.
    pub restarts: usize,
}

impl Default for SelectionSettings {
    fn default() -> Self {
        SelectionSettings {
            cap: 1_000_000,
            seed: 0,
            restarts: 2,
        }
    }
}

/// Everything needed to score subsets of one catalog for one profile.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub schema: AttributeSchema,
    pub catalog: Catalog,
    pub profile: Profile,
    pub presence: PresenceConfig,
    pub inclusion: InclusionConfig,
    pub objective: Objective,
    pub settings: SelectionSettings,
}

fn violation(locator: &str, message: impl Into<String>) -> Violation {
    Violation {
        locator: locator.to_owned(),
        message: message.into(),
    }
}

impl Scenario {
    /// Every invariant violation across schema, catalog, profile and
    /// configuration.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = validate_schema(&self.schema);
        out.extend(validate_catalog(&self.schema, &self.catalog));
        out.extend(validate_profile(&self.schema, &self.profile));
        for msg in self.presence.coverage_problems(&self.schema) {
            out.push(violation("presence / targets", msg));
        }
        let inc = &self.inclusion;
        if !(0.0..=1.0).contains(&inc.relevance_threshold) {
            out.push(violation(
                "inclusion / relevance_threshold",
                format!("{} outside [0, 1]", inc.relevance_threshold),
            ));
        }
        for (group, form) in &inc.kernels {
            match self.schema.group(group) {
                None => out.push(violation(&format!("inclusion / kernels / {group}"), "undefined group")),
                Some(g) if !form.compatible_with(g.kind) => out.push(violation(
                    &format!("inclusion / kernels / {group}"),
                    format!("kernel not compatible with {} group", g.kind),
                )),
                _ => {}
            }
        }
        let obj = &self.objective;
        if !(0.0..=1.0).contains(&obj.diversity_floor) {
            out.push(violation(
                "selection / diversity_floor",
                format!("{} outside [0, 1]", obj.diversity_floor),
            ));
        }
        if obj.mode == ObjectiveMode::Weighted {
            let (d, i) = (obj.diversity_weight, obj.inclusion_weight);
            if !(d >= 0.0 && i >= 0.0 && d + i > 0.0 && (d + i).is_finite()) {
                out.push(violation(
                    "selection / weights",
                    "weights must be non-negative with a positive sum",
                ));
            }
        }
        if obj.needs_diversity() && self.schema.measured_attributes.is_empty() {
            out.push(violation(
                "schema / measured",
                "objective uses diversity but no attributes are measured",
            ));
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }
}

/// Objective value of one candidate subset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsetScore {
    /// Instance ids, sorted.
    pub ids: Vec<String>,
    pub inclusion: Option<f64>,
    pub diversity: Option<f64>,
    pub objective: f64,
    pub feasible: bool,
    /// Vector compared lexicographically under egalitarian.
    pub vector: Vec<f64>,
}

/// Scores candidate subsets of a validated scenario, caching
/// per-instance work.
pub struct Evaluator<'a> {
    scenario: &'a Scenario,
    inclusions: Vec<MultiInclusion>,
    instance_diversity: Vec<Option<f64>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(scenario: &'a Scenario) -> Result<Self> {
        scenario.ensure_valid()?;
        let s = scenario;
        let inclusions = s
            .catalog
            .instances
            .iter()
            .map(|x| attribute_inclusions(&s.schema, x, &s.profile, &s.catalog.query, &s.inclusion))
            .collect::<Result<Vec<_>>>()?;
        let instance_diversity = s
            .catalog
            .instances
            .iter()
            .map(|x| {
                if s.schema.measured_attributes.is_empty() {
                    None
                } else {
                    diversity_score(&s.schema, x, &s.presence).ok().map(|d| d.value)
                }
            })
            .collect();
        Ok(Evaluator {
            scenario,
            inclusions,
            instance_diversity,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        self.scenario
    }

    pub fn len(&self) -> usize {
        self.scenario.catalog.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn inclusion(&self, index: usize) -> &MultiInclusion {
        &self.inclusions[index]
    }

    pub fn indices(&self, ids: &[&str]) -> Result<Vec<usize>> {
        ids.iter().map(|id| self.scenario.catalog.position(id)).collect()
    }

    fn instances(&self, indices: &[usize]) -> Vec<&Instance> {
        indices.iter().map(|&i| &self.scenario.catalog.instances[i]).collect()
    }

    /// Per-instance cumulated inclusion, with `mechanism` at the
    /// attribute level.
    pub fn instance_inclusion(&self, index: usize, mechanism: Mechanism) -> Result<f64> {
        self.inclusions[index].cumulate(&self.scenario.inclusion, mechanism)
    }

    /// Set diversity with `mechanism` as the per-instance cumulator.
    pub fn set_diversity(&self, indices: &[usize], mechanism: Mechanism) -> Result<f64> {
        let s = self.scenario;
        if indices.is_empty() {
            return Err(Error::EmptySet);
        }
        match s.presence.set_mode {
            SetMode::Pooled => Ok(pooled_diversity(&s.schema, &self.instances(indices), &s.presence)?.value),
            SetMode::PerInstance => {
                let per = indices
                    .iter()
                    .map(|&i| self.instance_diversity[i].ok_or(Error::NoMeasuredAttributes))
                    .collect::<Result<Vec<_>>>()?;
                cumulate(&per, mechanism)
            }
        }
    }

    pub fn pooled_detail(&self, indices: &[usize]) -> Result<DiversityScore> {
        let s = self.scenario;
        pooled_diversity(&s.schema, &self.instances(indices), &s.presence)
    }

    /// Objective value of the subset `indices` (any order, no repeats).
    pub fn score(&self, indices: &[usize]) -> Result<SubsetScore> {
        if indices.is_empty() {
            return Err(Error::EmptySet);
        }
        let s = self.scenario;
        let obj = &s.objective;
        let mech = obj.mechanism;
        let mut order: Vec<usize> = indices.to_vec();
        order.sort_by(|&a, &b| s.catalog.instances[a].id.cmp(&s.catalog.instances[b].id));
        let ids: Vec<String> = order.iter().map(|&i| s.catalog.instances[i].id.clone()).collect();

        let (inclusion, inc_vector) = if obj.needs_inclusion() {
            let per = order
                .iter()
                .map(|&i| self.instance_inclusion(i, s.inclusion.attribute_cumulator))
                .collect::<Result<Vec<_>>>()?;
            let value = s.inclusion.cumulate(&per, mech)?;
            let vector = match obj.egalitarian_vector {
                EgalitarianVector::PerInstance => per,
                EgalitarianVector::AttributeScores => {
                    order.iter().flat_map(|&i| self.inclusions[i].defined()).collect()
                }
            };
            (Some(value), vector)
        } else {
            (None, Vec::new())
        };
        let diversity = if obj.needs_diversity() {
            Some(self.set_diversity(&order, mech)?)
        } else {
            None
        };

        let (objective, feasible, vector) = match obj.mode {
            ObjectiveMode::InclusionOnly => (inclusion.unwrap_or(0.0), true, inc_vector),
            ObjectiveMode::DiversityOnly => {
                let d = diversity.unwrap_or(0.0);
                let vector = match s.presence.set_mode {
                    SetMode::Pooled => vec![d],
                    SetMode::PerInstance => order
                        .iter()
                        .map(|&i| self.instance_diversity[i].unwrap_or(0.0))
                        .collect(),
                };
                (d, true, vector)
            }
            ObjectiveMode::Constrained => {
                let d = diversity.unwrap_or(0.0);
                (inclusion.unwrap_or(0.0), d >= obj.diversity_floor, inc_vector)
            }
            ObjectiveMode::Weighted => {
                let (wd, wi) = obj.normalized_weights();
                let d = diversity.unwrap_or(0.0);
                let value = wd * d + wi * inclusion.unwrap_or(0.0);
                let vector = inc_vector.iter().map(|v| wd * d + wi * v).collect();
                (value, true, vector)
            }
        };
        Ok(SubsetScore {
            ids,
            inclusion,
            diversity,
            objective,
            feasible,
            vector,
        })
    }

    /// Preference between two scored subsets, ignoring the id tie-break.
    /// `Greater` means `a` is better.
    pub fn compare(&self, a: &SubsetScore, b: &SubsetScore) -> Result<Ordering> {
        match a.feasible.cmp(&b.feasible) {
            Ordering::Equal => {}
            o => return Ok(o),
        }
        match self.scenario.objective.mechanism {
            Mechanism::Egalitarian => Ok(leximin_cmp(&a.vector, &b.vector)?.outcome.as_ordering()),
            _ => Ok(a.objective.total_cmp(&b.objective)),
        }
    }

    /// Like [`Evaluator::compare`], then the lexicographically smaller
    /// sorted id list wins.
    pub fn rank(&self, a: &SubsetScore, b: &SubsetScore) -> Result<Ordering> {
        Ok(self.compare(a, b)?.then_with(|| b.ids.cmp(&a.ids)))
    }
}

/// Scores of one subset plus the per-instance detail behind them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsetReport {
    pub score: SubsetScore,
    pub instances: Vec<MultiInclusion>,
    pub pooled_diversity: Option<DiversityScore>,
}

pub fn score_subset(scenario: &Scenario, ids: &[&str]) -> Result<SubsetReport> {
    let eval = Evaluator::new(scenario)?;
    let idx = eval.indices(ids)?;
    let score = eval.score(&idx)?;
    let mut ordered = idx.clone();
    ordered.sort_by(|&a, &b| eval.inclusions[a].instance.cmp(&eval.inclusions[b].instance));
    ordered.dedup();
    Ok(SubsetReport {
        instances: ordered.iter().map(|&i| eval.inclusions[i].clone()).collect(),
        pooled_diversity: if scenario.schema.measured_attributes.is_empty() {
            None
        } else {
            Some(eval.pooled_detail(&idx)?)
        },
        score,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exhaustive,
    GreedySwap,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateTrace {
    pub ids: Vec<String>,
    pub objective: f64,
    pub feasible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Improvement {
    /// `add`, `swap` or `restart`.
    pub step: String,
    pub ids: Vec<String>,
    pub objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionResult {
    pub method: Method,
    pub k: usize,
    pub feasible: bool,
    /// Chosen ids, sorted; empty when infeasible.
    pub chosen: Vec<String>,
    pub score: Option<f64>,
    pub best: Option<SubsetScore>,
    /// Every subset tied with the winner (exhaustive only).
    pub co_optima: Vec<Vec<String>>,
    pub candidates: Vec<CandidateTrace>,
    pub improvements: Vec<Improvement>,
    /// Highest set diversity seen among candidates, for infeasibility reports.
    pub max_diversity: Option<f64>,
    pub swaps: usize,
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::KZero);
    }
    if k > n {
        return Err(Error::KTooLarge { k, n });
    }
    Ok(())
}

/// C(n, k) without overflow for any realistic catalog.
pub fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k as u128).fold(1u128, |acc, i| acc.saturating_mul(n as u128 - i) / (i + 1))
}

fn max_diversity<'s>(scores: impl Iterator<Item = &'s SubsetScore>) -> Option<f64> {
    scores.filter_map(|s| s.diversity).reduce(f64::max)
}

#[cfg(feature = "parallel")]
fn score_all(eval: &Evaluator<'_>, combos: &[Vec<usize>]) -> Result<Vec<SubsetScore>> {
    use rayon::prelude::*;
    combos.par_iter().map(|c| eval.score(c)).collect()
}

#[cfg(not(feature = "parallel"))]
fn score_all(eval: &Evaluator<'_>, combos: &[Vec<usize>]) -> Result<Vec<SubsetScore>> {
    combos.iter().map(|c| eval.score(c)).collect()
}

/// Evaluates every k-subset and returns the best one.
pub fn select_exhaustive(scenario: &Scenario, k: usize) -> Result<SelectionResult> {
    let eval = Evaluator::new(scenario)?;
    let n = eval.len();
    check_k(k, n)?;
    let count = binomial(n, k);
    if count > scenario.settings.cap as u128 {
        return Err(Error::CapExceeded {
            n,
            k,
            count,
            cap: scenario.settings.cap,
        });
    }
    let combos: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    let scores = score_all(&eval, &combos)?;

    let mut best = &scores[0];
    for s in &scores[1..] {
        if eval.rank(s, best)? == Ordering::Greater {
            best = s;
        }
    }
    let mut co_optima = Vec::new();
    for s in &scores {
        if eval.compare(s, best)? == Ordering::Equal {
            co_optima.push(s.ids.clone());
        }
    }
    co_optima.sort();

    let candidates = scores
        .iter()
        .map(|s| CandidateTrace {
            ids: s.ids.clone(),
            objective: s.objective,
            feasible: s.feasible,
        })
        .collect();
    let feasible = best.feasible;
    Ok(SelectionResult {
        method: Method::Exhaustive,
        k,
        feasible,
        chosen: if feasible { best.ids.clone() } else { Vec::new() },
        score: feasible.then_some(best.objective),
        best: feasible.then(|| best.clone()),
        co_optima: if feasible { co_optima } else { Vec::new() },
        candidates,
        improvements: Vec::new(),
        max_diversity: max_diversity(scores.iter()),
        swaps: 0,
    })
}

struct Search<'e, 'a> {
    eval: &'e Evaluator<'a>,
    log: Vec<Improvement>,
    swaps: usize,
    max_diversity: Option<f64>,
}

impl Search<'_, '_> {
    fn score(&mut self, idx: &[usize]) -> Result<SubsetScore> {
        let s = self.eval.score(idx)?;
        if let Some(d) = s.diversity {
            self.max_diversity = Some(self.max_diversity.map_or(d, |m| m.max(d)));
        }
        Ok(s)
    }

    fn note(&mut self, step: &str, s: &SubsetScore) {
        self.log.push(Improvement {
            step: step.to_owned(),
            ids: s.ids.clone(),
            objective: s.objective,
        });
    }

    fn forward(&mut self, k: usize) -> Result<(Vec<usize>, SubsetScore)> {
        let n = self.eval.len();
        let mut chosen: Vec<usize> = Vec::with_capacity(k);
        let mut current = None;
        for _ in 0..k {
            let mut best: Option<(usize, SubsetScore)> = None;
            for cand in (0..n).filter(|i| !chosen.contains(i)) {
                let mut trial = chosen.clone();
                trial.push(cand);
                let s = self.score(&trial)?;
                let better = match &best {
                    None => true,
                    Some((_, b)) => self.eval.rank(&s, b)? == Ordering::Greater,
                };
                if better {
                    best = Some((cand, s));
                }
            }
            let (idx, s) = best.expect("k <= n leaves a candidate");
            chosen.push(idx);
            self.note("add", &s);
            current = Some(s);
        }
        Ok((chosen, current.expect("k >= 1")))
    }

    /// Best-improvement 1-swap local search.
    fn improve(&mut self, mut chosen: Vec<usize>, mut current: SubsetScore) -> Result<(Vec<usize>, SubsetScore)> {
        let n = self.eval.len();
        loop {
            let mut best: Option<(Vec<usize>, SubsetScore)> = None;
            for pos in 0..chosen.len() {
                for cand in (0..n).filter(|i| !chosen.contains(i)) {
                    let mut trial = chosen.clone();
                    trial[pos] = cand;
                    let s = self.score(&trial)?;
                    if self.eval.compare(&s, &current)? != Ordering::Greater {
                        continue;
                    }
                    let better = match &best {
                        None => true,
                        Some((_, b)) => self.eval.rank(&s, b)? == Ordering::Greater,
                    };
                    if better {
                        best = Some((trial, s));
                    }
                }
            }
            match best {
                None => return Ok((chosen, current)),
                Some((next, s)) => {
                    self.swaps += 1;
                    self.note("swap", &s);
                    chosen = next;
                    current = s;
                }
            }
        }
    }
}

/// Greedy forward construction, 1-swap local search, and seeded random
/// restarts; deterministic for a given seed.
pub fn select_greedy(scenario: &Scenario, k: usize) -> Result<SelectionResult> {
    let eval = Evaluator::new(scenario)?;
    let n = eval.len();
    check_k(k, n)?;
    let mut search = Search {
        eval: &eval,
        log: Vec::new(),
        swaps: 0,
        max_diversity: None,
    };
    let (start, start_score) = search.forward(k)?;
    let (_, mut best) = search.improve(start, start_score)?;

    if k < n {
        let mut rng = ChaCha8Rng::seed_from_u64(scenario.settings.seed);
        for _ in 0..scenario.settings.restarts {
            let init: Vec<usize> = rand::seq::index::sample(&mut rng, n, k).into_vec();
            let s = search.score(&init)?;
            search.note("restart", &s);
            let (_, local) = search.improve(init, s)?;
            if eval.rank(&local, &best)? == Ordering::Greater {
                best = local;
            }
        }
    }

    let feasible = best.feasible;
    Ok(SelectionResult {
        method: Method::GreedySwap,
        k,
        feasible,
        chosen: if feasible { best.ids.clone() } else { Vec::new() },
        score: feasible.then_some(best.objective),
        co_optima: if feasible { vec![best.ids.clone()] } else { Vec::new() },
        best: feasible.then_some(best),
        candidates: Vec::new(),
        improvements: search.log,
        max_diversity: search.max_diversity,
        swaps: search.swaps,
    })
}

/// Exhaustive when C(n, k) fits under the cap, greedy otherwise.
pub fn select(scenario: &Scenario, k: usize) -> Result<SelectionResult> {
    let n = scenario.catalog.instances.len();
    check_k(k, n)?;
    if binomial(n, k) <= scenario.settings.cap as u128 {
        select_exhaustive(scenario, k)
    } else {
        select_greedy(scenario, k)
    }
}
