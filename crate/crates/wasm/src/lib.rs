//! Browser bindings for the demo page in `www/`.
//!
//! Every export takes and returns plain strings and numbers. Errors come
//! back as a rejected value carrying the message.

use divinc::io::{parse_catalog, parse_config, Config};
use divinc::presence::{presence_value, PresenceFunction};
use divinc::report::{score_report, selection_report, Target};
use divinc::{AttrValue, AttributeRef, Mechanism, PresenceTarget};
use wasm_bindgen::prelude::*;

const WORKED_CONFIG: &str = include_str!("../../../data/worked_example/config.toml");
const WORKED_CATALOG: &str = include_str!("../../../data/worked_example/catalog.jsonl");

fn mechanism(name: &str) -> Result<Option<Mechanism>, String> {
    match name {
        "" | "configured" => Ok(None),
        other => other.parse().map(Some).map_err(|e| format!("{e}")),
    }
}

fn load(config: &str, catalog: &str, mech: &str) -> Result<(Config, divinc::Catalog), String> {
    let mut config = parse_config(config).map_err(|e| describe(&e))?;
    if let Some(m) = mechanism(mech)? {
        config.set_mechanism(m);
    }
    let catalog = parse_catalog(catalog).map_err(|e| describe(&e))?;
    Ok((config, catalog))
}

fn describe(e: &divinc::Error) -> String {
    match e {
        divinc::Error::Invalid(vs) => {
            let mut s = e.to_string();
            for v in vs {
                s.push_str(&format!("\n  {v}"));
            }
            s
        }
        _ => e.to_string(),
    }
}

fn render(text: String, machine: String, format: &str) -> String {
    if format == "machine" {
        machine
    } else {
        text
    }
}

/// Presence of a proportion sweep against `[lower, upper]`, as a JSON
/// array of `[measured, presence]` pairs.
#[wasm_bindgen]
pub fn presence_curve(lower: f64, upper: f64, function: &str, samples: usize) -> Result<String, String> {
    let function = match function {
        "indicator" => PresenceFunction::Indicator,
        "trapezoid" => PresenceFunction::Trapezoid,
        other => return Err(format!("unknown presence function `{other}`")),
    };
    let target =
        PresenceTarget::new(AttributeRef::new("g", AttrValue::label("a")), lower, upper).map_err(|e| e.to_string())?;
    let samples = samples.max(2);
    let points: Vec<[f64; 2]> = (0..samples)
        .map(|i| {
            let m = i as f64 / (samples - 1) as f64;
            [m, presence_value(m, &target, function)]
        })
        .collect();
    Ok(serde_json::to_string(&points).expect("points serialize"))
}

/// The bundled three-portrait example rescored for a different profile
/// skin tone and age.
#[wasm_bindgen]
pub fn worked_example(skin: f64, age: f64, mech: &str, format: &str) -> Result<String, String> {
    let (mut config, catalog) = load(WORKED_CONFIG, WORKED_CATALOG, mech)?;
    config.profile = config
        .profile
        .with("skin", AttrValue::Number(skin))
        .with("age", AttrValue::Number(age));
    let scenario = config.scenario(catalog);
    let ids = Target::Ids(scenario.catalog.instances.iter().map(|x| x.id.clone()).collect());
    let report = score_report(&scenario, &ids).map_err(|e| describe(&e))?;
    Ok(render(report.render_text(), report.to_machine(), format))
}

#[wasm_bindgen]
pub fn worked_config() -> String {
    WORKED_CONFIG.to_owned()
}

#[wasm_bindgen]
pub fn worked_catalog() -> String {
    WORKED_CATALOG.to_owned()
}

/// Best `k`-subset of a pasted catalog under a pasted config.
#[wasm_bindgen]
pub fn select(config: &str, catalog: &str, k: usize, mech: &str, format: &str) -> Result<String, String> {
    let (config, catalog) = load(config, catalog, mech)?;
    let report = selection_report(&config.scenario(catalog), k, None).map_err(|e| describe(&e))?;
    Ok(render(report.render_text(), report.to_machine(), format))
}
