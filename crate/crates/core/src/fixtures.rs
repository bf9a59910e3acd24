use crate::schema::{AttrValue, AttributeRef, AttributeSchema, Catalog, GroupType, Instance, Item, Profile, Query};

pub fn gender_only_schema() -> AttributeSchema {
    AttributeSchema {
        group_types: vec![GroupType::categorical("gender")],
        measured_attributes: ["woman", "man", "nonbinary"]
            .into_iter()
            .map(|g| AttributeRef::new("gender", AttrValue::label(g)).into())
            .collect(),
    }
}

pub fn worked_schema() -> AttributeSchema {
    let mut s = gender_only_schema();
    s.group_types.extend([
        GroupType::ordinal("skin", 6.0),
        GroupType::numeric("age", 100.0),
        GroupType::composite("hair", &["texture", "length", "color", "style"]),
    ]);
    s
}

pub fn single(id: &str, gender: &str) -> Instance {
    Instance::new(
        id,
        vec![Item::new(&format!("{id}.0"), 1.0).with("gender", AttrValue::label(gender))],
    )
}

fn person(id: &str, skin: f64, age: f64) -> Instance {
    Instance::new(
        id,
        vec![Item::new(&format!("{id}.person"), 1.0)
            .with("gender", AttrValue::label("woman"))
            .with("skin", AttrValue::Number(skin))
            .with("age", AttrValue::Number(age))],
    )
}

pub fn worked_catalog() -> Catalog {
    Catalog {
        query: Query::neutral("Scientist"),
        instances: vec![
            person("x1", 5.0, 31.0),
            person("x2", 4.0, 23.0),
            person("x3", 3.0, 47.0),
        ],
    }
}

pub fn worked_profile() -> Profile {
    Profile::default()
        .with("gender", AttrValue::label("woman"))
        .with("skin", AttrValue::Number(6.0))
        .with("age", AttrValue::Number(70.0))
}
