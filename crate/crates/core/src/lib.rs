//! Diversity and inclusion metrics for subset selection.
//!
//! * [`schema`]: attribute universe, items, instances, catalogs, profiles
//! * [`presence`]: presence of attributes against target bounds, diversity
//! * [`inclusion`]: representativeness, instance/set/multi-attribute inclusion
//! * [`social_choice`]: cumulation mechanisms and set comparison
//! * [`selection`]: exhaustive and greedy k-subset selection
//! * [`io`] and [`report`]: file formats and deterministic reports

pub mod error;
pub mod inclusion;
pub mod io;
pub mod presence;
pub mod report;
pub mod schema;
pub mod selection;
pub mod social_choice;

#[cfg(test)]
pub(crate) mod fixtures;

pub use error::{Error, Result};
pub use inclusion::{InclusionConfig, KernelForm, RepKernel};
pub use presence::{PresenceConfig, PresenceTarget};
pub use schema::{
    AttrValue, AttributeRef, AttributeSchema, Catalog, GroupKind, GroupType, Instance, Item, MeasuredAttribute,
    Profile, Query, Violation,
};
pub use selection::{Objective, ObjectiveMode, Scenario, SelectionResult};
pub use social_choice::Mechanism;
