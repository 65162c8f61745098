//! Pattern trees, minor models and their verifiers.

pub mod claw;
pub mod model;
pub mod pattern;
pub mod quasi;
pub mod search;

pub use claw::{claw_combine, claw_from_models};
pub use model::{
    elements, verify_fat_minor, verify_minor_model, verify_superfat, FatMinorModel, MinorModel, ModelViolation, SuperfatModel,
    UElem,
};
pub use pattern::{build_pattern_tree, PatternTree};
pub use quasi::{transfer_fat_minor, verify_quasi_isometry, QiViolation, QuasiIsometryMap, Transfer};
pub use search::{find_minor_model, find_superfat, MinorSearch, SuperfatSearch};
