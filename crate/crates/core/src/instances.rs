//! Instances shipped with the repository under `data/`.

use crate::cvrp::CvrpInstance;

pub const EXAMPLE_N3_JSON: &str = include_str!("../../../data/example_n3.json");
pub const REFERENCE_N8_JSON: &str = include_str!("../../../data/reference_n8.json");

/// Three locations, `V = 20`, `P = [14, 24, 8]`.
pub fn example_n3() -> CvrpInstance {
    CvrpInstance::from_json(EXAMPLE_N3_JSON).expect("bundled instance is valid")
}

/// The eight-location benchmark instance (394,353 solutions).
pub fn reference_n8() -> CvrpInstance {
    CvrpInstance::from_json(REFERENCE_N8_JSON).expect("bundled instance is valid")
}
