use std::sync::OnceLock;

use crate::construction::{build_global_map, BuildConfig, GlobalMap};

/// The default-configuration map `f`, built once per test binary.
pub fn global_map() -> &'static GlobalMap<f64> {
    static GM: OnceLock<GlobalMap<f64>> = OnceLock::new();
    GM.get_or_init(|| build_global_map(&BuildConfig::default()).expect("global map builds"))
}
