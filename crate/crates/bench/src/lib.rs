//! Fixture helpers shared by the benchmark targets.

use linkscan_core::synth::{linkage_bundle, SynthParams};
use linkscan_core::{AlignedBundle, NamedColumn, RegressionSpec};

/// The benchmark dataset: weekly-sized sample, six countries.
pub fn bench_bundle() -> AlignedBundle {
    linkage_bundle(
        99,
        &["bahrain", "kuwait", "oman", "qatar", "saudi", "uae"],
        &SynthParams::default(),
    )
}

/// A two-regressor spec of the same shape as the country equation.
pub fn bench_spec(bundle: &AlignedBundle) -> RegressionSpec {
    let country = &bundle.countries[0];
    RegressionSpec::new(
        country.name.clone(),
        country.values.clone(),
        vec![
            NamedColumn::new(bundle.world.name.clone(), bundle.world.values.clone()),
            NamedColumn::new(bundle.oil.name.clone(), bundle.oil.values.clone()),
        ],
        true,
    )
}
