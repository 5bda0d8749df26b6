//! Seeded random walks on `Out(F_N)` and the convergence diagnostics built
//! on them.

mod density;
mod measure;
mod path;
mod record;
mod track;

pub use density::{
    default_l_grid, density_at, l_values, l_values_reference, prepare_density,
    strip_density_experiment, summarize_density, DensityConfig, DensityInputs, DensityResult,
};
pub use measure::{measure_stats, MeasureStats, WalkMeasure, PROBABILITY_TOLERANCE};
pub use path::{
    bilateral_path, bilateral_path_capped, sample_path, sample_path_capped, BilateralPath,
    SamplePath, WalkCaps,
};
pub use record::{format_float, Cell, ExperimentRecord};
pub use track::{
    current_track, current_track_from, drift_ensemble, drift_track, linf, spectrum_track,
    CurrentTrack, DriftEnsemble, DriftTrack, SpectrumTrack,
};
