//! Space-time-coded metasurface beamforming.
//!
//! Binary-phase meta-atoms switched periodically by a clocked controller
//! radiate harmonics of the modulation frequency. The π-state duration
//! sets each element's +1st-harmonic amplitude and a cyclic delay sets its
//! phase, so a 1-bit aperture can realize a tapered, steered beam on that
//! harmonic. This crate covers the full chain:
//!
//! - [`array`]: aperture geometry, element factor, feed, static 1-bit codes
//! - [`modulation`]: switching waveforms, exact harmonic coefficients,
//!   duty/delay mappings, clock quantization and FPGA tick tables
//! - [`synthesis`]: Chebyshev taper, steering phases, schedule sets
//! - [`pattern`]: harmonic and static far fields plus SLL/HPBW/pointing/
//!   directivity
//! - [`oracle`]: time-domain sampling and DFT harmonic extraction that
//!   check the analytic coefficients and patterns by an independent route
//!
//! Heavy loops run on rayon when the `parallel` feature is on (default);
//! see [`Execution`].

pub mod array;
pub mod error;
pub mod exec;
pub mod modulation;
pub mod oracle;
pub mod pattern;
pub mod synthesis;

pub use array::{
    build_geometry, element_factor, static_code_pattern, uniform_excitation, ArrayGeometry, BinaryCodeMatrix,
    CodeState, ElementPatternModel, Excitation,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use modulation::{
    bitmask_to_schedule, delay_for_phase, duty_for_amplitude, first_harmonic, harmonic_coefficient, quantize_schedule,
    schedule_to_bitmask, waveform_at, HarmonicSpectrum, ModulationConfig, Schedule, TickMask, TickSchedule,
};
pub use oracle::{
    compare_spectra, extract_harmonics_dft, route_error, sample_baseband, sweep_measurement, BasebandRecord,
    SweepResult,
};
pub use pattern::{directivity, harmonic_pattern, hpbw, pointing, sll, static_pattern, AngleGrid, FarFieldPattern};
pub use synthesis::{
    chebyshev_taper, compensate_amplitudes, planar_taper, scan_phases, synthesize_ideal, synthesize_schedules,
    CompensatedWeights, Mode, Provenance, ScheduleSet, TargetWeights,
};
