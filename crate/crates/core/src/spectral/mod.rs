//! Eigenvalue flows along the protocol: continuity tracking, band labels,
//! avoided crossings and non-adiabatic transition estimates.

pub mod crossing;
pub mod flow;
pub mod landau_zener;
pub mod map;
pub mod refine;
pub mod transition;

pub use crossing::{detect_crossings, CrossingCriteria, CrossingEvent};
pub use flow::{
    build_adaptive_flow, track_bands, AdaptiveSettings, BandLabel, FlowBuilder, SliceData, SliceSource,
    SpectralFlow, TrackerSettings,
};
pub use landau_zener::LandauZener;
pub use map::{scan_transition_map, DarkFlow, TransitionCell};
pub use refine::{refine_crossing, RefineSettings, RefinedCrossing, RefinementLevel};
pub use transition::{coupling_series, nonadiabatic_coupling, transition_probability, TransitionEstimate};
