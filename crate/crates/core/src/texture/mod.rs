//! Synthetic sandpaper textures and simulated observers.

mod grit;
mod identify;
mod library;
mod observer;
mod synth;

pub use grit::{canonical_grits, GritLevel, REFERENCE_GRIT};
pub use identify::{simulate_identification, Identifier};
pub use library::{
    build_stimulus_library, build_stimulus_library_with, parse_label, LibraryEntry, ManifestEntry,
    StimulusLibrary, DEFAULT_DURATION_S,
};
pub use observer::{
    analytic_observer_respond, perceived_intensity, signal_chain_respond,
    signal_chain_respond_intensity, Choice, ObserverKind, ObserverModel,
};
pub use synth::{synthesize_texture_trace, TextureModel};
