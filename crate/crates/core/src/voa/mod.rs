//! Vertex operator algebras and their modules at finite weight cutoff.

pub mod axioms;
pub mod engine;
pub mod ops;
pub mod presentation;

pub use engine::{Base, Gen, GenSystem, ModeEngine};
pub use presentation::{
    make_heisenberg, make_virasoro, rescale_module, tensor_factor_index, tensor_module, tensor_voa, BasisEntry, ModeTable, ModulePresentation, VoaPresentation,
};
