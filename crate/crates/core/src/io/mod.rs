//! File formats: NFLD1 snapshots, CSV tables, SVG plots and run manifests.

pub mod manifest;
pub mod nfld;
pub mod plot;
pub mod tables;

pub use manifest::{config_hash, Manifest};
pub use nfld::Snapshot;
pub use tables::SweepRow;
