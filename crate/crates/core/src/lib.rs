//! Transitivity and frustration of sign relations between market sectors,
//! computed over half-year windows of daily index levels.
//!
//! The core is generic over the scalar type ([`Scalar`], implemented for
//! `f32` and `f64`); the `*F64` / `*F32` aliases below fix it.

pub mod analysis;
pub mod config;
pub mod correlation;
pub mod demo;
pub mod error;
pub mod format;
pub mod hierarchy;
pub mod ingest;
pub mod measures;
pub mod pipeline;
pub mod relations;
pub mod scalar;

pub use analysis::{
    classify_reaction, classify_state, detect_picks, envelope_trend, sector_reaction_report, Pick, Reaction,
    ReactionEvent, StateClass, TrendLine,
};
pub use config::{OutputFormat, PartialConfig, ReturnsMode, RunConfig, SectorSource};
pub use correlation::{compose_fits, corr_matrix, fit_line, ls_fit, pearson, CorrelationMatrix, LinearFit};
pub use error::{Error, Result};
pub use hierarchy::{phi_direct, phi_recurrence, superposition_check, PhiValue, SectorSubset};
pub use ingest::{
    align, align_with, load_series, partition_windows, AlignOptions, AlignedPanel, IndexSeries, WindowId,
    WindowPanel, WindowPartition,
};
pub use measures::{hierarchy_series, leave_one_out, rho_measure, scale_overlay, HierarchySeries, MeasureValue};
pub use pipeline::{run_pipeline, RunManifest};
pub use relations::{decompose, preorder_cover, sign_matrix, Plaquette, PlaquetteDecomposition, Sign, SignMatrix};
pub use scalar::Scalar;

pub type IndexSeriesF64 = IndexSeries<f64>;
pub type AlignedPanelF64 = AlignedPanel<f64>;
pub type CorrelationMatrixF64 = CorrelationMatrix<f64>;
pub type MeasureValueF64 = MeasureValue<f64>;
pub type HierarchySeriesF64 = HierarchySeries<f64>;

pub type IndexSeriesF32 = IndexSeries<f32>;
pub type AlignedPanelF32 = AlignedPanel<f32>;
pub type CorrelationMatrixF32 = CorrelationMatrix<f32>;
pub type MeasureValueF32 = MeasureValue<f32>;
pub type HierarchySeriesF32 = HierarchySeries<f32>;
