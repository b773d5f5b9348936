//! Desk-scale experiments: a trainable MLP with projected weights, an
//! O(5)-invariant regression task, a rotated-grid classification task and
//! a timing comparison of the two projector routes.

mod grid;
mod mlp;
mod o5;
mod timing;

pub use grid::{
    filter_panels, grid_classifier, grid_task, quarter_turns, train_grid, FilterPanel, GridConfig, GridDataset,
    GridOutcome, GridTemplates, DEFAULT_NOISE, MAX_GRID_SIDE, MIN_GRID_SIDE,
};
pub use mlp::{softmax_rows, train, Activation, Layer, LayerGrad, ProjectedMlp, Targets, TrainConfig, TrainOutcome};
pub use o5::{
    median, o5_block_projector, o5_model, o5_target, train_o5, train_projected_mlp, O5Config, O5Outcome, O5Split,
    O5Task, POINT_DIM,
};
pub use timing::{bench_decompositions, bench_decompositions_at, DecompRow, AGREEMENT_TOL, BENCH_CUTOFF, MAX_BENCH_SIDE};
