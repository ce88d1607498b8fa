//! Symmetric CP tensor decomposition through joint triangularization of the
//! observable matrices built from tensor slices.

mod estimate;
mod first_order;
mod observable;
mod pipeline;
mod types;

pub use estimate::{
    component_error_bound, estimate_components, match_columns, normalized_components, recover_scales, ColumnMatch,
    ComponentBound,
};
pub use first_order::{first_order_model, FirstOrderModel};
pub use observable::{observable_matrices, pencil_weights, reduce_and_normalize, slices, Observables};
pub use pipeline::{decompose, Decomposition};
pub use types::{ComponentMatrix, ReductionPair, Tensor3};
