//! Minimal deterministic CNN engine: layer kernels, loss, Adam, and activation
//! tracing.

pub mod activation;
pub mod adam;
pub mod conv;
pub mod dense;
mod gemm;
pub mod loss;
pub mod network;
pub mod pool;
pub mod spec;

pub use activation::{softmax, softmax_rows, tanh_activation, Activation};
pub use adam::{AdamConfig, AdamState};
pub use conv::{conv2d_backward, conv2d_forward, ConvGrads};
pub use dense::{dense_backward, dense_forward, DenseGrads};
pub use loss::{cross_entropy_loss, LossError};
pub use network::{backward, forward, forward_with_trace, init_params, ForwardCache, ForwardTrace, LayerParams, Params};
pub use pool::{maxpool2d, maxpool2d_backward, Pooled};
pub use spec::{ActShape, LayerSpec, NetworkSpec, SpecError};
