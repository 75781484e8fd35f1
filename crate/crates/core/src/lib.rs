pub mod cli;
pub mod data;
pub mod experiment;
pub mod mi;
pub mod nn;
pub mod report;
pub mod tensor;

pub use tensor::{ShapeError, Tensor};
