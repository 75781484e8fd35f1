pub mod gradcheck;
pub mod mi_oracle;
