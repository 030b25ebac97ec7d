pub mod definite;
pub mod error;
pub mod expr;
pub mod jet;
pub mod numeric;
pub mod series;
