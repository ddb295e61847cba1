pub mod algebra;
pub mod analysis;
pub mod cli;
pub mod compiler;
pub mod dataset;
pub mod lang;
pub mod numeric;
pub mod refiner;
