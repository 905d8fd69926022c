pub mod analysis;
pub mod cli;
pub mod constructions;
pub mod netgraph;
pub mod tensor;
