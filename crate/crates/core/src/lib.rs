pub mod abstraction;
pub mod calculus;
pub mod cdag;
pub mod cli;
pub mod graph;
pub mod oracle;
pub mod query;
pub mod structure;
pub mod text;
