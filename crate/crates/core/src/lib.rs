pub mod algebra;
pub mod cli;
pub mod constructions;
pub mod cube;
pub mod growth;
pub mod ideals;
pub mod kelly;
pub mod report;
pub mod sig;
pub mod template;
