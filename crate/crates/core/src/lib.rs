pub mod action;
pub mod algebra;
pub mod catalog;
pub mod cohomology;
pub mod degeneration;
pub mod extension;
pub mod ff;
pub mod invariants;
pub mod linalg;
pub mod report;
pub mod scalar;
