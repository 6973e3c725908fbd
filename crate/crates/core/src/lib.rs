pub mod quad;
pub mod cluster;
pub mod laser;
pub mod gate;
pub mod mux;
pub mod runner;
