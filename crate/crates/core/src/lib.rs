pub mod carr_vempala;
pub mod decomp;
pub mod generators;
pub mod graph;
pub mod io;
pub mod lp;
pub mod multicut;
pub mod pload;
pub mod rational;
