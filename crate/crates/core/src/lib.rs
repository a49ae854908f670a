//! Minesweeper inference by reduction to UNSAT, with grouped-MUS hardness
//! measurement, k-set search and percolation Monte Carlo.

pub mod board;
pub mod cnf;
pub mod gmus;
pub mod harness;
pub mod kset;
pub mod percolation;
pub mod player;
pub mod rng;
pub mod sat;
pub mod stats;
