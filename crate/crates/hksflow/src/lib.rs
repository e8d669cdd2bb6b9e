//! Hybrid key switching for RNS-CKKS: functional kernels, dataflow task
//! graphs (max-parallel, digit-centric, output-centric), a decoupled
//! accelerator simulator and the benchmark driver behind the `hksflow` CLI.

pub mod bench;
pub mod graph;
pub mod hks;
pub mod rns;
pub mod sim;
