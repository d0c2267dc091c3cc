//! Core data model for hardware-native Ising benchmarking: sparse Ising
//! models, the QUBO bijection, Pegasus topologies, CBFM instance families,
//! instance files, an exhaustive oracle and LP exporters.

pub mod error;
pub mod instance;
pub mod io;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod pegasus;
pub mod qubo;

pub use error::{IsingError, Result};
pub use instance::{generate, random_graph_instance, Family, InstanceSpec, Mask};
pub use io::{read_instance, write_instance};
pub use model::{IsingModel, Neighbor, SpinConfiguration};
pub use oracle::{brute_force, OracleResult};
pub use pegasus::{pegasus, PegasusTopology};
pub use qubo::{from_qubo, to_qubo, QuboModel};
