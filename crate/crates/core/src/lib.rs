//! Lagged causal network discovery from multivariate time series by optimal
//! causation entropy.
//!
//! The crate is split along the pipeline:
//!
//! * [`information`]: entropy, MI and CMI estimators (Gaussian, KSG kNN,
//!   geometric kNN, KDE, Poisson plug-in).
//! * [`discovery`]: lag embedding, shuffle tests, forward selection,
//!   backward pruning and the full-network driver.
//! * [`graph`]: the lag-resolved multigraph result, its JSON/CSV/DOT
//!   renderings and evaluation against ground truth.
//! * [`datasets`]: synthetic generators with known networks.
//! * `cli`: the `centropy` command-line front end.
//!
//! ```
//! use centropy::datasets::{linear_stochastic_gaussian_process, SyntheticConfig};
//! use centropy::discovery::{discover_network, DiscoveryConfig};
//!
//! let inst = linear_stochastic_gaussian_process(&SyntheticConfig::new(3, 300, 0.7, 0.3, 1)).unwrap();
//! let cfg = DiscoveryConfig { permutations: 50, ..DiscoveryConfig::default() };
//! let network = discover_network(&inst.data, &cfg).unwrap();
//! assert_eq!(network.n_nodes(), 3);
//! ```

#[cfg(feature = "cli")]
pub mod cli;
pub mod datasets;
pub mod discovery;
pub mod graph;
pub mod information;
pub mod numfmt;
mod par;
pub mod series;

pub use datasets::{SyntheticConfig, SyntheticInstance};
pub use discovery::{discover_network, DiscoveryConfig};
pub use graph::{CausalGraph, EdgeRecord};
pub use information::{EstimatorKind, EstimatorSpec, SampleBlock};
pub use series::TimeSeries;
