//! Co-prime sparse array and sampler toolkit.
//!
//! Constructs co-prime array geometries (adjustable-pivot, extremely sparse,
//! and generalized multi-subarray forms), analyzes their difference sets and
//! weight functions, evaluates closed-form weight/bias-window expressions
//! against brute-force enumeration, and runs sub-Nyquist correlogram power
//! spectrum estimation in one and more dimensions with few snapshots.
//!
//! ```
//! use exsca_core::closedform::{bias_closed_exsca, BiasWindow};
//! use exsca_core::diffset::{continuous_range, weight_function};
//! use exsca_core::geometry::{positions_exsca, ExscaConfig};
//!
//! // sparse pair (4, 3) stretched by 2, shifted by 3: disjoint subarrays
//! let cfg = ExscaConfig::new(4, 3, 2, 3)?;
//! let layout = positions_exsca(&cfg);
//! assert_eq!(layout.union.len(), 7);
//!
//! // brute-force contributor counts per lag
//! let z = weight_function(&layout.union);
//! assert_eq!(z.z(0), 7);
//! assert_eq!(continuous_range(&z), 1);
//!
//! // the closed-form window equals the transform of those counts
//! let theory = bias_closed_exsca(4, 3, 3, cfg.pivot(), 1024)?;
//! let simulated = BiasWindow::from_weights(&z, 1024);
//! let dev = theory
//!     .peak_normalized()
//!     .max_abs_deviation(&simulated.peak_normalized())?;
//! assert!(dev <= 1e-9);
//! # Ok::<(), exsca_core::Error>(())
//! ```

pub mod closedform;
pub mod diffset;
pub mod error;
pub mod geometry;
pub mod multidim;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
