//! Principal coefficients embedding: a closed-form subspace learner that
//! estimates the intrinsic dimension of noisy data, recovers its low-rank
//! part, and learns a linear projection that preserves the self-expressive
//! structure of that part.
//!
//! ```
//! use pce_core::{fit, DataMatrix};
//!
//! let d = DataMatrix::from_row_major(2, 2, &[2.0, 0.0, 0.0, 0.1]).unwrap();
//! let model = fit(&d, 1.0).unwrap();
//! assert_eq!(model.k, 1);
//! let z = model.transform(&DataMatrix::from_row_major(2, 1, &[2.0, 0.0]).unwrap()).unwrap();
//! assert!((z.get(0, 0) - 1.0).abs() < 1e-12);
//! ```

pub mod data;
pub mod error;
pub mod eval;
pub mod graph;
pub mod linalg;
pub mod matrix;
pub mod pce;
pub mod persist;

pub use error::{PceError, Result};
pub use graph::{embed, lle_graph, pce_graph, AffinityGraph, Embedding, LleConfig};
pub use linalg::{
    generalized_eigs, generalized_eigs_low_rank, generalized_top_eigs, skinny_svd, GeneralizedEigs, Ridge, SvdFactors,
};
pub use matrix::DataMatrix;
pub use pce::{
    estimate_dimension, fit, fit_with, principal_coefficients, recover_clean, transform, CoefficientFactor, FitDetails,
    FitOptions, PceModel, Recovery,
};
pub use persist::{load_model, parse_model, save_model, ModelFile};
