//! Transfer-learning polygenic risk scores from GWAS summary statistics.
//!
//! A small target population contributes marginal association summaries
//! `r`, a public reference panel of the same ancestry contributes a
//! soft-thresholded banded LD matrix, and a large auxiliary population
//! contributes prior coefficients. The estimator minimizes
//!
//! ```text
//! (1 + eta)/2 * b' S b - b' (r + eta * S bt) + lambda * |b|_1
//! ```
//!
//! by cyclic coordinate descent. `eta` trades the target data against the
//! prior; `eta = 0` is the summary-statistics lasso.

pub mod align;
pub mod cli;
pub mod error;
pub mod eval;
pub mod io;
pub mod refpanel;
pub mod simulate;
pub mod solver;
pub mod sumstats;
pub mod tuning;

pub use align::{align, Aligned};
pub use error::{BrightError, Result};
pub use refpanel::{default_tau, estimate_ld, soft_threshold, GenotypePanel, SparseLD};
pub use simulate::{SimDataset, SimScenario};
pub use solver::{fit, fit_path, kkt_check, lambda_max, objective, FitResult, PriorWeights, SolverConfig};
pub use sumstats::{load_sumstats, Scale, SummaryStats, VariantRecord};
pub use tuning::{select, Criterion, TuneReport};
