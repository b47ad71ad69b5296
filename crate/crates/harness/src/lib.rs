//! Experiment harness for the Lasso path laboratory: the worst-case
//! smoothing study, patch regression on image data, result persistence, and
//! the command-line surface.

pub mod cli;
pub mod error;
pub mod idx;
pub mod mnist;
pub mod runrec;
pub mod table1;

pub use error::HarnessError;
pub use idx::{load_idx_images, parse_idx_images, write_idx_images, ImageDataset};
pub use mnist::{build_patch_instance, run_mnist, MnistOptions, MnistResult};
pub use runrec::{CellStat, RunRecord};
pub use table1::{run_table1, SigmaSpec, Table1, Table1Options};
