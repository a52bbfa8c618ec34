//! Dataset ingestion, preprocessing and seeded splitting.
//!
//! All randomness comes from ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded
//! through `SeedableRng::seed_from_u64`, so a given seed yields the same
//! split or synthetic dataset on every platform.

mod csv_io;
mod idx;
mod preprocess;
mod split;
mod synthetic;

pub use csv_io::{load_csv, write_csv};
pub use idx::load_idx;
pub use preprocess::{downsample_images, normalize_columns};
pub use split::{holdout_split, subsample_per_class, SplitSpec};
pub use synthetic::{generate_synthetic, SyntheticSpec};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub(crate) fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}
