//! Dataset ingestion: IDX and CIFAR-10 parsing, subsampling, verified downloads.

pub mod cifar;
pub mod dataset;
pub mod fetch;
pub mod idx;
pub mod source;

pub use cifar::parse_cifar10;
pub use dataset::{DataError, Dataset, Split, SubsampleSpec};
pub use fetch::{fetch_dataset, Digest, FetchError, Fetched};
pub use idx::{encode_idx_images, encode_idx_labels, parse_idx_images, parse_idx_labels, IdxError};
pub use source::{default_cache_dir, fetch_known, load_dataset, CACHE_ENV};
