//! CIFAR-10 binary batches: 3073-byte records of one label byte followed by
//! the R, G and B planes of a 32×32 image.

use super::dataset::{DataError, Dataset, Split};
use crate::tensor::Tensor;

pub const SIDE: usize = 32;
pub const PLANE: usize = SIDE * SIDE;
pub const RECORD_LEN: usize = 1 + 3 * PLANE;

/// Parses records and averages the three colour planes into one channel:
/// `(R + G + B) / 3 / 255`.
pub fn parse_cifar10(bytes: &[u8], split: Split) -> Result<Dataset, DataError> {
    if bytes.len() % RECORD_LEN != 0 {
        return Err(DataError::CifarLength(bytes.len()));
    }
    let n = bytes.len() / RECORD_LEN;
    let mut labels = Vec::with_capacity(n);
    let mut pixels = Vec::with_capacity(n * PLANE);
    for record in bytes.chunks_exact(RECORD_LEN) {
        labels.push(record[0]);
        let (r, rest) = record[1..].split_at(PLANE);
        let (g, b) = rest.split_at(PLANE);
        for i in 0..PLANE {
            let sum = u32::from(r[i]) + u32::from(g[i]) + u32::from(b[i]);
            pixels.push(f64::from(sum) / 3.0 / 255.0);
        }
    }
    if n == 0 {
        return Err(DataError::Empty);
    }
    let images = Tensor::new(vec![n, SIDE, SIDE, 1], pixels).expect("record layout");
    Dataset::new("cifar10", split, images, labels, 10)
}
