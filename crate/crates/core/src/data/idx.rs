//! Big-endian IDX files as distributed for MNIST and Fashion-MNIST.

use thiserror::Error;

use crate::tensor::Tensor;

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdxError {
    #[error("bad magic number: expected {expected:#010x}, found {found:#010x}")]
    BadMagic { expected: u32, found: u32 },
    #[error("truncated IDX payload: need {needed} bytes, have {available}")]
    Truncated { needed: usize, available: usize },
    #[error("IDX dimensions {dims:?} overflow the addressable size")]
    DimensionOverflow { dims: Vec<u32> },
    #[error("IDX file has {0} unexpected trailing bytes")]
    TrailingBytes(usize),
    #[error("IDX image file holds zero images")]
    NoImages,
    #[error("label {label} at index {index} is not below the class count {class_count}")]
    LabelOutOfRange {
        index: usize,
        label: u8,
        class_count: usize,
    },
}

fn read_u32(bytes: &[u8], at: usize) -> Result<u32, IdxError> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes(b.try_into().unwrap()))
        .ok_or(IdxError::Truncated {
            needed: at + 4,
            available: bytes.len(),
        })
}

fn payload<'a>(bytes: &'a [u8], header: usize, dims: &[u32]) -> Result<&'a [u8], IdxError> {
    let overflow = || IdxError::DimensionOverflow { dims: dims.to_vec() };
    let len = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d as usize))
        .ok_or_else(overflow)?;
    let needed = header.checked_add(len).ok_or_else(overflow)?;
    if bytes.len() < needed {
        return Err(IdxError::Truncated {
            needed,
            available: bytes.len(),
        });
    }
    if bytes.len() > needed {
        return Err(IdxError::TrailingBytes(bytes.len() - needed));
    }
    Ok(&bytes[header..])
}

/// Parses an image file into `[N, H, W, 1]` with pixels scaled to `[0, 1]`.
pub fn parse_idx_images(bytes: &[u8]) -> Result<Tensor, IdxError> {
    let magic = read_u32(bytes, 0)?;
    if magic != IMAGE_MAGIC {
        return Err(IdxError::BadMagic {
            expected: IMAGE_MAGIC,
            found: magic,
        });
    }
    let dims = [read_u32(bytes, 4)?, read_u32(bytes, 8)?, read_u32(bytes, 12)?];
    let pixels = payload(bytes, 16, &dims)?;
    if dims.contains(&0) {
        return Err(IdxError::NoImages);
    }
    let shape = vec![dims[0] as usize, dims[1] as usize, dims[2] as usize, 1];
    let data = pixels.iter().map(|&b| f64::from(b) / 255.0).collect();
    Ok(Tensor::new(shape, data).expect("shape matches payload"))
}

/// Parses a label file, rejecting labels `>= class_count`.
pub fn parse_idx_labels(bytes: &[u8], class_count: usize) -> Result<Vec<u8>, IdxError> {
    let magic = read_u32(bytes, 0)?;
    if magic != LABEL_MAGIC {
        return Err(IdxError::BadMagic {
            expected: LABEL_MAGIC,
            found: magic,
        });
    }
    let n = read_u32(bytes, 4)?;
    let labels = payload(bytes, 8, &[n])?;
    if let Some((index, &label)) = labels.iter().enumerate().find(|(_, &l)| l as usize >= class_count) {
        return Err(IdxError::LabelOutOfRange {
            index,
            label,
            class_count,
        });
    }
    Ok(labels.to_vec())
}

/// Inverse of [`parse_idx_images`] for `[N, H, W, 1]` tensors in `[0, 1]`.
pub fn encode_idx_images(images: &Tensor) -> Vec<u8> {
    let s = images.shape();
    assert!(s.len() == 4 && s[3] == 1, "expected [N, H, W, 1], got {s:?}");
    let mut out = Vec::with_capacity(16 + images.len());
    out.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
    for &d in &s[..3] {
        out.extend_from_slice(&(d as u32).to_be_bytes());
    }
    out.extend(images.data().iter().map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8));
    out
}

pub fn encode_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image_fixture() -> Vec<u8> {
        let mut b = Vec::new();
        for v in [2051u32, 2, 2, 2] {
            b.extend_from_slice(&v.to_be_bytes());
        }
        b.extend_from_slice(&[0, 255, 0, 255, 255, 0, 255, 0]);
        b
    }

    #[test]
    fn parses_hand_built_images() {
        let t = parse_idx_images(&image_fixture()).unwrap();
        assert_eq!(t.shape(), &[2, 2, 2, 1]);
        assert_eq!(t.data(), &[0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0]);
        assert_eq!(encode_idx_images(&t), image_fixture());
    }

    #[test]
    fn label_magic_rejected_by_image_parser() {
        let mut b = image_fixture();
        b[3] = 0x01;
        assert_eq!(
            parse_idx_images(&b),
            Err(IdxError::BadMagic {
                expected: 2051,
                found: 2049
            })
        );
    }

    #[test]
    fn one_byte_short_is_truncation() {
        let b = image_fixture();
        assert!(matches!(
            parse_idx_images(&b[..b.len() - 1]),
            Err(IdxError::Truncated { needed: 24, available: 23 })
        ));
        assert!(matches!(parse_idx_images(&b[..6]), Err(IdxError::Truncated { .. })));
    }

    #[test]
    fn huge_dimensions_overflow() {
        let mut b = Vec::new();
        for v in [2051u32, u32::MAX, u32::MAX, u32::MAX] {
            b.extend_from_slice(&v.to_be_bytes());
        }
        assert!(matches!(parse_idx_images(&b), Err(IdxError::DimensionOverflow { .. })));
    }

    #[test]
    fn parses_labels() {
        let mut b = Vec::new();
        b.extend_from_slice(&2049u32.to_be_bytes());
        b.extend_from_slice(&3u32.to_be_bytes());
        b.extend_from_slice(&[0, 5, 9]);
        assert_eq!(parse_idx_labels(&b, 10).unwrap(), vec![0, 5, 9]);
        assert_eq!(encode_idx_labels(&[0, 5, 9]), b);
        *b.last_mut().unwrap() = 10;
        assert_eq!(
            parse_idx_labels(&b, 10),
            Err(IdxError::LabelOutOfRange {
                index: 2,
                label: 10,
                class_count: 10
            })
        );
    }

    #[test]
    fn empty_label_file_parses() {
        let mut b = Vec::new();
        b.extend_from_slice(&2049u32.to_be_bytes());
        b.extend_from_slice(&0u32.to_be_bytes());
        assert_eq!(parse_idx_labels(&b, 10).unwrap(), Vec::<u8>::new());
    }
}
