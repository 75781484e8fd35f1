//! Known datasets, their upstream files, and loading from the cache.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;

use super::cifar::parse_cifar10;
use super::dataset::{DataError, Dataset, Split};
use super::fetch::{fetch_dataset, Digest, FetchError, Fetched};
use super::idx::{parse_idx_images, parse_idx_labels};
use crate::tensor::Tensor;

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "INFOPLANE_CACHE";

pub const MNIST: &str = "mnist";
pub const FASHION_MNIST: &str = "fashion-mnist";
pub const CIFAR10: &str = "cifar10";
/// 10,000 real MNIST digits shipped with the crate (5,000 per split) for
/// offline use.
pub const MNIST_SAMPLE: &str = "mnist-sample";

pub const KNOWN: [&str; 4] = [MNIST, FASHION_MNIST, CIFAR10, MNIST_SAMPLE];

const CIFAR_DIR: &str = "cifar-10-batches-bin";

pub struct RemoteFile {
    pub url: &'static str,
    pub digest: fn() -> Digest,
    /// MD5 of the decompressed file. A verified uncompressed copy already in
    /// the cache counts as a hit, so a mirror can seed the cache offline.
    pub inflated_md5: Option<&'static str>,
}

macro_rules! md5 {
    ($h:literal) => {
        || Digest::Md5($h.to_string())
    };
}

pub fn remote_files(name: &str) -> Option<&'static [RemoteFile]> {
    const MNIST_FILES: &[RemoteFile] = &[
        RemoteFile {
            url: "https://ossci-datasets.s3.amazonaws.com/mnist/train-images-idx3-ubyte.gz",
            digest: md5!("f68b3c2dcbeaaa9fbdd348bbdeb94873"),
            inflated_md5: Some("6bbc9ace898e44ae57da46a324031adb"),
        },
        RemoteFile {
            url: "https://ossci-datasets.s3.amazonaws.com/mnist/train-labels-idx1-ubyte.gz",
            digest: md5!("d53e105ee54ea40749a09fcbcd1e9432"),
            inflated_md5: Some("a25bea736e30d166cdddb491f175f624"),
        },
        RemoteFile {
            url: "https://ossci-datasets.s3.amazonaws.com/mnist/t10k-images-idx3-ubyte.gz",
            digest: md5!("9fb629c4189551a2d022fa330f9573f3"),
            inflated_md5: Some("2646ac647ad5339dbf082846283269ea"),
        },
        RemoteFile {
            url: "https://ossci-datasets.s3.amazonaws.com/mnist/t10k-labels-idx1-ubyte.gz",
            digest: md5!("ec29112dd5afa0611ce80d1b7f02629c"),
            inflated_md5: Some("27ae3e4e09519cfbb04c329615203637"),
        },
    ];
    const FASHION_FILES: &[RemoteFile] = &[
        RemoteFile {
            url: "http://fashion-mnist.s3-website.eu-central-1.amazonaws.com/train-images-idx3-ubyte.gz",
            digest: md5!("8d4fb7e6c68d591d4c3dfef9ec88bf0d"),
            inflated_md5: None,
        },
        RemoteFile {
            url: "http://fashion-mnist.s3-website.eu-central-1.amazonaws.com/train-labels-idx1-ubyte.gz",
            digest: md5!("25c81989df183df01b3e8a0aad5dffbe"),
            inflated_md5: None,
        },
        RemoteFile {
            url: "http://fashion-mnist.s3-website.eu-central-1.amazonaws.com/t10k-images-idx3-ubyte.gz",
            digest: md5!("bef4ecab320f06d8554ea6380940ec79"),
            inflated_md5: None,
        },
        RemoteFile {
            url: "http://fashion-mnist.s3-website.eu-central-1.amazonaws.com/t10k-labels-idx1-ubyte.gz",
            digest: md5!("bb300cfdad3c16e7a12a480ee83cd310"),
            inflated_md5: None,
        },
    ];
    const CIFAR_FILES: &[RemoteFile] = &[RemoteFile {
        url: "https://www.cs.toronto.edu/~kriz/cifar-10-binary.tar.gz",
        digest: md5!("c32a1d4ab5d03f1284b67883e8d87530"),
        inflated_md5: None,
    }];
    match name {
        MNIST => Some(MNIST_FILES),
        FASHION_MNIST => Some(FASHION_FILES),
        CIFAR10 => Some(CIFAR_FILES),
        _ => None,
    }
}

pub fn bundled_sample_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(MNIST_SAMPLE)
}

/// `$INFOPLANE_CACHE`, else `~/.cache/infoplane`, else `./.infoplane-cache`.
pub fn default_cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(CACHE_ENV) {
        return PathBuf::from(dir);
    }
    match std::env::var_os("HOME") {
        Some(home) => PathBuf::from(home).join(".cache").join("infoplane"),
        None => PathBuf::from(".infoplane-cache"),
    }
}

pub fn is_known(name: &str) -> bool {
    KNOWN.contains(&name)
}

/// Downloads (or re-verifies) every upstream file of `name`.
pub fn fetch_known(name: &str, cache_dir: &Path) -> Result<Vec<Fetched>, FetchError> {
    let files = remote_files(name).unwrap_or(&[]);
    let fetched = files
        .iter()
        .map(|f| match seeded_copy(name, f, cache_dir)? {
            Some(path) => Ok(Fetched { path, cache_hit: true }),
            None => fetch_dataset(name, f.url, &(f.digest)(), cache_dir),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if name == CIFAR10 {
        let tarball = &fetched[0].path;
        let dir = cache_dir.join(CIFAR10);
        if !dir.join(CIFAR_DIR).join("test_batch.bin").exists() {
            let file = fs::File::open(tarball).map_err(|source| FetchError::Io {
                path: tarball.clone(),
                source,
            })?;
            tar::Archive::new(GzDecoder::new(file))
                .unpack(&dir)
                .map_err(|source| FetchError::Io { path: dir.clone(), source })?;
        }
    }
    Ok(fetched)
}

fn seeded_copy(name: &str, file: &RemoteFile, cache_dir: &Path) -> Result<Option<PathBuf>, FetchError> {
    let (Some(md5), Some(stem)) = (file.inflated_md5, file.url.rsplit('/').next().and_then(|f| f.strip_suffix(".gz")))
    else {
        return Ok(None);
    };
    let path = cache_dir.join(name).join(stem);
    if !path.exists() || cache_dir.join(name).join(format!("{stem}.gz")).exists() {
        return Ok(None);
    }
    let digest = Digest::Md5(md5.to_string());
    let actual = digest.of_file(&path).map_err(|source| FetchError::Io {
        path: path.clone(),
        source,
    })?;
    if actual != md5 {
        return Err(FetchError::HashMismatch {
            path,
            algorithm: "md5",
            expected: md5.to_string(),
            actual,
        });
    }
    Ok(Some(path))
}

/// Reads a file, inflating it first when it carries a gzip header.
pub fn read_maybe_gz(path: &Path) -> Result<Vec<u8>, DataError> {
    let io = |source| DataError::Io {
        path: path.to_path_buf(),
        source,
    };
    let raw = fs::read(path).map_err(io)?;
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(raw.as_slice()).read_to_end(&mut out).map_err(io)?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

fn find_idx(dir: &Path, stem: &str) -> Option<PathBuf> {
    [format!("{stem}.gz"), stem.to_string()]
        .into_iter()
        .map(|f| dir.join(f))
        .find(|p| p.exists())
}

pub fn load_idx_pair(name: &str, dir: &Path, split: Split) -> Result<Dataset, DataError> {
    let prefix = match split {
        Split::Train => "train",
        Split::Test => "t10k",
    };
    let locate = |kind: &str| {
        let stem = format!("{prefix}-{kind}-ubyte");
        find_idx(dir, &stem).ok_or_else(|| DataError::Missing {
            name: name.to_string(),
            path: dir.join(format!("{stem}.gz")),
        })
    };
    let images = parse_idx_images(&read_maybe_gz(&locate("images-idx3")?)?)?;
    let labels = parse_idx_labels(&read_maybe_gz(&locate("labels-idx1")?)?, 10)?;
    Dataset::new(name, split, images, labels, 10)
}

fn load_cifar(cache_dir: &Path, split: Split) -> Result<Dataset, DataError> {
    let dir = cache_dir.join(CIFAR10).join(CIFAR_DIR);
    let files: Vec<String> = match split {
        Split::Train => (1..=5).map(|i| format!("data_batch_{i}.bin")).collect(),
        Split::Test => vec!["test_batch.bin".into()],
    };
    let mut bytes = Vec::new();
    for f in files {
        let path = dir.join(&f);
        if !path.exists() {
            return Err(DataError::Missing {
                name: CIFAR10.into(),
                path,
            });
        }
        bytes.extend(read_maybe_gz(&path)?);
    }
    parse_cifar10(&bytes, split)
}

/// Loads a full split of a known dataset from `cache_dir` (the bundled
/// sample ignores `cache_dir`).
pub fn load_dataset(name: &str, split: Split, cache_dir: &Path) -> Result<Dataset, DataError> {
    match name {
        MNIST | FASHION_MNIST => load_idx_pair(name, &cache_dir.join(name), split),
        MNIST_SAMPLE => load_idx_pair(name, &bundled_sample_dir(), split),
        CIFAR10 => load_cifar(cache_dir, split),
        other => Err(DataError::UnknownDataset(other.to_string())),
    }
}

pub fn concat(a: &Dataset, b: &Dataset) -> Dataset {
    let mut data = a.images.data().to_vec();
    data.extend_from_slice(b.images.data());
    let mut shape = a.images.shape().to_vec();
    shape[0] += b.len();
    let mut labels = a.labels.clone();
    labels.extend_from_slice(&b.labels);
    Dataset {
        name: a.name.clone(),
        split: a.split,
        images: Tensor::new(shape, data).expect("matching image shapes"),
        labels,
        class_count: a.class_count,
    }
}
