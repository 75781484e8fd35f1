//! Checksum-verified downloads into `<cache>/<dataset-name>/<original-filename>`.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use md5::Md5;
use sha2::{Digest as _, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Digest {
    Sha256(String),
    /// Only for upstream files whose publishers list MD5 sums alone.
    Md5(String),
}

impl Digest {
    fn algorithm(&self) -> &'static str {
        match self {
            Digest::Sha256(_) => "sha256",
            Digest::Md5(_) => "md5",
        }
    }

    fn expected(&self) -> &str {
        match self {
            Digest::Sha256(h) | Digest::Md5(h) => h,
        }
    }

    pub fn of_file(&self, path: &Path) -> io::Result<String> {
        let mut file = File::open(path)?;
        let mut buf = vec![0u8; 1 << 16];
        macro_rules! hash_with {
            ($h:expr) => {{
                let mut h = $h;
                loop {
                    let n = file.read(&mut buf)?;
                    if n == 0 {
                        break;
                    }
                    h.update(&buf[..n]);
                }
                hex::encode(h.finalize())
            }};
        }
        Ok(match self {
            Digest::Sha256(_) => hash_with!(Sha256::new()),
            Digest::Md5(_) => hash_with!(Md5::new()),
        })
    }

    fn verify(&self, path: &Path) -> Result<(), FetchError> {
        let actual = self.of_file(path).map_err(|e| FetchError::io(path, e))?;
        if actual.eq_ignore_ascii_case(self.expected()) {
            Ok(())
        } else {
            Err(FetchError::HashMismatch {
                path: path.to_path_buf(),
                algorithm: self.algorithm(),
                expected: self.expected().to_string(),
                actual,
            })
        }
    }
}

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("{algorithm} mismatch for {path}: expected {expected}, got {actual}; delete the file to re-download")]
    HashMismatch {
        path: PathBuf,
        algorithm: &'static str,
        expected: String,
        actual: String,
    },
    #[error("download of {url} failed: {msg}")]
    Network { url: String, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot derive a file name from {0}")]
    BadUrl(String),
}

impl FetchError {
    fn io(path: &Path, source: io::Error) -> Self {
        FetchError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fetched {
    pub path: PathBuf,
    pub cache_hit: bool,
}

/// Ensures `<cache_dir>/<name>/<file>` exists and matches `expected`,
/// downloading it on a cache miss. A cached file that fails verification is
/// an error; it is never silently replaced.
pub fn fetch_dataset(name: &str, url: &str, expected: &Digest, cache_dir: &Path) -> Result<Fetched, FetchError> {
    let file_name = url
        .rsplit('/')
        .next()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| FetchError::BadUrl(url.to_string()))?;
    let dir = cache_dir.join(name);
    fs::create_dir_all(&dir).map_err(|e| FetchError::io(&dir, e))?;
    let path = dir.join(file_name);

    let lock_path = dir.join(format!("{file_name}.lock"));
    let lock = OpenOptions::new()
        .create(true)
        .truncate(false)
        .write(true)
        .open(&lock_path)
        .map_err(|e| FetchError::io(&lock_path, e))?;
    lock.lock().map_err(|e| FetchError::io(&lock_path, e))?;

    if path.exists() {
        expected.verify(&path)?;
        return Ok(Fetched { path, cache_hit: true });
    }

    let partial = dir.join(format!("{file_name}.part"));
    download(url, &partial)?;
    if let Err(e) = expected.verify(&partial) {
        let _ = fs::remove_file(&partial);
        return Err(e);
    }
    fs::rename(&partial, &path).map_err(|e| FetchError::io(&path, e))?;
    log::info!("downloaded {url} -> {}", path.display());
    Ok(Fetched { path, cache_hit: false })
}

fn download(url: &str, dest: &Path) -> Result<(), FetchError> {
    let network = |msg: String| FetchError::Network {
        url: url.to_string(),
        msg,
    };
    let response = ureq::get(url).call().map_err(|e| network(e.to_string()))?;
    let mut reader = response.into_reader();
    let mut out = File::create(dest).map_err(|e| FetchError::io(dest, e))?;
    io::copy(&mut reader, &mut out).map_err(|e| network(e.to_string()))?;
    out.flush().map_err(|e| FetchError::io(dest, e))?;
    Ok(())
}
