//! `HTE1` binary container for dense matrices and a content-addressed store.
//!
//! Layout: the four bytes `HTE1`, rows and cols as little-endian `u64`, then
//! `rows·cols` little-endian `f64` in row-major order.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub const MAGIC: &[u8; 4] = b"HTE1";

pub fn encode(m: &DMatrix<f64>) -> Vec<u8> {
    let (r, c) = m.shape();
    let mut out = Vec::with_capacity(20 + 8 * r * c);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(r as u64).to_le_bytes());
    out.extend_from_slice(&(c as u64).to_le_bytes());
    for i in 0..r {
        for j in 0..c {
            out.extend_from_slice(&m[(i, j)].to_le_bytes());
        }
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<DMatrix<f64>> {
    if bytes.len() < 20 || &bytes[..4] != MAGIC {
        return Err(Error::Cache("missing HTE1 header".into()));
    }
    let word = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let (r, c) = (word(4) as usize, word(12) as usize);
    let expected = r.checked_mul(c).and_then(|n| n.checked_mul(8)).and_then(|n| n.checked_add(20));
    if expected != Some(bytes.len()) {
        return Err(Error::Cache(format!("HTE1 body does not match a {r}x{c} matrix")));
    }
    let data = &bytes[20..];
    Ok(DMatrix::from_fn(r, c, |i, j| {
        let o = 8 * (i * c + j);
        f64::from_le_bytes(data[o..o + 8].try_into().expect("8 bytes"))
    }))
}

pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    // Write to a sibling and rename so readers never see a partial file.
    let tmp = path.with_extension("tmp");
    fs::File::create(&tmp)?.write_all(&encode(m))?;
    fs::rename(tmp, path)?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let mut buf = Vec::new();
    fs::File::open(path)?.read_to_end(&mut buf)?;
    decode(&buf)
}

/// Hex sha256 of the JSON serialization of `key`.
pub fn content_key<K: Serialize>(key: &K) -> Result<String> {
    let json = serde_json::to_vec(key)?;
    let digest = Sha256::digest(&json);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Directory of `<kind>-<hash>.hte1` matrices with `.json` side records.
#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    fn stem(&self, kind: &str, hash: &str) -> PathBuf {
        self.dir.join(format!("{kind}-{hash}"))
    }

    pub fn load<M: DeserializeOwned>(&self, kind: &str, hash: &str) -> Result<Option<(DMatrix<f64>, M)>> {
        let stem = self.stem(kind, hash);
        let (mat, meta) = (stem.with_extension("hte1"), stem.with_extension("json"));
        if !mat.exists() || !meta.exists() {
            return Ok(None);
        }
        let m = read_matrix(&mat)?;
        let side: M = serde_json::from_slice(&fs::read(meta)?)?;
        Ok(Some((m, side)))
    }

    pub fn store<M: Serialize>(&self, kind: &str, hash: &str, m: &DMatrix<f64>, side: &M) -> Result<()> {
        let stem = self.stem(kind, hash);
        write_matrix(&stem.with_extension("hte1"), m)?;
        fs::write(stem.with_extension("json"), serde_json::to_vec(side)?)?;
        Ok(())
    }
}
