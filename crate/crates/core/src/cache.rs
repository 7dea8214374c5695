//! Content-addressed disk cache for exact values.
//!
//! Keys are SHA-256 digests of a canonical JSON rendering of the inputs; values are
//! JSON files written through a temporary file and an atomic rename, so concurrent
//! writers of the same key leave a single well-formed entry.

use crate::Error;
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;
use std::time::{Duration, SystemTime};

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "SHINTANI_CACHE_DIR";

#[derive(Debug)]
pub struct DiskCache {
    dir: PathBuf,
    hits: AtomicU64,
    misses: AtomicU64,
    writes: AtomicU64,
    discarded: AtomicU64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub writes: u64,
    pub discarded: u64,
}

impl CacheStats {
    pub fn hit_rate(&self) -> f64 {
        let total = self.hits + self.misses;
        if total == 0 {
            0.0
        } else {
            self.hits as f64 / total as f64
        }
    }
}

impl DiskCache {
    pub fn open(dir: impl AsRef<Path>) -> Result<DiskCache, Error> {
        let dir = dir.as_ref().to_path_buf();
        std::fs::create_dir_all(&dir).map_err(|e| Error::Config(format!("cache directory {}: {e}", dir.display())))?;
        Ok(DiskCache { dir, hits: AtomicU64::new(0), misses: AtomicU64::new(0), writes: AtomicU64::new(0), discarded: AtomicU64::new(0) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Hex SHA-256 of the canonical JSON of `parts`.
    pub fn key(parts: &impl Serialize) -> String {
        let bytes = serde_json::to_vec(parts).expect("cache keys serialize");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(&key[..2]).join(format!("{key}.json"))
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        let path = self.path(key);
        let Ok(bytes) = std::fs::read(&path) else {
            self.misses.fetch_add(1, Ordering::Relaxed);
            return None;
        };
        match serde_json::from_slice(&bytes) {
            Ok(v) => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                Some(v)
            }
            Err(e) => {
                eprintln!("warning: discarding corrupted cache entry {}: {e}", path.display());
                let _ = std::fs::remove_file(&path);
                self.discarded.fetch_add(1, Ordering::Relaxed);
                self.misses.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }

    /// A lookup answered by an in-memory layer in front of this cache.
    pub fn note_hit(&self) {
        self.hits.fetch_add(1, Ordering::Relaxed);
    }

    pub fn put<T: Serialize>(&self, key: &str, value: &T) -> Result<(), Error> {
        let path = self.path(key);
        let io = |e: std::io::Error| Error::Config(format!("cache write {}: {e}", path.display()));
        std::fs::create_dir_all(path.parent().unwrap()).map_err(io)?;
        let tmp = path.with_extension(format!("tmp.{}.{:?}", std::process::id(), std::thread::current().id()));
        std::fs::write(&tmp, serde_json::to_vec(value).expect("cache values serialize")).map_err(io)?;
        std::fs::rename(&tmp, &path).map_err(io)?;
        self.writes.fetch_add(1, Ordering::Relaxed);
        Ok(())
    }

    /// Remove entries not modified within `max_age`; returns the number removed.
    pub fn gc(&self, max_age: Duration) -> Result<usize, Error> {
        let now = SystemTime::now();
        let mut removed = 0;
        let io = |e: std::io::Error| Error::Config(format!("cache gc: {e}"));
        for shard in std::fs::read_dir(&self.dir).map_err(io)? {
            let shard = shard.map_err(io)?.path();
            if !shard.is_dir() {
                continue;
            }
            for entry in std::fs::read_dir(&shard).map_err(io)? {
                let path = entry.map_err(io)?.path();
                let age = std::fs::metadata(&path).and_then(|m| m.modified()).ok().and_then(|t| now.duration_since(t).ok());
                if age.is_some_and(|a| a >= max_age) && std::fs::remove_file(&path).is_ok() {
                    removed += 1;
                }
            }
        }
        Ok(removed)
    }

    pub fn entries(&self) -> usize {
        std::fs::read_dir(&self.dir)
            .into_iter()
            .flatten()
            .flatten()
            .filter(|e| e.path().is_dir())
            .map(|e| std::fs::read_dir(e.path()).map(|r| r.flatten().filter(|x| x.path().extension().is_some_and(|s| s == "json")).count()).unwrap_or(0))
            .sum()
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            writes: self.writes.load(Ordering::Relaxed),
            discarded: self.discarded.load(Ordering::Relaxed),
        }
    }
}

static GLOBAL: OnceLock<DiskCache> = OnceLock::new();

/// Route exact cone values through a disk cache for the rest of the process.
pub fn install(dir: impl AsRef<Path>) -> Result<&'static DiskCache, Error> {
    let c = DiskCache::open(dir)?;
    Ok(GLOBAL.get_or_init(|| c))
}

pub fn global() -> Option<&'static DiskCache> {
    GLOBAL.get()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qf;
    use crate::cyclo::CycloNum;

    #[test]
    fn roundtrip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let c = DiskCache::open(dir.path()).unwrap();
        let x = CycloNum::root(12, 5).add(&CycloNum::from_q(12, &qf(-7, 3)));
        let key = DiskCache::key(&("test", 1u32));
        assert!(c.get::<CycloNum>(&key).is_none());
        c.put(&key, &x).unwrap();
        c.put(&key, &x).unwrap();
        assert_eq!(c.get::<CycloNum>(&key).unwrap(), x);
        assert_eq!(c.entries(), 1);
        std::fs::write(c.path(&key), b"{not json").unwrap();
        assert!(c.get::<CycloNum>(&key).is_none());
        assert_eq!(c.stats().discarded, 1);
        c.put(&key, &x).unwrap();
        assert_eq!(c.gc(Duration::ZERO).unwrap(), 1);
        assert_eq!(c.entries(), 0);
    }

    #[test]
    fn concurrent_puts_leave_one_entry() {
        let dir = tempfile::tempdir().unwrap();
        let c = DiskCache::open(dir.path()).unwrap();
        let key = DiskCache::key(&"same");
        let x = CycloNum::root(5, 2);
        std::thread::scope(|s| {
            for _ in 0..8 {
                s.spawn(|| c.put(&key, &x).unwrap());
            }
        });
        assert_eq!(c.entries(), 1);
        assert_eq!(c.get::<CycloNum>(&key).unwrap(), x);
    }
}
