//! Content-addressed result cache.
//!
//! Layout: `<dir>/results/<sha256>.json` for whole command outputs and
//! `<dir>/cells/<sha256>.json` for per-cell scan checkpoints. Each file is an
//! envelope carrying the descriptor, the payload, and the payload's sha256;
//! an envelope that fails to parse or to match its checksum is a miss.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use schmidt_core::discovery::{CellStore, DiscoveredS};

use crate::wire::WireCell;

#[derive(Serialize, Deserialize)]
struct Envelope {
    descriptor: String,
    exit: i32,
    checksum: String,
    payload: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A stored command result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hit {
    pub exit: i32,
    pub payload: Vec<u8>,
}

#[derive(Debug, Default)]
pub struct Cache {
    root: Option<PathBuf>,
    cell_hits: AtomicUsize,
    cell_writes: AtomicUsize,
    warnings: std::sync::Mutex<Vec<String>>,
}

impl Cache {
    /// Never reads or writes.
    pub fn disabled() -> Self {
        Self::default()
    }

    /// Opens (creating if needed) a cache at `dir`. An unusable directory
    /// yields a disabled cache plus a warning.
    pub fn open(dir: &Path) -> Self {
        let probe = || -> std::io::Result<()> {
            fs::create_dir_all(dir.join("results"))?;
            fs::create_dir_all(dir.join("cells"))?;
            tempfile::NamedTempFile::new_in(dir.join("results"))?;
            Ok(())
        };
        match probe() {
            Ok(()) => Self {
                root: Some(dir.to_path_buf()),
                ..Self::default()
            },
            Err(e) => {
                let cache = Self::disabled();
                cache.warn(format!(
                    "warning: cache directory {} is not writable ({e}); continuing without cache",
                    dir.display()
                ));
                cache
            }
        }
    }

    pub fn enabled(&self) -> bool {
        self.root.is_some()
    }

    pub fn cell_hits(&self) -> usize {
        self.cell_hits.load(Ordering::Relaxed)
    }

    pub fn cell_writes(&self) -> usize {
        self.cell_writes.load(Ordering::Relaxed)
    }

    pub fn take_warnings(&self) -> Vec<String> {
        std::mem::take(&mut *self.warnings.lock().unwrap())
    }

    fn warn(&self, msg: String) {
        self.warnings.lock().unwrap().push(msg);
    }

    pub fn result_path(&self, descriptor: &str) -> Option<PathBuf> {
        self.path("results", descriptor)
    }

    fn path(&self, area: &str, descriptor: &str) -> Option<PathBuf> {
        let root = self.root.as_ref()?;
        Some(
            root.join(area)
                .join(format!("{}.json", sha256_hex(descriptor.as_bytes()))),
        )
    }

    fn read(&self, area: &str, descriptor: &str) -> Option<Hit> {
        let bytes = fs::read(self.path(area, descriptor)?).ok()?;
        let env: Envelope = serde_json::from_slice(&bytes).ok()?;
        (env.descriptor == descriptor && env.checksum == sha256_hex(env.payload.as_bytes())).then(
            || Hit {
                exit: env.exit,
                payload: env.payload.into_bytes(),
            },
        )
    }

    fn write(&self, area: &str, descriptor: &str, exit: i32, payload: &[u8]) {
        let Some(path) = self.path(area, descriptor) else {
            return;
        };
        let Ok(payload) = std::str::from_utf8(payload) else {
            return;
        };
        let env = Envelope {
            descriptor: descriptor.to_string(),
            exit,
            checksum: sha256_hex(payload.as_bytes()),
            payload: payload.to_string(),
        };
        let result = (|| -> std::io::Result<()> {
            let dir = path.parent().expect("cache paths have a parent");
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(&serde_json::to_vec(&env)?)?;
            tmp.as_file().sync_all()?;
            tmp.persist(&path).map_err(|e| e.error)?;
            Ok(())
        })();
        if let Err(e) = result {
            self.warn(format!(
                "warning: could not write cache entry {}: {e}",
                path.display()
            ));
        }
    }

    pub fn get(&self, descriptor: &str) -> Option<Hit> {
        self.read("results", descriptor)
    }

    pub fn put(&self, descriptor: &str, exit: i32, payload: &[u8]) {
        self.write("results", descriptor, exit, payload)
    }

    fn cell_descriptor(tag: &str, k: usize, i: usize) -> String {
        format!(
            r#"{{"version":"{}","kind":"cell","family":"{tag}","k":{k},"i":{i}}}"#,
            env!("CARGO_PKG_VERSION")
        )
    }
}

impl CellStore for Cache {
    fn load(&self, tag: &str, k: usize, i: usize) -> Option<DiscoveredS> {
        let hit = self.read("cells", &Self::cell_descriptor(tag, k, i))?;
        let wire: WireCell = serde_json::from_slice(&hit.payload).ok()?;
        let cell = wire.to_core().ok()?;
        (cell.tag == tag && cell.k == k && cell.i == i).then(|| {
            self.cell_hits.fetch_add(1, Ordering::Relaxed);
            cell
        })
    }

    fn store(&self, cell: &DiscoveredS) {
        if !self.enabled() {
            return;
        }
        let payload = serde_json::to_vec(&WireCell::from(cell)).expect("cells serialize");
        self.write(
            "cells",
            &Self::cell_descriptor(&cell.tag, cell.k, cell.i),
            0,
            &payload,
        );
        self.cell_writes.fetch_add(1, Ordering::Relaxed);
    }
}
