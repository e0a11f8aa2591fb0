//! Persistent cache of ζ(1/2+iu) values for blocks of quadrature nodes.
//!
//! A block is identified by its first panel start `u0`, panel width `du`,
//! nodes per panel and panel count, which fix every node height bit for bit.
//!
//! File layout (little endian): 8-byte magic, block count as `u64`, then per
//! block `u0`, `du` as `f64`, nodes and panels as `u32`, followed by
//! `(re, im, err)` as three `f64` for each node.

use num_complex::Complex64;
use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::RwLock;

use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"TMZC\x00\x00\x00\x02";
const HEADER: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct BlockKey {
    u0: u64,
    du: u64,
    nodes: u32,
    panels: u32,
}

impl BlockKey {
    pub(crate) fn new(u0: f64, du: f64, nodes: usize, panels: usize) -> Self {
        BlockKey {
            u0: u0.to_bits(),
            du: du.to_bits(),
            nodes: nodes as u32,
            panels: panels as u32,
        }
    }

    fn len(&self) -> usize {
        self.nodes as usize * self.panels as usize
    }

    fn order(&self) -> (f64, f64, u32, u32) {
        (f64::from_bits(self.u0), f64::from_bits(self.du), self.nodes, self.panels)
    }
}

/// Concurrent ζ cache; reads share a lock, writes are whole blocks.
#[derive(Debug, Default)]
pub struct ZetaCache {
    map: RwLock<HashMap<BlockKey, Vec<(Complex64, f64)>>>,
    path: Option<PathBuf>,
    dirty: AtomicBool,
}

fn read_f64(b: &[u8], o: usize) -> f64 {
    f64::from_le_bytes(b[o..o + 8].try_into().unwrap())
}

fn read_u32(b: &[u8], o: usize) -> u32 {
    u32::from_le_bytes(b[o..o + 4].try_into().unwrap())
}

impl ZetaCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens `path`, starting empty if the file does not exist.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut map = HashMap::new();
        if path.exists() {
            let bytes = fs::read(&path)?;
            let bad = |what: String| Error::CacheFormat(format!("{}: {what}", path.display()));
            if bytes.len() < 16 || &bytes[..8] != MAGIC {
                return Err(bad("bad header".into()));
            }
            let n = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
            let mut o = 16;
            for i in 0..n {
                if o + HEADER > bytes.len() {
                    return Err(bad(format!("truncated at block {i}")));
                }
                let key = BlockKey {
                    u0: read_f64(&bytes, o).to_bits(),
                    du: read_f64(&bytes, o + 8).to_bits(),
                    nodes: read_u32(&bytes, o + 16),
                    panels: read_u32(&bytes, o + 20),
                };
                o += HEADER;
                let end = o + key.len() * 24;
                if end > bytes.len() {
                    return Err(bad(format!("truncated at block {i}")));
                }
                let vals: Vec<(Complex64, f64)> = bytes[o..end]
                    .chunks_exact(24)
                    .map(|c| (Complex64::new(read_f64(c, 0), read_f64(c, 8)), read_f64(c, 16)))
                    .collect();
                if vals.iter().any(|(v, e)| !(v.re.is_finite() && v.im.is_finite() && *e >= 0.0)) {
                    return Err(bad(format!("block {i} holds invalid values")));
                }
                map.insert(key, vals);
                o = end;
            }
            if o != bytes.len() {
                return Err(bad("trailing bytes".into()));
            }
        }
        Ok(ZetaCache {
            map: RwLock::new(map),
            path: Some(path),
            dirty: AtomicBool::new(false),
        })
    }

    /// Number of cached nodes.
    pub fn len(&self) -> usize {
        self.map.read().unwrap().values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The block's values, or `None` if absent or computed to a looser
    /// tolerance than `tol`.
    pub(crate) fn get(&self, key: &BlockKey, tol: f64) -> Option<Vec<(Complex64, f64)>> {
        let map = self.map.read().unwrap();
        map.get(key).filter(|v| v.iter().all(|p| p.1 <= tol)).cloned()
    }

    pub(crate) fn insert(&self, key: BlockKey, vals: Vec<(Complex64, f64)>) {
        debug_assert_eq!(vals.len(), key.len());
        self.map.write().unwrap().insert(key, vals);
        self.dirty.store(true, Ordering::Relaxed);
    }

    /// Writes the cache atomically if anything was added since it was
    /// opened; a no-op for in-memory caches.
    pub fn save(&self) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        if !self.dirty.load(Ordering::Relaxed) && path.exists() {
            return Ok(());
        }
        let map = self.map.read().unwrap();
        let mut keys: Vec<&BlockKey> = map.keys().collect();
        keys.sort_by(|a, b| a.order().partial_cmp(&b.order()).unwrap());
        let nodes: usize = map.values().map(Vec::len).sum();
        let mut buf = Vec::with_capacity(16 + keys.len() * HEADER + nodes * 24);
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&(keys.len() as u64).to_le_bytes());
        for k in keys {
            buf.extend_from_slice(&k.u0.to_le_bytes());
            buf.extend_from_slice(&k.du.to_le_bytes());
            buf.extend_from_slice(&k.nodes.to_le_bytes());
            buf.extend_from_slice(&k.panels.to_le_bytes());
            for (v, e) in &map[k] {
                for x in [v.re, v.im, *e] {
                    buf.extend_from_slice(&x.to_le_bytes());
                }
            }
        }
        let tmp = path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&buf)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        self.dirty.store(false, Ordering::Relaxed);
        Ok(())
    }
}
