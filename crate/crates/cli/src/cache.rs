//! Persisted results of the enumeration-heavy commands, one JSON file per key.
//!
//! Writers go through a temporary file in the same directory followed by a rename, so readers
//! only ever observe complete files. Unreadable entries are treated as misses and rewritten.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;

pub const ENV_VAR: &str = "AFFINE_HECKE_CACHE_DIR";

#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Cache {
        Cache { dir }
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        let name: String = key
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
            .collect();
        self.dir.as_ref().map(|d| d.join(format!("{name}.json")))
    }

    pub fn get(&self, key: &str) -> Option<Value> {
        let p = self.path(key)?;
        let text = fs::read_to_string(p).ok()?;
        let entry: Value = serde_json::from_str(&text).ok()?;
        (entry.get("key")?.as_str()? == key).then(|| entry.get("value").cloned()).flatten()
    }

    pub fn put(&self, key: &str, value: &Value) -> std::io::Result<()> {
        let Some(p) = self.path(key) else { return Ok(()) };
        let dir = p.parent().expect("cache file has a parent");
        fs::create_dir_all(dir)?;
        let entry = serde_json::json!({ "key": key, "value": value });
        write_atomic(dir, &p, serde_json::to_string(&entry)?.as_bytes())
    }

    /// Cached value for `key`, computing and storing it on a miss.
    pub fn get_or_compute<E>(&self, key: &str, compute: impl FnOnce() -> Result<Value, E>) -> Result<Value, E> {
        if let Some(v) = self.get(key) {
            return Ok(v);
        }
        let v = compute()?;
        // A failed write only costs a recomputation next time.
        let _ = self.put(key, &v);
        Ok(v)
    }
}

fn write_atomic(dir: &Path, target: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        target.file_name().and_then(|s| s.to_str()).unwrap_or("entry"),
        std::process::id()
    ));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    drop(f);
    fs::rename(&tmp, target).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })
}
