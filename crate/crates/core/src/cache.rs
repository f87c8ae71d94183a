//! On-disk cache of computed payloads.
//!
//! Each entry is one file: a short text header naming the schema version,
//! operation, parameters and a SHA-256 of the payload, then the payload.
//! Writes go to a temporary file that is renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
const MAGIC: &str = "jd-cache";
const SUFFIX: &str = "jdc";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub version: u32,
    pub op: String,
    /// Canonical one-line parameter string.
    pub params: String,
    pub digest: String,
}

impl CacheKey {
    pub fn new(op: &str, params: &str) -> CacheKey {
        let params = params.split_whitespace().collect::<Vec<_>>().join(" ");
        let digest = sha256_hex(format!("{SCHEMA_VERSION}\n{op}\n{params}").as_bytes());
        CacheKey { version: SCHEMA_VERSION, op: op.to_string(), params, digest }
    }

    pub fn file_name(&self) -> String {
        format!("{}-{}.{SUFFIX}", self.op, &self.digest[..24])
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub file: String,
    pub op: String,
    pub params: String,
    pub bytes: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub ok: Vec<String>,
    /// Corrupted entries, already removed so the next run rebuilds them.
    pub removed: Vec<(String, String)>,
}

impl VerifyOutcome {
    pub fn clean(&self) -> bool {
        self.removed.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

fn encode(key: &CacheKey, payload: &str) -> String {
    format!(
        "{MAGIC} v{}\nop: {}\nparams: {}\nkey: {}\nsha256: {}\nlength: {}\n\n{payload}",
        key.version,
        key.op,
        key.params,
        key.digest,
        sha256_hex(payload.as_bytes()),
        payload.len()
    )
}

struct Decoded {
    op: String,
    params: String,
    key: String,
    payload: String,
}

fn decode(text: &str) -> std::result::Result<Decoded, String> {
    let (head, payload) = text.split_once("\n\n").ok_or("missing header terminator")?;
    let mut lines = head.lines();
    let magic = lines.next().ok_or("empty file")?;
    if magic != format!("{MAGIC} v{SCHEMA_VERSION}") {
        return Err(format!("unknown header {magic:?}"));
    }
    let mut field = |name: &str| -> std::result::Result<String, String> {
        let line = lines.next().ok_or(format!("missing {name}"))?;
        line.strip_prefix(&format!("{name}: ")).map(str::to_string).ok_or(format!("expected {name}, found {line:?}"))
    };
    let op = field("op")?;
    let params = field("params")?;
    let key = field("key")?;
    let sum = field("sha256")?;
    let len: usize = field("length")?.parse().map_err(|_| "bad length".to_string())?;
    if payload.len() != len {
        return Err(format!("payload has {} bytes, header says {len}", payload.len()));
    }
    if sha256_hex(payload.as_bytes()) != sum {
        return Err("checksum mismatch".into());
    }
    if CacheKey::new(&op, &params).digest != key {
        return Err("key does not match its parameters".into());
    }
    Ok(Decoded { op, params, key, payload: payload.to_string() })
}

impl Cache {
    pub fn open(dir: impl AsRef<Path>) -> Result<Cache> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(|e| Error::Cache(format!("{}: {e}", dir.display())))?;
        Ok(Cache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    /// The stored payload, or `None` on a miss. A corrupted entry is
    /// removed and reported as a miss.
    pub fn get(&self, key: &CacheKey) -> Result<Option<String>> {
        let path = self.path(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::Cache(format!("{}: {e}", path.display()))),
        };
        match decode(&text) {
            Ok(d) if d.key == key.digest => Ok(Some(d.payload)),
            _ => {
                fs::remove_file(&path).ok();
                Ok(None)
            }
        }
    }

    pub fn put(&self, key: &CacheKey, payload: &str) -> Result<()> {
        let path = self.path(key);
        let tmp = self.dir.join(format!(".{}.{}.tmp", key.file_name(), std::process::id()));
        let write = || -> std::io::Result<()> {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(encode(key, payload).as_bytes())?;
            f.sync_all()?;
            fs::rename(&tmp, &path)
        };
        write().map_err(|e| {
            fs::remove_file(&tmp).ok();
            Error::Cache(format!("{}: {e}", path.display()))
        })
    }

    /// Looks `key` up, computing and storing the payload on a miss.
    /// Returns the payload and whether it came from disk.
    pub fn get_or_compute(&self, key: &CacheKey, f: impl FnOnce() -> Result<String>) -> Result<(String, bool)> {
        if let Some(p) = self.get(key)? {
            return Ok((p, true));
        }
        let p = f()?;
        self.put(key, &p)?;
        Ok((p, false))
    }

    fn files(&self) -> Result<Vec<PathBuf>> {
        let mut out = Vec::new();
        let rd = fs::read_dir(&self.dir).map_err(|e| Error::Cache(format!("{}: {e}", self.dir.display())))?;
        for e in rd {
            let p = e?.path();
            if p.extension().and_then(|x| x.to_str()) == Some(SUFFIX) {
                out.push(p);
            }
        }
        out.sort();
        Ok(out)
    }

    pub fn list(&self) -> Result<Vec<Entry>> {
        let mut out = Vec::new();
        for p in self.files()? {
            let text = fs::read_to_string(&p).unwrap_or_default();
            let file = p.file_name().and_then(|x| x.to_str()).unwrap_or_default().to_string();
            let (op, params) = match decode(&text) {
                Ok(d) => (d.op, d.params),
                Err(e) => ("?".to_string(), format!("unreadable: {e}")),
            };
            out.push(Entry { file, op, params, bytes: text.len() });
        }
        Ok(out)
    }

    /// Removes every entry; returns how many were removed.
    pub fn clear(&self) -> Result<usize> {
        let files = self.files()?;
        for p in &files {
            fs::remove_file(p)?;
        }
        Ok(files.len())
    }

    /// Checks headers and checksums, removing any entry that fails.
    pub fn verify(&self) -> Result<VerifyOutcome> {
        let mut out = VerifyOutcome::default();
        for p in self.files()? {
            let file = p.file_name().and_then(|x| x.to_str()).unwrap_or_default().to_string();
            let problem = match fs::read_to_string(&p) {
                Ok(text) => match decode(&text) {
                    Ok(d) if CacheKey::new(&d.op, &d.params).file_name() == file => None,
                    Ok(_) => Some("file name does not match its key".to_string()),
                    Err(e) => Some(e),
                },
                Err(e) => Some(e.to_string()),
            };
            match problem {
                None => out.ok.push(file),
                Some(e) => {
                    fs::remove_file(&p)?;
                    out.removed.push((file, e));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_hit() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::open(dir.path()).unwrap();
        let k = CacheKey::new("pairing", "n=2  sigma=1");
        assert_eq!(k.params, "n=2 sigma=1");
        let (p, hit) = c.get_or_compute(&k, || Ok("payload\n".into())).unwrap();
        assert!(!hit);
        let (q, hit) = c.get_or_compute(&k, || unreachable!()).unwrap();
        assert!(hit);
        assert_eq!(p, q);
        assert_eq!(c.list().unwrap().len(), 1);
        assert!(c.verify().unwrap().clean());
    }

    #[test]
    fn corruption_is_detected_and_removed() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::open(dir.path()).unwrap();
        let k = CacheKey::new("dims", "x");
        c.put(&k, "12345").unwrap();
        let path = dir.path().join(k.file_name());
        let text = fs::read_to_string(&path).unwrap().replace("12345", "12346");
        fs::write(&path, text).unwrap();
        let v = c.verify().unwrap();
        assert_eq!(v.removed.len(), 1);
        assert!(c.get(&k).unwrap().is_none());
    }

    #[test]
    fn keys_depend_on_all_parts() {
        let a = CacheKey::new("a", "p");
        assert_ne!(a.digest, CacheKey::new("b", "p").digest);
        assert_ne!(a.digest, CacheKey::new("a", "q").digest);
        assert_eq!(a, CacheKey::new("a", " p "));
    }

    #[test]
    fn clear_empties_the_directory() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::open(dir.path()).unwrap();
        c.put(&CacheKey::new("a", "1"), "x").unwrap();
        c.put(&CacheKey::new("a", "2"), "y").unwrap();
        assert_eq!(c.clear().unwrap(), 2);
        assert!(c.list().unwrap().is_empty());
    }
}
