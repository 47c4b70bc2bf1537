//! Persistent JSON cache for walk orbits, stabilizer generators and
//! strong-class results, keyed by a format version stamp so stale files
//! are recomputed rather than trusted.

use crate::chambers::SigmaOrbit;
use crate::error::{Error, Result};
use crate::matrix::Mat;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

/// Bump when any cached payload changes shape or semantics.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format_version: u32,
    fingerprint: String,
    #[serde(flatten)]
    payload: T,
}

/// Content fingerprint of the fixed inputs (the basis Gram matrix).
pub fn fingerprint() -> String {
    let gram = crate::chambers::e10_gram();
    let json = serde_json::to_string(&gram).expect("serialize");
    // tiny stable hash; this guards against accidental reuse, not tampering
    let mut h: u64 = 0xcbf29ce484222325;
    for b in json.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl AsRef<Path>) -> Result<Cache> {
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(root.join("sigma"))
            .and_then(|_| fs::create_dir_all(root.join("stab")))
            .and_then(|_| fs::create_dir_all(root.join("strong")))
            .map_err(|e| Error::Invalid(format!("cache dir: {e}")))?;
        Ok(Cache { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn store<T: Serialize>(&self, rel: &str, payload: &T) -> Result<()> {
        let env = Envelope {
            format_version: FORMAT_VERSION,
            fingerprint: fingerprint(),
            payload,
        };
        let body = serde_json::to_string(&env).map_err(|e| Error::Invalid(e.to_string()))?;
        let path = self.root.join(rel);
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, body).map_err(|e| Error::Invalid(format!("cache write: {e}")))?;
        fs::rename(&tmp, &path).map_err(|e| Error::Invalid(format!("cache move: {e}")))?;
        Ok(())
    }

    fn load<T: DeserializeOwned>(&self, rel: &str) -> Option<T> {
        let body = fs::read_to_string(self.root.join(rel)).ok()?;
        let env: Envelope<T> = serde_json::from_str(&body).ok()?;
        if env.format_version != FORMAT_VERSION || env.fingerprint != fingerprint() {
            return None;
        }
        Some(env.payload)
    }

    pub fn store_sigma(&self, orbit: &SigmaOrbitFile) -> Result<()> {
        self.store(&format!("sigma/{:04}.json", orbit.sigma), orbit)
    }

    pub fn load_sigma(&self, sigma: u16) -> Option<SigmaOrbitFile> {
        self.load(&format!("sigma/{sigma:04}.json"))
    }

    pub fn store_stab(&self, stab: &StabFile) -> Result<()> {
        self.store(&format!("stab/{}.json", sanitize(&stab.class_key)), stab)
    }

    pub fn load_stab(&self, class_key: &str) -> Option<StabFile> {
        self.load(&format!("stab/{}.json", sanitize(class_key)))
    }

    pub fn store_strong(&self, s: &StrongFile) -> Result<()> {
        self.store(&format!("strong/{}.json", sanitize(&s.class_key)), s)
    }

    pub fn load_strong(&self, class_key: &str) -> Option<StrongFile> {
        self.load(&format!("strong/{}.json", sanitize(class_key)))
    }

    pub fn write_text(&self, rel: &str, body: &str) -> Result<()> {
        fs::write(self.root.join(rel), body).map_err(|e| Error::Invalid(format!("write: {e}")))
    }
}

fn sanitize(key: &str) -> String {
    key.replace('/', "_in_").replace('+', "p")
}

/// Walk result of one subset: its class members and closing isometries.
#[derive(Serialize, Deserialize, Clone)]
pub struct SigmaOrbitFile {
    pub sigma: u16,
    pub class: Vec<u16>,
    pub gens: Vec<Mat>,
}

impl From<&SigmaOrbit> for SigmaOrbitFile {
    fn from(o: &SigmaOrbit) -> Self {
        SigmaOrbitFile {
            sigma: o.sigma.0,
            class: o.class.iter().map(|s| s.0).collect(),
            gens: o.gens.clone(),
        }
    }
}

/// Stabilizer generators of a configuration class.
#[derive(Serialize, Deserialize, Clone)]
pub struct StabFile {
    pub class_key: String,
    pub order_if_finite: Option<String>,
    pub gens: Vec<Mat>,
}

/// Strong classes of one configuration class.
#[derive(Serialize, Deserialize, Clone)]
pub struct StrongFile {
    pub class_key: String,
    pub q_labels: Vec<String>,
    pub grams: Vec<Mat>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_version_guard() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path()).unwrap();
        let f = StabFile {
            class_key: "2A1+2A3/E8".into(),
            order_if_finite: None,
            gens: vec![Mat::identity(3)],
        };
        cache.store_stab(&f).unwrap();
        let back = cache.load_stab("2A1+2A3/E8").unwrap();
        assert_eq!(back.gens, f.gens);
        assert!(cache.load_stab("missing/key").is_none());

        // corrupt the version stamp: the entry is ignored
        let path = dir.path().join("stab").join(format!("{}.json", "2A1p2A3_in_E8"));
        let body = std::fs::read_to_string(&path).unwrap();
        let tampered = body.replace("\"format_version\":1", "\"format_version\":0");
        std::fs::write(&path, tampered).unwrap();
        assert!(cache.load_stab("2A1+2A3/E8").is_none());
    }
}
