//! On-disk store of basis labels, keyed by space then degree.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::{degree_basis, monomial_label, SpaceDescriptor};
use crate::error::Result;

#[derive(Debug)]
pub struct BasisCache {
    path: PathBuf,
    entries: BTreeMap<String, BTreeMap<u32, Vec<String>>>,
    dirty: bool,
}

impl BasisCache {
    /// Opens the cache file, starting empty if it does not exist.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let entries = if path.exists() {
            serde_json::from_str(&fs::read_to_string(&path)?)?
        } else {
            BTreeMap::new()
        };
        Ok(Self {
            path,
            entries,
            dirty: false,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn lookup(&self, space: &SpaceDescriptor, t: u32) -> Option<&[String]> {
        self.entries.get(&space.to_string())?.get(&t).map(Vec::as_slice)
    }

    /// Basis labels of `H^t(space)`, computed and recorded on a miss.
    pub fn labels(&mut self, space: &SpaceDescriptor, t: u32) -> Vec<String> {
        if let Some(hit) = self.lookup(space, t) {
            return hit.to_vec();
        }
        let labels: Vec<String> = degree_basis(space, t)
            .monomials
            .iter()
            .map(|m| monomial_label(space, m))
            .collect();
        self.entries
            .entry(space.to_string())
            .or_default()
            .insert(t, labels.clone());
        self.dirty = true;
        labels
    }

    pub fn save(&mut self) -> Result<()> {
        if !self.dirty {
            return Ok(());
        }
        if let Some(dir) = self.path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        let tmp = self.path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_string_pretty(&self.entries)?)?;
        fs::rename(&tmp, &self.path)?;
        self.dirty = false;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_round_trips_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bases.json");
        let x = SpaceDescriptor::parse("K(1,2)xK(1,3)").unwrap();
        let mut cache = BasisCache::open(&path).unwrap();
        let fresh = cache.labels(&x, 6);
        assert_eq!(fresh.len(), 6);
        cache.save().unwrap();
        let reopened = BasisCache::open(&path).unwrap();
        assert_eq!(reopened.lookup(&x, 6).unwrap(), fresh.as_slice());
        assert!(reopened.lookup(&x, 7).is_none());
    }
}
