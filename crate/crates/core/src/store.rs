//! Flat JSON directory of named entities.
//!
//! Each entity lives in `<root>/<name>.<kind>.json`. Run artifacts
//! (snapshots, reports) go in `<root>/<name>.run/`. The store assumes a
//! single writer.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// Environment variable naming the store root.
pub const STORE_ENV: &str = "AQO_STORE";
pub const DEFAULT_ROOT: &str = "aqo-store";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntityKind {
    Problem,
    Processor,
    Embedding,
    Program,
    Result,
    Solution,
}

impl EntityKind {
    pub const ALL: [EntityKind; 6] = [
        EntityKind::Problem,
        EntityKind::Processor,
        EntityKind::Embedding,
        EntityKind::Program,
        EntityKind::Result,
        EntityKind::Solution,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Problem => "problem",
            EntityKind::Processor => "processor",
            EntityKind::Embedding => "embedding",
            EntityKind::Program => "program",
            EntityKind::Result => "result",
            EntityKind::Solution => "solution",
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct EntityStore {
    root: PathBuf,
}

fn check_name(name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && !name.starts_with('.')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if ok {
        Ok(())
    } else {
        Err(Error::Store(format!(
            "invalid entity name '{name}' (letters, digits, '_', '-', '.' only)"
        )))
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json_text<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Writes through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

impl EntityStore {
    /// Opens (creating if needed) a store at `root`.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self { root })
    }

    /// Root from an explicit path, else `$AQO_STORE`, else `./aqo-store`.
    pub fn from_env(explicit: Option<&Path>) -> Result<Self> {
        match explicit {
            Some(p) => Self::open(p),
            None => Self::open(std::env::var_os(STORE_ENV).map_or_else(|| PathBuf::from(DEFAULT_ROOT), PathBuf::from)),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, kind: EntityKind, name: &str) -> Result<PathBuf> {
        check_name(name)?;
        Ok(self.root.join(format!("{name}.{kind}.json")))
    }

    pub fn exists(&self, kind: EntityKind, name: &str) -> bool {
        self.path(kind, name).map(|p| p.is_file()).unwrap_or(false)
    }

    pub fn save<T: Serialize>(&self, kind: EntityKind, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.path(kind, name)?;
        write_atomic(&path, &to_json_text(value)?)?;
        Ok(path)
    }

    pub fn load<T: DeserializeOwned>(&self, kind: EntityKind, name: &str) -> Result<T> {
        let path = self.path(kind, name)?;
        let text = fs::read_to_string(&path)
            .map_err(|e| Error::Store(format!("cannot read {kind} '{name}' ({}): {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Store(format!("{kind} '{name}' is malformed: {e}")))
    }

    /// Names of stored entities of one kind, sorted.
    pub fn list(&self, kind: EntityKind) -> Result<Vec<String>> {
        let suffix = format!(".{kind}.json");
        let mut names: Vec<String> = fs::read_dir(&self.root)?
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().to_str().and_then(|f| f.strip_suffix(&suffix)).map(String::from))
            .collect();
        names.sort();
        Ok(names)
    }

    /// Directory for the artifacts of run `name`, created empty of stale
    /// snapshots.
    pub fn run_dir(&self, name: &str) -> Result<PathBuf> {
        check_name(name)?;
        let dir = self.root.join(format!("{name}.run"));
        fs::create_dir_all(&dir)?;
        for entry in fs::read_dir(&dir)? {
            let path = entry?.path();
            let stale = path
                .file_name()
                .and_then(|f| f.to_str())
                .is_some_and(|f| f.starts_with("snapshot_") && f.ends_with(".json"));
            if stale {
                fs::remove_file(path)?;
            }
        }
        Ok(dir)
    }
}
