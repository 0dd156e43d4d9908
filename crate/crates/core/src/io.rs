//! Set files: `{"elements": ["0", "4", "9/2", ...]}` with canonical rationals.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::convex::{ConvexError, ConvexSet};
use crate::rational::Rational;

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Convex {
        path: PathBuf,
        #[source]
        source: ConvexError,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetFile {
    elements: Vec<Rational>,
}

/// Pretty JSON with a trailing newline; the only JSON layout the crate writes.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn set_to_json(set: &ConvexSet) -> String {
    to_json(&SetFile {
        elements: set.elements().to_vec(),
    })
}

pub fn parse_set(text: &str, path: &Path) -> Result<ConvexSet, FileError> {
    let file: SetFile = serde_json::from_str(text).map_err(|source| FileError::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    ConvexSet::validate(file.elements).map_err(|source| FileError::Convex {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_set_file(path: &Path) -> Result<ConvexSet, FileError> {
    let text = read_text(path)?;
    parse_set(&text, path)
}

pub fn read_text(path: &Path) -> Result<String, FileError> {
    fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FileError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| FileError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })
}
