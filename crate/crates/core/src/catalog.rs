//! The tabulated certificates: 5 maximally unipotent `Sp(6)` groups,
//! 12 further `Sp(6)` groups and 2 `Sp(4)` groups, each with its word.
//!
//! The data ships as `data/catalog.json`. Rationals are `"p/q"` strings.
//! Row C-42 is printed with `β` ending in `1/12`, which is not Galois-stable;
//! it is flagged `suspect` and carries the reading ending in `11/12`.

use std::collections::HashSet;
use std::path::Path;
use std::sync::OnceLock;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::Certificate;
use crate::group::{build_group, parse_word, GroupError, GroupPresentation, WordError};
use crate::params::ParamTuple;

/// Environment variable naming a catalog file to use instead of the
/// embedded one.
pub const CATALOG_ENV: &str = "HGP_CATALOG";

const EMBEDDED: &str = include_str!("../data/catalog.json");

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown catalog label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate catalog label `{0}`")]
    DuplicateLabel(String),
    #[error("catalog entry `{label}`: {problem}")]
    InvalidEntry { label: String, problem: String },
    #[error("catalog file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("reading catalog file: {0}")]
    Io(#[from] std::io::Error),
    #[error("catalog entry `{label}`: {source}")]
    Group { label: String, source: GroupError },
    #[error("catalog entry `{label}`: {source}")]
    Word { label: String, source: WordError },
}

fn is_false(b: &bool) -> bool {
    !b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub label: String,
    pub table: u8,
    pub alpha: ParamTuple,
    pub beta: ParamTuple,
    pub word: String,
    #[serde(default, skip_serializing_if = "is_false")]
    pub suspect: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrected_beta: Option<ParamTuple>,
}

/// A catalog row turned into a concrete group.
#[derive(Debug, Clone)]
pub struct ResolvedEntry {
    pub group: GroupPresentation,
    pub certificate: Certificate,
    /// True when the printed `β` was rejected and the corrected one used.
    pub used_corrected_beta: bool,
}

impl CatalogEntry {
    /// Builds the group from the printed parameters, falling back to the
    /// corrected `β` for suspect rows whose printed value is rejected.
    pub fn resolve(&self) -> Result<ResolvedEntry, CatalogError> {
        let group_err = |source| CatalogError::Group {
            label: self.label.clone(),
            source,
        };
        let (group, used_corrected_beta) = match build_group(&self.alpha, &self.beta) {
            Ok(g) => (g, false),
            Err(e) => match (&self.corrected_beta, self.suspect) {
                (Some(beta), true) => (build_group(&self.alpha, beta).map_err(group_err)?, true),
                _ => return Err(group_err(e)),
            },
        };
        let certificate = Certificate::new(
            group.alpha.clone(),
            group.beta.clone(),
            &self.word,
            Some(self.label.clone()),
        )
        .map_err(|source| CatalogError::Word {
            label: self.label.clone(),
            source,
        })?;
        Ok(ResolvedEntry {
            group,
            certificate,
            used_corrected_beta,
        })
    }

    fn validate(&self) -> Result<(), CatalogError> {
        let invalid = |problem: &str| CatalogError::InvalidEntry {
            label: self.label.clone(),
            problem: problem.to_string(),
        };
        let expected_len = match self.table {
            1 | 2 => 6,
            3 => 4,
            _ => return Err(invalid("table must be 1, 2 or 3")),
        };
        if self.alpha.len() != expected_len || self.beta.len() != expected_len {
            return Err(invalid("parameter length does not match its table"));
        }
        if self.table == 1 && !self.alpha.entries().iter().all(Zero::is_zero) {
            return Err(invalid("table 1 rows have alpha = 0"));
        }
        parse_word(&self.word).map_err(|source| CatalogError::Word {
            label: self.label.clone(),
            source,
        })?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn from_json(text: &str) -> Result<Self, CatalogError> {
        let entries: Vec<CatalogEntry> = serde_json::from_str(text)?;
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert(e.label.as_str()) {
                return Err(CatalogError::DuplicateLabel(e.label.clone()));
            }
            e.validate()?;
        }
        Ok(Self { entries })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries).expect("catalog serializes")
    }

    pub fn embedded() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(|| Catalog::from_json(EMBEDDED).expect("embedded catalog is valid"))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CatalogError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// The file named by `HGP_CATALOG`, or the embedded catalog.
    pub fn from_env() -> Result<Self, CatalogError> {
        match std::env::var_os(CATALOG_ENV) {
            Some(path) => Self::load(path),
            None => Ok(Self::embedded().clone()),
        }
    }

    pub fn lookup(&self, label: &str) -> Result<&CatalogEntry, CatalogError> {
        self.entries
            .iter()
            .find(|e| e.label == label)
            .ok_or_else(|| CatalogError::UnknownLabel(label.to_string()))
    }

    /// All entries in table order.
    pub fn list_all(&self) -> &[CatalogEntry] {
        &self.entries
    }
}

pub fn lookup(label: &str) -> Result<&'static CatalogEntry, CatalogError> {
    Catalog::embedded().lookup(label)
}

pub fn list_all() -> &'static [CatalogEntry] {
    Catalog::embedded().list_all()
}
