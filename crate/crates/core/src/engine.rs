//! The shared context for shortening and conjugacy: a metric oracle, the
//! constants profile, and (optionally) precomputed tables.

use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::metric::MetricOracle;
use crate::tables::{precompute, ConstantsProfile, PrecomputedTables};

#[derive(Debug)]
pub struct Engine {
    oracle: MetricOracle,
    profile: ConstantsProfile,
    tables: Option<PrecomputedTables>,
    fallback: bool,
}

/// Where [`Engine::load_or_precompute`] got its tables from.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TableSource {
    Cache,
    Built,
}

impl Engine {
    /// The metric fallback is enabled by default.
    pub fn new(group: Arc<Group>, profile: ConstantsProfile) -> Result<Self> {
        profile.validate()?;
        let oracle = MetricOracle::new(group, profile.element_budget)?;
        Ok(Engine { oracle, profile, tables: None, fallback: true })
    }

    /// Group and profile from a presentation file's text; the profile comes
    /// from its `constants` block.
    pub fn from_text(text: &str) -> Result<Self> {
        let group = Group::from_text(text)?;
        let profile = ConstantsProfile::from_constants(&group.presentation().constants)?;
        Engine::new(Arc::new(group), profile)
    }

    pub fn oracle(&self) -> &MetricOracle {
        &self.oracle
    }

    pub fn group(&self) -> &Group {
        self.oracle.group()
    }

    pub fn profile(&self) -> &ConstantsProfile {
        &self.profile
    }

    pub fn k(&self) -> usize {
        self.profile.k()
    }

    pub fn tables(&self) -> Option<&PrecomputedTables> {
        self.tables.as_ref()
    }

    pub fn require_tables(&self) -> Result<&PrecomputedTables> {
        self.tables.as_ref().ok_or(Error::MissingTables)
    }

    /// Whether short windows missing from `L5` may be resolved by direct
    /// search in the coned-off graph.
    pub fn fallback(&self) -> bool {
        self.fallback
    }

    pub fn set_fallback(&mut self, enabled: bool) {
        self.fallback = enabled;
    }

    pub fn set_tables(&mut self, tables: PrecomputedTables) -> Result<()> {
        if tables.presentation_hash != self.group().hash() || tables.profile_hash != self.profile.hash() {
            return Err(Error::Cache("tables do not match this presentation and profile".into()));
        }
        self.tables = Some(tables);
        Ok(())
    }

    pub fn precompute(&mut self) -> Result<&PrecomputedTables> {
        let tables = precompute(&self.oracle, &self.profile)?;
        Ok(self.tables.insert(tables))
    }

    /// Loads tables from `path` when it holds a cache for this presentation
    /// and profile; otherwise builds them and rewrites the cache.
    pub fn load_or_precompute(&mut self, path: &Path) -> Result<TableSource> {
        if path.exists() {
            match PrecomputedTables::load(path, &self.oracle, &self.profile) {
                Ok(t) => {
                    self.tables = Some(t);
                    return Ok(TableSource::Cache);
                }
                Err(Error::Cache(_)) | Err(Error::Io(_)) => {}
                Err(e) => return Err(e),
            }
        }
        let tables = precompute(&self.oracle, &self.profile)?;
        tables.save(path)?;
        self.tables = Some(tables);
        Ok(TableSource::Built)
    }
}
