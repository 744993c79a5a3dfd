use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pol {
    H,
    V,
}

impl Pol {
    pub const BOTH: [Pol; 2] = [Pol::H, Pol::V];

    fn offset(self) -> usize {
        match self {
            Pol::H => 0,
            Pol::V => 1,
        }
    }
}

/// One optical mode: a spatial rail and a polarization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mode {
    pub spatial: String,
    pub pol: Pol,
}

impl Mode {
    pub fn new(spatial: impl Into<String>, pol: Pol) -> Self {
        Self {
            spatial: spatial.into(),
            pol,
        }
    }

    pub fn h(spatial: impl Into<String>) -> Self {
        Self::new(spatial, Pol::H)
    }

    pub fn v(spatial: impl Into<String>) -> Self {
        Self::new(spatial, Pol::V)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.pol, self.spatial)
    }
}

/// Ordered set of spatial rails; every rail carries an H and a V mode.
///
/// Mode `(rail r, pol p)` has index `2r + p`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModeRegistry {
    rails: Vec<String>,
    index: HashMap<String, usize>,
}

impl ModeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_rails<I, S>(rails: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut reg = Self::new();
        for r in rails {
            reg.add_rail(r)?;
        }
        Ok(reg)
    }

    /// Registers a rail, rejecting duplicates.
    pub fn add_rail(&mut self, label: impl Into<String>) -> Result<usize> {
        let label = label.into();
        if self.index.contains_key(&label) {
            return Err(Error::InvalidArgument(format!("rail {label} registered twice")));
        }
        let id = self.rails.len();
        self.index.insert(label.clone(), id);
        self.rails.push(label);
        Ok(id)
    }

    /// Registers the rail unless it already exists.
    pub fn ensure_rail(&mut self, label: &str) -> usize {
        match self.index.get(label) {
            Some(&id) => id,
            None => self.add_rail(label).expect("absent label"),
        }
    }

    pub fn rails(&self) -> &[String] {
        &self.rails
    }

    pub fn has_rail(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn rail_index(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownMode(label.to_string()))
    }

    pub fn num_modes(&self) -> usize {
        2 * self.rails.len()
    }

    pub fn mode_index(&self, mode: &Mode) -> Result<usize> {
        Ok(2 * self.rail_index(&mode.spatial)? + mode.pol.offset())
    }

    pub fn index_of(&self, spatial: &str, pol: Pol) -> Result<usize> {
        Ok(2 * self.rail_index(spatial)? + pol.offset())
    }

    pub fn mode(&self, index: usize) -> Mode {
        let pol = if index.is_multiple_of(2) { Pol::H } else { Pol::V };
        Mode::new(self.rails[index / 2].clone(), pol)
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        (0..self.num_modes()).map(|i| self.mode(i))
    }
}
