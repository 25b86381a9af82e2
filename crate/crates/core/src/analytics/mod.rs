//! Ingestion of profile/mating-edge data, per-property preferred-difference
//! tables, the per-property comparison report, and a synthetic-data generator
//! with exact per-user ground truth for pipeline verification.

mod ingest;
mod report;
mod synthetic;

pub use ingest::{
    load_matings, load_matings_from_reader, load_profiles, load_profiles_from_reader,
    write_matings_csv, write_profiles_csv,
};
pub use report::{
    analyze_property, preferred_difference_table, property_report, write_report_csv, DiffRecord,
    DiffTable, PropertyAnalysis, StatsRow,
};
pub use synthetic::{generate_synthetic, DeltaSpec, PropertySpec, SyntheticData, SyntheticSpec};

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::Gender;

/// The profile properties carried by the ingestion format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    Age,
    Height,
    Education,
    Income,
}

impl Property {
    pub const ALL: [Property; 4] = [
        Property::Age,
        Property::Height,
        Property::Education,
        Property::Income,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Property::Age => "age",
            Property::Height => "height",
            Property::Education => "education",
            Property::Income => "income",
        }
    }

    /// Default histogram bin width: one natural unit of the property
    /// (1 year, 1 cm, 1 ordinal bin).
    pub fn default_bin_width(self) -> f64 {
        1.0
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Property> {
        Property::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::UnknownProperty {
                name: s.to_string(),
                known: Property::ALL.map(|p| p.as_str()).join(", "),
            })
    }
}

/// One ingested user record. Property values are optional; absent means the
/// user left the field empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub user_id: String,
    pub gender: Gender,
    values: [Option<f64>; 4],
}

impl Profile {
    pub fn new(user_id: String, gender: Gender) -> Profile {
        Profile {
            user_id,
            gender,
            values: [None; 4],
        }
    }

    pub fn value(&self, property: Property) -> Option<f64> {
        self.values[property.index()]
    }

    pub fn set_value(&mut self, property: Property, value: Option<f64>) {
        self.values[property.index()] = value;
    }
}

/// Validated profile table with unique user ids.
#[derive(Debug, Clone, Default)]
pub struct ProfileTable {
    profiles: Vec<Profile>,
    by_id: HashMap<String, usize>,
}

impl ProfileTable {
    pub fn new() -> ProfileTable {
        ProfileTable::default()
    }

    pub fn push(&mut self, profile: Profile) -> Result<usize> {
        if self.by_id.contains_key(&profile.user_id) {
            return Err(Error::DuplicateUserId(profile.user_id.clone()));
        }
        let idx = self.profiles.len();
        self.by_id.insert(profile.user_id.clone(), idx);
        self.profiles.push(profile);
        Ok(idx)
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn get(&self, index: usize) -> &Profile {
        &self.profiles[index]
    }

    pub fn index_of(&self, user_id: &str) -> Option<usize> {
        self.by_id.get(user_id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Profile> {
        self.profiles.iter()
    }
}

/// A reciprocal mating pair, stored as the two profile ids. Edges are
/// unordered; loaders collapse duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatingEdge {
    pub user_a: String,
    pub user_b: String,
}
