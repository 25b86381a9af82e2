//! CSV ingestion and emission for profiles and mating edges.
//!
//! Profiles: header `user_id,gender,age,height,education,income`, gender is
//! `F` or `M`, an empty cell means the property is absent.
//! Matings: header `user_a,user_b`.

use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::Gender;

use super::{MatingEdge, Profile, ProfileTable, Property};

#[derive(Debug, Deserialize)]
struct ProfileRow {
    user_id: String,
    gender: String,
    age: Option<f64>,
    height: Option<f64>,
    education: Option<f64>,
    income: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct MatingRow {
    user_a: String,
    user_b: String,
}

fn row_line(err: &csv::Error, fallback: u64) -> u64 {
    err.position().map(|p| p.line()).unwrap_or(fallback)
}

pub fn load_profiles(path: impl AsRef<Path>) -> Result<ProfileTable> {
    load_profiles_from_reader(File::open(path.as_ref())?)
}

pub fn load_profiles_from_reader<R: Read>(reader: R) -> Result<ProfileTable> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    let mut table = ProfileTable::new();
    for (i, row) in csv_reader.deserialize::<ProfileRow>().enumerate() {
        // Header is line 1, first record line 2.
        let line = i as u64 + 2;
        let row = row.map_err(|e| Error::MalformedRow {
            line: row_line(&e, line),
            reason: strip_csv_prefix(&e),
        })?;
        let gender = match row.gender.as_str() {
            "F" => Gender::Female,
            "M" => Gender::Male,
            other => {
                return Err(Error::UnknownGenderCode {
                    code: other.to_string(),
                    line,
                })
            }
        };
        let mut profile = Profile::new(row.user_id, gender);
        for (property, value) in [
            (Property::Age, row.age),
            (Property::Height, row.height),
            (Property::Education, row.education),
            (Property::Income, row.income),
        ] {
            if let Some(v) = value {
                if !v.is_finite() {
                    return Err(Error::MalformedRow {
                        line,
                        reason: format!("{property} value {v} is not finite"),
                    });
                }
            }
            profile.set_value(property, value);
        }
        table.push(profile)?;
    }
    Ok(table)
}

/// Load mating edges, validating both endpoints against the profile table.
/// Duplicate pairs (in either order) collapse to a single edge; the first
/// occurrence's order is kept.
pub fn load_matings(path: impl AsRef<Path>, profiles: &ProfileTable) -> Result<Vec<MatingEdge>> {
    load_matings_from_reader(File::open(path.as_ref())?, profiles)
}

pub fn load_matings_from_reader<R: Read>(
    reader: R,
    profiles: &ProfileTable,
) -> Result<Vec<MatingEdge>> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut edges = Vec::new();
    for (i, row) in csv_reader.deserialize::<MatingRow>().enumerate() {
        let line = i as u64 + 2;
        let row = row.map_err(|e| Error::MalformedRow {
            line: row_line(&e, line),
            reason: strip_csv_prefix(&e),
        })?;
        let a = profiles
            .index_of(&row.user_a)
            .ok_or_else(|| Error::UnknownUserId(row.user_a.clone()))?;
        let b = profiles
            .index_of(&row.user_b)
            .ok_or_else(|| Error::UnknownUserId(row.user_b.clone()))?;
        if a == b {
            return Err(Error::SelfEdge(row.user_a));
        }
        if profiles.get(a).gender == profiles.get(b).gender {
            return Err(Error::SameGenderEdge(row.user_a, row.user_b));
        }
        if seen.insert((a.min(b), a.max(b))) {
            edges.push(MatingEdge {
                user_a: row.user_a,
                user_b: row.user_b,
            });
        }
    }
    Ok(edges)
}

/// csv::Error Display repeats the position; keep just the cause.
fn strip_csv_prefix(err: &csv::Error) -> String {
    let text = err.to_string();
    match text.split_once(": ") {
        Some((head, tail)) if head.starts_with("CSV") || head.contains("record") => {
            tail.to_string()
        }
        _ => text,
    }
}

pub fn write_profiles_csv<W: Write>(table: &ProfileTable, mut w: W) -> Result<()> {
    writeln!(w, "user_id,gender,age,height,education,income")?;
    for profile in table.iter() {
        let gender = match profile.gender {
            Gender::Female => "F",
            Gender::Male => "M",
        };
        let cell = |p: Property| match profile.value(p) {
            Some(v) => format!("{v:.6}"),
            None => String::new(),
        };
        writeln!(
            w,
            "{},{},{},{},{},{}",
            profile.user_id,
            gender,
            cell(Property::Age),
            cell(Property::Height),
            cell(Property::Education),
            cell(Property::Income),
        )?;
    }
    Ok(())
}

pub fn write_matings_csv<W: Write>(edges: &[MatingEdge], mut w: W) -> Result<()> {
    writeln!(w, "user_a,user_b")?;
    for edge in edges {
        writeln!(w, "{},{}", edge.user_a, edge.user_b)?;
    }
    Ok(())
}
