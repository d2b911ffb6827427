//! Place-name lookup lists built from Geonames dump files.
//!
//! Reads `cities1000.txt` (kept when population >= 1000),
//! `admin1CodesASCII.txt`, `countryInfo.txt` and, when present,
//! `alternateNames.txt`. Names are case-folded. Each word of a multi-word
//! name is also indexed as a partial match.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_CITY_POPULATION: u64 = 1000;

/// Alternate-name "languages" that hold codes or links rather than names.
const NON_NAME_LANGUAGES: &[&str] = &["link", "post", "iata", "icao", "faac", "wkdt", "unlc", "fr_1793", "tcid"];

#[derive(Debug, Error)]
pub enum GazetteerError {
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{file} line {line}: {reason}")]
    Parse { file: String, line: usize, reason: String },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = GazetteerError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeoKind {
    City,
    Region,
    Country,
}

impl GeoKind {
    pub const ALL: [GeoKind; 3] = [GeoKind::City, GeoKind::Region, GeoKind::Country];

    pub fn name(self) -> &'static str {
        match self {
            GeoKind::City => "city",
            GeoKind::Region => "region",
            GeoKind::Country => "country",
        }
    }
}

/// Result of looking up one token.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeoMatch {
    /// Kinds whose full names equal the token.
    pub exact: Vec<GeoKind>,
    /// The token is one word of a multi-word name.
    pub partial: bool,
}

impl GeoMatch {
    pub fn is_empty(&self) -> bool {
        self.exact.is_empty() && !self.partial
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GazetteerStats {
    pub cities: u64,
    pub regions: u64,
    pub countries: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Gazetteer {
    pub stats: GazetteerStats,
    pub cities: BTreeSet<String>,
    pub regions: BTreeSet<String>,
    pub countries: BTreeSet<String>,
    pub partial: BTreeSet<String>,
}

pub fn fold(s: &str) -> String {
    s.trim().to_lowercase()
}

fn name_words(name: &str) -> impl Iterator<Item = &str> {
    name.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty())
}

fn for_each_line(path: &Path, mut f: impl FnMut(usize, &str) -> Result<()>) -> Result<()> {
    let io_err = |source| GazetteerError::Io {
        path: path.display().to_string(),
        source,
    };
    let reader = BufReader::new(File::open(path).map_err(io_err)?);
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err)?;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        f(i + 1, &line)?;
    }
    Ok(())
}

fn field<'a>(cols: &[&'a str], i: usize, file: &str, line: usize) -> Result<&'a str> {
    cols.get(i).copied().ok_or_else(|| GazetteerError::Parse {
        file: file.to_string(),
        line,
        reason: format!("expected at least {} columns, found {}", i + 1, cols.len()),
    })
}

impl Gazetteer {
    pub fn from_names<I, S>(cities: I, regions: I, countries: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut g = Gazetteer::default();
        for c in cities {
            g.insert(GeoKind::City, c.as_ref());
            g.stats.cities += 1;
        }
        for r in regions {
            g.insert(GeoKind::Region, r.as_ref());
            g.stats.regions += 1;
        }
        for c in countries {
            g.insert(GeoKind::Country, c.as_ref());
            g.stats.countries += 1;
        }
        g
    }

    fn insert(&mut self, kind: GeoKind, name: &str) {
        let folded = fold(name);
        if folded.is_empty() {
            return;
        }
        let words: Vec<&str> = name_words(&folded).collect();
        if words.len() > 1 {
            for w in &words {
                self.partial.insert(w.to_string());
            }
        }
        let set = match kind {
            GeoKind::City => &mut self.cities,
            GeoKind::Region => &mut self.regions,
            GeoKind::Country => &mut self.countries,
        };
        set.insert(folded);
    }

    /// Builds from a directory of Geonames dump files.
    pub fn from_geonames(dir: &Path) -> Result<Self> {
        let mut g = Gazetteer::default();
        let mut ids: HashMap<u64, GeoKind> = HashMap::new();

        for_each_line(&dir.join("cities1000.txt"), |line, l| {
            let cols: Vec<&str> = l.split('\t').collect();
            let file = "cities1000.txt";
            let population: u64 = field(&cols, 14, file, line)?.parse().unwrap_or(0);
            if population < MIN_CITY_POPULATION {
                return Ok(());
            }
            g.stats.cities += 1;
            if let Ok(id) = field(&cols, 0, file, line)?.parse() {
                ids.insert(id, GeoKind::City);
            }
            g.insert(GeoKind::City, field(&cols, 1, file, line)?);
            g.insert(GeoKind::City, field(&cols, 2, file, line)?);
            for alt in field(&cols, 3, file, line)?.split(',') {
                g.insert(GeoKind::City, alt);
            }
            Ok(())
        })?;

        for_each_line(&dir.join("admin1CodesASCII.txt"), |line, l| {
            let cols: Vec<&str> = l.split('\t').collect();
            let file = "admin1CodesASCII.txt";
            g.stats.regions += 1;
            g.insert(GeoKind::Region, field(&cols, 1, file, line)?);
            g.insert(GeoKind::Region, field(&cols, 2, file, line)?);
            if let Some(Ok(id)) = cols.get(3).map(|s| s.parse()) {
                ids.insert(id, GeoKind::Region);
            }
            Ok(())
        })?;

        for_each_line(&dir.join("countryInfo.txt"), |line, l| {
            let cols: Vec<&str> = l.split('\t').collect();
            let file = "countryInfo.txt";
            g.stats.countries += 1;
            g.insert(GeoKind::Country, field(&cols, 4, file, line)?);
            if let Some(Ok(id)) = cols.get(16).map(|s| s.parse()) {
                ids.insert(id, GeoKind::Country);
            }
            Ok(())
        })?;

        let alternates = dir.join("alternateNames.txt");
        if alternates.exists() {
            for_each_line(&alternates, |line, l| {
                let cols: Vec<&str> = l.split('\t').collect();
                let file = "alternateNames.txt";
                let Ok(id) = field(&cols, 1, file, line)?.parse::<u64>() else {
                    return Ok(());
                };
                let lang = field(&cols, 2, file, line)?;
                if NON_NAME_LANGUAGES.contains(&lang) {
                    return Ok(());
                }
                if let Some(&kind) = ids.get(&id) {
                    g.insert(kind, field(&cols, 3, file, line)?);
                }
                Ok(())
            })?;
        }
        Ok(g)
    }

    pub fn contains(&self, kind: GeoKind, name: &str) -> bool {
        let folded = fold(name);
        match kind {
            GeoKind::City => self.cities.contains(&folded),
            GeoKind::Region => self.regions.contains(&folded),
            GeoKind::Country => self.countries.contains(&folded),
        }
    }

    pub fn lookup(&self, token: &str) -> GeoMatch {
        let folded = fold(token);
        let exact: Vec<GeoKind> = GeoKind::ALL
            .into_iter()
            .filter(|&k| match k {
                GeoKind::City => self.cities.contains(&folded),
                GeoKind::Region => self.regions.contains(&folded),
                GeoKind::Country => self.countries.contains(&folded),
            })
            .collect();
        let partial = exact.is_empty() && self.partial.contains(&folded);
        GeoMatch { exact, partial }
    }

    /// Exact match of a token sequence against full names.
    pub fn lookup_sequence(&self, tokens: &[&str]) -> Vec<GeoKind> {
        let joined = tokens.join(" ");
        GeoKind::ALL
            .into_iter()
            .filter(|&k| self.contains(k, &joined))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.cities.is_empty() && self.regions.is_empty() && self.countries.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|source| GazetteerError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|source| GazetteerError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_kinds_and_partials() {
        let g = Gazetteer::from_names(vec!["Paris", "New York City"], vec!["Île-de-France"], vec!["France"]);
        assert_eq!(g.lookup("PARIS").exact, vec![GeoKind::City]);
        assert_eq!(g.lookup("france").exact, vec![GeoKind::Country]);
        let york = g.lookup("york");
        assert!(york.exact.is_empty() && york.partial);
        assert!(g.lookup("lovely").is_empty());
        assert_eq!(g.lookup_sequence(&["new", "york", "city"]), vec![GeoKind::City]);
        assert_eq!(g.stats.cities, 2);
    }
}
