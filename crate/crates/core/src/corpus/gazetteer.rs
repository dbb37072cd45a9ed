use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::index::analyzer::normalize_with;
use crate::resources::ResourceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaceKind {
    Country,
    State,
    Province,
    City,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Place {
    /// Normalized canonical name (aliases resolved).
    pub name: String,
    pub kind: PlaceKind,
}

#[derive(Debug, Deserialize)]
struct GazetteerFile {
    #[serde(default)]
    countries: Vec<String>,
    #[serde(default)]
    aliases: BTreeMap<String, String>,
    #[serde(default)]
    states: Vec<String>,
    #[serde(default)]
    provinces: Vec<String>,
    #[serde(default)]
    cities: Vec<String>,
}

/// Known place names keyed by normalized form.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    places: BTreeMap<String, Place>,
    stopwords: BTreeSet<String>,
    max_words: usize,
}

impl Gazetteer {
    pub fn from_json(json: &str, stopwords: &BTreeSet<String>) -> Result<Self, ResourceError> {
        let file: GazetteerFile =
            serde_json::from_str(json).map_err(|e| ResourceError::invalid("gazetteer", e))?;
        let mut g = Gazetteer { stopwords: stopwords.clone(), ..Default::default() };
        // later kinds do not overwrite earlier ones: "georgia" stays a state
        for (names, kind) in [
            (&file.states, PlaceKind::State),
            (&file.provinces, PlaceKind::Province),
            (&file.countries, PlaceKind::Country),
            (&file.cities, PlaceKind::City),
        ] {
            for name in names {
                let key = normalize_with(name, stopwords);
                g.add(key.clone(), Place { name: key, kind });
            }
        }
        for (alias, target) in &file.aliases {
            let target = normalize_with(target, stopwords);
            let place = g
                .places
                .get(&target)
                .cloned()
                .ok_or_else(|| ResourceError::invalid("gazetteer", format!("alias target {target:?} unknown")))?;
            g.add(normalize_with(alias, stopwords), place);
        }
        Ok(g)
    }

    fn add(&mut self, key: String, place: Place) {
        if key.is_empty() {
            return;
        }
        self.max_words = self.max_words.max(key.split(' ').count());
        self.places.entry(key).or_insert(place);
    }

    /// Looks up an already-normalized phrase.
    pub fn get(&self, normalized: &str) -> Option<&Place> {
        self.places.get(normalized)
    }

    /// Looks up raw text (normalizing it first).
    pub fn lookup(&self, text: &str) -> Option<&Place> {
        self.get(&normalize_with(text, &self.stopwords))
    }

    pub fn contains(&self, text: &str) -> bool {
        self.lookup(text).is_some()
    }

    /// Word count of the longest known place name.
    pub fn max_words(&self) -> usize {
        self.max_words
    }

    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use crate::Resources;

    use super::*;

    #[test]
    fn aliases_resolve_to_canonical_place() {
        let g = Resources::bundled().gazetteer;
        let usa = g.lookup("USA").unwrap();
        assert_eq!(usa.name, "united states");
        assert_eq!(usa.kind, PlaceKind::Country);
        assert_eq!(g.lookup("U.S.A.").unwrap().name, "united states");
        assert_eq!(g.lookup("Canada").unwrap().kind, PlaceKind::Country);
        assert_eq!(g.lookup("georgia").unwrap().kind, PlaceKind::State);
        assert_eq!(g.lookup("Seattle").unwrap().kind, PlaceKind::City);
        assert!(g.lookup("elections").is_none());
        assert!(g.max_words() >= 3);
    }
}
