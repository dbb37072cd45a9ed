use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::types::Attribute;
use crate::index::analyzer::{normalize_with, singular_candidates};
use crate::resources::ResourceError;

/// How far enrichment walks the taxonomy from an anchor concept, in each
/// direction.
pub const ENRICHMENT_LEVELS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("concept {0:?} is not in the taxonomy")]
pub struct UnknownConcept(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxonomyNode {
    pub parent: Option<String>,
    pub depth: u32,
}

/// A single-rooted forest of concepts; roots have depth 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Taxonomy {
    nodes: BTreeMap<String, TaxonomyNode>,
    children: BTreeMap<String, Vec<String>>,
}

impl Taxonomy {
    /// Builds and validates a taxonomy: parents must exist, roots have depth 1
    /// and every child sits exactly one level below its parent.
    pub fn new(nodes: BTreeMap<String, TaxonomyNode>) -> Result<Self, ResourceError> {
        let mut children: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (id, node) in &nodes {
            match &node.parent {
                None if node.depth != 1 => {
                    return Err(ResourceError::invalid("taxonomy", format!("root {id:?} must have depth 1")));
                }
                None => {}
                Some(p) => {
                    let parent = nodes.get(p).ok_or_else(|| {
                        ResourceError::invalid("taxonomy", format!("{id:?} has unknown parent {p:?}"))
                    })?;
                    if node.depth != parent.depth + 1 {
                        return Err(ResourceError::invalid(
                            "taxonomy",
                            format!("{id:?} depth {} under {p:?} depth {}", node.depth, parent.depth),
                        ));
                    }
                    children.entry(p.clone()).or_default().push(id.clone());
                }
            }
        }
        Ok(Self { nodes, children })
    }

    pub fn contains(&self, concept: &str) -> bool {
        self.nodes.contains_key(concept)
    }

    pub fn depth(&self, concept: &str) -> Result<u32, UnknownConcept> {
        self.nodes.get(concept).map(|n| n.depth).ok_or_else(|| UnknownConcept(concept.to_string()))
    }

    pub fn parent(&self, concept: &str) -> Option<&str> {
        self.nodes.get(concept).and_then(|n| n.parent.as_deref())
    }

    /// Ancestors ordered nearest first.
    pub fn ancestors(&self, concept: &str) -> Vec<&str> {
        let mut out = Vec::new();
        let mut cur = self.parent(concept);
        while let Some(p) = cur {
            out.push(p);
            cur = self.parent(p);
        }
        out
    }

    /// Descendants at most `levels` below `concept`, breadth first, siblings
    /// in ascending order.
    pub fn descendants(&self, concept: &str, levels: usize) -> Vec<&str> {
        let mut out = Vec::new();
        let mut queue = VecDeque::from([(concept, 0usize)]);
        while let Some((c, d)) = queue.pop_front() {
            if d == levels {
                continue;
            }
            for child in self.children.get(c).into_iter().flatten() {
                out.push(child.as_str());
                queue.push_back((child.as_str(), d + 1));
            }
        }
        out
    }

    /// Deepest common ancestor (a concept counts as its own ancestor).
    pub fn lowest_common_ancestor(&self, a: &str, b: &str) -> Result<Option<&str>, UnknownConcept> {
        self.depth(a)?;
        self.depth(b)?;
        let mut chain_a: Vec<&str> = vec![self.nodes.get_key_value(a).unwrap().0.as_str()];
        chain_a.extend(self.ancestors(a));
        let mut chain_b: BTreeSet<&str> = self.ancestors(b).into_iter().collect();
        chain_b.insert(self.nodes.get_key_value(b).unwrap().0.as_str());
        Ok(chain_a.into_iter().find(|c| chain_b.contains(c)))
    }

    pub fn concepts(&self) -> impl Iterator<Item = &str> {
        self.nodes.keys().map(String::as_str)
    }
}

#[derive(Debug, Deserialize)]
struct LexiconFile {
    #[serde(default)]
    synonyms: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    taxonomy: BTreeMap<String, TaxonomyNode>,
}

/// Synonym table plus concept taxonomy used to enrich attributes and to
/// expand documents at index time.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    /// Symmetric synonym table keyed by normalized term.
    pub synonyms: BTreeMap<String, Vec<String>>,
    pub taxonomy: Taxonomy,
    stopwords: BTreeSet<String>,
}

impl Lexicon {
    pub fn from_json(json: &str, stopwords: &BTreeSet<String>) -> Result<Self, ResourceError> {
        let file: LexiconFile =
            serde_json::from_str(json).map_err(|e| ResourceError::invalid("lexicon", e))?;
        let taxonomy = Taxonomy::new(file.taxonomy)?;
        Ok(Self::new(&file.synonyms, taxonomy, stopwords))
    }

    /// Normalizes the synonym groups and closes them under symmetry: every
    /// member of a group lists the head and the other members.
    pub fn new(
        groups: &BTreeMap<String, Vec<String>>,
        taxonomy: Taxonomy,
        stopwords: &BTreeSet<String>,
    ) -> Self {
        let mut table: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut push = |key: &str, value: &str| {
            if key.is_empty() || value.is_empty() || key == value {
                return;
            }
            let entry = table.entry(key.to_string()).or_default();
            if !entry.iter().any(|v| v == value) {
                entry.push(value.to_string());
            }
        };
        for (head, syns) in groups {
            let head = normalize_with(head, stopwords);
            let members: Vec<String> = syns.iter().map(|s| normalize_with(s, stopwords)).collect();
            for m in &members {
                push(&head, m);
            }
            for m in &members {
                push(m, &head);
                for other in &members {
                    push(m, other);
                }
            }
        }
        Self { synonyms: table, taxonomy, stopwords: stopwords.clone() }
    }

    pub fn normalize(&self, text: &str) -> String {
        normalize_with(text, &self.stopwords)
    }

    /// Synonyms of a normalized term; falls back to the singular form.
    pub fn synonyms_of(&self, term: &str) -> &[String] {
        if let Some(s) = self.synonyms.get(term) {
            return s;
        }
        singular_phrases(term).iter().find_map(|k| self.synonyms.get(k)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Taxonomy concept for a normalized term (directly or via its singular).
    pub fn concept_for(&self, term: &str) -> Option<&str> {
        lookup_keys(term)
            .into_iter()
            .find_map(|k| self.taxonomy.nodes.get_key_value(k.as_str()).map(|(k, _)| k.as_str()))
    }
}

/// Candidate singular forms of a phrase (last word singularized).
pub fn singular_phrases(phrase: &str) -> Vec<String> {
    let (head, last) = match phrase.rsplit_once(' ') {
        Some((h, l)) => (Some(h), l),
        None => (None, phrase),
    };
    singular_candidates(last)
        .into_iter()
        .map(|s| match head {
            Some(h) => format!("{h} {s}"),
            None => s,
        })
        .collect()
}

/// Keys tried when looking a term up in the lexicon: the full phrase, its
/// singular forms, then the last word and its singular forms.
fn lookup_keys(normalized: &str) -> Vec<String> {
    let mut keys = vec![normalized.to_string()];
    keys.extend(singular_phrases(normalized));
    if let Some((_, last)) = normalized.rsplit_once(' ') {
        keys.push(last.to_string());
        keys.extend(singular_candidates(last));
    }
    let mut seen = BTreeSet::new();
    keys.retain(|k| !k.is_empty() && seen.insert(k.clone()));
    keys
}

fn union_into(target: &mut Vec<String>, items: impl IntoIterator<Item = String>, exclude: &str) {
    for item in items {
        let item = item.trim().to_lowercase();
        if !item.is_empty() && item != exclude && !target.contains(&item) {
            target.push(item);
        }
    }
}

/// Populates synonyms, related terms and the taxonomy anchor of an attribute
/// from the lexicon. Declared values are kept first; the operation is
/// idempotent.
pub fn enrich_attribute(attr: &Attribute, lexicon: &Lexicon) -> Attribute {
    let name = lexicon.normalize(&attr.name);
    let own = attr.name.trim().to_lowercase();
    let keys = lookup_keys(&name);

    let mut synonyms = Vec::new();
    union_into(&mut synonyms, attr.synonyms.iter().cloned(), &own);
    if let Some(found) = keys.iter().find_map(|k| lexicon.synonyms.get(k)) {
        union_into(&mut synonyms, found.iter().cloned(), &own);
    }
    synonyms.retain(|s| *s != name);

    let anchor = attr
        .taxonomy_node
        .clone()
        .filter(|n| lexicon.taxonomy.contains(n))
        .or_else(|| lexicon.concept_for(&name).map(str::to_string));

    let mut related = Vec::new();
    union_into(&mut related, attr.related_terms.iter().cloned(), &own);
    if let Some(anchor) = &anchor {
        let tax = &lexicon.taxonomy;
        let up = tax.ancestors(anchor).into_iter().take(ENRICHMENT_LEVELS);
        let down = tax.descendants(anchor, ENRICHMENT_LEVELS);
        union_into(&mut related, up.chain(down).map(str::to_string), &own);
    }
    related.retain(|r| *r != name);

    Attribute {
        synonyms,
        related_terms: related,
        taxonomy_node: anchor.or_else(|| attr.taxonomy_node.clone()),
        ..attr.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::types::{DataType, Role};
    use crate::Resources;

    fn lexicon() -> Lexicon {
        Resources::bundled().lexicon
    }

    #[test]
    fn movie_gets_film() {
        let a = enrich_attribute(&Attribute::new("Movie", DataType::Text, Role::Dimension), &lexicon());
        assert!(a.synonyms.contains(&"film".to_string()));
    }

    #[test]
    fn plural_names_use_singular_entries() {
        let a = enrich_attribute(&Attribute::new("Movies", DataType::Text, Role::Dimension), &lexicon());
        assert!(a.synonyms.contains(&"film".to_string()));
    }

    #[test]
    fn crime_gets_hyponyms() {
        let a = enrich_attribute(&Attribute::new("Crime", DataType::Text, Role::Dimension), &lexicon());
        assert!(a.related_terms.contains(&"theft".to_string()));
        assert!(a.related_terms.contains(&"burglary".to_string()));
        assert!(a.related_terms.contains(&"offense".to_string()));
        assert_eq!(a.taxonomy_node.as_deref(), Some("crime"));
    }

    #[test]
    fn unknown_name_is_unchanged() {
        let attr = Attribute::new("zzxqy", DataType::Text, Role::Dimension);
        assert_eq!(enrich_attribute(&attr, &lexicon()), attr);
    }

    #[test]
    fn synonyms_are_symmetric() {
        let lx = lexicon();
        assert!(lx.synonyms_of("film").contains(&"movie".to_string()));
        assert!(lx.synonyms_of("movie").contains(&"film".to_string()));
        assert!(lx.synonyms_of("films").contains(&"movie".to_string()));
    }

    #[test]
    fn enrichment_is_idempotent_over_shipped_concepts() {
        let lx = lexicon();
        let names: Vec<String> =
            lx.taxonomy.concepts().chain(lx.synonyms.keys().map(String::as_str)).map(str::to_string).collect();
        for name in names {
            let mut attr = Attribute::new(name.to_uppercase(), DataType::Text, Role::Dimension);
            attr.synonyms.push("Extra".into());
            let once = enrich_attribute(&attr, &lx);
            assert_eq!(enrich_attribute(&once, &lx), once, "{name}");
        }
    }

    #[test]
    fn taxonomy_chains_stay_within_two_levels() {
        let lx = lexicon();
        let tax = &lx.taxonomy;
        for anchor in tax.concepts() {
            let a = enrich_attribute(&Attribute::new(anchor, DataType::Text, Role::Dimension), &lx);
            let d = tax.depth(anchor).unwrap() as i64;
            for r in &a.related_terms {
                let rd = tax.depth(r).unwrap() as i64;
                assert!((rd - d).abs() <= 2 && rd != d, "{anchor} -> {r}");
            }
        }
    }

    #[test]
    fn invalid_taxonomy_is_rejected() {
        let bad = r#"{"taxonomy": {"a": {"parent": null, "depth": 1}, "b": {"parent": "a", "depth": 3}}}"#;
        assert!(Lexicon::from_json(bad, &BTreeSet::new()).is_err());
        let orphan = r#"{"taxonomy": {"b": {"parent": "zz", "depth": 2}}}"#;
        assert!(Lexicon::from_json(orphan, &BTreeSet::new()).is_err());
    }
}
