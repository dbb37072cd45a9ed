use crate::corpus::lexicon::{Taxonomy, UnknownConcept};

/// Character-level Levenshtein distance.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Edit distance divided by the longer length; 0 for two empty strings.
pub fn normalized_levenshtein(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 0.0;
    }
    levenshtein(a, b) as f64 / longest as f64
}

/// Wu-Palmer similarity `2·depth(lcs) / (depth(a) + depth(b))`. Concepts in
/// different trees share no ancestor and score 0.
pub fn wu_palmer(a: &str, b: &str, taxonomy: &Taxonomy) -> Result<f64, UnknownConcept> {
    let da = taxonomy.depth(a)? as f64;
    let db = taxonomy.depth(b)? as f64;
    match taxonomy.lowest_common_ancestor(a, b)? {
        Some(lcs) => Ok(2.0 * taxonomy.depth(lcs)? as f64 / (da + db)),
        None => Ok(0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Resources;

    #[test]
    fn levenshtein_examples() {
        assert_eq!(normalized_levenshtein("price", "price"), 0.0);
        assert!((normalized_levenshtein("prices", "price") - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(normalized_levenshtein("abc", "xyz"), 1.0);
        assert_eq!(normalized_levenshtein("", ""), 0.0);
        assert_eq!(normalized_levenshtein("", "ab"), 1.0);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
    }

    #[test]
    fn wu_palmer_examples() {
        let tax = Resources::bundled().lexicon.taxonomy;
        assert_eq!(wu_palmer("crime", "crime", &tax).unwrap(), 1.0);
        let s = wu_palmer("espresso", "cappuccino", &tax).unwrap();
        assert!((s - 4.0 / 6.0).abs() < 1e-12);
        assert!(s < 1.0);
        assert_eq!(wu_palmer("espresso", "theft", &tax).unwrap(), 0.0);
        assert!(wu_palmer("espresso", "zzxqy", &tax).is_err());
        assert!((wu_palmer("theft", "larceny", &tax).unwrap() - 6.0 / 7.0).abs() < 1e-12);
    }
}
