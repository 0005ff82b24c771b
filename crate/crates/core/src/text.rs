//! Tokenization and n-gram counting shared by every metric.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A whitespace-tokenized sentence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenSequence {
    tokens: Vec<String>,
}

impl TokenSequence {
    pub fn new(tokens: Vec<String>) -> Self {
        debug_assert!(tokens
            .iter()
            .all(|t| !t.is_empty() && !t.chars().any(char::is_whitespace)));
        Self { tokens }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens joined by single spaces.
    pub fn to_text(&self) -> String {
        self.tokens.join(" ")
    }
}

impl<S: AsRef<str>> FromIterator<S> for TokenSequence {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self::new(iter.into_iter().map(|s| s.as_ref().to_owned()).collect())
    }
}

/// Splits `text` on runs of whitespace, lowercasing first when `normalize` is set.
pub fn tokenize(text: &str, normalize: bool) -> TokenSequence {
    if normalize {
        let lowered = text.to_lowercase();
        TokenSequence::from_iter(lowered.split_whitespace())
    } else {
        TokenSequence::from_iter(text.split_whitespace())
    }
}

/// A contiguous run of tokens borrowed from a [`TokenSequence`].
pub type NGram<'a> = &'a [String];

/// Occurrence counts of every n-gram of one order in a sentence.
#[derive(Debug, Clone)]
pub struct NGramCounts<'a> {
    order: usize,
    counts: HashMap<NGram<'a>, usize>,
    // distinct grams in first-occurrence order, so iteration is reproducible
    seen: Vec<NGram<'a>>,
}

impl<'a> NGramCounts<'a> {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Occurrences of `gram`, zero when absent.
    pub fn get(&self, gram: NGram<'_>) -> usize {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    /// Number of distinct n-gram types.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Sum of all counts, i.e. `max(0, len - order + 1)` of the source.
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Distinct n-grams with their counts, in order of first occurrence.
    pub fn iter(&self) -> impl Iterator<Item = (NGram<'a>, usize)> + '_ {
        self.seen.iter().map(|g| (*g, self.counts[g]))
    }
}

impl PartialEq for NGramCounts<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.counts == other.counts
    }
}

impl Eq for NGramCounts<'_> {}

pub fn extract_ngrams(seq: &TokenSequence, order: usize) -> Result<NGramCounts<'_>> {
    if order == 0 {
        return Err(Error::ZeroOrder);
    }
    let mut counts = HashMap::new();
    let mut seen = Vec::new();
    for gram in seq.tokens().windows(order) {
        let count = counts.entry(gram).or_insert(0);
        if *count == 0 {
            seen.push(gram);
        }
        *count += 1;
    }
    Ok(NGramCounts { order, counts, seen })
}

/// `min(count in u, count in v)`.
pub fn clipped_count(gram: NGram<'_>, u: &NGramCounts<'_>, v: &NGramCounts<'_>) -> usize {
    debug_assert!(gram.len() == u.order() && u.order() == v.order());
    u.get(gram).min(v.get(gram))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(s: &str) -> TokenSequence {
        tokenize(s, false)
    }

    fn gram(s: &str) -> Vec<String> {
        s.split(' ').map(str::to_owned).collect()
    }

    #[test]
    fn tokenize_examples() {
        assert!(tokenize("", false).is_empty());
        assert!(tokenize("  \t\n ", true).is_empty());
        assert_eq!(seq("i can imagine!").tokens(), ["i", "can", "imagine!"]);
        assert_eq!(tokenize("The  CAT", true).tokens(), ["the", "cat"]);
        assert_eq!(tokenize("The  CAT", false).tokens(), ["The", "CAT"]);
    }

    #[test]
    fn unigrams_and_bigrams() {
        let s = seq("a b a");
        let uni = extract_ngrams(&s, 1).unwrap();
        assert_eq!(uni.get(&gram("a")), 2);
        assert_eq!(uni.get(&gram("b")), 1);
        assert_eq!(uni.distinct(), 2);

        let bi = extract_ngrams(&s, 2).unwrap();
        assert_eq!(bi.get(&gram("a b")), 1);
        assert_eq!(bi.get(&gram("b a")), 1);
        assert_eq!(bi.distinct(), 2);
    }

    #[test]
    fn short_sequence_has_no_ngrams() {
        assert!(extract_ngrams(&seq("a"), 2).unwrap().is_empty());
        assert!(extract_ngrams(&seq(""), 1).unwrap().is_empty());
    }

    #[test]
    fn zero_order_rejected() {
        assert!(matches!(extract_ngrams(&seq("a"), 0), Err(Error::ZeroOrder)));
    }

    #[test]
    fn clipped_count_examples() {
        let aa = seq("a a");
        let a = seq("a");
        let bbb = seq("b b b");
        let u = extract_ngrams(&aa, 1).unwrap();
        let v = extract_ngrams(&a, 1).unwrap();
        let w = extract_ngrams(&bbb, 1).unwrap();
        assert_eq!(clipped_count(&gram("a"), &u, &v), 1);
        assert_eq!(clipped_count(&gram("b"), &u, &w), 0);
        assert_eq!(clipped_count(&gram("a"), &u, &u), 2);
    }

    fn token_vec() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d"]), 0..20)
            .prop_map(|v| v.into_iter().map(str::to_owned).collect())
    }

    proptest! {
        #[test]
        fn counts_sum_to_window_count(tokens in token_vec(), n in 1usize..5) {
            let s = TokenSequence::new(tokens);
            let counts = extract_ngrams(&s, n).unwrap();
            prop_assert_eq!(counts.total(), (s.len() + 1).saturating_sub(n));
            prop_assert!(counts.iter().all(|(g, c)| c >= 1 && g.len() == n));
        }

        #[test]
        fn clipped_count_symmetric_and_bounded(x in token_vec(), y in token_vec(), n in 1usize..3) {
            let (sx, sy) = (TokenSequence::new(x), TokenSequence::new(y));
            let (u, v) = (extract_ngrams(&sx, n).unwrap(), extract_ngrams(&sy, n).unwrap());
            for (g, _) in u.iter().chain(v.iter()) {
                let c = clipped_count(g, &u, &v);
                prop_assert_eq!(c, clipped_count(g, &v, &u));
                prop_assert!(c <= u.total().min(v.total()));
            }
        }

        #[test]
        fn tokens_never_contain_whitespace(text in "[a-zA-Z \t\n]{0,40}") {
            let s = tokenize(&text, true);
            prop_assert!(s.tokens().iter().all(|t| !t.is_empty() && !t.contains(char::is_whitespace)));
            prop_assert!(s.tokens().iter().all(|t| t.chars().all(|c| !c.is_uppercase())));
        }
    }
}
