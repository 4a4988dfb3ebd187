//! Tokenization and smoothed unigram distributions.

use std::collections::BTreeMap;

const STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and", "any", "are", "as", "at",
    "be", "because", "been", "before", "being", "below", "between", "both", "but", "by", "can", "could", "did", "do",
    "does", "doing", "down", "during", "each", "few", "for", "from", "further", "had", "has", "have", "having", "he",
    "her", "here", "hers", "herself", "him", "himself", "his", "how", "i", "if", "in", "into", "is", "it", "its",
    "itself", "just", "may", "me", "more", "most", "my", "myself", "no", "nor", "not", "now", "of", "off", "on",
    "once", "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own", "same", "she", "should", "so",
    "some", "such", "than", "that", "the", "their", "theirs", "them", "themselves", "then", "there", "these", "they",
    "this", "those", "through", "to", "too", "under", "until", "up", "upon", "us", "very", "was", "we", "were", "what",
    "when", "where", "which", "while", "who", "whom", "why", "will", "with", "would", "you", "your", "yours",
    "yourself", "yourselves",
];

pub fn is_stopword(w: &str) -> bool {
    STOPWORDS.binary_search(&w).is_ok()
}

/// Lowercase alphanumeric words with stopwords removed.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .filter(|w| !is_stopword(w))
        .collect()
}

/// Word counts of a token stream.
pub fn counts<'a>(tokens: impl IntoIterator<Item = &'a String>) -> BTreeMap<&'a str, f64> {
    let mut m = BTreeMap::new();
    for t in tokens {
        *m.entry(t.as_str()).or_insert(0.0) += 1.0;
    }
    m
}

/// KL(p || q) between two count maps after add-`eps` smoothing over the union
/// vocabulary and renormalization. Natural log.
pub fn smoothed_kl(p: &BTreeMap<&str, f64>, q: &BTreeMap<&str, f64>, eps: f64) -> f64 {
    let vocab: std::collections::BTreeSet<&str> = p.keys().chain(q.keys()).copied().collect();
    if vocab.is_empty() {
        return 0.0;
    }
    let v = vocab.len() as f64;
    let zp = p.values().sum::<f64>() + eps * v;
    let zq = q.values().sum::<f64>() + eps * v;
    vocab
        .iter()
        .map(|w| {
            let pw = (p.get(w).copied().unwrap_or(0.0) + eps) / zp;
            let qw = (q.get(w).copied().unwrap_or(0.0) + eps) / zq;
            pw * (pw / qw).ln()
        })
        .sum::<f64>()
        .max(0.0)
}

/// Shannon entropy (natural log) of a probability vector.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}
