//! Latent Dirichlet allocation by collapsed Gibbs sampling.
//!
//! Documents are paper titles plus abstracts. The fitted model keeps its
//! word-topic counts so unseen documents can be folded in against fixed topics.

use std::collections::HashMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, PaperIdx, Year};
use crate::error::{Error, Result};
use crate::persist;
use crate::text::tokenize;

const MAGIC: &[u8; 8] = b"ECTOPICS";
const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopicOptions {
    pub k: usize,
    pub iterations: usize,
    /// Document-topic prior; `None` means 50 / K.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub min_df: usize,
    /// Gibbs sweeps when folding in an unseen document.
    pub infer_iterations: usize,
    pub seed: u64,
    /// Fit only on papers published in or before this year.
    pub max_year: Option<Year>,
}

impl Default for TopicOptions {
    fn default() -> Self {
        TopicOptions {
            k: 50,
            iterations: 500,
            alpha: None,
            beta: 0.01,
            min_df: 5,
            infer_iterations: 50,
            seed: 0,
            max_year: None,
        }
    }
}

impl TopicOptions {
    /// Small-corpus defaults: K = 10.
    pub fn desk(seed: u64) -> Self {
        TopicOptions {
            k: 10,
            seed,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TopicModel {
    k: usize,
    alpha: f64,
    beta: f64,
    seed: u64,
    iterations: usize,
    infer_iterations: usize,
    vocab: Vec<String>,
    /// `word_topic[w * k + t]`.
    word_topic: Vec<u32>,
    topic_totals: Vec<u64>,
    doc_ids: Vec<String>,
    doc_topic: Vec<Vec<f64>>,
    #[serde(skip)]
    word_index: HashMap<String, u32>,
    #[serde(skip)]
    doc_index: HashMap<String, usize>,
}

impl PartialEq for TopicModel {
    fn eq(&self, o: &Self) -> bool {
        self.k == o.k
            && self.alpha == o.alpha
            && self.beta == o.beta
            && self.seed == o.seed
            && self.vocab == o.vocab
            && self.word_topic == o.word_topic
            && self.topic_totals == o.topic_totals
            && self.doc_ids == o.doc_ids
            && self.doc_topic == o.doc_topic
    }
}

/// Text of a paper as seen by the topic model.
pub fn paper_text(corpus: &Corpus, p: PaperIdx) -> String {
    let r = corpus.paper(p);
    format!("{} {}", r.title, r.abstract_text)
}

/// Stable 64-bit FNV-1a, used to derive per-document seeds.
fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn sample(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

impl TopicModel {
    /// Fits on every stored paper (up to `opts.max_year`).
    pub fn fit(corpus: &Corpus, opts: &TopicOptions) -> Result<TopicModel> {
        let docs: Vec<(String, String)> = corpus
            .papers()
            .filter(|&p| opts.max_year.is_none_or(|y| corpus.year(p) <= y))
            .map(|p| (corpus.paper_id(p).to_string(), paper_text(corpus, p)))
            .collect();
        Self::fit_documents(&docs, opts)
    }

    /// Fits on `(id, text)` pairs.
    pub fn fit_documents(docs: &[(String, String)], opts: &TopicOptions) -> Result<TopicModel> {
        let k = opts.k;
        if k == 0 {
            return Err(Error::Config("topic count must be at least 1".into()));
        }
        let alpha = opts.alpha.unwrap_or(50.0 / k as f64);
        if !(alpha > 0.0 && opts.beta > 0.0) {
            return Err(Error::Config("alpha and beta must be positive".into()));
        }

        let tokens: Vec<Vec<String>> = docs.iter().map(|(_, t)| tokenize(t)).collect();
        let mut df: HashMap<&str, usize> = HashMap::new();
        for doc in &tokens {
            let mut seen: Vec<&str> = doc.iter().map(String::as_str).collect();
            seen.sort_unstable();
            seen.dedup();
            for w in seen {
                *df.entry(w).or_insert(0) += 1;
            }
        }
        let mut vocab: Vec<String> = df
            .into_iter()
            .filter(|&(_, n)| n >= opts.min_df)
            .map(|(w, _)| w.to_string())
            .collect();
        vocab.sort_unstable();
        if vocab.is_empty() {
            return Err(Error::Config(format!(
                "vocabulary is empty after pruning words seen in fewer than {} documents",
                opts.min_df
            )));
        }
        let word_index: HashMap<String, u32> = vocab.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        let words: Vec<Vec<u32>> = tokens
            .iter()
            .map(|d| d.iter().filter_map(|w| word_index.get(w).copied()).collect())
            .collect();

        let v = vocab.len();
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut n_dk = vec![0u32; docs.len() * k];
        let mut n_wk = vec![0u32; v * k];
        let mut n_k = vec![0u64; k];
        let mut z: Vec<Vec<u32>> = Vec::with_capacity(docs.len());
        for (d, doc) in words.iter().enumerate() {
            let zd: Vec<u32> = doc
                .iter()
                .map(|&w| {
                    let t = rng.gen_range(0..k);
                    n_dk[d * k + t] += 1;
                    n_wk[w as usize * k + t] += 1;
                    n_k[t] += 1;
                    t as u32
                })
                .collect();
            z.push(zd);
        }

        let vbeta = v as f64 * opts.beta;
        let mut weights = vec![0.0; k];
        for _ in 0..opts.iterations {
            for (d, doc) in words.iter().enumerate() {
                for (i, &w) in doc.iter().enumerate() {
                    let w = w as usize;
                    let old = z[d][i] as usize;
                    n_dk[d * k + old] -= 1;
                    n_wk[w * k + old] -= 1;
                    n_k[old] -= 1;
                    for t in 0..k {
                        weights[t] = (n_dk[d * k + t] as f64 + alpha) * (n_wk[w * k + t] as f64 + opts.beta)
                            / (n_k[t] as f64 + vbeta);
                    }
                    let new = sample(&mut rng, &weights);
                    n_dk[d * k + new] += 1;
                    n_wk[w * k + new] += 1;
                    n_k[new] += 1;
                    z[d][i] = new as u32;
                }
            }
        }

        let doc_topic: Vec<Vec<f64>> = words
            .iter()
            .enumerate()
            .map(|(d, doc)| {
                let denom = doc.len() as f64 + k as f64 * alpha;
                (0..k).map(|t| (n_dk[d * k + t] as f64 + alpha) / denom).collect()
            })
            .collect();
        let doc_ids: Vec<String> = docs.iter().map(|(id, _)| id.clone()).collect();
        let doc_index = doc_ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        Ok(TopicModel {
            k,
            alpha,
            beta: opts.beta,
            seed: opts.seed,
            iterations: opts.iterations,
            infer_iterations: opts.infer_iterations,
            vocab,
            word_topic: n_wk,
            topic_totals: n_k,
            doc_ids,
            doc_topic,
            word_index,
            doc_index,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocab
    }

    pub fn word_topic_counts(&self) -> &[u32] {
        &self.word_topic
    }

    /// Topic distributions of the training documents, in input order.
    pub fn document_topics(&self) -> &[Vec<f64>] {
        &self.doc_topic
    }

    /// The `n` highest-weight words of topic `t`.
    pub fn top_words(&self, t: usize, n: usize) -> Vec<&str> {
        let mut order: Vec<usize> = (0..self.vocab.len()).collect();
        order.sort_by(|&a, &b| {
            self.word_topic[b * self.k + t]
                .cmp(&self.word_topic[a * self.k + t])
                .then(a.cmp(&b))
        });
        order.into_iter().take(n).map(|w| self.vocab[w].as_str()).collect()
    }

    /// Folds in an unseen document against fixed topics. The sampler is
    /// seeded from the model seed and `key`, so the result depends on nothing
    /// but the model and the document.
    pub fn infer(&self, key: &str, text: &str) -> Vec<f64> {
        let k = self.k;
        let words: Vec<usize> = tokenize(text)
            .iter()
            .filter_map(|w| self.word_index.get(w).map(|&i| i as usize))
            .collect();
        let vbeta = self.vocab.len() as f64 * self.beta;
        let phi = |w: usize, t: usize| (self.word_topic[w * k + t] as f64 + self.beta) / (self.topic_totals[t] as f64 + vbeta);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ fnv1a(key.as_bytes()));
        let mut n_k = vec![0u32; k];
        let mut z: Vec<usize> = words
            .iter()
            .map(|_| {
                let t = rng.gen_range(0..k);
                n_k[t] += 1;
                t
            })
            .collect();
        let mut weights = vec![0.0; k];
        for _ in 0..self.infer_iterations {
            for (i, &w) in words.iter().enumerate() {
                n_k[z[i]] -= 1;
                for t in 0..k {
                    weights[t] = (n_k[t] as f64 + self.alpha) * phi(w, t);
                }
                z[i] = sample(&mut rng, &weights);
                n_k[z[i]] += 1;
            }
        }
        let denom = words.len() as f64 + k as f64 * self.alpha;
        n_k.iter().map(|&n| (n as f64 + self.alpha) / denom).collect()
    }

    /// Topic distribution of a corpus paper: the training estimate when the
    /// paper was part of the fit, fold-in otherwise.
    pub fn paper_topics(&self, corpus: &Corpus, p: PaperIdx) -> Vec<f64> {
        let id = corpus.paper_id(p);
        match self.doc_index.get(id) {
            Some(&d) => self.doc_topic[d].clone(),
            None => self.infer(id, &paper_text(corpus, p)),
        }
    }

    /// [`TopicModel::paper_topics`] for every stored paper, indexed by paper.
    pub fn topic_table(&self, corpus: &Corpus) -> Vec<Vec<f64>> {
        corpus.papers().map(|p| self.paper_topics(corpus, p)).collect()
    }

    fn rebuild(&mut self) {
        self.word_index = self.vocab.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        self.doc_index = self.doc_ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        persist::save(path, MAGIC, VERSION, self)
    }

    pub fn load(path: &Path) -> Result<TopicModel> {
        let mut m: TopicModel = persist::load(path, MAGIC, VERSION)?;
        m.rebuild();
        Ok(m)
    }
}
