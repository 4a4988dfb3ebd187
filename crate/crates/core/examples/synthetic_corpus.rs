//! Generate a seeded synthetic corpus with planted early-citer effects and
//! write it as the four JSONL streams accepted by `ingest`.
//!
//! ```bash
//! cargo run --release --example synthetic_corpus -- /tmp/synth
//! ```

use std::path::PathBuf;

use early_citers::study::{generate_synthetic_corpus, SynthParams};

fn main() -> early_citers::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("synth"));

    let mut params = SynthParams::with_papers(2000);
    params.stealing_strength = 0.5;
    let synth = generate_synthetic_corpus(&params, 42)?;
    synth.write_streams(&out)?;

    let corpus = synth.corpus()?;
    let stats = corpus.stats();
    println!(
        "{} papers, {} authors, {} contexts over {}..={}",
        stats.n_papers, stats.n_authors, stats.n_contexts, stats.year_min, stats.year_max
    );
    println!("streams written to {}", out.display());
    Ok(())
}
