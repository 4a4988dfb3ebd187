//! Ingest a tiny hand-written corpus from JSONL, including a few malformed
//! records, and print what was kept and what was rejected.

use early_citers::corpus::{Corpus, IngestOptions};

const PAPERS: &str = r#"{"id":"P1","title":"Sparse graphs","abstract":"walks on sparse graphs","authors":["A1","A2"],"venue":"V1","year":1998,"references":[]}
{"id":"P2","title":"Dense graphs","abstract":"walks on dense graphs","authors":["A2"],"venue":"V1","year":1999,"references":["P1"]}
{"id":"P3","title":"Citing both","abstract":"random walks","authors":["A3"],"venue":"V2","year":2000,"references":["P1","P2","P404"]}
{"id":"P4","title":"From the future","authors":["A1"],"venue":"V2","year":2042,"references":["P1"]}
{"title":"No identifier","authors":["A1"],"year":2000}
"#;

const AUTHORS: &str = r#"{"id":"A1","name":"Ada"}
{"id":"A2","name":"Bo"}
{"id":"A3","name":"Cy"}
"#;

const CONTEXTS: &str = r#"{"citing":"P3","cited":"P1","context":"as shown in [1]","count_x":2,"cite_words":40}
"#;

fn main() -> early_citers::Result<()> {
    let corpus = Corpus::ingest(
        PAPERS.as_bytes(),
        Some(AUTHORS.as_bytes()),
        None::<&[u8]>,
        Some(CONTEXTS.as_bytes()),
        &IngestOptions::default(),
    )?;
    println!("{:?}", corpus.stats());
    for (reason, n) in corpus.rejection_log() {
        println!("rejected {n:>3}  {reason}");
    }
    println!("dangling references: {}", corpus.dangling_references());
    println!("P1 cited {} times in 1998..=2000", corpus.citations_in_window("P1", 1998, 2000)?);
    Ok(())
}
