//! Early citers of one paper: who they are, how they are classified, and the
//! aggregates (ECC, PC, CC, CA) that the correlation studies consume.

use early_citers::earlyciters::{classify_early_citers, ec_aggregates_all, ltsi, EcOptions};
use early_citers::study::{generate_synthetic_corpus, SynthParams};

fn main() -> early_citers::Result<()> {
    let corpus = generate_synthetic_corpus(&SynthParams::with_papers(2000), 42)?.corpus()?.filter(2)?;
    let opts = EcOptions::default();
    let aggs = ec_aggregates_all(&corpus, &opts)?;

    // The retained paper with the most early citations.
    let top = aggs.iter().max_by_key(|a| (a.ecc, std::cmp::Reverse(a.paper))).expect("non-empty corpus");
    println!(
        "{} ({}): ECC {}  PC {:.1}  CC {:.1}  CA {:.2}  {}",
        top.paper_id, top.year, top.ecc, top.pc, top.cc, top.ca, top.bucket.as_str()
    );
    for (author, class) in classify_early_citers(&corpus, top.paper, opts.delta, &opts.thresholds)? {
        println!("  {:<8} {}", corpus.author_id(author), class.as_str());
    }
    if let Ok(later) = ltsi(&corpus, top.paper, 5) {
        println!("citations within five years of publication: {later}");
    }

    let influential = aggs.iter().filter(|a| a.influential_pc).count();
    println!("{influential} of {} papers have influential early citers by publication count", aggs.len());
    Ok(())
}
