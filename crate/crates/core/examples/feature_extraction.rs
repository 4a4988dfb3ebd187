//! Extract the 22-slot feature vector for a few papers and show which slots
//! are known at publication time.

use early_citers::features::{FeatureExtractor, FeatureOptions, FeatureSlot};
use early_citers::study::{generate_synthetic_corpus, SynthParams};
use early_citers::topics::{TopicModel, TopicOptions};

fn main() -> early_citers::Result<()> {
    let corpus = generate_synthetic_corpus(&SynthParams::with_papers(1500), 5)?.corpus()?.filter(2)?;
    let topics = TopicModel::fit(&corpus, &TopicOptions { iterations: 100, ..TopicOptions::desk(1) })?;
    let mut fx = FeatureExtractor::new(&corpus, &topics, FeatureOptions::default());

    let papers: Vec<_> = corpus.retained_papers().filter(|&p| corpus.year(p) == 1995).take(3).collect();
    let rows = papers.iter().map(|&p| fx.extract(p)).collect::<Result<Vec<_>, _>>()?;

    print!("{:<11}{:>4}", "slot", "pub");
    for r in &rows {
        print!("{:>12}", r.meta.paper_id);
    }
    println!();
    for slot in FeatureSlot::ALL {
        print!("{:<11}{:>4}", slot.name(), if slot.at_publication() { "yes" } else { "" });
        for r in &rows {
            print!("{:>12.4}", r.get(slot));
        }
        println!();
    }
    Ok(())
}
