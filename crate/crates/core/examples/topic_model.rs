//! Fit a collapsed-Gibbs LDA model on synthetic titles and abstracts, print
//! the top words per topic and fold in an unseen document.

use early_citers::study::{generate_synthetic_corpus, SynthParams};
use early_citers::topics::{TopicModel, TopicOptions};

fn main() -> early_citers::Result<()> {
    let corpus = generate_synthetic_corpus(&SynthParams::with_papers(1500), 3)?.corpus()?;
    let opts = TopicOptions { iterations: 200, max_year: Some(1995), ..TopicOptions::desk(11) };
    let model = TopicModel::fit(&corpus, &opts)?;

    println!("K = {}, vocabulary of {} terms", model.k(), model.vocabulary().len());
    for t in 0..model.k() {
        println!("topic {t:>2}: {}", model.top_words(t, 6).join(" "));
    }

    let doc = model.vocabulary().iter().take(12).cloned().collect::<Vec<_>>().join(" ");
    let theta = model.infer("unseen", &doc);
    let (best, share) = theta.iter().enumerate().fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    println!("unseen document leans on topic {best} ({share:.2})");
    Ok(())
}
