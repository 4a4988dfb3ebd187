//! Citation, venue and co-authorship graphs over a synthetic corpus:
//! PageRank leaders and a few co-author distances.

use early_citers::corpus::{AuthorIdx, PaperIdx, VenueIdx};
use early_citers::graphs::{
    build_coauthorship_graph, citation_graph_at, pagerank, shortest_distance, venue_graph_at, PageRankOptions,
};
use early_citers::study::{generate_synthetic_corpus, SynthParams};

fn main() -> early_citers::Result<()> {
    let corpus = generate_synthetic_corpus(&SynthParams::with_papers(1500), 7)?.corpus()?;
    let year = 2000;

    let citations = citation_graph_at(&corpus, year);
    let pr = pagerank(&citations, &PageRankOptions::default())?;
    println!("citation graph at {year}: {} nodes, {} edges, {} iterations", citations.len(), citations.edge_count(), pr.iterations);
    let mut order: Vec<usize> = (0..citations.len()).collect();
    order.sort_by(|&a, &b| pr.get(b).total_cmp(&pr.get(a)));
    for &n in order.iter().take(5) {
        let p = PaperIdx(citations.key(n));
        println!("  {:<10} {:.5}", corpus.paper_id(p), pr.get(n));
    }

    let venues = venue_graph_at(&corpus, year);
    let vr = pagerank(&venues, &PageRankOptions::default())?;
    let best = (0..venues.len()).max_by(|&a, &b| vr.get(a).total_cmp(&vr.get(b)));
    if let Some(n) = best {
        let v = VenueIdx(venues.key(n));
        println!("top venue at {year}: {} ({:.4})", corpus.venue(v).id, vr.get(n));
    }

    let coauthors = build_coauthorship_graph(&corpus, year);
    let authors: Vec<_> = (0..corpus.n_authors_stored() as u32).map(AuthorIdx).filter(|&a| coauthors.contains(a)).take(4).collect();
    for pair in authors.windows(2) {
        let d = shortest_distance(&coauthors, pair[0], pair[1], 64)?;
        println!("distance {} -> {}: {:?}", corpus.author_id(pair[0]), corpus.author_id(pair[1]), d);
    }
    Ok(())
}
