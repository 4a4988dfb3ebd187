use early_citers::corpus::{AuthorIdx, Corpus, PaperRecord};
use early_citers::graphs::{build_coauthorship_graph, shortest_distance, Distance};
use proptest::prelude::*;

const CAP: u32 = 64;

/// Papers over 2000..2006 with one to three of ten authors each.
fn corpus() -> impl Strategy<Value = Corpus> {
    let paper = (0i32..6, proptest::collection::btree_set(0usize..10, 1..4));
    proptest::collection::vec(paper, 1..30).prop_map(|rows| {
        let papers = rows
            .iter()
            .enumerate()
            .map(|(i, (y, authors))| {
                let names: Vec<String> = authors.iter().map(|a| format!("a{a}")).collect();
                let names: Vec<&str> = names.iter().map(String::as_str).collect();
                PaperRecord::new(&format!("p{i}"), 2000 + y, "v", &names, &[])
            })
            .collect();
        Corpus::from_papers(papers).unwrap()
    })
}

fn authors(c: &Corpus) -> Vec<AuthorIdx> {
    (0..c.n_authors_stored() as u32).map(AuthorIdx).collect()
}

fn hops(d: Distance) -> Option<u32> {
    match d {
        Distance::Hops(h) => Some(h),
        Distance::Unreachable => None,
    }
}

proptest! {
    #[test]
    fn distance_is_a_metric(c in corpus()) {
        let g = build_coauthorship_graph(&c, 2010);
        let nodes: Vec<AuthorIdx> = authors(&c).into_iter().filter(|&a| g.contains(a)).collect();
        let d = |a, b| hops(shortest_distance(&g, a, b, CAP).unwrap());
        for &a in &nodes {
            prop_assert_eq!(d(a, a), Some(0));
            for &b in &nodes {
                prop_assert_eq!(d(a, b), d(b, a));
                for &m in &nodes {
                    if let (Some(x), Some(y)) = (d(a, m), d(m, b)) {
                        let direct = d(a, b);
                        prop_assert!(direct.is_some_and(|z| z <= x + y));
                    }
                }
            }
        }
    }

    #[test]
    fn coauthorship_grows_with_time(c in corpus(), year in 2000i32..2005) {
        let (early, late) = (build_coauthorship_graph(&c, year), build_coauthorship_graph(&c, year + 1));
        for (a, b) in early.edges() {
            prop_assert!(late.neighbors(a).any(|n| n == b));
        }
        for a in authors(&c).into_iter().filter(|&a| early.contains(a)) {
            prop_assert!(late.contains(a));
            for b in authors(&c).into_iter().filter(|&b| early.contains(b)) {
                let before = shortest_distance(&early, a, b, CAP).unwrap();
                let after = shortest_distance(&late, a, b, CAP).unwrap();
                prop_assert!(after <= before, "{:?} -> {:?}", before, after);
            }
        }
    }
}
