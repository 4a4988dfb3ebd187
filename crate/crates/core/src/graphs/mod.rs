//! Citation, co-authorship and venue graphs.
//!
//! Graphs are built over a subset of corpus entities and keep a dense local
//! numbering. `*_at(year)` builders slice by publication year so that
//! centrality computed for a paper published in `year` never sees later
//! events.

mod pagerank;

use std::collections::VecDeque;
use std::io::Write;

use crate::corpus::{AuthorIdx, Corpus, PaperIdx, VenueIdx, Year};
use crate::error::{Error, Result};

pub use pagerank::{pagerank, CentralityScores, PageRankOptions};

const NONE: u32 = u32::MAX;

/// Default BFS cap for co-authorship distances.
pub const DEFAULT_HOP_CAP: u32 = 6;

/// Read access to out-edges, shared by every graph that PageRank walks.
pub trait Adjacency {
    fn node_count(&self) -> usize;
    fn for_each_out(&self, node: usize, f: &mut dyn FnMut(usize, f64));
}

/// Weighted directed graph over a subset of entities of one kind.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiGraph {
    keys: Vec<u32>,
    local: Vec<u32>,
    out_edges: Vec<Vec<(u32, f64)>>,
}

impl DiGraph {
    /// Graph with nodes `keys` (entity indices below `universe`) and no edges.
    pub fn with_nodes(universe: usize, keys: impl IntoIterator<Item = u32>) -> Self {
        let mut g = DiGraph {
            keys: Vec::new(),
            local: vec![NONE; universe],
            out_edges: Vec::new(),
        };
        for k in keys {
            if g.local[k as usize] == NONE {
                g.local[k as usize] = g.keys.len() as u32;
                g.keys.push(k);
                g.out_edges.push(Vec::new());
            }
        }
        g
    }

    /// Adds `weight` to the edge `src -> dst` (both given as entity keys).
    pub fn add_edge(&mut self, src: u32, dst: u32, weight: f64) {
        let (s, d) = (self.local[src as usize], self.local[dst as usize]);
        assert!(s != NONE && d != NONE, "edge endpoint outside the node set");
        let edges = &mut self.out_edges[s as usize];
        match edges.iter_mut().find(|(t, _)| *t == d) {
            Some((_, w)) => *w += weight,
            None => edges.push((d, weight)),
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.out_edges.iter().map(Vec::len).sum()
    }

    /// Entity key of a local node.
    pub fn key(&self, node: usize) -> u32 {
        self.keys[node]
    }

    /// Local node of an entity key, if present.
    pub fn node_of(&self, key: u32) -> Option<usize> {
        match self.local.get(key as usize) {
            Some(&l) if l != NONE => Some(l as usize),
            _ => None,
        }
    }

    /// Out-edges of a local node as `(local target, weight)`.
    pub fn out_edges(&self, node: usize) -> &[(u32, f64)] {
        &self.out_edges[node]
    }

    /// Total weight of edges `src -> dst`, 0 when absent.
    pub fn weight(&self, src: u32, dst: u32) -> f64 {
        let (Some(s), Some(d)) = (self.node_of(src), self.node_of(dst)) else {
            return 0.0;
        };
        self.out_edges[s]
            .iter()
            .find(|(t, _)| *t as usize == d)
            .map_or(0.0, |(_, w)| *w)
    }

    /// Weighted in-degree excluding self-loops.
    pub fn in_degree_cross(&self, key: u32) -> f64 {
        let Some(d) = self.node_of(key) else {
            return 0.0;
        };
        self.out_edges
            .iter()
            .enumerate()
            .filter(|(s, _)| *s != d)
            .flat_map(|(_, e)| e.iter())
            .filter(|(t, _)| *t as usize == d)
            .map(|(_, w)| w)
            .sum()
    }

    /// Writes `src dst weight` lines using `label` to name entity keys.
    pub fn write_edge_list(&self, mut w: impl Write, label: impl Fn(u32) -> String) -> std::io::Result<()> {
        for (s, edges) in self.out_edges.iter().enumerate() {
            for &(d, weight) in edges {
                writeln!(w, "{} {} {}", label(self.keys[s]), label(self.keys[d as usize]), weight)?;
            }
        }
        Ok(())
    }
}

impl Adjacency for DiGraph {
    fn node_count(&self) -> usize {
        self.keys.len()
    }

    fn for_each_out(&self, node: usize, f: &mut dyn FnMut(usize, f64)) {
        for &(d, w) in &self.out_edges[node] {
            f(d as usize, w);
        }
    }
}

/// Undirected, unweighted collaboration graph sliced at a year.
#[derive(Clone, Debug, PartialEq)]
pub struct CoAuthorGraph {
    as_of: Year,
    nodes: Vec<AuthorIdx>,
    local: Vec<u32>,
    adj: Vec<Vec<u32>>,
}

/// Hop distance in a [`CoAuthorGraph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Distance {
    Hops(u32),
    Unreachable,
}

impl Distance {
    /// Numeric value, with `Unreachable` mapped to `cap`.
    pub fn value(self, cap: u32) -> f64 {
        match self {
            Distance::Hops(h) => h as f64,
            Distance::Unreachable => cap as f64,
        }
    }
}

impl CoAuthorGraph {
    pub fn as_of(&self) -> Year {
        self.as_of
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, a: AuthorIdx) -> bool {
        self.node_of(a).is_some()
    }

    pub fn node_of(&self, a: AuthorIdx) -> Option<usize> {
        match self.local.get(a.index()) {
            Some(&l) if l != NONE => Some(l as usize),
            _ => None,
        }
    }

    pub fn author(&self, node: usize) -> AuthorIdx {
        self.nodes[node]
    }

    pub fn degree(&self, a: AuthorIdx) -> usize {
        self.node_of(a).map_or(0, |n| self.adj[n].len())
    }

    pub fn neighbors(&self, a: AuthorIdx) -> impl Iterator<Item = AuthorIdx> + '_ {
        let slice: &[u32] = match self.node_of(a) {
            Some(n) => &self.adj[n],
            None => &[],
        };
        slice.iter().map(|&l| self.nodes[l as usize])
    }

    /// Every edge once, as `(a, b)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (AuthorIdx, AuthorIdx)> + '_ {
        self.adj.iter().enumerate().flat_map(move |(s, adj)| {
            let a = self.nodes[s];
            adj.iter()
                .map(move |&d| (a, self.nodes[d as usize]))
                .filter(|(a, b)| a < b)
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Breadth-first hop counts from a set of sources, up to `cap` hops.
    /// Indexed by local node.
    pub fn distances_from(&self, sources: &[AuthorIdx], cap: u32) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.nodes.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if let Some(n) = self.node_of(s) {
                if dist[n].is_none() {
                    dist[n] = Some(0);
                    queue.push_back(n);
                }
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            if du >= cap {
                continue;
            }
            for &v in &self.adj[u] {
                let v = v as usize;
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn write_edge_list(&self, mut w: impl Write, label: impl Fn(AuthorIdx) -> String) -> std::io::Result<()> {
        for (a, b) in self.edges() {
            writeln!(w, "{} {}", label(a), label(b))?;
        }
        Ok(())
    }
}

impl Adjacency for CoAuthorGraph {
    fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn for_each_out(&self, node: usize, f: &mut dyn FnMut(usize, f64)) {
        for &d in &self.adj[node] {
            f(d as usize, 1.0);
        }
    }
}

/// Citation graph over every stored paper.
pub fn build_citation_graph(corpus: &Corpus) -> DiGraph {
    citation_graph_where(corpus, |_| true)
}

/// Citation graph over papers published in or before `year`.
pub fn citation_graph_at(corpus: &Corpus, year: Year) -> DiGraph {
    citation_graph_where(corpus, |p| corpus.year(p) <= year)
}

fn citation_graph_where(corpus: &Corpus, keep: impl Fn(PaperIdx) -> bool) -> DiGraph {
    let mut g = DiGraph::with_nodes(
        corpus.n_papers_stored(),
        corpus.papers().filter(|&p| keep(p)).map(|p| p.0),
    );
    for p in corpus.papers().filter(|&p| keep(p)) {
        for &q in corpus.references_of(p) {
            if keep(q) {
                g.out_edges[g.local[p.index()] as usize].push((g.local[q.index()], 1.0));
            }
        }
    }
    g
}

/// Co-authorship graph over papers published in or before `as_of`.
pub fn build_coauthorship_graph(corpus: &Corpus, as_of: Year) -> CoAuthorGraph {
    let mut g = CoAuthorGraph {
        as_of,
        nodes: Vec::new(),
        local: vec![NONE; corpus.n_authors_stored()],
        adj: Vec::new(),
    };
    for p in corpus.papers().filter(|&p| corpus.year(p) <= as_of) {
        let authors = corpus.authors_of(p);
        for &a in authors {
            if g.local[a.index()] == NONE {
                g.local[a.index()] = g.nodes.len() as u32;
                g.nodes.push(a);
                g.adj.push(Vec::new());
            }
        }
        for (i, &a) in authors.iter().enumerate() {
            for &b in &authors[i + 1..] {
                let (la, lb) = (g.local[a.index()], g.local[b.index()]);
                g.adj[la as usize].push(lb);
                g.adj[lb as usize].push(la);
            }
        }
    }
    for adj in &mut g.adj {
        adj.sort_unstable();
        adj.dedup();
    }
    g
}

/// Venue citation graph over every stored paper; self-loops retained and
/// edge weight equal to the number of paper-level citations.
pub fn build_venue_graph(corpus: &Corpus) -> DiGraph {
    venue_graph_where(corpus, |_| true)
}

/// Venue graph restricted to papers (citing and cited) published in or
/// before `year`.
pub fn venue_graph_at(corpus: &Corpus, year: Year) -> DiGraph {
    venue_graph_where(corpus, |p| corpus.year(p) <= year)
}

fn venue_graph_where(corpus: &Corpus, keep: impl Fn(PaperIdx) -> bool) -> DiGraph {
    let nodes = corpus.papers().filter(|&p| keep(p)).map(|p| corpus.venue_of(p).0);
    let mut venues: Vec<u32> = nodes.collect();
    venues.sort_unstable();
    venues.dedup();
    let mut g = DiGraph::with_nodes(corpus.n_venues_stored(), venues);
    for p in corpus.papers().filter(|&p| keep(p)) {
        let src = corpus.venue_of(p).0;
        for &q in corpus.references_of(p) {
            if keep(q) {
                g.add_edge(src, corpus.venue_of(q).0, 1.0);
            }
        }
    }
    g
}

/// Hop distance between two authors, `Unreachable` beyond `cap` hops.
pub fn shortest_distance(g: &CoAuthorGraph, a: AuthorIdx, b: AuthorIdx, cap: u32) -> Result<Distance> {
    let Some(target) = g.node_of(b) else {
        return Err(Error::not_found("author node", b.0.to_string()));
    };
    if !g.contains(a) {
        return Err(Error::not_found("author node", a.0.to_string()));
    }
    Ok(match g.distances_from(&[a], cap)[target] {
        Some(h) => Distance::Hops(h),
        None => Distance::Unreachable,
    })
}

/// Venue key helper for callers holding a [`VenueIdx`].
pub fn venue_key(v: VenueIdx) -> u32 {
    v.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{IngestOptions, PaperRecord};

    fn p(id: &str, year: Year, venue: &str, authors: &[&str], refs: &[&str]) -> PaperRecord {
        PaperRecord {
            id: id.into(),
            title: "t".into(),
            abstract_text: "a".into(),
            authors: authors.iter().map(|s| s.to_string()).collect(),
            venue: venue.into(),
            year,
            references: refs.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn corpus(papers: Vec<PaperRecord>) -> Corpus {
        Corpus::from_records(papers, vec![], vec![], vec![], &IngestOptions::default()).unwrap()
    }

    #[test]
    fn citation_graph_single_edge_and_dangling() {
        let c = corpus(vec![
            p("P1", 2000, "V", &["a"], &[]),
            p("P2", 2001, "V", &["b"], &["P1", "ghost"]),
        ]);
        let g = build_citation_graph(&c);
        assert_eq!(g.len(), 2);
        assert_eq!(g.edge_count(), 1);
        let (p1, p2) = (c.paper_idx("P1").unwrap(), c.paper_idx("P2").unwrap());
        assert_eq!(g.weight(p2.0, p1.0), 1.0);
        assert!(build_citation_graph(&Corpus::empty()).is_empty());
    }

    #[test]
    fn coauthor_clique_and_time_slice() {
        let c = corpus(vec![
            p("P1", 2000, "V", &["a", "b", "c"], &[]),
            p("P2", 2001, "V", &["b", "d"], &[]),
        ]);
        let g = build_coauthorship_graph(&c, 2000);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(build_coauthorship_graph(&c, 1999).edge_count(), 0);
        let g = build_coauthorship_graph(&c, 2001);
        let b = c.author_idx("b").unwrap();
        assert_eq!(g.degree(b), 3);
    }

    #[test]
    fn venue_graph_weights_and_self_loops() {
        let c = corpus(vec![
            p("A", 2000, "V2", &["a"], &[]),
            p("B", 2000, "V2", &["a"], &[]),
            p("C", 2001, "V1", &["b"], &["A", "B"]),
            p("D", 2001, "V2", &["b"], &["A"]),
        ]);
        let g = build_venue_graph(&c);
        let (v1, v2) = (c.venue_idx("V1").unwrap().0, c.venue_idx("V2").unwrap().0);
        assert_eq!(g.weight(v1, v2), 2.0);
        assert_eq!(g.weight(v2, v2), 1.0);
        assert_eq!(g.in_degree_cross(v2), 2.0);
    }

    #[test]
    fn distances() {
        let c = corpus(vec![
            p("P1", 2000, "V", &["a", "b"], &[]),
            p("P2", 2000, "V", &["b", "c"], &[]),
            p("P3", 2000, "V", &["z"], &[]),
        ]);
        let g = build_coauthorship_graph(&c, 2000);
        let id = |s: &str| c.author_idx(s).unwrap();
        assert_eq!(shortest_distance(&g, id("a"), id("a"), 6).unwrap(), Distance::Hops(0));
        assert_eq!(shortest_distance(&g, id("a"), id("b"), 6).unwrap(), Distance::Hops(1));
        assert_eq!(shortest_distance(&g, id("a"), id("c"), 6).unwrap(), Distance::Hops(2));
        assert_eq!(shortest_distance(&g, id("a"), id("c"), 1).unwrap(), Distance::Unreachable);
        assert_eq!(shortest_distance(&g, id("a"), id("z"), 6).unwrap(), Distance::Unreachable);
        let late = build_coauthorship_graph(&c, 1999);
        assert!(matches!(
            shortest_distance(&late, id("a"), id("b"), 6),
            Err(Error::NotFound { .. })
        ));
    }
}
