use std::collections::BTreeMap;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::earlyciters::{self, CaBucket, EcAggregates, EcOptions, Influence};
use crate::error::{Error, Result};
use crate::models::pearson;

/// Subsets smaller than this get no correlation.
pub const MIN_SUBSET: usize = 3;
pub const CORRELATION_DELTA_TS: [i32; 5] = [5, 8, 10, 12, 15];
pub const BUCKETED_DELTA_TS: [i32; 4] = [5, 8, 10, 12];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Property {
    #[serde(rename = "PC")]
    Pc,
    #[serde(rename = "CC")]
    Cc,
}

impl Property {
    pub fn as_str(self) -> &'static str {
        match self {
            Property::Pc => "PC",
            Property::Cc => "CC",
        }
    }

    pub fn value(self, agg: &EcAggregates) -> f64 {
        match self {
            Property::Pc => agg.pc,
            Property::Cc => agg.cc,
        }
    }

    pub fn influence(self, agg: &EcAggregates) -> Influence {
        let hit = match self {
            Property::Pc => agg.influential_pc,
            Property::Cc => agg.influential_cc,
        };
        if hit {
            Influence::Influential
        } else {
            Influence::NonInfluential
        }
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Property> {
        match s.to_ascii_uppercase().as_str() {
            "PC" => Ok(Property::Pc),
            "CC" => Ok(Property::Cc),
            _ => Err(Error::InvalidArgument(format!("unknown property {s:?} (expected PC or CC)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowStatus {
    Ok,
    /// Fewer than [`MIN_SUBSET`] papers.
    Insufficient,
    /// A zero-variance column.
    Undefined,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Insufficient => "insufficient",
            RowStatus::Undefined => "undefined",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub delta_t: i32,
    pub subset: Influence,
    pub bucket: Option<CaBucket>,
    pub n: usize,
    pub rho: Option<f64>,
    pub status: RowStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub property: Property,
    pub rows: Vec<CorrelationRow>,
}

impl CorrelationTable {
    pub fn get(&self, delta_t: i32, subset: Influence, bucket: Option<CaBucket>) -> Option<&CorrelationRow> {
        self.rows
            .iter()
            .find(|r| r.delta_t == delta_t && r.subset == subset && r.bucket == bucket)
    }

    pub fn rho(&self, delta_t: i32, subset: Influence, bucket: Option<CaBucket>) -> Option<f64> {
        self.get(delta_t, subset, bucket).and_then(|r| r.rho)
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let fail = |e: csv::Error| Error::Format(e.to_string());
        out.write_record(["property", "delta_t", "subset", "bucket", "n", "rho", "status"])
            .map_err(fail)?;
        for r in &self.rows {
            out.write_record([
                self.property.as_str().to_string(),
                r.delta_t.to_string(),
                r.subset.as_str().to_string(),
                r.bucket.map_or(String::new(), |b| b.as_str().to_string()),
                r.n.to_string(),
                r.rho.map_or(String::new(), |v| format!("{v:.6}")),
                r.status.as_str().to_string(),
            ])
            .map_err(fail)?;
        }
        out.flush().map_err(|e| Error::Format(e.to_string()))
    }
}

fn row(delta_t: i32, subset: Influence, bucket: Option<CaBucket>, xs: &[f64], ys: &[f64]) -> CorrelationRow {
    let n = xs.len();
    let (rho, status) = if n < MIN_SUBSET {
        (None, RowStatus::Insufficient)
    } else {
        match pearson(xs, ys) {
            Ok(r) => (Some(r), RowStatus::Ok),
            Err(_) => (None, RowStatus::Undefined),
        }
    };
    CorrelationRow {
        delta_t,
        subset,
        bucket,
        n,
        rho,
        status,
    }
}

/// Correlation of the property with LTSI for precomputed aggregates. Papers
/// whose window `T + Δt` passes the horizon are left out of that `Δt`.
pub fn correlation_table(
    corpus: &Corpus,
    aggregates: &[EcAggregates],
    property: Property,
    delta_ts: &[i32],
    bucketed: bool,
) -> Result<CorrelationTable> {
    let mut rows = Vec::new();
    for &dt in delta_ts {
        type Key = (Influence, Option<CaBucket>);
        let mut groups: BTreeMap<Key, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
        for subset in [Influence::Influential, Influence::NonInfluential] {
            if bucketed {
                for b in CaBucket::ALL {
                    groups.insert((subset, Some(b)), Default::default());
                }
            } else {
                groups.insert((subset, None), Default::default());
            }
        }
        for agg in aggregates {
            let target = match earlyciters::ltsi(corpus, agg.paper, dt) {
                Ok(v) => v as f64,
                Err(Error::Horizon { .. }) => continue,
                Err(e) => return Err(e),
            };
            let key = (property.influence(agg), bucketed.then_some(agg.bucket));
            let g = groups.get_mut(&key).expect("all keys preset");
            g.0.push(property.value(agg));
            g.1.push(target);
        }
        for ((subset, bucket), (xs, ys)) in groups {
            rows.push(row(dt, subset, bucket, &xs, &ys));
        }
    }
    Ok(CorrelationTable { property, rows })
}

pub fn correlation_study(corpus: &Corpus, property: Property, opts: &EcOptions, delta_ts: &[i32]) -> Result<CorrelationTable> {
    let aggs = earlyciters::ec_aggregates_all(corpus, opts)?;
    correlation_table(corpus, &aggs, property, delta_ts, false)
}

pub fn bucketed_correlation_study(
    corpus: &Corpus,
    property: Property,
    opts: &EcOptions,
    delta_ts: &[i32],
) -> Result<CorrelationTable> {
    let aggs = earlyciters::ec_aggregates_all(corpus, opts)?;
    correlation_table(corpus, &aggs, property, delta_ts, true)
}

/// Two papers with the same early citation count whose early citers fall on
/// opposite sides of the influence threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExamplePair {
    pub ecc: usize,
    pub influential: String,
    pub non_influential: String,
    pub influential_value: f64,
    pub non_influential_value: f64,
    pub influential_ltsi: usize,
    pub non_influential_ltsi: usize,
    /// `non_influential_ltsi - influential_ltsi`.
    pub gap: i64,
}

type Entry<'a> = (&'a EcAggregates, usize);

/// One pair per shared ECC value, the one with the largest LTSI gap in
/// favour of the non-influential paper; sorted by gap, largest first.
pub fn example_pairs(corpus: &Corpus, aggregates: &[EcAggregates], property: Property, delta_t: i32) -> Result<Vec<ExamplePair>> {
    let mut by_ecc: BTreeMap<usize, (Vec<Entry>, Vec<Entry>)> = BTreeMap::new();
    for agg in aggregates {
        let l = match earlyciters::ltsi(corpus, agg.paper, delta_t) {
            Ok(v) => v,
            Err(Error::Horizon { .. }) => continue,
            Err(e) => return Err(e),
        };
        let slot = by_ecc.entry(agg.ecc).or_default();
        match property.influence(agg) {
            Influence::Influential => slot.0.push((agg, l)),
            Influence::NonInfluential => slot.1.push((agg, l)),
        }
    }
    // Lowest LTSI first among influential, highest first among the rest;
    // paper id breaks ties.
    fn pick<'a>(v: &[Entry<'a>], low: bool) -> Option<Entry<'a>> {
        v.iter().copied().min_by(|a, b| {
            let o = if low { a.1.cmp(&b.1) } else { b.1.cmp(&a.1) };
            o.then_with(|| a.0.paper_id.cmp(&b.0.paper_id))
        })
    }
    let mut out: Vec<ExamplePair> = by_ecc
        .into_iter()
        .filter_map(|(ecc, (inf, non))| {
            let (a, la) = pick(&inf, true)?;
            let (b, lb) = pick(&non, false)?;
            Some(ExamplePair {
                ecc,
                influential: a.paper_id.clone(),
                non_influential: b.paper_id.clone(),
                influential_value: property.value(a),
                non_influential_value: property.value(b),
                influential_ltsi: la,
                non_influential_ltsi: lb,
                gap: lb as i64 - la as i64,
            })
        })
        .collect();
    out.sort_by(|a, b| b.gap.cmp(&a.gap).then(a.ecc.cmp(&b.ecc)));
    Ok(out)
}

pub fn mine_example_pairs(corpus: &Corpus, property: Property, delta_t: i32, opts: &EcOptions) -> Result<Vec<ExamplePair>> {
    let aggs = earlyciters::ec_aggregates_all(corpus, opts)?;
    example_pairs(corpus, &aggs, property, delta_t)
}

pub fn write_pairs_csv(pairs: &[ExamplePair], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for p in pairs {
        out.serialize(p).map_err(|e| Error::Format(e.to_string()))?;
    }
    out.flush().map_err(|e| Error::Format(e.to_string()))
}

/// Pairwise Pearson correlations between feature columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCorrelation {
    pub names: Vec<String>,
    /// `None` where either column has zero variance.
    pub values: Vec<Vec<Option<f64>>>,
    pub flagged: Vec<bool>,
}

pub fn feature_cross_correlation(rows: &[Vec<f64>], names: &[String]) -> Result<CrossCorrelation> {
    if rows.len() < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 rows, got {}", rows.len())));
    }
    let d = names.len();
    if let Some(i) = rows.iter().position(|r| r.len() != d) {
        return Err(Error::InvalidArgument(format!("row {i} has {} columns, expected {d}", rows[i].len())));
    }
    let cols: Vec<Vec<f64>> = (0..d).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let flagged: Vec<bool> = cols.iter().map(|c| c.iter().all(|v| *v == c[0])).collect();
    let mut values = vec![vec![None; d]; d];
    for i in 0..d {
        if flagged[i] {
            continue;
        }
        values[i][i] = Some(1.0);
        for j in i + 1..d {
            if flagged[j] {
                continue;
            }
            let r = pearson(&cols[i], &cols[j]).ok();
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CrossCorrelation {
        names: names.to_vec(),
        values,
        flagged,
    })
}

impl CrossCorrelation {
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let fail = |e: csv::Error| Error::Format(e.to_string());
        let mut header = vec!["feature".to_string()];
        header.extend(self.names.iter().cloned());
        out.write_record(&header).map_err(fail)?;
        for (name, row) in self.names.iter().zip(&self.values) {
            let mut rec = vec![name.clone()];
            rec.extend(row.iter().map(|v| v.map_or(String::new(), |x| format!("{x:.6}"))));
            out.write_record(&rec).map_err(fail)?;
        }
        out.flush().map_err(|e| Error::Format(e.to_string()))
    }
}
