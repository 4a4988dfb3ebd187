//! Per-paper reports: a JSON document and a static HTML page.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corpus::Corpus;
use crate::earlyciters::{self, CoAuthorCache, EcOptions};
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, FeatureSlot};
use crate::models::{ModelKind, TrainedModel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaperInfo {
    pub id: String,
    pub title: String,
    pub year: i32,
    pub venue: String,
    pub authors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Citer {
    pub author: String,
    pub class: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EcSection {
    pub ecc: usize,
    pub pc: f64,
    pub cc: f64,
    pub ca: f64,
    pub bucket: String,
    pub citers: Vec<Citer>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub predicted: f64,
    /// `None` when `T + Δt` lies past the corpus horizon.
    pub actual: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaperReport {
    pub paper: PaperInfo,
    pub ec: EcSection,
    pub features: BTreeMap<String, f64>,
    pub predictions: BTreeMap<String, BTreeMap<i32, Prediction>>,
}

/// A trained model together with the slots it reads.
pub struct ReportModel<'a> {
    pub kind: ModelKind,
    pub delta_t: i32,
    pub model: &'a TrainedModel,
    pub slots: &'a [FeatureSlot],
}

pub fn build_report(
    corpus: &Corpus,
    features: &FeatureMatrix,
    models: &[ReportModel],
    paper_id: &str,
    ec: &EcOptions,
) -> Result<PaperReport> {
    let p = corpus.paper_idx(paper_id)?;
    let v = features
        .row(paper_id)
        .ok_or_else(|| Error::InvalidArgument(format!("paper `{paper_id}` has no feature row")))?;
    let rec = corpus.paper(p);
    let mut cache = CoAuthorCache::default();
    let g = cache.get(corpus, corpus.year(p) + ec.delta);
    let agg = earlyciters::ec_aggregates(corpus, g, p, ec)?;
    let citers = earlyciters::classify_early_citers(corpus, p, ec.delta, &ec.thresholds)?
        .into_iter()
        .map(|(a, class)| Citer {
            author: corpus.author_id(a).to_string(),
            class: class.as_str().to_string(),
        })
        .collect();

    let mut predictions: BTreeMap<String, BTreeMap<i32, Prediction>> = BTreeMap::new();
    for m in models {
        let predicted = m.model.predict_row(&v.select(m.slots))?;
        let actual = match earlyciters::ltsi(corpus, p, m.delta_t) {
            Ok(n) => Some(n),
            Err(Error::Horizon { .. }) => None,
            Err(e) => return Err(e),
        };
        predictions
            .entry(m.kind.as_str().to_string())
            .or_default()
            .insert(m.delta_t, Prediction { predicted, actual });
    }
    Ok(PaperReport {
        paper: PaperInfo {
            id: rec.id.clone(),
            title: rec.title.clone(),
            year: rec.year,
            venue: rec.venue.clone(),
            authors: rec.authors.clone(),
        },
        ec: EcSection {
            ecc: agg.ecc,
            pc: agg.pc,
            cc: agg.cc,
            ca: agg.ca,
            bucket: agg.bucket.as_str().to_string(),
            citers,
        },
        features: FeatureSlot::ALL.iter().map(|s| (s.name().to_string(), v.get(*s))).collect(),
        predictions,
    })
}

impl PaperReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

/// Checks a parsed `report.json` against the published schema.
pub fn validate_report(doc: &Value) -> Result<()> {
    let fail = |m: String| Err(Error::Format(format!("report.json: {m}")));
    let Some(top) = doc.as_object() else {
        return fail("top level is not an object".into());
    };
    for key in ["paper", "ec", "predictions"] {
        if !top.contains_key(key) {
            return fail(format!("missing `{key}`"));
        }
    }
    let Some(paper) = top["paper"].as_object() else {
        return fail("`paper` is not an object".into());
    };
    if !paper.get("id").is_some_and(Value::is_string) {
        return fail("`paper.id` must be a string".into());
    }
    let Some(ec) = top["ec"].as_object() else {
        return fail("`ec` is not an object".into());
    };
    if !ec.get("ecc").is_some_and(|v| v.is_u64()) {
        return fail("`ec.ecc` must be a nonnegative integer".into());
    }
    for key in ["pc", "cc", "ca"] {
        if !ec.get(key).is_some_and(Value::is_number) {
            return fail(format!("`ec.{key}` must be a number"));
        }
    }
    if !ec.get("bucket").and_then(Value::as_str).is_some_and(|b| ["BUCKET1", "BUCKET2", "BUCKET3"].contains(&b)) {
        return fail("`ec.bucket` must be BUCKET1, BUCKET2 or BUCKET3".into());
    }
    let Some(citers) = ec.get("citers").and_then(Value::as_array) else {
        return fail("`ec.citers` must be an array".into());
    };
    for (i, c) in citers.iter().enumerate() {
        let ok = c.get("author").is_some_and(Value::is_string)
            && c.get("class").and_then(Value::as_str).is_some_and(|s| s == "influential" || s == "non_influential");
        if !ok {
            return fail(format!("`ec.citers[{i}]` needs a string author and an influence class"));
        }
    }
    let Some(preds) = top["predictions"].as_object() else {
        return fail("`predictions` is not an object".into());
    };
    for (model, series) in preds {
        if model.parse::<ModelKind>().is_err() {
            return fail(format!("unknown model `{model}`"));
        }
        let Some(series) = series.as_object() else {
            return fail(format!("`predictions.{model}` is not an object"));
        };
        for (dt, point) in series {
            if dt.parse::<i32>().is_err() {
                return fail(format!("`predictions.{model}` key `{dt}` is not an integer"));
            }
            if !point.get("predicted").is_some_and(Value::is_number) {
                return fail(format!("`predictions.{model}.{dt}.predicted` must be a number"));
            }
            match point.get("actual") {
                Some(a) if a.is_null() || a.is_u64() => {}
                _ => return fail(format!("`predictions.{model}.{dt}.actual` must be an integer or null")),
            }
        }
    }
    Ok(())
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// One SVG chart per model: predicted series as a line, actual counts as
/// dots.
fn chart(model: &str, series: &BTreeMap<i32, Prediction>, color: &str) -> String {
    let (w, h, pad) = (420.0, 220.0, 36.0);
    let xs: Vec<f64> = series.keys().map(|&d| d as f64).collect();
    let ys = series.values().flat_map(|p| [Some(p.predicted), p.actual.map(|a| a as f64)]).flatten();
    let y_max = ys.fold(1.0f64, f64::max) * 1.1;
    let (x_min, x_max) = (xs.first().copied().unwrap_or(0.0), xs.last().copied().unwrap_or(1.0));
    let span = if x_max > x_min { x_max - x_min } else { 1.0 };
    let px = |x: f64| pad + (x - x_min) / span * (w - 2.0 * pad);
    let py = |y: f64| h - pad - y.max(0.0) / y_max * (h - 2.0 * pad);
    let mut s = String::new();
    let _ = write!(
        s,
        "<figure><figcaption>{}</figcaption><svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        escape(model)
    );
    let _ = write!(
        s,
        "<line x1=\"{pad}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"#888\"/><line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{0}\" stroke=\"#888\"/>",
        h - pad,
        w - pad
    );
    let _ = write!(s, "<text x=\"4\" y=\"{}\" font-size=\"10\">{:.0}</text>", pad, y_max);
    let points: Vec<String> = series.iter().map(|(&d, p)| format!("{:.2},{:.2}", px(d as f64), py(p.predicted))).collect();
    let _ = write!(s, "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>", points.join(" "));
    for (&d, p) in series {
        let _ = write!(
            s,
            "<text x=\"{:.2}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{d}</text>",
            px(d as f64),
            h - pad + 14.0
        );
        if let Some(a) = p.actual {
            let _ = write!(s, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"#000\"/>", px(d as f64), py(a as f64));
        }
    }
    s.push_str("</svg></figure>\n");
    s
}

/// A self-contained page; identical reports render to identical bytes.
pub fn render_html(r: &PaperReport) -> String {
    let mut s = String::new();
    let title = escape(&r.paper.title);
    let _ = write!(
        s,
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>{title}</title>\n<style>body{{font-family:sans-serif;max-width:900px;margin:2em auto}}table{{border-collapse:collapse}}td,th{{border:1px solid #ccc;padding:2px 8px;text-align:left}}figure{{display:inline-block;margin:8px}}</style></head><body>\n"
    );
    let _ = writeln!(s, "<h1>{title}</h1>");
    let _ = writeln!(
        s,
        "<p>{} &middot; {} &middot; {} &middot; {}</p>",
        escape(&r.paper.id),
        r.paper.year,
        escape(&r.paper.venue),
        escape(&r.paper.authors.join(", "))
    );
    s.push_str("<h2>Early citers</h2>\n<table>\n");
    let _ = writeln!(s, "<tr><th>ECC</th><td>{}</td></tr>", r.ec.ecc);
    let _ = writeln!(s, "<tr><th>PC</th><td>{:.3}</td></tr>", r.ec.pc);
    let _ = writeln!(s, "<tr><th>CC</th><td>{:.3}</td></tr>", r.ec.cc);
    let _ = writeln!(s, "<tr><th>CA</th><td>{:.3}</td></tr>", r.ec.ca);
    let _ = writeln!(s, "<tr><th>Bucket</th><td>{}</td></tr>", escape(&r.ec.bucket));
    s.push_str("</table>\n<table>\n<tr><th>Author</th><th>Class</th></tr>\n");
    for c in &r.ec.citers {
        let _ = writeln!(s, "<tr><td>{}</td><td>{}</td></tr>", escape(&c.author), escape(&c.class));
    }
    s.push_str("</table>\n<h2>Predicted and actual citations</h2>\n<p>Lines: predicted. Dots: actual.</p>\n");
    for (i, (model, series)) in r.predictions.iter().enumerate() {
        s.push_str(&chart(model, series, COLORS[i % COLORS.len()]));
    }
    s.push_str("<table>\n<tr><th>Model</th><th>&Delta;t</th><th>Predicted</th><th>Actual</th></tr>\n");
    for (model, series) in &r.predictions {
        for (dt, p) in series {
            let actual = p.actual.map_or("n/a".to_string(), |a| a.to_string());
            let _ = writeln!(
                s,
                "<tr><td>{}</td><td>{dt}</td><td>{:.2}</td><td>{actual}</td></tr>",
                escape(model),
                p.predicted
            );
        }
    }
    s.push_str("</table>\n<h2>Features</h2>\n<table>\n");
    for (name, v) in &r.features {
        let _ = writeln!(s, "<tr><th>{}</th><td>{v:.6}</td></tr>", escape(name));
    }
    s.push_str("</table>\n</body></html>\n");
    s
}
