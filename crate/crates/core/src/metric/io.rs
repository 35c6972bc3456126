use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{MeasuredMetricSpace, MetricError, MetricSpace, Norm};

/// Input encodings understood by [`load_metric`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    /// Dense distance matrix, optional header row of labels.
    Csv,
    /// `{"labels", "distances", "measure"}` or `{"points", "metric"}`.
    Json,
    /// Weighted graph, one `u v w` edge per line, closed under shortest paths.
    EdgeList,
}

impl InputFormat {
    pub fn from_extension(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(InputFormat::Csv),
            "json" => Some(InputFormat::Json),
            "txt" | "edges" | "el" => Some(InputFormat::EdgeList),
            _ => None,
        }
    }

    pub fn parse_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "csv" => Some(InputFormat::Csv),
            "json" => Some(InputFormat::Json),
            "edges" | "edgelist" | "edge-list" => Some(InputFormat::EdgeList),
            _ => None,
        }
    }
}

/// Reads a measured metric space from disk. The format is taken from the
/// argument or guessed from the extension, defaulting to JSON.
pub fn load_metric(path: &Path, format: Option<InputFormat>) -> Result<MeasuredMetricSpace, MetricError> {
    let text = std::fs::read_to_string(path).map_err(|e| MetricError::Io(format!("{}: {e}", path.display())))?;
    match format.or_else(|| InputFormat::from_extension(path)).unwrap_or(InputFormat::Json) {
        InputFormat::Csv => parse_csv(&text),
        InputFormat::Json => parse_json(&text),
        InputFormat::EdgeList => parse_edge_list(&text),
    }
}

fn parse_number(s: &str) -> Result<f64, MetricError> {
    let v: f64 = s.trim().parse().map_err(|_| MetricError::Parse(format!("not a number: {s:?}")))?;
    Ok(v)
}

/// Dense CSV matrix. A first row that does not parse as numbers is taken as
/// labels. The measure is counting measure.
pub fn parse_csv(text: &str) -> Result<MeasuredMetricSpace, MetricError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| MetricError::Parse(e.to_string()))?;
        records.push(rec.iter().map(str::to_string).collect::<Vec<_>>());
    }
    let mut labels = None;
    if let Some(first) = records.first() {
        if first.iter().any(|f| f.parse::<f64>().is_err()) {
            labels = Some(records.remove(0));
        }
    }
    let rows = records
        .iter()
        .map(|r| r.iter().map(|s| parse_number(s)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut space = MetricSpace::from_rows(&rows)?;
    if let Some(l) = labels {
        if l.len() != space.len() {
            return Err(MetricError::Parse(format!("{} labels for {} points", l.len(), space.len())));
        }
        space = space.with_labels(l);
    }
    Ok(MeasuredMetricSpace::counting(space))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonInput {
    labels: Option<Vec<String>>,
    distances: Option<Vec<Vec<f64>>>,
    points: Option<Vec<Vec<f64>>>,
    metric: Option<Norm>,
    measure: Option<Vec<f64>>,
}

/// JSON input: either an explicit matrix or coordinates with a norm.
pub fn parse_json(text: &str) -> Result<MeasuredMetricSpace, MetricError> {
    let input: JsonInput = serde_json::from_str(text).map_err(|e| MetricError::Parse(e.to_string()))?;
    let mut space = match (input.distances, input.points) {
        (Some(d), None) => MetricSpace::from_rows(&d)?,
        (None, Some(p)) => MetricSpace::from_points(&p, input.metric.unwrap_or(Norm::L2))?,
        _ => return Err(MetricError::Parse("expected exactly one of \"distances\" or \"points\"".into())),
    };
    if let Some(l) = input.labels {
        if l.len() != space.len() {
            return Err(MetricError::Parse(format!("{} labels for {} points", l.len(), space.len())));
        }
        space = space.with_labels(l);
    }
    match input.measure {
        Some(mu) => MeasuredMetricSpace::new(space, mu),
        None => Ok(MeasuredMetricSpace::counting(space)),
    }
}

/// Edge list `u v w`, blank lines and `#` comments ignored. Distances are
/// shortest-path lengths; parallel edges keep the lightest weight.
pub fn parse_edge_list(text: &str) -> Result<MeasuredMetricSpace, MetricError> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(MetricError::Parse(format!("line {}: expected `u v w`", lineno + 1)));
        }
        let w = parse_number(parts[2])?;
        if !w.is_finite() || w < 0.0 {
            return Err(MetricError::Parse(format!("line {}: weight must be finite and nonnegative", lineno + 1)));
        }
        let mut id = |s: &str| {
            let next = labels.len();
            *ids.entry(s.to_string()).or_insert_with(|| {
                labels.push(s.to_string());
                next
            })
        };
        let (u, v) = (id(parts[0]), id(parts[1]));
        edges.push((u, v, w));
    }
    let n = labels.len();
    if n == 0 {
        return Err(MetricError::Empty);
    }
    let mut d = vec![f64::INFINITY; n * n];
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for (u, v, w) in edges {
        if u != v && w < d[u * n + v] {
            d[u * n + v] = w;
            d[v * n + u] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = dik + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    if let Some(pos) = d.iter().position(|v| v.is_infinite()) {
        return Err(MetricError::DisconnectedGraph(labels[pos / n].clone(), labels[pos % n].clone()));
    }
    let space = MetricSpace::from_flat(n, d)?.with_labels(labels);
    Ok(MeasuredMetricSpace::counting(space))
}

#[derive(Serialize)]
struct JsonOutput<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<&'a [String]>,
    distances: Vec<&'a [f64]>,
    measure: &'a [f64],
}

/// Serializes a measured space in the JSON input format.
pub fn metric_to_json(m: &MeasuredMetricSpace) -> String {
    let out = JsonOutput {
        labels: m.space.labels(),
        distances: (0..m.len()).map(|i| m.space.row(i)).collect(),
        measure: &m.mu,
    };
    crate::report::canonical_json(&out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_with_header() {
        let m = parse_csv("a,b,c\n0,1,2\n1,0,1\n2,1,0\n").unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.space.label(2), "c");
        assert_eq!(m.space.d(0, 2), 2.0);
    }

    #[test]
    fn csv_rejects_nan() {
        assert!(matches!(parse_csv("0,NaN\nNaN,0\n"), Err(MetricError::NonFinite(0, 1))));
    }

    #[test]
    fn json_points_and_matrix() {
        let m = parse_json(r#"{"points": [[0,0],[3,4]], "metric": "l1"}"#).unwrap();
        assert_eq!(m.space.d(0, 1), 7.0);
        let m = parse_json(r#"{"distances": [[0,1],[1,0]], "measure": [2, 3]}"#).unwrap();
        assert_eq!(m.total(), 5.0);
        assert!(parse_json(r#"{"distances": [[0,1],[1,0]], "measure": [2, -3]}"#).is_err());
    }

    #[test]
    fn edge_list_shortest_paths() {
        let m = parse_edge_list("# path\na b 1\nb c 2\n").unwrap();
        assert_eq!(m.space.d(0, 2), 3.0);
        assert!(matches!(parse_edge_list("a b 1\nc d 1\n"), Err(MetricError::DisconnectedGraph(_, _))));
    }

    #[test]
    fn json_round_trip() {
        let m = parse_json(r#"{"labels":["x","y"],"distances": [[0,0.1],[0.1,0]], "measure": [0.5, 3]}"#).unwrap();
        let back = parse_json(&metric_to_json(&m)).unwrap();
        assert_eq!(back, m);
    }
}
