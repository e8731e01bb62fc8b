use crate::diag::{GraphForm, WeightedMeasure1D};
use crate::metric::FiniteMetricSpace;
use crate::{Error, Result};
use std::collections::HashMap;
use std::path::Path;

/// Header plus data rows, each row tagged with its 1-based file line.
struct Sheet {
    header: Vec<String>,
    rows: Vec<(usize, Vec<String>)>,
}

fn read_sheet(path: &Path) -> Result<Sheet> {
    let mut rd = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::Io(std::io::Error::other(format!("{}: {e}", path.display()))))?;
    let parse_err = |e: csv::Error| {
        let row = e.position().map_or(0, |p| p.line() as usize);
        Error::Parse { row, col: 0, msg: e.to_string() }
    };
    let header = rd.headers().map_err(parse_err)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(parse_err)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(Sheet { header, rows })
}

fn number(s: &str, row: usize, col: usize) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::Parse { row, col, msg: format!("'{s}' is not a number") })
}

/// Reads `id,x,y,...` coordinates, or a square distance matrix whose header repeats the row ids.
pub fn ingest_points(path: &Path) -> Result<FiniteMetricSpace> {
    let sheet = read_sheet(path)?;
    if sheet.rows.is_empty() {
        return Err(Error::EmptySpace);
    }
    let ids: Vec<String> = sheet.rows.iter().map(|r| r.1[0].clone()).collect();
    let is_matrix = sheet.header.len() == ids.len() + 1 && sheet.header[1..] == ids[..];
    let mut values = Vec::with_capacity(ids.len() * (sheet.header.len() - 1));
    for (line, rec) in &sheet.rows {
        for (j, s) in rec.iter().enumerate().skip(1) {
            values.push(number(s, *line, j + 1)?);
        }
    }
    let line_of = |i: usize| sheet.rows[i].0;
    let shift = |e: Error| match e {
        // library errors index rows/columns of the data; report file positions instead
        Error::Invariant { row, col, msg } => Error::Invariant { row: line_of(row - 1), col: col + 1, msg },
        other => other,
    };
    if is_matrix {
        FiniteMetricSpace::from_matrix(ids, values).map_err(shift)
    } else {
        let width = sheet.header.len() - 1;
        if width == 0 {
            return Err(Error::Parse { row: 1, col: 2, msg: "no coordinate columns".into() });
        }
        let coords = values.chunks(width).map(<[f64]>::to_vec).collect();
        FiniteMetricSpace::euclidean(ids, coords).map_err(shift)
    }
}

/// Reads a two-column `x,g` density sampled on an increasing grid.
pub fn ingest_density(path: &Path) -> Result<WeightedMeasure1D> {
    let sheet = read_sheet(path)?;
    if sheet.header.len() != 2 {
        return Err(Error::Parse { row: 1, col: sheet.header.len(), msg: "expected two columns x,g".into() });
    }
    let mut x = Vec::new();
    let mut g = Vec::new();
    for (line, rec) in &sheet.rows {
        x.push(number(&rec[0], *line, 1)?);
        g.push(number(&rec[1], *line, 2)?);
    }
    WeightedMeasure1D::new(x, g).map_err(|e| match e {
        Error::Invariant { row, col, msg } => Error::Invariant { row: sheet.rows[row - 1].0, col, msg },
        other => other,
    })
}

/// Reads `kind,a,b,value` rows: `e,u,v,c` adds conductance c on {u,v}; `m,u,,m` sets the mass of u.
///
/// Vertex ids are the labels in order of first appearance; unset masses default to 1.
pub fn ingest_graph(path: &Path) -> Result<GraphForm> {
    let sheet = read_sheet(path)?;
    if sheet.header.len() != 4 {
        return Err(Error::Parse { row: 1, col: sheet.header.len(), msg: "expected columns kind,a,b,value".into() });
    }
    let mut ids: Vec<String> = Vec::new();
    let mut lookup: HashMap<String, usize> = HashMap::new();
    let mut intern = |s: &str| -> usize {
        *lookup.entry(s.to_string()).or_insert_with(|| {
            ids.push(s.to_string());
            ids.len() - 1
        })
    };
    let mut edges = Vec::new();
    let mut masses: Vec<(usize, usize, f64)> = Vec::new();
    for (line, rec) in &sheet.rows {
        let value = number(&rec[3], *line, 4)?;
        match rec[0].as_str() {
            "e" => {
                if !(value.is_finite() && value > 0.0) {
                    return Err(Error::Invariant { row: *line, col: 4, msg: format!("conductance {value} must be positive") });
                }
                if rec[1] == rec[2] {
                    return Err(Error::Invariant { row: *line, col: 3, msg: "self-loop".into() });
                }
                let (u, v) = (intern(&rec[1]), intern(&rec[2]));
                edges.push((u, v, value));
            }
            "m" => {
                if !(value.is_finite() && value > 0.0) {
                    return Err(Error::Invariant { row: *line, col: 4, msg: format!("mass {value} must be positive") });
                }
                masses.push((*line, intern(&rec[1]), value));
            }
            other => return Err(Error::Parse { row: *line, col: 1, msg: format!("unknown row kind '{other}'") }),
        }
    }
    let mut measure = vec![1.0; ids.len()];
    for (_, v, m) in masses {
        measure[v] = m;
    }
    GraphForm::new(ids, edges, measure)
}
