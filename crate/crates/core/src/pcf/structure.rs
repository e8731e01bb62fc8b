//! Self-similar structures, words and level-n vertex networks.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// Tolerance for identifying vertices of user-supplied structures.
pub const FLOAT_IDENT_TOL: f64 = 1e-12;

/// A word over the alphabet `0..|S|`, printed as e.g. `"0213"`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Lexicographic index among words of the same length.
    pub fn index(&self, alphabet: usize) -> usize {
        self.0.iter().fold(0, |acc, &c| acc * alphabet + c as usize)
    }

    pub fn from_index(mut idx: usize, len: usize, alphabet: usize) -> Self {
        let mut v = vec![0u8; len];
        for k in (0..len).rev() {
            v[k] = (idx % alphabet) as u8;
            idx /= alphabet;
        }
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn parse(s: &str, alphabet: usize) -> Result<Self> {
        let mut v = Vec::with_capacity(s.len());
        for ch in s.chars() {
            let d = ch
                .to_digit(36)
                .filter(|&d| (d as usize) < alphabet)
                .ok_or_else(|| Error::Param(format!("bad letter {ch:?} in word {s:?}")))?;
            v.push(d as u8);
        }
        Ok(Word(v))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in &self.0 {
            write!(f, "{}", std::char::from_digit(c as u32, 36).unwrap_or('?'))?;
        }
        Ok(())
    }
}

/// Affine contraction x ↦ q + ratio·L(x − q).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ContractionMap {
    pub fixed_point: Vec<f64>,
    pub ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<Vec<Vec<f64>>>,
}

impl ContractionMap {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let q = &self.fixed_point;
        let y: Vec<f64> = x.iter().zip(q).map(|(a, b)| a - b).collect();
        let ly = match &self.linear {
            Some(l) => l.iter().map(|row| row.iter().zip(&y).map(|(a, b)| a * b).sum()).collect(),
            None => y,
        };
        q.iter().zip(&ly).map(|(q, v)| q + self.ratio * v).collect()
    }
}

/// Integer data for structures whose maps all have ratio 1/m and integer fixed points.
#[derive(Clone, Debug)]
struct ExactForm {
    m: i64,
    q: Vec<Vec<i64>>,
    v0: Vec<Vec<i64>>,
}

/// Serialized form of a structure.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructureFile {
    pub name: String,
    pub maps: Vec<ContractionMap>,
    pub v0: Vec<Vec<f64>>,
    pub d: Vec<Vec<f64>>,
    pub r: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SelfSimilarStructure {
    pub name: String,
    pub maps: Vec<ContractionMap>,
    pub v0: Vec<Vec<f64>>,
    exact: Option<ExactForm>,
}

fn as_int(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() < 1e-15 && r.abs() < 1e12).then_some(r as i64)
}

impl SelfSimilarStructure {
    /// Build a structure; integer data with common ratio 1/m switches on exact vertex identification.
    pub fn new(name: &str, maps: Vec<ContractionMap>, v0: Vec<Vec<f64>>) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::Param("need at least two maps".into()));
        }
        if v0.is_empty() {
            return Err(Error::Param("V0 must be nonempty".into()));
        }
        let dim = v0[0].len();
        for m in &maps {
            if m.fixed_point.len() != dim || !(m.ratio > 0.0 && m.ratio < 1.0) {
                return Err(Error::Param("maps must be contractions in the ambient dimension".into()));
            }
        }
        if v0.iter().any(|p| p.len() != dim) {
            return Err(Error::Param("V0 points must share one dimension".into()));
        }
        let exact = Self::detect_exact(&maps, &v0);
        Ok(SelfSimilarStructure { name: name.to_string(), maps, v0, exact })
    }

    fn detect_exact(maps: &[ContractionMap], v0: &[Vec<f64>]) -> Option<ExactForm> {
        if maps.iter().any(|m| m.linear.is_some()) {
            return None;
        }
        let m = as_int(1.0 / maps[0].ratio)?;
        if m < 2 || maps.iter().any(|mp| (mp.ratio * m as f64 - 1.0).abs() > 1e-14) {
            return None;
        }
        let q = maps
            .iter()
            .map(|mp| mp.fixed_point.iter().map(|&x| as_int(x)).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        let v0 = v0
            .iter()
            .map(|p| p.iter().map(|&x| as_int(x)).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(ExactForm { m, q, v0 })
    }

    pub fn alphabet(&self) -> usize {
        self.maps.len()
    }

    pub fn n_boundary(&self) -> usize {
        self.v0.len()
    }

    pub fn dim(&self) -> usize {
        self.v0[0].len()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// F_w(x) in floating point.
    pub fn apply_word(&self, w: &Word, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for &c in w.0.iter().rev() {
            y = self.maps[c as usize].apply(&y);
        }
        y
    }

    /// Integer numerators of F_w(V0) over the denominator m^|w| (exact structures only).
    pub fn exact_cell_vertices(&self, w: &Word) -> Option<(i64, Vec<Vec<i64>>)> {
        let ex = self.exact.as_ref()?;
        let mut pts = ex.v0.clone();
        let mut den = 1i64;
        for &c in w.0.iter().rev() {
            let q = &ex.q[c as usize];
            let shift = den * ex.m - den;
            for p in pts.iter_mut() {
                for (x, qi) in p.iter_mut().zip(q) {
                    *x += qi * shift;
                }
            }
            den *= ex.m;
        }
        Some((den, pts))
    }

    /// Integer numerators of F_w(x) over m^|w| for an integer point x (exact structures only).
    pub fn exact_image(&self, w: &Word, x: &[i64]) -> Option<(i64, Vec<i64>)> {
        let ex = self.exact.as_ref()?;
        let mut p = x.to_vec();
        let mut den = 1i64;
        for &c in w.0.iter().rev() {
            let shift = den * ex.m - den;
            for (xi, qi) in p.iter_mut().zip(&ex.q[c as usize]) {
                *xi += qi * shift;
            }
            den *= ex.m;
        }
        Some((den, p))
    }

    pub fn to_file(&self, hs: &super::HarmonicStructure) -> StructureFile {
        StructureFile {
            name: self.name.clone(),
            maps: self.maps.clone(),
            v0: self.v0.clone(),
            d: (0..hs.d.nrows()).map(|i| hs.d.row(i).iter().copied().collect()).collect(),
            r: hs.r.clone(),
        }
    }
}

/// Sierpiński gasket SG_N: vertices e_0..e_N of the standard simplex in ℝ^{N+1}, ratio ½.
pub fn sierpinski_structure(n: usize) -> Result<SelfSimilarStructure> {
    if n < 2 {
        return Err(Error::Param(format!("SG_N needs N >= 2, got {n}")));
    }
    let pts: Vec<Vec<f64>> = (0..=n)
        .map(|i| (0..=n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let maps = pts
        .iter()
        .map(|q| ContractionMap { fixed_point: q.clone(), ratio: 0.5, linear: None })
        .collect();
    SelfSimilarStructure::new(&format!("sg{n}"), maps, pts)
}

/// Vicsek cross: centre q0 and corners q1..q4 of [−1,1]², ratio 1/3, V0 = corners.
pub fn vicsek_structure() -> SelfSimilarStructure {
    let q = [[0.0, 0.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]];
    let maps = q
        .iter()
        .map(|p| ContractionMap { fixed_point: p.to_vec(), ratio: 1.0 / 3.0, linear: None })
        .collect();
    let v0 = q[1..].iter().map(|p| p.to_vec()).collect();
    SelfSimilarStructure::new("vicsek", maps, v0).expect("static data")
}

/// Unit interval as two halves.
pub fn interval_structure() -> SelfSimilarStructure {
    let maps = vec![
        ContractionMap { fixed_point: vec![0.0], ratio: 0.5, linear: None },
        ContractionMap { fixed_point: vec![1.0], ratio: 0.5, linear: None },
    ];
    SelfSimilarStructure::new("interval", maps, vec![vec![0.0], vec![1.0]]).expect("static data")
}

/// Vertex set V_n with cell incidences.
#[derive(Clone, Debug)]
pub struct LevelNetwork {
    pub level: usize,
    pub alphabet: usize,
    pub n_boundary: usize,
    /// `cells[idx * |V0| + j]` is the id of F_w(q_j) for the word with index `idx`.
    pub cells: Vec<usize>,
    pub coords: Vec<Vec<f64>>,
    /// Identification keys (exact numerators, or quantized floats).
    keys: HashMap<Vec<i64>, Vec<usize>>,
    exact_den: Option<i64>,
}

impl LevelNetwork {
    pub fn n_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len() / self.n_boundary
    }

    pub fn cell(&self, idx: usize) -> &[usize] {
        &self.cells[idx * self.n_boundary..(idx + 1) * self.n_boundary]
    }

    /// Id of the vertex at floating coordinates `x`, if present.
    pub fn find(&self, x: &[f64]) -> Option<usize> {
        match self.exact_den {
            Some(den) => {
                let key: Vec<i64> = x.iter().map(|&v| (v * den as f64).round() as i64).collect();
                self.keys.get(&key).and_then(|v| v.first().copied())
            }
            None => find_float(&self.keys, &self.coords, x),
        }
    }

    /// Id of F_w(q_j) for a word of length ≤ level.
    pub fn vertex_of(&self, ss: &SelfSimilarStructure, w: &Word, j: usize) -> Option<usize> {
        if let (Some(den), Some(ex)) = (self.exact_den, ss.exact.as_ref()) {
            let (d, p) = ss.exact_image(w, &ex.v0[j])?;
            let scale = den / d;
            let key: Vec<i64> = p.iter().map(|v| v * scale).collect();
            return self.keys.get(&key).and_then(|v| v.first().copied());
        }
        self.find(&ss.apply_word(w, &ss.v0[j]))
    }
}

fn quantize(x: &[f64]) -> Vec<i64> {
    x.iter().map(|v| (v / FLOAT_IDENT_TOL).round() as i64).collect()
}

fn find_float(keys: &HashMap<Vec<i64>, Vec<usize>>, coords: &[Vec<f64>], x: &[f64]) -> Option<usize> {
    let base = quantize(x);
    let d = base.len();
    let total = 3usize.pow(d as u32);
    for code in 0..total {
        let mut key = base.clone();
        let mut c = code;
        for k in key.iter_mut() {
            *k += (c % 3) as i64 - 1;
            c /= 3;
        }
        if let Some(ids) = keys.get(&key) {
            for &id in ids {
                let dist = coords[id].iter().zip(x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                if dist <= FLOAT_IDENT_TOL {
                    return Some(id);
                }
            }
        }
    }
    None
}

/// Build V_n: boundary points get ids 0..|V0|, then cells in lexicographic order.
pub fn build_level(ss: &SelfSimilarStructure, n: usize) -> LevelNetwork {
    let s = ss.alphabet();
    let nb = ss.n_boundary();
    let mut keys: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let mut coords: Vec<Vec<f64>> = Vec::new();
    let n_cells = s.pow(n as u32);
    let mut cells = Vec::with_capacity(n_cells * nb);
    if let Some(ex) = ss.exact.as_ref() {
        let den = ex.m.pow(n as u32);
        // numerators of F_w(V0) over m^k, built by prepending letters
        let mut cur: Vec<Vec<i64>> = ex.v0.clone();
        let mut cur_den = 1i64;
        for _ in 0..n {
            let shift = cur_den * ex.m - cur_den;
            let mut next = Vec::with_capacity(cur.len() * s);
            for q in &ex.q {
                for p in &cur {
                    next.push(p.iter().zip(q).map(|(x, qi)| x + qi * shift).collect());
                }
            }
            cur = next;
            cur_den *= ex.m;
        }
        let mut insert = |key: Vec<i64>, coords: &mut Vec<Vec<f64>>| -> usize {
            if let Some(v) = keys.get(&key) {
                return v[0];
            }
            let id = coords.len();
            coords.push(key.iter().map(|&v| v as f64 / den as f64).collect());
            keys.insert(key, vec![id]);
            id
        };
        for p in &ex.v0 {
            let key = p.iter().map(|v| v * den).collect();
            insert(key, &mut coords);
        }
        for p in cur {
            cells.push(insert(p, &mut coords));
        }
        LevelNetwork { level: n, alphabet: s, n_boundary: nb, cells, coords, keys, exact_den: Some(den) }
    } else {
        let mut cur: Vec<Vec<f64>> = ss.v0.clone();
        for _ in 0..n {
            let mut next = Vec::with_capacity(cur.len() * s);
            for m in &ss.maps {
                for p in &cur {
                    next.push(m.apply(p));
                }
            }
            cur = next;
        }
        let insert = |x: Vec<f64>, coords: &mut Vec<Vec<f64>>, keys: &mut HashMap<Vec<i64>, Vec<usize>>| {
            if let Some(id) = find_float(keys, coords, &x) {
                return id;
            }
            let id = coords.len();
            keys.entry(quantize(&x)).or_default().push(id);
            coords.push(x);
            id
        };
        for p in ss.v0.clone() {
            insert(p, &mut coords, &mut keys);
        }
        for p in cur {
            let id = insert(p, &mut coords, &mut keys);
            cells.push(id);
        }
        LevelNetwork { level: n, alphabet: s, n_boundary: nb, cells, coords, keys, exact_den: None }
    }
}
