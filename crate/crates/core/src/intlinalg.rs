//! Exact integer matrices, Smith normal form and finitely generated abelian
//! groups.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("minor size {requested} exceeds limit {limit}")]
    SizeLimitExceeded { requested: usize, limit: usize },
    #[error("torsion coefficients {0:?} are not in invariant-factor form")]
    NotCanonical(Vec<BigInt>),
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

/// Largest minor size [`minor_gcds`] accepts.
pub const MAX_MINOR_SIZE: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from row vectors. All rows must have equal length.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            entries.extend(row.iter().cloned().map(Into::into));
        }
        Self::new(rows.len(), cols, entries)
    }

    pub fn diagonal(values: &[BigInt]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntegerMatrix) -> Result<IntegerMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        Ok(bareiss_determinant(
            (0..self.rows).map(|i| self.row(i).to_vec()).collect(),
        ))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[target] += factor * row[src]
    fn add_row_multiple(&mut self, target: usize, src: usize, factor: &BigInt) {
        for j in 0..self.cols {
            let delta = factor * &self[(src, j)];
            self[(target, j)] += delta;
        }
    }

    /// col[target] += factor * col[src]
    fn add_col_multiple(&mut self, target: usize, src: usize, factor: &BigInt) {
        for i in 0..self.rows {
            let delta = factor * &self[(i, src)];
            self[(i, target)] += delta;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self[(i, j)]);
            self[(i, j)] = v;
        }
    }

    /// Replaces rows `a`, `b` by `[p q; r s] * [row_a; row_b]`.
    fn combine_rows(&mut self, a: usize, b: usize, coeffs: [&BigInt; 4]) {
        let [p, q, r, s] = coeffs;
        for j in 0..self.cols {
            let x = self[(a, j)].clone();
            let y = self[(b, j)].clone();
            self[(a, j)] = p * &x + q * &y;
            self[(b, j)] = r * &x + s * &y;
        }
    }

    /// `{"rows":r,"cols":c,"entries":[[..],..]}`; entries outside the i64 range
    /// are written as decimal strings.
    pub fn to_json_value(&self) -> Value {
        let entries: Vec<Value> = (0..self.rows)
            .map(|i| Value::Array(self.row(i).iter().map(int_to_json).collect()))
            .collect();
        json!({"rows": self.rows, "cols": self.cols, "entries": entries})
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json(text: &str) -> Result<Self, LinalgError> {
        let value: Value = serde_json::from_str(text).map_err(|e| LinalgError::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        Self::from_json_value(&value)
    }

    pub fn from_json_value(value: &Value) -> Result<Self, LinalgError> {
        let parse_err = |location: &str, message: &str| LinalgError::Parse {
            location: location.to_string(),
            message: message.to_string(),
        };
        let obj = value
            .as_object()
            .ok_or_else(|| parse_err("$", "expected an object"))?;
        if let Some(key) = obj
            .keys()
            .find(|k| !matches!(k.as_str(), "rows" | "cols" | "entries"))
        {
            return Err(parse_err(key, "unknown field"));
        }
        let dim = |key: &str| {
            obj.get(key)
                .and_then(Value::as_u64)
                .and_then(|v| usize::try_from(v).ok())
                .ok_or_else(|| parse_err(key, "expected a nonnegative integer"))
        };
        let rows = dim("rows")?;
        let cols = dim("cols")?;
        let list = obj
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err("entries", "expected an array of rows"))?;
        if list.len() != rows {
            return Err(parse_err(
                "entries",
                &format!("{} rows given, header says {rows}", list.len()),
            ));
        }
        let mut entries = Vec::with_capacity(rows * cols);
        for (i, row) in list.iter().enumerate() {
            let row = row
                .as_array()
                .ok_or_else(|| parse_err(&format!("entries[{i}]"), "expected an array"))?;
            if row.len() != cols {
                return Err(parse_err(
                    &format!("entries[{i}]"),
                    &format!("{} entries given, header says {cols}", row.len()),
                ));
            }
            for (j, v) in row.iter().enumerate() {
                entries.push(int_from_json(v).ok_or_else(|| {
                    parse_err(&format!("entries[{i}][{j}]"), "expected an integer")
                })?);
            }
        }
        Self::new(rows, cols, entries)
    }
}

impl std::ops::Index<(usize, usize)> for IntegerMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub(crate) fn int_to_json(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(x) => Value::from(x),
        None => Value::from(v.to_string()),
    }
}

pub(crate) fn int_from_json(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from)),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// `diagonal = left * A * right` with `left`, `right` unimodular and the
/// nonzero diagonal entries forming a divisibility chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub diagonal: IntegerMatrix,
    pub left: IntegerMatrix,
    pub right: IntegerMatrix,
}

impl SmithForm {
    /// The nonzero diagonal entries, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.diagonal.rows.min(self.diagonal.cols))
            .map(|i| self.diagonal[(i, i)].clone())
            .take_while(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "diagonal": self.diagonal.to_json_value(),
            "left": self.left.to_json_value(),
            "right": self.right.to_json_value(),
            "invariant_factors": self.invariant_factors().iter().map(int_to_json).collect::<Vec<_>>(),
        })
    }
}

/// Smith normal form with unimodular transforms.
///
/// Diagonalization picks the entry of least absolute value in the remaining
/// submatrix as pivot (ties to the lowest row, then column) and clears its row
/// and column by Euclidean division, re-pivoting whenever a remainder survives.
/// A final pass replaces diagonal pairs violating divisibility by their gcd
/// and lcm.
pub fn smith_normal_form(a: &IntegerMatrix) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut left = IntegerMatrix::identity(m);
    let mut right = IntegerMatrix::identity(n);

    let mut rank = 0;
    for t in 0..m.min(n) {
        while let Some((pi, pj)) = min_pivot(&d, t) {
            d.swap_rows(t, pi);
            left.swap_rows(t, pi);
            d.swap_cols(t, pj);
            right.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&d[(t, t)]);
                d.add_row_multiple(i, t, &q);
                left.add_row_multiple(i, t, &q);
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&d[(t, t)]);
                d.add_col_multiple(j, t, &q);
                right.add_col_multiple(j, t, &q);
                clean &= d[(t, j)].is_zero();
            }
            if clean {
                break;
            }
        }
        if d[(t, t)].is_zero() {
            break;
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            left.negate_row(t);
        }
        rank += 1;
    }

    for i in 0..rank {
        for j in i + 1..rank {
            if !d[(j, j)].is_multiple_of(&d[(i, i)]) {
                repair_pair(&mut d, &mut left, &mut right, i, j);
            }
        }
    }

    SmithForm {
        diagonal: d,
        left,
        right,
    }
}

fn min_pivot(d: &IntegerMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows {
        for j in t..d.cols {
            let v = &d[(i, j)];
            if v.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| v.abs() < d[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

// diag(a, b) -> diag(gcd, lcm) on positions i < j, both positive.
fn repair_pair(
    d: &mut IntegerMatrix,
    left: &mut IntegerMatrix,
    right: &mut IntegerMatrix,
    i: usize,
    j: usize,
) {
    let a = d[(i, i)].clone();
    let b = d[(j, j)].clone();
    let egcd = a.extended_gcd(&b);
    let (g, s, t) = (egcd.gcd, egcd.x, egcd.y);

    // column i += column j gives [[a, 0], [b, b]]
    d.add_col_multiple(i, j, &BigInt::one());
    right.add_col_multiple(i, j, &BigInt::one());

    // rows by [[s, t], [-b/g, a/g]], determinant (sa + tb)/g = 1
    let r = -(&b / &g);
    let w = &a / &g;
    d.combine_rows(i, j, [&s, &t, &r, &w]);
    left.combine_rows(i, j, [&s, &t, &r, &w]);

    // now [[g, tb], [0, ab/g]]; clear the off-diagonal entry
    let q = -(&d[(i, j)] / &g);
    d.add_col_multiple(j, i, &q);
    right.add_col_multiple(j, i, &q);
}

pub fn rank(a: &IntegerMatrix) -> usize {
    smith_normal_form(a).rank()
}

/// Nullity of `a` acting on column vectors: `cols - rank`.
pub fn kernel_rank(a: &IntegerMatrix) -> usize {
    a.cols - rank(a)
}

/// Cokernel of the lattice spanned by the rows of `a` inside `Z^ambient_rank`.
/// Columns beyond `a.cols()` are treated as zero.
pub fn cokernel(a: &IntegerMatrix, ambient_rank: usize) -> Result<AbelianGroup, LinalgError> {
    if a.cols > ambient_rank {
        return Err(LinalgError::DimensionMismatch(format!(
            "matrix has {} columns but ambient rank is {ambient_rank}",
            a.cols
        )));
    }
    let snf = smith_normal_form(a);
    let factors = snf.invariant_factors();
    Ok(AbelianGroup {
        free_rank: ambient_rank - factors.len(),
        torsion: factors.into_iter().filter(|d| !d.is_one()).collect(),
    })
}

/// `Δ_i` = gcd of all `i x i` minors for `i = 1..=max_size`, zero when all vanish.
pub fn minor_gcds(a: &IntegerMatrix, max_size: usize) -> Result<Vec<BigInt>, LinalgError> {
    let limit = MAX_MINOR_SIZE.min(a.rows.min(a.cols));
    if max_size > limit {
        return Err(LinalgError::SizeLimitExceeded {
            requested: max_size,
            limit,
        });
    }
    let mut out = Vec::with_capacity(max_size);
    for size in 1..=max_size {
        let mut g = BigInt::zero();
        for rows in combinations(a.rows, size) {
            for cols in combinations(a.cols, size) {
                let sub: Vec<Vec<BigInt>> = rows
                    .iter()
                    .map(|&i| cols.iter().map(|&j| a[(i, j)].clone()).collect())
                    .collect();
                g = g.gcd(&bareiss_determinant(sub));
            }
        }
        out.push(g);
    }
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// `Z^free_rank ⊕ Z/d_1 ⊕ ... ⊕ Z/d_s` with `2 <= d_1 | d_2 | ... | d_s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AbelianGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl AbelianGroup {
    /// Accepts only canonical data.
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Result<Self, LinalgError> {
        let two = BigInt::from(2);
        let chain = torsion.iter().all(|d| *d >= two)
            && torsion.windows(2).all(|w| w[1].is_multiple_of(&w[0]));
        if !chain {
            return Err(LinalgError::NotCanonical(torsion));
        }
        Ok(Self { free_rank, torsion })
    }

    pub fn free(rank: usize) -> Self {
        Self {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn trivial() -> Self {
        Self::default()
    }

    /// Canonical form of `Z^free_rank ⊕ Z/o_1 ⊕ ...` for arbitrary orders.
    /// Order 0 contributes a free summand, orders ±1 vanish.
    pub fn from_cyclic_orders<I>(free_rank: usize, orders: I) -> Self
    where
        I: IntoIterator,
        I::Item: Into<BigInt>,
    {
        let mut free_rank = free_rank;
        let mut ds: Vec<BigInt> = Vec::new();
        for o in orders {
            let o = o.into().abs();
            if o.is_zero() {
                free_rank += 1;
            } else if !o.is_one() {
                ds.push(o);
            }
        }
        for i in 0..ds.len() {
            for j in i + 1..ds.len() {
                if !ds[j].is_multiple_of(&ds[i]) {
                    let g = ds[i].gcd(&ds[j]);
                    let l = ds[i].lcm(&ds[j]);
                    ds[i] = g;
                    ds[j] = l;
                }
            }
        }
        ds.retain(|d| !d.is_one());
        Self {
            free_rank,
            torsion: ds,
        }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "free_rank": self.free_rank,
            "torsion": self.torsion.iter().map(int_to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json_value(value: &Value) -> Result<Self, LinalgError> {
        let err = |location: &str, message: &str| LinalgError::Parse {
            location: location.to_string(),
            message: message.to_string(),
        };
        let free_rank = value
            .get("free_rank")
            .and_then(Value::as_u64)
            .and_then(|v| usize::try_from(v).ok())
            .ok_or_else(|| err("free_rank", "expected a nonnegative integer"))?;
        let torsion = value
            .get("torsion")
            .and_then(Value::as_array)
            .ok_or_else(|| err("torsion", "expected an array"))?
            .iter()
            .enumerate()
            .map(|(i, v)| {
                int_from_json(v).ok_or_else(|| err(&format!("torsion[{i}]"), "expected an integer"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(free_rank, torsion)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" (+) "))
        }
    }
}
