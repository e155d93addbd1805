//! Compressed-row matrices over a DG block sparsity pattern.

use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Row structure shared by every operator assembled on one mesh/space.
#[derive(Debug, PartialEq, Eq)]
pub struct Pattern {
    pub n: usize,
    pub row_offsets: Vec<usize>,
    pub col_indices: Vec<usize>,
}

impl Pattern {
    /// Builds the pattern from element-level couplings: DoF block `i` is
    /// coupled to block `j` whenever `(i, j)` or `(j, i)` is listed. Every
    /// element is coupled to itself.
    pub fn from_block_couplings(n_elements: usize, block: usize, couplings: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut neighbors: Vec<Vec<usize>> = (0..n_elements).map(|e| vec![e]).collect();
        for (i, j) in couplings {
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        let n = n_elements * block;
        let mut row_offsets = Vec::with_capacity(n + 1);
        let mut col_indices = Vec::new();
        row_offsets.push(0);
        for nb in neighbors.iter_mut() {
            nb.sort_unstable();
            nb.dedup();
            for _ in 0..block {
                for &e in nb.iter() {
                    col_indices.extend(e * block..(e + 1) * block);
                }
                row_offsets.push(col_indices.len());
            }
        }
        Self { n, row_offsets, col_indices }
    }

    pub fn nnz(&self) -> usize {
        self.col_indices.len()
    }

    pub fn position(&self, row: usize, col: usize) -> Option<usize> {
        let lo = self.row_offsets[row];
        let hi = self.row_offsets[row + 1];
        self.col_indices[lo..hi].binary_search(&col).ok().map(|k| lo + k)
    }
}

/// Square CSR matrix. Entries can only be added inside the pattern.
#[derive(Clone, Debug)]
pub struct SparseMatrix {
    pattern: Arc<Pattern>,
    pub values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(pattern: Arc<Pattern>) -> Self {
        let nnz = pattern.nnz();
        Self { pattern, values: vec![0.0; nnz] }
    }

    /// Identity on an explicit diagonal pattern.
    pub fn identity(n: usize) -> Self {
        let pattern = Arc::new(Pattern::from_block_couplings(n, 1, std::iter::empty()));
        Self { pattern, values: vec![1.0; n] }
    }

    /// Dense row-major input; zero entries are dropped.
    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut row_offsets = vec![0];
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        for r in rows {
            for (j, &v) in r.iter().enumerate() {
                if v != 0.0 {
                    col_indices.push(j);
                    values.push(v);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Self { pattern: Arc::new(Pattern { n, row_offsets, col_indices }), values }
    }

    pub fn pattern(&self) -> &Arc<Pattern> {
        &self.pattern
    }

    pub fn n(&self) -> usize {
        self.pattern.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.pattern.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.pattern.col_indices
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.pattern.row_offsets[i]..self.pattern.row_offsets[i + 1];
        self.pattern.col_indices[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pattern.position(row, col).map_or(0.0, |k| self.values[k])
    }

    /// Adds `value` at `(row, col)`.
    ///
    /// Panics if the entry lies outside the pattern.
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        let k = self
            .pattern
            .position(row, col)
            .unwrap_or_else(|| panic!("entry ({row}, {col}) outside sparsity pattern"));
        self.values[k] += value;
    }

    /// Adds a dense local block with contiguous row and column ranges.
    pub fn add_block(&mut self, row0: usize, col0: usize, block: &[f64], cols: usize) {
        let rows = block.len() / cols;
        for i in 0..rows {
            let start = self
                .pattern
                .position(row0 + i, col0)
                .unwrap_or_else(|| panic!("block ({}, {col0}) outside sparsity pattern", row0 + i));
            // Element blocks are contiguous within a row.
            debug_assert_eq!(self.pattern.col_indices[start + cols - 1], col0 + cols - 1);
            for j in 0..cols {
                self.values[start + j] += block[i * cols + j];
            }
        }
    }

    /// `self + s * other`; both must share the same pattern.
    pub fn add_scaled(&self, s: f64, other: &SparseMatrix) -> SparseMatrix {
        assert!(Arc::ptr_eq(&self.pattern, &other.pattern) || self.pattern == other.pattern, "pattern mismatch");
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + s * b).collect();
        SparseMatrix { pattern: self.pattern.clone(), values }
    }

    pub fn scale(&self, s: f64) -> SparseMatrix {
        SparseMatrix { pattern: self.pattern.clone(), values: self.values.iter().map(|v| s * v).collect() }
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        let p = &*self.pattern;
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in p.row_offsets[i]..p.row_offsets[i + 1] {
                acc += self.values[k] * x[p.col_indices[k]];
            }
            *yi = acc;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n()];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(self.mul_vec(y)).map(|(a, b)| a * b).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max_{ij} |a_ij - a_ji|`, with entries missing on one side read as zero.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n() {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n()]; self.n()];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }

    /// Text dump: a header `n nnz`, then one `row col value` line per
    /// stored entry (0-based).
    pub fn write_text(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "{} {}", self.n(), self.nnz())?;
        for i in 0..self.n() {
            for (j, v) in self.row(i) {
                writeln!(w, "{i} {j} {v:.17e}")?;
            }
        }
        Ok(())
    }

    /// Parses [`write_text`](Self::write_text) output.
    pub fn read_text(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::Config(format!("matrix dump: {m}"));
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty"))?;
        let mut it = header.split_whitespace().map(str::parse::<usize>);
        let (n, nnz) = match (it.next(), it.next()) {
            (Some(Ok(n)), Some(Ok(z))) => (n, z),
            _ => return Err(bad("bad header")),
        };
        let mut rows = vec![Vec::new(); n];
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(bad("bad entry line"));
            }
            let i: usize = f[0].parse().map_err(|_| bad("row"))?;
            let j: usize = f[1].parse().map_err(|_| bad("col"))?;
            let v: f64 = f[2].parse().map_err(|_| bad("value"))?;
            if i >= n || j >= n {
                return Err(bad("index out of range"));
            }
            rows[i].push((j, v));
        }
        let mut row_offsets = vec![0];
        let mut col_indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for mut r in rows {
            r.sort_by_key(|e| e.0);
            for (j, v) in r {
                col_indices.push(j);
                values.push(v);
            }
            row_offsets.push(col_indices.len());
        }
        if values.len() != nnz {
            return Err(bad("entry count does not match header"));
        }
        Ok(Self { pattern: Arc::new(Pattern { n, row_offsets, col_indices }), values })
    }
}
