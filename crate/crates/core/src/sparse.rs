//! Binary CSR playlist-track matrix with a lazily built CSC mirror.
//!
//! Rows are playlists, columns are tracks, and an entry is present exactly
//! when the (deduplicated) playlist contains the track. Item-item similarity
//! needs column slices, so the transpose is materialized on first column
//! access and cached.

use std::sync::OnceLock;

/// Compressed sparse row matrix over binary entries.
#[derive(Debug, Default)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    indptr: Vec<u64>,
    indices: Vec<u32>,
    csc: OnceLock<CscMirror>,
}

#[derive(Debug)]
struct CscMirror {
    indptr: Vec<u64>,
    indices: Vec<u32>,
}

impl Clone for CsrMatrix {
    fn clone(&self) -> Self {
        // The CSC mirror is derived state; the clone rebuilds it on demand.
        CsrMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            csc: OnceLock::new(),
        }
    }
}

impl PartialEq for CsrMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n_rows == other.n_rows
            && self.n_cols == other.n_cols
            && self.indptr == other.indptr
            && self.indices == other.indices
    }
}

impl CsrMatrix {
    /// Build from per-row column lists. Each row is deduplicated and sorted.
    pub fn from_rows(n_cols: usize, rows: &[Vec<u32>]) -> Self {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        indptr.push(0u64);
        for row in rows {
            let mut cols = row.clone();
            cols.sort_unstable();
            cols.dedup();
            indices.extend_from_slice(&cols);
            indptr.push(indices.len() as u64);
        }
        CsrMatrix {
            n_rows: rows.len(),
            n_cols,
            indptr,
            indices,
            csc: OnceLock::new(),
        }
    }

    /// Reassemble from raw CSR arrays (snapshot loading), validating the
    /// structural invariants `from_rows` guarantees by construction.
    pub fn from_parts(
        n_rows: usize,
        n_cols: usize,
        indptr: Vec<u64>,
        indices: Vec<u32>,
    ) -> Result<Self, String> {
        if indptr.len() != n_rows + 1 {
            return Err(format!("indptr has {} entries, want {}", indptr.len(), n_rows + 1));
        }
        if indptr[0] != 0 || *indptr.last().unwrap() != indices.len() as u64 {
            return Err("indptr endpoints do not bracket the index array".into());
        }
        if indptr.windows(2).any(|w| w[0] > w[1]) {
            return Err("indptr is not nondecreasing".into());
        }
        for r in 0..n_rows {
            let row = &indices[indptr[r] as usize..indptr[r + 1] as usize];
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("row {r} is not strictly ascending"));
            }
            if row.last().is_some_and(|&c| c as usize >= n_cols) {
                return Err(format!("row {r} has column index out of range"));
            }
        }
        Ok(CsrMatrix {
            n_rows,
            n_cols,
            indptr,
            indices,
            csc: OnceLock::new(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn indptr(&self) -> &[u64] {
        &self.indptr
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    /// Sorted column indices of one row.
    pub fn row(&self, r: usize) -> &[u32] {
        let lo = self.indptr[r] as usize;
        let hi = self.indptr[r + 1] as usize;
        &self.indices[lo..hi]
    }

    pub fn row_nnz(&self, r: usize) -> usize {
        (self.indptr[r + 1] - self.indptr[r]) as usize
    }

    /// Sorted row indices of one column, from the lazily built CSC mirror.
    pub fn col(&self, c: usize) -> &[u32] {
        let csc = self.csc.get_or_init(|| self.build_csc());
        let lo = csc.indptr[c] as usize;
        let hi = csc.indptr[c + 1] as usize;
        &csc.indices[lo..hi]
    }

    pub fn col_nnz(&self, c: usize) -> usize {
        let csc = self.csc.get_or_init(|| self.build_csc());
        (csc.indptr[c + 1] - csc.indptr[c]) as usize
    }

    fn build_csc(&self) -> CscMirror {
        let mut counts = vec![0u64; self.n_cols + 1];
        for &c in &self.indices {
            counts[c as usize + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let indptr = counts.clone();
        let mut cursor = counts;
        let mut indices = vec![0u32; self.indices.len()];
        for r in 0..self.n_rows {
            for &c in self.row(r) {
                let slot = cursor[c as usize];
                indices[slot as usize] = r as u32;
                cursor[c as usize] += 1;
            }
        }
        CscMirror { indptr, indices }
    }
}
