//! Block-diagonal symmetric matrices and the dense kernels the solver needs.

/// One block of a block-diagonal symmetric matrix.
#[derive(Clone, PartialEq, Debug)]
pub enum Block {
    /// Dense symmetric block, row-major `dim × dim`.
    Dense { dim: usize, data: Vec<f64> },
    /// Diagonal block.
    Diag { data: Vec<f64> },
}

impl Block {
    fn zeros_for(size: i64) -> Block {
        if size < 0 {
            Block::Diag {
                data: vec![0.0; (-size) as usize],
            }
        } else {
            let dim = size as usize;
            Block::Dense {
                dim,
                data: vec![0.0; dim * dim],
            }
        }
    }
}

/// Block-diagonal symmetric matrix over a fixed block structure.
#[derive(Clone, PartialEq, Debug)]
pub struct BlockMat {
    pub blocks: Vec<Block>,
}

/// One sparse coefficient of a constraint or objective matrix, 0-based, with
/// `i ≤ j` addressing the upper triangle (the mirror entry is implied).
#[derive(Clone, Copy, Debug)]
pub struct SparseEntry {
    pub i: usize,
    pub j: usize,
    pub v: f64,
}

/// A sparse symmetric block-diagonal matrix: entries grouped per block.
#[derive(Clone, Debug, Default)]
pub struct SparseMat {
    pub by_block: Vec<Vec<SparseEntry>>,
}

impl SparseMat {
    pub fn empty(nblocks: usize) -> SparseMat {
        SparseMat {
            by_block: vec![Vec::new(); nblocks],
        }
    }

    pub fn push(&mut self, block: usize, i: usize, j: usize, v: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.by_block[block].push(SparseEntry { i, j, v });
    }

    pub fn frob_norm(&self) -> f64 {
        let mut s = 0.0;
        for entries in &self.by_block {
            for e in entries {
                s += if e.i == e.j { e.v * e.v } else { 2.0 * e.v * e.v };
            }
        }
        s.sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for entries in &mut self.by_block {
            for e in entries {
                e.v *= factor;
            }
        }
    }
}

impl BlockMat {
    pub fn zeros(sizes: &[i64]) -> BlockMat {
        BlockMat {
            blocks: sizes.iter().map(|&s| Block::zeros_for(s)).collect(),
        }
    }

    pub fn identity(sizes: &[i64], tau: f64) -> BlockMat {
        let mut m = BlockMat::zeros(sizes);
        for block in &mut m.blocks {
            match block {
                Block::Dense { dim, data } => {
                    for i in 0..*dim {
                        data[i * *dim + i] = tau;
                    }
                }
                Block::Diag { data } => data.fill(tau),
            }
        }
        m
    }

    /// Total side length, diagonal blocks included.
    pub fn total_dim(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| match b {
                Block::Dense { dim, .. } => *dim,
                Block::Diag { data } => data.len(),
            })
            .sum()
    }

    /// `self += factor · A` for sparse symmetric `A`.
    pub fn add_sparse(&mut self, a: &SparseMat, factor: f64) {
        for (block, entries) in self.blocks.iter_mut().zip(&a.by_block) {
            match block {
                Block::Dense { dim, data } => {
                    for e in entries {
                        data[e.i * *dim + e.j] += factor * e.v;
                        if e.i != e.j {
                            data[e.j * *dim + e.i] += factor * e.v;
                        }
                    }
                }
                Block::Diag { data } => {
                    for e in entries {
                        debug_assert_eq!(e.i, e.j, "off-diagonal entry in diagonal block");
                        data[e.i] += factor * e.v;
                    }
                }
            }
        }
    }

    /// `self = a·self + f·other`, entrywise.
    pub fn scale_add(&mut self, a: f64, other: &BlockMat, f: f64) {
        for (mine, theirs) in self.blocks.iter_mut().zip(&other.blocks) {
            match (mine, theirs) {
                (Block::Dense { data, .. }, Block::Dense { data: od, .. }) => {
                    for (x, y) in data.iter_mut().zip(od) {
                        *x = a * *x + f * *y;
                    }
                }
                (Block::Diag { data }, Block::Diag { data: od }) => {
                    for (x, y) in data.iter_mut().zip(od) {
                        *x = a * *x + f * *y;
                    }
                }
                _ => panic!("mismatched block kinds"),
            }
        }
    }

    /// Symmetrizes dense blocks in place: `B ← (B + Bᵀ)/2`.
    pub fn symmetrize(&mut self) {
        for block in &mut self.blocks {
            if let Block::Dense { dim, data } = block {
                for i in 0..*dim {
                    for j in (i + 1)..*dim {
                        let avg = 0.5 * (data[i * *dim + j] + data[j * *dim + i]);
                        data[i * *dim + j] = avg;
                        data[j * *dim + i] = avg;
                    }
                }
            }
        }
    }

    pub fn frob_norm(&self) -> f64 {
        let mut s = 0.0;
        for block in &self.blocks {
            match block {
                Block::Dense { data, .. } => {
                    for v in data {
                        s += v * v;
                    }
                }
                Block::Diag { data } => {
                    for v in data {
                        s += v * v;
                    }
                }
            }
        }
        s.sqrt()
    }

    /// `tr(A · self)` for sparse symmetric `A`.
    pub fn trace_sparse(&self, a: &SparseMat) -> f64 {
        let mut s = 0.0;
        for (block, entries) in self.blocks.iter().zip(&a.by_block) {
            match block {
                Block::Dense { dim, data } => {
                    for e in entries {
                        let x = data[e.i * dim + e.j];
                        s += if e.i == e.j { e.v * x } else { 2.0 * e.v * x };
                    }
                }
                Block::Diag { data } => {
                    for e in entries {
                        s += e.v * data[e.i];
                    }
                }
            }
        }
        s
    }

    /// `tr(A · G)` where `A` is sparse symmetric and `G` is a general (not
    /// necessarily symmetric) block matrix of the same structure:
    /// `tr(A G) = Σ_{i≤j} a_ij (G_ji + [i≠j] G_ij)`.
    pub fn trace_sparse_general(&self, a: &SparseMat) -> f64 {
        let mut s = 0.0;
        for (block, entries) in self.blocks.iter().zip(&a.by_block) {
            match block {
                Block::Dense { dim, data } => {
                    for e in entries {
                        s += e.v * data[e.j * dim + e.i];
                        if e.i != e.j {
                            s += e.v * data[e.i * dim + e.j];
                        }
                    }
                }
                Block::Diag { data } => {
                    for e in entries {
                        s += e.v * data[e.i];
                    }
                }
            }
        }
        s
    }

    /// `tr(self · other)` for two symmetric block matrices.
    pub fn trace_full(&self, other: &BlockMat) -> f64 {
        let mut s = 0.0;
        for (mine, theirs) in self.blocks.iter().zip(&other.blocks) {
            match (mine, theirs) {
                (Block::Dense { data, .. }, Block::Dense { data: od, .. }) => {
                    for (x, y) in data.iter().zip(od) {
                        s += x * y;
                    }
                }
                (Block::Diag { data }, Block::Diag { data: od }) => {
                    for (x, y) in data.iter().zip(od) {
                        s += x * y;
                    }
                }
                _ => panic!("mismatched block kinds"),
            }
        }
        s
    }

    /// Per-block product `self · other` (dense × dense, diag × diag).
    pub fn mul(&self, other: &BlockMat) -> BlockMat {
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| match (a, b) {
                (Block::Dense { dim, data }, Block::Dense { data: od, .. }) => {
                    Block::Dense {
                        dim: *dim,
                        data: dense_mul(*dim, data, od),
                    }
                }
                (Block::Diag { data }, Block::Diag { data: od }) => Block::Diag {
                    data: data.iter().zip(od).map(|(x, y)| x * y).collect(),
                },
                _ => panic!("mismatched block kinds"),
            })
            .collect();
        BlockMat { blocks }
    }

    /// Attempted Cholesky factorization of every block; `None` if any block
    /// is not positive definite.
    pub fn cholesky(&self) -> Option<Cholesky> {
        let mut factors = Vec::with_capacity(self.blocks.len());
        for block in &self.blocks {
            match block {
                Block::Dense { dim, data } => {
                    let mut l = data.clone();
                    if !dense_cholesky(*dim, &mut l) {
                        return None;
                    }
                    factors.push(Block::Dense { dim: *dim, data: l });
                }
                Block::Diag { data } => {
                    if data.iter().any(|&v| v <= 0.0) {
                        return None;
                    }
                    factors.push(Block::Diag { data: data.clone() });
                }
            }
        }
        Some(Cholesky { factors })
    }
}

/// Lower-triangular Cholesky factors, one per block (diagonal blocks keep
/// their original positive diagonal).
pub struct Cholesky {
    factors: Vec<Block>,
}

impl Cholesky {
    /// The full inverse of the factored matrix, as a symmetric block matrix.
    pub fn inverse(&self) -> BlockMat {
        let blocks = self
            .factors
            .iter()
            .map(|f| match f {
                Block::Dense { dim, data } => {
                    let inv = dense_cholesky_inverse(*dim, data);
                    Block::Dense { dim: *dim, data: inv }
                }
                Block::Diag { data } => Block::Diag {
                    data: data.iter().map(|v| 1.0 / v).collect(),
                },
            })
            .collect();
        BlockMat { blocks }
    }
}

/// Row-major dense product `a · b` for `dim × dim` matrices.
pub fn dense_mul(dim: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik == 0.0 {
                continue;
            }
            let row = &b[k * dim..(k + 1) * dim];
            let dst = &mut out[i * dim..(i + 1) * dim];
            for (d, s) in dst.iter_mut().zip(row) {
                *d += aik * s;
            }
        }
    }
    out
}

/// In-place lower Cholesky of a row-major symmetric matrix; `false` if a
/// pivot fails to be strictly positive.
pub fn dense_cholesky(dim: usize, a: &mut [f64]) -> bool {
    for j in 0..dim {
        let mut d = a[j * dim + j];
        for k in 0..j {
            d -= a[j * dim + k] * a[j * dim + k];
        }
        if d <= 0.0 || !d.is_finite() {
            return false;
        }
        let d = d.sqrt();
        a[j * dim + j] = d;
        for i in (j + 1)..dim {
            let mut v = a[i * dim + j];
            for k in 0..j {
                v -= a[i * dim + k] * a[j * dim + k];
            }
            a[i * dim + j] = v / d;
        }
    }
    // Zero the strict upper triangle so the factor is cleanly lower.
    for i in 0..dim {
        for j in (i + 1)..dim {
            a[i * dim + j] = 0.0;
        }
    }
    true
}

/// Inverse of the matrix with lower Cholesky factor `l`.
fn dense_cholesky_inverse(dim: usize, l: &[f64]) -> Vec<f64> {
    // Solve L W = I column by column, then L^T V = W; V is the inverse.
    let mut inv = vec![0.0; dim * dim];
    let mut col = vec![0.0; dim];
    for c in 0..dim {
        col.fill(0.0);
        col[c] = 1.0;
        // Forward substitution.
        for i in 0..dim {
            let mut v = col[i];
            for k in 0..i {
                v -= l[i * dim + k] * col[k];
            }
            col[i] = v / l[i * dim + i];
        }
        // Backward substitution with L^T.
        for i in (0..dim).rev() {
            let mut v = col[i];
            for k in (i + 1)..dim {
                v -= l[k * dim + i] * col[k];
            }
            col[i] = v / l[i * dim + i];
        }
        for r in 0..dim {
            inv[r * dim + c] = col[r];
        }
    }
    // Clean up symmetry drift.
    for i in 0..dim {
        for j in (i + 1)..dim {
            let avg = 0.5 * (inv[i * dim + j] + inv[j * dim + i]);
            inv[i * dim + j] = avg;
            inv[j * dim + i] = avg;
        }
    }
    inv
}

/// Largest step `α ∈ [0, 1]` with `S + α·dS ⪰ 0` (to bisection accuracy),
/// assuming `S ≻ 0`.
pub fn max_step(s: &BlockMat, ds: &BlockMat) -> f64 {
    // Diagonal blocks admit a closed form; dense blocks get a Cholesky
    // bisection.  The overall step is the minimum over blocks, so assemble
    // trial matrices block by block via the full-matrix test for simplicity.
    let mut trial = s.clone();
    trial.scale_add(1.0, ds, 1.0);
    if trial.cholesky().is_some() {
        return 1.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let mut trial = s.clone();
        trial.scale_add(1.0, ds, mid);
        if trial.cholesky().is_some() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_and_inverse() {
        // A = [[4,2],[2,3]] has Cholesky [[2,0],[1,sqrt(2)]].
        let mut a = vec![4.0, 2.0, 2.0, 3.0];
        assert!(dense_cholesky(2, &mut a));
        assert!((a[0] - 2.0).abs() < 1e-12);
        assert!((a[2] - 1.0).abs() < 1e-12);
        assert!((a[3] - 2.0_f64.sqrt()).abs() < 1e-12);
        let inv = dense_cholesky_inverse(2, &a);
        // inverse of [[4,2],[2,3]] is 1/8·[[3,-2],[-2,4]].
        assert!((inv[0] - 3.0 / 8.0).abs() < 1e-12);
        assert!((inv[1] + 2.0 / 8.0).abs() < 1e-12);
        assert!((inv[3] - 4.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn indefinite_rejected() {
        let mut a = vec![1.0, 2.0, 2.0, 1.0];
        assert!(!dense_cholesky(2, &mut a));
    }

    #[test]
    fn step_length() {
        let s = BlockMat::identity(&[2], 1.0);
        let mut ds = BlockMat::zeros(&[2]);
        let mut sp = SparseMat::empty(1);
        sp.push(0, 0, 0, -2.0);
        ds.add_sparse(&sp, 1.0);
        // 1 − 2α ≥ 0 → α ≤ 1/2.
        let alpha = max_step(&s, &ds);
        assert!((alpha - 0.5).abs() < 1e-6);
    }
}
