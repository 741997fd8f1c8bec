//! Row-parallel matrix kernels with sequential fallbacks.
//!
//! Every parallel kernel splits the work by output row and runs the same
//! inner loop as its sequential twin, so results are bit-identical whether
//! or not the `parallel` feature is enabled. The benches compare both.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many output rows the rayon dispatch overhead dominates.
pub const PAR_MIN_ROWS: usize = 64;

#[inline]
pub(crate) fn use_parallel(rows: usize) -> bool {
    cfg!(feature = "parallel") && rows >= PAR_MIN_ROWS
}

/// out = a (n x k) * b (k x m), row-major, sequential.
pub fn matmul_seq(a: &[f64], n: usize, k: usize, b: &[f64], m: usize, out: &mut [f64]) {
    debug_assert_eq!(a.len(), n * k);
    debug_assert_eq!(b.len(), k * m);
    debug_assert_eq!(out.len(), n * m);
    for (row_a, row_out) in a.chunks_exact(k).zip(out.chunks_exact_mut(m)) {
        matmul_row(row_a, b, m, row_out);
    }
}

/// out = a (n x k) * b (k x m), rows computed in parallel.
#[cfg(feature = "parallel")]
pub fn matmul_par(a: &[f64], n: usize, k: usize, b: &[f64], m: usize, out: &mut [f64]) {
    debug_assert_eq!(a.len(), n * k);
    debug_assert_eq!(b.len(), k * m);
    debug_assert_eq!(out.len(), n * m);
    a.par_chunks_exact(k)
        .zip(out.par_chunks_exact_mut(m))
        .for_each(|(row_a, row_out)| matmul_row(row_a, b, m, row_out));
}

#[inline]
fn matmul_row(row_a: &[f64], b: &[f64], m: usize, row_out: &mut [f64]) {
    row_out.fill(0.0);
    for (aik, row_b) in row_a.iter().zip(b.chunks_exact(m)) {
        for (o, bkj) in row_out.iter_mut().zip(row_b) {
            *o += aik * bkj;
        }
    }
}

/// out = a^T (k x n)^T... out (k x m) = a (n x k)^T * b (n x m): the
/// gradient contraction over the batch dimension.
pub fn matmul_tn_seq(a: &[f64], n: usize, k: usize, b: &[f64], m: usize, out: &mut [f64]) {
    debug_assert_eq!(a.len(), n * k);
    debug_assert_eq!(b.len(), n * m);
    debug_assert_eq!(out.len(), k * m);
    for (i, row_out) in out.chunks_exact_mut(m).enumerate() {
        matmul_tn_row(a, k, b, m, i, row_out);
    }
}

/// Parallel twin of [`matmul_tn_seq`], split over output rows.
#[cfg(feature = "parallel")]
pub fn matmul_tn_par(a: &[f64], n: usize, k: usize, b: &[f64], m: usize, out: &mut [f64]) {
    debug_assert_eq!(a.len(), n * k);
    debug_assert_eq!(b.len(), n * m);
    debug_assert_eq!(out.len(), k * m);
    out.par_chunks_exact_mut(m)
        .enumerate()
        .for_each(|(i, row_out)| matmul_tn_row(a, k, b, m, i, row_out));
}

#[inline]
fn matmul_tn_row(a: &[f64], k: usize, b: &[f64], m: usize, i: usize, row_out: &mut [f64]) {
    row_out.fill(0.0);
    for (row_a, row_b) in a.chunks_exact(k).zip(b.chunks_exact(m)) {
        let aji = row_a[i];
        for (o, bjm) in row_out.iter_mut().zip(row_b) {
            *o += aji * bjm;
        }
    }
}

/// out (n x m) = a (n x k) * b (m x k)^T: dot products of row pairs.
pub fn matmul_nt_seq(a: &[f64], n: usize, k: usize, b: &[f64], m: usize, out: &mut [f64]) {
    debug_assert_eq!(a.len(), n * k);
    debug_assert_eq!(b.len(), m * k);
    debug_assert_eq!(out.len(), n * m);
    for (row_a, row_out) in a.chunks_exact(k).zip(out.chunks_exact_mut(m)) {
        matmul_nt_row(row_a, b, k, row_out);
    }
}

/// Parallel twin of [`matmul_nt_seq`].
#[cfg(feature = "parallel")]
pub fn matmul_nt_par(a: &[f64], n: usize, k: usize, b: &[f64], m: usize, out: &mut [f64]) {
    debug_assert_eq!(a.len(), n * k);
    debug_assert_eq!(b.len(), m * k);
    debug_assert_eq!(out.len(), n * m);
    a.par_chunks_exact(k)
        .zip(out.par_chunks_exact_mut(m))
        .for_each(|(row_a, row_out)| matmul_nt_row(row_a, b, k, row_out));
}

#[inline]
fn matmul_nt_row(row_a: &[f64], b: &[f64], k: usize, row_out: &mut [f64]) {
    for (o, row_b) in row_out.iter_mut().zip(b.chunks_exact(k)) {
        let mut acc = 0.0;
        for (x, y) in row_a.iter().zip(row_b) {
            acc += x * y;
        }
        *o = acc;
    }
}
