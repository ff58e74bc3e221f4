//! Dense complex linear algebra helpers: matrix exponential and Kronecker products.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

pub fn norm1(a: &DMatrix<C64>) -> f64 {
    (0..a.ncols()).map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Max-abs entry.
pub fn max_abs(a: &DMatrix<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    assert!(a.is_square(), "expm of a non-square matrix");
    let n = a.nrows();
    if n == 0 {
        return a.clone();
    }
    let nrm = norm1(a);
    let s = if nrm > THETA13 { (nrm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.scale(0.5f64.powi(s));
    let b = PADE13;
    let ident = DMatrix::<C64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let c = |k: usize| C64::new(b[k], 0.0);

    let inner_u = &a6 * (a6.scale(b[13]) + a4.scale(b[11]) + a2.scale(b[9]));
    let u = &a * (inner_u + a6.scale(b[7]) + a4.scale(b[5]) + a2.scale(b[3]) + ident.map(|z| z * c(1)));
    let inner_v = &a6 * (a6.scale(b[12]) + a4.scale(b[10]) + a2.scale(b[8]));
    let v = inner_v + a6.scale(b[6]) + a4.scale(b[4]) + a2.scale(b[2]) + ident.map(|z| z * c(0));

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is singular; generator norm is not finite");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Exponential of a sparse generator given as `(row, col, value)` triplets on an
/// `n`-dimensional space. The generator is split into connected components (for
/// number-conserving generators these are the invariant blocks) and each block
/// is exponentiated densely.
pub fn expm_sparse(n: usize, triplets: &[(usize, usize, C64)]) -> DMatrix<C64> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for &(i, j, v) in triplets {
        if v == C64::new(0.0, 0.0) {
            continue;
        }
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri.max(rj)] = ri.min(rj);
        }
    }
    let mut block_of = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut root_block = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_block[r] == usize::MAX {
            root_block[r] = blocks.len();
            blocks.push(Vec::new());
        }
        block_of[i] = root_block[r];
        let b = root_block[r];
        blocks[b].push(i);
    }
    let mut local = vec![0usize; n];
    for blk in &blocks {
        for (k, &i) in blk.iter().enumerate() {
            local[i] = k;
        }
    }
    let mut dense: Vec<DMatrix<C64>> = blocks.iter().map(|b| DMatrix::zeros(b.len(), b.len())).collect();
    for &(i, j, v) in triplets {
        if v == C64::new(0.0, 0.0) {
            continue;
        }
        let b = block_of[i];
        debug_assert_eq!(b, block_of[j]);
        dense[b][(local[i], local[j])] += v;
    }
    let exps: Vec<DMatrix<C64>> = dense.par_iter().map(expm).collect();
    let mut out = DMatrix::zeros(n, n);
    for (blk, e) in blocks.iter().zip(&exps) {
        for (a, &i) in blk.iter().enumerate() {
            for (b, &j) in blk.iter().enumerate() {
                out[(i, j)] = e[(a, b)];
            }
        }
    }
    out
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// Commutator `ab - ba`.
pub fn commutator(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a * b - b * a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = DMatrix::<C64>::zeros(5, 5);
        let e = expm(&z);
        assert!(max_abs(&(e - DMatrix::identity(5, 5))) < 1e-15);
    }

    #[test]
    fn expm_rotation_generator() {
        // exp([[0, -t], [t, 0]]) = rotation by t
        let t = 7.3;
        let a = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-t, 0.0), c(t, 0.0), c(0.0, 0.0)]);
        let e = expm(&a);
        let want =
            DMatrix::from_row_slice(2, 2, &[c(t.cos(), 0.0), c(-t.sin(), 0.0), c(t.sin(), 0.0), c(t.cos(), 0.0)]);
        assert!(max_abs(&(e - want)) < 1e-13);
    }

    #[test]
    fn expm_diagonal_and_nilpotent() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 2.0), c(-3.0, 0.5)]));
        let e = expm(&a);
        assert!((e[(0, 0)] - c(1.0, 2.0).exp()).norm() < 1e-13);
        assert!((e[(1, 1)] - c(-3.0, 0.5).exp()).norm() < 1e-13);
        // exp(N) = I + N for N strictly upper with N^2=0
        let mut n = DMatrix::<C64>::zeros(3, 3);
        n[(0, 2)] = c(2.0, -1.0);
        let e = expm(&n);
        assert!((e[(0, 2)] - c(2.0, -1.0)).norm() < 1e-14);
        assert!((e[(0, 0)] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn sparse_blocks_match_dense() {
        let trip = vec![
            (0, 1, c(0.3, 0.1)),
            (1, 0, c(-0.3, 0.1)),
            (2, 3, c(1.2, 0.0)),
            (3, 2, c(-1.2, 0.0)),
            (4, 4, c(0.0, 0.7)),
        ];
        let mut dense = DMatrix::<C64>::zeros(5, 5);
        for &(i, j, v) in &trip {
            dense[(i, j)] += v;
        }
        let a = expm_sparse(5, &trip);
        let b = expm(&dense);
        assert!(max_abs(&(a - b)) < 1e-14);
    }
}
