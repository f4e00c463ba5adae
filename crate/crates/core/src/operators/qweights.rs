use crate::error::{IkError, Result};
use crate::field::Field;
use crate::linalg::Matrix;

use super::depth::DepthField;

/// First column of `Ã(H)⁻¹` at every grid point, split as `(q, −q_vec)`,
/// plus optionally the trailing block `Q(H)`.
#[derive(Clone, Debug)]
pub struct QWeights {
    pub q_scalar: Field,
    pub q_vec: Vec<Field>,
    /// `q_block[i][j]` is entry `(i, j)` of `Q(H)`.
    pub q_block: Option<Vec<Vec<Field>>>,
}

/// `Ã(H) = [[0, lᵀ], [−l, A(H)]]` with `l_i = H^{p_i}`, `a_ij = H^{p_i+p_j+1}/(p_i+p_j+1)`.
pub fn bordered_depth_matrix(p: &[u32], h: f64) -> Matrix {
    let a = Matrix::from_fn(p.len(), |i, j| {
        let s = p[i] + p[j] + 1;
        h.powi(s as i32) / s as f64
    });
    let l: Vec<f64> = p.iter().map(|&pi| h.powi(pi as i32)).collect();
    a.bordered(&l)
}

fn bordered_from_cache(p: &[u32], depth: &DepthField, k: usize) -> Matrix {
    let a = Matrix::from_fn(p.len(), |i, j| {
        let s = p[i] + p[j] + 1;
        depth.pow(s).values()[k] / s as f64
    });
    let l: Vec<f64> = p.iter().map(|&pi| depth.pow(pi).values()[k]).collect();
    a.bordered(&l)
}

pub fn q_weights(p: &[u32], depth: &DepthField) -> Result<QWeights> {
    compute(p, depth, false)
}

pub fn q_weights_with_block(p: &[u32], depth: &DepthField) -> Result<QWeights> {
    compute(p, depth, true)
}

fn compute(p: &[u32], depth: &DepthField, block: bool) -> Result<QWeights> {
    let grid = depth.h().grid();
    let m = p.len() + 1;
    let cols = if block { m } else { 1 };
    let per_point = grid.policy().map_range(grid.len(), |k| {
        let lu = bordered_from_cache(p, depth, k).lu();
        let mut out = Vec::with_capacity(cols * m);
        for c in 0..cols {
            let mut e = vec![0.0; m];
            e[c] = 1.0;
            out.extend(lu.solve(&e)?);
        }
        Some(out)
    });
    let mut columns = Vec::with_capacity(grid.len());
    for v in per_point {
        columns.push(v.ok_or(IkError::IdentityViolation {
            what: "bordered depth matrix is singular",
            defect: 0.0,
        })?);
    }
    let pick = |idx: usize| Field::from_raw(grid, columns.iter().map(|c| c[idx]).collect());
    let q_scalar = pick(0);
    let q_vec = (1..m).map(|r| pick(r).scale(-1.0)).collect();
    let q_block = block.then(|| {
        (1..m)
            .map(|r| (1..m).map(|c| pick(c * m + r)).collect())
            .collect()
    });
    Ok(QWeights {
        q_scalar,
        q_vec,
        q_block,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, PeriodicDomain};

    #[test]
    fn unit_depth_values_for_0_2() {
        let g = Grid::new(PeriodicDomain::line(1.0, 8).unwrap()).unwrap();
        let d = DepthField::new(Field::constant(&g, 1.0), 5).unwrap();
        let q = q_weights(&[0, 2], &d).unwrap();
        assert!((q.q_scalar.values()[3] - 1.0 / 6.0).abs() < 1e-14);
        assert!((q.q_vec[0].values()[3] - 0.25).abs() < 1e-14);
        assert!((q.q_vec[1].values()[3] + 1.25).abs() < 1e-14);
        assert!(q.q_block.is_none());
    }

    #[test]
    fn block_matches_dense_inverse() {
        let g = Grid::new(PeriodicDomain::line(1.0, 8).unwrap()).unwrap();
        let d = DepthField::new(Field::constant(&g, 1.3), 5).unwrap();
        let q = q_weights_with_block(&[0, 1, 2], &d).unwrap();
        let m = bordered_depth_matrix(&[0, 1, 2], 1.3);
        let lu = m.lu();
        for c in 1..4 {
            let mut e = vec![0.0; 4];
            e[c] = 1.0;
            let col = lu.solve(&e).unwrap();
            for r in 1..4 {
                let got = q.q_block.as_ref().unwrap()[r - 1][c - 1].values()[0];
                assert!((got - col[r]).abs() < 1e-12);
            }
        }
    }
}
