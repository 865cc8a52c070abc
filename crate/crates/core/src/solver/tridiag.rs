use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// `L D L^T` factorization of a [`SymTridiagonal`] matrix. `L` is unit lower
/// bidiagonal with sub-diagonal `mult`.
#[derive(Debug, Clone)]
pub struct LdlFactor {
    pivots: Vec<f64>,
    mult: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::Solver(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal entries",
                diag.len(),
                off.len()
            )));
        }
        Ok(SymTridiagonal { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.off[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Factors without pivoting. Fails if a pivot is not safely positive,
    /// which for this crate's matrices means the matrix is not SPD.
    pub fn factor(&self) -> Result<LdlFactor> {
        let n = self.len();
        let scale = self.diag.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
        let tiny = scale * 1e-14;
        let mut pivots = Vec::with_capacity(n);
        let mut mult = Vec::with_capacity(n.saturating_sub(1));
        pivots.push(self.diag[0]);
        for i in 1..n {
            let prev = pivots[i - 1];
            if prev.is_nan() || prev <= tiny {
                return Err(Error::Solver(format!("degenerate pivot {prev:e} at row {}", i - 1)));
            }
            let l = self.off[i - 1] / prev;
            mult.push(l);
            pivots.push(self.diag[i] - l * self.off[i - 1]);
        }
        let last = pivots[n - 1];
        if last.is_nan() || last <= tiny {
            return Err(Error::Solver(format!("degenerate pivot {last:e} at row {}", n - 1)));
        }
        Ok(LdlFactor { pivots, mult })
    }
}

impl LdlFactor {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.pivots.len();
        assert_eq!(rhs.len(), n, "rhs length mismatch");
        let mut x = rhs.to_vec();
        for i in 1..n {
            x[i] -= self.mult[i - 1] * x[i - 1];
        }
        for (xi, d) in x.iter_mut().zip(&self.pivots) {
            *xi /= d;
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.mult[i] * x[i + 1];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // [[4,1,0],[1,4,1],[0,1,4]] x = [1,2,3]
        let m = SymTridiagonal::new(vec![4.0, 4.0, 4.0], vec![1.0, 1.0]).unwrap();
        let x = m.factor().unwrap().solve(&[1.0, 2.0, 3.0]);
        let back = m.mul_vec(&x);
        for (a, b) in back.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        // Cramer's rule: x = [5/28, 2/7, 19/28]
        assert!((x[0] - 5.0 / 28.0).abs() < 1e-15);
        assert!((x[1] - 2.0 / 7.0).abs() < 1e-15);
        assert!((x[2] - 19.0 / 28.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_singular() {
        let m = SymTridiagonal::new(vec![1.0, 1.0], vec![1.0]).unwrap();
        assert!(matches!(m.factor(), Err(Error::Solver(_))));
    }

    #[test]
    fn rejects_shape_mismatch() {
        assert!(SymTridiagonal::new(vec![1.0, 1.0], vec![]).is_err());
    }
}
