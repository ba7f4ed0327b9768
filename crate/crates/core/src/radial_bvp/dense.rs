//! Row-equilibrated dense LU with a 1-norm condition estimate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Systems whose estimated condition number exceeds this are rejected.
pub const MAX_CONDITION: f64 = 1e13;

pub struct Factored {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    row_scale: Vec<f64>,
}

impl Factored {
    /// Scales each row to unit max-norm, factors, and estimates the 1-norm
    /// condition number of the scaled matrix (Hager's method).
    pub fn new(mut a: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "square system expected");
        let mut row_scale = vec![1.0; n];
        for (i, scale) in row_scale.iter_mut().enumerate() {
            let m = a.row(i).amax();
            if m == 0.0 || !m.is_finite() {
                return Err(Error::IllConditioned {
                    estimate: f64::INFINITY,
                });
            }
            *scale = 1.0 / m;
            a.row_mut(i).scale_mut(1.0 / m);
        }
        let norm_a = (0..n).map(|j| a.column(j).lp_norm(1)).fold(0.0, f64::max);
        let at = a.transpose();
        let lu = a.lu();
        let lut = at.lu();
        let inv_norm = hager_inverse_norm(n, |x| lu.solve(x), |x| lut.solve(x));
        let condition = match inv_norm {
            Some(v) => norm_a * v,
            None => f64::INFINITY,
        };
        if !(condition <= MAX_CONDITION) {
            return Err(Error::IllConditioned {
                estimate: condition,
            });
        }
        log::trace!("collocation system of size {n}, condition estimate {condition:.3e}");
        Ok(Factored { lu, row_scale })
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        let scaled = DVector::from_iterator(
            rhs.len(),
            rhs.iter().zip(&self.row_scale).map(|(b, s)| b * s),
        );
        self.lu.solve(&scaled).ok_or(Error::IllConditioned {
            estimate: f64::INFINITY,
        })
    }
}

/// Estimate of `||A^{-1}||_1` from solves with `A` and `A^T`.
fn hager_inverse_norm(
    n: usize,
    solve: impl Fn(&DVector<f64>) -> Option<DVector<f64>>,
    solve_t: impl Fn(&DVector<f64>) -> Option<DVector<f64>>,
) -> Option<f64> {
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut est = 0.0;
    for _ in 0..5 {
        let y = solve(&x)?;
        let new_est = y.lp_norm(1);
        let xi = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let z = solve_t(&xi)?;
        let (jmax, zmax) = z
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |(bj, bv), (j, v)| if v.abs() > bv { (j, v.abs()) } else { (bj, bv) });
        if new_est <= est || zmax <= z.dot(&x) {
            est = est.max(new_est);
            break;
        }
        est = new_est;
        x = DVector::zeros(n);
        x[jmax] = 1.0;
    }
    // alternating-sign probe guards against underestimates
    let probe = DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            s * (1.0 + i as f64 / (n.max(2) - 1) as f64)
        }),
    );
    let alt = 2.0 * solve(&probe)?.lp_norm(1) / (3.0 * n as f64);
    Some(est.max(alt))
}
