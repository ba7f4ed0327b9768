//! Chebyshev–Gauss–Lobatto meshes on the two radial phases.

use nalgebra::DMatrix;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Chebyshev–Gauss–Lobatto nodes mapped to `[a, b]`, in increasing order,
/// together with the spectral differentiation matrix and Clenshaw–Curtis
/// weights on that interval.
#[derive(Debug, Clone)]
pub struct ChebInterval {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    /// First-derivative matrix acting on nodal values.
    pub d1: DMatrix<f64>,
    /// Second-derivative matrix, `d1 * d1`.
    pub d2: DMatrix<f64>,
    /// Clenshaw–Curtis quadrature weights for `int_a^b`.
    pub weights: Vec<f64>,
    bary: Vec<f64>,
}

impl ChebInterval {
    /// `order` is the polynomial degree; the interval carries `order + 1` nodes.
    pub fn new(a: f64, b: f64, order: usize) -> Self {
        assert!(order >= 2, "Chebyshev order must be at least 2");
        assert!(b > a, "empty interval");
        let n = order;
        let half = 0.5 * (b - a);
        // standard nodes t_j = cos(pi j / n) are decreasing; r = a + half (1 - t)
        let theta: Vec<f64> = (0..=n).map(|j| PI * j as f64 / n as f64).collect();
        let nodes: Vec<f64> = theta
            .iter()
            .enumerate()
            .map(|(j, th)| {
                if j == 0 {
                    a
                } else if j == n {
                    b
                } else {
                    // 1 - cos(th) = 2 sin^2(th/2)
                    a + half * 2.0 * (0.5 * th).sin().powi(2)
                }
            })
            .collect();
        let bary: Vec<f64> = (0..=n)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == n {
                    0.5 * sign
                } else {
                    sign
                }
            })
            .collect();

        let mut d1 = DMatrix::<f64>::zeros(n + 1, n + 1);
        for i in 0..=n {
            let mut diag = 0.0;
            for j in 0..=n {
                if i == j {
                    continue;
                }
                // r_i - r_j = half (t_j - t_i) = half * 2 sin((th_i+th_j)/2) sin((th_i-th_j)/2)
                let diff =
                    half * 2.0 * (0.5 * (theta[i] + theta[j])).sin() * (0.5 * (theta[i] - theta[j])).sin();
                let v = (bary[j] / bary[i]) / diff;
                d1[(i, j)] = v;
                diag -= v;
            }
            d1[(i, i)] = diag;
        }
        let d2 = &d1 * &d1;
        let weights = clenshaw_curtis(n).into_iter().map(|w| w * half).collect();
        ChebInterval {
            a,
            b,
            nodes,
            d1,
            d2,
            weights,
            bary,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Barycentric interpolation of nodal `values` at `x`.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&r, &w), &v) in self.nodes.iter().zip(&self.bary).zip(values) {
            let dx = x - r;
            if dx == 0.0 {
                return v;
            }
            let t = w / dx;
            num += t * v;
            den += t;
        }
        num / den
    }

    /// Row-vector derivative of nodal `values`.
    pub fn derivative(&self, values: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.d1.row(i).iter().zip(values).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Clenshaw–Curtis integral of nodal `values`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Interior Fejér (first rule) nodes and weights on `[a, b]` with `m`
    /// points. The rule never touches the endpoints, which keeps integrands
    /// with removable `1/r` factors finite at the origin.
    pub fn fejer(&self, m: usize) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (self.b - self.a);
        let mut x = Vec::with_capacity(m);
        let mut w = Vec::with_capacity(m);
        for k in 0..m {
            let th = (2 * k + 1) as f64 * PI / (2 * m) as f64;
            let mut s = 0.0;
            for j in 1..=m / 2 {
                s += (2.0 * j as f64 * th).cos() / (4.0 * (j * j) as f64 - 1.0);
            }
            // decreasing t = cos(th) mapped onto increasing r
            x.push(self.a + half * 2.0 * (0.5 * th).sin().powi(2));
            w.push(half * 2.0 / m as f64 * (1.0 - 2.0 * s));
        }
        (x, w)
    }
}

/// Clenshaw–Curtis weights on `[-1, 1]` for `n + 1` Lobatto nodes.
fn clenshaw_curtis(n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    let nf = n as f64;
    for (k, wk) in w.iter_mut().enumerate() {
        let th = PI * k as f64 / nf;
        let mut s = 0.0;
        let jmax = n / 2;
        for j in 1..=jmax {
            let bj = if 2 * j == n { 1.0 } else { 2.0 };
            s += bj / (4.0 * (j * j) as f64 - 1.0) * (2.0 * j as f64 * th).cos();
        }
        let ck = if k == 0 || k == n { 1.0 } else { 2.0 };
        *wk = ck / nf * (1.0 - s);
    }
    w
}

/// Two-phase radial mesh: `[0, R*]` for the disperse phase and
/// `[R*, R_outer]` for the continuous phase, both of the same order. The
/// interface node is shared (last inner node, first outer node).
#[derive(Debug, Clone)]
pub struct RadialMesh {
    pub inner: ChebInterval,
    pub outer: ChebInterval,
    pub order: usize,
}

impl RadialMesh {
    pub fn new(r_star: f64, r_outer: f64, order: usize) -> Result<Self> {
        if !(r_star > 0.0 && r_outer > r_star) {
            return Err(Error::GeometryViolation(format!(
                "need 0 < R_star < R_outer, got R_star = {r_star}, R_outer = {r_outer}"
            )));
        }
        if order < 4 {
            return Err(Error::InvalidInput(format!(
                "solver order {order} too small (minimum 4)"
            )));
        }
        Ok(RadialMesh {
            inner: ChebInterval::new(0.0, r_star, order),
            outer: ChebInterval::new(r_star, r_outer, order),
            order,
        })
    }

    pub fn r_star(&self) -> f64 {
        self.inner.b
    }

    pub fn r_outer(&self) -> f64 {
        self.outer.b
    }

    pub fn nodes_per_phase(&self) -> usize {
        self.order + 1
    }
}

/// Field values on a [`RadialMesh`] for one angular mode.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    pub values_inner: Vec<f64>,
    pub values_outer: Vec<f64>,
    pub mode: usize,
}

impl RadialField {
    pub fn zeros(mesh: &RadialMesh, mode: usize) -> Self {
        RadialField {
            values_inner: vec![0.0; mesh.nodes_per_phase()],
            values_outer: vec![0.0; mesh.nodes_per_phase()],
            mode,
        }
    }

    /// Samples `f(r)` at every node.
    pub fn from_fn(mesh: &RadialMesh, mode: usize, f: impl Fn(f64) -> f64) -> Self {
        RadialField {
            values_inner: mesh.inner.nodes.iter().map(|&r| f(r)).collect(),
            values_outer: mesh.outer.nodes.iter().map(|&r| f(r)).collect(),
            mode,
        }
    }

    pub fn check(&self, mesh: &RadialMesh) -> Result<()> {
        let n = mesh.nodes_per_phase();
        if self.values_inner.len() != n || self.values_outer.len() != n {
            return Err(Error::GridMismatch(format!(
                "field has {}+{} values, mesh expects {n}+{n}",
                self.values_inner.len(),
                self.values_outer.len()
            )));
        }
        if self
            .values_inner
            .iter()
            .chain(&self.values_outer)
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidInput("non-finite field value".into()));
        }
        Ok(())
    }

    /// Value at the interface (inner side; continuity makes both sides agree
    /// for the fields produced by the solvers).
    pub fn interface_value(&self) -> f64 {
        *self.values_inner.last().expect("non-empty field")
    }

    /// Evaluates the piecewise polynomial at radius `r`.
    pub fn eval(&self, mesh: &RadialMesh, r: f64) -> f64 {
        if r <= mesh.r_star() {
            mesh.inner.interpolate(&self.values_inner, r)
        } else {
            mesh.outer.interpolate(&self.values_outer, r)
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values_inner
            .iter()
            .chain(&self.values_outer)
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, alpha: f64) -> RadialField {
        RadialField {
            values_inner: self.values_inner.iter().map(|v| alpha * v).collect(),
            values_outer: self.values_outer.iter().map(|v| alpha * v).collect(),
            mode: self.mode,
        }
    }
}
