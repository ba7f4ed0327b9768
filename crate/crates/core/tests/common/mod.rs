//! Independent reference computations for the integration tests and the
//! acceptance target. Nothing here calls the collocation solvers.

#![allow(dead_code)]

use interphase::equilibrium::{solve_equilibrium_radius, solve_equilibrium_temperature};
use interphase::materials::reference_pair;
use interphase::{EquilibriumState, FreeEnergy, Geometry, MaterialPair, PhaseModel, Poly};
use nalgebra::{Matrix3, Vector3};
use rand::rngs::StdRng;
use rand::Rng;

/// Reference pair, `sigma = 0.5`, `theta* = 1`, `n = 3`: `R* = 1`.
pub fn reference_eq(r_outer: f64) -> EquilibriumState {
    let pair = reference_pair(0.5);
    solve_equilibrium_radius(&pair, Geometry::concentric(3, 1.0, r_outer), 1.0).unwrap()
}

/// `s = 0.8`, one unstable eigenvalue.
pub fn unstable_eq() -> EquilibriumState {
    reference_eq(2.0)
}

/// `s ~ -0.22`.
pub fn stable_eq() -> EquilibriumState {
    reference_eq(1.2)
}

/// `N_0^H(1)` for `n = 3`, `kappa = d = 1` in both phases, from
/// `sinh(r)/r` inside and `e^{+-r}/r` outside.
pub fn bessel_heat_oracle(r_star: f64, r_outer: f64) -> f64 {
    let (r, ro) = (r_star, r_outer);
    let sinh_r = |x: f64| x.sinh() / x;
    let dsinh_r = |x: f64| x.cosh() / x - x.sinh() / (x * x);
    let ep = |x: f64| x.exp() / x;
    let dep = |x: f64| x.exp() * (1.0 / x - 1.0 / (x * x));
    let em = |x: f64| (-x).exp() / x;
    let dem = |x: f64| -(-x).exp() * (1.0 / x + 1.0 / (x * x));
    // unknowns A (inner), B, C (outer)
    let m = Matrix3::new(
        0.0, dep(ro), dem(ro),
        sinh_r(r), -ep(r), -em(r),
        dsinh_r(r), -dep(r), -dem(r),
    );
    let x = m.lu().solve(&Vector3::new(0.0, 0.0, 1.0)).unwrap();
    x[0] * sinh_r(r)
}

fn rk4(mut y: [f64; 2], a: f64, b: f64, steps: usize, f: impl Fn(f64, [f64; 2]) -> [f64; 2]) -> [f64; 2] {
    let h = (b - a) / steps as f64;
    let add = |y: [f64; 2], k: [f64; 2], s: f64| [y[0] + s * k[0], y[1] + s * k[1]];
    for i in 0..steps {
        let r = a + i as f64 * h;
        let k1 = f(r, y);
        let k2 = f(r + 0.5 * h, add(y, k1, 0.5 * h));
        let k3 = f(r + 0.5 * h, add(y, k2, 0.5 * h));
        let k4 = f(r + h, add(y, k3, h));
        y = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
    }
    y
}

/// `N_l^H(lambda)` for `n = 2` with distinct constant `d` and `kappa` per
/// phase, by RK4 shooting: the inner solution starts from the `I_l` series
/// near the origin, the outer one from the Neumann wall.
pub fn shooting_heat_oracle(r_star: f64, r_outer: f64, l: usize, lambda: f64, d: [f64; 2], kappa: [f64; 2]) -> f64 {
    const STEPS: usize = 8000;
    let c = (l * l) as f64;
    let ode = |q: f64| move |r: f64, y: [f64; 2]| [y[1], q * y[0] + c / (r * r) * y[0] - y[1] / r];
    let q1 = kappa[0] * lambda / d[0];
    let q2 = kappa[1] * lambda / d[1];

    let r0 = 1e-2 * r_star;
    let lf = l as f64;
    let (mut u, mut du, mut ak) = (0.0, 0.0, 1.0);
    for k in 0..6 {
        let p = lf + 2.0 * k as f64;
        u += ak * r0.powf(p);
        du += ak * p * r0.powf(p - 1.0);
        let k1 = (k + 1) as f64;
        ak *= q1 / (4.0 * k1 * (k1 + lf));
    }
    let inner = rk4([u, du], r0, r_star, STEPS, ode(q1));
    let outer = rk4([1.0, 0.0], r_outer, r_star, STEPS, ode(q2));
    // alpha inner - beta outer = 0, d1 alpha inner' - d2 beta outer' = 1
    let det = inner[0] * (-d[1] * outer[1]) + outer[0] * d[0] * inner[1];
    let alpha = outer[0] / det;
    alpha * inner[0]
}

/// `N_l^S(0)` for equal constant viscosity `mu` from the monomial basis of
/// the poloidal potential: `r^l, r^{l+2}` inside and additionally
/// `r^{-l-n+2}, r^{-l-n+4}` outside. Velocity `U = c f/r`,
/// `V = f' + (n-2) f/r`, no slip at the wall, unit normal traction jump.
pub fn stokes_monomial_oracle(n: usize, l: usize, mu: f64, r_star: f64, r_outer: f64) -> f64 {
    let nf = n as f64;
    let lf = l as f64;
    let c = lf * (lf + nf - 2.0);
    let inner = [lf, lf + 2.0];
    let outer = [lf, lf + 2.0, 2.0 - lf - nf, 4.0 - lf - nf];
    let u = |a: f64, r: f64| c * r.powf(a - 1.0);
    let v = |a: f64, r: f64| (a + nf - 2.0) * r.powf(a - 1.0);
    let shear = |a: f64, r: f64| mu * ((a + nf - 2.0) * (a - 2.0) + c) * r.powf(a - 2.0);
    let t_rr = |a: f64, r: f64| {
        let gamma = a * (a + nf - 2.0) - c;
        let p = mu * gamma * (a + nf - 4.0) * r.powf(a - 2.0);
        2.0 * mu * c * (a - 1.0) * r.powf(a - 2.0) - p
    };
    let mut m = nalgebra::DMatrix::<f64>::zeros(6, 6);
    let mut rhs = nalgebra::DVector::<f64>::zeros(6);
    for (j, &a) in outer.iter().enumerate() {
        m[(0, 2 + j)] = u(a, r_outer);
        m[(1, 2 + j)] = v(a, r_outer);
    }
    let (r, ri) = (r_star, [1.0, -1.0]);
    for (col, a, sign) in inner.iter().enumerate().map(|(j, &a)| (j, a, ri[0])).chain(outer.iter().enumerate().map(|(j, &a)| (2 + j, a, ri[1]))) {
        m[(2, col)] = sign * u(a, r);
        m[(3, col)] = sign * v(a, r);
        m[(4, col)] = sign * shear(a, r);
        m[(5, col)] = sign * t_rr(a, r);
    }
    rhs[5] = 1.0;
    let x = m.lu().solve(&rhs).unwrap();
    inner.iter().enumerate().map(|(j, &a)| x[j] * u(a, r)).sum()
}

/// Composite Simpson rule with `2k` panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, k: usize) -> f64 {
    let m = 2 * k;
    let h = (b - a) / m as f64;
    let mut sum = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// `phi'(theta*) = (kappa*|1) R*^2 s / (sigma (n-1))`, from differentiating
/// the energy along `R(theta) = sigma (n-1) / [[psi(theta)]]`.
pub fn phi_prime_closed_form(eq: &EquilibriumState) -> f64 {
    let g = &eq.geometry;
    let nm1 = (g.n - 1) as f64;
    let s = eq.sigma * nm1 / (g.r_star * g.r_star)
        - eq.l_star * eq.l_star * g.interface_area() / (eq.theta_star * eq.kappa_mass);
    eq.kappa_mass * g.r_star * g.r_star * s / (eq.sigma * nm1)
}

/// Random phase with `psi = a + b theta - c theta ln theta + e theta^2`,
/// `kappa = c - 2 e theta > 0` on `[0.2, 3]`.
fn random_phase(rng: &mut StdRng) -> PhaseModel {
    let c = rng.random_range(0.5..3.0);
    let e = rng.random_range(-0.05..0.05);
    let fe = FreeEnergy::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), c).with_tail(vec![0.0, 0.0, e]);
    let mu = Poly(vec![rng.random_range(0.5..2.0), rng.random_range(0.0..0.1)]);
    let d = Poly(vec![rng.random_range(0.5..2.0), rng.random_range(0.0..0.1)]);
    PhaseModel::new(fe, mu, d, (0.2, 3.0)).unwrap()
}

/// Admissible random configuration; alternates between prescribing the
/// temperature and prescribing the radius.
pub fn random_equilibrium(rng: &mut StdRng, by_radius: bool) -> (MaterialPair, EquilibriumState) {
    loop {
        let pair = MaterialPair::new(random_phase(rng), random_phase(rng), rng.random_range(0.05..1.0)).unwrap();
        let n = if rng.random_bool(0.5) { 2 } else { 3 };
        if by_radius {
            let theta = rng.random_range(0.3..2.5);
            if pair.psi_jump(theta) <= 0.0 {
                continue;
            }
            let r = pair.sigma * (n - 1) as f64 / pair.psi_jump(theta);
            if !(0.05..20.0).contains(&r) {
                continue;
            }
            let g = Geometry::concentric(n, r, r * rng.random_range(1.2..3.0));
            if let Ok(eq) = solve_equilibrium_radius(&pair, g, theta) {
                return (pair, eq);
            }
        } else {
            let r = rng.random_range(0.3..3.0);
            let g = Geometry::concentric(n, r, r * rng.random_range(1.2..3.0));
            if let Ok(sol) = solve_equilibrium_temperature(&pair, g, None) {
                return (pair, sol.state);
            }
        }
    }
}
