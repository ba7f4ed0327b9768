//! Time integration of the radially symmetric (mode-0) linearised problem.
//!
//! In mode 0 the velocity vanishes and the relative temperature `v` couples
//! to the interface height `h` only:
//!
//! ```text
//! kappa_i dv/dt = d_i Delta v                  in each phase,
//! v'(0) = 0,  v'(R_outer) = 0,  [[v]] = 0,     l* v(R*) = sigma a_0 h,
//! (l*/theta*) dh/dt = d_2 v_2'(R*) - d_1 v_1'(R*).
//! ```
//!
//! Space is collocated on the two-phase Chebyshev mesh; time uses the
//! trapezoidal rule (after a short damped backward-Euler start) with the
//! algebraic rows imposed at the new time level.
//! The flux balance conserves `Q = int kappa v + (l*/theta*) |Gamma*| h`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ntd::NtdContext;
use crate::radial_bvp::dense::Factored;
use crate::radial_bvp::{capacity_integral, RadialField};
use crate::spectrum::surface_eigenvalue;

/// Relative constraint violation that aborts a run.
pub const MAX_CONSTRAINT_DRIFT: f64 = 1e-6;
/// Intervals advanced by damped backward-Euler half steps before switching
/// to the trapezoidal rule.
pub const STARTUP_STEPS: usize = 2;

#[derive(Debug, Clone)]
pub struct Mode0State {
    pub t: f64,
    pub theta_field: RadialField,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub h: f64,
    pub theta_interface: f64,
    pub q: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub final_state: Mode0State,
    /// Largest step-doubling error estimate, relative to the state size.
    pub max_error_estimate: f64,
    /// Largest relative Gibbs–Thomson violation over accepted steps.
    pub max_constraint_drift: f64,
    /// `max_t |Q(t) - Q(0)| / (|Q(0)| + int kappa |v_init|)`.
    pub q_drift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionOptions {
    pub t_end: f64,
    pub dt: f64,
}

/// Initial data recipes.
#[derive(Debug, Clone, PartialEq)]
pub enum InitKind {
    /// `cos(pi r / R_outer) + C`, `C` chosen so that `Q = 0`.
    Bump,
    /// Resolvent field of the unstable eigenvalue.
    Eigen,
    /// Nodal values supplied by the caller, projected onto the constraints.
    Custom(RadialField),
}

struct Layout {
    np: usize,
}

impl Layout {
    fn inner(&self, i: usize) -> usize {
        i
    }
    fn outer(&self, i: usize) -> usize {
        self.np + i
    }
    fn h(&self) -> usize {
        2 * self.np
    }
    fn size(&self) -> usize {
        2 * self.np + 1
    }
}

/// `M du/dt = A u`; `algebraic[i]` marks rows with a zero mass entry.
struct Mode0System {
    mass: Vec<f64>,
    a: DMatrix<f64>,
    lay: Layout,
}

impl Mode0System {
    fn new(ctx: &NtdContext) -> Self {
        let mesh = &ctx.mesh;
        let eq = &ctx.eq;
        let n = mesh.order;
        let lay = Layout { np: n + 1 };
        let nm1 = (eq.geometry.n - 1) as f64;
        let coeffs = ctx.heat_coeffs();
        let mut a = DMatrix::zeros(lay.size(), lay.size());
        let mut mass = vec![0.0; lay.size()];

        for (cheb, p, at) in [
            (&mesh.inner, coeffs[0], 0usize),
            (&mesh.outer, coeffs[1], lay.np),
        ] {
            for i in 1..n {
                let r = cheb.nodes[i];
                for j in 0..=n {
                    a[(at + i, at + j)] = p.diffusivity * (cheb.d2[(i, j)] + nm1 / r * cheb.d1[(i, j)]);
                }
                mass[at + i] = p.capacity;
            }
        }
        let (ci, co) = (&mesh.inner, &mesh.outer);
        for j in 0..=n {
            a[(lay.inner(0), lay.inner(j))] = ci.d1[(0, j)];
            a[(lay.outer(n), lay.outer(j))] = co.d1[(n, j)];
            a[(lay.h(), lay.outer(j))] = coeffs[1].diffusivity * co.d1[(0, j)];
            a[(lay.h(), lay.inner(j))] = -coeffs[0].diffusivity * ci.d1[(n, j)];
        }
        a[(lay.inner(n), lay.inner(n))] = 1.0;
        a[(lay.inner(n), lay.outer(0))] = -1.0;
        a[(lay.outer(0), lay.outer(0))] = eq.l_star;
        a[(lay.outer(0), lay.h())] = -eq.sigma * surface_eigenvalue(eq, 0);
        mass[lay.h()] = eq.l_star / eq.theta_star;
        Mode0System { mass, a, lay }
    }

    /// One-step theta-method matrices `(L, R)` with `L u_next = R u`
    /// (`theta = 1/2` trapezoidal, `theta = 1` backward Euler).
    fn stepper(&self, dt: f64, theta: f64) -> Result<(Factored, DMatrix<f64>)> {
        let size = self.lay.size();
        let mut lhs = self.a.clone();
        let mut rhs = DMatrix::zeros(size, size);
        for i in 0..size {
            if self.mass[i] == 0.0 {
                continue;
            }
            for j in 0..size {
                let aij = self.a[(i, j)];
                lhs[(i, j)] = -theta * dt * aij;
                rhs[(i, j)] = (1.0 - theta) * dt * aij;
            }
            lhs[(i, i)] += self.mass[i];
            rhs[(i, i)] += self.mass[i];
        }
        Ok((Factored::new(lhs)?, rhs))
    }

    fn pack(&self, s: &Mode0State) -> DVector<f64> {
        let mut u = DVector::zeros(self.lay.size());
        for i in 0..self.lay.np {
            u[self.lay.inner(i)] = s.theta_field.values_inner[i];
            u[self.lay.outer(i)] = s.theta_field.values_outer[i];
        }
        u[self.lay.h()] = s.h;
        u
    }

    fn unpack(&self, u: &DVector<f64>, t: f64) -> Mode0State {
        let np = self.lay.np;
        Mode0State {
            t,
            theta_field: RadialField {
                values_inner: u.rows(0, np).iter().copied().collect(),
                values_outer: u.rows(np, np).iter().copied().collect(),
                mode: 0,
            },
            h: u[self.lay.h()],
        }
    }
}

/// `Q = int_Omega kappa* v dx + (l*/theta*) |Gamma*| h`.
pub fn conserved_functional(ctx: &NtdContext, state: &Mode0State) -> f64 {
    let eq = &ctx.eq;
    capacity_integral(&ctx.mesh, eq.geometry.n, ctx.heat_coeffs(), &state.theta_field)
        + eq.l_star / eq.theta_star * eq.interface_area() * state.h
}

/// Relative Gibbs–Thomson violation `|l* v(R*) - sigma a_0 h| / scale`.
pub fn constraint_violation(ctx: &NtdContext, state: &Mode0State) -> f64 {
    let eq = &ctx.eq;
    let lhs = eq.l_star * state.theta_field.interface_value();
    let rhs = eq.sigma * surface_eigenvalue(eq, 0) * state.h;
    let scale = eq.l_star.abs() * state.theta_field.max_abs() + rhs.abs();
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

/// Makes nodal data admissible: zero slope at the origin and the wall,
/// a single interface value (the mean of the two traces) and `h` from the
/// Gibbs–Thomson row. Returns the state and whether anything moved by more
/// than round-off.
pub fn project_initial(ctx: &NtdContext, field: &RadialField) -> Result<(Mode0State, bool)> {
    field.check(&ctx.mesh)?;
    let eq = &ctx.eq;
    let n = ctx.mesh.order;
    let (ci, co) = (&ctx.mesh.inner, &ctx.mesh.outer);
    let mut v = field.clone();
    v.mode = 0;
    let scale = field.max_abs().max(f64::MIN_POSITIVE);
    let mut moved = 0.0f64;

    let mid = 0.5 * (v.values_inner[n] + v.values_outer[0]);
    moved = moved.max((v.values_inner[n] - mid).abs());
    v.values_inner[n] = mid;
    v.values_outer[0] = mid;
    // zero slope: solve the derivative row for the boundary node value
    let rest: f64 = (1..=n).map(|j| ci.d1[(0, j)] * v.values_inner[j]).sum();
    let v0 = -rest / ci.d1[(0, 0)];
    moved = moved.max((v0 - v.values_inner[0]).abs());
    v.values_inner[0] = v0;
    let rest: f64 = (0..n).map(|j| co.d1[(n, j)] * v.values_outer[j]).sum();
    let vn = -rest / co.d1[(n, n)];
    moved = moved.max((vn - v.values_outer[n]).abs());
    v.values_outer[n] = vn;

    let h = eq.l_star * mid / (eq.sigma * surface_eigenvalue(eq, 0));
    let adjusted = moved > 1e-12 * scale;
    if adjusted {
        log::warn!("initial temperature projected onto the constraints (max change {moved:e})");
    }
    Ok((
        Mode0State {
            t: 0.0,
            theta_field: v,
            h,
        },
        adjusted,
    ))
}

/// `cos(pi r / R_outer) + C` with `C` chosen so that `Q = 0`, which removes
/// the component along the neutral (constant-temperature) direction.
pub fn bump_initial(ctx: &NtdContext) -> Result<Mode0State> {
    let ro = ctx.eq.geometry.r_outer;
    let bump = RadialField::from_fn(&ctx.mesh, 0, |r| (std::f64::consts::PI * r / ro).cos());
    let ones = RadialField::from_fn(&ctx.mesh, 0, |_| 1.0);
    let (b, _) = project_initial(ctx, &bump)?;
    let (o, _) = project_initial(ctx, &ones)?;
    let c = -conserved_functional(ctx, &b) / conserved_functional(ctx, &o);
    let field = RadialField {
        values_inner: b.theta_field.values_inner.iter().zip(&o.theta_field.values_inner).map(|(x, y)| x + c * y).collect(),
        values_outer: b.theta_field.values_outer.iter().zip(&o.theta_field.values_outer).map(|(x, y)| x + c * y).collect(),
        mode: 0,
    };
    Ok(project_initial(ctx, &field)?.0)
}

/// Eigenfunction of the mode-0 problem at a root `lambda0` of `b_0`,
/// normalised to `h = 1`: the heat resolvent field with flux jump
/// `-(l*/theta*) lambda0`.
pub fn eigen_initial(ctx: &NtdContext, lambda0: f64) -> Result<Mode0State> {
    let eq = &ctx.eq;
    let g = -eq.l_star / eq.theta_star * lambda0;
    let field = ctx.heat(0, lambda0)?.field.scaled(g);
    Ok(Mode0State {
        t: 0.0,
        theta_field: field,
        h: 1.0,
    })
}

pub fn initial_state(ctx: &NtdContext, kind: &InitKind) -> Result<Mode0State> {
    match kind {
        InitKind::Bump => bump_initial(ctx),
        InitKind::Eigen => {
            let lambda0 = ctx.find_unstable_eigenvalue()?.lambda0().ok_or_else(|| {
                Error::InvalidInput("eigen initial data need an unstable eigenvalue (s > 0)".into())
            })?;
            eigen_initial(ctx, lambda0)
        }
        InitKind::Custom(field) => Ok(project_initial(ctx, field)?.0),
    }
}

fn capacity_norm(ctx: &NtdContext, field: &RadialField) -> f64 {
    let abs = RadialField {
        values_inner: field.values_inner.iter().map(|v| v.abs()).collect(),
        values_outer: field.values_outer.iter().map(|v| v.abs()).collect(),
        mode: 0,
    };
    capacity_integral(&ctx.mesh, ctx.eq.geometry.n, ctx.heat_coeffs(), &abs)
}

/// Integrates from `init` to `t_end` with fixed steps, recording every step.
/// The first [`STARTUP_STEPS`] intervals use backward Euler on half steps.
/// Inconsistent initial data are projected first.
pub fn simulate_mode0(ctx: &NtdContext, init: &Mode0State, opts: EvolutionOptions) -> Result<Trajectory> {
    if !(opts.dt > 0.0 && opts.t_end > 0.0 && opts.dt.is_finite() && opts.t_end.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "need T_end > 0 and dt > 0, got T_end = {}, dt = {}",
            opts.t_end, opts.dt
        )));
    }
    let mut state = if constraint_violation(ctx, init) > 1e-12 {
        let (mut s, _) = project_initial(ctx, &init.theta_field)?;
        s.t = init.t;
        log::warn!("initial data violated the Gibbs–Thomson row; h reset to {}", s.h);
        s
    } else {
        init.clone()
    };
    let sys = Mode0System::new(ctx);
    let step_err = |e: Error| Error::StepRejected(format!("{}: {e}", e.name()));
    let (full, full_rhs) = sys.stepper(opts.dt, 0.5).map_err(step_err)?;
    let (half, half_rhs) = sys.stepper(0.5 * opts.dt, 0.5).map_err(step_err)?;
    // Rannacher start: the data are generally incompatible at the interface
    // (kappa jumps), and the trapezoidal rule does not damp the stiff modes
    // this excites. Two backward-Euler half steps per interval fix that.
    let (euler, euler_rhs) = sys.stepper(0.5 * opts.dt, 1.0).map_err(step_err)?;

    let q0 = conserved_functional(ctx, &state);
    let q_scale = q0.abs() + capacity_norm(ctx, &state.theta_field);
    let sample = |s: &Mode0State| TrajectorySample {
        t: s.t,
        h: s.h,
        theta_interface: s.theta_field.interface_value(),
        q: conserved_functional(ctx, s),
    };
    let steps = (opts.t_end / opts.dt).round().max(1.0) as usize;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(sample(&state));
    let (mut max_err, mut max_drift, mut q_drift) = (0.0f64, 0.0f64, 0.0f64);

    let mut u = sys.pack(&state);
    for k in 1..=steps {
        let next = if k <= STARTUP_STEPS {
            let mid = euler.solve(&(&euler_rhs * &u)).map_err(step_err)?;
            euler.solve(&(&euler_rhs * &mid)).map_err(step_err)?
        } else {
            let next = full.solve(&(&full_rhs * &u)).map_err(step_err)?;
            let mid = half.solve(&(&half_rhs * &u)).map_err(step_err)?;
            let fine = half.solve(&(&half_rhs * &mid)).map_err(step_err)?;
            if next.amax() > 0.0 {
                max_err = max_err.max((&next - &fine).amax() / (3.0 * next.amax()));
            }
            next
        };
        if !next.iter().all(|x| x.is_finite()) {
            return Err(Error::StepRejected(format!("non-finite state at step {k}")));
        }
        u = next;
        state = sys.unpack(&u, k as f64 * opts.dt);
        let drift = constraint_violation(ctx, &state);
        if drift > MAX_CONSTRAINT_DRIFT {
            return Err(Error::ConstraintDrift { drift });
        }
        max_drift = max_drift.max(drift);
        let s = sample(&state);
        if q_scale > 0.0 {
            q_drift = q_drift.max((s.q - q0).abs() / q_scale);
        }
        samples.push(s);
    }
    Ok(Trajectory {
        samples,
        final_state: state,
        max_error_estimate: max_err,
        max_constraint_drift: max_drift,
        q_drift,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub rate: f64,
    pub intercept: f64,
    /// RMS residual of `log|h|` about the fitted line.
    pub residual: f64,
    pub used: usize,
}

/// Least-squares line through `log|h|` on `[T/2, T]`, skipping samples with
/// `|h| < 1e3 eps max|h|`.
pub fn fit_rate(traj: &Trajectory) -> Result<RateFit> {
    let t_end = traj.samples.last().map_or(0.0, |s| s.t);
    let hmax = traj.samples.iter().map(|s| s.h.abs()).fold(0.0, f64::max);
    let floor = 1e3 * f64::EPSILON * hmax;
    let pts: Vec<(f64, f64)> = traj
        .samples
        .iter()
        .filter(|s| s.t >= 0.5 * t_end && s.h.abs() >= floor && s.h != 0.0)
        .map(|s| (s.t, s.h.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "{} usable samples in the fit window; need at least 2",
            pts.len()
        )));
    }
    let k = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let stt: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - ym)).sum();
    let rate = sty / stt;
    let intercept = ym - rate * tm;
    let residual = (pts.iter().map(|p| (p.1 - intercept - rate * p.0).powi(2)).sum::<f64>() / k).sqrt();
    Ok(RateFit {
        rate,
        intercept,
        residual,
        used: pts.len(),
    })
}
