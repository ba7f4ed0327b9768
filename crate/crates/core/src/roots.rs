//! Scalar root finding: bracketing scans, Brent's method, Newton polish.

use crate::error::{Error, Result};

/// Splits `[lo, hi]` into `subintervals` equal pieces and returns every piece
/// on which `f` changes sign (or hits zero at the left end).
pub fn bracket_sign_changes(f: impl Fn(f64) -> f64, lo: f64, hi: f64, subintervals: usize) -> Vec<(f64, f64)> {
    let xs: Vec<f64> = (0..=subintervals)
        .map(|i| {
            if i == subintervals {
                hi
            } else {
                lo + (hi - lo) * i as f64 / subintervals as f64
            }
        })
        .collect();
    sign_changes_on(&f, &xs)
}

/// Sign changes of `f` between consecutive points of an increasing grid.
pub fn sign_changes_on(f: &impl Fn(f64) -> f64, xs: &[f64]) -> Vec<(f64, f64)> {
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for i in 0..xs.len().saturating_sub(1) {
        let (fa, fb) = (vals[i], vals[i + 1]);
        if fa == 0.0 || (fa < 0.0) != (fb < 0.0) && fb != 0.0 {
            out.push((xs[i], xs[i + 1]));
        }
    }
    if let (Some(&last), Some(&x)) = (vals.last(), xs.last()) {
        if last == 0.0 {
            out.push((x, x));
        }
    }
    out
}

/// Brent's method on a bracket `[a, b]` with `f(a) f(b) <= 0`. Stops when the
/// bracket is below `xtol` (absolute) or `|f| <= ftol`.
pub fn brent(f: impl Fn(f64) -> f64, a: f64, b: f64, xtol: f64, ftol: f64, max_iter: usize) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoRoot(format!("no sign change on [{a}, {b}]")));
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut bisected = true;
    for _ in 0..max_iter {
        if fb.abs() <= ftol || (b - a).abs() <= xtol {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let out_of_range = !((s > lo.min(b)) && (s < lo.max(b)));
        let slow = if bisected {
            (s - b).abs() >= (b - c).abs() / 2.0 || (b - c).abs() < xtol
        } else {
            (s - b).abs() >= (c - d).abs() / 2.0 || (c - d).abs() < xtol
        };
        if out_of_range || slow {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if (fa < 0.0) != (fs < 0.0) {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Ok(b)
}

/// A few Newton steps from `x`, kept inside `[lo, hi]`. Returns the iterate
/// with the smallest `|f|` seen.
pub fn newton_polish(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, x: f64, lo: f64, hi: f64, steps: usize) -> f64 {
    let mut best = (x, f(x).abs());
    let mut x = x;
    for _ in 0..steps {
        let slope = df(x);
        if slope == 0.0 || !slope.is_finite() {
            break;
        }
        let next = x - f(x) / slope;
        if !(next >= lo && next <= hi) {
            break;
        }
        let fx = f(next).abs();
        if fx < best.1 {
            best = (next, fx);
        }
        if next == x {
            break;
        }
        x = next;
    }
    best.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brackets_all_roots_of_cubic() {
        let f = |x: f64| (x - 0.5) * (x - 1.5) * (x - 2.5);
        let br = bracket_sign_changes(f, 0.0, 3.0, 256);
        assert_eq!(br.len(), 3);
    }

    #[test]
    fn brent_finds_root_to_machine_precision() {
        let x = brent(|x: f64| x.cos() - x, 0.0, 1.0, 1e-15, 0.0, 200).unwrap();
        assert!((x.cos() - x).abs() < 1e-15);
    }

    #[test]
    fn brent_rejects_missing_sign_change() {
        assert!(brent(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12, 0.0, 50).is_err());
    }

    #[test]
    fn newton_polish_improves_estimate() {
        let x = newton_polish(|x| x * x - 2.0, |x| 2.0 * x, 1.4, 1.0, 2.0, 6);
        assert!((x - 2f64.sqrt()).abs() < 1e-15);
    }
}
