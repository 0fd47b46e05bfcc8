//! Conjugate gradients for the Hermitian positive-definite systems that
//! appear in the integrator (normal equations of the Crank-Nicolson step)
//! and in the stream-function Poisson problem.

use std::ops::{Add, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub trait CgScalar: Copy + Default + Add<Output = Self> + Sub<Output = Self> + std::ops::Mul<f64, Output = Self> {
    /// Re⟨a, b⟩ with the first argument conjugated.
    fn re_dot(a: Self, b: Self) -> f64;
}

impl CgScalar for f64 {
    #[inline]
    fn re_dot(a: Self, b: Self) -> f64 {
        a * b
    }
}

impl CgScalar for Complex64 {
    #[inline]
    fn re_dot(a: Self, b: Self) -> f64 {
        a.re * b.re + a.im * b.im
    }
}

fn dot<T: CgScalar>(a: &[T], b: &[T]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| T::re_dot(x, y)).sum()
}

const STALL_WINDOW: usize = 50;

/// Outcome of a converged solve.
#[derive(Clone, Debug)]
pub struct Solution<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    /// Relative residual ‖b − Ax‖/‖b‖ of the recurrence.
    pub residual: f64,
}

/// Solves `A x = b` for Hermitian positive-definite `A`, given by `apply`.
///
/// Iterates until the relative residual drops below `target` or stops
/// improving; fails unless it ends at or below `tol`.
pub fn conjugate_gradient<T: CgScalar>(
    mut apply: impl FnMut(&[T], &mut [T]),
    b: &[T],
    x0: &[T],
    tol: f64,
    max_iter: usize,
) -> Result<Solution<T>> {
    let n = b.len();
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        return Ok(Solution {
            x: vec![T::default(); n],
            iterations: 0,
            residual: 0.0,
        });
    }
    let target = tol * 1e-3;
    let mut x = x0.to_vec();
    let mut ap = vec![T::default(); n];
    apply(&x, &mut ap);
    let mut r: Vec<T> = b.iter().zip(&ap).map(|(&bi, &ai)| bi - ai).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut best = rr.sqrt() / bnorm;
    let mut stalled = 0;
    let mut it = 0;
    while it < max_iter && best > target {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] = x[i] + p[i] * alpha;
            r[i] = r[i] - ap[i] * alpha;
        }
        let rr_new = dot(&r, &r);
        it += 1;
        let rel = rr_new.sqrt() / bnorm;
        // CG residuals are not monotone; stop only after a long plateau.
        if rel < 0.9 * best {
            best = rel;
            stalled = 0;
        } else {
            best = best.min(rel);
            stalled += 1;
            if stalled >= STALL_WINDOW {
                break;
            }
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + p[i] * beta;
        }
    }
    // Recompute the true residual; the recurrence can drift below it.
    apply(&x, &mut ap);
    let res = b
        .iter()
        .zip(&ap)
        .map(|(&bi, &ai)| {
            let d = bi - ai;
            T::re_dot(d, d)
        })
        .sum::<f64>()
        .sqrt()
        / bnorm;
    if res > tol {
        return Err(Error::NoConvergence {
            residual: res,
            iterations: it,
            tolerance: tol,
        });
    }
    Ok(Solution {
        x,
        iterations: it,
        residual: res,
    })
}
