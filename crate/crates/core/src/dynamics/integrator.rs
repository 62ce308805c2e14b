//! Dormand–Prince 5(4) with PI step-size control on complex state slices.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::par::{self, Exec};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

/// Fifth-order solution minus embedded fourth-order solution.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Chunk length used when splitting the stage combinations.
const CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
    pub exec: Exec,
}

impl IntegratorOptions {
    pub fn with_rtol(rtol: f64) -> Self {
        IntegratorOptions {
            rtol,
            atol: rtol * 1e-2,
            h_max: f64::INFINITY,
            max_steps: 50_000_000,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Adaptive stepper. Keeps its step size and first-same-as-last derivative
/// between calls to [`advance`](Self::advance).
pub struct Dopri5 {
    opts: IntegratorOptions,
    t: f64,
    h: f64,
    facold: f64,
    k: [Vec<C64>; 7],
    ynew: Vec<C64>,
    fsal_valid: bool,
    pub stats: StepStats,
}

impl Dopri5 {
    pub fn new(n: usize, t0: f64, opts: IntegratorOptions) -> Self {
        let z = vec![C64::new(0.0, 0.0); n];
        Dopri5 {
            opts,
            t: t0,
            h: 0.0,
            facold: 1e-4,
            k: std::array::from_fn(|_| z.clone()),
            ynew: z,
            fsal_valid: false,
            stats: StepStats::default(),
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Last step size tried.
    pub fn step_size(&self) -> f64 {
        self.h
    }

    /// Forget the cached derivative, e.g. after editing the state externally.
    pub fn invalidate(&mut self) {
        self.fsal_valid = false;
    }

    fn err_norm(&self, y: &[C64], ynew: &[C64], e: &[C64]) -> f64 {
        let (rtol, atol) = (self.opts.rtol, self.opts.atol);
        let s: f64 = y
            .iter()
            .zip(ynew)
            .zip(e)
            .map(|((a, b), d)| {
                let sc = atol + rtol * a.norm().max(b.norm());
                (d.norm() / sc).powi(2)
            })
            .sum();
        (s / y.len().max(1) as f64).sqrt()
    }

    fn initial_step<F>(&mut self, rhs: &mut F, y: &[C64], span: f64) -> f64
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let (rtol, atol) = (self.opts.rtol, self.opts.atol);
        let n = y.len().max(1) as f64;
        let scaled = |v: &[C64], base: &[C64]| -> f64 {
            (v.iter()
                .zip(base)
                .map(|(x, b)| (x.norm() / (atol + rtol * b.norm())).powi(2))
                .sum::<f64>()
                / n)
                .sqrt()
        };
        let d0 = scaled(y, y);
        let d1 = scaled(&self.k[0], y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        let y1: Vec<C64> = y.iter().zip(&self.k[0]).map(|(a, f)| a + f * h0).collect();
        let mut f1 = vec![C64::new(0.0, 0.0); y.len()];
        rhs(self.t + h0, &y1, &mut f1);
        self.stats.evaluations += 1;
        let diff: Vec<C64> = f1.iter().zip(&self.k[0]).map(|(a, b)| (a - b) / h0).collect();
        let d2 = scaled(&diff, y);
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span).min(self.opts.h_max)
    }

    /// Integrate `y` from the current time to `t_end`, landing on it exactly.
    ///
    /// `after_step(t, y)` runs after every accepted step and returns whether it
    /// changed `y`.
    pub fn advance<F, P>(&mut self, rhs: &mut F, y: &mut [C64], t_end: f64, after_step: &mut P) -> Result<()>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
        P: FnMut(f64, &mut [C64]) -> Result<bool>,
    {
        let n = y.len();
        let exec = self.opts.exec;
        while self.t < t_end {
            if !self.fsal_valid {
                rhs(self.t, y, &mut self.k[0]);
                self.stats.evaluations += 1;
                self.fsal_valid = true;
            }
            if self.h == 0.0 {
                self.h = self.initial_step(rhs, y, t_end - self.t);
            }
            let remaining = t_end - self.t;
            let last = self.h >= remaining * (1.0 - 1e-12);
            let h = if last { remaining } else { self.h.min(self.opts.h_max) };
            if h <= 1e-14 * self.t.abs().max(1.0) {
                return Err(Error::Integrator(format!(
                    "step size underflow (h = {h:.3e}) at t = {}",
                    self.t
                )));
            }
            if self.stats.accepted + self.stats.rejected >= self.opts.max_steps {
                return Err(Error::Integrator(format!(
                    "step budget {} exhausted at t = {}",
                    self.opts.max_steps, self.t
                )));
            }

            for s in 1..7 {
                let (done, rest) = self.k.split_at_mut(s);
                let a = &A[s];
                let done: &[Vec<C64>] = done;
                par::for_each_chunk_mut(exec, &mut self.ynew, CHUNK, |ci, out| {
                    let off = ci * CHUNK;
                    for (i, o) in out.iter_mut().enumerate() {
                        let g = off + i;
                        let mut acc = C64::new(0.0, 0.0);
                        for (j, kj) in done.iter().enumerate() {
                            if a[j] != 0.0 {
                                acc += kj[g] * a[j];
                            }
                        }
                        *o = y[g] + acc * h;
                    }
                });
                rhs(self.t + C[s] * h, &self.ynew, &mut rest[0]);
                self.stats.evaluations += 1;
            }
            // ynew already holds the fifth-order solution (row 7 of A).
            let k = &self.k;
            let mut e = vec![C64::new(0.0, 0.0); n];
            par::for_each_chunk_mut(exec, &mut e, CHUNK, |ci, out| {
                let off = ci * CHUNK;
                for (i, o) in out.iter_mut().enumerate() {
                    let g = off + i;
                    let mut acc = C64::new(0.0, 0.0);
                    for (j, kj) in k.iter().enumerate() {
                        if E[j] != 0.0 {
                            acc += kj[g] * E[j];
                        }
                    }
                    *o = acc * h;
                }
            });
            let err = self.err_norm(y, &self.ynew, &e);
            if !err.is_finite() {
                return Err(Error::Integrator(format!("non-finite state at t = {}", self.t)));
            }
            let fac11 = err.powf(0.2 - BETA * 0.75);
            if err <= 1.0 {
                let fac = (fac11 / self.facold.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                self.facold = err.max(1e-4);
                self.t = if last { t_end } else { self.t + h };
                y.copy_from_slice(&self.ynew);
                self.k.swap(0, 6);
                self.stats.accepted += 1;
                if !last || h >= self.h {
                    self.h = (h / fac).min(self.opts.h_max);
                }
                if after_step(self.t, y)? {
                    self.fsal_valid = false;
                }
            } else {
                self.h = h / (fac11 / SAFETY).min(1.0 / FAC_MIN);
                self.stats.rejected += 1;
            }
        }
        Ok(())
    }
}
