//! Restarted GMRES and a Jacobian-free Newton–Krylov driver.
//!
//! Both take the operator as a closure `apply(x, y)` writing `y = A x`
//! (or `y = F(x)`), so callers never form a matrix.

use crate::error::SolverError;

/// Tolerances and budgets shared by the linear and nonlinear solvers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverSettings {
    /// Newton stops once `max_i |F_i(u)| <= eps_tol`.
    pub eps_tol: f64,
    /// Krylov stops once `||b - A x|| <= lin_tol ||b||`.
    pub lin_tol: f64,
    pub max_newton: usize,
    /// GMRES restart length.
    pub krylov_dim: usize,
    /// Number of GMRES cycles before giving up.
    pub max_restarts: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            eps_tol: 1e-12,
            lin_tol: 1e-4,
            max_newton: 50,
            krylov_dim: 60,
            max_restarts: 100,
        }
    }
}

impl SolverSettings {
    pub fn with_lin_tol(mut self, lin_tol: f64) -> Self {
        self.lin_tol = lin_tol;
        self
    }

    pub fn validate(&self) -> crate::Result<()> {
        let ok = self.eps_tol > 0.0
            && self.lin_tol > 0.0
            && self.max_newton >= 1
            && self.krylov_dim >= 1
            && self.max_restarts >= 1;
        if ok {
            Ok(())
        } else {
            Err(crate::Error::InvalidConfig(format!(
                "solver settings must be positive: {self:?}"
            )))
        }
    }
}

#[derive(Clone, Debug)]
pub struct LinearSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final `||b - A x||`.
    pub residual: f64,
}

/// Iteration counts of a Newton solve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NewtonStats {
    /// Newton iterations.
    pub nni: usize,
    /// Krylov iterations summed over all Newton iterations.
    pub nli: usize,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| f64::max(m, x.abs()))
}

/// Restarted GMRES with modified Gram–Schmidt and Givens rotations.
///
/// Converges when `||b - A x|| <= settings.lin_tol * ||b||`. On failure the
/// error carries the iterate with the smallest true residual.
pub fn gmres_solve<A>(
    mut apply: A,
    b: &[f64],
    x0: &[f64],
    settings: &SolverSettings,
) -> Result<LinearSolution, SolverError>
where
    A: FnMut(&[f64], &mut [f64]),
{
    let n = b.len();
    assert_eq!(x0.len(), n, "initial guess and right-hand side differ in length");
    let bnorm = norm2(b);
    if bnorm == 0.0 {
        return Ok(LinearSolution {
            x: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
        });
    }
    let target = settings.lin_tol * bnorm;
    let m = settings.krylov_dim.max(1).min(n);

    let mut x = x0.to_vec();
    let mut r = vec![0.0; n];
    let mut ax = vec![0.0; n];
    let true_residual = |apply: &mut A, x: &[f64], r: &mut [f64], ax: &mut [f64]| -> f64 {
        if x.iter().all(|&v| v == 0.0) {
            r.copy_from_slice(b);
        } else {
            apply(x, ax);
            for k in 0..n {
                r[k] = b[k] - ax[k];
            }
        }
        norm2(r)
    };

    let mut beta = true_residual(&mut apply, &x, &mut r, &mut ax);
    let mut best = (beta, x.clone());
    let mut iterations = 0;
    if beta <= target {
        return Ok(LinearSolution {
            x,
            iterations,
            residual: beta,
        });
    }

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut h = vec![vec![0.0; m]; m + 1];
    let mut cs = vec![0.0; m];
    let mut sn = vec![0.0; m];
    let mut g = vec![0.0; m + 1];
    let mut w = vec![0.0; n];

    for _cycle in 0..settings.max_restarts {
        basis.clear();
        basis.push(r.iter().map(|v| v / beta).collect());
        g.iter_mut().for_each(|v| *v = 0.0);
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..m {
            apply(&basis[k], &mut w);
            iterations += 1;
            for (i, q) in basis.iter().enumerate() {
                let hik = dot(&w, q);
                h[i][k] = hik;
                for (wv, qv) in w.iter_mut().zip(q) {
                    *wv -= hik * qv;
                }
            }
            let hnext = norm2(&w);
            h[k + 1][k] = hnext;
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let denom = h[k][k].hypot(h[k + 1][k]);
            if denom == 0.0 {
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = h[k][k] / denom;
                sn[k] = h[k + 1][k] / denom;
            }
            h[k][k] = denom;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;
            let breakdown = hnext <= 1e-14 * beta;
            if g[k + 1].abs() <= target || breakdown {
                break;
            }
            basis.push(w.iter().map(|v| v / hnext).collect());
        }
        // back substitution on the k_used x k_used triangle
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[i][j] * y[j];
            }
            y[i] = if h[i][i] != 0.0 { s / h[i][i] } else { 0.0 };
        }
        for (j, yj) in y.iter().enumerate() {
            for (xv, qv) in x.iter_mut().zip(&basis[j]) {
                *xv += yj * qv;
            }
        }
        beta = true_residual(&mut apply, &x, &mut r, &mut ax);
        if beta < best.0 {
            best = (beta, x.clone());
        }
        if beta <= target {
            return Ok(LinearSolution {
                x,
                iterations,
                residual: beta,
            });
        }
        if beta == 0.0 || !beta.is_finite() {
            break;
        }
    }
    Err(SolverError::LinearStall {
        iterations,
        residual: best.0,
        best: best.1,
    })
}

/// Newton's method with finite-difference Jacobian-vector products and
/// GMRES inner solves, converging when `||F(u)||_inf <= eps_tol`.
pub fn jfnk_solve<F>(
    mut residual: F,
    u0: &[f64],
    settings: &SolverSettings,
) -> Result<(Vec<f64>, NewtonStats), SolverError>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = u0.len();
    let mut u = u0.to_vec();
    let mut r = vec![0.0; n];
    residual(&u, &mut r);
    let mut stats = NewtonStats::default();
    let mut rnorm = norm2(&r);
    let sqrt_eps = f64::EPSILON.sqrt();
    let mut trial = vec![0.0; n];
    let mut r_trial = vec![0.0; n];

    loop {
        let rinf = norm_inf(&r);
        if rinf <= settings.eps_tol {
            return Ok((u, stats));
        }
        if stats.nni >= settings.max_newton || !rinf.is_finite() {
            return Err(SolverError::NewtonStall {
                iterations: stats.nni,
                residual: rinf,
            });
        }
        stats.nni += 1;

        let unorm = norm2(&u);
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let mut shifted = vec![0.0; n];
        let mut f_shifted = vec![0.0; n];
        let jv = |p: &[f64], out: &mut [f64]| {
            let pnorm = norm2(p);
            if pnorm == 0.0 {
                out.iter_mut().for_each(|o| *o = 0.0);
                return;
            }
            let eps = sqrt_eps * (1.0 + unorm) / pnorm;
            for k in 0..n {
                shifted[k] = u[k] + eps * p[k];
            }
            residual(&shifted, &mut f_shifted);
            for k in 0..n {
                out[k] = (f_shifted[k] - r[k]) / eps;
            }
        };
        let step = match gmres_solve(jv, &rhs, &vec![0.0; n], settings) {
            Ok(sol) => {
                stats.nli += sol.iterations;
                sol.x
            }
            Err(SolverError::LinearStall {
                iterations, best, ..
            }) => {
                stats.nli += iterations;
                best
            }
            Err(e) => return Err(e),
        };

        // Armijo backtracking on ||F||_2
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            for k in 0..n {
                trial[k] = u[k] + lambda * step[k];
            }
            residual(&trial, &mut r_trial);
            let tnorm = norm2(&r_trial);
            if tnorm <= (1.0 - 1e-4 * lambda) * rnorm || norm_inf(&r_trial) <= settings.eps_tol {
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(SolverError::NewtonStall {
                iterations: stats.nni,
                residual: rinf,
            });
        }
        std::mem::swap(&mut u, &mut trial);
        std::mem::swap(&mut r, &mut r_trial);
        rnorm = norm2(&r);
    }
}
