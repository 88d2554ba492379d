//! Weak-form DG operators: transport in x, acceleration in v, the Ampère
//! update, the Poisson-consistent initial field and the discrete Gauss law.
//!
//! Residuals are returned with the element mass matrix applied, i.e. the
//! semi-discrete equation reads `M df/dt = -R(f, E)` with
//! `M = (dx dv / 4) I` in the orthonormal basis.

use std::str::FromStr;

use crate::basis::legendre;
use crate::error::{Error, Result, SolverError};
use crate::field::{DistributionField, ElectricField, MomentField, XField};
use crate::par;
use crate::solver::{gmres_solve, SolverSettings};
use crate::space::Discretization;

/// Numerical flux family `{u} beta + theta |beta| / 2 [u]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FluxMode {
    Upwind,
    Central,
    Downwind,
}

impl FluxMode {
    pub fn theta(self) -> f64 {
        match self {
            FluxMode::Upwind => 1.0,
            FluxMode::Central => 0.0,
            FluxMode::Downwind => -1.0,
        }
    }

    /// The mode with `theta` negated.
    pub fn reversed(self) -> Self {
        match self {
            FluxMode::Upwind => FluxMode::Downwind,
            FluxMode::Central => FluxMode::Central,
            FluxMode::Downwind => FluxMode::Upwind,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FluxMode::Upwind => "upwind",
            FluxMode::Central => "central",
            FluxMode::Downwind => "downwind",
        }
    }
}

impl FromStr for FluxMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "upwind" => Ok(FluxMode::Upwind),
            "central" => Ok(FluxMode::Central),
            "downwind" => Ok(FluxMode::Downwind),
            other => Err(Error::config(format!("unknown flux `{other}`"))),
        }
    }
}

/// Flux across an interface with trace `u_minus` on the side the normal
/// points away from and `u_plus` on the other; `beta_n` is speed times normal.
#[inline]
pub fn numerical_flux(u_minus: f64, u_plus: f64, beta_n: f64, mode: FluxMode) -> f64 {
    flux(u_minus, u_plus, beta_n, mode.theta())
}

#[inline(always)]
pub(crate) fn flux(um: f64, up: f64, beta: f64, theta: f64) -> f64 {
    0.5 * (um + up) * beta + theta * 0.5 * beta.abs() * (um - up)
}

/// Which parts of the Vlasov operator to assemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Terms {
    pub transport: bool,
    pub accel: bool,
}

impl Terms {
    pub const ALL: Terms = Terms {
        transport: true,
        accel: true,
    };
}

/// Weak transport residual `L_x(f)`.
pub fn apply_transport_x(f: &DistributionField, mode: FluxMode) -> DistributionField {
    let d = f.disc();
    let mut out = vec![0.0; d.f_len()];
    let zero_e = vec![0.0; d.x_len()];
    let terms = Terms {
        transport: true,
        accel: false,
    };
    residual_into(d, f.coeffs(), &zero_e, mode.theta(), terms, &mut out);
    DistributionField::from_coeffs(d, out).expect("length fixed by the discretization")
}

/// Weak acceleration residual `L_v(f, E)`.
pub fn apply_accel_v(
    f: &DistributionField,
    e: &ElectricField,
    mode: FluxMode,
) -> Result<DistributionField> {
    residual_with(f, e, mode, Terms {
        transport: false,
        accel: true,
    })
}

/// Full residual `L_x(f) + L_v(f, E)`.
pub fn vlasov_residual(
    f: &DistributionField,
    e: &ElectricField,
    mode: FluxMode,
) -> Result<DistributionField> {
    residual_with(f, e, mode, Terms::ALL)
}

fn residual_with(
    f: &DistributionField,
    e: &ElectricField,
    mode: FluxMode,
    terms: Terms,
) -> Result<DistributionField> {
    let d = f.disc();
    if e.coeffs().len() != d.x_len() {
        return Err(Error::Shape {
            expected: d.x_len(),
            found: e.coeffs().len(),
        });
    }
    let mut out = vec![0.0; d.f_len()];
    residual_into(d, f.coeffs(), e.coeffs(), mode.theta(), terms, &mut out);
    DistributionField::from_coeffs(d, out)
}

/// Assembles the weak residual of the coefficient vector `c` into `out`.
pub(crate) fn residual_into(
    d: &Discretization,
    c: &[f64],
    e: &[f64],
    theta: f64,
    terms: Terms,
    out: &mut [f64],
) {
    match d.n() {
        2 => kernel::<2>(d, c, e, theta, terms, out),
        3 => kernel::<3>(d, c, e, theta, terms, out),
        4 => kernel::<4>(d, c, e, theta, terms, out),
        5 => kernel::<5>(d, c, e, theta, terms, out),
        6 => kernel::<6>(d, c, e, theta, terms, out),
        7 => kernel::<7>(d, c, e, theta, terms, out),
        8 => kernel::<8>(d, c, e, theta, terms, out),
        n => unreachable!("unsupported points per direction {n}"),
    }
}

struct Tables<const N: usize> {
    w: [f64; N],
    phi: [[f64; N]; N],
    dphi: [[f64; N]; N],
    left: [f64; N],
    right: [f64; N],
    lag_l: [f64; N],
    lag_r: [f64; N],
}

impl<const N: usize> Tables<N> {
    fn new(d: &Discretization) -> Self {
        let lb = &d.line;
        let mut t = Tables {
            w: [0.0; N],
            phi: [[0.0; N]; N],
            dphi: [[0.0; N]; N],
            left: [0.0; N],
            right: [0.0; N],
            lag_l: [0.0; N],
            lag_r: [0.0; N],
        };
        for l in 0..N {
            t.w[l] = lb.weight(l);
            t.left[l] = lb.left[l];
            t.right[l] = lb.right[l];
            t.lag_l[l] = lb.lagrange_left[l];
            t.lag_r[l] = lb.lagrange_right[l];
            for a in 0..N {
                t.phi[l][a] = lb.phi(l, a);
                t.dphi[l][a] = lb.dphi(l, a);
            }
        }
        t
    }
}

fn kernel<const N: usize>(
    d: &Discretization,
    c: &[f64],
    e: &[f64],
    theta: f64,
    terms: Terms,
    out: &mut [f64],
) {
    let t = Tables::<N>::new(d);
    let mesh = d.mesh;
    let (nx, nv) = (mesh.nx(), mesh.nv());
    let (hx, hv) = (0.5 * mesh.dx(), 0.5 * mesh.dv());
    let bl = N * N;

    let mut nodal = vec![0.0; c.len()];
    par::for_each_block(&mut nodal, bl, |el, dst| {
        let src = &c[el * bl..][..bl];
        let mut half = [[0.0; N]; N];
        for a in 0..N {
            for m in 0..N {
                let mut s = 0.0;
                for b in 0..N {
                    s += src[a * N + b] * t.phi[m][b];
                }
                half[a][m] = s;
            }
        }
        for l in 0..N {
            for m in 0..N {
                let mut s = 0.0;
                for a in 0..N {
                    s += t.phi[l][a] * half[a][m];
                }
                dst[l * N + m] = s;
            }
        }
    });
    let mut e_nodes = vec![0.0; nx * N];
    for i in 0..nx {
        for l in 0..N {
            e_nodes[i * N + l] = (0..N).map(|a| e[i * N + a] * t.phi[l][a]).sum();
        }
    }
    let nodal = &nodal;
    let e_nodes = &e_nodes;
    let active = &d.active;
    let vnodes = &d.vnodes;

    par::for_each_block(out, bl, |el, r| {
        let (i, j) = (el / nv, el % nv);
        let f = &nodal[el * bl..][..bl];
        let mut res = [[0.0; N]; N];

        if terms.transport {
            let im = (i + nx - 1) % nx;
            let ip = (i + 1) % nx;
            let fl = &nodal[(im * nv + j) * bl..][..bl];
            let fr = &nodal[(ip * nv + j) * bl..][..bl];
            let v = &vnodes[j * N..][..N];
            // volume: -sum_l dphi_a(l) sum_m w_l w_m hv v_m F[l][m] phi_b(m)
            for l in 0..N {
                let mut t1 = [0.0; N];
                for m in 0..N {
                    let g = t.w[l] * t.w[m] * hv * v[m] * f[l * N + m];
                    for b in 0..N {
                        t1[b] += g * t.phi[m][b];
                    }
                }
                for a in 0..N {
                    let da = t.dphi[l][a];
                    for b in 0..N {
                        res[a][b] -= da * t1[b];
                    }
                }
            }
            let mut h_right = [0.0; N];
            let mut h_left = [0.0; N];
            for m in 0..N {
                let (mut own_l, mut own_r, mut nb_l, mut nb_r) = (0.0, 0.0, 0.0, 0.0);
                for l in 0..N {
                    own_l += t.lag_l[l] * f[l * N + m];
                    own_r += t.lag_r[l] * f[l * N + m];
                    nb_r += t.lag_r[l] * fl[l * N + m];
                    nb_l += t.lag_l[l] * fr[l * N + m];
                }
                let fhat_r = flux(own_r, nb_l, v[m], theta);
                let fhat_l = flux(nb_r, own_l, v[m], theta);
                for b in 0..N {
                    let wp = hv * t.w[m] * t.phi[m][b];
                    h_right[b] += wp * fhat_r;
                    h_left[b] += wp * fhat_l;
                }
            }
            for a in 0..N {
                for b in 0..N {
                    res[a][b] += t.right[a] * h_right[b] - t.left[a] * h_left[b];
                }
            }
        }

        if terms.accel {
            let ev = &e_nodes[i * N..][..N];
            let below = (j > 0).then(|| &nodal[(i * nv + j - 1) * bl..][..bl]);
            let above = (j + 1 < nv).then(|| &nodal[(i * nv + j + 1) * bl..][..bl]);
            let mut g_top = [0.0; N];
            let mut g_bot = [0.0; N];
            for l in 0..N {
                let row = &f[l * N..][..N];
                let mut t2 = [0.0; N];
                for m in 0..N {
                    let g = t.w[l] * t.w[m] * hx * ev[l] * row[m];
                    for b in 0..N {
                        t2[b] += g * t.dphi[m][b];
                    }
                }
                for a in 0..N {
                    let pa = t.phi[l][a];
                    for b in 0..N {
                        res[a][b] -= pa * t2[b];
                    }
                }
                let (mut own_b, mut own_t) = (0.0, 0.0);
                for m in 0..N {
                    own_b += t.lag_l[m] * row[m];
                    own_t += t.lag_r[m] * row[m];
                }
                let nb_top = above.map_or(0.0, |g| (0..N).map(|m| t.lag_l[m] * g[l * N + m]).sum());
                let nb_bot = below.map_or(0.0, |g| (0..N).map(|m| t.lag_r[m] * g[l * N + m]).sum());
                g_top[l] = flux(own_t, nb_top, ev[l], theta);
                g_bot[l] = flux(nb_bot, own_b, ev[l], theta);
            }
            for a in 0..N {
                let (mut gt, mut gb) = (0.0, 0.0);
                for l in 0..N {
                    let wp = hx * t.w[l] * t.phi[l][a];
                    gt += wp * g_top[l];
                    gb += wp * g_bot[l];
                }
                for b in 0..N {
                    res[a][b] += gt * t.right[b] - gb * t.left[b];
                }
            }
        }

        for a in 0..N {
            for b in 0..N {
                r[a * N + b] = if active[a * N + b] { res[a][b] } else { 0.0 };
            }
        }
    });
}

/// `E - dt J`.
pub fn ampere_update(e: &ElectricField, j: &MomentField, dt: f64) -> Result<ElectricField> {
    e.axpy(-dt, j)
}

/// Central-flux weak divergence `B e` tested against every basis function.
fn weak_divergence(d: &Discretization, e: &[f64], out: &mut [f64]) {
    let lb = &d.line;
    let n = d.n();
    let nx = d.mesh.nx();
    let trace = |i: usize, ends: &[f64]| -> f64 { (0..n).map(|a| e[i * n + a] * ends[a]).sum() };
    for i in 0..nx {
        let im = (i + nx - 1) % nx;
        let ip = (i + 1) % nx;
        let avg_r = 0.5 * (trace(i, &lb.right) + trace(ip, &lb.left));
        let avg_l = 0.5 * (trace(im, &lb.right) + trace(i, &lb.left));
        for a in 0..n {
            let vol: f64 = (0..n).map(|b| e[i * n + b] * lb.stiff[b * n + a]).sum();
            out[i * n + a] = -vol + avg_r * lb.right[a] - avg_l * lb.left[a];
        }
    }
}

fn gauss_rhs(d: &Discretization, rho: &[f64], rho_i: f64) -> Vec<f64> {
    let n = d.n();
    let hx = 0.5 * d.mesh.dx();
    rho.iter()
        .enumerate()
        .map(|(idx, &r)| {
            let bg = if idx % n == 0 { std::f64::consts::SQRT_2 * rho_i } else { 0.0 };
            hx * (r - bg)
        })
        .collect()
}

/// Largest defect of the central-flux discrete Gauss law
/// `-int E w' + {E} w |_edges = int (rho - rho_i) w` over the basis of `W_h^k`.
pub fn gauss_law_residual(e: &ElectricField, rho: &MomentField, rho_i: f64) -> Result<f64> {
    let d = e.disc();
    if rho.coeffs().len() != e.coeffs().len() {
        return Err(Error::Shape {
            expected: e.coeffs().len(),
            found: rho.coeffs().len(),
        });
    }
    let mut be = vec![0.0; d.x_len()];
    weak_divergence(d, e.coeffs(), &mut be);
    let rhs = gauss_rhs(d, rho.coeffs(), rho_i);
    Ok(be
        .iter()
        .zip(&rhs)
        .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs())))
}

/// Orthonormal null vectors of the periodic central-flux divergence.
///
/// The operator is block circulant, so null vectors are Fourier modes. Only
/// the real modes matter: the constant-phase one, and for even `nx` the
/// alternating one `(-1)^i c`, whose symbol is skew and hence singular
/// whenever `k + 1` is odd.
fn divergence_null_space(d: &Discretization) -> Vec<Vec<f64>> {
    let (n, nx) = (d.n(), d.mesh.nx());
    let mut out: Vec<Vec<f64>> = Vec::new();
    let phases: &[f64] = if nx % 2 == 0 { &[1.0, -1.0] } else { &[1.0] };
    for &phase in phases {
        let sign = |i: usize| if i % 2 == 1 { phase } else { 1.0 };
        // symbol matrix: column a is the response of element 0 to mode e_a
        let mut symbol = vec![0.0; n * n];
        let mut u = vec![0.0; d.x_len()];
        let mut du = vec![0.0; d.x_len()];
        for a in 0..n {
            u.iter_mut().for_each(|x| *x = 0.0);
            for i in 0..nx {
                u[i * n + a] = sign(i);
            }
            weak_divergence(d, &u, &mut du);
            for b in 0..n {
                symbol[b * n + a] = du[b];
            }
        }
        for c in null_vectors(symbol, n) {
            let mut z: Vec<f64> = (0..nx).flat_map(|i| c.iter().map(move |x| x * sign(i))).collect();
            remove_components(&mut z, &out);
            let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                z.iter_mut().for_each(|x| *x /= norm);
                out.push(z);
            }
        }
    }
    out
}

/// Null space of a small dense `n x n` matrix by full-pivot elimination.
fn null_vectors(mut m: Vec<f64>, n: usize) -> Vec<Vec<f64>> {
    let scale = m.iter().fold(0.0f64, |s, x| s.max(x.abs())).max(f64::MIN_POSITIVE);
    let tol = 1e-10 * scale;
    let mut cols: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    while rank < n {
        let (mut pr, mut pc, mut best) = (rank, rank, 0.0);
        for r in rank..n {
            for c in rank..n {
                if m[r * n + c].abs() > best {
                    (pr, pc, best) = (r, c, m[r * n + c].abs());
                }
            }
        }
        if best <= tol {
            break;
        }
        for c in 0..n {
            m.swap(rank * n + c, pr * n + c);
        }
        for r in 0..n {
            m.swap(r * n + rank, r * n + pc);
        }
        cols.swap(rank, pc);
        for r in 0..n {
            if r != rank {
                let f = m[r * n + rank] / m[rank * n + rank];
                for c in 0..n {
                    m[r * n + c] -= f * m[rank * n + c];
                }
            }
        }
        rank += 1;
    }
    (rank..n)
        .map(|free| {
            let mut v = vec![0.0; n];
            v[cols[free]] = 1.0;
            for r in 0..rank {
                v[cols[r]] = -m[r * n + free] / m[r * n + r];
            }
            v
        })
        .collect()
}

/// Removes the components along orthonormal `basis` vectors.
fn remove_components(x: &mut [f64], basis: &[Vec<f64>]) {
    for z in basis {
        let c: f64 = x.iter().zip(z).map(|(a, b)| a * b).sum();
        x.iter_mut().zip(z).for_each(|(a, b)| *a -= c * b);
    }
}

/// Electric field consistent with the discrete Gauss law for charge `rho`.
///
/// The zero-mean periodic antiderivative of `rho - rho_i` is projected onto
/// `W_h^k`, then corrected by a least-squares solve of the central-flux
/// Gauss law so the discrete constraint holds to round-off.
pub fn poisson_initial_e(rho: &MomentField, rho_i: f64) -> Result<ElectricField> {
    let d = rho.disc();
    let (n, nx) = (d.n(), d.mesh.nx());
    let lx = d.mesh.lx();
    let hx = 0.5 * d.mesh.dx();
    let r = rho.coeffs();
    let net = rho.integral() - rho_i * lx;
    if net.abs() > 1e-10 * f64::max(1.0, (rho_i * lx).abs()) {
        return Err(Error::IncompatibleCharge { net });
    }

    // antiderivative of (rho - rho_i) from the left edge of element i
    let local = |i: usize, xi: f64| -> f64 {
        let mut s = -rho_i * (xi + 1.0);
        for a in 0..n {
            let scale = (a as f64 + 0.5).sqrt();
            let integral = if a == 0 {
                xi + 1.0
            } else {
                (legendre(a + 1, xi).0 - legendre(a - 1, xi).0) / (2 * a + 1) as f64
            };
            s += r[i * n + a] * scale * integral;
        }
        hx * s
    };
    let mut left_value = vec![0.0; nx];
    for i in 1..nx {
        left_value[i] = left_value[i - 1] + local(i - 1, 1.0);
    }
    let mut e = XField::project(d, |x| {
        let (i, xi) = d.mesh.locate_x(x);
        // drift of the rounding-level residual charge keeps the function periodic
        left_value[i] + local(i, xi) - net * x / lx
    })
    .into_coeffs();
    let mean = e.iter().step_by(n).sum::<f64>() / nx as f64;
    for i in 0..nx {
        e[i * n] -= mean;
    }

    let mut rhs = gauss_rhs(d, r, rho_i);
    let mut be = vec![0.0; d.x_len()];
    weak_divergence(d, &e, &mut be);
    for (b, x) in rhs.iter_mut().zip(&be) {
        *b -= x;
    }
    // the operator is skew, so its null vectors also span the cokernel
    let null = divergence_null_space(d);
    remove_components(&mut rhs, &null);
    let dim = d.x_len();
    let settings = SolverSettings {
        lin_tol: 1e-13,
        krylov_dim: dim,
        max_restarts: 1,
        ..SolverSettings::default()
    };
    let delta = match gmres_solve(
        |x: &[f64], y: &mut [f64]| weak_divergence(d, x, y),
        &rhs,
        &vec![0.0; dim],
        &settings,
    ) {
        Ok(sol) => sol.x,
        Err(SolverError::LinearStall { best, .. }) => best,
        Err(other) => return Err(other.into()),
    };
    let mut delta = delta;
    remove_components(&mut delta, &null);
    for (x, dx) in e.iter_mut().zip(&delta) {
        *x += dx;
    }
    XField::from_coeffs(d, e)
}
