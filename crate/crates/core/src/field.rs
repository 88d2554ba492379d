//! Distribution-function and x-field containers, projection, moments,
//! norms, the velocity reflection and plain-text dumps.

use std::io::Write;
use std::sync::Arc;

use crate::basis::orthonormal_legendre;
use crate::error::{Error, Result};
use crate::par;
use crate::space::Discretization;

/// Uniform ion background density of every benchmark.
pub const ION_DENSITY: f64 = 1.0;

/// DG approximation of `f(x, v)`: one modal block of `(k+1)^2`
/// coefficients per element, blocks ordered `i * nv + j`.
#[derive(Clone, Debug)]
pub struct DistributionField {
    disc: Arc<Discretization>,
    coeffs: Vec<f64>,
}

/// Piecewise polynomial of degree `k` on the x-mesh, one block of `k + 1`
/// modal coefficients per x-element.
#[derive(Clone, Debug)]
pub struct XField {
    disc: Arc<Discretization>,
    coeffs: Vec<f64>,
}

pub type ElectricField = XField;
pub type MomentField = XField;

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Shape { expected, found })
    }
}

impl DistributionField {
    pub fn zeros(disc: &Arc<Discretization>) -> Self {
        Self {
            disc: disc.clone(),
            coeffs: vec![0.0; disc.f_len()],
        }
    }

    /// Wraps raw coefficients; entries outside the polynomial space are zeroed.
    pub fn from_coeffs(disc: &Arc<Discretization>, mut coeffs: Vec<f64>) -> Result<Self> {
        check_len(disc.f_len(), coeffs.len())?;
        disc.restrict(&mut coeffs);
        Ok(Self {
            disc: disc.clone(),
            coeffs,
        })
    }

    /// Element-wise L2 projection of `f0`, integrated with `2(k+1)` points
    /// per direction.
    pub fn project<F>(disc: &Arc<Discretization>, f0: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Sync + Send,
    {
        let d = &**disc;
        let n = d.n();
        let nq = d.fine.len();
        let mesh = d.mesh;
        let nv = mesh.nv();
        let mut coeffs = vec![0.0; d.f_len()];
        par::for_each_block(&mut coeffs, d.block_len(), |e, block| {
            let (i, j) = (e / nv, e % nv);
            let mut vals = vec![0.0; nq * nq];
            for p in 0..nq {
                let x = mesh.x_at(i, d.fine.nodes[p]);
                for q in 0..nq {
                    let v = mesh.v_at(j, d.fine.nodes[q]);
                    vals[p * nq + q] = d.fine.weights[p] * d.fine.weights[q] * f0(x, v);
                }
            }
            for a in 0..n {
                for b in 0..n {
                    if !d.active[a * n + b] {
                        continue;
                    }
                    let mut s = 0.0;
                    for p in 0..nq {
                        let mut row = 0.0;
                        for q in 0..nq {
                            row += vals[p * nq + q] * d.fine_vand[q * n + b];
                        }
                        s += row * d.fine_vand[p * n + a];
                    }
                    block[a * n + b] = s;
                }
            }
        });
        Self {
            disc: disc.clone(),
            coeffs,
        }
    }

    pub fn disc(&self) -> &Arc<Discretization> {
        &self.disc
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Mutable access to the raw coefficients. Callers keep inactive entries at zero.
    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn block(&self, i: usize, j: usize) -> &[f64] {
        let o = self.disc.block_offset(i, j);
        &self.coeffs[o..o + self.disc.block_len()]
    }

    /// Point value; zero outside `[-vc, vc]`.
    pub fn eval(&self, x: f64, v: f64) -> f64 {
        let mesh = &self.disc.mesh;
        let Some((j, eta)) = mesh.locate_v(v) else {
            return 0.0;
        };
        let (i, xi) = mesh.locate_x(x);
        let n = self.disc.n();
        let block = self.block(i, j);
        let pv: Vec<f64> = (0..n).map(|b| orthonormal_legendre(b, eta).0).collect();
        (0..n)
            .map(|a| {
                let px = orthonormal_legendre(a, xi).0;
                px * (0..n).map(|b| block[a * n + b] * pv[b]).sum::<f64>()
            })
            .sum()
    }

    fn moment(&self, p: usize) -> XField {
        XField {
            disc: self.disc.clone(),
            coeffs: moment_coeffs(&self.disc, &self.coeffs, p),
        }
    }

    /// Charge density `rho = int f dv`.
    pub fn rho(&self) -> MomentField {
        self.moment(0)
    }

    /// Current density `J = int f v dv`.
    pub fn current(&self) -> MomentField {
        self.moment(1)
    }

    /// `int f v^2 dv`.
    pub fn second_moment(&self) -> MomentField {
        self.moment(2)
    }

    pub fn l2_norm(&self) -> f64 {
        (self.disc.element_mass() * self.coeffs.iter().map(|c| c * c).sum::<f64>()).sqrt()
    }

    /// L2 distance to another field on the same discretization.
    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        self.ensure_compatible(other)?;
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok((self.disc.element_mass() * s).sqrt())
    }

    /// L2 distance to a function, integrated with the over-integration rule.
    pub fn l2_error<F>(&self, reference: F) -> f64
    where
        F: Fn(f64, f64) -> f64 + Sync + Send,
    {
        let d = &*self.disc;
        let (n, nq, nv) = (d.n(), d.fine.len(), d.mesh.nv());
        let mesh = d.mesh;
        let per: Vec<f64> = par::map_indexed(mesh.num_elements(), |e| {
            let (i, j) = (e / nv, e % nv);
            let block = &self.coeffs[e * d.block_len()..][..d.block_len()];
            let mut s = 0.0;
            for p in 0..nq {
                let x = mesh.x_at(i, d.fine.nodes[p]);
                for q in 0..nq {
                    let v = mesh.v_at(j, d.fine.nodes[q]);
                    let mut fh = 0.0;
                    for a in 0..n {
                        for b in 0..n {
                            fh += block[a * n + b] * d.fine_vand[p * n + a] * d.fine_vand[q * n + b];
                        }
                    }
                    let diff = fh - reference(x, v);
                    s += d.fine.weights[p] * d.fine.weights[q] * diff * diff;
                }
            }
            s
        });
        (d.element_mass() * per.iter().sum::<f64>()).sqrt()
    }

    /// Exact representation of `(x, v) -> f(x, -v)`.
    pub fn reflect_v(&self) -> Self {
        let d = &*self.disc;
        let (n, nx, nv, bl) = (d.n(), d.mesh.nx(), d.mesh.nv(), d.block_len());
        let mut out = vec![0.0; self.coeffs.len()];
        for i in 0..nx {
            for j in 0..nv {
                let src = &self.coeffs[(i * nv + j) * bl..][..bl];
                let dst = &mut out[(i * nv + nv - 1 - j) * bl..][..bl];
                for a in 0..n {
                    for b in 0..n {
                        let c = src[a * n + b];
                        dst[a * n + b] = if b % 2 == 1 { -c } else { c };
                    }
                }
            }
        }
        Self {
            disc: self.disc.clone(),
            coeffs: out,
        }
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &Self) -> Result<Self> {
        self.ensure_compatible(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + alpha * b)
            .collect();
        Ok(Self {
            disc: self.disc.clone(),
            coeffs,
        })
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            disc: self.disc.clone(),
            coeffs: self.coeffs.iter().map(|c| alpha * c).collect(),
        }
    }

    pub(crate) fn ensure_compatible(&self, other: &Self) -> Result<()> {
        if self.disc.same_space(&other.disc) {
            Ok(())
        } else {
            Err(Error::config("fields live on different discretizations"))
        }
    }

    /// Values at the tensor Gauss points, ordered (x-element, x-node,
    /// v-element, v-node).
    pub fn nodal_values(&self) -> Vec<f64> {
        let d = &*self.disc;
        let (n, nx, nv, bl) = (d.n(), d.mesh.nx(), d.mesh.nv(), d.block_len());
        let mut block_vals = vec![0.0; self.coeffs.len()];
        par::for_each_block(&mut block_vals, bl, |e, dst| {
            crate::basis::modal_to_nodal_block(&self.coeffs[e * bl..][..bl], &d.line, dst);
        });
        let mut out = Vec::with_capacity(self.coeffs.len());
        for i in 0..nx {
            for l in 0..n {
                for j in 0..nv {
                    let blk = &block_vals[(i * nv + j) * bl..][..bl];
                    out.extend_from_slice(&blk[l * n..(l + 1) * n]);
                }
            }
        }
        out
    }

    /// Writes the nodal snapshot: a `#` header line followed by `x v f` rows
    /// in the order of [`nodal_values`](Self::nodal_values).
    pub fn write_snapshot<W: Write>(&self, mut w: W, t: f64) -> Result<()> {
        let d = &*self.disc;
        let m = &d.mesh;
        let n = d.n();
        writeln!(
            w,
            "# t={t:.17e} nx={} nv={} k={} space={} lx={:.17e} vc={:.17e} columns=x,v,f",
            m.nx(),
            m.nv(),
            d.spec.degree,
            d.spec.kind.as_str(),
            m.lx(),
            m.vc()
        )?;
        let vals = self.nodal_values();
        let mut it = vals.iter();
        for i in 0..m.nx() {
            for l in 0..n {
                let x = m.x_at(i, d.line.rule.nodes[l]);
                for v in &d.vnodes {
                    writeln!(w, "{x:.17e} {v:.17e} {:.17e}", it.next().unwrap())?;
                }
            }
        }
        Ok(())
    }
}

/// Modal coefficients of `int f v^p dv` for raw distribution coefficients.
pub(crate) fn moment_coeffs(d: &Discretization, c: &[f64], p: usize) -> Vec<f64> {
    let (n, nv) = (d.n(), d.mesh.nv());
    let mom = &d.moments[p];
    let bl = d.block_len();
    let mut out = vec![0.0; d.x_len()];
    par::for_each_block(&mut out, n, |i, dst| {
        for j in 0..nv {
            let block = &c[(i * nv + j) * bl..][..bl];
            for a in 0..n {
                let mut s = 0.0;
                for b in 0..n {
                    s += block[a * n + b] * mom[j * n + b];
                }
                dst[a] += s;
            }
        }
    });
    out
}

impl XField {
    pub fn zeros(disc: &Arc<Discretization>) -> Self {
        Self {
            disc: disc.clone(),
            coeffs: vec![0.0; disc.x_len()],
        }
    }

    pub fn from_coeffs(disc: &Arc<Discretization>, coeffs: Vec<f64>) -> Result<Self> {
        check_len(disc.x_len(), coeffs.len())?;
        Ok(Self {
            disc: disc.clone(),
            coeffs,
        })
    }

    /// L2 projection of `g` with `2(k+1)` points per element.
    pub fn project<G: Fn(f64) -> f64>(disc: &Arc<Discretization>, g: G) -> Self {
        let d = &**disc;
        let (n, nq) = (d.n(), d.fine.len());
        let mut coeffs = vec![0.0; d.x_len()];
        for i in 0..d.mesh.nx() {
            for p in 0..nq {
                let gv = d.fine.weights[p] * g(d.mesh.x_at(i, d.fine.nodes[p]));
                for a in 0..n {
                    coeffs[i * n + a] += gv * d.fine_vand[p * n + a];
                }
            }
        }
        Self {
            disc: disc.clone(),
            coeffs,
        }
    }

    pub fn disc(&self) -> &Arc<Discretization> {
        &self.disc
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (i, xi) = self.disc.mesh.locate_x(x);
        let n = self.disc.n();
        (0..n)
            .map(|a| self.coeffs[i * n + a] * orthonormal_legendre(a, xi).0)
            .sum()
    }

    /// Values at the x Gauss nodes, ordered (element, node).
    pub fn nodal_values(&self) -> Vec<f64> {
        let n = self.disc.n();
        let mut out = vec![0.0; self.coeffs.len()];
        for (c, u) in self.coeffs.chunks(n).zip(out.chunks_mut(n)) {
            self.disc.line.to_nodal(c, u);
        }
        out
    }

    pub fn max_abs_nodal(&self) -> f64 {
        self.nodal_values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `int g^2 dx`.
    pub fn norm_sq(&self) -> f64 {
        0.5 * self.disc.mesh.dx() * self.coeffs.iter().map(|c| c * c).sum::<f64>()
    }

    /// `int g h dx`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        check_len(self.coeffs.len(), other.coeffs.len())?;
        Ok(0.5
            * self.disc.mesh.dx()
            * self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum::<f64>())
    }

    /// `int g dx`.
    pub fn integral(&self) -> f64 {
        let n = self.disc.n();
        let w = self.disc.mesh.dx() / std::f64::consts::SQRT_2;
        self.coeffs.iter().step_by(n).map(|c| w * c).sum()
    }

    pub fn axpy(&self, alpha: f64, other: &Self) -> Result<Self> {
        check_len(self.coeffs.len(), other.coeffs.len())?;
        Ok(Self {
            disc: self.disc.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + alpha * b)
                .collect(),
        })
    }

    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        Ok(self.axpy(-1.0, other)?.norm_sq().sqrt())
    }

    /// L2 distance to a function, integrated with the over-integration rule.
    pub fn l2_error<G: Fn(f64) -> f64>(&self, reference: G) -> f64 {
        let d = &*self.disc;
        let (n, nq) = (d.n(), d.fine.len());
        let mut s = 0.0;
        for i in 0..d.mesh.nx() {
            for p in 0..nq {
                let eh: f64 = (0..n).map(|a| self.coeffs[i * n + a] * d.fine_vand[p * n + a]).sum();
                let diff = eh - reference(d.mesh.x_at(i, d.fine.nodes[p]));
                s += d.fine.weights[p] * diff * diff;
            }
        }
        (0.5 * d.mesh.dx() * s).sqrt()
    }

    /// Writes `x value` rows at the x Gauss nodes after a `#` header line.
    pub fn write_dump<W: Write>(&self, mut w: W, name: &str, t: f64) -> Result<()> {
        let d = &*self.disc;
        writeln!(
            w,
            "# t={t:.17e} nx={} k={} lx={:.17e} columns=x,{name}",
            d.mesh.nx(),
            d.spec.degree,
            d.mesh.lx()
        )?;
        let vals = self.nodal_values();
        let n = d.n();
        for (idx, val) in vals.iter().enumerate() {
            let x = d.mesh.x_at(idx / n, d.line.rule.nodes[idx % n]);
            writeln!(w, "{x:.17e} {val:.17e}")?;
        }
        Ok(())
    }
}
