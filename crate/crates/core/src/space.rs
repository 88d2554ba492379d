//! Precomputed tables for one mesh and polynomial space.

use std::sync::Arc;

use crate::basis::{gauss_rule, orthonormal_legendre, BasisSpec, LineBasis, QuadratureRule, MAX_POINTS};
use crate::error::{Error, Result};
use crate::mesh::PhaseMesh;

/// Mesh, basis and every quadrature table the operators need.
///
/// Fields hold an `Arc` to one of these, so a field is self-describing and
/// cheap to clone.
#[derive(Debug)]
pub struct Discretization {
    pub mesh: PhaseMesh,
    pub spec: BasisSpec,
    /// `k + 1` point tables used inside the schemes.
    pub line: LineBasis,
    /// `2(k + 1)` point rule for projection and error norms.
    pub fine: QuadratureRule,
    /// `fine_vand[p * n + a] = phi_a(fine node p)`
    pub fine_vand: Vec<f64>,
    /// `vnodes[j * n + m]`: physical velocity of Gauss node `m` in v-element `j`.
    pub vnodes: Vec<f64>,
    /// `moments[p][j * n + b] = int_{K_j} phi_b v^p dv` for `p = 0, 1, 2`.
    pub moments: [Vec<f64>; 3],
    /// `active[a * n + b]`: whether the coefficient belongs to the space.
    pub active: Vec<bool>,
}

impl Discretization {
    pub fn new(mesh: PhaseMesh, spec: BasisSpec) -> Result<Arc<Self>> {
        let n = spec.points();
        if n > MAX_POINTS {
            return Err(Error::config(format!(
                "degree {} exceeds the supported maximum {}",
                spec.degree,
                MAX_POINTS - 1
            )));
        }
        let line = LineBasis::new(n)?;
        let fine = gauss_rule(2 * n)?;
        let mut fine_vand = vec![0.0; 2 * n * n];
        for (p, &x) in fine.nodes.iter().enumerate() {
            for a in 0..n {
                fine_vand[p * n + a] = orthonormal_legendre(a, x).0;
            }
        }
        let nv = mesh.nv();
        let half_dv = 0.5 * mesh.dv();
        let mut vnodes = vec![0.0; nv * n];
        for j in 0..nv {
            for m in 0..n {
                vnodes[j * n + m] = mesh.v_center(j) + half_dv * line.rule.nodes[m];
            }
        }
        let moments = [0, 1, 2].map(|p| {
            let mut out = vec![0.0; nv * n];
            for j in 0..nv {
                for b in 0..n {
                    out[j * n + b] = half_dv
                        * (0..n)
                            .map(|m| line.weight(m) * line.phi(m, b) * vnodes[j * n + m].powi(p))
                            .sum::<f64>();
                }
            }
            out
        });
        let active = (0..n * n).map(|ab| spec.is_active(ab / n, ab % n)).collect();
        Ok(Arc::new(Self {
            mesh,
            spec,
            line,
            fine,
            fine_vand,
            vnodes,
            moments,
            active,
        }))
    }

    /// Points per direction, `k + 1`.
    #[inline]
    pub fn n(&self) -> usize {
        self.line.n
    }

    pub fn block_len(&self) -> usize {
        self.n() * self.n()
    }

    /// Total stored coefficients of a distribution field.
    pub fn f_len(&self) -> usize {
        self.mesh.num_elements() * self.block_len()
    }

    /// Total coefficients of an x-field.
    pub fn x_len(&self) -> usize {
        self.mesh.nx() * self.n()
    }

    /// Jacobian of the reference map of one phase-space element.
    pub fn element_mass(&self) -> f64 {
        0.25 * self.mesh.dx() * self.mesh.dv()
    }

    /// Start of the block of element `(i, j)`.
    #[inline]
    pub fn block_offset(&self, i: usize, j: usize) -> usize {
        (i * self.mesh.nv() + j) * self.block_len()
    }

    /// Positions of active coefficients in the flat distribution vector.
    pub fn active_dofs(&self) -> Vec<usize> {
        let bl = self.block_len();
        let local: Vec<usize> = (0..bl).filter(|&ab| self.active[ab]).collect();
        (0..self.mesh.num_elements())
            .flat_map(|e| local.iter().map(move |&ab| e * bl + ab))
            .collect()
    }

    /// Zeroes every coefficient outside the polynomial space.
    pub fn restrict(&self, coeffs: &mut [f64]) {
        if self.active.iter().all(|&a| a) {
            return;
        }
        for block in coeffs.chunks_mut(self.block_len()) {
            for (c, &on) in block.iter_mut().zip(&self.active) {
                if !on {
                    *c = 0.0;
                }
            }
        }
    }

    pub fn same_space(&self, other: &Self) -> bool {
        std::ptr::eq(self, other) || (self.mesh == other.mesh && self.spec == other.spec)
    }
}
