use crate::error::{Error, Result};

/// Uniform tensor-product mesh of `[0, lx] x [-vc, vc]`, periodic in x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseMesh {
    lx: f64,
    vc: f64,
    nx: usize,
    nv: usize,
}

impl PhaseMesh {
    pub fn new(lx: f64, vc: f64, nx: usize, nv: usize) -> Result<Self> {
        if !(lx.is_finite() && lx > 0.0) {
            return Err(Error::config(format!("domain length must be positive, got {lx}")));
        }
        if !(vc.is_finite() && vc > 0.0) {
            return Err(Error::config(format!("velocity cutoff must be positive, got {vc}")));
        }
        if nx == 0 || nv == 0 {
            return Err(Error::config(format!("element counts must be positive, got {nx}x{nv}")));
        }
        Ok(Self { lx, vc, nx, nv })
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn vc(&self) -> f64 {
        self.vc
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dv(&self) -> f64 {
        2.0 * self.vc / self.nv as f64
    }

    pub fn num_elements(&self) -> usize {
        self.nx * self.nv
    }

    /// Left edge of x-element `i`; `x_edge(nx) == lx`.
    pub fn x_edge(&self, i: usize) -> f64 {
        if i == self.nx {
            self.lx
        } else {
            i as f64 * self.dx()
        }
    }

    pub fn x_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx()
    }

    /// Lower edge of v-element `j`; `v_edge(nv) == vc`.
    pub fn v_edge(&self, j: usize) -> f64 {
        // integer numerators keep the grid exactly antisymmetric
        (2.0 * j as f64 - self.nv as f64) * (self.vc / self.nv as f64)
    }

    pub fn v_center(&self, j: usize) -> f64 {
        (2.0 * j as f64 + 1.0 - self.nv as f64) * (self.vc / self.nv as f64)
    }

    /// Element index of the reflection `v -> -v`.
    pub fn mirror_v(&self, j: usize) -> usize {
        self.nv - 1 - j
    }

    /// Physical x for reference coordinate `xi` in element `i`.
    pub fn x_at(&self, i: usize, xi: f64) -> f64 {
        self.x_center(i) + 0.5 * self.dx() * xi
    }

    pub fn v_at(&self, j: usize, eta: f64) -> f64 {
        self.v_center(j) + 0.5 * self.dv() * eta
    }

    /// Element containing `x` (taken modulo the period) and its reference coordinate.
    pub fn locate_x(&self, x: f64) -> (usize, f64) {
        let xr = x.rem_euclid(self.lx);
        let i = ((xr / self.dx()) as usize).min(self.nx - 1);
        (i, 2.0 * (xr - self.x_center(i)) / self.dx())
    }

    /// Element containing `v`, or `None` outside `[-vc, vc]`.
    pub fn locate_v(&self, v: f64) -> Option<(usize, f64)> {
        if v < -self.vc || v > self.vc {
            return None;
        }
        let j = (((v + self.vc) / self.dv()) as usize).min(self.nv - 1);
        Some((j, 2.0 * (v - self.v_center(j)) / self.dv()))
    }
}
