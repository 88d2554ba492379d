//! Gauss–Legendre quadrature, Legendre polynomials and the per-direction
//! tables shared by every DG operator.
//!
//! Fields are stored in the orthonormal Legendre basis
//! `phi_a(xi) = sqrt(a + 1/2) P_a(xi)` on the reference interval, one tensor
//! block of `(k+1)^2` coefficients per phase-space element with index
//! `a * (k+1) + b` (`a` the x-degree, `b` the v-degree). Total-degree spaces
//! use the same blocks with every coefficient of `a + b > k` held at zero.

use crate::error::{Error, Result};

/// Value and derivative of the Legendre polynomial `P_n` at `x`.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    let (mut d0, mut d1) = (0.0, 1.0);
    for m in 1..n {
        let mf = m as f64;
        let p2 = ((2.0 * mf + 1.0) * x * p1 - mf * p0) / (mf + 1.0);
        // P'_{m+1} = P'_{m-1} + (2m+1) P_m
        let d2 = d0 + (2.0 * mf + 1.0) * p1;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
    }
    (p1, d1)
}

/// Orthonormal Legendre function `sqrt(a + 1/2) P_a` and its derivative.
pub fn orthonormal_legendre(a: usize, x: f64) -> (f64, f64) {
    let s = (a as f64 + 0.5).sqrt();
    let (p, d) = legendre(a, x);
    (s * p, s * d)
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Applies the rule to `f` on the reference interval.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `n`-point Gauss–Legendre rule, nodes ascending and exactly antisymmetric.
pub fn gauss_rule(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::config("a Gauss rule needs at least one point"));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, descending from the right end
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        if 2 * i + 1 == n {
            x = 0.0;
        }
        let (_, d) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * d * d);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Which local polynomial space the distribution function lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// Total degree `<= k` on each element.
    TotalDegreeP,
    /// Degree `<= k` in each variable separately.
    TensorQ,
}

impl SpaceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SpaceKind::TotalDegreeP => "p",
            SpaceKind::TensorQ => "q",
        }
    }
}

impl std::str::FromStr for SpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p" | "total" | "total_degree" => Ok(SpaceKind::TotalDegreeP),
            "q" | "tensor" => Ok(SpaceKind::TensorQ),
            other => Err(Error::config(format!("unknown polynomial space `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisSpec {
    pub degree: usize,
    pub kind: SpaceKind,
}

impl BasisSpec {
    pub fn new(degree: usize, kind: SpaceKind) -> Result<Self> {
        if degree == 0 {
            return Err(Error::config("polynomial degree must be at least 1"));
        }
        Ok(Self { degree, kind })
    }

    /// Quadrature points per direction, `k + 1`.
    pub fn points(&self) -> usize {
        self.degree + 1
    }

    /// Dimension of the local space.
    pub fn dim(&self) -> usize {
        let n = self.points();
        match self.kind {
            SpaceKind::TotalDegreeP => n * (n + 1) / 2,
            SpaceKind::TensorQ => n * n,
        }
    }

    /// Length of the stored tensor block.
    pub fn block_len(&self) -> usize {
        self.points() * self.points()
    }

    /// Whether tensor coefficient `(a, b)` belongs to the space.
    pub fn is_active(&self, a: usize, b: usize) -> bool {
        match self.kind {
            SpaceKind::TotalDegreeP => a + b <= self.degree,
            SpaceKind::TensorQ => a <= self.degree && b <= self.degree,
        }
    }

    /// Active positions within a block, in storage order.
    pub fn active_indices(&self) -> Vec<usize> {
        let n = self.points();
        (0..n * n).filter(|&ab| self.is_active(ab / n, ab % n)).collect()
    }
}

/// One-direction tables for `n` Gauss points and the degree `n - 1`
/// orthonormal Legendre basis.
#[derive(Clone, Debug)]
pub struct LineBasis {
    pub n: usize,
    pub rule: QuadratureRule,
    /// `vand[l * n + a] = phi_a(xi_l)`
    pub vand: Vec<f64>,
    /// `dvand[l * n + a] = phi_a'(xi_l)`
    pub dvand: Vec<f64>,
    /// `phi_a(-1)`
    pub left: Vec<f64>,
    /// `phi_a(1)`
    pub right: Vec<f64>,
    /// `stiff[a * n + c] = int phi_a phi_c' dxi`
    pub stiff: Vec<f64>,
    /// Lagrange cardinal functions at the Gauss nodes evaluated at `-1` and `1`.
    pub lagrange_left: Vec<f64>,
    pub lagrange_right: Vec<f64>,
}

impl LineBasis {
    pub fn new(n: usize) -> Result<Self> {
        let rule = gauss_rule(n)?;
        let mut vand = vec![0.0; n * n];
        let mut dvand = vec![0.0; n * n];
        for l in 0..n {
            for a in 0..n {
                let (p, d) = orthonormal_legendre(a, rule.nodes[l]);
                vand[l * n + a] = p;
                dvand[l * n + a] = d;
            }
        }
        let left: Vec<f64> = (0..n).map(|a| orthonormal_legendre(a, -1.0).0).collect();
        let right: Vec<f64> = (0..n).map(|a| orthonormal_legendre(a, 1.0).0).collect();
        let mut stiff = vec![0.0; n * n];
        for a in 0..n {
            for c in 0..n {
                stiff[a * n + c] = (0..n)
                    .map(|l| rule.weights[l] * vand[l * n + a] * dvand[l * n + c])
                    .sum();
            }
        }
        let cardinal = |ends: &[f64]| -> Vec<f64> {
            (0..n)
                .map(|l| {
                    (0..n)
                        .map(|a| ends[a] * rule.weights[l] * vand[l * n + a])
                        .sum()
                })
                .collect()
        };
        let lagrange_left = cardinal(&left);
        let lagrange_right = cardinal(&right);
        Ok(Self {
            n,
            rule,
            vand,
            dvand,
            left,
            right,
            stiff,
            lagrange_left,
            lagrange_right,
        })
    }

    #[inline]
    pub fn phi(&self, l: usize, a: usize) -> f64 {
        self.vand[l * self.n + a]
    }

    #[inline]
    pub fn dphi(&self, l: usize, a: usize) -> f64 {
        self.dvand[l * self.n + a]
    }

    pub fn weight(&self, l: usize) -> f64 {
        self.rule.weights[l]
    }

    /// Values at the Gauss nodes of the polynomial with modal coefficients `c`.
    pub fn to_nodal(&self, c: &[f64], out: &mut [f64]) {
        let n = self.n;
        for l in 0..n {
            out[l] = (0..n).map(|a| self.vand[l * n + a] * c[a]).sum();
        }
    }

    /// Modal coefficients of the interpolant of nodal values `u`.
    pub fn to_modal(&self, u: &[f64], out: &mut [f64]) {
        let n = self.n;
        for a in 0..n {
            out[a] = (0..n)
                .map(|l| self.rule.weights[l] * self.vand[l * n + a] * u[l])
                .sum();
        }
    }

    pub fn eval(&self, c: &[f64], xi: f64) -> f64 {
        c.iter()
            .enumerate()
            .map(|(a, &ca)| ca * orthonormal_legendre(a, xi).0)
            .sum()
    }
}

/// Modal tensor block to values at the `(k+1)^2` tensor Gauss points,
/// stored `l * n + m` (x-node, v-node).
pub fn modal_to_nodal(coeffs: &[f64], line: &LineBasis) -> Result<Vec<f64>> {
    let n = line.n;
    if coeffs.len() != n * n {
        return Err(Error::Shape {
            expected: n * n,
            found: coeffs.len(),
        });
    }
    let mut out = vec![0.0; n * n];
    modal_to_nodal_block(coeffs, line, &mut out);
    Ok(out)
}

/// Inverse of [`modal_to_nodal`].
pub fn nodal_to_modal(values: &[f64], line: &LineBasis) -> Result<Vec<f64>> {
    let n = line.n;
    if values.len() != n * n {
        return Err(Error::Shape {
            expected: n * n,
            found: values.len(),
        });
    }
    let mut out = vec![0.0; n * n];
    nodal_to_modal_block(values, line, &mut out);
    Ok(out)
}

pub(crate) fn modal_to_nodal_block(c: &[f64], line: &LineBasis, out: &mut [f64]) {
    let n = line.n;
    let mut half = [0.0; MAX_BLOCK];
    // v-direction: half[a*n+m] = sum_b c[a*n+b] phi_b(eta_m)
    for a in 0..n {
        for m in 0..n {
            let mut s = 0.0;
            for b in 0..n {
                s += c[a * n + b] * line.vand[m * n + b];
            }
            half[a * n + m] = s;
        }
    }
    for l in 0..n {
        for m in 0..n {
            let mut s = 0.0;
            for a in 0..n {
                s += line.vand[l * n + a] * half[a * n + m];
            }
            out[l * n + m] = s;
        }
    }
}

pub(crate) fn nodal_to_modal_block(u: &[f64], line: &LineBasis, out: &mut [f64]) {
    let n = line.n;
    let w = &line.rule.weights;
    let mut half = [0.0; MAX_BLOCK];
    for l in 0..n {
        for b in 0..n {
            let mut s = 0.0;
            for m in 0..n {
                s += w[m] * line.vand[m * n + b] * u[l * n + m];
            }
            half[l * n + b] = s;
        }
    }
    for a in 0..n {
        for b in 0..n {
            let mut s = 0.0;
            for l in 0..n {
                s += w[l] * line.vand[l * n + a] * half[l * n + b];
            }
            out[a * n + b] = s;
        }
    }
}

/// Largest supported points-per-direction; sizes the stack scratch buffers.
pub const MAX_POINTS: usize = 8;
pub(crate) const MAX_BLOCK: usize = MAX_POINTS * MAX_POINTS;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_rule() {
        let r = gauss_rule(1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_eq!(r.weights, vec![2.0]);
    }

    #[test]
    fn two_point_rule() {
        let r = gauss_rule(2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((r.nodes[0] + s).abs() < 1e-15 && (r.nodes[1] - s).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15 && (r.weights[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn three_point_rule_quartic() {
        let r = gauss_rule(3).unwrap();
        assert!((r.integrate(|x| x.powi(4)) - 0.4).abs() <= 1e-14);
    }

    #[test]
    fn zero_points_rejected() {
        assert!(gauss_rule(0).is_err());
    }

    #[test]
    fn monomial_exactness_up_to_six_points() {
        for n in 1..=6 {
            let r = gauss_rule(n).unwrap();
            let wsum: f64 = r.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14);
            assert!(r.weights.iter().all(|&w| w > 0.0));
            assert!(r.nodes.windows(2).all(|p| p[0] < p[1]));
            for m in 0..2 * n {
                let exact = if m % 2 == 1 { 0.0 } else { 2.0 / (m as f64 + 1.0) };
                let got = r.integrate(|x| x.powi(m as i32));
                assert!((got - exact).abs() <= 1e-13, "n={n} m={m}: {got} vs {exact}");
            }
            for i in 0..n {
                assert_eq!(r.nodes[i], -r.nodes[n - 1 - i]);
            }
        }
    }

    #[test]
    fn legendre_values() {
        for n in 0..8 {
            assert!((legendre(n, 1.0).0 - 1.0).abs() < 1e-15);
        }
        let x = 0.3;
        assert_eq!(legendre(1, x), (x, 1.0));
        assert!((legendre(2, 0.0).0 + 0.5).abs() < 1e-16);
        // P_3' = (15x^2 - 3)/2
        assert!((legendre(3, x).1 - (15.0 * x * x - 3.0) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn orthonormal_mass_is_identity() {
        for n in 1..=5 {
            let lb = LineBasis::new(n).unwrap();
            for a in 0..n {
                for c in 0..n {
                    let m: f64 = (0..n).map(|l| lb.weight(l) * lb.phi(l, a) * lb.phi(l, c)).sum();
                    let want = if a == c { 1.0 } else { 0.0 };
                    assert!((m - want).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn tensor_transforms_round_trip() {
        let lb = LineBasis::new(3).unwrap();
        let c: Vec<f64> = (0..9).map(|i| (i as f64 * 0.37).sin()).collect();
        let u = modal_to_nodal(&c, &lb).unwrap();
        let back = nodal_to_modal(&u, &lb).unwrap();
        for (x, y) in c.iter().zip(&back) {
            assert!((x - y).abs() < 1e-13);
        }
        assert!(modal_to_nodal(&c[..4], &lb).is_err());
    }

    #[test]
    fn constant_and_linear_nodal_values() {
        let lb = LineBasis::new(2).unwrap();
        // constant 3 = 3 sqrt(2) phi_0 phi_0 ... phi_0 = 1/sqrt(2)
        let mut c = vec![0.0; 4];
        c[0] = 3.0 * 2.0;
        let u = modal_to_nodal(&c, &lb).unwrap();
        assert!(u.iter().all(|&x| (x - 3.0).abs() < 1e-14));
        // f(xi, eta) = xi: phi_1(xi) phi_0(eta) has value xi * sqrt(3/2) / sqrt(2)
        let mut c = vec![0.0; 4];
        c[1 * 2] = 2.0 / 3f64.sqrt();
        let u = modal_to_nodal(&c, &lb).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((u[0] + s).abs() < 1e-14 && (u[1] + s).abs() < 1e-14);
        assert!((u[2] - s).abs() < 1e-14 && (u[3] - s).abs() < 1e-14);
    }

    #[test]
    fn dimensions() {
        let p = BasisSpec::new(2, SpaceKind::TotalDegreeP).unwrap();
        let q = BasisSpec::new(2, SpaceKind::TensorQ).unwrap();
        assert_eq!(p.dim(), 6);
        assert_eq!(q.dim(), 9);
        assert_eq!(p.active_indices().len(), 6);
        // v^2 (a = 0, b = 2) is in both spaces for k = 2
        assert!(p.is_active(0, 2) && q.is_active(0, 2));
        assert!(BasisSpec::new(0, SpaceKind::TensorQ).is_err());
    }

    #[test]
    fn lagrange_endpoint_values_reproduce_traces() {
        let lb = LineBasis::new(4).unwrap();
        let c = [0.3, -1.2, 0.7, 0.05];
        let mut u = [0.0; 4];
        lb.to_nodal(&c, &mut u);
        let via_modal: f64 = c.iter().zip(&lb.right).map(|(a, b)| a * b).sum();
        let via_nodal: f64 = u.iter().zip(&lb.lagrange_right).map(|(a, b)| a * b).sum();
        assert!((via_modal - via_nodal).abs() < 1e-13);
    }
}
