//! Conserved quantities, the Scheme-3 modified energy, log Fourier modes and
//! the time-series record.
//!
//! Energies use the convention `TE = 1/2 int int f v^2 + 1/2 int E^2`.

use crate::dg::gauss_law_residual;
use crate::error::Result;
use crate::field::{DistributionField, ElectricField, ION_DENSITY};

/// Value returned by [`log_fourier_mode`] when the mode amplitude vanishes.
pub const LOG_FLOOR: f64 = -16.0;

pub fn total_mass(f: &DistributionField) -> f64 {
    f.rho().integral()
}

pub fn kinetic_energy(f: &DistributionField) -> f64 {
    0.5 * f.second_moment().integral()
}

pub fn electric_energy(e: &ElectricField) -> f64 {
    0.5 * e.norm_sq()
}

pub fn total_energy(f: &DistributionField, e: &ElectricField) -> f64 {
    kinetic_energy(f) + electric_energy(e)
}

pub fn momentum(f: &DistributionField) -> f64 {
    f.current().integral()
}

/// `int int f^2`, exact by Parseval in the orthonormal basis.
pub fn enstrophy(f: &DistributionField) -> f64 {
    let l2 = f.l2_norm();
    l2 * l2
}

/// `int int f v^2 + int E^{n+1/2} E^{n-1/2}`, without the factor 1/2.
pub fn modified_energy_s3(
    f: &DistributionField,
    e_half_prev: &ElectricField,
    e_half_next: &ElectricField,
) -> Result<f64> {
    Ok(f.second_moment().integral() + e_half_prev.inner(e_half_next)?)
}

/// The Scheme-3 invariant in the 1/2 convention, expressed through the
/// state at an integer time level: `TE - dt^2/8 int J^2`.
pub fn modified_energy_from_state(f: &DistributionField, e: &ElectricField, dt: f64) -> f64 {
    total_energy(f, e) - dt * dt / 8.0 * f.current().norm_sq()
}

/// `log10` of the amplitude of Fourier mode `n` (wavenumber `n kappa`) of `E`.
pub fn log_fourier_mode(e: &ElectricField, n: usize, kappa: f64) -> f64 {
    let d = e.disc();
    let mesh = &d.mesh;
    let k = d.n();
    let wave = n as f64 * kappa;
    let half_dx = 0.5 * mesh.dx();
    let (mut s, mut c) = (0.0, 0.0);
    for i in 0..mesh.nx() {
        let block = &e.coeffs()[i * k..][..k];
        for (p, (&xi, &w)) in d.fine.nodes.iter().zip(&d.fine.weights).enumerate() {
            let val: f64 = (0..k).map(|a| block[a] * d.fine_vand[p * k + a]).sum();
            let x = mesh.x_at(i, xi);
            s += half_dx * w * val * (wave * x).sin();
            c += half_dx * w * val * (wave * x).cos();
        }
    }
    let amp = s.hypot(c) / mesh.lx();
    if amp > 0.0 {
        amp.log10().max(LOG_FLOOR)
    } else {
        LOG_FLOOR
    }
}

/// `|q - q0| / max(|q0|, 1e-14)`.
pub fn relative_drift(q: f64, q0: f64) -> f64 {
    (q - q0).abs() / q0.abs().max(1e-14)
}

/// One sample of the time series.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    pub kinetic: f64,
    pub electric: f64,
    pub total_energy: f64,
    pub modified_energy: Option<f64>,
    pub momentum: f64,
    pub enstrophy: f64,
    pub l2_f: f64,
    pub gauss_law_defect: f64,
    pub log_fm: [f64; 4],
}

impl DiagnosticsRecord {
    pub const COLUMNS: [&'static str; 14] = [
        "t",
        "mass",
        "kinetic",
        "electric",
        "total_energy",
        "modified_energy",
        "momentum",
        "enstrophy",
        "l2_f",
        "gauss_law_defect",
        "log_fm1",
        "log_fm2",
        "log_fm3",
        "log_fm4",
    ];

    pub fn sample(
        t: f64,
        f: &DistributionField,
        e: &ElectricField,
        kappa: f64,
        modified_energy: Option<f64>,
    ) -> Result<Self> {
        let kinetic = kinetic_energy(f);
        let electric = electric_energy(e);
        let ens = enstrophy(f);
        Ok(Self {
            t,
            mass: total_mass(f),
            kinetic,
            electric,
            total_energy: kinetic + electric,
            modified_energy,
            momentum: momentum(f),
            enstrophy: ens,
            l2_f: ens.sqrt(),
            gauss_law_defect: gauss_law_residual(e, &f.rho(), ION_DENSITY)?,
            log_fm: [1, 2, 3, 4].map(|n| log_fourier_mode(e, n, kappa)),
        })
    }

    pub fn csv_header() -> String {
        Self::COLUMNS.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut vals = vec![
            self.t,
            self.mass,
            self.kinetic,
            self.electric,
            self.total_energy,
            self.modified_energy.unwrap_or(f64::NAN),
            self.momentum,
            self.enstrophy,
            self.l2_f,
            self.gauss_law_defect,
        ];
        vals.extend_from_slice(&self.log_fm);
        vals.iter()
            .map(|v| format!("{v:.17e}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses a row written by [`csv_row`](Self::csv_row).
    pub fn from_csv_row(line: &str) -> Option<Self> {
        let v: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .ok()?;
        if v.len() != Self::COLUMNS.len() {
            return None;
        }
        Some(Self {
            t: v[0],
            mass: v[1],
            kinetic: v[2],
            electric: v[3],
            total_energy: v[4],
            modified_energy: (!v[5].is_nan()).then_some(v[5]),
            momentum: v[6],
            enstrophy: v[7],
            l2_f: v[8],
            gauss_law_defect: v[9],
            log_fm: [v[10], v[11], v[12], v[13]],
        })
    }
}
