use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quadrature phases per bosonic mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Phases {
    pub c1: f64,
    pub m: f64,
    pub c2: f64,
}

impl Default for Phases {
    fn default() -> Self {
        Phases {
            c1: FRAC_PI_4,
            m: -FRAC_PI_4,
            c2: FRAC_PI_4,
        }
    }
}

/// Every physical parameter of the network, in units of ω_m.
///
/// Index `[0]` of the per-site pairs refers to atom/cavity 1, `[1]` to 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SystemParams {
    pub omega_m: f64,
    pub omega_c: [f64; 2],
    /// Level energies ω_{i,j}, i = 0, 1, 2.
    pub omega_atom: [[f64; 3]; 2],
    pub g: [f64; 2],
    pub lambda: f64,
    /// Tripartite coupling; `None` derives g_j λ / ω_m.
    #[serde(rename = "Lambda", skip_serializing_if = "Option::is_none")]
    pub big_lambda: Option<[f64; 2]>,
    #[serde(rename = "Omega1")]
    pub omega1: [f64; 2],
    #[serde(rename = "Omega2")]
    pub omega2: [f64; 2],
    /// Detuning ω_{2,j} − ω_{1,j} − ω_{c_j}; `None` derives it from the levels.
    #[serde(rename = "Delta", skip_serializing_if = "Option::is_none")]
    pub delta: Option<[f64; 2]>,
    pub q: f64,
    pub q_prime: f64,
    pub gamma21: [f64; 2],
    pub gamma10: [f64; 2],
    pub kappa_a: [f64; 2],
    pub kappa_b: f64,
    pub nbar_a: [f64; 2],
    pub nbar_c: [f64; 2],
    pub nbar_m: f64,
    pub phi: Phases,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            omega_m: 1.0,
            omega_c: [10.0, 10.0],
            // blue-detuned with the default cavity frequency: 14 − 5 − 10 = −1
            omega_atom: [[0.0, 5.0, 14.0], [0.0, 5.0, 14.0]],
            g: [100.0, 100.0],
            lambda: 0.01,
            big_lambda: None,
            omega1: [0.0, 0.0],
            omega2: [0.0, 0.0],
            delta: None,
            q: 0.0,
            q_prime: 0.0,
            gamma21: [0.0, 0.0],
            gamma10: [0.0, 0.0],
            kappa_a: [0.0, 0.0],
            kappa_b: 0.0,
            nbar_a: [0.0, 0.0],
            nbar_c: [0.0, 0.0],
            nbar_m: 0.0,
            phi: Phases::default(),
        }
    }
}

impl SystemParams {
    /// Resolved Λ_j.
    pub fn lambda_eff(&self, j: usize) -> f64 {
        match self.big_lambda {
            Some(l) => l[j],
            None => self.g[j] * self.lambda / self.omega_m,
        }
    }

    /// Resolved Δ_j.
    pub fn detuning(&self, j: usize) -> f64 {
        match self.delta {
            Some(d) => d[j],
            None => self.omega_atom[j][2] - self.omega_atom[j][1] - self.omega_c[j],
        }
    }

    /// True when any decay rate is nonzero.
    pub fn is_dissipative(&self) -> bool {
        self.rates().iter().any(|(_, v)| *v > 0.0)
    }

    fn rates(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        for j in 0..2 {
            out.push((format!("gamma21[{j}]"), self.gamma21[j]));
            out.push((format!("gamma10[{j}]"), self.gamma10[j]));
            out.push((format!("kappa_a[{j}]"), self.kappa_a[j]));
        }
        out.push(("kappa_b".into(), self.kappa_b));
        out
    }

    /// Physical validity: finite values, non-negative rates, occupations and
    /// pump amplitudes, positive ω_m.
    pub fn validate(&self) -> Result<()> {
        let at = |k: &str| format!("params.{k}");
        if !(self.omega_m.is_finite() && self.omega_m > 0.0) {
            return Err(Error::config(at("omega_m"), "must be positive"));
        }
        let mut nonneg = self.rates();
        for j in 0..2 {
            nonneg.push((format!("nbar_a[{j}]"), self.nbar_a[j]));
            nonneg.push((format!("nbar_c[{j}]"), self.nbar_c[j]));
        }
        nonneg.push(("nbar_m".into(), self.nbar_m));
        nonneg.push(("q".into(), self.q));
        nonneg.push(("q_prime".into(), self.q_prime));
        for (k, v) in &nonneg {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::config(at(k), format!("must be finite and >= 0, got {v}")));
            }
        }
        let mut finite = vec![("lambda".to_string(), self.lambda)];
        for j in 0..2 {
            finite.push((format!("omega_c[{j}]"), self.omega_c[j]));
            finite.push((format!("g[{j}]"), self.g[j]));
            finite.push((format!("Omega1[{j}]"), self.omega1[j]));
            finite.push((format!("Omega2[{j}]"), self.omega2[j]));
            finite.push((format!("Lambda[{j}]"), self.lambda_eff(j)));
            finite.push((format!("Delta[{j}]"), self.detuning(j)));
            for i in 0..3 {
                finite.push((format!("omega_atom[{j}][{i}]"), self.omega_atom[j][i]));
            }
        }
        finite.push(("phi.c1".into(), self.phi.c1));
        finite.push(("phi.m".into(), self.phi.m));
        finite.push(("phi.c2".into(), self.phi.c2));
        for (k, v) in &finite {
            if !v.is_finite() {
                return Err(Error::config(at(k), "must be finite"));
            }
        }
        Ok(())
    }

    /// Error unless both sites sit at Δ_j = −ω_m.
    pub fn require_blue_detuned(&self) -> Result<()> {
        for j in 0..2 {
            let d = self.detuning(j);
            if (d + self.omega_m).abs() > 1e-12 * self.omega_m.max(1.0) {
                return Err(Error::ModelRegime(format!(
                    "effective Hamiltonian needs Delta[{j}] = -omega_m = {}, got {d}",
                    -self.omega_m
                )));
            }
        }
        Ok(())
    }
}
