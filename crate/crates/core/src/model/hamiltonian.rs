//! Hamiltonian builders for the two-atom, two-cavity, one-mirror network.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::params::SystemParams;
use crate::error::{Error, Result};
use crate::hilbert::space::{ATOM1, ATOM2, CAVITY1, CAVITY2, MO};
use crate::hilbert::{atomic_sigma, destroy, embed, CompositeSpace, QOperator};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Embedded ladder and atomic operators of the network.
pub struct NetworkOps {
    pub space: CompositeSpace,
    /// Cavity annihilators a_1, a_2.
    pub a: [QOperator; 2],
    pub b: QOperator,
    atoms: [usize; 2],
}

impl NetworkOps {
    pub fn new(space: &CompositeSpace) -> Result<Self> {
        if !space.is_network() {
            return Err(Error::SpaceShape(format!(
                "expected parts (a1, a2, c1, m, c2), got {:?}",
                space.parts().iter().map(|p| p.label.as_str()).collect::<Vec<_>>()
            )));
        }
        let dims = space.dims();
        let mode = |k: usize| embed(&destroy(dims[k])?, k, space);
        Ok(NetworkOps {
            space: space.clone(),
            a: [mode(CAVITY1)?, mode(CAVITY2)?],
            b: mode(MO)?,
            atoms: [ATOM1, ATOM2],
        })
    }

    /// `|k⟩⟨l|` on atom `j` (0 or 1).
    pub fn sigma(&self, j: usize, k: usize, l: usize) -> Result<QOperator> {
        embed(&atomic_sigma(3, k, l)?, self.atoms[j], &self.space)
    }

    /// σ⁺_{21,j} = |2⟩⟨1|.
    pub fn sigma21_plus(&self, j: usize) -> Result<QOperator> {
        self.sigma(j, 2, 1)
    }

    /// a_j σ⁺_{21,j}, the atom-photon factor shared by all tripartite terms.
    pub fn jc_factor(&self, j: usize) -> Result<QOperator> {
        self.a[j].multiply(&self.sigma21_plus(j)?)
    }

    pub fn zero(&self) -> QOperator {
        QOperator::zero(&self.space)
    }
}

/// Bare Hamiltonian with Jaynes-Cummings and radiation-pressure couplings.
pub fn build_full_hamiltonian(p: &SystemParams, space: &CompositeSpace) -> Result<QOperator> {
    let ops = NetworkOps::new(space)?;
    let bd = ops.b.dag();
    let mut h = bd.multiply(&ops.b)?.scale(re(p.omega_m));
    let x_b = ops.b.add(&bd)?;
    for j in 0..2 {
        let n = ops.a[j].dag().multiply(&ops.a[j])?;
        h = h.add_scaled(re(p.omega_c[j]), &n)?;
        for i in 0..3 {
            h = h.add_scaled(re(p.omega_atom[j][i]), &ops.sigma(j, i, i)?)?;
        }
        h = h.add_scaled(re(p.g[j]), &ops.jc_factor(j)?.plus_hc())?;
        // (−1)^j with j = 1, 2
        let sign = if j == 0 { -1.0 } else { 1.0 };
        h = h.add_scaled(re(sign * p.lambda), &n.multiply(&x_b)?)?;
    }
    Ok(h)
}

/// Blue-detuned tripartite Hamiltonian Σ_j (−1)^{j+1} Λ_j a_j σ⁺_{21,j} b† + h.c.
///
/// The sign follows the static limit of the rotating-frame interaction; the
/// phase printed next to the first-order form carries (−1)^j instead, which
/// only flips the relative sign convention of site 2.
pub fn build_effective_hamiltonian(p: &SystemParams, space: &CompositeSpace) -> Result<QOperator> {
    p.require_blue_detuned()?;
    let ops = NetworkOps::new(space)?;
    let bd = ops.b.dag();
    let mut h = ops.zero();
    for j in 0..2 {
        let l = p.lambda_eff(j);
        if l == 0.0 {
            continue;
        }
        let sign = if j == 0 { 1.0 } else { -1.0 };
        let term = ops.jc_factor(j)?.multiply(&bd)?;
        h = h.add_scaled(re(sign * l), &term.plus_hc())?;
    }
    Ok(h)
}

/// Resonant atomic drives on |2⟩↔|0⟩ (Ω₁) and |1⟩↔|0⟩ (Ω₂).
pub fn build_drive_hamiltonian(p: &SystemParams, space: &CompositeSpace) -> Result<QOperator> {
    let ops = NetworkOps::new(space)?;
    let mut h = ops.zero();
    for j in 0..2 {
        if p.omega1[j] != 0.0 {
            h = h.add_scaled(re(p.omega1[j]), &ops.sigma(j, 0, 2)?.plus_hc())?;
        }
        if p.omega2[j] != 0.0 {
            h = h.add_scaled(re(p.omega2[j]), &ops.sigma(j, 0, 1)?.plus_hc())?;
        }
    }
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PumpTarget {
    Mo,
    Cavity1,
}

impl std::str::FromStr for PumpTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mo" | "m" => Ok(PumpTarget::Mo),
            "cavity1" | "c1" => Ok(PumpTarget::Cavity1),
            other => Err(Error::InvalidTarget(format!(
                "squeeze pump target `{other}`; expected `mo` or `cavity1`"
            ))),
        }
    }
}

/// Two-phonon (q) or two-photon (q′) squeeze pump: amp·(O†² + O²).
pub fn build_squeeze_pump(
    p: &SystemParams,
    space: &CompositeSpace,
    target: PumpTarget,
) -> Result<QOperator> {
    let ops = NetworkOps::new(space)?;
    let (amp, o) = match target {
        PumpTarget::Mo => (p.q, &ops.b),
        PumpTarget::Cavity1 => (p.q_prime, &ops.a[0]),
    };
    if amp == 0.0 {
        return Ok(ops.zero());
    }
    Ok(o.multiply(o)?.plus_hc().scale(re(amp)))
}

/// H(t) = static + Σ_k (A_k e^{iω_k t} + A_k† e^{−iω_k t}).
#[derive(Clone, Debug)]
pub struct TimeDependentHamiltonian {
    pub static_part: QOperator,
    /// (A, ω) pairs; ω is a real angular frequency so H(t) stays Hermitian.
    pub oscillating: Vec<(QOperator, f64)>,
}

impl TimeDependentHamiltonian {
    pub fn constant(h: QOperator) -> Self {
        TimeDependentHamiltonian {
            static_part: h,
            oscillating: Vec::new(),
        }
    }

    pub fn space(&self) -> &CompositeSpace {
        self.static_part.space()
    }

    pub fn at(&self, t: f64) -> Result<QOperator> {
        let mut h = self.static_part.clone();
        for (a, w) in &self.oscillating {
            let ph = C64::from_polar(1.0, w * t);
            h = h.add_scaled(ph, a)?.add_scaled(ph.conj(), &a.dag())?;
        }
        Ok(h)
    }
}

/// Rotating-frame interaction before discarding the ω_m and 2ω_m terms.
///
/// With A_j = a_j σ⁺_{21,j} and s_j = (−1)^j:
/// g_j A_j e^{−iω_m t} + s_j Λ_j [A_j (b† − b) e^{−iω_m t} − A_j b† + A_j b e^{−2iω_m t}] + h.c.
/// Its static part is exactly [`build_effective_hamiltonian`].
pub fn build_time_dependent_a12(
    p: &SystemParams,
    space: &CompositeSpace,
) -> Result<TimeDependentHamiltonian> {
    let h_static = build_effective_hamiltonian(p, space)?;
    let ops = NetworkOps::new(space)?;
    let bd = ops.b.dag();
    let wm = p.omega_m;
    let mut terms = Vec::new();
    for j in 0..2 {
        let a = ops.jc_factor(j)?;
        let s = if j == 0 { -1.0 } else { 1.0 };
        let l = p.lambda_eff(j);
        if p.g[j] != 0.0 {
            terms.push((a.scale(re(p.g[j])), -wm));
        }
        if l != 0.0 {
            let diff = bd.add_scaled(re(-1.0), &ops.b)?;
            terms.push((a.multiply(&diff)?.scale(re(s * l)), -wm));
            terms.push((a.multiply(&ops.b)?.scale(re(s * l)), -2.0 * wm));
        }
    }
    Ok(TimeDependentHamiltonian {
        static_part: h_static,
        oscillating: terms,
    })
}
