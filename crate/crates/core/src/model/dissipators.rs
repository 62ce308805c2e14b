use super::hamiltonian::NetworkOps;
use super::params::SystemParams;
use crate::error::Result;
use crate::hilbert::{CompositeSpace, QOperator};

/// One Lindblad channel. The pair (O, Γ) contributes Γ (O ρ O† − ½{O†O, ρ}).
#[derive(Clone, Debug)]
pub struct Channel {
    pub name: String,
    pub op: QOperator,
    pub rate: f64,
}

#[derive(Clone, Debug, Default)]
pub struct DissipatorSpec {
    pub channels: Vec<Channel>,
}

impl DissipatorSpec {
    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn push(&mut self, name: impl Into<String>, op: QOperator, rate: f64) {
        if rate > 0.0 {
            self.channels.push(Channel {
                name: name.into(),
                op,
                rate,
            });
        }
    }

    /// Smallest positive rate, if any.
    pub fn min_rate(&self) -> Option<f64> {
        self.channels.iter().map(|c| c.rate).reduce(f64::min)
    }
}

/// Thermal-bath loss and gain channels of atoms, cavities and mirror.
/// Zero-rate channels are left out.
pub fn build_dissipators(p: &SystemParams, space: &CompositeSpace) -> Result<DissipatorSpec> {
    let ops = NetworkOps::new(space)?;
    let mut d = DissipatorSpec::default();
    for j in 0..2 {
        let site = j + 1;
        let na = p.nbar_a[j];
        let s21 = ops.sigma(j, 1, 2)?;
        let s10 = ops.sigma(j, 0, 1)?;
        d.push(format!("sigma21_minus_{site}"), s21.clone(), p.gamma21[j] * (1.0 + na));
        d.push(format!("sigma21_plus_{site}"), s21.dag(), p.gamma21[j] * na);
        d.push(format!("sigma10_minus_{site}"), s10.clone(), p.gamma10[j] * (1.0 + na));
        d.push(format!("sigma10_plus_{site}"), s10.dag(), p.gamma10[j] * na);
    }
    for j in 0..2 {
        let nc = p.nbar_c[j];
        let a = &ops.a[j];
        d.push(format!("a{}", j + 1), a.clone(), p.kappa_a[j] * (1.0 + nc));
        d.push(format!("a{}_dag", j + 1), a.dag(), p.kappa_a[j] * nc);
    }
    d.push("b", ops.b.clone(), p.kappa_b * (1.0 + p.nbar_m));
    d.push("b_dag", ops.b.dag(), p.kappa_b * p.nbar_m);
    Ok(d)
}
