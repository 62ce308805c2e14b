use nalgebra::{DMatrix, DVector};
use optomech::hilbert::{CompositeSpace, QState, SubsystemSpec};
use optomech::measures::*;
use optomech::model::{cat_state, squeezed_vacuum, thermal_state};
use optomech::par::Exec;
use optomech::{Error, C64};
use proptest::prelude::*;
use std::f64::consts::{FRAC_1_PI, FRAC_1_SQRT_2, PI};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn qubits(n: usize) -> CompositeSpace {
    CompositeSpace::new((0..n).map(|k| SubsystemSpec::atom(&format!("q{k}"), 2)).collect()).unwrap()
}

fn vector(space: &CompositeSpace, amps: &[(usize, C64)]) -> QState {
    let mut v = DVector::zeros(space.dim());
    for &(i, a) in amps {
        v[i] = a;
    }
    QState::vector(space, v).unwrap()
}

fn bell() -> QState {
    vector(&qubits(2), &[(0, c(FRAC_1_SQRT_2)), (3, c(FRAC_1_SQRT_2))])
}

fn ghz() -> QState {
    vector(&qubits(3), &[(0, c(FRAC_1_SQRT_2)), (7, c(FRAC_1_SQRT_2))])
}

fn random_density(d: usize, seed: &[f64]) -> DMatrix<C64> {
    let a = DMatrix::from_fn(d, d, |i, j| {
        let k = (i * d + j) % seed.len();
        C64::new(seed[k] + 0.1 * i as f64, seed[(k + 1) % seed.len()] - 0.05 * j as f64)
    });
    let m = &a * a.adjoint();
    let tr = m.trace();
    m / tr
}

fn coherent(trunc: usize, alpha: C64) -> QState {
    let mut v = DVector::zeros(trunc);
    let mut term = c((-alpha.norm_sqr() / 2.0).exp());
    for n in 0..trunc {
        v[n] = term;
        term *= alpha / ((n + 1) as f64).sqrt();
    }
    let v = &v / C64::new(v.norm(), 0.0);
    QState::vector(&CompositeSpace::single_boson(trunc).unwrap(), v).unwrap()
}

#[test]
fn fidelity_basics() {
    let space = CompositeSpace::single_boson(4).unwrap();
    let zero = QState::basis(&space, &[0]).unwrap();
    let one = QState::basis(&space, &[1]).unwrap();
    assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-12);
    assert!(fidelity(&zero.to_density(), &one.to_density()).unwrap().abs() < 1e-12);
    let th = thermal_state(4, 0.3).unwrap();
    assert!((fidelity(&th, &th).unwrap() - 1.0).abs() < 1e-9);
    // vector shortcut agrees with the mixed route
    let f1 = fidelity(&zero, &th).unwrap();
    let f2 = fidelity(&zero.to_density(), &th).unwrap();
    assert!((f1 - f2).abs() < 1e-9);
    assert!((f1 - th.populations()[0].sqrt()).abs() < 1e-12);
    let other = thermal_state(5, 0.3).unwrap();
    assert!(matches!(fidelity(&th, &other), Err(Error::SpaceMismatch(_))));
}

#[test]
fn mode_fidelity_compares_across_labels() {
    let space = CompositeSpace::network(3, 2, 3).unwrap();
    let s = QState::basis(&space, &[0, 0, 2, 0, 0]).unwrap();
    let t = QState::basis(&space, &[0, 0, 0, 0, 2]).unwrap();
    assert!((mode_fidelity(&s, 2, &t, 4).unwrap() - 1.0).abs() < 1e-12);
    assert!(mode_fidelity(&s, 2, &t, 2).unwrap() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fidelity_symmetric_and_bounded(
        s1 in prop::collection::vec(-1.0f64..1.0, 3..7),
        s2 in prop::collection::vec(-1.0f64..1.0, 3..7),
    ) {
        let space = CompositeSpace::single_boson(4).unwrap();
        let a = QState::density(&space, random_density(4, &s1)).unwrap();
        let b = QState::density(&space, random_density(4, &s2)).unwrap();
        let fab = fidelity(&a, &b).unwrap();
        let fba = fidelity(&b, &a).unwrap();
        prop_assert!((fab - fba).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&fab));
        let diff = (a.density_matrix() - b.density_matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if diff > 1e-6 {
            prop_assert!(fab < 1.0);
        }
        prop_assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn negativity_local_unitary_invariance(
        th in 0.0f64..PI, ph in 0.0f64..PI, s in prop::collection::vec(-1.0f64..1.0, 3..7),
    ) {
        let space = qubits(2);
        let rho = QState::density(&space, random_density(4, &s)).unwrap();
        let u = DMatrix::from_row_slice(2, 2, &[
            c(th.cos()), -C64::from_polar(th.sin(), ph),
            C64::from_polar(th.sin(), -ph), c(th.cos()),
        ]);
        let id = DMatrix::<C64>::identity(2, 2);
        let big = u.kronecker(&id);
        let rotated = &big * rho.density_matrix() * big.adjoint();
        let n0 = negativity(&rho, 0).unwrap();
        let n1 = negativity(&QState::density(&space, rotated).unwrap(), 0).unwrap();
        prop_assert!(n0 >= 0.0);
        prop_assert!((n0 - n1).abs() < 1e-8);
        prop_assert!((n0 - negativity(&rho, 1).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn heisenberg_bound(s in prop::collection::vec(-1.0f64..1.0, 3..9), phase in -PI..PI) {
        let space = CompositeSpace::single_boson(6).unwrap();
        let rho = QState::density(&space, random_density(6, &s)).unwrap();
        let vx = quadrature_variance(&rho, &QuadratureSpec { mode: 0, phase, quadrature: Quadrature::X }).unwrap();
        let vy = quadrature_variance(&rho, &QuadratureSpec { mode: 0, phase, quadrature: Quadrature::Y }).unwrap();
        prop_assert!(vx * vy >= 1.0 / 16.0 - 1e-9, "{vx} {vy}");
    }
}

#[test]
fn bell_and_product_negativity() {
    assert!((negativity(&bell(), 0).unwrap() - 0.5).abs() < 1e-9);
    assert!((negativity(&bell(), 1).unwrap() - 0.5).abs() < 1e-9);
    let product = vector(&qubits(2), &[(1, c(1.0))]);
    assert!(negativity(&product, 0).unwrap().abs() < 1e-12);
    assert!(matches!(negativity(&ghz(), 0), Err(Error::SpaceShape(_))));
    assert!(pair_negativity(&ghz(), 0, 1).unwrap().abs() < 1e-12);
}

#[test]
fn widely_scaled_product_stays_finite() {
    // Squeezed amplitudes fall to 1e-25, which once broke the dense eigen-solver.
    let sq = squeezed_vacuum(8, c(0.5), 1e-2).unwrap();
    let psi = sq.as_vector().unwrap();
    let space = CompositeSpace::new(vec![
        SubsystemSpec::boson("c1", 8),
        SubsystemSpec::boson("m", 6),
        SubsystemSpec::boson("c2", 8),
    ])
    .unwrap();
    let mut v = DVector::zeros(space.dim());
    for (n, a) in psi.iter().enumerate() {
        v[n * 6 * 8] = *a;
    }
    let state = QState::vector(&space, v).unwrap();
    assert!(pair_negativity(&state, 0, 1).unwrap().abs() < 1e-12);
    assert!(contangle(&state).unwrap().min.abs() < 1e-12);
}

#[test]
fn ghz_residual_contangle() {
    let r = contangle(&ghz()).unwrap();
    assert!((r.min - 1.0).abs() < 1e-6);
    for root in &r.roots {
        assert!((root.whole - 1.0).abs() < 1e-9);
        assert!(root.pairs.iter().all(|e| e.abs() < 1e-9));
    }
    let prod = vector(&qubits(3), &[(0, c(1.0))]);
    assert!(contangle(&prod).unwrap().min.abs() < 1e-12);
    assert!(matches!(contangle(&bell()), Err(Error::SpaceShape(_))));
}

#[test]
fn contangle_minimum_ignores_labelling() {
    // W-type state with unequal weights, then the same state with parts 0 and 2 swapped
    let space = qubits(3);
    let (a, b, d) = (0.5, 0.6, (1.0f64 - 0.25 - 0.36).sqrt());
    let w = vector(&space, &[(4, c(a)), (2, c(b)), (1, c(d))]);
    let swapped = vector(&space, &[(1, c(a)), (2, c(b)), (4, c(d))]);
    let r1 = contangle(&w).unwrap();
    let r2 = contangle(&swapped).unwrap();
    assert!((r1.min - r2.min).abs() < 1e-10);
    assert!((r1.roots[0].residual - r2.roots[2].residual).abs() < 1e-10);
}

#[test]
fn quadrature_oracles() {
    let vac = QState::basis(&CompositeSpace::single_boson(5).unwrap(), &[0]).unwrap();
    for phase in [0.0, 0.7, -PI / 4.0] {
        for q in [Quadrature::X, Quadrature::Y] {
            let v = quadrature_variance(&vac, &QuadratureSpec { mode: 0, phase, quadrature: q }).unwrap();
            assert!((v - 0.25).abs() < 1e-12);
        }
    }
    for r in [0.1, 0.3, 0.5] {
        let sq = squeezed_vacuum(30, c(r), 1e-3).unwrap();
        let v = quadrature_variance(&sq, &QuadratureSpec { mode: 0, phase: 0.0, quadrature: Quadrature::X }).unwrap();
        assert!((v - (-2.0 * r).exp() / 4.0).abs() < 1e-4, "r = {r}: {v}");
    }
    let nbar = 0.5;
    let th = thermal_state(40, nbar).unwrap();
    let v = quadrature_variance(&th, &QuadratureSpec { mode: 0, phase: 1.1, quadrature: Quadrature::Y }).unwrap();
    assert!((v - (2.0 * nbar + 1.0) / 4.0).abs() < 1e-9);
}

#[test]
fn quadrature_rejects_atoms() {
    let space = CompositeSpace::network(2, 2, 2).unwrap();
    let s = QState::basis(&space, &[0; 5]).unwrap();
    let spec = QuadratureSpec { mode: 0, phase: 0.0, quadrature: Quadrature::X };
    assert!(matches!(quadrature_variance(&s, &spec), Err(Error::InvalidTarget(_))));
    let spec = QuadratureSpec { mode: 3, ..spec };
    assert!((quadrature_variance(&s, &spec).unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn wigner_vacuum_and_fock_one() {
    let space = CompositeSpace::single_boson(6).unwrap();
    let spec = WignerSpec { x: [-4.0, 4.0], p: [-4.0, 4.0], resolution: 129 };
    let vac = wigner(&QState::basis(&space, &[0]).unwrap(), &spec, Exec::default()).unwrap();
    let one = wigner(&QState::basis(&space, &[1]).unwrap(), &spec, Exec::default()).unwrap();
    assert_eq!((vac.xs[64], vac.ps[64]), (0.0, 0.0));
    assert!((vac.values[(64, 64)] - FRAC_1_PI).abs() < 1e-6);
    assert!((one.values[(64, 64)] + FRAC_1_PI).abs() < 1e-6);
    assert!((vac.integral() - 1.0).abs() < 2e-2);
    assert!((one.integral() - 1.0).abs() < 2e-2);
    assert!(vac.imag_residue < 1e-9);
}

#[test]
fn wigner_default_grid_normalized() {
    let spec = WignerSpec::default();
    let th = thermal_state(8, 0.4).unwrap();
    let w = wigner(&th, &spec, Exec::default()).unwrap();
    assert_eq!(w.values.nrows(), 128);
    assert!((w.integral() - 1.0).abs() < 2e-2);
}

#[test]
fn wigner_coherent_peak_location() {
    let spec = WignerSpec { x: [-4.0, 4.0], p: [-4.0, 4.0], resolution: 81 };
    let alpha = C64::new(1.0, -0.5);
    let w = wigner(&coherent(20, alpha), &spec, Exec::Sequential).unwrap();
    let (mut best, mut at) = (f64::MIN, (0, 0));
    for i in 0..81 {
        for j in 0..81 {
            if w.values[(i, j)] > best {
                best = w.values[(i, j)];
                at = (i, j);
            }
        }
    }
    let (x, p) = (w.xs[at.0], w.ps[at.1]);
    assert!((x - 2f64.sqrt() * alpha.re).abs() < 0.1, "x = {x}");
    assert!((p - 2f64.sqrt() * alpha.im).abs() < 0.1, "p = {p}");
}

#[test]
fn wigner_linear_and_parity_symmetric() {
    let spec = WignerSpec { x: [-3.0, 3.0], p: [-3.0, 3.0], resolution: 41 };
    let sq = squeezed_vacuum(12, C64::from_polar(0.5, 0.3), 1e-3).unwrap();
    let cat = cat_state(12, c(1.5), 1e-3).unwrap();
    for s in [&sq, &cat] {
        let w = wigner(s, &spec, Exec::default()).unwrap();
        for i in 0..41 {
            for j in 0..41 {
                assert!((w.values[(i, j)] - w.values[(40 - i, 40 - j)]).abs() < 1e-8);
            }
        }
    }
    let space = sq.space().clone();
    let (rs, rc) = (sq.density_matrix(), cat.density_matrix());
    let mix = QState::density(&space, &rs * c(0.3) + &rc * c(0.7)).unwrap();
    let wm = wigner(&mix, &spec, Exec::default()).unwrap().values;
    let ws = wigner(&sq, &spec, Exec::default()).unwrap().values;
    let wc = wigner(&cat, &spec, Exec::default()).unwrap().values;
    let diff = (wm - (ws * 0.3 + wc * 0.7)).abs().max();
    assert!(diff < 1e-9);
}

#[test]
fn wigner_rejects_composites() {
    let space = CompositeSpace::network(2, 2, 2).unwrap();
    let s = QState::basis(&space, &[0; 5]).unwrap();
    assert!(matches!(wigner(&s, &WignerSpec::default(), Exec::default()), Err(Error::SpaceShape(_))));
    let w = wigner_mode(&s, 3, &WignerSpec { resolution: 9, ..WignerSpec::default() }, Exec::default()).unwrap();
    assert!((w.values[(4, 4)] - FRAC_1_PI).abs() < 1e-12);
}

#[test]
fn populations() {
    let space = CompositeSpace::network(3, 2, 3).unwrap();
    let s = QState::basis(&space, &[0, 0, 2, 0, 0]).unwrap();
    assert_eq!(population(&s, &[0, 0, 2, 0, 0]).unwrap(), 1.0);
    assert!(matches!(population(&s, &[0, 0, 3, 0, 0]), Err(Error::InvalidIndex(_))));
    let rho = QState::density(&space, DMatrix::from_diagonal(&DVector::from_element(space.dim(), c(1.0 / space.dim() as f64)))).unwrap();
    let total: f64 = (0..space.dim()).map(|i| population(&rho, &space.unflatten(i)).unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-8);
    assert!((part_population(&s, 2, 2).unwrap() - 1.0).abs() < 1e-15);
    assert!((part_population(&rho, 4, 1).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert!(part_population(&s, 4, 3).is_err());
}
