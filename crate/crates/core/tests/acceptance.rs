//! Acceptance criteria 1–10, run against the shipped scenarios.
//!
//! Everything happens in one test so the criteria run in order and the
//! invariant audit of criterion 9 sees every bundle from 1–8. Each criterion
//! prints one PASS/FAIL line; the test fails if any criterion does.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_PI, FRAC_1_SQRT_2};
use std::time::Instant;

use nalgebra::DVector;
use optomech::dynamics::{
    evolve_density, steady_state, EvolveOptions, SteadyCriteria, TimeGrid, DRIFT_WARN, POSITIVITY_WARN,
};
use optomech::hilbert::{destroy, number, CompositeSpace, QOperator, QState, SubsystemSpec};
use optomech::measures::{contangle, negativity, quadrature_variance, wigner, Quadrature, QuadratureSpec, WignerSpec};
use optomech::model::{squeezed_vacuum, thermal_state, DissipatorSpec};
use optomech::par::Exec;
use optomech::scenario::{lookup, run, Overrides, ResultBundle};
use optomech::C64;

// criterion 1
const CONSTANCY_SPREAD: f64 = 1e-4;
const FIG2A_MINUTES: f64 = 2.0;
// criterion 2
const SQUEEZED_PEAK: f64 = 0.95;
const SOURCE_DROP: f64 = 0.5;
const FIG2C_MINUTES: f64 = 15.0;
// criterion 3
const CAT_PEAK: f64 = 0.90;
const FIG2F_MINUTES: f64 = 30.0;
// criterion 4
const NEGATIVITY_AT_PEAK: f64 = 0.05;
const NEGATIVITY_EARLIER: f64 = 0.1;
// criteria 5 and 6
const SQUEEZED_QF: f64 = 0.24;
const VACUUM_QF: f64 = 0.25;
const VACUUM_QF_TOL: f64 = 0.01;
const ENTANGLED: f64 = 0.01;
const SEPARABLE: f64 = 1e-3;
const SYNC_MO_PUMP: f64 = 0.005;
const SYNC_CAVITY_PUMP: f64 = 0.01;
const STEADY_MINUTES: f64 = 30.0;
// criterion 7
const RWA_MIN_FIDELITY: f64 = 0.99;
const RWA_MINUTES: f64 = 10.0;
// criterion 9
const DECAY_REL: f64 = 1e-5;
const THERMAL_FIDELITY: f64 = 1.0 - 1e-6;
const SQUEEZE_VAR_TOL: f64 = 1e-4;
const BELL_TOL: f64 = 1e-9;
const GHZ_TOL: f64 = 1e-6;
const WIGNER_TOL: f64 = 1e-6;
const ORACLE_SECONDS: f64 = 60.0;
const HERMITICITY_TOL: f64 = 1e-8;
// criterion 10
const LADDER_REL: f64 = 0.05;

struct Ledger {
    failed: Vec<u8>,
    bundles: Vec<ResultBundle>,
}

impl Ledger {
    fn verdict(&mut self, id: u8, name: &str, pass: bool, detail: String) {
        println!("criterion {id:>2} {name}: {}  {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(id);
        }
    }

    fn run(&mut self, scenario: &str) -> (ResultBundle, f64) {
        let sc = lookup(scenario).unwrap().load(&Overrides::default()).unwrap();
        let start = Instant::now();
        let b = run(&sc).unwrap_or_else(|e| panic!("{e}"));
        let minutes = start.elapsed().as_secs_f64() / 60.0;
        self.bundles.push(b.clone());
        (b, minutes)
    }
}

fn col(b: &ResultBundle, name: &str) -> Vec<f64> {
    b.column(name).unwrap_or_else(|| panic!("{}: no column {name}", b.scenario.name))
}

fn spread(xs: &[f64]) -> f64 {
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    hi - lo
}

fn index_of_t2(b: &ResultBundle) -> (usize, f64) {
    let t2 = b.diagnostics.t2.expect("t2 recorded");
    let k = col(b, "t").iter().position(|&t| t == t2).unwrap();
    (k, t2)
}

fn steady_row(b: &ResultBundle) -> BTreeMap<String, f64> {
    b.table
        .columns
        .iter()
        .cloned()
        .zip(b.table.rows[0].iter().map(|c| match c {
            optomech::scenario::Cell::Num(x) => *x,
            optomech::scenario::Cell::Text(_) => f64::NAN,
        }))
        .collect()
}

fn criterion_1(l: &mut Ledger) {
    let (b, minutes) = l.run("fig2a");
    let spreads: Vec<f64> = ["F_c1", "F_m", "F_c2"].iter().map(|n| spread(&col(&b, n))).collect();
    let worst = spreads.iter().cloned().fold(0.0, f64::max);
    l.verdict(
        1,
        "lossless constancy",
        worst < CONSTANCY_SPREAD && minutes < FIG2A_MINUTES,
        format!("max spread {worst:.3e} (< {CONSTANCY_SPREAD:.0e}), {minutes:.2} min"),
    );
}

/// Returns t₂ for the ladder check.
fn criterion_2(l: &mut Ledger) -> f64 {
    let (b, minutes) = l.run("fig2c");
    let (k, t2) = index_of_t2(&b);
    let (f2, f1) = (col(&b, "F_c2")[k], col(&b, "F_c1")[k]);
    l.verdict(
        2,
        "squeezed-state transfer",
        f2 >= SQUEEZED_PEAK && f1 < SOURCE_DROP && minutes < FIG2C_MINUTES,
        format!(
            "t2 = {t2:.3}, F_c2 = {f2:.5} (>= {SQUEEZED_PEAK}), F_c1 = {f1:.5} (< {SOURCE_DROP}), {minutes:.1} min"
        ),
    );
    t2
}

fn criterion_3(l: &mut Ledger) {
    let (b, minutes) = l.run("fig2f");
    let (k, t2) = index_of_t2(&b);
    let f2 = col(&b, "F_c2")[k];
    l.verdict(
        3,
        "cat-state transfer",
        f2 >= CAT_PEAK && minutes < FIG2F_MINUTES,
        format!("t2 = {t2:.3}, F_c2 = {f2:.5} (>= {CAT_PEAK}), {minutes:.1} min"),
    );
}

fn criterion_4(l: &mut Ledger) {
    let (b, _) = l.run("fig4_entanglement");
    let (k, t2) = index_of_t2(&b);
    let (n1, n2) = (col(&b, "N_c1_m"), col(&b, "N_c2_m"));
    let earlier = |n: &[f64]| n[..k].iter().cloned().fold(0.0, f64::max);
    let (e1, e2) = (earlier(&n1), earlier(&n2));
    l.verdict(
        4,
        "entanglement/transfer anticorrelation",
        n1[k] < NEGATIVITY_AT_PEAK && n2[k] < NEGATIVITY_AT_PEAK && e1 >= NEGATIVITY_EARLIER && e2 >= NEGATIVITY_EARLIER,
        format!(
            "at t2 = {t2:.3}: N(c1,m) = {:.4}, N(c2,m) = {:.4} (< {NEGATIVITY_AT_PEAK}); earlier max {e1:.4}, {e2:.4} (>= {NEGATIVITY_EARLIER})",
            n1[k], n2[k]
        ),
    );
}

/// One synchronization triple: (Λ₁, 0), (0, Λ₂), (Λ₁, Λ₂).
fn synchronization(l: &mut Ledger, id: u8, name: &str, scenarios: [&str; 3], sync_tol: f64) {
    let mut pass = true;
    let mut detail = Vec::new();
    for (k, s) in scenarios.iter().enumerate() {
        let (b, minutes) = l.run(s);
        let r = steady_row(&b);
        let (qc1, qm, qc2) = (r["QFX_c1"], r["QFX_m"], r["QFX_c2"]);
        let (n1m, n2m, n12) = (r["N_c1_m"], r["N_c2_m"], r["N_c1_c2"]);
        let ok = match k {
            0 => {
                qc1 < SQUEEZED_QF
                    && qm < SQUEEZED_QF
                    && (qc2 - VACUUM_QF).abs() <= VACUUM_QF_TOL
                    && n1m > ENTANGLED
                    && n2m < SEPARABLE
            }
            1 => {
                qc2 < SQUEEZED_QF
                    && qm < SQUEEZED_QF
                    && (qc1 - VACUUM_QF).abs() <= VACUUM_QF_TOL
                    && n2m > ENTANGLED
                    && n1m < SEPARABLE
            }
            _ => (qc1 - qc2).abs() < sync_tol && qc1 < SQUEEZED_QF && qc2 < SQUEEZED_QF && n12 > ENTANGLED,
        } && minutes < STEADY_MINUTES;
        pass &= ok;
        detail.push(format!(
            "{s}[{}] QF = ({qc1:.4}, {qm:.4}, {qc2:.4}) N(c1m, c2m, c1c2) = ({n1m:.4}, {n2m:.4}, {n12:.4}) {minutes:.1} min",
            if ok { "ok" } else { "x" }
        ));
    }
    l.verdict(id, name, pass, detail.join("; "));
}

fn criterion_7(l: &mut Ledger) {
    let (b, minutes) = l.run("rwa_validation");
    let mins = &b.diagnostics.rwa_min_fidelity;
    let first = mins.first().map(|m| m.1).unwrap_or(f64::NAN);
    let non_increasing = mins.windows(2).all(|w| w[1].1 <= w[0].1);
    let listing: Vec<String> = mins.iter().map(|(lam, f)| format!("{lam}: {f:.5}")).collect();
    l.verdict(
        7,
        "RWA validation",
        mins[0].0 == 0.01 && first >= RWA_MIN_FIDELITY && non_increasing && minutes < RWA_MINUTES,
        format!(
            "min fidelity by lambda/omega_m {{{}}} (first >= {RWA_MIN_FIDELITY}, non-increasing), {minutes:.1} min",
            listing.join(", ")
        ),
    );
}

fn criterion_8(l: &mut Ledger) {
    let (b, minutes) = l.run("fig3_sweep");
    let (om, ka, val) = (col(&b, "Omega"), col(&b, "kappa_a"), col(&b, "value"));
    let f: BTreeMap<(u64, u64), f64> = (0..om.len()).map(|i| ((om[i] as u64, (ka[i] * 10.0) as u64), val[i])).collect();
    let omegas = [20, 50, 80];
    let kappas = [2, 10, 20];
    let rising = kappas
        .iter()
        .all(|&k| omegas.windows(2).all(|w| f[&(w[1], k)] > f[&(w[0], k)]));
    let falling = kappas.windows(2).all(|w| f[&(80, w[1])] < f[&(80, w[0])]);
    let grid: Vec<String> = f.iter().map(|((o, k), v)| format!("({o}, {}): {v:.4}", *k as f64 / 10.0)).collect();
    l.verdict(
        8,
        "monotonic sweep trends",
        rising && falling && b.diagnostics.sweep_errors == Some(0),
        format!("rising in Omega {rising}, falling in kappa_a {falling}; F(Omega, kappa_a) {}; {minutes:.1} min", grid.join(", ")),
    );
}

fn damped_cavity_decay() -> f64 {
    let (trunc, kappa, nbar) = (25, 0.5, 0.1);
    let a = destroy(trunc).unwrap();
    let mut d = DissipatorSpec::default();
    d.push("a", a.clone(), kappa * (1.0 + nbar));
    d.push("a_dag", a.dag(), kappa * nbar);
    let n_op = number(trunc).unwrap();
    let mut v = DVector::zeros(trunc);
    v[3] = C64::new(1.0, 0.0);
    let rho0 = QState::vector(a.space(), v).unwrap().to_density();
    let grid = TimeGrid::new(0.0, 4.0, 41).unwrap();
    let mut obs = |_: usize, _: f64, s: &QState| Ok(vec![("n".to_string(), n_op.expectation(s)?.re)]);
    let r = evolve_density(&QOperator::zero(a.space()), &d, &rho0, &grid, &EvolveOptions::with_rtol(1e-10), &mut obs)
        .unwrap();
    let n = r.observable("n").unwrap();
    r.times
        .iter()
        .zip(n)
        .map(|(&t, &x)| {
            let exact = nbar + (3.0 - nbar) * (-kappa * t).exp();
            ((x - exact) / exact).abs()
        })
        .fold(0.0, f64::max)
}

fn thermal_steady_fidelity() -> f64 {
    let (trunc, kappa, nbar) = (10, 0.8, 0.3);
    let a = destroy(trunc).unwrap();
    let mut d = DissipatorSpec::default();
    d.push("a", a.clone(), kappa * (1.0 + nbar));
    d.push("a_dag", a.dag(), kappa * nbar);
    let guess = thermal_state(trunc, 2.0).unwrap();
    let criteria = SteadyCriteria {
        window: Some(10.0),
        check_every: Some(2.0),
        ..Default::default()
    };
    let ss = steady_state(&QOperator::zero(a.space()), &d, &guess, &criteria, Exec::default(), &mut |_| Ok(vec![]))
        .unwrap();
    optomech::measures::fidelity(&ss.state, &thermal_state(trunc, nbar).unwrap()).unwrap()
}

fn qubits(n: usize) -> CompositeSpace {
    CompositeSpace::new((0..n).map(|k| SubsystemSpec::boson(&format!("q{k}"), 2)).collect()).unwrap()
}

fn cat_of_ones(n: usize) -> QState {
    let d = 1 << n;
    let mut v = DVector::zeros(d);
    v[0] = C64::new(FRAC_1_SQRT_2, 0.0);
    v[d - 1] = C64::new(FRAC_1_SQRT_2, 0.0);
    QState::vector(&qubits(n), v).unwrap()
}

fn criterion_9(l: &mut Ledger) {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut pass = true;
    let mut check = |ok: bool, text: String| {
        pass &= ok;
        parts.push(format!("{}{text}", if ok { "" } else { "x " }));
    };

    let decay = damped_cavity_decay();
    check(decay <= DECAY_REL, format!("decay rel {decay:.2e}"));
    let f = thermal_steady_fidelity();
    check(f >= THERMAL_FIDELITY, format!("thermal steady F {f:.9}"));
    for r in [0.1, 0.3, 0.5] {
        let sq = squeezed_vacuum(30, C64::new(r, 0.0), 1e-3).unwrap();
        let spec = QuadratureSpec {
            mode: 0,
            phase: 0.0,
            quadrature: Quadrature::X,
        };
        let err = (quadrature_variance(&sq, &spec).unwrap() - (-2.0 * r).exp() / 4.0).abs();
        check(err <= SQUEEZE_VAR_TOL, format!("squeeze r={r} err {err:.1e}"));
    }
    let bell = negativity(&cat_of_ones(2), 0).unwrap();
    check((bell - 0.5).abs() <= BELL_TOL, format!("Bell N {bell:.12}"));
    let ghz = contangle(&cat_of_ones(3)).unwrap().min;
    check((ghz - 1.0).abs() <= GHZ_TOL, format!("GHZ contangle {ghz:.9}"));
    let spec = WignerSpec {
        x: [-1.0, 1.0],
        p: [-1.0, 1.0],
        resolution: 3,
    };
    let mut fock = DVector::zeros(4);
    fock[0] = C64::new(1.0, 0.0);
    let w0 = wigner(&QState::vector(&CompositeSpace::single_boson(4).unwrap(), fock.clone()).unwrap(), &spec, Exec::default())
        .unwrap()
        .values[(1, 1)];
    fock.swap_rows(0, 1);
    let w1 = wigner(&QState::vector(&CompositeSpace::single_boson(4).unwrap(), fock).unwrap(), &spec, Exec::default())
        .unwrap()
        .values[(1, 1)];
    check(
        (w0 - FRAC_1_PI).abs() <= WIGNER_TOL && (w1 + FRAC_1_PI).abs() <= WIGNER_TOL,
        format!("W(0) vacuum {w0:.9}, Fock-1 {w1:.9}"),
    );
    let seconds = start.elapsed().as_secs_f64();
    check(seconds < ORACLE_SECONDS, format!("oracles {seconds:.1} s"));

    // Invariants of every snapshot taken while checking criteria 1–8.
    for b in &l.bundles {
        let d = &b.diagnostics;
        let ok = d.max_drift < DRIFT_WARN
            && d.max_hermiticity_defect <= HERMITICITY_TOL
            && d.min_eigenvalue.is_none_or(|m| m >= POSITIVITY_WARN);
        check(
            ok,
            format!(
                "{} drift {:.1e} herm {:.1e} min eig {}",
                b.scenario.name,
                d.max_drift,
                d.max_hermiticity_defect,
                d.min_eigenvalue.map_or("-".into(), |m| format!("{m:.1e}"))
            ),
        );
    }
    l.verdict(9, "oracle property suite", pass, parts.join("; "));
}

fn criterion_10(l: &mut Ledger, t2: f64) {
    let (b, _) = l.run("ladder_trace");
    let (t, p) = (col(&b, "t"), col(&b, "P_c2=2"));
    let k = (0..p.len()).max_by(|&i, &j| p[i].total_cmp(&p[j])).unwrap();
    let rel = (t[k] - t2).abs() / t2;
    l.verdict(
        10,
        "ladder diagnostic",
        rel <= LADDER_REL,
        format!("P(n_c2 = 2) peaks at t = {:.3} with {:.4}; t2 = {t2:.3}; offset {:.2}% (<= 5%)", t[k], p[k], rel * 100.0),
    );
}

#[test]
fn acceptance_criteria() {
    let mut l = Ledger {
        failed: Vec::new(),
        bundles: Vec::new(),
    };
    criterion_1(&mut l);
    let t2 = criterion_2(&mut l);
    criterion_3(&mut l);
    criterion_4(&mut l);
    synchronization(&mut l, 5, "synchronization, mechanical pump", ["fig5a", "fig5b", "fig5c"], SYNC_MO_PUMP);
    synchronization(&mut l, 6, "synchronization, cavity-1 pump", ["fig6a", "fig6b", "fig6c"], SYNC_CAVITY_PUMP);
    criterion_7(&mut l);
    criterion_8(&mut l);
    criterion_9(&mut l);
    criterion_10(&mut l, t2);
    assert!(l.failed.is_empty(), "failed criteria: {:?}", l.failed);
}
