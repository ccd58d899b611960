//! Acceptance criteria, one pass/fail line each.
//!
//! Runs with a plain `main` so the per-criterion lines are printed even when
//! everything passes; the process exits non-zero if any criterion fails.

use std::io::Write as _;
use std::process::ExitCode;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use spincool::golden::{frequency_biases, report_golden, Check, COARSE_STEP, FINE_STEP};
use spincool::parallel::par_grid_scan;
use spincool_core::algorithms::*;
use spincool_core::entropy::bits_to_leading;
use spincool_core::optimizer::{pair_optimum, GridSpec, Objective, SurfaceSummary};
use spincool_core::physics::spin_temperature;
use spincool_core::relaxation::{relax, relax_bias};
use spincool_core::system::{Role, SpinDef, T1};
use spincool_core::{gates, ic_exact, ic_leading, BiasVector, DiagonalState, GateSpec, SpinSystem};

type Verdict = Result<String, String>;

struct Criteria {
    failed: usize,
}

impl Criteria {
    fn run(&mut self, id: u32, name: &str, f: impl FnOnce() -> anyhow::Result<Verdict>) {
        let line = match f() {
            Ok(Ok(detail)) => format!("criterion {id:>2} PASS  {name}: {detail}\n"),
            Ok(Err(detail)) => {
                self.failed += 1;
                format!("criterion {id:>2} FAIL  {name}: {detail}\n")
            }
            Err(e) => {
                self.failed += 1;
                format!("criterion {id:>2} FAIL  {name}: error: {e:#}\n")
            }
        };
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(line.as_bytes());
        let _ = out.flush();
    }
}

/// Collects individual checks of one criterion into a single verdict.
#[derive(Default)]
struct Checks {
    parts: Vec<String>,
    failures: Vec<String>,
}

impl Checks {
    fn near(&mut self, what: &str, got: f64, want: f64, tol: f64) -> &mut Self {
        let text = format!("{what} = {got:.6} (want {want} ± {tol})");
        if (got - want).abs() <= tol {
            self.parts.push(text);
        } else {
            self.failures.push(text);
        }
        self
    }

    fn relative(&mut self, what: &str, got: f64, want: f64, frac: f64) -> &mut Self {
        self.near(what, got, want, frac * want.abs())
    }

    fn truth(&mut self, what: &str, ok: bool) -> &mut Self {
        if ok {
            self.parts.push(what.to_string());
        } else {
            self.failures.push(format!("not {what}"));
        }
        self
    }

    fn verdict(&self) -> Verdict {
        if self.failures.is_empty() {
            Ok(self.parts.join("; "))
        } else {
            Err(self.failures.join("; "))
        }
    }
}

fn scan(sys: &SpinSystem, tm: &TransferModel, step: f64, objective: Objective) -> anyhow::Result<SurfaceSummary> {
    par_grid_scan(sys, tm, &GridSpec::default_for(sys, step, objective)?, 0)
}

fn criterion_1() -> anyhow::Result<Verdict> {
    let mut c = Checks::default();
    let a = ic_leading(&BiasVector::new(vec![1.0, 1.0, 4.0]));
    let b = ic_leading(&BiasVector::new(vec![4.0, 4.0, 4.0]));
    c.truth(&format!("IC{{1,1,4}} = {a}"), a == 18.0);
    c.truth(&format!("IC{{4,4,4}} = {b}"), b == 48.0);
    Ok(c.verdict())
}

fn criterion_2() -> anyhow::Result<Verdict> {
    let fb = frequency_biases(&SpinSystem::tce())?;
    let mut c = Checks::default();
    c.near("C1 bias from frequency", fb[0], 1.0, 0.005);
    c.near("C2 bias from frequency", fb[1], 1.0, 0.005);
    c.near("H bias from frequency", fb[2], 3.98, 0.01);
    c.near("equilibrium IC", fb.iter().map(|b| b * b).sum(), 17.8, 0.1);
    c.near("ideal final IC", 3.0 * fb[2] * fb[2], 47.5, 0.1);
    Ok(c.verdict())
}

fn criterion_3() -> anyhow::Result<Verdict> {
    let sys = SpinSystem::tce();
    let tm = TransferModel::ideal();
    let t = std::time::Instant::now();
    let fine = scan(&sys, &tm, FINE_STEP, Objective::TotalIc)?;
    let fine_secs = t.elapsed().as_secs_f64();
    let t = std::time::Instant::now();
    let coarse = scan(&sys, &tm, COARSE_STEP, Objective::TotalIc)?;
    let coarse_secs = t.elapsed().as_secs_f64();
    let a = &fine.argmax;
    let mut c = Checks::default();
    c.near("max IC", a.value, 29.6, 0.05);
    c.truth(&format!("argmax t1 {:.3} in [9.1, 10.1]", a.t1), (9.1..=10.1).contains(&a.t1));
    c.truth(&format!("argmax t2 {:.3} in [8.0, 8.5]", a.t2), (8.0..=8.5).contains(&a.t2));
    c.near("20 ms argmax t1", coarse.argmax.t1, a.t1, COARSE_STEP);
    c.near("20 ms argmax t2", coarse.argmax.t2, a.t2, COARSE_STEP);
    c.truth(&format!("2 ms mesh in {fine_secs:.2} s ≤ 300 s"), fine_secs <= 300.0);
    c.truth(&format!("20 ms mesh in {coarse_secs:.3} s ≤ 5 s"), coarse_secs <= 5.0);
    Ok(c.verdict())
}

fn criterion_4() -> anyhow::Result<Verdict> {
    let sys = SpinSystem::tce();
    let r = potent(&sys, &PotentParams::practical(11.032, 12.096))?;
    let b = r.biases.values();
    let mut c = Checks::default();
    c.near("C1", b[0], 1.89, 0.02);
    c.near("C2", b[1], 1.99, 0.02);
    c.near("H", b[2], 3.85, 0.02);
    c.near("IC", r.ic_leading, 22.3, 0.15);
    // The surface is flat to ~1e-8 across a few 2 ms cells around the
    // optimum, so the argmax is located on the 20 ms mesh.
    let s = scan(&sys, &TransferModel::practical(), COARSE_STEP, Objective::TotalIc)?;
    c.near("20 ms argmax t1", s.argmax.t1, 11.032, COARSE_STEP);
    c.near("20 ms argmax t2", s.argmax.t2, 12.096, COARSE_STEP);
    Ok(c.verdict())
}

fn criterion_5() -> anyhow::Result<Verdict> {
    const FRAC: f64 = 0.25;
    let sys = SpinSystem::tce();
    let mut c = Checks::default();

    let (t1, t2) = (9.604, 8.239);
    let sim = potent(&sys, &PotentParams::ideal(t1, t2))?;
    let u = sim.uncertainties.clone().ok_or_else(|| anyhow::anyhow!("no uncertainties"))?;
    c.relative("sim ΔC1", u.biases[0], 0.08, FRAC);
    c.relative("sim ΔC2", u.biases[1], 0.08, FRAC);
    c.relative("sim ΔH", u.biases[2], 0.03, FRAC);
    c.relative("sim ΔIC", u.ic_leading, 0.7, FRAC);

    // Closed forms for the ideal run: C1 holds H's equilibrium bias after the
    // first two transfers and then relaxes for t1 + t2; H starts from zero
    // after the last transfer and relaxes for t2.
    let [c1, _, h] = [&sys.spins()[0], &sys.spins()[1], &sys.spins()[2]];
    let tau = t1 + t2;
    let s = (-tau / c1.t1.value()).exp();
    let dt1 = (h.eq_bias - c1.eq_bias) * s * tau / c1.t1.value().powi(2);
    let analytic_c1 =
        ((s * h.eq_bias_err).powi(2) + ((1.0 - s) * c1.eq_bias_err).powi(2) + (dt1 * c1.t1_err).powi(2)).sqrt();
    let s = (-t2 / h.t1.value()).exp();
    let dt1 = -h.eq_bias * s * t2 / h.t1.value().powi(2);
    let analytic_h = (((1.0 - s) * h.eq_bias_err).powi(2) + (dt1 * h.t1_err).powi(2)).sqrt();
    c.relative("finite-difference ΔC1 vs analytic", u.biases[0], analytic_c1, 1e-5);
    c.relative("finite-difference ΔH vs analytic", u.biases[2], analytic_h, 1e-5);

    let table = potent(&sys, &PotentParams::ideal(8.0, 12.0))?;
    let u = table.uncertainties.ok_or_else(|| anyhow::anyhow!("no uncertainties"))?;
    c.relative("(8, 12) ΔC2", u.biases[1], 0.09, FRAC);

    let prac = potent(&sys, &PotentParams::practical(11.032, 12.096))?;
    let u = prac.uncertainties.ok_or_else(|| anyhow::anyhow!("no uncertainties"))?;
    c.relative("practical ΔH", u.biases[2], 0.02, FRAC);
    c.relative("practical ΔIC", u.ic_leading, 0.4, FRAC);
    Ok(c.verdict())
}

fn criterion_6() -> anyhow::Result<Verdict> {
    let sys = SpinSystem::tce();
    let pair = |tm: &TransferModel, a: usize, b: usize| -> anyhow::Result<_> {
        let s = scan(&sys, tm, FINE_STEP, Objective::PairIc { a, b })?;
        Ok(pair_optimum(&sys, [a, b], s)?)
    };
    let mut c = Checks::default();
    let cc = pair(&TransferModel::ideal(), 0, 1)?;
    c.near("ideal I(C1,C2)", cc.summary.argmax.value, 25.5, 0.2);
    c.near("C1", cc.summary.argmax.biases[0], 3.30, 0.03);
    c.near("C2", cc.summary.argmax.biases[1], 3.82, 0.03);
    let prac = TransferModel::practical();
    c.near("practical I(C1,H)", pair(&prac, 0, 2)?.summary.argmax.value, 20.0, 0.5);
    c.near("practical I(C2,H)", pair(&prac, 1, 2)?.summary.argmax.value, 19.0, 0.5);
    let pcc = pair(&prac, 0, 1)?.summary.argmax.value;
    c.truth(&format!("practical I(C1,C2) = {pcc:.4} ≤ 17.8"), pcc <= 17.8);
    Ok(c.verdict())
}

fn criterion_7() -> anyhow::Result<Verdict> {
    let mut c = Checks::default();
    let l3 = pac2_ladder(3, 1.0)?;
    c.truth(&format!("PAC2(3) = {:?}", l3.biases.values()), l3.biases.values() == [1.5, 1.0, 1.0]);
    let l5 = pac2_ladder(5, 1.0)?;
    c.truth(&format!("PAC2(5) coldest = {}", l5.cooling_factor), l5.cooling_factor == 2.25);
    for n in 2..=12 {
        let f = optimal_ac_ladder(n)?.cooling_factor;
        let want = 2f64.powi(n as i32 - 2);
        if f != want {
            c.truth(&format!("optimal AC({n}) = {f} equals {want}"), false);
        }
    }
    c.truth("optimal AC coldest = 2^(n−2) for n = 2..12", true);
    let unit = SpinSystem::new(
        vec![
            SpinDef::new("A", 1.0, T1::INFINITE, Role::Computation),
            SpinDef::new("B", 1.0, T1::INFINITE, Role::Computation),
            SpinDef::new("R", 1.0, T1::INFINITE, Role::Reset),
        ],
        1e-5,
        296.0,
    )?;
    c.near("3-spin iteration after 50 rounds", fernandez_iterate(&unit, 50)?.cooling_factor, 2.0, 1e-6);
    Ok(c.verdict())
}

fn criterion_8() -> anyhow::Result<Verdict> {
    let mut c = Checks::default();
    for (r, d, want) in [(1e4, 5.0, 2.23), (100.0, 5.0, 2.14), (10.0, 5.0, 1.81), (5.0, 5.0, 1.76), (10.0, 3.0, 1.85)] {
        c.near(&format!("R={r}, d={d}"), pac2_finite_r(r, d)?.cooling_factor, want, 0.05);
    }
    Ok(c.verdict())
}

fn criterion_9() -> anyhow::Result<Verdict> {
    let sys = SpinSystem::tce_ideal();
    let start = BiasVector::new(vec![4.0; 3]);
    let eps0 = sys.reference_bias();
    let mut c = Checks::default();
    let r = compression_on_tce(&sys, &start, CompressionMode::ThreeBComp)?;
    c.near("3b-comp IC", r.ic_leading, 68.0, 0.1);
    let r = compression_on_tce(&sys, &start, CompressionMode::Optimal)?;
    c.near("optimal Ĩ", r.ic_leading, 44.0, 0.1);
    let before = bits_to_leading(r.initial_ic_exact_bits, eps0);
    let after = r.ic_exact_leading(eps0);
    c.relative("optimal exact IC vs input", after, before, 1e-9);
    Ok(c.verdict())
}

fn oracle(gate: &GateSpec, bits: &mut [u8]) {
    match *gate {
        GateSpec::Not { target } => bits[target] ^= 1,
        GateSpec::Cnot { control, target } => bits[target] ^= bits[control],
        GateSpec::Swap { a, b } => bits.swap(a, b),
        GateSpec::Cswap { control, a, b } => {
            if bits[control] == 1 {
                bits.swap(a, b);
            }
        }
        GateSpec::Pt { source, target } => {
            let (s, t) = (bits[source], bits[target]);
            bits[target] = s;
            bits[source] = s ^ t;
        }
        GateSpec::ThreeBComp { a, b, c } => {
            bits[a] = 1 - (bits[a] ^ bits[b]);
            if bits[a] == 1 {
                bits.swap(b, c);
            }
        }
        GateSpec::Permutation { .. } => unreachable!(),
    }
}

fn all_gates(n: usize) -> Vec<GateSpec> {
    let mut out = Vec::new();
    for i in 0..n {
        out.push(GateSpec::Not { target: i });
        for j in (0..n).filter(|&j| j != i) {
            out.push(GateSpec::Cnot { control: i, target: j });
            out.push(GateSpec::Swap { a: i, b: j });
            out.push(GateSpec::Pt { source: i, target: j });
            for k in (0..n).filter(|&k| k != i && k != j) {
                out.push(GateSpec::Cswap { control: i, a: j, b: k });
                out.push(GateSpec::ThreeBComp { a: i, b: j, c: k });
            }
        }
    }
    out
}

fn random_state() -> impl Strategy<Value = DiagonalState> {
    (2usize..=5).prop_flat_map(|n| {
        prop::collection::vec(1e-3..1.0f64, 1 << n).prop_map(|w| {
            let total: f64 = w.iter().sum();
            DiagonalState::new(w.iter().map(|x| x / total).collect()).expect("normalized")
        })
    })
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn system_for(n: usize, eq: &[f64], t1s: &[f64]) -> SpinSystem {
    let spins = (0..n)
        .map(|i| SpinDef::new(format!("s{i}"), eq[i], T1::seconds(t1s[i]).expect("positive T1"), Role::Computation))
        .collect();
    SpinSystem::new(spins, 1e-3, 296.0).expect("valid system")
}

fn criterion_10() -> anyhow::Result<Verdict> {
    let mut c = Checks::default();

    let conservation = runner(1000).run(&(random_state(), any::<prop::sample::Index>()), |(s, pick)| {
        let gates = all_gates(s.n_spins());
        let g = pick.get(&gates);
        let out = gates::apply(&s, g).expect("valid gate");
        prop_assert!((ic_exact(&out) - ic_exact(&s)).abs() <= 1e-12);
        Ok(())
    });
    c.truth("gate entropy conservation to 1e-12 over 1000 random states", conservation.is_ok());

    let states_with_system = random_state().prop_flat_map(|s| {
        let n = s.n_spins();
        (
            Just(s),
            prop::collection::vec(0.1..50.0f64, n),
            prop::collection::vec(0.5..60.0f64, n),
            0.0..30.0f64,
            0.0..30.0f64,
        )
    });
    let fidelity = runner(256).run(&states_with_system, |(s, eq, t1s, ta, tb)| {
        let sys = system_for(s.n_spins(), &eq, &t1s);
        let out = relax(&s, &sys, ta).expect("relax");
        for i in 0..s.n_spins() {
            let want = relax_bias(s.marginal_bias(i).unwrap(), eq[i] * 1e-3, ta, t1s[i]);
            prop_assert!((out.marginal_bias(i).unwrap() - want).abs() <= 1e-12);
        }
        let two = relax(&out, &sys, tb).expect("relax");
        let one = relax(&s, &sys, ta + tb).expect("relax");
        for (x, y) in two.probs().iter().zip(one.probs()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
        Ok(())
    });
    c.truth("relax marginal fidelity and semigroup to 1e-12", fidelity.is_ok());

    let eps0 = 1e-5;
    let s = BiasVector::new(vec![4.0, 1.0]).product_state(eps0)?;
    let pt = gates::pt(&s, 0, 1)?.marginal_biases(eps0);
    let sw = gates::swap(&s, 0, 1)?.marginal_biases(eps0);
    // The PT source keeps the parity bit, whose normalized bias is 4·1·ε₀.
    let close = |v: &[f64], w: [f64; 2]| v.iter().zip(w).all(|(a, b)| (a - b).abs() <= 5.0 * eps0);
    c.truth("PT {4,1} → {0,4}", close(pt.values(), [0.0, 4.0]));
    c.truth("SWAP {4,1} → {1,4}", close(sw.values(), [1.0, 4.0]));

    let small = (1e-5..1e-3f64, prop::collection::vec(-4.0..4.0f64, 1..=5));
    let agreement = runner(256).run(&small, |(eps0, b)| {
        let biases = BiasVector::new(b.clone());
        let exact = bits_to_leading(ic_exact(&biases.product_state(eps0).unwrap()), eps0);
        let lead = ic_leading(&biases);
        let largest = b.iter().fold(0.0f64, |m, x| m.max(x.abs())) * eps0;
        prop_assert!((exact - lead).abs() <= (largest * largest + 1e-7) * lead.max(1e-12));
        Ok(())
    });
    c.truth("ic_exact vs ic_leading agree to O(ε₀²) for ε₀ ≤ 1e-3", agreement.is_ok());

    let mut mismatches = 0;
    for n in [2, 3] {
        for g in all_gates(n) {
            for x in 0..1usize << n {
                let mut bits: Vec<u8> = (0..n).map(|i| ((x >> (n - 1 - i)) & 1) as u8).collect();
                oracle(&g, &mut bits);
                let y = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
                let out = gates::apply(&DiagonalState::basis(n, x)?, &g)?;
                if out.probs()[y] != 1.0 {
                    mismatches += 1;
                }
            }
        }
    }
    c.truth(&format!("brute-force oracle on all 2- and 3-spin gates ({mismatches} mismatches)"), mismatches == 0);
    Ok(c.verdict())
}

fn criterion_11() -> anyhow::Result<Verdict> {
    let mut c = Checks::default();
    let report = report_golden(0)?;
    let displayed = |reference: f64| {
        report
            .rows
            .iter()
            .any(|r| r.check == Check::Display && (r.reference - reference).abs() < 1e-9)
    };
    for (what, v) in [
        ("Ĩ 20.7", 20.7),
        ("C1 1.74", 1.74),
        ("C2 1.86", 1.86),
        ("H 3.77", 3.77),
        ("single reset 18.17", 18.17),
        ("single reset 18.03", 18.03),
    ] {
        c.truth(&format!("measured {what} display-only"), displayed(v));
    }
    for (label, bias, eq, want) in [
        ("C1", 1.74, 1.0, 170.0),
        ("C2", 1.86, 1.0, 159.0),
        ("H", 3.77, 3.98, 312.0),
        ("truncated C1", 2.03, 1.0, 145.0),
        ("truncated C2", 2.91, 1.0, 101.0),
    ] {
        c.near(&format!("{label} temperature"), spin_temperature(bias, eq, 296.0, 1.020e-5)?, want, 1.0);
    }
    c.truth("golden report asserted rows all pass", report.all_pass());
    Ok(c.verdict())
}

fn main() -> ExitCode {
    let mut criteria = Criteria { failed: 0 };
    criteria.run(1, "entropy arithmetic", criterion_1);
    criteria.run(2, "experimental-equilibrium IC", criterion_2);
    criteria.run(3, "ideal simulation optimum", criterion_3);
    criteria.run(4, "practical simulation", criterion_4);
    criteria.run(5, "error propagation", criterion_5);
    criteria.run(6, "2-spin optima", criterion_6);
    criteria.run(7, "ladders", criterion_7);
    criteria.run(8, "finite-R PAC2", criterion_8);
    criteria.run(9, "compression ICs", criterion_9);
    criteria.run(10, "property suites", criterion_10);
    criteria.run(11, "experimental reference values", criterion_11);
    let summary = format!("acceptance: {} of 11 criteria failed\n", criteria.failed);
    let _ = std::io::stdout().write_all(summary.as_bytes());
    if criteria.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
