//! Seeded property suite covering every module's invariants: delta-calculus
//! fundamentals, power-function oracles, Gronwall dominance on randomized
//! instances, solver certificates, and dependence certification.
//!
//! Each check is deterministic for a fixed seed; the report serializes to a
//! plain-text pass/fail table.

use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fracops::{caputo_derivative, rl_integral};
use crate::function::{delta_derivative_fn, delta_integral, GridFunction};
use crate::grid::{GridKind, TimeScaleGrid};
use crate::gronwall::{
    apply_q, gronwall_bound, hypothesis_fixed_point, iterated_q_bound, verify_dominance,
    GronwallInput,
};
use crate::power::{max_semigroup_residual, power_function, semigroup_residual, Kernel};
use crate::solver::{
    apply_g, dependence_certify, picard_solve, picard_solve_from, CauchyProblem, DependenceInput,
    Representation, Rhs,
};
use crate::weight::{weighted_metric, WeightedNormContext};

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    pub gronwall_instances: usize,
    pub solver_instances: usize,
    pub max_grid_points: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            gronwall_instances: 100,
            solver_instances: 25,
            max_grid_points: 64,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn write_table<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "verify seed = {}", self.seed)?;
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            writeln!(w, "{status}  {}  {}", c.name, c.detail)?;
        }
        let verdict = if self.all_pass() { "pass" } else { "fail" };
        writeln!(w, "overall = {verdict}")?;
        Ok(())
    }
}

fn check<F: FnOnce() -> std::result::Result<String, String>>(
    name: &'static str,
    f: F,
) -> CheckResult {
    match f() {
        Ok(detail) => CheckResult {
            name,
            pass: true,
            detail,
        },
        Err(detail) => CheckResult {
            name,
            pass: false,
            detail,
        },
    }
}

fn zgrid(n: usize) -> Arc<TimeScaleGrid<f64>> {
    TimeScaleGrid::lattice(0.0, n as f64, 1.0).unwrap()
}

fn random_arbitrary_grid(rng: &mut ChaCha8Rng, points: usize) -> Arc<TimeScaleGrid<f64>> {
    let mut t = 0.0;
    let mut pts = Vec::with_capacity(points);
    pts.push(t);
    for _ in 1..points {
        t += rng.gen_range(0.05..1.5);
        pts.push(t);
    }
    TimeScaleGrid::from_points(pts, GridKind::Arbitrary).unwrap()
}

fn err_to_string<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| format!("error: {e}"))
}

pub fn run_suite(opts: &VerifyOptions) -> VerifyReport {
    let mut checks = Vec::new();
    let seed = opts.seed;

    checks.push(check("timescale-fundamental-theorem", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x01);
        let mut worst: f64 = 0.0;
        for _ in 0..32 {
            let npts = rng.gen_range(4..16);
            let g = random_arbitrary_grid(&mut rng, npts);
            let f = GridFunction::sample(g.clone(), |t| t * t - 2.0 * t + 0.5).unwrap();
            let df = err_to_string(delta_derivative_fn(&f))?;
            let b = g.last_index();
            let lhs = err_to_string(delta_integral(&df, 0, b))?;
            let rhs = f.values()[b] - f.values()[0];
            worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
        }
        if worst <= 1e-10 {
            Ok(format!("max relative defect {worst:.3e}"))
        } else {
            Err(format!("fundamental theorem defect {worst:.3e}"))
        }
    }));

    checks.push(check("timescale-integral-additivity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x02);
        let mut worst: f64 = 0.0;
        for _ in 0..32 {
            let npts = rng.gen_range(5..20);
            let g = random_arbitrary_grid(&mut rng, npts);
            let f = GridFunction::sample(g.clone(), |t| (t + 0.3).sin() * 2.0).unwrap();
            let n = g.last_index();
            let b = rng.gen_range(0..=n);
            let whole = err_to_string(delta_integral(&f, 0, n))?;
            let split =
                err_to_string(delta_integral(&f, 0, b))? + err_to_string(delta_integral(&f, b, n))?;
            worst = worst.max((whole - split).abs() / (1.0 + whole.abs()));
        }
        if worst <= 1e-12 {
            Ok(format!("max relative split defect {worst:.3e}"))
        } else {
            Err(format!("additivity defect {worst:.3e}"))
        }
    }));

    checks.push(check("timescale-metric-axioms", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x03);
        for _ in 0..64 {
            let g = zgrid(rng.gen_range(3..10));
            let ctx = err_to_string(WeightedNormContext::new(
                g.clone(),
                rng.gen_range(0.5..3.0),
                0,
            ))?;
            let mk = |rng: &mut ChaCha8Rng| {
                let vals = (0..g.len()).map(|_| rng.gen_range(-4.0..4.0)).collect();
                GridFunction::new(g.clone(), vals).unwrap()
            };
            let (a, b, c) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
            let dab = err_to_string(weighted_metric(&a, &b, &ctx))?;
            let dba = err_to_string(weighted_metric(&b, &a, &ctx))?;
            let dac = err_to_string(weighted_metric(&a, &c, &ctx))?;
            let dcb = err_to_string(weighted_metric(&c, &b, &ctx))?;
            let daa = err_to_string(weighted_metric(&a, &a, &ctx))?;
            if dab < 0.0 || daa != 0.0 {
                return Err(format!(
                    "nonnegativity/identity failed: d(a,b)={dab}, d(a,a)={daa}"
                ));
            }
            if (dab - dba).abs() > 1e-15 {
                return Err(format!("symmetry failed: {dab} vs {dba}"));
            }
            if dab > dac + dcb + 1e-12 {
                return Err(format!("triangle failed: {dab} > {dac} + {dcb}"));
            }
        }
        Ok("64 random triples".into())
    }));

    checks.push(check("timescale-exp-eta-identity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x04);
        let mut worst: f64 = 0.0;
        for _ in 0..32 {
            let npts = rng.gen_range(4..16);
            let g = random_arbitrary_grid(&mut rng, npts);
            let eta = rng.gen_range(0.2..3.0);
            let ctx = err_to_string(WeightedNormContext::new(g.clone(), eta, 0))?;
            let evals: Vec<f64> = (0..g.len()).map(|i| ctx.exp_eta(i).unwrap()).collect();
            let integrand =
                GridFunction::new(g.clone(), evals.iter().map(|v| eta * v).collect()).unwrap();
            for (b, ev) in evals.iter().enumerate().skip(1) {
                let lhs = err_to_string(delta_integral(&integrand, 0, b))?;
                let rhs = ev - 1.0;
                worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
            }
        }
        if worst <= 1e-12 {
            Ok(format!("max relative defect {worst:.3e}"))
        } else {
            Err(format!("exp identity defect {worst:.3e}"))
        }
    }));

    checks.push(check("timescale-integral-refinement", || {
        // left-rule error against the exact antiderivative of t^2 on [0,1]
        let exact: f64 = 1.0 / 3.0;
        let mut errs = Vec::new();
        for n in [250usize, 500, 1000] {
            let g = TimeScaleGrid::uniform(0.0, 1.0, n).unwrap();
            let f = GridFunction::sample(g.clone(), |t| t * t).unwrap();
            let v = err_to_string(delta_integral(&f, 0, n))?;
            errs.push((exact - v).abs());
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            if !(2.0 / 1.2..=2.0 * 1.2).contains(&ratio) {
                return Err(format!("halving ratio {ratio:.3} outside [1.67, 2.4]"));
            }
        }
        Ok(format!(
            "halving ratios {:.3}, {:.3}",
            errs[0] / errs[1],
            errs[1] / errs[2]
        ))
    }));

    checks.push(check("power-integer-recursion-consistency", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x05);
        let mut worst: f64 = 0.0;
        for _ in 0..8 {
            let g = random_arbitrary_grid(&mut rng, 12);
            // independent oracle: literal nested delta sums
            for k in 0..=4usize {
                for j in 0..g.len() {
                    for i in j..g.len() {
                        let oracle = brute_force_h(&g, k, i, j);
                        let got = err_to_string(power_function(&g, k as f64, i, j))?;
                        let denom = 1.0 + oracle.abs();
                        worst = worst.max((got - oracle).abs() / denom);
                    }
                }
            }
        }
        if worst <= 1e-10 {
            Ok(format!("max relative defect {worst:.3e}"))
        } else {
            Err(format!("recursion consistency defect {worst:.3e}"))
        }
    }));

    checks.push(check("power-kernel-nonnegativity", || {
        let latt = zgrid(24);
        let cont = TimeScaleGrid::uniform(0.0, 1.0, 128).unwrap();
        let mut count = 0usize;
        for &alpha in &[0.3, 0.5, 0.8, 1.0, 2.0] {
            for k in 1..=40usize {
                let order = k as f64 * alpha - 1.0;
                err_to_string(Kernel::new(&latt, order))?;
                err_to_string(Kernel::new(&cont, order))?;
                count += 2;
            }
        }
        Ok(format!("{count} kernels validated nonnegative"))
    }));

    checks.push(check("power-semigroup-integer-lattice", || {
        let g = zgrid(10);
        let mut worst: f64 = 0.0;
        for &alpha in &[1.0, 2.0] {
            for k in 1..=3usize {
                worst = worst.max(err_to_string(max_semigroup_residual(
                    &g,
                    alpha,
                    k,
                    usize::MAX,
                ))?);
            }
        }
        if worst <= 1e-10 {
            Ok(format!("max residual {worst:.3e}"))
        } else {
            Err(format!("integer semigroup residual {worst:.3e}"))
        }
    }));

    checks.push(check("power-semigroup-continuum-refinement", || {
        // fixed physical pair (t, s) = (1, 0); the residual must decrease
        // strictly under refinement (the decay order for singular kernels is
        // O(sqrt(step)))
        let mut resids = Vec::new();
        for n in [250usize, 500, 1000] {
            let g = TimeScaleGrid::uniform(0.0, 1.0, n).unwrap();
            resids.push(err_to_string(semigroup_residual(&g, 0.5, 1, n, 0))?);
        }
        for w in resids.windows(2) {
            if w[1] * 1.2 > w[0] {
                return Err(format!("no decay: {:.4e} -> {:.4e}", w[0], w[1]));
            }
        }
        Ok(format!(
            "residuals {:.4e} -> {:.4e} -> {:.4e}",
            resids[0], resids[1], resids[2]
        ))
    }));

    checks.push(check("power-subsemigroup-lattice", || {
        // the inequality the Gronwall induction needs: the convolution of
        // kernel profiles never exceeds the combined-order kernel
        let g = zgrid(16);
        let mut worst: f64 = 0.0;
        for &alpha in &[0.3, 0.5, 0.8] {
            for k in 1..=8usize {
                for i in 1..g.len() {
                    for j in 0..i {
                        let outer = Kernel::new(&g, alpha - 1.0).map_err(|e| e.to_string())?;
                        let inner =
                            Kernel::new(&g, k as f64 * alpha - 1.0).map_err(|e| e.to_string())?;
                        let target = Kernel::new(&g, (k as f64 + 1.0) * alpha - 1.0)
                            .map_err(|e| e.to_string())?;
                        let mut lhs = 0.0;
                        for p in (j + 1)..i {
                            lhs += outer.shifted(i, p) * inner.shifted(p, j);
                        }
                        let rhs = target.shifted(i, j);
                        worst = worst.max(lhs - rhs);
                    }
                }
            }
        }
        if worst <= 1e-12 {
            Ok(format!("max excess {worst:.3e}"))
        } else {
            Err(format!("sub-semigroup violated by {worst:.3e}"))
        }
    }));

    checks.push(check("gronwall-q-monotone", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x06);
        for _ in 0..32 {
            let g = zgrid(rng.gen_range(4..12));
            let input = random_gronwall_input(&mut rng, &g)?;
            let psi1 = GridFunction::new(
                g.clone(),
                (0..g.len()).map(|_| rng.gen_range(0.0..2.0)).collect(),
            )
            .unwrap();
            let bump = rng.gen_range(0.0..1.0);
            let psi2 = psi1.map(|x| x + bump).unwrap();
            let q1 = err_to_string(apply_q(&input, &psi1))?;
            let q2 = err_to_string(apply_q(&input, &psi2))?;
            for i in 0..g.len() {
                if q1.values()[i] > q2.values()[i] + 1e-12 {
                    return Err(format!("monotonicity failed at index {i}"));
                }
            }
        }
        Ok("32 random pairs".into())
    }));

    checks.push(check("gronwall-induction-step", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x07);
        for _ in 0..24 {
            let g = zgrid(rng.gen_range(4..10));
            let input = random_gronwall_input(&mut rng, &g)?;
            let psi = GridFunction::new(
                g.clone(),
                (0..g.len()).map(|_| rng.gen_range(0.0..2.0)).collect(),
            )
            .unwrap();
            for k in 1..=3usize {
                let bk = err_to_string(iterated_q_bound(&input, &psi, k))?;
                let q_of_bk = err_to_string(apply_q(&input, &bk))?;
                let bk1 = err_to_string(iterated_q_bound(&input, &psi, k + 1))?;
                for i in 0..g.len() {
                    if q_of_bk.values()[i] > bk1.values()[i] + 1e-10 {
                        return Err(format!(
                            "induction step failed at k={k}, index {i}: {} > {}",
                            q_of_bk.values()[i],
                            bk1.values()[i]
                        ));
                    }
                }
            }
        }
        Ok("24 random inputs, k = 1..3".into())
    }));

    checks.push(check("gronwall-dominance-seeded", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x08);
        let mut worst_slack = f64::INFINITY;
        for inst in 0..opts.gronwall_instances {
            let (input, y) = random_dominance_instance(&mut rng)?;
            let report =
                gronwall_bound(&input, 1e-12, 400).map_err(|e| format!("instance {inst}: {e}"))?;
            let checked = verify_dominance(&input, &y, &report, 1e-8)
                .map_err(|e| format!("instance {inst}: {e}"))?;
            if checked.verdict != Some(true) {
                return Err(format!(
                    "instance {inst} failed dominance at indices {:?}",
                    checked.violations
                ));
            }
            if let Some(slack) = &checked.slack {
                for i in slack.defined() {
                    worst_slack = worst_slack.min(slack.values()[i]);
                }
            }
        }
        Ok(format!(
            "{} instances, min slack {worst_slack:.3e}",
            opts.gronwall_instances
        ))
    }));

    checks.push(check("gronwall-series-decay", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x09);
        for _ in 0..16 {
            let (input, _) = random_dominance_instance(&mut rng)?;
            let report = err_to_string(gronwall_bound(&input, 1e-12, 400))?;
            let k = report.terms_used;
            let tk = err_to_string(iterated_q_bound(&input, input.u(), k))?;
            let tk1 = err_to_string(iterated_q_bound(&input, input.u(), k + 1))?;
            let mk = tk.values().iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            let mk1 = tk1.values().iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            if mk1 > mk + 1e-14 {
                return Err(format!(
                    "term max grew after truncation: {mk:.3e} -> {mk1:.3e}"
                ));
            }
        }
        Ok("16 instances".into())
    }));

    checks.push(check("gronwall-bound-monotone-in-u-v", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0A);
        for _ in 0..16 {
            let (input, _) = random_dominance_instance(&mut rng)?;
            let report = err_to_string(gronwall_bound(&input, 1e-12, 400))?;
            let bump_u = input.u().map(|x| x + 0.25).unwrap();
            let input_u = GronwallInput::new(
                bump_u,
                input.v().clone(),
                input.alpha(),
                input.bound_on_v(),
                input.t0_index(),
            )
            .map_err(|e| e.to_string())?;
            let report_u = err_to_string(gronwall_bound(&input_u, 1e-12, 400))?;
            let bump_v = input.v().map(|x| x + 0.2).unwrap();
            let input_v = GronwallInput::new(
                input.u().clone(),
                bump_v,
                input.alpha(),
                input.bound_on_v() + 0.2,
                input.t0_index(),
            )
            .map_err(|e| e.to_string())?;
            let report_v = err_to_string(gronwall_bound(&input_v, 1e-12, 400))?;
            for i in 0..report.bound.grid().len() {
                if report_u.bound.values()[i] < report.bound.values()[i] - 1e-10
                    || report_v.bound.values()[i] < report.bound.values()[i] - 1e-10
                {
                    return Err(format!("bound decreased under enlargement at index {i}"));
                }
            }
        }
        Ok("16 instances".into())
    }));

    checks.push(check("gronwall-classical-lattice", || {
        let g = zgrid(5);
        let input = GronwallInput::new(
            GridFunction::constant(g.clone(), 1.0).unwrap(),
            GridFunction::constant(g.clone(), 1.0).unwrap(),
            1.0,
            1.0,
            0,
        )
        .map_err(|e| e.to_string())?;
        let report = err_to_string(gronwall_bound(&input, 1e-12, 50))?;
        let y = err_to_string(hypothesis_fixed_point(&input, 1e-12, 100))?;
        let mut worst: f64 = 0.0;
        for i in 0..=5 {
            worst = worst.max((report.bound.values()[i] - 2f64.powi(i as i32)).abs());
            worst = worst.max((y.values()[i] - 2f64.powi(i as i32)).abs());
        }
        if worst <= 1e-8 {
            Ok(format!("max defect vs 2^t: {worst:.3e}"))
        } else {
            Err(format!("2^t defect {worst:.3e}"))
        }
    }));

    checks.push(check("gronwall-classical-continuum", || {
        let (a, c): (f64, f64) = (1.5, 1.0);
        let g = TimeScaleGrid::uniform(0.0, 1.0, 1000).unwrap();
        let input = GronwallInput::new(
            GridFunction::constant(g.clone(), a).unwrap(),
            GridFunction::constant(g.clone(), c).unwrap(),
            1.0,
            c,
            0,
        )
        .map_err(|e| e.to_string())?;
        let report = err_to_string(gronwall_bound(&input, 1e-9, 60))?;
        let expect = a * c.exp();
        let got = report.bound.values()[1000];
        let rel = (got - expect).abs() / expect;
        if rel <= 0.01 {
            Ok(format!(
                "bound(1) = {got:.6}, a e^c = {expect:.6}, rel {rel:.2e}"
            ))
        } else {
            Err(format!("classical reduction off by {rel:.2e}"))
        }
    }));

    checks.push(check("solver-discrete-product-oracle", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0B);
        let mut worst: f64 = 0.0;
        for _ in 0..16 {
            let h = [0.5, 1.0][rng.gen_range(0..2)];
            let n = rng.gen_range(4..16);
            let g = TimeScaleGrid::lattice(0.0, n as f64 * h, h).unwrap();
            let lambda: f64 = rng.gen_range(-0.8..0.8);
            let w = rng.gen_range(0.2..2.0);
            let p = CauchyProblem {
                alpha: 1.0,
                rhs: Rhs::Linear { lambda },
                lipschitz: lambda.abs(),
                w,
                grid: g.clone(),
                t0_index: 0,
                eta: lambda.abs() * 2.0 + 1.0,
                representation: Representation::RlType,
            };
            // lattices terminate exactly; run the iteration down to the floor
            let r =
                picard_solve(&p, f64::MIN_POSITIVE, 4 * g.len() + 40).map_err(|e| e.to_string())?;
            let mut expect = w;
            for i in 0..g.len() {
                worst = worst.max((r.solution.values()[i] - expect).abs());
                if i < g.last_index() {
                    expect *= 1.0 + lambda * h;
                }
            }
        }
        if worst <= 1e-10 {
            Ok(format!("max defect {worst:.3e}"))
        } else {
            Err(format!("product solution defect {worst:.3e}"))
        }
    }));

    checks.push(check("solver-continuum-exp-oracle", || {
        let g: Arc<TimeScaleGrid<f64>> = TimeScaleGrid::uniform(0.0, 1.0, 1000).unwrap();
        let p = CauchyProblem {
            alpha: 1.0,
            rhs: Rhs::Linear { lambda: 1.0 },
            lipschitz: 1.0,
            w: 1.0,
            grid: g.clone(),
            t0_index: 0,
            eta: 2.0,
            representation: Representation::RlType,
        };
        let r = picard_solve(&p, 1e-10, 200).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for i in 0..g.len() {
            worst = worst.max((r.solution.values()[i] - g.points()[i].exp()).abs());
        }
        if worst <= 5e-3 {
            Ok(format!("sup error vs e^t: {worst:.3e}"))
        } else {
            Err(format!("sup error {worst:.3e} exceeds 5e-3"))
        }
    }));

    checks.push(check("solver-contraction-certificates", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0C);
        let mut worst_excess = f64::NEG_INFINITY;
        for i in 0..opts.solver_instances {
            let (p, q, tol) = random_solver_problem(&mut rng, opts.max_grid_points);
            let r = picard_solve(&p, tol, 4 * p.grid.len() + 400)
                .map_err(|e| format!("instance {i}: {e}"))?;
            let excess = r.contraction_observed - q;
            worst_excess = worst_excess.max(excess);
            if r.contraction_observed > q + 0.1 {
                return Err(format!(
                    "instance {i}: observed {} > bound {q} + 0.1",
                    r.contraction_observed
                ));
            }
        }
        Ok(format!(
            "{} problems, worst observed-minus-bound {worst_excess:.3e}",
            opts.solver_instances
        ))
    }));

    checks.push(check("solver-aposteriori-bound", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0C); // same problems
        for i in 0..opts.solver_instances {
            let (p, q, tol) = random_solver_problem(&mut rng, opts.max_grid_points);
            let r = picard_solve(&p, tol, 4 * p.grid.len() + 400)
                .map_err(|e| format!("instance {i}: {e}"))?;
            let r_ref = picard_solve(&p, tol / 100.0, 40 * p.grid.len() + 4000)
                .map_err(|e| format!("reference {i}: {e}"))?;
            let ctx = WeightedNormContext::new(p.grid.clone(), p.eta, p.t0_index)
                .map_err(|e| e.to_string())?;
            let dist =
                weighted_metric(&r.solution, &r_ref.solution, &ctx).map_err(|e| e.to_string())?;
            let budget = tol * q / (1.0 - q) * 1.01 + 1e-15;
            if dist > budget {
                return Err(format!(
                    "instance {i}: distance {dist:.3e} > budget {budget:.3e}"
                ));
            }
        }
        Ok(format!("{} problems", opts.solver_instances))
    }));

    checks.push(check("solver-uniqueness-probe", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0C);
        for i in 0..opts.solver_instances {
            let (p, _q, tol) = random_solver_problem(&mut rng, opts.max_grid_points);
            let r1 = picard_solve(&p, tol, 4 * p.grid.len() + 400)
                .map_err(|e| format!("instance {i}: {e}"))?;
            let zero = GridFunction::zeros(p.grid.clone()).unwrap();
            let r2 = picard_solve_from(&p, tol, 4 * p.grid.len() + 400, Some(zero))
                .map_err(|e| format!("instance {i} (zero start): {e}"))?;
            let ctx = WeightedNormContext::new(p.grid.clone(), p.eta, p.t0_index)
                .map_err(|e| e.to_string())?;
            let d = weighted_metric(&r1.solution, &r2.solution, &ctx).map_err(|e| e.to_string())?;
            if d > 10.0 * tol {
                return Err(format!("instance {i}: starts differ by {d:.3e} > 10 tol"));
            }
        }
        Ok(format!(
            "{} problems, two starting iterates",
            opts.solver_instances
        ))
    }));

    checks.push(check("solver-fixed-point-residual", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0C);
        for i in 0..opts.solver_instances {
            let (p, _q, tol) = random_solver_problem(&mut rng, opts.max_grid_points);
            let r = picard_solve(&p, tol, 4 * p.grid.len() + 400)
                .map_err(|e| format!("instance {i}: {e}"))?;
            let g_of_sol = apply_g(&p, &r.solution).map_err(|e| e.to_string())?;
            let ctx = WeightedNormContext::new(p.grid.clone(), p.eta, p.t0_index)
                .map_err(|e| e.to_string())?;
            let resid = weighted_metric(&g_of_sol, &r.solution, &ctx).map_err(|e| e.to_string())?;
            if resid > 2.0 * tol {
                return Err(format!("instance {i}: residual {resid:.3e} > 2 tol"));
            }
        }
        Ok(format!("{} problems", opts.solver_instances))
    }));

    checks.push(check("solver-monotone-improvement", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0D);
        for i in 0..12 {
            let (p, _q, tol) = random_solver_problem(&mut rng, opts.max_grid_points);
            let ctx = WeightedNormContext::new(p.grid.clone(), p.eta, p.t0_index)
                .map_err(|e| e.to_string())?;
            let mut u = GridFunction::zeros(p.grid.clone()).unwrap();
            let mut metrics = Vec::new();
            for _ in 0..60 {
                let next = apply_g(&p, &u).map_err(|e| e.to_string())?;
                let m = weighted_metric(&next, &u, &ctx).map_err(|e| e.to_string())?;
                metrics.push(m);
                u = next;
                if m <= tol {
                    break;
                }
            }
            for w in metrics.windows(2).skip(1) {
                if w[1] > w[0] * (1.0 + 1e-9) {
                    return Err(format!(
                        "instance {i}: metric grew {:.3e} -> {:.3e}",
                        w[0], w[1]
                    ));
                }
            }
        }
        Ok("12 problems, geometric decay after first step".into())
    }));

    checks.push(check("dependence-certify-seeded", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0E);
        let mut worst_slack = f64::INFINITY;
        for i in 0..opts.solver_instances {
            let input = random_dependence_pair(&mut rng, opts.max_grid_points);
            let report = dependence_certify(&input, f64::MIN_POSITIVE, 1e-10)
                .map_err(|e| format!("pair {i}: {e}"))?;
            if report.verdict != Some(true) {
                return Err(format!(
                    "pair {i}: bound violated at {:?}",
                    report.violations
                ));
            }
            if let Some(slack) = &report.slack {
                for idx in slack.defined() {
                    worst_slack = worst_slack.min(slack.values()[idx]);
                }
            }
        }
        Ok(format!(
            "{} pairs, min slack {worst_slack:.3e}",
            opts.solver_instances
        ))
    }));

    checks.push(check("dependence-closed-form-pair", || {
        // alpha = 1, f = 0.5 u, dw = 0.1: actual difference 0.1 (1.5)^t and
        // the bound coincide exactly; assert tight equality
        let g = zgrid(6);
        let pa = CauchyProblem {
            alpha: 1.0,
            rhs: Rhs::Linear { lambda: 0.5 },
            lipschitz: 0.5,
            w: 1.0,
            grid: g.clone(),
            t0_index: 0,
            eta: 2.0,
            representation: Representation::RlType,
        };
        let mut pb = pa.clone();
        pb.w = 1.1;
        let input = DependenceInput {
            problem_a: pa,
            problem_b: pb,
            lipschitz: 0.5,
        };
        let report = dependence_certify(&input, 1e-12, 1e-12).map_err(|e| e.to_string())?;
        if report.verdict != Some(true) {
            return Err(format!("verdict fail at {:?}", report.violations));
        }
        let mut worst: f64 = 0.0;
        let actual = report.actual.as_ref().unwrap();
        for i in 0..=6 {
            let expect = 0.1 * 1.5f64.powi(i as i32);
            worst = worst.max((actual.values()[i] - expect).abs());
            worst = worst.max((report.bound.values()[i] - expect).abs());
        }
        if worst <= 1e-10 {
            Ok(format!("bound = actual = 0.1 (1.5)^t to {worst:.3e}"))
        } else {
            Err(format!("closed-form defect {worst:.3e}"))
        }
    }));

    checks.push(check("caputo-annihilates-constants", || {
        let g = zgrid(10);
        let mut worst: f64 = 0.0;
        for &alpha in &[0.3, 0.5, 0.8] {
            let f = GridFunction::constant(g.clone(), 3.7).unwrap();
            let d = caputo_derivative(alpha, &f, 0).map_err(|e| e.to_string())?;
            for i in d.defined() {
                worst = worst.max(d.values()[i].abs());
            }
        }
        if worst <= 1e-12 {
            Ok(format!("max |Caputo c| = {worst:.3e}"))
        } else {
            Err(format!("constant not annihilated: {worst:.3e}"))
        }
    }));

    checks.push(check("caputo-alpha1-forward-difference", || {
        let g = zgrid(8);
        let f = GridFunction::sample(g.clone(), |t| 0.3 * t * t - t + 2.0).unwrap();
        let d = caputo_derivative(1.0, &f, 0).map_err(|e| e.to_string())?;
        let shift = f.map(|x| x - 2.0).unwrap();
        let dd = delta_derivative_fn(&shift).map_err(|e| e.to_string())?;
        for i in d.defined() {
            if (d.values()[i] - dd.values()[i]).abs() > 0.0 {
                return Err(format!("mismatch at {i}"));
            }
        }
        Ok("exact match with forward difference of f - f(t0)".into())
    }));

    checks.push(check("rl-linearity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0F);
        let mut worst: f64 = 0.0;
        for _ in 0..16 {
            let g = zgrid(rng.gen_range(4..12));
            let alpha = [0.5, 1.0, 1.5][rng.gen_range(0..3)];
            let f = GridFunction::new(
                g.clone(),
                (0..g.len()).map(|_| rng.gen_range(-2.0..2.0)).collect(),
            )
            .unwrap();
            let h = GridFunction::new(
                g.clone(),
                (0..g.len()).map(|_| rng.gen_range(-2.0..2.0)).collect(),
            )
            .unwrap();
            let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let combo = f.zip_with(&h, |x, y| a * x + b * y).unwrap();
            let lhs = rl_integral(alpha, &combo, 0).map_err(|e| e.to_string())?;
            let fi = rl_integral(alpha, &f, 0).map_err(|e| e.to_string())?;
            let hi = rl_integral(alpha, &h, 0).map_err(|e| e.to_string())?;
            for i in 0..g.len() {
                let rhs = a * fi.values()[i] + b * hi.values()[i];
                worst = worst.max((lhs.values()[i] - rhs).abs() / (1.0 + rhs.abs()));
            }
        }
        if worst <= 1e-12 {
            Ok(format!("max relative defect {worst:.3e}"))
        } else {
            Err(format!("linearity defect {worst:.3e}"))
        }
    }));

    checks.push(check("rl-integer-composition", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x10);
        let mut worst: f64 = 0.0;
        for _ in 0..16 {
            let h = [0.5, 1.0][rng.gen_range(0..2)];
            let n = rng.gen_range(4..14);
            let g = TimeScaleGrid::lattice(0.0, n as f64 * h, h).unwrap();
            let f = GridFunction::new(
                g.clone(),
                (0..g.len()).map(|_| rng.gen_range(-2.0..2.0)).collect(),
            )
            .unwrap();
            let twice = rl_integral(1.0, &rl_integral(1.0, &f, 0).unwrap(), 0)
                .map_err(|e| e.to_string())?;
            let once = rl_integral(2.0, &f, 0).map_err(|e| e.to_string())?;
            for i in 0..g.len() {
                worst = worst.max((twice.values()[i] - once.values()[i]).abs());
            }
        }
        if worst <= 1e-10 {
            Ok(format!("max defect {worst:.3e}"))
        } else {
            Err(format!("composition defect {worst:.3e}"))
        }
    }));

    VerifyReport { seed, checks }
}

/// Brute-force h_k(t_i, t_j) by literal nested delta sums (test oracle).
fn brute_force_h(grid: &Arc<TimeScaleGrid<f64>>, k: usize, i: usize, j: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut col = vec![0.0; grid.len()];
    for v in col.iter_mut().skip(j) {
        *v = 1.0;
    }
    for _ in 0..k {
        let mut next = vec![0.0; grid.len()];
        for (p, np) in next.iter_mut().enumerate().skip(j) {
            let mut acc = 0.0;
            for (q, cq) in col.iter().enumerate().take(p).skip(j) {
                acc += cq * (grid.points()[q + 1] - grid.points()[q]);
            }
            *np = acc;
        }
        col = next;
    }
    col[i]
}

fn random_gronwall_input(
    rng: &mut ChaCha8Rng,
    g: &Arc<TimeScaleGrid<f64>>,
) -> std::result::Result<GronwallInput<f64>, String> {
    let alpha = [0.5, 1.0][rng.gen_range(0..2)];
    let u = GridFunction::new(
        g.clone(),
        (0..g.len()).map(|_| rng.gen_range(0.0..2.0)).collect(),
    )
    .unwrap();
    let mut vv: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(0.0..2.0)).collect();
    vv.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let v = GridFunction::new(g.clone(), vv).unwrap();
    GronwallInput::new(u, v, alpha, 2.0, 0).map_err(|e| e.to_string())
}

fn random_dominance_instance(
    rng: &mut ChaCha8Rng,
) -> std::result::Result<(GronwallInput<f64>, GridFunction<f64>), String> {
    let n = rng.gen_range(4..=32usize);
    let g = zgrid(n - 1);
    let input = random_gronwall_input(rng, &g)?;
    let y = hypothesis_fixed_point(&input, 1e-12, 4 * n + 50).map_err(|e| e.to_string())?;
    Ok((input, y))
}

fn random_solver_problem(
    rng: &mut ChaCha8Rng,
    max_points: usize,
) -> (CauchyProblem<f64>, f64, f64) {
    let q = [0.25, 0.5, 0.9][rng.gen_range(0..3)];
    let alpha = [0.3, 0.5, 0.8, 1.0][rng.gen_range(0..4)];
    let h = [0.5, 1.0][rng.gen_range(0..2)];
    let n = rng.gen_range(8..=max_points.min(48));
    let grid = TimeScaleGrid::lattice(0.0, n as f64 * h, h).unwrap();
    let lambda: f64 = rng.gen_range(0.2..1.2) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let c = rng.gen_range(-0.5..0.5);
    let lipschitz = lambda.abs();
    let eta = lipschitz / q;
    let w = rng.gen_range(0.2..2.0);
    let tol = 1e-9;
    let p = CauchyProblem {
        alpha,
        rhs: Rhs::Affine { lambda, c },
        lipschitz,
        w,
        grid,
        t0_index: 0,
        eta,
        representation: Representation::RlType,
    };
    (p, q, tol)
}

fn random_dependence_pair(rng: &mut ChaCha8Rng, max_points: usize) -> DependenceInput<f64> {
    // certificates compare at an absolute tolerance, so keep the trajectory
    // growth lambda * span moderate
    let q = [0.25, 0.5, 0.9][rng.gen_range(0..3)];
    let alpha = [0.3, 0.5, 0.8, 1.0][rng.gen_range(0..4)];
    let h = [0.5, 1.0][rng.gen_range(0..2)];
    let n = rng.gen_range(8..=max_points.min(20));
    let grid = TimeScaleGrid::lattice(0.0, n as f64 * h, h).unwrap();
    let lambda: f64 = rng.gen_range(0.2..0.45) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let c = rng.gen_range(-0.5..0.5);
    let pa = CauchyProblem {
        alpha,
        rhs: Rhs::Affine { lambda, c },
        lipschitz: lambda.abs(),
        w: rng.gen_range(0.2..2.0),
        grid,
        t0_index: 0,
        eta: lambda.abs() / q,
        representation: Representation::RlType,
    };
    let mut pb = pa.clone();
    if rng.gen_bool(0.7) {
        pb.w += rng.gen_range(-0.2..0.2);
    }
    if rng.gen_bool(0.7) {
        if let Rhs::Affine { lambda, c } = pa.rhs {
            pb.rhs = Rhs::Affine {
                lambda,
                c: c + rng.gen_range(-0.05..0.05),
            };
        }
    }
    let lipschitz = pa.lipschitz;
    DependenceInput {
        problem_a: pa,
        problem_b: pb,
        lipschitz,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_is_deterministic() {
        let opts = VerifyOptions {
            seed: 7,
            gronwall_instances: 5,
            solver_instances: 3,
            max_grid_points: 24,
        };
        let r1 = run_suite(&opts);
        let r2 = run_suite(&opts);
        let mut t1 = Vec::new();
        let mut t2 = Vec::new();
        r1.write_table(&mut t1).unwrap();
        r2.write_table(&mut t2).unwrap();
        assert_eq!(t1, t2);
        assert!(r1.all_pass(), "{}", String::from_utf8(t1).unwrap());
    }
}
