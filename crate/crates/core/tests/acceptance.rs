//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use galperin_core::analytic::{predict_count, rotation_angle, rotation_deviation};
use galperin_core::kinematics::{matrix_a, matrix_m, matrix_m_prime, matrix_s, Matrix2};
use galperin_core::{run, BackendChoice, BackendKind, MassRatio, Outcome, RunOptions};
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// The collision table: `(exponent n, count)` for `alpha = 10^-n`.
const TABLE: [(u32, u64); 5] = [(0, 3), (2, 31), (4, 314), (6, 3141), (12, 3_141_592)];

const TABLE_TIME_BUDGET: Duration = Duration::from_secs(5);
const FLOAT_DRIFT_BOUND: f64 = 1e-8;
const ULP_TOLERANCE: f64 = 4.0 * f64::EPSILON;
const RANDOM_RATIOS: usize = 1000;
const ROTATION_STEPS: u32 = 1000;
const ROTATION_TOLERANCE: f64 = 1e-9;
const FIG2_FINAL_BIG_SPEED: f64 = 0.999;
const FLOAT_RUN_BUDGET: Duration = Duration::from_secs(1);
const EXACT_RUN_BUDGET: Duration = Duration::from_secs(60);

type Check = Result<String, String>;

fn decade(n: u32) -> MassRatio {
    MassRatio::decade(n).unwrap()
}

fn table_backend(n: u32) -> BackendChoice {
    if n <= 4 {
        BackendChoice::Exact
    } else {
        BackendChoice::Float64
    }
}

fn simulate(ratio: MassRatio, backend: BackendChoice, options: &RunOptions) -> Result<Outcome, String> {
    run(ratio, backend, options).map_err(|e| format!("{ratio} ({backend:?}): {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn table_simulation() -> Check {
    let start = Instant::now();
    let mut seen = Vec::new();
    for (n, expect) in TABLE {
        let out = simulate(decade(n), table_backend(n), &RunOptions::default())?;
        ensure(out.count() == expect, || {
            format!("alpha=1e-{n}: got {}, want {expect}", out.count())
        })?;
        let kind = out.backend_kind();
        ensure(n > 4 || kind == BackendKind::Exact, || {
            format!("alpha=1e-{n} ran on {kind}")
        })?;
        seen.push(out.count());
    }
    let elapsed = start.elapsed();
    ensure(elapsed < TABLE_TIME_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("counts {seen:?} in {elapsed:.2?}"))
}

fn table_analytic() -> Check {
    for (n, expect) in TABLE {
        let p = predict_count(&decade(n)).map_err(|e| e.to_string())?;
        ensure(p.n_exact_formula == expect, || {
            format!("alpha=1e-{n}: predicted {}", p.n_exact_formula)
        })?;
    }
    let one = predict_count(&MassRatio::ONE).map_err(|e| e.to_string())?;
    ensure(one.n_exact_formula == 3 && one.n_paper_floor == 4, || {
        format!("alpha=1: {one:?}")
    })?;
    Ok("five counts predicted; alpha=1 gives 3 where the literal floor gives 4".into())
}

fn sqrt_approximation() -> Check {
    for (n, expect) in TABLE {
        let ratio = decade(n);
        let approx = predict_count(&ratio).map_err(|e| e.to_string())?.n_sqrt_approx;
        let q = ratio.denom() as f64;
        ensure(approx == expect, || {
            format!("alpha=1e-{n}: floor(pi sqrt {q}) = {approx}, want {expect}")
        })?;
    }
    Ok("floor(pi sqrt(M/m)) matches all five counts".into())
}

fn backend_equivalence() -> Check {
    let ratios = [(1, 1), (1, 4), (1, 9), (1, 100), (1, 10_000)];
    let mut counts = Vec::new();
    for (p, q) in ratios {
        let r = MassRatio::new(p, q).unwrap();
        let exact = simulate(r, BackendChoice::Exact, &RunOptions::default())?.count();
        let float = simulate(r, BackendChoice::Float64, &RunOptions::default())?.count();
        ensure(exact == float, || format!("{r}: exact {exact} vs float {float}"))?;
        counts.push(exact);
    }
    Ok(format!("exact == float64 for 1, 1/4, 1/9, 1/100, 1/10000: {counts:?}"))
}

fn conservation() -> Check {
    for n in [0, 2, 4, 6] {
        let out = simulate(decade(n), BackendChoice::Exact, &RunOptions::default())?;
        let d = out.drift();
        ensure(d.energy_rel_drift == 0.0 && d.momentum_rel_drift == 0.0, || {
            format!("exact alpha=1e-{n}: {d:?}")
        })?;
    }
    let out = simulate(decade(6), BackendChoice::Float64, &RunOptions::default())?;
    let drift = out.drift().energy_rel_drift;
    ensure(out.count() == 3141, || format!("float run gave {}", out.count()))?;
    ensure(drift < FLOAT_DRIFT_BOUND, || format!("float64 energy drift {drift:e}"))?;
    Ok(format!("exact drift 0; float64 alpha=1e-6 drift {drift:.3e}"))
}

fn random_ratio(rng: &mut StdRng) -> MassRatio {
    let q: u64 = rng.random_range(1..=1_000_000);
    let p: u64 = rng.random_range(1..=q);
    MassRatio::new(p, q).unwrap()
}

fn max_gap(a: &Matrix2<f64>, b: &Matrix2<f64>) -> f64 {
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (**x - *y).abs())
        .fold(0.0, f64::max)
}

fn matrix_properties() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let minus_one = BigRational::from_integer((-1).into());
    let plus_one = BigRational::from_integer(1.into());
    let mut worst = 0.0f64;
    for _ in 0..RANDOM_RATIOS {
        let r = random_ratio(&mut rng);
        ensure(matrix_s::<BigRational>(&r).det() == minus_one, || format!("{r}: det S"))?;
        ensure(matrix_a::<BigRational>().det() == minus_one, || "det A".into())?;
        ensure(matrix_m::<BigRational>(&r).det() == plus_one, || format!("{r}: det M"))?;
        ensure(matrix_a::<BigRational>().mul(&matrix_s(&r)) == matrix_m(&r), || {
            format!("{r}: M != A S")
        })?;

        let dets = [
            (matrix_s::<f64>(&r).det(), -1.0),
            (matrix_a::<f64>().det(), -1.0),
            (matrix_m::<f64>(&r).det(), 1.0),
        ];
        let m = matrix_m_prime::<f64>(&r).map_err(|e| e.to_string())?;
        let gram_gap = max_gap(&m.transpose().mul(&m), &Matrix2::identity());
        let model = rotation_angle(&r).map_err(|e| e.to_string())?;
        let trace_gap = (m.trace() - 2.0 * model.theta.cos()).abs();
        let errors = dets.iter().map(|(got, want)| (got - want).abs()).chain([
            gram_gap,
            model.cos_residual.abs(),
            trace_gap / 2.0,
            m.det() - 1.0,
        ]);
        for e in errors {
            worst = worst.max(e.abs());
        }
        ensure(worst <= ULP_TOLERANCE, || format!("{r}: float error {worst:e}"))?;

        if let Some((a, b)) = r.rational_sqrt() {
            let m = matrix_m_prime::<BigRational>(&r).map_err(|e| e.to_string())?;
            ensure(m.transpose().mul(&m) == Matrix2::identity(), || {
                format!("{a}/{b}: M' not orthogonal")
            })?;
        }
    }
    // Perfect squares, where M' is exact.
    for k in 1..=50u64 {
        let r = MassRatio::new(k * k, (k + 7) * (k + 7)).unwrap();
        let m = matrix_m_prime::<BigRational>(&r).map_err(|e| e.to_string())?;
        ensure(m.transpose().mul(&m) == Matrix2::identity(), || {
            format!("{r}: M' not orthogonal")
        })?;
        ensure(m.det() == plus_one, || format!("{r}: det M'"))?;
    }
    Ok(format!(
        "{RANDOM_RATIOS} random ratios exact; worst float error {:.2} ulp",
        worst / f64::EPSILON
    ))
}

fn rotation_equivalence() -> Check {
    let dev = rotation_deviation(&decade(4), ROTATION_STEPS).map_err(|e| e.to_string())?;
    ensure(dev <= ROTATION_TOLERANCE, || format!("deviation {dev:e}"))?;
    Ok(format!("{ROTATION_STEPS} steps at alpha=1e-4, max deviation {dev:.2e}"))
}

fn figure_shape() -> Check {
    let out = simulate(decade(6), BackendChoice::Auto, &RunOptions::default().with_trace())?;
    let rows = out.trace_rows().map_err(|e| e.to_string())?;
    ensure(out.count() == 3141, || format!("count {}", out.count()))?;
    ensure(rows.len() == 3142, || format!("{} rows", rows.len()))?;
    ensure(rows[0].v == "0" && rows[0].big_v == "-1", || {
        format!("row 0 {:?}", rows[0])
    })?;

    let big: Vec<f64> = out.speed_series().unwrap().iter().map(|s| s.1).collect();
    let min = big.iter().copied().fold(f64::INFINITY, f64::min);
    let at_min: Vec<usize> = (0..big.len()).filter(|&i| big[i] == min).collect();
    let contiguous = at_min.windows(2).all(|w| w[1] == w[0] + 1);
    ensure(contiguous, || {
        format!("minimum |V| = {min} attained at separate places {at_min:?}")
    })?;
    let turn = at_min[0];
    let falls = big[..=turn].windows(2).all(|w| w[1] <= w[0]);
    let rises = big[turn..].windows(2).all(|w| w[1] >= w[0]);
    ensure(falls && rises, || "|V| is not fall-then-rise".into())?;
    let last = *big.last().unwrap();
    ensure(last > FIG2_FINAL_BIG_SPEED, || format!("final |V| = {last}"))?;
    Ok(format!(
        "3141 events, |V| minimum {min:.2e} at event {}, final |V| {last:.7}",
        turn + 1
    ))
}

fn performance() -> Check {
    let start = Instant::now();
    let out = simulate(decade(12), BackendChoice::Float64, &RunOptions::default())?;
    let float_time = start.elapsed();
    ensure(out.count() == 3_141_592, || format!("float count {}", out.count()))?;
    ensure(float_time < FLOAT_RUN_BUDGET, || {
        format!("float64 1e-12 took {float_time:?}")
    })?;

    let start = Instant::now();
    let out = simulate(decade(6), BackendChoice::Exact, &RunOptions::default())?;
    let exact_time = start.elapsed();
    ensure(out.count() == 3141, || format!("exact count {}", out.count()))?;
    ensure(exact_time < EXACT_RUN_BUDGET, || {
        format!("exact 1e-6 took {exact_time:?}")
    })?;
    Ok(format!(
        "float64 1e-12 in {float_time:.2?}; exact 1e-6 in {exact_time:.2?} ({} digits)",
        out.final_numerator_digits().unwrap()
    ))
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("AC1 collision table by simulation", table_simulation),
        ("AC2 collision table by prediction", table_analytic),
        ("AC3 floor(pi sqrt(M/m)) approximation", sqrt_approximation),
        ("AC4 exact/float64 count agreement", backend_equivalence),
        ("AC5 conservation", conservation),
        ("AC6 matrix properties", matrix_properties),
        ("AC7 rotation equivalence", rotation_equivalence),
        ("AC8 big-block speed profile at 1e-6", figure_shape),
        ("AC9 performance", performance),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
