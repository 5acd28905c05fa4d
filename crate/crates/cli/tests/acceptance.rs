//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines appear in plain `cargo test` output.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use essmin::classes::{
    class_membership, criterion_sum, criterion_summatory_integral, criterion_theorem_b, DecreaseFunction,
    FiniteSequence, SequenceClass, Verdict, WeightRole, WeightSequence,
};
use essmin::construction::{construct_lemma61, dyadic_point, ring_counterexample, RingLevels};
use essmin::counting::{coverage_distribution, domination_check};
use essmin::geometry::{gleason_distance, stolz_arc, ArcKind, DyadicIndex};
use essmin::potential::{
    bounded_function, harmonic_measure, harnack_check, herglotz_transform, lemma61_witness, poisson_integral,
    poisson_kernel, CircleMeasure,
};
use essmin::{DiskPoint, StolzAperture};
use essmin_cli::format::{MeasureFile, SequenceFile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t <= limit, || format!("took {t:.1?}, limit {limit:?}"))
}

fn cli(args: &[&str]) -> Result<String, String> {
    let mut full = vec!["essmin"];
    full.extend_from_slice(args);
    let out = essmin_cli::run(full);
    if out.code == 0 {
        Ok(out.stdout)
    } else {
        Err(format!("`essmin {}` exited {}: {}", args.join(" "), out.code, out.stderr.trim()))
    }
}

fn read_json(path: &Path) -> Result<Value, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn json(text: &str) -> Result<Value, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- 1

const GRID: usize = 1_000_000;

/// `m_a(n)` on the grid of angle midpoints `(i + 1/2)·2π/GRID`.
fn grid_coverage(a: &[DiskPoint], alpha: StolzAperture) -> Vec<f64> {
    let h = TAU / GRID as f64;
    let mut diff = vec![0i64; GRID + 1];
    let mut everywhere = 0i64;
    for z in a {
        let arc = stolz_arc(z, alpha);
        match arc.kind {
            ArcKind::Empty => {}
            ArcKind::FullCircle => everywhere += 1,
            ArcKind::Proper => {
                let s = arc.start();
                // first and one-past-last midpoint inside the open arc
                let i0 = (s / h - 0.5).ceil() as i64;
                let i1 = ((s + arc.length()) / h - 0.5).ceil() as i64;
                for (lo, hi) in split_wrapped(i0, i1) {
                    diff[lo] += 1;
                    diff[hi] -= 1;
                }
            }
        }
    }
    let mut hist: Vec<u64> = Vec::new();
    let mut depth = everywhere;
    for d in diff.iter().take(GRID) {
        depth += d;
        let k = depth as usize;
        if hist.len() <= k {
            hist.resize(k + 1, 0);
        }
        hist[k] += 1;
    }
    let mut m = vec![0.0; hist.len()];
    let mut acc = 0u64;
    for k in (1..hist.len()).rev() {
        acc += hist[k];
        m[k] = acc as f64 * h;
    }
    m
}

fn split_wrapped(i0: i64, i1: i64) -> Vec<(usize, usize)> {
    let n = GRID as i64;
    let (lo, hi) = (i0.rem_euclid(n), i0.rem_euclid(n) + (i1 - i0));
    if hi <= n {
        vec![(lo as usize, hi as usize)]
    } else {
        vec![(lo as usize, n as usize), (0, (hi - n) as usize)]
    }
}

fn random_separated(rng: &mut ChaCha8Rng, count: usize, delta: f64) -> Vec<DiskPoint> {
    let mut pts: Vec<DiskPoint> = Vec::with_capacity(count);
    let mut attempts = 0;
    while pts.len() < count && attempts < 50 * count {
        attempts += 1;
        let depth: f64 = rng.gen_range(0.3..12.0);
        let z = DiskPoint::new(1.0 - 2f64.powf(-depth), rng.gen_range(0.0..TAU)).expect("inside the disk");
        if pts.iter().all(|w| gleason_distance(&z, w) >= delta) {
            pts.push(z);
        }
    }
    pts
}

fn counting_exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let tol = TAU * 1e-5;
    let (mut worst, mut worst_layer, mut total_points) = (0.0f64, 0.0f64, 0);
    for case in 0..100 {
        let alpha = StolzAperture::new(rng.gen_range(0.5..=4.0)).map_err(|e| e.to_string())?;
        let count = rng.gen_range(2..=500);
        let a = random_separated(&mut rng, count, 0.2);
        total_points += a.len();
        let exact = coverage_distribution(&a, alpha);
        let oracle = grid_coverage(&a, alpha);
        let top = exact.max_coverage().max(oracle.len().saturating_sub(1));
        for n in 1..=top {
            let err = (exact.m(n) - oracle.get(n).copied().unwrap_or(0.0)).abs();
            worst = worst.max(err);
            ensure(err <= tol, || format!("case {case}: |m({n}) - grid| = {err:e} > {tol:e}"))?;
        }
        let arcs: f64 = a.iter().map(|z| stolz_arc(z, alpha).length()).sum();
        let layer = (exact.layer_sum() - arcs).abs();
        worst_layer = worst_layer.max(layer);
        ensure(layer <= 1e-9, || format!("case {case}: layer-cake gap {layer:e}"))?;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "100 sequences, {total_points} points; max grid gap {worst:.2e}, max layer-cake gap {worst_layer:.1e}, {:.1?}",
        start.elapsed()
    ))
}

// ---------------------------------------------------------------- 2

fn theorem_b_smoke() -> Outcome {
    let start = Instant::now();
    let fast = DecreaseFunction::exp_log_power(2.0).map_err(|e| e.to_string())?;
    let r = criterion_theorem_b(&fast, 1000).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::Holds && r.certificate.is_some(), || {
        format!("exp(-log²) gave {:?} (certificate {:?})", r.verdict, r.certificate)
    })?;
    let slow = DecreaseFunction::power(1.0).map_err(|e| e.to_string())?;
    let r = criterion_theorem_b(&slow, 1000).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::Fails, || format!("1-r gave {:?}", r.verdict))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("run");
    let out_s = out.to_str().ok_or("non-UTF-8 temp path")?;
    cli(&["construct", "lemma61", "--g", "power:1", "--depth", "15", "--out", out_s])?;
    let report = read_json(&out.join("report.json"))?;
    let res = &report["result"];
    ensure(res["violations"] == 0, || format!("construction violations: {}", res["violations"]))?;
    let check = &res["witness"]["check"];
    let c = res["witness"]["scale"].as_f64().ok_or("no scale")?;
    ensure(check["holds"] == true && check["min_margin"].as_f64().is_some_and(|m| m >= 0.0), || {
        format!("witness margins: {check}")
    })?;

    let seq = out.join("sequence.txt");
    let measure = out.join("measure.txt");
    let verified = json(&cli(&[
        "verify",
        "--sequence",
        seq.to_str().ok_or("path")?,
        "--measure",
        measure.to_str().ok_or("path")?,
        "--C",
        &c.to_string(),
    ])?)?;
    let v = &verified["result"];
    ensure(v["holds"] == true && v["check"]["min_margin"].as_f64().is_some_and(|m| m >= 0.0), || {
        format!("independent verify: {v}")
    })?;
    within(start, Duration::from_secs(120))?;
    Ok(format!(
        "exp(-log²) holds, 1-r fails; depth-15 witness C = {c}, {} points, min margin {:.3e}, {:.1?}",
        check["checked"],
        check["min_margin"].as_f64().unwrap_or(f64::NAN),
        start.elapsed()
    ))
}

// ---------------------------------------------------------------- 3

fn admissible_family() -> Vec<(&'static str, DecreaseFunction)> {
    vec![
        ("power:1", DecreaseFunction::Power { beta: 1.0 }),
        ("power:3", DecreaseFunction::Power { beta: 3.0 }),
        ("level:1,1,0.5,0", DecreaseFunction::Level { c: 1.0, shift: 1.0, p: 0.5, q: 0.0 }),
        ("level:1,2,1,1", DecreaseFunction::Level { c: 1.0, shift: 2.0, p: 1.0, q: 1.0 }),
        ("level:1,1,1,0", DecreaseFunction::Level { c: 1.0, shift: 1.0, p: 1.0, q: 0.0 }),
    ]
}

fn construction_invariants() -> Outcome {
    let alpha = StolzAperture::default();
    let mut arcs = Vec::new();
    for (name, g) in admissible_family() {
        let con = construct_lemma61(&g, 20).map_err(|e| format!("{name}: {e}"))?;
        let checks = con.check(alpha);
        ensure(checks.violations() == 0, || format!("{name}: {checks:?}"))?;
        ensure(checks.b_blaschke_sum <= checks.b_blaschke_bound, || {
            format!("{name}: b Blaschke sum {} > {}", checks.b_blaschke_sum, checks.b_blaschke_bound)
        })?;
        for n in 0..=20 {
            let cyl = con.measure.cylinder_mass(n as u32, con.selection.j[n][0]);
            let want = 2f64.powi(con.selection.l[n] as i32 - n as i32);
            ensure(cyl == want, || format!("{name}: μ(I_{{{n},j}}) = {cyl}, want {want}"))?;
        }
        arcs.push(con.selection.total_arcs());
    }
    Ok(format!("5 decay bounds at depth 20, zero violations; arcs per construction {arcs:?}"))
}

// ---------------------------------------------------------------- 4

fn gauss_kronrod(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    const XK: [f64; 8] = [
        0.991_455_371_120_812_6,
        0.949_107_912_342_758_5,
        0.864_864_423_359_769_1,
        0.741_531_185_599_394_4,
        0.586_087_235_467_691_1,
        0.405_845_151_377_397_2,
        0.207_784_955_007_898_5,
        0.0,
    ];
    const WK: [f64; 8] = [
        0.022_935_322_010_529_22,
        0.063_092_092_629_978_55,
        0.104_790_010_322_250_2,
        0.140_653_259_715_525_9,
        0.169_004_726_639_267_9,
        0.190_350_578_064_785_4,
        0.204_432_940_075_298_9,
        0.209_482_141_084_728,
    ];
    const WG: [f64; 4] = [
        0.129_484_966_168_869_7,
        0.279_705_391_489_276_7,
        0.381_830_050_505_118_9,
        0.417_959_183_673_469_4,
    ];
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let (mut k, mut g) = (0.0, 0.0);
    for i in 0..8 {
        let x = XK[i];
        let fx = if x == 0.0 { f(c) } else { f(c - h * x) + f(c + h * x) };
        k += WK[i] * fx;
        if i % 2 == 1 {
            g += WG[i / 2] * fx;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss-Kronrod; a piece is accepted once its error estimate is
/// below `eps` or at rounding level for its own value.
fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64, depth: u32) -> f64 {
    let (k, err) = gauss_kronrod(f, a, b);
    if err <= eps.max(1e-15 * k.abs()) || depth == 0 {
        return k;
    }
    let m = 0.5 * (a + b);
    adaptive(f, a, m, eps, depth - 1) + adaptive(f, m, b, eps, depth - 1)
}

fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let guess = gauss_kronrod(f, a, b).0.abs();
    adaptive(f, a, b, 1e-15 * guess, 60)
}

fn potential_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = DecreaseFunction::Level { c: 1.0, shift: 1.0, p: 0.5, q: 0.0 };
    let con = construct_lemma61(&g, 14).map_err(|e| e.to_string())?;
    let mu = CircleMeasure::new(Some(con.measure.clone()), vec![(1.0, 0.25), (4.0, 0.5)]).map_err(|e| e.to_string())?;

    let mean = poisson_integral(&mu, &DiskPoint::ORIGIN);
    let total = mu.total_mass();
    ensure((mean - total).abs() <= 1e-12 * total, || format!("mean value {mean} vs mass {total}"))?;

    let mut worst_quad = 0.0f64;
    for i in 0..1000 {
        let depth: f64 = rng.gen_range(0.0..12.0);
        let z = DiskPoint::new(1.0 - 2f64.powf(-depth), rng.gen_range(0.0..TAU)).map_err(|e| e.to_string())?;
        let s: f64 = rng.gen_range(0.0..TAU);
        let len = TAU * 2f64.powf(-rng.gen_range(0.0..14.0));
        let closed = harmonic_measure(&z, s, len);
        let kernel = |t: f64| poisson_kernel(&z, t);
        // split at the kernel peak so the adaptive rule sees smooth pieces
        let peak = s + (z.phi() - s).rem_euclid(TAU);
        let quad = if peak < s + len {
            integrate(&kernel, s, peak) + integrate(&kernel, peak, s + len)
        } else {
            integrate(&kernel, s, s + len)
        } / TAU;
        let rel = (closed - quad).abs() / quad.abs();
        worst_quad = worst_quad.max(rel);
        ensure(rel <= 1e-10, || format!("pair {i}: closed {closed:e} vs quadrature {quad:e}"))?;
    }

    let mut worst_herglotz = 0.0f64;
    let mut samples = Vec::with_capacity(10_000);
    for _ in 0..10_000 {
        let depth: f64 = rng.gen_range(0.0..16.0);
        samples.push(DiskPoint::new(1.0 - 2f64.powf(-depth), rng.gen_range(0.0..TAU)).map_err(|e| e.to_string())?);
    }
    for z in samples.iter().take(1000) {
        let p = poisson_integral(&mu, z);
        let h = herglotz_transform(&mu, z).re;
        let err = (h - p).abs() / p.max(1.0);
        worst_herglotz = worst_herglotz.max(err);
        ensure(err <= 1e-9, || format!("Re H = {h} vs P = {p} at {z:?}"))?;
    }

    // steps in g̃ that l_n can only climb one unit at a time put zeros in b
    let stepped: Vec<f64> = (0..=16).map(|n| if n < 5 { 1.0 } else if n < 11 { 256.0 } else { 16384.0 }).collect();
    let wcon = construct_lemma61(&DecreaseFunction::table(stepped).map_err(|e| e.to_string())?, 16)
        .map_err(|e| e.to_string())?;
    let run = lemma61_witness(&wcon).map_err(|e| e.to_string())?;
    ensure(!run.witness.zeros.is_empty(), || "the witness has no zeros".into())?;
    let mut max_f = 0.0f64;
    for z in samples.iter().chain(&run.witness.zeros) {
        let f = bounded_function(&run.witness, z).norm();
        max_f = max_f.max(f);
        ensure(f <= 1.0, || format!("|f| = {f} at {z:?}"))?;
    }

    let mut harnack_worst = 0.0f64;
    for i in 0..1000 {
        let n: u32 = rng.gen_range(1..=20);
        let k = rng.gen_range(0..1u64 << n);
        let q = DyadicIndex::new(n, k).map_err(|e| e.to_string())?;
        let r = if i % 2 == 0 {
            DyadicIndex::new(n, (k + 1) % (1u64 << n))
        } else {
            DyadicIndex::new(n + 1, 2 * k + 1)
        }
        .map_err(|e| e.to_string())?;
        let (ratio, bound) = harnack_check(&mu, &q.anchor_point(), &r.anchor_point());
        harnack_worst = harnack_worst.max(ratio.max(1.0 / ratio) / bound);
        ensure(ratio <= bound && 1.0 / ratio <= bound, || format!("cubes {q:?}, {r:?}: ratio {ratio}, bound {bound}"))?;
    }
    Ok(format!(
        "quadrature rel gap {worst_quad:.1e}, Herglotz gap {worst_herglotz:.1e}, max |f| {max_f:.3} over {} points ({} zeros), worst Harnack ratio/bound {harnack_worst:.3}",
        samples.len() + run.witness.zeros.len(),
        run.witness.zeros.len()
    ))
}

// ---------------------------------------------------------------- 5

fn domination_pipeline() -> Outcome {
    let alpha = StolzAperture::default();
    let mut summary = Vec::new();
    for (name, g) in admissible_family().into_iter().filter(|(n, _)| *n != "power:1") {
        let mut consts = Vec::new();
        for depth in [10, 20] {
            let con = construct_lemma61(&g, depth).map_err(|e| e.to_string())?;
            let pts = con.all_points();
            let values = pts
                .iter()
                .map(|z| g.gtilde(z.level() as f64))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            let rep = domination_check(&pts, &values, alpha, |k| g.gtilde(k as f64).unwrap_or(f64::INFINITY))
                .map_err(|e| format!("{name} depth {depth}: {e}"))?;
            ensure(rep.holds(), || {
                format!(
                    "{name} depth {depth}: inclusion {} with {} domination failures",
                    rep.inclusion.holds,
                    rep.violations.len()
                )
            })?;
            ensure(rep.weak_constant.is_finite(), || format!("{name}: weak constant not finite"))?;
            consts.push((rep.m, rep.weak_constant));
        }
        let (c10, c20) = (consts[0].1, consts[1].1);
        let var = (c20 - c10).abs() / c10;
        ensure(var <= 0.2, || format!("{name}: weak constant {c10} -> {c20} ({:.0}%)", 100.0 * var))?;
        summary.push(format!("{name} M={} C {c10:.2}->{c20:.2}", consts[1].0));
    }
    Ok(summary.join("; "))
}

// ---------------------------------------------------------------- 6

fn class_relations() -> Outcome {
    let alpha = StolzAperture::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let weights = [
        WeightSequence::constant(1.0, WeightRole::W),
        WeightSequence::power(1.0, 1.0, 0.0, WeightRole::W),
        WeightSequence::power(2.0, 1.0, 1.0, WeightRole::W),
    ];
    let weights = weights.into_iter().collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let horizon = 64;
    let (mut checked, mut p_members) = (0, 0);
    let mut test = |label: &str, ev: &dyn essmin::classes::ClassEvidence| -> Result<(), String> {
        for w in &weights {
            let p = class_membership(ev, w, SequenceClass::P, horizon).map_err(|e| e.to_string())?;
            let s = class_membership(ev, w, SequenceClass::S, horizon).map_err(|e| e.to_string())?;
            checked += 1;
            if p.verdict == Verdict::Holds {
                p_members += 1;
                ensure(s.verdict != Verdict::Fails, || format!("{label}: in P_w but S_w fails"))?;
            }
        }
        Ok(())
    };
    let mut corpus = 0;
    for i in 0..20 {
        let a = random_separated(&mut rng, 50 + 20 * i, 0.2);
        test(&format!("random #{i}"), &FiniteSequence::new(&a, alpha))?;
        corpus += 1;
    }
    for (name, g) in admissible_family() {
        for depth in [8, 12, 16] {
            let con = construct_lemma61(&g, depth).map_err(|e| e.to_string())?;
            test(&format!("{name} depth {depth}"), &FiniteSequence::new(&con.all_points(), alpha))?;
            corpus += 1;
        }
    }
    for levels in [
        RingLevels::Arithmetic { start: 1, step: 1 },
        RingLevels::Arithmetic { start: 2, step: 3 },
        RingLevels::Geometric { start: 1, ratio: 2 },
        RingLevels::Geometric { start: 2, ratio: 3 },
        RingLevels::Explicit { levels: vec![1, 2, 3, 5, 8, 13] },
    ] {
        let seq = ring_counterexample(levels.clone(), alpha).map_err(|e| e.to_string())?;
        test(&format!("rings {levels:?}"), &seq)?;
        corpus += 1;
    }
    for depth in 1..=10u32 {
        let ring: Vec<DiskPoint> = (0..1u64 << depth).map(|j| dyadic_point(depth as usize, j)).collect();
        test(&format!("single ring {depth}"), &FiniteSequence::new(&ring, alpha))?;
        corpus += 1;
    }
    ensure(corpus == 50, || format!("corpus has {corpus} sequences"))?;
    ensure(p_members > 0, || "no P_w member in the corpus; the inclusion check is vacuous".into())?;

    let rings = ring_counterexample(RingLevels::Geometric { start: 1, ratio: 2 }, alpha).map_err(|e| e.to_string())?;
    let w2 = WeightSequence::power(1.0, 2.0, 0.0, WeightRole::W).map_err(|e| e.to_string())?;
    let p = class_membership(&rings, &w2, SequenceClass::P, horizon).map_err(|e| e.to_string())?;
    ensure(p.verdict == Verdict::Fails && p.certificate.is_some(), || {
        format!("n_k = 2^k rings: P_w verdict {:?}, certificate {:?}", p.verdict, p.certificate)
    })?;
    let k_max = rings.rings().len();
    ensure(k_max >= 8, || format!("only {k_max} rings representable"))?;
    for k in 1..=k_max {
        let m = rings.min_phi(k);
        ensure(m >= k as u64, || format!("min φ after {k} rings is {m}"))?;
    }

    let gs = [
        DecreaseFunction::Power { beta: 1.0 },
        DecreaseFunction::Power { beta: 2.0 },
        DecreaseFunction::ExpLogPower { beta: 2.0 },
        DecreaseFunction::ExpInverse { c: 1.0, beta: 0.5 },
        DecreaseFunction::Level { c: 1.0, shift: 2.0, p: 1.0, q: 1.0 },
    ];
    let ws = [
        WeightSequence::constant(1.0, WeightRole::W),
        WeightSequence::power(1.0, 1.0, 0.0, WeightRole::W),
        WeightSequence::power(2.0, 1.0, 1.0, WeightRole::W),
        WeightSequence::power(1.0, 0.5, 0.0, WeightRole::W),
    ];
    let ws = ws.into_iter().collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let mut agree = 0;
    for g in &gs {
        for w in &ws {
            let a = criterion_summatory_integral(g, w, 1000).map_err(|e| e.to_string())?;
            let b = criterion_sum(g, w, 1000).map_err(|e| e.to_string())?;
            ensure(a.verdict == b.verdict, || format!("{g:?} / {w:?}: {:?} vs {:?}", a.verdict, b.verdict))?;
            agree += 1;
        }
    }
    Ok(format!(
        "{corpus} sequences, {checked} (sequence, w) checks with {p_members} P_w members, none outside S_w; rings n_k = 2^k certified not in P_w with min φ >= K for K <= {k_max}; {agree} criterion pairs agree"
    ))
}

// ---------------------------------------------------------------- 7

fn necessity() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("nec");
    let out_s = out.to_str().ok_or("non-UTF-8 temp path")?;
    cli(&[
        "construct",
        "necessity-thm2",
        "--g",
        "level:1,2,0,1",
        "--weights",
        "power:1,1",
        "--C",
        "1",
        "--depth",
        "14",
        "--out",
        out_s,
    ])?;
    let report = read_json(&out.join("report.json"))?;
    let r = &report["result"];
    ensure(r["A"].as_f64().is_some_and(f64::is_finite), || format!("A = {}", r["A"]))?;
    let checks = &r["checks"];
    ensure(checks["blaschke_sum"].as_f64() <= checks["blaschke_bound"].as_f64(), || {
        format!("Blaschke {} > {}", checks["blaschke_sum"], checks["blaschke_bound"])
    })?;
    ensure(checks["membership_violations"].as_array().is_some_and(Vec::is_empty), || {
        format!("membership m >= v_m/A fails: {}", checks["membership_violations"])
    })?;
    ensure(r["violations"] == 0, || format!("{} check violations", r["violations"]))?;
    let w = &r["witness"]["check"];
    ensure(w["holds"] == true && w["min_margin"].as_f64().is_some_and(|m| m >= 0.0), || {
        format!("witness: {w}")
    })?;
    ensure(r["lstable"]["verdict"] == "holds", || format!("lstable: {}", r["lstable"]["verdict"]))?;
    ensure(r["fast_path"]["verdict"] == r["search"]["verdict"], || {
        format!("fast path {} vs search {}", r["fast_path"]["verdict"], r["search"]["verdict"])
    })?;

    let verified = json(&cli(&[
        "verify",
        "--sequence",
        out.join("sequence.txt").to_str().ok_or("path")?,
        "--measure",
        out.join("measure.txt").to_str().ok_or("path")?,
    ])?)?;
    let v = &verified["result"];
    ensure(v["holds"] == true, || format!("independent verify: {}", v["check"]))?;

    // a nonempty exceptional set, so ã ∪ b̃ carries zeros
    let out_e = dir.path().join("nec-e");
    cli(&[
        "construct", "necessity-thm2", "--g", "level:1,2,0,1", "--weights", "power:1,1", "--E", "2,5,9", "--depth", "12",
        "--out", out_e.to_str().ok_or("path")?,
    ])?;
    let re = read_json(&out_e.join("report.json"))?;
    let re = &re["result"];
    let zeros = re["blaschke_part"].as_u64().unwrap_or(0);
    ensure(re["violations"] == 0 && zeros > 0, || format!("E = {{2,5,9}}: {} violations, {zeros} zeros", re["violations"]))?;
    let ve = json(&cli(&[
        "verify",
        "--sequence",
        out_e.join("sequence.txt").to_str().ok_or("path")?,
        "--measure",
        out_e.join("measure.txt").to_str().ok_or("path")?,
    ])?)?;
    ensure(ve["result"]["holds"] == true, || format!("E = {{2,5,9}} verify: {}", ve["result"]))?;

    Ok(format!(
        "A = {:.4}, q̃ {} points, ã∪b̃ {} points, Blaschke {:.3} <= {:.3}, witness C = {}, fast path and search both {}; with E = {{2,5,9}}: {zeros} zeros, Blaschke {:.3} <= {:.3}",
        r["A"].as_f64().unwrap_or(f64::NAN),
        r["q_tilde"],
        r["blaschke_part"],
        checks["blaschke_sum"].as_f64().unwrap_or(f64::NAN),
        checks["blaschke_bound"].as_f64().unwrap_or(f64::NAN),
        r["witness"]["scale"],
        r["search"]["verdict"],
        re["checks"]["blaschke_sum"].as_f64().unwrap_or(f64::NAN),
        re["checks"]["blaschke_bound"].as_f64().unwrap_or(f64::NAN),
    ))
}

// ---------------------------------------------------------------- 8

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let mut compared = 0;
    for run in ["a", "b"] {
        cli(&["construct", "lemma61", "--g", "level:1,1,0.5,0", "--depth", "12", "--out", &path(run)])?;
        cli(&["construct", "rings", "--levels", "geometric:1,2", "--weights", "power:1,2", "--out", &path(&format!("rings-{run}"))])?;
        cli(&[
            "construct", "necessity-thm2", "--g", "level:1,2,0,1", "--weights", "power:1,1", "--depth", "10", "--out",
            &path(&format!("nec-{run}")),
        ])?;
    }
    for (a, b) in [("a", "b"), ("rings-a", "rings-b"), ("nec-a", "nec-b")] {
        let mut names: Vec<_> = fs::read_dir(path(a))
            .map_err(|e| e.to_string())?
            .map(|e| e.map(|e| e.file_name()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        names.sort();
        for name in names {
            let x = fs::read(Path::new(&path(a)).join(&name)).map_err(|e| e.to_string())?;
            let y = fs::read(Path::new(&path(b)).join(&name)).map_err(|e| e.to_string())?;
            ensure(x == y, || format!("{a}/{name:?} differs between runs"))?;
            compared += 1;
        }
    }
    let seq = path("a/sequence.txt");
    let measure = path("a/measure.txt");
    let commands: Vec<Vec<&str>> = vec![
        vec!["analyze", &seq, "--g", "level:1,1,0.5,0"],
        vec!["classify", &seq, "--weights", "const:1", "--class", "S"],
        vec!["criteria", "--g", "power:1", "--mode", "b"],
        vec!["criteria", "--g", "level:1,2,0,1", "--mode", "limsup", "--weights", "power:1,1"],
        vec!["verify", "--sequence", &seq, "--measure", &measure, "--pipeline", "--g", "level:1,1,0.5,0"],
    ];
    for args in &commands {
        let (x, y) = (cli(args)?, cli(args)?);
        ensure(x == y, || format!("`{}` output differs between runs", args.join(" ")))?;
        compared += 1;
    }

    let mut round_trips = 0;
    for file in ["a/sequence.txt", "rings-a/sequence.txt", "nec-a/q_tilde.txt", "nec-a/blaschke_part.txt"] {
        let text = fs::read_to_string(path(file)).map_err(|e| e.to_string())?;
        let parsed = SequenceFile::parse(&text).map_err(|e| format!("{file}: {e}"))?;
        ensure(parsed.render() == text, || format!("{file} does not round-trip"))?;
        round_trips += 1;
    }
    for file in ["a/measure.txt", "nec-a/measure.txt"] {
        let text = fs::read_to_string(path(file)).map_err(|e| e.to_string())?;
        let parsed = MeasureFile::parse(&text).map_err(|e| format!("{file}: {e}"))?;
        ensure(parsed.render() == text, || format!("{file} does not round-trip"))?;
        let mu = parsed.to_measure().map_err(|e| e.to_string())?;
        ensure((mu.total_mass() - 1.0).abs() <= 1e-12, || format!("{file}: mass {}", mu.total_mass()))?;
        round_trips += 1;
    }
    Ok(format!("{compared} outputs byte-identical across two runs, {round_trips} files round-trip"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("counting exactness", counting_exactness),
        ("decay-bound smoke tests", theorem_b_smoke),
        ("Cantor-type construction invariants", construction_invariants),
        ("potential correctness", potential_correctness),
        ("maximal-function pipeline", domination_pipeline),
        ("class relations", class_relations),
        ("necessity construction", necessity),
        ("determinism and round-trip", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
