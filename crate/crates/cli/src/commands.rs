use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use essmin::classes::{
    class_membership, criterion_limsup, criterion_sum, criterion_summatory_integral, criterion_theorem_b,
    limsup_corollary, lstable_check, search_limsup_violation, ClassEvidence, FiniteSequence, SequenceClass, Verdict,
    WeightRole,
};
use essmin::construction::{
    construct_lemma61, construct_necessity_thm2, ring_counterexample, CantorFamily, Lemma61, RingLevels,
};
use essmin::counting::{coverage_distribution, domination_check, phi_range, profile};
use essmin::potential::{
    bounded_function, calibrate_scale, lemma61_witness, necessity_witness, poisson_integral, HarmonicWitness,
    MinorantReport, WitnessRun,
};
use essmin::{DiskPoint, StolzAperture};
use serde_json::{json, Value};

use crate::format::{
    parse_g, parse_weights, ExpandedPoint, MeasureFile, Record, SequenceFile, DEFAULT_EXPANSION_DEPTH,
};
use crate::report::{series, Report, Status, COMPARISON_TOLERANCE};
use crate::{
    AnalyzeArgs, ClassArg, ClassifyArgs, Cli, CliError, Command, ConstructArgs, CriteriaArgs, Mode, Outcome,
    Variant, VerifyArgs,
};

/// Violations listed individually in a report; the rest are only counted.
const LISTED_VIOLATIONS: usize = 50;

pub fn dispatch(cli: &Cli) -> Outcome {
    let (name, result) = match &cli.command {
        Command::Analyze(a) => ("analyze", analyze(cli.alpha, a)),
        Command::Classify(a) => ("classify", classify(cli.alpha, a)),
        Command::Criteria(a) => ("criteria", criteria(a)),
        Command::Construct(a) => ("construct", construct(cli.alpha, a)),
        Command::Verify(a) => ("verify", verify(cli.alpha, a)),
    };
    match result {
        Ok(text) => Outcome {
            code: 0,
            stdout: text,
            stderr: String::new(),
        },
        Err(CliError::Refused { reason, certificate }) => {
            let mut r = Report::new(name);
            r.status = Status::Refused;
            r.result = json!({ "reason": reason, "certificate": certificate });
            Outcome {
                code: 2,
                stdout: r.render(),
                stderr: format!("essmin {name}: refused: {reason}\n"),
            }
        }
        Err(CliError::Input(msg)) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("essmin {name}: {msg}\n"),
        },
    }
}

fn aperture(flag: Option<f64>, file: Option<f64>) -> Result<StolzAperture, CliError> {
    match flag.or(file) {
        Some(a) => Ok(StolzAperture::new(a)?),
        None => Ok(StolzAperture::default()),
    }
}

/// Writes the report to `out` when given and returns what goes to stdout.
fn emit(report: &Report, out: Option<&Path>) -> Result<String, CliError> {
    let text = report.render();
    match out {
        Some(path) => {
            write_file(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_set(spec: Option<&str>) -> Result<BTreeSet<usize>, CliError> {
    let mut out = BTreeSet::new();
    for w in spec.unwrap_or("").split(',').map(str::trim).filter(|w| !w.is_empty()) {
        out.insert(w.parse().map_err(|e| CliError::Input(format!("exceptional set entry `{w}`: {e}")))?);
    }
    Ok(out)
}

fn points_of(expanded: &[ExpandedPoint]) -> Vec<DiskPoint> {
    expanded.iter().map(|p| p.point).collect()
}

fn analyze(alpha: Option<f64>, args: &AnalyzeArgs) -> Result<String, CliError> {
    let file = SequenceFile::read(&args.input)?;
    let alpha = aperture(alpha, file.alpha)?;
    let depth = args.depth.unwrap_or(DEFAULT_EXPANSION_DEPTH);
    let pts = points_of(&file.expand(depth)?);
    let prof = profile(&pts, alpha);
    let horizon = args.horizon.or(file.horizon).unwrap_or(prof.coverage.max_coverage());
    let table: Vec<(usize, f64)> = (1..=horizon).map(|n| (n, prof.coverage.m(n))).collect();
    let (phi_min, phi_max) = if pts.is_empty() { (0, 0) } else { phi_range(&pts, alpha) };
    let tail: Vec<f64> = table.iter().map(|&(_, m)| m).collect();
    let mut result = json!({
        "points": pts.len(),
        "separation": prof.separation,
        "blaschke": prof.blaschke,
        "coverage": {
            "max_coverage": prof.coverage.max_coverage(),
            "layer_sum": prof.coverage.layer_sum(),
            "table": table,
        },
        "phi_min": phi_min,
        "phi_max": phi_max,
        "nt_measure": {
            "estimate": prof.nt_measure_estimate,
            "trend": essmin::series::fit_trend(&tail),
        },
        "plot": series("m_a(n)", table.iter().copied()),
    });
    let mut report = Report::new("analyze")
        .param("input", args.input.display().to_string())
        .param("alpha", alpha.value())
        .param("horizon", horizon)
        .param("depth", depth);
    if let Some(spec) = &args.g {
        let g = parse_g(spec)?;
        let mut rows = Vec::new();
        let mut failures = 0;
        for &(n, m) in &table {
            let gt = g.gtilde(n as f64)?;
            let bound = if gt > 0.0 { 1.0 / gt } else { f64::INFINITY };
            let ok = m >= bound * (1.0 - COMPARISON_TOLERANCE);
            failures += usize::from(!ok);
            rows.push(json!({ "n": n, "m": m, "bound": bound, "ok": ok }));
        }
        result["coverage_bound"] = json!({ "rows": rows, "failures": failures });
        report = report.param("g", spec);
    }
    report.result = result;
    emit(&report, args.out.as_deref())
}

/// The symbolic family a file describes, if it is exactly one.
/// Evidence object plus a short description of it.
type Evidence = (Box<dyn ClassEvidence>, String);

fn symbolic_evidence(file: &SequenceFile, alpha: StolzAperture) -> Result<Option<Evidence>, CliError> {
    let rings: Option<Vec<u32>> = file
        .records
        .iter()
        .map(|r| match r {
            Record::Ring { n } => Some(*n),
            _ => None,
        })
        .collect();
    if let Some(levels) = rings.filter(|l| !l.is_empty()) {
        let seq = ring_counterexample(RingLevels::Explicit { levels }, alpha)?;
        return Ok(Some((Box::new(seq), "finite ring family".into())));
    }
    match file.records.as_slice() {
        [Record::Rings { levels }] => {
            let seq = ring_counterexample(levels.clone(), alpha)?;
            Ok(Some((Box::new(seq), "infinite ring family".into())))
        }
        [Record::Cantor { g, part, .. }] => {
            let family = CantorFamily {
                g: parse_g(g)?,
                alpha: alpha.value(),
                part: *part,
            };
            Ok(Some((Box::new(family), "Cantor-type family".into())))
        }
        _ => Ok(None),
    }
}

fn classify(alpha: Option<f64>, args: &ClassifyArgs) -> Result<String, CliError> {
    let file = SequenceFile::read(&args.input)?;
    let alpha = aperture(alpha, file.alpha)?;
    let (class, role) = match args.class {
        ClassArg::S => (SequenceClass::S, WeightRole::W),
        ClassArg::L => (SequenceClass::L, WeightRole::V),
        ClassArg::P => (SequenceClass::P, WeightRole::W),
    };
    let w = parse_weights(&args.weights, role)?;
    let depth = args.depth.unwrap_or(DEFAULT_EXPANSION_DEPTH);
    let (crit, evidence) = match symbolic_evidence(&file, alpha)? {
        Some((ev, kind)) => (class_membership(ev.as_ref(), &w, class, args.horizon)?, kind),
        None => {
            let pts = points_of(&file.expand(depth)?);
            let fs = FiniteSequence::new(&pts, alpha);
            (class_membership(&fs, &w, class, args.horizon)?, format!("{} explicit points", pts.len()))
        }
    };
    let summary = match crit.verdict {
        Verdict::Holds if crit.certificate.is_some() => "member (certified)",
        Verdict::Holds => "member at horizon",
        Verdict::Fails if crit.certificate.is_some() => "not member (certified)",
        Verdict::Fails => "not member at horizon",
        Verdict::UndeterminedAtHorizon => "undetermined at horizon",
    };
    let mut report = Report::new("classify")
        .param("input", args.input.display().to_string())
        .param("alpha", alpha.value())
        .param("weights", &args.weights)
        .param("class", format!("{class:?}"))
        .param("horizon", args.horizon);
    report.result = json!({ "evidence": evidence, "summary": summary, "report": crit });
    emit(&report, args.out.as_deref())
}

fn require<'a>(v: &'a Option<String>, flag: &str, why: &str) -> Result<&'a str, CliError> {
    v.as_deref()
        .ok_or_else(|| CliError::Input(format!("--{flag} is required {why}")))
}

fn criteria(args: &CriteriaArgs) -> Result<String, CliError> {
    let g = parse_g(&args.g)?;
    let mut report = Report::new("criteria")
        .param("g", &args.g)
        .param("mode", format!("{:?}", args.mode).to_lowercase())
        .param("horizon", args.horizon);
    report.result = match args.mode {
        Mode::B => json!({ "report": criterion_theorem_b(&g, args.horizon)? }),
        Mode::Sum => {
            let w = parse_weights(require(&args.weights, "weights", "for mode sum")?, WeightRole::W)?;
            report = report.param("weights", &args.weights);
            json!({ "report": criterion_sum(&g, &w, args.horizon)? })
        }
        Mode::Summatory => {
            let w = parse_weights(require(&args.weights, "weights", "for mode summatory")?, WeightRole::W)?;
            report = report.param("weights", &args.weights);
            json!({ "report": criterion_summatory_integral(&g, &w, args.horizon)? })
        }
        Mode::Limsup => {
            let v = parse_weights(require(&args.weights, "weights", "for mode limsup")?, WeightRole::V)?;
            report = report
                .param("weights", &args.weights)
                .param("E_budget", args.e_budget)
                .param("eta1", args.eta1);
            let main = match &args.e {
                Some(spec) => {
                    let e = parse_set(Some(spec))?;
                    let c = args.c.unwrap_or(1);
                    report = report.param("C", c).param("E", spec);
                    criterion_limsup(&g, &v, c, &e, args.horizon)?
                }
                None => {
                    let c_max = args.c.unwrap_or(4);
                    report = report.param("C", c_max);
                    search_limsup_violation(&g, &v, c_max, args.e_budget, args.horizon)?
                }
            };
            let stable = lstable_check(&v, args.eta1, args.horizon)?;
            let fast = limsup_corollary(&g, &v, args.eta1, args.horizon)?;
            let applies = stable.verdict == Verdict::Holds;
            json!({
                "report": main,
                "fast_path": {
                    "applies": applies,
                    "lstable": stable,
                    "corollary": fast,
                    "agrees": !applies || fast.verdict == main.verdict,
                },
            })
        }
    };
    emit(&report, args.out.as_deref())
}

fn witness_summary(run: &WitnessRun) -> Value {
    json!({
        "scale": run.witness.scale,
        "points": run.points.len(),
        "zeros": run.witness.zeros.len(),
        "check": minorant_summary(&run.report),
        "halved": minorant_summary(&run.halved),
        "level_constant": run.level_constant,
        "modulus_violations": run.modulus_violations.len(),
        "max_log_modulus": run.max_log_modulus,
    })
}

fn minorant_summary(r: &MinorantReport) -> Value {
    json!({
        "scale": r.scale,
        "checked": r.checked,
        "holds": r.holds(),
        "violation_count": r.violations.len(),
        "violations": r.violations.iter().take(LISTED_VIOLATIONS).collect::<Vec<_>>(),
        "min_margin": r.min_margin,
        "median_margin": r.median_margin,
        "deepest_violation": r.deepest_violation(),
        "by_level": r.by_level,
    })
}

fn point_record(point: DiskPoint, role: &str, target: Option<f64>) -> Record {
    Record::Point {
        point,
        role: Some(role.into()),
        target,
    }
}

fn out_dir(args: &ConstructArgs) -> Result<Option<&Path>, CliError> {
    match &args.out {
        Some(d) => {
            fs::create_dir_all(d).map_err(|e| CliError::Input(format!("{}: {e}", d.display())))?;
            Ok(Some(d.as_path()))
        }
        None => Ok(None),
    }
}

fn construct(alpha: Option<f64>, args: &ConstructArgs) -> Result<String, CliError> {
    let alpha = aperture(alpha, None)?;
    let report = Report::new("construct")
        .param("variant", format!("{:?}", args.variant))
        .param("alpha", alpha.value())
        .param("depth", args.depth);
    let (report, files) = match args.variant {
        Variant::Lemma61 => construct_cantor(alpha, args, report)?,
        Variant::NecessityThm2 => construct_necessity(alpha, args, report)?,
        Variant::Rings => construct_rings(alpha, args, report)?,
    };
    match out_dir(args)? {
        Some(dir) => {
            for (name, text) in &files {
                write_file(&dir.join(name), text)?;
            }
            write_file(&dir.join("report.json"), &report.render())?;
            Ok(String::new())
        }
        None => Ok(report.render()),
    }
}

type Files = Vec<(&'static str, String)>;

fn cantor_files(con: &Lemma61, alpha: StolzAperture, provenance: String) -> Files {
    let mut seq = SequenceFile {
        alpha: Some(alpha.value()),
        horizon: Some(con.depth()),
        provenance: vec![provenance],
        records: Vec::new(),
    };
    for (pt, t) in con.p_with_targets() {
        seq.records.push(point_record(pt, "p", Some(t)));
    }
    for pt in con.b_points() {
        seq.records.push(point_record(pt, "b", None));
    }
    let measure = MeasureFile {
        dyadic: Some(con.measure.clone()),
        atoms: Vec::new(),
    };
    vec![("sequence.txt", seq.render()), ("measure.txt", measure.render())]
}

fn construct_cantor(alpha: StolzAperture, args: &ConstructArgs, report: Report) -> Result<(Report, Files), CliError> {
    let spec = require(&args.g, "g", "for lemma61")?;
    let g = parse_g(spec)?;
    let con = construct_lemma61(&g, args.depth)?;
    let cov = con.coverage(alpha);
    let checks = con.check_with_coverage(&cov);
    let run = lemma61_witness(&con)?;
    let table: Vec<(usize, f64)> = (1..=con.depth()).map(|n| (n, cov.m(n))).collect();
    let mut report = report.param("g", spec);
    report.result = json!({
        "levels": con.selection.l,
        "arcs_per_level": con.selection.j.iter().map(Vec::len).collect::<Vec<_>>(),
        "split": con.split,
        "checks": checks,
        "violations": checks.violations(),
        "witness": witness_summary(&run),
        "coverage": table,
        "plot": series("m_{p∪b}(n)", table.iter().copied()),
        "notes": con.notes,
    });
    let files = cantor_files(&con, alpha, format!("construct lemma61 g={spec} depth={}", args.depth));
    Ok((report, files))
}

fn construct_necessity(alpha: StolzAperture, args: &ConstructArgs, report: Report) -> Result<(Report, Files), CliError> {
    let g_spec = require(&args.g, "g", "for necessity-thm2")?;
    let v_spec = require(&args.weights, "weights", "(the weight v) for necessity-thm2")?;
    let g = parse_g(g_spec)?;
    let v = parse_weights(v_spec, WeightRole::V)?;
    let e = parse_set(args.e.as_deref())?;
    let nec = construct_necessity_thm2(&v, &g, args.c, &e, args.depth, args.thickening)?;
    let checks = nec.check(&g, &v, alpha)?;
    let run = necessity_witness(&nec, &g)?;
    let horizon = args.depth.max(64);
    let stable = lstable_check(&v, 2.0, horizon)?;
    let fast = limsup_corollary(&g, &v, 2.0, horizon)?;
    let search = search_limsup_violation(&g, &v, args.c.max(1), 1.0, horizon)?;
    let mut report = report
        .param("g", g_spec)
        .param("weights", v_spec)
        .param("C", args.c)
        .param("E", e.iter().collect::<Vec<_>>())
        .param("thickening", args.thickening);
    report.result = json!({
        "A": nec.a_sup,
        "g1": nec.g1,
        "E1": nec.e1,
        "radius": nec.radius,
        "q_tilde": nec.q_tilde.len(),
        "blaschke_part": nec.blaschke_part.len(),
        "checks": checks,
        "violations": checks.violations(),
        "witness": witness_summary(&run),
        "lstable": stable,
        "fast_path": fast,
        "search": search,
        "fast_path_agrees": fast.verdict == search.verdict,
        "notes": nec.notes,
    });
    let provenance = format!("construct necessity-thm2 g={g_spec} v={v_spec} C={} depth={}", args.c, args.depth);
    let (points, targets): (Vec<DiskPoint>, Vec<f64>) = nec.q_tilde_targets(&g)?.into_iter().unzip();
    let q_records: Vec<Record> = points
        .iter()
        .zip(&targets)
        .map(|(&p, &t)| point_record(p, "q", Some(t)))
        .collect();
    let ab_records: Vec<Record> = nec
        .blaschke_part
        .iter()
        .map(|t| {
            let role = if nec.e1.contains(&(t.parent_level as usize)) { "a" } else { "b" };
            point_record(t.point, role, None)
        })
        .collect();
    let file = |records: Vec<Record>| {
        SequenceFile {
            alpha: Some(alpha.value()),
            horizon: Some(args.depth),
            provenance: vec![provenance.clone()],
            records,
        }
        .render()
    };
    let measure = MeasureFile {
        dyadic: Some(nec.base.measure.clone()),
        atoms: Vec::new(),
    };
    let files = vec![
        ("sequence.txt", file(q_records.iter().chain(&ab_records).cloned().collect())),
        ("q_tilde.txt", file(q_records)),
        ("blaschke_part.txt", file(ab_records)),
        ("measure.txt", measure.render()),
    ];
    Ok((report, files))
}

fn parse_ring_levels(spec: &str) -> Result<RingLevels, CliError> {
    let (kind, params) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Input(format!("ring levels `{spec}`: expected kind:params")))?;
    let nums = params
        .split(',')
        .map(|w| w.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Input(format!("ring levels `{spec}`: {e}")))?;
    match (kind, nums.as_slice()) {
        ("geometric", &[start, ratio]) => Ok(RingLevels::Geometric { start, ratio }),
        ("arithmetic", &[start, step]) => Ok(RingLevels::Arithmetic { start, step }),
        ("explicit", _) => Ok(RingLevels::Explicit { levels: nums }),
        _ => Err(CliError::Input(format!(
            "ring levels `{spec}`: use geometric:start,ratio, arithmetic:start,step or explicit:n0,n1,..."
        ))),
    }
}

fn construct_rings(alpha: StolzAperture, args: &ConstructArgs, report: Report) -> Result<(Report, Files), CliError> {
    let spec = args.levels.as_deref().unwrap_or("geometric:1,2");
    let seq = ring_counterexample(parse_ring_levels(spec)?, alpha)?;
    let per = seq.per_ring_coverage();
    let shown = args.rings.min(per.len());
    let min_phi: Vec<(usize, u64)> = (1..=shown).map(|k| (k, seq.min_phi(k))).collect();
    let mut report = report.param("levels", spec).param("rings", shown);
    let mut result = json!({
        "rings": seq.rings().into_iter().take(shown).collect::<Vec<_>>(),
        "per_ring_coverage": &per[..shown],
        "min_phi": min_phi,
        "blaschke_partial_sums": (1..=shown).map(|k| (k, seq.blaschke_partial_sum(k))).collect::<Vec<_>>(),
        "finite": seq.is_finite(),
    });
    if let Some(w_spec) = &args.weights {
        let w = parse_weights(w_spec, WeightRole::W)?;
        let horizon = args.depth.max(64);
        result["membership"] = json!({
            "P": class_membership(&seq, &w, SequenceClass::P, horizon)?,
            "S": class_membership(&seq, &w, SequenceClass::S, horizon)?,
        });
        report = report.param("weights", w_spec);
    }
    report.result = result;
    let records = match &seq.levels {
        RingLevels::Explicit { levels } => levels.iter().map(|&n| Record::Ring { n }).collect(),
        other => vec![Record::Rings { levels: other.clone() }],
    };
    let file = SequenceFile {
        alpha: Some(alpha.value()),
        horizon: None,
        provenance: vec![format!("construct rings levels={spec}")],
        records,
    };
    Ok((report, vec![("sequence.txt", file.render())]))
}

fn verify(alpha: Option<f64>, args: &VerifyArgs) -> Result<String, CliError> {
    let file = SequenceFile::read(&args.sequence)?;
    let alpha = aperture(alpha, file.alpha)?;
    let measure = MeasureFile::read(&args.measure)?.to_measure()?;
    let g = args.g.as_deref().map(parse_g).transpose()?;
    let expanded = file.expand(args.depth.unwrap_or(DEFAULT_EXPANSION_DEPTH))?;
    let zeros: Vec<DiskPoint> = expanded.iter().filter(|p| p.is_zero()).map(|p| p.point).collect();
    let mut points = Vec::new();
    let mut targets = Vec::new();
    for p in expanded.iter().filter(|p| !p.is_zero()) {
        let t = match (p.target, &g) {
            (Some(t), _) => t,
            (None, Some(g)) => g.gtilde((-p.point.boundary_distance().log2()).max(0.0))?,
            (None, None) => {
                return Err(CliError::Input(
                    "points without a target need --g to define one".into(),
                ))
            }
        };
        points.push(p.point);
        targets.push(t);
    }
    let h0: Vec<f64> = points.iter().map(|z| poisson_integral(&measure, z)).collect();
    let mut scale = match args.c.as_str() {
        "calibrate" => calibrate_scale(&h0, &targets)?,
        other => other
            .parse::<f64>()
            .ok()
            .filter(|c| c.is_finite() && *c > 0.0)
            .ok_or_else(|| CliError::Input(format!("--C must be `calibrate` or a positive number, got `{other}`")))?,
    };
    if args.halve {
        scale /= 2.0;
    }
    let witness = HarmonicWitness::new(scale, measure, zeros.clone())?;
    let check = essmin::potential::verify_minorant_witness(&points, &targets, &witness)?;
    let mut modulus_violations = 0;
    let mut max_modulus: f64 = 0.0;
    for (z, t) in points.iter().zip(&targets) {
        let f = bounded_function(&witness, z).norm();
        max_modulus = max_modulus.max(f);
        if witness.log_modulus(z) > -t {
            modulus_violations += 1;
        }
    }
    let nonvanishing_zeros = zeros.iter().filter(|z| bounded_function(&witness, z).norm() != 0.0).count();
    let mut report = Report::new("verify")
        .param("sequence", args.sequence.display().to_string())
        .param("measure", args.measure.display().to_string())
        .param("C", &args.c)
        .param("halve", args.halve)
        .param("alpha", alpha.value());
    if let Some(spec) = &args.g {
        report = report.param("g", spec);
    }
    let mut result = json!({
        "check": minorant_summary(&check),
        "holds": check.holds() && modulus_violations == 0 && nonvanishing_zeros == 0,
        "modulus": {
            "violations": modulus_violations,
            "max_modulus": max_modulus,
            "zeros": zeros.len(),
            "nonvanishing_zeros": nonvanishing_zeros,
        },
    });
    if args.pipeline {
        let g = g.as_ref().ok_or_else(|| CliError::Input("--pipeline needs --g".into()))?;
        let dom = domination_check(&points, &targets, alpha, |k| g.gtilde(k as f64).unwrap_or(f64::INFINITY))?;
        let cov = coverage_distribution(&points, alpha);
        result["pipeline"] = json!({
            "report": dom,
            "holds": dom.holds(),
            "coverage": cov.entries(),
        });
    }
    report.result = result;
    emit(&report, args.out.as_deref())
}
