//! Line-oriented text formats for sequences and measures.
//!
//! A sequence file starts with `# essmin sequence v1`, then holds metadata
//! lines (`alpha 3`, `horizon 40`, `provenance ...`) and records:
//!
//! ```text
//! point rho=0.75 phi=0.39269908169872414 role=p target=1.3862943611198906
//! ring n=3
//! rings kind=geometric start=1 ratio=2
//! cantor g=power:1 depth=10 part=all
//! ```
//!
//! A measure file starts with `# essmin measure v1`:
//!
//! ```text
//! depth 4
//! levels 0 1 1 2 2
//! run start=0 end=1
//! atom angle=0 mass=0.5
//! ```
//!
//! Floats are written in Rust's shortest round-trip form, so a file read back
//! reproduces every value bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use essmin::classes::{DecreaseFunction, WeightRole, WeightSequence};
use essmin::construction::{construct_lemma61, CantorPart, DyadicMeasure, RingLevels, RingSequence};
use essmin::potential::CircleMeasure;
use essmin::DiskPoint;

use crate::CliError;

pub const SEQUENCE_HEADER: &str = "# essmin sequence v1";
pub const MEASURE_HEADER: &str = "# essmin measure v1";

/// Deepest ring or Cantor level expanded into explicit points by default.
pub const DEFAULT_EXPANSION_DEPTH: u32 = 16;

#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    Point {
        point: DiskPoint,
        role: Option<String>,
        target: Option<f64>,
    },
    Ring {
        n: u32,
    },
    Rings {
        levels: RingLevels,
    },
    Cantor {
        g: String,
        depth: Option<usize>,
        part: CantorPart,
    },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SequenceFile {
    pub alpha: Option<f64>,
    pub horizon: Option<usize>,
    pub provenance: Vec<String>,
    pub records: Vec<Record>,
}

fn input_error(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("line {line}: {msg}"))
}

/// `key=value` fields after the record keyword.
fn fields(line: usize, words: &[&str]) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for w in words {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| input_error(line, format!("expected key=value, got `{w}`")))?;
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(input_error(line, format!("field `{k}` given twice")));
        }
    }
    Ok(out)
}

fn take<T: FromStr>(line: usize, f: &mut BTreeMap<String, String>, key: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    let raw = f
        .remove(key)
        .ok_or_else(|| input_error(line, format!("missing field `{key}`")))?;
    raw.parse()
        .map_err(|e| input_error(line, format!("field `{key}` = `{raw}`: {e}")))
}

fn take_opt<T: FromStr>(line: usize, f: &mut BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    if f.contains_key(key) {
        take(line, f, key).map(Some)
    } else {
        Ok(None)
    }
}

fn no_extra(line: usize, f: BTreeMap<String, String>) -> Result<(), CliError> {
    match f.keys().next() {
        Some(k) => Err(input_error(line, format!("unknown field `{k}`"))),
        None => Ok(()),
    }
}

fn check_header(text: &str, header: &str) -> Result<(), CliError> {
    match text.lines().next() {
        Some(first) if first.trim_end() == header => Ok(()),
        _ => Err(CliError::Input(format!("line 1: expected header `{header}`"))),
    }
}

/// Non-empty, non-comment lines after the header, with 1-based numbers.
fn body(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.split_whitespace().collect()))
}

fn parse_part(line: usize, s: &str) -> Result<CantorPart, CliError> {
    match s {
        "all" => Ok(CantorPart::All),
        "p" => Ok(CantorPart::P),
        other => Err(input_error(line, format!("unknown Cantor part `{other}` (all, p)"))),
    }
}

fn part_name(p: CantorPart) -> &'static str {
    match p {
        CantorPart::All => "all",
        CantorPart::P => "p",
    }
}

impl SequenceFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        check_header(text, SEQUENCE_HEADER)?;
        let mut out = SequenceFile::default();
        for (line, words) in body(text) {
            let rest = &words[1..];
            match words[0] {
                "alpha" | "horizon" if rest.len() != 1 => {
                    return Err(input_error(line, format!("`{}` takes one value", words[0])))
                }
                "alpha" => {
                    out.alpha = Some(rest[0].parse().map_err(|e| input_error(line, format!("alpha: {e}")))?);
                }
                "horizon" => {
                    out.horizon = Some(rest[0].parse().map_err(|e| input_error(line, format!("horizon: {e}")))?);
                }
                "provenance" => out.provenance.push(rest.join(" ")),
                "point" => {
                    let mut f = fields(line, rest)?;
                    let rho: f64 = take(line, &mut f, "rho")?;
                    let phi: f64 = take(line, &mut f, "phi")?;
                    let role = f.remove("role");
                    let target = take_opt(line, &mut f, "target")?;
                    no_extra(line, f)?;
                    let point = DiskPoint::new(rho, phi).map_err(|e| input_error(line, e))?;
                    out.records.push(Record::Point { point, role, target });
                }
                "ring" => {
                    let mut f = fields(line, rest)?;
                    let n = take(line, &mut f, "n")?;
                    no_extra(line, f)?;
                    out.records.push(Record::Ring { n });
                }
                "rings" => {
                    let mut f = fields(line, rest)?;
                    let kind: String = take(line, &mut f, "kind")?;
                    let start = take(line, &mut f, "start")?;
                    let levels = match kind.as_str() {
                        "arithmetic" => RingLevels::Arithmetic {
                            start,
                            step: take(line, &mut f, "step")?,
                        },
                        "geometric" => RingLevels::Geometric {
                            start,
                            ratio: take(line, &mut f, "ratio")?,
                        },
                        other => return Err(input_error(line, format!("unknown ring family `{other}`"))),
                    };
                    no_extra(line, f)?;
                    out.records.push(Record::Rings { levels });
                }
                "cantor" => {
                    let mut f = fields(line, rest)?;
                    let g: String = take(line, &mut f, "g")?;
                    g.parse::<DecreaseFunction>().map_err(|e| input_error(line, e))?;
                    let depth = take_opt(line, &mut f, "depth")?;
                    let part = match f.remove("part") {
                        Some(p) => parse_part(line, &p)?,
                        None => CantorPart::All,
                    };
                    no_extra(line, f)?;
                    out.records.push(Record::Cantor { g, depth, part });
                }
                other => return Err(input_error(line, format!("unknown record `{other}`"))),
            }
        }
        Ok(out)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        Self::parse(&read_text(path)?).map_err(|e| e.in_file(path))
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{SEQUENCE_HEADER}").unwrap();
        if let Some(a) = self.alpha {
            writeln!(s, "alpha {a}").unwrap();
        }
        if let Some(h) = self.horizon {
            writeln!(s, "horizon {h}").unwrap();
        }
        for p in &self.provenance {
            writeln!(s, "provenance {p}").unwrap();
        }
        for r in &self.records {
            match r {
                Record::Point { point, role, target } => {
                    write!(s, "point rho={} phi={}", point.rho(), point.phi()).unwrap();
                    if let Some(role) = role {
                        write!(s, " role={role}").unwrap();
                    }
                    if let Some(t) = target {
                        write!(s, " target={t}").unwrap();
                    }
                    s.push('\n');
                }
                Record::Ring { n } => writeln!(s, "ring n={n}").unwrap(),
                Record::Rings { levels } => match levels {
                    RingLevels::Arithmetic { start, step } => {
                        writeln!(s, "rings kind=arithmetic start={start} step={step}").unwrap()
                    }
                    RingLevels::Geometric { start, ratio } => {
                        writeln!(s, "rings kind=geometric start={start} ratio={ratio}").unwrap()
                    }
                    RingLevels::Explicit { levels } => {
                        for n in levels {
                            writeln!(s, "ring n={n}").unwrap();
                        }
                    }
                },
                Record::Cantor { g, depth, part } => {
                    write!(s, "cantor g={g}").unwrap();
                    if let Some(d) = depth {
                        write!(s, " depth={d}").unwrap();
                    }
                    writeln!(s, " part={}", part_name(*part)).unwrap();
                }
            }
        }
        s
    }

    /// Explicit points of every record, in file order. Symbolic records
    /// expand up to `max_level`.
    pub fn expand(&self, max_level: u32) -> Result<Vec<ExpandedPoint>, CliError> {
        let mut out = Vec::new();
        for r in &self.records {
            match r {
                Record::Point { point, role, target } => out.push(ExpandedPoint {
                    point: *point,
                    role: role.clone(),
                    target: *target,
                }),
                Record::Ring { n } => push_ring(&mut out, *n, max_level)?,
                Record::Rings { levels } => {
                    let family = RingSequence {
                        levels: levels.clone(),
                        alpha: essmin::geometry::DEFAULT_ALPHA,
                    };
                    for n in family.rings().into_iter().take_while(|&n| n <= max_level) {
                        push_ring(&mut out, n, max_level)?;
                    }
                }
                Record::Cantor { g, depth, part } => {
                    let g: DecreaseFunction = g.parse().map_err(CliError::from)?;
                    let depth = depth.unwrap_or(max_level as usize);
                    let con = construct_lemma61(&g, depth)?;
                    let role_of = |p: bool| Some(if p { "p" } else { "b" }.to_string());
                    for (pt, target) in con.p_with_targets() {
                        out.push(ExpandedPoint {
                            point: pt,
                            role: role_of(true),
                            target: Some(target),
                        });
                    }
                    if *part == CantorPart::All {
                        out.extend(con.b_points().into_iter().map(|pt| ExpandedPoint {
                            point: pt,
                            role: role_of(false),
                            target: None,
                        }));
                    }
                }
            }
        }
        Ok(out)
    }
}

fn push_ring(out: &mut Vec<ExpandedPoint>, n: u32, max_level: u32) -> Result<(), CliError> {
    if n > max_level {
        return Err(CliError::Input(format!(
            "ring n={n} is deeper than the expansion depth {max_level}"
        )));
    }
    out.extend(RingSequence::ring_points(n)?.into_iter().map(|point| ExpandedPoint {
        point,
        role: None,
        target: None,
    }));
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedPoint {
    pub point: DiskPoint,
    pub role: Option<String>,
    pub target: Option<f64>,
}

impl ExpandedPoint {
    /// Zeros of the Blaschke factor carry role `a` or `b`.
    pub fn is_zero(&self) -> bool {
        matches!(self.role.as_deref(), Some("a" | "b"))
    }
}

/// A measure file: optional dyadic part and atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureFile {
    pub dyadic: Option<DyadicMeasure>,
    pub atoms: Vec<(f64, f64)>,
}

impl MeasureFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        check_header(text, MEASURE_HEADER)?;
        let mut depth: Option<u32> = None;
        let mut levels: Option<Vec<u32>> = None;
        let mut support = Vec::new();
        let mut atoms = Vec::new();
        for (line, words) in body(text) {
            let rest = &words[1..];
            match words[0] {
                "depth" => {
                    let d = rest
                        .first()
                        .ok_or_else(|| input_error(line, "depth needs a value"))?
                        .parse()
                        .map_err(|e| input_error(line, format!("depth: {e}")))?;
                    depth = Some(d);
                }
                "levels" => {
                    let l = rest
                        .iter()
                        .map(|w| w.parse::<u32>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| input_error(line, format!("levels: {e}")))?;
                    levels = Some(l);
                }
                "run" => {
                    let mut f = fields(line, rest)?;
                    let start: u64 = take(line, &mut f, "start")?;
                    let end: u64 = take(line, &mut f, "end")?;
                    no_extra(line, f)?;
                    if end < start {
                        return Err(input_error(line, "run end before start"));
                    }
                    support.extend(start..=end);
                }
                "atom" => {
                    let mut f = fields(line, rest)?;
                    let angle: f64 = take(line, &mut f, "angle")?;
                    let mass: f64 = take(line, &mut f, "mass")?;
                    no_extra(line, f)?;
                    atoms.push((angle, mass));
                }
                other => return Err(input_error(line, format!("unknown record `{other}`"))),
            }
        }
        let dyadic = match (depth, levels) {
            (Some(d), Some(l)) => Some(DyadicMeasure::new(d, l, support)?),
            (None, None) if support.is_empty() => None,
            _ => return Err(CliError::Input("a dyadic part needs both `depth` and `levels`".into())),
        };
        Ok(MeasureFile { dyadic, atoms })
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        Self::parse(&read_text(path)?).map_err(|e| e.in_file(path))
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{MEASURE_HEADER}").unwrap();
        if let Some(d) = &self.dyadic {
            writeln!(s, "depth {}", d.depth).unwrap();
            let levels: Vec<String> = d.levels.iter().map(u32::to_string).collect();
            writeln!(s, "levels {}", levels.join(" ")).unwrap();
            let mut i = 0;
            while i < d.support.len() {
                let start = d.support[i];
                let mut end = start;
                while i + 1 < d.support.len() && d.support[i + 1] == end + 1 {
                    end += 1;
                    i += 1;
                }
                writeln!(s, "run start={start} end={end}").unwrap();
                i += 1;
            }
        }
        for (t, m) in &self.atoms {
            writeln!(s, "atom angle={t} mass={m}").unwrap();
        }
        s
    }

    pub fn to_measure(&self) -> Result<CircleMeasure, CliError> {
        Ok(CircleMeasure::new(self.dyadic.clone(), self.atoms.clone())?)
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// A table of numbers, whitespace separated, `#` comments allowed.
fn read_table(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for w in line.split_whitespace() {
            out.push(
                w.parse()
                    .map_err(|e| CliError::Input(format!("{}: line {}: `{w}`: {e}", path.display(), i + 1)))?,
            );
        }
    }
    Ok(out)
}

/// `family:params`, or `@file` for a table of `g̃(0), g̃(1), …`.
pub fn parse_g(spec: &str) -> Result<DecreaseFunction, CliError> {
    match spec.strip_prefix('@') {
        Some(path) => Ok(DecreaseFunction::table(read_table(Path::new(path))?)?),
        None => spec.parse().map_err(CliError::from),
    }
}

/// `family:params`, or `@file` for a table of `w_0, w_1, …`.
pub fn parse_weights(spec: &str, role: WeightRole) -> Result<WeightSequence, CliError> {
    match spec.strip_prefix('@') {
        Some(path) => Ok(WeightSequence::table(read_table(Path::new(path))?, role)?),
        None => Ok(spec.parse::<WeightSequence>()?.with_role(role)),
    }
}
