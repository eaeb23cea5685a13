//! Line-oriented `key = value` run configuration with `[section]` blocks.
//! The grammar is written out in `docs/config.ebnf`.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::load::{BvLoad, JumpValue, Segment};
use crate::model::{Dissipation, Nonlinearity, SemilinearEnergy, SpdOperator, System};
use crate::scenarios::{Oracle, Scenario};
use crate::viscosity::{CertifyOptions, MeshRule, SweepOptions, DEFAULT_SUB_NODES};

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSource {
    Scenario(String),
    Inline(Box<InlineProblem>),
}

/// A problem spelled out in the `[problem]` and `[load]` sections.
#[derive(Debug, Clone, PartialEq)]
pub struct InlineProblem {
    pub a: SpdOperator,
    pub v: SpdOperator,
    pub weights: Vec<f64>,
    pub nonlinearity: Nonlinearity,
    pub z0: Vec<f64>,
    pub load: BvLoad,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub tol_inner: f64,
    pub tol_norm: f64,
    /// Bound on the complementarity L² norm; infinite means report only.
    pub tol_comp: f64,
    pub tol_lambda: f64,
    pub delta_g_floor: f64,
    pub delta_g_scale: f64,
    pub delta_g_exponent: f64,
    pub sub_nodes: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        let c = CertifyOptions::default();
        Self {
            tol_inner: 1e-6,
            tol_norm: 1e-6,
            tol_comp: f64::INFINITY,
            tol_lambda: 1e-6,
            delta_g_floor: c.delta_g_floor,
            delta_g_scale: c.delta_g_scale,
            delta_g_exponent: c.delta_g_exponent,
            sub_nodes: DEFAULT_SUB_NODES,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSource,
    /// Viscosity ladder; the scenario default when absent.
    pub eps: Option<Vec<f64>>,
    /// `Δ <= c ε^p`; the scenario default when absent.
    pub mesh: Option<MeshRule>,
    /// Uniform partition with this many steps at every viscosity.
    pub steps: Option<usize>,
    pub tolerances: Tolerances,
    pub out: PathBuf,
    pub seed: u64,
    /// Source line of each field, for validation messages (0 = command line).
    lines: FieldLines,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct FieldLines {
    eps: usize,
    steps: usize,
}

/// A resolved problem: system, initial state, default ladder and oracle.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub system: System,
    pub z0: Vec<f64>,
    pub oracle: Option<Oracle>,
    pub default_ladder: Vec<f64>,
    pub default_mesh: MeshRule,
}

impl RunConfig {
    pub fn for_scenario(name: &str) -> Self {
        Self {
            problem: ProblemSource::Scenario(name.into()),
            eps: None,
            mesh: None,
            steps: None,
            tolerances: Tolerances::default(),
            out: PathBuf::from("out"),
            seed: 0,
            lines: FieldLines::default(),
        }
    }

    pub fn set_eps(&mut self, eps: Vec<f64>) {
        self.eps = Some(eps);
        self.lines.eps = 0;
    }

    pub fn set_steps(&mut self, steps: usize) {
        self.steps = Some(steps);
        self.lines.steps = 0;
    }

    pub fn problem(&self) -> Result<Problem> {
        match &self.problem {
            ProblemSource::Scenario(name) => {
                let s = Scenario::by_name(name)?;
                Ok(Problem {
                    name: s.name,
                    system: s.system,
                    z0: s.z0,
                    oracle: s.oracle,
                    default_ladder: s.eps_ladder,
                    default_mesh: s.mesh,
                })
            }
            ProblemSource::Inline(p) => {
                let e = SemilinearEnergy::new(p.a.clone(), p.nonlinearity, p.load.clone())?;
                let system =
                    System::new(e, Dissipation::weighted_l1(p.weights.clone())?, p.v.clone())?;
                if p.z0.len() != system.dim() {
                    return Err(Error::Config {
                        line: 0,
                        message: format!(
                            "z0 has {} entries for dimension {}",
                            p.z0.len(),
                            system.dim()
                        ),
                    });
                }
                Ok(Problem {
                    name: "inline".into(),
                    system,
                    z0: p.z0.clone(),
                    oracle: None,
                    default_ladder: crate::scenarios::DEFAULT_LADDER.to_vec(),
                    default_mesh: MeshRule::linear(0.5),
                })
            }
        }
    }

    /// Checks the ladder and partition rule against `problem` and assembles sweep options.
    pub fn sweep_options(&self, problem: &Problem) -> Result<SweepOptions> {
        let eps = self
            .eps
            .clone()
            .unwrap_or_else(|| problem.default_ladder.clone());
        let bad = |line: usize, message: String| Error::Config { line, message };
        if eps.is_empty() {
            return Err(bad(self.lines.eps, "eps: empty viscosity ladder".into()));
        }
        if let Some(e) = eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(bad(
                self.lines.eps,
                format!("eps: viscosity {e} is not positive"),
            ));
        }
        if eps.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(bad(
                self.lines.eps,
                "eps: ladder must be strictly decreasing".into(),
            ));
        }
        let mesh = self.mesh.unwrap_or(problem.default_mesh);
        if !(mesh.c > 0.0) || !(mesh.power >= 1.0) {
            return Err(bad(
                0,
                format!(
                    "mesh: need c > 0 and power >= 1, got c={} power={}",
                    mesh.c, mesh.power
                ),
            ));
        }
        if let Some(n) = self.steps {
            let load = problem.system.load();
            let tau = (load.horizon() - load.start()) / n.max(1) as f64;
            if n == 0 {
                return Err(bad(self.lines.steps, "steps: must be positive".into()));
            }
            if let Some(e) = eps
                .iter()
                .find(|e| tau > mesh.max_step(**e) * (1.0 + 1e-12))
            {
                return Err(bad(
                    self.lines.steps,
                    format!(
                        "steps: uniform step {tau} exceeds the mesh rule bound {} at eps {e}",
                        mesh.max_step(*e)
                    ),
                ));
            }
        }
        let t = &self.tolerances;
        let mut opts = SweepOptions {
            eps_ladder: eps,
            mesh,
            steps: self.steps,
            sub_nodes: t.sub_nodes,
            tol_inner: t.tol_inner,
            ..SweepOptions::default()
        };
        opts.certify.delta_g_floor = t.delta_g_floor;
        opts.certify.delta_g_scale = t.delta_g_scale;
        opts.certify.delta_g_exponent = t.delta_g_exponent;
        opts.solve.step.seed = self.seed;
        Ok(opts)
    }
}

struct Line<'a> {
    no: usize,
    value: &'a str,
}

fn err(no: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line: no,
        message: message.into(),
    }
}

fn number(no: usize, s: &str) -> Result<f64> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| err(no, format!("expected a number, got '{}'", s.trim())))?;
    if !x.is_finite() {
        return Err(err(no, format!("non-finite number '{}'", s.trim())));
    }
    Ok(x)
}

fn list(no: usize, s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|x| number(no, x)).collect()
}

/// `c=0.5` or `c=2.5,power=2` (spaces allowed).
pub fn parse_mesh(no: usize, s: &str) -> Result<MeshRule> {
    let mut rule = MeshRule::linear(f64::NAN);
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    for part in compact.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| err(no, format!("mesh: expected key=value, got '{part}'")))?;
        match k.trim() {
            "c" => rule.c = number(no, v)?,
            "power" | "p" => rule.power = number(no, v)?,
            other => return Err(err(no, format!("mesh: unknown parameter '{other}'"))),
        }
    }
    if rule.c.is_nan() {
        return Err(err(no, "mesh: missing c"));
    }
    Ok(rule)
}

pub fn parse_eps(no: usize, s: &str) -> Result<Vec<f64>> {
    list(no, s)
}

fn operator(no: usize, s: &str, dim: usize) -> Result<SpdOperator> {
    let s = s.trim();
    let (head, rest) = s.split_once(char::is_whitespace).unwrap_or((s, ""));
    let wrap = |r: Result<SpdOperator>| r.map_err(|e| err(no, e.to_string()));
    match head {
        "identity" => Ok(SpdOperator::identity(dim)),
        "scalar" => wrap(SpdOperator::scalar(dim, number(no, rest)?)),
        "diag" => {
            let d = list(no, rest)?;
            if d.len() != dim {
                return Err(err(
                    no,
                    format!("diag: {} entries for dimension {dim}", d.len()),
                ));
            }
            wrap(SpdOperator::diagonal(&d))
        }
        "laplacian" => {
            let p: Vec<f64> = list(no, rest)?;
            if p.len() != 2 {
                return Err(err(no, "laplacian: expected 'laplacian stiffness, shift'"));
            }
            wrap(SpdOperator::laplacian_plus_shift(dim, p[0], p[1]))
        }
        "matrix" => wrap(SpdOperator::new(dim, list(no, rest)?)),
        _ => Err(err(no, format!("unknown operator '{head}'"))),
    }
}

fn nonlinearity(no: usize, s: &str) -> Result<Nonlinearity> {
    let s = s.trim();
    let (head, rest) = s.split_once(char::is_whitespace).unwrap_or((s, ""));
    match head {
        "none" => Ok(Nonlinearity::None),
        "double-well" => Ok(Nonlinearity::DoubleWell {
            scale: if rest.trim().is_empty() {
                1.0
            } else {
                number(no, rest)?
            },
        }),
        "quartic" => Ok(Nonlinearity::QuarticNorm {
            scale: number(no, rest)?,
        }),
        _ => Err(err(no, format!("unknown nonlinearity '{head}'"))),
    }
}

fn segment(no: usize, s: &str) -> Result<Segment> {
    let s = s.trim();
    let (head, rest) = s.split_once(char::is_whitespace).unwrap_or((s, ""));
    match head {
        "constant" => Ok(Segment::Constant {
            value: list(no, rest)?,
        }),
        "affine" => {
            let (a, b) = rest
                .split_once(';')
                .ok_or_else(|| err(no, "affine segment: expected 'affine start ; slope'"))?;
            Ok(Segment::Affine {
                start: list(no, a)?,
                slope: list(no, b)?,
            })
        }
        _ => Err(err(no, format!("unknown segment kind '{head}'"))),
    }
}

fn jump(no: usize, s: &str) -> Result<JumpValue> {
    let s = s.trim();
    let (head, rest) = s.split_once(char::is_whitespace).unwrap_or((s, ""));
    match head {
        "left" => Ok(JumpValue::Left),
        "right" => Ok(JumpValue::Right),
        "value" => Ok(JumpValue::Explicit {
            value: list(no, rest)?,
        }),
        _ => Err(err(no, format!("unknown jump designation '{head}'"))),
    }
}

#[derive(Default)]
struct InlineParts<'a> {
    dim: Option<usize>,
    a: Option<Line<'a>>,
    v: Option<Line<'a>>,
    r: Option<Line<'a>>,
    f: Option<Line<'a>>,
    z0: Option<Line<'a>>,
    breakpoints: Option<Line<'a>>,
    segments: Vec<Line<'a>>,
    jumps: Vec<Line<'a>>,
    first_line: usize,
}

impl<'a> InlineParts<'a> {
    fn build(self) -> Result<InlineProblem> {
        let dim = self
            .dim
            .ok_or_else(|| err(self.first_line, "[problem] needs 'dim'"))?;
        let need = |l: &Option<Line<'a>>, key: &str| {
            l.as_ref()
                .map(|l| (l.no, l.value))
                .ok_or_else(|| err(self.first_line, format!("missing '{key}'")))
        };
        let (no, a) = need(&self.a, "a")?;
        let a = operator(no, a, dim)?;
        let v = match &self.v {
            Some(l) => operator(l.no, l.value, dim)?,
            None => SpdOperator::identity(dim),
        };
        let (no, r) = need(&self.r, "r")?;
        let mut weights = list(no, r)?;
        if weights.len() == 1 {
            weights = vec![weights[0]; dim];
        }
        if weights.len() != dim {
            return Err(err(
                no,
                format!("r: {} weights for dimension {dim}", weights.len()),
            ));
        }
        let nonlinearity = match &self.f {
            Some(l) => nonlinearity(l.no, l.value)?,
            None => Nonlinearity::None,
        };
        let z0 = match &self.z0 {
            Some(l) => {
                let z = list(l.no, l.value)?;
                if z.len() != dim {
                    return Err(err(
                        l.no,
                        format!("z0: {} entries for dimension {dim}", z.len()),
                    ));
                }
                z
            }
            None => vec![0.0; dim],
        };
        let (bno, bps) = need(&self.breakpoints, "breakpoints")?;
        let bps = list(bno, bps)?;
        let segments: Vec<Segment> = self
            .segments
            .iter()
            .map(|l| segment(l.no, l.value))
            .collect::<Result<_>>()?;
        for (l, s) in self.segments.iter().zip(&segments) {
            if s.dim() != dim {
                return Err(err(
                    l.no,
                    format!(
                        "segment of dimension {} in a problem of dimension {dim}",
                        s.dim()
                    ),
                ));
            }
        }
        let mut jumps: Vec<JumpValue> = self
            .jumps
            .iter()
            .map(|l| jump(l.no, l.value))
            .collect::<Result<_>>()?;
        if jumps.is_empty() && segments.len() > 1 {
            jumps = vec![JumpValue::Right; segments.len() - 1];
        }
        let load = BvLoad::new(bps, segments, jumps).map_err(|e| err(bno, e.to_string()))?;
        Ok(InlineProblem {
            a,
            v,
            weights,
            nonlinearity,
            z0,
            load,
        })
    }
}

/// Parses a configuration file's contents.
pub fn parse(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::for_scenario("");
    let mut scenario: Option<String> = None;
    let mut inline = InlineParts::default();
    let mut in_inline = false;
    let mut section = String::from("run");
    let mut seen: Vec<(String, String)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(no, "unterminated section header"))?
                .trim();
            match name {
                "run" | "tolerances" | "problem" | "load" => section = name.into(),
                _ => return Err(err(no, format!("unknown section [{name}]"))),
            }
            if (name == "problem" || name == "load") && !in_inline {
                in_inline = true;
                inline.first_line = no;
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(no, format!("expected 'key = value', got '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(err(no, format!("{key}: empty value")));
        }
        let repeatable = section == "load" && (key == "segment" || key == "jump");
        if !repeatable {
            let id = (section.clone(), key.to_string());
            if seen.contains(&id) {
                return Err(err(no, format!("duplicate key '{key}' in [{section}]")));
            }
            seen.push(id);
        }
        let l = Line { no, value };
        match (section.as_str(), key) {
            ("run", "scenario") => scenario = Some(value.into()),
            ("run", "eps") => {
                cfg.eps = Some(parse_eps(no, value)?);
                cfg.lines.eps = no;
            }
            ("run", "mesh") => cfg.mesh = Some(parse_mesh(no, value)?),
            ("run", "steps") => {
                cfg.steps = Some(
                    value
                        .parse()
                        .map_err(|_| err(no, format!("steps: expected a count, got '{value}'")))?,
                );
                cfg.lines.steps = no;
            }
            ("run", "out") => cfg.out = PathBuf::from(value),
            ("run", "seed") => {
                cfg.seed = value.parse().map_err(|_| {
                    err(
                        no,
                        format!("seed: expected an unsigned integer, got '{value}'"),
                    )
                })?
            }
            ("tolerances", k) => {
                let t = &mut cfg.tolerances;
                if k == "sub_nodes" {
                    t.sub_nodes = value.parse().ok().filter(|m| *m >= 1).ok_or_else(|| {
                        err(
                            no,
                            format!("sub_nodes: expected a positive count, got '{value}'"),
                        )
                    })?;
                    continue;
                }
                let x = number(no, value)?;
                if !(x > 0.0) && k != "delta_g_floor" {
                    return Err(err(no, format!("{k}: must be positive")));
                }
                match k {
                    "tol_inner" => t.tol_inner = x,
                    "tol_norm" => t.tol_norm = x,
                    "tol_comp" => t.tol_comp = x,
                    "tol_lambda" => t.tol_lambda = x,
                    "delta_g_floor" => t.delta_g_floor = x,
                    "delta_g_scale" => t.delta_g_scale = x,
                    "delta_g_exponent" => t.delta_g_exponent = x,
                    _ => return Err(err(no, format!("unknown tolerance '{k}'"))),
                }
            }
            ("problem", "dim") => {
                let d: usize = value
                    .parse()
                    .ok()
                    .filter(|d| *d >= 1)
                    .ok_or_else(|| err(no, "dim: expected a positive integer"))?;
                inline.dim = Some(d);
            }
            ("problem", "a") => inline.a = Some(l),
            ("problem", "v") => inline.v = Some(l),
            ("problem", "r") => inline.r = Some(l),
            ("problem", "nonlinearity") => inline.f = Some(l),
            ("problem", "z0") => inline.z0 = Some(l),
            ("load", "breakpoints") => inline.breakpoints = Some(l),
            ("load", "segment") => inline.segments.push(l),
            ("load", "jump") => inline.jumps.push(l),
            (s, k) => return Err(err(no, format!("unknown key '{k}' in [{s}]"))),
        }
    }

    cfg.problem = match (scenario, in_inline) {
        (Some(_), true) => {
            return Err(err(
                inline.first_line,
                "give either 'scenario' or an inline [problem], not both",
            ))
        }
        (Some(name), false) => ProblemSource::Scenario(name),
        (None, true) => ProblemSource::Inline(Box::new(inline.build()?)),
        (None, false) => return Err(err(0, "no scenario and no [problem] section")),
    };
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_config() {
        let c = parse("# play\n[run]\nscenario = play1d\neps = 0.2, 0.1\nmesh = c=0.5\nseed = 7\n")
            .unwrap();
        assert_eq!(c.problem, ProblemSource::Scenario("play1d".into()));
        assert_eq!(c.eps, Some(vec![0.2, 0.1]));
        assert_eq!(c.mesh, Some(MeshRule::linear(0.5)));
        assert_eq!(c.seed, 7);
        let p = c.problem().unwrap();
        assert_eq!(c.sweep_options(&p).unwrap().solve.step.seed, 7);
    }

    #[test]
    fn inline_problem_with_jump() {
        let text = "\
[problem]
dim = 2
a = laplacian 1, 1
r = 0.5
nonlinearity = double-well 0.5
z0 = 0, 0
[load]
breakpoints = 0, 0.5, 1
segment = affine 0, 0 ; 1, 1
segment = constant 2, 0
jump = right
";
        let c = parse(text).unwrap();
        let p = c.problem().unwrap();
        assert_eq!(p.system.dim(), 2);
        assert_eq!(p.system.load().jumps().len(), 1);
        assert_eq!(p.system.dissipation.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn increasing_ladder_is_rejected_with_its_line() {
        let c = parse("scenario = play1d\n\neps = 0.1, 0.2\n").unwrap();
        let p = c.problem().unwrap();
        match c.sweep_options(&p) {
            Err(Error::Config { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coarse_uniform_partition_violates_mesh_rule() {
        let c = parse("scenario = play1d\neps = 0.1\nmesh = c=0.5\nsteps = 10\n").unwrap();
        let p = c.problem().unwrap();
        assert!(matches!(
            c.sweep_options(&p),
            Err(Error::Config { line: 4, .. })
        ));
        let c = parse("scenario = play1d\neps = 0.1\nmesh = c=0.5\nsteps = 20\n").unwrap();
        assert_eq!(
            c.sweep_options(&c.problem().unwrap()).unwrap().steps,
            Some(20)
        );
    }

    #[test]
    fn parse_errors_carry_lines() {
        for (text, line) in [
            ("scenario = play1d\nbogus\n", 2),
            ("scenario = play1d\n[nope]\n", 2),
            ("scenario = play1d\nscenario = chain16\n", 2),
            ("scenario = play1d\neps = 0.1, x\n", 2),
            ("[tolerances]\ntol_norm = -1\n", 2),
            ("scenario = play1d\nmesh = d=1\n", 2),
        ] {
            match parse(text) {
                Err(Error::Config { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn mesh_rule_syntax() {
        assert_eq!(
            parse_mesh(0, "c=2.5, power=2").unwrap(),
            MeshRule { c: 2.5, power: 2.0 }
        );
        assert_eq!(parse_mesh(0, "c = 0.5").unwrap(), MeshRule::linear(0.5));
        assert_eq!(
            parse_mesh(0, "0.5").unwrap_err(),
            err(0, "mesh: expected key=value, got '0.5'")
        );
    }
}
