//! Command dispatch. Every command is a pure function of the input and settings,
//! so identical invocations give byte-identical output.

use std::fmt::Write;

use qkul_core::classify::{classify_element, ClassTag, ClassifyOptions, ElementClass};
use qkul_core::dynamics::{
    iterate_orbit, pseudo_projective_limit, random_point, seeded_rng, verify_limit_set, Direction, VerifyParams,
};
use qkul_core::limitset::{conjugate_limit_set, kulkarni_sets_canonical, limit_set_membership, LimitKind, LimitSet};
use qkul_core::projective::ProjPoint;
use qkul_core::qmat::{JordanData, JordanMode};
use qkul_core::quat::{format_literal, Quaternion};

use crate::input::InputSpec;
use crate::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_OUT_OF_CATALOG: i32 = 2;
pub const EXIT_CONTAINMENT: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Largest exponent tried by `powerlimit`.
const MAX_POWER: u64 = 1 << 50;
/// Stream of the seeded generator reserved for orbit starting points.
const ORBIT_STREAM: u64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Classify,
    Limitset,
    Verify,
    Orbit,
    Powerlimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JordanChoice {
    /// Numeric Jordan analysis of the assembled matrix.
    Numeric,
    /// Declared blocks (Jordan input only).
    Exact,
}

/// Command-line settings; unset fields fall back to the input file, then to defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    pub mode: Option<JordanChoice>,
    pub tol: Option<f64>,
    pub max_den: Option<u64>,
    pub seed: Option<u64>,
    pub iters: Option<u64>,
    pub samples: Option<usize>,
    pub eps: Option<f64>,
    pub assume_extension: bool,
    pub backward: bool,
    pub start: Option<Vec<Quaternion>>,
}

#[derive(Debug, PartialEq)]
pub struct Outcome {
    pub exit: i32,
    pub output: Vec<u8>,
    pub diagnostic: Option<String>,
}

impl Outcome {
    fn ok(output: Vec<u8>) -> Self {
        Self { exit: EXIT_OK, output, diagnostic: None }
    }

    fn fail(exit: i32, message: String) -> Self {
        Self { exit, output: Vec::new(), diagnostic: Some(message) }
    }
}

fn numeric(e: qkul_core::Error) -> Outcome {
    Outcome::fail(EXIT_NUMERIC, format!("numeric failure: {e}"))
}

struct Resolved {
    classify: ClassifyOptions,
    seed: u64,
    iters: u64,
    samples: usize,
    eps: Option<f64>,
    dir: Direction,
}

fn resolve(spec: &InputSpec, s: &Settings) -> Result<Resolved, Outcome> {
    let o = &spec.options;
    let d = ClassifyOptions::default();
    let mode = match s.mode {
        Some(JordanChoice::Numeric) => JordanMode::Numeric,
        Some(JordanChoice::Exact) if spec.blocks().is_none() => {
            return Err(Outcome::fail(EXIT_PARSE, "--mode exact needs jordan-mode input".into()));
        }
        _ => spec.jordan_mode(),
    };
    Ok(Resolved {
        classify: ClassifyOptions {
            mode,
            tol: s.tol.or(o.tol).unwrap_or(d.tol),
            max_den: s.max_den.or(o.max_den).unwrap_or(d.max_den),
            cluster_tol: d.cluster_tol,
            assume_extension: s.assume_extension || o.assume_extension.unwrap_or(false),
        },
        seed: s.seed.or(o.seed).unwrap_or(0),
        iters: s.iters.or(o.iters).unwrap_or(10_000),
        samples: s.samples.or(o.samples).unwrap_or(20),
        eps: s.eps.or(o.eps),
        dir: if s.backward { Direction::Backward } else { Direction::Forward },
    })
}

fn out_of_catalog(cls: &ElementClass) -> Outcome {
    let nearest: Vec<&str> = cls.nearest_rows().iter().map(|t| t.name()).collect();
    let why = cls.note.as_deref().unwrap_or("no catalog row matches");
    Outcome::fail(
        EXIT_OUT_OF_CATALOG,
        format!("element is outside the catalog ({why}); nearest rows: {}", nearest.join(", ")),
    )
}

/// The limit set of a catalog element in the original coordinates.
fn predicted(cls: &ElementClass, jd: &JordanData) -> Result<LimitSet, Outcome> {
    if cls.tag == ClassTag::OutOfCatalog {
        return Err(out_of_catalog(cls));
    }
    let canonical = kulkarni_sets_canonical(cls).map_err(numeric)?;
    conjugate_limit_set(&canonical, &jd.conjugator).map_err(numeric)
}

pub fn run_command(cmd: Command, spec: &InputSpec, settings: &Settings) -> Outcome {
    match run(cmd, spec, settings) {
        Ok(o) | Err(o) => o,
    }
}

fn run(cmd: Command, spec: &InputSpec, settings: &Settings) -> Result<Outcome, Outcome> {
    let r = resolve(spec, settings)?;
    let g = spec.matrix().map_err(numeric)?;
    let classified = || classify_element(&g, &r.classify).map_err(numeric);
    match cmd {
        Command::Classify => {
            let (cls, jd) = classified()?;
            Ok(Outcome::ok(json::to_bytes(&json::classification(&cls, &jd))))
        }
        Command::Limitset => {
            let (cls, jd) = classified()?;
            let ls = predicted(&cls, &jd)?;
            Ok(Outcome::ok(json::to_bytes(&json::limit_set(&ls))))
        }
        Command::Verify => {
            let (cls, jd) = classified()?;
            let ls = predicted(&cls, &jd)?;
            let params = VerifyParams {
                seed: r.seed,
                samples: r.samples,
                iters: r.iters,
                eps_contain: r.eps,
                ..VerifyParams::default()
            };
            let rep = verify_limit_set(&g, &cls, &ls, &params).map_err(numeric)?;
            let exit = if rep.passed { EXIT_OK } else { EXIT_CONTAINMENT };
            let diagnostic = (!rep.passed).then(|| {
                format!("verification failed: containment {} below {}", rep.containment, params.min_containment)
            });
            Ok(Outcome { exit, output: json::to_bytes(&json::report(&rep)), diagnostic })
        }
        Command::Orbit => {
            let start = match &settings.start {
                Some(v) if v.len() != g.dim() => {
                    return Err(Outcome::fail(EXIT_PARSE, format!("--start needs {} coordinates", g.dim())));
                }
                Some(v) => ProjPoint::new(v.clone()).map_err(numeric)?,
                None => random_point(&mut seeded_rng(r.seed, ORBIT_STREAM), g.dim()),
            };
            // Distances are reported when the element is in the catalog and Λ is nonempty.
            let lambda = classified()
                .ok()
                .and_then(|(cls, jd)| predicted(&cls, &jd).ok())
                .filter(|ls| ls.kind != LimitKind::Empty);
            let orbit = iterate_orbit(&g, &start, r.iters, r.dir).map_err(numeric)?;
            Ok(Outcome::ok(orbit_csv(&orbit.points, &orbit.powers, lambda.as_ref())))
        }
        Command::Powerlimit => {
            let pl = pseudo_projective_limit(&g, MAX_POWER, r.dir).map_err(numeric)?;
            Ok(Outcome::ok(json::to_bytes(&json::pseudo_limit(&pl))))
        }
    }
}

pub fn orbit_csv(points: &[ProjPoint], powers: &[i64], lambda: Option<&LimitSet>) -> Vec<u8> {
    let dim = points.first().map_or(0, ProjPoint::dim);
    let mut s = String::from("m");
    for i in 1..=dim {
        let _ = write!(s, ",x{i}");
    }
    s.push_str(",dist_lambda\n");
    for (p, m) in points.iter().zip(powers) {
        let _ = write!(s, "{m}");
        for &q in p.coords() {
            let _ = write!(s, ",{}", format_literal(q));
        }
        match lambda {
            Some(ls) => {
                let _ = writeln!(s, ",{:.16e}", limit_set_membership(p, ls, 0.0).1);
            }
            None => s.push_str(",\n"),
        }
    }
    s.into_bytes()
}
