//! Job dispatch for the `fgl` binary. Parsing of the command line lives in
//! `main.rs`; everything here is reachable from tests without a process.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use fgl_core::couveignes::{self, RelationCtx};
use fgl_core::curve::{self, Class};
use fgl_core::formal_group::{
    default_prec, group_law, negation_series, verify_axioms, WeierstrassCurve,
};
use fgl_core::hom::{isogeny_to_hom, FglHom};
use fgl_core::json::{to_json, AxiomDoc, CurveDoc, HomDoc, IsogenyDoc, SeriesDoc, SolveDoc};
use fgl_core::{find_extension, Error};
use serde::Serialize;

/// Largest precision accepted on the command line.
pub const MAX_PREC: usize = 256;
pub const DEFAULT_SEED: u64 = 0x5eed;
pub const DEFAULT_BOUND: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    GroupLaw,
    VerifyAxioms,
    MultByN,
    Negate,
    Classify,
    TraceModP,
    CountPoints,
    ExpandIsogeny,
    CouveignesSolve,
    CouveignesCertify,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobSpec {
    pub command: Command,
    pub files: Vec<PathBuf>,
    pub prec: Option<usize>,
    pub n: Option<i64>,
    pub solve_degree: Option<u32>,
    pub bound: Option<usize>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl JobSpec {
    pub fn new(command: Command, files: Vec<PathBuf>) -> Self {
        JobSpec {
            command,
            files,
            prec: None,
            n: None,
            solve_degree: None,
            bound: None,
            seed: DEFAULT_SEED,
            threads: None,
            format: Format::Json,
            out: None,
        }
    }
}

/// Exit code, document and diagnostic of one job.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
    pub diagnostic: Option<String>,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Job<T> = std::result::Result<T, Failure>;

/// Runs a job on a pool of `spec.threads` workers. The result does not
/// depend on the number of threads.
pub fn run(spec: &JobSpec) -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads.unwrap_or(0))
        .build();
    let result = match pool {
        Ok(pool) => pool.install(|| dispatch(spec)),
        Err(e) => Err(Failure::Usage(format!("cannot start worker threads: {e}"))),
    };
    match result {
        Ok((output, failed)) => {
            if let Some(path) = &spec.out {
                if let Err(e) = fs::write(path, &output) {
                    return Outcome {
                        code: 2,
                        output: String::new(),
                        diagnostic: Some(format!("{}: {e}", path.display())),
                    };
                }
            }
            Outcome {
                code: if failed.is_some() { 1 } else { 0 },
                output,
                diagnostic: failed,
            }
        }
        Err(Failure::Usage(msg)) => Outcome {
            code: 2,
            output: String::new(),
            diagnostic: Some(msg),
        },
        Err(Failure::Domain(msg)) => Outcome {
            code: 1,
            output: String::new(),
            diagnostic: Some(msg),
        },
    }
}

fn read_doc<T: serde::de::DeserializeOwned>(path: &Path) -> Job<T> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_curve(path: &Path) -> Job<WeierstrassCurve> {
    let doc: CurveDoc = read_doc(path)?;
    doc.to_curve().map_err(|e| match e {
        Error::SingularCurve => Failure::Domain(format!("{}: {e}", path.display())),
        e => Failure::Usage(format!("{}: {e}", path.display())),
    })
}

fn load_target(spec: &JobSpec, source: &WeierstrassCurve) -> Job<WeierstrassCurve> {
    match spec.files.get(1) {
        None => Ok(source.clone()),
        Some(path) => {
            let doc: CurveDoc = read_doc(path)?;
            doc.to_curve_over(source.field()).map_err(|e| match e {
                Error::SingularCurve => Failure::Domain(format!("{}: {e}", path.display())),
                e => Failure::Usage(format!("{}: {e}", path.display())),
            })
        }
    }
}

fn expect_files(spec: &JobSpec, min: usize, max: usize) -> Job<()> {
    let k = spec.files.len();
    if k < min || k > max {
        let want = if min == max {
            format!("{min}")
        } else {
            format!("{min} to {max}")
        };
        return Err(Failure::Usage(format!(
            "expected {want} input file(s), got {k}"
        )));
    }
    Ok(())
}

fn precision(spec: &JobSpec, p: u32) -> Job<usize> {
    let prec = spec.prec.unwrap_or_else(|| default_prec(p));
    if prec == 0 || prec > MAX_PREC {
        return Err(Failure::Usage(format!(
            "--prec must lie in 1..={MAX_PREC}, got {prec}"
        )));
    }
    Ok(prec)
}

fn emit<T: Serialize>(spec: &JobSpec, doc: &T, text: impl FnOnce() -> String) -> String {
    match spec.format {
        Format::Json => to_json(doc) + "\n",
        Format::Text => text(),
    }
}

#[derive(Serialize)]
struct ClassifyDoc {
    class: Class,
    height: u32,
}

#[derive(Serialize)]
struct TraceDoc {
    trace_mod_p: u32,
}

#[derive(Serialize)]
struct CertifiedDoc {
    index: usize,
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    hom: Option<HomDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct CertifyDoc {
    solve_field_degree: u32,
    extend_to: usize,
    results: Vec<CertifiedDoc>,
}

/// Returns the output document and, for a computed negative answer, the
/// diagnostic that turns the exit code into 1.
fn dispatch(spec: &JobSpec) -> Job<(String, Option<String>)> {
    use Command::*;
    if !matches!(spec.command, CouveignesSolve | CouveignesCertify) {
        expect_files(spec, 1, 1)?;
    }
    match spec.command {
        GroupLaw => {
            let c = load_curve(&spec.files[0])?;
            let law = group_law(&c, precision(spec, c.field().characteristic())?);
            Ok((
                emit(spec, &SeriesDoc::from_series(law.series()), || {
                    format!("F(X,Y) = {}\n", law.series())
                }),
                None,
            ))
        }
        VerifyAxioms => {
            let c = load_curve(&spec.files[0])?;
            let prec = precision(spec, c.field().characteristic())?;
            let report = verify_axioms(&group_law(&c, prec), prec)?;
            let failed = (!report.all_ok()).then(|| "formal group law axioms fail".to_string());
            let doc = AxiomDoc::from_report(&report);
            let out = emit(spec, &doc, || {
                let mut s = format!(
                    "identity: {}\ncommutativity: {}\nassociativity: {}\nchecked below degree {}\n",
                    ok_word(doc.identity_ok),
                    ok_word(doc.commutative_ok),
                    ok_word(doc.associative_ok),
                    doc.checked_to
                );
                if let Some(f) = &doc.failing_monomial {
                    let _ = writeln!(s, "first failure: {} at exponent {:?}", f.axiom, f.e);
                }
                s
            });
            Ok((out, failed))
        }
        MultByN => {
            let n = spec
                .n
                .ok_or_else(|| Failure::Usage("mult-by-n requires --n".into()))?;
            let c = load_curve(&spec.files[0])?;
            let law = group_law(&c, precision(spec, c.field().characteristic())?);
            let hom = FglHom::mult_by_n(&law, n);
            let doc = HomDoc::from_hom(&hom);
            Ok((
                emit(spec, &doc, || {
                    format!("[{n}](t) = {}\nheight: {}\n", hom.series(), doc.height)
                }),
                None,
            ))
        }
        Negate => {
            let c = load_curve(&spec.files[0])?;
            let law = group_law(&c, precision(spec, c.field().characteristic())?);
            let i = negation_series(&law);
            Ok((
                emit(spec, &SeriesDoc::from_series(&i), || {
                    format!("i(t) = {i}\n")
                }),
                None,
            ))
        }
        Classify => {
            let c = load_curve(&spec.files[0])?;
            let (class, height) =
                curve::classify(&c, precision(spec, c.field().characteristic())?)?;
            let doc = ClassifyDoc { class, height };
            Ok((
                emit(spec, &doc, || {
                    format!("{} (height {height})\n", class.as_str())
                }),
                None,
            ))
        }
        TraceModP => {
            let c = load_curve(&spec.files[0])?;
            let r = curve::trace_mod_p(&c, precision(spec, c.field().characteristic())?)?;
            Ok((
                emit(spec, &TraceDoc { trace_mod_p: r }, || {
                    format!("trace mod {}: {r}\n", c.field().characteristic())
                }),
                None,
            ))
        }
        CountPoints => {
            let c = load_curve(&spec.files[0])?;
            let stats = curve::curve_stats(&c, precision(spec, c.field().characteristic())?)?;
            Ok((
                emit(spec, &stats, || {
                    format!(
                        "order: {}\ntrace: {}\ntrace mod p: {}\nclass: {}\nheight: {}\n",
                        stats.order,
                        stats.trace,
                        stats.trace_mod_p,
                        stats.class.as_str(),
                        stats.height
                    )
                }),
                None,
            ))
        }
        ExpandIsogeny => {
            let doc: IsogenyDoc = read_doc(&spec.files[0])?;
            let iso = doc.to_isogeny().map_err(|e| match e {
                Error::SingularCurve => Failure::Domain(e.to_string()),
                e => Failure::Usage(format!("{}: {e}", spec.files[0].display())),
            })?;
            let prec = precision(spec, iso.source.field().characteristic())?;
            let h = isogeny_to_hom(&iso, prec)?;
            let doc = HomDoc::from_hom(&h.hom);
            Ok((
                emit(spec, &doc, || {
                    format!(
                        "U(t) = {}\nheight: {}\nseparable: {}\n",
                        h.hom.series(),
                        doc.height,
                        h.separable
                    )
                }),
                None,
            ))
        }
        CouveignesSolve => {
            expect_files(spec, 1, 2)?;
            let e = load_curve(&spec.files[0])?;
            let e2 = load_target(spec, &e)?;
            let bound = spec.bound.unwrap_or(DEFAULT_BOUND);
            if bound == 0 {
                return Err(Failure::Usage("--bound must be positive".into()));
            }
            let ctx = RelationCtx::from_curves(&e, &e2, bound)?;
            let enumeration = match spec.solve_degree {
                Some(0) => return Err(Failure::Usage("--solve-degree must be positive".into())),
                Some(m) => {
                    let emb = find_extension(ctx.field(), m)?;
                    couveignes::enumerate_truncations(
                        &ctx.lift(&emb),
                        bound,
                        m,
                        couveignes::DEFAULT_BUDGET,
                    )?
                }
                None => couveignes::enumerate_auto(&ctx, bound, 1, couveignes::DEFAULT_BUDGET)?.0,
            };
            let doc = SolveDoc::from_enumeration(&enumeration);
            let out = emit(spec, &doc, || {
                let f = &enumeration.field;
                let mut s = format!(
                    "{} solution(s) of relations 1..={} over GF({}^{})\n",
                    doc.solutions.len(),
                    doc.bound,
                    f.characteristic(),
                    f.degree()
                );
                for sol in &enumeration.solutions {
                    let coeffs: Vec<String> = sol.iter().map(|&c| f.format(c)).collect();
                    let _ = writeln!(s, "  [{}]", coeffs.join(", "));
                }
                let _ = writeln!(s, "splitting deficit: {}", doc.splitting_deficit);
                s
            });
            Ok((out, None))
        }
        CouveignesCertify => {
            expect_files(spec, 2, 3)?;
            let e = load_curve(&spec.files[0])?;
            let (e2, solutions_path) = if spec.files.len() == 3 {
                (load_target(spec, &e)?, &spec.files[2])
            } else {
                (e.clone(), &spec.files[1])
            };
            let solved: SolveDoc = read_doc(solutions_path)?;
            let extend_to = precision(spec, e.field().characteristic())?;
            let ctx = RelationCtx::from_curves(&e, &e2, extend_to)?;
            let emb = find_extension(ctx.field(), solved.solve_field_degree.max(1))?;
            let ctx = ctx.lift(&emb);
            let field = ctx.field().clone();
            let mut results = Vec::with_capacity(solved.solutions.len());
            for (index, sol) in solved.solutions.iter().enumerate() {
                let coeffs = sol
                    .iter()
                    .map(|c| fgl_core::json::parse_elem(&field, c))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| Failure::Usage(format!("{}: {e}", solutions_path.display())))?;
                results.push(
                    match couveignes::certify_solution(&ctx, &coeffs, extend_to) {
                        Ok(h) => CertifiedDoc {
                            index,
                            ok: true,
                            hom: Some(HomDoc::from_hom(&h)),
                            error: None,
                        },
                        Err(e) => CertifiedDoc {
                            index,
                            ok: false,
                            hom: None,
                            error: Some(e.to_string()),
                        },
                    },
                );
            }
            let bad = results.iter().filter(|r| !r.ok).count();
            let failed = (bad > 0)
                .then(|| format!("{bad} of {} solution(s) failed to certify", results.len()));
            let doc = CertifyDoc {
                solve_field_degree: field.degree() / e.field().degree(),
                extend_to,
                results,
            };
            let out = emit(spec, &doc, || {
                let mut s = String::new();
                for r in &doc.results {
                    match (&r.hom, &r.error) {
                        (Some(h), _) => {
                            let _ = writeln!(
                                s,
                                "solution {}: certified below degree {}",
                                r.index, h.checked_to_degree
                            );
                        }
                        (_, Some(err)) => {
                            let _ = writeln!(s, "solution {}: {err}", r.index);
                        }
                        _ => {}
                    }
                }
                s
            });
            Ok((out, failed))
        }
    }
}

fn ok_word(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}
