//! `fglab`: command-line frontend for the fglab library.
//!
//! Every command writes a JSON report with the inputs, the library version,
//! the truncation and the result. Exit status is 0 on pass, 2 when a
//! verification fails or a certificate is produced, 1 on error.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use fglab::cobordism::{
    pullback_diagonal, pullback_point, pullback_projection, pullback_segre, pushforward_projbundle, CobElement,
    ProjProductRing,
};
use fglab::fgl::{add_morphisms, check_fgl, compose_morphisms, morphism_check, FormalGroupLaw};
use fglab::json::{
    scalar_terms, CobJson, CtxJson, FglJson, GlFamilyJson, LaurentOpJson, MorphismJson, PsiJson, RingMapJson,
    SeriesJson, VerdictJson,
};
use fglab::lazard::LazardCtx;
use fglab::operations::{
    adams, default_reps, gl_validate, integrality_classify, ln_component, steenrod_st, symmetric_phi, tom_dieck_sq,
};
use fglab::scalars::{CoeffDomain, Ring};
use fglab::series::TruncSeries;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "fglab", version, about = "Exact formal group law calculus")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Serialize)]
struct Global {
    /// Truncation weight.
    #[arg(long, global = true, default_value_t = 4)]
    trunc: u32,
    /// A Lazard context written by `lazard build`.
    #[arg(long, global = true)]
    ctx: Option<PathBuf>,
    /// Worker threads; does not affect the output.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    #[serde(skip)]
    jobs: u32,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    #[serde(skip)]
    out: Option<PathBuf>,
    /// Directory of cached contexts, `ctx-N.json`.
    #[arg(long, global = true, env = "FGLAB_CTX_CACHE", hide_env_values = true)]
    #[serde(skip)]
    ctx_cache: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Lazard ring contexts.
    #[command(subcommand)]
    Lazard(LazardCmd),
    /// Formal group laws.
    #[command(subcommand)]
    Fgl(FglCmd),
    /// Morphisms of formal group laws.
    #[command(subcommand)]
    Morphism(MorphismCmd),
    /// Push-forwards and pull-backs on products of projective spaces.
    #[command(subcommand)]
    Cob(CobCmd),
    /// Cohomology operations.
    #[command(subcommand)]
    Op(OpCmd),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum LazardCmd {
    /// Build the context for degrees `0..=trunc`.
    Build,
}

#[derive(Args, Debug, Serialize)]
struct LawArg {
    /// `additive`, `multiplicative`, `universal`, or a law JSON file.
    #[arg(long, default_value = "universal")]
    law: String,
    /// Coefficients of a named law: `Z`, `Q` or `Z/p`.
    #[arg(long, default_value = "Z")]
    ring: String,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FglCmd {
    /// Unit, associativity and commutativity.
    Check(LawArg),
    /// The `[n]`-series.
    Nseries {
        #[command(flatten)]
        law: LawArg,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
    /// The logarithm, over the rationals when the ring is torsion-free.
    Log(LawArg),
    /// `gamma^-1(F(gamma(x), gamma(y)))`.
    Reparam {
        #[command(flatten)]
        law: LawArg,
        #[arg(long)]
        gamma: PathBuf,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MorphismCmd {
    /// Check the defining identity.
    Check {
        #[arg(long)]
        morphism: PathBuf,
    },
    /// `second . first`.
    Compose {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
    },
    /// Formal sum of two morphisms with the same source and target.
    Add {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum PullKind {
    Segre,
    Diag,
    Proj,
    Point,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CobCmd {
    /// Push-forward along a projective bundle.
    Push {
        #[command(flatten)]
        law: LawArg,
        /// JSON array of root series.
        #[arg(long)]
        bundle: PathBuf,
        /// Series in the bundle variable and the base variables.
        #[arg(long)]
        f: PathBuf,
        /// Name of the bundle variable in `f`.
        #[arg(long, default_value = "t")]
        t: String,
    },
    /// Pull-back along a Segre, diagonal, projection or point map.
    Pull {
        #[arg(long, value_enum)]
        kind: PullKind,
        #[arg(long)]
        element: PathBuf,
        /// Factor index (segre, diag, point) or insertion position (proj).
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Second factor of a diagonal.
        #[arg(long, default_value_t = 1)]
        j: usize,
        /// Bounds of the two new factors of a Segre pull-back.
        #[arg(long, value_delimiter = ',', num_args = 2)]
        bounds: Option<Vec<u32>>,
        /// Bound of the new factor of a projection.
        #[arg(long)]
        bound: Option<u32>,
    },
}

#[derive(Args, Debug, Serialize)]
struct ElementArg {
    /// Element JSON; defaults depend on the operation.
    #[arg(long)]
    element: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum OpCmd {
    /// A Landweber-Novikov component; by default on the product of
    /// hyperplanes in `prod (P^(i+1))^(r_i)`.
    Ln {
        #[arg(long, value_delimiter = ',')]
        r_bar: Vec<u16>,
        #[command(flatten)]
        element: ElementArg,
    },
    /// The Adams operation; by default on `z` over the chosen law.
    Adams {
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[command(flatten)]
        law: LawArg,
        #[command(flatten)]
        element: ElementArg,
    },
    /// The total Steenrod operation `St`.
    Steenrod(PowerArgs),
    /// The symmetric operation `Phi`.
    Symmetric(PowerArgs),
    /// `Sq = St - D Phi` with the divisibility and integrality audit.
    Sq(PowerArgs),
    /// Integrality test of an additive functional.
    Classify {
        #[arg(long)]
        psi: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long)]
        rmax: usize,
        #[arg(long)]
        degmax: u32,
    },
    /// Check a family `g_l` against the three axioms.
    ValidateGl {
        #[arg(long)]
        family: PathBuf,
    },
}

#[derive(Args, Debug, Serialize)]
struct PowerArgs {
    #[arg(long)]
    p: u64,
    /// Representatives of the nonzero residues mod p.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    reps: Option<Vec<i64>>,
    #[command(flatten)]
    element: ElementArg,
}

/// Outcome of a command before it is written.
struct Outcome {
    pass: bool,
    trunc: u32,
    result: Value,
}

impl Outcome {
    fn value(trunc: u32, result: Value) -> Outcome {
        Outcome { pass: true, trunc, result }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    if cli.global.jobs > 1 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.global.jobs as usize).build_global()?;
    }
    let outcome = dispatch(&cli.global, &cli.command)?;
    let report = json!({
        "version": VERSION,
        "global": serde_json::to_value(&cli.global)?,
        "inputs": serde_json::to_value(&cli.command)?,
        "trunc": outcome.trunc,
        "status": if outcome.pass { "pass" } else { "fail" },
        "result": outcome.result,
    });
    let text = fglab::json::to_string(&report)?;
    match &cli.global.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(outcome.pass)
}

/// Reads a JSON input; a report written by this tool is unwrapped to its
/// `result`. `-` is stdin.
fn read_input<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    let mut v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(obj) = v.as_object_mut() {
        if obj.contains_key("version") && obj.contains_key("result") {
            v = obj.remove("result").unwrap();
        }
    }
    serde_json::from_value(v).with_context(|| format!("decoding {}", path.display()))
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn parse_ring(s: &str) -> Result<Ring> {
    Ok(match s {
        "Z" => Ring::integers(),
        "Q" => Ring::rationals(),
        _ => match s.strip_prefix("Z/") {
            Some(p) => Ring::mod_p(p.parse().with_context(|| format!("bad ring {s}"))?)?,
            None => bail!("unknown ring {s}; use Z, Q or Z/p"),
        },
    })
}

fn load_law(g: &Global, arg: &LawArg) -> Result<FormalGroupLaw> {
    Ok(match arg.law.as_str() {
        "additive" => FormalGroupLaw::additive(&parse_ring(&arg.ring)?, g.trunc),
        "multiplicative" => FormalGroupLaw::multiplicative(&parse_ring(&arg.ring)?, g.trunc),
        "universal" => {
            let n = g.trunc.saturating_sub(1).div_ceil(2);
            context(g, n)?.universal().truncate(g.trunc)
        }
        path => read_input::<FglJson>(Path::new(path))?.to_law()?,
    })
}

/// A context of at least `n` degrees: from `--ctx`, the cache directory, or
/// built on the spot.
fn context(g: &Global, n: u32) -> Result<Arc<LazardCtx>> {
    if let Some(p) = &g.ctx {
        let ctx = read_input::<CtxJson>(p)?.to_ctx()?;
        if ctx.trunc() < n {
            bail!("context {} has degrees up to {}, need {}", p.display(), ctx.trunc(), n);
        }
        return Ok(Arc::new(ctx));
    }
    if let Some(dir) = &g.ctx_cache {
        let file = dir.join(format!("ctx-{n}.json"));
        if file.exists() {
            return Ok(Arc::new(read_input::<CtxJson>(&file)?.to_ctx()?));
        }
        let ctx = LazardCtx::build(n)?;
        std::fs::create_dir_all(dir)?;
        std::fs::write(&file, fglab::json::to_string(&CtxJson::from_ctx(&ctx))?)?;
        return Ok(Arc::new(ctx));
    }
    Ok(Arc::new(LazardCtx::build(n)?))
}

fn map_needs_ctx(m: &RingMapJson) -> bool {
    match m {
        RingMapJson::Lazard { .. } => true,
        RingMapJson::Compose { first, second, .. } => map_needs_ctx(first) || map_needs_ctx(second),
        _ => false,
    }
}

fn load_morphism(g: &Global, path: &Path) -> Result<fglab::fgl::FglMorphism> {
    let m: MorphismJson = read_input(path)?;
    let ctx = if map_needs_ctx(&m.phi) {
        let law = m.source.to_law()?;
        Some(context(g, law.trunc().saturating_sub(1).div_ceil(2).max(1))?)
    } else {
        None
    };
    Ok(m.to_morphism(ctx.as_ref())?)
}

fn load_element(path: &Path) -> Result<CobElement> {
    Ok(read_input::<CobJson>(path)?.to_element()?)
}

/// `z_1` on `P^trunc` over `law`.
fn default_z(law: &FormalGroupLaw, trunc: u32) -> Result<CobElement> {
    let space = ProjProductRing::new(law, &[trunc], trunc)?;
    Ok(CobElement::z(&space, 0)?)
}

fn dispatch(g: &Global, cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Lazard(LazardCmd::Build) => {
            let ctx = context(g, g.trunc)?;
            Ok(Outcome::value(ctx.trunc(), to_value(&CtxJson::from_ctx(&ctx))?))
        }
        Command::Fgl(c) => fgl(g, c),
        Command::Morphism(c) => morphism(g, c),
        Command::Cob(c) => cob(g, c),
        Command::Op(c) => op(g, c),
    }
}

fn fgl(g: &Global, cmd: &FglCmd) -> Result<Outcome> {
    match cmd {
        FglCmd::Check(arg) => {
            let law = load_law(g, arg)?;
            let check = check_fgl(&law)?;
            let failure = check.failure.as_ref().map(|(axiom, vars, exps, coeff)| {
                json!({ "axiom": axiom, "vars": vars, "exps": exps, "coeff": scalar_terms(coeff) })
            });
            Ok(Outcome { pass: check.ok(), trunc: law.trunc(), result: json!({ "ok": check.ok(), "failure": failure }) })
        }
        FglCmd::Nseries { law, n } => {
            let law = load_law(g, law)?;
            Ok(Outcome::value(law.trunc(), to_value(&SeriesJson::from_series(&law.n_series(*n)?))?))
        }
        FglCmd::Log(arg) => {
            let mut law = load_law(g, arg)?;
            if matches!(law.ring().domain(), CoeffDomain::Integers | CoeffDomain::Localized(_)) {
                law = law.change_ring(&law.ring().with_domain(&CoeffDomain::Rationals)?)?;
            }
            Ok(Outcome::value(law.trunc(), to_value(&SeriesJson::from_series(&law.logarithm()?))?))
        }
        FglCmd::Reparam { law, gamma } => {
            let law = load_law(g, law)?;
            let gamma = read_input::<SeriesJson>(gamma)?.to_series()?;
            let out = law.reparametrize(&gamma)?;
            Ok(Outcome::value(out.trunc(), to_value(&FglJson::from_law(&out))?))
        }
    }
}

fn morphism(g: &Global, cmd: &MorphismCmd) -> Result<Outcome> {
    match cmd {
        MorphismCmd::Check { morphism } => {
            let m = load_morphism(g, morphism)?;
            let check = morphism_check(&m)?;
            let failure = check.failure.as_ref().map(|(exps, c)| json!({ "exps": exps, "coeff": scalar_terms(c) }));
            Ok(Outcome { pass: check.ok(), trunc: m.trunc(), result: json!({ "ok": check.ok(), "failure": failure }) })
        }
        MorphismCmd::Compose { first, second } => {
            let f = load_morphism(g, first)?;
            let s = load_morphism(g, second)?;
            let out = compose_morphisms(&s, &f)?;
            Ok(Outcome::value(out.trunc(), to_value(&MorphismJson::from_morphism(&out))?))
        }
        MorphismCmd::Add { first, second } => {
            let out = add_morphisms(&load_morphism(g, first)?, &load_morphism(g, second)?)?;
            Ok(Outcome::value(out.trunc(), to_value(&MorphismJson::from_morphism(&out))?))
        }
    }
}

fn cob(g: &Global, cmd: &CobCmd) -> Result<Outcome> {
    match cmd {
        CobCmd::Push { law, bundle, f, t } => {
            let law = load_law(g, law)?;
            let roots = read_input::<Vec<SeriesJson>>(bundle)?
                .iter()
                .map(|r| r.to_series())
                .collect::<fglab::Result<Vec<TruncSeries>>>()?;
            let f = read_input::<SeriesJson>(f)?.to_series()?;
            let out = pushforward_projbundle(&law, &f, t, &roots, g.trunc)?;
            Ok(Outcome::value(out.trunc(), to_value(&SeriesJson::from_series(&out))?))
        }
        CobCmd::Pull { kind, element, index, j, bounds, bound } => {
            let e = load_element(element)?;
            let out = match kind {
                PullKind::Segre => {
                    let b = bounds.as_ref().ok_or_else(|| anyhow!("segre needs --bounds a,b"))?;
                    pullback_segre(&e, *index, (b[0], b[1]))?
                }
                PullKind::Diag => pullback_diagonal(&e, *index, *j)?,
                PullKind::Proj => {
                    let b = bound.ok_or_else(|| anyhow!("proj needs --bound"))?;
                    pullback_projection(&e, *index, b)?
                }
                PullKind::Point => pullback_point(&e, *index)?,
            };
            Ok(Outcome::value(out.trunc(), to_value(&CobJson::from_element(&out))?))
        }
    }
}

fn power_inputs(g: &Global, a: &PowerArgs) -> Result<(Arc<LazardCtx>, Vec<i64>, CobElement)> {
    let reps = match &a.reps {
        Some(r) => r.clone(),
        None => default_reps(a.p, None)?,
    };
    let ctx = context(g, g.trunc)?;
    let e = match &a.element.element {
        Some(p) => load_element(p)?,
        None => default_z(ctx.universal(), g.trunc)?,
    };
    Ok((ctx, reps, e))
}

fn op(g: &Global, cmd: &OpCmd) -> Result<Outcome> {
    match cmd {
        OpCmd::Ln { r_bar, element } => {
            let deg: u32 = r_bar.iter().enumerate().map(|(i, &r)| (i as u32 + 1) * r as u32).sum();
            let (e, n) = match &element.element {
                Some(p) => {
                    let e = load_element(p)?;
                    let n = e.trunc().saturating_sub(1).div_ceil(2).max(deg);
                    (Some(e), n)
                }
                None => {
                    let top: u32 = r_bar.iter().enumerate().map(|(i, &r)| (i as u32 + 2) * r as u32).sum();
                    (None, g.trunc.max((top + deg).saturating_sub(1).div_ceil(2)))
                }
            };
            let ctx = context(g, n)?;
            let e = match e {
                Some(e) => e,
                None => {
                    let mut bounds = Vec::new();
                    for (i, &r) in r_bar.iter().enumerate() {
                        bounds.extend(std::iter::repeat(i as u32 + 2).take(r as usize));
                    }
                    let trunc = bounds.iter().sum::<u32>() + deg;
                    let space = ProjProductRing::new(ctx.universal(), &bounds, trunc)?;
                    CobElement::monomial(&space, &fglab::scalars::Scalar::one(ctx.b_ring()), &vec![1; bounds.len()])?
                }
            };
            let out = ln_component(&ctx, r_bar, &e)?;
            Ok(Outcome::value(out.trunc(), json!({ "input": CobJson::from_element(&e), "value": CobJson::from_element(&out) })))
        }
        OpCmd::Adams { k, law, element } => {
            let e = match &element.element {
                Some(p) => load_element(p)?,
                None => default_z(&load_law(g, law)?, g.trunc)?,
            };
            let out = adams(e.space().theory(), *k, &e)?;
            Ok(Outcome::value(out.trunc(), json!({ "input": CobJson::from_element(&e), "value": CobJson::from_element(&out) })))
        }
        OpCmd::Steenrod(a) | OpCmd::Symmetric(a) => {
            let (ctx, reps, e) = power_inputs(g, a)?;
            let out = if matches!(cmd, OpCmd::Steenrod(_)) {
                steenrod_st(&ctx, a.p, &reps, &e)?
            } else {
                symmetric_phi(&ctx, a.p, &reps, &e)?
            };
            Ok(Outcome::value(
                out.trunc(),
                json!({ "reps": reps, "input": CobJson::from_element(&e), "value": LaurentOpJson::from_value(&out) }),
            ))
        }
        OpCmd::Sq(a) => {
            let (ctx, reps, e) = power_inputs(g, a)?;
            let r = tom_dieck_sq(&ctx, a.p, &reps, &e)?;
            let audit: Vec<Value> = r
                .audit_failures
                .iter()
                .map(|((z, t), c)| json!({ "z": z, "t": t, "coeff": scalar_terms(c) }))
                .collect();
            Ok(Outcome {
                pass: r.diagram_ok && r.audit_ok(),
                trunc: r.sq.trunc(),
                result: json!({
                    "reps": reps,
                    "input": CobJson::from_element(&e),
                    "sq": LaurentOpJson::from_value(&r.sq),
                    "st": LaurentOpJson::from_value(&r.st),
                    "phi": LaurentOpJson::from_value(&r.phi),
                    "diagram_ok": r.diagram_ok,
                    "audit_failures": audit,
                }),
            })
        }
        OpCmd::Classify { psi, n, m, rmax, degmax } => {
            let pj: PsiJson = read_input(psi)?;
            let ctx = context(g, g.trunc.max(*degmax))?;
            let psi = pj.to_psi(&ctx)?;
            let verdict = integrality_classify(&ctx, &psi, *n, *m, *rmax, *degmax)?;
            Ok(Outcome {
                pass: verdict.passed(),
                trunc: ctx.trunc(),
                result: to_value(&VerdictJson::from_verdict(&verdict))?,
            })
        }
        OpCmd::ValidateGl { family } => {
            let f = read_input::<GlFamilyJson>(family)?.to_family()?;
            let violation = gl_validate(&f)?;
            let v = violation.as_ref().map(|v| {
                json!({
                    "axiom": format!("{:?}", v.axiom).to_lowercase(),
                    "level": v.level,
                    "alpha_index": v.alpha_index,
                    "detail": v.detail,
                })
            });
            Ok(Outcome {
                pass: violation.is_none(),
                trunc: f.trunc(),
                result: json!({ "levels": f.levels(), "violation": v }),
            })
        }
    }
}
