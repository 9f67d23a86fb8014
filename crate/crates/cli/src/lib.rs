//! Command-line front end for the `bose-mesner` crate.
//!
//! [`run`] parses arguments, dispatches and maps failures to exit codes:
//! 0 on success, 1 for invalid input, 2 when a numerical certificate fails.

mod args;
mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use bose_mesner::anyons::{self, FusionSystem};
use bose_mesner::hypergroup::{self, Coin, Hypergroup};
use bose_mesner::io::{self as bio, Distribution, JsonDocument};
use bose_mesner::parameters::{intersection_numbers, krein_parameters};
use bose_mesner::qmc::{self, CoinScaling, SchurChannel, Stochastic, TransitionExpectation};
use bose_mesner::scalar::{CMatrix, RMatrix};
use bose_mesner::scheme::{self, verify_axioms, AssociationScheme};
use bose_mesner::spectral::{decompose, BoseMesnerDecomposition};
use bose_mesner::{Error as CoreError, FiniteGroup};
use clap::Parser;
use serde_json::{json, Value};

pub use args::NORMALIZATION_NOTICE;
use args::*;

/// Exit code for bad input or a failed validation.
pub const EXIT_INVALID: i32 = 1;
/// Exit code for a failed numerical certificate.
pub const EXIT_CERTIFICATION: i32 = 2;

/// A failed certificate detected by the CLI itself, after the report is printed.
#[derive(Debug)]
struct CertificationFailure(String);

impl std::fmt::Display for CertificationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CertificationFailure {}

/// What a command produced: a machine-readable value and a human-readable
/// rendering of the same data.
struct Output {
    json: Value,
    table: String,
    /// Raw text that replaces both renderings (CSV).
    raw: Option<String>,
    failure: Option<String>,
}

impl Output {
    fn new(json: Value, table: String) -> Self {
        Self { json, table, raw: None, failure: None }
    }
}

pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_INVALID
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(&cli.command) {
        Ok(output) => {
            let text = match (&output.raw, cli.format) {
                (Some(raw), _) => raw.clone(),
                (None, Format::Json) => serde_json::to_string_pretty(&output.json).expect("JSON value") + "\n",
                (None, Format::Table) => output.table.clone(),
            };
            let _ = write!(out, "{text}");
            match output.failure {
                Some(msg) => {
                    let _ = writeln!(err, "error: {msg}");
                    EXIT_CERTIFICATION
                }
                None => 0,
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> i32 {
    let certification = e.chain().any(|cause| {
        cause.downcast_ref::<CoreError>().is_some_and(CoreError::is_certification_failure)
            || cause.downcast_ref::<CertificationFailure>().is_some()
    });
    if certification {
        EXIT_CERTIFICATION
    } else {
        EXIT_INVALID
    }
}

fn dispatch(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Scheme(SchemeCommand::Build(a)) => scheme_build(a),
        Command::Scheme(SchemeCommand::Verify { path }) => scheme_verify(path),
        Command::Scheme(SchemeCommand::Spectrum { path, out }) => scheme_spectrum(path, out.as_deref()),
        Command::Scheme(SchemeCommand::Params { path, out_p, out_q }) => {
            scheme_params(path, out_p.as_deref(), out_q.as_deref())
        }
        Command::Walk(WalkCommand::Hypergroup { scheme, coin, start, start_dist, steps, csv }) => {
            walk_hypergroup(scheme, coin, *start, start_dist.as_deref(), *steps, *csv)
        }
        Command::Qmc(QmcCommand::Dilate { dist, out }) => qmc_dilate(dist, out.as_deref()),
        Command::Qmc(QmcCommand::Entangled { transition, m, n, out }) => qmc_entangled(transition, m, n, out.as_deref()),
        Command::Qmc(QmcCommand::Schur { scheme, coin, rho, steps, scaling }) => {
            qmc_schur(scheme, coin, rho, *steps, *scaling)
        }
        Command::Szegedy(a) => szegedy(a),
        Command::Anyon(a) => anyon(a),
    }
}

fn load<K: JsonDocument>(path: &Path, what: &str) -> Result<K> {
    bio::load(path).with_context(|| format!("loading {what} from {}", path.display()))
}

fn save<K: JsonDocument>(path: &Path, object: &K) -> Result<()> {
    bio::save(path, object).with_context(|| format!("writing {}", path.display()))
}

/// Inline JSON when the argument looks like JSON, otherwise a file path.
fn inline_or_file<K: JsonDocument>(arg: &str, what: &str) -> Result<K> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        K::from_json_str(arg).with_context(|| format!("parsing inline {what}"))
    } else {
        load(Path::new(arg), what)
    }
}

fn require<T: Copy>(value: Option<T>, flag: &str, family: &str) -> Result<T> {
    value.ok_or_else(|| anyhow!("--{flag} is required for the {family} family"))
}

fn scheme_build(a: &BuildArgs) -> Result<Output> {
    let group = || -> Result<FiniteGroup> {
        match (&a.group, &a.cayley) {
            (Some(name), None) => Ok(FiniteGroup::builtin(name)?),
            (None, Some(path)) => load(path, "Cayley table"),
            _ => bail!("give exactly one of --group or --cayley"),
        }
    };
    let s = match a.family {
        Family::Johnson => {
            scheme::build_johnson_capped(require(a.v, "v", "johnson")?, require(a.k, "k", "johnson")?, a.cap)?
        }
        Family::Grassmann => scheme::build_grassmann_capped(
            require(a.q, "q", "grassmann")?,
            require(a.v, "v", "grassmann")?,
            require(a.d, "d", "grassmann")?,
            a.cap,
        )?,
        Family::Group => scheme::build_group_scheme(&group()?),
        Family::Conjugacy => scheme::build_conjugacy_scheme(&group()?),
        Family::Orbit => {
            let gens = a.generators.as_deref().ok_or_else(|| anyhow!("--generators is required for the orbit family"))?;
            let gens: Vec<Vec<usize>> = serde_json::from_str(gens).context("parsing --generators")?;
            scheme::build_orbit_scheme(&gens, require(a.n, "n", "orbit")?)?
        }
    };
    let mut table = format!("scheme with n = {} vertices and d = {} classes\n", s.n(), s.d());
    table += &format!("valencies: {:?}\n", s.valencies());
    if let Some(path) = &a.out {
        save(path, &s)?;
        table += &format!("written to {}\n", path.display());
    }
    let mut json = json!({ "n": s.n(), "d": s.d(), "valencies": s.valencies() });
    match &a.out {
        Some(path) => json["out"] = json!(path.display().to_string()),
        None => json["scheme"] = s.to_value(),
    }
    if a.out.is_none() {
        table += &s.to_json_string();
        table.push('\n');
    }
    Ok(Output::new(json, table))
}

fn scheme_verify(path: &Path) -> Result<Output> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let s = bio::scheme_from_json_unchecked(&text).with_context(|| format!("loading scheme from {}", path.display()))?;
    let report = verify_axioms(&s);
    let violations: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
    if !report.passed {
        bail!(CoreError::Validation(format!("scheme axioms fail: {}", violations.join("; "))));
    }
    let kind = if report.commutative { "commutative" } else { "non-commutative" };
    Ok(Output::new(
        json!({ "passed": true, "commutative": report.commutative }),
        format!("passed, {kind}\n"),
    ))
}

fn spectrum_value(dec: &BoseMesnerDecomposition<f64>) -> Value {
    json!({
        "n": dec.n(),
        "d": dec.d(),
        "multiplicities": dec.multiplicities(),
        "P": dec.eigenmatrix_p().to_value(),
        "Q": dec.eigenmatrix_q().to_value(),
    })
}

fn scheme_spectrum(path: &Path, out: Option<&Path>) -> Result<Output> {
    let s: AssociationScheme = load(path, "scheme")?;
    let dec = decompose::<f64>(&s)?;
    if let Some(p) = out {
        save(p, &dec)?;
    }
    let table = format!(
        "multiplicities: {:?}\nP (rows: idempotents, columns: classes)\n{}\nQ (rows: classes, columns: idempotents)\n{}\n",
        dec.multiplicities(),
        render::complex_matrix(dec.eigenmatrix_p()),
        render::complex_matrix(dec.eigenmatrix_q()),
    );
    Ok(Output::new(spectrum_value(&dec), table))
}

fn scheme_params(path: &Path, out_p: Option<&Path>, out_q: Option<&Path>) -> Result<Output> {
    let s: AssociationScheme = load(path, "scheme")?;
    let p = intersection_numbers(&s)?;
    let dec = decompose::<f64>(&s)?;
    let q = krein_parameters(&dec)?;
    if let Some(path) = out_p {
        save(path, &p)?;
    }
    if let Some(path) = out_q {
        save(path, &q)?;
    }
    let c = s.classes();
    let mut table = String::new();
    for k in 0..c {
        table += &format!("p_ij^{k}\n");
        for i in 0..c {
            table += &format!("  {:?}\n", (0..c).map(|j| p.get(i, j, k)).collect::<Vec<_>>());
        }
    }
    for k in 0..c {
        table += &format!("q_ij^{k}\n");
        for i in 0..c {
            let row: Vec<f64> = (0..c).map(|j| q.get(i, j, k)).collect();
            table += &format!("  {}\n", render::vector(&row));
        }
    }
    Ok(Output::new(json!({ "intersection": p.to_value(), "krein": q.to_value() }), table))
}

fn coin_from(args: &CoinArgs) -> Result<Coin<f64>> {
    match (args.coin, &args.coin_weights) {
        (Some(i), None) => Ok(Coin::Index(i)),
        (None, Some(w)) => Ok(Coin::Weights(inline_or_file::<Distribution<f64>>(w, "coin weights")?.0)),
        _ => bail!("give exactly one of --coin or --coin-weights"),
    }
}

fn hypergroup_of(path: &Path) -> Result<(BoseMesnerDecomposition<f64>, Hypergroup<f64>)> {
    let s: AssociationScheme = load(path, "scheme")?;
    let dec = decompose::<f64>(&s)?;
    let q = krein_parameters(&dec)?;
    let h = hypergroup::hypergroup_from(&dec, &q)?;
    Ok((dec, h))
}

fn walk_hypergroup(
    scheme: &Path,
    coin: &CoinArgs,
    start: usize,
    start_dist: Option<&str>,
    steps: usize,
    csv: bool,
) -> Result<Output> {
    let (_, h) = hypergroup_of(scheme)?;
    let coin = coin_from(coin)?;
    let size = h.size();
    let start = match start_dist {
        Some(arg) => inline_or_file::<Distribution<f64>>(arg, "start distribution")?.0,
        None => {
            if start >= size {
                bail!(CoreError::Parameter(format!("start index {start} is out of range 0..{size}")));
            }
            (0..size).map(|k| if k == start { 1.0 } else { 0.0 }).collect()
        }
    };
    let traj = hypergroup::walk(&h, &coin, &start, steps)?;
    let plancherel = h.plancherel();
    let last = traj.last().expect("walk returns the start");
    let distance = last.iter().zip(&plancherel).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let raw = if csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["step".to_string()];
        header.extend((0..size).map(|k| format!("p{k}")));
        w.write_record(&header)?;
        for (t, v) in traj.iter().enumerate() {
            let mut rec = vec![t.to_string()];
            rec.extend(v.iter().map(|x| x.to_string()));
            w.write_record(&rec)?;
        }
        Some(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
    } else {
        None
    };
    let mut table = String::from("step  distribution\n");
    for (t, v) in traj.iter().enumerate() {
        table += &format!("{t:>4}  {}\n", render::vector(v));
    }
    table += &format!("plancherel {}\nmax distance to plancherel {}\n", render::vector(&plancherel), render::real(distance));
    let json = json!({ "trajectory": traj, "plancherel": plancherel, "distance_to_plancherel": distance });
    Ok(Output { json, table, raw, failure: None })
}

fn qmc_dilate(dist: &str, out: Option<&Path>) -> Result<Output> {
    let p: Distribution<f64> = inline_or_file(dist, "distribution")?;
    let u = qmc::dilation_unitary(&p.0)?;
    if let Some(path) = out {
        save(path, &u)?;
    }
    Ok(Output::new(u.to_value(), render::real_matrix(&u) + "\n"))
}

fn qmc_entangled(transition: &Path, m: &Path, n: &Path, out: Option<&Path>) -> Result<Output> {
    let p: RMatrix<f64> = load(transition, "transition matrix")?;
    let m: CMatrix<f64> = load(m, "M")?;
    let n: CMatrix<f64> = load(n, "N")?;
    let te = TransitionExpectation::new(p)?;
    let result = te.apply(&m, &n)?;
    let closed = te.apply_closed_form(&m, &n)?;
    let gap = bose_mesner::scalar::max_abs(&(&result - &closed));
    if let Some(path) = out {
        save(path, &result)?;
    }
    let mut output = Output::new(
        json!({ "result": result.to_value(), "closed_form_gap": gap }),
        format!("{}\nclosed-form gap {:e}\n", render::complex_matrix(&result), gap),
    );
    if gap > 1e-12 {
        output.failure = Some(format!("Stinespring and closed forms differ by {gap:e}"));
    }
    Ok(output)
}

fn qmc_schur(scheme: &Path, coin: &CoinArgs, rho: &Path, steps: usize, scaling: Scaling) -> Result<Output> {
    let (_, h) = hypergroup_of(scheme)?;
    let coin = coin_from(coin)?;
    let scaling = match scaling {
        Scaling::Idempotent => CoinScaling::Idempotent,
        Scaling::Unit => CoinScaling::UnitDiagonal,
    };
    let channel = SchurChannel::from_coin(&h, &coin, scaling)?;
    let rho0: CMatrix<f64> = load(rho, "density matrix")?;
    let traj = qmc::iterate_channel(&channel, &rho0, steps)?;
    let last = traj.states.last().expect("trajectory includes rho0");
    let mut table = String::from("step  normalization\n");
    for (t, f) in traj.normalization.iter().enumerate() {
        table += &format!("{:>4}  {}\n", t + 1, render::real(*f));
    }
    table += &format!("final state\n{}\n", render::complex_matrix(last));
    let json = json!({
        "normalization": traj.normalization,
        "final_state": last.to_value(),
        "states": traj.states.iter().map(JsonDocument::to_value).collect::<Vec<_>>(),
    });
    Ok(Output::new(json, table))
}

fn szegedy(a: &SzegedyArgs) -> Result<Output> {
    let d: RMatrix<f64> = load(&a.transition, "stochastic matrix")?;
    let convention = match a.convention {
        Convention::Column => Stochastic::Column,
        Convention::Row => Stochastic::Row,
    };
    let w = qmc::szegedy_walk(&d, convention)?;
    if let Some(path) = &a.out {
        save(path, w.unitary())?;
    }
    let unitarity = w.unitarity_defect();
    let table = format!(
        "pair space dimension {}\nunitarity defect {:e}\nprojector defect {:e}\n{}",
        w.unitary().nrows(),
        unitarity,
        w.projector_defect(),
        if a.out.is_none() { render::real_matrix(w.unitary()) + "\n" } else { String::new() },
    );
    let mut output = Output::new(
        json!({
            "unitarity_defect": unitarity,
            "projector_defect": w.projector_defect(),
            "U": w.unitary().to_value(),
        }),
        table,
    );
    if unitarity > 1e-10 {
        output.failure = Some(format!("walk operator is not unitary (defect {unitarity:e})"));
    }
    Ok(output)
}

fn fusion_system(name: &str) -> Result<FusionSystem<f64>> {
    let path = Path::new(name);
    if path.exists() {
        load(path, "fusion system")
    } else {
        Ok(FusionSystem::builtin(name)?)
    }
}

fn anyon(a: &AnyonArgs) -> Result<Output> {
    if let Some(AnyonCommand::Bridge { scheme, system }) = &a.bridge {
        return bridge(scheme, system);
    }
    let name = a.system.as_deref().ok_or_else(|| anyhow!("--system is required"))?;
    let op = a.op.ok_or_else(|| anyhow!("--op is required"))?;
    let fs = fusion_system(name)?;
    let labels = fs.labels().to_vec();
    if op != AnyonOp::Fuse && !a.labels.is_empty() {
        bail!(CoreError::Parameter("labels are only accepted with --op fuse".into()));
    }
    match op {
        AnyonOp::Fuse => {
            let [x, y] = a.labels.as_slice() else {
                bail!(CoreError::Parameter("fuse takes exactly two labels".into()));
            };
            let result = anyons::fuse(&fs, x, y)?;
            let table = result
                .iter()
                .map(|(l, m)| if *m == 1 { l.clone() } else { format!("{m}·{l}") })
                .collect::<Vec<_>>()
                .join(" + ");
            let json: serde_json::Map<String, Value> = result.into_iter().map(|(l, m)| (l, json!(m))).collect();
            Ok(Output::new(Value::Object(json), table + "\n"))
        }
        AnyonOp::Dims => {
            let dims = fs.dims();
            let table = labels.iter().zip(dims).map(|(l, d)| format!("{l}  {}\n", render::real(*d))).collect();
            let json: serde_json::Map<String, Value> = labels.iter().cloned().zip(dims.iter().map(|d| json!(d))).collect();
            Ok(Output::new(Value::Object(json), table))
        }
        AnyonOp::Braid => {
            let b = anyons::braid_generators(&fs)?;
            let basis: Vec<&str> = b.basis.iter().map(|&i| labels[i].as_str()).collect();
            let table = format!(
                "anyon {} basis {:?}\nsigma1\n{}\nsigma2\n{}\nB = F R^2 F^-1\n{}\nunitarity defect {:e}\nbraid relation residual {:e}\n",
                labels[b.anyon],
                basis,
                render::complex_matrix(&b.sigma1),
                render::complex_matrix(&b.sigma2),
                render::complex_matrix(&b.exchange),
                b.unitarity_defect,
                b.braid_residual,
            );
            let mut output = Output::new(
                json!({
                    "anyon": labels[b.anyon],
                    "basis": basis,
                    "sigma1": b.sigma1.to_value(),
                    "sigma2": b.sigma2.to_value(),
                    "B": b.exchange.to_value(),
                    "unitarity_defect": b.unitarity_defect,
                    "braid_residual": b.braid_residual,
                }),
                table,
            );
            if b.unitarity_defect > 1e-12 || b.braid_residual > 1e-10 {
                output.failure = Some("braid generators fail unitarity or the braid relation".into());
            }
            Ok(output)
        }
        AnyonOp::Pentagon | AnyonOp::Hexagon => {
            let (which, rep) = if op == AnyonOp::Pentagon {
                ("pentagon", anyons::verify_pentagon(&fs)?)
            } else {
                ("hexagon", anyons::verify_hexagon(&fs)?)
            };
            let verdict = if rep.passed { "passed" } else { "FAILED" };
            let mut output = Output::new(
                json!({ "check": which, "passed": rep.passed, "max_residual": rep.max_residual, "equations": rep.equations }),
                format!("{which} {verdict}: max residual {:e} over {} equations\n", rep.max_residual, rep.equations),
            );
            if !rep.passed {
                output.failure = Some(format!("{which} residual {:e}", rep.max_residual));
            }
            Ok(output)
        }
    }
}

fn bridge(scheme: &Path, system: &str) -> Result<Output> {
    let s: AssociationScheme = load(scheme, "scheme")?;
    let dec = decompose::<f64>(&s)?;
    let q = krein_parameters(&dec)?;
    let fs = fusion_system(system)?;
    let rep = anyons::scheme_fusion_bridge(&dec, &q, &fs)?;
    let mapping: Vec<String> = rep
        .best
        .mapping
        .iter()
        .enumerate()
        .map(|(label, idx)| format!("{} -> E{idx}", fs.labels()[label]))
        .collect();
    let verdict = if rep.matched { "match" } else { "no integral match" };
    let table = format!(
        "{verdict}\nbest bijection: {}\nscalars {}\ndeviation {:e}\nintegrality deviation {:e}\ncandidates {}\n",
        mapping.join(", "),
        render::vector(&rep.best.scalars),
        rep.best.deviation,
        rep.best.integrality_deviation,
        rep.candidates,
    );
    Ok(Output::new(
        json!({
            "matched": rep.matched,
            "mapping": rep.best.mapping,
            "scalars": rep.best.scalars,
            "deviation": rep.best.deviation,
            "integrality_deviation": rep.best.integrality_deviation,
            "candidates": rep.candidates,
        }),
        table,
    ))
}
