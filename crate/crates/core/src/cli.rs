//! Command-line front end. Every command prints one JSON report on standard
//! output, `{"command", "inputs", "result", "paper_ref"}`, and maps its outcome
//! to an exit code: 0 success, 1 refuted or nothing found within the bound,
//! 2 bad input.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::abranes::{anomaly_check_affine, check_abrane, wedge_characterization, AffineBrane};
use crate::cohomology::{
    beta_torsion, fm_transform, hodge_diamond, lefschetz_kernel_dim, mirror_class_condition,
    rational_pp_classes, CohClass, CohClassJson,
};
use crate::equivalence::{
    search_relation, spectrum_fingerprint, verify_map, LatticeMap, RelationKind, SearchOptions,
    SearchOutcome, DEFAULT_NODE_BUDGET,
};
use crate::error::{HmsError, Result};
use crate::exact::{binomial, RatMatrix};
use crate::fock::{verify_all, HalfInt, TruncatedFock, Verdict};
use crate::tduality::{find_lagrangian_splitting, mirror_via_tduality, LagrangianSplitting};
use crate::torus::TorusData;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

const DEFAULT_BOUND: u32 = 2;
const DEFAULT_FINGERPRINT_HEIGHT: u32 = 2;

#[derive(Parser, Debug)]
#[command(name = "torus-hms", version, about = "Exact checks on flat complex tori")]
pub struct Cli {
    /// TOML or JSON file with `bound`, `node_budget`, `fingerprint_height`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Accepted for compatibility; JSON is the only output format.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// Entry bound for the intertwiner coefficients.
    #[arg(long)]
    pub bound: Option<u32>,
    #[arg(long)]
    pub node_budget: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the torus data invariants.
    Validate { torus: PathBuf },
    /// Print q, calI, calJ, calItilde and the Narain form.
    Doubled { torus: PathBuf },
    /// Spectrum fingerprint up to a charge height.
    Spectrum {
        torus: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FINGERPRINT_HEIGHT)]
        height: u32,
    },
    CheckIso {
        source: PathBuf,
        target: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    CheckMirror {
        source: PathBuf,
        target: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    CheckDerivedEq {
        source: PathBuf,
        target: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Re-check a lattice map or certificate.
    VerifyMap {
        source: PathBuf,
        target: PathBuf,
        #[arg(long)]
        map: PathBuf,
    },
    /// Mirror partner by T-duality along `A` in the splitting `A|B`.
    Mirror {
        #[arg(long)]
        torus: PathBuf,
        /// `"a1;a2|b1;b2"` with comma-separated vectors, or `auto`.
        #[arg(long)]
        split: String,
        #[arg(long)]
        out_torus: Option<PathBuf>,
        #[arg(long)]
        out_certificate: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    Hodge { torus: PathBuf },
    PpClasses {
        torus: PathBuf,
        #[arg(long)]
        p: usize,
    },
    Lefschetz { torus: PathBuf },
    /// Fourier–Mukai image of a class along the splitting.
    Fm {
        #[arg(long)]
        torus: PathBuf,
        #[arg(long)]
        split: String,
        #[arg(long)]
        class: PathBuf,
    },
    /// `ι_{ω⁻¹}α′ − ω∧α′ = 0` on a class of the mirror.
    CheckMirrorClass {
        #[arg(long)]
        torus: PathBuf,
        #[arg(long)]
        class: PathBuf,
    },
    Beta { torus: PathBuf },
    AbraneCheck {
        #[arg(long)]
        brane: PathBuf,
        /// Overrides the brane's `torus_ref`.
        #[arg(long)]
        torus: Option<PathBuf>,
    },
    /// All CCR/CAR identities on a truncated Fock space.
    FockVerify {
        #[arg(long)]
        d: usize,
        /// Level cap, an integer or `n/2`.
        #[arg(long)]
        cap: String,
        /// Torus providing the metric; the identity metric otherwise.
        #[arg(long)]
        torus: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Doubled { .. } => "doubled",
            Command::Spectrum { .. } => "spectrum",
            Command::CheckIso { .. } => "check-iso",
            Command::CheckMirror { .. } => "check-mirror",
            Command::CheckDerivedEq { .. } => "check-derived-eq",
            Command::VerifyMap { .. } => "verify-map",
            Command::Mirror { .. } => "mirror",
            Command::Hodge { .. } => "hodge",
            Command::PpClasses { .. } => "pp-classes",
            Command::Lefschetz { .. } => "lefschetz",
            Command::Fm { .. } => "fm",
            Command::CheckMirrorClass { .. } => "check-mirror-class",
            Command::Beta { .. } => "beta",
            Command::AbraneCheck { .. } => "abrane-check",
            Command::FockVerify { .. } => "fock-verify",
        }
    }

    fn paper_ref(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "flat Kähler torus data (T, I, G, B)",
            Command::Doubled { .. } => "complex structures calI, calJ on the doubled lattice",
            Command::Spectrum { .. } => "zero-mode momenta and charge lattice",
            Command::CheckIso { .. } => "lattice criterion for isomorphic N=2 SCFTs",
            Command::CheckMirror { .. } => "lattice criterion for mirror N=2 SCFTs",
            Command::CheckDerivedEq { .. } => "derived equivalence of complex tori via calItilde",
            Command::VerifyMap { .. } => "lattice criteria for isomorphism, mirror symmetry and derived equivalence",
            Command::Mirror { .. } => "T-duality along a Lagrangian factor",
            Command::Hodge { .. } => "Hodge numbers of a complex torus",
            Command::PpClasses { .. } => "rational (p,p) classes and the image of the Chern character",
            Command::Lefschetz { .. } => "Lefschetz map wedge omega in middle degree",
            Command::Fm { .. } => "cohomological Fourier–Mukai transform",
            Command::CheckMirrorClass { .. } => "mirror image of (p,p) classes",
            Command::Beta { .. } => "B-field class beta(B) in H^2(X, O*)",
            Command::AbraneCheck { .. } => "coisotropic A-brane conditions (i)-(iii)",
            Command::FockVerify { .. } => "oscillator algebras on the Fock space",
        }
    }
}

/// Search and fingerprint settings from the optional config sidecar.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub bound: Option<u32>,
    pub node_budget: Option<u64>,
    pub fingerprint_height: Option<u32>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        if path.extension().is_some_and(|e| e == "toml") {
            let de = toml::Deserializer::new(&text);
            serde_path_to_error::deserialize(de)
                .map_err(|e| HmsError::Parse(format!("{}: at `{}`: {}", path.display(), e.path(), e.inner())))
        } else {
            parse_json(path, &text)
        }
    }

    fn search(&self, args: &SearchArgs) -> SearchOptions {
        SearchOptions {
            bound: args.bound.or(self.bound).unwrap_or(DEFAULT_BOUND),
            node_budget: args.node_budget.or(self.node_budget).unwrap_or(DEFAULT_NODE_BUDGET),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| HmsError::Parse(format!("{}: {e}", path.display())))
}

fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| HmsError::Parse(format!("{}: at `{}`: {}", path.display(), e.path(), e.inner())))
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    parse_json(path, &read(path)?)
}

/// Parse a torus file and check its shapes (not its invariants).
pub fn load_torus_unchecked(path: &Path) -> Result<TorusData> {
    let t: TorusData = load_json(path)?;
    t.check_shapes()?;
    Ok(t)
}

pub fn load_torus(path: &Path) -> Result<TorusData> {
    let t = load_torus_unchecked(path)?;
    t.ensure_valid()?;
    Ok(t)
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(v).expect("serializable") + "\n";
    fs::write(path, text)?;
    Ok(())
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn exit_for(err: &HmsError) -> i32 {
    match err {
        HmsError::BudgetExceeded { .. } | HmsError::Recovery { .. } => EXIT_REFUTED,
        _ => EXIT_INPUT,
    }
}

fn error_kind(err: &HmsError) -> &'static str {
    match err {
        HmsError::Dimension(_) => "dimension",
        HmsError::Grade(_) => "grade",
        HmsError::Parse(_) => "parse",
        HmsError::InvalidTorus(_) => "invalid_torus",
        HmsError::Precondition(_) => "precondition",
        HmsError::BudgetExceeded { .. } => "budget_exceeded",
        HmsError::Recovery { .. } => "recovery",
        HmsError::Truncation(_) => "truncation",
        HmsError::Inconsistency(_) => "inconsistency",
        HmsError::Io(_) => "io",
    }
}

fn inputs_of(cmd: &Command) -> Value {
    let s = |o: &SearchArgs| json!({ "bound": o.bound, "node_budget": o.node_budget });
    match cmd {
        Command::Validate { torus }
        | Command::Doubled { torus }
        | Command::Hodge { torus }
        | Command::Lefschetz { torus }
        | Command::Beta { torus } => json!({ "torus": path_str(torus) }),
        Command::Spectrum { torus, height } => json!({ "torus": path_str(torus), "height": height }),
        Command::CheckIso { source, target, search }
        | Command::CheckMirror { source, target, search }
        | Command::CheckDerivedEq { source, target, search } => {
            json!({ "source": path_str(source), "target": path_str(target), "search": s(search) })
        }
        Command::VerifyMap { source, target, map } => {
            json!({ "source": path_str(source), "target": path_str(target), "map": path_str(map) })
        }
        Command::Mirror { torus, split, out_torus, out_certificate, search } => json!({
            "torus": path_str(torus),
            "split": split,
            "out_torus": out_torus.as_deref().map(path_str),
            "out_certificate": out_certificate.as_deref().map(path_str),
            "search": s(search),
        }),
        Command::PpClasses { torus, p } => json!({ "torus": path_str(torus), "p": p }),
        Command::Fm { torus, split, class } => {
            json!({ "torus": path_str(torus), "split": split, "class": path_str(class) })
        }
        Command::CheckMirrorClass { torus, class } => {
            json!({ "torus": path_str(torus), "class": path_str(class) })
        }
        Command::AbraneCheck { brane, torus } => {
            json!({ "brane": path_str(brane), "torus": torus.as_deref().map(path_str) })
        }
        Command::FockVerify { d, cap, torus } => {
            json!({ "d": d, "cap": cap, "torus": torus.as_deref().map(path_str) })
        }
    }
}

fn splitting(t: &TorusData, spec: &str, bound: u32) -> Result<LagrangianSplitting> {
    if spec.trim() == "auto" {
        return find_lagrangian_splitting(t, bound)?.ok_or_else(|| {
            HmsError::Precondition(format!("no Lagrangian splitting with entries bounded by {bound}"))
        });
    }
    LagrangianSplitting::parse(spec)
}

fn relation(kind: RelationKind, source: &Path, target: &Path, cfg: &Config, search: &SearchArgs) -> Result<(i32, Value)> {
    let t1 = load_torus(source)?;
    let t2 = load_torus(target)?;
    if t1.d != t2.d {
        return Err(HmsError::Dimension(format!("d = {} vs d = {}", t1.d, t2.d)));
    }
    let opts = cfg.search(search);
    log::info!("searching for a {kind} certificate with bound {}", opts.bound);
    let outcome = search_relation(&t1, &t2, kind, opts)?;
    let mut result = to_value(&outcome);
    let code = match &outcome {
        SearchOutcome::Found { .. } => EXIT_OK,
        SearchOutcome::NoneWithinBound { .. } => {
            result["verdict"] = json!("none within bound");
            if kind != RelationKind::DerivedEq {
                // Both relations preserve the spectrum of (q, p²/2, p̄²/2).
                let h = cfg.fingerprint_height.unwrap_or(DEFAULT_FINGERPRINT_HEIGHT);
                let same = spectrum_fingerprint(&t1, h)? == spectrum_fingerprint(&t2, h)?;
                result["fingerprint"] = json!({
                    "height": h,
                    "match": same,
                    "note": if same {
                        "spectra agree up to this height"
                    } else {
                        "spectrum fingerprint mismatch: no relation of this kind exists"
                    },
                });
            }
            EXIT_REFUTED
        }
    };
    Ok((code, result))
}

fn execute(cmd: &Command, cfg: &Config) -> Result<(i32, Value)> {
    match cmd {
        Command::Validate { torus } => {
            let t = load_torus_unchecked(torus)?;
            let report = t.validate()?;
            let code = if report.ok { EXIT_OK } else { EXIT_REFUTED };
            let mut v = to_value(&report);
            v["first_failure"] = json!(report.first_failure());
            Ok((code, v))
        }
        Command::Doubled { torus } => {
            let t = load_torus(torus)?;
            let mut v = to_value(&t.doubled()?);
            v["narain_form"] = to_value(&t.narain_form()?);
            Ok((EXIT_OK, v))
        }
        Command::Spectrum { torus, height } => {
            let t = load_torus(torus)?;
            let fp = spectrum_fingerprint(&t, *height)?;
            Ok((EXIT_OK, json!({ "height": height, "entries": fp })))
        }
        Command::CheckIso { source, target, search } => relation(RelationKind::Iso, source, target, cfg, search),
        Command::CheckMirror { source, target, search } => {
            relation(RelationKind::Mirror, source, target, cfg, search)
        }
        Command::CheckDerivedEq { source, target, search } => {
            relation(RelationKind::DerivedEq, source, target, cfg, search)
        }
        Command::VerifyMap { source, target, map } => {
            let t1 = load_torus(source)?;
            let t2 = load_torus(target)?;
            let m: LatticeMap = load_json(map)?;
            let cert = verify_map(&t1, &t2, &m)?;
            Ok((if cert.valid { EXIT_OK } else { EXIT_REFUTED }, to_value(&cert)))
        }
        Command::Mirror { torus, split, out_torus, out_certificate, search } => {
            let t = load_torus(torus)?;
            let s = splitting(&t, split, cfg.search(search).bound)?;
            let m = mirror_via_tduality(&t, &s)?;
            if let Some(p) = out_torus {
                write_json(p, &m.mirror)?;
            }
            if let Some(p) = out_certificate {
                write_json(p, &m.duality_map)?;
            }
            let code = if m.duality_map.valid { EXIT_OK } else { EXIT_REFUTED };
            let mut v = to_value(&m);
            v["splitting"] = to_value(&s);
            Ok((code, v))
        }
        Command::Hodge { torus } => {
            let t = load_torus(torus)?;
            Ok((EXIT_OK, to_value(&hodge_diamond(&t)?)))
        }
        Command::PpClasses { torus, p } => {
            let t = load_torus(torus)?;
            if *p > t.d {
                return Err(HmsError::Precondition(format!("p = {p} exceeds d = {}", t.d)));
            }
            let classes: Vec<CohClassJson> = rational_pp_classes(&t, *p)?.iter().map(CohClass::to_json).collect();
            Ok((EXIT_OK, json!({ "p": p, "dimension": classes.len(), "basis": classes })))
        }
        Command::Lefschetz { torus } => {
            let t = load_torus(torus)?;
            let n = t.d;
            let dim = lefschetz_kernel_dim(&t)?;
            let expected = binomial(2 * n, n) - binomial(2 * n, n + 2);
            Ok((EXIT_OK, json!({ "kernel_dim": dim, "expected": expected, "agrees": dim == expected })))
        }
        Command::Fm { torus, split, class } => {
            let t = load_torus(torus)?;
            let s = splitting(&t, split, DEFAULT_BOUND)?;
            let c: CohClassJson = load_json(class)?;
            let alpha = CohClass::from_json(&c, t.rank())?;
            let image = fm_transform(&t, &s, &alpha)?;
            Ok((EXIT_OK, json!({ "image": image.to_json(), "splitting": s })))
        }
        Command::CheckMirrorClass { torus, class } => {
            let t = load_torus(torus)?;
            let c: CohClassJson = load_json(class)?;
            let alpha = CohClass::from_json(&c, t.rank())?;
            let r = mirror_class_condition(&t, &alpha)?;
            let residual = CohClass::new(r.residual).to_json();
            Ok((if r.holds { EXIT_OK } else { EXIT_REFUTED }, json!({ "holds": r.holds, "residual": residual })))
        }
        Command::Beta { torus } => {
            let t = load_torus(torus)?;
            Ok((EXIT_OK, to_value(&beta_torsion(&t)?)))
        }
        Command::AbraneCheck { brane, torus } => {
            let b: AffineBrane = load_json(brane)?;
            let tpath = match torus {
                Some(p) => p.clone(),
                None if !b.torus_ref.is_empty() => {
                    brane.parent().unwrap_or_else(|| Path::new(".")).join(&b.torus_ref)
                }
                None => return Err(HmsError::Parse("brane has no torus_ref and no --torus given".into())),
            };
            let t = load_torus(&tpath)?;
            let report = check_abrane(&t, &b)?;
            let mut v = to_value(&report);
            if let Some(rej) = &report.rejection {
                v["rejected_by"] = json!(rej.name());
            }
            if report.accepted {
                v["wedge_characterization"] = to_value(&wedge_characterization(&t, &b)?);
                v["anomaly"] = to_value(&anomaly_check_affine(&t, &b)?);
            }
            Ok((if report.accepted { EXIT_OK } else { EXIT_REFUTED }, v))
        }
        Command::FockVerify { d, cap, torus } => {
            let cap: HalfInt = cap.parse()?;
            let metric = match torus {
                Some(p) => {
                    let t = load_torus(p)?;
                    if t.d != *d {
                        return Err(HmsError::Dimension(format!("--d {d} but the torus has d = {}", t.d)));
                    }
                    t.metric
                }
                None => RatMatrix::identity(2 * d),
            };
            let space = TruncatedFock::new(*d, cap, metric)?;
            let checks = verify_all(&space)?;
            let count = |v: Verdict| checks.iter().filter(|c| c.verdict == v).count();
            let fails = count(Verdict::Fail);
            let v = json!({
                "pass": count(Verdict::Pass),
                "fail": fails,
                "inconclusive": count(Verdict::Inconclusive),
                "checks": checks,
            });
            Ok((if fails == 0 { EXIT_OK } else { EXIT_REFUTED }, v))
        }
    }
}

/// Run one command; returns the exit code and the text for standard output.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            return (code, e.render().to_string());
        }
    };
    run_cli(&cli)
}

pub fn run_cli(cli: &Cli) -> (i32, String) {
    let cmd = &cli.command;
    let outcome = match &cli.config {
        Some(p) => Config::load(p),
        None => Ok(Config::default()),
    }
    .and_then(|cfg| execute(cmd, &cfg));
    let (code, result) = match outcome {
        Ok(r) => r,
        Err(e) => {
            log::error!("{}: {e}", cmd.name());
            (exit_for(&e), json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } }))
        }
    };
    let report = json!({
        "command": cmd.name(),
        "inputs": inputs_of(cmd),
        "result": result,
        "paper_ref": cmd.paper_ref(),
    });
    (code, serde_json::to_string_pretty(&report).expect("serializable") + "\n")
}
