//! `morsecert`: build the worked examples, certify their curvature and
//! Morse structure, analyze links, and run the algebraic oracles.
//!
//! Exit codes: 0 success or certified, 1 checked-and-failed (a witness is
//! printed), 2 usage or I/O error.

mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use morsecert_core::autf::{
    self, freeness_chain, is_inner, phi, pingpong_search, psi, sigma, verify_relations,
    FreeGroupEndo,
};
use morsecert_core::builders::{build_example, BuildError, ExampleSpec};
use morsecert_core::complex::{homology, product_link, LinkComplex};
use morsecert_core::curvature::{certify_2complex, certify_product, CurvatureCertificate, Verdict};
use morsecert_core::group::{
    conjugacy_oracle, element_order, iota, morse_degree, witness, DoubledFreeElement,
};
use morsecert_core::morse::{
    finiteness_report, product_ascending_link, product_descending_link, product_full_link,
    validate_morse,
};
use morsecert_core::symmetry::{certify_model_situation, ModelInput};

#[derive(Parser)]
#[command(
    name = "morsecert",
    version,
    about = "Certify Morse kernels of nonpositively curved complexes and their finite-order symmetries"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit the JSON bundle of a built-in example.
    Build(BuildArgs),
    /// Run a single family of checks.
    Check {
        #[command(subcommand)]
        what: CheckCmd,
    },
    /// Compute the link of the designated vertex.
    Link(LinkArgs),
    /// Reduced integral homology of a link.
    Homology(HomologyArgs),
    /// Finiteness report from the ascending and descending links.
    Finiteness(SourceArgs),
    /// Run the full model-situation certifier.
    Certify(SourceArgs),
    /// List the witness family t^n σ t^-n with its separating invariants.
    Witnesses(WitnessArgs),
    /// Exhaustive algebraic oracles.
    Oracle {
        #[command(subcommand)]
        which: OracleCmd,
    },
    /// Free-group automorphism tools.
    Aut {
        #[command(subcommand)]
        which: AutCmd,
    },
}

#[derive(Args)]
struct SourceArgs {
    /// Built-in example name: raag-N, hexagon, hexagon-product.
    #[arg(long, conflicts_with = "input")]
    example: Option<String>,
    /// Path to a bundle JSON file.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Write the bundle here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CheckCmd {
    /// Curvature certificate (girth condition per factor, product rule).
    Npc(SourceArgs),
    /// Morse weighting diagnostics.
    Morse(SourceArgs),
}

#[derive(Args)]
struct LinkArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Restrict to the ascending link.
    #[arg(long, conflicts_with = "descending")]
    ascending: bool,
    /// Restrict to the descending link.
    #[arg(long)]
    descending: bool,
}

#[derive(Args)]
struct HomologyArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Which link to measure.
    #[arg(long, value_enum, default_value_t = LinkChoice::Ascending)]
    link: LinkChoice,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LinkChoice {
    Full,
    Ascending,
    Descending,
}

#[derive(Args)]
struct WitnessArgs {
    /// How many witnesses to list (n = 0..count-1).
    #[arg(long, default_value_t = 4)]
    count: u32,
    /// Number of free-group coordinates.
    #[arg(long, default_value_t = 2)]
    rank: usize,
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Exhaustive bounded conjugacy search.
    Conjugacy(ConjugacyArgs),
}

#[derive(Args)]
struct ConjugacyArgs {
    /// Total letter-length bound for candidate conjugators.
    #[arg(long, default_value_t = 6)]
    max_len: usize,
    /// Number of free-group coordinates.
    #[arg(long, default_value_t = 2)]
    rank: usize,
    /// Left element: witness index n (uses t^n σ t^-n).
    #[arg(long, conflicts_with = "g")]
    witness_a: Option<i64>,
    /// Right element: witness index m.
    #[arg(long, conflicts_with = "h")]
    witness_b: Option<i64>,
    /// Left element as JSON, e.g. '{"coords":["a b^-1","1"],"flip":true}'.
    #[arg(long)]
    g: Option<String>,
    /// Right element as JSON.
    #[arg(long)]
    h: Option<String>,
    /// Restrict candidate conjugators to the kernel (Morse degree 0).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    kernel: bool,
}

#[derive(Subcommand)]
enum AutCmd {
    /// Verify the defining relations at a given rank.
    Verify {
        #[arg(long)]
        k: usize,
    },
    /// Abelianization matrix of a builder or a supplied endomorphism.
    Abelianize(AbelianizeArgs),
    /// Search for a ping-pong freeness certificate for the two
    /// abelianized generator matrices.
    Pingpong {
        #[arg(long, default_value_t = 16)]
        max_n: u32,
    },
    /// Decide whether an endomorphism is an inner automorphism.
    Inner(InnerArgs),
}

#[derive(Args)]
struct AbelianizeArgs {
    /// Builder name: phi, psi, sigma.
    #[arg(long, conflicts_with = "endo")]
    gen: Option<String>,
    /// Pair index for phi/psi.
    #[arg(long, default_value_t = 1)]
    i: usize,
    /// Rank of the free group.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Endomorphism as JSON, e.g. '{"rank":2,"images":{"x1":"x1 x2"}}'.
    #[arg(long)]
    endo: Option<String>,
}

#[derive(Args)]
struct InnerArgs {
    /// Endomorphism as JSON.
    #[arg(long, conflicts_with = "endo_file")]
    endo: Option<String>,
    /// Path to an endomorphism JSON file.
    #[arg(long)]
    endo_file: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[derive(Debug)]
struct CliError(String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn load_input(source: &SourceArgs) -> Result<(String, ModelInput), CliError> {
    let spec = match (&source.example, &source.input) {
        (Some(name), None) => ExampleSpec::parse(name).map_err(|e| CliError(e.to_string()))?,
        (None, Some(path)) => ExampleSpec::Custom { path: path.clone() },
        _ => {
            return Err(CliError(
                "exactly one of --example or --input is required".into(),
            ))
        }
    };
    let built = build_example(&spec).map_err(|e: BuildError| CliError(e.to_string()))?;
    Ok((built.name, built.input))
}

fn emit<T: Serialize>(cli: &Cli, value: &T, text: impl FnOnce() -> String) -> Result<(), CliError> {
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value)?),
        Format::Text => println!("{}", text()),
    }
    Ok(())
}

const OK: ExitCode = ExitCode::SUCCESS;
const CHECK_FAILED: ExitCode = ExitCode::FAILURE;

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    match &cli.cmd {
        Cmd::Build(args) => {
            let (_, input) = load_input(&args.source)?;
            let rendered = serde_json::to_string_pretty(&input)?;
            match &args.out {
                Some(path) => std::fs::write(path, rendered + "\n")
                    .map_err(|e| CliError(format!("cannot write {}: {e}", path.display())))?,
                None => println!("{rendered}"),
            }
            Ok(OK)
        }
        Cmd::Check { what } => match what {
            CheckCmd::Npc(source) => {
                let (_, input) = load_input(source)?;
                let cert = curvature_certificate(&input)?;
                let failed = cert.verdict == Verdict::Fail;
                emit(cli, &cert, || render::curvature(&cert))?;
                Ok(if failed { CHECK_FAILED } else { OK })
            }
            CheckCmd::Morse(source) => {
                let (_, input) = load_input(source)?;
                let mut diagnostics: Vec<String> = Vec::new();
                for (i, (c, w)) in input.factors.iter().zip(&input.weightings).enumerate() {
                    for v in validate_morse(c, w) {
                        diagnostics.push(format!("factor {i}: {v}"));
                    }
                }
                #[derive(Serialize)]
                struct MorseCheck {
                    valid: bool,
                    diagnostics: Vec<String>,
                }
                let report = MorseCheck {
                    valid: diagnostics.is_empty(),
                    diagnostics,
                };
                let ok = report.valid;
                emit(cli, &report, || {
                    if ok {
                        "Morse weighting valid: every face closes up with unimodal heights"
                            .to_string()
                    } else {
                        format!(
                            "Morse weighting invalid:\n  {}",
                            report.diagnostics.join("\n  ")
                        )
                    }
                })?;
                Ok(if ok { OK } else { CHECK_FAILED })
            }
        },
        Cmd::Link(args) => {
            let (_, input) = load_input(&args.source)?;
            let link = select_link(
                &input,
                if args.ascending {
                    LinkChoice::Ascending
                } else if args.descending {
                    LinkChoice::Descending
                } else {
                    LinkChoice::Full
                },
            )?;
            let view = render::link_view(&link);
            emit(cli, &view, || render::link_text(&view))?;
            Ok(OK)
        }
        Cmd::Homology(args) => {
            let (_, input) = load_input(&args.source)?;
            let link = select_link(&input, args.link)?;
            let profile = homology(link.base());
            emit(cli, &profile, || render::homology(&profile))?;
            Ok(OK)
        }
        Cmd::Finiteness(source) => {
            let (_, input) = load_input(source)?;
            let p = input.product();
            let asc = product_ascending_link(&p, &input.weightings, &input.base_vertices)
                .map_err(|e| CliError(e.to_string()))?;
            let desc = product_descending_link(&p, &input.weightings, &input.base_vertices)
                .map_err(|e| CliError(e.to_string()))?;
            let report = finiteness_report(&asc, &desc);
            emit(cli, &report, || render::finiteness(&report))?;
            Ok(OK)
        }
        Cmd::Certify(source) => {
            let (name, input) = load_input(source)?;
            let cert = certify_model_situation(&input).map_err(|e| CliError(e.to_string()))?;
            let certified = cert.checks.all();
            emit(cli, &cert, || render::certificate(&name, &cert))?;
            Ok(if certified { OK } else { CHECK_FAILED })
        }
        Cmd::Witnesses(args) => {
            let t = DoubledFreeElement::standard_t(args.rank.max(1));
            #[derive(Serialize)]
            struct WitnessRow {
                n: i64,
                element: DoubledFreeElement,
                iota: i64,
                degree: i64,
                order: Option<u64>,
            }
            let mut rows = Vec::new();
            for n in 0..args.count as i64 {
                let w = witness(n, &t).map_err(|e| CliError(e.to_string()))?;
                rows.push(WitnessRow {
                    n,
                    iota: iota(&w).map_err(|e| CliError(e.to_string()))?,
                    degree: morse_degree(&w),
                    order: element_order(&w, 16),
                    element: w,
                });
            }
            emit(cli, &rows, || {
                rows.iter()
                    .map(|r| {
                        format!(
                            "n={}: {}  (ι={}, degree={}, order={})",
                            r.n,
                            r.element,
                            r.iota,
                            r.degree,
                            r.order.map_or("∞".into(), |d| d.to_string())
                        )
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            })?;
            Ok(OK)
        }
        Cmd::Oracle { which } => match which {
            OracleCmd::Conjugacy(args) => {
                let t = DoubledFreeElement::standard_t(args.rank.max(1));
                let parse_side = |json: &Option<String>,
                                  widx: &Option<i64>|
                 -> Result<DoubledFreeElement, CliError> {
                    match (json, widx) {
                        (Some(s), None) => Ok(serde_json::from_str(s)?),
                        (None, Some(n)) => witness(*n, &t).map_err(|e| CliError(e.to_string())),
                        _ => Err(CliError(
                            "give exactly one of --witness-a/--g (and --witness-b/--h)".into(),
                        )),
                    }
                };
                let g = parse_side(&args.g, &args.witness_a)?;
                let h = parse_side(&args.h, &args.witness_b)?;
                let verdict = conjugacy_oracle(&g, &h, args.max_len, args.kernel)
                    .map_err(|e| CliError(e.to_string()))?;
                emit(cli, &verdict, || render::conjugacy(&g, &h, &verdict))?;
                Ok(OK)
            }
        },
        Cmd::Aut { which } => match which {
            AutCmd::Verify { k } => {
                let report = verify_relations(*k).map_err(|e| CliError(e.to_string()))?;
                let ok = report.all_hold;
                emit(cli, &report, || render::relations(&report))?;
                Ok(if ok { OK } else { CHECK_FAILED })
            }
            AutCmd::Abelianize(args) => {
                let endo = parse_endo_choice(args)?;
                let m = endo.abelianization();
                emit(cli, &m, || render::matrix(&m))?;
                Ok(OK)
            }
            AutCmd::Pingpong { max_n } => {
                let a = phi(1, 2)
                    .map_err(|e| CliError(e.to_string()))?
                    .abelianization();
                let b = psi(1, 2)
                    .map_err(|e| CliError(e.to_string()))?
                    .abelianization();
                match pingpong_search(&a, &b, *max_n).map_err(|e| CliError(e.to_string()))? {
                    Some(cert) => {
                        let chain = freeness_chain(&a, &b, Some(&cert))
                            .map_err(|e| CliError(e.to_string()))?;
                        #[derive(Serialize)]
                        struct PingPongOut {
                            certificate: autf::PingPongCertificate,
                            chain: autf::FreenessChain,
                        }
                        let out = PingPongOut {
                            certificate: cert,
                            chain,
                        };
                        emit(cli, &out, || render::pingpong(&out.certificate, &out.chain))?;
                        Ok(OK)
                    }
                    None => {
                        emit(cli, &serde_json::json!({"certificate": null}), || {
                            format!("no ping-pong certificate up to N = {max_n}")
                        })?;
                        Ok(CHECK_FAILED)
                    }
                }
            }
            AutCmd::Inner(args) => {
                let endo: FreeGroupEndo = match (&args.endo, &args.endo_file) {
                    (Some(s), None) => serde_json::from_str(s)?,
                    (None, Some(path)) => {
                        let raw = std::fs::read_to_string(path).map_err(|e| {
                            CliError(format!("cannot read {}: {e}", path.display()))
                        })?;
                        serde_json::from_str(&raw)?
                    }
                    _ => return Err(CliError("give exactly one of --endo or --endo-file".into())),
                };
                let verdict = is_inner(&endo);
                emit(cli, &verdict, || render::inner(&verdict))?;
                Ok(OK)
            }
        },
    }
}

fn curvature_certificate(input: &ModelInput) -> Result<CurvatureCertificate, CliError> {
    input.check_arities().map_err(|e| CliError(e.to_string()))?;
    let certs: Vec<CurvatureCertificate> = input
        .factors
        .iter()
        .zip(&input.angles)
        .map(|(c, a)| certify_2complex(c, a))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError(e.to_string()))?;
    certify_product(&input.product(), &certs).map_err(|e| CliError(e.to_string()))
}

fn select_link(input: &ModelInput, choice: LinkChoice) -> Result<LinkComplex, CliError> {
    let p = input.product();
    let link = match choice {
        LinkChoice::Full => {
            // tag polarity when the weighting is valid, else plain
            let all_valid = input
                .factors
                .iter()
                .zip(&input.weightings)
                .all(|(c, w)| validate_morse(c, w).is_empty());
            if all_valid {
                product_full_link(&p, &input.weightings, &input.base_vertices)
                    .map_err(|e| CliError(e.to_string()))?
            } else {
                product_link(&p, &input.base_vertices).map_err(|e| CliError(e.to_string()))?
            }
        }
        LinkChoice::Ascending => {
            product_ascending_link(&p, &input.weightings, &input.base_vertices)
                .map_err(|e| CliError(e.to_string()))?
        }
        LinkChoice::Descending => {
            product_descending_link(&p, &input.weightings, &input.base_vertices)
                .map_err(|e| CliError(e.to_string()))?
        }
    };
    Ok(link)
}

fn parse_endo_choice(args: &AbelianizeArgs) -> Result<FreeGroupEndo, CliError> {
    match (&args.gen, &args.endo) {
        (Some(name), None) => match name.as_str() {
            "phi" => phi(args.i, args.k).map_err(|e| CliError(e.to_string())),
            "psi" => psi(args.i, args.k).map_err(|e| CliError(e.to_string())),
            "sigma" => Ok(sigma(args.k)),
            other => Err(CliError(format!(
                "unknown builder {other:?} (expected phi, psi, sigma)"
            ))),
        },
        (None, Some(json)) => Ok(serde_json::from_str(json)?),
        _ => Err(CliError("give exactly one of --gen or --endo".into())),
    }
}
