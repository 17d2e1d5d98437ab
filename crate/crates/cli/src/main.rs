//! Command-line surface: verification suites, representation tables,
//! bracket-kernel profiles, and finite-group induction reports.
//!
//! Exit codes: 0 on success, 1 when a verification or verdict fails,
//! 2 on configuration errors.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use poincare_core::irreps::{extract_sigma, gamma_matrices, sym_power, SpinLabel};
use poincare_core::linalg::Mat2;
use poincare_core::mackey_finite::{FiniteGroup, SemidirectProduct};
use poincare_core::minkowski::{covering_map, FourVector, SL2C};
use poincare_core::orbits::{boost, BoostChoice};
use poincare_core::schema::{MatrixSchema, SCHEMA_VERSION};
use poincare_core::spinstat::{
    bracket_kernel, BracketSign, KernelConfig, VerdictReport,
};
use poincare_core::verification::{run_all, VerifyConfig};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "poincare",
    about = "Unitary representations of the inhomogeneous Lorentz group: verification suites, tables, spin-statistics kernels, finite Mackey reports",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full invariant suites of every module and report residuals.
    Verify(VerifyArgs),
    /// Dump representation matrices, sigma/gamma families, or boosts as JSON.
    Table(TableArgs),
    /// Bracket-kernel profile at a separation: CSV of damped values per sign
    /// plus a locality verdict.
    Bracket(BracketArgs),
    /// Verify the induced-representation classification on a finite
    /// semidirect product.
    Mackey(MackeyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Seed for the randomized suites (reports are reproducible).
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    /// Momentum cutoff of the grids, in units of the mass.
    #[arg(long, default_value_t = 6.0)]
    pmax: f64,
    #[arg(long, default_value_t = 32)]
    radial: usize,
    /// Damping sequence in units of 1/m^2, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.2, 0.1, 0.05, 0.025])]
    eps_seq: Vec<f64>,
    /// Smaller trial counts, for smoke runs.
    #[arg(long)]
    quick: bool,
    /// Negative-control hook: corrupt the symplectic-matrix convention.
    #[arg(long, hide = true)]
    corrupt_epsilon: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, value_enum)]
    what: TableKind,
    #[arg(long, default_value_t = 1)]
    twice_spin: u32,
    /// 2x2 matrix as JSON `[[re,im],[re,im],[re,im],[re,im]]` (row-major),
    /// identity when omitted.
    #[arg(long)]
    a_matrix: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    /// Spatial momentum `px,py,pz` for boost tables.
    #[arg(long, value_delimiter = ',')]
    momentum: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = Section::Canonical)]
    section: Section,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableKind {
    SpinRep,
    HatRep,
    Sigma,
    Gamma,
    Boost,
}

#[derive(Clone, Copy, ValueEnum)]
enum Section {
    Canonical,
    Helicity,
}

#[derive(Args)]
struct BracketArgs {
    #[arg(long, default_value_t = 0)]
    twice_spin: u32,
    /// Separation `t,x,y,z`.
    #[arg(long, value_delimiter = ',', required = true)]
    xi: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.2, 0.1, 0.05, 0.025])]
    eps_seq: Vec<f64>,
    /// Lower bound on radial quadrature nodes.
    #[arg(long, default_value_t = 48)]
    radial: usize,
    /// Lower bound on polar quadrature nodes.
    #[arg(long, default_value_t = 24)]
    angular: usize,
    /// Required wrong/right magnitude ratio for a PASS verdict.
    #[arg(long, default_value_t = 1e3)]
    ratio: f64,
    /// `|xi.xi|` floor below which only a warning is emitted.
    #[arg(long, default_value_t = 0.05)]
    cone_floor: f64,
    /// Output base path: writes `<out>.csv` and `<out>.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MackeyArgs {
    /// Builtin group: S3, D4, A4, Z5:Z4, Heis3.
    #[arg(long, conflicts_with = "group_file")]
    group: Option<String>,
    /// JSON file `{"A": table, "H": table, "action": table}`, 0-based
    /// element indices.
    #[arg(long)]
    group_file: Option<PathBuf>,
    /// Use exact root-of-unity arithmetic where available.
    #[arg(long, default_value_t = true)]
    exact: bool,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Write atomically: temp file in the target directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into()),
        std::process::id()
    ));
    std::fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn emit(out: Option<&PathBuf>, contents: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(contents.as_bytes())?;
            if !contents.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<ExitCode> {
    let cfg = VerifyConfig {
        seed: args.seed,
        mass: args.mass,
        p_max_factor: args.pmax,
        n_radial: args.radial,
        eps_seq: args.eps_seq.clone(),
        corrupt_epsilon: args.corrupt_epsilon,
        quick: args.quick,
    };
    let report = run_all(&cfg)?;
    let body = match args.format {
        Format::Json => serde_json::to_string_pretty(&report)?,
        Format::Csv => {
            let mut s = String::from("module,name,tolerance,residual,pass\n");
            for r in &report.results {
                s.push_str(&format!(
                    "{},{},{:e},{:e},{}\n",
                    r.module, r.name, r.tolerance, r.residual, r.pass
                ));
            }
            s
        }
    };
    emit(args.out.as_ref(), &body)?;
    for r in report.results.iter().filter(|r| !r.pass) {
        eprintln!(
            "FAIL {}.{}: residual {:e} exceeds {:e}",
            r.module, r.name, r.residual, r.tolerance
        );
    }
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn parse_a_matrix(text: &str) -> anyhow::Result<SL2C<f64>> {
    let entries: Vec<[f64; 2]> = serde_json::from_str(text).context("parsing --a-matrix")?;
    if entries.len() != 4 {
        return Err(anyhow!("--a-matrix needs exactly four [re,im] entries"));
    }
    let c = |i: usize| Complex::new(entries[i][0], entries[i][1]);
    SL2C::new(Mat2::new(c(0), c(1), c(2), c(3)), 1e-9)
        .map_err(|e| anyhow!("matrix is not in SL(2,C): {e}"))
}

#[derive(Serialize)]
struct TableDoc {
    schema: u32,
    what: String,
    twice_spin: u32,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    matrices: Vec<TableEntry>,
}

#[derive(Serialize)]
struct TableEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    indices: Option<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<String>,
    matrix: MatrixSchema,
}

fn cmd_table(args: &TableArgs) -> anyhow::Result<ExitCode> {
    let spin = SpinLabel::from_twice(args.twice_spin).map_err(|e| anyhow!("{e}"))?;
    let mut entries = Vec::new();
    let what = match args.what {
        TableKind::SpinRep | TableKind::HatRep => {
            let a = match &args.a_matrix {
                Some(text) => parse_a_matrix(text)?,
                None => SL2C::identity(),
            };
            let m = match args.what {
                TableKind::SpinRep => sym_power(spin.twice(), a.mat()),
                _ => sym_power(spin.twice(), a.hat().mat()),
            };
            entries.push(TableEntry {
                indices: None,
                family: None,
                matrix: MatrixSchema::of(&m),
            });
            if matches!(args.what, TableKind::SpinRep) {
                "spin_rep"
            } else {
                "hat_rep"
            }
        }
        TableKind::Sigma => {
            let sig = extract_sigma::<f64>(spin).map_err(|e| anyhow!("{e}"))?;
            for (i, mono) in sig.monomials.iter().enumerate() {
                let mut indices = Vec::new();
                for (mu, &count) in mono.iter().enumerate() {
                    for _ in 0..count {
                        indices.push(mu as u8);
                    }
                }
                entries.push(TableEntry {
                    indices: Some(indices.clone()),
                    family: Some("sigma".into()),
                    matrix: MatrixSchema::of(&sig.tensor_upper(i, false)),
                });
                entries.push(TableEntry {
                    indices: Some(indices),
                    family: Some("sigma_hat".into()),
                    matrix: MatrixSchema::of(&sig.tensor_upper(i, true)),
                });
            }
            "sigma"
        }
        TableKind::Gamma => {
            let gs = gamma_matrices::<f64>(spin).map_err(|e| anyhow!("{e}"))?;
            for (i, mono) in gs.sigma.monomials.iter().enumerate() {
                let mut indices = Vec::new();
                for (mu, &count) in mono.iter().enumerate() {
                    for _ in 0..count {
                        indices.push(mu as u8);
                    }
                }
                entries.push(TableEntry {
                    indices: Some(indices),
                    family: None,
                    matrix: MatrixSchema::of(&gs.tensor_upper(i)),
                });
            }
            "gamma"
        }
        TableKind::Boost => {
            let p3 = args
                .momentum
                .clone()
                .ok_or_else(|| anyhow!("--momentum px,py,pz is required for boost tables"))?;
            if p3.len() != 3 {
                return Err(anyhow!("--momentum needs exactly three components"));
            }
            let e = (args.mass * args.mass + p3[0] * p3[0] + p3[1] * p3[1] + p3[2] * p3[2]).sqrt();
            let p = FourVector::new(e, p3[0], p3[1], p3[2]);
            let choice = match args.section {
                Section::Canonical => BoostChoice::Canonical,
                Section::Helicity => BoostChoice::Helicity,
            };
            let l = boost(choice, args.mass, &p).map_err(|e| anyhow!("{e}"))?;
            entries.push(TableEntry {
                indices: None,
                family: Some("sl2c".into()),
                matrix: MatrixSchema::of(&l.mat().to_cmat()),
            });
            let lam = covering_map(&l);
            let mut m = poincare_core::linalg::CMat::zeros(4, 4);
            for i in 0..4 {
                for j in 0..4 {
                    m[(i, j)] = Complex::new(lam.e[i][j], 0.0);
                }
            }
            entries.push(TableEntry {
                indices: None,
                family: Some("lorentz".into()),
                matrix: MatrixSchema::of(&m),
            });
            "boost"
        }
    };
    let doc = TableDoc {
        schema: SCHEMA_VERSION,
        what: what.into(),
        twice_spin: args.twice_spin,
        matrices: entries,
    };
    emit(args.out.as_ref(), &serde_json::to_string_pretty(&doc)?)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct BracketDoc {
    schema: u32,
    twice_spin: u32,
    mass: f64,
    xi: [f64; 4],
    interval: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    light_cone_warning: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<VerdictReport>,
}

fn cmd_bracket(args: &BracketArgs) -> anyhow::Result<ExitCode> {
    let spin = SpinLabel::from_twice(args.twice_spin).map_err(|e| anyhow!("{e}"))?;
    if args.xi.len() != 4 {
        return Err(anyhow!("--xi needs exactly four components t,x,y,z"));
    }
    let xi = FourVector::new(args.xi[0], args.xi[1], args.xi[2], args.xi[3]);
    let cfg = KernelConfig {
        eps_seq: args.eps_seq.clone(),
        base_radial: args.radial,
        base_theta: args.angular,
        ..KernelConfig::default()
    };
    // CSV: one row per (sign, eps) plus the extrapolated row (eps = 0)
    let dim = spin.dim();
    let mut csv = String::from("sign,eps");
    for i in 0..dim {
        for j in 0..dim {
            csv.push_str(&format!(",k{i}{j}_re,k{i}{j}_im"));
        }
    }
    csv.push('\n');
    for sign in [BracketSign::Commutator, BracketSign::Anticommutator] {
        let res = bracket_kernel(spin, args.mass, &xi, sign, &cfg).map_err(|e| anyhow!("{e}"))?;
        for (eps, mat) in res
            .per_eps
            .iter()
            .map(|(e, m)| (*e, m.clone()))
            .chain(std::iter::once((0.0, res.extrapolated.clone())))
        {
            csv.push_str(&format!("{},{:e}", sign.label(), eps));
            for i in 0..dim {
                for j in 0..dim {
                    let z = mat[(i, j)];
                    csv.push_str(&format!(",{:e},{:e}", z.re, z.im));
                }
            }
            csv.push('\n');
        }
    }

    let interval = poincare_core::minkowski::minkowski_dot(&xi, &xi);
    let near_cone = interval.abs() < args.cone_floor;
    let verdict = if near_cone {
        None
    } else {
        Some(
            poincare_core::spinstat::spin_statistics_verdict(
                &[args.twice_spin],
                args.mass,
                &[xi],
                &cfg,
                args.ratio,
            )
            .map_err(|e| anyhow!("{e}"))?,
        )
    };
    let doc = BracketDoc {
        schema: SCHEMA_VERSION,
        twice_spin: args.twice_spin,
        mass: args.mass,
        xi: [xi[0], xi[1], xi[2], xi[3]],
        interval,
        light_cone_warning: near_cone.then(|| {
            format!(
                "|xi.xi| = {:.3e} is below the floor {:.3e}; the kernel is singular near the light cone, no verdict issued",
                interval.abs(),
                args.cone_floor
            )
        }),
        verdict,
    };
    let json = serde_json::to_string_pretty(&doc)?;
    match &args.out {
        Some(base) => {
            write_atomic(&base.with_extension("csv"), &csv)?;
            write_atomic(&base.with_extension("json"), &json)?;
        }
        None => {
            print!("{csv}");
            println!("{json}");
        }
    }
    if near_cone {
        eprintln!("warning: separation is too close to the light cone; no verdict issued");
        return Ok(ExitCode::SUCCESS);
    }
    let pass = doc.verdict.as_ref().map(|v| v.pass).unwrap_or(false);
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[derive(serde::Deserialize)]
struct GroupFile {
    #[serde(rename = "A")]
    a: Vec<Vec<usize>>,
    #[serde(rename = "H")]
    h: Vec<Vec<usize>>,
    action: Vec<Vec<usize>>,
}

fn cmd_mackey(args: &MackeyArgs) -> anyhow::Result<ExitCode> {
    let group = match (&args.group, &args.group_file) {
        (Some(name), None) => {
            SemidirectProduct::builtin(name).map_err(|e| anyhow!("{e}"))?
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let file: GroupFile = serde_json::from_str(&text).context("parsing group file")?;
            let a = FiniteGroup::from_table(&file.a).map_err(|e| anyhow!("A table: {e}"))?;
            let h = FiniteGroup::from_table(&file.h).map_err(|e| anyhow!("H table: {e}"))?;
            SemidirectProduct::new(a, h, file.action, "custom").map_err(|e| anyhow!("{e}"))?
        }
        _ => return Err(anyhow!("exactly one of --group or --group-file is required")),
    };
    let report = poincare_core::mackey_finite::verify_mackey(&group, args.exact, args.seed)
        .map_err(|e| anyhow!("{e}"))?;
    emit(args.out.as_ref(), &serde_json::to_string_pretty(&report)?)?;
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Table(args) => cmd_table(args),
        Command::Bracket(args) => cmd_bracket(args),
        Command::Mackey(args) => cmd_mackey(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
