use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use sr3d::check::render_table;
use sr3d::classify::{catalog, classify_with, figure1_data};
use sr3d::geodesics::{
    integrate_geodesic, shoot_distance, GeodesicState, GroupModel, ModelId, ShootingOptions,
};
use sr3d::isometry::certify::{certify_isometry, true_psi};
use sr3d::isometry::PolarPoint;
use sr3d::mutation::PsiMutant;
use sr3d::Tolerance;
use sr3d_cli::{clean, human, ClassifyReport, CliError, InvariantsReport, StructureFile};

#[derive(Debug, Parser)]
#[command(
    name = "sr3d",
    version,
    about = "Left-invariant sub-Riemannian structures on 3D Lie groups"
)]
struct Cli {
    /// Relative tolerance for zero tests.
    #[arg(long, global = true, env = "SR3D_TOL", default_value_t = sr3d::DEFAULT_TOLERANCE)]
    tol: f64,

    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Invariants, canonical frame and isometry class of a structure file.
    Classify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Frame constants and the invariants chi, kappa of a structure file.
    Invariants {
        #[arg(long)]
        input: PathBuf,
    },
    /// The built-in catalog of normalized structures.
    Catalog,
    /// CSV `name,kappa,chi` of the catalog.
    Figure1 {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate a normal geodesic from the identity and write it as CSV.
    Geodesic {
        #[arg(long, default_value = "heisenberg")]
        model: ModelId,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        h1: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        h2: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        h0: f64,
        #[arg(long, default_value_t = 1.0)]
        time: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shooting estimate of the distance from the identity to exp(u1 A1 + u2 A2 + u0 A0).
    Distance {
        #[arg(long, default_value = "heisenberg")]
        model: ModelId,
        /// Comma-separated `u1,u2,u0`.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            default_value = "0,0,0"
        )]
        target: Vec<f64>,
    },
    /// Numerical certification of the isometry between A+(R) x S^1 and SL(2).
    CertifyIsometry {
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, hide = true)]
        mutate_psi: Option<String>,
    },
}

fn read_structure(path: &Path) -> Result<(String, sr3d::SRStructure), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let file = StructureFile::parse(&text)?;
    let name = if file.name.is_empty() {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    } else {
        file.name.clone()
    };
    Ok((name, file.to_structure()?))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(CliError::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if !(cli.tol > 0.0 && cli.tol < 1.0) {
        return Err(CliError::Parse(format!(
            "tolerance must lie in (0, 1), got {}",
            cli.tol
        )));
    }
    let tol = Tolerance::new(cli.tol);
    match cli.command {
        Command::Classify { input } => {
            let (name, s) = read_structure(&input)?;
            let report = ClassifyReport::new(&name, &classify_with(&s, tol)?, tol);
            emit(
                None,
                &if cli.json {
                    to_json(&report)
                } else {
                    report.render()
                },
            )
        }
        Command::Invariants { input } => {
            let (name, s) = read_structure(&input)?;
            let jacobi = s.algebra().check_jacobi();
            if !jacobi.passed {
                return Err(sr3d::Error::Jacobi {
                    residual: jacobi.residual,
                    tolerance: jacobi.tolerance,
                }
                .into());
            }
            let report = InvariantsReport::new(&name, &s, tol)?;
            emit(
                None,
                &if cli.json {
                    to_json(&report)
                } else {
                    report.render()
                },
            )
        }
        Command::Catalog => {
            let mut rows = Vec::new();
            for entry in catalog() {
                let c = classify_with(&entry.structure, tol)?;
                rows.push(ClassifyReport::new(entry.name, &c, tol));
            }
            if cli.json {
                return emit(None, &to_json(&rows));
            }
            let mut out = format!(
                "{:<14} {:<10} {:>10} {:>10}  {}\n",
                "name", "label", "chi", "kappa", "isometry class"
            );
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{:<14} {:<10} {:>10} {:>10}  {}",
                    r.name,
                    r.label,
                    human(r.normalized.chi),
                    human(r.normalized.kappa),
                    r.isometry_class_id
                );
            }
            emit(None, &out)
        }
        Command::Figure1 { out } => {
            let mut csv = String::from("name,kappa,chi\n");
            for row in figure1_data()? {
                let _ = writeln!(csv, "{},{},{}", row.name, clean(row.kappa), clean(row.chi));
            }
            emit(out.as_deref(), &csv)
        }
        Command::Geodesic {
            model,
            h1,
            h2,
            h0,
            time,
            steps,
            out,
        } => {
            if steps == 0 || !(time.is_finite() && time >= 0.0) {
                return Err(CliError::Parse(
                    "need steps >= 1 and a finite time >= 0".into(),
                ));
            }
            let m = GroupModel::standard(model);
            let init = GeodesicState::at_identity(&m, [h1, h2, h0]);
            let traj = integrate_geodesic(&m, &init, time, steps)?;
            let h_init = init.hamiltonian();
            let drift = traj
                .states
                .iter()
                .map(|s| (s.hamiltonian() - h_init).abs())
                .fold(0.0, f64::max);
            let defect = traj
                .states
                .iter()
                .map(|s| m.manifold_defect(&s.g))
                .fold(0.0, f64::max);
            let last = traj.last();
            let final_drift = (last.hamiltonian() - h_init).abs();
            let report = json!({
                "model": model.key(),
                "covector": [h1, h2, h0],
                "time": time,
                "steps": steps,
                "final_covector": last.h,
                "final_element": last.g.entries(),
                "final_hamiltonian_drift": final_drift,
                "max_hamiltonian_drift": drift,
                "manifold_defect": defect,
            });
            let summary = if cli.json {
                to_json(&report)
            } else {
                format!(
                    "model              {model}\nsteps              {steps}\nfinal covector     {}, {}, {}\nhamiltonian drift  {} (final), {} (max)\nmanifold defect    {}\n",
                    human(last.h[0]),
                    human(last.h[1]),
                    human(last.h[2]),
                    human(final_drift),
                    human(drift),
                    human(defect)
                )
            };
            match out {
                Some(path) => {
                    emit(Some(&path), &traj.to_csv())?;
                    emit(None, &summary)
                }
                None => {
                    eprint!("{summary}");
                    emit(None, &traj.to_csv())
                }
            }
        }
        Command::Distance { model, target } => {
            let u: [f64; 3] = target.try_into().map_err(|_| {
                CliError::Parse("--target takes exactly three values u1,u2,u0".into())
            })?;
            let m = GroupModel::standard(model);
            let goal = m.algebra_element(u).exp();
            let r = shoot_distance(&m, &goal, &ShootingOptions::default())?;
            let report = json!({
                "model": model.key(),
                "target_exponent": u,
                "method": "geodesic shooting (heuristic upper estimate)",
                "estimate": r.estimate,
                "covector": r.covector,
                "endpoint_error": r.error,
                "converged": r.converged,
            });
            let text = if cli.json {
                to_json(&report)
            } else {
                format!(
                    "model              {model}\nestimate           {} (heuristic)\ncovector           {}, {}, {}\nendpoint error     {}\nconverged          {}\n",
                    human(r.estimate),
                    human(r.covector[0]),
                    human(r.covector[1]),
                    human(r.covector[2]),
                    human(r.error),
                    r.converged
                )
            };
            emit(None, &text)?;
            if r.converged {
                Ok(())
            } else {
                Err(CliError::Numerical(format!(
                    "shooting did not reach the target (endpoint error {:e})",
                    r.error
                )))
            }
        }
        Command::CertifyIsometry {
            samples,
            seed,
            mutate_psi,
        } => {
            let mutant = match mutate_psi {
                Some(name) => Some(
                    PsiMutant::ALL
                        .into_iter()
                        .find(|m| format!("{m:?}").eq_ignore_ascii_case(&name))
                        .ok_or_else(|| CliError::Parse(format!("unknown mutation '{name}'")))?,
                ),
                None => None,
            };
            let psi = |p: &PolarPoint| match mutant {
                Some(m) => m.apply(p),
                None => true_psi(p),
            };
            let results = certify_isometry(&psi, samples, seed);
            let text = if cli.json {
                to_json(&json!({
                    "seed": seed,
                    "samples": samples,
                    "checks": results,
                    "passed": results.iter().all(|r| r.passed),
                }))
            } else {
                render_table(&results)
            };
            emit(None, &text)?;
            let failed: Vec<String> = results
                .iter()
                .filter(|r| !r.passed)
                .map(|r| r.name.clone())
                .collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Certification(failed))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
