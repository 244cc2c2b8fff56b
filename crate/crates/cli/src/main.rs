//! `casimir`: dispersion interactions of metal nanospheres and the
//! macroscopic geometries they sum to.
//!
//! Lengths are accepted bare (reduced units, metres) or with an `m`/`nm`
//! suffix. Exit codes: 0 success, 1 bad usage or configuration, 2 a numeric
//! result failed to converge. Every run writes a JSON manifest holding the
//! argv and outputs; `casimir rerun --from <manifest>` replays it.

use casimir_core::convergence::{richardson, ConvergenceReport, ConvergenceRow};
use casimir_core::halfspace::{
    self, dk_dd, dk_dd_ladder, ladder_quadrature_defaults, lattice_oracle_w2, w2_cp_numeric,
    HalfspaceConfig,
};
use casimir_core::kernels::{pair_energy, triplet_energy, RegimeRequest, RegimeThresholds};
use casimir_core::macroscopic::{
    casimir_ideal_per_area, many_body_coefficient, w_total, Permittivity,
};
use casimir_core::material::Material;
use casimir_core::slabs::{w2_per_area_numeric, w3_per_area_exact, SlabConfig};
use casimir_core::{EnergyResult, QuadratureSpec, Regime, ScaleTag, Triangle};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "casimir", version, about = "Dispersion forces between metal nanospheres, summed over macroscopic bodies")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Relative tolerance for the integrators (each command has a sane default).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Where the reproducibility manifest is written.
    #[arg(long, global = true, default_value = "casimir-run.json")]
    manifest: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Energy of two spheres at center separation r.
    Pair {
        /// Preset (`perfect`, `gold`) or path to a key=value material file.
        #[arg(long, default_value = "perfect")]
        material: String,
        /// Separation, e.g. `1`, `2e-7m`, `350nm`.
        #[arg(long)]
        r: String,
        #[arg(long, value_enum, default_value_t = RegimeArg::Auto)]
        regime: RegimeArg,
    },
    /// Energy of three spheres on a triangle with sides a,b,c.
    Triplet {
        #[arg(long, default_value = "perfect")]
        material: String,
        /// Comma-separated side lengths, e.g. `1,1,1.5` or `100nm,100nm,150nm`.
        #[arg(long)]
        sides: String,
        #[arg(long, value_enum, default_value_t = RegimeArg::Auto)]
        regime: RegimeArg,
    },
    /// Sphere facing a half-space of close-packed spheres (coefficients of
    /// hbar c rho^3 / d^4).
    Cp {
        /// Face distance.
        #[arg(long, default_value = "1")]
        d: String,
        /// 2 = pairwise sum, 3 = triplet sum, both adds the ratio diagnostic.
        #[arg(long, value_enum, default_value_t = CpOrder::Both)]
        order: CpOrder,
    },
    /// Two close-packed plates: energy per unit area (coefficients of
    /// hbar c / d^3).
    Casimir {
        #[arg(long, default_value = "1")]
        d: String,
        /// 2, 3, ideal (perfect-mirror reference) or both (adds diagnostics).
        #[arg(long, value_enum, default_value_t = CasimirOrder::Both)]
        order: CasimirOrder,
    },
    /// Sphere/half-space energy from the reflection-coefficient route.
    Macro {
        /// Half-space permittivity: a number, or `inf` for an ideal mirror.
        #[arg(long, default_value = "inf")]
        epsilon: String,
        /// total, or the order of the many-body expansion to extract (1, 2).
        #[arg(long, value_enum, default_value_t = MacroOrder::Total)]
        order: MacroOrder,
    },
    /// Convergence studies, printed as CSV (`param,value,error,evals`).
    Convergence {
        #[arg(long, value_enum)]
        study: Study,
        /// Rungs in the study ladder (the cutoff ladder needs at least 2).
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// Recorded in the manifest; reserved for sampling-based studies.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Face distance for the half-space studies.
        #[arg(long, default_value = "1")]
        d: String,
    },
    /// Replay a previous run from its manifest and print the same outputs.
    Rerun {
        #[arg(long)]
        from: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RegimeArg {
    Auto,
    Nonret,
    Ret,
    Full,
}

impl From<RegimeArg> for RegimeRequest {
    fn from(r: RegimeArg) -> Self {
        match r {
            RegimeArg::Auto => RegimeRequest::Auto,
            RegimeArg::Nonret => RegimeRequest::NonRetarded,
            RegimeArg::Ret => RegimeRequest::Retarded,
            RegimeArg::Full => RegimeRequest::Full,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CpOrder {
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CasimirOrder {
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    Both,
    Ideal,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MacroOrder {
    Total,
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Study {
    LambdaLadder,
    LatticeW2,
    ScalingLaw,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct RunManifest {
    version: String,
    command: String,
    argv: Vec<String>,
    parameters: Value,
    tolerance: Option<f64>,
    seed: Option<u64>,
    wall_time_ms: u64,
    outputs: Value,
}

struct Outcome {
    command: &'static str,
    parameters: Value,
    seed: Option<u64>,
    rendered: String,
    outputs: Value,
    healthy: bool,
}

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(run(&argv));
}

fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(std::iter::once("casimir").map(String::from).chain(argv.iter().cloned())) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let asked_for_it =
                matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if asked_for_it { 0 } else { 1 };
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return 1;
    }
    if let Cmd::Rerun { from } = &cli.command {
        let manifest: RunManifest = match std::fs::read_to_string(from)
            .map_err(|e| format!("cannot read {}: {e}", from.display()))
            .and_then(|text| serde_json::from_str(&text).map_err(|e| format!("bad manifest: {e}")))
        {
            Ok(m) => m,
            Err(msg) => {
                eprintln!("error: {msg}");
                return 1;
            }
        };
        if manifest.argv.first().map(String::as_str) == Some("rerun") {
            eprintln!("error: manifest records a rerun; replay the original manifest instead");
            return 1;
        }
        return run(&manifest.argv);
    }

    let started = Instant::now();
    match execute(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.rendered);
            let manifest = RunManifest {
                version: env!("CARGO_PKG_VERSION").to_string(),
                command: outcome.command.to_string(),
                argv: argv.to_vec(),
                parameters: outcome.parameters,
                tolerance: cli.tol,
                seed: outcome.seed,
                wall_time_ms: started.elapsed().as_millis() as u64,
                outputs: outcome.outputs,
            };
            match serde_json::to_string_pretty(&manifest) {
                Ok(text) => {
                    if let Err(e) = std::fs::write(&cli.manifest, text + "\n") {
                        eprintln!("error: cannot write {}: {e}", cli.manifest.display());
                        return 1;
                    }
                }
                Err(e) => {
                    eprintln!("error: cannot encode manifest: {e}");
                    return 1;
                }
            }
            if outcome.healthy {
                0
            } else {
                2
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

/// CASIMIR_THREADS caps the worker pool used by the parallel lattice sums.
/// The pool is global and first-build-wins, so a rerun replaying in-process
/// silently keeps the existing pool.
fn init_threads() -> Result<(), String> {
    match std::env::var("CASIMIR_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let n: usize = raw
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or(format!("CASIMIR_THREADS must be a positive integer, got {raw:?}"))?;
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome, String> {
    match &cli.command {
        Cmd::Pair { material, r, regime } => {
            let m = load_material(material)?;
            let sep = parse_length(r)?;
            let quad = quad_spec(cli.tol, 1e-7);
            let result = pair_energy(&m, sep, (*regime).into(), &RegimeThresholds::default(), &quad)
                .map_err(|e| e.to_string())?;
            let rows = vec![("pair_energy".to_string(), result)];
            Ok(outcome(
                cli,
                "pair",
                json!({"material": material, "r": sep, "regime": format!("{regime:?}").to_lowercase()}),
                rows,
            ))
        }
        Cmd::Triplet { material, sides, regime } => {
            let m = load_material(material)?;
            let t = parse_sides(sides)?;
            let quad = quad_spec(cli.tol, 1e-7);
            let result =
                triplet_energy(&m, &t, (*regime).into(), &RegimeThresholds::default(), &quad)
                    .map_err(|e| e.to_string())?;
            let rows = vec![("triplet_energy".to_string(), result)];
            Ok(outcome(
                cli,
                "triplet",
                json!({"material": material, "sides": t.sides(), "regime": format!("{regime:?}").to_lowercase()}),
                rows,
            ))
        }
        Cmd::Cp { d, order } => {
            let d = parse_length(d)?;
            let cfg = HalfspaceConfig::new(d, d / 100.0).map_err(|e| e.to_string())?;
            let mut rows = Vec::new();
            if matches!(order, CpOrder::Two | CpOrder::Both) {
                let w2 = w2_cp_numeric(&cfg, &quad_spec(cli.tol, 1e-7)).map_err(|e| e.to_string())?;
                rows.push(("w2_cp".to_string(), w2));
            }
            if matches!(order, CpOrder::Three | CpOrder::Both) {
                let mut quad = ladder_quadrature_defaults();
                if let Some(tol) = cli.tol {
                    quad = quad.with_rel_tol(tol);
                }
                let w3 = halfspace::w3_cp(&cfg, &quad).map_err(|e| e.to_string())?;
                rows.push(("w3_cp".to_string(), w3));
            }
            if matches!(order, CpOrder::Both) {
                let ratio = rows[1].1.coefficient / rows[0].1.coefficient.abs();
                rows.push(("w3_over_abs_w2".to_string(), dimensionless(ratio)));
            }
            Ok(outcome(cli, "cp", json!({"d": d, "order": format!("{order:?}").to_lowercase()}), rows))
        }
        Cmd::Casimir { d, order } => {
            let d = parse_length(d)?;
            let cfg = SlabConfig::new(d, d / 100.0).map_err(|e| e.to_string())?;
            let mut rows = Vec::new();
            if matches!(order, CasimirOrder::Two | CasimirOrder::Both) {
                let w2 =
                    w2_per_area_numeric(&cfg, &quad_spec(cli.tol, 1e-7)).map_err(|e| e.to_string())?;
                rows.push(("w2_per_area".to_string(), w2));
            }
            if matches!(order, CasimirOrder::Three | CasimirOrder::Both) {
                rows.push(("w3_per_area".to_string(), w3_per_area_exact()));
            }
            if matches!(order, CasimirOrder::Ideal | CasimirOrder::Both) {
                rows.push(("casimir_ideal".to_string(), casimir_ideal_per_area()));
            }
            if matches!(order, CasimirOrder::Both) {
                let w2 = rows[0].1.coefficient;
                let w3 = rows[1].1.coefficient;
                let ideal = rows[2].1.coefficient;
                rows.push(("pairwise_fraction".to_string(), dimensionless(w2 / ideal)));
                rows.push(("triplet_to_pair_ratio".to_string(), dimensionless((w3 / w2).abs())));
                rows.push(("partial_sum_vs_ideal".to_string(), dimensionless((w2 + w3) / ideal)));
            }
            Ok(outcome(cli, "casimir", json!({"d": d, "order": format!("{order:?}").to_lowercase()}), rows))
        }
        Cmd::Macro { epsilon, order } => {
            let eps = parse_epsilon(epsilon)?;
            let rows = match order {
                MacroOrder::Total => {
                    let w = w_total(eps, &quad_spec(cli.tol, 1e-10)).map_err(|e| e.to_string())?;
                    vec![("w_total".to_string(), w)]
                }
                MacroOrder::One | MacroOrder::Two => {
                    let n = if matches!(order, MacroOrder::One) { 1 } else { 2 };
                    // Central differencing needs function values far below
                    // the step-cancellation level.
                    let quad = quad_spec(cli.tol, 1e-12).with_abs_tol(1e-300);
                    let w = many_body_coefficient(n, &quad).map_err(|e| e.to_string())?;
                    vec![(format!("many_body_order_{n}"), w)]
                }
            };
            Ok(outcome(
                cli,
                "macro",
                json!({"epsilon": epsilon, "order": format!("{order:?}").to_lowercase()}),
                rows,
            ))
        }
        Cmd::Convergence { study, levels, seed, d } => {
            let d = parse_length(d)?;
            if *levels == 0 {
                return Err("--levels must be at least 1".to_string());
            }
            let report = match study {
                Study::LambdaLadder => {
                    let mut quad = ladder_quadrature_defaults();
                    if let Some(tol) = cli.tol {
                        quad = quad.with_rel_tol(tol);
                    }
                    let (_, report) = dk_dd_ladder(d, &quad, *levels).map_err(|e| e.to_string())?;
                    report
                }
                Study::LatticeW2 => {
                    let cfg = HalfspaceConfig::new(d, d / 100.0).map_err(|e| e.to_string())?;
                    let mut rows = Vec::with_capacity(*levels);
                    for k in 1..=*levels {
                        let spacing = d / 2f64.powi(k as i32);
                        let w = lattice_oracle_w2(&cfg, spacing, 40.0 * d)
                            .map_err(|e| e.to_string())?;
                        rows.push(ConvergenceRow {
                            param: spacing,
                            value: w.coefficient,
                            error: w.error_estimate,
                            evaluations: w.metadata.evaluations,
                        });
                    }
                    richardson(&rows)
                }
                Study::ScalingLaw => {
                    let mut quad = ladder_quadrature_defaults();
                    if let Some(tol) = cli.tol {
                        quad = quad.with_rel_tol(tol);
                    }
                    let mut rows = Vec::new();
                    for d in [0.5, 1.0, 2.0, 4.0] {
                        let (limit, _) = dk_dd(d, &quad).map_err(|e| e.to_string())?;
                        rows.push(ConvergenceRow {
                            param: d,
                            value: limit.value * d.powi(5),
                            error: limit.error_estimate * d.powi(5),
                            evaluations: limit.evaluations,
                        });
                    }
                    // Not a halving ladder: "stable" here means every pair of
                    // rescaled slopes agrees within its combined error bars.
                    let consistent = rows.iter().enumerate().all(|(i, a)| {
                        rows[i + 1..]
                            .iter()
                            .all(|b| (a.value - b.value).abs() <= a.error + b.error)
                    });
                    ConvergenceReport { rows, extrapolated: None, stable: consistent, order: None }
                }
            };
            let rendered = match cli.format {
                Format::Json => {
                    serde_json::to_string_pretty(&report).map_err(|e| e.to_string())? + "\n"
                }
                Format::Table | Format::Csv => report.to_csv(),
            };
            let healthy = report.stable;
            Ok(Outcome {
                command: "convergence",
                parameters: json!({
                    "study": format!("{study:?}"),
                    "levels": levels,
                    "seed": seed,
                    "d": d,
                }),
                seed: Some(*seed),
                rendered,
                outputs: serde_json::to_value(&report).map_err(|e| e.to_string())?,
                healthy,
            })
        }
        Cmd::Rerun { .. } => unreachable!("handled before execute"),
    }
}

fn outcome(cli: &Cli, command: &'static str, parameters: Value, rows: Vec<(String, EnergyResult)>) -> Outcome {
    let healthy = rows.iter().all(|(_, r)| r.metadata.converged);
    let outputs = Value::Array(rows.iter().map(|(n, r)| result_json(n, r)).collect());
    let rendered = match cli.format {
        Format::Table => render_table(&rows),
        Format::Csv => render_csv(&rows),
        Format::Json => {
            let value = if rows.len() == 1 {
                result_json(&rows[0].0, &rows[0].1)
            } else {
                outputs.clone()
            };
            serde_json::to_string_pretty(&value).unwrap() + "\n"
        }
    };
    Outcome { command, parameters, seed: None, rendered, outputs, healthy }
}

fn dimensionless(v: f64) -> EnergyResult {
    EnergyResult::closed_form(v, ScaleTag::Dimensionless, Regime::Retarded)
}

fn quad_spec(tol: Option<f64>, default_rel: f64) -> QuadratureSpec {
    QuadratureSpec::default().with_rel_tol(tol.unwrap_or(default_rel))
}

fn load_material(spec: &str) -> Result<Material, String> {
    match spec {
        "perfect" => Material::perfect_conductor(1.0).map_err(|e| e.to_string()),
        "gold" => Ok(Material::gold()),
        path => Material::from_config_file(std::path::Path::new(path)).map_err(|e| e.to_string()),
    }
}

/// Bare numbers are reduced lengths (metres); `m` and `nm` suffixes are
/// converted at this boundary so everything downstream stays unit-free.
fn parse_length(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (num, mult) = if let Some(p) = t.strip_suffix("nm") {
        (p, 1e-9)
    } else if let Some(p) = t.strip_suffix('m') {
        (p, 1.0)
    } else {
        (t, 1.0)
    };
    let v: f64 =
        num.trim().parse().map_err(|_| format!("not a length: {s:?} (use e.g. 1, 2e-7m, 350nm)"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(format!("length must be positive and finite, got {s:?}"));
    }
    Ok(v * mult)
}

fn parse_sides(s: &str) -> Result<Triangle, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("--sides takes three comma-separated lengths, got {s:?}"));
    }
    let a = parse_length(parts[0])?;
    let b = parse_length(parts[1])?;
    let c = parse_length(parts[2])?;
    Triangle::new(a, b, c).map_err(|e| e.to_string())
}

fn parse_epsilon(s: &str) -> Result<Permittivity, String> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf")
        || t.eq_ignore_ascii_case("infinite")
        || t.eq_ignore_ascii_case("infinity")
    {
        return Ok(Permittivity::Infinite);
    }
    let v: f64 = t.parse().map_err(|_| format!("--epsilon takes a number or `inf`, got {s:?}"))?;
    Ok(Permittivity::Finite(v))
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::NonRetarded => "non_retarded",
        Regime::Retarded => "retarded",
        Regime::FullIntegral => "full_integral",
    }
}

fn result_json(name: &str, r: &EnergyResult) -> Value {
    json!({
        "name": name,
        "coefficient": r.coefficient,
        "scale": r.scale.to_string(),
        "error": r.error_estimate,
        "regime": regime_name(r.metadata.regime),
        "converged": r.metadata.converged,
        "evaluations": r.metadata.evaluations,
        "warnings": r.metadata.warnings.iter().map(|w| w.to_string()).collect::<Vec<String>>(),
    })
}

fn render_table(rows: &[(String, EnergyResult)]) -> String {
    let mut out = format!(
        "{:<24} {:>17} {:>12} {:<18} {:<13} {:>9}\n",
        "quantity", "coefficient", "error", "scale", "regime", "converged"
    );
    for (name, r) in rows {
        out += &format!(
            "{:<24} {:>17.10e} {:>12.3e} {:<18} {:<13} {:>9}\n",
            name,
            r.coefficient,
            r.error_estimate,
            r.scale.to_string(),
            regime_name(r.metadata.regime),
            r.metadata.converged
        );
    }
    for (name, r) in rows {
        for w in &r.metadata.warnings {
            out += &format!("warning ({name}): {w}\n");
        }
    }
    out
}

fn render_csv(rows: &[(String, EnergyResult)]) -> String {
    let mut out = String::from("quantity,coefficient,error,scale,regime,converged,evals\n");
    for (name, r) in rows {
        out += &format!(
            "{},{},{},{},{},{},{}\n",
            name,
            r.coefficient,
            r.error_estimate,
            r.scale,
            regime_name(r.metadata.regime),
            r.metadata.converged,
            r.metadata.evaluations
        );
    }
    out
}
