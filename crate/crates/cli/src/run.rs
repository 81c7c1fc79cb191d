//! Subcommand execution and output rendering.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use delayheat::dispersion::{
    a_from_b_advection, a_from_b_heat, dispersion_residual_advection, dispersion_residual_heat,
};
use delayheat::fd_oracle::{run_advection, run_heat};
use delayheat::lambert_w::{lambert_w, residual};
use delayheat::solver::solve_ibvp;
use delayheat::spectrum::{stability_table_with, StabilityTable};
use delayheat::{Field, RatePair};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{
    Format, RunConfig, Subcommand, DEFAULT_N_OUT, DEFAULT_X_SAMPLES, SCHEMA_VERSION,
};
use crate::error::CliError;

/// Fixed rendering with 17 significant digits, enough to round-trip any f64.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

/// A rendered result: the main document plus facts for the sidecar.
pub struct Artifact {
    pub body: String,
    pub derived: Value,
}

/// Runs the configured subcommand and writes its outputs.
///
/// With an output path the document and its sidecar `<output>.json` are
/// written atomically; otherwise the document goes to stdout.
pub fn dispatch(config: &RunConfig) -> Result<(), CliError> {
    let artifact = execute(config)?;
    match &config.output {
        Some(path) => {
            let sidecar = json!({
                "schema_version": SCHEMA_VERSION,
                "config": config,
                "derived": artifact.derived,
            });
            let sidecar_text =
                serde_json::to_string_pretty(&sidecar).expect("sidecar serialises") + "\n";
            write_atomic(path, artifact.body.as_bytes())?;
            write_atomic(&sidecar_path(path), sidecar_text.as_bytes())
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(artifact.body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(CliError::io("<stdout>"))
        }
    }
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

/// Writes to a temporary file in the destination directory, then renames it
/// into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut file = tempfile::NamedTempFile::new_in(dir).map_err(CliError::io(dir))?;
    file.write_all(bytes)
        .and_then(|_| file.as_file().sync_all())
        .map_err(CliError::io(path))?;
    file.persist(path)
        .map_err(|e| CliError::io(path)(e.error))?;
    Ok(())
}

/// Computes the document for a configuration without touching the disk.
pub fn execute(config: &RunConfig) -> Result<Artifact, CliError> {
    match config.subcommand {
        Subcommand::Lambertw => lambertw(config),
        Subcommand::Roots | Subcommand::AdvectionRoots => roots(config),
        Subcommand::Stability => stability(config),
        Subcommand::SimulateModal => simulate_modal(config),
        Subcommand::SimulateFd => simulate_fd(config),
    }
}

fn lambertw(config: &RunConfig) -> Result<Artifact, CliError> {
    let k = config.k.unwrap_or(0);
    let z = Complex64::new(config.z.unwrap_or(0.0), config.z_im.unwrap_or(0.0));
    let w = lambert_w(k, z).map_err(CliError::numeric("lambert_w"))?;
    let res = residual(w, z);
    let body = match config.format {
        Format::Csv => format!(
            "k,z_re,z_im,w_re,w_im,residual\n{k},{},{},{},{},{}\n",
            float(z.re),
            float(z.im),
            float(w.re),
            float(w.im),
            float(res)
        ),
        Format::Json => json_text(&json!({
            "k": k, "z": [z.re, z.im], "w": [w.re, w.im], "residual": res,
        })),
    };
    Ok(Artifact {
        body,
        derived: json!({ "residual": res }),
    })
}

fn roots(config: &RunConfig) -> Result<Artifact, CliError> {
    let params = config.params()?;
    let b = config.b.unwrap_or(0.0);
    let bc = Complex64::new(b, 0.0);
    let rows: Vec<(Complex64, f64)> = if config.subcommand == Subcommand::Roots {
        a_from_b_heat(&params, b)
            .map_err(CliError::numeric("dispersion"))?
            .into_iter()
            .map(|a| (a, dispersion_residual_heat(&params, &RatePair::new(a, bc))))
            .collect()
    } else {
        a_from_b_advection(&params, b)
            .map_err(CliError::numeric("dispersion"))?
            .into_iter()
            .map(|a| {
                (
                    a,
                    dispersion_residual_advection(&params, &RatePair::new(a, bc)),
                )
            })
            .collect()
    };
    let body = match config.format {
        Format::Csv => {
            let mut out = String::from("index,a_re,a_im,residual\n");
            for (i, (a, r)) in rows.iter().enumerate() {
                writeln!(out, "{i},{},{},{}", float(a.re), float(a.im), float(*r)).unwrap();
            }
            out
        }
        Format::Json => json_text(&Value::Array(
            rows.iter()
                .map(|(a, r)| json!({ "a": [a.re, a.im], "residual": r }))
                .collect(),
        )),
    };
    let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(Artifact {
        body,
        derived: json!({ "root_count": rows.len(), "max_residual": worst }),
    })
}

fn table(config: &RunConfig) -> Result<StabilityTable, CliError> {
    let problem = config.problem()?;
    stability_table_with(
        &problem,
        config
            .branch_count
            .unwrap_or(delayheat::spectrum::DEFAULT_BRANCH_COUNT),
    )
    .map_err(CliError::numeric("spectrum"))
}

fn dominant_roots(table: &StabilityTable) -> Value {
    Value::Array(
        table
            .rows
            .iter()
            .map(|row| {
                let (k, b) = row.roots.dominant();
                json!({
                    "n": row.mode.n,
                    "regime": row.roots.regime.as_str(),
                    "re_b_dominant": b.re,
                    "im_b_dominant": b.im,
                    "branch_of_dominant": k,
                })
            })
            .collect(),
    )
}

fn stability(config: &RunConfig) -> Result<Artifact, CliError> {
    let table = table(config)?;
    let body = match config.format {
        Format::Csv => {
            let mut out = String::from(
                "n,k_n,lambda_n,q_n,regime,re_b_dominant,im_b_dominant,branch_of_dominant\n",
            );
            for row in &table.rows {
                let (k, b) = row.roots.dominant();
                let m = &row.mode;
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{k}",
                    m.n,
                    float(m.wavenumber),
                    float(m.decay_rate),
                    float(m.delay_product),
                    row.roots.regime,
                    float(b.re),
                    float(b.im),
                )
                .unwrap();
            }
            out
        }
        Format::Json => json_text(&Value::Array(
            table
                .rows
                .iter()
                .zip(dominant_roots(&table).as_array().unwrap())
                .map(|(row, dominant)| {
                    let mut entry = dominant.clone();
                    entry["k_n"] = json!(row.mode.wavenumber);
                    entry["lambda_n"] = json!(row.mode.decay_rate);
                    entry["q_n"] = json!(row.mode.delay_product);
                    entry
                })
                .collect(),
        )),
    };
    Ok(Artifact {
        body,
        derived: json!({
            "critical_index": table.critical_index,
            "smallest_unstable": table.smallest_unstable,
        }),
    })
}

fn output_times(config: &RunConfig) -> Vec<f64> {
    let t_end = config.t_end.unwrap_or(0.0);
    let n_out = config.n_out.unwrap_or(DEFAULT_N_OUT);
    (0..=n_out)
        .map(|j| t_end * j as f64 / n_out as f64)
        .collect()
}

fn render_field(format: Format, x: &[f64], rows: &[(f64, Vec<f64>)]) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("t");
            for &xi in x {
                write!(out, ",{}", float(xi)).unwrap();
            }
            out.push('\n');
            for (t, values) in rows {
                out.push_str(&float(*t));
                for &v in values {
                    write!(out, ",{}", float(v)).unwrap();
                }
                out.push('\n');
            }
            out
        }
        Format::Json => json_text(&json!({
            "x": x,
            "t": rows.iter().map(|r| r.0).collect::<Vec<_>>(),
            "u": rows.iter().map(|r| r.1.clone()).collect::<Vec<_>>(),
        })),
    }
}

fn simulate_modal(config: &RunConfig) -> Result<Artifact, CliError> {
    let problem = config.problem()?;
    let nx = config.nx.unwrap_or(DEFAULT_X_SAMPLES);
    let x: Vec<f64> = (0..nx)
        .map(|i| {
            if i + 1 == nx {
                problem.length
            } else {
                problem.length * i as f64 / (nx - 1) as f64
            }
        })
        .collect();
    let times = output_times(config);
    let field = solve_ibvp(&problem, &times, &x).map_err(CliError::numeric("solver"))?;
    let rows = field_rows(&field, 0..field.t.len());
    let table = stability_table_with(&problem, delayheat::spectrum::DEFAULT_BRANCH_COUNT)
        .map_err(CliError::numeric("spectrum"))?;
    Ok(Artifact {
        body: render_field(config.format, &field.x, &rows),
        derived: json!({
            "n_max": problem.n_max,
            "dominant_roots": dominant_roots(&table),
        }),
    })
}

fn simulate_fd(config: &RunConfig) -> Result<Artifact, CliError> {
    let problem = config.problem()?;
    let grid = config.grid()?;
    let field = if problem.params.advection > 0.0 {
        run_advection(&grid, &problem)
    } else {
        run_heat(&grid, &problem)
    }
    .map_err(CliError::numeric("fd_oracle"))?;
    let indices: Vec<usize> = output_times(config)
        .iter()
        .map(|&t| field.nearest_time_index(t))
        .collect();
    let rows = field_rows(&field, indices);
    Ok(Artifact {
        body: render_field(config.format, &field.x, &rows),
        derived: json!({
            "dt": grid.dt,
            "dx": grid.dx,
            "steps_per_delay": grid.steps_per_delay,
            "n_steps": grid.n_steps,
        }),
    })
}

fn field_rows(field: &Field, indices: impl IntoIterator<Item = usize>) -> Vec<(f64, Vec<f64>)> {
    indices
        .into_iter()
        .map(|r| (field.t[r], field.row(r).to_vec()))
        .collect()
}

fn json_text(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("document serialises") + "\n"
}
