use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use robinwall::infomeasures::{entropy_crossing, fisher_product_maximum};
use robinwall::observables::dipole_matrix;
use robinwall::oracle::{fd_energies, GridSpec};
use robinwall::spectrum::{energy, levels};
use robinwall::states::build_state;
use robinwall::sweep::{parse_config, run_sweep, OutputFormat, Row, Table};
use robinwall::units::{convert_units, Direction, QuantityKind, ELECTRON_MASS};
use robinwall::{BoundarySpec, FieldGrid, Quantity, SweepRequest, ToleranceConfig, UnitScale};

/// Bound states and information measures of a particle at a wall in a uniform field.
#[derive(Parser)]
#[command(name = "robinwall", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Energies over a field grid, optionally with finite-difference values.
    Spectrum {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Append finite-difference energies and their relative deviation.
        #[arg(long)]
        oracle: bool,
    },
    /// Wavefunction samples in position or momentum space.
    State {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "robin-")]
        bc: BoundarySpec,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, allow_negative_numbers = true)]
        field: f64,
        /// Sample momentum density instead of the position wavefunction.
        #[arg(long)]
        momentum: bool,
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Largest |k| sampled; defaults to the series switch momentum.
        #[arg(long, allow_negative_numbers = true)]
        k_max: Option<f64>,
    },
    /// Mean position and polarization, or the dipole matrix with --matrix.
    Polarization {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Emit the dipole matrix of the lowest DIM levels instead.
        #[arg(long, value_name = "DIM")]
        matrix: Option<usize>,
    },
    /// Any per-level quantities over a field grid.
    Measures {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Comma-separated quantity list.
        #[arg(long, value_delimiter = ',', default_value = "entropy,fisher,onicescu,cgl")]
        quantities: Vec<Quantity>,
    },
    /// Field at which the two lowest attractive-wall total entropies cross.
    Crossing {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Maximum of the Fisher product of an attractive-wall level.
    Fishermax {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// CGL complexities of the Dirichlet and Neumann levels.
    Table1 {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 6)]
        levels: usize,
    },
    /// Compare root-found energies with the finite-difference solver.
    OracleCheck {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "robin-")]
        bc: BoundarySpec,
        #[arg(long, allow_negative_numbers = true)]
        field: f64,
        #[arg(long, default_value_t = 6)]
        levels: usize,
        /// Relative tolerance above which the check fails.
        #[arg(long, default_value_t = 1e-4)]
        tolerance: f64,
    },
    /// Convert a value between wall units and SI.
    Units {
        #[arg(long, default_value = "robin-")]
        bc: BoundarySpec,
        /// |Lambda| in metres; required for Robin walls.
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = ELECTRON_MASS)]
        mass: f64,
        /// Gravity instead of an electric field.
        #[arg(long)]
        gravity: bool,
        #[arg(long)]
        kind: QuantityKind,
        #[arg(long, allow_negative_numbers = true)]
        value: f64,
        /// Convert from wall units to SI.
        #[arg(long)]
        to_physical: bool,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Output format.
    #[arg(long, default_value = "csv")]
    out: OutputFormat,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// key=value tolerance overrides; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    tol_abs: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tol_rel: Option<f64>,
    /// Series switch momentum in units of the state's momentum scale.
    #[arg(long, allow_negative_numbers = true)]
    tail_k: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value = "robin-")]
    bc: BoundarySpec,
    /// Levels, e.g. `0`, `0,2,5` or `0-3`.
    #[arg(long, default_value = "0", value_parser = parse_levels)]
    n: Levels,
    #[arg(long, allow_negative_numbers = true, conflicts_with = "field_range", required_unless_present = "field_range")]
    field: Option<f64>,
    /// `start:stop:count[:log]`.
    #[arg(long)]
    field_range: Option<FieldGrid>,
}

#[derive(Clone)]
struct Levels(Vec<usize>);

fn parse_levels(s: &str) -> Result<Levels, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let bad = || format!("bad level list '{s}'");
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    Ok(Levels(out))
}

impl CommonArgs {
    fn tolerances(&self) -> Result<ToleranceConfig> {
        self.read_tolerances().map_err(|e| Usage(format!("{e:#}")).into())
    }

    fn read_tolerances(&self) -> Result<ToleranceConfig> {
        let mut cfg = ToleranceConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            cfg = parse_config(&text, cfg)?;
        }
        if let Some(v) = self.tol_abs {
            cfg.abs_tol = v;
        }
        if let Some(v) = self.tol_rel {
            cfg.rel_tol = v;
        }
        if let Some(v) = self.tail_k {
            cfg.k_tail_factor = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.output {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).with_context(|| format!("creating {}", path.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn emit(&self, table: &Table) -> Result<()> {
        let mut out = self.sink()?;
        table.write(self.out, &mut out)?;
        out.flush()?;
        Ok(())
    }
}

impl SweepArgs {
    fn request(&self, quantities: Vec<Quantity>) -> Result<SweepRequest> {
        let field_grid = match (self.field, self.field_range) {
            (Some(f), None) => FieldGrid::single(f),
            (None, Some(g)) => g,
            _ => return Err(Usage("give exactly one of --field and --field-range".into()).into()),
        };
        Ok(SweepRequest {
            bc: self.bc,
            n_list: self.n.0.clone(),
            field_grid,
            quantities,
            output: self.common.out,
            tolerances: self.common.tolerances()?,
        })
    }
}

/// Bad input discovered after parsing; exits like a parse error.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn is_usage(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.is::<Usage>() || matches!(c.downcast_ref::<robinwall::Error>(), Some(robinwall::Error::Invalid(_)))
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage(&e) { 1 } else { 2 })
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Spectrum { sweep, oracle } => {
            let mut table = run_sweep(&sweep.request(vec![Quantity::Energy])?)?;
            if oracle {
                add_oracle_columns(&mut table)?;
            }
            finish(&sweep.common, &table)
        }
        Command::State { common, bc, n, field, momentum, points, k_max } => {
            if points < 2 {
                return Err(Usage("need at least 2 sample points".into()).into());
            }
            let sf = build_state(energy(bc, n, field)?, &common.tolerances()?)?;
            let last = (points - 1) as f64;
            let table = if momentum {
                let k_max = k_max.unwrap_or(sf.k_switch);
                let mut t = Table::new(vec!["k".into(), "gamma".into()]);
                for i in 0..points {
                    let k = k_max * i as f64 / last;
                    t.rows.push(Row { bc, n, field, values: vec![k, sf.gamma(k)], error: None });
                }
                t
            } else {
                let mut t = Table::new(vec!["x".into(), "psi".into(), "rho".into()]);
                for i in 0..points {
                    let x = sf.x_cut * (1.0 - i as f64 / last) + 0.0;
                    t.rows.push(Row { bc, n, field, values: vec![x, sf.psi(x), sf.rho(x)], error: None });
                }
                t
            };
            common.emit(&table)
        }
        Command::Polarization { sweep, matrix } => match matrix {
            None => finish(&sweep.common, &run_sweep(&sweep.request(vec![Quantity::Polarization])?)?),
            Some(dim) => {
                let cfg = sweep.common.tolerances()?;
                let req = sweep.request(vec![Quantity::DipoleMatrix])?;
                let mut table = Table::new((0..dim).map(|m| format!("P_{m}")).collect());
                for field in req.field_grid.values() {
                    let d = dipole_matrix(sweep.bc, field, dim, &cfg)?;
                    for n in 0..dim {
                        let values = (0..dim).map(|m| d.get(n, m)).collect();
                        table.rows.push(Row { bc: sweep.bc, n, field, values, error: None });
                    }
                }
                finish(&sweep.common, &table)
            }
        },
        Command::Measures { sweep, quantities } => {
            finish(&sweep.common, &run_sweep(&sweep.request(quantities)?)?)
        }
        Command::Crossing { common } => {
            let f = entropy_crossing(&common.tolerances()?)?;
            scalar(&common, BoundarySpec::RobinMinus, 0, f, &["field_cross"], vec![f])
        }
        Command::Fishermax { common, n } => {
            let (f, v) = fisher_product_maximum(n, &common.tolerances()?)?;
            scalar(&common, BoundarySpec::RobinMinus, n, f, &["I_xI_k_max"], vec![v])
        }
        Command::Table1 { common, levels } => {
            let mut table = Table::new(Vec::new());
            for bc in [BoundarySpec::Dirichlet, BoundarySpec::Neumann] {
                let req = SweepRequest {
                    bc,
                    n_list: (0..levels).collect(),
                    field_grid: FieldGrid::single(1.0),
                    quantities: vec![Quantity::Cgl],
                    output: common.out,
                    tolerances: common.tolerances()?,
                };
                let part = run_sweep(&req)?;
                table.columns = part.columns;
                table.rows.extend(part.rows);
            }
            finish(&common, &table)
        }
        Command::OracleCheck { common, bc, field, levels: count, tolerance } => {
            let exact = levels(bc, field, count)?;
            let grid = GridSpec::default_for(field, count)?;
            let fd = fd_energies(bc, field, count, &grid)?;
            let mut table = Table::new(vec!["energy".into(), "fd_energy".into(), "rel_diff".into()]);
            let mut worst: f64 = 0.0;
            for (st, e_fd) in exact.iter().zip(fd) {
                let rel = (e_fd / st.energy - 1.0).abs();
                worst = worst.max(rel);
                table.rows.push(Row { bc, n: st.n, field, values: vec![st.energy, e_fd, rel], error: None });
            }
            common.emit(&table)?;
            if worst > tolerance {
                bail!("largest relative deviation {worst:e} exceeds {tolerance:e}");
            }
            Ok(())
        }
        Command::Units { bc, lambda, mass, gravity, kind, value, to_physical } => {
            let scale = UnitScale { lambda_abs: lambda, mass, gravity };
            let direction = if to_physical { Direction::ToPhysical } else { Direction::ToDimensionless };
            println!("{:.16e}", convert_units(&scale, bc, direction, value, kind)?);
            Ok(())
        }
    }
}

/// Write the table, then fail if any row carries an error.
fn finish(common: &CommonArgs, table: &Table) -> Result<()> {
    common.emit(table)?;
    match table.failures() {
        0 => Ok(()),
        k => bail!("{k} of {} rows failed", table.rows.len()),
    }
}

fn scalar(common: &CommonArgs, bc: BoundarySpec, n: usize, field: f64, names: &[&str], values: Vec<f64>) -> Result<()> {
    let mut table = Table::new(names.iter().map(|s| s.to_string()).collect());
    table.rows.push(Row { bc, n, field, values, error: None });
    common.emit(&table)
}

fn add_oracle_columns(table: &mut Table) -> Result<()> {
    table.columns.extend(["fd_energy".to_string(), "rel_diff".to_string()]);
    for row in &mut table.rows {
        if row.error.is_some() {
            row.values.extend([f64::NAN, f64::NAN]);
            continue;
        }
        let fd = GridSpec::default_for(row.field, row.n + 1)
            .and_then(|g| fd_energies(row.bc, row.field, row.n + 1, &g));
        match fd {
            Ok(v) => {
                let e_fd = v[row.n];
                let rel = (e_fd / row.values[0] - 1.0).abs();
                row.values.extend([e_fd, rel]);
            }
            Err(e) => {
                row.values.extend([f64::NAN, f64::NAN]);
                row.error = Some(format!("oracle: {e}"));
            }
        }
    }
    Ok(())
}
