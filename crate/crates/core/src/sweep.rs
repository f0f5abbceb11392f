//! Field sweeps producing one row per `(n, F)` and their CSV/JSON encodings.

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::infomeasures::info_record;
use crate::observables::{dipole_element_closed_form, polarization};
use crate::quadrature::ToleranceConfig;
use crate::spectrum::{energy, BoundarySpec};
use crate::states::build_state;

pub const JSON_SCHEMA: &str = "robinwall/1";

/// Field values to visit, in order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl FieldGrid {
    pub fn single(field: f64) -> Self {
        FieldGrid { start: field, stop: field, count: 1, log: false }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                if i == 0 {
                    self.start
                } else if i + 1 == self.count {
                    self.stop
                } else if self.log {
                    self.start * (self.stop / self.start).powf(t)
                } else {
                    self.start + t * (self.stop - self.start)
                }
            })
            .collect()
    }
}

impl FromStr for FieldGrid {
    type Err = Error;

    /// `start:stop:count[:log]`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Invalid(format!("field range '{s}' must look like start:stop:count[:log]"));
        if parts.len() < 3 || parts.len() > 4 {
            return Err(bad());
        }
        let start: f64 = parts[0].parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].parse().map_err(|_| bad())?;
        let count: usize = parts[2].parse().map_err(|_| bad())?;
        let log = match parts.get(3) {
            None | Some(&"lin") => false,
            Some(&"log") => true,
            Some(_) => return Err(bad()),
        };
        if !(start > 0.0 && stop > 0.0) || count < 2 {
            return Err(Error::Invalid(format!(
                "field range needs positive endpoints and at least 2 points, got '{s}'"
            )));
        }
        Ok(FieldGrid { start, stop, count, log })
    }
}

/// Per-row quantities a sweep can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantity {
    Energy,
    Polarization,
    Entropy,
    Fisher,
    Onicescu,
    Cgl,
    /// Wall value `Psi(0)` and truncation point `x_cut`.
    Wavefunction,
    /// Peak `gamma(0)`.
    MomentumDensity,
    /// Transition element `P_{n,n+1}` to the next level.
    DipoleMatrix,
}

impl Quantity {
    pub const ALL: [Quantity; 9] = [
        Quantity::Energy,
        Quantity::Polarization,
        Quantity::Entropy,
        Quantity::Fisher,
        Quantity::Onicescu,
        Quantity::Cgl,
        Quantity::Wavefunction,
        Quantity::MomentumDensity,
        Quantity::DipoleMatrix,
    ];

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Quantity::Energy => &["energy"],
            Quantity::Polarization => &["mean_x", "P"],
            Quantity::Entropy => &["S_x", "S_k", "S_t"],
            Quantity::Fisher => &["I_x", "I_k", "I_xI_k"],
            Quantity::Onicescu => &["O_x", "O_k", "O_xO_k"],
            Quantity::Cgl => &["CGL_x", "CGL_k", "CGL_xCGL_k"],
            Quantity::Wavefunction => &["psi_0", "x_cut"],
            Quantity::MomentumDensity => &["gamma_0"],
            Quantity::DipoleMatrix => &["P_n_next"],
        }
    }

    fn needs_state(self) -> bool {
        !matches!(self, Quantity::Energy | Quantity::DipoleMatrix)
    }

    fn needs_measures(self) -> bool {
        matches!(self, Quantity::Entropy | Quantity::Fisher | Quantity::Onicescu | Quantity::Cgl)
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "energy" => Quantity::Energy,
            "polarization" => Quantity::Polarization,
            "entropy" => Quantity::Entropy,
            "fisher" => Quantity::Fisher,
            "onicescu" => Quantity::Onicescu,
            "cgl" => Quantity::Cgl,
            "wavefunction" => Quantity::Wavefunction,
            "momentum_density" => Quantity::MomentumDensity,
            "dipole_matrix" => Quantity::DipoleMatrix,
            other => {
                return Err(Error::Invalid(format!(
                    "unknown quantity '{other}', expected one of energy, polarization, entropy, fisher, \
                     onicescu, cgl, wavefunction, momentum_density, dipole_matrix"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Invalid(format!("unknown output format '{other}', expected csv|json"))),
        }
    }
}

/// A sweep over levels and fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRequest {
    pub bc: BoundarySpec,
    pub n_list: Vec<usize>,
    pub field_grid: FieldGrid,
    pub quantities: Vec<Quantity>,
    pub output: OutputFormat,
    pub tolerances: ToleranceConfig,
}

/// One `(n, F)` row; `values` is `NaN`-filled when `error` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub bc: BoundarySpec,
    pub n: usize,
    pub field: f64,
    pub values: Vec<f64>,
    pub error: Option<String>,
}

/// Rows in request order together with their column names.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    /// Header `bc,n,field,<columns>,error`; numbers with 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["bc".to_string(), "n".to_string(), "field".to_string()];
        header.extend(self.columns.iter().cloned());
        header.push("error".to_string());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![row.bc.to_string(), row.n.to_string(), format_number(row.field)];
            rec.extend(row.values.iter().map(|&v| format_number(v)));
            rec.push(row.error.clone().unwrap_or_default());
            w.write_record(&rec)?;
        }
        w.flush()
    }

    /// `{"schema": "robinwall/1", "rows": [...]}`; non-finite numbers are null.
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                m.insert("bc".into(), json!(row.bc.as_str()));
                m.insert("n".into(), json!(row.n));
                m.insert("field".into(), json_number(row.field));
                for (c, &v) in self.columns.iter().zip(&row.values) {
                    m.insert(c.clone(), json_number(v));
                }
                m.insert("error".into(), row.error.clone().map_or(Value::Null, Value::String));
                Value::Object(m)
            })
            .collect();
        json!({ "schema": JSON_SCHEMA, "rows": rows })
    }

    pub fn write<W: Write>(&self, format: OutputFormat, mut out: W) -> std::io::Result<()> {
        match format {
            OutputFormat::Csv => self.write_csv(out),
            OutputFormat::Json => {
                serde_json::to_writer_pretty(&mut out, &self.to_json())?;
                writeln!(out)
            }
        }
    }
}

pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "nan".to_string()
    }
}

fn json_number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

impl SweepRequest {
    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::Invalid("no levels requested".into()));
        }
        if self.quantities.is_empty() {
            return Err(Error::Invalid("no quantities requested".into()));
        }
        if !(self.field_grid.start > 0.0 && self.field_grid.stop > 0.0) && self.field_grid.count != 1 {
            return Err(Error::Invalid("field grid endpoints must be positive".into()));
        }
        if self.field_grid.count == 0 {
            return Err(Error::Invalid("empty field grid".into()));
        }
        self.tolerances.validate()
    }

    pub fn columns(&self) -> Vec<String> {
        self.quantities.iter().flat_map(|q| q.columns().iter().map(|c| c.to_string())).collect()
    }
}

/// Evaluate every `(n, F)` pair, levels outermost, in parallel; rows come back
/// in request order.
pub fn run_sweep(req: &SweepRequest) -> Result<Table> {
    req.validate()?;
    let fields = req.field_grid.values();
    let tasks: Vec<(usize, f64)> =
        req.n_list.iter().flat_map(|&n| fields.iter().map(move |&f| (n, f))).collect();
    let width = req.columns().len();
    let rows = tasks
        .par_iter()
        .map(|&(n, field)| match evaluate_row(req, n, field) {
            Ok(values) => Row { bc: req.bc, n, field, values, error: None },
            Err(e) => Row { bc: req.bc, n, field, values: vec![f64::NAN; width], error: Some(e.to_string()) },
        })
        .collect();
    Ok(Table { columns: req.columns(), rows })
}

fn evaluate_row(req: &SweepRequest, n: usize, field: f64) -> Result<Vec<f64>> {
    let cfg = &req.tolerances;
    let state = energy(req.bc, n, field)?;
    let sf = if req.quantities.iter().any(|q| q.needs_state()) {
        Some(build_state(state, cfg)?)
    } else {
        None
    };
    let info = match &sf {
        Some(sf) if req.quantities.iter().any(|q| q.needs_measures()) => Some(info_record(sf)?),
        _ => None,
    };
    let mut out = Vec::new();
    for q in &req.quantities {
        match q {
            Quantity::Energy => out.push(state.energy),
            Quantity::Polarization => {
                let p = polarization(sf.as_ref().expect("state built"))?;
                out.extend([p.mean_x, p.p]);
            }
            Quantity::Entropy => {
                let r = info.expect("measures computed");
                out.extend([r.s_x, r.s_k, r.s_t]);
            }
            Quantity::Fisher => {
                let r = info.expect("measures computed");
                out.extend([r.i_x, r.i_k, r.fisher_product]);
            }
            Quantity::Onicescu => {
                let r = info.expect("measures computed");
                out.extend([r.o_x, r.o_k, r.onicescu_product]);
            }
            Quantity::Cgl => {
                let r = info.expect("measures computed");
                out.extend([r.cgl_x, r.cgl_k, r.cgl_product]);
            }
            Quantity::Wavefunction => {
                let sf = sf.as_ref().expect("state built");
                out.extend([sf.psi(0.0), sf.x_cut]);
            }
            Quantity::MomentumDensity => out.push(sf.as_ref().expect("state built").momentum_density_peak()),
            Quantity::DipoleMatrix => {
                let next = energy(req.bc, n + 1, field)?;
                out.push(dipole_element_closed_form(&state, &next)?);
            }
        }
    }
    Ok(out)
}

/// Apply `key = value` lines (with `#` comments) to a tolerance set.
pub fn parse_config(text: &str, base: ToleranceConfig) -> Result<ToleranceConfig> {
    let mut cfg = base;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("config line {}: expected key=value", lineno + 1)))?;
        set_option(&mut cfg, key.trim(), value.trim())
            .map_err(|e| Error::Invalid(format!("config line {}: {e}", lineno + 1)))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Set one tolerance by name.
pub fn set_option(cfg: &mut ToleranceConfig, key: &str, value: &str) -> Result<()> {
    let real = || value.parse::<f64>().map_err(|_| Error::Invalid(format!("'{value}' is not a number")));
    match key {
        "abs_tol" => cfg.abs_tol = real()?,
        "rel_tol" => cfg.rel_tol = real()?,
        "x_cut_threshold" => cfg.x_cut_threshold = real()?,
        "k_tail_factor" => cfg.k_tail_factor = real()?,
        "max_subdivisions" => {
            cfg.max_subdivisions =
                value.parse().map_err(|_| Error::Invalid(format!("'{value}' is not an integer")))?
        }
        other => return Err(Error::Invalid(format!("unknown option '{other}'"))),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(quantities: Vec<Quantity>) -> SweepRequest {
        SweepRequest {
            bc: BoundarySpec::RobinMinus,
            n_list: vec![0, 1],
            field_grid: "0.5:2:3:log".parse().unwrap(),
            quantities,
            output: OutputFormat::Csv,
            tolerances: ToleranceConfig::default(),
        }
    }

    #[test]
    fn grid_parsing() {
        let g: FieldGrid = "0.01:100:5:log".parse().unwrap();
        let v = g.values();
        assert_eq!(v.len(), 5);
        assert!((v[2] - 1.0).abs() < 1e-12 && v[4] == 100.0);
        assert!("0:1:5".parse::<FieldGrid>().is_err());
        assert!("1:2:1".parse::<FieldGrid>().is_err());
        assert!("1:2".parse::<FieldGrid>().is_err());
    }

    #[test]
    fn rows_follow_request_order() {
        let t = run_sweep(&request(vec![Quantity::Energy, Quantity::Polarization])).unwrap();
        assert_eq!(t.columns, vec!["energy", "mean_x", "P"]);
        let order: Vec<(usize, f64)> = t.rows.iter().map(|r| (r.n, r.field)).collect();
        assert_eq!(order[0].0, 0);
        assert_eq!(order[3].0, 1);
        assert!(order[0].1 < order[1].1 && order[1].1 < order[2].1);
        assert_eq!(t.failures(), 0);
    }

    #[test]
    fn csv_and_json_layout() {
        let t = run_sweep(&request(vec![Quantity::Energy])).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "bc,n,field,energy,error");
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0], "robin-");
        let e: f64 = first[3].parse().unwrap();
        assert_eq!(e, t.rows[0].values[0]);
        let j = t.to_json();
        assert_eq!(j["schema"], JSON_SCHEMA);
        assert_eq!(j["rows"].as_array().unwrap().len(), 6);
        let keys: Vec<&String> = j["rows"][0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["bc", "n", "field", "energy", "error"]);
    }

    #[test]
    fn failures_become_error_rows() {
        let mut req = request(vec![Quantity::Energy]);
        req.bc = BoundarySpec::Dirichlet;
        req.field_grid = FieldGrid::single(-1.0);
        let t = run_sweep(&req).unwrap();
        assert_eq!(t.failures(), 2);
        assert!(t.rows[0].values[0].is_nan());
    }

    #[test]
    fn config_overrides() {
        let cfg = parse_config("# tolerances\nabs_tol = 1e-12\nmax_subdivisions=500\n", ToleranceConfig::default())
            .unwrap();
        assert_eq!(cfg.abs_tol, 1e-12);
        assert_eq!(cfg.max_subdivisions, 500);
        assert!(parse_config("bogus=1", ToleranceConfig::default()).is_err());
        assert!(parse_config("abs_tol", ToleranceConfig::default()).is_err());
    }
}
