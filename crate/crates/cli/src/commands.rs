use std::fmt;
use std::io;
use std::path::Path;

use qthermo::dephasing::{self, ProbePreparation};
use qthermo::estimate::{self, EstimationRun};
use qthermo::metrology;
use qthermo::optimize::{self, OptimizerConfig};
use qthermo::validate;
use qthermo::{OhmicSpectrum, QuadratureConfig};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::output::{self, Cell, PlotStyle, Table};
use crate::sweep::{Scale, SweepSpec};
use crate::{
    CoherenceArgs, GammaArgs, OptArgs, OutArgs, QsnrArgs, QuadArgs, SimulateArgs, SurfaceArgs, TempSweepArgs,
    TempoptArgs, TimeSweepArgs, ToptArgs, ValidateArgs,
};

pub const EXIT_IO: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_VALIDATION: u8 = 4;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
    Validation(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Numerical(_) => EXIT_NUMERICAL,
            Failure::Validation(_) => EXIT_VALIDATION,
            Failure::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Validation(m) => write!(f, "validation failed: {m}"),
            Failure::Io(m) => write!(f, "i/o: {m}"),
        }
    }
}

impl From<qthermo::Error> for Failure {
    fn from(e: qthermo::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(format!("{e:#}"))
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

impl QuadArgs {
    fn config(&self) -> Result<QuadratureConfig, Failure> {
        let cfg = QuadratureConfig {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_panels: self.max_panels,
            omega_max: self.omega_max,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl TimeSweepArgs {
    fn resolve(&self, lo: f64, hi: f64, points: usize, scale: Scale) -> Result<SweepSpec, Failure> {
        Ok(SweepSpec::new(
            "t",
            self.t_min.unwrap_or(lo),
            self.t_max.unwrap_or(hi),
            self.points.unwrap_or(points),
            self.scale.unwrap_or(scale),
        )?)
    }
}

impl TempSweepArgs {
    fn resolve(&self, lo: f64, hi: f64, points: usize, scale: Scale) -> Result<SweepSpec, Failure> {
        Ok(SweepSpec::new(
            "T",
            self.temp_min.unwrap_or(lo),
            self.temp_max.unwrap_or(hi),
            self.temp_points.unwrap_or(points),
            self.temp_scale.unwrap_or(scale),
        )?)
    }
}

impl OptArgs {
    fn apply(&self, base: OptimizerConfig) -> Result<OptimizerConfig, Failure> {
        let cfg = OptimizerConfig {
            bracket_lo: self.bracket_lo.unwrap_or(base.bracket_lo),
            bracket_hi: self.bracket_hi.unwrap_or(base.bracket_hi),
            grid_points: self.grid_points.unwrap_or(base.grid_points),
            x_tol: self.x_tol.unwrap_or(base.x_tol),
            ..base
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn describe(cfg: &OptimizerConfig) -> Value {
        json!({
            "bracket_lo": cfg.bracket_lo,
            "bracket_hi": cfg.bracket_hi,
            "grid_points": cfg.grid_points,
            "x_tol": cfg.x_tol,
        })
    }
}

fn spectrum(s: f64) -> Result<OhmicSpectrum, Failure> {
    Ok(OhmicSpectrum::new(s)?)
}

fn positive(name: &str, x: f64) -> Result<f64, Failure> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Failure::Usage(format!("--{name} must be positive and finite, got {x}")))
    }
}

/// Evaluates `f` over `items` in parallel; results keep the input order and
/// the first error by index is reported.
fn par_map<T: Sync, R: Send>(
    items: &[T],
    f: impl Fn(&T) -> qthermo::Result<R> + Sync + Send,
) -> Result<Vec<R>, Failure> {
    let results: Vec<qthermo::Result<R>> = items.par_iter().map(f).collect();
    results.into_iter().map(|r| r.map_err(Failure::from)).collect()
}

fn params(entries: &[(&str, Value)]) -> Map<String, Value> {
    entries.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn quad_params(q: &QuadratureConfig) -> Value {
    json!({ "rel_tol": q.rel_tol, "abs_tol": q.abs_tol, "omega_max": q.omega_max, "max_panels": q.max_panels })
}

fn finish(table: &Table, out: &OutArgs, style: &PlotStyle) -> Outcome {
    let path = out.out.as_deref();
    if out.plot {
        if out.json {
            return Err(Failure::Usage("--plot needs CSV output; drop --json".into()));
        }
        if path.is_none() {
            return Err(Failure::Usage("--plot needs --out so the script can reference the CSV".into()));
        }
    }
    if out.json {
        output::emit(&output::json_text(&table.to_json()), path)?;
    } else {
        output::emit(&table.to_csv(), path)?;
    }
    if let (true, Some(csv)) = (out.plot, path) {
        output::emit(&output::plot_script(table, csv, style), Some(&output::plot_path(csv)))?;
    }
    Ok(())
}

pub fn gamma(a: &GammaArgs) -> Outcome {
    let spec = spectrum(a.s)?;
    let temp = positive("temp", a.temp)?;
    let qcfg = a.quad.config()?;
    let sweep = a.time.resolve(0.0, 20.0, 101, Scale::Linear)?;
    let times = sweep.values();
    let rows = par_map(&times, |&t| {
        let ev = dephasing::evaluate(&spec, temp, t, &qcfg)?;
        Ok(vec![Cell::from(t), ev.gamma.into(), ev.dgamma_dt.into()])
    })?;
    let table = Table {
        command: "gamma",
        params: params(&[
            ("s", json!(a.s)),
            ("temperature", json!(temp)),
            ("t", sweep.describe()),
            ("quadrature", quad_params(&qcfg)),
        ]),
        columns: vec!["t", "gamma", "dgamma_dT"],
        rows,
    };
    let style = PlotStyle {
        title: "decoherence factor",
        x_col: 0,
        y_cols: &[1, 2],
        log_x: sweep.scale == Scale::Log,
        log_y: false,
        surface: None,
    };
    finish(&table, &a.out, &style)
}

pub fn qfi_surface(a: &SurfaceArgs) -> Outcome {
    let spec = spectrum(a.s)?;
    let qcfg = a.quad.config()?;
    let tsweep = a.temp.resolve(0.01, 10.0, 25, Scale::Log)?;
    let time_sweep = a.time.resolve(0.1, 20.0, 40, Scale::Log)?;
    let grid: Vec<(f64, f64)> = tsweep
        .values()
        .into_iter()
        .flat_map(|temp| time_sweep.values().into_iter().map(move |t| (temp, t)))
        .collect();
    let rows = par_map(&grid, |&(temp, t)| {
        let r = metrology::qfi(&spec, temp, t, &qcfg)?;
        Ok(vec![Cell::from(temp), t.into(), r.qfi.into(), r.qsnr.into()])
    })?;
    let table = Table {
        command: "qfi-surface",
        params: params(&[
            ("s", json!(a.s)),
            ("T", tsweep.describe()),
            ("t", time_sweep.describe()),
            ("quadrature", quad_params(&qcfg)),
        ]),
        columns: vec!["T", "t", "H", "Q"],
        rows,
    };
    let style = PlotStyle {
        title: "quantum Fisher information",
        x_col: 0,
        y_cols: &[],
        log_x: false,
        log_y: false,
        surface: Some((0, 1, 2)),
    };
    finish(&table, &a.out, &style)
}

pub fn topt(a: &ToptArgs) -> Outcome {
    let spec = spectrum(a.s)?;
    let qcfg = a.quad.config()?;
    let ocfg = a.opt.apply(OptimizerConfig::for_time())?;
    let sweep = a.temp.resolve(0.01, 10.0, 10, Scale::Log)?;
    let temps = sweep.values();
    let rows = par_map(&temps, |&temp| {
        let r = optimize::optimal_time(&spec, temp, &ocfg, &qcfg)?;
        Ok(vec![Cell::from(temp), r.x_opt.into(), r.f_opt.into(), r.kind.label().into()])
    })?;
    let table = Table {
        command: "topt",
        params: params(&[
            ("s", json!(a.s)),
            ("T", sweep.describe()),
            ("optimizer", OptArgs::describe(&ocfg)),
            ("quadrature", quad_params(&qcfg)),
        ]),
        columns: vec!["T", "t_opt", "H_opt", "kind"],
        rows,
    };
    let style = PlotStyle {
        title: "optimal interaction time",
        x_col: 0,
        y_cols: &[1],
        log_x: true,
        log_y: true,
        surface: None,
    };
    finish(&table, &a.out, &style)
}

pub fn tempopt(a: &TempoptArgs) -> Outcome {
    let spec = spectrum(a.s)?;
    let qcfg = a.quad.config()?;
    let ocfg = a.opt.apply(OptimizerConfig::for_temperature())?;
    let sweep = a.time.resolve(0.1, 20.0, 20, Scale::Log)?;
    let times = sweep.values();
    let rows = par_map(&times, |&t| {
        let r = optimize::optimal_temperature(&spec, t, &ocfg, &qcfg)?;
        Ok(vec![Cell::from(t), r.x_opt.into(), r.f_opt.into(), r.kind.label().into()])
    })?;
    let table = Table {
        command: "tempopt",
        params: params(&[
            ("s", json!(a.s)),
            ("t", sweep.describe()),
            ("optimizer", OptArgs::describe(&ocfg)),
            ("quadrature", quad_params(&qcfg)),
        ]),
        columns: vec!["t", "T_opt", "H_opt", "kind"],
        rows,
    };
    let style = PlotStyle {
        title: "optimal temperature",
        x_col: 0,
        y_cols: &[1],
        log_x: true,
        log_y: true,
        surface: None,
    };
    finish(&table, &a.out, &style)
}

pub fn qsnr(a: &QsnrArgs) -> Outcome {
    if a.s.is_empty() {
        return Err(Failure::Usage("--s needs at least one value".into()));
    }
    let specs = a.s.iter().map(|&s| spectrum(s)).collect::<Result<Vec<_>, _>>()?;
    let qcfg = a.quad.config()?;
    let ocfg = a.opt.apply(OptimizerConfig::for_time())?;
    let sweep = a.temp.resolve(0.01, 10.0, 10, Scale::Log)?;
    let grid: Vec<(&OhmicSpectrum, f64)> =
        specs.iter().flat_map(|sp| sweep.values().into_iter().map(move |temp| (sp, temp))).collect();
    let rows = par_map(&grid, |&(spec, temp)| {
        let r = optimize::optimal_time(spec, temp, &ocfg, &qcfg)?;
        Ok(vec![Cell::from(spec.s()), temp.into(), metrology::qsnr(temp, r.f_opt)?.into()])
    })?;
    let table = Table {
        command: "qsnr",
        params: params(&[
            ("s", json!(a.s)),
            ("T", sweep.describe()),
            ("optimizer", OptArgs::describe(&ocfg)),
            ("quadrature", quad_params(&qcfg)),
        ]),
        columns: vec!["s", "T", "Q_opt"],
        rows,
    };
    let style = PlotStyle {
        title: "QSNR at the optimal time",
        x_col: 1,
        y_cols: &[2],
        log_x: true,
        log_y: false,
        surface: None,
    };
    finish(&table, &a.out, &style)
}

pub fn coherence(a: &CoherenceArgs) -> Outcome {
    let spec = spectrum(a.s)?;
    let temp = positive("temp", a.temp)?;
    let qcfg = a.quad.config()?;
    let sweep = a.time.resolve(0.0, 20.0, 101, Scale::Linear)?;
    let times = sweep.values();
    let prep = ProbePreparation::equatorial();
    let rows = par_map(&times, |&t| {
        let ev = dephasing::evaluate(&spec, temp, t, &qcfg)?;
        let h = metrology::qfi_dephasing(ev.gamma, ev.dgamma_dt)?;
        let rc = dephasing::residual_coherence(&dephasing::evolved_state(&prep, ev.gamma)?);
        Ok(vec![Cell::from(t), h.into(), rc.into()])
    })?;
    let table = Table {
        command: "coherence",
        params: params(&[
            ("s", json!(a.s)),
            ("temperature", json!(temp)),
            ("t", sweep.describe()),
            ("quadrature", quad_params(&qcfg)),
        ]),
        columns: vec!["t", "H", "rc"],
        rows,
    };
    let style = PlotStyle {
        title: "QFI and residual coherence",
        x_col: 0,
        y_cols: &[1, 2],
        log_x: sweep.scale == Scale::Log,
        log_y: false,
        surface: None,
    };
    finish(&table, &a.out, &style)
}

pub fn simulate(a: &SimulateArgs) -> Outcome {
    let spec = spectrum(a.s)?;
    let temp = positive("temp", a.temp)?;
    let qcfg = a.quad.config()?;
    let (time, optimum) = if a.t.trim().eq_ignore_ascii_case("auto") {
        let opt = optimize::optimal_time(&spec, temp, &OptimizerConfig::for_time(), &qcfg)?;
        (opt.x_opt, Some(opt))
    } else {
        let t: f64 = a
            .t
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("--t expects a number or `auto`, got `{}`", a.t)))?;
        (positive("t", t)?, None)
    };
    let run = EstimationRun { true_temperature: temp, time, shots: a.shots, repetitions: a.reps, seed: a.seed };
    let report = estimate::cramer_rao_check(&run, &spec, &qcfg)?;
    let doc = output::document(
        "simulate",
        json!({
            "s": a.s,
            "temperature": temp,
            "time": time,
            "time_source": if optimum.is_some() { "auto" } else { "fixed" },
            "optimum_kind": optimum.map(|o| o.kind.label()),
            "shots": a.shots,
            "repetitions": a.reps,
            "seed": a.seed,
            "quadrature": quad_params(&qcfg),
            "report": serde_json::to_value(report).expect("report serializes"),
        }),
    );
    output::emit(&output::json_text(&doc), a.out.as_deref())?;
    Ok(())
}

pub fn validate(a: &ValidateArgs) -> Outcome {
    let qcfg = a.quad.config()?;
    let rows = validate::run_suite(&qcfg);
    let failed: Vec<&str> = rows.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    let text = if a.json {
        output::json_text(&output::document(
            "validate",
            json!({ "passed": failed.is_empty(), "checks": rows }),
        ))
    } else {
        let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
        let mut s = String::new();
        for r in &rows {
            let mark = if r.passed { "PASS" } else { "FAIL" };
            s.push_str(&format!("{:<width$}  {mark}  {}\n", r.name, r.detail));
        }
        s.push_str(&format!("{}/{} checks passed\n", rows.len() - failed.len(), rows.len()));
        s
    };
    output::emit(&text, a.out.as_deref().map(Path::new))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Validation(failed.join(", ")))
    }
}
