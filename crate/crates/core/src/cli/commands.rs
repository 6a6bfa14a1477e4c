//! One function per subcommand.

use std::f64::consts::TAU;

use serde_json::{json, Value};

use super::config::{Command, Direction, RunConfig};
use super::output::{Emitted, Field, Table};
use super::{svg, CliError};
use crate::analysis::{check_linear_stability, check_uniqueness, scan_diagram, DiagramRequest, NumericStatus};
use crate::bodies::{stokes_closed_form, stokes_quadrature, BodyShape};
use crate::dynamics::{DissipationParams, FullModel, FullState};
use crate::kepler::Orbit;
use crate::potential::{StokesSource, SystemParams};
use crate::solver::{
    continue_dissipative, integrate_full_model, monodromy, solve_periodic_conservative, PeriodicSolution,
    ShootingOptions,
};

pub fn dispatch(cmd: Command, cfg: &RunConfig) -> Result<Emitted, CliError> {
    let system = cfg.system()?;
    let need = || system.clone().ok_or_else(|| CliError::Config(format!("{cmd} needs a system")));
    match cmd {
        Command::Orbit => orbit(cfg, &need()?),
        Command::Lambdas => lambdas(&need()?),
        Command::Periodic => periodic(cfg, &need()?),
        Command::Floquet => floquet(cfg, &need()?),
        Command::Conditions => conditions(&need()?),
        Command::Scan => scan(cfg),
        Command::Stokes => stokes(cfg, system.as_ref()),
        Command::FullModel => full_model(cfg, system.as_ref()),
        Command::ConvertUnits => convert_units(cfg),
    }
}

fn no_svg(json: Value, table: Table) -> Emitted {
    Emitted { json, table, svg: None }
}

fn orbit(cfg: &RunConfig, p: &SystemParams) -> Result<Emitted, CliError> {
    let n = cfg.orbit.samples.max(2);
    let o = p.orbit();
    let mut table = Table::new(&["t", "u", "r", "f", "f_dot", "f_ddot"]);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let t = TAU * i as f64 / (n - 1) as f64;
        let s = o.state(t).map_err(CliError::runtime)?;
        table.push(vec![s.t.into(), s.u.into(), s.r.into(), s.f.into(), s.f_dot.into(), s.f_ddot.into()]);
        rows.push(s);
    }
    Ok(no_svg(json!({ "orbit": o, "samples": rows }), table))
}

fn lambdas(p: &SystemParams) -> Result<Emitted, CliError> {
    let ls = p.lambda_set();
    let mut table = Table::new(&["term", "m1", "m2", "value"]);
    table.push(vec!["Lambda0".into(), Field::Empty, Field::Empty, ls.lambda0.into()]);
    for (j, v) in ls.lambda.iter().enumerate() {
        let name = if j == 0 { "Lambda1" } else { "Lambda2" };
        table.push(vec![name.into(), Field::Empty, Field::Empty, (*v).into()]);
    }
    for c in &ls.coupling {
        table.push(vec!["coupling".into(), Field::Int(c.m1 as i64), Field::Int(c.m2 as i64), c.value.into()]);
    }
    let json = json!({
        "system": p,
        "derived": {
            "C": p.c(),
            "lambda": p.lambda(),
            "dhat": p.dhat(),
            "qhat": p.qhat(),
            "masses": p.masses(),
        },
        "lambdas": ls,
    });
    Ok(no_svg(json, table))
}

fn solve(cfg: &RunConfig, p: &SystemParams, delta: [f64; 2]) -> Result<PeriodicSolution, CliError> {
    let ls = p.lambda_set();
    let opts = ShootingOptions {
        multistart: cfg.periodic.multistart,
        guess: cfg.periodic.guess,
        ..ShootingOptions::default()
    };
    let seed = solve_periodic_conservative(p, &ls, &opts, &cfg.solver).map_err(CliError::runtime)?;
    let d = DissipationParams::new(delta).map_err(|e| CliError::Config(e.to_string()))?;
    continue_dissipative(p, &ls, &d, &seed, &cfg.solver).map_err(CliError::runtime)
}

fn solution_json(sol: &PeriodicSolution) -> Value {
    json!({
        "theta0": sol.theta0,
        "v0": sol.v0,
        "delta": sol.delta.delta(),
        "residual": sol.residual,
        "amplitude": sol.amplitude,
        "periodicity_defect": sol.periodicity_defect,
        "symmetry_defect": sol.symmetry_defect,
        "iterations": sol.iterations,
        "alternatives": sol.alternatives,
    })
}

fn periodic(cfg: &RunConfig, p: &SystemParams) -> Result<Emitted, CliError> {
    let sol = solve(cfg, p, cfg.periodic.delta)?;
    let samples = sol.samples(cfg.periodic.samples);
    let mut table = Table::new(&["t", "theta1", "theta2", "theta1_dot", "theta2_dot"]);
    for s in &samples {
        table.push(s.iter().map(|x| Field::Num(*x)).collect());
    }
    let mut json = solution_json(&sol);
    json["samples"] = json!(samples
        .iter()
        .map(|s| json!({"t": s[0], "theta": [s[1], s[2]], "theta_dot": [s[3], s[4]]}))
        .collect::<Vec<_>>());
    Ok(Emitted {
        json,
        table,
        svg: Some(svg::periodic(&samples)),
    })
}

fn floquet(cfg: &RunConfig, p: &SystemParams) -> Result<Emitted, CliError> {
    let sol = solve(cfg, p, cfg.floquet.delta)?;
    let m = monodromy(p, &p.lambda_set(), &sol.delta, &sol, &cfg.solver).map_err(CliError::runtime)?;
    let mut table = Table::new(&["index", "re", "im", "modulus"]);
    for (i, z) in m.multipliers.iter().enumerate() {
        table.push(vec![Field::Int(i as i64), z.re.into(), z.im.into(), z.norm().into()]);
    }
    let json = json!({
        "solution": solution_json(&sol),
        "multipliers": m.multipliers.iter().map(|z| json!({"re": z.re, "im": z.im, "modulus": z.norm()})).collect::<Vec<_>>(),
        "max_modulus": m.max_modulus,
        "classification": m.classification.as_str(),
        "determinant": m.determinant(),
        "symplectic_defect": m.symplectic_defect(),
        "scaled": m.scaled,
        "monodromy": m.monodromy,
    });
    Ok(no_svg(json, table))
}

fn conditions(p: &SystemParams) -> Result<Emitted, CliError> {
    let ls = p.lambda_set();
    let u = check_uniqueness(p, &ls);
    let r = check_linear_stability(p, &ls);
    let mut table = Table::new(&["condition", "ok", "margin"]);
    table.push(vec!["uniqueness".into(), u.uniqueness_ok.into(), u.margin.into()]);
    table.push(vec!["lin1".into(), r.lin1_ok.into(), r.margins.lin1.into()]);
    table.push(vec!["lin2".into(), r.lin2_ok.into(), r.margins.lin2.into()]);
    table.push(vec!["lin3".into(), r.lin3_ok.into(), r.margins.lin3.into()]);
    table.push(vec!["stable".into(), r.stable.into(), Field::Empty]);
    Ok(no_svg(json!({ "uniqueness": u, "stability": r }), table))
}

fn scan(cfg: &RunConfig) -> Result<Emitted, CliError> {
    let s = &cfg.scan;
    let mut req = DiagramRequest::uniform(s.n_e, s.e_max, s.n_lambda, s.lambda_max, s.qhat, s.geometry);
    if let Some(e) = &s.e_axis {
        req.e_axis = e.clone();
    }
    if let Some(l) = &s.lambda_axis {
        req.lambda_axis = l.clone();
    }
    req.validate().map_err(|e| CliError::Config(format!("scan: {e}")))?;
    let grid = scan_diagram(&req, &cfg.solver).map_err(CliError::runtime)?;
    let count = |st: NumericStatus| grid.cells.iter().filter(|c| c.numeric_status == st).count();
    let summary = json!({
        "stable": count(NumericStatus::Stable),
        "unstable": count(NumericStatus::Unstable),
        "marginal": count(NumericStatus::Marginal),
        "failed": count(NumericStatus::Failed),
        "soundness_violations": grid.soundness_violations().len(),
    });
    let mut table = Table::new(&[
        "e",
        "lambda",
        "qhat",
        "analytic_unique",
        "analytic_stable",
        "numeric_status",
        "max_multiplier_modulus",
    ]);
    for c in &grid.cells {
        table.push(vec![
            c.e.into(),
            c.lambda.into(),
            grid.qhat.into(),
            c.analytic_unique.into(),
            c.analytic_stable.into(),
            c.numeric_status.as_str().into(),
            c.max_multiplier_modulus.into(),
        ]);
    }
    let svg = svg::diagram(&grid);
    let mut json = serde_json::to_value(&grid).map_err(CliError::runtime)?;
    json["summary"] = summary;
    Ok(Emitted {
        json,
        table,
        svg: Some(svg),
    })
}

fn stokes(cfg: &RunConfig, system: Option<&SystemParams>) -> Result<Emitted, CliError> {
    let s = &cfg.stokes;
    let bodies: Vec<(usize, BodyShape)> = match (s.body, system.and_then(|p| p.bodies())) {
        (Some(b), _) => vec![(1, b)],
        (None, Some([b1, b2])) => vec![(1, *b1), (2, *b2)],
        (None, None) => {
            return Err(CliError::Config(
                "stokes needs stokes.body or a system given by its bodies".into(),
            ))
        }
    };
    if s.l_max < 0 || s.l_max % 2 != 0 {
        return Err(CliError::Config(format!("stokes.l_max must be even and non-negative, got {}", s.l_max)));
    }
    let mut table = Table::new(&["body", "l", "m", "value"]);
    let mut rows = Vec::new();
    for (k, b) in &bodies {
        for l in (0..=s.l_max).step_by(2) {
            for m in (0..=l).step_by(2) {
                let z = match s.source {
                    StokesSource::ClosedForm => stokes_closed_form(b, l, m),
                    StokesSource::Quadrature => stokes_quadrature(b, l, m),
                }
                .map_err(|e| CliError::Config(e.to_string()))?;
                table.push(vec![Field::Int(*k as i64), Field::Int(l), Field::Int(m), z.value.into()]);
                rows.push(json!({"body": k, "l": l, "m": m, "value": z.value}));
            }
        }
    }
    Ok(no_svg(json!({ "source": s.source, "coefficients": rows }), table))
}

fn full_model(cfg: &RunConfig, system: Option<&SystemParams>) -> Result<Emitted, CliError> {
    let s = &cfg.full_model;
    let from_system = system.and_then(|p| p.bodies().map(|b| (*p.orbit(), *b)));
    let (orbit, b1, b2): (Orbit, BodyShape, BodyShape) = match (s.orbit, s.body1, s.body2, from_system) {
        (Some(o), Some(b1), Some(b2), _) => (o, b1, b2),
        (o, None, None, Some((so, [b1, b2]))) => (o.unwrap_or(so), b1, b2),
        _ => {
            return Err(CliError::Config(
                "full-model needs full_model.{orbit, body1, body2} or a system given by its bodies".into(),
            ))
        }
    };
    if !(s.periods.is_finite() && s.periods > 0.0) {
        return Err(CliError::Config(format!("full_model.periods must be positive, got {}", s.periods)));
    }
    let model = FullModel::new(&b1, &b2, orbit.gravitational_constant(), s.forcing)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let k = orbit.state(0.0).map_err(CliError::runtime)?;
    let s0 = FullState {
        r: k.r,
        r_dot: 0.0,
        f: k.f,
        f_dot: k.f_dot,
        theta: s.theta,
        theta_dot: s.theta_dot.unwrap_or([1.0, 1.0]),
    };
    let t1 = s.periods * TAU;
    let traj = integrate_full_model(&model, &s0, t1, &cfg.solver, true).map_err(CliError::runtime)?;
    let e0 = model.energy(&s0).map_err(CliError::runtime)?;
    let l0 = model.angular_momentum(&s0);
    let n = s.samples.max(2);
    let mut table = Table::new(&[
        "t", "r", "f", "theta1", "theta2", "r_dot", "f_dot", "theta1_dot", "theta2_dot", "energy", "angular_momentum",
    ]);
    let (mut de, mut dl) = (0.0f64, 0.0f64);
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let t = t1 * i as f64 / (n - 1) as f64;
        let y = if i == n - 1 { traj.y1 } else { traj.eval(t).expect("inside the integration interval") };
        let st = FullState::from_slice(&y);
        let e = model.energy(&st).map_err(CliError::runtime)?;
        let l = model.angular_momentum(&st);
        de = de.max(((e - e0) / e0).abs());
        dl = dl.max(((l - l0) / l0).abs());
        let mut row: Vec<Field> = std::iter::once(t).chain(y).map(Field::Num).collect();
        row.push(e.into());
        row.push(l.into());
        table.push(row);
        samples.push(json!({"t": t, "state": st, "energy": e, "angular_momentum": l}));
    }
    let json = json!({
        "orbit": orbit,
        "forcing": s.forcing,
        "periods": s.periods,
        "energy_drift": de,
        "angular_momentum_drift": dl,
        "steps": {"accepted": traj.accepted, "rejected": traj.rejected},
        "samples": samples,
    });
    Ok(no_svg(json, table))
}

fn convert_units(cfg: &RunConfig) -> Result<Emitted, CliError> {
    let c = &cfg.convert_units;
    let u = c
        .units
        .ok_or_else(|| CliError::Config("convert-units needs convert_units.units".into()))?;
    u.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let out = match c.direction {
        Direction::ToModel => u.to_model_units(c.quantity, c.value),
        Direction::FromModel => u.from_model_units(c.quantity, c.value),
    };
    let direction = match c.direction {
        Direction::ToModel => "to_model",
        Direction::FromModel => "from_model",
    };
    let mut table = Table::new(&["quantity", "direction", "input", "output", "scale"]);
    let scale = u.scale(c.quantity);
    table.push(vec![
        c.quantity.to_string().as_str().into(),
        direction.into(),
        c.value.into(),
        out.into(),
        scale.into(),
    ]);
    let json = json!({
        "units": u,
        "quantity": c.quantity,
        "direction": direction,
        "input": c.value,
        "output": out,
        "scale": scale,
    });
    Ok(no_svg(json, table))
}
