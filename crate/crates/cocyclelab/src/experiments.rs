//! One runner per experiment kind. Each returns CSV tables plus verdicts for
//! the manifest; nothing here writes to disk.

use cocycle_core::continuity::{cocycle_sweep, frequency_sweep, ContinuitySweep, ScaleRule};
use cocycle_core::jacobi::ThoulessProbe;
use cocycle_core::lyapunov::{
    ap_residual, build_schedule, convergence_probe, finite_le, fit_ldt, ldt_empirical, ldt_k0, ScheduleMode,
};
use cocycle_core::torus::check_diophantine;
use cocycle_core::{TorusGrid, TorusPoint};
use serde_json::{json, Map, Value};

use crate::config::{random_direction, ExperimentConfig, Kind, ModeSpec};
use crate::error::LabError;
use crate::output::{fmt_f64, fmt_opt, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub verdicts: Map<String, Value>,
    /// Seed actually used, if the run was randomized.
    pub seed: Option<u64>,
}

impl Outcome {
    fn new(tables: Vec<Table>) -> Self {
        Outcome { tables, verdicts: Map::new(), seed: None }
    }
}

/// Dispatches on `kind`. `seed` overrides the configured perturbation seed.
pub fn run(kind: Kind, cfg: &ExperimentConfig, seed: Option<u64>) -> Result<Outcome, LabError> {
    if let Some(k) = cfg.kind {
        if k != kind {
            return Err(LabError::Config(format!("config is for \"{}\", not \"{}\"", k.name(), kind.name())));
        }
    }
    match kind {
        Kind::Le => run_le(cfg),
        Kind::Ldt => run_ldt(cfg),
        Kind::ContinuityCocycle => run_continuity_cocycle(cfg, seed),
        Kind::ContinuityFrequency => run_continuity_frequency(cfg),
        Kind::Ids => run_ids(cfg),
        Kind::Thouless => run_thouless(cfg),
        Kind::Schedule => run_schedule(cfg),
        Kind::ApCheck => run_ap_check(cfg),
    }
}

fn check_work(work: u128, cfg: &ExperimentConfig) -> Result<(), LabError> {
    if work > cfg.max_work() {
        return Err(LabError::Budget(format!("estimated {work} factor evaluations exceed max_work {}", cfg.max_work())));
    }
    Ok(())
}

fn grid_for(cfg: &ExperimentConfig, d: usize) -> Result<(TorusGrid, usize), LabError> {
    let m = cfg.scales.grid_m(d);
    Ok((TorusGrid::new(m, d)?, m))
}

fn coords(x: &[f64]) -> String {
    x.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(";")
}

fn flag(b: bool) -> String {
    if b { "true" } else { "false" }.to_string()
}

fn nonempty<T>(v: &[T], what: &str) -> Result<(), LabError> {
    if v.is_empty() {
        return Err(LabError::Config(format!("{what} must not be empty")));
    }
    Ok(())
}

pub fn run_le(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let sys = cfg.system()?;
    let w = cfg.frequency.build()?;
    let a = sys.cocycle_at(&w, cfg.rho, None)?;
    let (grid, m) = grid_for(cfg, a.dimension())?;
    nonempty(&cfg.scales.n, "scales.n")?;
    let probe = cfg.scales.n0.zip(cfg.scales.depth);
    let mut work: u128 = cfg.scales.n.iter().map(|&n| n as u128 * grid.len() as u128).sum();
    if let Some((n0, depth)) = probe {
        work += ((n0 as u128) << (depth.max(1) + 1)) * grid.len() as u128;
    }
    check_work(work, cfg)?;

    let mut t = Table::new(
        "le",
        &["N", "M", "L_prime", "log_det_half", "L", "clamp_fraction", "clamp_threshold", "warning"],
    );
    for &n in &cfg.scales.n {
        let r = finite_le(&a, &w, n, &grid)?;
        t.push(vec![
            n.to_string(),
            m.to_string(),
            fmt_f64(r.l_prime),
            fmt_f64(r.log_det_half),
            fmt_f64(r.l),
            fmt_f64(r.clamp_fraction),
            fmt_f64(r.clamp_threshold),
            r.warning.map(|_| "clamp_fraction".to_string()).unwrap_or_default(),
        ]);
    }
    let mut tables = vec![t];
    let mut verdicts = Map::new();
    if let Some((n0, depth)) = probe {
        let p = convergence_probe(&a, &w, n0, depth, &grid, Some(cfg.max_work()))?;
        let mut pt = Table::new("probe", &["N", "M", "L", "deviation", "envelope", "clamp_fraction", "ceiling_hit"]);
        for (i, &(n, dev)) in p.deviations.iter().enumerate() {
            pt.push(vec![
                n.to_string(),
                m.to_string(),
                fmt_f64(p.values[i].1),
                fmt_f64(dev),
                fmt_f64(p.envelope[i]),
                fmt_f64(p.max_clamp_fraction),
                flag(p.ceiling_hit),
            ]);
        }
        verdicts.insert("probe_ceiling_hit".into(), json!(p.ceiling_hit));
        tables.push(pt);
    }
    Ok(Outcome { tables, verdicts, seed: None })
}

pub fn run_ldt(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let spec = cfg.section(&cfg.ldt, "ldt")?;
    let sys = cfg.system()?;
    let w = cfg.frequency.build()?;
    let a = sys.cocycle_at(&w, cfg.rho, None)?;
    let (grid, m) = grid_for(cfg, a.dimension())?;
    nonempty(&cfg.scales.n, "scales.n")?;
    check_work(cfg.scales.n.iter().map(|&n| n as u128 * grid.len() as u128).sum(), cfg)?;
    let mut reports = Vec::new();
    for &n in &cfg.scales.n {
        let k0 = ldt_k0(&w, n, spec.k_max)?;
        reports.push(ldt_empirical(&a, &w, n, spec.epsilon, k0, &grid)?);
    }
    let fit = fit_ldt(&mut reports);
    let mut t = Table::new(
        "ldt",
        &["N", "M", "epsilon", "K0", "measure", "mean_L", "bound", "C_fit", "c_fit", "clamp_fraction"],
    );
    for r in &reports {
        t.push(vec![
            r.n.to_string(),
            m.to_string(),
            fmt_f64(r.epsilon),
            r.k0.map(|k| k.to_string()).unwrap_or_default(),
            fmt_f64(r.measure),
            fmt_f64(r.mean),
            fmt_opt(r.bound),
            fmt_opt(fit.map(|f| f.c_const)),
            fmt_opt(fit.map(|f| f.c_exp)),
            fmt_f64(r.clamp_fraction),
        ]);
    }
    let mut sorted: Vec<_> = reports.iter().map(|r| (r.n, r.measure)).collect();
    sorted.sort_by_key(|p| p.0);
    let monotone = sorted.windows(2).all(|p| p[1].1 <= p[0].1);
    let mut out = Outcome::new(vec![t]);
    out.verdicts.insert("trend_nonincreasing".into(), json!(monotone));
    Ok(out)
}

fn rule_of(cfg: &ExperimentConfig) -> ScaleRule {
    let p = cfg.perturbation.clone().unwrap_or_default();
    ScaleRule { beta: p.beta, n_unit: p.n_unit, n_min: p.n_min, n_max: p.n_max }
}

fn continuity_table(name: &str, size_col: &'static str, s: &ContinuitySweep, targets: Option<&[Vec<f64>]>) -> Table {
    let mut header = vec![size_col];
    if targets.is_some() {
        header.push("omega_prime");
    }
    header.extend_from_slice(&[
        "N",
        "M",
        "L_base",
        "L_perturbed",
        "deviation",
        "probe_delta",
        "clamp_fraction",
        "gamma_fit",
        "fit_residual",
        "fit_points",
        "beta",
    ]);
    let mut t = Table::new(name, &header);
    for (i, r) in s.rows.iter().enumerate() {
        let mut row = vec![fmt_f64(r.size)];
        if let Some(ts) = targets {
            row.push(coords(&ts[i]));
        }
        row.extend([
            r.n.to_string(),
            r.grid_m.to_string(),
            fmt_f64(r.l_base),
            fmt_f64(r.l_perturbed),
            fmt_f64(r.deviation),
            fmt_f64(r.probe_delta),
            fmt_f64(r.clamp_fraction),
            fmt_opt(s.fit.map(|f| f.gamma)),
            fmt_opt(s.fit.map(|f| f.residual)),
            s.fit.map(|f| f.points.to_string()).unwrap_or_else(|| "0".into()),
            fmt_f64(s.rule.beta),
        ]);
        t.push(row);
    }
    t
}

fn fit_verdicts(s: &ContinuitySweep) -> Map<String, Value> {
    let mut v = Map::new();
    v.insert("gamma_fit".into(), s.fit.map_or(Value::Null, |f| json!(f.gamma)));
    v.insert("fit_residual".into(), s.fit.map_or(Value::Null, |f| json!(f.residual)));
    v
}

pub fn run_continuity_cocycle(cfg: &ExperimentConfig, seed: Option<u64>) -> Result<Outcome, LabError> {
    let p = cfg.section(&cfg.perturbation, "perturbation")?;
    let seed = seed
        .or(p.seed)
        .ok_or_else(|| LabError::Config("randomized perturbation needs a seed (config or --seed)".into()))?;
    nonempty(&p.epsilons, "perturbation.epsilons")?;
    let sys = cfg.system()?;
    let w = cfg.frequency.build()?;
    let a = sys.cocycle_at(&w, cfg.rho, None)?;
    let (grid, _) = grid_for(cfg, a.dimension())?;
    let rule = rule_of(cfg);
    rule.validate()?;
    let work: u128 = p.epsilons.iter().map(|&e| 3 * rule.cocycle_scale(e) as u128 * grid.len() as u128).sum();
    check_work(work, cfg)?;
    let dir = random_direction(a.dimension(), p.degree, seed)?;
    let s = cocycle_sweep(&a, &w, &dir, &p.epsilons, rule, &grid)?;
    let mut out = Outcome::new(vec![continuity_table("continuity_cocycle", "epsilon", &s, None)]);
    out.verdicts = fit_verdicts(&s);
    out.seed = Some(seed);
    Ok(out)
}

pub fn run_continuity_frequency(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let fs = cfg.section(&cfg.frequency_sweep, "frequency_sweep")?;
    let sys = cfg.system()?;
    let w = cfg.frequency.build()?;
    let dio = check_diophantine(&w, cfg.frequency.k_max)?;
    if !dio.holds {
        return Err(LabError::Core(cocycle_core::Error::NotDiophantine { k: dio.first_violation.unwrap_or_default() }));
    }
    let a = sys.cocycle_at(&w, cfg.rho, None)?;
    let (grid, _) = grid_for(cfg, a.dimension())?;
    let d = w.dimension();
    let u = fs.direction.clone().unwrap_or_else(|| {
        let mut e = vec![0.0; d];
        e[0] = 1.0;
        e
    });
    if u.len() != d {
        return Err(LabError::Config(format!("direction has {} entries, frequency has {d}", u.len())));
    }
    let un = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(un > 0.0) {
        return Err(LabError::Config("direction must be nonzero".into()));
    }
    let mut targets: Vec<Vec<f64>> = fs
        .h_values
        .iter()
        .map(|&h| w.omega().iter().zip(&u).map(|(o, ui)| o + h * ui / un).collect())
        .collect();
    targets.extend(fs.targets.iter().cloned());
    nonempty(&targets, "frequency_sweep targets")?;
    let rule = rule_of(cfg);
    check_work(targets.len() as u128 * 3 * rule.n_max as u128 * grid.len() as u128, cfg)?;
    let s = frequency_sweep(&a, &w, &targets, rule, &grid)?;
    let mut out = Outcome::new(vec![continuity_table("continuity_frequency", "h", &s, Some(&targets))]);
    out.verdicts = fit_verdicts(&s);
    Ok(out)
}

pub fn run_ids(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let spec = cfg.section(&cfg.ids, "ids")?;
    let w = cfg.frequency.build()?;
    let fam = cfg.system()?.jacobi_family(&w, cfg.rho)?;
    let size = 2 * spec.n as u128 + 1;
    check_work(size * (2 * spec.windows.len() as u128 + 2 * spec.scan.as_ref().map_or(0, |s| s.h_values.len()) as u128) * 5, cfg)?;
    let d = fam.dimension();
    let origin = TorusPoint::origin(d);
    let m = if spec.average { 5 } else { 1 };
    let mut t = Table::new("ids", &["E1", "E2", "N", "M", "count", "k_value", "x", "clamp_fraction"]);
    for &[e1, e2] in &spec.windows {
        let r = if spec.average { fam.ids_averaged(e1, e2, spec.n)? } else { fam.ids(&origin, e1, e2, spec.n)? };
        t.push(vec![
            fmt_f64(e1),
            fmt_f64(e2),
            spec.n.to_string(),
            m.to_string(),
            fmt_f64(r.count),
            fmt_f64(r.k_value),
            if spec.average { "average".into() } else { coords(&r.x) },
            fmt_f64(0.0),
        ]);
    }
    let mut tables = vec![t];
    let mut out_verdicts = Map::new();
    if let Some(scan) = &spec.scan {
        let s = fam.ids_modulus_scan(&origin, scan.center, &scan.h_values, spec.n)?;
        let mut st = Table::new(
            "ids_scan",
            &["E_center", "h", "N", "M", "count", "k_value", "dropped", "gamma_fit", "fit_residual", "clamp_fraction"],
        );
        for p in &s.points {
            st.push(vec![
                fmt_f64(scan.center),
                fmt_f64(p.h),
                spec.n.to_string(),
                "1".into(),
                fmt_f64(p.count),
                fmt_f64(p.k_value),
                flag(p.dropped),
                fmt_opt(s.fit.map(|f| f.slope)),
                fmt_opt(s.fit.map(|f| f.residual)),
                fmt_f64(0.0),
            ]);
        }
        out_verdicts.insert("ids_gamma_fit".into(), s.fit.map_or(Value::Null, |f| json!(f.slope)));
        tables.push(st);
    }
    Ok(Outcome { tables, verdicts: out_verdicts, seed: None })
}

pub fn run_thouless(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let spec = cfg.section(&cfg.thouless, "thouless")?;
    nonempty(&spec.energies, "thouless.energies")?;
    let w = cfg.frequency.build()?;
    let fam = cfg.system()?.jacobi_family(&w, cfg.rho)?;
    let (grid, m) = grid_for(cfg, fam.dimension())?;
    let size = 2 * spec.n as u128 + 1;
    check_work(40 * size * size + spec.energies.len() as u128 * spec.n as u128 * grid.len() as u128, cfg)?;
    let probe = ThoulessProbe::new(&fam, spec.n)?;
    let mut t = Table::new(
        "thouless",
        &[
            "E",
            "N",
            "M",
            "L_transfer",
            "L_thouless",
            "L_pivot",
            "gap",
            "min_distance",
            "clamped_terms",
            "clamp_fraction",
        ],
    );
    let mut max_gap: f64 = 0.0;
    for &e in &spec.energies {
        let c = probe.check(e, &grid)?;
        max_gap = max_gap.max(c.gap);
        t.push(vec![
            fmt_f64(e),
            spec.n.to_string(),
            m.to_string(),
            fmt_f64(c.l_transfer),
            fmt_f64(c.l_thouless),
            fmt_f64(c.l_pivot),
            fmt_f64(c.gap),
            fmt_f64(c.min_distance),
            c.clamped_terms.to_string(),
            fmt_f64(c.record.clamp_fraction),
        ]);
    }
    let mut out = Outcome::new(vec![t]);
    out.verdicts.insert("max_gap".into(), json!(max_gap));
    Ok(out)
}

pub fn run_schedule(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let s = cfg.section(&cfg.schedule, "schedule")?;
    let mode = match s.mode {
        ModeSpec::Strict => ScheduleMode::Strict,
        ModeSpec::Toy => ScheduleMode::Toy,
    };
    let sch = build_schedule(s.kappa0, s.c, s.sigma, s.tau, s.rho, s.max_stages, mode)?;
    let mut t = Table::new(
        "schedule",
        &["s", "kappa", "K", "delta", "N", "N_required", "n_admissible", "strip_ok", "M", "clamp_fraction"],
    );
    for st in &sch.stages {
        t.push(vec![
            st.s.to_string(),
            fmt_f64(st.kappa),
            fmt_f64(st.k),
            fmt_f64(st.delta),
            fmt_f64(st.n),
            fmt_f64(st.required_n(sch.c_big)),
            flag(st.n_admissible),
            flag(st.strip_ok),
            "0".into(),
            fmt_f64(0.0),
        ]);
    }
    let mut out = Outcome::new(vec![t]);
    out.verdicts.insert("eta".into(), json!(sch.eta));
    out.verdicts.insert("truncated".into(), json!(sch.truncated));
    out.verdicts.insert("all_admissible".into(), json!(sch.stages.iter().all(|s| s.n_admissible)));
    Ok(out)
}

pub fn run_ap_check(cfg: &ExperimentConfig) -> Result<Outcome, LabError> {
    let spec = cfg.section(&cfg.ap, "ap")?;
    nonempty(&spec.n1, "ap.n1")?;
    let sys = cfg.system()?;
    let w = cfg.frequency.build()?;
    let a = sys.cocycle_at(&w, cfg.rho, None)?;
    let d = a.dimension();
    let points: Vec<TorusPoint> = if spec.points.is_empty() {
        let g = TorusGrid::new(spec.grid_points, d)?;
        (0..g.len()).map(|i| g.node(i)).collect()
    } else {
        if d != 1 {
            return Err(LabError::Config("explicit ap.points are only supported on T^1".into()));
        }
        spec.points.iter().map(|&x| TorusPoint::new(vec![x])).collect::<Result<_, _>>()?
    };
    let per_point: u128 = spec.n1.iter().map(|&n1| n1 as u128 + 3 * (n1 as u128 + spec.n as u128)).sum();
    check_work(per_point * points.len() as u128, cfg)?;
    let mut t = Table::new(
        "ap",
        &[
            "x",
            "N",
            "N1",
            "M",
            "L_N",
            "L_2N",
            "max_shift_deviation",
            "residual",
            "bound",
            "hypotheses_met",
            "within_bound",
            "clamp_fraction",
        ],
    );
    let (mut met, mut ok) = (0usize, 0usize);
    for &n1 in &spec.n1 {
        for x in &points {
            let c = ap_residual(&a, &w, x, spec.n, n1)?;
            if c.hypotheses_met {
                met += 1;
                ok += c.within_bound() as usize;
            }
            t.push(vec![
                coords(x.coords()),
                spec.n.to_string(),
                n1.to_string(),
                points.len().to_string(),
                fmt_f64(c.l_n),
                fmt_f64(c.l_2n),
                fmt_f64(c.max_shift_deviation),
                fmt_f64(c.residual),
                fmt_f64(c.bound),
                flag(c.hypotheses_met),
                flag(c.within_bound()),
                fmt_f64(if c.clamped { 1.0 } else { 0.0 }),
            ]);
        }
    }
    let mut out = Outcome::new(vec![t]);
    out.verdicts.insert("hypotheses_met".into(), json!(met));
    out.verdicts.insert("within_bound_when_met".into(), json!(ok));
    Ok(out)
}

