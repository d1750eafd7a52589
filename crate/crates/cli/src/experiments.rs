//! Dispatch from a [`RunConfig`] to the simulation modules.

use eprsim_core::control::{
    composite_unitary, crosstalk_report, scheme1_sequence, scheme2_literal_sequence,
    scheme2_sequence, site_models,
};
use eprsim_core::measure::{
    chsh_s, epr_infer, fringe_grid, fringe_scan, ghz_correlations, wigner_test, ExperimentResult,
};
use eprsim_core::noise::predicted_s;
use eprsim_core::qcore::{rotation, Axis, Unitary};
use eprsim_core::shots::ShotContext;
use eprsim_core::source::{ghz_ket, path_ket, prepare_cv_state, singlet_ket, werner};
use eprsim_seqlang::{check, lower_with, render_all, LowerOptions};
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

use crate::config::*;
use crate::CliError;

/// Everything an experiment produced, ready to be written out.
#[derive(Clone, Debug)]
pub struct Report {
    /// `params` with every default filled in.
    pub params: Value,
    pub results: Vec<ExperimentResult>,
    /// Experiment-specific structured output.
    pub details: Value,
    pub summary: String,
    /// Set when a physical invariant check failed; outputs are still written.
    pub failure: Option<String>,
    /// Text printed verbatim to stdout (lint diagnostics).
    pub listing: Option<String>,
}

impl Report {
    fn new<P: Serialize>(params: &P, results: Vec<ExperimentResult>, summary: String) -> Self {
        Report {
            params: serde_json::to_value(params).expect("params serialize"),
            results,
            details: Value::Null,
            summary,
            failure: None,
            listing: None,
        }
    }
}

fn record(
    estimator: &str,
    value: f64,
    std_error: f64,
    shots: u64,
    ctx: &ShotContext,
    settings: Value,
) -> ExperimentResult {
    let settings: BTreeMap<String, Value> = match settings {
        Value::Object(m) => m.into_iter().collect(),
        _ => BTreeMap::new(),
    };
    ExperimentResult {
        estimator: estimator.to_string(),
        value,
        std_error,
        shots,
        seed: ctx.seed,
        settings,
    }
}

fn mode(shots: u64) -> String {
    if shots == 0 {
        "analytic".into()
    } else {
        format!("sampled, {shots} shots")
    }
}

pub fn execute(cfg: &RunConfig, workers: usize) -> Result<Report, CliError> {
    cfg.check()?;
    let ctx = ShotContext::new(cfg.seed.unwrap_or(0), workers);
    match cfg.experiment {
        Experiment::Chsh => chsh(cfg, &ctx),
        Experiment::Wigner => wigner(cfg, &ctx),
        Experiment::Fringes => fringes(cfg, &ctx),
        Experiment::Epr => epr(cfg, &ctx),
        Experiment::Ghz => ghz(cfg, &ctx),
        Experiment::GatesVerify => gates_verify(cfg),
        Experiment::Compile => compile(cfg),
        Experiment::Lint => lint(cfg),
    }
}

fn chsh(cfg: &RunConfig, ctx: &ShotContext) -> Result<Report, CliError> {
    let p: ChshParams = cfg.params()?;
    let state = werner(&singlet_ket(), cfg.noise.singlet_fidelity)?;
    let s = chsh_s(&p.settings, &state, cfg.shots, Some(&cfg.noise), ctx)?;
    let summary = if cfg.shots == 0 {
        format!("S={:.6} (analytic)", s.value)
    } else {
        format!(
            "S={:.6} ± {:.6} ({})",
            s.value,
            s.std_error,
            mode(cfg.shots)
        )
    };
    let predicted = record(
        "chsh_predicted_s",
        predicted_s(&cfg.noise),
        0.0,
        0,
        ctx,
        json!({ "model": "2*sqrt(2)*effective_visibility" }),
    );
    Ok(Report::new(&p, vec![s, predicted], summary))
}

fn wigner(cfg: &RunConfig, ctx: &ShotContext) -> Result<Report, CliError> {
    let p: WignerParams = cfg.params()?;
    let state = werner(&singlet_ket(), cfg.noise.singlet_fidelity)?;
    let w = wigner_test(p.a, p.b, p.c, &state, cfg.shots, ctx)?;
    let rhs = w.p_ac.value + w.p_cb.value;
    let summary = format!(
        "P++(a,b)={:.6} vs P++(a,c)+P++(c,b)={:.6}: {} ({})",
        w.p_ab.value,
        rhs,
        if w.violation { "violated" } else { "satisfied" },
        mode(cfg.shots)
    );
    let excess = record(
        "wigner_excess",
        w.excess,
        w.excess_std_error,
        cfg.shots,
        ctx,
        json!({ "violation": w.violation }),
    );
    Ok(Report::new(
        &p,
        vec![w.p_ab, w.p_ac, w.p_cb, excess],
        summary,
    ))
}

fn fringes(cfg: &RunConfig, ctx: &ShotContext) -> Result<Report, CliError> {
    let p: FringeParams = cfg.params()?;
    let state = werner(&path_ket(), cfg.noise.singlet_fidelity)?;
    let scan = fringe_scan(
        &fringe_grid(p.grid_points),
        &state,
        cfg.shots,
        &cfg.noise,
        ctx,
    )?;
    let mut results: Vec<ExperimentResult> = scan
        .points
        .iter()
        .map(|pt| {
            record(
                "fringe_p_plus",
                pt.p_plus,
                pt.std_error,
                cfg.shots,
                ctx,
                json!({ "phi_l": pt.phi_l, "phi_r": pt.phi_r }),
            )
        })
        .collect();
    results.push(record(
        "fringe_visibility",
        scan.visibility,
        scan.visibility_std_error,
        cfg.shots,
        ctx,
        json!({ "grid_points": p.grid_points }),
    ));
    let summary = if cfg.shots == 0 {
        format!("V={:.6} (analytic)", scan.visibility)
    } else {
        format!(
            "V={:.6} ± {:.6} ({})",
            scan.visibility,
            scan.visibility_std_error,
            mode(cfg.shots)
        )
    };
    Ok(Report::new(&p, results, summary))
}

fn epr(cfg: &RunConfig, ctx: &ShotContext) -> Result<Report, CliError> {
    let p: EprParams = cfg.params()?;
    let cv = match &p.state {
        Some(s) => s.clone(),
        None => prepare_cv_state(&p.dissociation, p.initial_size)?,
    };
    let r = epr_infer(&cv, p.sigma_img, p.t_tof, cfg.shots, ctx)?;
    let results = vec![
        record(
            "epr_delta_x",
            r.delta_x,
            0.0,
            cfg.shots,
            ctx,
            json!({ "unit": "um" }),
        ),
        record(
            "epr_delta_p",
            r.delta_p,
            0.0,
            cfg.shots,
            ctx,
            json!({ "unit": "hbar/um" }),
        ),
        record(
            "epr_product",
            r.product,
            r.std_error,
            cfg.shots,
            ctx,
            json!({ "unit": "hbar", "bound": r.heisenberg_bound, "violates_bound": r.violates_bound }),
        ),
    ];
    let relation = if r.product < r.heisenberg_bound {
        "<"
    } else {
        ">="
    };
    let summary = format!(
        "dx*dp={:.6} hbar {relation} hbar/2 ({})",
        r.product,
        mode(cfg.shots)
    );
    let mut report = Report::new(&p, results, summary);
    report.details = serde_json::to_value(&r).expect("serializable");
    Ok(report)
}

fn ghz(cfg: &RunConfig, ctx: &ShotContext) -> Result<Report, CliError> {
    let p: GhzParams = cfg.params()?;
    let state = werner(&ghz_ket(), cfg.noise.singlet_fidelity)?;
    let labels: Vec<&str> = p.labels.iter().map(String::as_str).collect();
    let results = ghz_correlations(&state, &labels, cfg.shots, ctx)?;
    let parts: Vec<String> = labels
        .iter()
        .zip(&results)
        .map(|(l, r)| format!("{l}={:+.6}", r.value))
        .collect();
    let summary = format!("{} ({})", parts.join(" "), mode(cfg.shots));
    Ok(Report::new(&p, results, summary))
}

fn gates_verify(cfg: &RunConfig) -> Result<Report, CliError> {
    let p: GatesParams = cfg.params()?;
    let ctx = ShotContext::new(cfg.seed.unwrap_or(0), 1);
    let identity = Unitary::identity(2);
    let mut results = Vec::new();
    let mut worst = [0.0f64; 2];
    let mut crosstalk = Map::new();
    for &scheme in &p.schemes {
        let build = match scheme {
            Scheme::Scheme1 => scheme1_sequence,
            Scheme::Scheme2 => scheme2_sequence,
            Scheme::Scheme2Literal => scheme2_literal_sequence,
        };
        for theta in p.grid() {
            let schedule = build(theta, &p.targets, &p.gate)?;
            let models = site_models(&schedule, p.static_shift);
            let ideal = rotation(Axis::X, theta)?;
            for (site, model) in models.iter().enumerate() {
                let target = schedule.addresses(site);
                let u = composite_unitary(&schedule, site, model)?;
                let d = u.phase_distance(if target { &ideal } else { &identity });
                worst[usize::from(!target)] = worst[usize::from(!target)].max(d);
                results.push(record(
                    "gate_distance",
                    d,
                    0.0,
                    0,
                    &ctx,
                    json!({
                        "scheme": scheme.name(),
                        "theta": theta,
                        "site": site,
                        "role": if target { "target" } else { "non_target" },
                    }),
                ));
            }
        }
        let probe = build(std::f64::consts::FRAC_PI_2, &p.targets, &p.gate)?;
        let report = crosstalk_report(&probe, p.gate.rabi, p.gate.shift)?;
        crosstalk.insert(
            scheme.name().into(),
            serde_json::to_value(report).expect("serializable"),
        );
    }
    let bad = results
        .iter()
        .filter(|r| r.value.is_nan() || r.value > p.tolerance)
        .count();
    let summary = format!(
        "max distance target={:.3e} non-target={:.3e} over {} rows: {}",
        worst[0],
        worst[1],
        results.len(),
        if bad == 0 { "ok" } else { "FAILED" }
    );
    let mut report = Report::new(&p, results, summary);
    report.details = json!({ "crosstalk_at_half_pi": crosstalk });
    if bad > 0 {
        report.failure = Some(format!(
            "{bad} gate distance(s) exceed tolerance {:e}",
            p.tolerance
        ));
    }
    Ok(report)
}

fn read_seq(p: &SeqParams) -> Result<String, CliError> {
    if p.source.as_os_str().is_empty() {
        return Err(CliError::Config("params.source: no .seq file given".into()));
    }
    std::fs::read_to_string(&p.source).map_err(|source| CliError::Io {
        path: p.source.clone(),
        source,
    })
}

fn file_label(p: &SeqParams) -> String {
    p.source.display().to_string()
}

fn compile(cfg: &RunConfig) -> Result<Report, CliError> {
    let p: SeqParams = cfg.params()?;
    let text = read_seq(&p)?;
    let (program, diagnostics) = check(&text);
    let rendered = render_all(&diagnostics, &file_label(&p));
    let Some(program) = program else {
        return Err(CliError::Source(rendered));
    };
    let defaults = LowerOptions::default();
    let opts = LowerOptions {
        rabi: p.rabi.unwrap_or(defaults.rabi),
        ramp_duration: p.ramp_duration.unwrap_or(defaults.ramp_duration),
    };
    let schedule = lower_with(&program, &opts)
        .map_err(|errors| CliError::Source(render_all(&errors, &file_label(&p))))?;
    let ctx = ShotContext::new(cfg.seed.unwrap_or(0), 1);
    let results = vec![
        record(
            "schedule_duration",
            schedule.duration(),
            0.0,
            0,
            &ctx,
            json!({ "unit": "s" }),
        ),
        record(
            "schedule_events",
            schedule.events().len() as f64,
            0.0,
            0,
            &ctx,
            json!({ "site_count": schedule.site_count() }),
        ),
    ];
    let summary = format!(
        "compiled {} events over {} sites, duration {:e} s, {} warning(s)",
        schedule.events().len(),
        schedule.site_count(),
        schedule.duration(),
        diagnostics.len()
    );
    let mut report = Report::new(&p, results, summary);
    report.details =
        json!({ "schedule": schedule, "warnings": diagnostics_json(&diagnostics, &p) });
    if !rendered.is_empty() {
        report.listing = Some(rendered);
    }
    Ok(report)
}

fn lint(cfg: &RunConfig) -> Result<Report, CliError> {
    let p: SeqParams = cfg.params()?;
    let text = read_seq(&p)?;
    let (program, diagnostics) = check(&text);
    let rendered = render_all(&diagnostics, &file_label(&p));
    if program.is_none() {
        return Err(CliError::Source(rendered));
    }
    let summary = format!("{} warning(s)", diagnostics.len());
    let mut report = Report::new(&p, Vec::new(), summary);
    report.details = json!({ "warnings": diagnostics_json(&diagnostics, &p) });
    if !rendered.is_empty() {
        report.listing = Some(rendered);
    }
    Ok(report)
}

fn diagnostics_json(diagnostics: &[eprsim_seqlang::Diagnostic], p: &SeqParams) -> Value {
    let file = file_label(p);
    diagnostics
        .iter()
        .map(|d| Value::String(d.render(&file)))
        .collect()
}
