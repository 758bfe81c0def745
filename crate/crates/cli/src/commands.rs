use std::path::Path;

use afk_core::certify::{assemble_certificate, barrier_experiment, dilation_family, CertifyConfig, ExperimentConfig};
use afk_core::gauss_equation::{almost_fuchsian_check, check_bounds, solve, ConformalFactorField};
use afk_core::grid::DiskGrid;
use afk_core::io;
use afk_core::kleinian::{
    largest_empty_ball, limit_set_sample, reduced_word_count, GroupPresentation, LimitSetConfig, LimitSetSample,
};
use afk_core::moebius::{BoundaryPoint, HalfSpacePoint};
use afk_core::quad_diff::QuadDifferential;
use afk_core::surface::{gauss_map_patch, integrate_immersion, FramePoint, Sign};
use afk_core::Error;
use serde::Serialize;
use serde_json::json;

use crate::output::{config_hash, read_input, read_text, CliResult, Failure, OutDir, EXIT_RESOURCE, EXIT_SOLVER};
use crate::render::{Scene, BLACK, BLUE, GRAY, RED};
use crate::{CertifyArgs, Cli, Command, Common, ExperimentArgs, GridArgs, LimitSetArgs, SolveArgs};

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::LimitSet(a) => limit_set(a, &cli.common),
        Command::Solve(a) => solve_cmd(a, &cli.common),
        Command::Certify(a) => certify(a, &cli.common),
        Command::Experiment(a) => experiment(a, &cli.common),
    }
}

fn render_config(common: &Common) -> serde_json::Value {
    json!({ "image_size": common.image_size, "svg": common.svg, "seed": common.seed })
}

fn grid_config(g: &GridArgs) -> serde_json::Value {
    json!({ "grid": g.grid, "radius": g.radius, "tol": g.tol, "max_iter": g.max_iter })
}

fn load_group(path: &Path) -> CliResult<(GroupPresentation, Vec<u8>)> {
    let bytes = read_input(path)?;
    let text = read_text(path, &bytes)?;
    let group = io::parse_group_json(&text)
        .map_err(|e| Failure::input(format!("{}: {}", path.display(), e)))?;
    Ok((group, bytes))
}

fn load_alpha(path: &Path) -> CliResult<(QuadDifferential, Vec<u8>)> {
    let bytes = read_input(path)?;
    let text = read_text(path, &bytes)?;
    let alpha = io::parse_differential_json(&text)
        .map_err(|e| Failure::input(format!("{}: {}", path.display(), e)))?;
    Ok((alpha, bytes))
}

fn write_scene(out: &mut OutDir, stem: &str, scene: &Scene, common: &Common, hash: &str) -> CliResult<()> {
    let comment = format!("config_hash={hash}");
    out.write(&format!("{stem}.ppm"), scene.to_ppm(common.image_size, &comment))?;
    if common.svg {
        out.write(&format!("{stem}.svg"), scene.to_svg(common.image_size, &comment))?;
    }
    Ok(())
}

fn hash_comment(hash: &str) -> Vec<String> {
    vec![format!("config_hash={hash}")]
}

fn check_word_budget(group: &GroupPresentation, depth: usize, max_words: u128) -> CliResult<()> {
    match reduced_word_count(group.rank(), depth) {
        Some(n) if n <= max_words => Ok(()),
        count => Err(Failure {
            code: EXIT_RESOURCE,
            message: format!(
                "stage limit-set: {} reduced words of length <= {depth} exceed the budget of {max_words}",
                count.map_or("overflowing".to_string(), |n| n.to_string())
            ),
        }),
    }
}

#[derive(Serialize)]
struct LimitSetSummary<'a> {
    label: &'a str,
    depth: usize,
    points: usize,
    words_visited: u64,
    dedup_resolution: f64,
    warnings: &'a [String],
    empty_ball_center: Option<BoundaryPoint>,
    empty_ball_radius: Option<f64>,
}

fn limit_set(a: &LimitSetArgs, common: &Common) -> CliResult<()> {
    let (group, bytes) = load_group(&a.group)?;
    let config = json!({
        "command": "limit-set", "depth": a.depth, "max_words": a.max_words.to_string(),
        "resolution": a.resolution, "render": render_config(common),
    });
    let hash = config_hash(&config, &[&bytes]);
    check_word_budget(&group, a.depth, a.max_words)?;
    let sample = limit_set_sample(&group, a.depth, HalfSpacePoint::origin(), &LimitSetConfig::default())
        .map_err(|e| Failure::at("limit-set", e))?;
    let ball = if sample.is_empty() {
        None
    } else {
        Some(largest_empty_ball(&sample, a.resolution).map_err(|e| Failure::at("empty-ball", e))?)
    };

    let mut out = OutDir::create(&common.out)?;
    let mut comments = hash_comment(&hash);
    comments.extend(sample.warnings.iter().map(|w| format!("warning: {w}")));
    out.write("limit_set.csv", io::points_to_csv(&sample.points, &comments))?;
    let summary = LimitSetSummary {
        label: &group.label,
        depth: a.depth,
        points: sample.len(),
        words_visited: sample.words_visited,
        dedup_resolution: sample.dedup_resolution,
        warnings: &sample.warnings,
        empty_ball_center: ball.map(|b| b.center),
        empty_ball_radius: ball.map(|b| b.radius),
    };
    out.write_json("limit_set.json", &summary, &hash)?;
    let mut scene = Scene::default();
    scene.points(sample.points.iter().copied(), BLACK);
    if let Some(b) = ball {
        scene.ball(b.center, b.radius, RED);
    }
    write_scene(&mut out, "limit_set", &scene, common, &hash)?;

    for w in &sample.warnings {
        eprintln!("warning: {w}");
    }
    println!("points={} words={}", sample.len(), sample.words_visited);
    Ok(())
}

fn write_field(out: &mut OutDir, u: &ConformalFactorField, hash: &str) -> CliResult<()> {
    let header = io::field_header(u, hash);
    let mut text = serde_json::to_string_pretty(&header).expect("header serializes");
    text.push('\n');
    out.write("u_field.json", text)?;
    out.write("u_field.csv", io::field_to_csv(u, &hash_comment(hash)))?;
    out.write("u_field.bin", io::encode_f64_column(&u.values))
}

/// Solves and writes the field, including the last iterate on solver failure.
fn solve_stage(alpha: &QuadDifferential, g: &GridArgs, out: &mut OutDir, hash: &str) -> CliResult<ConformalFactorField> {
    let grid = DiskGrid::new(g.radius, g.grid).map_err(|e| Failure::at("grid", e))?;
    match solve(alpha, &grid, g.tol, g.max_iter) {
        Ok(u) => {
            write_field(out, &u, hash)?;
            if !u.converged {
                return Err(Failure {
                    code: EXIT_SOLVER,
                    message: format!(
                        "stage solve: no convergence in {} Newton steps (residual {:e})",
                        u.iterations, u.residual_norm
                    ),
                });
            }
            Ok(u)
        }
        Err(Error::SolverFailure { iterations, residual, last_iterate }) => {
            write_field(out, &last_iterate, hash)?;
            Err(Failure::at("solve", Error::SolverFailure { iterations, residual, last_iterate }))
        }
        Err(e) => Err(Failure::at("solve", e)),
    }
}

fn solve_cmd(a: &SolveArgs, common: &Common) -> CliResult<()> {
    let (alpha, bytes) = load_alpha(&a.alpha)?;
    let config = json!({ "command": "solve", "grid": grid_config(&a.grid), "seed": common.seed });
    let hash = config_hash(&config, &[&bytes]);
    let mut out = OutDir::create(&common.out)?;
    let u = solve_stage(&alpha, &a.grid, &mut out, &hash)?;
    let bounds = check_bounds(&u);
    let regime = almost_fuchsian_check(&u, &alpha);
    let report = json!({
        "bounds": bounds,
        "almost_fuchsian": regime,
        "residual_norm": u.residual_norm,
        "iterations": u.iterations,
    });
    out.write_json("bounds.json", &report, &hash)?;
    println!(
        "u_max={}, u_min={}, bounds {}",
        bounds.max,
        bounds.min,
        if bounds.passed { "PASS" } else { "FAIL" }
    );
    if !bounds.passed {
        return Err(Failure {
            code: EXIT_SOLVER,
            message: format!("stage solve: bounds check failed (min {}, max {})", bounds.min, bounds.max),
        });
    }
    Ok(())
}

fn certify(a: &CertifyArgs, common: &Common) -> CliResult<()> {
    let group = a.group.as_deref().map(load_group).transpose()?;
    let (alpha, alpha_bytes) = match &a.alpha {
        Some(p) => load_alpha(p)?,
        None => (QuadDifferential::zero(), Vec::new()),
    };
    let cfg = CertifyConfig {
        epsilon_target: a.epsilon_target,
        c_epstein: a.c_epstein,
        c_koebe: a.c_koebe,
        slack: a.slack,
        ..CertifyConfig::default()
    };
    let injected: Vec<[f64; 2]> = a
        .inject
        .iter()
        .map(|p| p.finite().map_or([f64::INFINITY; 2], |z| [z.re, z.im]))
        .collect();
    let config = json!({
        "command": "certify", "depth": a.depth, "grid": grid_config(&a.grid), "certify": cfg,
        "inject": injected.iter().map(|p| p.map(io::fmt_f64)).collect::<Vec<_>>(),
        "has_group": group.is_some(), "render": render_config(common),
    });
    let group_bytes = group.as_ref().map(|g| g.1.as_slice()).unwrap_or(&[]);
    let hash = config_hash(&config, &[group_bytes, &alpha_bytes]);
    let mut out = OutDir::create(&common.out)?;

    let u = solve_stage(&alpha, &a.grid, &mut out, &hash)?;
    let patch = integrate_immersion(&u, &alpha, &FramePoint::anchor()).map_err(|e| Failure::at("integrate", e))?;
    let (header, payload) = io::encode_patch(&patch, &hash);
    out.write_json("patch.json", &header, &hash)?;
    out.write("patch.bin", payload)?;
    let gauss = gauss_map_patch(&patch, Sign::Plus).map_err(|e| Failure::at("gauss-map", e))?;

    let mut sample: Option<LimitSetSample> = match &group {
        Some((g, _)) => Some(
            limit_set_sample(g, a.depth, HalfSpacePoint::origin(), &LimitSetConfig::default())
                .map_err(|e| Failure::at("limit-set", e))?,
        ),
        None => None,
    };
    if !a.inject.is_empty() {
        sample = Some(match sample {
            Some(s) => s.with_points(a.inject.iter().copied()),
            None => LimitSetSample::from_points(a.inject.iter().copied(), LimitSetConfig::default().dedup_resolution),
        });
    }
    if let Some(s) = &sample {
        out.write("limit_set.csv", io::points_to_csv(&s.points, &hash_comment(&hash)))?;
    }

    let cert = assemble_certificate(&patch, sample.as_ref(), &cfg).map_err(|e| Failure::at("certificate", e))?;
    out.write_json("certificate.json", &cert, &hash)?;

    let mut scene = Scene::default();
    scene.points(gauss.values.iter().step_by(7).copied(), GRAY);
    if let Some(s) = &sample {
        scene.points(s.points.iter().copied(), BLACK);
    }
    scene.ball(BoundaryPoint::ZERO, cert.big_r.atan(), BLUE);
    if let Some(e) = cert.empirical_empty_radius {
        scene.ball(BoundaryPoint::ZERO, e, RED);
    }
    write_scene(&mut out, "certificate", &scene, common, &hash)?;

    let verdict = serde_json::to_value(cert.verdict).expect("verdict serializes");
    println!(
        "verdict={} R={} empirical={}",
        verdict.as_str().unwrap_or_default(),
        cert.big_r,
        cert.empirical_empty_radius.map_or("none".to_string(), |e| e.to_string())
    );
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(io::fmt_f64).unwrap_or_default()
}

fn experiment(a: &ExperimentArgs, common: &Common) -> CliResult<()> {
    if a.group.is_empty() {
        return Err(Failure::input("experiment needs at least one --group"));
    }
    let loaded = a.group.iter().map(|p| load_group(p)).collect::<CliResult<Vec<_>>>()?;
    let groups: Vec<GroupPresentation> = if a.dilations.is_empty() {
        loaded.iter().map(|(g, _)| g.clone()).collect()
    } else {
        if loaded.len() != 1 {
            return Err(Failure::input("--dilations takes exactly one --group"));
        }
        dilation_family(&loaded[0].0, &a.dilations).map_err(|e| Failure::at("family", e))?
    };
    let config = json!({
        "command": "experiment", "depth": a.depth, "resolution": a.resolution,
        "dilations": a.dilations.iter().map(|d| io::fmt_f64(*d)).collect::<Vec<_>>(),
        "render": render_config(common),
    });
    let inputs: Vec<&[u8]> = loaded.iter().map(|(_, b)| b.as_slice()).collect();
    let hash = config_hash(&config, &inputs);
    let cfg = ExperimentConfig { depth: a.depth, resolution: a.resolution, ..ExperimentConfig::default() };
    let report = barrier_experiment(&groups, &cfg).map_err(|e| Failure::at("experiment", e))?;

    let mut out = OutDir::create(&common.out)?;
    let mut csv = format!("# config_hash={hash}\nlabel,points,empty_radius,hausdorff_step,error\n");
    for r in &report.rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_field(&r.label),
            r.points,
            opt(r.empty_radius),
            opt(r.hausdorff_step),
            csv_field(r.error.as_deref().unwrap_or(""))
        ));
    }
    out.write("experiment.csv", csv)?;
    out.write_json("experiment.json", &report, &hash)?;

    for (i, (g, row)) in groups.iter().zip(&report.rows).enumerate() {
        let mut scene = Scene::default();
        if let Ok(s) = limit_set_sample(g, a.depth, HalfSpacePoint::origin(), &cfg.limit_set) {
            scene.points(s.points.iter().copied(), BLACK);
        }
        if let (Some(c), Some(r)) = (row.empty_center, row.empty_radius) {
            scene.ball(c, r, RED);
        }
        write_scene(&mut out, &format!("experiment_{i:03}"), &scene, common, &hash)?;
    }
    for r in &report.rows {
        println!(
            "{}: empty_radius={} hausdorff_step={}",
            r.label,
            r.empty_radius.map_or("-".into(), |v| v.to_string()),
            r.hausdorff_step.map_or("-".into(), |v| v.to_string())
        );
    }
    Ok(())
}
