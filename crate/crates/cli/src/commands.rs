//! One function per subcommand. Each returns the result payload and
//! whether the run was a positive outcome; input problems surface as
//! errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rhombic::angles::{strict_violation, CircleMap};
use rhombic::embed::{
    boundary_chord_assignment, build_embedding, isoradial_view, torus_default_assignment,
    validate_embedding,
};
use rhombic::extremes::{
    enumerate_periodic_labels, enumerate_sign_extremes, height_function, Label,
};
use rhombic::homology::homology_classes;
use rhombic::optimize::{maximize_area, AreaContext, OptimizeOptions, OptimizeResult};
use rhombic::tracks::check_embeddable;
use rhombic::{
    diamond_graph, parse_mesh, parse_planar_map, serialize_mesh, QuadMesh, RhombicEmbedding,
    Surface, TrackSystem, TransversalAssignment, Violation,
};
use serde_json::{json, Value};

use crate::render::{render_svg, RenderOptions};

pub enum Output {
    Json(Value),
    Svg(String),
}

pub struct Outcome {
    pub output: Output,
    pub ok: bool,
}

impl Outcome {
    fn json(value: Value, ok: bool) -> Self {
        Outcome {
            output: Output::Json(value),
            ok,
        }
    }
}

pub fn load_mesh(text: &str) -> Result<QuadMesh> {
    parse_mesh(text).context("cannot read mesh")
}

fn violations_json(v: &[Violation]) -> Value {
    Value::Array(
        v.iter()
            .map(|x| {
                let mut obj = serde_json::to_value(x).expect("violations serialize");
                obj["message"] = Value::String(x.to_string());
                obj
            })
            .collect(),
    )
}

fn surface_name(mesh: &QuadMesh) -> &'static str {
    match mesh.surface() {
        Surface::Planar => "planar",
        Surface::Torus => "torus",
    }
}

pub fn check(text: &str) -> Result<Outcome> {
    let mesh = load_mesh(text)?;
    let sys = TrackSystem::new(&mesh);
    let v = check_embeddable(&mesh, &sys);
    Ok(Outcome::json(
        json!({
            "surface": surface_name(&mesh),
            "tracks": sys.len(),
            "embeddable": v.is_empty(),
            "violations": violations_json(&v),
        }),
        v.is_empty(),
    ))
}

pub fn tracks(text: &str) -> Result<Outcome> {
    let mesh = load_mesh(text)?;
    let sys = TrackSystem::new(&mesh);
    let classes = if mesh.is_torus() {
        Some(homology_classes(&mesh, &sys).map_err(|e| e.to_string()))
    } else {
        None
    };
    let tracks: Vec<Value> = sys
        .tracks()
        .iter()
        .map(|t| {
            let mut obj = json!({
                "id": t.id,
                "closed": t.closed,
                "faces": t.faces().collect::<Vec<_>>(),
            });
            if let Some(Ok(c)) = &classes {
                obj["class"] = json!([c[t.id].p, c[t.id].q]);
            }
            obj
        })
        .collect();
    let edges: Vec<[String; 2]> = sys
        .digraph()
        .edges()
        .iter()
        .map(|(a, b)| [a.to_string(), b.to_string()])
        .collect();
    let mut out = json!({
        "surface": surface_name(&mesh),
        "tracks": tracks,
        "b": sys.digraph().b(),
        "digraph": edges,
    });
    if let Some(Err(e)) = classes {
        out["homology_error"] = Value::String(e);
    }
    Ok(Outcome::json(out, true))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaSource {
    Auto,
    Chord,
    Default,
}

/// Reads `{"track id": angle, ...}` covering every track.
fn read_theta_file(path: &Path, tracks: usize) -> Result<TransversalAssignment> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let map: BTreeMap<String, f64> =
        serde_json::from_str(&text).with_context(|| format!("{}: expected {{\"track\": angle}}", path.display()))?;
    let mut angles = vec![None; tracks];
    for (k, a) in map {
        let t: usize = k.parse().with_context(|| format!("{}: bad track id {k:?}", path.display()))?;
        let slot = angles
            .get_mut(t)
            .ok_or_else(|| anyhow!("{}: track {t} out of range (tracks = {tracks})", path.display()))?;
        *slot = Some(a);
    }
    let angles = angles
        .into_iter()
        .enumerate()
        .map(|(t, a)| a.ok_or_else(|| anyhow!("{}: no angle for track {t}", path.display())))
        .collect::<Result<Vec<_>>>()?;
    Ok(TransversalAssignment::new(angles))
}

fn default_theta(mesh: &QuadMesh, sys: &TrackSystem, source: ThetaSource) -> Result<TransversalAssignment> {
    let theta = match (source, mesh.surface()) {
        (ThetaSource::Chord, Surface::Torus) => bail!("--chord needs a planar mesh"),
        (ThetaSource::Default, Surface::Planar) => bail!("--default needs a torus mesh"),
        (_, Surface::Planar) => boundary_chord_assignment(mesh, sys)?,
        (_, Surface::Torus) => torus_default_assignment(mesh, sys)?,
    };
    Ok(theta)
}

pub fn embedding_json(mesh: &QuadMesh, emb: &RhombicEmbedding) -> Value {
    let positions: Vec<[f64; 2]> = emb.positions.iter().map(|p| [p.x, p.y]).collect();
    let periods = emb.periods.map(|[a, b]| [[a.x, a.y], [b.x, b.y]]);
    json!({
        "mesh": serde_json::from_str::<Value>(&serialize_mesh(mesh)).expect("mesh serializes to JSON"),
        "positions": positions,
        "periods": periods,
        "theta": emb.theta.angles(),
    })
}

pub fn embed(text: &str, theta_file: Option<&Path>, source: ThetaSource, svg: bool) -> Result<Outcome> {
    let mesh = load_mesh(text)?;
    let sys = TrackSystem::new(&mesh);
    let v = check_embeddable(&mesh, &sys);
    if !v.is_empty() {
        return Ok(Outcome::json(
            json!({ "embeddable": false, "violations": violations_json(&v) }),
            false,
        ));
    }
    let theta = match theta_file {
        Some(p) => read_theta_file(p, sys.len())?,
        None => default_theta(&mesh, &sys, source)?,
    };
    if let Some((from, to)) = strict_violation(&theta, sys.digraph()) {
        return Ok(Outcome::json(
            json!({
                "embeddable": true,
                "strictly_order_preserving": false,
                "violated_edge": [from.to_string(), to.to_string()],
            }),
            false,
        ));
    }
    let emb = build_embedding(&mesh, &sys, &theta)?;
    let report = validate_embedding(&mesh, &sys, &emb);
    if svg {
        return Ok(Outcome {
            output: Output::Svg(render_svg(&mesh, &emb, &RenderOptions::default())),
            ok: report.is_ok(),
        });
    }
    let mut out = embedding_json(&mesh, &emb);
    out["validation"] = serde_json::to_value(&report)?;
    Ok(Outcome::json(out, report.is_ok()))
}

fn optimize_json(res: &OptimizeResult, start: &str) -> Value {
    json!({
        "start": start,
        "theta": res.theta.angles(),
        "area": res.area,
        "residual": res.residual,
        "iterations": res.iterations,
        "converged": res.converged,
    })
}

fn run_optimizer(
    mesh: &QuadMesh,
    sys: &TrackSystem,
    seed: Option<u64>,
    opts: &OptimizeOptions,
) -> Result<(OptimizeResult, &'static str)> {
    let ctx = AreaContext::new(mesh, sys)?;
    let base = torus_default_assignment(mesh, sys)?;
    let (start, label) = match seed {
        Some(s) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            (CircleMap::random(&mut rng, 3).apply(&base), "random")
        }
        None => (base, "default"),
    };
    Ok((maximize_area(&ctx, &start, opts)?, label))
}

pub fn optimize(
    text: &str,
    seed: Option<u64>,
    opts: &OptimizeOptions,
    trace: Option<&Path>,
) -> Result<Outcome> {
    let mesh = load_mesh(text)?;
    if !mesh.is_torus() {
        bail!("optimize needs a torus mesh");
    }
    let sys = TrackSystem::new(&mesh);
    let v = check_embeddable(&mesh, &sys);
    if !v.is_empty() {
        return Ok(Outcome::json(
            json!({ "embeddable": false, "violations": violations_json(&v) }),
            false,
        ));
    }
    let (res, start) = run_optimizer(&mesh, &sys, seed, opts)?;
    if let Some(path) = trace {
        let mut csv = String::from("iteration,area,residual,step\n");
        for r in &res.trace {
            let _ = writeln!(csv, "{},{},{},{}", r.iteration, r.area, r.residual, r.step);
        }
        fs::write(path, csv).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(Outcome::json(optimize_json(&res, start), res.converged))
}

fn sign_string(signs: &[i8]) -> String {
    signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
}

fn label_string(labels: &[Label]) -> String {
    labels
        .iter()
        .map(|l| match l {
            Label::Plus => '+',
            Label::Minus => '-',
            Label::Zero => '0',
        })
        .collect()
}

pub fn extremes(text: &str, periodic: bool, heights: Option<usize>) -> Result<Outcome> {
    let mesh = load_mesh(text)?;
    let sys = TrackSystem::new(&mesh);
    if periodic {
        if !mesh.is_torus() {
            bail!("--periodic needs a torus mesh");
        }
        if heights.is_some() {
            bail!("--heights is not available with --periodic");
        }
        let labels = enumerate_periodic_labels(sys.digraph())?;
        let list: Vec<String> = labels.iter().map(|l| label_string(&l.labels)).collect();
        return Ok(Outcome::json(
            json!({ "mode": "periodic", "tracks": sys.len(), "count": list.len(), "labels": list }),
            true,
        ));
    }
    if heights.is_some() && mesh.is_torus() {
        bail!("--heights needs a planar mesh");
    }
    if let Some(b) = heights {
        if b >= mesh.num_vertices() {
            bail!("--heights: vertex {b} out of range (vertices = {})", mesh.num_vertices());
        }
    }
    let signs = enumerate_sign_extremes(sys.digraph())?;
    let list = signs
        .iter()
        .map(|s| {
            let mut obj = json!({ "signs": sign_string(&s.signs) });
            if let Some(base) = heights {
                obj["heights"] = json!(height_function(&mesh, &sys, s, base)?.heights);
            }
            Ok(obj)
        })
        .collect::<Result<Vec<Value>>>()?;
    Ok(Outcome::json(
        json!({ "mode": "signs", "tracks": sys.len(), "count": list.len(), "assignments": list }),
        true,
    ))
}

pub fn diamond(text: &str, isoradial: bool) -> Result<Outcome> {
    let map = parse_planar_map(text).context("cannot read planar map")?;
    let d = diamond_graph(&map)?;
    let mesh = &d.mesh;
    let quads: Vec<Value> = d
        .quad_edges
        .iter()
        .enumerate()
        .map(|(q, &h)| {
            json!({
                "primal_edge": [map.origin(h), map.origin(map.twin(h))],
                "corners": mesh.face_vertices(q),
            })
        })
        .collect();
    let edges: Vec<[usize; 2]> = (0..mesh.num_half_edges())
        .filter(|&h| h < mesh.twin(h))
        .map(|h| [mesh.origin(h), mesh.target(h)])
        .collect();
    let mut out = json!({
        "vertices": mesh.num_vertices(),
        "tags": d.tags,
        "primal_vertices": d.num_primal_vertices,
        "primal_faces": d.primal_faces,
        "edges": edges,
        "quads": quads,
    });
    let mut ok = true;
    if isoradial {
        let sys = TrackSystem::new(mesh);
        let v = check_embeddable(mesh, &sys);
        out["isoradial"] = if !v.is_empty() {
            ok = false;
            json!({ "embeddable": false, "violations": violations_json(&v) })
        } else {
            let theta = boundary_chord_assignment(mesh, &sys)?;
            let emb = build_embedding(mesh, &sys, &theta)?;
            let view = isoradial_view(&d, &emb)?;
            ok = view.max_radius_error <= rhombic::embed::TOL;
            json!({
                "vertices": view.vertices.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>(),
                "centers": view.centers.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>(),
                "max_radius_error": view.max_radius_error,
                "strictly_convex": view.strictly_convex,
            })
        };
    }
    Ok(Outcome::json(out, ok))
}

/// Reads the output of `embed`, with or without the report envelope.
fn read_embedding(text: &str) -> Result<(QuadMesh, RhombicEmbedding)> {
    let mut v: Value = serde_json::from_str(text).context("embedding file is not JSON")?;
    if let Some(inner) = v.get_mut("result") {
        v = inner.take();
    }
    let mesh_value = v.get("mesh").ok_or_else(|| anyhow!("embedding file has no \"mesh\""))?;
    let mesh = load_mesh(&mesh_value.to_string())?;
    let positions: Vec<[f64; 2]> = match v.get("positions") {
        Some(p) => serde_json::from_value(p.clone()).context("\"positions\" must be a list of [x, y]")?,
        None => bail!("missing coordinates: embedding file has no \"positions\""),
    };
    if positions.len() != mesh.num_vertices() {
        bail!(
            "missing coordinates: {} positions for {} vertices",
            positions.len(),
            mesh.num_vertices()
        );
    }
    let periods: Option<[[f64; 2]; 2]> = match v.get("periods") {
        Some(Value::Null) | None => None,
        Some(p) => Some(serde_json::from_value(p.clone()).context("\"periods\" must be two [x, y] vectors")?),
    };
    if mesh.is_torus() && periods.is_none() {
        bail!("missing coordinates: torus embedding has no period vectors");
    }
    let to_vec = |p: [f64; 2]| rhombic::geometry::Vec2::new(p[0], p[1]);
    let emb = RhombicEmbedding {
        positions: positions.into_iter().map(to_vec).collect(),
        periods: periods.map(|[a, b]| [to_vec(a), to_vec(b)]),
        theta: TransversalAssignment::new(Vec::new()),
        lengths: Vec::new(),
    };
    Ok((mesh, emb))
}

pub fn render(text: &str, opts: &RenderOptions) -> Result<Outcome> {
    let (mesh, emb) = read_embedding(text)?;
    Ok(Outcome {
        output: Output::Svg(render_svg(&mesh, &emb, opts)),
        ok: true,
    })
}

pub fn pipeline(text: &str, seed: Option<u64>, opts: &OptimizeOptions, with_optimize: bool) -> Result<Outcome> {
    let mesh = load_mesh(text)?;
    let sys = TrackSystem::new(&mesh);
    let mut stages = Vec::new();
    let finish = |stages: Vec<Value>, stopped: Option<&str>| {
        Outcome::json(
            json!({ "surface": surface_name(&mesh), "stages": stages, "stopped_at": stopped }),
            stopped.is_none(),
        )
    };

    let v = check_embeddable(&mesh, &sys);
    stages.push(json!({ "stage": "check", "ok": v.is_empty(), "violations": violations_json(&v) }));
    if !v.is_empty() {
        return Ok(finish(stages, Some("check")));
    }

    let built = default_theta(&mesh, &sys, ThetaSource::Auto).and_then(|t| Ok(build_embedding(&mesh, &sys, &t)?));
    let emb = match built {
        Ok(emb) => emb,
        Err(e) => {
            stages.push(json!({ "stage": "embed", "ok": false, "error": e.to_string() }));
            return Ok(finish(stages, Some("embed")));
        }
    };
    stages.push(json!({ "stage": "embed", "ok": true, "embedding": embedding_json(&mesh, &emb) }));

    let report = validate_embedding(&mesh, &sys, &emb);
    let ok = report.is_ok();
    stages.push(json!({ "stage": "validate", "ok": ok, "report": report }));
    if !ok {
        return Ok(finish(stages, Some("validate")));
    }

    if with_optimize {
        if !mesh.is_torus() {
            stages.push(json!({ "stage": "optimize", "ok": true, "skipped": "planar meshes have no area functional" }));
        } else {
            let (res, start) = run_optimizer(&mesh, &sys, seed, opts)?;
            stages.push(json!({ "stage": "optimize", "ok": res.converged, "result": optimize_json(&res, start) }));
            if !res.converged {
                return Ok(finish(stages, Some("optimize")));
            }
        }
    }
    Ok(finish(stages, None))
}
