//! SVG drawing of rhombic embeddings. The y axis points up, coordinates
//! carry four decimals.

use std::fmt::Write as _;

use rhombic::geometry::Vec2;
use rhombic::{QuadMesh, RhombicEmbedding, TrackSystem};

#[derive(Clone, Copy, Debug)]
pub struct RenderOptions {
    /// Pixels per unit length.
    pub scale: f64,
    /// Fill faces, colored by the pair of tracks crossing them.
    pub faces: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            scale: 40.0,
            faces: false,
        }
    }
}

const MARGIN: f64 = 10.0;

fn num(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn hue(a: usize, b: usize) -> u64 {
    let (a, b) = (a.min(b) as u64, a.max(b) as u64);
    (a * 40_503 + b * 9_973 + 17) % 360
}

pub fn render_svg(mesh: &QuadMesh, emb: &RhombicEmbedding, opts: &RenderOptions) -> String {
    let to_px = |p: Vec2| Vec2::new(p.x * opts.scale, -p.y * opts.scale);
    // One fundamental domain for planar meshes, a 2x2 block on the torus.
    let shifts: Vec<Vec2> = match emb.periods {
        Some([p1, p2]) => vec![Vec2::zeros(), p1, p2, p1 + p2],
        None => vec![Vec2::zeros()],
    };

    let mut lines = Vec::new();
    for s in &shifts {
        for h in 0..mesh.num_half_edges() {
            if h < mesh.twin(h) {
                let a = emb.positions[mesh.origin(h)] + s;
                lines.push((to_px(a), to_px(a + emb.edge_vector(mesh, h))));
            }
        }
    }
    let mut polys = Vec::new();
    if opts.faces {
        let system = TrackSystem::new(mesh);
        for s in &shifts {
            for f in 0..mesh.num_faces() {
                let c = system.face_crossing(f);
                let pts: Vec<Vec2> = emb.face_polygon(mesh, f).iter().map(|p| to_px(p + s)).collect();
                polys.push((pts, hue(c.a.track, c.b.track)));
            }
        }
    }
    let arrows: Vec<(Vec2, Vec2)> = match emb.periods {
        Some(ps) => ps.iter().map(|p| (to_px(Vec2::zeros()), to_px(*p))).collect(),
        None => Vec::new(),
    };

    let mut lo = Vec2::repeat(f64::INFINITY);
    let mut hi = Vec2::repeat(f64::NEG_INFINITY);
    for p in lines.iter().chain(&arrows).flat_map(|(a, b)| [a, b]) {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    if !lo.x.is_finite() {
        lo = Vec2::zeros();
        hi = Vec2::zeros();
    }
    lo -= Vec2::repeat(MARGIN);
    hi += Vec2::repeat(MARGIN);
    let size = hi - lo;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="{}" height="{}">"#,
        num(lo.x),
        num(lo.y),
        num(size.x),
        num(size.y),
        num(size.x),
        num(size.y)
    );
    if !arrows.is_empty() {
        out.push_str(concat!(
            "  <defs>\n",
            r#"    <marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" markerHeight="6" orient="auto-start-reverse">"#,
            "\n",
            r#"      <path d="M 0 0 L 10 5 L 0 10 z" fill="crimson"/>"#,
            "\n    </marker>\n  </defs>\n"
        ));
    }
    if !polys.is_empty() {
        out.push_str("  <g class=\"faces\" stroke=\"none\">\n");
        for (pts, h) in &polys {
            let pts: Vec<String> = pts.iter().map(|p| format!("{},{}", num(p.x), num(p.y))).collect();
            let _ = writeln!(
                out,
                r#"    <polygon points="{}" fill="hsl({h}, 60%, 80%)"/>"#,
                pts.join(" ")
            );
        }
        out.push_str("  </g>\n");
    }
    out.push_str("  <g class=\"edges\" stroke=\"black\" stroke-width=\"1.5\" stroke-linecap=\"round\">\n");
    for (a, b) in &lines {
        let _ = writeln!(
            out,
            r#"    <line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            num(a.x),
            num(a.y),
            num(b.x),
            num(b.y)
        );
    }
    out.push_str("  </g>\n");
    if !arrows.is_empty() {
        out.push_str("  <g class=\"periods\" stroke=\"crimson\" stroke-width=\"2\">\n");
        for (a, b) in &arrows {
            let _ = writeln!(
                out,
                r#"    <line x1="{}" y1="{}" x2="{}" y2="{}" marker-end="url(#arrow)"/>"#,
                num(a.x),
                num(a.y),
                num(b.x),
                num(b.y)
            );
        }
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rhombic::embed::{boundary_chord_assignment, build_embedding};
    use rhombic::generate;

    #[test]
    fn negative_zero_is_printed_plainly() {
        assert_eq!(num(-0.0), "0.0000");
        assert_eq!(num(-1e-9), "0.0000");
        assert_eq!(num(2.5), "2.5000");
    }

    #[test]
    fn single_quad_draws_four_segments() {
        let mesh = generate::grid(1, 1);
        let sys = TrackSystem::new(&mesh);
        let theta = boundary_chord_assignment(&mesh, &sys).unwrap();
        let emb = build_embedding(&mesh, &sys, &theta).unwrap();
        let svg = render_svg(&mesh, &emb, &RenderOptions::default());
        assert_eq!(svg.matches("<line").count(), 4);
        assert_eq!(svg.matches("<polygon").count(), 0);
        let filled = render_svg(&mesh, &emb, &RenderOptions { faces: true, ..Default::default() });
        assert_eq!(filled.matches("<polygon").count(), 1);
    }
}
