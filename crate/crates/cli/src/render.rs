//! Static SVG picture of a triangulation of the punctured disk.

use std::fmt::Write;

use clusterd::surface::{crossing_number, OrdinaryArc, Surface, TaggedArc};
use clusterd::triangulation::TaggedTriangulation;

const SIZE: f64 = 420.0;
const R: f64 = 170.0;

fn center() -> (f64, f64) {
    (SIZE / 2.0, SIZE / 2.0)
}

/// Screen angle of vertex `i`; vertices run clockwise from the top.
fn angle(n: usize, i: f64) -> f64 {
    (-90.0 + 360.0 * i / n as f64).to_radians()
}

fn polar(theta: f64, rho: f64) -> (f64, f64) {
    let (cx, cy) = center();
    (cx + rho * theta.cos(), cy + rho * theta.sin())
}

fn pt(p: (f64, f64)) -> String {
    format!("{:.2} {:.2}", p.0, p.1)
}

/// Path data and label anchor of an ordinary arc.
fn arc_path(s: &Surface, a: &OrdinaryArc) -> (String, (f64, f64)) {
    let n = s.n();
    match *a {
        OrdinaryArc::Radius(i) => {
            let th = angle(n, i as f64);
            (format!("M {} L {}", pt(polar(th, R)), pt(center())), polar(th + 0.12, 0.55 * R))
        }
        OrdinaryArc::Loop(i) => {
            // circle through vertex i around the puncture
            let th = angle(n, i as f64);
            let rho = 0.55 * R;
            let far = polar(th, -0.1 * R);
            let d = format!(
                "M {} A {rho:.2} {rho:.2} 0 1 1 {} A {rho:.2} {rho:.2} 0 1 1 {}",
                pt(polar(th, R)),
                pt(far),
                pt(polar(th, R))
            );
            (d, polar(th, -0.25 * R))
        }
        OrdinaryArc::Peripheral(i, j) => {
            let span = s.cw(i, j) as f64;
            let rho = R * (0.82 - 0.45 * (span - 2.0) / (n as f64 - 3.0).max(1.0));
            let step = 0.3;
            let (a0, a1) = (angle(n, i as f64 + step), angle(n, i as f64 + span - step));
            let large = u8::from((span - 2.0 * step) * 360.0 / n as f64 > 180.0);
            let d = format!(
                "M {} L {} A {rho:.2} {rho:.2} 0 {large} 1 {} L {}",
                pt(polar(angle(n, i as f64), R)),
                pt(polar(a0, rho)),
                pt(polar(a1, rho)),
                pt(polar(angle(n, j as f64), R))
            );
            (d, polar(angle(n, i as f64 + span / 2.0), rho - 10.0))
        }
    }
}

fn notch_mark(n: usize, i: usize) -> String {
    let (x, y) = polar(angle(n, i as f64), 0.12 * R);
    format!("<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"14\" text-anchor=\"middle\" dominant-baseline=\"middle\">⋈</text>\n")
}

/// Draws the arcs of `t` (as T° when it has one) with `names` by
/// position, and `gamma` dashed with the arcs it crosses in red.
pub fn render_svg(t: &TaggedTriangulation, names: &[String], gamma: Option<&TaggedArc>) -> String {
    let s = t.surface();
    let n = s.n();
    let (cx, cy) = center();
    let mut out = String::new();
    writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>").unwrap();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    )
    .unwrap();
    writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>").unwrap();
    writeln!(out, "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{R:.2}\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>").unwrap();
    let ideal = t.ideal().ok();
    let gamma_curve = gamma.map(|g| match (g, &ideal) {
        (TaggedArc::RadiusNotched(i), Some(_)) => OrdinaryArc::Loop(*i),
        _ => clusterd::surface::underlying_curve(g),
    });
    for (k, a) in t.arcs().iter().enumerate() {
        let curve = match &ideal {
            Some(i) => i.arcs()[k],
            None => clusterd::surface::underlying_curve(a),
        };
        let (d, (lx, ly)) = arc_path(&s, &curve);
        let crossed = gamma_curve.is_some_and(|g| crossing_number(&s, &g, &curve) > 0);
        let color = if crossed { "#c0392b" } else { "#1f4e79" };
        writeln!(out, "<path d=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>").unwrap();
        writeln!(
            out,
            "<text x=\"{lx:.2}\" y=\"{ly:.2}\" font-size=\"13\" fill=\"{color}\" text-anchor=\"middle\">{}</text>",
            names[k]
        )
        .unwrap();
        if ideal.is_none() {
            if let Some(i) = a.radius_vertex() {
                out.push_str(&notch_mark(n, i));
            }
        }
    }
    if let (Some(g), Some(curve)) = (gamma, gamma_curve) {
        let (d, _) = arc_path(&s, &curve);
        writeln!(out, "<path d=\"{d}\" fill=\"none\" stroke=\"#27ae60\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/>").unwrap();
        if ideal.is_none() && matches!(g, TaggedArc::RadiusNotched(_)) {
            out.push_str(&notch_mark(n, g.radius_vertex().unwrap()));
        }
    }
    for i in 0..n {
        let (x, y) = polar(angle(n, i as f64), R);
        writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"black\"/>").unwrap();
        let (tx, ty) = polar(angle(n, i as f64), R + 18.0);
        writeln!(out, "<text x=\"{tx:.2}\" y=\"{ty:.2}\" font-size=\"13\" text-anchor=\"middle\" dominant-baseline=\"middle\">{i}</text>")
            .unwrap();
    }
    writeln!(out, "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"4.5\" fill=\"black\"/>").unwrap();
    writeln!(out, "</svg>").unwrap();
    out
}
