//! Text and SVG views of a plan's measurement pattern.

use std::fmt::Write;

use crate::graph::Basis;
use crate::lattice::{GridPattern, Role};
use crate::primitives::{Plan, StepOp};

/// Pattern left on the lattice by a plan: targets, the basis each measured
/// site was read in, and junction sites (the first site of every merge).
pub fn pattern_of(plan: &Plan) -> GridPattern {
    let mut p = GridPattern::new(plan.grid);
    for t in &plan.targets {
        let _ = p.set(t.coord(), Role::Target);
    }
    for s in &plan.steps {
        let role = match s.op {
            StepOp::LocalComplement => continue,
            _ if s.tag == "merge-Y1" => Role::Junction,
            StepOp::Measure(Basis::X) => Role::MeasX,
            StepOp::Measure(Basis::Y) => Role::MeasY,
            StepOp::Measure(Basis::Z) => Role::MeasZ,
        };
        let _ = p.set(s.coord(), role);
    }
    p
}

pub fn render_ascii(plan: &Plan) -> String {
    pattern_of(plan).render_ascii()
}

const CELL: i32 = 24;
const R: i32 = 8;

fn fill(role: Role, merge: bool) -> &'static str {
    if merge {
        return "#9c6ade";
    }
    match role {
        Role::Free => "#ffffff",
        Role::Target => "#3fae5a",
        Role::MeasX => "#f28cb1",
        Role::MeasY => "#7fb3e6",
        Role::MeasZ => "#f5d547",
        Role::Junction => "#9c6ade",
    }
}

/// SVG drawing in the usual legend: targets green, X sites pink, Z sites
/// yellow, merge sites purple, other Y sites blue. Requested edges are drawn
/// between the targets. Output depends only on the plan.
pub fn render_svg(plan: &Plan) -> String {
    let p = pattern_of(plan);
    let spec = plan.grid;
    let merged: std::collections::BTreeSet<_> =
        plan.steps.iter().filter(|s| s.tag.starts_with("merge")).map(|s| s.coord()).collect();
    let (w, h) = (spec.width as i32 * CELL, spec.height as i32 * CELL);
    let center = |x: i32, y: i32| (x * CELL + CELL / 2, y * CELL + CELL / 2);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(out, r##"<rect width="{w}" height="{h}" fill="#fafafa"/>"##);
    let _ = writeln!(out, r##"<g stroke="#d0d0d0" stroke-width="1">"##);
    for y in 0..spec.height as i32 {
        let (x0, cy) = center(0, y);
        let (x1, _) = center(spec.width as i32 - 1, y);
        let _ = writeln!(out, r#"<line x1="{x0}" y1="{cy}" x2="{x1}" y2="{cy}"/>"#);
    }
    for x in 0..spec.width as i32 {
        let (cx, y0) = center(x, 0);
        let (_, y1) = center(x, spec.height as i32 - 1);
        let _ = writeln!(out, r#"<line x1="{cx}" y1="{y0}" x2="{cx}" y2="{y1}"/>"#);
    }
    out.push_str("</g>\n");
    let _ = writeln!(out, r##"<g stroke="#2e7d42" stroke-width="2" fill="none">"##);
    for (a, b) in &plan.edges {
        let find = |l: &String| plan.targets.iter().find(|t| &t.label == l).map(|t| t.coord());
        if let (Some(a), Some(b)) = (find(a), find(b)) {
            let ((x1, y1), (x2, y2)) = (center(a.x, a.y), center(b.x, b.y));
            let _ = writeln!(out, r#"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>"#);
        }
    }
    out.push_str("</g>\n");
    out.push_str("<g stroke=\"#555555\" stroke-width=\"1\">\n");
    for c in spec.coords() {
        let role = p.get(c).unwrap_or_default();
        let (cx, cy) = center(c.x, c.y);
        let _ = writeln!(out, r#"<circle cx="{cx}" cy="{cy}" r="{R}" fill="{}"/>"#, fill(role, merged.contains(&c)));
    }
    out.push_str("</g>\n");
    out.push_str("<g font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">\n");
    for t in &plan.targets {
        let (cx, cy) = center(t.x, t.y);
        let _ = writeln!(out, r#"<text x="{cx}" y="{}">{}</text>"#, cy + 3, escape(&t.label));
    }
    out.push_str("</g>\n</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
