use std::collections::BTreeSet;
use std::fmt::Write as _;

use varifrac::geometry::SimplicialComplex;
use varifrac::solver::QuasistaticState;

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 20.0;

/// Deformed mesh with both faces of every cracked edge in red and crack tips
/// marked.
pub fn frame(base: &SimplicialComplex, state: &QuasistaticState) -> String {
    let mesh = &state.split.mesh;
    let pos = state.u.values();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in pos {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let scale = (WIDTH - 2.0 * MARGIN) / span;
    let height = ((hi[1] - lo[1]) * scale + 2.0 * MARGIN).ceil();
    let xy = |v: usize| {
        let p = &pos[v];
        (MARGIN + (p[0] - lo[0]) * scale, height - MARGIN - (p[1] - lo[1]) * scale)
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(s, r##"<g fill="#eef2f7" stroke="#8a94a6" stroke-width="0.6">"##);
    for t in mesh.simplices(2) {
        let pts: Vec<String> = t
            .iter()
            .map(|&v| {
                let (x, y) = xy(v);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(s, r#"<polygon points="{}"/>"#, pts.join(" "));
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g stroke="#c0262d" stroke-width="2.5" stroke-linecap="round">"##);
    for (i, e) in mesh.simplices(1).iter().enumerate() {
        if mesh.cofaces(1, i).len() != 1 {
            continue;
        }
        let (pa, pb) = (state.split.parent[e[0]], state.split.parent[e[1]]);
        let cracked = base.find(1, &[pa, pb]).is_some_and(|b| state.crack.edges.contains(&b));
        if cracked {
            let ((x1, y1), (x2, y2)) = (xy(e[0]), xy(e[1]));
            let _ = writeln!(s, r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#);
        }
    }
    let _ = writeln!(s, "</g>");
    let tips: BTreeSet<usize> = state.crack.tips(base).into_iter().collect();
    let _ = writeln!(s, r##"<g fill="#1f4e9c">"##);
    for (v, p) in state.split.parent.iter().enumerate() {
        if tips.contains(p) {
            let (x, y) = xy(v);
            let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="4"/>"#);
        }
    }
    let _ = writeln!(s, "</g>\n</svg>");
    s
}
