use std::fmt::Write as _;

use super::{Centroid, FundingGroup, LandscapeGraph, Positions, ShareClass};

const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;

fn fill(class: ShareClass) -> &'static str {
    match class {
        ShareClass::Hotspot => "#d62728",
        ShareClass::FormerHotspot => "#ff9f1c",
        ShareClass::Ordinary => "#9a9a9a",
    }
}

/// Renders positioned nodes as circles with area proportional to count,
/// coloured by share class, plus a cross per centroid. Nodes without a
/// position are skipped.
pub fn render_svg(graph: &LandscapeGraph, positions: &Positions, centroids: &[Centroid]) -> String {
    let placed: Vec<_> = graph.nodes.iter().filter_map(|n| positions.get(&n.vector).map(|p| (n, *p))).collect();
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in placed.iter().map(|(_, p)| p).chain(centroids.iter().map(|c| &c.point)) {
        lo_x = lo_x.min(p.x);
        hi_x = hi_x.max(p.x);
        lo_y = lo_y.min(p.y);
        hi_y = hi_y.max(p.y);
    }
    let extent = (hi_x - lo_x).max(hi_y - lo_y);
    let scale = if extent.is_finite() && extent > 0.0 { (SIZE - 2.0 * MARGIN) / extent } else { 1.0 };
    let (ox, oy) = if lo_x.is_finite() { (lo_x, lo_y) } else { (0.0, 0.0) };
    let sx = |x: f64| MARGIN + (x - ox) * scale;
    let sy = |y: f64| SIZE - MARGIN - (y - oy) * scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(s, "  <title>landscape {}</title>", graph.snapshot_year);
    s.push_str(
        "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n  <g stroke=\"#cccccc\" stroke-width=\"0.5\">\n",
    );
    for &(a, b) in &graph.edges {
        if let (Some(p), Some(q)) = (positions.get(&graph.nodes[a].vector), positions.get(&graph.nodes[b].vector)) {
            let _ = writeln!(
                s,
                "    <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>",
                sx(p.x),
                sy(p.y),
                sx(q.x),
                sy(q.y)
            );
        }
    }
    s.push_str("  </g>\n  <g stroke=\"white\" stroke-width=\"0.3\">\n");
    for (n, p) in &placed {
        let r = 1.5 * (n.total_count as f64).sqrt();
        let _ = writeln!(
            s,
            "    <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{r:.2}\" fill=\"{}\"><title>{} n={} cf={:.3}</title></circle>",
            sx(p.x),
            sy(p.y),
            fill(n.class),
            n.id(),
            n.total_count,
            n.cf_share()
        );
    }
    s.push_str("  </g>\n");
    for c in centroids {
        let colour = match c.group {
            FundingGroup::Crowdfunded => "#8b0000",
            FundingGroup::Traditional => "#1f3b73",
        };
        let (x, y) = (sx(c.point.x), sy(c.point.y));
        let _ = writeln!(
            s,
            "  <path d=\"M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}\" stroke=\"{colour}\" stroke-width=\"3\"><title>{} centroid</title></path>",
            x - 8.0,
            y - 8.0,
            x + 8.0,
            y + 8.0,
            x - 8.0,
            y + 8.0,
            x + 8.0,
            y - 8.0,
            c.group.as_str()
        );
    }
    s.push_str("</svg>\n");
    s
}
