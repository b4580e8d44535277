use std::fmt::Write;

use tiling_cohomology::{Patch, SubstitutionRule};

const UNIT: i64 = 24;

// fixed per-label colors, cycled for large alphabets
const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac",
];

fn color(t: usize) -> &'static str {
    PALETTE[t % PALETTE.len()]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Static SVG of a patch: labeled segments in 1D, colored unit squares in 2D.
pub fn patch_svg(rule: &SubstitutionRule, patch: &Patch) -> String {
    let Some((lo, hi)) = patch.bounding_box() else {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"0\" height=\"0\"/>\n".into();
    };
    let w = (hi[0] - lo[0] + 1) * UNIT;
    let h = if patch.dimension() == 1 {
        UNIT
    } else {
        (hi[1] - lo[1] + 1) * UNIT
    };
    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    )
    .unwrap();
    for (p, t) in patch.iter() {
        let x = (p[0] - lo[0]) * UNIT;
        // SVG y grows downwards
        let y = if patch.dimension() == 1 {
            0
        } else {
            (hi[1] - p[1]) * UNIT
        };
        let name = escape(rule.tile_name(t));
        writeln!(
            out,
            "  <rect x=\"{x}\" y=\"{y}\" width=\"{UNIT}\" height=\"{UNIT}\" fill=\"{}\" stroke=\"#000\" stroke-width=\"1\"><title>{name}</title></rect>",
            color(t as usize)
        )
        .unwrap();
        if patch.dimension() == 1 {
            writeln!(
                out,
                "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">{name}</text>",
                x + UNIT / 2,
                UNIT / 2 + 4
            )
            .unwrap();
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use tiling_cohomology::bundled;
    use tiling_cohomology::substitution::seed;

    #[test]
    fn fibonacci_segments() {
        let rule = bundled::rule("fibonacci").unwrap();
        let p = tiling_cohomology::expand_patch(&rule, &seed(&rule, 0), 3).unwrap();
        let svg = patch_svg(&rule, &p);
        let labels: Vec<&str> = svg
            .lines()
            .filter_map(|l| l.split("\">").nth(1))
            .filter_map(|l| l.strip_suffix("</text>"))
            .collect();
        assert_eq!(labels, ["a", "b", "a", "a", "b"]);
    }

    #[test]
    fn chair_squares() {
        let rule = bundled::rule("chair-block").unwrap();
        let p = tiling_cohomology::expand_patch(&rule, &seed(&rule, 0), 2).unwrap();
        assert_eq!(patch_svg(&rule, &p).matches("<rect").count(), 16);
        let single = patch_svg(&rule, &seed(&rule, 0));
        assert_eq!(single.matches("<rect").count(), 1);
    }
}
