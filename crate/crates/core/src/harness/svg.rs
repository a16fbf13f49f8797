use std::fmt::Write;

/// Capped relative scores.
pub const CAPPED: &str = "#7b2cbf";

/// Categorical palette for algorithms.
pub const PALETTE: [&str; 14] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#393b79", "#637939", "#8c6d31", "#843c39",
];

/// Minimal SVG document builder with fixed number formatting.
pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

pub fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Svg {
            width,
            height,
            body: String::new(),
        }
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}"/>"#
        );
    }

    pub fn outline(&mut self, x: f64, y: f64, w: f64, h: f64, stroke: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="{stroke}"/>"#
        );
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, s: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="{size:.1}" text-anchor="{anchor}">{}</text>"#,
            escape(s)
        );
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str) {
        let pts: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
    }

    /// Glyph `k`: circle, square or triangle.
    pub fn glyph(&mut self, k: usize, x: f64, y: f64, fill: &str) {
        let _ = match k % 3 {
            0 => writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{fill}"/>"#),
            1 => writeln!(
                self.body,
                r#"<rect x="{:.2}" y="{:.2}" width="7" height="7" fill="{fill}"/>"#,
                x - 3.5,
                y - 3.5
            ),
            _ => writeln!(
                self.body,
                r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{fill}"/>"#,
                x,
                y - 4.5,
                x - 4.5,
                y + 4.0,
                x + 4.5,
                y + 4.0
            ),
        };
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}

/// Light for good (0), dark for bad (towards 1); capped scores in purple.
pub fn score_color(score: f64) -> String {
    if score >= 1.0 {
        return CAPPED.to_string();
    }
    let s = score.clamp(0.0, 1.0);
    let light = (255.0, 247.0, 188.0);
    let dark = (8.0, 48.0, 107.0);
    let mix = |a: f64, b: f64| (a + (b - a) * s).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(light.0, dark.0), mix(light.1, dark.1), mix(light.2, dark.2))
}
