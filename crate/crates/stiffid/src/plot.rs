//! Minimal deterministic SVG plots: the per-case hysteresis picture
//! (charge path, discharge path, midpoints, midline) and orthographic
//! projections of the center geometry. Layout is fixed and all
//! coordinates are formatted with fixed precision so plots can be
//! golden-file tested.

use crate::center::CenterSolution;
use crate::fitting::MidlineFit;
use crate::torsor::Point3;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 60.0;

struct Scale {
    min: f64,
    max: f64,
    lo_px: f64,
    hi_px: f64,
}

impl Scale {
    fn new(min: f64, max: f64, lo_px: f64, hi_px: f64) -> Scale {
        let (min, max) = if (max - min).abs() < 1e-300 {
            (min - 1.0, max + 1.0)
        } else {
            (min, max)
        };
        Scale { min, max, lo_px, hi_px }
    }

    fn map(&self, v: f64) -> f64 {
        self.lo_px + (v - self.min) / (self.max - self.min) * (self.hi_px - self.lo_px)
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

struct Svg {
    body: String,
}

impl Svg {
    fn new(title: &str) -> Svg {
        let mut body = String::new();
        body.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        body.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        body.push_str(&format!(
            "<text x=\"{}\" y=\"30\" font-family=\"monospace\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
            WIDTH / 2.0,
            escape(title)
        ));
        Svg { body }
    }

    fn polyline(&mut self, pts: &[(f64, f64)], color: &str, dashed: bool) {
        if pts.is_empty() {
            return;
        }
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{},{}", fmt(*x), fmt(*y))).collect();
        let dash = if dashed { " stroke-dasharray=\"6 4\"" } else { "" };
        self.body.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash}/>\n",
            coords.join(" ")
        ));
    }

    fn circle(&mut self, x: f64, y: f64, r: f64, color: &str) {
        self.body.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{r}\" fill=\"{color}\"/>\n",
            fmt(x),
            fmt(y)
        ));
    }

    fn text(&mut self, x: f64, y: f64, content: &str) {
        self.body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">{}</text>\n",
            fmt(x),
            fmt(y),
            escape(content)
        ));
    }

    fn axes_box(&mut self) {
        self.body.push_str(&format!(
            "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
            WIDTH - 2.0 * MARGIN,
            HEIGHT - 2.0 * MARGIN
        ));
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// The hysteresis picture of one case component: both branches, the
/// level midpoints, and the fitted midline.
pub fn plot_midline(
    title: &str,
    charge: &[(f64, f64)],
    discharge: &[(f64, f64)],
    fit: &MidlineFit,
) -> String {
    let all: Vec<(f64, f64)> = charge
        .iter()
        .chain(discharge)
        .copied()
        .chain(fit.levels.iter().copied().zip(fit.midpoints.iter().copied()))
        .collect();
    let (mut fmin, mut fmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(f, v) in &all {
        fmin = fmin.min(f);
        fmax = fmax.max(f);
        vmin = vmin.min(v);
        vmax = vmax.max(v);
    }
    let sx = Scale::new(fmin, fmax, MARGIN, WIDTH - MARGIN);
    let sy = Scale::new(vmin, vmax, HEIGHT - MARGIN, MARGIN);

    let mut svg = Svg::new(title);
    svg.axes_box();
    let to_px = |pts: &[(f64, f64)]| -> Vec<(f64, f64)> {
        pts.iter().map(|&(f, v)| (sx.map(f), sy.map(v))).collect()
    };
    svg.polyline(&to_px(charge), "#c0392b", false);
    svg.polyline(&to_px(discharge), "#2980b9", false);
    let midline_pts: Vec<(f64, f64)> = [fmin, fmax]
        .iter()
        .map(|&f| (f, fit.slope * f + fit.intercept))
        .collect();
    svg.polyline(&to_px(&midline_pts), "#27ae60", true);
    for (&l, &c) in fit.levels.iter().zip(&fit.midpoints) {
        svg.circle(sx.map(l), sy.map(c), 3.0, "#27ae60");
    }
    svg.text(MARGIN, HEIGHT - MARGIN / 3.0, "force (N)");
    svg.text(
        MARGIN,
        MARGIN - 10.0,
        &format!("slope {:.6e} per N, rms {:.3e}", fit.slope, fit.rms_residual),
    );
    svg.finish()
}

/// Deflection and stiffness against beam length, each normalized to its
/// own axis (the length-sizing trade-off picture).
pub fn plot_sweep(rows: &[crate::sizing::SweepRow]) -> String {
    let mut svg = Svg::new("holding fixture length sweep");
    svg.axes_box();
    if rows.is_empty() {
        return svg.finish();
    }
    let lmin = rows.first().unwrap().length_mm;
    let lmax = rows.last().unwrap().length_mm;
    let sx = Scale::new(lmin, lmax, MARGIN, WIDTH - MARGIN);
    let dmax = rows.iter().map(|r| r.deflection_mm).fold(0.0, f64::max);
    let kmax = rows.iter().map(|r| r.stiffness_n_per_m).fold(0.0, f64::max);
    let sy_d = Scale::new(0.0, dmax, HEIGHT - MARGIN, MARGIN);
    let sy_k = Scale::new(0.0, kmax, HEIGHT - MARGIN, MARGIN);
    let dpts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (sx.map(r.length_mm), sy_d.map(r.deflection_mm)))
        .collect();
    let kpts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (sx.map(r.length_mm), sy_k.map(r.stiffness_n_per_m)))
        .collect();
    svg.polyline(&dpts, "#c0392b", false);
    svg.polyline(&kpts, "#2980b9", true);
    svg.text(MARGIN, HEIGHT - MARGIN / 3.0, "length (mm)");
    svg.text(MARGIN, MARGIN - 10.0, &format!("deflection up to {dmax:.4} mm (solid), stiffness up to {kmax:.3e} N/m (dashed)"));
    svg.finish()
}

/// Orthographic projection plane for center plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    Xy,
    Yz,
    Xz,
}

impl Projection {
    pub fn name(self) -> &'static str {
        match self {
            Projection::Xy => "xy",
            Projection::Yz => "yz",
            Projection::Xz => "xz",
        }
    }

    fn project(self, p: Point3) -> (f64, f64) {
        match self {
            Projection::Xy => (p.x, p.y),
            Projection::Yz => (p.y, p.z),
            Projection::Xz => (p.x, p.z),
        }
    }
}

/// Projection of the center geometry: per-axis intersection points,
/// normal lines and the solved stiffness center.
pub fn plot_center(solution: &CenterSolution, projection: Projection) -> String {
    let mut points: Vec<(f64, f64)> = vec![projection.project(solution.cr)];
    let mut segments: Vec<[(f64, f64); 2]> = Vec::new();
    for axis in &solution.axes {
        let m = axis.plane.point;
        points.push(projection.project(m));
        // normal line drawn across the span from M towards (and past) CR
        let reach = (solution.cr - m).norm().max(0.05) * 1.3;
        let a = m + axis.plane.normal * reach;
        let b = m - axis.plane.normal * (reach * 0.2);
        segments.push([projection.project(b), projection.project(a)]);
        points.push(projection.project(a));
        points.push(projection.project(b));
    }

    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &points {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let pad_x = (xmax - xmin).max(1e-3) * 0.1;
    let pad_y = (ymax - ymin).max(1e-3) * 0.1;
    let sx = Scale::new(xmin - pad_x, xmax + pad_x, MARGIN, WIDTH - MARGIN);
    let sy = Scale::new(ymin - pad_y, ymax + pad_y, HEIGHT - MARGIN, MARGIN);

    let mut svg = Svg::new(&format!("stiffness center, {} projection", projection.name()));
    svg.axes_box();
    let colors = ["#c0392b", "#27ae60", "#2980b9"];
    for (k, (axis, seg)) in solution.axes.iter().zip(&segments).enumerate() {
        let px: Vec<(f64, f64)> = seg.iter().map(|&(x, y)| (sx.map(x), sy.map(y))).collect();
        svg.polyline(&px, colors[k % colors.len()], true);
        let (mx, my) = projection.project(axis.plane.point);
        svg.circle(sx.map(mx), sy.map(my), 4.0, colors[k % colors.len()]);
        svg.text(
            sx.map(mx) + 6.0,
            sy.map(my) - 6.0,
            &format!("M_{}", axis.axis),
        );
    }
    let (cx, cy) = projection.project(solution.cr);
    svg.circle(sx.map(cx), sy.map(cy), 5.0, "black");
    svg.text(sx.map(cx) + 8.0, sy.map(cy) + 4.0, "CR");
    svg.text(
        MARGIN,
        MARGIN - 10.0,
        &format!("residual {:.3e} m", solution.residual),
    );
    svg.finish()
}
