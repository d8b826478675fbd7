//! SVG rendering of hit-count results: bar and pie charts for per-field
//! counts and multi-series line charts for benchmark timings.
//!
//! Rendering is pure string building: the same spec always yields the
//! same bytes.

use thiserror::Error;

/// Fixed color cycle (Tableau 10 plus two), so documents are reproducible.
pub const DEFAULT_PALETTE: [&str; 12] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc949", "#af7aa1", "#ff9da7",
    "#9c755f", "#bab0ab", "#86bcb6", "#d37295",
];

pub const DEFAULT_WIDTH: u32 = 800;
pub const DEFAULT_HEIGHT: u32 = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    Bar,
    Pie,
    Line,
}

/// A titled sequence of labeled non-negative values.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub title: String,
    pub points: Vec<(String, f64)>,
}

impl Series {
    pub fn new(title: impl Into<String>, points: Vec<(String, f64)>) -> Self {
        Series {
            title: title.into(),
            points,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub kind: ChartKind,
    /// Bar and pie charts use exactly one series; line charts allow many.
    pub series: Vec<Series>,
    pub width: u32,
    pub height: u32,
    pub palette: Vec<String>,
}

impl ChartSpec {
    pub fn new(kind: ChartKind, series: Vec<Series>) -> Self {
        ChartSpec {
            kind,
            series,
            width: DEFAULT_WIDTH,
            height: DEFAULT_HEIGHT,
            palette: DEFAULT_PALETTE.iter().map(|c| c.to_string()).collect(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChartError {
    #[error("no rows carry tag '{0}'")]
    EmptyTag(String),
    #[error("pie chart needs at least one nonzero value")]
    AllZero,
    #[error("line series '{0}' needs at least two points")]
    TooFewPoints(String),
    #[error("invalid chart spec: {0}")]
    InvalidSpec(String),
}

/// Selects the rows of one tag from `(key, count)` rows, strips the
/// `<tag>-` prefix for labels, and orders by descending count, then label.
pub fn series_from_counts(rows: &[(String, i64)], tag: &str) -> Result<Series, ChartError> {
    let prefix = format!("{tag}-");
    let mut points: Vec<(String, f64)> = rows
        .iter()
        .filter_map(|(key, count)| {
            key.strip_prefix(&prefix)
                .map(|label| (label.to_string(), *count as f64))
        })
        .collect();
    if points.is_empty() {
        return Err(ChartError::EmptyTag(tag.to_string()));
    }
    points.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("counts are finite")
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(Series::new(tag, points))
}

fn xml_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            other => out.push(other),
        }
    }
    out
}

fn validate_common(spec: &ChartSpec) -> Result<(), ChartError> {
    if spec.width < 100 || spec.height < 100 {
        return Err(ChartError::InvalidSpec(
            "width and height must be at least 100".to_string(),
        ));
    }
    if spec.palette.is_empty() {
        return Err(ChartError::InvalidSpec(
            "palette must be non-empty".to_string(),
        ));
    }
    if spec.series.is_empty() {
        return Err(ChartError::InvalidSpec("at least one series".to_string()));
    }
    for series in &spec.series {
        for (i, (label, value)) in series.points.iter().enumerate() {
            if !value.is_finite() || *value < 0.0 {
                return Err(ChartError::InvalidSpec(format!(
                    "value for '{label}' must be a non-negative finite number"
                )));
            }
            if series.points[..i].iter().any(|(l, _)| l == label) {
                return Err(ChartError::InvalidSpec(format!(
                    "duplicate label '{label}' in series '{}'",
                    series.title
                )));
            }
        }
    }
    Ok(())
}

fn single_series(spec: &ChartSpec) -> Result<&Series, ChartError> {
    match spec.series.as_slice() {
        [series] => Ok(series),
        _ => Err(ChartError::InvalidSpec(
            "this chart kind takes exactly one series".to_string(),
        )),
    }
}

struct SvgDoc {
    body: String,
    width: u32,
    height: u32,
}

impl SvgDoc {
    fn new(width: u32, height: u32) -> Self {
        SvgDoc {
            body: String::new(),
            width,
            height,
        }
    }

    fn push(&mut self, element: &str) {
        self.body.push_str("  ");
        self.body.push_str(element);
        self.body.push('\n');
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, size: u32, content: &str) {
        self.push(&format!(
            r#"<text x="{x:.3}" y="{y:.3}" font-family="sans-serif" font-size="{size}" text-anchor="{anchor}">{}</text>"#,
            xml_escape(content)
        ));
    }

    fn finish(self) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             {body}</svg>\n",
            w = self.width,
            h = self.height,
            body = self.body
        )
    }
}

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 70.0;

/// One rectangle per point; heights exactly proportional to values.
pub fn render_bar(spec: &ChartSpec) -> Result<String, ChartError> {
    validate_common(spec)?;
    let series = single_series(spec)?;
    if series.points.is_empty() {
        return Err(ChartError::InvalidSpec("bar chart needs points".to_string()));
    }
    let (w, h) = (spec.width as f64, spec.height as f64);
    let plot_w = w - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = h - MARGIN_TOP - MARGIN_BOTTOM;
    let baseline = MARGIN_TOP + plot_h;
    let max = series
        .points
        .iter()
        .map(|(_, v)| *v)
        .fold(0.0f64, f64::max);

    let mut doc = SvgDoc::new(spec.width, spec.height);
    doc.text(w / 2.0, MARGIN_TOP / 2.0 + 5.0, "middle", 16, &series.title);
    // Axes.
    doc.push(&format!(
        r##"<line x1="{l:.3}" y1="{t:.3}" x2="{l:.3}" y2="{b:.3}" stroke="#333"/>"##,
        l = MARGIN_LEFT,
        t = MARGIN_TOP,
        b = baseline
    ));
    doc.push(&format!(
        r##"<line x1="{l:.3}" y1="{b:.3}" x2="{r:.3}" y2="{b:.3}" stroke="#333"/>"##,
        l = MARGIN_LEFT,
        r = MARGIN_LEFT + plot_w,
        b = baseline
    ));
    // Y-axis value labels.
    doc.text(MARGIN_LEFT - 8.0, baseline + 4.0, "end", 12, "0");
    if max > 0.0 {
        doc.text(
            MARGIN_LEFT - 8.0,
            MARGIN_TOP + 4.0,
            "end",
            12,
            &trim_number(max),
        );
    }

    let n = series.points.len() as f64;
    let slot = plot_w / n;
    let bar_w = slot * 0.7;
    for (i, (label, value)) in series.points.iter().enumerate() {
        let height = if max > 0.0 { value / max * plot_h } else { 0.0 };
        let x = MARGIN_LEFT + slot * i as f64 + (slot - bar_w) / 2.0;
        let y = baseline - height;
        let color = &spec.palette[i % spec.palette.len()];
        doc.push(&format!(
            r#"<rect class="bar" x="{x:.3}" y="{y:.3}" width="{bar_w:.3}" height="{height:.3}" fill="{color}"/>"#,
        ));
        doc.text(x + bar_w / 2.0, y - 5.0, "middle", 12, &trim_number(*value));
        doc.text(x + bar_w / 2.0, baseline + 16.0, "middle", 12, label);
    }
    Ok(doc.finish())
}

fn trim_number(value: f64) -> String {
    if value.fract() == 0.0 && value.abs() < 1e15 {
        format!("{}", value as i64)
    } else {
        format!("{value:.3}")
    }
}

/// One wedge per nonzero point; wedge angles are `360 * value / total`.
/// Zero-valued points are omitted from the disc but kept in the legend.
pub fn render_pie(spec: &ChartSpec) -> Result<String, ChartError> {
    validate_common(spec)?;
    let series = single_series(spec)?;
    if series.points.is_empty() {
        return Err(ChartError::InvalidSpec("pie chart needs points".to_string()));
    }
    let total: f64 = series.points.iter().map(|(_, v)| v).sum();
    if total <= 0.0 {
        return Err(ChartError::AllZero);
    }
    let (w, h) = (spec.width as f64, spec.height as f64);
    let cx = w * 0.36;
    let cy = (h + MARGIN_TOP) / 2.0;
    let r = (w.min(h) / 2.0 - MARGIN_TOP) * 0.9;

    let mut doc = SvgDoc::new(spec.width, spec.height);
    doc.text(w / 2.0, MARGIN_TOP / 2.0 + 5.0, "middle", 16, &series.title);

    let nonzero: Vec<(usize, &(String, f64))> = series
        .points
        .iter()
        .enumerate()
        .filter(|(_, (_, v))| *v > 0.0)
        .collect();

    if nonzero.len() == 1 {
        // A single wedge is the full disc; an arc cannot span 360 degrees,
        // so draw it as two half circles in one path.
        let color = &spec.palette[nonzero[0].0 % spec.palette.len()];
        doc.push(&format!(
            r#"<path class="wedge" d="M {x1:.6} {y1:.6} A {r:.6} {r:.6} 0 1 1 {x2:.6} {y2:.6} A {r:.6} {r:.6} 0 1 1 {x1:.6} {y1:.6} Z" fill="{color}"/>"#,
            x1 = cx,
            y1 = cy - r,
            x2 = cx,
            y2 = cy + r,
        ));
    } else {
        // Start at 12 o'clock and sweep clockwise.
        let mut angle = -90.0f64;
        for &(index, (_, value)) in &nonzero {
            let sweep = 360.0 * value / total;
            let start = angle.to_radians();
            let end = (angle + sweep).to_radians();
            let (x1, y1) = (cx + r * start.cos(), cy + r * start.sin());
            let (x2, y2) = (cx + r * end.cos(), cy + r * end.sin());
            let large_arc = i32::from(sweep > 180.0);
            let color = &spec.palette[index % spec.palette.len()];
            doc.push(&format!(
                r#"<path class="wedge" d="M {cx:.6} {cy:.6} L {x1:.6} {y1:.6} A {r:.6} {r:.6} 0 {large_arc} 1 {x2:.6} {y2:.6} Z" fill="{color}"/>"#,
            ));
            angle += sweep;
        }
    }

    // Legend lists every point, zero-valued ones included.
    let legend_x = w * 0.68;
    let mut legend_y = MARGIN_TOP + 20.0;
    for (index, (label, value)) in series.points.iter().enumerate() {
        let color = &spec.palette[index % spec.palette.len()];
        doc.push(&format!(
            r#"<rect x="{legend_x:.3}" y="{y:.3}" width="12" height="12" fill="{color}"/>"#,
            y = legend_y - 10.0
        ));
        let share = 100.0 * value / total;
        doc.text(
            legend_x + 18.0,
            legend_y,
            "start",
            12,
            &format!("{label} ({}, {share:.1}%)", trim_number(*value)),
        );
        legend_y += 20.0;
    }
    Ok(doc.finish())
}

/// One polyline per series over a shared numeric x axis (labels must parse
/// as numbers); y is affine in value with zero at the baseline.
pub fn render_line(spec: &ChartSpec) -> Result<String, ChartError> {
    validate_common(spec)?;
    let mut xs: Vec<f64> = Vec::new();
    for series in &spec.series {
        if series.points.len() < 2 {
            return Err(ChartError::TooFewPoints(series.title.clone()));
        }
        for (label, _) in &series.points {
            let x: f64 = label.trim().parse().map_err(|_| {
                ChartError::InvalidSpec(format!(
                    "line chart labels must be numeric, got '{label}'"
                ))
            })?;
            xs.push(x);
        }
    }
    let x_min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let x_span = if x_max > x_min { x_max - x_min } else { 1.0 };
    let y_max = spec
        .series
        .iter()
        .flat_map(|s| s.points.iter().map(|(_, v)| *v))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);

    let (w, h) = (spec.width as f64, spec.height as f64);
    let plot_w = w - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = h - MARGIN_TOP - MARGIN_BOTTOM;
    let baseline = MARGIN_TOP + plot_h;
    let to_x = |x: f64| MARGIN_LEFT + (x - x_min) / x_span * plot_w;
    let to_y = |v: f64| baseline - v / y_max * plot_h;

    let mut doc = SvgDoc::new(spec.width, spec.height);
    // Axes.
    doc.push(&format!(
        r##"<line x1="{l:.3}" y1="{t:.3}" x2="{l:.3}" y2="{b:.3}" stroke="#333"/>"##,
        l = MARGIN_LEFT,
        t = MARGIN_TOP,
        b = baseline
    ));
    doc.push(&format!(
        r##"<line x1="{l:.3}" y1="{b:.3}" x2="{r:.3}" y2="{b:.3}" stroke="#333"/>"##,
        l = MARGIN_LEFT,
        r = MARGIN_LEFT + plot_w,
        b = baseline
    ));
    doc.text(MARGIN_LEFT - 8.0, baseline + 4.0, "end", 12, "0");
    doc.text(
        MARGIN_LEFT - 8.0,
        MARGIN_TOP + 4.0,
        "end",
        12,
        &trim_number(y_max),
    );

    // X tick labels at every distinct x, in order.
    let mut ticks = xs.clone();
    ticks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ticks.dedup();
    for tick in &ticks {
        doc.text(to_x(*tick), baseline + 16.0, "middle", 11, &trim_number(*tick));
    }

    for (index, series) in spec.series.iter().enumerate() {
        let color = &spec.palette[index % spec.palette.len()];
        let mut points: Vec<(f64, f64)> = series
            .points
            .iter()
            .map(|(label, v)| (label.trim().parse::<f64>().unwrap(), *v))
            .collect();
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let path: Vec<String> = points
            .iter()
            .map(|(x, v)| format!("{:.3},{:.3}", to_x(*x), to_y(*v)))
            .collect();
        doc.push(&format!(
            r#"<polyline class="series" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            path.join(" ")
        ));
        for (x, v) in &points {
            doc.push(&format!(
                r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="{color}"/>"#,
                to_x(*x),
                to_y(*v)
            ));
        }
        // Legend entry.
        let legend_y = MARGIN_TOP + 18.0 * index as f64;
        doc.push(&format!(
            r#"<line x1="{x:.3}" y1="{y:.3}" x2="{x2:.3}" y2="{y:.3}" stroke="{color}" stroke-width="3"/>"#,
            x = MARGIN_LEFT + plot_w - 150.0,
            x2 = MARGIN_LEFT + plot_w - 126.0,
            y = legend_y
        ));
        doc.text(
            MARGIN_LEFT + plot_w - 120.0,
            legend_y + 4.0,
            "start",
            12,
            &series.title,
        );
    }
    Ok(doc.finish())
}

/// Dispatches on the chart kind.
pub fn render(spec: &ChartSpec) -> Result<String, ChartError> {
    match spec.kind {
        ChartKind::Bar => render_bar(spec),
        ChartKind::Pie => render_pie(spec),
        ChartKind::Line => render_line(spec),
    }
}
