//! SVG line plots of sweep CSVs, selected by recipe name.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use plotters::coord::ranged1d::{AsRangedCoord, ValueFormatter};
use plotters::prelude::*;
use sps_core::registry::Registry;

#[derive(Debug, Clone, PartialEq)]
pub enum PlotError {
    Read(String),
    Empty,
    UnknownColumn(String),
    Render(String),
}

impl std::fmt::Display for PlotError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PlotError::Read(m) => write!(f, "cannot read CSV: {m}"),
            PlotError::Empty => write!(f, "CSV has no data rows"),
            PlotError::UnknownColumn(c) => write!(f, "recipe column `{c}` is not in the CSV"),
            PlotError::Render(m) => write!(f, "rendering failed: {m}"),
        }
    }
}

impl std::error::Error for PlotError {}

pub trait PlotRecipe: Send + Sync {
    fn name(&self) -> &'static str;
    fn title(&self) -> &'static str;
    fn x_label(&self) -> &'static str;
    fn y_label(&self) -> &'static str;
    /// Columns drawn against `swept`.
    fn columns(&self) -> &'static [&'static str];
    fn log_x(&self) -> bool {
        false
    }
    fn log_y(&self) -> bool {
        false
    }
}

/// A recipe fully described by static data.
pub struct Lines {
    pub name: &'static str,
    pub title: &'static str,
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub columns: &'static [&'static str],
    pub log_x: bool,
    pub log_y: bool,
}

impl PlotRecipe for Lines {
    fn name(&self) -> &'static str {
        self.name
    }
    fn title(&self) -> &'static str {
        self.title
    }
    fn x_label(&self) -> &'static str {
        self.x_label
    }
    fn y_label(&self) -> &'static str {
        self.y_label
    }
    fn columns(&self) -> &'static [&'static str] {
        self.columns
    }
    fn log_x(&self) -> bool {
        self.log_x
    }
    fn log_y(&self) -> bool {
        self.log_y
    }
}

pub fn recipe_registry() -> Registry<dyn PlotRecipe> {
    let recipes = [
        Lines {
            name: "fig3a",
            title: "Autler-Townes regime",
            x_label: "Omega_cw / gamma_X",
            y_label: "indistinguishability",
            columns: &["I", "I_plus", "I_minus"],
            log_x: true,
            log_y: false,
        },
        Lines {
            name: "fig3b",
            title: "ac Stark regime",
            x_label: "delta / Delta_ac",
            y_label: "indistinguishability",
            columns: &["I", "I_plus", "I_minus", "I_approx"],
            log_x: true,
            log_y: false,
        },
        Lines {
            name: "efficiency",
            title: "Emitted photons",
            x_label: "swept",
            y_label: "photons per pulse",
            columns: &["N", "N_plus", "N_minus"],
            log_x: false,
            log_y: false,
        },
        Lines {
            name: "fig5",
            title: "Fixed detuning",
            x_label: "Omega_cw / delta",
            y_label: "indistinguishability",
            columns: &["I", "I_plus", "I_minus", "I_approx"],
            log_x: false,
            log_y: false,
        },
        Lines {
            name: "fig6",
            title: "Purcell-enhanced decay",
            x_label: "gamma_X / gamma_0",
            y_label: "figure of merit",
            columns: &["I", "I_plus", "I_minus", "N"],
            log_x: false,
            log_y: false,
        },
        Lines {
            name: "fig8a",
            title: "cw error rate, resonant dressing",
            x_label: "Omega_cw / gamma_X",
            y_label: "E_cw",
            columns: &["E_cw", "E_cw_approx"],
            log_x: true,
            log_y: true,
        },
        Lines {
            name: "fig8b",
            title: "cw error rate, detuned dressing",
            x_label: "delta / Delta_ac",
            y_label: "E_cw",
            columns: &["E_cw", "E_cw_approx"],
            log_x: false,
            log_y: true,
        },
        Lines {
            name: "fig9",
            title: "Pulsed purity",
            x_label: "tau_p (ps)",
            y_label: "g2[0]",
            columns: &["g2_0", "g2_approx"],
            log_x: false,
            log_y: false,
        },
    ];
    let mut reg: Registry<dyn PlotRecipe> = Registry::new("plot recipe");
    for r in recipes {
        reg.register(r.name, Arc::new(r));
    }
    reg
}

type Series = Vec<(String, Vec<(f64, f64)>)>;

fn read_series(csv_path: &Path, columns: &[&str]) -> Result<Series, PlotError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(csv_path)
        .map_err(|e| PlotError::Read(e.to_string()))?;
    let header = reader.headers().map_err(|e| PlotError::Read(e.to_string()))?.clone();
    let index = |c: &str| header.iter().position(|h| h == c).ok_or_else(|| PlotError::UnknownColumn(c.to_string()));
    let x_col = index("swept")?;
    let cols: Vec<usize> = columns.iter().map(|c| index(c)).collect::<Result<_, _>>()?;
    let mut series: Series = columns.iter().map(|c| (c.to_string(), Vec::new())).collect();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| PlotError::Read(e.to_string()))?;
        rows += 1;
        let Some(x) = record.get(x_col).and_then(|v| v.parse::<f64>().ok()) else { continue };
        for (s, &c) in series.iter_mut().zip(&cols) {
            if let Some(y) = record.get(c).and_then(|v| v.parse::<f64>().ok()) {
                s.1.push((x, y));
            }
        }
    }
    if rows == 0 {
        return Err(PlotError::Empty);
    }
    Ok(series)
}

fn bounds(series: &Series, log_x: bool, log_y: bool) -> Option<((f64, f64), (f64, f64))> {
    let pts = series.iter().flat_map(|s| s.1.iter()).filter(|(x, y)| (!log_x || *x > 0.0) && (!log_y || *y > 0.0));
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() || !y0.is_finite() {
        return None;
    }
    let pad = |lo: f64, hi: f64, log: bool| {
        if log {
            (lo / 1.1, hi * 1.1)
        } else if hi > lo {
            let m = 0.05 * (hi - lo);
            (lo - m, hi + m)
        } else {
            (lo - 0.5, hi + 0.5)
        }
    };
    let (x0, x1) = if x1 > x0 { (x0, x1) } else { pad(x0, x1, log_x) };
    Some(((x0, x1), pad(y0, y1, log_y)))
}

fn draw<X, Y>(
    svg: &mut String,
    recipe: &dyn PlotRecipe,
    series: &Series,
    x: X,
    y: Y,
) -> Result<(), Box<dyn std::error::Error>>
where
    X: AsRangedCoord<Value = f64>,
    Y: AsRangedCoord<Value = f64>,
    X::CoordDescType: ValueFormatter<f64>,
    Y::CoordDescType: ValueFormatter<f64>,
{
    let root = SVGBackend::with_string(svg, (800, 560)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(recipe.title(), ("sans-serif", 22))
        .margin(16)
        .x_label_area_size(44)
        .y_label_area_size(64)
        .build_cartesian_2d(x, y)?;
    chart.configure_mesh().x_desc(recipe.x_label()).y_desc(recipe.y_label()).draw()?;
    for (k, (name, pts)) in series.iter().enumerate() {
        let color = Palette99::pick(k).to_rgba();
        let pts: Vec<(f64, f64)> = pts
            .iter()
            .copied()
            .filter(|(x, y)| (!recipe.log_x() || *x > 0.0) && (!recipe.log_y() || *y > 0.0))
            .collect();
        chart
            .draw_series(LineSeries::new(pts.clone(), color.stroke_width(2)))?
            .label(name.as_str())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2)));
        chart.draw_series(pts.iter().map(|&p| Circle::new(p, 3, color.filled())))?;
    }
    chart.configure_series_labels().background_style(WHITE.mix(0.8)).border_style(BLACK).draw()?;
    root.present()?;
    Ok(())
}

/// Renders `recipe` from `csv_path` into `<out_dir>/<recipe>.svg`. Nothing is
/// written unless rendering succeeds.
pub fn emit_plot(csv_path: &Path, recipe: &dyn PlotRecipe, out_dir: &Path) -> Result<PathBuf, PlotError> {
    let series = read_series(csv_path, recipe.columns())?;
    let ((x0, x1), (y0, y1)) =
        bounds(&series, recipe.log_x(), recipe.log_y()).ok_or_else(|| PlotError::Render("no plottable values".into()))?;
    let mut svg = String::new();
    let result = match (recipe.log_x(), recipe.log_y()) {
        (false, false) => draw(&mut svg, recipe, &series, x0..x1, y0..y1),
        (true, false) => draw(&mut svg, recipe, &series, (x0..x1).log_scale(), y0..y1),
        (false, true) => draw(&mut svg, recipe, &series, x0..x1, (y0..y1).log_scale()),
        (true, true) => draw(&mut svg, recipe, &series, (x0..x1).log_scale(), (y0..y1).log_scale()),
    };
    result.map_err(|e| PlotError::Render(e.to_string()))?;
    let path = out_dir.join(format!("{}.svg", recipe.name()));
    std::fs::write(&path, svg).map_err(|e| PlotError::Render(e.to_string()))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, text: &str) -> PathBuf {
        let p = dir.join("in.csv");
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn renders_svg_and_skips_empty_fields() {
        let dir = tempfile::tempdir().unwrap();
        let csv = write(dir.path(), "# mode = at-drive\nswept,I,I_plus,I_minus\n2,0.9,,\n20,0.6,0.7,0.7\n200,0.53,0.67,0.67\n");
        let reg = recipe_registry();
        let path = emit_plot(&csv, reg.get("fig3a").unwrap().as_ref(), dir.path()).unwrap();
        let svg = std::fs::read_to_string(path).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("I_plus"));
    }

    #[test]
    fn empty_csv_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let csv = write(dir.path(), "# nothing\nswept,E_cw,E_cw_approx\n");
        let reg = recipe_registry();
        let err = emit_plot(&csv, reg.get("fig8b").unwrap().as_ref(), dir.path()).unwrap_err();
        assert_eq!(err, PlotError::Empty);
        assert!(!dir.path().join("fig8b.svg").exists());
    }

    #[test]
    fn unknown_column_is_a_recipe_error() {
        let dir = tempfile::tempdir().unwrap();
        let csv = write(dir.path(), "swept,N\n1,0.5\n");
        let reg = recipe_registry();
        let err = emit_plot(&csv, reg.get("fig9").unwrap().as_ref(), dir.path()).unwrap_err();
        assert_eq!(err, PlotError::UnknownColumn("g2_0".into()));
    }
}
