//! Result rows and their CSV form.

use std::io::Write;

/// Column names in output order. Energies are in μeV.
pub const COLUMNS: &[&str] = &[
    "swept",
    "N",
    "N_plus",
    "N_minus",
    "I",
    "I_plus",
    "I_minus",
    "g2_0",
    "E_cw",
    "V_raw",
    "V",
    "Delta_ac",
    "eta",
    "Omega_cw",
    "delta",
    "gamma_X",
    "B",
    "eta_eff",
    "eta_eff_cav",
    "I_approx",
    "g2_approx",
    "E_cw_approx",
    "status",
];

/// One sweep point; `None` is written as an empty field.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultRow {
    pub swept: f64,
    pub n: Option<f64>,
    pub n_plus: Option<f64>,
    pub n_minus: Option<f64>,
    pub i: Option<f64>,
    pub i_plus: Option<f64>,
    pub i_minus: Option<f64>,
    pub g2_0: Option<f64>,
    pub e_cw: Option<f64>,
    pub v_raw: Option<f64>,
    pub v: Option<f64>,
    pub delta_ac: Option<f64>,
    pub eta: Option<f64>,
    pub omega_cw: Option<f64>,
    pub delta: Option<f64>,
    pub gamma_x: Option<f64>,
    pub b: Option<f64>,
    pub eta_eff: Option<f64>,
    pub eta_eff_cav: Option<f64>,
    pub i_approx: Option<f64>,
    pub g2_approx: Option<f64>,
    pub e_cw_approx: Option<f64>,
    pub status: Status,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub enum Status {
    #[default]
    Ok,
    Warn(Vec<String>),
    Failed(String),
}

impl Status {
    fn render(&self) -> String {
        match self {
            Status::Ok => "ok".into(),
            Status::Warn(w) if w.len() == 1 => format!("warn: {}", w[0]),
            Status::Warn(w) => format!("warn: {} (+{} more)", w[0], w.len() - 1),
            Status::Failed(e) => format!("error: {e}"),
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Status::Failed(_))
    }
}

/// Nine significant digits, independent of locale.
pub fn format_value(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.8e}"),
        Some(v) => v.to_string(),
        None => String::new(),
    }
}

impl ResultRow {
    pub fn failed(swept: f64, reason: String) -> Self {
        Self { swept, status: Status::Failed(reason), ..Default::default() }
    }

    pub fn fields(&self) -> Vec<String> {
        let values = [
            Some(self.swept),
            self.n,
            self.n_plus,
            self.n_minus,
            self.i,
            self.i_plus,
            self.i_minus,
            self.g2_0,
            self.e_cw,
            self.v_raw,
            self.v,
            self.delta_ac,
            self.eta,
            self.omega_cw,
            self.delta,
            self.gamma_x,
            self.b,
            self.eta_eff,
            self.eta_eff_cav,
            self.i_approx,
            self.g2_approx,
            self.e_cw_approx,
        ];
        let mut out: Vec<String> = values.iter().map(|v| format_value(*v)).collect();
        out.push(self.status.render());
        out
    }
}

/// Writes `# key = value` metadata lines, the header and the rows.
pub fn write_csv<W: Write>(out: W, metadata: &[(String, String)], rows: &[ResultRow]) -> std::io::Result<()> {
    let mut out = out;
    for (k, v) in metadata {
        writeln!(out, "# {k} = {v}")?;
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        w.write_record(row.fields())?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_width_matches_header() {
        assert_eq!(ResultRow::default().fields().len(), COLUMNS.len());
    }

    #[test]
    fn formatting_is_fixed() {
        assert_eq!(format_value(Some(0.5)), "5.00000000e-1");
        assert_eq!(format_value(Some(11.0 / 21.0)), "5.23809524e-1");
        assert_eq!(format_value(None), "");
    }

    #[test]
    fn missing_values_are_empty_and_messages_quoted() {
        let row = ResultRow { swept: 1.0, n: Some(0.25), status: Status::Failed("bad, worse".into()), ..Default::default() };
        let mut buf = Vec::new();
        write_csv(&mut buf, &[("mode".into(), "x".into())], &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# mode = x");
        assert_eq!(lines[1].split(',').count(), COLUMNS.len());
        assert!(lines[2].starts_with("1.00000000e0,2.50000000e-1,,"));
        assert!(lines[2].ends_with("\"error: bad, worse\""));
        assert!(!text.contains('\r'));
    }
}
