//! Tabular reports rendered as CSV or aligned text.

use std::fmt::Write as _;

use overlap_core::trajectory::fmt_full;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// A measured or computed value; full precision in CSV, two decimals in text.
    Value(f64),
    /// A parameter; shortest round-trip form in both renderings.
    Param(f64),
    /// A relative error in percent, one decimal.
    Percent(f64),
    Count(u64),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Value(v) => fmt_full(*v),
            Cell::Param(v) => format!("{v}"),
            Cell::Percent(p) => format!("{p:.1}"),
            Cell::Count(c) => c.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn text(&self) -> String {
        match self {
            Cell::Value(v) => format!("{v:.2}"),
            Cell::Param(v) => format!("{v}"),
            Cell::Percent(p) => format!("{p:.1}%"),
            Cell::Count(c) => c.to_string(),
            Cell::Empty => "-".into(),
        }
    }
}

/// `|approx - sim| / sim` in percent.
pub fn relative_error_pct(approx: f64, sim: f64) -> f64 {
    (approx - sim).abs() / sim.abs() * 100.0
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub title: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(title: &str, headers: &[&str]) -> Self {
        Self {
            title: title.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.headers.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let rendered: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::text).collect())
            .collect();
        let widths: Vec<usize> = self
            .headers
            .iter()
            .enumerate()
            .map(|(j, h)| {
                rendered
                    .iter()
                    .map(|r| r[j].len())
                    .chain(std::iter::once(h.len()))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        if !self.title.is_empty() {
            let _ = writeln!(out, "{}", self.title);
        }
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let _ = writeln!(out, "{}", line(&self.headers));
        let _ = writeln!(
            out,
            "{}",
            widths
                .iter()
                .map(|w| "-".repeat(*w))
                .collect::<Vec<_>>()
                .join("  ")
        );
        for r in &rendered {
            let _ = writeln!(out, "{}", line(r));
        }
        out
    }
}
