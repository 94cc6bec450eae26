//! Resource-usage and cost comparison tables.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::formulation::SurvivabilityMode;
use crate::planner::{cost_from_counts, NetworkConfiguration};
use crate::model::UnitCosts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format `{other}` (table, csv, json)")),
        }
    }
}

/// One configuration's figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportColumn {
    pub label: String,
    /// Gbps.
    pub transit: f64,
    pub lightpaths: usize,
    /// Lightpaths carrying protection LSPs, shown in brackets.
    pub protection_carrying: Option<usize>,
    pub wavelengths: usize,
    /// Interlayer BRS extra wavelengths, shown in brackets.
    pub brs_extra: Option<usize>,
    pub total_cost: f64,
    pub optical_cost: f64,
}

impl ReportColumn {
    /// Column priced from raw counts.
    pub fn from_counts(
        label: impl Into<String>,
        lightpaths: usize,
        protection_carrying: Option<usize>,
        wavelengths: usize,
        brs_extra: Option<usize>,
        transit: f64,
        costs: &UnitCosts,
    ) -> Self {
        let c = cost_from_counts(lightpaths, wavelengths, transit, costs);
        ReportColumn {
            label: label.into(),
            transit,
            lightpaths,
            protection_carrying,
            wavelengths,
            brs_extra,
            total_cost: c.total,
            optical_cost: c.wavelength_cost,
        }
    }

    pub fn from_config(label: impl Into<String>, cfg: &NetworkConfiguration) -> Self {
        let c = &cfg.cost;
        ReportColumn {
            label: label.into(),
            transit: c.transit_traffic,
            lightpaths: c.lightpaths,
            protection_carrying: cfg.mode.is_protected().then_some(c.protection_carrying),
            wavelengths: c.wavelengths,
            brs_extra: (cfg.mode == SurvivabilityMode::MlInterlayerBrs).then_some(c.extra_wavelengths),
            total_cost: c.total,
            optical_cost: c.wavelength_cost,
        }
    }

    pub fn lightpath_cell(&self) -> String {
        bracketed(self.lightpaths, self.protection_carrying)
    }

    pub fn wavelength_cell(&self) -> String {
        bracketed(self.wavelengths, self.brs_extra)
    }

    /// `lightpaths | wavelengths | total | optical`, e.g. `143 (79) | 329 | 3628 | 987`.
    pub fn summary(&self) -> String {
        format!("{} | {} | {:.0} | {:.0}", self.lightpath_cell(), self.wavelength_cell(), self.total_cost, self.optical_cost)
    }
}

fn bracketed(n: usize, extra: Option<usize>) -> String {
    match extra {
        Some(e) => format!("{n} ({e})"),
        None => n.to_string(),
    }
}

/// (a - b) / b · 100.
pub fn relative_difference(a: f64, b: f64) -> f64 {
    (a - b) / b * 100.0
}

/// Signed, one decimal, e.g. `+6.9%`.
pub fn format_relative(pct: f64) -> String {
    let r = (pct * 10.0).round() / 10.0;
    if r > 0.0 {
        format!("+{r:.1}%")
    } else if r < 0.0 {
        format!("{r:.1}%")
    } else {
        "0.0%".into()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeRow {
    pub a: String,
    pub b: String,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub columns: Vec<ReportColumn>,
    /// Total-cost differences requested as (a, b) column pairs.
    pub relative: Vec<RelativeRow>,
}

impl Report {
    pub fn new(columns: Vec<ReportColumn>) -> Self {
        Report { columns, relative: Vec::new() }
    }

    /// Adds (A - B)/B for every ordered pair (column i, column j) given.
    pub fn with_relative(mut self, pairs: &[(usize, usize)]) -> Self {
        for &(i, j) in pairs {
            let (a, b) = (&self.columns[i], &self.columns[j]);
            self.relative.push(RelativeRow {
                a: a.label.clone(),
                b: b.label.clone(),
                percent: relative_difference(a.total_cost, b.total_cost),
            });
        }
        self
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Table => self.to_table(),
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Json => serde_json::to_string_pretty(self).expect("report serialises") + "\n",
        }
    }

    fn rows(&self) -> Vec<(&'static str, Vec<String>)> {
        let col = |f: &dyn Fn(&ReportColumn) -> String| self.columns.iter().map(f).collect::<Vec<_>>();
        vec![
            ("Transit traffic (Gbps)", col(&|c| format!("{:.1}", c.transit))),
            ("Lightpaths", col(&|c| c.lightpath_cell())),
            ("Wavelengths", col(&|c| c.wavelength_cell())),
            ("Total cost", col(&|c| format!("{:.0}", c.total_cost))),
            ("Optical layer cost", col(&|c| format!("{:.0}", c.optical_cost))),
        ]
    }

    pub fn to_table(&self) -> String {
        let rows = self.rows();
        let head = std::iter::once("").chain(self.columns.iter().map(|c| c.label.as_str()));
        let mut widths: Vec<usize> = head.clone().map(str::len).collect();
        for (name, cells) in &rows {
            widths[0] = widths[0].max(name.len());
            for (k, c) in cells.iter().enumerate() {
                widths[k + 1] = widths[k + 1].max(c.len());
            }
        }
        let line = |cells: Vec<&str>| -> String {
            let parts: Vec<String> = cells
                .iter()
                .enumerate()
                .map(|(k, c)| if k == 0 { format!("{c:<w$}", w = widths[0]) } else { format!("{c:>w$}", w = widths[k]) })
                .collect();
            parts.join(" | ").trim_end().to_string()
        };
        let mut s = String::new();
        let _ = writeln!(s, "{}", line(head.collect()));
        let _ = writeln!(s, "{}", widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-"));
        for (name, cells) in &rows {
            let _ = writeln!(s, "{}", line(std::iter::once(*name).chain(cells.iter().map(String::as_str)).collect()));
        }
        for r in &self.relative {
            let _ = writeln!(s, "relative difference ({} - {}) / {}: {}", r.a, r.b, r.b, format_relative(r.percent));
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let opt = |o: Option<usize>| o.map(|v| v.to_string()).unwrap_or_default();
        let mut s = String::new();
        let _ = writeln!(s, "metric,{}", self.columns.iter().map(|c| csv_field(&c.label)).collect::<Vec<_>>().join(","));
        let rows: Vec<(&str, Box<dyn Fn(&ReportColumn) -> String>)> = vec![
            ("transit_gbps", Box::new(|c| format!("{:.1}", c.transit))),
            ("lightpaths", Box::new(|c| c.lightpaths.to_string())),
            ("protection_carrying", Box::new(move |c| opt(c.protection_carrying))),
            ("wavelengths", Box::new(|c| c.wavelengths.to_string())),
            ("brs_extra", Box::new(move |c| opt(c.brs_extra))),
            ("total_cost", Box::new(|c| format!("{:.0}", c.total_cost))),
            ("optical_cost", Box::new(|c| format!("{:.0}", c.optical_cost))),
        ];
        for (name, f) in rows {
            let _ = writeln!(s, "{name},{}", self.columns.iter().map(|c| f(c)).collect::<Vec<_>>().join(","));
        }
        for r in &self.relative {
            let _ = writeln!(s, "relative_difference_pct,{},{},{:.1}", csv_field(&r.a), csv_field(&r.b), r.percent);
        }
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
