//! Plain-text summaries of finished result directories.

use std::fmt::Write as _;
use std::path::Path;

use graphsr_core::{Error, Result};

const TABLES: [&str; 4] = [
    "node_vs_edge.csv",
    "simulated_sr.csv",
    "connectome_sr.csv",
    "sensitivity.csv",
];

/// Render one CSV as an aligned table.
fn render(name: &str, text: &str) -> String {
    let rows: Vec<Vec<&str>> = text
        .lines()
        .map(|line| line.split(',').collect())
        .collect();
    let cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut widths = vec![0usize; cols];
    for row in &rows {
        for (c, cell) in row.iter().enumerate() {
            widths[c] = widths[c].max(cell.len());
        }
    }
    let mut out = format!("== {name} ==\n");
    for row in &rows {
        for (c, cell) in row.iter().enumerate() {
            let _ = write!(out, "{cell:>width$}  ", width = widths[c]);
        }
        out.push('\n');
    }
    out.push('\n');
    out
}

/// Summarize every known result table under `dir`.
pub fn report(dir: &Path) -> Result<String> {
    let mut out = String::new();
    for table in TABLES {
        let path = dir.join(table);
        if !path.exists() {
            continue;
        }
        let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        out.push_str(&render(table, &text));
    }
    if out.is_empty() {
        return Err(Error::invalid(format!(
            "no result tables found in {}",
            dir.display()
        )));
    }
    Ok(out)
}
