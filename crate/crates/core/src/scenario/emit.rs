//! Writing result bundles to disk.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde_json::json;

use super::run::{Cell, ResultBundle, Table, WignerSnapshot};
use crate::error::{Error, Result};

/// 17 significant digits, round-trip exact.
pub fn format_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn table_csv(table: &Table) -> String {
    let mut out = String::new();
    let header: Vec<String> = table.columns.iter().map(|c| csv_field(c)).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Num(x) => format_num(*x),
                Cell::Text(s) => csv_field(s),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Long format: one `x,p,W` row per grid point, x outermost.
pub fn wigner_csv(w: &WignerSnapshot) -> String {
    let g = &w.grid;
    let mut out = String::with_capacity(g.xs.len() * g.ps.len() * 72);
    out.push_str("x,p,W\n");
    for (i, &x) in g.xs.iter().enumerate() {
        for (j, &p) in g.ps.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", format_num(x), format_num(p), format_num(g.values[(i, j)]));
        }
    }
    out
}

/// Write through a sibling temp file and rename it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let res = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = res {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

fn wigner_file_name(w: &WignerSnapshot) -> String {
    format!("{}_t{:.4}.csv", w.measurement, w.time)
}

/// Write the results table, Wigner snapshots and metadata into `dir`.
/// Returns the written paths, metadata last.
pub fn emit(bundle: &ResultBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    let out = &bundle.scenario.output;
    let mut written = Vec::new();

    let results = dir.join(&out.results);
    write_atomic(&results, table_csv(&bundle.table).as_bytes())?;
    written.push(results);

    let mut wigner_files = Vec::new();
    for w in &bundle.wigners {
        let name = wigner_file_name(w);
        let path = dir.join(&name);
        write_atomic(&path, wigner_csv(w).as_bytes())?;
        wigner_files.push(json!({
            "file": name,
            "measurement": w.measurement,
            "mode": w.mode,
            "time": w.time,
            "integral": w.grid.integral(),
            "imag_residue": w.grid.imag_residue,
        }));
        written.push(path);
    }

    let meta = json!({
        "scenario": bundle.scenario.name,
        "description": bundle.scenario.description,
        "timestamp": chrono::Utc::now().to_rfc3339(),
        "version": env!("CARGO_PKG_VERSION"),
        "wall_seconds": bundle.wall_seconds,
        "t2": bundle.diagnostics.t2,
        "columns": bundle.table.columns,
        "results": out.results,
        "wigner": wigner_files,
        "diagnostics": bundle.diagnostics,
        "config": bundle.scenario.to_json(),
    });
    let text = serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n";
    let path = dir.join(&out.metadata);
    write_atomic(&path, text.as_bytes())?;
    written.push(path);
    Ok(written)
}
