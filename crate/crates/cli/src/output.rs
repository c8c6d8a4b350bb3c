//! CSV tables and run manifests, written atomically.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

/// A header plus rows of already formatted cells.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_bytes(&self) -> std::io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }
}

/// Shorthand for a cell.
pub fn cell(x: impl ToString) -> String {
    x.to_string()
}

/// Run provenance echoed next to the CSV.
pub struct Manifest {
    pub subcommand: &'static str,
    pub config: Value,
    pub master_seed: u64,
    pub seed_rule: &'static str,
    pub workers: usize,
    pub wall_time_s: f64,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.jsonl")
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(format!(".tmp{}", std::process::id()));
    path.with_file_name(name)
}

fn write_temp(path: &Path, bytes: &[u8]) -> std::io::Result<PathBuf> {
    let tmp = temp_path(path);
    let res = fs::File::create(&tmp).and_then(|mut f| {
        f.write_all(bytes)?;
        f.sync_all()
    });
    match res {
        Ok(()) => Ok(tmp),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

/// Writes the table to `out` and the manifest beside it. Both go through
/// temporary files and are renamed only once both are complete.
pub fn emit(out: &Path, table: &Table, manifest: &Manifest) -> std::io::Result<()> {
    let mpath = manifest_path(out);
    let run = json!({
        "kind": "run",
        "subcommand": manifest.subcommand,
        "output": out.display().to_string(),
        "rows": table.rows.len(),
        "columns": table.header,
        "config": manifest.config,
        "master_seed": manifest.master_seed,
        "seed_rule": manifest.seed_rule,
        "workers": manifest.workers,
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_s": manifest.wall_time_s,
    });
    let mut lines = serde_json::to_string(&run)?;
    lines.push('\n');

    let csv_tmp = write_temp(out, &table.to_bytes()?)?;
    let man_tmp = match write_temp(&mpath, lines.as_bytes()) {
        Ok(t) => t,
        Err(e) => {
            let _ = fs::remove_file(&csv_tmp);
            return Err(e);
        }
    };
    if let Err(e) = fs::rename(&csv_tmp, out) {
        let _ = fs::remove_file(&csv_tmp);
        let _ = fs::remove_file(&man_tmp);
        return Err(e);
    }
    fs::rename(&man_tmp, &mpath).inspect_err(|_| {
        let _ = fs::remove_file(&man_tmp);
    })
}
