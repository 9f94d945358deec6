//! Writers for JSON records and CSV grids.

use crate::config::{RunConfig, SCHEMA_VERSION};
use crate::Failure;
use latprop::lattice::{LatticeSpec, SiteIndex};
use latprop::C64;
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

/// 17 significant digits, enough to round-trip any f64.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::usage(format!("cannot write {}: {e}", path.display()))
}

/// Writes `bytes` to `path`, creating missing parent directories.
pub fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_failure(path, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| io_failure(path, e))
}

/// Record header shared by every command.
pub fn header(command: &str, spec: &LatticeSpec) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m.insert("lattice".into(), json!(spec.kind.name()));
    m.insert("delta".into(), json!(spec.delta));
    m.insert("e1".into(), json!(spec.e1));
    m.insert("e2".into(), json!(spec.e2));
    m
}

pub fn site_json(s: &SiteIndex) -> Value {
    json!({ "n1": s.n1, "n2": s.n2, "sublattice": s.sublattice_label() })
}

pub fn complex_json(v: C64) -> Value {
    json!({ "re": v.re, "im": v.im })
}

/// Pretty JSON to --output or standard output.
pub fn emit(cfg: &RunConfig, value: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("record serializes");
    match &cfg.output {
        Some(p) => {
            let path = PathBuf::from(p);
            write_file(&path, text + "\n")
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// One JSON document per line.
pub fn emit_lines(cfg: &RunConfig, lines: &[Value]) -> Result<(), Failure> {
    let mut text = String::new();
    for l in lines {
        text.push_str(&serde_json::to_string(l).expect("record serializes"));
        text.push('\n');
    }
    match &cfg.output {
        Some(p) => {
            let path = PathBuf::from(p);
            write_file(&path, text)
        }
        None => {
            print!("{text}");
            std::io::stdout().flush().ok();
            Ok(())
        }
    }
}

/// CSV `n1,n2,sublattice,re,im,abs2` in the given row order.
pub fn grid_csv<W: Write>(out: W, rows: &[(SiteIndex, C64)]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n1", "n2", "sublattice", "re", "im", "abs2"])?;
    for (s, v) in rows {
        w.write_record([s.n1.to_string(), s.n2.to_string(), s.sublattice_label().to_string(), num(v.re), num(v.im), num(v.norm_sqr())])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        grid_csv(&mut buf, &[(SiteIndex::new(0, 0, None), C64::new(1.0, 0.0))]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n1,n2,sublattice,re,im,abs2\n0,0,,1.0000000000000000e0,"));
    }
}
