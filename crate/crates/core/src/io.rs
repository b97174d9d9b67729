//! CSV and JSON files, run manifests and the `key=value` config format.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::density::{DensityProvider, Provenance, UniformDensity};
use crate::error::{Error, Result};
use crate::one_site::{GridOneSiteDensity, OneSiteDensity};
use crate::quad::Grid1D;
use crate::sim::{stats_to_density, SimStats};
use crate::two_site::{assemble_ansatz, AnsatzSolution, Grid2D, TwoSiteDensity};

pub const VERSION: &str = concat!("bslab-", env!("CARGO_PKG_VERSION"));

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|&v| fmt_f64(v)).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| Error::Parse("empty CSV".into()))?
            .split(',')
            .map(|h| h.trim().to_string())
            .collect();
        let rows = lines
            .enumerate()
            .map(|(k, l)| {
                let row = l
                    .split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<f64>()
                            .map_err(|e| Error::Parse(format!("row {}: bad number `{c}`: {e}", k + 1)))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                if row.len() != header.len() {
                    return Err(Error::Parse(format!(
                        "row {} has {} fields, header has {}",
                        k + 1,
                        row.len(),
                        header.len()
                    )));
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { header, rows })
    }

    pub fn expect_header(&self, expected: &[&str]) -> Result<()> {
        if self.header.iter().map(String::as_str).eq(expected.iter().copied()) {
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "expected columns `{}`, found `{}`",
                expected.join(","),
                self.header.join(",")
            )))
        }
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[k]).collect()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes to the file `target`, or to stdout when `target` is `-`.
/// Returns the path when a file was written.
pub fn write_output(target: &str, bytes: &[u8]) -> Result<Option<PathBuf>> {
    if target == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(bytes)?;
        out.flush()?;
        Ok(None)
    } else {
        let p = PathBuf::from(target);
        if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(&p, bytes)?;
        Ok(Some(p))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub duration_secs: f64,
    pub outputs: Vec<OutputDigest>,
}

impl RunManifest {
    pub fn digest_files(paths: &[PathBuf]) -> Result<Vec<OutputDigest>> {
        paths
            .iter()
            .map(|p| {
                Ok(OutputDigest {
                    path: p.display().to_string(),
                    sha256: sha256_hex(&fs::read(p)?),
                })
            })
            .collect()
    }

    /// `<out>.manifest.json` next to the primary output.
    pub fn path_for(output: &Path) -> PathBuf {
        let mut s = output.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got `{line}`", k + 1)))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", k + 1)));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

/// Triangle of a two-site grid as `(u, v, q)` rows with `v ≤ u`.
pub fn q2_table(g: &Grid2D) -> CsvTable {
    let m = g.intervals();
    let mut t = CsvTable::new(&["u", "v", "q"]);
    for i in 0..=m {
        for j in 0..=i {
            t.push(vec![i as f64 / m as f64, j as f64 / m as f64, g.get(i, j)]);
        }
    }
    t
}

pub fn read_q2(table: &CsvTable) -> Result<Grid2D> {
    table.expect_header(&["u", "v", "q"])?;
    let rows = table.rows.len();
    // rows = (M+1)(M+2)/2
    let m = (((8 * rows + 1) as f64).sqrt() as usize - 1) / 2 - 1;
    if (m + 1) * (m + 2) / 2 != rows || m < 1 {
        return Err(Error::Parse(format!("{rows} rows do not form a triangular grid")));
    }
    let mut g = Grid2D::zeros(m);
    let mut seen = vec![false; rows];
    for r in &table.rows {
        let (i, j) = ((r[0] * m as f64).round() as usize, (r[1] * m as f64).round() as usize);
        if i > m || j > i {
            return Err(Error::Parse(format!("node ({}, {}) outside the triangle", r[0], r[1])));
        }
        seen[i * (i + 1) / 2 + j] = true;
        g.set(i, j, r[2]);
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Parse("triangle has missing nodes".into()));
    }
    Ok(g)
}

pub fn gab_table(sol: &AnsatzSolution) -> CsvTable {
    let m = sol.intervals();
    let mut t = CsvTable::new(&["x", "G", "A", "B"]);
    for i in 0..=m {
        t.push(vec![
            sol.g.node(i),
            sol.g.values()[i],
            sol.a.values()[i],
            sol.b.values()[i],
        ]);
    }
    t
}

pub fn read_gab(table: &CsvTable, n: usize) -> Result<AnsatzSolution> {
    table.expect_header(&["x", "G", "A", "B"])?;
    AnsatzSolution::from_tables(n, table.column(1), table.column(2), table.column(3))
}

/// Resolves a `--density` argument: `closed-form:one`, `uniform`, or a file
/// (`.json` simulation statistics, or a CSV with columns `u,v,q`,
/// `x,G,A,B` or `x,q`).
pub fn load_density(spec: &str, n: usize) -> Result<Box<dyn DensityProvider>> {
    match spec {
        "closed-form:one" => return Ok(Box::new(OneSiteDensity::new(n)?)),
        "uniform" => return Ok(Box::new(UniformDensity::new(n))),
        _ => {}
    }
    let text = fs::read_to_string(spec)?;
    if spec.ends_with(".json") {
        let stats: SimStats = serde_json::from_str(&text)?;
        if stats.n_species() != n {
            return Err(Error::Dimension {
                expected: n,
                got: stats.n_species(),
            });
        }
        return Ok(Box::new(stats_to_density(&stats)?));
    }
    let table = CsvTable::parse(&text)?;
    let header: Vec<&str> = table.header.iter().map(String::as_str).collect();
    match header.as_slice() {
        ["u", "v", "q"] => Ok(Box::new(TwoSiteDensity::new(n, read_q2(&table)?, Provenance::FixedPointGrid))),
        ["x", "G", "A", "B"] => Ok(Box::new(assemble_ansatz(&read_gab(&table, n)?)?)),
        ["x", "q", ..] => Ok(Box::new(GridOneSiteDensity::new(n, Grid1D::new(table.column(1))?))),
        _ => Err(Error::Parse(format!(
            "cannot tell what density `{spec}` holds from columns `{}`",
            table.header.join(",")
        ))),
    }
}
