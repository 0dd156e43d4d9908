//! Scaling tables over the construction family.
//!
//! Raw columns (energy, largest sum multiplicity, rich counts) are exact
//! integers. Ratio columns divide them by a fractional power of `n` and are
//! rendered as decimal strings truncated to six significant digits, computed
//! with integer roots only.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::{construct, ConstructError};
use crate::convex::ConvexSet;
use crate::io::{read_set_file, read_text, set_to_json, to_json, write_text, FileError};
use crate::rational::Rational;
use crate::stats::{diff_stats, max_rep_sum_of};

const SIG_DIGITS: usize = 6;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    File(#[from] FileError),
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("m must be at least 1")]
    ZeroM,
    #[error("empty m list")]
    EmptyList,
}

/// `value / n^(p/q)` truncated to six significant digits.
pub fn ratio_decimal(value: &BigUint, n: u64, p: u32, q: u32) -> String {
    if value.is_zero() {
        return "0".to_string();
    }
    let numer = value.pow(q);
    let denom = BigUint::from(n).pow(p);
    let ten = BigUint::from(10u32);
    // floor(x * 10^k) = floor((value^q * 10^(qk) / n^p)^(1/q))
    let scaled = |k: u32| (&numer * ten.pow(q * k) / &denom).nth_root(q);
    let mut k = 0u32;
    let mut digits = scaled(0);
    while digits.to_string().len() < SIG_DIGITS {
        k += 1;
        digits = scaled(k);
    }
    let mut s = digits.to_string();
    let k = k as usize;
    if k > 0 {
        if s.len() <= k {
            s = format!("{}{s}", "0".repeat(k + 1 - s.len()));
        }
        s.insert(s.len() - k, '.');
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RichEntry {
    pub t: u64,
    pub count: u64,
    /// `count * t^3 / n^3`
    pub ratio: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub m: u64,
    pub n: u64,
    pub delta: Rational,
    /// Dilation factor taking the construction to integers.
    pub scale: String,
    /// The popular difference after dilation.
    pub d: Rational,
    /// Path of the set file, relative to the JSON report.
    #[serde(default)]
    pub set_file: String,
    pub energy: String,
    /// `E(A) / n^(5/2)`
    pub energy_ratio: String,
    pub max_sum_rep: u64,
    pub max_sum_at: Rational,
    /// `max_C r_{A+A}(C) / n^(2/3)`
    pub sum_ratio: String,
    pub rich_counts: Vec<RichEntry>,
}

/// Even thresholds up to `m`, plus `m` itself so the top row is always present.
pub fn default_thresholds(m: u64) -> Vec<u64> {
    let mut ts: Vec<u64> = (1..=m / 2).map(|i| 2 * i).collect();
    if m % 2 == 1 {
        ts.push(m);
    }
    ts
}

/// The measured columns of a row for the given set.
struct Measured {
    n: u64,
    energy: u128,
    max_sum_rep: u64,
    max_sum_at: Rational,
    rich: Vec<(u64, u64)>,
    popular: u64,
}

fn measure(set: &ConvexSet, d: &Rational, thresholds: &[u64]) -> Measured {
    let stats = diff_stats(set);
    let (max_sum_at, max_sum_rep) = max_rep_sum_of(set.elements()).expect("non-empty set");
    let rich = thresholds
        .iter()
        .map(|&t| (t, stats.rich_count(t).expect("thresholds are positive")))
        .collect();
    Measured {
        n: set.len() as u64,
        energy: stats.energy,
        max_sum_rep,
        max_sum_at,
        rich,
        popular: stats.rep(d),
    }
}

/// Builds the default construction for `m`, dilated to integers, and its row.
pub fn scaling_row(m: u64) -> Result<(ScalingRow, ConvexSet), ReportError> {
    if m == 0 {
        return Err(ReportError::ZeroM);
    }
    let built = construct(m, None)?;
    let (set, scale) = built.set.dilate_to_integers();
    let d = &built.d * &Rational::from(scale.clone());
    let measured = measure(&set, &d, &default_thresholds(m));
    let n = measured.n;
    let rich_counts = measured
        .rich
        .iter()
        .map(|&(t, count)| RichEntry {
            t,
            count,
            ratio: ratio_decimal(&(BigUint::from(count) * BigUint::from(t).pow(3)), n, 3, 1),
        })
        .collect();
    let row = ScalingRow {
        m,
        n,
        delta: built.delta,
        scale: scale.to_string(),
        d,
        set_file: String::new(),
        energy: measured.energy.to_string(),
        energy_ratio: ratio_decimal(&BigUint::from(measured.energy), n, 5, 2),
        max_sum_rep: measured.max_sum_rep,
        max_sum_at: measured.max_sum_at,
        sum_ratio: ratio_decimal(&BigUint::from(measured.max_sum_rep), n, 2, 3),
        rich_counts,
    };
    Ok((row, set))
}

/// One row per distinct `m`, in increasing order of `m`.
pub fn scaling_report(m_list: &[u64]) -> Result<Vec<(ScalingRow, ConvexSet)>, ReportError> {
    if m_list.is_empty() {
        return Err(ReportError::EmptyList);
    }
    let mut ms = m_list.to_vec();
    ms.sort_unstable();
    ms.dedup();
    ms.par_iter().map(|&m| scaling_row(m)).collect()
}

pub const CSV_HEADER: &str = "m,n,energy,energy_ratio,max_sum_rep,sum_ratio,rich_t,rich_count";

pub fn to_csv(rows: &[ScalingRow]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        for rich in &row.rich_counts {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                row.m,
                row.n,
                row.energy,
                row.energy_ratio,
                row.max_sum_rep,
                row.sum_ratio,
                rich.t,
                rich.count
            )
            .unwrap();
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportIndex {
    pub csv: String,
    pub rows: Vec<ScalingRow>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WrittenReport {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub set_dir: PathBuf,
    pub index: ReportIndex,
}

/// Writes `out` (CSV), a sibling `.json` index and one set file per row in a
/// `<stem>_sets/` directory next to them.
pub fn write_report(m_list: &[u64], out: &Path) -> Result<WrittenReport, ReportError> {
    let rows = scaling_report(m_list)?;
    let dir = out.parent().map(Path::to_path_buf).unwrap_or_default();
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".to_string());
    let set_dir_name = format!("{stem}_sets");
    let set_dir = dir.join(&set_dir_name);
    let json = if out.extension().is_some_and(|e| e == "json") {
        out.with_extension("index.json")
    } else {
        out.with_extension("json")
    };

    let mut index_rows = Vec::with_capacity(rows.len());
    for (mut row, set) in rows {
        let name = format!("m{}.json", row.m);
        write_text(&set_dir.join(&name), &set_to_json(&set))?;
        row.set_file = format!("{set_dir_name}/{name}");
        index_rows.push(row);
    }
    write_text(out, &to_csv(&index_rows))?;
    let index = ReportIndex {
        csv: out
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        rows: index_rows,
    };
    write_text(&json, &to_json(&index))?;
    Ok(WrittenReport {
        csv: out.to_path_buf(),
        json,
        set_dir,
        index,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecheckRow {
    pub m: u64,
    pub set_file: String,
    pub ok: bool,
    pub mismatches: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecheckReport {
    pub ok: bool,
    pub rows: Vec<RecheckRow>,
}

/// Re-derives every integer column of a written report from its set files.
pub fn recheck(json: &Path) -> Result<RecheckReport, ReportError> {
    let text = read_text(json)?;
    let index: ReportIndex = serde_json::from_str(&text).map_err(|source| ReportError::Json {
        path: json.to_path_buf(),
        source,
    })?;
    let base = json.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut rows = Vec::with_capacity(index.rows.len());
    for row in &index.rows {
        let set = read_set_file(&base.join(&row.set_file))?;
        let thresholds: Vec<u64> = row.rich_counts.iter().map(|r| r.t).collect();
        let got = measure(&set, &row.d, &thresholds);
        let mut mismatches = Vec::new();
        let mut check = |what: &str, recorded: String, actual: String| {
            if recorded != actual {
                mismatches.push(format!("{what}: recorded {recorded}, recomputed {actual}"));
            }
        };
        check("n", row.n.to_string(), got.n.to_string());
        check("n = 2m", (2 * row.m).to_string(), got.n.to_string());
        check("energy", row.energy.clone(), got.energy.to_string());
        check(
            "max_sum_rep",
            row.max_sum_rep.to_string(),
            got.max_sum_rep.to_string(),
        );
        check(
            "max_sum_at",
            row.max_sum_at.to_string(),
            got.max_sum_at.to_string(),
        );
        check("r(d)", row.m.to_string(), got.popular.to_string());
        for (entry, (t, count)) in row.rich_counts.iter().zip(&got.rich) {
            check(
                &format!("rich_count(t={t})"),
                entry.count.to_string(),
                count.to_string(),
            );
        }
        if let Some((_, top)) = got.rich.iter().find(|(t, _)| *t == row.m) {
            check("rich_count(t=m)", "1".to_string(), top.to_string());
        }
        rows.push(RecheckRow {
            m: row.m,
            set_file: row.set_file.clone(),
            ok: mismatches.is_empty(),
            mismatches,
        });
    }
    Ok(RecheckReport {
        ok: rows.iter().all(|r| r.ok),
        rows,
    })
}
