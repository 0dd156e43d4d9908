//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed. Criterion 8 reruns 1-7 and compares the
//! artifacts byte for byte.

use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use convex_diff::construct::{construct, delta_bound, glue, ConstructError};
use convex_diff::io::set_to_json;
use convex_diff::oracle::{binomial, search, witnesses_of, SearchOptions};
use convex_diff::stats::diff_stats;
use convex_diff::{ConvexSet, Rational};

const BIN: &str = env!("CARGO_BIN_EXE_convex-diff");

struct Outcome {
    ok: bool,
    detail: String,
    artifact: Vec<u8>,
}

fn outcome(failures: Vec<String>, summary: String, artifact: Vec<u8>) -> Outcome {
    let ok = failures.is_empty();
    let detail = if ok {
        summary
    } else {
        let shown: Vec<_> = failures.iter().take(5).cloned().collect();
        format!(
            "{summary}; {} failure(s): {}",
            failures.len(),
            shown.join(" | ")
        )
    };
    Outcome {
        ok,
        detail,
        artifact,
    }
}

fn within(budget: Duration, elapsed: Duration, failures: &mut Vec<String>) {
    if elapsed > budget {
        failures.push(format!("took {elapsed:.2?}, budget {budget:?}"));
    }
}

/// Ordered pairs `(a, b)` with `a - b = d`, by direct enumeration.
fn brute_rep<T: PartialEq + Clone>(elements: &[T], d: &T, sub: impl Fn(&T, &T) -> T) -> u64 {
    let mut count = 0;
    for a in elements {
        for b in elements {
            if sub(a, b) == *d {
                count += 1;
            }
        }
    }
    count
}

/// Positive differences of an integer set with ordered-pair multiplicities.
fn brute_histogram(elements: &[i64]) -> HashMap<i64, u64> {
    let mut hist = HashMap::new();
    for a in elements {
        for b in elements {
            if a > b {
                *hist.entry(a - b).or_insert(0) += 1;
            }
        }
    }
    hist
}

fn as_i64(set: &ConvexSet) -> Vec<i64> {
    set.elements()
        .iter()
        .map(|x| x.to_i64().expect("integral element"))
        .collect()
}

fn c1_construction() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut artifact = Vec::new();
    for m in 1..=200u64 {
        let built = match construct(m, None) {
            Ok(b) => b,
            Err(e) => {
                failures.push(format!("m={m}: {e}"));
                continue;
            }
        };
        if ConvexSet::validate(built.set.elements().to_vec()).is_err() {
            failures.push(format!("m={m}: not convex"));
        }
        if built.set.len() as u64 != 2 * m {
            failures.push(format!("m={m}: size {}", built.set.len()));
        }
        if built.d != *built.set.a(m as usize + 1) {
            failures.push(format!("m={m}: d is not a_(m+1)"));
        }
        // dilation is a bijection on pairs; count over the integer image
        let (dilated, scale) = built.set.dilate_to_integers();
        let ints = as_i64(&dilated);
        let d = (&built.d * &Rational::from(scale)).to_i64().unwrap();
        let r = brute_rep(&ints, &d, |a, b| a - b);
        if r != m {
            failures.push(format!("m={m}: r(d) = {r}"));
        }
        artifact.extend(set_to_json(&built.set).bytes());
    }
    within(Duration::from_secs(10), start.elapsed(), &mut failures);
    let summary = format!("m=1..200, |A|=2m, convex, r(d)=m ({:.2?})", start.elapsed());
    outcome(failures, summary, artifact)
}

fn c2_delta_sharpness() -> Outcome {
    let mut failures = Vec::new();
    let mut artifact = Vec::new();
    let micro = Rational::new(1, BigInt::from(10u32).pow(6));
    for m in 3..=50u64 {
        let bound = delta_bound(m).unwrap();
        if bound != Rational::new(1, BigInt::from(m - 2)) {
            failures.push(format!("m={m}: bound {bound}"));
        }
        match construct(m, Some(bound.clone())) {
            Err(ConstructError::DeltaTooLarge { .. }) => {}
            other => failures.push(format!("m={m}: boundary delta not rejected: {other:?}")),
        }
        let delta = &bound - &micro;
        match construct(m, Some(delta.clone())) {
            Ok(built) => {
                if ConvexSet::validate(built.set.elements().to_vec()).is_err() {
                    failures.push(format!("m={m}: accepted set not convex"));
                }
                // (2 + delta) - (1 + (m-1) delta) = 1 - (m-2) delta = (m-2)/10^6
                let expected = Rational::new(BigInt::from(m - 2), BigInt::from(10u32).pow(6));
                let margin = built.set.convexity_margin(m as usize + 1).unwrap();
                if !margin.is_positive() || margin != expected {
                    failures.push(format!("m={m}: margin {margin}, expected {expected}"));
                }
                artifact.extend(format!("{m}:{margin}\n").bytes());
            }
            Err(e) => failures.push(format!("m={m}: near-boundary delta rejected: {e}")),
        }
    }
    outcome(
        failures,
        "m=3..50, 1/(m-2) rejected, 1/(m-2)-1e-6 accepted with margin (m-2)e-6".into(),
        artifact,
    )
}

/// Strictly increasing `len`-tuples from `1..=max`, lexicographic.
fn naive_gap_sequences(len: usize, max: u64) -> Vec<Vec<u64>> {
    fn rec(prefix: &mut Vec<u64>, len: usize, max: u64, out: &mut Vec<Vec<u64>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        let lo = prefix.last().map_or(1, |&x| x + 1);
        for g in lo..=max {
            prefix.push(g);
            rec(prefix, len, max, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), len, max, &mut out);
    out
}

fn prefix(gaps: &[u64]) -> Vec<i64> {
    let mut out = vec![0i64];
    for &g in gaps {
        out.push(out.last().unwrap() + g as i64);
    }
    out
}

/// Naive witness list for `d`: all `(j, k)`, sorted by decreasing `k`.
fn naive_witnesses(elements: &[i64], d: i64) -> Vec<(usize, usize)> {
    let n = elements.len();
    let mut list = Vec::new();
    for j in 1..=n {
        for k in 1..=n - j {
            if elements[j + k - 1] - elements[j - 1] == d {
                list.push((j, k));
            }
        }
    }
    list.sort_by_key(|w| std::cmp::Reverse(w.1));
    list
}

fn structure_problems(list: &[(usize, usize)], n: usize) -> Option<String> {
    let t = list.len();
    for w in list.windows(2) {
        let ((j1, k1), (j2, k2)) = (w[0], w[1]);
        if k2 >= k1 {
            return Some(format!("k not strictly decreasing: {list:?}"));
        }
        if j2 < j1 + 2 {
            return Some(format!("j step below 2: {list:?}"));
        }
    }
    let mut ks: Vec<usize> = list.iter().map(|w| w.1).collect();
    ks.sort_unstable();
    ks.dedup();
    if ks.len() != t {
        return Some(format!("repeated k: {list:?}"));
    }
    let j_t = list.last()?.0;
    if j_t < 2 * t - 1 || j_t > n - 1 {
        return Some(format!(
            "j_t = {j_t} outside [2t-1, n-1] for t = {t}, n = {n}"
        ));
    }
    None
}

/// Criteria 3 and 4 share one exhaustive pass.
fn c3_c4_exhaustive() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut f3 = Vec::new();
    let mut f4 = Vec::new();
    let mut art3 = Vec::new();
    let mut art4 = Vec::new();
    let mut lists_checked = 0u64;
    let mut total_sets = 0u64;
    for n in 3..=8usize {
        let bound = n as u64 / 2;
        let report = match search(
            n,
            12,
            SearchOptions {
                attain: true,
                parallel: false,
            },
        ) {
            Ok(r) => r,
            Err(e) => {
                f3.push(format!("n={n}: {e}"));
                continue;
            }
        };
        let expected = binomial(12, n as u64 - 1);
        if report.sets_enumerated != expected || report.expected_sets != expected {
            f3.push(format!(
                "n={n}: visited {} of {expected}",
                report.sets_enumerated
            ));
        }
        if !report.violations.is_empty() || report.max_count_found > bound {
            f3.push(format!(
                "n={n}: {} violations, max {}",
                report.violations.len(),
                report.max_count_found
            ));
        }
        if !report.structure_failures.is_empty() {
            f4.push(format!(
                "n={n}: {} structure failures",
                report.structure_failures.len()
            ));
        }
        art3.extend(serde_json::to_vec(&report).unwrap());

        // independent pass: naive enumeration, pair-count histogram, naive witnesses
        let seqs = naive_gap_sequences(n - 1, 12);
        if seqs.len() as u64 != expected {
            f3.push(format!("n={n}: naive enumeration found {}", seqs.len()));
        }
        let mut naive_max = 0;
        let mut naive_lists = 0u64;
        for gaps in &seqs {
            total_sets += 1;
            let elements = prefix(gaps);
            let mut rich: Vec<(i64, u64)> = brute_histogram(&elements)
                .into_iter()
                .filter(|&(_, c)| c >= 2)
                .collect();
            rich.sort_unstable();
            for (d, count) in rich {
                naive_max = naive_max.max(count);
                if count > bound {
                    f3.push(format!("gaps {gaps:?}: r({d}) = {count} > {bound}"));
                }
                let list = naive_witnesses(&elements, d);
                if list.len() as u64 != count {
                    f4.push(format!(
                        "gaps {gaps:?}, d={d}: {} witnesses for r={count}",
                        list.len()
                    ));
                }
                if let Some(problem) = structure_problems(&list, n) {
                    f4.push(format!("gaps {gaps:?}, d={d}: {problem}"));
                }
                match witnesses_of(&elements, &d) {
                    Ok(lib) => {
                        let lib: Vec<(usize, usize)> = lib.iter().map(|w| (w.j, w.k)).collect();
                        if lib != list {
                            f4.push(format!(
                                "gaps {gaps:?}, d={d}: library {lib:?} vs naive {list:?}"
                            ));
                        }
                    }
                    Err(e) => f4.push(format!("gaps {gaps:?}, d={d}: {e}")),
                }
                naive_lists += 1;
                art4.extend(format!("{gaps:?}:{d}:{list:?}\n").bytes());
            }
        }
        lists_checked += naive_lists;
        if naive_lists != report.witness_lists_checked {
            f4.push(format!(
                "n={n}: search checked {} lists, naive pass {naive_lists}",
                report.witness_lists_checked
            ));
        }
        if naive_max.max(1) != report.max_count_found {
            f3.push(format!(
                "n={n}: naive max {naive_max} vs search {}",
                report.max_count_found
            ));
        }
        if n == 4 {
            let attained = report
                .extremal_witness
                .as_ref()
                .map(|g| g.as_slice().to_vec());
            let r3 = brute_histogram(&[0, 1, 3, 6]).get(&3).copied();
            if !report.attained || attained != Some(vec![1, 2, 3]) || r3 != Some(2) {
                f3.push(format!(
                    "n=4: attainment not confirmed ({attained:?}, r(3)={r3:?})"
                ));
            }
        }
    }
    within(Duration::from_secs(60), start.elapsed(), &mut f3);
    let s3 = format!(
        "n=3..8, gaps<=12: {total_sets} sets, none above floor(n/2), n=4 attained by gaps 1,2,3 ({:.2?})",
        start.elapsed()
    );
    let s4 = format!("{lists_checked} witness lists with count>=2, all structurally sound");
    (outcome(f3, s3, art3), outcome(f4, s4, art4))
}

/// Random convex set of size 1..=12 with rational elements.
fn random_convex(rng: &mut StdRng) -> ConvexSet {
    let n = rng.gen_range(1..=12usize);
    let den = rng.gen_range(1..=7i64);
    let mut gap_nums: Vec<i64> = Vec::new();
    let mut g = 0i64;
    for _ in 1..n {
        g += rng.gen_range(1..=9);
        gap_nums.push(g);
    }
    let mut x = Rational::new(rng.gen_range(-50..=50i64), rng.gen_range(1..=5i64));
    let mut elements = vec![x.clone()];
    for num in gap_nums {
        x = &x + &Rational::new(num, den);
        elements.push(x.clone());
    }
    ConvexSet::validate(elements).expect("strictly increasing gaps")
}

fn quadruple_energy(elements: &[Rational]) -> u128 {
    let mut count = 0u128;
    for a in elements {
        for b in elements {
            let lhs = a - b;
            for c in elements {
                for d in elements {
                    if lhs == c - d {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

fn c5_energy() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_e4e7);
    let mut failures = Vec::new();
    let mut artifact = Vec::new();
    for i in 0..100 {
        let set = random_convex(&mut rng);
        let via_r = diff_stats(&set).energy;
        let direct = quadruple_energy(set.elements());
        if via_r != direct {
            failures.push(format!(
                "set #{i} {set:?}: sum r^2 = {via_r}, quadruples = {direct}"
            ));
        }
        artifact.extend(format!("{set:?}:{via_r}\n").bytes());
    }
    outcome(
        failures,
        "100 random convex sets, n<=12: sum r^2 == quadruple count".into(),
        artifact,
    )
}

fn c6_glue() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut artifact = Vec::new();
    for (t, copies) in [(2u64, 2u64), (2, 4), (3, 3), (4, 5)] {
        let glued = match glue(t, copies) {
            Ok(g) => g,
            Err(e) => {
                failures.push(format!("({t},{copies}): {e}"));
                continue;
            }
        };
        if ConvexSet::validate(glued.set.elements().to_vec()).is_err() {
            failures.push(format!("({t},{copies}): not convex"));
        }
        if glued.set.len() as u64 != 2 * t * copies {
            failures.push(format!("({t},{copies}): size {}", glued.set.len()));
        }
        let (ints, _) = glued.set.dilate_to_integers();
        let hist = brute_histogram(&as_i64(&ints));
        let rich = hist.values().filter(|&&c| c >= t).count() as u64;
        if rich < copies {
            failures.push(format!("({t},{copies}): rich count {rich}"));
        }
        artifact.extend(set_to_json(&glued.set).bytes());
        artifact.extend(format!("rich={rich}\n").bytes());
    }
    within(Duration::from_secs(5), start.elapsed(), &mut failures);
    let summary = format!(
        "(t,copies) in (2,2),(2,4),(3,3),(4,5): convex, size 2tc, rich_count(t) >= copies ({:.2?})",
        start.elapsed()
    );
    outcome(failures, summary, artifact)
}

fn run_bin(args: &[&str]) -> (bool, String, String) {
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    (
        out.status.success(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn read_tree(dir: &Path) -> Vec<u8> {
    let mut entries: Vec<_> = walk(dir);
    entries.sort();
    let mut out = Vec::new();
    for path in entries {
        out.extend(path.strip_prefix(dir).unwrap().to_string_lossy().bytes());
        out.push(b'\n');
        out.extend(std::fs::read(&path).unwrap());
    }
    out
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            files.extend(walk(&path));
        } else {
            files.push(path);
        }
    }
    files
}

fn c7_report() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scaling.csv");
    let json = dir.path().join("scaling.json");
    let (ok, _, err) = run_bin(&[
        "report",
        "--m-list",
        "2,4,8,16,32,64",
        "--out",
        csv.to_str().unwrap(),
    ]);
    if !ok {
        failures.push(format!("report failed: {err}"));
        return outcome(failures, "report".into(), Vec::new());
    }
    let (ok, out, err) = run_bin(&["report", "--recheck", json.to_str().unwrap()]);
    if !ok {
        failures.push(format!("recheck failed: {err} {out}"));
    }
    let index: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let rows = index["rows"].as_array().cloned().unwrap_or_default();
    let ms: Vec<u64> = rows.iter().map(|r| r["m"].as_u64().unwrap()).collect();
    if ms != [2, 4, 8, 16, 32, 64] {
        failures.push(format!("rows for m = {ms:?}"));
    }
    for row in &rows {
        let m = row["m"].as_u64().unwrap();
        let top = row["rich_counts"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["t"].as_u64() == Some(m))
            .and_then(|r| r["count"].as_u64());
        if top != Some(1) {
            failures.push(format!("m={m}: rich_count(t=m) = {top:?}"));
        }
        for key in ["energy_ratio", "sum_ratio"] {
            if row[key].as_str().is_none_or(str::is_empty) {
                failures.push(format!("m={m}: missing {key}"));
            }
        }
    }
    let csv_text = std::fs::read_to_string(&csv).unwrap_or_default();
    if !csv_text.starts_with("m,n,energy,energy_ratio,max_sum_rep,sum_ratio,rich_t,rich_count\n") {
        failures.push("bad CSV header".into());
    }
    let artifact = read_tree(dir.path());
    let summary = format!(
        "report --m-list 2,4,8,16,32,64 rechecked from set files; rich_count(t=m) = 1 on every row ({:.2?})",
        start.elapsed()
    );
    outcome(failures, summary, artifact)
}

fn run_all() -> Vec<(&'static str, Outcome)> {
    let (c3, c4) = c3_c4_exhaustive();
    vec![
        ("C1 construction reproduces r(d) = m", c1_construction()),
        ("C2 delta bound is sharp", c2_delta_sharpness()),
        ("C3 exhaustive floor(n/2) bound", c3),
        ("C4 witness structure", c4),
        ("C5 energy oracle equivalence", c5_energy()),
        ("C6 gluing lower bound", c6_glue()),
        ("C7 scaling report", c7_report()),
    ]
}

fn main() -> ExitCode {
    let first = run_all();
    let mut all_ok = true;
    for (name, o) in &first {
        println!(
            "[{}] {name}: {}",
            if o.ok { "PASS" } else { "FAIL" },
            o.detail
        );
        all_ok &= o.ok;
    }
    let second = run_all();
    let differing: Vec<&str> = first
        .iter()
        .zip(&second)
        .filter(|((_, a), (_, b))| a.artifact != b.artifact || a.artifact.is_empty())
        .map(|((name, _), _)| *name)
        .collect();
    let det_ok = differing.is_empty();
    if det_ok {
        println!("[PASS] C8 determinism: criteria 1-7 rerun with byte-identical artifacts");
    } else {
        println!("[FAIL] C8 determinism: artifacts differ for {differing:?}");
    }
    all_ok &= det_ok;
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
