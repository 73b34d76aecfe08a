//! `report`: cost, balance and cluster-size panels plus a text table.

use std::collections::BTreeSet;
use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use faircap::metrics::{size_dispersion, RunRecord};
use serde_json::Value;

use crate::exit::{CliError, CliResult};
use crate::svg::{color, escape, nice_ticks, Frame, Svg};
use crate::sweep::{status_name, RecordLine, RECORDS_FILE};

pub const COST_FILE: &str = "cost.svg";
pub const BALANCE_FILE: &str = "balance.svg";
pub const SIZES_FILE: &str = "sizes.svg";
pub const TABLE_FILE: &str = "report.txt";

/// Dash pattern of the threshold and capacity lines.
pub const DASHED: &str = "6 4";
/// Dash pattern of the dataset-balance line.
pub const DOTTED: &str = "2 3";

/// The contents of one `records.jsonl`.
#[derive(Debug, Clone)]
pub struct RunFile {
    pub header: Value,
    pub records: Vec<RunRecord>,
}

impl RunFile {
    pub fn dataset_name(&self) -> String {
        self.header["dataset"]["name"].as_str().unwrap_or("dataset").to_string()
    }

    pub fn dataset_balance(&self) -> Option<f64> {
        self.header["dataset"]["balance"].as_f64()
    }

    /// Threshold from the header, else from the first record.
    pub fn threshold(&self) -> Option<f64> {
        self.header["t"]
            .as_str()
            .and_then(|t| t.parse::<faircap::Threshold>().ok())
            .or_else(|| self.records.first().map(|r| r.t))
            .map(|t| t.value())
    }
}

pub fn parse_run(text: &str) -> anyhow::Result<RunFile> {
    let mut header = Value::Null;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(line).with_context(|| format!("line {}", i + 1))?;
        if value["kind"] == "provenance" {
            header = value;
            continue;
        }
        let record: RecordLine =
            serde_json::from_value(value).with_context(|| format!("line {}", i + 1))?;
        records.push(record.record);
    }
    if records.is_empty() {
        bail!("no run records");
    }
    Ok(RunFile { header, records })
}

/// `records.jsonl` files under `input`: the file itself, `input/records.jsonl`,
/// or one per immediate subdirectory, in name order.
pub fn find_runs(input: &Path) -> anyhow::Result<Vec<PathBuf>> {
    if input.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    let direct = input.join(RECORDS_FILE);
    if direct.is_file() {
        return Ok(vec![direct]);
    }
    let mut found = Vec::new();
    let entries = fs::read_dir(input).with_context(|| format!("reading {}", input.display()))?;
    for entry in entries {
        let path = entry?.path().join(RECORDS_FILE);
        if path.is_file() {
            found.push(path);
        }
    }
    found.sort();
    if found.is_empty() {
        bail!("no {RECORDS_FILE} under {}", input.display());
    }
    Ok(found)
}

/// Writes the three panels and the table for every run under `input`.
/// Output goes next to each records file, or to `out/<dataset>` when given.
pub fn cmd_report(input: &Path, out: Option<&Path>) -> CliResult<Vec<PathBuf>> {
    let runs = find_runs(input).map_err(CliError::data)?;
    let mut written = Vec::new();
    for path in runs {
        let text = fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(CliError::data)?;
        let run = parse_run(&text)
            .with_context(|| format!("in {}", path.display()))
            .map_err(CliError::data)?;
        let dir = match out {
            Some(o) => o.join(run.dataset_name()),
            None => path.parent().map(Path::to_path_buf).unwrap_or_default(),
        };
        fs::create_dir_all(&dir)
            .with_context(|| format!("creating {}", dir.display()))
            .map_err(CliError::data)?;
        for (name, body) in [
            (COST_FILE, cost_chart(&run)),
            (BALANCE_FILE, balance_chart(&run)),
            (SIZES_FILE, sizes_chart(&run)),
            (TABLE_FILE, table(&run)),
        ] {
            let target = dir.join(name);
            fs::write(&target, body)
                .with_context(|| format!("writing {}", target.display()))
                .map_err(CliError::data)?;
            written.push(target);
        }
    }
    Ok(written)
}

fn methods(records: &[RunRecord]) -> Vec<String> {
    let mut seen = Vec::new();
    for r in records {
        if !seen.contains(&r.method) {
            seen.push(r.method.clone());
        }
    }
    seen
}

fn k_values(records: &[RunRecord]) -> Vec<usize> {
    records.iter().map(|r| r.k).collect::<BTreeSet<_>>().into_iter().collect()
}

fn k_range(records: &[RunRecord]) -> (f64, f64) {
    let ks = k_values(records);
    (ks[0] as f64, ks[ks.len() - 1] as f64)
}

/// One polyline plus markers per method over its successful runs.
fn line_series(svg: &mut Svg, frame: &Frame, run: &RunFile, value: impl Fn(&RunRecord) -> Option<f64>) {
    for method in methods(&run.records) {
        let points: Vec<(usize, f64)> = run
            .records
            .iter()
            .filter(|r| r.method == method)
            .filter_map(|r| value(r).map(|v| (r.k, v)))
            .collect();
        let stroke = color(&method);
        let coords: Vec<String> = points
            .iter()
            .map(|&(k, v)| format!("{:.2},{:.2}", frame.px(k as f64), frame.py(v)))
            .collect();
        let mut g = format!(r#"<g class="series" data-method="{}">"#, escape(&method));
        if coords.len() > 1 {
            let _ = write!(
                g,
                r#"<polyline fill="none" stroke="{stroke}" stroke-width="2" points="{}"/>"#,
                coords.join(" ")
            );
        }
        for &(k, v) in &points {
            let _ = write!(
                g,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{stroke}" data-k="{k}" data-value="{v}"/>"#,
                frame.px(k as f64),
                frame.py(v)
            );
        }
        g.push_str("</g>");
        svg.raw(&g);
    }
}

fn x_ticks(records: &[RunRecord]) -> Vec<(f64, String)> {
    k_values(records).into_iter().map(|k| (k as f64, k.to_string())).collect()
}

fn method_legend(records: &[RunRecord]) -> Vec<(String, &'static str, Option<&'static str>)> {
    methods(records)
        .into_iter()
        .map(|m| {
            let c = color(&m);
            (m, c, None)
        })
        .collect()
}

pub fn cost_chart(run: &RunFile) -> String {
    let top = run.records.iter().filter_map(|r| r.cost).fold(0.0, f64::max);
    let frame = Frame::new(k_range(&run.records), (0.0, top));
    let mut svg = Svg::new(&format!("{}: clustering cost", run.dataset_name()));
    svg.axes(&frame, &x_ticks(&run.records), &nice_ticks(0.0, top.max(1e-12), 5), "k", "cost");
    line_series(&mut svg, &frame, run, |r| r.cost);
    svg.legend(&method_legend(&run.records));
    svg.finish()
}

pub fn balance_chart(run: &RunFile) -> String {
    let frame = Frame::new(k_range(&run.records), (0.0, 1.0));
    let mut svg = Svg::new(&format!("{}: balance", run.dataset_name()));
    svg.axes(&frame, &x_ticks(&run.records), &nice_ticks(0.0, 1.0, 5), "k", "balance");
    let (x0, x1) = (frame.plot_left(), frame.plot_right());
    let mut legend = method_legend(&run.records);
    if let Some(t) = run.threshold() {
        svg.raw(&format!(
            r##"<line class="threshold" data-value="{t}" x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#000" stroke-dasharray="{DASHED}"/>"##,
            y = frame.py(t)
        ));
        legend.push((format!("threshold t = {t}"), "#000", Some(DASHED)));
    }
    if let Some(b) = run.dataset_balance() {
        svg.raw(&format!(
            r##"<line class="dataset-balance" data-value="{b}" x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#555" stroke-dasharray="{DOTTED}"/>"##,
            y = frame.py(b)
        ));
        legend.push((format!("dataset balance {b:.3}"), "#555", Some(DOTTED)));
    }
    line_series(&mut svg, &frame, run, |r| r.balance);
    svg.legend(&legend);
    svg.finish()
}

/// Box per (k, method): whiskers at min and max, box from q1 to q3, a bar at
/// the median. Dashed segments mark each distinct capacity within a k group.
pub fn sizes_chart(run: &RunFile) -> String {
    let ks = k_values(&run.records);
    let ms = methods(&run.records);
    let top = run
        .records
        .iter()
        .flat_map(|r| r.sizes.iter().copied().chain([r.q]))
        .max()
        .unwrap_or(1) as f64;
    let frame = Frame::new((-0.5, ks.len() as f64 - 0.5), (0.0, top));
    let mut svg = Svg::new(&format!("{}: cluster sizes", run.dataset_name()));
    let ticks: Vec<(f64, String)> = ks.iter().enumerate().map(|(i, k)| (i as f64, k.to_string())).collect();
    svg.axes(&frame, &ticks, &nice_ticks(0.0, top, 5), "k", "cluster size");

    let group = frame.px(1.0) - frame.px(0.0);
    let slot = group * 0.9 / ms.len() as f64;
    for (gi, &k) in ks.iter().enumerate() {
        let left = frame.px(gi as f64) - group * 0.45;
        let caps: BTreeSet<usize> = run.records.iter().filter(|r| r.k == k).map(|r| r.q).collect();
        for q in caps {
            svg.raw(&format!(
                r##"<line class="capacity" data-k="{k}" data-q="{q}" x1="{left:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#000" stroke-dasharray="{DASHED}"/>"##,
                left + group * 0.9,
                y = frame.py(q as f64)
            ));
        }
        for (mi, method) in ms.iter().enumerate() {
            let Some(record) = run.records.iter().find(|r| r.k == k && &r.method == method) else {
                continue;
            };
            let Some(s) = size_dispersion(&record.sizes) else {
                continue;
            };
            let cx = left + slot * (mi as f64 + 0.5);
            let half = slot * 0.35;
            let stroke = color(method);
            svg.raw(&format!(
                concat!(
                    r#"<g class="box" data-method="{m}" data-k="{k}" data-q="{q}" "#,
                    r#"data-min="{min}" data-q1="{q1}" data-median="{med}" data-q3="{q3}" data-max="{max}">"#,
                    r#"<line x1="{cx:.2}" y1="{ymin:.2}" x2="{cx:.2}" y2="{ymax:.2}" stroke="{c}"/>"#,
                    r#"<line x1="{l:.2}" y1="{ymin:.2}" x2="{r:.2}" y2="{ymin:.2}" stroke="{c}"/>"#,
                    r#"<line x1="{l:.2}" y1="{ymax:.2}" x2="{r:.2}" y2="{ymax:.2}" stroke="{c}"/>"#,
                    r#"<rect x="{l:.2}" y="{yq3:.2}" width="{w:.2}" height="{h:.2}" fill="{c}" fill-opacity="0.35" stroke="{c}"/>"#,
                    r#"<line x1="{l:.2}" y1="{ymed:.2}" x2="{r:.2}" y2="{ymed:.2}" stroke="{c}" stroke-width="2"/></g>"#
                ),
                m = escape(method),
                q = record.q,
                min = s.min,
                q1 = s.q1,
                med = s.median,
                q3 = s.q3,
                max = s.max,
                cx = cx,
                l = cx - half,
                r = cx + half,
                w = 2.0 * half,
                ymin = frame.py(s.min),
                ymax = frame.py(s.max),
                yq3 = frame.py(s.q3),
                h = (frame.py(s.q1) - frame.py(s.q3)).max(0.5),
                ymed = frame.py(s.median),
                c = stroke,
                k = k,
            ));
        }
    }
    let mut legend = method_legend(&run.records);
    legend.push(("capacity q".into(), "#000", Some(DASHED)));
    svg.legend(&legend);
    svg.finish()
}

pub fn table(run: &RunFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dataset: {}", run.dataset_name());
    if let Some(n) = run.header["dataset"]["n"].as_u64() {
        let _ = writeln!(out, "rows: {n}");
    }
    if let Some(b) = run.dataset_balance() {
        let _ = writeln!(out, "dataset balance: {b:.3}");
    }
    if let Some(t) = run.threshold() {
        let _ = writeln!(out, "threshold t: {t}");
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<24} {:>3} {:<10} {:>12} {:>7} {:>5} {:>6} {:>7} {:>6} {:>6}",
        "method", "k", "status", "cost", "balance", "q", "min", "median", "max", "<=q"
    );
    for r in &run.records {
        let spread = size_dispersion(&r.sizes);
        let fmt = |x: Option<f64>, p: usize| x.map_or("-".to_string(), |v| format!("{v:.p$}"));
        let within = r.max_size().map_or("-", |m| if m <= r.q { "yes" } else { "no" });
        let _ = writeln!(
            out,
            "{:<24} {:>3} {:<10} {:>12} {:>7} {:>5} {:>6} {:>7} {:>6} {:>6}",
            r.method,
            r.k,
            status_name(r.status),
            fmt(r.cost, 3),
            fmt(r.balance, 3),
            r.q,
            fmt(spread.map(|s| s.min), 0),
            fmt(spread.map(|s| s.median), 1),
            fmt(spread.map(|s| s.max), 0),
            within
        );
    }
    let failed: Vec<&RunRecord> = run.records.iter().filter(|r| !r.is_ok()).collect();
    if !failed.is_empty() {
        let _ = writeln!(out, "\nfailed runs:");
        for r in failed {
            let _ = writeln!(
                out,
                "  {} k={}: {}",
                r.method,
                r.k,
                r.message.as_deref().unwrap_or("")
            );
        }
    }
    out
}

/// Reads the `data-*` attributes of every `<g class="box">` in a sizes panel.
pub fn box_values(svg: &str) -> Vec<(String, usize, [f64; 5])> {
    let attr = |tag: &str, name: &str| -> Option<String> {
        let key = format!(r#"{name}=""#);
        let start = tag.find(&key)? + key.len();
        let end = tag[start..].find('"')? + start;
        Some(tag[start..end].to_string())
    };
    svg.split(r#"<g class="box" "#)
        .skip(1)
        .filter_map(|tag| {
            let tag = &tag[..tag.find('>')?];
            let num = |n: &str| attr(tag, n)?.parse::<f64>().ok();
            Some((
                attr(tag, "data-method")?,
                attr(tag, "data-k")?.parse().ok()?,
                [num("data-min")?, num("data-q1")?, num("data-median")?, num("data-q3")?, num("data-max")?],
            ))
        })
        .collect()
}
