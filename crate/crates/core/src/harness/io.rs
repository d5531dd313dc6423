//! CSV streams in, tidy CSV results out.
//!
//! Stream schema: header `index,p_value[,is_null]`, 1-based strictly
//! increasing `index`, `p_value` in `[0, 1]`, `is_null` in `{0, 1}`.
//! Result floats are written with 17 significant digits so they parse back
//! to the same bits.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::experiment::{CellResult, ResultsBundle};
use crate::error::{Error, Result};
use crate::simgen::LabeledStream;

/// Formats a float so that parsing it returns the same value.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn csv_err(line: u64, message: impl Into<String>) -> Error {
    Error::Csv { line, message: message.into() }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map(|p| p.line()).unwrap_or(0);
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => csv_err(line, format!("{other:?}")),
        }
    }
}

/// Reads a p-value stream in file order.
pub fn read_stream<R: Read>(reader: R) -> Result<LabeledStream> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let labeled = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["index", "p_value"] => false,
        ["index", "p_value", "is_null"] => true,
        other => {
            return Err(csv_err(1, format!("expected header index,p_value[,is_null], got {}", other.join(","))))
        }
    };
    let mut p_values = Vec::new();
    let mut labels = Vec::new();
    let mut last_index = 0u64;
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let index: u64 = rec[0].parse().map_err(|_| csv_err(line, format!("bad index {:?}", &rec[0])))?;
        if index == 0 || index <= last_index {
            return Err(csv_err(line, format!("index {index} is not 1-based strictly increasing")));
        }
        last_index = index;
        let p: f64 = rec[1].parse().map_err(|_| csv_err(line, format!("bad p_value {:?}", &rec[1])))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(csv_err(line, format!("p_value {p} outside [0, 1]")));
        }
        p_values.push(p);
        if labeled {
            labels.push(match &rec[2] {
                "1" => true,
                "0" => false,
                other => return Err(csv_err(line, format!("is_null must be 0 or 1, got {other:?}"))),
            });
        }
    }
    LabeledStream::new(p_values, labeled.then_some(labels))
}

pub fn ingest_csv(path: &Path) -> Result<LabeledStream> {
    read_stream(fs::File::open(path)?)
}

pub fn write_stream<W: Write>(stream: &LabeledStream, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    match &stream.labels {
        Some(labels) => {
            w.write_record(["index", "p_value", "is_null"])?;
            for (i, (p, l)) in stream.p_values.iter().zip(labels).enumerate() {
                w.write_record([(i + 1).to_string(), fmt_f64(*p), (*l as u8).to_string()])?;
            }
        }
        None => {
            w.write_record(["index", "p_value"])?;
            for (i, p) in stream.p_values.iter().enumerate() {
                w.write_record([(i + 1).to_string(), fmt_f64(*p)])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_stream_csv(stream: &LabeledStream, path: &Path) -> Result<()> {
    write_stream(stream, fs::File::create(path)?)
}

pub const SUMMARY_COLUMNS: [&str; 18] = [
    "cell",
    "algorithm",
    "schedule",
    "data",
    "status",
    "error",
    "trials",
    "mean_rejections",
    "power",
    "power_se",
    "fdr_final",
    "fdr_max",
    "supfd",
    "supfd_se",
    "fdx",
    "mfdr",
    "fraction_reached_rstar",
    "band_exceedance",
];

pub const PATH_COLUMNS: [&str; 12] = [
    "k",
    "mean_wealth",
    "mean_alpha",
    "mean_rejections",
    "fdr",
    "fdr_se",
    "supfd",
    "band",
    "fdp_q95",
    "mfdr",
    "mfdr_se",
    "power_final",
];

fn summary_row(c: &CellResult) -> Vec<String> {
    let mut row = vec![c.id.clone(), c.algorithm.clone(), c.schedule.clone(), c.data.clone()];
    match &c.outcome {
        Err(e) => {
            row.push("error".into());
            row.push(e.clone());
            row.resize(SUMMARY_COLUMNS.len(), String::new());
        }
        Ok(s) => {
            row.push("ok".into());
            row.push(String::new());
            row.push(s.trials.to_string());
            row.push(fmt_f64(s.mean_final_rejections));
            match &s.metrics {
                Some(m) => row.extend([
                    fmt_opt(m.power),
                    fmt_opt(m.power_se),
                    fmt_f64(m.fdr_final()),
                    fmt_f64(m.fdr_max()),
                    fmt_f64(m.supfd),
                    fmt_f64(m.supfd_se),
                    fmt_f64(m.fdx),
                    fmt_f64(m.mfdr_final()),
                    fmt_f64(m.fraction_reached_rstar),
                    fmt_f64(m.band_exceedance),
                ]),
                None => row.resize(SUMMARY_COLUMNS.len(), String::new()),
            }
        }
    }
    row
}

pub fn write_summary<W: Write>(bundle: &ResultsBundle, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SUMMARY_COLUMNS)?;
    for c in &bundle.cells {
        w.write_record(summary_row(c))?;
    }
    w.flush()?;
    Ok(())
}

/// Per-step means of one cell. Label-dependent columns are empty for unlabeled data.
pub fn write_paths<W: Write>(cell: &CellResult, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(PATH_COLUMNS)?;
    let Some(s) = cell.summary() else {
        w.flush()?;
        return Ok(());
    };
    for k in 0..s.paths.mean_wealth.len() {
        let mut row = vec![
            (k + 1).to_string(),
            fmt_f64(s.paths.mean_wealth[k]),
            fmt_f64(s.paths.mean_alpha[k]),
            fmt_f64(s.paths.mean_rejections[k]),
        ];
        match &s.metrics {
            Some(m) => row.extend([
                fmt_f64(m.fdr_path[k]),
                fmt_f64(m.fdr_se_path[k]),
                fmt_f64(m.supfd_path[k]),
                fmt_f64(m.band_path[k]),
                fmt_f64(m.fdp_q95_path[k]),
                fmt_f64(m.mfdr_path[k]),
                fmt_f64(m.mfdr_se_path[k]),
                if k + 1 == s.paths.mean_wealth.len() { fmt_opt(m.power) } else { String::new() },
            ]),
            None => row.resize(PATH_COLUMNS.len(), String::new()),
        }
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Replaces characters that are awkward in file names.
pub fn file_stem_for(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
        .collect()
}

/// Writes `summary.csv`, `paths/<cell>.csv` and `config.json` under `dir`.
pub fn emit_results(bundle: &ResultsBundle, dir: &Path) -> Result<()> {
    let paths = dir.join("paths");
    fs::create_dir_all(&paths)?;
    write_summary(bundle, fs::File::create(dir.join("summary.csv"))?)?;
    for c in &bundle.cells {
        write_paths(c, fs::File::create(paths.join(format!("{}.csv", file_stem_for(&c.id))))?)?;
    }
    let echo = serde_json::json!({
        "tool_version": bundle.tool_version,
        "config": bundle.config,
    });
    fs::write(dir.join("config.json"), serde_json::to_string_pretty(&echo)? + "\n")?;
    Ok(())
}

/// One parsed row of `summary.csv`; empty fields become `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub fields: Vec<(String, String)>,
}

impl SummaryRow {
    pub fn get(&self, column: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == column).map(|(_, v)| v.as_str()).filter(|v| !v.is_empty())
    }

    pub fn float(&self, column: &str) -> Option<f64> {
        self.get(column).and_then(|v| v.parse().ok())
    }
}

pub fn read_summary<R: Read>(reader: R) -> Result<Vec<SummaryRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    rdr.records()
        .map(|r| {
            let r = r?;
            Ok(SummaryRow { fields: header.iter().cloned().zip(r.iter().map(str::to_owned)).collect() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 6.02e23, 5e-324, 0.0, -2.5, f64::MAX] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(fmt_f64(f64::INFINITY).parse::<f64>().unwrap(), f64::INFINITY);
    }

    #[test]
    fn reads_unlabeled_and_labeled() {
        let s = read_stream("index,p_value\n1,0.5\n2,0.01\n3,1\n".as_bytes()).unwrap();
        assert_eq!(s.p_values, vec![0.5, 0.01, 1.0]);
        assert!(s.labels.is_none());
        let s = read_stream("index,p_value,is_null\n1,0.5,1\n2,0.01,0\n".as_bytes()).unwrap();
        assert_eq!(s.labels, Some(vec![true, false]));
    }

    #[test]
    fn reports_line_numbers() {
        let text = "index,p_value\n1,0.1\n2,0.1\n3,0.1\n4,0.1\n5,0.1\n6,1.5\n";
        match read_stream(text.as_bytes()) {
            Err(Error::Csv { line, message }) => {
                assert_eq!(line, 7);
                assert!(message.contains("1.5"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(read_stream("index,p_value\n1,x\n".as_bytes()), Err(Error::Csv { line: 2, .. })));
        assert!(matches!(read_stream("index,p_value\n2,0.1\n2,0.1\n".as_bytes()), Err(Error::Csv { line: 3, .. })));
        assert!(matches!(read_stream("index,pval\n".as_bytes()), Err(Error::Csv { line: 1, .. })));
        assert!(matches!(
            read_stream("index,p_value,is_null\n1,0.1,2\n".as_bytes()),
            Err(Error::Csv { line: 2, .. })
        ));
        assert!(matches!(read_stream("index,p_value\n1,0.1,3\n".as_bytes()), Err(Error::Csv { line: 2, .. })));
    }

    #[test]
    fn stream_round_trip() {
        let s = LabeledStream::new(vec![0.1, 1.0 / 3.0, 1e-300, 1.0], Some(vec![true, false, false, true])).unwrap();
        let mut buf = Vec::new();
        write_stream(&s, &mut buf).unwrap();
        assert_eq!(read_stream(buf.as_slice()).unwrap(), s);
    }

    #[test]
    fn file_stems_are_safe() {
        assert_eq!(file_stem_for("a b/c__d-0.5"), "a_b_c__d-0.5");
    }
}
