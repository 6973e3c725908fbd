use std::path::{Path, PathBuf};

use super::{ResultRecord, RunnerError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// `%.{digits}g`: shortest of fixed and scientific notation at the given
/// number of significant digits, trailing zeros removed. Locale independent.
pub fn format_g(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunnerError + '_ {
    move |source| RunnerError::Io { context: format!("writing {}", path.display()), source }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> RunnerError + '_ {
    move |e| RunnerError::Io { context: format!("writing {}", path.display()), source: e.into() }
}

/// Writes the record into `dir`. JSON gives one `<kind>.json`; CSV gives
/// `<kind>.csv` for the series (if any) and `<kind>_verdicts.csv`.
/// Attachments are written as-is in both formats.
pub fn write_outputs(record: &ResultRecord, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>, RunnerError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let stem = record.kind.name();
    let mut written = Vec::new();
    match format {
        OutputFormat::Json => {
            let path = dir.join(format!("{stem}.json"));
            let text = serde_json::to_string_pretty(record).expect("record serializes") + "\n";
            std::fs::write(&path, text).map_err(io_err(&path))?;
            written.push(path);
        }
        OutputFormat::Csv => {
            if let Some(series) = &record.series {
                let path = dir.join(format!("{stem}.csv"));
                let mut w = csv::Writer::from_path(&path).map_err(csv_err(&path))?;
                w.write_record(&series.columns).map_err(csv_err(&path))?;
                for r in 0..series.n_rows() {
                    w.write_record(series.data.iter().map(|col| format_g(col[r], 12))).map_err(csv_err(&path))?;
                }
                w.flush().map_err(io_err(&path))?;
                written.push(path);
            }
            let path = dir.join(format!("{stem}_verdicts.csv"));
            let mut w = csv::Writer::from_path(&path).map_err(csv_err(&path))?;
            w.write_record(["name", "passed", "value", "threshold", "threshold_name"]).map_err(csv_err(&path))?;
            for v in &record.verdicts {
                w.write_record([
                    v.name.clone(),
                    v.passed.to_string(),
                    format_g(v.value, 12),
                    format_g(v.threshold, 12),
                    v.threshold_name.to_string(),
                ])
                .map_err(csv_err(&path))?;
            }
            w.flush().map_err(io_err(&path))?;
            written.push(path);
        }
    }
    for (name, body) in &record.attachments {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_format_matches_printf() {
        let cases = [
            (0.5, "0.5"),
            (1.0, "1"),
            (-2.25, "-2.25"),
            (1.0 / 3.0, "0.333333333333"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (1e-5, "1e-05"),
            (0.0001234, "0.0001234"),
            (9.9999999999999, "10"),
            (0.0, "0"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g(x, 12), want, "{x}");
        }
    }
}
