//! CSV emission: one `#` line of JSON metadata, a header row, then data.

use std::path::Path;

use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::AppError;
use crate::sweep::{Column, Sweep, SweepRow};

pub const NAN: &str = "nan";

/// Shortest decimal that parses back to the same `f64`.
pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        NAN.to_string()
    } else {
        format!("{x:?}")
    }
}

/// Metadata object written on the first line of every CSV.
pub fn metadata(cfg: &RunConfig, sweep: &Sweep, extra: Option<Value>) -> Value {
    let nan: Vec<Value> = sweep
        .nan_notes
        .iter()
        .map(|n| {
            json!({
                "column": n.column.name(),
                "count": n.count,
                "first_t": n.first_t,
                "reason": n.reason,
            })
        })
        .collect();
    let mut meta = json!({
        "artifact": "qslbattery",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg.to_json(),
        "regime": sweep.regime.name(),
        "notes": {
            "bures_variant": match cfg.bures_variant {
                qslbattery_core::qsl::BuresVariant::Standard => "standard: Bures angle arccos(sqrt F)",
                qslbattery_core::qsl::BuresVariant::AsPrinted => "as_printed: Bures angle arccos(F)",
            },
            "relpurity_mode": cfg.relpurity_mode.name(),
            "eq4_general": "denominator is the time average of ||L_t(rho_t)||_hs",
            "coherent_ergotropy": {
                "route": "spectral",
                "max_dev_closed_form_minus": sweep.eq18_minus_dev,
                "max_dev_closed_form_plus": sweep.eq18_plus_dev,
                "printed_plus_sign_matches": sweep.eq18_plus_dev <= 1e-9,
            },
        },
        "stationary": sweep.stationary,
        "singular_integrand": sweep.singular_integrand,
        "nan_columns": nan,
    });
    if let (Some(Value::Object(extra)), Value::Object(m)) = (extra, &mut meta) {
        m.extend(extra);
    }
    meta
}

pub fn render_csv(meta: &Value, columns: &[Column], rows: &[SweepRow]) -> Result<Vec<u8>, csv::Error> {
    let mut buf = Vec::new();
    buf.push(b'#');
    buf.extend(meta.to_string().into_bytes());
    buf.push(b'\n');
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(buf);
    w.write_record(columns.iter().map(|c| c.name()))?;
    for r in rows {
        w.write_record(columns.iter().map(|&c| format_value(r.get(c))))?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// Writes the CSV and checks it before returning.
pub fn write_csv(
    path: &Path,
    meta: &Value,
    columns: &[Column],
    rows: &[SweepRow],
    nan_allowed: &[Column],
) -> Result<(), AppError> {
    let bytes = render_csv(meta, columns, rows)
        .map_err(|e| AppError::io(path, std::io::Error::other(e)))?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    }
    std::fs::write(path, &bytes).map_err(|e| AppError::io(path, e))?;
    validate_csv(path, columns, nan_allowed)
}

/// Re-reads a written CSV: metadata line, header, strictly increasing `t`,
/// every field finite or `nan` in a column with a recorded reason.
pub fn validate_csv(path: &Path, columns: &[Column], nan_allowed: &[Column]) -> Result<(), AppError> {
    let fail = |reason: String| AppError::Validation { path: path.to_path_buf(), reason };
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    if text.contains('\r') {
        return Err(fail("contains CR line endings".into()));
    }
    let (first, body) = text.split_once('\n').ok_or_else(|| fail("no metadata line".into()))?;
    let meta = first.strip_prefix('#').ok_or_else(|| fail("first line is not a # comment".into()))?;
    if !matches!(serde_json::from_str::<Value>(meta), Ok(Value::Object(_))) {
        return Err(fail("metadata line is not a JSON object".into()));
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let header = reader.headers().map_err(|e| fail(e.to_string()))?.clone();
    let names: Vec<&str> = columns.iter().map(|c| c.name()).collect();
    if header.iter().ne(names.iter().copied()) {
        return Err(fail(format!("header {:?} does not match {:?}", header, names)));
    }
    let t_col = columns.iter().position(|&c| c == Column::T);
    let mut last_t = f64::NEG_INFINITY;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| fail(e.to_string()))?;
        for (field, &c) in record.iter().zip(columns) {
            let v: f64 = field
                .parse()
                .map_err(|_| fail(format!("row {line}: {} = {field:?} is not a number", c.name())))?;
            if field == NAN {
                if !nan_allowed.contains(&c) {
                    return Err(fail(format!("row {line}: {} is nan without a reason", c.name())));
                }
            } else if !v.is_finite() {
                return Err(fail(format!("row {line}: {} = {field} is not finite", c.name())));
            }
        }
        if let Some(i) = t_col {
            let t: f64 = record[i].parse().unwrap_or(f64::NAN);
            if !(t > last_t) {
                return Err(fail(format!("row {line}: t = {t} does not increase")));
            }
            last_t = t;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 2.5e17, -0.0, 1.107815593781921, f64::MIN_POSITIVE] {
            let s = format_value(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(format_value(0.1), "0.1");
        assert_eq!(format_value(f64::NAN), "nan");
    }

    fn rows() -> Vec<SweepRow> {
        (0..4).map(|k| SweepRow { t: k as f64 * 0.5, w: 0.25, p_avg: f64::NAN, ..Default::default() }).collect()
    }

    #[test]
    fn render_and_validate() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let cols = [Column::T, Column::W, Column::PAvg];
        write_csv(&path, &json!({"a": 1}), &cols, &rows(), &[Column::PAvg]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], r#"#{"a":1}"#);
        assert_eq!(lines[1], "t,w,p_avg");
        assert_eq!(lines[2], "0.0,0.25,nan");
        assert_eq!(lines.len(), 6);
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn validation_rejects_unexplained_nan_and_disorder() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        let cols = [Column::T, Column::W, Column::PAvg];
        let e = write_csv(&path, &json!({}), &cols, &rows(), &[]).unwrap_err();
        assert!(matches!(e, AppError::Validation { .. }));
        assert_eq!(e.exit_code(), 2);

        let mut r = rows();
        r.swap(1, 2);
        let e = write_csv(&path, &json!({}), &cols, &r, &[Column::PAvg]).unwrap_err();
        assert!(e.to_string().contains("does not increase"));

        let mut r = rows();
        r[1].w = f64::INFINITY;
        assert!(write_csv(&path, &json!({}), &cols, &r, &[Column::PAvg]).is_err());
    }
}
