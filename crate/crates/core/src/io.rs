//! Small text-file helpers shared by the loaders and writers.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{BrightError, Result};

/// Formats a float with 10 significant digits, `%g` style.
///
/// Fixed notation is used for decimal exponents in `[-5, 10)`, scientific
/// otherwise; trailing zeros are trimmed. Negative zero prints as `0`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.9e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| BrightError::io(path, e))
}

/// Writes `contents` to `path` through a temporary sibling and a rename so
/// readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| BrightError::io(parent, e))?;
        }
    }
    let file_name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{file_name}.tmp"));
    {
        let mut f = fs::File::create(&tmp).map_err(|e| BrightError::io(&tmp, e))?;
        f.write_all(contents).map_err(|e| BrightError::io(&tmp, e))?;
        f.sync_all().map_err(|e| BrightError::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| BrightError::io(path, e))
}

/// Reads one identifier per non-empty line.
pub fn read_id_list(path: &Path) -> Result<Vec<String>> {
    let text = read_to_string(path)?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

pub fn write_id_list(path: &Path, ids: &[String]) -> Result<()> {
    let mut out = String::with_capacity(ids.len() * 8);
    for id in ids {
        out.push_str(id);
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Reads a whitespace-delimited column of reals (one value per line).
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = read_to_string(path)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| BrightError::parse(path, lineno + 1, format!("not a number: '{line}'")))?;
        out.push(v);
    }
    Ok(out)
}

pub fn write_vector(path: &Path, values: &[f64]) -> Result<()> {
    let mut out = String::with_capacity(values.len() * 14);
    for &v in values {
        out.push_str(&fmt_f64(v));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Reads an id column and a numeric column, both named in a tab-separated
/// header line. Duplicate ids are rejected.
pub fn read_keyed_column(path: &Path, id_column: &str, value_column: &str) -> Result<(Vec<String>, Vec<f64>)> {
    let text = read_to_string(path)?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| BrightError::parse(path, 1, "empty file"))?;
    let names: Vec<&str> = header.split('\t').map(str::trim).collect();
    let find = |name: &str| {
        names
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| BrightError::parse(path, 1, format!("missing column '{name}'")))
    };
    let (ic, vc) = (find(id_column)?, find(value_column)?);
    let mut seen = std::collections::HashSet::new();
    let (mut ids, mut values) = (Vec::new(), Vec::new());
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != names.len() {
            return Err(BrightError::parse(
                path,
                lineno + 1,
                format!("expected {} fields, found {}", names.len(), fields.len()),
            ));
        }
        let id = fields[ic];
        if !seen.insert(id.to_string()) {
            return Err(BrightError::DuplicateVariant(id.to_string()));
        }
        let v: f64 = fields[vc]
            .parse()
            .map_err(|_| BrightError::parse(path, lineno + 1, format!("not a number: '{}'", fields[vc])))?;
        ids.push(id.to_string());
        values.push(v);
    }
    Ok((ids, values))
}
