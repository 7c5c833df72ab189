//! CSV emission: UTF-8, LF line endings, fixed byte-exact headers, and
//! floats printed with 17 significant digits so every value round-trips
//! exactly.

use std::io::{self, Write};

use crate::experiments::{RunResult, SweepTable};
use crate::model::TimeSeries;

/// 17 significant digits: lossless for f64.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

struct CountingWriter<W: Write> {
    inner: W,
    bytes: u64,
}

impl<W: Write> Write for CountingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.bytes += n as u64;
        Ok(n)
    }
    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

fn write_comments<W: Write>(w: &mut W, comments: &[String]) -> io::Result<()> {
    for line in comments {
        writeln!(w, "# {line}")?;
    }
    Ok(())
}

/// Chain run: `t,P_e,alpha_next_sq,bloch_norm,excitation` per sample.
/// Returns the byte count written.
pub fn write_chain_series<W: Write>(
    result: &RunResult,
    sink: W,
    comments: &[String],
) -> io::Result<u64> {
    let mut w = CountingWriter {
        inner: sink,
        bytes: 0,
    };
    write_comments(&mut w, comments)?;
    writeln!(w, "t,P_e,alpha_next_sq,bloch_norm,excitation")?;
    let series = &result.series;
    let next_site = result
        .provenance
        .params
        .as_ref()
        .map(|p| (p.driven_site() + 1).min(p.n_ions()))
        .unwrap_or(1);
    for (t, r) in series.times().iter().zip(series.records()) {
        let next_sq = r
            .amplitudes
            .get(next_site - 1)
            .map_or(0.0, |a| a.norm_sqr());
        writeln!(
            w,
            "{},{},{},{},{}",
            format_value(*t),
            format_value(r.p_e),
            format_value(next_sq),
            format_value(r.norm),
            format_value(r.excitation)
        )?;
    }
    w.flush()?;
    Ok(w.bytes)
}

/// Single-ion run: `t,P_e` per sample.
pub fn write_single_ion_series<W: Write>(
    result: &RunResult,
    sink: W,
    comments: &[String],
) -> io::Result<u64> {
    let mut w = CountingWriter {
        inner: sink,
        bytes: 0,
    };
    write_comments(&mut w, comments)?;
    writeln!(w, "t,P_e")?;
    for (t, r) in result.series.times().iter().zip(result.series.records()) {
        writeln!(w, "{},{}", format_value(*t), format_value(r.p_e))?;
    }
    w.flush()?;
    Ok(w.bytes)
}

/// Several aligned series in one file: `t` plus one column per label for
/// each extractor, e.g. `t,P_e_carrier,...`.
pub fn write_multi_series<W: Write>(
    labels: &[String],
    serieses: &[&TimeSeries],
    columns: &[(&str, &dyn Fn(&TimeSeries, usize) -> f64)],
    sink: W,
    comments: &[String],
) -> io::Result<u64> {
    let mut w = CountingWriter {
        inner: sink,
        bytes: 0,
    };
    write_comments(&mut w, comments)?;
    let mut header = String::from("t");
    for (prefix, _) in columns {
        for label in labels {
            header.push(',');
            header.push_str(prefix);
            header.push('_');
            header.push_str(label);
        }
    }
    writeln!(w, "{header}")?;
    let times = serieses[0].times();
    for (i, t) in times.iter().enumerate() {
        let mut row = format_value(*t);
        for (_, extract) in columns {
            for series in serieses {
                row.push(',');
                row.push_str(&format_value(extract(series, i)));
            }
        }
        writeln!(w, "{row}")?;
    }
    w.flush()?;
    Ok(w.bytes)
}

/// Companion wide CSV: the full per-site snapshot,
/// `t,alpha_1_re,alpha_1_im,...,s_x,s_y,s_z`.
pub fn write_wide_series<W: Write>(
    result: &RunResult,
    sink: W,
    comments: &[String],
) -> io::Result<u64> {
    let mut w = CountingWriter {
        inner: sink,
        bytes: 0,
    };
    write_comments(&mut w, comments)?;
    let n = result
        .series
        .records()
        .first()
        .map_or(0, |r| r.amplitudes.len());
    let mut header = String::from("t");
    for k in 1..=n {
        header.push_str(&format!(",alpha_{k}_re,alpha_{k}_im"));
    }
    writeln!(w, "{header}")?;
    for (t, r) in result.series.times().iter().zip(result.series.records()) {
        let mut row = format_value(*t);
        for a in &r.amplitudes {
            row.push(',');
            row.push_str(&format_value(a.re));
            row.push(',');
            row.push_str(&format_value(a.im));
        }
        writeln!(w, "{row}")?;
    }
    w.flush()?;
    Ok(w.bytes)
}

/// Sweep table: `<name>,max_P_e,transmission` rows.
pub fn write_sweep<W: Write>(
    table: &SweepTable,
    parameter_name: &str,
    sink: W,
    comments: &[String],
) -> io::Result<u64> {
    let mut w = CountingWriter {
        inner: sink,
        bytes: 0,
    };
    write_comments(&mut w, comments)?;
    writeln!(w, "{parameter_name},max_P_e,transmission")?;
    for row in &table.rows {
        writeln!(
            w,
            "{},{},{}",
            format_value(row.parameter),
            format_value(row.max_p_e),
            format_value(row.transmission)
        )?;
    }
    for (parameter, message) in &table.failures {
        writeln!(w, "# FAILED {}: {message}", format_value(*parameter))?;
    }
    w.flush()?;
    Ok(w.bytes)
}

/// Parse an emitted CSV back into (header, comment lines, numeric rows);
/// the round-trip contract of this module.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<String>, Vec<Vec<f64>>), String> {
    let mut comments = vec![];
    let mut header: Option<Vec<String>> = None;
    let mut rows = vec![];
    for line in text.lines() {
        if let Some(stripped) = line.strip_prefix('#') {
            comments.push(stripped.trim().to_string());
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        match &header {
            None => header = Some(line.split(',').map(|s| s.to_string()).collect()),
            Some(_) => {
                let row: Result<Vec<f64>, _> = line.split(',').map(|s| s.parse::<f64>()).collect();
                rows.push(row.map_err(|e| format!("bad row `{line}`: {e}"))?);
            }
        }
    }
    Ok((header.ok_or("missing header")?, comments, rows))
}
