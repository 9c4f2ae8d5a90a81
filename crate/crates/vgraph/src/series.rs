//! Time-series ingestion, slicing, and synthetic generators.
//!
//! A [`TimeSeries`] is an ordered sequence of finite values indexed by row
//! order (trading days for index data); no calendar logic or gap filling is
//! applied.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Ordered sequence of finite values with source metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    label: String,
    origin_date: Option<NaiveDate>,
}

impl TimeSeries {
    /// Build a series, enforcing length >= 2 and finiteness of every value.
    pub fn new(values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::SeriesTooShort(values.len()));
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(idx));
        }
        Ok(Self {
            values,
            label: label.into(),
            origin_date: None,
        })
    }

    pub fn with_origin_date(mut self, date: NaiveDate) -> Self {
        self.origin_date = Some(date);
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor enforces len >= 2
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn origin_date(&self) -> Option<NaiveDate> {
        self.origin_date
    }

    /// Window of `len` values starting at `start`; origin date shifts with
    /// the window.
    pub fn slice(&self, start: usize, len: usize) -> Result<TimeSeries> {
        if len < 2 || start.checked_add(len).is_none_or(|end| end > self.values.len()) {
            return Err(Error::SliceOutOfRange {
                start,
                len,
                series_len: self.values.len(),
            });
        }
        Ok(TimeSeries {
            values: self.values[start..start + len].to_vec(),
            label: self.label.clone(),
            origin_date: self
                .origin_date
                .and_then(|d| d.checked_add_days(Days::new(start as u64))),
        })
    }
}

/// Column selector for CSV ingestion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    Position(usize),
    Name(String),
}

/// Load one numeric column from a CSV file.
///
/// Comma-separated, '.' decimal mark, UTF-8; rows whose cells are all empty
/// are skipped. Row numbers in errors are 1-based file lines.
pub fn load_csv(path: &Path, column: &Column, has_header: bool) -> Result<TimeSeries> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .from_reader(file);

    let (col_idx, mut label) = match column {
        Column::Position(i) => (*i, None),
        Column::Name(name) => {
            if !has_header {
                return Err(Error::ColumnNotFound {
                    path: path.to_path_buf(),
                    column: name.clone(),
                });
            }
            let headers = reader.headers().map_err(|_| Error::ColumnNotFound {
                path: path.to_path_buf(),
                column: name.clone(),
            })?;
            let idx = headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| Error::ColumnNotFound {
                    path: path.to_path_buf(),
                    column: name.clone(),
                })?;
            (idx, Some(name.clone()))
        }
    };
    if label.is_none() && has_header {
        if let Ok(headers) = reader.headers() {
            label = headers.get(col_idx).map(|h| h.trim().to_string());
        }
    }
    let label = label.unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "series".to_string())
    });

    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(source),
        })?;
        if record.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        let row = record.position().map_or(0, |p| p.line());
        let cell = record.get(col_idx).unwrap_or("").trim();
        let value: f64 = cell.parse().map_err(|_| Error::BadCell {
            path: path.to_path_buf(),
            row,
            cell: cell.to_string(),
        })?;
        if !value.is_finite() {
            return Err(Error::NonFiniteCell {
                path: path.to_path_buf(),
                row,
            });
        }
        values.push(value);
    }
    if values.len() < 2 {
        return Err(Error::TooFewRows {
            path: path.to_path_buf(),
            rows: values.len(),
        });
    }
    TimeSeries::new(values, label)
}

/// Names of the columns in a headered CSV file.
pub fn csv_headers(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers = reader.headers().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(source),
    })?;
    Ok(headers.iter().map(|h| h.trim().to_string()).collect())
}

/// Write a series as `index,value` rows. Values round-trip exactly.
pub fn write_csv<W: Write>(series: &TimeSeries, mut sink: W) -> Result<()> {
    let mut buf = String::new();
    buf.push_str("index,value\n");
    for (i, v) in series.values().iter().enumerate() {
        let _ = writeln!(buf, "{i},{v}");
    }
    sink.write_all(buf.as_bytes())?;
    Ok(())
}

/// What to synthesize.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SyntheticKind {
    /// Fractional Gaussian noise with the given Hurst parameter.
    Fgn { hurst: f64 },
    WhiteNoise,
    LinearRamp,
    Constant,
}

/// Deterministic synthetic-series recipe: equal specs (including the seed)
/// reproduce bit-identical output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub length: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.length < 2 {
            return Err(Error::SeriesTooShort(self.length));
        }
        if let SyntheticKind::Fgn { hurst } = self.kind {
            if !(hurst > 0.0 && hurst < 1.0) {
                return Err(Error::InvalidHurst(hurst));
            }
        }
        Ok(())
    }
}

/// Synthesize a series from a spec.
pub fn generate(spec: &SyntheticSpec) -> Result<TimeSeries> {
    spec.validate()?;
    let n = spec.length;
    let values = match spec.kind {
        SyntheticKind::Constant => vec![0.0; n],
        SyntheticKind::LinearRamp => (0..n).map(|i| i as f64).collect(),
        SyntheticKind::WhiteNoise => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            (0..n).map(|_| rng.sample(StandardNormal)).collect()
        }
        SyntheticKind::Fgn { hurst } => fgn_circulant(n, hurst, spec.seed)?,
    };
    let label = match spec.kind {
        SyntheticKind::Constant => format!("constant-{n}"),
        SyntheticKind::LinearRamp => format!("ramp-{n}"),
        SyntheticKind::WhiteNoise => format!("white-{n}-s{}", spec.seed),
        SyntheticKind::Fgn { hurst } => format!("fgn-h{hurst}-{n}-s{}", spec.seed),
    };
    TimeSeries::new(values, label)
}

/// Autocovariance of unit-variance fGn at lag k.
fn fgn_autocov(hurst: f64, k: usize) -> f64 {
    let k = k as f64;
    let h2 = 2.0 * hurst;
    0.5 * ((k - 1.0).abs().powf(h2) - 2.0 * k.powf(h2) + (k + 1.0).powf(h2))
}

/// Exact fGn synthesis by circulant embedding (Davies-Harte). The covariance
/// is embedded in a circulant of size 2m with m a power of two >= n; if the
/// embedding is not positive semidefinite the size doubles before giving up.
fn fgn_circulant(n: usize, hurst: f64, seed: u64) -> Result<Vec<f64>> {
    let mut m = n.next_power_of_two().max(2);
    let mut planner = FftPlanner::new();
    for _ in 0..8 {
        let size = 2 * m;
        let mut row: Vec<Complex<f64>> = Vec::with_capacity(size);
        for k in 0..=m {
            row.push(Complex::new(fgn_autocov(hurst, k), 0.0));
        }
        for k in (1..m).rev() {
            row.push(Complex::new(fgn_autocov(hurst, k), 0.0));
        }
        let fft = planner.plan_fft_forward(size);
        fft.process(&mut row);

        let mut eigenvalues: Vec<f64> = row.iter().map(|c| c.re).collect();
        let worst = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if worst < -1e-9 {
            m *= 2;
            continue;
        }
        for ev in &mut eigenvalues {
            *ev = ev.max(0.0);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = size as f64;
        let mut spectrum = vec![Complex::new(0.0, 0.0); size];
        let v0: f64 = rng.sample(StandardNormal);
        spectrum[0] = Complex::new((eigenvalues[0] / scale).sqrt() * v0, 0.0);
        for k in 1..m {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let amp = (eigenvalues[k] / (2.0 * scale)).sqrt();
            spectrum[k] = Complex::new(amp * re, amp * im);
            spectrum[size - k] = spectrum[k].conj();
        }
        let vm: f64 = rng.sample(StandardNormal);
        spectrum[m] = Complex::new((eigenvalues[m] / scale).sqrt() * vm, 0.0);

        let fft = planner.plan_fft_forward(size);
        fft.process(&mut spectrum);
        return Ok(spectrum[..n].iter().map(|c| c.re).collect());
    }
    Err(Error::EmbeddingFailed { length: n, hurst })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: SyntheticKind, length: usize, seed: u64) -> SyntheticSpec {
        SyntheticSpec { kind, length, seed }
    }

    #[test]
    fn constant_and_ramp() {
        let c = generate(&spec(SyntheticKind::Constant, 5, 0)).unwrap();
        assert_eq!(c.values(), &[0.0; 5]);
        let r = generate(&spec(SyntheticKind::LinearRamp, 4, 0)).unwrap();
        assert_eq!(r.values(), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn generate_is_deterministic() {
        let s = spec(SyntheticKind::Fgn { hurst: 0.7 }, 512, 9);
        let a = generate(&s).unwrap();
        let b = generate(&s).unwrap();
        assert_eq!(a.values(), b.values());
        let w = spec(SyntheticKind::WhiteNoise, 512, 9);
        assert_eq!(generate(&w).unwrap().values(), generate(&w).unwrap().values());
    }

    #[test]
    fn invalid_hurst_rejected() {
        for h in [0.0, 1.0, 1.5, -0.2] {
            assert!(generate(&spec(SyntheticKind::Fgn { hurst: h }, 64, 0)).is_err());
        }
    }

    fn sample_acf(values: &[f64], lag: usize) -> f64 {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        let cov: f64 = (0..n - lag)
            .map(|i| (values[i] - mean) * (values[i + lag] - mean))
            .sum();
        cov / var
    }

    #[test]
    fn fgn_lag_one_autocorrelation() {
        // theoretical lag-1 autocorrelation of fGn: 2^(2H-1) - 1
        let s = generate(&spec(SyntheticKind::Fgn { hurst: 0.8 }, 8192, 42)).unwrap();
        let theory = 2f64.powf(0.6) - 1.0;
        let got = sample_acf(s.values(), 1);
        assert!((got - theory).abs() < 0.05, "acf1 = {got}, theory = {theory}");
    }

    #[test]
    fn fgn_half_is_white() {
        let s = generate(&spec(SyntheticKind::Fgn { hurst: 0.5 }, 8192, 1)).unwrap();
        let bound = 4.0 / (8192f64).sqrt();
        for lag in 1..=5 {
            let a = sample_acf(s.values(), lag);
            assert!(a.abs() < bound, "lag {lag}: {a}");
        }
    }

    #[test]
    fn slice_examples() {
        let s = TimeSeries::new(vec![5.0, 6.0, 7.0, 8.0], "t").unwrap();
        assert_eq!(s.slice(1, 2).unwrap().values(), &[6.0, 7.0]);
        assert_eq!(s.slice(0, 4).unwrap().values(), s.values());
        let t = TimeSeries::new(vec![1.0, 2.0, 3.0], "t").unwrap();
        assert!(t.slice(2, 2).is_err());
        assert!(t.slice(0, 1).is_err());
    }

    #[test]
    fn slice_shifts_origin_date() {
        let d = NaiveDate::from_ymd_opt(2000, 1, 3).unwrap();
        let s = TimeSeries::new(vec![1.0, 2.0, 3.0, 4.0], "t")
            .unwrap()
            .with_origin_date(d);
        let w = s.slice(2, 2).unwrap();
        assert_eq!(w.origin_date(), d.checked_add_days(Days::new(2)));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(TimeSeries::new(vec![1.0], "t").is_err());
        assert!(TimeSeries::new(vec![1.0, f64::NAN], "t").is_err());
        assert!(TimeSeries::new(vec![1.0, f64::INFINITY], "t").is_err());
    }

    #[test]
    fn csv_round_trip() {
        let dir = std::env::temp_dir().join(format!("vgraph-series-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("rt.csv");
        let s = generate(&spec(SyntheticKind::WhiteNoise, 100, 3)).unwrap();
        let mut file = File::create(&path).unwrap();
        write_csv(&s, &mut file).unwrap();
        drop(file);
        let back = load_csv(&path, &Column::Name("value".into()), true).unwrap();
        assert_eq!(back.values(), s.values());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn csv_errors() {
        let dir = std::env::temp_dir().join(format!("vgraph-series-err-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();

        let missing = dir.join("nope.csv");
        assert!(matches!(
            load_csv(&missing, &Column::Position(0), false),
            Err(Error::Io { .. })
        ));

        // unparseable cell on file line 17
        let bad = dir.join("bad.csv");
        let mut rows: Vec<String> = (0..20).map(|i| format!("{i}.0")).collect();
        rows[16] = "abc".to_string();
        std::fs::write(&bad, rows.join("\n")).unwrap();
        match load_csv(&bad, &Column::Position(0), false) {
            Err(Error::BadCell { row, .. }) => assert_eq!(row, 17),
            other => panic!("expected BadCell, got {other:?}"),
        }

        // two bare rows, no header
        let tiny = dir.join("tiny.csv");
        std::fs::write(&tiny, "1.0\n2.0\n").unwrap();
        let s = load_csv(&tiny, &Column::Position(0), false).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0]);
        assert_eq!(s.label(), "tiny");

        // single data row is too short
        let short = dir.join("short.csv");
        std::fs::write(&short, "1.0\n").unwrap();
        assert!(matches!(
            load_csv(&short, &Column::Position(0), false),
            Err(Error::TooFewRows { rows: 1, .. })
        ));

        std::fs::remove_dir_all(&dir).ok();
    }
}
