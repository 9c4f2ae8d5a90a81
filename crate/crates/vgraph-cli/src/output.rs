//! Figure CSV writers and atomic file output (write to a temp sibling,
//! then rename into place).

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use vgraph::dfa::log_spaced_integers;

use crate::analyze::FigureData;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

pub fn sanitize_label(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
        .collect()
}

/// Write the six per-series figure files; returns the paths written.
pub fn write_figures(dir: &Path, label: &str, fig: &FigureData) -> io::Result<Vec<PathBuf>> {
    let stem = sanitize_label(label);
    let mut written = Vec::new();
    let mut emit = |name: &str, body: String| -> io::Result<()> {
        let path = dir.join(format!("{stem}_{name}.csv"));
        write_atomic(&path, body.as_bytes())?;
        written.push(path);
        Ok(())
    };

    // empirical degree density plus fitted model curves sampled at 200
    // log-spaced abscissae
    let mut pdf = String::from("kind,k,f\n");
    for bin in &fig.pdf.bins {
        let _ = writeln!(pdf, "empirical,{},{}", bin.center, bin.density);
    }
    for fit in &fig.tail_fits {
        let kind = match fit.family {
            vgraph::distfit::TailFamily::PowerLaw => "power_law",
            vgraph::distfit::TailFamily::TruncatedPowerLaw => "truncated_power_law",
        };
        let tail_fraction = fit.tail_size as f64 / fig.degree_total as f64;
        let lo = fit.k_min.max(1.0) as usize;
        for k in log_spaced_integers(lo.max(1), fig.max_degree.max(lo + 1), 200) {
            let f = tail_fraction * fit.density(k as f64);
            if f > 0.0 {
                let _ = writeln!(pdf, "{kind},{k},{f}");
            }
        }
    }
    emit("degree_pdf", pdf)?;

    let mut cc = String::from("k,c\n");
    for &(k, c) in &fig.clustering_pairs {
        let _ = writeln!(cc, "{k},{c}");
    }
    emit("clustering", cc)?;

    let mut recip = String::from("k,inv_c\n");
    for &(k, inv) in &fig.reciprocal_pairs {
        let _ = writeln!(recip, "{k},{inv}");
    }
    emit("clustering_reciprocal", recip)?;

    let mut sw = String::from("N,L,windows\n");
    for p in &fig.small_world.points {
        let _ = writeln!(sw, "{},{},{}", p.window_len, p.mean_path_length, p.windows);
    }
    emit("small_world", sw)?;

    let mut knn = String::from("k,knn_mean,count\n");
    for p in &fig.mixing.curve {
        let _ = writeln!(knn, "{},{},{}", p.degree, p.mean_knn, p.count);
    }
    emit("knn", knn)?;

    let mut dfa = String::from("s,F\n");
    for &(s, f) in &fig.dfa.points {
        let _ = writeln!(dfa, "{s},{f}");
    }
    emit("dfa", dfa)?;

    Ok(written)
}
