//! Text and image encodings of run results. Floats use Rust's shortest
//! round-trip formatting so identical inputs give identical bytes.

use std::fmt::Write as _;

use crate::field::ComplexField;
use crate::grid::{DomainMask, Grid};
use crate::reconstruct::FourierTable;

use super::metrics::FrequencyResidual;

pub const FOURIER_HEADER: &str = "kappa,theta,xi1,xi2,re_hat,im_hat,sigma,retained,algorithm,k";
pub const RECONSTRUCTION_HEADER: &str = "x1,x2,c_rec,c_true,abs_err";
pub const RESIDUAL_HEADER: &str = "kappa,theta,k,re_hat,im_hat,re_oracle,im_oracle,abs_residual";

/// One line per frequency node; samples that were never computed (or were
/// dropped) have empty `re_hat` / `im_hat`.
pub fn fourier_csv(table: &FourierTable) -> String {
    let mut s = String::with_capacity(96 * (table.records.len() + 1));
    s.push_str(FOURIER_HEADER);
    s.push('\n');
    for r in &table.records {
        let (re, im) = match r.estimate {
            Some(z) => (z.re.to_string(), z.im.to_string()),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.kappa, r.theta, r.xi[0], r.xi[1], re, im, r.sigma, r.retained as u8, r.algorithm, r.k
        );
    }
    s
}

/// Interior coarse nodes only, so `max(abs_err)` is the reported
/// `max_abs_error`.
pub fn reconstruction_csv(grid: &Grid, mask: &DomainMask, c_rec: &ComplexField, c_true: &[f64]) -> String {
    let mut s = String::with_capacity(64 * (mask.interior_count() + 1));
    s.push_str(RECONSTRUCTION_HEADER);
    s.push('\n');
    for (i, x) in grid.nodes() {
        if !mask.is_interior(i) {
            continue;
        }
        let rec = c_rec.values()[i].re;
        let _ = writeln!(s, "{},{},{},{},{}", x[0], x[1], rec, c_true[i], (rec - c_true[i]).abs());
    }
    s
}

pub fn residual_csv(residuals: &[FrequencyResidual]) -> String {
    let mut s = String::from(RESIDUAL_HEADER);
    s.push('\n');
    for r in residuals {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.kappa,
            r.theta,
            r.k,
            r.estimate.re,
            r.estimate.im,
            r.oracle.re,
            r.oracle.im,
            r.abs()
        );
    }
    s
}

/// Binary P5 image, maxval 255, rows in node order from `(0, 0)`, mapped
/// linearly from `[min, max]` of `values`. Returns the bytes and the range.
pub fn pgm(n: usize, values: &[f64]) -> (Vec<u8>, [f64; 2]) {
    assert_eq!(values.len(), n * n, "pgm expects an n x n raster");
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let mut bytes = format!("P5\n{n} {n}\n255\n").into_bytes();
    bytes.extend(values.iter().map(|v| {
        if span > 0.0 {
            (255.0 * (v - lo) / span).round().clamp(0.0, 255.0) as u8
        } else {
            0
        }
    }));
    (bytes, [lo, hi])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_layout_and_range() {
        let (bytes, range) = pgm(2, &[0.0, 1.0, 0.5, -1.0]);
        let header = b"P5\n2 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(&bytes[header.len()..], &[128, 255, 191, 0]);
        assert_eq!(range, [-1.0, 1.0]);
    }

    #[test]
    fn flat_pgm_is_black() {
        let (bytes, range) = pgm(1, &[3.0]);
        assert_eq!(*bytes.last().unwrap(), 0);
        assert_eq!(range, [3.0, 3.0]);
    }

    #[test]
    fn reconstruction_rows_are_interior_only() {
        let g = Grid::new(11, 0.5).unwrap();
        let mask = DomainMask::disk(&g, 0.5).unwrap();
        let rec = ComplexField::zeros(g);
        let truth = vec![0.25; g.len()];
        let csv = reconstruction_csv(&g, &mask, &rec, &truth);
        assert_eq!(csv.lines().count(), mask.interior_count() + 1);
        assert!(csv.lines().skip(1).all(|l| l.ends_with(",0,0.25,0.25")));
    }
}
