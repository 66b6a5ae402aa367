//! Grid positivity certification with Lipschitz margins.
//!
//! A certificate records the minimum of a scalar field over a uniform grid on
//! a compact rectangle together with a sup-norm gradient bound L. Any point of
//! the rectangle lies within half a cell diagonal of some node, so
//!
//!   margin = grid_min − L · δ_diag / 2
//!
//! lower-bounds the true minimum; `Verified` means margin > 0. Heuristic mode
//! skips the margin and can only report `GridPositive`. A non-positive node is
//! a `Falsified` verdict with a re-checkable witness (first in lexicographic
//! node order). Any non-finite evaluation aborts: silent holes would
//! invalidate certificates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;
/// Safety factor applied to finite-difference estimates of L.
pub const L_SAFETY_FACTOR: f64 = 4.0;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("empty or degenerate domain")]
    EmptyDomain,
    #[error("non-finite field value at {0:?}")]
    NonFiniteFieldValue(Vec<f64>),
    #[error("grid counts must be >= 2 per axis")]
    BadGrid,
    #[error("certificate already decided ({0:?}); refine applies to Inconclusive only")]
    AlreadyDecided(Verdict),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Verified,
    GridPositive,
    Inconclusive,
    Falsified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Heuristic,
    Certified,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Rectangle {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Rectangle {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Rectangle { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn validate(&self) -> Result<(), CertifyError> {
        if self.lo.is_empty()
            || self.lo.len() != self.hi.len()
            || self.lo.iter().zip(&self.hi).any(|(a, b)| !(a < b))
        {
            return Err(CertifyError::EmptyDomain);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PositivityCertificate {
    pub schema_version: u32,
    pub claim: String,
    pub domain: Rectangle,
    pub grid: Vec<usize>,
    pub spacing: Vec<f64>,
    pub grid_min: f64,
    pub argmin: Vec<f64>,
    pub mode: Mode,
    pub derivative_bound: Option<f64>,
    pub margin: Option<f64>,
    pub verdict: Verdict,
    pub witness: Option<Vec<f64>>,
    pub notes: Vec<String>,
}

impl PositivityCertificate {
    pub fn is_positive_outcome(&self) -> bool {
        matches!(self.verdict, Verdict::Verified | Verdict::GridPositive)
    }
}

struct Grid {
    lo: Vec<f64>,
    spacing: Vec<f64>,
    counts: Vec<usize>,
}

impl Grid {
    fn new(domain: &Rectangle, counts: &[usize]) -> Self {
        let spacing = domain
            .lo
            .iter()
            .zip(&domain.hi)
            .zip(counts)
            .map(|((a, b), &c)| (b - a) / (c - 1) as f64)
            .collect();
        Grid { lo: domain.lo.clone(), spacing, counts: counts.to_vec() }
    }

    fn total(&self) -> usize {
        self.counts.iter().product()
    }

    fn point(&self, mut index: usize) -> Vec<f64> {
        // row-major: last axis fastest
        let d = self.counts.len();
        let mut coords = vec![0usize; d];
        for axis in (0..d).rev() {
            coords[axis] = index % self.counts[axis];
            index /= self.counts[axis];
        }
        coords
            .iter()
            .enumerate()
            .map(|(axis, &i)| self.lo[axis] + self.spacing[axis] * i as f64)
            .collect()
    }
}

/// Deterministic parallel scan: minimum value with smallest index, first
/// failing (≤ 0) index, first non-finite index.
struct Scan {
    min_val: f64,
    min_idx: usize,
    first_fail: Option<usize>,
    first_nonfinite: Option<usize>,
}

fn scan_grid<F>(grid: &Grid, field: &F) -> Scan
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let identity = || Scan {
        min_val: f64::INFINITY,
        min_idx: usize::MAX,
        first_fail: None,
        first_nonfinite: None,
    };
    let merge = |a: Scan, b: Scan| {
        let (min_val, min_idx) = if b.min_val < a.min_val
            || (b.min_val == a.min_val && b.min_idx < a.min_idx)
        {
            (b.min_val, b.min_idx)
        } else {
            (a.min_val, a.min_idx)
        };
        let pick = |x: Option<usize>, y: Option<usize>| match (x, y) {
            (Some(i), Some(j)) => Some(i.min(j)),
            (a, b) => a.or(b),
        };
        Scan {
            min_val,
            min_idx,
            first_fail: pick(a.first_fail, b.first_fail),
            first_nonfinite: pick(a.first_nonfinite, b.first_nonfinite),
        }
    };
    (0..grid.total())
        .into_par_iter()
        .fold(identity, |mut acc, idx| {
            let v = field(&grid.point(idx));
            if !v.is_finite() {
                acc.first_nonfinite = Some(match acc.first_nonfinite {
                    Some(i) => i.min(idx),
                    None => idx,
                });
                return acc;
            }
            if v < acc.min_val || (v == acc.min_val && idx < acc.min_idx) {
                acc.min_val = v;
                acc.min_idx = idx;
            }
            if v <= 0.0 {
                acc.first_fail = Some(match acc.first_fail {
                    Some(i) => i.min(idx),
                    None => idx,
                });
            }
            acc
        })
        .reduce(identity, merge)
}

/// Sup-norm gradient estimate by central finite differences on a 2× refined
/// grid (one-sided at edges), times the safety factor.
fn estimate_l<F>(domain: &Rectangle, counts: &[usize], field: &F) -> Result<f64, CertifyError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let refined: Vec<usize> = counts.iter().map(|&c| (c - 1) * 2 + 1).collect();
    let grid = Grid::new(domain, &refined);
    let d = counts.len();
    let worst = (0..grid.total())
        .into_par_iter()
        .map(|idx| {
            let x = grid.point(idx);
            let mut sq = 0.0;
            for axis in 0..d {
                let delta = grid.spacing[axis];
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[axis] = (x[axis] + delta).min(domain.hi[axis]);
                xm[axis] = (x[axis] - delta).max(domain.lo[axis]);
                let width = xp[axis] - xm[axis];
                if width <= 0.0 {
                    continue;
                }
                let g = (field(&xp) - field(&xm)) / width;
                if !g.is_finite() {
                    return f64::NAN;
                }
                sq += g * g;
            }
            sq.sqrt()
        })
        .reduce(|| 0.0, f64::max);
    if !worst.is_finite() {
        return Err(CertifyError::NonFiniteFieldValue(vec![]));
    }
    Ok(L_SAFETY_FACTOR * worst)
}

/// Certifies positivity of `field` over the rectangle on a `counts` grid.
pub fn certify_positive<F>(
    field: &F,
    domain: &Rectangle,
    counts: &[usize],
    mode: Mode,
    l_bound: Option<f64>,
    claim: &str,
) -> Result<PositivityCertificate, CertifyError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    domain.validate()?;
    if counts.len() != domain.dim() || counts.iter().any(|&c| c < 2) {
        return Err(CertifyError::BadGrid);
    }
    let grid = Grid::new(domain, counts);
    let scan = scan_grid(&grid, field);
    if let Some(idx) = scan.first_nonfinite {
        return Err(CertifyError::NonFiniteFieldValue(grid.point(idx)));
    }

    let mut notes = Vec::new();
    let (verdict, derivative_bound, margin, witness) = if let Some(idx) = scan.first_fail {
        (Verdict::Falsified, None, None, Some(grid.point(idx)))
    } else {
        match mode {
            Mode::Heuristic => {
                notes.push("heuristic mode: grid sign only, no Lipschitz margin".into());
                (Verdict::GridPositive, None, Some(scan.min_val), None)
            }
            Mode::Certified => {
                let l = match l_bound {
                    Some(l) => l,
                    None => {
                        let est = estimate_l(domain, counts, field)?;
                        notes.push(format!(
                            "derivative bound auto-estimated (safety factor {L_SAFETY_FACTOR})"
                        ));
                        est
                    }
                };
                let diag: f64 = grid.spacing.iter().map(|d| d * d).sum::<f64>().sqrt();
                let margin = scan.min_val - l * diag / 2.0;
                let verdict = if margin > 0.0 { Verdict::Verified } else { Verdict::Inconclusive };
                (verdict, Some(l), Some(margin), None)
            }
        }
    };

    Ok(PositivityCertificate {
        schema_version: SCHEMA_VERSION,
        claim: claim.to_string(),
        domain: domain.clone(),
        grid: counts.to_vec(),
        spacing: grid.spacing.clone(),
        grid_min: scan.min_val,
        argmin: grid.point(scan.min_idx),
        mode,
        derivative_bound,
        margin,
        verdict,
        witness,
        notes,
    })
}

/// Re-certifies an Inconclusive claim on a `factor`-refined grid; node sets
/// nest, and the stored derivative bound is held fixed.
pub fn refine<F>(
    cert: &PositivityCertificate,
    field: &F,
    factor: usize,
) -> Result<PositivityCertificate, CertifyError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if cert.verdict != Verdict::Inconclusive {
        return Err(CertifyError::AlreadyDecided(cert.verdict));
    }
    let counts: Vec<usize> = cert.grid.iter().map(|&c| (c - 1) * factor.max(2) + 1).collect();
    let mut refined = certify_positive(
        field,
        &cert.domain,
        &counts,
        cert.mode,
        cert.derivative_bound,
        &cert.claim,
    )?;
    refined.notes.push(format!("refined x{} from a {:?} grid", factor.max(2), cert.grid));
    Ok(refined)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect1(lo: f64, hi: f64) -> Rectangle {
        Rectangle::new(vec![lo], vec![hi])
    }

    #[test]
    fn affine_field_verifies() {
        // (r, λ) ↦ 1 + λ on [0,1]², L = 1, grid 101²
        let field = |x: &[f64]| 1.0 + x[1];
        let domain = Rectangle::new(vec![0.0, 0.0], vec![1.0, 1.0]);
        let cert =
            certify_positive(&field, &domain, &[101, 101], Mode::Certified, Some(1.0), "affine")
                .unwrap();
        assert_eq!(cert.verdict, Verdict::Verified);
        let expected_margin = 1.0 - (0.01f64 * 0.01 + 0.01 * 0.01).sqrt() / 2.0;
        assert!((cert.margin.unwrap() - expected_margin).abs() < 1e-12);
        assert!((cert.grid_min - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sign_change_is_falsified_with_recheckable_witness() {
        let field = |x: &[f64]| x[0] - 0.5;
        let cert = certify_positive(&field, &rect1(0.0, 1.0), &[101], Mode::Certified, None, "r - 1/2")
            .unwrap();
        assert_eq!(cert.verdict, Verdict::Falsified);
        let w = cert.witness.unwrap();
        assert!(field(&w) <= 0.0, "witness must re-evaluate non-positive");
        assert!(w[0] <= 0.5 + 1e-12);
    }

    #[test]
    fn heuristic_never_verifies() {
        let field = |_: &[f64]| 2.0;
        let cert =
            certify_positive(&field, &rect1(0.0, 1.0), &[16], Mode::Heuristic, None, "const").unwrap();
        assert_eq!(cert.verdict, Verdict::GridPositive);
        assert_eq!(cert.margin, Some(2.0));
        assert!(cert.derivative_bound.is_none());
    }

    #[test]
    fn nan_policy_aborts() {
        let field = |x: &[f64]| if (x[0] - 0.5).abs() < 1e-3 { f64::NAN } else { 1.0 };
        let err = certify_positive(&field, &rect1(0.0, 1.0), &[1001], Mode::Heuristic, None, "nan")
            .unwrap_err();
        assert!(matches!(err, CertifyError::NonFiniteFieldValue(_)));
    }

    #[test]
    fn refine_monotone_margin_and_eventual_verification() {
        // steep-but-positive: min 0.01 at a coarse node, slope 10;
        // margin > 0 needs δ < 0.002
        let field = |x: &[f64]| 0.01 + 10.0 * (x[0] - 0.5).abs();
        let domain = rect1(0.0, 1.0);
        let c0 = certify_positive(&field, &domain, &[251], Mode::Certified, Some(10.0), "steep")
            .unwrap();
        assert_eq!(c0.verdict, Verdict::Inconclusive);
        let c1 = refine(&c0, &field, 2).unwrap();
        assert!(c1.margin.unwrap() > c0.margin.unwrap(), "margin must not decrease");
        assert_eq!(c1.verdict, Verdict::Inconclusive); // δ = 0.002 exactly: margin 0
        let c2 = refine(&c1, &field, 2).unwrap();
        assert!(c2.margin.unwrap() > c1.margin.unwrap());
        assert_eq!(c2.verdict, Verdict::Verified, "two refinements verify");
    }

    #[test]
    fn refine_on_decided_certificate_is_an_error() {
        let field = |x: &[f64]| x[0] - 0.5;
        let cert = certify_positive(&field, &rect1(0.0, 1.0), &[11], Mode::Certified, Some(1.0), "f")
            .unwrap();
        assert_eq!(cert.verdict, Verdict::Falsified);
        assert!(matches!(refine(&cert, &field, 2), Err(CertifyError::AlreadyDecided(_))));
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let field = |x: &[f64]| 0.3 + (3.1 * x[0]).sin().abs() * x[1] + 0.1 * x[0];
        let domain = Rectangle::new(vec![0.0, 0.0], vec![1.0, 1.0]);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                certify_positive(&field, &domain, &[64, 64], Mode::Certified, None, "det").unwrap()
            })
        };
        let a = serde_json::to_string(&run(1)).unwrap();
        let b = serde_json::to_string(&run(4)).unwrap();
        assert_eq!(a, b, "certificates must be byte-identical across schedules");
    }

    #[test]
    fn certified_soundness_on_known_minimum() {
        // field with true minimum 0.05 at x=0.37 (not a node), true L = 2
        let field = |x: &[f64]| 0.05 + 2.0 * (x[0] - 0.37).abs();
        let cert = certify_positive(&field, &rect1(0.0, 1.0), &[513], Mode::Certified, Some(2.0), "vee")
            .unwrap();
        assert_eq!(cert.verdict, Verdict::Verified);
        // margin must lower-bound the true minimum
        assert!(cert.margin.unwrap() <= 0.05 + 1e-12);
        // adversarial dense sampling stays above the margin
        for i in 0..10000 {
            let x = i as f64 / 9999.0;
            assert!(field(&[x]) >= cert.margin.unwrap() - 1e-12);
        }
    }
}
