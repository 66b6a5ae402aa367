//! Closed-form curvature of warped product metrics plus an independent
//! finite-difference Christoffel-symbol oracle.
//!
//! For the doubly warped metric dr² + h²(r) ds_n² + f²(r) ds_m² the Ricci
//! tensor is diagonal in the adapted frame with components
//!
//!   ric_rr = −n h″/h − m f″/f
//!   ric_hh = (n−1)(1 − h′²)/h² − h″/h − m f′h′/(fh)
//!   ric_ff = (m−1)(1 − f′²)/f² − f″/f − n f′h′/(fh)
//!
//! on unit vectors. The oracle builds the explicit coordinate metric on the
//! (1+n+m)-dimensional chart, differentiates Christoffel symbols numerically
//! (central differences, Richardson-extrapolated over two step sizes), and
//! assembles the full Ricci matrix — an independent check of the formulas.

use crate::profiles::WarpProfile;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative guard around collapsed endpoints (fraction of interval length).
pub const BOUNDARY_GUARD: f64 = 1e-3;
/// Default FD step for the oracle.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum CurvatureError {
    #[error("evaluation at r = {0} is within the guard band of a collapsed endpoint")]
    BoundaryEvaluation(f64),
    #[error("FD step {step} too large: point {point} closer than 4·step to an endpoint")]
    StepTooLarge { point: f64, step: f64 },
    #[error("fiber dimension {0} below the minimum {1}")]
    FiberDimension(u32, u32),
    #[error("structure markers must satisfy 0 < R1 < R2 (< R3) < R, got {0:?}")]
    BadMarkers(Markers),
    #[error("warp profile not positive at r = {0}")]
    NonPositiveWarp(f64),
}

/// Structure markers of the Sha–Yang-type fixtures:
/// f inflects at `r1`, h is constant ρ beyond `r2`, f is round beyond `r3`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Markers {
    pub r1: f64,
    pub r2: f64,
    pub r3: Option<f64>,
}

#[derive(Debug, Clone)]
pub enum WarpedMetric {
    /// dr² + h² ds_n² + f² ds_m² on [0, R].
    Doubly {
        interval: (f64, f64),
        h: WarpProfile,
        f: WarpProfile,
        n: u32,
        m: u32,
        markers: Option<Markers>,
        rho: Option<f64>,
    },
    /// ds² + p² ds_q² on [0, S].
    Singly { interval: (f64, f64), p: WarpProfile, q: u32 },
}

impl WarpedMetric {
    pub fn doubly(
        interval: (f64, f64),
        h: WarpProfile,
        f: WarpProfile,
        n: u32,
        m: u32,
    ) -> Result<Self, CurvatureError> {
        if n < 2 {
            return Err(CurvatureError::FiberDimension(n, 2));
        }
        if m < 2 {
            return Err(CurvatureError::FiberDimension(m, 2));
        }
        Ok(WarpedMetric::Doubly { interval, h, f, n, m, markers: None, rho: None })
    }

    pub fn singly(interval: (f64, f64), p: WarpProfile, q: u32) -> Result<Self, CurvatureError> {
        if q < 1 {
            return Err(CurvatureError::FiberDimension(q, 1));
        }
        Ok(WarpedMetric::Singly { interval, p, q })
    }

    pub fn with_markers(self, markers: Markers, rho: f64) -> Result<Self, CurvatureError> {
        match self {
            WarpedMetric::Doubly { interval, h, f, n, m, .. } => {
                let (lo, hi) = interval;
                let ok = lo < markers.r1
                    && markers.r1 < markers.r2
                    && markers.r3.map_or(markers.r2 < hi, |r3| markers.r2 < r3 && r3 < hi);
                if !ok {
                    return Err(CurvatureError::BadMarkers(markers));
                }
                Ok(WarpedMetric::Doubly { interval, h, f, n, m, markers: Some(markers), rho: Some(rho) })
            }
            s @ WarpedMetric::Singly { .. } => Ok(s),
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        match self {
            WarpedMetric::Doubly { interval, .. } | WarpedMetric::Singly { interval, .. } => *interval,
        }
    }

    /// Ends where a warp profile collapses to zero (within tolerance).
    fn collapsed_ends(&self) -> (bool, bool) {
        let (lo, hi) = self.interval();
        match self {
            WarpedMetric::Doubly { h, f, .. } => {
                let left = h.value(lo).abs() < 1e-6 || f.value(lo).abs() < 1e-6;
                let right = h.value(hi).abs() < 1e-6 || f.value(hi).abs() < 1e-6;
                (left, right)
            }
            WarpedMetric::Singly { p, .. } => {
                (p.value(lo).abs() < 1e-6, p.value(hi).abs() < 1e-6)
            }
        }
    }

    pub fn guard_band(&self) -> (f64, f64) {
        let (lo, hi) = self.interval();
        let eps = BOUNDARY_GUARD * (hi - lo);
        let (cl, cr) = self.collapsed_ends();
        (if cl { lo + eps } else { lo }, if cr { hi - eps } else { hi })
    }

    fn check_interior(&self, r: f64) -> Result<(), CurvatureError> {
        let (a, b) = self.guard_band();
        if r < a || r > b {
            return Err(CurvatureError::BoundaryEvaluation(r));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicciDiagonal {
    pub ric_rr: f64,
    pub ric_hh: f64,
    pub ric_ff: f64,
}

/// Ricci components of a doubly warped metric directly from profile jets.
/// Shared by the closed-form operation and the path certification fields.
pub fn ricci_from_jets(
    h_jet: (f64, f64, f64),
    f_jet: (f64, f64, f64),
    n: u32,
    m: u32,
) -> RicciDiagonal {
    let (h, dh, ddh) = h_jet;
    let (f, df, ddf) = f_jet;
    let (nf, mf) = (n as f64, m as f64);
    RicciDiagonal {
        ric_rr: -nf * ddh / h - mf * ddf / f,
        ric_hh: (nf - 1.0) * (1.0 - dh * dh) / (h * h) - ddh / h - mf * df * dh / (f * h),
        ric_ff: (mf - 1.0) * (1.0 - df * df) / (f * f) - ddf / f - nf * df * dh / (f * h),
    }
}

/// Closed-form Ricci diagonal of a doubly warped metric at an interior point.
pub fn ricci_doubly_warped(g: &WarpedMetric, r: f64) -> Result<RicciDiagonal, CurvatureError> {
    let WarpedMetric::Doubly { h, f, n, m, .. } = g else {
        panic!("ricci_doubly_warped expects a doubly warped metric");
    };
    g.check_interior(r)?;
    let hj = h.jet(r);
    let fj = f.jet(r);
    if hj.0 <= 0.0 {
        return Err(CurvatureError::NonPositiveWarp(r));
    }
    if fj.0 <= 0.0 {
        return Err(CurvatureError::NonPositiveWarp(r));
    }
    Ok(ricci_from_jets(hj, fj, *n, *m))
}

/// Sectional curvatures of the rotationally symmetric metric ds² + p² ds_q²:
/// planes containing ∂s have K = −p″/p, fiber planes have K = (1−p′²)/p².
pub fn sectional_singly_warped(g: &WarpedMetric, s: f64) -> Result<(f64, f64), CurvatureError> {
    let WarpedMetric::Singly { p, .. } = g else {
        panic!("sectional_singly_warped expects a singly warped metric");
    };
    g.check_interior(s)?;
    let (v, d1, d2) = p.jet(s);
    if v <= 0.0 {
        return Err(CurvatureError::NonPositiveWarp(s));
    }
    Ok((-d2 / v, (1.0 - d1 * d1) / (v * v)))
}

// ---------------------------------------------------------------------------
// Coordinate charts for the oracle
// ---------------------------------------------------------------------------

/// Dense symmetric matrix workspace (dimensions stay ≤ 10).
pub(crate) fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut inv = vec![vec![0.0; n]; n];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[x][col].abs().partial_cmp(&m[y][col].abs()).unwrap())
            .unwrap();
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let d = m[col][col];
        for c in 0..n {
            m[col][c] /= d;
            inv[col][c] /= d;
        }
        for r in 0..n {
            if r != col {
                let factor = m[r][col];
                if factor != 0.0 {
                    for c in 0..n {
                        m[r][c] -= factor * m[col][c];
                        inv[r][c] -= factor * inv[col][c];
                    }
                }
            }
        }
    }
    inv
}

/// A coordinate metric with analytic first derivatives, the raw material for
/// numerically differentiated Christoffel symbols.
pub(crate) trait MetricChart: Sync {
    fn dim(&self) -> usize;
    /// g_{ij}(x)
    fn metric(&self, x: &[f64]) -> Vec<Vec<f64>>;
    /// ∂_k g_{ij}(x), indexed dg[k][i][j]
    fn dmetric(&self, x: &[f64]) -> Vec<Vec<Vec<f64>>>;
}

/// Round unit-sphere block in iterated polar coordinates:
/// ĝ_11 = 1, ĝ_22 = sin²θ1, ĝ_33 = sin²θ1 sin²θ2, …
fn sphere_block(theta: &[f64]) -> Vec<f64> {
    let mut diag = vec![1.0; theta.len()];
    let mut acc = 1.0;
    for i in 1..theta.len() {
        let s = theta[i - 1].sin();
        acc *= s * s;
        diag[i] = acc;
    }
    diag
}

/// ∂ of the sphere block diagonal with respect to each θ_k.
fn sphere_block_derivs(theta: &[f64]) -> Vec<Vec<f64>> {
    let q = theta.len();
    let diag = sphere_block(theta);
    let mut out = vec![vec![0.0; q]; q];
    for (k, dk) in out.iter_mut().enumerate() {
        // θ_k appears in entries i > k through the factor sin²θ_k
        for i in (k + 1)..q {
            let s = theta[k].sin();
            let c = theta[k].cos();
            dk[i] = diag[i] * 2.0 * c / s;
        }
    }
    out
}

pub(crate) struct DoublyChart<'a> {
    pub h: &'a WarpProfile,
    pub f: &'a WarpProfile,
    pub n: usize,
    pub m: usize,
}

impl MetricChart for DoublyChart<'_> {
    fn dim(&self) -> usize {
        1 + self.n + self.m
    }

    fn metric(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let d = self.dim();
        let r = x[0];
        let hv = self.h.value(r);
        let fv = self.f.value(r);
        let th = &x[1..1 + self.n];
        let ph = &x[1 + self.n..];
        let bn = sphere_block(th);
        let bm = sphere_block(ph);
        let mut g = vec![vec![0.0; d]; d];
        g[0][0] = 1.0;
        for i in 0..self.n {
            g[1 + i][1 + i] = hv * hv * bn[i];
        }
        for i in 0..self.m {
            g[1 + self.n + i][1 + self.n + i] = fv * fv * bm[i];
        }
        g
    }

    fn dmetric(&self, x: &[f64]) -> Vec<Vec<Vec<f64>>> {
        let d = self.dim();
        let r = x[0];
        let (hv, dhv, _) = self.h.jet(r);
        let (fv, dfv, _) = self.f.jet(r);
        let th = &x[1..1 + self.n];
        let ph = &x[1 + self.n..];
        let bn = sphere_block(th);
        let bm = sphere_block(ph);
        let dbn = sphere_block_derivs(th);
        let dbm = sphere_block_derivs(ph);
        let mut dg = vec![vec![vec![0.0; d]; d]; d];
        for i in 0..self.n {
            dg[0][1 + i][1 + i] = 2.0 * hv * dhv * bn[i];
        }
        for i in 0..self.m {
            dg[0][1 + self.n + i][1 + self.n + i] = 2.0 * fv * dfv * bm[i];
        }
        for k in 0..self.n {
            for i in 0..self.n {
                dg[1 + k][1 + i][1 + i] = hv * hv * dbn[k][i];
            }
        }
        for k in 0..self.m {
            for i in 0..self.m {
                dg[1 + self.n + k][1 + self.n + i][1 + self.n + i] = fv * fv * dbm[k][i];
            }
        }
        dg
    }
}

pub(crate) struct SinglyChart<'a> {
    pub p: &'a WarpProfile,
    pub q: usize,
}

impl MetricChart for SinglyChart<'_> {
    fn dim(&self) -> usize {
        1 + self.q
    }

    fn metric(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let d = self.dim();
        let pv = self.p.value(x[0]);
        let b = sphere_block(&x[1..]);
        let mut g = vec![vec![0.0; d]; d];
        g[0][0] = 1.0;
        for i in 0..self.q {
            g[1 + i][1 + i] = pv * pv * b[i];
        }
        g
    }

    fn dmetric(&self, x: &[f64]) -> Vec<Vec<Vec<f64>>> {
        let d = self.dim();
        let (pv, dpv, _) = self.p.jet(x[0]);
        let b = sphere_block(&x[1..]);
        let db = sphere_block_derivs(&x[1..]);
        let mut dg = vec![vec![vec![0.0; d]; d]; d];
        for i in 0..self.q {
            dg[0][1 + i][1 + i] = 2.0 * pv * dpv * b[i];
        }
        for k in 0..self.q {
            for i in 0..self.q {
                dg[1 + k][1 + i][1 + i] = pv * pv * db[k][i];
            }
        }
        dg
    }
}

/// Γ^k_{ij} = ½ g^{kl} (∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})
pub(crate) fn christoffel(chart: &dyn MetricChart, x: &[f64]) -> Vec<Vec<Vec<f64>>> {
    let d = chart.dim();
    let g = chart.metric(x);
    let dg = chart.dmetric(x);
    let ginv = invert(&g);
    let mut gamma = vec![vec![vec![0.0; d]; d]; d];
    for k in 0..d {
        for i in 0..d {
            for j in i..d {
                let mut sum = 0.0;
                for l in 0..d {
                    if ginv[k][l] != 0.0 {
                        sum += ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                    }
                }
                gamma[k][i][j] = 0.5 * sum;
                gamma[k][j][i] = gamma[k][i][j];
            }
        }
    }
    gamma
}

/// Ricci tensor from numerically differentiated Christoffel symbols at one step.
fn ricci_matrix_fd(chart: &dyn MetricChart, x: &[f64], step: f64) -> Vec<Vec<f64>> {
    let d = chart.dim();
    let gamma0 = christoffel(chart, x);
    // ∂_k Γ at x by central differences
    let mut dgamma = vec![vec![vec![vec![0.0; d]; d]; d]; d];
    let mut xp = x.to_vec();
    for k in 0..d {
        xp[k] = x[k] + step;
        let gp = christoffel(chart, &xp);
        xp[k] = x[k] - step;
        let gm = christoffel(chart, &xp);
        xp[k] = x[k];
        for a in 0..d {
            for i in 0..d {
                for j in 0..d {
                    dgamma[k][a][i][j] = (gp[a][i][j] - gm[a][i][j]) / (2.0 * step);
                }
            }
        }
    }
    // R_ij = ∂_k Γ^k_ij − ∂_j Γ^k_ik + Γ^k_kl Γ^l_ij − Γ^k_jl Γ^l_ik
    let mut ric = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            let mut sum = 0.0;
            for k in 0..d {
                sum += dgamma[k][k][i][j] - dgamma[j][k][i][k];
                for l in 0..d {
                    sum += gamma0[k][k][l] * gamma0[l][i][j] - gamma0[k][j][l] * gamma0[l][i][k];
                }
            }
            ric[i][j] = sum;
        }
    }
    ric
}

/// Full Ricci matrix in the coordinate frame with Richardson extrapolation
/// over steps (step, step/2).
#[derive(Debug, Clone)]
pub struct RicciMatrix {
    pub dim: usize,
    pub entries: Vec<Vec<f64>>,
    /// metric at the evaluation point (for unit-frame normalization)
    metric: Vec<Vec<f64>>,
    pub n_block: usize,
}

impl RicciMatrix {
    /// Diagonal values on unit vectors: (rr, first-fiber, second-fiber).
    pub fn diag_unit_frame(&self) -> RicciDiagonal {
        let rr = self.entries[0][0] / self.metric[0][0];
        let hh = self.entries[1][1] / self.metric[1][1];
        let ff_idx = 1 + self.n_block;
        let ff = self.entries[ff_idx][ff_idx] / self.metric[ff_idx][ff_idx];
        RicciDiagonal { ric_rr: rr, ric_hh: hh, ric_ff: ff }
    }

    pub fn max_offdiag(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    // normalize against unit frame
                    let scale = (self.metric[i][i] * self.metric[j][j]).sqrt();
                    worst = worst.max((self.entries[i][j] / scale).abs());
                }
            }
        }
        worst
    }
}

/// Generic sphere coordinates, away from polar singularities, deterministic.
fn generic_angles(k: usize, seed_shift: f64) -> Vec<f64> {
    (0..k).map(|i| 0.9 + seed_shift + 0.13 * i as f64).collect()
}

/// FD Christoffel oracle at radial point `r`.
pub fn fd_ricci_oracle(
    g: &WarpedMetric,
    r: f64,
    step: f64,
) -> Result<RicciMatrix, CurvatureError> {
    let (lo, hi) = g.interval();
    if r - lo <= 4.0 * step || hi - r <= 4.0 * step {
        return Err(CurvatureError::StepTooLarge { point: r, step });
    }
    let (chart, n_block): (Box<dyn MetricChart>, usize) = match g {
        WarpedMetric::Doubly { h, f, n, m, .. } => (
            Box::new(DoublyChart { h, f, n: *n as usize, m: *m as usize }),
            *n as usize,
        ),
        WarpedMetric::Singly { p, q, .. } => {
            (Box::new(SinglyChart { p, q: *q as usize }), *q as usize)
        }
    };
    let d = chart.dim();
    let mut x = vec![r];
    x.extend(generic_angles(d - 1, 0.0));

    let coarse = ricci_matrix_fd(chart.as_ref(), &x, step);
    let fine = ricci_matrix_fd(chart.as_ref(), &x, step / 2.0);
    let mut entries = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            entries[i][j] = (4.0 * fine[i][j] - coarse[i][j]) / 3.0;
        }
    }
    let metric = chart.metric(&x);
    Ok(RicciMatrix { dim: d, entries, metric, n_block })
}
