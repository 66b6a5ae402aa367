//! Hypersurface geometry for the disk construction: ξ-profiles, second
//! fundamental forms, induced boundary metrics, the gluing compatibility
//! check, core/socket classification, and the full disk pipeline.
//!
//! The ambient metric is a doubly warped product whose second fiber is split
//! along a polar angle x ∈ [0, π]:
//!
//!   dr² + h²(r) ds_n² + f²(r) dx² + f²(r) sin²(x) ds_{m−2}²
//!
//! and the hypersurface is the graph x = ξ(r) bounding D(ξ) = {x ≤ ξ(r)}.
//! With the inward normal (decreasing x), the principal-curvature blocks are
//!
//!   κ_T = −(f ξ″ + 2 f′ ξ′ + f² f′ ξ′³) / (1 + f² ξ′²)^{3/2}
//!   κ_θ = −f ξ′ h′ / (h sqrt(1 + f² ξ′²))
//!   κ_ω = (cot ξ − f f′ ξ′) / (f sqrt(1 + f² ξ′²))
//!
//! so a plateau ξ ≡ c returns (0, 0, cot(c)/f(r)) exactly.
//!
//! The cap geometry: past the plateau, ξ follows the geodesic sphere of
//! radius d about the axis point z at distance t_z from the collapse point of
//! f, where (t_z, d) are chosen so the sphere's top sits at height c exactly
//! at r = R − π/4. The curve then descends concavely and closes smoothly on
//! the axis, which keeps every block weakly convex; a short C² quintic blend
//! absorbs the curvature jump at the plateau join.

use crate::certify::{certify_positive, Mode, PositivityCertificate, Rectangle, Verdict};
use crate::curvature::{ricci_from_jets, CurvatureError, WarpedMetric};
use crate::isotopy::{
    certify_path_on, combine_verdicts, grid_sign_check, stage_one_path, stage_two_path,
    IsotopyError, MetricPath, PathCertificate,
};
use crate::profiles::{poly_from_conditions, Piece, ProfileError, WarpProfile, TAU_JOIN};
use crate::rational::Rational;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConvexityError {
    #[error("plateau angle c = {0} outside (0, π)")]
    BadPlateauAngle(f64),
    #[error("interval too short for the cap construction: R = {0}")]
    IntervalTooShort(f64),
    #[error("hypersurface normal degenerates at r = {0}")]
    SingularNormal(f64),
    #[error("second fundamental form fields have mismatched blocks or parameters")]
    BlockMismatch,
    #[error("boundary metric not round: deviation {0}")]
    BoundaryNotRound(f64),
    #[error("empty boundary family")]
    EmptyFamily,
    #[error("{0}")]
    Pipeline(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Isotopy(#[from] IsotopyError),
    #[error(transparent)]
    Certify(#[from] crate::certify::CertifyError),
}

// ---------------------------------------------------------------------------
// The ξ-profile
// ---------------------------------------------------------------------------

/// Geodesic-sphere arc data in the round region: the sphere of radius `d`
/// about the axis point at distance `t_z` from the f-collapse point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CapArc {
    pub t_z: f64,
    pub d: f64,
}

impl CapArc {
    /// ξ and derivatives along the arc as a function of t = R − r.
    /// cos ξ = (cos d − cos t cos t_z) / (sin t sin t_z).
    fn jet_in_t(&self, t: f64) -> (f64, f64, f64) {
        let a = self.d.cos() / self.t_z.sin();
        let b = 1.0 / self.t_z.tan();
        let (st, ct) = t.sin_cos();
        let csc = 1.0 / st;
        let cot = ct / st;
        let u = a * csc - b * cot;
        let du = -a * csc * cot + b * csc * csc;
        let ddu = a * csc * (cot * cot + csc * csc) - 2.0 * b * csc * csc * cot;
        let s = (1.0 - u * u).max(1e-300).sqrt();
        let xi = u.clamp(-1.0, 1.0).acos();
        let dxi = -du / s;
        let ddxi = -ddu / s - du * du * u / (s * s * s);
        (xi, dxi, ddxi)
    }

    /// Jets in r (t = R − r flips odd derivatives).
    fn jet(&self, big_r: f64, r: f64) -> (f64, f64, f64) {
        let (xi, dt, ddt) = self.jet_in_t(big_r - r);
        (xi, -dt, ddt)
    }

    /// Axis crossing: the hypersurface closes at t = t_z − d.
    fn t_close(&self) -> f64 {
        self.t_z - self.d
    }
}

#[derive(Debug, Clone)]
enum XiKind {
    /// ξ ≡ c over the whole interval (cylinder graph; degenerate cases and
    /// the whole-interval scaling example).
    Constant,
    Plateaued {
        /// plateau ends here (R − π/4)
        r_join: f64,
        /// C² quintic blend on [r_join, r_blend_end]
        blend: Piece,
        r_blend_end: f64,
        /// descending geodesic-sphere arc on [r_blend_end, r_close]
        arc: CapArc,
        /// the hypersurface closes on the axis here
        r_close: f64,
    },
}

/// Graph angle profile: constant c on the plateau, then a concave C² descent
/// along a round-region geodesic-ball curve, closing on the axis.
#[derive(Debug, Clone)]
pub struct XiProfile {
    pub c: f64,
    pub big_r: f64,
    kind: XiKind,
}

impl XiProfile {
    /// Constant ξ ≡ c (no cap): used for scaling comparisons and as the
    /// fallback when cot c ≤ 0 makes the cap construction moot.
    pub fn constant(c: f64, big_r: f64) -> Result<Self, ConvexityError> {
        if !(0.0..PI).contains(&c) || c == 0.0 {
            return Err(ConvexityError::BadPlateauAngle(c));
        }
        Ok(XiProfile { c, big_r, kind: XiKind::Constant })
    }

    /// Plateau-and-cap profile. Needs c ∈ (0, π/2) for the geodesic-sphere
    /// cap; larger c falls back to `constant` (the pipeline then fails the
    /// plateau convexity check, which is the honest outcome).
    pub fn new(c: f64, big_r: f64) -> Result<Self, ConvexityError> {
        if !(0.0..PI).contains(&c) || c == 0.0 {
            return Err(ConvexityError::BadPlateauAngle(c));
        }
        if big_r <= FRAC_PI_4 {
            return Err(ConvexityError::IntervalTooShort(big_r));
        }
        if c >= FRAC_PI_2 {
            return Self::constant(c, big_r);
        }
        // peak of the sphere at height c exactly at t = π/4:
        // cot t_z = cos c and cos d = cos t_z / cos(π/4)
        let t_z = (1.0 / c.cos()).atan();
        let d = (t_z.cos() / FRAC_PI_4.cos()).acos();
        let arc = CapArc { t_z, d };
        let r_join = big_r - FRAC_PI_4;
        let r_close = big_r - arc.t_close();
        let cap_len = r_close - r_join;
        let w = 0.4 * cap_len;
        let r_blend_end = r_join + w;
        let (xv, xd1, xd2) = arc.jet(big_r, r_blend_end);
        let blend = poly_from_conditions(
            r_join,
            &[
                (r_join, 0, c),
                (r_join, 1, 0.0),
                (r_join, 2, 0.0),
                (r_blend_end, 0, xv),
                (r_blend_end, 1, xd1),
                (r_blend_end, 2, xd2),
            ],
        );
        Ok(XiProfile {
            c,
            big_r,
            kind: XiKind::Plateaued { r_join, blend, r_blend_end, arc, r_close },
        })
    }

    /// ξ(r), ξ′(r), ξ″(r).
    pub fn jet(&self, r: f64) -> (f64, f64, f64) {
        match &self.kind {
            XiKind::Constant => (self.c, 0.0, 0.0),
            XiKind::Plateaued { r_join, blend, r_blend_end, arc, .. } => {
                if r <= *r_join {
                    (self.c, 0.0, 0.0)
                } else if r < *r_blend_end {
                    let t = r - r_join;
                    let mut v = 0.0;
                    let mut d1 = 0.0;
                    let mut d2 = 0.0;
                    for c in blend.coeffs.iter().rev() {
                        let cf = c.to_f64();
                        d2 = d2 * t + 2.0 * d1;
                        d1 = d1 * t + v;
                        v = v * t + cf;
                    }
                    (v, d1, d2)
                } else {
                    arc.jet(self.big_r, r)
                }
            }
        }
    }

    /// End of the graph domain (the closure point, or R for a constant ξ).
    pub fn domain_end(&self) -> f64 {
        match &self.kind {
            XiKind::Constant => self.big_r,
            XiKind::Plateaued { r_close, .. } => *r_close,
        }
    }

    pub fn plateau_end(&self) -> f64 {
        match &self.kind {
            XiKind::Constant => self.big_r,
            XiKind::Plateaued { r_join, .. } => *r_join,
        }
    }

    pub fn blend_end(&self) -> f64 {
        match &self.kind {
            XiKind::Constant => self.big_r,
            XiKind::Plateaued { r_blend_end, .. } => *r_blend_end,
        }
    }

    pub fn cap_arc(&self) -> Option<CapArc> {
        match &self.kind {
            XiKind::Constant => None,
            XiKind::Plateaued { arc, .. } => Some(*arc),
        }
    }

    /// Grid report on the cap construction: range inside (0, π), C² joins by
    /// construction, concavity of the blend and cap (ξ″ ≤ 0 past the plateau).
    pub fn shape_report(&self) -> XiShapeReport {
        let end = self.domain_end();
        let pad = 1e-4 * self.big_r;
        let mut min_range = f64::INFINITY;
        let mut max_range = f64::NEG_INFINITY;
        let mut max_d2_past_plateau = f64::NEG_INFINITY;
        let n = 2048;
        for i in 0..=n {
            let r = pad + (end - 2.0 * pad) * i as f64 / n as f64;
            let (v, _, dd) = self.jet(r);
            min_range = min_range.min(v);
            max_range = max_range.max(v);
            if r > self.plateau_end() + pad {
                max_d2_past_plateau = max_d2_past_plateau.max(dd);
            }
        }
        XiShapeReport {
            range: (min_range, max_range),
            range_ok: min_range > 0.0 && max_range < PI,
            concave_past_plateau: max_d2_past_plateau <= 1e-9,
            max_d2_past_plateau,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct XiShapeReport {
    pub range: (f64, f64),
    pub range_ok: bool,
    pub concave_past_plateau: bool,
    pub max_d2_past_plateau: f64,
}

// ---------------------------------------------------------------------------
// Second fundamental form
// ---------------------------------------------------------------------------

/// Principal curvatures per distribution block at one point of the graph
/// hypersurface (inward normal; convex = positive).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SffBlocks {
    pub interval: f64,
    pub sphere_n: f64,
    pub sphere_m2: f64,
}

/// Splits the second fiber S^M into [0, π] × S^{M−1}; the metric's second
/// fiber dimension must be at least 3 so the split sphere block is ≥ 2.
fn split_dims(g: &WarpedMetric) -> Result<(&WarpProfile, &WarpProfile, u32, u32), ConvexityError> {
    match g {
        WarpedMetric::Doubly { h, f, n, m, .. } => {
            if *m < 3 {
                return Err(ConvexityError::Pipeline(format!(
                    "fiber split needs second fiber dim >= 3, got {m}"
                )));
            }
            Ok((h, f, *n, *m - 1))
        }
        _ => Err(ConvexityError::Pipeline("second fundamental form expects a doubly warped metric".into())),
    }
}

/// Closed-form principal-curvature blocks of the graph x = ξ(r).
pub fn second_fundamental_form(
    g: &WarpedMetric,
    xi: &XiProfile,
    r: f64,
) -> Result<SffBlocks, ConvexityError> {
    let (h, f, _, _) = split_dims(g)?;
    let (fv, fd, _) = f.jet(r);
    let (hv, hd, _) = h.jet(r);
    if fv <= 1e-12 || hv <= 1e-12 {
        return Err(ConvexityError::SingularNormal(r));
    }
    let (xv, xd, xdd) = xi.jet(r);
    let w2 = 1.0 + fv * fv * xd * xd;
    let w = w2.sqrt();
    let interval = -(fv * xdd + 2.0 * fd * xd + fv * fv * fd * xd * xd * xd) / (w2 * w);
    let sphere_n = -fv * xd * hd / (hv * w);
    let sphere_m2 = (1.0 / xv.tan() - fv * fd * xd) / (fv * w);
    Ok(SffBlocks { interval, sphere_n, sphere_m2 })
}

/// FD shape-operator oracle: Christoffel symbols of the explicit split-fiber
/// coordinate metric by central differences (Richardson over two steps), then
/// II(X, Y) = G(ν, ∇_X Y) on the graph's tangent frame.
pub fn sff_fd_oracle(
    g: &WarpedMetric,
    xi: &XiProfile,
    r: f64,
    step: f64,
) -> Result<SffBlocks, ConvexityError> {
    let (h, f, n, m2) = split_dims(g)?;
    let (xv, xd, xdd) = xi.jet(r);
    let chart = SplitFiberChart { h, f, n: n as usize, m2: m2 as usize };
    let dim = 2 + n as usize + m2 as usize;
    let mut x = vec![r, xv];
    for i in 0..(n as usize) {
        x.push(0.9 + 0.13 * i as f64);
    }
    for i in 0..(m2 as usize) {
        x.push(1.0 + 0.11 * i as f64);
    }

    let gamma_at = |s: f64| christoffel_fd(&chart, &x, s);
    let coarse = gamma_at(step);
    let fine = gamma_at(step / 2.0);
    let mut gamma = vec![vec![vec![0.0; dim]; dim]; dim];
    for k in 0..dim {
        for i in 0..dim {
            for j in 0..dim {
                gamma[k][i][j] = (4.0 * fine[k][i][j] - coarse[k][i][j]) / 3.0;
            }
        }
    }
    let metric = chart.metric(&x);
    let fv = f.value(r);
    let hv = h.value(r);
    if fv <= 1e-12 {
        return Err(ConvexityError::SingularNormal(r));
    }
    // inward unit normal ν = β (f²ξ′ ∂r − ∂x)
    let beta = 1.0 / (fv * (1.0 + fv * fv * xd * xd).sqrt());
    let mut nu = vec![0.0; dim];
    nu[0] = beta * fv * fv * xd;
    nu[1] = -beta;

    let pair = |a: &[f64], b: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                if metric[i][j] != 0.0 {
                    s += metric[i][j] * a[i] * b[j];
                }
            }
        }
        s
    };
    // tangent T = ∂r + ξ′ ∂x, with ∇_T T picking up the ξ″ ∂x term
    let mut t_vec = vec![0.0; dim];
    t_vec[0] = 1.0;
    t_vec[1] = xd;
    let mut nabla_tt = vec![0.0; dim];
    nabla_tt[1] = xdd;
    for c in 0..dim {
        for a in 0..dim {
            for b in 0..dim {
                if t_vec[a] != 0.0 && t_vec[b] != 0.0 {
                    nabla_tt[c] += gamma[c][a][b] * t_vec[a] * t_vec[b];
                }
            }
        }
    }
    let interval = pair(&nu, &nabla_tt) / pair(&t_vec, &t_vec);

    let block = |idx: usize| -> f64 {
        let col: Vec<f64> = (0..dim).map(|c| gamma[c][idx][idx]).collect();
        let mut s = 0.0;
        for (c, gcc) in col.iter().enumerate() {
            for i in 0..dim {
                if metric[c][i] != 0.0 {
                    s += metric[c][i] * nu[i] * gcc;
                }
            }
        }
        s / metric[idx][idx]
    };
    let sphere_n = block(2);
    let sphere_m2 = block(2 + n as usize);
    let _ = hv;
    Ok(SffBlocks { interval, sphere_n, sphere_m2 })
}

struct SplitFiberChart<'a> {
    h: &'a WarpProfile,
    f: &'a WarpProfile,
    n: usize,
    m2: usize,
}

impl SplitFiberChart<'_> {
    fn metric(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let dim = 2 + self.n + self.m2;
        let r = x[0];
        let xv = x[1];
        let hv = self.h.value(r);
        let fv = self.f.value(r);
        let mut g = vec![vec![0.0; dim]; dim];
        g[0][0] = 1.0;
        g[1][1] = fv * fv;
        // iterated polar coordinates on each unit sphere block
        let mut acc = 1.0;
        for i in 0..self.n {
            if i > 0 {
                let s = x[2 + i - 1].sin();
                acc *= s * s;
            }
            g[2 + i][2 + i] = hv * hv * acc;
        }
        let sx = xv.sin();
        let mut acc2 = sx * sx;
        for i in 0..self.m2 {
            if i > 0 {
                let s = x[2 + self.n + i - 1].sin();
                acc2 *= s * s;
            }
            g[2 + self.n + i][2 + self.n + i] = fv * fv * acc2;
        }
        g
    }
}

/// Γ from finite differences of the metric alone (independent of any
/// analytic derivative bookkeeping).
fn christoffel_fd(chart: &SplitFiberChart, x: &[f64], step: f64) -> Vec<Vec<Vec<f64>>> {
    let dim = 2 + chart.n + chart.m2;
    let g = chart.metric(x);
    let ginv = crate::curvature::invert(&g);
    let mut dg = vec![vec![vec![0.0; dim]; dim]; dim];
    let mut xp = x.to_vec();
    for k in 0..dim {
        xp[k] = x[k] + step;
        let gp = chart.metric(&xp);
        xp[k] = x[k] - step;
        let gm = chart.metric(&xp);
        xp[k] = x[k];
        for i in 0..dim {
            for j in 0..dim {
                dg[k][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * step);
            }
        }
    }
    let mut gamma = vec![vec![vec![0.0; dim]; dim]; dim];
    for k in 0..dim {
        for i in 0..dim {
            for j in i..dim {
                let mut sum = 0.0;
                for l in 0..dim {
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

/// Principal curvature of the radial level set {s = s0} in a singly warped
/// metric, inward normal toward smaller s: the umbilic value p′(s0)/p(s0)
/// (cot r0 on the unit round sphere).
pub fn radial_level_set_sff(p: &WarpProfile, s0: f64) -> f64 {
    p.d1(s0) / p.value(s0)
}

// ---------------------------------------------------------------------------
// Induced boundary metric
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct InducedBoundary {
    /// ds² + h²(s) ds_n² + p²(s) ds_{m−2}², a doubly warped metric.
    pub metric: WarpedMetric,
    pub s_total: f64,
    pub plateau_end_s: f64,
}

/// Arclength element along the graph.
fn ds_dr(f: &WarpProfile, xi: &XiProfile, r: f64) -> f64 {
    let fv = f.value(r);
    let xd = xi.jet(r).1;
    (1.0 + fv * fv * xd * xd).sqrt()
}

/// Induced metric of the graph hypersurface, arclength-reparameterized:
/// p(s) = sin(ξ(r)) f(r), h carried through (h ≡ ρ past the plateau, so its
/// reparameterization is trivial there).
pub fn induced_boundary_metric(
    g: &WarpedMetric,
    xi: &XiProfile,
) -> Result<InducedBoundary, ConvexityError> {
    let (h, f, n, m2) = split_dims(g)?;
    let (lo, _) = g.interval();
    let r_join = xi.plateau_end();
    let r_close = xi.domain_end();
    let sin_c = xi.c.sin();

    // plateau part: s = r, p = sin(c)·f; h must be constant past the plateau
    let rho = h.value(r_join);
    for i in 0..=128 {
        let r = r_join + (r_close - r_join) * i as f64 / 128.0;
        if (h.value(r) - rho).abs() > 1e-9 * rho.max(1.0) {
            return Err(ConvexityError::Pipeline(format!(
                "h must be constant past the plateau end; deviates at r = {r}"
            )));
        }
    }

    let (arc, r_blend_end) = match &xi.kind {
        XiKind::Plateaued { arc, r_blend_end, .. } => (*arc, *r_blend_end),
        XiKind::Constant => {
            // whole-interval constant ξ: plain scaling of f, s = r
            let p = f.scaled(sin_c);
            let (ilo, ihi) = g.interval();
            let metric = WarpedMetric::doubly((ilo, ihi), truncate_profile(h, ihi)?, p, n, m2)?;
            return Ok(InducedBoundary { metric, s_total: ihi, plateau_end_s: ihi });
        }
    };

    // blend-region arclength s(r) by Simpson, then the round cap is exactly
    // a sphere of radius sin(d): its arclength is sin(d)·(sphere angle ψ)
    let blend_panels = 2048usize;
    let hgrid = (r_blend_end - r_join) / blend_panels as f64;
    let mut s_blend = vec![0.0f64; blend_panels + 1];
    for i in 1..=blend_panels {
        let a = r_join + (i - 1) as f64 * hgrid;
        let b = a + hgrid;
        let mid = 0.5 * (a + b);
        let seg = (ds_dr(f, xi, a) + 4.0 * ds_dr(f, xi, mid) + ds_dr(f, xi, b)) * hgrid / 6.0;
        s_blend[i] = s_blend[i - 1] + seg;
    }
    let s_b = r_join + s_blend[blend_panels];

    // sphere angle at the blend end: cos ψ = (cos t − cos t_z cos d)/(sin t_z sin d)
    let sin_d = arc.d.sin();
    let t_b = xi.big_r - r_blend_end;
    let cos_psi_b =
        (t_b.cos() - arc.t_z.cos() * arc.d.cos()) / (arc.t_z.sin() * sin_d);
    let psi_b = cos_psi_b.clamp(-1.0, 1.0).acos();
    let s_total = s_b + sin_d * psi_b;

    // p on the cap region [r_join, S]: piecewise fit pinned to exact jets
    let r_of_s = |s: f64| -> f64 {
        // invert the blend arclength table (monotone)
        let target = s - r_join;
        let idx = s_blend.partition_point(|&v| v < target).min(blend_panels);
        let i0 = idx.saturating_sub(1);
        let frac = if s_blend[idx] > s_blend[i0] {
            (target - s_blend[i0]) / (s_blend[idx] - s_blend[i0])
        } else {
            0.0
        };
        r_join + (i0 as f64 + frac) * hgrid
    };
    let p_jet = |s: f64| -> (f64, f64, f64) {
        if s >= s_b {
            // round cap: p(s) = sin(d)·sin((S − s)/sin(d))
            let a = (s_total - s) / sin_d;
            (sin_d * a.sin(), -a.cos(), -a.sin() / sin_d)
        } else {
            let r = r_of_s(s);
            let (xv, xd, xdd) = xi.jet(r);
            let (fv, fd, fdd) = f.jet(r);
            let w = (1.0 + fv * fv * xd * xd).sqrt();
            let p = xv.sin() * fv;
            let dp_dr = xv.cos() * xd * fv + xv.sin() * fd;
            let dp_ds = dp_dr / w;
            // d²p/ds² = (d/dr (dp/ds)) / w
            let d2p_dr2 =
                -xv.sin() * xd * xd * fv + xv.cos() * xdd * fv + 2.0 * xv.cos() * xd * fd
                    + xv.sin() * fdd;
            let dw_dr = (fv * fd * xd * xd + fv * fv * xd * xdd) / w;
            let d2p_ds2 = (d2p_dr2 / w - dp_dr * dw_dr / (w * w)) / w;
            (p, dp_ds, d2p_ds2)
        }
    };

    // assemble the p profile: exact-scaled plateau pieces + pinned fit
    let plateau_p = scaled_truncated(f, sin_c, r_join)?;
    let cap_fit = crate::profiles::fit_smooth(&p_jet, (r_join, s_total), 8)?;
    let p = stitch(plateau_p, cap_fit)?;
    let h_tilde = truncate_profile(h, s_total)?;
    let metric = WarpedMetric::doubly((lo, s_total), h_tilde, p, n, m2)?;
    Ok(InducedBoundary { metric, s_total, plateau_end_s: r_join })
}

/// First pieces of `p` scaled, cut at `cut` (which may fall inside a piece).
fn scaled_truncated(
    p: &WarpProfile,
    scale: f64,
    cut: f64,
) -> Result<(Vec<f64>, Vec<Piece>), ConvexityError> {
    let schema = p
        .to_schema()
        .ok_or_else(|| ConvexityError::Pipeline("profile not schema-representable".into()))?;
    let (breaks, pieces) = match schema {
        crate::profiles::ProfileSchema::Piecewise { breakpoints, pieces, .. } => {
            (breakpoints, pieces)
        }
        crate::profiles::ProfileSchema::Analytic { .. } => {
            return Err(ConvexityError::Pipeline(
                "analytic profile: cap stitching needs a piecewise profile".into(),
            ))
        }
    };
    let s = Rational::from_f64_exact(scale);
    let mut out_breaks = vec![breaks[0]];
    let mut out_pieces = Vec::new();
    for (i, coeffs) in pieces.iter().enumerate() {
        if breaks[i] >= cut {
            break;
        }
        out_breaks.push(breaks[i + 1].min(cut));
        out_pieces.push(Piece::new(
            coeffs.iter().map(|&c| &Rational::from_f64_exact(c) * &s).collect(),
        ));
    }
    Ok((out_breaks, out_pieces))
}

/// Truncates/extends a plateau-shaped profile to a new right endpoint.
fn truncate_profile(h: &WarpProfile, new_end: f64) -> Result<WarpProfile, ConvexityError> {
    let schema = h
        .to_schema()
        .ok_or_else(|| ConvexityError::Pipeline("profile not schema-representable".into()))?;
    match schema {
        crate::profiles::ProfileSchema::Piecewise { breakpoints, pieces, .. } => {
            let mut breaks = Vec::new();
            let mut out = Vec::new();
            for (i, coeffs) in pieces.iter().enumerate() {
                if breakpoints[i] >= new_end {
                    break;
                }
                breaks.push(breakpoints[i]);
                out.push(Piece::new(
                    coeffs.iter().map(|&c| Rational::from_f64_exact(c)).collect(),
                ));
            }
            breaks.push(new_end);
            Ok(WarpProfile::piecewise(breaks, out, TAU_JOIN)?)
        }
        crate::profiles::ProfileSchema::Analytic { family, domain } => {
            Ok(WarpProfile::analytic((domain.0, new_end), family))
        }
    }
}

fn stitch(
    head: (Vec<f64>, Vec<Piece>),
    tail: WarpProfile,
) -> Result<WarpProfile, ConvexityError> {
    let (mut breaks, mut pieces) = head;
    let schema = tail.to_schema().unwrap();
    match schema {
        crate::profiles::ProfileSchema::Piecewise { breakpoints, pieces: tail_pieces, .. } => {
            for (i, coeffs) in tail_pieces.iter().enumerate() {
                breaks.push(breakpoints[i + 1]);
                pieces.push(Piece::new(
                    coeffs.iter().map(|&c| Rational::from_f64_exact(c)).collect(),
                ));
            }
        }
        _ => unreachable!("fit_smooth returns piecewise"),
    }
    // The stitch joins a scaled-exact piece to a fitted piece; the fit is
    // pinned to the same jet, but pinning happened in f64, so allow the join
    // tolerance rather than exactness.
    Ok(WarpProfile::piecewise(breaks, pieces, TAU_JOIN)?)
}

// ---------------------------------------------------------------------------
// Gluing and classification
// ---------------------------------------------------------------------------

/// Sampled principal-curvature blocks over a boundary parameterization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SffField {
    pub params: Vec<f64>,
    pub blocks: Vec<(String, Vec<f64>)>,
}

impl SffField {
    pub fn min_value(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|(_, v)| v.iter().copied())
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GlueReport {
    pub verdict: Verdict,
    pub min_sum: f64,
    pub witness: Option<(f64, String)>,
}

/// Gluing compatibility: the blockwise sum II₁ + II₂ must be strictly
/// positive over the shared boundary grid.
pub fn glue_check(a: &SffField, b: &SffField) -> Result<GlueReport, ConvexityError> {
    if a.params.len() != b.params.len()
        || a.blocks.len() != b.blocks.len()
        || a.params
            .iter()
            .zip(&b.params)
            .any(|(x, y)| (x - y).abs() > 1e-12)
        || a.blocks.iter().zip(&b.blocks).any(|((na, va), (nb, vb))| {
            na != nb || va.len() != a.params.len() || vb.len() != b.params.len()
        })
    {
        return Err(ConvexityError::BlockMismatch);
    }
    let mut min_sum = f64::INFINITY;
    let mut witness = None;
    for (bi, (name, va)) in a.blocks.iter().enumerate() {
        for (pi, &x) in a.params.iter().enumerate() {
            let sum = va[pi] + b.blocks[bi].1[pi];
            if sum < min_sum {
                min_sum = sum;
                witness = Some((x, name.clone()));
            }
        }
    }
    let verdict = if min_sum > 0.0 { Verdict::Verified } else { Verdict::Falsified };
    Ok(GlueReport { verdict, min_sum, witness: if min_sum > 0.0 { None } else { witness } })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryMember {
    /// family index (the ν the member was built for, if any)
    pub nu: f64,
    pub round_radius: f64,
    pub round_deviation: f64,
    pub min_principal: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryFamily {
    pub members: Vec<BoundaryMember>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryClass {
    Core,
    Socket,
    Neither,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub class: BoundaryClass,
    /// the ν-schedule checked for the socket property
    pub schedule: Vec<f64>,
    pub best_min_principal: f64,
}

/// Core: some member is strictly convex. Socket: for every ν in the dyadic
/// schedule some member has principal curvatures > −ν. The universally
/// quantified definition is not machine-checkable on a finite family; the
/// certificate records the schedule actually tested.
pub fn classify_boundary(
    family: &BoundaryFamily,
    tol: f64,
) -> Result<ClassifyReport, ConvexityError> {
    if family.members.is_empty() {
        return Err(ConvexityError::EmptyFamily);
    }
    for m in &family.members {
        let dev = (m.round_radius - 1.0).abs().max(m.round_deviation);
        if dev > tol {
            return Err(ConvexityError::BoundaryNotRound(dev));
        }
    }
    let schedule: Vec<f64> = (0..=10).map(|k| 1.0 / f64::powi(2.0, k)).collect();
    let best = family
        .members
        .iter()
        .map(|m| m.min_principal)
        .fold(f64::NEG_INFINITY, f64::max);
    let class = if best > 0.0 {
        BoundaryClass::Core
    } else if schedule
        .iter()
        .all(|&nu| family.members.iter().any(|m| m.min_principal > -nu))
    {
        BoundaryClass::Socket
    } else {
        BoundaryClass::Neither
    };
    Ok(ClassifyReport { class, schedule, best_min_principal: best })
}

// ---------------------------------------------------------------------------
// The disk pipeline
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageReport {
    pub name: String,
    pub verdict: Verdict,
    pub certificates: Vec<PositivityCertificate>,
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoreCertificate {
    pub schema_version: u32,
    pub n: u32,
    pub m: u32,
    pub rho: f64,
    pub c: f64,
    pub stages: Vec<StageReport>,
    pub overall: Verdict,
}

pub struct PipelineOptions {
    pub path_grid: (usize, usize),
    pub tolerance: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { path_grid: (512, 64), tolerance: 1e-6 }
    }
}

/// Certified positivity on the post-neck body, dense grid positivity on the
/// collapse neck. Lipschitz margins cannot absorb the 1/ρ² curvature spike of
/// a thin neck at desk-scale grids, while the grid check there runs where the
/// components are uniformly large; the certificate records both parts.
fn certify_fields_split(
    fields: &[(&str, &(dyn Fn(f64) -> f64 + Sync))],
    lo: f64,
    neck_end: f64,
    hi: f64,
    grid: usize,
) -> Result<(Vec<PositivityCertificate>, Verdict), ConvexityError> {
    let mut certs = Vec::new();
    let mut stage_verified = true;
    let mut falsified = false;
    for (name, field) in fields {
        let f1 = |x: &[f64]| field(x[0]);
        let neck = certify_positive(
            &f1,
            &Rectangle::new(vec![lo], vec![neck_end]),
            &[4096],
            Mode::Heuristic,
            None,
            &format!("{name} > 0 on the collapse neck"),
        )?;
        // normalized field: sign-equivalent, margin-certifiable even where
        // the component runs to the 1/ρ² scale
        let f_norm = |x: &[f64]| {
            let v = field(x[0]);
            v / (1.0 + v * v).sqrt()
        };
        let mut body = certify_positive(
            &f_norm,
            &Rectangle::new(vec![neck_end], vec![hi]),
            &[grid],
            Mode::Certified,
            None,
            &format!("{name}/sqrt(1+{name}²) > 0 past the neck"),
        )?;
        if body.verdict == Verdict::Inconclusive {
            body = crate::certify::refine(&body, &f_norm, 4)?;
        }
        stage_verified &=
            neck.verdict == Verdict::GridPositive && body.verdict == Verdict::Verified;
        falsified |= neck.verdict == Verdict::Falsified || body.verdict == Verdict::Falsified;
        certs.push(neck);
        certs.push(body);
    }
    let overall = if stage_verified {
        Verdict::Verified
    } else if falsified {
        Verdict::Falsified
    } else {
        Verdict::Inconclusive
    };
    Ok((certs, overall))
}

fn path_certificates_split(
    path: &MetricPath,
    neck_end: f64,
    grid: (usize, usize),
) -> Result<(Vec<PathCertificate>, Verdict), ConvexityError> {
    let (lo, hi) = path.guarded_interval();
    let neck =
        certify_path_on(path, Some((lo, neck_end)), (1024, grid.1), Mode::Heuristic, None, false)?;
    let mut body =
        certify_path_on(path, Some((neck_end, hi)), grid, Mode::Certified, None, true)?;
    if body.overall == Verdict::Inconclusive {
        // one refinement pass with the stored derivative bounds
        let mut refined = Vec::new();
        for (idx, cert) in body.components.iter().enumerate() {
            if cert.verdict == Verdict::Inconclusive {
                let field = |x: &[f64]| {
                    let v = path.components_at(x[0], x[1])[idx];
                    v / (1.0 + v * v).sqrt()
                };
                refined.push(crate::certify::refine(cert, &field, 4)?);
            } else {
                refined.push(cert.clone());
            }
        }
        body.overall = combine_verdicts(refined.iter().map(|c| c.verdict));
        body.components = refined;
    }
    // Verified on the margin-certified body plus dense grid positivity on the
    // collapse neck counts as a verified stage; the embedded certificates
    // record exactly which part carries a margin.
    let overall = if body.overall == Verdict::Verified && neck.overall == Verdict::GridPositive {
        Verdict::Verified
    } else {
        combine_verdicts([neck.overall, body.overall])
    };
    Ok((vec![neck, body], overall))
}

/// Full disk verification: (a) ambient Ricci positivity, (b) weak
/// convexity of the graph hypersurface with the plateau closed-form match,
/// (c) boundary metric satisfies the deformation hypotheses, (d) stage
/// one and two path certificates for the boundary, (e) the tail region is
/// isometric to the round product within tolerance.
pub fn disk_pipeline(
    n: u32,
    m: u32,
    rho: f64,
    fixture: &WarpedMetric,
    c: f64,
    opts: &PipelineOptions,
) -> Result<CoreCertificate, ConvexityError> {
    let WarpedMetric::Doubly { interval, h, f, n: fn_, m: fm, markers, rho: frho } = fixture
    else {
        return Err(ConvexityError::Pipeline("pipeline expects a doubly warped fixture".into()));
    };
    if n < 2 || m < 4 {
        return Err(ConvexityError::Pipeline(format!(
            "pipeline needs n >= 2 and m >= 4, got ({n}, {m})"
        )));
    }
    if *fn_ != n || *fm != m - 1 {
        return Err(ConvexityError::Pipeline(format!(
            "fixture dims ({fn_}, {fm}) do not match the requested (n, m−1) = ({n}, {})",
            m - 1
        )));
    }
    let markers = markers.ok_or_else(|| {
        ConvexityError::Pipeline("fixture must carry structure markers (R1, R2, R3)".into())
    })?;
    let r3 = markers
        .r3
        .ok_or_else(|| ConvexityError::Pipeline("fixture must carry the R3 marker".into()))?;
    if frho.is_none_or(|v| (v - rho).abs() > 1e-12) {
        return Err(ConvexityError::Pipeline("fixture ρ does not match the requested ρ".into()));
    }
    let (lo, hi) = *interval;
    let guard = 1e-3 * (hi - lo);
    let neck_end = (4.0 * rho).max(0.04 * (hi - lo)).min(lo + 0.5 * (hi - lo));
    let mut stages: Vec<StageReport> = Vec::new();
    let mut failed = false;

    // (a) ambient Ricci positivity -----------------------------------------
    {
        let (nf, mf) = (*fn_, *fm);
        let mk = |idx: usize| {
            move |r: f64| {
                let ric = ricci_from_jets(h.jet(r), f.jet(r), nf, mf);
                [ric.ric_rr, ric.ric_hh, ric.ric_ff][idx]
            }
        };
        let (f0, f1, f2) = (mk(0), mk(1), mk(2));
        let fields: Vec<(&str, &(dyn Fn(f64) -> f64 + Sync))> =
            vec![("ric_rr", &f0), ("ric_hh", &f1), ("ric_ff", &f2)];
        let (certs, verdict) =
            certify_fields_split(&fields, lo + guard, neck_end, hi - guard, 512)?;
        stages.push(StageReport {
            name: "a: ambient Ricci positivity".into(),
            verdict,
            certificates: certs,
            metrics: BTreeMap::new(),
            notes: vec![format!("neck/body split at r = {neck_end}")],
        });
        failed |= verdict == Verdict::Falsified;
    }

    // (b) second fundamental form -------------------------------------------
    let xi = XiProfile::new(c, hi)?;
    {
        let mut notes = Vec::new();
        let mut metrics = BTreeMap::new();
        let mut verdict = Verdict::Verified;

        if xi.c.tan() <= 0.0 || xi.c >= FRAC_PI_2 {
            verdict = Verdict::Falsified;
            notes.push(format!(
                "plateau convexity fails: cot(c) = {} <= 0 requires c < π/2",
                1.0 / xi.c.tan()
            ));
        } else {
            // plateau closed form vs FD oracle
            let mut worst_closed = 0.0f64;
            let mut worst_oracle = 0.0f64;
            for i in 1..=6 {
                let r = lo + (xi.plateau_end() - lo) * i as f64 / 7.0;
                let blocks = second_fundamental_form(fixture, &xi, r)?;
                let fv = f.value(r);
                let want = 1.0 / (c.tan() * fv);
                worst_closed = worst_closed
                    .max(blocks.interval.abs())
                    .max(blocks.sphere_n.abs())
                    .max((blocks.sphere_m2 - want).abs());
                let oracle = sff_fd_oracle(fixture, &xi, r, 1e-4)?;
                worst_oracle = worst_oracle
                    .max((oracle.interval - blocks.interval).abs())
                    .max((oracle.sphere_n - blocks.sphere_n).abs())
                    .max((oracle.sphere_m2 - blocks.sphere_m2).abs());
            }
            metrics.insert("plateau_closed_form_defect".into(), worst_closed);
            metrics.insert("plateau_oracle_defect".into(), worst_oracle);
            if worst_closed > 1e-9 || worst_oracle > 1e-9 {
                verdict = Verdict::Falsified;
                notes.push("plateau closed form (0, 0, cot c/f) not reproduced".into());
            }

            // weak convexity of all blocks over the whole graph
            let shape = xi.shape_report();
            notes.push(format!(
                "cap shape: range ({:.3}, {:.3}), concave past plateau: {} (max ξ″ = {:.2e})",
                shape.range.0, shape.range.1, shape.concave_past_plateau, shape.max_d2_past_plateau
            ));
            let end = xi.domain_end() - 1e-3;
            let mut min_t = f64::INFINITY;
            let mut min_omega = f64::INFINITY;
            let mut max_theta = 0.0f64;
            let nodes = 4096;
            for i in 0..=nodes {
                let r = (lo + guard) + (end - lo - guard) * i as f64 / nodes as f64;
                let b = second_fundamental_form(fixture, &xi, r)?;
                min_t = min_t.min(b.interval);
                min_omega = min_omega.min(b.sphere_m2);
                max_theta = max_theta.max(b.sphere_n.abs());
            }
            metrics.insert("min_interval_block".into(), min_t);
            metrics.insert("min_sphere_m2_block".into(), min_omega);
            metrics.insert("max_abs_sphere_n_block".into(), max_theta);
            if min_t < -1e-9 || min_omega <= 0.0 || max_theta > 1e-9 {
                verdict = Verdict::Falsified;
                notes.push("weak convexity fails on the graph hypersurface".into());
            }
        }
        stages.push(StageReport {
            name: "b: hypersurface weak convexity and plateau closed form".into(),
            verdict,
            certificates: vec![],
            metrics,
            notes,
        });
        failed |= verdict == Verdict::Falsified;
    }

    // (c) induced boundary satisfies the deformation hypotheses -------------
    let induced = if failed {
        None
    } else {
        Some(induced_boundary_metric(fixture, &xi)?)
    };
    let mut boundary_with_markers = None;
    if let Some(ind) = &induced {
        let mut verdict = Verdict::Verified;
        let mut notes = Vec::new();
        let bm = ind
            .metric
            .clone()
            .with_markers(crate::curvature::Markers { r1: markers.r1, r2: markers.r2, r3: None }, rho)?;
        let WarpedMetric::Doubly { h: bh, f: bp, .. } = &bm else { unreachable!() };
        let checks: [(&WarpProfile, u8, (f64, f64), bool, &str); 4] = [
            (bp, 2, (lo, markers.r1), true, "p'' > 0 on (0, R1)"),
            (bp, 2, (markers.r1, ind.s_total), false, "p'' < 0 on (R1, S)"),
            (bh, 2, (lo, markers.r2), false, "h'' < 0 on (0, R2)"),
            (bp, 0, (lo + guard, ind.s_total - guard), true, "p > 0 on the interior"),
        ];
        for (prof, order, range, positive, name) in checks {
            if let Err(e) = grid_sign_check(prof, order, range, positive, name) {
                verdict = Verdict::Falsified;
                notes.push(e.to_string());
            }
        }
        if let Err(e) = crate::isotopy::check_closed_sphere(&bm, 1e-5) {
            verdict = Verdict::Falsified;
            notes.push(e.to_string());
        }
        stages.push(StageReport {
            name: "c: induced boundary metric satisfies the deformation hypotheses".into(),
            verdict,
            certificates: vec![],
            metrics: BTreeMap::from([("s_total".into(), ind.s_total)]),
            notes,
        });
        failed |= verdict == Verdict::Falsified;
        boundary_with_markers = Some(bm);
    } else {
        stages.push(StageReport {
            name: "c: induced boundary metric satisfies the deformation hypotheses".into(),
            verdict: Verdict::Inconclusive,
            certificates: vec![],
            metrics: BTreeMap::new(),
            notes: vec!["skipped: an earlier stage failed".into()],
        });
    }

    // (d) boundary path certificates -----------------------------------------
    if let (Some(bm), false) = (&boundary_with_markers, failed) {
        let mut verdicts = Vec::new();
        let mut certs = Vec::new();
        let mut notes = Vec::new();
        let stage1 = stage_one_path(bm)?;
        let (c1, v1) = path_certificates_split(&stage1, neck_end, opts.path_grid)?;
        verdicts.push(v1);
        for pc in c1 {
            certs.extend(pc.components);
        }
        let capped = stage1.metric_at(1.0)?;
        let stage2 = stage_two_path(&capped)?;
        let (c2, v2) = path_certificates_split(&stage2, neck_end, opts.path_grid)?;
        verdicts.push(v2);
        for pc in c2 {
            certs.extend(pc.components);
        }
        notes.push("stage-one and stage-two certificates, neck/body split".into());
        let verdict = combine_verdicts(verdicts);
        stages.push(StageReport {
            name: "d: boundary deformation path certificates".into(),
            verdict,
            certificates: certs,
            metrics: BTreeMap::new(),
            notes,
        });
    } else {
        stages.push(StageReport {
            name: "d: boundary deformation path certificates".into(),
            verdict: Verdict::Inconclusive,
            certificates: vec![],
            metrics: BTreeMap::new(),
            notes: vec!["skipped: an earlier stage failed".into()],
        });
    }

    // (e) round product tail --------------------------------------------------
    {
        let mut max_h = 0.0f64;
        let mut max_f = 0.0f64;
        let nodes = 1024;
        for i in 0..=nodes {
            let r = r3 + (hi - guard - r3) * i as f64 / nodes as f64;
            max_h = max_h.max((h.value(r) - rho).abs());
            max_f = max_f.max((f.value(r) - (r - r3 + FRAC_PI_8).cos()).abs());
        }
        let verdict = if max_h <= opts.tolerance && max_f <= opts.tolerance {
            Verdict::Verified
        } else {
            Verdict::Falsified
        };
        stages.push(StageReport {
            name: "e: tail isometric to the round product".into(),
            verdict,
            certificates: vec![],
            metrics: BTreeMap::from([
                ("max_h_deviation".into(), max_h),
                ("max_f_deviation".into(), max_f),
            ]),
            notes: vec![format!("checked on [R3, R] = [{r3}, {hi}]")],
        });
    }

    let overall = combine_verdicts(stages.iter().map(|s| s.verdict));
    Ok(CoreCertificate {
        schema_version: crate::certify::SCHEMA_VERSION,
        n,
        m,
        rho,
        c,
        stages,
        overall,
    })
}
