//! Deformation paths of warped product metrics and their certification.
//!
//! Stage one deforms the second warping function of a doubly warped sphere to
//! a concave cap through a convex combination; stage two continues from the
//! capped metric to a round sphere. The boundary isotopy deforms a singly
//! warped profile to the round one. Every path certifies positivity of its
//! curvature components over the (r, λ) rectangle through the certify engine.

use crate::certify::{
    certify_positive, CertifyError, Mode, PositivityCertificate, Rectangle, Verdict,
};
use crate::curvature::{ricci_from_jets, CurvatureError, Markers, WarpedMetric, BOUNDARY_GUARD};
use crate::profiles::{
    convex_combine, poly_from_conditions, validate_closure, ClosureSpec, ProfileError,
    WarpProfile, TAU_JOIN,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IsotopyError {
    #[error("hypothesis violated: {condition} at r = {witness} (value {value:e})")]
    HypothesisViolated { condition: String, witness: f64, value: f64 },
    #[error("no admissible concave cap: {constraint}")]
    InfeasibleCap { constraint: String },
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error("operation expects a {0} warped metric")]
    WrongKind(&'static str),
}

/// Default (r, λ) certification grid.
pub const DEFAULT_PATH_GRID: (usize, usize) = (512, 64);

/// Grid sign check of a profile derivative over an open interval. The
/// interval is shrunk by one node spacing at each end so that strict
/// inequalities that degenerate to equalities at the endpoints stay testable.
pub fn grid_sign_check(
    p: &WarpProfile,
    order: u8,
    interval: (f64, f64),
    positive: bool,
    condition: &str,
) -> Result<(), IsotopyError> {
    let n = 512usize;
    let (a, b) = interval;
    let pad = (b - a) / n as f64;
    for i in 0..=n {
        let r = (a + pad) + (b - a - 2.0 * pad) * i as f64 / n as f64;
        let jet = p.jet(r);
        let v = match order {
            0 => jet.0,
            1 => jet.1,
            _ => jet.2,
        };
        let ok = if positive { v > 0.0 } else { v < 0.0 };
        if !ok {
            return Err(IsotopyError::HypothesisViolated {
                condition: condition.to_string(),
                witness: r,
                value: v,
            });
        }
    }
    Ok(())
}

fn grid_constant_check(
    p: &WarpProfile,
    interval: (f64, f64),
    value: f64,
    tol: f64,
    condition: &str,
) -> Result<(), IsotopyError> {
    let n = 256usize;
    let (a, b) = interval;
    for i in 0..=n {
        let r = a + (b - a) * i as f64 / n as f64;
        let v = p.value(r);
        if (v - value).abs() > tol {
            return Err(IsotopyError::HypothesisViolated {
                condition: condition.to_string(),
                witness: r,
                value: v - value,
            });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Paths
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageTag {
    One,
    Two,
    BoundaryIsotopy,
}

#[derive(Debug, Clone)]
pub enum PathFamily {
    Doubly {
        h0: WarpProfile,
        h1: WarpProfile,
        f0: WarpProfile,
        f1: WarpProfile,
        n: u32,
        m: u32,
    },
    Singly {
        p0: WarpProfile,
        p1: WarpProfile,
        q: u32,
    },
}

/// A λ-family of warped metrics given by convex combination of endpoint
/// profiles. At the λ-range endpoints it reproduces them exactly.
#[derive(Debug, Clone)]
pub struct MetricPath {
    pub interval: (f64, f64),
    pub lambda_range: (f64, f64),
    pub stage: StageTag,
    pub family: PathFamily,
}

impl MetricPath {
    fn mu(&self, lambda: f64) -> f64 {
        (lambda - self.lambda_range.0) / (self.lambda_range.1 - self.lambda_range.0)
    }

    /// The metric at parameter λ (profiles combined convexly).
    pub fn metric_at(&self, lambda: f64) -> Result<WarpedMetric, IsotopyError> {
        let mu = self.mu(lambda).clamp(0.0, 1.0);
        match &self.family {
            PathFamily::Doubly { h0, h1, f0, f1, n, m } => {
                let h = convex_combine(h0, h1, mu)?;
                let f = convex_combine(f0, f1, mu)?;
                Ok(WarpedMetric::doubly(self.interval, h, f, *n, *m)?)
            }
            PathFamily::Singly { p0, p1, q } => {
                let p = convex_combine(p0, p1, mu)?;
                Ok(WarpedMetric::singly(self.interval, p, *q)?)
            }
        }
    }

    /// Curvature components at (r, λ) straight from blended jets; the field
    /// functions handed to the certify engine.
    pub fn components_at(&self, r: f64, lambda: f64) -> Vec<f64> {
        let mu = self.mu(lambda).clamp(0.0, 1.0);
        match &self.family {
            PathFamily::Doubly { h0, h1, f0, f1, n, m } => {
                let blend = |a: (f64, f64, f64), b: (f64, f64, f64)| {
                    (
                        (1.0 - mu) * a.0 + mu * b.0,
                        (1.0 - mu) * a.1 + mu * b.1,
                        (1.0 - mu) * a.2 + mu * b.2,
                    )
                };
                let hj = blend(h0.jet(r), h1.jet(r));
                let fj = blend(f0.jet(r), f1.jet(r));
                let ric = ricci_from_jets(hj, fj, *n, *m);
                vec![ric.ric_rr, ric.ric_hh, ric.ric_ff]
            }
            PathFamily::Singly { p0, p1, .. } => {
                let a = p0.jet(r);
                let b = p1.jet(r);
                let v = (1.0 - mu) * a.0 + mu * b.0;
                let d1 = (1.0 - mu) * a.1 + mu * b.1;
                let d2 = (1.0 - mu) * a.2 + mu * b.2;
                vec![-d2 / v, (1.0 - d1 * d1) / (v * v)]
            }
        }
    }

    pub fn component_names(&self) -> Vec<&'static str> {
        match &self.family {
            PathFamily::Doubly { .. } => vec!["ric_rr", "ric_hh", "ric_ff"],
            PathFamily::Singly { .. } => vec!["sec_radial", "sec_fiber"],
        }
    }

    /// Interval with guard bands at collapsed ends (both ends collapse for a
    /// closed sphere; the boundary isotopy profile collapses at both too).
    pub fn guarded_interval(&self) -> (f64, f64) {
        let (lo, hi) = self.interval;
        let eps = BOUNDARY_GUARD * (hi - lo);
        (lo + eps, hi - eps)
    }
}

// ---------------------------------------------------------------------------
// Stage constructions
// ---------------------------------------------------------------------------

/// Concave replacement for an inflected profile: the quartic through
///   f1′(0) = 0, f1(R) = 0, f1′(R) = −1, f1″(R) = 0, f1(R1) = f(R1),
/// grid-verified concave. If `f` is already concave it is returned as is.
pub fn build_concave_cap(
    f: &WarpProfile,
    r1: f64,
    big_r: f64,
) -> Result<WarpProfile, IsotopyError> {
    let value_at_r1 = f.value(r1);
    if value_at_r1 <= 0.0 {
        return Err(IsotopyError::InfeasibleCap {
            constraint: format!("f(R1) = {value_at_r1} must be positive"),
        });
    }
    // already concave everywhere: nothing to do
    if grid_sign_check(f, 2, (0.0, big_r), false, "f'' < 0").is_ok() {
        return Ok(f.clone());
    }
    // concavity with f1(R) = 0, f1′(R) = −1 forces f1 below the end tangent
    if value_at_r1 >= big_r - r1 {
        return Err(IsotopyError::InfeasibleCap {
            constraint: format!(
                "tangent-line bound: f(R1) = {value_at_r1} >= R - R1 = {}",
                big_r - r1
            ),
        });
    }
    let piece = poly_from_conditions(
        0.0,
        &[
            (0.0, 1, 0.0),
            (big_r, 0, 0.0),
            (big_r, 1, -1.0),
            (big_r, 2, 0.0),
            (r1, 0, value_at_r1),
        ],
    );
    let cap = WarpProfile::piecewise(vec![0.0, big_r], vec![piece], TAU_JOIN)?;
    if cap.value(0.0) <= 0.0 {
        return Err(IsotopyError::InfeasibleCap {
            constraint: format!("quartic cap has f1(0) = {} <= 0", cap.value(0.0)),
        });
    }
    grid_sign_check(&cap, 2, (0.0, big_r), false, "quartic cap concavity f1'' < 0").map_err(
        |e| match e {
            IsotopyError::HypothesisViolated { witness, value, .. } => IsotopyError::InfeasibleCap {
                constraint: format!(
                    "no concave interpolant at degree 4: f1''({witness}) = {value:e} >= 0"
                ),
            },
            other => other,
        },
    )?;
    Ok(cap)
}

/// Concave cap with a degree-escalation fallback. The canonical quartic is
/// rigid: for profiles whose value at R1 is small against the interval
/// length (the thin induced boundaries), no degree-4 interpolant is concave.
/// The fallback is a canonical two-piece C² cap: a long gentle droop joined
/// to a round-style quartic drop carrying the unit end slope. Both pieces
/// are grid-verified concave.
pub fn concave_cap_flexible(
    f: &WarpProfile,
    r1: f64,
    big_r: f64,
) -> Result<WarpProfile, IsotopyError> {
    match build_concave_cap(f, r1, big_r) {
        Ok(cap) => return Ok(cap),
        Err(IsotopyError::InfeasibleCap { .. }) => {}
        Err(other) => return Err(other),
    }
    let value = f.value(r1);
    // Pieces, right to left: a quartic drop on [s0, R] carrying the unit end
    // slope (join slope −d0), a cubic whose curvature ramps linearly from −ε
    // to the drop's join curvature κ0 on [s1, s0], and a quadratic droop
    // q = a0 − ε s²/2 on [0, s1]. With β = s0 − s1 = d0/|κ0| and
    // ε = (d0 − |κ0|β/2)/(s0 − β/2) the joins are C² and the slope budget
    // from 0 to −d0 comes out exact; everything is concave by construction
    // except the drop, which is grid-checked.
    let d0 = 0.25f64;
    let acos = d0.acos();
    let root = (1.0 - d0 * d0).sqrt();
    let mut v0 = value;
    let mut pieces = None;
    for _ in 0..48 {
        if v0 <= 0.0 {
            return Err(IsotopyError::InfeasibleCap {
                constraint: "fallback cap: droop exhausts the profile value".into(),
            });
        }
        let len = v0 * acos / root;
        let s0 = big_r - len;
        if s0 <= r1 + 1e-6 {
            return Err(IsotopyError::InfeasibleCap {
                constraint: "fallback cap: drop region swallows the interpolation point".into(),
            });
        }
        let drop = poly_from_conditions(
            s0,
            &[(s0, 0, v0), (s0, 1, -d0), (big_r, 0, 0.0), (big_r, 1, -1.0), (big_r, 2, 0.0)],
        );
        let kappa0 = 2.0 * drop.coeffs.get(2).map(|c| c.to_f64()).unwrap_or(0.0);
        if kappa0 >= 0.0 {
            return Err(IsotopyError::InfeasibleCap {
                constraint: "fallback cap: drop join curvature not negative".into(),
            });
        }
        let beta = d0 / (-kappa0);
        let eps = (d0 + kappa0 * beta / 2.0) / (s0 - beta / 2.0);
        let s1 = s0 - beta;
        if eps <= 0.0 || s1 <= r1 {
            return Err(IsotopyError::InfeasibleCap {
                constraint: "fallback cap: curvature-ramp geometry infeasible".into(),
            });
        }
        let ramp = poly_from_conditions(
            s1,
            &[(s1, 2, -eps), (s0, 0, v0), (s0, 1, -d0), (s0, 2, kappa0)],
        );
        // droop: a0 − ε s²/2 with a0 from continuity at s1 (the ramp is in
        // local coordinates at s1, so its value there is the constant term)
        let ramp_at_s1 = ramp.coeffs.first().map(|c| c.to_f64()).unwrap_or(0.0);
        let a0 = ramp_at_s1 + eps * s1 * s1 / 2.0;
        let droop = poly_from_conditions(0.0, &[(0.0, 0, a0), (0.0, 1, 0.0), (0.0, 2, -eps)]);
        // interpolation residual drives the outer iteration
        let q_at_r1 = a0 - eps * r1 * r1 / 2.0;
        let residual = q_at_r1 - value;
        if residual.abs() < 1e-13 {
            pieces = Some((vec![0.0, s1, s0, big_r], vec![droop, ramp, drop]));
            break;
        }
        v0 -= residual;
        pieces = Some((vec![0.0, s1, s0, big_r], vec![droop, ramp, drop]));
    }
    let (breaks, cap_pieces) = pieces.unwrap();
    let cap = WarpProfile::piecewise(breaks, cap_pieces, TAU_JOIN)?;
    if cap.value(0.0) <= 0.0 {
        return Err(IsotopyError::InfeasibleCap {
            constraint: format!("fallback cap has f1(0) = {} <= 0", cap.value(0.0)),
        });
    }
    grid_sign_check(&cap, 2, (0.0, big_r), false, "fallback cap concavity f1'' < 0").map_err(
        |e| match e {
            IsotopyError::HypothesisViolated { witness, value, .. } => {
                IsotopyError::InfeasibleCap {
                    constraint: format!(
                        "no concave two-piece interpolant: f1''({witness}) = {value:e} >= 0"
                    ),
                }
            }
            other => other,
        },
    )?;
    Ok(cap)
}

fn require_doubly(
    g: &WarpedMetric,
) -> Result<((f64, f64), &WarpProfile, &WarpProfile, u32, u32, Option<Markers>), IsotopyError> {
    match g {
        WarpedMetric::Doubly { interval, h, f, n, m, markers, .. } => {
            Ok((*interval, h, f, *n, *m, *markers))
        }
        _ => Err(IsotopyError::WrongKind("doubly")),
    }
}

/// Validates the closed-sphere closure of a doubly warped metric:
/// h collapses at the left (flat at the right), f collapses at the right
/// (flat at the left), both positive away from their zeros.
pub fn check_closed_sphere(g: &WarpedMetric, tol: f64) -> Result<(), IsotopyError> {
    let (interval, h, f, ..) = require_doubly(g)?;
    let h_spec = ClosureSpec::collapse_at_left(interval).with_constraint(interval.1, 1, 0.0);
    let f_spec = ClosureSpec::collapse_at_right(interval).with_constraint(interval.0, 1, 0.0);
    for (name, p, spec) in [("h", h, h_spec), ("f", f, f_spec)] {
        let report = validate_closure(p, &spec, tol);
        if !report.pass {
            let worst = report
                .checks
                .iter()
                .filter(|c| !c.pass)
                .max_by(|a, b| a.residual.partial_cmp(&b.residual).unwrap());
            let (witness, value) = worst
                .map(|c| (c.point, c.residual))
                .or_else(|| {
                    report.positivity.as_ref().map(|s| (s.argmin, s.grid_min))
                })
                .unwrap_or((interval.0, f64::NAN));
            return Err(IsotopyError::HypothesisViolated {
                condition: format!("{name} closure ({:?})", report.role),
                witness,
                value,
            });
        }
    }
    Ok(())
}

/// Stage one: keep h, deform f to its concave cap. Hypotheses (grid-verified):
/// f″ > 0 on (0, R1), f″ < 0 on (R1, R), h″ < 0 on (0, R2), h ≡ ρ on [R2, R].
pub fn stage_one_path(g: &WarpedMetric) -> Result<MetricPath, IsotopyError> {
    let (interval, h, f, n, m, markers) = require_doubly(g)?;
    let markers = markers.ok_or(IsotopyError::HypothesisViolated {
        condition: "structure markers (R1, R2) required".into(),
        witness: interval.0,
        value: f64::NAN,
    })?;
    let (lo, hi) = interval;
    check_closed_sphere(g, 1e-6)?;
    grid_sign_check(f, 2, (lo, markers.r1), true, "f'' > 0 on (0, R1)")?;
    grid_sign_check(f, 2, (markers.r1, hi), false, "f'' < 0 on (R1, R)")?;
    grid_sign_check(h, 2, (lo, markers.r2), false, "h'' < 0 on (0, R2)")?;
    let rho = h.value(hi);
    grid_constant_check(h, (markers.r2, hi), rho, 1e-9 * rho.max(1.0), "h ≡ ρ on [R2, R]")?;

    let cap = concave_cap_flexible(f, markers.r1, hi)?;
    Ok(MetricPath {
        interval,
        lambda_range: (0.0, 1.0),
        stage: StageTag::One,
        family: PathFamily::Doubly {
            h0: h.clone(),
            h1: h.clone(),
            f0: f.clone(),
            f1: cap,
            n,
            m,
        },
    })
}

/// Round doubly warped profiles on [0, R] closing smoothly at both ends:
/// radius a = 2R/π so that h2(0) = 0, h2′(0) = 1, f2(R) = 0, f2′(R) = −1.
pub fn round_targets(interval: (f64, f64)) -> (WarpProfile, WarpProfile) {
    let len = interval.1 - interval.0;
    let a = 2.0 * len / PI;
    let h2 = WarpProfile::analytic(
        interval,
        crate::profiles::AnalyticFamily::Sin { amp: a, freq: 1.0 / a, phase: -interval.0 / a },
    );
    let f2 = WarpProfile::analytic(
        interval,
        crate::profiles::AnalyticFamily::Cos { amp: a, freq: 1.0 / a, phase: -interval.0 / a },
    );
    (h2, f2)
}

/// Stage two: from a capped metric (h concave-down-then-constant, f concave
/// down) to the round doubly warped sphere, both profiles moving convexly
/// over λ ∈ [1, 2].
pub fn stage_two_path(g: &WarpedMetric) -> Result<MetricPath, IsotopyError> {
    let (interval, h, f, n, m, _) = require_doubly(g)?;
    check_closed_sphere(g, 1e-6)?;
    let (lo, hi) = interval;
    grid_sign_check(f, 2, (lo, hi), false, "f'' < 0 (concave cap)")?;
    // h concave-down-then-constant: h'' <= 0 with tolerance
    let n_nodes = 512;
    for i in 0..=n_nodes {
        let r = lo + (hi - lo) * i as f64 / n_nodes as f64;
        let d2 = h.d2(r);
        if d2 > 1e-9 {
            return Err(IsotopyError::HypothesisViolated {
                condition: "h'' <= 0 (concave-down-then-constant)".into(),
                witness: r,
                value: d2,
            });
        }
    }
    let (h2, f2) = round_targets(interval);
    Ok(MetricPath {
        interval,
        lambda_range: (1.0, 2.0),
        stage: StageTag::Two,
        family: PathFamily::Doubly { h0: h.clone(), h1: h2, f0: f.clone(), f1: f2, n, m },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryVariant {
    /// Round target (S/π)·sin(πs/S): unit endpoint slopes, smooth closure.
    Corrected,
    /// Round target S·sin(πs/S) exactly as printed; endpoint slopes ±π break
    /// smooth closure, so certification restricts to the open interior.
    AsInPaper,
}

/// The boundary isotopy p_λ = (1−λ)p + λ·amp·sin(πs/S) of a singly warped
/// metric with concave p collapsing at both ends.
pub fn connect_boundary_path(
    p: &WarpProfile,
    q: u32,
    variant: BoundaryVariant,
) -> Result<MetricPath, IsotopyError> {
    let interval = p.domain();
    let (lo, hi) = interval;
    let s_len = hi - lo;
    grid_sign_check(p, 2, interval, false, "p'' < 0 (concave boundary profile)")?;
    grid_sign_check(p, 0, interval, true, "p > 0 on the interior")?;
    for (point, target, what) in [(lo, 0.0, "p(0) = 0"), (hi, 0.0, "p(S) = 0")] {
        let v = p.value(point);
        if (v - target).abs() > 1e-6 {
            return Err(IsotopyError::HypothesisViolated {
                condition: what.into(),
                witness: point,
                value: v,
            });
        }
    }
    if matches!(variant, BoundaryVariant::Corrected) {
        for (point, target, what) in [(lo, 1.0, "p'(0) = 1"), (hi, -1.0, "p'(S) = -1")] {
            let v = p.d1(point);
            if (v - target).abs() > 1e-6 {
                return Err(IsotopyError::HypothesisViolated {
                    condition: what.into(),
                    witness: point,
                    value: v,
                });
            }
        }
    }
    let amp = match variant {
        BoundaryVariant::Corrected => s_len / PI,
        BoundaryVariant::AsInPaper => s_len,
    };
    let round = WarpProfile::analytic(
        interval,
        crate::profiles::AnalyticFamily::Sin {
            amp,
            freq: PI / s_len,
            phase: -lo * PI / s_len,
        },
    );
    Ok(MetricPath {
        interval,
        lambda_range: (0.0, 1.0),
        stage: StageTag::BoundaryIsotopy,
        family: PathFamily::Singly { p0: p.clone(), p1: round, q },
    })
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathCertificate {
    pub schema_version: u32,
    pub stage: StageTag,
    pub lambda_range: (f64, f64),
    pub components: Vec<PositivityCertificate>,
    pub overall: Verdict,
}

pub fn combine_verdicts(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut overall = Verdict::Verified;
    for v in verdicts {
        overall = match (overall, v) {
            (_, Verdict::Falsified) | (Verdict::Falsified, _) => Verdict::Falsified,
            (_, Verdict::Inconclusive) | (Verdict::Inconclusive, _) => Verdict::Inconclusive,
            (_, Verdict::GridPositive) | (Verdict::GridPositive, _) => Verdict::GridPositive,
            _ => Verdict::Verified,
        };
    }
    overall
}

/// Certifies every curvature component of the path over an (r, λ) rectangle.
/// `r_range` defaults to the guarded interval. With `normalize` the field
/// handed to the certifier is ric/sqrt(1 + ric²): same sign everywhere, same
/// witnesses, but with the gradient suppressed in regions where the component
/// is huge (thin collapse necks sweep the curvature scale by 1/ρ² along the
/// deformation, which no raw-field Lipschitz margin can absorb).
pub fn certify_path_on(
    path: &MetricPath,
    r_range: Option<(f64, f64)>,
    grid: (usize, usize),
    mode: Mode,
    l_bound: Option<f64>,
    normalize: bool,
) -> Result<PathCertificate, IsotopyError> {
    let (r_lo, r_hi) = r_range.unwrap_or_else(|| path.guarded_interval());
    let domain = Rectangle::new(
        vec![r_lo, path.lambda_range.0],
        vec![r_hi, path.lambda_range.1],
    );
    let counts = [grid.0, grid.1];
    let names = path.component_names();
    let mut components = Vec::with_capacity(names.len());
    for (idx, name) in names.iter().enumerate() {
        let cert = if normalize {
            let field = |x: &[f64]| {
                let v = path.components_at(x[0], x[1])[idx];
                v / (1.0 + v * v).sqrt()
            };
            let claim = format!(
                "{name}/sqrt(1+{name}²) > 0 along stage {:?} over (r, λ)",
                path.stage
            );
            certify_positive(&field, &domain, &counts, mode, l_bound, &claim)?
        } else {
            let field = |x: &[f64]| path.components_at(x[0], x[1])[idx];
            let claim = format!("{name} > 0 along stage {:?} over (r, λ)", path.stage);
            certify_positive(&field, &domain, &counts, mode, l_bound, &claim)?
        };
        components.push(cert);
    }
    let overall = combine_verdicts(components.iter().map(|c| c.verdict));
    Ok(PathCertificate {
        schema_version: crate::certify::SCHEMA_VERSION,
        stage: path.stage,
        lambda_range: path.lambda_range,
        components,
        overall,
    })
}

pub fn certify_path(
    path: &MetricPath,
    grid: (usize, usize),
    mode: Mode,
) -> Result<PathCertificate, IsotopyError> {
    certify_path_on(path, None, grid, mode, None, false)
}

// ---------------------------------------------------------------------------
// Path serialization: endpoint profile refs plus λ-range
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathSchema {
    pub schema_version: u32,
    pub stage: StageTag,
    pub lambda_range: (f64, f64),
    pub interval: (f64, f64),
    pub profiles: Vec<(String, crate::profiles::ProfileSchema)>,
    pub dims: Vec<u32>,
}

impl MetricPath {
    pub fn to_schema(&self) -> Option<PathSchema> {
        let (profiles, dims) = match &self.family {
            PathFamily::Doubly { h0, h1, f0, f1, n, m } => (
                vec![
                    ("h0".to_string(), h0.to_schema()?),
                    ("h1".to_string(), h1.to_schema()?),
                    ("f0".to_string(), f0.to_schema()?),
                    ("f1".to_string(), f1.to_schema()?),
                ],
                vec![*n, *m],
            ),
            PathFamily::Singly { p0, p1, q } => (
                vec![("p0".to_string(), p0.to_schema()?), ("p1".to_string(), p1.to_schema()?)],
                vec![*q],
            ),
        };
        Some(PathSchema {
            schema_version: crate::certify::SCHEMA_VERSION,
            stage: self.stage,
            lambda_range: self.lambda_range,
            interval: self.interval,
            profiles,
            dims,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::ricci_doubly_warped;
    use crate::fixtures;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn cap_returns_cos_when_it_fits() {
        // cosine satisfies all five constraints and is concave: returned as is
        let f = WarpProfile::analytic(
            (0.0, FRAC_PI_2),
            crate::profiles::AnalyticFamily::Cos { amp: 1.0, freq: 1.0, phase: 0.0 },
        );
        let cap = build_concave_cap(&f, 0.4, FRAC_PI_2).unwrap();
        for i in 0..=32 {
            let r = FRAC_PI_2 * i as f64 / 32.0;
            assert_eq!(cap.value(r), f.value(r));
        }
    }

    #[test]
    fn cap_for_the_inflected_fixture_is_concave() {
        let g = fixtures::s5_paths_fixture();
        let WarpedMetric::Doubly { f, markers, interval, .. } = &g else { unreachable!() };
        let cap = build_concave_cap(f, markers.unwrap().r1, interval.1).unwrap();
        // endpoint data и interpolation
        assert!(cap.d1(0.0).abs() < 1e-9);
        assert!(cap.value(interval.1).abs() < 1e-9);
        assert!((cap.d1(interval.1) + 1.0).abs() < 1e-9);
        assert!((cap.value(markers.unwrap().r1) - f.value(markers.unwrap().r1)).abs() < 1e-9);
        assert!(grid_sign_check(&cap, 2, (0.0, interval.1), false, "concave").is_ok());
        assert!(cap.value(0.0) > 0.0);
    }

    #[test]
    fn cap_infeasible_when_value_exceeds_tangent_bound() {
        // f(R1) above the line through (R, 0) with slope −1: no concave cap
        let f = poly_from_conditions(
            0.0,
            &[(0.0, 0, 1.4), (0.0, 1, 0.0), (1.0, 0, 1.45), (1.5, 0, 0.0), (1.5, 1, -1.0)],
        );
        let f = WarpProfile::piecewise(vec![0.0, 1.5], vec![f], TAU_JOIN).unwrap();
        let err = build_concave_cap(&f, 1.0, 1.5).unwrap_err();
        assert!(matches!(err, IsotopyError::InfeasibleCap { .. }), "{err}");
    }

    #[test]
    fn stage_one_rejects_broken_hypotheses() {
        // h not constant past R2: use the round sphere profiles with fake markers
        let g = fixtures::round_sphere_fixture(1.0, 2, 2)
            .with_markers(Markers { r1: 0.3, r2: 0.8, r3: None }, 0.4)
            .unwrap();
        let err = stage_one_path(&g).unwrap_err();
        assert!(matches!(err, IsotopyError::HypothesisViolated { .. }), "{err}");
    }

    #[test]
    fn stage_one_endpoint_reproduces_base_metric() {
        let g = fixtures::s5_paths_fixture();
        let path = stage_one_path(&g).unwrap();
        let at0 = path.metric_at(0.0).unwrap();
        for r in [0.2, 0.7, 1.2] {
            let a = ricci_doubly_warped(&g, r).unwrap();
            let b = ricci_doubly_warped(&at0, r).unwrap();
            assert_eq!(a, b, "λ=0 must reproduce the base metric exactly");
        }
    }

    #[test]
    fn stage_two_endpoint_is_round() {
        let g = fixtures::s5_paths_fixture();
        let stage1 = stage_one_path(&g).unwrap();
        let capped = stage1.metric_at(1.0).unwrap();
        let stage2 = stage_two_path(&capped).unwrap();
        let end = stage2.metric_at(2.0).unwrap();
        let (lo, hi) = end.interval();
        let a = 2.0 * (hi - lo) / PI;
        let want = 4.0 / (a * a); // (n+m)/a²
        for i in 1..20 {
            let r = lo + (hi - lo) * i as f64 / 20.0;
            let ric = ricci_doubly_warped(&end, r).unwrap();
            assert!((ric.ric_rr - want).abs() < 1e-9, "rr at {r}: {}", ric.ric_rr);
            assert!((ric.ric_hh - want).abs() < 1e-9);
            assert!((ric.ric_ff - want).abs() < 1e-9);
        }
        // λ=2 endpoint passes the round-closure check
        check_closed_sphere(&end, 1e-9).unwrap();
    }

    #[test]
    fn stage_concatenation_is_exact() {
        let g = fixtures::s5_paths_fixture();
        let stage1 = stage_one_path(&g).unwrap();
        let capped = stage1.metric_at(1.0).unwrap();
        let stage2 = stage_two_path(&capped).unwrap();
        let end1 = stage1.metric_at(1.0).unwrap();
        let start2 = stage2.metric_at(1.0).unwrap();
        for r in [0.1, 0.5, 0.9, 1.3] {
            let a = ricci_doubly_warped(&end1, r).unwrap();
            let b = ricci_doubly_warped(&start2, r).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn monotone_ric_rr_in_lambda_up_to_r1() {
        // Along stage one, ric_rr at fixed r <= R1 is non-decreasing in λ:
        // W = f1″f − f″f1 <= 0 there (f″ > 0 >= f1″).
        let g = fixtures::s5_paths_fixture();
        let WarpedMetric::Doubly { markers, .. } = &g else { unreachable!() };
        let r1 = markers.unwrap().r1;
        let path = stage_one_path(&g).unwrap();
        let (lo, _) = path.guarded_interval();
        for i in 0..=32 {
            let r = lo + (r1 - lo) * i as f64 / 32.0;
            let mut prev = f64::NEG_INFINITY;
            for j in 0..=16 {
                let lambda = j as f64 / 16.0;
                let rr = path.components_at(r, lambda)[0];
                assert!(rr >= prev - 1e-9, "ric_rr decreasing at r={r}, λ={lambda}");
                prev = rr;
            }
        }
    }

    #[test]
    fn boundary_isotopy_constant_path_on_round_profile() {
        let s_len = 2.0;
        let p = WarpProfile::analytic(
            (0.0, s_len),
            crate::profiles::AnalyticFamily::Sin {
                amp: s_len / PI,
                freq: PI / s_len,
                phase: 0.0,
            },
        );
        let path = connect_boundary_path(&p, 2, BoundaryVariant::Corrected).unwrap();
        // constant path: K_radial = π²/S² throughout
        let want = PI * PI / (s_len * s_len);
        for lambda in [0.0, 0.5, 1.0] {
            let k = path.components_at(1.0, lambda)[0];
            assert!((k - want).abs() < 1e-12, "{k} vs {want}");
        }
    }

    #[test]
    fn boundary_isotopy_rejects_convexity_defect() {
        // round profile plus δ·s²(S−s)²: closure intact, p″ > 0 near the ends
        let s_len = 2.0f64;
        let delta = 0.1;
        let jets = |s: f64| {
            let (v, d1, d2) = (
                (s_len / PI) * (PI * s / s_len).sin(),
                (PI * s / s_len).cos(),
                -(PI / s_len) * (PI * s / s_len).sin(),
            );
            let b = delta * s * s * (s_len - s) * (s_len - s);
            let b1 = delta * (2.0 * s * (s_len - s) * (s_len - s) - 2.0 * s * s * (s_len - s));
            let b2 = delta * (12.0 * s * s - 12.0 * s_len * s + 2.0 * s_len * s_len);
            (v + b, d1 + b1, d2 + b2)
        };
        let p = crate::profiles::fit_smooth(&jets, (0.0, s_len), 8).unwrap();
        assert!(jets(0.05).2 > 0.0, "constructed defect must be convex near the end");
        let err = connect_boundary_path(&p, 2, BoundaryVariant::Corrected).unwrap_err();
        assert!(matches!(err, IsotopyError::HypothesisViolated { .. }), "{err}");
    }

    #[test]
    fn boundary_isotopy_certifies_geodesic_ball_profile() {
        // boundary of a geodesic ball of radius r0 in the unit round sphere:
        // p(s) = sin(r0)·sin(s/sin(r0)), concave with unit end slopes
        let r0 = 1.1f64;
        let a = r0.sin();
        let p = WarpProfile::analytic(
            (0.0, PI * a),
            crate::profiles::AnalyticFamily::Sin { amp: a, freq: 1.0 / a, phase: 0.0 },
        );
        let path = connect_boundary_path(&p, 3, BoundaryVariant::Corrected).unwrap();
        let cert = certify_path(&path, (256, 33), Mode::Certified).unwrap();
        assert_eq!(cert.overall, Verdict::Verified, "{:#?}", cert.components);
    }

    #[test]
    fn as_in_paper_variant_has_steep_end_slope() {
        let s_len = 2.0;
        let p = WarpProfile::analytic(
            (0.0, s_len),
            crate::profiles::AnalyticFamily::Sin {
                amp: s_len / PI,
                freq: PI / s_len,
                phase: 0.0,
            },
        );
        let path = connect_boundary_path(&p, 2, BoundaryVariant::AsInPaper).unwrap();
        let PathFamily::Singly { p1, .. } = &path.family else { unreachable!() };
        assert!((p1.d1(0.0) - PI).abs() < 1e-12, "literal variant slope π at s = 0");
    }

    #[test]
    fn small_grid_certification_of_stage_one() {
        let g = fixtures::s5_paths_fixture();
        let path = stage_one_path(&g).unwrap();
        let cert = certify_path(&path, (96, 17), Mode::Heuristic).unwrap();
        assert_eq!(cert.overall, Verdict::GridPositive, "{cert:?}");
    }
}
