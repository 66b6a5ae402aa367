//! Warping functions: representation, construction, and closure validation.
//!
//! Every metric in this crate is built from `WarpProfile`s: scalar functions
//! on a closed interval with first and second derivatives. Two concrete
//! representations are supported (closed-form analytic families and C²
//! piecewise polynomials of degree ≤ 7), plus pointwise convex combinations
//! of existing profiles, which is what deformation paths are made of.
//!
//! Piecewise polynomials keep their coefficients as exact rationals, so join
//! checks and convex combinations of splines are exact; evaluation uses a
//! cached f64 copy.

use crate::rational::{solve_exact, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_DEGREE: usize = 7;
/// C² join tolerance in float mode. Exact (zero-defect) mode passes 0.
pub const TAU_JOIN: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("breakpoints must be strictly increasing and span the domain")]
    NonMonotoneBreakpoints,
    #[error("C{order} join discontinuity at r = {location}: defect {magnitude:e}")]
    JoinDiscontinuity { order: u8, location: f64, magnitude: f64 },
    #[error("piece degree exceeds {MAX_DEGREE}")]
    DegreeTooHigh,
    #[error("profiles have mismatched domains: [{0}, {1}] vs [{2}, {3}]")]
    DomainMismatch(f64, f64, f64, f64),
    #[error("lambda {0} outside [0, 1]")]
    LambdaOutOfRange(f64),
    #[error("empty profile")]
    Empty,
}

/// Closed-form analytic families admitted by the profile schema.
/// `amp * sin(freq r + phase) + offset` and the cosine analogue.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum AnalyticFamily {
    Sin { amp: f64, freq: f64, phase: f64 },
    Cos { amp: f64, freq: f64, phase: f64 },
    Const { value: f64 },
    AffineSin { amp: f64, freq: f64, phase: f64, offset: f64 },
}

impl AnalyticFamily {
    fn jet(&self, r: f64) -> (f64, f64, f64) {
        match *self {
            AnalyticFamily::Sin { amp, freq, phase } => {
                let (s, c) = (freq * r + phase).sin_cos();
                (amp * s, amp * freq * c, -amp * freq * freq * s)
            }
            AnalyticFamily::Cos { amp, freq, phase } => {
                let (s, c) = (freq * r + phase).sin_cos();
                (amp * c, -amp * freq * s, -amp * freq * freq * c)
            }
            AnalyticFamily::Const { value } => (value, 0.0, 0.0),
            AnalyticFamily::AffineSin { amp, freq, phase, offset } => {
                let (s, c) = (freq * r + phase).sin_cos();
                (offset + amp * s, amp * freq * c, -amp * freq * freq * s)
            }
        }
    }
}

/// One polynomial piece in coordinates local to its left breakpoint.
#[derive(Debug, Clone)]
pub struct Piece {
    /// Exact coefficients c0 + c1 t + … (t = r − left breakpoint).
    pub coeffs: Vec<Rational>,
    cached: Vec<f64>,
}

impl Piece {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        let cached = coeffs.iter().map(|c| c.to_f64()).collect();
        Piece { coeffs, cached }
    }

    fn jet(&self, t: f64) -> (f64, f64, f64) {
        let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for &c in self.cached.iter().rev() {
            d2 = d2 * t + 2.0 * d1;
            d1 = d1 * t + v;
            v = v * t + c;
        }
        (v, d1, d2)
    }

    /// Exact derivative-k value at local rational coordinate t.
    fn eval_exact(&self, t: &Rational, order: usize) -> Rational {
        let mut sum = Rational::zero();
        let mut tp = Rational::one();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i >= order {
                // falling factorial i (i−1) … (i−order+1)
                let mut fac = Rational::one();
                for j in 0..order {
                    fac = &fac * &Rational::from_int((i - j) as i64);
                }
                sum = &sum + &(&(&fac * c) * &tp);
                tp = &tp * t;
            }
        }
        sum
    }

    fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone)]
pub struct PiecewisePoly {
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Piece>,
}

impl PiecewisePoly {
    fn piece_index(&self, r: f64) -> usize {
        // clamp into range; polynomials extrapolate naturally at the ends
        match self.breakpoints[1..self.breakpoints.len() - 1]
            .binary_search_by(|b| b.partial_cmp(&r).unwrap())
        {
            Ok(i) => i + 1,
            Err(i) => i,
        }
    }

    fn jet(&self, r: f64) -> (f64, f64, f64) {
        let i = self.piece_index(r);
        self.pieces[i].jet(r - self.breakpoints[i])
    }
}

#[derive(Debug, Clone)]
enum ProfileKind {
    Analytic(AnalyticFamily),
    Piecewise(PiecewisePoly),
    /// (1−λ)·a + λ·b, domains identical.
    Blend { lambda: f64, a: Box<WarpProfile>, b: Box<WarpProfile> },
    /// scale · inner (exact scaling of a profile, used for induced metrics).
    Scaled { scale: f64, inner: Box<WarpProfile> },
}

/// A scalar warping function on `[lo, hi]` with C² evaluation.
#[derive(Debug, Clone)]
pub struct WarpProfile {
    domain: (f64, f64),
    kind: ProfileKind,
}

impl WarpProfile {
    pub fn analytic(domain: (f64, f64), family: AnalyticFamily) -> Self {
        WarpProfile { domain, kind: ProfileKind::Analytic(family) }
    }

    /// Builds a piecewise profile, checking breakpoint order, degree, and the
    /// C² join condition at every interior breakpoint.
    pub fn piecewise(
        breakpoints: Vec<f64>,
        pieces: Vec<Piece>,
        tau_join: f64,
    ) -> Result<Self, ProfileError> {
        if pieces.is_empty() || breakpoints.len() != pieces.len() + 1 {
            return Err(ProfileError::Empty);
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(ProfileError::NonMonotoneBreakpoints);
        }
        if pieces.iter().any(|p| p.degree() > MAX_DEGREE) {
            return Err(ProfileError::DegreeTooHigh);
        }
        let poly = PiecewisePoly { breakpoints, pieces };
        // Exact join defects: left piece evaluated at its width vs right at 0.
        for i in 1..poly.pieces.len() {
            let width = Rational::from_f64_exact(poly.breakpoints[i])
                - Rational::from_f64_exact(poly.breakpoints[i - 1]);
            for order in 0..=2u8 {
                let left = poly.pieces[i - 1].eval_exact(&width, order as usize);
                let right = poly.pieces[i].eval_exact(&Rational::zero(), order as usize);
                let defect = (&left - &right).abs();
                if defect > Rational::from_f64_exact(tau_join) {
                    return Err(ProfileError::JoinDiscontinuity {
                        order,
                        location: poly.breakpoints[i],
                        magnitude: defect.to_f64(),
                    });
                }
            }
        }
        let domain = (poly.breakpoints[0], *poly.breakpoints.last().unwrap());
        Ok(WarpProfile { domain, kind: ProfileKind::Piecewise(poly) })
    }

    pub fn constant(domain: (f64, f64), value: f64) -> Self {
        WarpProfile::analytic(domain, AnalyticFamily::Const { value })
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn jet(&self, r: f64) -> (f64, f64, f64) {
        match &self.kind {
            ProfileKind::Analytic(f) => f.jet(r),
            ProfileKind::Piecewise(p) => p.jet(r),
            ProfileKind::Blend { lambda, a, b } => {
                let (va, da, dda) = a.jet(r);
                let (vb, db, ddb) = b.jet(r);
                let mu = 1.0 - lambda;
                (mu * va + lambda * vb, mu * da + lambda * db, mu * dda + lambda * ddb)
            }
            ProfileKind::Scaled { scale, inner } => {
                let (v, d1, d2) = inner.jet(r);
                (scale * v, scale * d1, scale * d2)
            }
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.jet(r).0
    }

    pub fn d1(&self, r: f64) -> f64 {
        self.jet(r).1
    }

    pub fn d2(&self, r: f64) -> f64 {
        self.jet(r).2
    }

    /// Exact evaluation of derivative `order`, available on piecewise
    /// profiles (and blends/scalings of them).
    pub fn eval_exact(&self, r: &Rational, order: usize) -> Option<Rational> {
        match &self.kind {
            ProfileKind::Analytic(_) => None,
            ProfileKind::Piecewise(p) => {
                let rf = r.to_f64();
                let i = p.piece_index(rf);
                let t = r - &Rational::from_f64_exact(p.breakpoints[i]);
                Some(p.pieces[i].eval_exact(&t, order))
            }
            ProfileKind::Blend { lambda, a, b } => {
                let la = Rational::from_f64_exact(*lambda);
                let va = a.eval_exact(r, order)?;
                let vb = b.eval_exact(r, order)?;
                Some(&(&(&Rational::one() - &la) * &va) + &(&la * &vb))
            }
            ProfileKind::Scaled { scale, inner } => {
                let v = inner.eval_exact(r, order)?;
                Some(&Rational::from_f64_exact(*scale) * &v)
            }
        }
    }

    pub fn scaled(&self, scale: f64) -> WarpProfile {
        WarpProfile {
            domain: self.domain,
            kind: ProfileKind::Scaled { scale, inner: Box::new(self.clone()) },
        }
    }
}

/// Pointwise convex combination `(1−λ)·p0 + λ·p1` with derivatives combined
/// linearly. Piecewise profiles over the same breakpoints merge exactly.
pub fn convex_combine(
    p0: &WarpProfile,
    p1: &WarpProfile,
    lambda: f64,
) -> Result<WarpProfile, ProfileError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(ProfileError::LambdaOutOfRange(lambda));
    }
    let (a0, b0) = p0.domain;
    let (a1, b1) = p1.domain;
    if (a0 - a1).abs() > 1e-12 || (b0 - b1).abs() > 1e-12 {
        return Err(ProfileError::DomainMismatch(a0, b0, a1, b1));
    }
    if lambda == 0.0 {
        return Ok(p0.clone());
    }
    if lambda == 1.0 {
        return Ok(p1.clone());
    }
    if let (ProfileKind::Piecewise(q0), ProfileKind::Piecewise(q1)) = (&p0.kind, &p1.kind) {
        if q0.breakpoints == q1.breakpoints {
            let la = Rational::from_f64_exact(lambda);
            let mu = &Rational::one() - &la;
            let pieces = q0
                .pieces
                .iter()
                .zip(&q1.pieces)
                .map(|(x, y)| {
                    let n = x.coeffs.len().max(y.coeffs.len());
                    let coeffs = (0..n)
                        .map(|i| {
                            let cx = x.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                            let cy = y.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                            &(&mu * &cx) + &(&la * &cy)
                        })
                        .collect();
                    Piece::new(coeffs)
                })
                .collect();
            return WarpProfile::piecewise(q0.breakpoints.clone(), pieces, TAU_JOIN);
        }
    }
    Ok(WarpProfile {
        domain: p0.domain,
        kind: ProfileKind::Blend {
            lambda,
            a: Box::new(p0.clone()),
            b: Box::new(p1.clone()),
        },
    })
}

// ---------------------------------------------------------------------------
// Closure specifications
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosureRole {
    /// Profile vanishes at the left end with unit slope: h(0)=0, h′(0)=1, h″(0)=0.
    CollapseAtLeft,
    /// Profile vanishes at the right end with slope −1: f(R)=0, f′(R)=−1, f″(R)=0.
    CollapseAtRight,
    /// Strictly positive on the whole closed interval.
    PositiveEverywhere,
}

/// One pointwise endpoint constraint: derivative `order` at `point` equals `value`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Constraint {
    pub point: f64,
    pub order: u8,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClosureSpec {
    pub role: ClosureRole,
    pub interval: (f64, f64),
    pub constraints: Vec<Constraint>,
}

impl ClosureSpec {
    pub fn collapse_at_left(interval: (f64, f64)) -> Self {
        let p = interval.0;
        ClosureSpec {
            role: ClosureRole::CollapseAtLeft,
            interval,
            constraints: vec![
                Constraint { point: p, order: 0, value: 0.0 },
                Constraint { point: p, order: 1, value: 1.0 },
                Constraint { point: p, order: 2, value: 0.0 },
            ],
        }
    }

    pub fn collapse_at_right(interval: (f64, f64)) -> Self {
        let p = interval.1;
        ClosureSpec {
            role: ClosureRole::CollapseAtRight,
            interval,
            constraints: vec![
                Constraint { point: p, order: 0, value: 0.0 },
                Constraint { point: p, order: 1, value: -1.0 },
                Constraint { point: p, order: 2, value: 0.0 },
            ],
        }
    }

    pub fn positive_everywhere(interval: (f64, f64)) -> Self {
        ClosureSpec { role: ClosureRole::PositiveEverywhere, interval, constraints: vec![] }
    }

    /// Adds a condition beyond the role's defaults (e.g. flatness at the far
    /// end of the companion profile in a closed doubly warped sphere).
    pub fn with_constraint(mut self, point: f64, order: u8, value: f64) -> Self {
        self.constraints.push(Constraint { point, order, value });
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub point: f64,
    pub order: u8,
    pub target: f64,
    pub measured: f64,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PositivityScan {
    pub grid_min: f64,
    pub argmin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClosureReport {
    pub role: ClosureRole,
    pub tol: f64,
    pub checks: Vec<ConstraintCheck>,
    pub positivity: Option<PositivityScan>,
    pub pass: bool,
}

/// Checks each endpoint constraint to `tol` and scans interior positivity
/// where the role demands it. Failures are reported, never thrown.
pub fn validate_closure(p: &WarpProfile, spec: &ClosureSpec, tol: f64) -> ClosureReport {
    let checks: Vec<ConstraintCheck> = spec
        .constraints
        .iter()
        .map(|c| {
            let jet = p.jet(c.point);
            let measured = match c.order {
                0 => jet.0,
                1 => jet.1,
                _ => jet.2,
            };
            let residual = (measured - c.value).abs();
            ConstraintCheck {
                point: c.point,
                order: c.order,
                target: c.value,
                measured,
                residual,
                pass: residual <= tol,
            }
        })
        .collect();

    let positivity = {
        let (lo, hi) = spec.interval;
        let n = 512usize;
        // keep clear of a collapsing endpoint where the value is legitimately 0
        let (a, b) = match spec.role {
            ClosureRole::CollapseAtLeft => (lo + (hi - lo) / n as f64, hi),
            ClosureRole::CollapseAtRight => (lo, hi - (hi - lo) / n as f64),
            ClosureRole::PositiveEverywhere => (lo, hi),
        };
        let mut grid_min = f64::INFINITY;
        let mut argmin = a;
        for i in 0..=n {
            let r = a + (b - a) * i as f64 / n as f64;
            let v = p.value(r);
            if v < grid_min {
                grid_min = v;
                argmin = r;
            }
        }
        Some(PositivityScan { grid_min, argmin, pass: grid_min > 0.0 })
    };

    let pass = checks.iter().all(|c| c.pass) && positivity.as_ref().is_none_or(|s| s.pass);
    ClosureReport { role: spec.role, tol, checks, positivity, pass }
}

// ---------------------------------------------------------------------------
// Hermite construction
// ---------------------------------------------------------------------------

/// Unique polynomial through value/derivative conditions, solved exactly.
/// Conditions are `(point, order, value)`; the polynomial has degree
/// `conditions.len() − 1` in coordinates local to `origin`.
pub fn poly_from_conditions(origin: f64, conditions: &[(f64, usize, f64)]) -> Piece {
    let n = conditions.len();
    let o = Rational::from_f64_exact(origin);
    let mut a = vec![vec![Rational::zero(); n]; n];
    let mut b = vec![Rational::zero(); n];
    for (row, &(x, order, v)) in conditions.iter().enumerate() {
        let t = &Rational::from_f64_exact(x) - &o;
        let mut tp = Rational::one();
        for col in 0..n {
            if col >= order {
                let mut fac = Rational::one();
                for j in 0..order {
                    fac = &fac * &Rational::from_int((col - j) as i64);
                }
                a[row][col] = &fac * &tp;
                tp = &tp * &t;
            }
        }
        b[row] = Rational::from_f64_exact(v);
    }
    Piece::new(solve_exact(&a, &b))
}

/// Cubic Hermite interpolant of endpoint data `(x, value, slope)`.
pub fn hermite_cubic(
    left: (f64, f64, f64),
    right: (f64, f64, f64),
) -> Result<WarpProfile, ProfileError> {
    let piece = poly_from_conditions(
        left.0,
        &[
            (left.0, 0, left.1),
            (left.0, 1, left.2),
            (right.0, 0, right.1),
            (right.0, 1, right.2),
        ],
    );
    WarpProfile::piecewise(vec![left.0, right.0], vec![piece], TAU_JOIN)
}

/// C² piecewise-polynomial fit of a smooth function. Each piece is pinned to
/// the exact jet of `jet_fn` at both ends (so joins are exact) plus two
/// interior collocation points, giving degree 7.
pub fn fit_smooth(
    jet_fn: &dyn Fn(f64) -> (f64, f64, f64),
    interval: (f64, f64),
    n_pieces: usize,
) -> Result<WarpProfile, ProfileError> {
    let (a, b) = interval;
    let mut breakpoints = Vec::with_capacity(n_pieces + 1);
    for i in 0..=n_pieces {
        breakpoints.push(a + (b - a) * i as f64 / n_pieces as f64);
    }
    let mut pieces = Vec::with_capacity(n_pieces);
    for i in 0..n_pieces {
        let (x0, x1) = (breakpoints[i], breakpoints[i + 1]);
        let (v0, d0, dd0) = jet_fn(x0);
        let (v1, d1, dd1) = jet_fn(x1);
        let m1 = x0 + (x1 - x0) / 3.0;
        let m2 = x0 + 2.0 * (x1 - x0) / 3.0;
        let piece = poly_from_conditions(
            x0,
            &[
                (x0, 0, v0),
                (x0, 1, d0),
                (x0, 2, dd0),
                (m1, 0, jet_fn(m1).0),
                (m2, 0, jet_fn(m2).0),
                (x1, 0, v1),
                (x1, 1, d1),
                (x1, 2, dd1),
            ],
        );
        pieces.push(piece);
    }
    WarpProfile::piecewise(breakpoints, pieces, TAU_JOIN)
}

// ---------------------------------------------------------------------------
// JSON schema (External Interfaces)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileSchema {
    Piecewise {
        domain: (f64, f64),
        breakpoints: Vec<f64>,
        /// Coefficients local to each piece's left breakpoint, c0..c7.
        pieces: Vec<Vec<f64>>,
    },
    Analytic {
        domain: (f64, f64),
        #[serde(flatten)]
        family: AnalyticFamily,
    },
}

impl WarpProfile {
    pub fn to_schema(&self) -> Option<ProfileSchema> {
        match &self.kind {
            ProfileKind::Analytic(f) => {
                Some(ProfileSchema::Analytic { domain: self.domain, family: f.clone() })
            }
            ProfileKind::Piecewise(p) => Some(ProfileSchema::Piecewise {
                domain: self.domain,
                breakpoints: p.breakpoints.clone(),
                pieces: p.pieces.iter().map(|pc| pc.cached.clone()).collect(),
            }),
            ProfileKind::Scaled { scale, inner } => match inner.to_schema()? {
                ProfileSchema::Piecewise { domain, breakpoints, pieces } => {
                    Some(ProfileSchema::Piecewise {
                        domain,
                        breakpoints,
                        pieces: pieces
                            .iter()
                            .map(|cs| cs.iter().map(|c| c * scale).collect())
                            .collect(),
                    })
                }
                ProfileSchema::Analytic { domain, family } => {
                    let scaled = match family {
                        AnalyticFamily::Sin { amp, freq, phase } => {
                            AnalyticFamily::Sin { amp: amp * scale, freq, phase }
                        }
                        AnalyticFamily::Cos { amp, freq, phase } => {
                            AnalyticFamily::Cos { amp: amp * scale, freq, phase }
                        }
                        AnalyticFamily::Const { value } => {
                            AnalyticFamily::Const { value: value * scale }
                        }
                        AnalyticFamily::AffineSin { amp, freq, phase, offset } => {
                            AnalyticFamily::AffineSin {
                                amp: amp * scale,
                                freq,
                                phase,
                                offset: offset * scale,
                            }
                        }
                    };
                    Some(ProfileSchema::Analytic { domain, family: scaled })
                }
            },
            ProfileKind::Blend { .. } => None,
        }
    }

    pub fn from_schema(schema: &ProfileSchema) -> Result<Self, ProfileError> {
        match schema {
            ProfileSchema::Analytic { domain, family } => {
                Ok(WarpProfile::analytic(*domain, family.clone()))
            }
            ProfileSchema::Piecewise { breakpoints, pieces, .. } => {
                let ps = pieces
                    .iter()
                    .map(|cs| Piece::new(cs.iter().map(|&c| Rational::from_f64_exact(c)).collect()))
                    .collect();
                WarpProfile::piecewise(breakpoints.clone(), ps, TAU_JOIN)
            }
        }
    }
}
