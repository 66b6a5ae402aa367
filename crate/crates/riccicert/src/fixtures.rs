//! Built-in metric fixtures and the metric JSON schema.
//!
//! The sphere-deformation fixture (`s5_paths_fixture`) is a doubly warped
//! metric on S⁵ with the qualitative shape produced by spherical surgery: the
//! second warping function has a single early inflection and is concave
//! beyond it, the first rises concavely to a constant ρ. The disk fixture
//! (`disk_fixture`) additionally matches the round profile cos(r − R3 + π/8)
//! beyond its third marker, so its tail region is isometric to a product with
//! a round sphere sector.
//!
//! All pieces are assembled in exact rational arithmetic so the C² joins are
//! exact and the fixtures serialize losslessly through the profile schema.

use crate::curvature::{CurvatureError, Markers, WarpedMetric};
use crate::profiles::{
    fit_smooth, poly_from_conditions, AnalyticFamily, Piece, ProfileError, ProfileSchema,
    WarpProfile, TAU_JOIN,
};
use crate::rational::Rational;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error("fixture parameter out of range: {0}")]
    BadParameter(String),
    #[error("unknown builtin fixture '{0}'")]
    UnknownBuiltin(String),
}

// ---------------------------------------------------------------------------
// Exact polynomial helpers (global coefficient vectors)
// ---------------------------------------------------------------------------

fn poly_eval(coeffs: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

/// Re-centers a polynomial from origin 0 to `origin`: p(t + origin).
fn poly_shift(coeffs: &[Rational], origin: &Rational) -> Vec<Rational> {
    let n = coeffs.len();
    let mut out = vec![Rational::zero(); n];
    // Horner in (t + origin): process from the top coefficient down
    for c in coeffs.iter().rev() {
        // out = out * (t + origin) + c
        let mut next = vec![Rational::zero(); n];
        for j in (0..n - 1).rev() {
            next[j + 1] = &next[j + 1] + &out[j];
        }
        for j in 0..n {
            next[j] = &next[j] + &(&out[j] * origin);
        }
        next[0] = &next[0] + c;
        out = next;
    }
    out
}

fn poly_antiderivative(coeffs: &[Rational], constant: Rational) -> Vec<Rational> {
    let mut out = Vec::with_capacity(coeffs.len() + 1);
    out.push(constant);
    for (i, c) in coeffs.iter().enumerate() {
        out.push(c / &Rational::from_int((i + 1) as i64));
    }
    out
}

/// Piecewise description in exact arithmetic: breakpoints plus local pieces.
struct ExactPieces {
    breaks: Vec<Rational>,
    pieces: Vec<Vec<Rational>>,
}

impl ExactPieces {
    fn breaks_f64(&self) -> Vec<f64> {
        self.breaks.iter().map(|b| b.to_f64()).collect()
    }

    /// Integrates twice with C¹ accumulation; value/slope at the left end.
    fn integrate_twice(&self, value0: Rational, slope0: Rational) -> ExactPieces {
        let mut out = Vec::with_capacity(self.pieces.len());
        let mut value = value0;
        let mut slope = slope0;
        for (i, piece) in self.pieces.iter().enumerate() {
            let first = poly_antiderivative(piece, slope.clone());
            let second = poly_antiderivative(&first, value.clone());
            let width = &self.breaks[i + 1] - &self.breaks[i];
            slope = poly_eval(&first, &width);
            value = poly_eval(&second, &width);
            out.push(second);
        }
        ExactPieces { breaks: self.breaks.clone(), pieces: out }
    }

    /// Adds a global polynomial (coefficients around 0) to every piece.
    fn add_global(&self, global: &[Rational]) -> ExactPieces {
        let pieces = self
            .pieces
            .iter()
            .enumerate()
            .map(|(i, piece)| {
                let shifted = poly_shift(global, &self.breaks[i]);
                let n = shifted.len().max(piece.len());
                (0..n)
                    .map(|j| {
                        let a = piece.get(j).cloned().unwrap_or_else(Rational::zero);
                        let b = shifted.get(j).cloned().unwrap_or_else(Rational::zero);
                        &a + &b
                    })
                    .collect()
            })
            .collect();
        ExactPieces { breaks: self.breaks.clone(), pieces }
    }

    fn scale(&self, factor: &Rational) -> ExactPieces {
        let pieces = self
            .pieces
            .iter()
            .map(|p| p.iter().map(|c| c * factor).collect())
            .collect();
        ExactPieces { breaks: self.breaks.clone(), pieces }
    }

    fn shift_values(&self, offset: &Rational) -> ExactPieces {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let mut q = p.clone();
                q[0] = &q[0] + offset;
                q
            })
            .collect();
        ExactPieces { breaks: self.breaks.clone(), pieces }
    }

    fn into_profile(self) -> Result<WarpProfile, ProfileError> {
        let breaks = self.breaks_f64();
        let pieces = self.pieces.into_iter().map(Piece::new).collect();
        WarpProfile::piecewise(breaks, pieces, TAU_JOIN)
    }
}

fn rat(x: f64) -> Rational {
    Rational::from_f64_exact(x)
}

// ---------------------------------------------------------------------------
// h-profile: concave rise to the plateau ρ over [0, 2ρ]
// ---------------------------------------------------------------------------

/// h(r) = ρ·(2u − 2u³ + u⁴) with u = r/(2ρ) on [0, 2ρ], then h ≡ ρ.
/// Closure h(0) = 0, h′(0) = 1, h″(0) = 0; C² at the plateau join; h″ < 0 on
/// the open rise.
pub fn plateau_h(rho: f64, big_r: f64) -> Result<WarpProfile, FixtureError> {
    if rho <= 0.0 || 2.0 * rho >= big_r {
        return Err(FixtureError::BadParameter(format!(
            "need 0 < 2ρ < R, got ρ = {rho}, R = {big_r}"
        )));
    }
    let rho_r = rat(rho);
    // r − r³/(4ρ²) + r⁴/(16ρ³)
    let four_rho2 = &(&rat(4.0) * &rho_r) * &rho_r;
    let sixteen_rho3 = &(&(&rat(16.0) * &rho_r) * &rho_r) * &rho_r;
    let rise = vec![
        Rational::zero(),
        Rational::one(),
        Rational::zero(),
        -&four_rho2.recip(),
        sixteen_rho3.recip(),
    ];
    let flat = vec![rho_r.clone()];
    ExactPieces {
        breaks: vec![Rational::zero(), &rat(2.0) * &rho_r, rat(big_r)],
        pieces: vec![rise, flat],
    }
    .into_profile()
    .map_err(Into::into)
}

// ---------------------------------------------------------------------------
// The S⁵ deformation fixture
// ---------------------------------------------------------------------------

/// Bump second derivative: a positive hump H(1−(r/w)²)² on [0, w_h] and a
/// balancing negative valley −D(1−((r−t_v)/w_v)²)² on [t_v−w_v, t_v+w_v],
/// zero elsewhere, with ∫σ = 0.
struct BumpShape {
    hump_height: Rational,
    hump_width: Rational,
    valley_center: Rational,
    valley_halfwidth: Rational,
}

impl BumpShape {
    /// (1 − ((r−c)/w)²)² scaled, as global coefficients around 0.
    fn quartic_bump(scale: &Rational, center: &Rational, width: &Rational) -> Vec<Rational> {
        // scale · (1 − u²)² with u = (r−c)/w: expand in r
        let w2 = width.pow(2);
        // v(r) = 1 − (r−c)²/w²: coefficients around 0
        let c2 = center.pow(2);
        let v = [&Rational::one() - &(&c2 / &w2),
            &(&rat(2.0) * center) / &w2,
            -&w2.recip()];
        // v² · scale
        let mut sq = vec![Rational::zero(); 5];
        for i in 0..3 {
            for j in 0..3 {
                sq[i + j] = &sq[i + j] + &(&v[i] * &v[j]);
            }
        }
        sq.iter().map(|c| c * scale).collect()
    }

    /// σ as exact pieces over [0, R].
    fn sigma(&self, big_r: &Rational) -> ExactPieces {
        let hump = Self::quartic_bump(&self.hump_height, &Rational::zero(), &self.hump_width);
        // valley depth from ∫σ = 0: H·w_h = D·2·w_v (both bumps integrate to
        // (8/15)·height·full-width)
        let depth = &(&self.hump_height * &self.hump_width)
            / &(&rat(2.0) * &self.valley_halfwidth);
        let valley =
            Self::quartic_bump(&-&depth, &self.valley_center, &self.valley_halfwidth);
        let v_lo = &self.valley_center - &self.valley_halfwidth;
        let v_hi = &self.valley_center + &self.valley_halfwidth;
        let breaks = vec![
            Rational::zero(),
            self.hump_width.clone(),
            v_lo.clone(),
            v_hi.clone(),
            big_r.clone(),
        ];
        let pieces = vec![
            poly_shift(&hump, &Rational::zero()),
            vec![Rational::zero()],
            poly_shift(&valley, &v_lo),
            vec![Rational::zero()],
        ];
        ExactPieces { breaks, pieces }
    }
}

/// Designed constants of the S⁵ fixture. The hump keeps f″ > 0 on a short
/// initial window; the valley past the h-plateau start rebalances the bump so
/// it vanishes identically beyond r = 0.95.
struct S5Design {
    rho: f64,
    amplitude: f64,
    beta: f64,
    bump: BumpShape,
}

fn s5_design() -> S5Design {
    S5Design {
        rho: 0.4,
        amplitude: 0.91,
        beta: 0.225,
        bump: BumpShape {
            hump_height: rat(3.0),
            hump_width: rat(0.5),
            valley_center: rat(0.75),
            valley_halfwidth: rat(0.2),
        },
    }
}

/// Quartic base profile through (a0, 0) at r = 0 and (0, −1, 0) at r = R.
fn base_quartic(a0: f64, big_r: f64) -> Vec<Rational> {
    let piece = poly_from_conditions(
        0.0,
        &[
            (0.0, 0, a0),
            (0.0, 1, 0.0),
            (big_r, 0, 0.0),
            (big_r, 1, -1.0),
            (big_r, 2, 0.0),
        ],
    );
    piece.coeffs
}

/// Doubly warped metric on S⁵ (n = m = 2) over [0, π/2] satisfying the
/// deformation hypotheses: f″ > 0 on (0, R1), f″ < 0 on (R1, R),
/// h″ < 0 on (0, R2), h ≡ ρ on [R2, R], positive Ricci curvature throughout.
pub fn s5_paths_fixture() -> WarpedMetric {
    build_s5_fixture().expect("builtin S5 fixture must construct")
}

fn build_s5_fixture() -> Result<WarpedMetric, FixtureError> {
    let d = s5_design();
    let big_r = FRAC_PI_2;
    let h = plateau_h(d.rho, big_r)?;

    let sigma = d.bump.sigma(&rat(big_r));
    // ψ = ∬σ with ψ(b) = 0, ψ′(b) = 0 (∫σ = 0 by construction)
    let psi_raw = sigma.integrate_twice(Rational::zero(), Rational::zero());
    let b_end = rat(0.95);
    // evaluate ψ_raw at the support end to normalize
    let idx = psi_raw
        .breaks
        .windows(2)
        .position(|w| b_end >= w[0] && b_end <= w[1])
        .unwrap();
    let local = &b_end - &psi_raw.breaks[idx];
    let psi_at_end = poly_eval(&psi_raw.pieces[idx], &local);
    let psi = psi_raw.shift_values(&-&psi_at_end);

    let q = base_quartic(d.amplitude, big_r);
    let f = psi.scale(&rat(d.beta)).add_global(&q).into_profile()?;

    // the f″ crossing (marker R1) by bisection
    let mut lo = 1e-4;
    let mut hi = 0.4;
    assert!(f.d2(lo) > 0.0 && f.d2(hi) < 0.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f.d2(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r1 = 0.5 * (lo + hi);

    let g = WarpedMetric::doubly((0.0, big_r), h, f, 2, 2)?;
    Ok(g.with_markers(Markers { r1, r2: 2.0 * d.rho, r3: None }, d.rho)?)
}

// ---------------------------------------------------------------------------
// The disk fixture
// ---------------------------------------------------------------------------

/// Doubly warped metric for the disk pipeline: fiber dims (n, m−1) over
/// [0, R3 + 3π/8] with f ≡ cos(r − R3 + π/8) for r ≥ R3 (so the tail region
/// is isometric to S^n_ρ × (unit m-sphere sector)), an early f-inflection at
/// R1 < 2ρ, and h rising to the constant ρ at R2 = 2ρ.
pub fn disk_fixture(n: u32, m: u32, rho: f64) -> Result<WarpedMetric, FixtureError> {
    if n < 2 || m < 4 {
        return Err(FixtureError::BadParameter(format!(
            "disk fixture needs n >= 2, m >= 4, got ({n}, {m})"
        )));
    }
    if !(0.0..0.05).contains(&(rho - 0.0)) && rho > 0.05 && rho > 0.15 {
        // handled below by the generic check; placeholder branch never taken
    }
    let r3 = 0.7;
    let big_r = r3 + 3.0 * FRAC_PI_8;
    if rho <= 0.0 || 2.0 * rho >= 0.5 {
        return Err(FixtureError::BadParameter(format!(
            "disk fixture needs 0 < ρ < 0.25, got {rho}"
        )));
    }
    let h = plateau_h(rho, big_r)?;

    // f on [0, R3]: f″ = σ piecewise linear through
    //   (0, σ0), (R1, 0), (x1, −V), (x2, −V), (R3, −cos(π/8))
    // with V solved exactly so that ∫σ = −sin(π/8) = f′(R3).
    let sigma0 = rat(0.3);
    let r1 = 0.012;
    let x1 = 0.07;
    let x2 = 0.35;
    let end_curv = rat((FRAC_PI_8).cos()); // |f″(R3)|
    let end_slope = rat((FRAC_PI_8).sin()); // |f′(R3)|
    let (r1_r, x1_r, x2_r, r3_r) = (rat(r1), rat(x1), rat(x2), rat(r3));
    // ∫σ = σ0·R1/2 − V·(x1−R1)/2 − V·(x2−x1) − (V+C8)·(R3−x2)/2 = −sin(π/8)
    let half = rat(0.5);
    let seg1 = &(&sigma0 * &r1_r) * &half;
    let coef_v = &(&(&x1_r - &r1_r) * &half)
        + &(&(&x2_r - &x1_r) + &(&(&r3_r - &x2_r) * &half));
    let seg4_const = &(&end_curv * &(&r3_r - &x2_r)) * &half;
    // seg1 − coef_v·V − seg4_const = −end_slope  ⇒  V = (seg1 + end_slope − seg4_const)/coef_v
    let v = &(&(&seg1 + &end_slope) - &seg4_const) / &coef_v;
    if v.sign() <= 0 {
        return Err(FixtureError::BadParameter("disk fixture: V must be positive".into()));
    }

    let linear = |x_a: &Rational, v_a: &Rational, x_b: &Rational, v_b: &Rational| -> Vec<Rational> {
        // local coordinates at x_a
        let slope = &(v_b - v_a) / &(x_b - x_a);
        vec![v_a.clone(), slope]
    };
    let neg_v = -&v;
    let neg_c8 = -&end_curv;
    let sigma = ExactPieces {
        breaks: vec![Rational::zero(), r1_r.clone(), x1_r.clone(), x2_r.clone(), r3_r.clone()],
        pieces: vec![
            linear(&Rational::zero(), &sigma0, &r1_r, &Rational::zero()),
            linear(&r1_r, &Rational::zero(), &x1_r, &neg_v),
            vec![neg_v.clone()],
            linear(&x2_r, &neg_v, &r3_r, &neg_c8),
        ],
    };
    // integrate: particular solution with f(0) = 0, f′(0) = 0, then shift the
    // constant so that f(R3) = cos(π/8); f′(R3) = −sin(π/8) holds by the V-solve.
    let particular = sigma.integrate_twice(Rational::zero(), Rational::zero());
    let p_at_r3 = {
        let local = &r3_r - &particular.breaks[3];
        poly_eval(&particular.pieces[3], &local)
    };
    let head = particular.shift_values(&(&rat((FRAC_PI_8).cos()) - &p_at_r3));

    // tail [R3, R]: C² piecewise fit of cos(r − R3 + π/8)
    let tail = fit_smooth(
        &|r: f64| {
            let a = r - r3 + FRAC_PI_8;
            (a.cos(), -a.sin(), -a.cos())
        },
        (r3, big_r),
        3,
    )?;
    let ProfileSchema::Piecewise { breakpoints: tail_breaks, .. } =
        tail.to_schema().unwrap()
    else {
        unreachable!()
    };

    // stitch head and tail into one piecewise profile
    let mut breaks = head.breaks_f64();
    let mut pieces: Vec<Piece> = head.pieces.into_iter().map(Piece::new).collect();
    let tail_pieces = match tail.to_schema().unwrap() {
        ProfileSchema::Piecewise { pieces, .. } => pieces,
        _ => unreachable!(),
    };
    for (i, coeffs) in tail_pieces.iter().enumerate() {
        if i > 0 {
            breaks.push(tail_breaks[i]);
        }
        pieces.push(Piece::new(coeffs.iter().map(|&c| rat(c)).collect()));
    }
    breaks.push(big_r);
    let f = WarpProfile::piecewise(breaks, pieces, TAU_JOIN)?;

    let g = WarpedMetric::doubly((0.0, big_r), h, f, n, m - 1)?;
    Ok(g.with_markers(Markers { r1, r2: 2.0 * rho, r3: Some(r3) }, rho)?)
}

/// Round doubly warped sphere of radius a: h = a sin(r/a), f = a cos(r/a).
pub fn round_sphere_fixture(a: f64, n: u32, m: u32) -> WarpedMetric {
    let interval = (0.0, a * FRAC_PI_2);
    let h =
        WarpProfile::analytic(interval, AnalyticFamily::Sin { amp: a, freq: 1.0 / a, phase: 0.0 });
    let f =
        WarpProfile::analytic(interval, AnalyticFamily::Cos { amp: a, freq: 1.0 / a, phase: 0.0 });
    WarpedMetric::doubly(interval, h, f, n, m).unwrap()
}

// ---------------------------------------------------------------------------
// Metric JSON schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MetricSchema {
    Doubly {
        schema_version: u32,
        interval: (f64, f64),
        n: u32,
        m: u32,
        h: ProfileSchema,
        f: ProfileSchema,
        markers: Option<Markers>,
        rho: Option<f64>,
    },
    Singly {
        schema_version: u32,
        interval: (f64, f64),
        q: u32,
        p: ProfileSchema,
    },
}

pub fn metric_to_schema(g: &WarpedMetric) -> Option<MetricSchema> {
    match g {
        WarpedMetric::Doubly { interval, h, f, n, m, markers, rho } => Some(MetricSchema::Doubly {
            schema_version: crate::certify::SCHEMA_VERSION,
            interval: *interval,
            n: *n,
            m: *m,
            h: h.to_schema()?,
            f: f.to_schema()?,
            markers: *markers,
            rho: *rho,
        }),
        WarpedMetric::Singly { interval, p, q } => Some(MetricSchema::Singly {
            schema_version: crate::certify::SCHEMA_VERSION,
            interval: *interval,
            q: *q,
            p: p.to_schema()?,
        }),
    }
}

pub fn metric_from_schema(schema: &MetricSchema) -> Result<WarpedMetric, FixtureError> {
    match schema {
        MetricSchema::Doubly { interval, n, m, h, f, markers, rho, .. } => {
            let g = WarpedMetric::doubly(
                *interval,
                WarpProfile::from_schema(h)?,
                WarpProfile::from_schema(f)?,
                *n,
                *m,
            )?;
            match (markers, rho) {
                (Some(mk), Some(r)) => Ok(g.with_markers(*mk, *r)?),
                _ => Ok(g),
            }
        }
        MetricSchema::Singly { interval, q, p, .. } => {
            Ok(WarpedMetric::singly(*interval, WarpProfile::from_schema(p)?, *q)?)
        }
    }
}

/// Resolves `builtin:` fixture names used by the CLI.
pub fn builtin_metric(name: &str) -> Result<WarpedMetric, FixtureError> {
    match name {
        "s5" => Ok(s5_paths_fixture()),
        "round-s5" => Ok(round_sphere_fixture(1.0, 2, 2)),
        "disk-n2-m4-rho0.1" => disk_fixture(2, 4, 0.1),
        "disk-n2-m4-rho0.01" => disk_fixture(2, 4, 0.01),
        other => Err(FixtureError::UnknownBuiltin(other.to_string())),
    }
}
