//! Closed-form asymptotic charts near t = 0.
//!
//! A solution germ at the origin is recorded as a [`SmallTChart`]: a named
//! regime plus the free constants of its expansion. Evaluators turn a chart
//! into a [`SolutionState`] at a concrete small t, and [`small_t_zeta`] gives
//! the matching expansion of the zeta function. The regimes:
//!
//! * `GenericSigma`: power behavior t^(+-sigma), Re sigma in [0, 1);
//! * `LogSigma0`: the sigma = 0 boundary, polynomial in log t;
//! * `ReSigma1`: Re sigma = 1 written through delta = 1 - sigma;
//! * `LogSigma1`: sigma = 1, again logarithmic;
//! * `FixedPoint`: the constant solution of the (y1, z_{-1}) reduced system;
//! * `Degenerate`: limits where one of b, c, d vanishes, complete or partial.
//!
//! Evaluators apply the formulas as written, without checking chart
//! invariants, so that formal-invariance properties (the sigma flip) can be
//! tested outside the chart's nominal domain; [`SmallTChart::validate`] is
//! the gatekeeper callers use before trusting a chart.

use crate::model::{SolutionState, ThetaTriple};
use crate::specfun::{branch_power, RayPoint};
use crate::{c64, Complex64, Error, Result};

/// True when z is within `tol` of some integer (used for the Theta and
/// b, c, d non-integrality hypotheses).
pub fn near_integer(z: Complex64, tol: f64) -> bool {
    z.im.abs() < tol && (z.re - z.re.round()).abs() < tol
}

/// The four linear combinations through which the exponents enter every
/// small-t formula, evaluated at a signed argument s (usually +-sigma):
/// b = (Theta_1 + Theta_0 + s)/2, c = (Theta_1 - Theta_0 + s)/2,
/// d = (Theta_inf + s)/2, a = b c.
#[derive(Debug, Clone, Copy)]
pub struct Abcd {
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub a: Complex64,
}

pub fn abcd(theta: &ThetaTriple, s: Complex64) -> Abcd {
    let b = (theta.theta1 + theta.theta0 + s) / 2.0;
    let c = (theta.theta1 - theta.theta0 + s) / 2.0;
    let d = (theta.theta_inf + s) / 2.0;
    Abcd { b, c, d, a: b * c }
}

/// Which of b, c, d vanishes, and whether the ratio against s^2 vanishes too
/// (complete) or tends to a finite nonzero limit (partial). Short codes 1c,
/// 1p, 2c, 2p, 3p, 3c follow the order b, c, d.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegenerateKind {
    /// b(sigma) = 0, s^2 -> 0, b/s^2 -> 0 (code 1c)
    VanishingBComplete,
    /// b(sigma) = 0, s^2 -> 0, b/s^2 -> finite (code 1p)
    VanishingBPartial,
    /// c(sigma) = 0, s^2 -> 0, c/s^2 -> 0 (code 2c)
    VanishingCComplete,
    /// c(sigma) = 0, s^2 -> 0, c/s^2 -> finite (code 2p)
    VanishingCPartial,
    /// d(sigma) = 0, s^2 -> inf, d s^2 -> finite (code 3p)
    VanishingDPartial,
    /// d(sigma) = 0, s^2 -> inf, d s^2 -> 0 (code 3c)
    VanishingDComplete,
}

impl DegenerateKind {
    pub fn code(&self) -> &'static str {
        match self {
            DegenerateKind::VanishingBComplete => "1c",
            DegenerateKind::VanishingBPartial => "1p",
            DegenerateKind::VanishingCComplete => "2c",
            DegenerateKind::VanishingCPartial => "2p",
            DegenerateKind::VanishingDPartial => "3p",
            DegenerateKind::VanishingDComplete => "3c",
        }
    }

    /// The exponent value forced by the vanishing combination:
    /// b = 0 gives sigma = -Theta_0 - Theta_1, c = 0 gives Theta_0 - Theta_1,
    /// d = 0 gives -Theta_inf.
    pub fn sigma(&self, theta: &ThetaTriple) -> Complex64 {
        match self {
            DegenerateKind::VanishingBComplete | DegenerateKind::VanishingBPartial => {
                -theta.theta0 - theta.theta1
            }
            DegenerateKind::VanishingCComplete | DegenerateKind::VanishingCPartial => {
                theta.theta0 - theta.theta1
            }
            DegenerateKind::VanishingDPartial | DegenerateKind::VanishingDComplete => {
                -theta.theta_inf
            }
        }
    }

    pub fn is_partial(&self) -> bool {
        matches!(
            self,
            DegenerateKind::VanishingBPartial
                | DegenerateKind::VanishingCPartial
                | DegenerateKind::VanishingDPartial
        )
    }
}

impl std::str::FromStr for DegenerateKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "1c" => DegenerateKind::VanishingBComplete,
            "1p" => DegenerateKind::VanishingBPartial,
            "2c" => DegenerateKind::VanishingCComplete,
            "2p" => DegenerateKind::VanishingCPartial,
            "3p" => DegenerateKind::VanishingDPartial,
            "3c" => DegenerateKind::VanishingDComplete,
            other => {
                return Err(Error::Config(format!(
                    "unknown degeneration code {other:?}; expected 1c, 1p, 2c, 2p, 3p, or 3c"
                )))
            }
        })
    }
}

impl std::fmt::Display for DegenerateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

/// A small-t solution germ: regime plus expansion constants. The gauge
/// constant `r` scales u only in every regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmallTChart {
    /// Power regime: y, z, u rational in s^2 t^sigma.
    GenericSigma {
        sigma: Complex64,
        s2: Complex64,
        r: Complex64,
    },
    /// sigma = 0: polynomial in log t + s1_hat.
    LogSigma0 { s1_hat: Complex64, r: Complex64 },
    /// Re sigma = 1 through delta = 1 - sigma: y - 1 of order t, z of order 1/t.
    ReSigma1 {
        delta: Complex64,
        h: Complex64,
        r: Complex64,
    },
    /// sigma = 1: logarithmic version of the previous regime.
    LogSigma1 { h1: Complex64, r: Complex64 },
    /// The constant solution of the reduced (y1, z_{-1}) system.
    FixedPoint { r: Complex64 },
    /// One of b, c, d vanishes. Partial kinds carry the finite limit of
    /// b/s^2, c/s^2, or d s^2 in `limit`; complete kinds carry None.
    Degenerate {
        kind: DegenerateKind,
        limit: Option<Complex64>,
        r: Complex64,
    },
}

const TINY: f64 = 1e-12;
const INT_TOL: f64 = 1e-10;

impl SmallTChart {
    pub fn r(&self) -> Complex64 {
        match *self {
            SmallTChart::GenericSigma { r, .. }
            | SmallTChart::LogSigma0 { r, .. }
            | SmallTChart::ReSigma1 { r, .. }
            | SmallTChart::LogSigma1 { r, .. }
            | SmallTChart::FixedPoint { r }
            | SmallTChart::Degenerate { r, .. } => r,
        }
    }

    pub fn with_r(mut self, new_r: Complex64) -> Self {
        match &mut self {
            SmallTChart::GenericSigma { r, .. }
            | SmallTChart::LogSigma0 { r, .. }
            | SmallTChart::ReSigma1 { r, .. }
            | SmallTChart::LogSigma1 { r, .. }
            | SmallTChart::FixedPoint { r }
            | SmallTChart::Degenerate { r, .. } => *r = new_r,
        }
        self
    }

    /// Checks the hypotheses of the regime's expansion: nonzero free
    /// constants, exponent range, and the non-integrality conditions on the
    /// Theta's the statements require.
    pub fn validate(&self, theta: &ThetaTriple) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidChart(msg));
        if self.r().norm() < TINY {
            return fail("gauge constant r must be nonzero".into());
        }
        let theta_nonint = || -> Result<()> {
            if near_integer(theta.theta0, INT_TOL) || near_integer(theta.theta1, INT_TOL) {
                return Err(Error::InvalidChart(
                    "Theta_0 and Theta_1 must be non-integer in this regime".into(),
                ));
            }
            Ok(())
        };
        let phi_local = 1.0 - theta.theta0 - theta.theta1;
        match *self {
            SmallTChart::GenericSigma { sigma, s2, .. } => {
                theta_nonint()?;
                if sigma.norm() < TINY || s2.norm() < TINY {
                    return fail("sigma and s^2 must be nonzero".into());
                }
                if !(0.0..1.0).contains(&sigma.re) {
                    return fail(format!("Re sigma = {} outside [0, 1)", sigma.re));
                }
            }
            SmallTChart::LogSigma0 { .. } => {
                theta_nonint()?;
            }
            SmallTChart::ReSigma1 { delta, h, .. } => {
                if delta.norm() < TINY || h.norm() < TINY {
                    return fail("delta and h must be nonzero".into());
                }
                if !(0.0..1.0).contains(&delta.re) {
                    return fail(format!("Re delta = {} outside [0, 1)", delta.re));
                }
                if phi_local.norm() < TINY {
                    return fail("Theta_0 + Theta_1 = 1 collapses this regime".into());
                }
            }
            SmallTChart::LogSigma1 { .. } => {
                if phi_local.norm() < TINY {
                    return fail("Theta_0 + Theta_1 = 1 collapses this regime".into());
                }
            }
            SmallTChart::FixedPoint { .. } => {
                if phi_local.norm() < TINY {
                    return fail("Theta_0 + Theta_1 = 1 collapses this regime".into());
                }
                if (theta.theta0 + theta.theta1).norm() < TINY {
                    return fail("Theta_0 + Theta_1 = 0 makes the z constant singular".into());
                }
            }
            SmallTChart::Degenerate { kind, limit, .. } => {
                let sigma = kind.sigma(theta);
                if sigma.norm() < TINY {
                    return fail(format!(
                        "degeneration {kind} forces sigma = 0 at these exponents"
                    ));
                }
                if !(0.0..1.0).contains(&sigma.re) {
                    return fail(format!(
                        "degeneration {kind} forces Re sigma = {} outside [0, 1)",
                        sigma.re
                    ));
                }
                match (kind.is_partial(), limit) {
                    (true, Some(l)) if l.norm() >= TINY => {}
                    (true, _) => {
                        return fail(format!(
                            "partial degeneration {kind} needs a nonzero finite limit"
                        ))
                    }
                    (false, None) => {}
                    (false, Some(_)) => {
                        return fail(format!(
                            "complete degeneration {kind} takes no limit parameter"
                        ))
                    }
                }
            }
        }
        Ok(())
    }
}

fn log_u_from_product(r: Complex64, theta_inf: Complex64, t: &RayPoint, ratio: Complex64) -> Complex64 {
    // u = -r t^Theta_inf ratio, assembled in logarithmic form; the power of t
    // keeps the ray branch, all other factors take principal logs.
    (-r).ln() + theta_inf * t.log() + ratio.ln()
}

/// Power-regime state (exponent sigma, scale s^2, gauge r). Formal in the
/// parameters: no domain checks, so the sigma-flip invariance can be
/// exercised at negated exponents.
pub fn small_t_generic(
    sigma: Complex64,
    s2: Complex64,
    r: Complex64,
    theta: &ThetaTriple,
    t: &RayPoint,
) -> Result<SolutionState> {
    let p = abcd(theta, sigma);
    let m = abcd(theta, -sigma);
    let ts = branch_power(t, sigma);
    let tc = t.to_complex();
    let gamma_hat = 1.0 - theta.theta0 - theta.theta1;

    let num_y = (p.a + s2 * m.d * m.a * ts) * (p.b + s2 * p.d * m.b * ts);
    let den_y = (p.a + s2 * p.d * m.a * ts) * (p.b + s2 * m.d * m.b * ts);
    if den_y.norm() == 0.0 {
        return Err(Error::SingularDenominator {
            what: "small_t_generic",
            detail: format!("y denominator vanished at |t| = {}", t.modulus),
        });
    }
    let one_m_sigma = 1.0 - sigma;
    let y = num_y / den_y + gamma_hat * tc / (one_m_sigma * one_m_sigma);

    let s2ts = sigma * sigma * s2 * ts;
    let z_lead = (p.c + s2 * p.d * m.c * ts) * (p.b + s2 * m.d * m.b * ts) / s2ts;
    let z_corr = p.a / (sigma * sigma * one_m_sigma * s2 * ts);
    let z = z_lead + 2.0 * z_corr * z_corr * tc;

    let u_num = p.b + s2 * m.d * m.b * ts;
    let u_den = p.b + s2 * p.d * m.b * ts;
    if u_den.norm() == 0.0 {
        return Err(Error::SingularDenominator {
            what: "small_t_generic",
            detail: format!("u denominator vanished at |t| = {}", t.modulus),
        });
    }
    let log_u = log_u_from_product(r, theta.theta_inf, t, u_num / u_den);
    Ok(SolutionState::new(*t, y, z, log_u))
}

/// sigma = 0 state: polynomial in L = log t + s1_hat, with b, c, d taken
/// at argument 0.
pub fn small_t_sigma0(
    s1_hat: Complex64,
    r: Complex64,
    theta: &ThetaTriple,
    t: &RayPoint,
) -> Result<SolutionState> {
    let q = abcd(theta, Complex64::ZERO);
    let (b, c, d) = (q.b, q.c, q.d);
    let l = t.log() + s1_hat;
    let z = -d * b * c * l * l + (b * c + (b + c) * d) * l - d - b;
    let y_num = (-d * b * c * l + d * b + b * c + c * d) * (b * l - 1.0);
    let y_den = (-b * c * l + b + c) * (d * b * l - b - d);
    if y_den.norm() == 0.0 {
        return Err(Error::SingularDenominator {
            what: "small_t_sigma0",
            detail: format!("y denominator vanished at |t| = {}", t.modulus),
        });
    }
    // u denominator is d(bL - 1): forced by the u-equation at order one and
    // by the sigma -> 0 limit of the power chart.
    let u_num = d * b * l - b - d;
    let u_den = d * (b * l - 1.0);
    if u_den.norm() == 0.0 {
        return Err(Error::SingularDenominator {
            what: "small_t_sigma0",
            detail: format!("u denominator vanished at |t| = {}", t.modulus),
        });
    }
    let log_u = log_u_from_product(r, theta.theta_inf, t, u_num / u_den);
    Ok(SolutionState::new(*t, y_num / y_den, z, log_u))
}

/// Re sigma = 1 state through delta = 1 - sigma. The local exponent
/// combination phi = 1 - Theta_0 - Theta_1 drives all coefficients.
pub fn small_t_resigma1(
    delta: Complex64,
    h: Complex64,
    r: Complex64,
    theta: &ThetaTriple,
    t: &RayPoint,
) -> Result<SolutionState> {
    let phi = 1.0 - theta.theta0 - theta.theta1;
    if phi.norm() == 0.0 {
        return Err(Error::SingularDenominator {
            what: "small_t_resigma1",
            detail: "Theta_0 + Theta_1 = 1".into(),
        });
    }
    let tc = t.to_complex();
    let td = branch_power(t, delta);
    let tmd = branch_power(t, -delta);
    let d2 = delta * delta;
    let base = phi / d2;
    let curv = (1.0 - d2 / (phi * phi)) * base;
    let y1 = base * tmd / h + base + h / 4.0 * curv * td;
    let w = (delta - phi) / h * base * tmd + (1.0 - phi * phi / d2)
        - (delta + phi) * (h / 4.0) * curv * td;
    if y1.norm() == 0.0 {
        return Err(Error::SingularDenominator {
            what: "small_t_resigma1",
            detail: format!("y1 vanished at |t| = {} (pole of z)", t.modulus),
        });
    }
    let y = 1.0 + y1 * tc;
    let z = w / (2.0 * y1 * y1 * tc);
    let t1md = branch_power(t, 1.0 - delta);
    let t1pd = branch_power(t, 1.0 + delta);
    let u_paren = 1.0
        + t1md * phi / (h * d2 * (1.0 - delta)) * ((delta - phi) / 2.0 - theta.theta1)
        + tc / 2.0
        - tc * base * (phi / 2.0 + theta.theta1)
        - t1pd * h * phi / (4.0 * d2 * (1.0 + delta))
            * (1.0 - d2 / (phi * phi))
            * ((delta + phi) / 2.0 + theta.theta1);
    let log_u = log_u_from_product(r, theta.theta_inf, t, u_paren);
    Ok(SolutionState::new(*t, y, z, log_u))
}

/// sigma = 1 state: logarithmic in L = log t + h1.
pub fn small_t_logsigma1(
    h1: Complex64,
    r: Complex64,
    theta: &ThetaTriple,
    t: &RayPoint,
) -> Result<SolutionState> {
    let phi = 1.0 - theta.theta0 - theta.theta1;
    if phi.norm() == 0.0 {
        return Err(Error::SingularDenominator {
            what: "small_t_logsigma1",
            detail: "Theta_0 + Theta_1 = 1".into(),
        });
    }
    let tc = t.to_complex();
    let l = t.log() + h1;
    let y1 = 1.0 / (2.0 * phi) - phi / 2.0 * l * l;
    let one_p = 1.0 + phi * l;
    let w = one_p * one_p / 2.0;
    if y1.norm() == 0.0 {
        return Err(Error::SingularDenominator {
            what: "small_t_logsigma1",
            detail: format!("y1 vanished at |t| = {} (pole of z)", t.modulus),
        });
    }
    let y = 1.0 + y1 * tc;
    let z = w / (2.0 * y1 * y1 * tc);
    let lm1 = l - 1.0;
    let u_brace = 1.0
        + theta.theta1 / 2.0 * (phi - 1.0 / phi) * tc
        + theta.theta1 * phi * tc / 2.0 * lm1 * lm1
        + tc / 4.0 * (phi * l * (phi * l + 2.0 - 2.0 * phi) + 1.0 - 2.0 * phi + 2.0 * phi * phi);
    let log_u = log_u_from_product(r, theta.theta_inf, t, u_brace);
    Ok(SolutionState::new(*t, y, z, log_u))
}

/// The constant solution of the reduced system: y = 1 + t/phi with
/// phi = 1 - Theta_0 - Theta_1. The order-one constant of z is forced by the
/// t^0 balance of the z equation, and the first u correction comes from the
/// h -> infinity limit of the Re sigma = 1 regime at delta = -phi.
pub fn small_t_fixed_point(
    r: Complex64,
    theta: &ThetaTriple,
    t: &RayPoint,
) -> Result<SolutionState> {
    let phi = 1.0 - theta.theta0 - theta.theta1;
    let sum01 = theta.theta0 + theta.theta1;
    if phi.norm() == 0.0 || sum01.norm() == 0.0 {
        return Err(Error::SingularDenominator {
            what: "small_t_fixed_point",
            detail: "Theta_0 + Theta_1 in {0, 1}".into(),
        });
    }
    let tc = t.to_complex();
    let y = 1.0 + tc / phi;
    let z = -theta.theta0 * theta.e2() / sum01;
    let log_u = log_u_from_product(r, theta.theta_inf, t, 1.0 - theta.theta1 * tc / phi);
    Ok(SolutionState::new(*t, y, z, log_u))
}

/// State for a degenerate chart. `limit` is the finite ratio of the partial
/// kinds (b/s^2, c/s^2, or d s^2); complete kinds ignore it.
pub fn small_t_degenerate(
    kind: DegenerateKind,
    limit: Option<Complex64>,
    r: Complex64,
    theta: &ThetaTriple,
    t: &RayPoint,
) -> Result<SolutionState> {
    let sigma = kind.sigma(theta);
    let tc = t.to_complex();
    let (th0, th1, thi) = (theta.theta0, theta.theta1, theta.theta_inf);
    let need_limit = || {
        limit.ok_or_else(|| Error::Precondition(format!(
            "partial degeneration {kind} needs its finite limit parameter"
        )))
    };
    match kind {
        DegenerateKind::VanishingBComplete => {
            let sum = th0 + th1;
            if sum.norm() == 0.0 {
                return Err(Error::SingularDenominator {
                    what: "small_t_degenerate",
                    detail: "Theta_0 + Theta_1 = 0 in degeneration 1c".into(),
                });
            }
            let y = c64(1.0, 0.0);
            let z = -th0 * (thi + th0 + th1) / (2.0 * sum);
            let ratio = (thi - sigma) / (thi + sigma);
            let log_u = log_u_from_product(r, thi, t, ratio);
            Ok(SolutionState::new(*t, y, z, log_u))
        }
        DegenerateKind::VanishingCComplete => {
            let diff = th1 - th0;
            if diff.norm() == 0.0 {
                return Err(Error::SingularDenominator {
                    what: "small_t_degenerate",
                    detail: "Theta_0 = Theta_1 in degeneration 2c".into(),
                });
            }
            let y = (thi - th0 + th1) / (thi + th0 - th1);
            let z = th0 * (thi + th0 - th1) / (2.0 * diff);
            let log_u = log_u_from_product(r, thi, t, c64(1.0, 0.0));
            Ok(SolutionState::new(*t, y, z, log_u))
        }
        DegenerateKind::VanishingDPartial => {
            // sigma = -Theta_inf; s_f is the finite limit of s^2 d(sigma).
            let sf = need_limit()?;
            let p = abcd(theta, sigma);
            let m = abcd(theta, -sigma);
            let ts = branch_power(t, sigma);
            let den = p.a + sf * m.a * ts;
            let u_den = p.b + sf * m.b * ts;
            if den.norm() == 0.0 || u_den.norm() == 0.0 {
                return Err(Error::SingularDenominator {
                    what: "small_t_degenerate",
                    detail: format!("3p denominator vanished at |t| = {}", t.modulus),
                });
            }
            let y = m.c * u_den / den;
            let z = (th1 * th1 - (th0 + thi) * (th0 + thi)) / (4.0 * thi)
                + sf * ((th1 + thi) * (th1 + thi) - th0 * th0) / (4.0 * thi) * ts;
            let ratio = sf * m.d * m.b * ts / u_den;
            let log_u = log_u_from_product(r, thi, t, ratio);
            Ok(SolutionState::new(*t, y, z, log_u))
        }
        DegenerateKind::VanishingDComplete => {
            let den = th1 - th0 - thi;
            let u_den = th0 + th1 - thi;
            if den.norm() == 0.0 || u_den.norm() == 0.0 {
                return Err(Error::SingularDenominator {
                    what: "small_t_degenerate",
                    detail: "vanishing denominator in degeneration 3c".into(),
                });
            }
            let y = (th1 - th0 + thi) / den;
            let z = (th1 * th1 - (th0 + thi) * (th0 + thi)) / (4.0 * thi);
            // u = -r~ Theta_inf (Theta_0 + Theta_1 + Theta_inf)/(Theta_0 + Theta_1 - Theta_inf):
            // the t^Theta_inf factor cancels against t^sigma in this limit.
            let log_u = (-r * thi * (th0 + th1 + thi) / u_den).ln();
            Ok(SolutionState::new(*t, y, z, log_u))
        }
        DegenerateKind::VanishingBPartial | DegenerateKind::VanishingCPartial => {
            let lhat = need_limit()?;
            let p = abcd(theta, sigma);
            let m = abcd(theta, -sigma);
            let ts = branch_power(t, sigma);
            let gamma_hat = 1.0 - th0 - th1;
            let oms = 1.0 - sigma;
            let s2inv = sigma * sigma * ts;
            if kind == DegenerateKind::VanishingBPartial {
                // lhat = lim b(sigma)/s^2; a/s^2 -> lhat c(sigma).
                let ahat = lhat * p.c;
                let num_y = (ahat + m.d * m.a * ts) * (lhat + p.d * m.b * ts);
                let den_y = (ahat + p.d * m.a * ts) * (lhat + m.d * m.b * ts);
                let u_num = lhat + m.d * m.b * ts;
                let u_den = lhat + p.d * m.b * ts;
                if den_y.norm() == 0.0 || u_den.norm() == 0.0 {
                    return Err(Error::SingularDenominator {
                        what: "small_t_degenerate",
                        detail: format!("1p denominator vanished at |t| = {}", t.modulus),
                    });
                }
                let y = num_y / den_y + gamma_hat * tc / (oms * oms);
                let corr = lhat * p.c / (sigma * sigma * oms * ts);
                let z = p.c * (lhat + m.d * m.b * ts) / s2inv + 2.0 * corr * corr * tc;
                let log_u = log_u_from_product(r, thi, t, u_num / u_den);
                Ok(SolutionState::new(*t, y, z, log_u))
            } else {
                // lhat = lim c(sigma)/s^2; a/s^2 -> lhat b(sigma).
                let ahat = lhat * p.b;
                let num_y = ahat + m.d * m.a * ts;
                let den_y = ahat + p.d * m.a * ts;
                if den_y.norm() == 0.0 {
                    return Err(Error::SingularDenominator {
                        what: "small_t_degenerate",
                        detail: format!("2p denominator vanished at |t| = {}", t.modulus),
                    });
                }
                let y = num_y / den_y + gamma_hat * tc / (oms * oms);
                let corr = lhat * p.b / (sigma * sigma * oms * ts);
                let z = p.b * (lhat + p.d * m.c * ts) / s2inv + 2.0 * corr * corr * tc;
                let log_u = log_u_from_product(r, thi, t, c64(1.0, 0.0));
                Ok(SolutionState::new(*t, y, z, log_u))
            }
        }
    }
}

/// Dispatches a chart to its evaluator.
pub fn small_t_state(chart: &SmallTChart, theta: &ThetaTriple, t: &RayPoint) -> Result<SolutionState> {
    match *chart {
        SmallTChart::GenericSigma { sigma, s2, r } => small_t_generic(sigma, s2, r, theta, t),
        SmallTChart::LogSigma0 { s1_hat, r } => small_t_sigma0(s1_hat, r, theta, t),
        SmallTChart::ReSigma1 { delta, h, r } => small_t_resigma1(delta, h, r, theta, t),
        SmallTChart::LogSigma1 { h1, r } => small_t_logsigma1(h1, r, theta, t),
        SmallTChart::FixedPoint { r } => small_t_fixed_point(r, theta, t),
        SmallTChart::Degenerate { kind, limit, r } => {
            small_t_degenerate(kind, limit, r, theta, t)
        }
    }
}

/// Small-t expansion of zeta for each chart, through the terms the regime
/// pins down (constant, t-linear, and the surviving t^(1 +- sigma) powers).
pub fn small_t_zeta(chart: &SmallTChart, theta: &ThetaTriple, t: &RayPoint) -> Result<Complex64> {
    let (th0, th1, thi) = (theta.theta0, theta.theta1, theta.theta_inf);
    let tc = t.to_complex();
    match *chart {
        SmallTChart::GenericSigma { sigma, s2, .. } => {
            let s = sigma;
            let c0 = (s * s - th1 * th1 + th0 * th0 + 2.0 * th0 * thi) / 4.0;
            let t1ms = branch_power(t, 1.0 - s);
            let t1ps = branch_power(t, 1.0 + s);
            let term_m = -((th1 + s) * (th1 + s) - th0 * th0)
                / (4.0 * s2 * s * s * (1.0 - s))
                * t1ms;
            let lin = tc / (4.0 * s * s)
                * (2.0 * th0 * s * s + thi * (th0 * th0 - th1 * th1 + s * s));
            let term_p = -s2 * (thi * thi - s * s) * ((th1 - s) * (th1 - s) - th0 * th0)
                / (16.0 * s * s * (1.0 + s))
                * t1ps;
            Ok(c0 + term_m + lin + term_p)
        }
        SmallTChart::LogSigma0 { s1_hat, .. } => {
            let q = abcd(theta, Complex64::ZERO);
            let (b, c, d) = (q.b, q.c, q.d);
            let l = t.log() + s1_hat;
            Ok(-b * c + (b - c) * d
                + tc * l * (d * b * c * l - d * b - b * c - c * d - 2.0 * b * c * d)
                + tc * (b + d + d * b + b * c + c * d + 2.0 * d * b * c))
        }
        SmallTChart::ReSigma1 { delta, h, .. } => {
            let phi = 1.0 - th0 - th1;
            let td = branch_power(t, delta);
            let den = h * td * (delta - phi) - 2.0 * phi;
            if den.norm() == 0.0 {
                return Err(Error::SingularDenominator {
                    what: "small_t_zeta",
                    detail: "vanishing denominator in the Re sigma = 1 zeta".into(),
                });
            }
            Ok(delta
                + ((1.0 - delta) * (1.0 - delta) + th0 * th0 - th1 * th1 + 2.0 * th0 * thi) / 4.0
                + 2.0 * phi * delta / den)
        }
        SmallTChart::LogSigma1 { h1, .. } => {
            let phi = 1.0 - th0 - th1;
            let l = t.log() + h1;
            let den = phi * l - 1.0;
            if den.norm() == 0.0 {
                return Err(Error::SingularDenominator {
                    what: "small_t_zeta",
                    detail: "vanishing denominator in the sigma = 1 zeta".into(),
                });
            }
            Ok((1.0 + th0 * th0 - th1 * th1 + 2.0 * th0 * thi) / 4.0 + phi / den)
        }
        SmallTChart::FixedPoint { .. } => {
            let phi = 1.0 - th0 - th1;
            Ok(-phi + ((1.0 + phi) * (1.0 + phi) + th0 * th0 - th1 * th1 + 2.0 * th0 * thi) / 4.0)
        }
        SmallTChart::Degenerate { kind, limit, .. } => {
            let s = kind.sigma(theta);
            let c0 = (s * s - th1 * th1 + th0 * th0 + 2.0 * th0 * thi) / 4.0;
            let lin = tc / (4.0 * s * s)
                * (2.0 * th0 * s * s + thi * (th0 * th0 - th1 * th1 + s * s));
            // Power terms survive only where the degeneration keeps them
            // finite and nonzero: the t^(1-sigma) term scales like 1/s^2 and
            // the t^(1+sigma) term like s^2.
            let mut zeta = c0 + lin;
            match kind {
                DegenerateKind::VanishingBPartial => {
                    let lhat = limit.ok_or_else(|| Error::Precondition(
                        "partial degeneration 1p needs its finite limit parameter".into(),
                    ))?;
                    let cp = abcd(theta, s).c;
                    zeta -= lhat * cp / (s * s * (1.0 - s)) * branch_power(t, 1.0 - s);
                }
                DegenerateKind::VanishingCPartial => {
                    let lhat = limit.ok_or_else(|| Error::Precondition(
                        "partial degeneration 2p needs its finite limit parameter".into(),
                    ))?;
                    let bp = abcd(theta, s).b;
                    zeta -= lhat * bp / (s * s * (1.0 - s)) * branch_power(t, 1.0 - s);
                }
                DegenerateKind::VanishingDPartial => {
                    let sf = limit.ok_or_else(|| Error::Precondition(
                        "partial degeneration 3p needs its finite limit parameter".into(),
                    ))?;
                    let dm = abcd(theta, -s).d;
                    zeta -= sf * dm * ((th1 - s) * (th1 - s) - th0 * th0)
                        / (4.0 * s * s * (1.0 + s))
                        * branch_power(t, 1.0 + s);
                }
                _ => {}
            }
            Ok(zeta)
        }
    }
}

/// The involution on power-regime parameters that leaves all expansions and
/// monodromy data unchanged:
/// (sigma, s^2, r) -> (-sigma, 4 / ((Theta_inf^2 - sigma^2) s^2),
///                     r (Theta_inf - sigma)/(Theta_inf + sigma)).
/// Errors when Theta_inf = +-sigma.
pub fn sigma_flip(
    sigma: Complex64,
    s2: Complex64,
    r: Complex64,
    theta: &ThetaTriple,
) -> Result<(Complex64, Complex64, Complex64)> {
    let disc = theta.theta_inf * theta.theta_inf - sigma * sigma;
    if disc.norm() < TINY || s2.norm() < TINY {
        return Err(Error::SingularDenominator {
            what: "sigma_flip",
            detail: format!(
                "Theta_inf^2 - sigma^2 = {disc} or s^2 = {s2} too close to zero"
            ),
        });
    }
    Ok((
        -sigma,
        4.0 / (disc * s2),
        r * (theta.theta_inf - sigma) / (theta.theta_inf + sigma),
    ))
}

/// Converts a Re sigma = 1 chart to power-regime parameters
/// (sigma, s^2, r) for the monodromy map: sigma = 1 - delta and
///
/// s^2 = (1 - Theta_0 - Theta_1) ((Theta_1+sigma)^2 - Theta_0^2)
///       / (2 (1-sigma)^2 sigma^2 h (Theta_1 + Theta_0 - sigma)).
pub fn resigma1_to_generic(
    delta: Complex64,
    h: Complex64,
    r: Complex64,
    theta: &ThetaTriple,
) -> Result<(Complex64, Complex64, Complex64)> {
    let sigma = 1.0 - delta;
    let phi = 1.0 - theta.theta0 - theta.theta1;
    let bm2 = theta.theta1 + theta.theta0 - sigma;
    let den = 2.0 * delta * delta * sigma * sigma * h * bm2;
    if den.norm() < TINY {
        return Err(Error::SingularDenominator {
            what: "resigma1_to_generic",
            detail: format!("denominator {den} too close to zero"),
        });
    }
    let s2 = phi * ((theta.theta1 + sigma) * (theta.theta1 + sigma) - theta.theta0 * theta.theta0)
        / den;
    Ok((sigma, s2, r))
}
