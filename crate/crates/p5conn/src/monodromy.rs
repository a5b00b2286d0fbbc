//! Monodromy data of the associated linear problem as first-class values.
//!
//! The isomonodromy correspondence attaches to each solution germ a pair of
//! 2x2 matrices, one per finite singular point of the lambda-plane equation,
//! plus two Stokes multipliers at the irregular point. This module owns the
//! constraint checks that tie those pieces together, the closed-form maps
//! from each small-t chart onto the data, the two-way maps between the data
//! and the large-t exponential charts (with the integer branch fitting for
//! the exponent), and the conversion to the I-parameter normal form used for
//! the symmetric family Theta_0 = Theta_1, Theta_inf = 0.
//!
//! Conventions: Stokes matrices alternate triangularity (S_1 lower, S_2
//! upper), the formal monodromy at infinity is e^{i pi Theta_inf sigma_3},
//! and the cyclic relation M_inf m^1 m^0 = I closes the data. The gauge
//! constant r scales m^p_12 by r and m^p_21 by 1/r and cancels from every
//! observable quantity.

use std::f64::consts::PI;

use crate::asympt_inf::LargeTChart;
use crate::asympt_zero::{abcd, near_integer, resigma1_to_generic, DegenerateKind, SmallTChart};
use crate::model::ThetaTriple;
use crate::specfun::{complex_gamma as gamma, digamma, reciprocal_gamma};
use crate::{c64, Complex64, Error, Result};

/// Residuals at or below this bound count as satisfied constraints.
pub const VALIDITY_TOL: f64 = 1e-8;

const INT_TOL: f64 = 1e-10;
const TINY: f64 = 1e-12;

fn exp_ipi(x: Complex64) -> Complex64 {
    (c64(0.0, PI) * x).exp()
}

fn cos_pi(x: Complex64) -> Complex64 {
    (x * PI).cos()
}

fn sin_pi(x: Complex64) -> Complex64 {
    (x * PI).sin()
}

/// 2x2 complex matrix in row-major entry naming.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl Mat2 {
    pub fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        Mat2 { m11, m12, m21, m22 }
    }

    pub fn identity() -> Self {
        Mat2::new(c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0))
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Mat2::new(a, c64(0.0, 0.0), c64(0.0, 0.0), d)
    }

    /// Unit lower-triangular matrix with subdiagonal entry `s`.
    pub fn lower_unit(s: Complex64) -> Self {
        Mat2::new(c64(1.0, 0.0), c64(0.0, 0.0), s, c64(1.0, 0.0))
    }

    /// Unit upper-triangular matrix with superdiagonal entry `s`.
    pub fn upper_unit(s: Complex64) -> Self {
        Mat2::new(c64(1.0, 0.0), s, c64(0.0, 0.0), c64(1.0, 0.0))
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> Complex64 {
        self.m11 + self.m22
    }

    /// Inverse through the adjugate. Intended for the unimodular matrices of
    /// this module; defined whenever the determinant is nonzero.
    pub fn inverse(&self) -> Mat2 {
        let det = self.det();
        Mat2::new(
            self.m22 / det,
            -self.m12 / det,
            -self.m21 / det,
            self.m11 / det,
        )
    }

    /// Largest entry magnitude of the difference against `other`.
    pub fn max_entry_distance(&self, other: &Mat2) -> f64 {
        let d = [
            (self.m11 - other.m11).norm(),
            (self.m12 - other.m12).norm(),
            (self.m21 - other.m21).norm(),
            (self.m22 - other.m22).norm(),
        ];
        d.into_iter().fold(0.0, f64::max)
    }
}

impl std::ops::Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.m11 * rhs.m11 + self.m12 * rhs.m21,
            self.m11 * rhs.m12 + self.m12 * rhs.m22,
            self.m21 * rhs.m11 + self.m22 * rhs.m21,
            self.m21 * rhs.m12 + self.m22 * rhs.m22,
        )
    }
}

/// The full monodromy data set of one solution: the two finite-point
/// matrices, the two Stokes multipliers, and the exponents they belong to.
///
/// Serializes as `{theta, m0, m1, s1, s2}` with every complex number encoded
/// as an `[re, im]` pair and each matrix flattened row-major to four pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyData {
    pub m0: Mat2,
    pub m1: Mat2,
    pub s1: Complex64,
    pub s2: Complex64,
    pub theta: ThetaTriple,
}

/// One named constraint residual from [`MonodromyData::validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintResidual {
    pub name: &'static str,
    pub value: f64,
}

impl MonodromyData {
    /// Monodromy at infinity assembled from the Stokes multipliers and the
    /// formal monodromy: S_2 e^{i pi Theta_inf sigma_3} S_1.
    pub fn m_inf(&self) -> Mat2 {
        let formal = Mat2::diag(
            exp_ipi(self.theta.theta_inf),
            exp_ipi(-self.theta.theta_inf),
        );
        Mat2::upper_unit(self.s2) * formal * Mat2::lower_unit(self.s1)
    }

    /// Residuals of the four constraint families: unit determinants, traces
    /// pinned by the exponents, the (1,1) entry of m^1 m^0, and the cyclic
    /// closure M_inf m^1 m^0 = I. Diagnostic only; nothing here can fail.
    pub fn validate(&self) -> Vec<ConstraintResidual> {
        let one = c64(1.0, 0.0);
        let prod = self.m1 * self.m0;
        vec![
            ConstraintResidual {
                name: "det m0 - 1",
                value: (self.m0.det() - one).norm(),
            },
            ConstraintResidual {
                name: "det m1 - 1",
                value: (self.m1.det() - one).norm(),
            },
            ConstraintResidual {
                name: "tr m0 - 2cos(pi Theta_0)",
                value: (self.m0.trace() - 2.0 * cos_pi(self.theta.theta0)).norm(),
            },
            ConstraintResidual {
                name: "tr m1 - 2cos(pi Theta_1)",
                value: (self.m1.trace() - 2.0 * cos_pi(self.theta.theta1)).norm(),
            },
            ConstraintResidual {
                name: "(m1 m0)_11 - e^{-i pi Theta_inf}",
                value: (prod.m11 - exp_ipi(-self.theta.theta_inf)).norm(),
            },
            ConstraintResidual {
                name: "M_inf m1 m0 - I",
                value: (self.m_inf() * prod).max_entry_distance(&Mat2::identity()),
            },
        ]
    }

    /// True when every residual of [`validate`](Self::validate) is at most
    /// [`VALIDITY_TOL`].
    pub fn is_valid(&self) -> bool {
        self.validate().iter().all(|r| r.value <= VALIDITY_TOL)
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct MonodromyDataRepr {
    theta: [[f64; 2]; 3],
    m0: [[f64; 2]; 4],
    m1: [[f64; 2]; 4],
    s1: [f64; 2],
    s2: [f64; 2],
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn unpair(p: [f64; 2]) -> Complex64 {
    c64(p[0], p[1])
}

fn mat_pairs(m: &Mat2) -> [[f64; 2]; 4] {
    [pair(m.m11), pair(m.m12), pair(m.m21), pair(m.m22)]
}

fn mat_unpairs(p: [[f64; 2]; 4]) -> Mat2 {
    Mat2::new(unpair(p[0]), unpair(p[1]), unpair(p[2]), unpair(p[3]))
}

impl serde::Serialize for MonodromyData {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MonodromyDataRepr {
            theta: [
                pair(self.theta.theta0),
                pair(self.theta.theta1),
                pair(self.theta.theta_inf),
            ],
            m0: mat_pairs(&self.m0),
            m1: mat_pairs(&self.m1),
            s1: pair(self.s1),
            s2: pair(self.s2),
        }
        .serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for MonodromyData {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MonodromyDataRepr::deserialize(deserializer)?;
        Ok(MonodromyData {
            m0: mat_unpairs(repr.m0),
            m1: mat_unpairs(repr.m1),
            s1: unpair(repr.s1),
            s2: unpair(repr.s2),
            theta: ThetaTriple::new(
                unpair(repr.theta[0]),
                unpair(repr.theta[1]),
                unpair(repr.theta[2]),
            ),
        })
    }
}

/// Intermediate matrices of the power-regime monodromy map, shared with the
/// partially degenerate maps.
struct HatPair {
    m0: Mat2,
    m1: Mat2,
}

/// Builds the hypergeometric-block matrices for exponent `sigma`. Requires
/// sin(pi sigma) away from zero; the Gamma factors inside exclude integer
/// b(+-sigma) and c(+-sigma).
fn hat_pair(theta: &ThetaTriple, sigma: Complex64) -> Result<HatPair> {
    let sp = sin_pi(sigma);
    if sp.norm() < TINY {
        return Err(Error::Resonance {
            what: "monodromy hat block",
            detail: format!("sin(pi sigma) vanishes at sigma = {sigma}"),
        });
    }
    let plus = abcd(theta, sigma);
    let minus = abcd(theta, -sigma);
    let two_pi2 = 2.0 * PI * PI;
    let p_hat = gamma(1.0 + sigma)? / gamma(1.0 - sigma)? * two_pi2
        / (gamma(1.0 + plus.b)? * gamma(-minus.b)? * gamma(1.0 + plus.c)? * gamma(-minus.c)?);
    let q_hat = -gamma(1.0 - sigma)? / gamma(1.0 + sigma)? * two_pi2
        / (gamma(1.0 + minus.b)? * gamma(-plus.b)? * gamma(1.0 + minus.c)? * gamma(-plus.c)?);
    let pref = c64(0.0, -1.0) / sp;
    let c0 = cos_pi(theta.theta0);
    let c1 = cos_pi(theta.theta1);
    let eis = exp_ipi(sigma);
    let emis = exp_ipi(-sigma);
    let m0 = Mat2::new(
        pref * (-c1 + eis * c0),
        pref * (-emis * p_hat),
        pref * (-eis * q_hat),
        pref * (c1 - emis * c0),
    );
    let m1 = Mat2::new(
        pref * (-c0 + eis * c1),
        pref * p_hat,
        pref * q_hat,
        pref * (c0 - emis * c1),
    );
    Ok(HatPair { m0, m1 })
}

/// Gamma values of the d-combination that dress the hat block.
struct DGammas {
    dp: Complex64,
    dm: Complex64,
    g_dp: Complex64,
    g_1mdp: Complex64,
    g_1pdm: Complex64,
    g_mdm: Complex64,
}

fn d_gammas(theta: &ThetaTriple, sigma: Complex64) -> Result<DGammas> {
    let dp = abcd(theta, sigma).d;
    let dm = abcd(theta, -sigma).d;
    Ok(DGammas {
        dp,
        dm,
        g_dp: gamma(dp)?,
        g_1mdp: gamma(1.0 - dp)?,
        g_1pdm: gamma(1.0 + dm)?,
        g_mdm: gamma(-dm)?,
    })
}

/// Stokes multipliers in terms of d(+-sigma) alone. Reciprocal-gamma form,
/// so integer d-values give the honest zero limits instead of errors.
fn stokes_pair(r: Complex64, theta_inf: Complex64, dp: Complex64, dm: Complex64) -> (Complex64, Complex64) {
    let two_pi_i = c64(0.0, 2.0 * PI);
    let s2 = -two_pi_i * r * exp_ipi(theta_inf) * reciprocal_gamma(1.0 - dp) * reciprocal_gamma(-dm);
    let s1 = -two_pi_i / r * reciprocal_gamma(1.0 + dm) * reciprocal_gamma(dp);
    (s1, s2)
}

/// Dresses one hat matrix into the actual monodromy matrix of the power
/// regime.
fn dress(
    hat: &Mat2,
    dg: &DGammas,
    s2_hat: Complex64,
    d_hat: Complex64,
    sigma: Complex64,
    theta_inf: Complex64,
    r: Complex64,
) -> Mat2 {
    let eh = exp_ipi(sigma / 2.0);
    let emh = exp_ipi(-sigma / 2.0);
    let m11 = (emh * hat.m11 * sin_pi(dg.dm) / PI - eh * hat.m22 * sin_pi(dg.dp) / PI
        - emh * hat.m21 / (s2_hat * dg.g_1pdm * dg.g_1mdp)
        - s2_hat * eh * hat.m12 / (dg.g_dp * dg.g_mdm))
        / d_hat;
    let m22 = (-eh * hat.m11 * sin_pi(dg.dp) / PI + emh * hat.m22 * sin_pi(dg.dm) / PI
        + emh * hat.m21 / (s2_hat * dg.g_1mdp * dg.g_1pdm)
        + s2_hat * eh * hat.m12 / (dg.g_mdm * dg.g_dp))
        / d_hat;
    let m12 = r * exp_ipi(theta_inf / 2.0) / d_hat
        * ((hat.m22 - hat.m11) / (dg.g_mdm * dg.g_1mdp)
            - hat.m21 / (s2_hat * dg.g_1mdp * dg.g_1mdp)
            + s2_hat * hat.m12 / (dg.g_mdm * dg.g_mdm));
    let m21 = exp_ipi(-theta_inf / 2.0) / (r * d_hat)
        * ((hat.m22 - hat.m11) / (dg.g_dp * dg.g_1pdm)
            + hat.m21 * exp_ipi(-sigma) / (s2_hat * dg.g_1pdm * dg.g_1pdm)
            - s2_hat * hat.m12 * exp_ipi(sigma) / (dg.g_dp * dg.g_dp));
    Mat2::new(m11, m12, m21, m22)
}

fn require_noninteger_theta01(theta: &ThetaTriple, what: &str) -> Result<()> {
    if near_integer(theta.theta0, INT_TOL) || near_integer(theta.theta1, INT_TOL) {
        return Err(Error::Precondition(format!(
            "{what} requires non-integer Theta_0 and Theta_1, got {} and {}",
            theta.theta0, theta.theta1
        )));
    }
    Ok(())
}

fn require_nonzero_gauge(r: Complex64) -> Result<()> {
    if r.norm() < TINY || !r.is_finite() {
        return Err(Error::Precondition(format!(
            "gauge constant r must be finite and nonzero, got {r}"
        )));
    }
    Ok(())
}

/// Monodromy of the power-regime germ (exponent `sigma`, scale `s2`, gauge
/// `r`). All eight matrix entries and both Stokes multipliers in closed
/// form; fails with a Gamma-pole error on the excluded integer combinations
/// b(+-sigma), c(+-sigma), d(+-sigma).
pub fn monodromy_generic(
    sigma: Complex64,
    s2: Complex64,
    r: Complex64,
    theta: &ThetaTriple,
) -> Result<MonodromyData> {
    require_noninteger_theta01(theta, "the power-regime monodromy map")?;
    require_nonzero_gauge(r)?;
    if near_integer(sigma, INT_TOL) {
        return Err(Error::Resonance {
            what: "monodromy_generic",
            detail: format!("integer exponent sigma = {sigma}"),
        });
    }
    if s2.norm() < TINY {
        return Err(Error::Precondition(format!(
            "scale parameter s^2 must be nonzero, got {s2}"
        )));
    }
    let hats = hat_pair(theta, sigma)?;
    let dg = d_gammas(theta, sigma)?;
    let s2_hat = s2 * gamma(sigma)? / gamma(-sigma)?;
    let d_hat = -exp_ipi(theta.theta_inf / 2.0) / PI * sin_pi(sigma);
    let (s1, s2s) = stokes_pair(r, theta.theta_inf, dg.dp, dg.dm);
    Ok(MonodromyData {
        m0: dress(&hats.m0, &dg, s2_hat, d_hat, sigma, theta.theta_inf, r),
        m1: dress(&hats.m1, &dg, s2_hat, d_hat, sigma, theta.theta_inf, r),
        s1,
        s2: s2s,
        theta: *theta,
    })
}

/// Monodromy of the logarithmic germ at exponent zero, parameterized by the
/// shift `s1_hat` inside log t + s1_hat and the gauge `r`. Requires
/// non-integer Theta_0, Theta_1 and Theta_inf/2 off the Gamma poles.
pub fn monodromy_sigma0(
    s1_hat: Complex64,
    r: Complex64,
    theta: &ThetaTriple,
) -> Result<MonodromyData> {
    require_noninteger_theta01(theta, "the logarithmic-regime monodromy map")?;
    require_nonzero_gauge(r)?;
    let b = (theta.theta1 + theta.theta0) / 2.0;
    let c = (theta.theta1 - theta.theta0) / 2.0;
    let d = theta.theta_inf / 2.0;
    if near_integer(d, INT_TOL) {
        return Err(Error::Resonance {
            what: "monodromy_sigma0",
            detail: format!("Theta_inf/2 = {d} is integer"),
        });
    }
    let bh = b * PI;
    let ch = c * PI;
    let dh = d * PI;
    let i = c64(0.0, 1.0);
    // Sign pinned by the sigma -> 0 limit of the power-regime map together
    // with the closure constraints on the resulting data.
    let d1sq = 2.0 * PI / (r * theta.theta_inf) * exp_ipi(-theta.theta_inf / 2.0)
        / (gamma(d)? * gamma(d)?);
    let omega = (s1_hat - digamma(b + 1.0)? - digamma(c + 1.0)? - digamma(d + 1.0)?
        + 4.0 * digamma(c64(1.0, 0.0))?)
        / PI;
    let w1 = omega * bh.sin() * ch.sin() - (bh + ch).sin();
    let e_mdh = (-i * dh).exp();
    let e_pdh = (i * dh).exp();
    let c0 = cos_pi(theta.theta0);
    let c1 = cos_pi(theta.theta1);
    let bracket1 =
        (omega * dh.sin() - e_mdh) * w1 - 0.5 * e_mdh * (bh + ch).sin() - i * dh.cos() * bh.sin() * ch.sin();
    let bracket0 =
        (omega * dh.sin() - e_pdh) * w1 - 0.5 * e_pdh * (bh + ch).sin() + dh.sin() * bh.cos() * ch.cos();
    let m1_11 = c1 + 2.0 * i * e_mdh * bracket1;
    let m1_22 = c1 - 2.0 * i * e_mdh * bracket1;
    let m0_11 = c0 - 2.0 * i * e_mdh * bracket0;
    let m0_22 = c0 + 2.0 * i * e_mdh * bracket0;
    let m1_12 = 2.0 * i * e_mdh / d1sq
        * (omega * dh.sin() - dh.cos())
        * (w1 * dh.sin() - dh.cos() * bh.sin() * ch.sin());
    let m0_12 = -2.0 * i * e_mdh / d1sq
        * (dh.sin() * (omega * dh.sin() - e_pdh) * w1
            - e_pdh * ch.sin() * bh.sin() * (omega * dh.sin() - e_pdh)
            + ch.cos() * bh.cos() * dh.sin() * dh.sin());
    let m0_21 = 2.0 * i * e_mdh * d1sq * (omega * w1 + ch.cos() * bh.cos());
    let m1_21 = -2.0 * i * e_mdh * d1sq * (omega + i) * (w1 + i * bh.sin() * ch.sin());
    let two_pi_i = c64(0.0, 2.0 * PI);
    let s1 = -two_pi_i / (r * gamma(1.0 + d)? * gamma(d)?);
    let s2 = -two_pi_i * r * exp_ipi(theta.theta_inf) / (gamma(1.0 - d)? * gamma(-d)?);
    Ok(MonodromyData {
        m0: Mat2::new(m0_11, m0_12, m0_21, m0_22),
        m1: Mat2::new(m1_11, m1_12, m1_21, m1_22),
        s1,
        s2,
        theta: *theta,
    })
}

/// Shared 11/22 entries of the completely degenerate data: the limit of the
/// power-regime entries once the hypergeometric block collapses.
fn degenerate_diag(theta: &ThetaTriple, sigma: Complex64, p: usize) -> Result<(Complex64, Complex64)> {
    let s2pi = sin_pi(sigma) * sin_pi(sigma);
    if s2pi.norm() < TINY {
        return Err(Error::Resonance {
            what: "monodromy_degenerate",
            detail: format!("sin^2(pi sigma) vanishes at sigma = {sigma}"),
        });
    }
    let (tp, tq) = if p == 0 {
        (theta.theta0, theta.theta1)
    } else {
        (theta.theta1, theta.theta0)
    };
    let cp = cos_pi(tp);
    let cq = cos_pi(tq);
    let cs = cos_pi(sigma);
    let c2s = cos_pi(2.0 * sigma);
    let eh = exp_ipi(theta.theta_inf / 2.0);
    let emh = exp_ipi(-theta.theta_inf / 2.0);
    let m11 = -emh / s2pi * (emh * (-cq + cp * cs) + eh * (-cp + cq * cs));
    let m22 = -emh / s2pi * (emh * (cq - cp * cs) + eh * (-cq * cs + cp * c2s));
    Ok((m11, m22))
}

/// Monodromy data of the degenerate charts. Complete kinds 1c and 2c share
/// one display; the d-kinds come from the collapse of the power-regime map
/// at sigma = -Theta_inf, partially (3p, finite limit s_f of d(sigma) s^2,
/// gauge r meaning the adjusted r-hat) or completely (3c, gauge r meaning
/// the limit of r-hat s_f). Partial kinds 1p and 2p have no closed-form
/// data here and are rejected.
pub fn monodromy_degenerate(
    kind: DegenerateKind,
    limit: Option<Complex64>,
    r: Complex64,
    theta: &ThetaTriple,
) -> Result<MonodromyData> {
    require_nonzero_gauge(r)?;
    let sigma = kind.sigma(theta);
    match kind {
        DegenerateKind::VanishingBComplete | DegenerateKind::VanishingCComplete => {
            if limit.is_some() {
                return Err(Error::Precondition(format!(
                    "complete degeneration {kind} takes no limit parameter"
                )));
            }
            let dp = abcd(theta, sigma).d;
            let dm = abcd(theta, -sigma).d;
            let s2pi = sin_pi(sigma) * sin_pi(sigma);
            if s2pi.norm() < TINY {
                return Err(Error::Resonance {
                    what: "monodromy_degenerate",
                    detail: format!("sin^2(pi sigma) vanishes at sigma = {sigma}"),
                });
            }
            // Off-diagonal scale 2 pi i pinned by the unit determinant of
            // each matrix (equivalently the collapse limit of the
            // power-regime entries).
            let i2pi = c64(0.0, 2.0 * PI);
            let mut mats = [Mat2::identity(), Mat2::identity()];
            for (p, mat) in mats.iter_mut().enumerate() {
                let (m11, m22) = degenerate_diag(theta, sigma, p)?;
                let (tp, tq) = if p == 0 {
                    (theta.theta0, theta.theta1)
                } else {
                    (theta.theta1, theta.theta0)
                };
                let num = cos_pi(tq) - cos_pi(tp) * cos_pi(sigma);
                let m12 = i2pi * r / s2pi * num * reciprocal_gamma(-dm) * reciprocal_gamma(1.0 - dp);
                let m21 = i2pi * exp_ipi(-theta.theta_inf) / (r * s2pi) * num
                    * reciprocal_gamma(dp)
                    * reciprocal_gamma(1.0 + dm);
                *mat = Mat2::new(m11, m12, m21, m22);
            }
            // The Stokes multipliers involve only d(+-sigma) and pass through
            // the collapse of the hypergeometric block unchanged.
            let (s1, s2) = stokes_pair(r, theta.theta_inf, dp, dm);
            Ok(MonodromyData {
                m0: mats[0],
                m1: mats[1],
                s1,
                s2,
                theta: *theta,
            })
        }
        DegenerateKind::VanishingDPartial => {
            let sf = limit.ok_or_else(|| {
                Error::Precondition(
                    "partial degeneration 3p needs the finite limit of d(sigma) s^2".into(),
                )
            })?;
            if sf.norm() < TINY {
                return Err(Error::Precondition(format!(
                    "3p limit parameter must be nonzero, got {sf}"
                )));
            }
            let hats = hat_pair(theta, sigma)?;
            let s2_tilde = sf * gamma(sigma)? / gamma(-sigma)?;
            let d_hat = -exp_ipi(theta.theta_inf / 2.0) / PI * sin_pi(sigma);
            let g_m_inf = gamma(-theta.theta_inf)?;
            let g_1p_inf = gamma(1.0 + theta.theta_inf)?;
            let eh_s = exp_ipi(sigma / 2.0);
            let mut mats = [Mat2::identity(), Mat2::identity()];
            for (p, mat) in mats.iter_mut().enumerate() {
                let hat = if p == 0 { &hats.m0 } else { &hats.m1 };
                let (base11, base22) = degenerate_diag(theta, sigma, p)?;
                let shift = s2_tilde * eh_s * hat.m12 / (d_hat * g_m_inf);
                let m11 = base11 - shift;
                let m22 = base22 + shift;
                let m12 = r * exp_ipi(theta.theta_inf / 2.0) * s2_tilde * hat.m12
                    / (d_hat * g_m_inf * g_m_inf);
                let m21 = exp_ipi(-theta.theta_inf / 2.0) / (r * d_hat)
                    * ((hat.m22 - hat.m11) / g_1p_inf
                        + hat.m21 * exp_ipi(-sigma) / (s2_tilde * g_1p_inf * g_1p_inf)
                        - s2_tilde * hat.m12 * exp_ipi(sigma));
                *mat = Mat2::new(m11, m12, m21, m22);
            }
            // Collapse limit of the power-regime multiplier: the d(sigma)
            // factor of the gauge cancels against the Gamma pole, and the
            // scale parameter drops out, as the cyclic closure requires.
            let s1 = -c64(0.0, 2.0 * PI) / (r * g_1p_inf);
            Ok(MonodromyData {
                m0: mats[0],
                m1: mats[1],
                s1,
                s2: c64(0.0, 0.0),
                theta: *theta,
            })
        }
        DegenerateKind::VanishingDComplete => {
            if limit.is_some() {
                return Err(Error::Precondition(
                    "complete degeneration 3c takes no limit parameter".into(),
                ));
            }
            let hats = hat_pair(theta, sigma)?;
            let d_hat = -exp_ipi(theta.theta_inf / 2.0) / PI * sin_pi(sigma);
            let scale = exp_ipi(theta.theta_inf / 2.0) * sin_pi(theta.theta_inf) / (PI * d_hat);
            let mut mats = [Mat2::identity(), Mat2::identity()];
            for (p, mat) in mats.iter_mut().enumerate() {
                let hat = if p == 0 { &hats.m0 } else { &hats.m1 };
                let (m11, m22) = degenerate_diag(theta, sigma, p)?;
                let m12 = -r * theta.theta_inf * hat.m12 * scale;
                let m21 = -hat.m21 * scale / (r * theta.theta_inf);
                *mat = Mat2::new(m11, m12, m21, m22);
            }
            Ok(MonodromyData {
                m0: mats[0],
                m1: mats[1],
                s1: c64(0.0, 0.0),
                s2: c64(0.0, 0.0),
                theta: *theta,
            })
        }
        DegenerateKind::VanishingBPartial | DegenerateKind::VanishingCPartial => {
            Err(Error::Precondition(format!(
                "partial degeneration {kind} has no closed-form monodromy here; \
                 only its leading-order expansion is available"
            )))
        }
    }
}

/// Monodromy data of a small-t chart. Dispatches on the regime: the power,
/// logarithmic, and degenerate charts map in closed form; the charts of the
/// exponent-one family are converted when possible (Re sigma in (0, 1)) and
/// rejected otherwise.
pub fn monodromy_from_small_t(chart: &SmallTChart, theta: &ThetaTriple) -> Result<MonodromyData> {
    match *chart {
        SmallTChart::GenericSigma { sigma, s2, r } => monodromy_generic(sigma, s2, r, theta),
        SmallTChart::LogSigma0 { s1_hat, r } => monodromy_sigma0(s1_hat, r, theta),
        SmallTChart::Degenerate { kind, limit, r } => monodromy_degenerate(kind, limit, r, theta),
        SmallTChart::ReSigma1 { delta, h, r } => {
            let (sigma, s2, r) = resigma1_to_generic(delta, h, r, theta)?;
            if sigma.re <= 0.0 || sigma.re >= 1.0 {
                return Err(Error::Precondition(format!(
                    "converted exponent sigma = {sigma} leaves the power regime"
                )));
            }
            monodromy_generic(sigma, s2, r, theta)
        }
        SmallTChart::LogSigma1 { .. } | SmallTChart::FixedPoint { .. } => {
            Err(Error::Precondition(
                "monodromy of the exponent-one logarithmic and fixed-point charts \
                 is outside the regime split covered here"
                    .into(),
            ))
        }
    }
}

/// Exponent recovered from the product of the Stokes multipliers through
/// 2cos(pi sigma) = 2cos(pi Theta_inf) + s1 s2 e^{-i pi Theta_inf}.
/// The representative has Re sigma in [0, 1]; on the boundary strips the
/// sign of Im sigma is normalized to be nonnegative.
pub fn sigma_from_stokes(s1: Complex64, s2: Complex64, theta: &ThetaTriple) -> Complex64 {
    let w = cos_pi(theta.theta_inf) + s1 * s2 * exp_ipi(-theta.theta_inf) / 2.0;
    let mut sigma = w.acos() / PI;
    if sigma.re.abs() < TINY && sigma.im < 0.0 {
        sigma = -sigma;
    } else if (sigma.re - 1.0).abs() < TINY && sigma.im < 0.0 {
        sigma = 2.0 - sigma;
    }
    sigma
}

/// Which large-t expansion a fitted exponent branch belongs to: the chart
/// whose leading function has zeros near the ray, or the reciprocal chart
/// whose leading function has poles there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    Zero,
    Pole,
}

/// A large-t chart recovered from monodromy data, tagged with the expansion
/// it belongs to. `extended` marks exponents fitted only by the wider window
/// Re nu in [1, 2), where the chart's subleading structure degrades to a
/// leading-order statement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittedChart {
    pub chart: LargeTChart,
    pub kind: ChartKind,
    pub extended: bool,
}

/// Entries pinned by a large-t chart: the diagonal entry of the ray the
/// chart lives on, and the two off-diagonal entries carrying u-hat and
/// delta. Entries the chart does not determine stay `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialMonodromy {
    pub m1_11: Option<Complex64>,
    pub m0_11: Option<Complex64>,
    pub m1_12: Complex64,
    pub m0_21: Complex64,
}

fn offdiag_gammas(
    theta: &ThetaTriple,
    phi: Complex64,
) -> Result<(Complex64, Complex64, Complex64, Complex64)> {
    let g1a = gamma(1.0 - (theta.theta1 + theta.theta_inf) / 2.0 + phi)?;
    let g1b = gamma((theta.theta1 - theta.theta_inf) / 2.0 + phi)?;
    let g0a = gamma(1.0 - theta.theta0 / 2.0 + phi)?;
    let g0b = gamma(theta.theta0 / 2.0 + phi)?;
    Ok((g1a, g1b, g0a, g0b))
}

/// Monodromy entries determined by a large-t chart: one diagonal entry on
/// the chart's ray plus m^1_12 and m^0_21. The remaining entries are not
/// fixed by the chart and are reported as absent.
pub fn monodromy_from_large_t_chart(
    chart: &LargeTChart,
    theta: &ThetaTriple,
) -> Result<PartialMonodromy> {
    let (g1a, g1b, g0a, g0b) = offdiag_gammas(theta, chart.phi)?;
    let two_pi_i = c64(0.0, 2.0 * PI);
    let m1_12 = -two_pi_i * chart.u_hat / (g1a * g1b);
    let m0_21 = -two_pi_i * chart.delta * exp_ipi(-theta.theta_inf) / (chart.u_hat * g0a * g0b);
    let (m1_11, m0_11) = if chart.ray_sign >= 0 {
        (Some(exp_ipi(2.0 * chart.phi - theta.theta_inf)), None)
    } else {
        (None, Some(exp_ipi(-2.0 * chart.phi)))
    };
    Ok(PartialMonodromy {
        m1_11,
        m0_11,
        m1_12,
        m0_21,
    })
}

/// Recovers the large-t chart on the given ray from the diagonal entry of
/// that ray plus m^1_12 and m^0_21. The exponent is fixed modulo integers by
/// a logarithm; integer shifts n in [-4, 4] are scanned for the unique one
/// placing Re nu of either expansion in (-1/2, 1), with ties broken towards
/// Re nu closest to 1/4. When only the wider window [1, 2) fits, the result
/// is flagged `extended`. delta comes from the product m^0_21 m^1_12 and is
/// therefore gauge-free; u_hat inherits the gauge of m^1_12.
pub fn large_t_chart_from_entries(
    m11: Complex64,
    m1_12: Complex64,
    m0_21: Complex64,
    ray_sign: i8,
    theta: &ThetaTriple,
) -> Result<FittedChart> {
    if m11.norm() < TINY || !m11.is_finite() {
        return Err(Error::Precondition(format!(
            "diagonal monodromy entry must be finite and nonzero, got {m11}"
        )));
    }
    let two_pi_i = c64(0.0, 2.0 * PI);
    let phi0 = if ray_sign >= 0 {
        m11.ln() / two_pi_i + theta.theta_inf / 2.0
    } else {
        -m11.ln() / two_pi_i
    };
    let fit_window = |lo: f64, hi: f64| -> Option<(Complex64, ChartKind, f64)> {
        let mut best: Option<(Complex64, ChartKind, f64)> = None;
        for n in -4..=4 {
            let phi = phi0 + n as f64;
            let nu1 = 1.0 + theta.theta_inf - 4.0 * phi;
            let nu2 = 2.0 - nu1;
            for (nu, kind) in [(nu1, ChartKind::Zero), (nu2, ChartKind::Pole)] {
                if nu.re > lo && nu.re < hi {
                    let score = (nu.re - 0.25).abs();
                    if best.is_none_or(|(_, _, s)| score < s) {
                        best = Some((phi, kind, score));
                    }
                }
            }
        }
        best
    };
    let (phi, kind, extended) = match fit_window(-0.5, 1.0) {
        Some((phi, kind, _)) => (phi, kind, false),
        // Boundary case: only the interlacing window [1, 2) admits a branch,
        // where the expansion is trustworthy at leading order only.
        None => match fit_window(1.0 - TINY, 2.0) {
            Some((phi, kind, _)) => (phi, kind, true),
            None => return Err(Error::NoBranchFits),
        },
    };
    let (g1a, g1b, g0a, g0b) = offdiag_gammas(theta, phi)?;
    let two_pi_i = c64(0.0, 2.0 * PI);
    let u_hat = -m1_12 * g1a * g1b / two_pi_i;
    let delta = -m0_21 * m1_12 * exp_ipi(theta.theta_inf) * g1a * g1b * g0a * g0b
        / (4.0 * PI * PI);
    let chart = LargeTChart::new(phi, delta, u_hat, ray_sign, theta)?;
    Ok(FittedChart {
        chart,
        kind,
        extended,
    })
}

/// Chart fitting from a full monodromy data set; see
/// [`large_t_chart_from_entries`].
pub fn large_t_chart_from_monodromy(m: &MonodromyData, ray_sign: i8) -> Result<FittedChart> {
    let m11 = if ray_sign >= 0 { m.m1.m11 } else { m.m0.m11 };
    large_t_chart_from_entries(m11, m.m1.m12, m.m0.m21, ray_sign, &m.theta)
}

/// Which reading of the I-parameters a conversion uses. `Original` keeps the
/// historical assignment I^p from m^p_11; `Adjusted` swaps the roles of the
/// singular points, reading I^p from m^{1-p}_11 with the conjugate exponential
/// arrangement, which is the assignment consistent with this data set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtConvention {
    Original,
    Adjusted,
}

impl MtConvention {
    pub fn as_str(&self) -> &'static str {
        match self {
            MtConvention::Original => "original",
            MtConvention::Adjusted => "adjusted",
        }
    }
}

impl std::str::FromStr for MtConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(MtConvention::Original),
            "adjusted" => Ok(MtConvention::Adjusted),
            other => Err(Error::Config(format!(
                "unknown I-parameter convention {other:?}; expected original or adjusted"
            ))),
        }
    }
}

impl std::fmt::Display for MtConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The I-parameter normal form of the symmetric family Theta_0 = Theta_1 =
/// Theta, Theta_inf = 0: both I-parameters, the frequency constant k and the
/// phase constant x_tilde0 of the sine-form asymptotics they encode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McCoyTangChart {
    pub i0: Complex64,
    pub i1: Complex64,
    pub k: Complex64,
    pub x_tilde0: Complex64,
    pub convention: MtConvention,
}

fn symmetric_theta(theta: &ThetaTriple) -> Result<Complex64> {
    if (theta.theta0 - theta.theta1).norm() > 1e-10 || theta.theta_inf.norm() > 1e-10 {
        return Err(Error::Precondition(format!(
            "the I-parameter form needs Theta_0 = Theta_1 and Theta_inf = 0, got {}, {}, {}",
            theta.theta0, theta.theta1, theta.theta_inf
        )));
    }
    Ok((theta.theta0 + theta.theta1) / 2.0)
}

fn checked_div(num: Complex64, den: Complex64, what: &'static str) -> Result<Complex64> {
    if den.norm() < TINY {
        return Err(Error::SingularDenominator {
            what,
            detail: format!("denominator {den} too close to zero"),
        });
    }
    Ok(num / den)
}

/// Solves I^1 = e^{i pi Theta} sin(pi(w + Theta/2)) / sin(pi(w - Theta/2))
/// for w on the branch Re w in (-1/2, 1/2].
fn invert_i1_for_w(i1: Complex64, th: Complex64) -> Result<Complex64> {
    let ratio = i1 * exp_ipi(-th);
    if (ratio - 1.0).norm() < TINY {
        return Ok(c64(0.5, 0.0));
    }
    let tan_w = (th * PI / 2.0).tan() * (ratio + 1.0) / (ratio - 1.0);
    Ok(tan_w.atan() / PI)
}

fn mccoy_tang_core(
    m0_11: Complex64,
    m1_11: Complex64,
    x: Complex64,
    chart_phi_delta: Option<(Complex64, Complex64)>,
    th: Complex64,
    convention: MtConvention,
) -> Result<McCoyTangChart> {
    let eip = exp_ipi(th);
    let eim = exp_ipi(-th);
    let (i0, i1) = match convention {
        MtConvention::Adjusted => (
            checked_div(m1_11 - eip, m1_11 - eim, "I^0 (adjusted)")?,
            checked_div(m0_11 - eip, m0_11 - eim, "I^1 (adjusted)")?,
        ),
        MtConvention::Original => (
            checked_div(m0_11 - eim, m0_11 - eip, "I^0 (original)")?,
            checked_div(m1_11 - eim, m1_11 - eip, "I^1 (original)")?,
        ),
    };
    let i = c64(0.0, 1.0);
    let ln4 = 4.0f64.ln();
    let (k, x_tilde0) = match convention {
        MtConvention::Adjusted => {
            // w is the chart exponent phi; a chart supplies it exactly, with
            // matrices alone it is recovered modulo 1 from I^1. The phase
            // constant solves the scale relation with the sign of the scale
            // constant flipped, matching the sign the adjusted reading of
            // the I-parameters carries on the entry product.
            let (w, minus_delta) = match chart_phi_delta {
                Some((phi, delta)) => (phi, -delta),
                None => {
                    let w = invert_i1_for_w(i1, th)?;
                    let g1 = gamma(1.0 + w - th / 2.0)?;
                    let g2 = gamma(w + th / 2.0)?;
                    (w, x * g1 * g1 * g2 * g2 / (4.0 * PI * PI))
                }
            };
            let num = 2.0 * w + th;
            let den = 2.0 * w - th;
            let lhs = checked_div(minus_delta * num, den, "phase constant (adjusted)")?
                * exp_ipi(2.0 * w)
                * (-4.0 * w * ln4).exp();
            (-i * w, i / 4.0 * lhs.ln())
        }
        MtConvention::Original => {
            let w = invert_i1_for_w(i1, th)?;
            let k = -i * w;
            let scale = (-w * ln4).exp() * (-2.0 * PI * k).exp();
            let a = scale * exp_ipi(th / 2.0) * gamma(w + th / 2.0)? / gamma(-w + th / 2.0)?;
            let b = scale * exp_ipi(-th / 2.0) * gamma(1.0 + w - th / 2.0)?
                / gamma(1.0 - w - th / 2.0)?;
            let c_bar = checked_div(a + i0 * b, i0 - 1.0, "phase constant (original)")?;
            let core = c_bar * gamma(1.0 + w + th / 2.0)? * gamma(w - th / 2.0)?
                / (-c64(0.0, 2.0 * PI) * (3.0 * w * ln4).exp() * (-PI * k).exp());
            (k, i / 4.0 * core.ln())
        }
    };
    Ok(McCoyTangChart {
        i0,
        i1,
        k,
        x_tilde0,
        convention,
    })
}

/// I-parameter form from a full monodromy data set of the symmetric family.
pub fn mccoy_tang_from_monodromy(
    m: &MonodromyData,
    convention: MtConvention,
) -> Result<McCoyTangChart> {
    let th = symmetric_theta(&m.theta)?;
    let x = m.m0.m21 * m.m1.m12;
    mccoy_tang_core(m.m0.m11, m.m1.m11, x, None, th, convention)
}

/// I-parameter form from a large-t chart of the symmetric family. The chart
/// pins one diagonal entry directly; the other one follows from the cyclic
/// relation, which at Theta_inf = 0 reads m^1_11 m^0_11 = 1 - m^0_21 m^1_12.
pub fn mccoy_tang_from_chart(
    chart: &LargeTChart,
    theta: &ThetaTriple,
    convention: MtConvention,
) -> Result<McCoyTangChart> {
    let th = symmetric_theta(theta)?;
    let partial = monodromy_from_large_t_chart(chart, theta)?;
    let x = partial.m0_21 * partial.m1_12;
    let (m0_11, m1_11) = if chart.ray_sign >= 0 {
        let m1 = exp_ipi(2.0 * chart.phi);
        (checked_div(1.0 - x, m1, "cyclic fill-in")?, m1)
    } else {
        let m0 = exp_ipi(-2.0 * chart.phi);
        (m0, checked_div(1.0 - x, m0, "cyclic fill-in")?)
    };
    mccoy_tang_core(
        m0_11,
        m1_11,
        x,
        Some((chart.phi, chart.delta)),
        th,
        convention,
    )
}

/// Stokes multipliers reconstructed from the I-parameters of the symmetric
/// family and the gauge-carrying entry m^0_21:
/// s1 = m^0_21 e^{i pi Theta} (I^0 I^1 - 1) / (1 - e^{2 i pi Theta} I^0 I^1),
/// s2 = e^{-i pi Theta} (1 - e^{2 i pi Theta}) (1 - I^0 I^1)
///      / ((I^0 - 1)(I^1 - 1) m^0_21).
pub fn stokes_from_i(
    chart: &McCoyTangChart,
    m0_21: Complex64,
    theta: &ThetaTriple,
) -> Result<(Complex64, Complex64)> {
    let th = symmetric_theta(theta)?;
    let eip = exp_ipi(th);
    let e2 = exp_ipi(2.0 * th);
    let prod = chart.i0 * chart.i1;
    let s1 = m0_21 * eip * checked_div(prod - 1.0, 1.0 - e2 * prod, "s1 from I")?;
    let den = (chart.i0 - 1.0) * (chart.i1 - 1.0) * m0_21;
    let s2 = exp_ipi(-th) * (1.0 - e2) * checked_div(1.0 - prod, den, "s2 from I")?;
    Ok((s1, s2))
}
