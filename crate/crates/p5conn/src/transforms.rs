//! Discrete symmetries of the degenerate system: the two shifts of the
//! exponent at infinity (Theta_inf -> Theta_inf +/- 2) and the two
//! reflections t -> -t, acting on solution states and on monodromy data.
//!
//! The shifts come from a lambda-linear gauge factor applied to the linear
//! problem; they leave the monodromy matrices and Stokes multipliers fixed
//! and move only the exponent triple. The reflections advance arg t by pi
//! (recorded in the [`RayPoint`](crate::specfun::RayPoint) branch data, never
//! renormalized away) and act on the monodromy data by explicit conjugations.

use crate::model::{a_matrix_pair, SolutionState, ThetaTriple};
use crate::monodromy::{Mat2, MonodromyData};
use crate::{c64, Complex64, Error, Result};
use std::f64::consts::PI;

const TINY: f64 = 1e-12;

fn exp_ipi(x: Complex64) -> Complex64 {
    (c64(0.0, PI) * x).exp()
}

fn sigma1() -> Mat2 {
    Mat2::new(c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0))
}

/// Stable names for the four symmetries, used by the CLI and the pipeline
/// configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformTag {
    /// Theta_inf -> Theta_inf + 2 at fixed t.
    BacklundUp,
    /// Theta_inf -> Theta_inf - 2 at fixed t.
    BacklundDown,
    /// t -> -t with Theta_inf -> -Theta_inf.
    TFlip1,
    /// t -> -t with Theta_0 <-> Theta_1.
    TFlip2,
}

impl TransformTag {
    pub fn code(&self) -> &'static str {
        match self {
            TransformTag::BacklundUp => "backlund_up",
            TransformTag::BacklundDown => "backlund_down",
            TransformTag::TFlip1 => "t_flip_1",
            TransformTag::TFlip2 => "t_flip_2",
        }
    }
}

impl std::str::FromStr for TransformTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "backlund_up" => TransformTag::BacklundUp,
            "backlund_down" => TransformTag::BacklundDown,
            "t_flip_1" => TransformTag::TFlip1,
            "t_flip_2" => TransformTag::TFlip2,
            other => {
                return Err(Error::Config(format!(
                    "unknown transform {other:?}; expected backlund_up, backlund_down, \
                     t_flip_1, or t_flip_2"
                )))
            }
        })
    }
}

impl std::fmt::Display for TransformTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

fn guard_denominator(value: Complex64, what: &'static str, modulus: f64) -> Result<Complex64> {
    if value.norm() < TINY {
        return Err(Error::SingularDenominator {
            what,
            detail: format!("value {value} within {TINY:e} of zero at |t| = {modulus}"),
        });
    }
    Ok(value)
}

/// Gauge data (beta, p) of the lambda-linear factor realizing the shift:
///
/// * up:   beta = t / (A^1_21 + A^0_21), p = -(beta/t)(Theta_inf + 1 + beta A^1_21)
/// * down: beta = -t / (A^1_12 + A^0_12), p = -(beta/t)(Theta_inf - 1 - beta A^1_12)
///
/// A vanishing entry sum raises the named singular-denominator error. The
/// reflections carry no gauge factor, so the flip tags are rejected.
pub fn schlesinger_gauge(
    tag: TransformTag,
    state: &SolutionState,
    theta: &ThetaTriple,
) -> Result<(Complex64, Complex64)> {
    let (a0, a1) = a_matrix_pair(state, theta);
    let t = state.t.to_complex();
    match tag {
        TransformTag::BacklundUp => {
            let den = guard_denominator(a1[1][0] + a0[1][0], "A^1_21 + A^0_21", state.t.modulus)?;
            let beta = t / den;
            let p = -(beta / t) * (theta.theta_inf + 1.0 + beta * a1[1][0]);
            Ok((beta, p))
        }
        TransformTag::BacklundDown => {
            let den = guard_denominator(a1[0][1] + a0[0][1], "A^1_12 + A^0_12", state.t.modulus)?;
            let beta = -t / den;
            let p = -(beta / t) * (theta.theta_inf - 1.0 - beta * a1[0][1]);
            Ok((beta, p))
        }
        TransformTag::TFlip1 | TransformTag::TFlip2 => Err(Error::Precondition(
            "gauge data exists only for the exponent shifts".into(),
        )),
    }
}

/// Shifts the exponent at infinity up by two at fixed t.
///
/// The new state is an algebraic function of the old one; u picks up a
/// rational factor whose principal logarithm is added to log u (a 2 pi i
/// ambiguity in log u does not change the gauge).
pub fn backlund_up(
    state: &SolutionState,
    theta: &ThetaTriple,
) -> Result<(SolutionState, ThetaTriple)> {
    let t = state.t.to_complex();
    let modulus = state.t.modulus;
    let y = state.y;
    let z = state.z;
    guard_denominator(y, "y", modulus)?;
    guard_denominator(z, "z", modulus)?;
    let e2 = theta.e2();
    let dd = guard_denominator(z - (z + e2) / y, "z - (z + e2)/y", modulus)?;
    let z_new = -z - theta.theta0 - (theta.theta_inf + 1.0) * z / dd
        + t * z * (z + e2) / (y * dd * dd);
    let y_den = guard_denominator(z_new + theta.e1() + 1.0, "z~ + e1 + 1", modulus)?;
    let u_den = guard_denominator(z_new + theta.theta0, "z~ + Theta_0", modulus)?;
    let y_new = (z_new + theta.theta0) / (y * z) * (z + e2) / y_den;
    let u_ratio = z * t * t / (u_den * dd * dd);
    let log_u = state.log_u + u_ratio.ln();
    let theta_new = ThetaTriple::new(theta.theta0, theta.theta1, theta.theta_inf + 2.0);
    Ok((SolutionState::new(state.t, y_new, z_new, log_u), theta_new))
}

/// Shifts the exponent at infinity down by two at fixed t. Inverse of
/// [`backlund_up`] where both are defined.
pub fn backlund_down(
    state: &SolutionState,
    theta: &ThetaTriple,
) -> Result<(SolutionState, ThetaTriple)> {
    let t = state.t.to_complex();
    let modulus = state.t.modulus;
    let y = state.y;
    let z = state.z;
    guard_denominator(y, "y", modulus)?;
    let w = z + theta.theta0;
    let zg = guard_denominator(z + theta.e1(), "z + e1", modulus)?;
    let ee = guard_denominator(w - y * zg, "z + Theta_0 - y (z + e1)", modulus)?;
    // Sign of the t-term pinned by the inverse pair (up after down is the
    // identity) and by the classical chain: at the Riccati locus the two
    // 1/ee-size terms must cancel to leave z~ of order one.
    let z_new =
        -z - theta.theta0 - (theta.theta_inf - 1.0) * w / ee + t * y * w * zg / (ee * ee);
    let z_den = guard_denominator(z_new, "z~", modulus)?;
    // e2 of the shifted triple is e2 - 1.
    let e2_new = theta.e2() - 1.0;
    let y_new = w / (y * z_den) * (z_new + e2_new) / zg;
    let y_den = guard_denominator(y_new, "y~", modulus)?;
    let dd_new = z_new - (z_new + e2_new) / y_den;
    let u_ratio = w / (z_new * t * t) * dd_new * dd_new;
    let log_u = state.log_u + u_ratio.ln();
    let theta_new = ThetaTriple::new(theta.theta0, theta.theta1, theta.theta_inf - 2.0);
    Ok((SolutionState::new(state.t, y_new, z_new, log_u), theta_new))
}

fn flip1_monodromy(data: &MonodromyData) -> MonodromyData {
    let conj_left = sigma1() * Mat2::lower_unit(data.s1);
    let conj_right = Mat2::lower_unit(-data.s1) * sigma1();
    let theta = &data.theta;
    MonodromyData {
        m0: conj_left * data.m0 * conj_right,
        m1: conj_left * data.m1 * conj_right,
        s1: exp_ipi(-2.0 * theta.theta_inf) * data.s2,
        s2: data.s1,
        theta: ThetaTriple::new(theta.theta0, theta.theta1, -theta.theta_inf),
    }
}

fn flip2_monodromy(data: &MonodromyData) -> MonodromyData {
    let theta = &data.theta;
    MonodromyData {
        m0: data.m1,
        m1: data.m1 * data.m0 * data.m1.inverse(),
        s1: data.s1,
        s2: data.s2,
        theta: ThetaTriple::new(theta.theta1, theta.theta0, theta.theta_inf),
    }
}

/// Reflects t through the origin: arg t advances by pi and the state is
/// rewritten as a solution at -t.
///
/// Kind 1 negates the exponent at infinity and sends (y, z, log u) to
/// (1/y, -z - Theta_0, -log u). Kind 2 swaps the exponents at 0 and 1 and
/// sends them to (1/y, -z - e2, log y + log u - t + i pi Theta_inf). When
/// monodromy data is supplied its transform is returned alongside: kind 1
/// conjugates every matrix by sigma_1 S_1 and permutes the Stokes
/// multipliers, kind 2 exchanges the roles of the two finite points.
pub fn t_flip(
    kind: u8,
    state: &SolutionState,
    theta: &ThetaTriple,
    data: Option<&MonodromyData>,
) -> Result<(SolutionState, ThetaTriple, Option<MonodromyData>)> {
    if kind != 1 && kind != 2 {
        return Err(Error::Precondition(format!(
            "t-flip kind must be 1 or 2, got {kind}"
        )));
    }
    let y = guard_denominator(state.y, "y", state.t.modulus)?;
    let t_new = state.t.negated();
    let y_new = 1.0 / y;
    if kind == 1 {
        let flipped = SolutionState::new(t_new, y_new, -state.z - theta.theta0, -state.log_u);
        let theta_new = ThetaTriple::new(theta.theta0, theta.theta1, -theta.theta_inf);
        Ok((flipped, theta_new, data.map(flip1_monodromy)))
    } else {
        let t = state.t.to_complex();
        let log_u = y.ln() + state.log_u - t + c64(0.0, PI) * theta.theta_inf;
        let flipped = SolutionState::new(t_new, y_new, -state.z - theta.e2(), log_u);
        let theta_new = ThetaTriple::new(theta.theta1, theta.theta0, theta.theta_inf);
        Ok((flipped, theta_new, data.map(flip2_monodromy)))
    }
}

/// Applies the tagged symmetry to a state and, when supplied, to monodromy
/// data. For the exponent shifts the data keeps its matrices and multipliers
/// and only the exponent triple moves.
pub fn apply(
    tag: TransformTag,
    state: &SolutionState,
    theta: &ThetaTriple,
    data: Option<&MonodromyData>,
) -> Result<(SolutionState, ThetaTriple, Option<MonodromyData>)> {
    match tag {
        TransformTag::BacklundUp | TransformTag::BacklundDown => {
            let (flipped, theta_new) = if tag == TransformTag::BacklundUp {
                backlund_up(state, theta)?
            } else {
                backlund_down(state, theta)?
            };
            let data_new = data.map(|d| MonodromyData {
                theta: theta_new,
                ..*d
            });
            Ok((flipped, theta_new, data_new))
        }
        TransformTag::TFlip1 => t_flip(1, state, theta, data),
        TransformTag::TFlip2 => t_flip(2, state, theta, data),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ids_rhs, zeta_of_state};
    use crate::monodromy::monodromy_generic;
    use crate::specfun::{bessel_i, RayPoint};
    use std::str::FromStr;

    fn generic_state() -> (SolutionState, ThetaTriple) {
        let theta = ThetaTriple::real(0.3, 0.45, 0.7);
        let state = SolutionState::new(
            RayPoint::upper(1.3),
            c64(1.7, 0.4),
            c64(-0.35, 0.22),
            c64(0.1, -0.3),
        );
        (state, theta)
    }

    fn axpy(v: [Complex64; 3], k: [Complex64; 3], h: f64) -> [Complex64; 3] {
        [v[0] + h * k[0], v[1] + h * k[1], v[2] + h * k[2]]
    }

    // Classical fourth-order march along the ray; accurate enough (~1e-13
    // local) to serve as the trajectory oracle for the covariance tests.
    fn rk4_along_ray(
        start: &SolutionState,
        theta: &ThetaTriple,
        dx: f64,
        steps: usize,
    ) -> SolutionState {
        let arg = start.t.ray_arg;
        let dir = c64(arg.cos(), arg.sin());
        let at = |m: f64, v: [Complex64; 3]| {
            SolutionState::new(
                RayPoint {
                    modulus: m,
                    ray_arg: arg,
                    offset: 0.0,
                },
                v[0],
                v[1],
                v[2],
            )
        };
        let f = |m: f64, v: [Complex64; 3]| {
            let d = ids_rhs(&at(m, v), theta).unwrap();
            [d[0] * dir, d[1] * dir, d[2] * dir]
        };
        let mut m = start.t.modulus;
        let mut v = [start.y, start.z, start.log_u];
        for _ in 0..steps {
            let k1 = f(m, v);
            let k2 = f(m + dx / 2.0, axpy(v, k1, dx / 2.0));
            let k3 = f(m + dx / 2.0, axpy(v, k2, dx / 2.0));
            let k4 = f(m + dx, axpy(v, k3, dx));
            for i in 0..3 {
                v[i] += dx / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            m += dx;
        }
        at(m, v)
    }

    #[test]
    fn tag_codes_round_trip() {
        for tag in [
            TransformTag::BacklundUp,
            TransformTag::BacklundDown,
            TransformTag::TFlip1,
            TransformTag::TFlip2,
        ] {
            assert_eq!(TransformTag::from_str(tag.code()).unwrap(), tag);
            assert_eq!(format!("{tag}"), tag.code());
        }
        assert!(matches!(
            TransformTag::from_str("flip"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn up_then_down_returns_the_state() {
        let (state, theta) = generic_state();
        let (mid, theta_mid) = backlund_up(&state, &theta).unwrap();
        assert!((theta_mid.theta_inf - c64(2.7, 0.0)).norm() < 1e-15);
        let (back, theta_back) = backlund_down(&mid, &theta_mid).unwrap();
        assert!((back.y - state.y).norm() < 1e-10, "y drifted: {}", back.y);
        assert!((back.z - state.z).norm() < 1e-10, "z drifted: {}", back.z);
        assert!(
            (back.u() - state.u()).norm() < 1e-10,
            "u drifted: {} vs {}",
            back.u(),
            state.u()
        );
        assert!((theta_back.theta_inf - theta.theta_inf).norm() < 1e-15);

        let (mid, theta_mid) = backlund_down(&state, &theta).unwrap();
        let (back, _) = backlund_up(&mid, &theta_mid).unwrap();
        assert!((back.y - state.y).norm() < 1e-10);
        assert!((back.z - state.z).norm() < 1e-10);
        assert!((back.u() - state.u()).norm() < 1e-10);
    }

    fn bessel_state(t: f64) -> SolutionState {
        let i0 = bessel_i(0, t / 2.0).unwrap();
        let i1 = bessel_i(1, t / 2.0).unwrap();
        let y = c64((i1 + i0) / (i1 - i0), 0.0);
        SolutionState::new(RayPoint::new(t, 0.0), y, c64(0.0, 0.0), c64(0.0, 0.0))
    }

    #[test]
    fn down_shift_chains_the_classical_family() {
        let theta = ThetaTriple::real(0.5, 0.5, -1.0);
        // First shift: the Riccati-locus solution (z = 0) maps onto the
        // third family, y = -1 - t^3/192 + t^5/12288 + ..., with
        // z = 1/2 - t/8 + t^3/384 - t^5/16384 + ....
        let t = 0.1;
        let (s3, theta3) = backlund_down(&bessel_state(t), &theta).unwrap();
        assert!((theta3.theta_inf - c64(-3.0, 0.0)).norm() < 1e-15);
        let y3 = -1.0 - t.powi(3) / 192.0 + t.powi(5) / 12288.0;
        let z3 = 0.5 - t / 8.0 + t.powi(3) / 384.0 - t.powi(5) / 16384.0;
        assert!((s3.y - y3).norm() < 5e-9, "y3 off by {:e}", (s3.y - y3).norm());
        assert!((s3.z - z3).norm() < 5e-9, "z3 off by {:e}", (s3.z - z3).norm());

        // Second shift reaches the fifth family. Larger t keeps the
        // cancellations mild; tolerances sit above the first omitted term.
        let t = 0.4;
        let (s3, theta3) = backlund_down(&bessel_state(t), &theta).unwrap();
        let (s5, theta5) = backlund_down(&s3, &theta3).unwrap();
        assert!((theta5.theta_inf - c64(-5.0, 0.0)).norm() < 1e-15);
        let y5 = -1.0 - t.powi(5) / 61440.0 + t.powi(7) / 5898240.0;
        let z5 = 1.0 - t / 8.0 + t.powi(5) / 81920.0 - t.powi(7) / 5898240.0;
        assert!((s5.y - y5).norm() < 5e-9, "y5 off by {:e}", (s5.y - y5).norm());
        assert!((s5.z - z5).norm() < 5e-9, "z5 off by {:e}", (s5.z - z5).norm());
    }

    #[test]
    fn up_shift_rejects_the_riccati_locus() {
        // z = 0 with e2 = 0 makes the shared denominator vanish identically.
        let theta = ThetaTriple::real(0.5, 0.5, -1.0);
        let state = bessel_state(0.3);
        assert!(matches!(
            backlund_up(&state, &theta),
            Err(Error::SingularDenominator { .. })
        ));
        assert!(matches!(
            schlesinger_gauge(TransformTag::BacklundUp, &state, &theta),
            Err(Error::SingularDenominator { .. })
        ));
    }

    #[test]
    fn down_shift_rejects_z_at_minus_theta0() {
        // z + Theta_0 = 0 forces z~ = 0, the denominator of y~.
        let (mut state, theta) = generic_state();
        state.z = -theta.theta0;
        let err = backlund_down(&state, &theta).unwrap_err();
        match err {
            Error::SingularDenominator { what, .. } => assert_eq!(what, "z~"),
            other => panic!("expected a singular denominator, got {other:?}"),
        }
    }

    #[test]
    fn gauge_data_matches_the_entry_sums() {
        let (state, theta) = generic_state();
        let t = state.t.to_complex();
        let u = state.u();
        let dd = state.z - (state.z + theta.e2()) / state.y;
        let ee = state.z + theta.theta0 - state.y * (state.z + theta.e1());
        let (beta_up, p_up) = schlesinger_gauge(TransformTag::BacklundUp, &state, &theta).unwrap();
        assert!((beta_up - t * u / dd).norm() < 1e-12 * beta_up.norm());
        let (beta_down, p_down) =
            schlesinger_gauge(TransformTag::BacklundDown, &state, &theta).unwrap();
        assert!((beta_down - t / (u * ee)).norm() < 1e-12 * beta_down.norm());
        assert!(p_up.is_finite() && p_down.is_finite());
        assert!(matches!(
            schlesinger_gauge(TransformTag::TFlip1, &state, &theta),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn flip_one_is_an_involution_up_to_branch() {
        let (state, theta) = generic_state();
        let (once, theta1, _) = t_flip(1, &state, &theta, None).unwrap();
        assert!((once.t.ray_arg - (state.t.ray_arg + PI)).abs() < 1e-15);
        let (twice, theta2, _) = t_flip(1, &once, &theta1, None).unwrap();
        assert!((twice.y - state.y).norm() < 1e-14);
        assert!((twice.z - state.z).norm() < 1e-14);
        assert!((twice.log_u - state.log_u).norm() < 1e-14);
        assert!((twice.t.ray_arg - (state.t.ray_arg + 2.0 * PI)).abs() < 1e-15);
        assert_eq!(twice.t.modulus, state.t.modulus);
        assert!((theta2.theta_inf - theta.theta_inf).norm() < 1e-15);
    }

    #[test]
    fn flip_one_transports_monodromy() {
        let (state, theta) = generic_state();
        let data = monodromy_generic(c64(0.32, 0.11), c64(0.9, -0.4), c64(1.3, 0.2), &theta)
            .unwrap();
        assert!(data.is_valid());
        let (_, theta_new, flipped) = t_flip(1, &state, &theta, Some(&data)).unwrap();
        let flipped = flipped.unwrap();
        assert!((flipped.theta.theta_inf - theta_new.theta_inf).norm() < 1e-15);
        for r in flipped.validate() {
            assert!(r.value < 1e-9, "{} = {:e}", r.name, r.value);
        }
        // Multiplier product picks up the squared formal factor.
        let want = data.s1 * data.s2 * exp_ipi(-2.0 * theta.theta_inf);
        assert!((flipped.s1 * flipped.s2 - want).norm() < 1e-12);
        // The matrix at infinity is conjugated the same way as m0 and m1.
        let left = sigma1() * Mat2::lower_unit(data.s1);
        let right = Mat2::lower_unit(-data.s1) * sigma1();
        let conj = left * data.m_inf() * right;
        assert!(flipped.m_inf().max_entry_distance(&conj) < 1e-12);
    }

    #[test]
    fn flip_two_swaps_the_finite_points() {
        let (state, theta) = generic_state();
        let data = monodromy_generic(c64(0.32, 0.11), c64(0.9, -0.4), c64(1.3, 0.2), &theta)
            .unwrap();
        let (flipped_state, theta_new, flipped) = t_flip(2, &state, &theta, Some(&data)).unwrap();
        let flipped = flipped.unwrap();
        assert!((theta_new.theta0 - theta.theta1).norm() < 1e-15);
        assert!((theta_new.theta1 - theta.theta0).norm() < 1e-15);
        assert!(flipped.m0.max_entry_distance(&data.m1) == 0.0);
        let conj = data.m1 * data.m0 * data.m1.inverse();
        assert!(flipped.m1.max_entry_distance(&conj) < 1e-14);
        for r in flipped.validate() {
            assert!(r.value < 1e-9, "{} = {:e}", r.name, r.value);
        }
        // u law: log u~ = log y + log u - t + i pi Theta_inf.
        let want = state.y.ln() + state.log_u - state.t.to_complex()
            + c64(0.0, PI) * theta.theta_inf;
        assert!((flipped_state.log_u - want).norm() < 1e-14);
    }

    // Self-conjugate data: equal triangular-free matrices at both finite
    // points, vanishing multipliers, exponents (1/2, 1/2, -1). The second
    // reflection must fix every matrix.
    #[test]
    fn flip_two_fixes_self_conjugate_data() {
        let a = c64(-2.0, 0.0);
        let s0sq = a + (a * a - 0.25).sqrt();
        let x = 4.0 * s0sq - 1.0 / s0sq;
        let rh = c64(0.6, 0.0);
        let i = c64(0.0, 1.0);
        let m = Mat2::new(-2.0 * i * a, i / 2.0 * rh * x, -i / (8.0 * rh) * x, 2.0 * i * a);
        let theta = ThetaTriple::real(0.5, 0.5, -1.0);
        let data = MonodromyData {
            m0: m,
            m1: m,
            s1: c64(0.0, 0.0),
            s2: c64(0.0, 0.0),
            theta,
        };
        assert!(data.is_valid());
        let state = SolutionState::new(
            RayPoint::new(0.7, 0.0),
            c64(-1.5, 0.0),
            c64(0.2, 0.0),
            c64(0.0, 0.0),
        );
        let (_, _, flipped) = t_flip(2, &state, &theta, Some(&data)).unwrap();
        let flipped = flipped.unwrap();
        assert!(flipped.m0.max_entry_distance(&m) < 1e-13);
        assert!(flipped.m1.max_entry_distance(&m) < 1e-13);

        // The first reflection of the same data swaps the two rows/columns:
        // multipliers stay zero and the corner entries trade places.
        let (_, _, swapped) = t_flip(1, &state, &theta, Some(&data)).unwrap();
        let swapped = swapped.unwrap();
        assert_eq!(swapped.s1, c64(0.0, 0.0));
        assert_eq!(swapped.s2, c64(0.0, 0.0));
        assert!((swapped.m0.m11 + m.m11).norm() < 1e-14);
        assert!((swapped.m0.m12 - m.m21).norm() < 1e-14);
        assert!(swapped.m0.max_entry_distance(&swapped.m1) == 0.0);
    }

    #[test]
    fn flip_one_reproduces_the_reflected_tail() {
        // 1/y of the classical solution at t = 30, compared with the
        // reflected-side series -sum b_n / (-2 t~)^n, b = 1, 2, 7, 38, 286,
        // 2756. The first omitted term is ~1.1e-8.
        let theta = ThetaTriple::real(0.5, 0.5, -1.0);
        let state = bessel_state(30.0);
        let (flipped, theta_new, _) = t_flip(1, &state, &theta, None).unwrap();
        assert!((theta_new.theta_inf - c64(1.0, 0.0)).norm() < 1e-15);
        let t_new = -30.0_f64;
        let b = [1.0, 2.0, 7.0, 38.0, 286.0, 2756.0];
        let mut series = 0.0;
        for (n, bn) in b.iter().enumerate() {
            series -= bn / (-2.0 * t_new).powi(n as i32 + 1);
        }
        assert!(
            (flipped.y - series).norm() < 3e-8,
            "tail mismatch: {:e}",
            (flipped.y - series).norm()
        );
    }

    #[test]
    fn zeta_shift_laws_hold_pointwise() {
        let (state, theta) = generic_state();
        let t = state.t.to_complex();
        let zeta = zeta_of_state(&state, &theta);

        let (flipped, theta_new, _) = t_flip(1, &state, &theta, None).unwrap();
        let want = zeta - theta.theta0 * t - theta.theta0 * theta.theta_inf;
        let got = zeta_of_state(&flipped, &theta_new);
        assert!((got - want).norm() < 1e-12 * (1.0 + want.norm()));

        let (flipped, theta_new, _) = t_flip(2, &state, &theta, None).unwrap();
        let e2 = theta.e2();
        let want = zeta - e2 * t + (theta.theta1 - theta.theta0) * e2;
        let got = zeta_of_state(&flipped, &theta_new);
        assert!((got - want).norm() < 1e-12 * (1.0 + want.norm()));
    }

    #[test]
    fn shifts_commute_with_the_flow() {
        // Finite differences of the transformed trajectory against the
        // right-hand side with the shifted exponent.
        let theta = ThetaTriple::real(0.3, 0.45, 0.7);
        let base = SolutionState::new(
            RayPoint::upper(0.98),
            c64(1.7, 0.4),
            c64(-0.35, 0.22),
            c64(0.1, -0.3),
        );
        let mid = rk4_along_ray(&base, &theta, 5e-4, 40);
        let h = 1e-4;
        let plus = rk4_along_ray(&mid, &theta, h / 2.0, 2);
        let minus = rk4_along_ray(&mid, &theta, -h / 2.0, 2);
        let dir = c64(0.0, 1.0);
        for tag in [TransformTag::BacklundUp, TransformTag::BacklundDown] {
            let map = |s: &SolutionState| apply(tag, s, &theta, None).unwrap();
            let (tm, theta_new, _) = map(&mid);
            let (tp, _, _) = map(&plus);
            let (tn, _, _) = map(&minus);
            let want = ids_rhs(&tm, &theta_new).unwrap();
            let got = [
                (tp.y - tn.y) / (2.0 * h * dir),
                (tp.z - tn.z) / (2.0 * h * dir),
                (tp.log_u - tn.log_u) / (2.0 * h * dir),
            ];
            for i in 0..3 {
                let scale = want[i].norm().max(1.0);
                assert!(
                    (got[i] - want[i]).norm() / scale < 1e-6,
                    "{tag}: component {i} off by {:e}",
                    (got[i] - want[i]).norm() / scale
                );
            }
        }
    }

    #[test]
    fn flips_commute_with_the_flow() {
        // Same oracle as above; the flipped trajectory advances along the
        // opposite ray, so dt~ = -dt.
        let theta = ThetaTriple::real(0.3, 0.45, 0.7);
        let base = SolutionState::new(
            RayPoint::upper(0.98),
            c64(1.7, 0.4),
            c64(-0.35, 0.22),
            c64(0.1, -0.3),
        );
        let mid = rk4_along_ray(&base, &theta, 5e-4, 40);
        let h = 1e-4;
        let plus = rk4_along_ray(&mid, &theta, h / 2.0, 2);
        let minus = rk4_along_ray(&mid, &theta, -h / 2.0, 2);
        let dir = c64(0.0, 1.0);
        for kind in [1u8, 2u8] {
            let map = |s: &SolutionState| t_flip(kind, s, &theta, None).unwrap();
            let (tm, theta_new, _) = map(&mid);
            let (tp, _, _) = map(&plus);
            let (tn, _, _) = map(&minus);
            let want = ids_rhs(&tm, &theta_new).unwrap();
            let dt = -2.0 * h * dir;
            let got = [
                (tp.y - tn.y) / dt,
                (tp.z - tn.z) / dt,
                (tp.log_u - tn.log_u) / dt,
            ];
            for i in 0..3 {
                let scale = want[i].norm().max(1.0);
                assert!(
                    (got[i] - want[i]).norm() / scale < 1e-6,
                    "kind {kind}: component {i} off by {:e}",
                    (got[i] - want[i]).norm() / scale
                );
            }
        }
    }

    #[test]
    fn shifts_carry_monodromy_data_unchanged() {
        let (state, theta) = generic_state();
        let data = monodromy_generic(c64(0.32, 0.11), c64(0.9, -0.4), c64(1.3, 0.2), &theta)
            .unwrap();
        let (_, theta_new, shifted) =
            apply(TransformTag::BacklundUp, &state, &theta, Some(&data)).unwrap();
        let shifted = shifted.unwrap();
        assert!(shifted.m0.max_entry_distance(&data.m0) == 0.0);
        assert!(shifted.m1.max_entry_distance(&data.m1) == 0.0);
        assert_eq!(shifted.s1, data.s1);
        assert_eq!(shifted.s2, data.s2);
        assert!((shifted.theta.theta_inf - theta_new.theta_inf).norm() < 1e-15);
        // The constraint set is insensitive to the shift by 2.
        for r in shifted.validate() {
            assert!(r.value < 1e-9, "{} = {:e}", r.name, r.value);
        }
    }
}
