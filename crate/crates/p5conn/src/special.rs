//! The one-parameter family of solutions bounded on the whole imaginary axis.
//!
//! Family members carry the exponent triple (1/2, 1/2, -l) with integer
//! l >= 1, start at y(0) = -1, z(0) = (l-1)/4, and are pinned by a single
//! free Taylor coefficient: the seed a_l^l multiplying t^l in y. This module
//! provides the Taylor recurrence at the origin (in complex doubles, or in
//! exact rational polynomials of the seed), the closed-form Bessel-ratio
//! member sitting at seed -1/2, the reciprocal tail sequences of that member
//! on the two real half-axes, the monodromy data of the l = 1 family in
//! closed form, and the parameter maps describing the family's asymptotics
//! on both real and both imaginary half-axes.

use std::f64::consts::{LN_2, PI};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::model::ThetaTriple;
use crate::monodromy::{Mat2, MonodromyData};
use crate::specfun::{bessel_i_scaled, complex_gamma};
use crate::{c64, Complex64, Error, Result};

/// Largest Taylor order served by [`taylor_special`]. Beyond this the f64
/// recurrence loses ground to rounding and the symbolic mode to swell.
pub const MAX_TAYLOR_ORDER: usize = 60;

/// Largest tail order served by [`bessel_tail_sequences`]; the tails are
/// divergent and the low orders are the only ones used for evaluation.
pub const MAX_TAIL_ORDER: usize = 8;

const TINY: f64 = 1e-12;

/// A member of the bounded family: the resonance index l and the free
/// coefficient of t^l in the Taylor expansion of y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialParams {
    pub l: u32,
    pub a_ll: Complex64,
}

impl SpecialParams {
    pub fn new(l: u32, a_ll: Complex64) -> Result<Self> {
        if l == 0 {
            return Err(Error::Precondition(
                "the bounded family needs a positive resonance index l".into(),
            ));
        }
        Ok(SpecialParams { l, a_ll })
    }

    /// Exponent triple of the member: (1/2, 1/2, -l).
    pub fn theta(&self) -> ThetaTriple {
        ThetaTriple::real(0.5, 0.5, -(self.l as f64))
    }
}

/// Arithmetic the Taylor coefficients are computed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaylorMode {
    /// Complex doubles; any l, any seed.
    Numeric,
    /// Exact rational polynomials in the seed; l = 1 only, where the whole
    /// table is polynomial in a_1^1.
    Polynomial,
}

impl TaylorMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            TaylorMode::Numeric => "numeric",
            TaylorMode::Polynomial => "polynomial",
        }
    }
}

impl std::str::FromStr for TaylorMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "numeric" => Ok(TaylorMode::Numeric),
            "polynomial" => Ok(TaylorMode::Polynomial),
            other => Err(Error::Config(format!(
                "unknown Taylor mode {other:?}; expected numeric or polynomial"
            ))),
        }
    }
}

impl std::fmt::Display for TaylorMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Polynomial in the Taylor seed with exact rational coefficients; entry j
/// is the coefficient of the j-th power of the seed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SeedPolynomial(pub Vec<BigRational>);

impl SeedPolynomial {
    pub fn zero() -> Self {
        SeedPolynomial(Vec::new())
    }

    /// The seed itself.
    pub fn variable() -> Self {
        SeedPolynomial(vec![BigRational::zero(), BigRational::one()])
    }

    /// Builds from (numerator, denominator) pairs, lowest power first.
    pub fn from_ratios(entries: &[(i64, i64)]) -> Self {
        SeedPolynomial(
            entries
                .iter()
                .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
                .collect(),
        )
        .trimmed()
    }

    /// Degree of the polynomial, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| !c.is_zero())
    }

    pub fn coefficient(&self, j: usize) -> BigRational {
        self.0.get(j).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Horner evaluation at a complex seed value.
    pub fn eval(&self, a: Complex64) -> Complex64 {
        let mut acc = c64(0.0, 0.0);
        for coeff in self.0.iter().rev() {
            acc = acc * a + coeff.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }
}

impl std::fmt::Display for SeedPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut wrote = false;
        for j in (0..self.0.len()).rev() {
            let coeff = &self.0[j];
            if coeff.is_zero() {
                continue;
            }
            if wrote {
                f.write_str(if coeff.is_negative() { " - " } else { " + " })?;
            } else if coeff.is_negative() {
                f.write_str("-")?;
            }
            let mag = coeff.abs();
            if j == 0 || !mag.is_one() {
                write!(f, "{mag}")?;
            }
            match j {
                0 => {}
                1 => f.write_str(" a")?,
                _ => write!(f, " a^{j}")?,
            }
            wrote = true;
        }
        if !wrote {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Taylor coefficients of (y, z) at t = 0; entry k multiplies t^k.
#[derive(Debug, Clone, PartialEq)]
pub enum TaylorTable {
    Numeric {
        y: Vec<Complex64>,
        z: Vec<Complex64>,
    },
    Polynomial {
        y: Vec<SeedPolynomial>,
        z: Vec<SeedPolynomial>,
    },
}

impl TaylorTable {
    pub fn order(&self) -> usize {
        match self {
            TaylorTable::Numeric { y, .. } => y.len() - 1,
            TaylorTable::Polynomial { y, .. } => y.len() - 1,
        }
    }

    /// Horner evaluation of both truncated series at complex t.
    ///
    /// # Errors
    /// Symbolic tables carry a free seed and do not evaluate; bind the seed
    /// with [`TaylorTable::bind_seed`] first.
    pub fn eval_numeric(&self, t: Complex64) -> Result<(Complex64, Complex64)> {
        match self {
            TaylorTable::Numeric { y, z } => Ok((horner(y, t), horner(z, t))),
            TaylorTable::Polynomial { .. } => Err(Error::Precondition(
                "symbolic Taylor tables need a bound seed before evaluation".into(),
            )),
        }
    }

    /// Numeric table obtained by substituting a seed value into a symbolic
    /// table; numeric tables are returned unchanged.
    pub fn bind_seed(&self, a: Complex64) -> TaylorTable {
        match self {
            TaylorTable::Numeric { .. } => self.clone(),
            TaylorTable::Polynomial { y, z } => TaylorTable::Numeric {
                y: y.iter().map(|p| p.eval(a)).collect(),
                z: z.iter().map(|p| p.eval(a)).collect(),
            },
        }
    }
}

fn horner(coeffs: &[Complex64], t: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(c64(0.0, 0.0), |acc, c| acc * t + c)
}

/// Coefficient arithmetic shared by the numeric and symbolic recurrences.
trait Coeff: Clone + std::fmt::Debug {
    fn zero() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, num: i64, den: i64) -> Self;
    /// Exact zero in symbolic mode, rounding-level noise in numeric mode.
    fn is_negligible(&self) -> bool;
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        c64(0.0, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        c64(num as f64 / den as f64, 0.0)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, num: i64, den: i64) -> Self {
        self * (num as f64 / den as f64)
    }
    fn is_negligible(&self) -> bool {
        self.norm() < 1e-9
    }
}

impl Coeff for SeedPolynomial {
    fn zero() -> Self {
        SeedPolynomial::zero()
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        SeedPolynomial(vec![BigRational::new(BigInt::from(num), BigInt::from(den))]).trimmed()
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            out.push(self.coefficient(j) + other.coefficient(j));
        }
        SeedPolynomial(out).trimmed()
    }
    fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            out.push(self.coefficient(j) - other.coefficient(j));
        }
        SeedPolynomial(out).trimmed()
    }
    fn mul(&self, other: &Self) -> Self {
        if self.0.is_empty() || other.0.is_empty() {
            return SeedPolynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        SeedPolynomial(out).trimmed()
    }
    fn scale(&self, num: i64, den: i64) -> Self {
        let factor = BigRational::new(BigInt::from(num), BigInt::from(den));
        SeedPolynomial(self.0.iter().map(|c| c * &factor).collect()).trimmed()
    }
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
}

fn series_add<S: Coeff>(a: &[S], b: &[S]) -> Vec<S> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|j| match (a.get(j), b.get(j)) {
            (Some(x), Some(y)) => x.add(y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => S::zero(),
        })
        .collect()
}

fn series_sub<S: Coeff>(a: &[S], b: &[S]) -> Vec<S> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|j| match (a.get(j), b.get(j)) {
            (Some(x), Some(y)) => x.sub(y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => S::zero().sub(y),
            (None, None) => S::zero(),
        })
        .collect()
}

fn series_scale<S: Coeff>(a: &[S], num: i64, den: i64) -> Vec<S> {
    a.iter().map(|c| c.scale(num, den)).collect()
}

fn series_mul_trunc<S: Coeff>(a: &[S], b: &[S], order: usize) -> Vec<S> {
    let mut out = vec![S::zero(); order + 1];
    for (i, x) in a.iter().enumerate().take(order + 1) {
        for (j, y) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// Coefficient of t^k in the polynomial form of the scalar equation,
///
///   2 t^2 y (y-1) y'' - t^2 (3y-1) (y')^2 + 2 t y (y-1) y'
///     - (l^2/4) (y-1)^4 (y+1) + t^2 y^2 (y+1) = 0,
///
/// given coefficients of y through t^k (entry k may still hold a
/// placeholder: its multiplier in the result is 4(k^2 - l^2), which the
/// caller inverts). Euler operators keep the index: t d/dt maps t^k to
/// k t^k, so derivative factors are plain index weights.
fn residual_coefficient<S: Coeff>(l: u32, y: &[S]) -> S {
    let k = y.len() - 1;
    let one = S::from_ratio(1, 1);
    let euler1: Vec<S> = y
        .iter()
        .enumerate()
        .map(|(j, c)| c.scale(j as i64, 1))
        .collect();
    let euler2: Vec<S> = y
        .iter()
        .enumerate()
        .map(|(j, c)| c.scale(j as i64 * (j as i64 - 1), 1))
        .collect();
    let mut w = y.to_vec();
    w[0] = w[0].sub(&one);
    let mut v = y.to_vec();
    v[0] = v[0].add(&one);

    let yw = series_mul_trunc(y, &w, k);
    let p1 = series_mul_trunc(&yw, &series_add(&euler2, &euler1), k);
    let mut three_y = series_scale(y, 3, 1);
    three_y[0] = three_y[0].sub(&one);
    let p2 = series_mul_trunc(&three_y, &series_mul_trunc(&euler1, &euler1, k), k);
    let w2 = series_mul_trunc(&w, &w, k);
    let w4 = series_mul_trunc(&w2, &w2, k);
    let ll = l as i64 * l as i64;
    let p3 = series_scale(&series_mul_trunc(&w4, &v, k), ll, 4);
    let y2v = series_mul_trunc(&series_mul_trunc(y, y, k), &v, k);

    let mut res = p1[k].scale(2, 1).sub(&p2[k]).sub(&p3[k]);
    if k >= 2 {
        res = res.add(&y2v[k - 2]);
    }
    res
}

/// Taylor coefficients of y through t^order. Coefficients below the seed
/// order are forced to zero by the recurrence itself; at the seed order the
/// forcing must vanish (the defining resonance of the family) and the free
/// coefficient enters.
fn taylor_y<S: Coeff>(l: u32, seed: &S, order: usize) -> Result<Vec<S>> {
    let mut y = vec![S::zero(); order + 1];
    y[0] = S::from_ratio(-1, 1);
    let li = l as i64;
    for k in 1..=order {
        let res = residual_coefficient(l, &y[..=k]);
        if k == l as usize {
            if !res.is_negligible() {
                return Err(Error::Resonance {
                    what: "bounded-family recurrence",
                    detail: format!("nonzero forcing {res:?} at the seed order {k}"),
                });
            }
            y[k] = seed.clone();
        } else {
            let kk = k as i64;
            y[k] = res.scale(-1, 4 * (kk * kk - li * li));
        }
    }
    Ok(y)
}

/// z series recovered from the y series through the first flow equation:
/// 2 z (y-1)^2 = t y - t y' - (y-1)(e1 y - e3) with e1 = -l/2 and
/// e3 = (2-l)/2. The denominator's constant term is 2(y(0)-1)^2 = 8, so the
/// series division below never meets a zero leading coefficient.
fn taylor_z<S: Coeff>(l: u32, y: &[S]) -> Vec<S> {
    let order = y.len() - 1;
    let li = l as i64;
    let one = S::from_ratio(1, 1);

    let euler1: Vec<S> = y
        .iter()
        .enumerate()
        .map(|(j, c)| c.scale(j as i64, 1))
        .collect();
    let mut ty = vec![S::zero(); order + 1];
    for j in 1..=order {
        ty[j] = y[j - 1].clone();
    }
    let mut w = y.to_vec();
    w[0] = w[0].sub(&one);
    let mut lin = series_scale(y, -li, 2);
    lin[0] = lin[0].sub(&S::from_ratio(2 - li, 2));

    let num = series_sub(
        &series_sub(&ty, &euler1),
        &series_mul_trunc(&w, &lin, order),
    );
    let den = series_scale(&series_mul_trunc(&w, &w, order), 2, 1);

    let num_hat = series_scale(&num, 1, 8);
    let den_hat = series_scale(&den, 1, 8);
    let mut z = vec![S::zero(); order + 1];
    for j in 0..=order {
        let mut acc = num_hat[j].clone();
        for i in 1..=j {
            acc = acc.sub(&den_hat[i].mul(&z[j - i]));
        }
        z[j] = acc;
    }
    z
}

/// Taylor table of (y, z) for a bounded-family member through t^order.
///
/// # Errors
/// `Precondition` when order exceeds [`MAX_TAYLOR_ORDER`] or when symbolic
/// mode is requested for l other than 1 (only there is the table polynomial
/// in a single seed); `Resonance` if the forcing at the seed order fails to
/// cancel, which no valid input reaches.
pub fn taylor_special(
    params: &SpecialParams,
    order: usize,
    mode: TaylorMode,
) -> Result<TaylorTable> {
    if order > MAX_TAYLOR_ORDER {
        return Err(Error::Precondition(format!(
            "Taylor order {order} exceeds the supported maximum {MAX_TAYLOR_ORDER}"
        )));
    }
    match mode {
        TaylorMode::Numeric => {
            let y = taylor_y::<Complex64>(params.l, &params.a_ll, order)?;
            let z = taylor_z(params.l, &y);
            Ok(TaylorTable::Numeric { y, z })
        }
        TaylorMode::Polynomial => {
            if params.l != 1 {
                return Err(Error::Precondition(format!(
                    "symbolic Taylor tables are specific to l = 1, got l = {}",
                    params.l
                )));
            }
            let y = taylor_y::<SeedPolynomial>(1, &SeedPolynomial::variable(), order)?;
            let z = taylor_z(1, &y);
            Ok(TaylorTable::Polynomial { y, z })
        }
    }
}

/// The closed-form member at l = 1, seed -1/2: y is a ratio of modified
/// Bessel functions at t/2 and z vanishes identically,
///
///   y(t) = (I_1 + I_0)/(I_1 - I_0) at t/2,   z(t) = 0.
///
/// Scaled Bessel evaluations keep the ratio finite for every real t; the
/// denominator is strictly negative on the real line.
pub fn bessel_solution(t: f64) -> Result<(f64, f64)> {
    let s = 0.5 * t;
    let i0 = bessel_i_scaled(0, s)?;
    let i1 = bessel_i_scaled(1, s)?;
    Ok(((i1 + i0) / (i1 - i0), 0.0))
}

/// Coefficient tails of the Bessel member on the two real half-axes:
/// returns (a, b) with entry n-1 holding the n-th coefficient of
///
///   y -> -2t + 2 + sum a_n (2t)^{-n}    (t -> +infinity),
///   y -> -sum b_n (-2t)^{-n}            (t -> -infinity).
///
/// Both come from exact rational division of the standard large-argument
/// series of I_0 and I_1 in the variable s = 1/(4t); both tails are
/// divergent, which bounds the useful order.
///
/// # Errors
/// `Precondition` outside 1..=[`MAX_TAIL_ORDER`].
pub fn bessel_tail_sequences(order: usize) -> Result<(Vec<BigRational>, Vec<BigRational>)> {
    if order == 0 || order > MAX_TAIL_ORDER {
        return Err(Error::Precondition(format!(
            "tail order {order} outside 1..={MAX_TAIL_ORDER}"
        )));
    }
    let len = order + 3;
    let p = bessel_asymptotic_tail(0, len);
    let q = bessel_asymptotic_tail(4, len);
    let sum: Vec<BigRational> = (0..len).map(|j| &q[j] + &p[j]).collect();
    let dif: Vec<BigRational> = (0..len).map(|j| &q[j] - &p[j]).collect();

    // Rearranged upper tail: with R = (Q+P)/(Q-P) the target identity is
    // R = -1/(2s) + 4/(2s) ... hmm see below
    // 2s (Q+P) + (Q-P)(1-4s) = (Q-P) sum_n a_n 2^{n+1} s^{n+1}; dividing out
    // one power of s on both sides leaves a regular division because
    // (Q-P)/s has constant term -4.
    let mut numer = vec![BigRational::zero(); len];
    for j in 0..len {
        if j >= 1 {
            numer[j] += BigRational::from_integer(BigInt::from(2)) * &sum[j - 1];
        }
        numer[j] += &dif[j];
        if j >= 1 {
            numer[j] -= BigRational::from_integer(BigInt::from(4)) * &dif[j - 1];
        }
    }
    debug_assert!(numer[0].is_zero());
    let n1: Vec<BigRational> = numer[1..].to_vec();
    let d1: Vec<BigRational> = dif[1..].to_vec();
    let mut g = vec![BigRational::zero(); n1.len()];
    for j in 0..n1.len() {
        let mut acc = n1[j].clone();
        for i in 1..=j {
            acc -= &d1[i] * &g[j - i];
        }
        g[j] = acc / &d1[0];
    }
    debug_assert!(g[0].is_zero() && g[1].is_zero());
    let two = BigInt::from(2);
    let a: Vec<BigRational> = (1..=order)
        .map(|n| &g[n + 1] / BigRational::from_integer(two.pow(n as u32 + 1)))
        .collect();

    // Lower tail: the sign flip of t inverts y, so the target is the plain
    // reciprocal ratio (Q-P)/(Q+P) = -sum_n b_n 2^n s^n.
    let mut k = vec![BigRational::zero(); len];
    for j in 0..len {
        let mut acc = dif[j].clone();
        for i in 1..=j {
            acc -= &sum[i] * &k[j - i];
        }
        k[j] = acc / &sum[0];
    }
    let b: Vec<BigRational> = (1..=order)
        .map(|n| -&k[n] / BigRational::from_integer(two.pow(n as u32)))
        .collect();
    Ok((a, b))
}

/// Large-argument series of a modified Bessel function in s = 1/(8z),
/// without the common prefactor e^z / sqrt(2 pi z):
/// term_k = (-1)^k prod_{j<=k} (mu - (2j-1)^2) s^k / k!, mu = 4 nu^2.
fn bessel_asymptotic_tail(mu: i64, len: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(len);
    let mut term = BigRational::one();
    out.push(term.clone());
    for k in 1..len as i64 {
        let odd = 2 * k - 1;
        term *= BigRational::new(BigInt::from(odd * odd - mu), BigInt::from(k));
        out.push(term.clone());
    }
    out
}

/// Monodromy data of an l = 1 family member. Both Stokes multipliers
/// vanish, the two finite-point matrices coincide and square to -I, and the
/// entries are rational in an auxiliary root s0^2 and a free gauge scale.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecialMonodromy {
    /// The two roots of (s0^2)^2 - 2 a_1^1 s0^2 + 1/4 = 0. Either generates
    /// the same diagonal entries; swapping them negates the off-diagonal
    /// pair, which the gauge scale absorbs.
    pub s0_squared: [Complex64; 2],
    /// Shared diagonal entry, equal to -2i a_1^1.
    pub m11: Complex64,
    pub data: MonodromyData,
}

/// Closed-form monodromy of the l = 1 member with seed a11:
///
///   m11 = -m22 = -(i/4)(4 s0^2 + 1/s0^2),
///   m12 = (i r_hat / 2)(4 s0^2 - 1/s0^2),
///   m21 = -(i / (8 r_hat))(4 s0^2 - 1/s0^2),
///
/// with s1 = s2 = 0, M^0 = M^1, and exponents (1/2, 1/2, -1). The root
/// product is 1/4, so neither root is ever zero; the larger root is taken
/// first to keep the explicit reciprocal well conditioned.
///
/// # Errors
/// `Precondition` when the gauge scale r_hat vanishes (two entries carry
/// its reciprocal).
pub fn special_monodromy(a11: Complex64, r_hat: Complex64) -> Result<SpecialMonodromy> {
    if r_hat.norm() < TINY || !r_hat.is_finite() {
        return Err(Error::Precondition(format!(
            "the gauge scale r-hat must be finite and nonzero, got {r_hat}"
        )));
    }
    let disc = (a11 * a11 - 0.25).sqrt();
    let q1 = if (a11.conj() * disc).re >= 0.0 {
        a11 + disc
    } else {
        a11 - disc
    };
    let q2 = 0.25 / q1;

    let i = c64(0.0, 1.0);
    let m11 = -i / 4.0 * (4.0 * q1 + 1.0 / q1);
    let x = 4.0 * q1 - 1.0 / q1;
    let m12 = i * r_hat / 2.0 * x;
    let m21 = -i / (8.0 * r_hat) * x;
    let m = Mat2::new(m11, m12, m21, -m11);
    let data = MonodromyData {
        m0: m,
        m1: m,
        s1: c64(0.0, 0.0),
        s2: c64(0.0, 0.0),
        theta: ThetaTriple::real(0.5, 0.5, -1.0),
    };
    Ok(SpecialMonodromy {
        s0_squared: [q1, q2],
        m11,
        data,
    })
}

/// Parameters of the two large-time regimes on the real axis for an l = 1
/// member with real negative seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RealAxisParams {
    /// -1/2 < a_1^1 < 0: pole-free on the real axis; beta_0 is purely
    /// imaginary and v_hat is fixed up to a sign the asymptotics ignore.
    Smooth { beta0: Complex64, v_hat: Complex64 },
    /// a_1^1 < -1/2: infinitely many real poles; Re beta_0 = 1/2, and the
    /// tangent-squared phase t/4 + gamma ln t + psi carries the pair
    /// (gamma, psi).
    Poles {
        beta0: Complex64,
        v_hat: Complex64,
        gamma: f64,
        psi: f64,
    },
}

/// Real-axis parameters of an l = 1 member:
///
///   beta_0 = ln(1 + m11^2) / (2 pi i) = ln(1 - 4 a11^2) / (2 pi i),
///   v_hat  = sqrt(2 pi) / (2 a11) * 2^{beta_0} e^{i pi beta_0 / 2} / Gamma(beta_0),
///
/// with the branch Re beta_0 = 0 on the smooth side and Re beta_0 = 1/2 on
/// the pole side, where additionally
///
///   gamma = ln(4 a11^2 - 1) / (4 pi),
///   psi   = pi/4 + gamma ln 2 + (1/2) arg Gamma(beta_0).
///
/// The exponential factor must carry the imaginary half-exponent: only then
/// does v_hat equal sqrt(pi i) 2^{beta_0} / (Gamma(beta_0) sqrt(sin pi
/// beta_0)) up to sign (the identity e^{2 pi i beta_0} = 1 - 4 a11^2 makes
/// the squares match), and only then is -(v_hat/sqrt 2) e^{i pi/4}
/// unimodular on the pole side, where psi is half its phase up to the sign
/// ambiguity of v_hat.
///
/// # Errors
/// `BoundaryValue` at a11 = 0 and a11 = -1/2 (the logarithm degenerates);
/// `Precondition` for a11 > 0 or non-finite input.
pub fn special_real_axis_params(a11: f64) -> Result<RealAxisParams> {
    if a11 == 0.0 {
        return Err(Error::BoundaryValue(
            "a_1^1 = 0 sits on the regime boundary; no real-axis parameters".into(),
        ));
    }
    if !(a11 < 0.0) {
        return Err(Error::Precondition(format!(
            "real-axis parameters need a negative real seed, got {a11}"
        )));
    }
    if a11 == -0.5 {
        return Err(Error::BoundaryValue(
            "a_1^1 = -1/2 sits on the regime boundary; no real-axis parameters".into(),
        ));
    }
    let spread = 1.0 - 4.0 * a11 * a11;
    let beta0 = if spread > 0.0 {
        c64(0.0, -spread.ln() / (2.0 * PI))
    } else {
        c64(0.5, -(-spread).ln() / (2.0 * PI))
    };
    let gamma_b = complex_gamma(beta0)?;
    let v_hat = (2.0 * PI).sqrt() / (2.0 * a11)
        * (beta0 * LN_2).exp()
        * (c64(0.0, PI / 2.0) * beta0).exp()
        / gamma_b;
    if spread > 0.0 {
        Ok(RealAxisParams::Smooth { beta0, v_hat })
    } else {
        let gamma = (-spread).ln() / (4.0 * PI);
        let psi = PI / 4.0 + gamma * LN_2 + 0.5 * gamma_b.arg();
        Ok(RealAxisParams::Poles {
            beta0,
            v_hat,
            gamma,
            psi,
        })
    }
}

/// Closed-form large-time description of an l = 1 member on one imaginary
/// half-axis. The lower half-axis carries the complex conjugates of the
/// upper-ray parameters and laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImaginaryAxisChart {
    /// +1 for the upper half-axis, -1 for the lower.
    pub ray_sign: i8,
    /// kappa = -ln(-2 a_1^1) / (2 pi); positive for -1/2 < a_1^1 < 0,
    /// negative for a_1^1 < -1/2, zero exactly at the Bessel member.
    pub kappa: f64,
    /// Exponent parameter -1/4 + i kappa, conjugated on the lower ray.
    pub phi: Complex64,
    /// Amplitude i 2^{-4 i kappa} e^{-2 pi kappa} sinh(2 pi kappa)/(2 pi kappa)
    /// Gamma(1 + 2 i kappa)^2, conjugated on the lower ray; |delta| equals
    /// e^{-2 pi kappa}, so the oscillation amplitude below is exactly 1.
    pub delta: Complex64,
    /// Phase offset 2 arg Gamma(1 + 2 i kappa) entering the omega law.
    pub gamma_phase: f64,
}

impl ImaginaryAxisChart {
    /// Upper-ray oscillation phase at |t|:
    /// omega = |t| - 4 kappa ln(2|t|) + 2 arg Gamma(1 + 2 i kappa).
    pub fn omega(&self, t_abs: f64) -> f64 {
        t_abs - 4.0 * self.kappa * (2.0 * t_abs).ln() + self.gamma_phase
    }

    /// Leading oscillation alpha = i e^{i omega} (conjugated on the lower
    /// ray); unimodular for every member of the family.
    pub fn alpha(&self, t_abs: f64) -> Complex64 {
        let a = c64(0.0, 1.0) * c64(0.0, self.omega(t_abs)).exp();
        if self.ray_sign < 0 {
            a.conj()
        } else {
            a
        }
    }

    /// (y, z) at |t| on the chart's ray, including the order-1/|t|
    /// corrections:
    ///
    ///   y = i e^{i omega} (1 + (i/|t|)(1/2 + 12 kappa^2 + sin omega
    ///       + 4 kappa cos omega)),
    ///   z = -i kappa (1 + (2 kappa sin omega - cos omega)/|t|),
    ///
    /// conjugated on the lower ray. On either ray |y| = 1 and Re z = 0 to
    /// the displayed order.
    pub fn evaluate(&self, t_abs: f64) -> (Complex64, Complex64) {
        let om = self.omega(t_abs);
        let k = self.kappa;
        let i = c64(0.0, 1.0);
        let y = i
            * c64(0.0, om).exp()
            * (1.0 + i / t_abs * (0.5 + 12.0 * k * k + om.sin() + 4.0 * k * om.cos()));
        let z = -i * k * (1.0 + (2.0 * k * om.sin() - om.cos()) / t_abs);
        if self.ray_sign < 0 {
            (y.conj(), z.conj())
        } else {
            (y, z)
        }
    }
}

/// Imaginary-axis chart of an l = 1 member with real negative seed. The
/// amplitude is evaluated through its duplication-formula form, which stays
/// regular at the Bessel member (kappa = 0, delta = i) where the raw
/// four-gamma product degenerates to 0 * infinity.
///
/// # Errors
/// `Precondition` for a seed outside a11 < 0 or a ray sign outside {-1, +1}.
pub fn special_imaginary_axis_params(a11: f64, ray_sign: i8) -> Result<ImaginaryAxisChart> {
    if !(a11 < 0.0) {
        return Err(Error::Precondition(format!(
            "imaginary-axis parameters need a negative real seed, got {a11}"
        )));
    }
    if ray_sign != 1 && ray_sign != -1 {
        return Err(Error::Precondition(format!(
            "ray sign must be +1 or -1, got {ray_sign}"
        )));
    }
    let kappa = -(-2.0 * a11).ln() / (2.0 * PI);
    let g = complex_gamma(c64(1.0, 2.0 * kappa))?;
    let x = 2.0 * PI * kappa;
    let sinhc = if x.abs() < 1e-6 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    };
    let mut phi = c64(-0.25, kappa);
    let mut delta = c64(0.0, 1.0) * c64(0.0, -4.0 * kappa * LN_2).exp() * (-x).exp() * sinhc * g * g;
    if ray_sign < 0 {
        phi = phi.conj();
        delta = delta.conj();
    }
    Ok(ImaginaryAxisChart {
        ray_sign,
        kappa,
        phi,
        delta,
        gamma_phase: 2.0 * g.arg(),
    })
}

/// Modulus of the largest zero among the order-five seed polynomial's
/// roots, (1/24) sqrt(90 + 6 sqrt(177)); every seed polynomial inspected so
/// far keeps its zeros inside this radius.
pub fn seed_root_radius() -> f64 {
    (90.0 + 6.0 * 177.0_f64.sqrt()).sqrt() / 24.0
}

/// All complex roots of a seed polynomial. Zero roots split off exactly
/// from the rational coefficients; the deflated part goes through
/// Weierstrass simultaneous iteration on its monic form, which is ample for
/// the low degrees these polynomials have.
pub fn seed_polynomial_roots(p: &SeedPolynomial) -> Vec<Complex64> {
    let Some(top) = p.0.iter().rposition(|c| !c.is_zero()) else {
        return Vec::new();
    };
    let low = p.0.iter().position(|c| !c.is_zero()).expect("nonzero seen");
    let mut roots = vec![c64(0.0, 0.0); low];
    let deg = top - low;
    if deg == 0 {
        return roots;
    }
    let monic: Vec<Complex64> = (low..=top)
        .map(|j| c64((&p.0[j] / &p.0[top]).to_f64().unwrap_or(f64::NAN), 0.0))
        .collect();
    let spread = c64(0.4, 0.9);
    let mut xs: Vec<Complex64> = (0..deg).map(|j| spread.powu(j as u32 + 1)).collect();
    for _ in 0..200 {
        let mut widest = 0.0_f64;
        for i in 0..deg {
            let mut den = c64(1.0, 0.0);
            for j in 0..deg {
                if j != i {
                    den *= xs[i] - xs[j];
                }
            }
            let step = horner(&monic, xs[i]) / den;
            xs[i] -= step;
            widest = widest.max(step.norm());
        }
        if widest < 1e-14 {
            break;
        }
    }
    roots.extend(xs);
    roots
}

/// Largest root modulus of each seed polynomial a_k^1 for k = 2..=k_max, as
/// (k, modulus) pairs; evidence inputs for the root-radius observation.
/// Symbolic cost grows steeply with k_max; useful values sit well below
/// [`MAX_TAYLOR_ORDER`].
pub fn seed_root_moduli(k_max: usize) -> Result<Vec<(usize, f64)>> {
    if k_max < 2 || k_max > MAX_TAYLOR_ORDER {
        return Err(Error::Precondition(format!(
            "seed-root survey order {k_max} outside 2..={MAX_TAYLOR_ORDER}"
        )));
    }
    let y = taylor_y::<SeedPolynomial>(1, &SeedPolynomial::variable(), k_max)?;
    Ok((2..=k_max)
        .map(|k| {
            let widest = seed_polynomial_roots(&y[k])
                .iter()
                .map(|r| r.norm())
                .fold(0.0, f64::max);
            (k, widest)
        })
        .collect())
}
