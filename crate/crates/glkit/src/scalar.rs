//! Exact scalars: arbitrary-precision rationals and Gaussian rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Q = BigRational;

/// Integer `n` as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// The rational `n/d`. Panics when `d == 0`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// `x^k` for any integer `k` (negative powers invert).
pub fn qpow(x: &Q, k: i64) -> Q {
    if k >= 0 {
        num_traits::pow(x.clone(), k as usize)
    } else {
        num_traits::pow(x.recip(), (-k) as usize)
    }
}

/// Nearest `f64` to a rational.
pub fn to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        // fall back on a scaled division for very large parts
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Canonical text for a rational (`3`, `-1/2`).
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Gaussian rational `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussQ {
    pub re: Q,
    pub im: Q,
}

impl GaussQ {
    pub fn new(re: Q, im: Q) -> Self {
        Self { re, im }
    }

    pub fn real(re: Q) -> Self {
        Self { re, im: Q::zero() }
    }

    pub fn i() -> Self {
        Self { re: Q::zero(), im: Q::one() }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn recip(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        Some(Self { re: &self.re / &n, im: -&self.im / &n })
    }

    /// True for the four units `±1, ±i`.
    pub fn is_unit_of_order_four(&self) -> bool {
        (self.re.is_zero() && self.im.abs().is_one()) || (self.im.is_zero() && self.re.abs().is_one())
    }
}

impl Zero for GaussQ {
    fn zero() -> Self {
        Self::real(Q::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussQ {
    fn one() -> Self {
        Self::real(Q::one())
    }
}

impl Add for GaussQ {
    type Output = GaussQ;
    fn add(self, o: GaussQ) -> GaussQ {
        GaussQ { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for GaussQ {
    type Output = GaussQ;
    fn sub(self, o: GaussQ) -> GaussQ {
        GaussQ { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for GaussQ {
    type Output = GaussQ;
    fn mul(self, o: GaussQ) -> GaussQ {
        GaussQ {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Div for GaussQ {
    type Output = GaussQ;
    fn div(self, o: GaussQ) -> GaussQ {
        self * o.recip().expect("division by zero Gaussian rational")
    }
}

impl Neg for GaussQ {
    type Output = GaussQ;
    fn neg(self) -> GaussQ {
        GaussQ { re: -self.re, im: -self.im }
    }
}

impl fmt::Display for GaussQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_q(&self.re)),
            (true, false) => write!(f, "{}*i", fmt_q(&self.im)),
            _ => write!(f, "{}+{}*i", fmt_q(&self.re), fmt_q(&self.im)),
        }
    }
}

/// Finite sum `Σ c_k q^{k/2}` with rational `c_k`, for a prime power `q` kept symbolic.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct HalfLaurent {
    terms: BTreeMap<i64, Q>,
}

impl HalfLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Q::one(), 0)
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(c, 0)
    }

    /// `c · q^{half_exp/2}`.
    pub fn monomial(c: Q, half_exp: i64) -> Self {
        let mut out = Self::zero();
        out.add_term(half_exp, c);
        out
    }

    /// `q^k` for an integer `k`.
    pub fn q_pow(k: i64) -> Self {
        Self::monomial(Q::one(), 2 * k)
    }

    pub fn add_term(&mut self, half_exp: i64, c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(half_exp).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&half_exp);
        }
    }

    /// Half-exponent to coefficient.
    pub fn terms(&self) -> &BTreeMap<i64, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(*k, v * c);
        }
        out
    }

    /// Multiply by `q^{half_exp/2}`.
    pub fn shift(&self, half_exp: i64) -> Self {
        Self { terms: self.terms.iter().map(|(k, v)| (k + half_exp, v.clone())).collect() }
    }

    /// Exact value when every exponent is an integer power of `q`.
    pub fn eval_integral(&self, q: &Q) -> Option<Q> {
        self.terms.iter().try_fold(Q::zero(), |acc, (k, c)| (k % 2 == 0).then(|| acc + c * qpow(q, k / 2)))
    }

    pub fn eval_f64(&self, q: f64) -> f64 {
        self.terms.iter().map(|(k, c)| to_f64(c) * q.powf(*k as f64 / 2.0)).sum()
    }
}

impl Add for &HalfLaurent {
    type Output = HalfLaurent;
    fn add(self, o: &HalfLaurent) -> HalfLaurent {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl Sub for &HalfLaurent {
    type Output = HalfLaurent;
    fn sub(self, o: &HalfLaurent) -> HalfLaurent {
        self + &o.scale(&-Q::one())
    }
}

impl Mul for &HalfLaurent {
    type Output = HalfLaurent;
    fn mul(self, o: &HalfLaurent) -> HalfLaurent {
        let mut out = HalfLaurent::zero();
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                out.add_term(a + b, c * d);
            }
        }
        out
    }
}

impl fmt::Display for HalfLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(k, c)| {
                let pow = match (k % 2 == 0, *k) {
                    (_, 0) => String::new(),
                    (true, 2) => "q".to_string(),
                    (true, _) => format!("q^{}", k / 2),
                    (false, _) => format!("q^({k}/2)"),
                };
                match (pow.is_empty(), c.is_one()) {
                    (true, _) => fmt_q(c),
                    (false, true) => pow,
                    (false, false) => format!("{}*{pow}", fmt_q(c)),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lowest_terms() {
        let x = q(6, -4);
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
        assert_eq!(fmt_q(&x), "-3/2");
    }

    #[test]
    fn gaussian_units() {
        let i = GaussQ::i();
        assert_eq!(i.clone() * i.clone(), -GaussQ::one());
        assert!(i.is_unit_of_order_four());
        assert!(!GaussQ::real(q(1, 2)).is_unit_of_order_four());
    }

    #[test]
    fn half_laurent_arithmetic() {
        let r = HalfLaurent::monomial(Q::one(), 1);
        let two_r = &r + &r;
        assert_eq!(two_r.to_string(), "2*q^(1/2)");
        assert_eq!(&r * &r, HalfLaurent::q_pow(1));
        assert_eq!((&r * &r).eval_integral(&qi(5)), Some(qi(5)));
        assert_eq!(r.eval_integral(&qi(5)), None);
        assert!((&two_r - &two_r).is_zero());
        assert!((two_r.eval_f64(4.0) - 4.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn field_axioms(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50) {
            let x = GaussQ::new(q(a, b), q(c, d));
            let y = GaussQ::new(q(c, b), q(a + 1, d));
            if !y.is_zero() {
                prop_assert_eq!((x.clone() * y.clone()) / y.clone(), x.clone());
            }
            if a != 0 {
                prop_assert_eq!(qpow(&q(a, b), 3) * qpow(&q(a, b), -3), Q::one());
            }
        }
    }
}
