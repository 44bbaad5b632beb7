//! Sparse commutative Laurent polynomials over `Q` in a declared set of variables.

use crate::scalar::{fmt_q, qpow, Q};
use crate::AlgebraError;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

/// Exponent vector; negative entries allowed for invertible variables.
pub type Exps = Vec<i16>;

/// A declared variable set.
#[derive(Debug, PartialEq, Eq)]
pub struct PolyRing {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl PolyRing {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Arc<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let index = names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect::<HashMap<_, _>>();
        assert_eq!(index.len(), names.len(), "duplicate variable names");
        Arc::new(Self { names, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Index of `name`, panicking with the name if absent.
    pub fn idx(&self, name: &str) -> usize {
        self.index_of(name).unwrap_or_else(|| panic!("variable `{name}` not in ring"))
    }
}

fn same_ring(a: &Arc<PolyRing>, b: &Arc<PolyRing>) -> bool {
    Arc::ptr_eq(a, b) || a.names == b.names
}

/// Commutative polynomial; zero coefficients are never stored.
#[derive(Clone, Debug)]
pub struct CommPoly {
    ring: Arc<PolyRing>,
    terms: BTreeMap<Exps, Q>,
}

impl PartialEq for CommPoly {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}
impl Eq for CommPoly {}

impl CommPoly {
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        Self { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Arc<PolyRing>) -> Self {
        Self::constant(ring, Q::one())
    }

    pub fn constant(ring: &Arc<PolyRing>, c: Q) -> Self {
        Self::monomial(ring, vec![0; ring.len()], c)
    }

    pub fn monomial(ring: &Arc<PolyRing>, exps: Exps, c: Q) -> Self {
        assert_eq!(exps.len(), ring.len());
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Self { ring: ring.clone(), terms }
    }

    pub fn var(ring: &Arc<PolyRing>, i: usize) -> Self {
        Self::var_pow(ring, i, 1)
    }

    pub fn var_pow(ring: &Arc<PolyRing>, i: usize, k: i16) -> Self {
        let mut e = vec![0; ring.len()];
        e[i] = k;
        Self::monomial(ring, e, Q::one())
    }

    pub fn named(ring: &Arc<PolyRing>, name: &str) -> Self {
        Self::var(ring, ring.idx(name))
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Exps, Q> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Exps, Q> {
        self.terms
    }

    pub fn from_terms(ring: &Arc<PolyRing>, terms: impl IntoIterator<Item = (Exps, Q)>) -> Self {
        let mut p = Self::zero(ring);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add `c·x^e` in place.
    pub fn add_term(&mut self, e: Exps, c: Q) {
        debug_assert_eq!(e.len(), self.ring.len());
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn constant_term(&self) -> Q {
        self.terms.get(&vec![0; self.ring.len()]).cloned().unwrap_or_else(Q::zero)
    }

    /// The value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ring);
        }
        Self { ring: self.ring.clone(), terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    fn check(&self, other: &Self) -> Result<(), AlgebraError> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(AlgebraError::RingMismatch(format!("{:?} vs {:?}", self.ring.names, other.ring.names)))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let mut out = Self::zero(&self.ring);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exps = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Product keeping only terms whose weighted degree `Σ w_i e_i` is at most `max`.
    pub fn mul_truncated(&self, other: &Self, weights: &[i32], max: i32) -> Self {
        self.check(other).expect("polynomial ring mismatch");
        let wdeg = |e: &Exps| e.iter().zip(weights).map(|(k, w)| *k as i32 * w).sum::<i32>();
        let right: Vec<(&Exps, &Q, i32)> = other.terms.iter().map(|(e, c)| (e, c, wdeg(e))).collect();
        let mut out = Self::zero(&self.ring);
        for (e1, c1) in &self.terms {
            let d1 = wdeg(e1);
            for (e2, c2, d2) in &right {
                if d1 + d2 <= max {
                    let e: Exps = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                    out.add_term(e, c1 * *c2);
                }
            }
        }
        out
    }

    /// Terms whose weighted degree is at most `max`.
    pub fn truncate(&self, weights: &[i32], max: i32) -> Self {
        let wdeg = |e: &Exps| e.iter().zip(weights).map(|(k, w)| *k as i32 * w).sum::<i32>();
        Self { ring: self.ring.clone(), terms: self.terms.iter().filter(|(e, _)| wdeg(e) <= max).map(|(e, c)| (e.clone(), c.clone())).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.ring);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Maximal total degree (sum of exponents); `None` for zero.
    pub fn total_degree(&self) -> Option<i32> {
        self.terms.keys().map(|e| e.iter().map(|&k| k as i32).sum()).max()
    }

    /// Maximal degree counted only over the variables flagged in `mask`.
    pub fn degree_in_mask(&self, mask: &[bool]) -> Option<i32> {
        self.terms.keys().map(|e| mask_degree(e, mask)).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<i16> {
        self.terms.keys().map(|e| e[var]).max()
    }

    /// Part whose degree over `mask` variables equals `d`.
    pub fn homogeneous_part(&self, mask: &[bool], d: i32) -> Self {
        Self {
            ring: self.ring.clone(),
            terms: self.terms.iter().filter(|(e, _)| mask_degree(e, mask) == d).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    /// Coefficient of `var^k`, as a polynomial free of `var`.
    pub fn coeff_of(&self, var: usize, k: i16) -> Self {
        let mut out = Self::zero(&self.ring);
        for (e, c) in &self.terms {
            if e[var] == k {
                let mut e2 = e.clone();
                e2[var] = 0;
                out.add_term(e2, c.clone());
            }
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(&self.ring);
        for (e, c) in &self.terms {
            if e[var] != 0 {
                let mut e2 = e.clone();
                let k = e2[var];
                e2[var] -= 1;
                out.add_term(e2, c * Q::from_integer(k.into()));
            }
        }
        out
    }

    /// Substitute `var ↦ value`. Negative powers of `var` require `value` to be a single monomial.
    pub fn substitute(&self, var: usize, value: &Self) -> Result<Self, AlgebraError> {
        self.check(value)?;
        let mut powers: BTreeMap<i16, Self> = BTreeMap::new();
        let mut out = Self::zero(&self.ring);
        for (e, c) in &self.terms {
            let k = e[var];
            if !powers.contains_key(&k) {
                let p = if k >= 0 {
                    value.pow(k as u32)
                } else {
                    value.monomial_inverse()?.pow((-k) as u32)
                };
                powers.insert(k, p);
            }
            let mut e2 = e.clone();
            e2[var] = 0;
            let rest = Self::monomial(&self.ring, e2, c.clone());
            out = &out + &(&rest * &powers[&k]);
        }
        Ok(out)
    }

    /// Ring map sending variable `i` to `images[i]` (all in one target ring).
    pub fn compose(&self, images: &[CommPoly]) -> Result<Self, AlgebraError> {
        assert_eq!(images.len(), self.ring.len());
        let target = images.first().map(|p| p.ring.clone()).ok_or_else(|| AlgebraError::RingMismatch("empty ring".into()))?;
        let mut inverses: Vec<Option<CommPoly>> = vec![None; images.len()];
        let mut out = Self::zero(&target);
        for (e, c) in &self.terms {
            let mut t = Self::constant(&target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = &t * &images[i].pow(k as u32);
                } else if k < 0 {
                    if inverses[i].is_none() {
                        inverses[i] = Some(images[i].monomial_inverse()?);
                    }
                    t = &t * &inverses[i].as_ref().unwrap().pow((-k) as u32);
                }
            }
            out = out + t;
        }
        Ok(out)
    }

    /// Inverse of a single nonzero monomial.
    pub fn monomial_inverse(&self) -> Result<Self, AlgebraError> {
        if self.terms.len() != 1 {
            return Err(AlgebraError::NotInvertible(self.to_string()));
        }
        let (e, c) = self.terms.iter().next().unwrap();
        let e2: Exps = e.iter().map(|k| -k).collect();
        Ok(Self::monomial(&self.ring, e2, c.recip()))
    }

    /// Evaluate every variable at a rational value.
    pub fn eval(&self, values: &[Q]) -> Q {
        assert_eq!(values.len(), self.ring.len());
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (k, v) in e.iter().zip(values) {
                if *k != 0 {
                    t *= qpow(v, *k as i64);
                }
            }
            acc += t;
        }
        acc
    }

    /// Re-express in a ring containing all variables of this polynomial (matched by name).
    pub fn embed(&self, target: &Arc<PolyRing>) -> Result<Self, AlgebraError> {
        let map: Vec<usize> = self
            .ring
            .names
            .iter()
            .map(|n| target.index_of(n).ok_or_else(|| AlgebraError::RingMismatch(format!("`{n}` missing from target ring"))))
            .collect::<Result<_, _>>()?;
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.len()];
            for (i, k) in e.iter().enumerate() {
                if *k != 0 {
                    e2[map[i]] = *k;
                }
            }
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Apply `f` to each coefficient, dropping zeros.
    pub fn map_coeffs(&self, f: impl Fn(&Q) -> Q) -> Self {
        Self::from_terms(&self.ring, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }
}

fn mask_degree(e: &[i16], mask: &[bool]) -> i32 {
    e.iter().zip(mask).filter(|(_, m)| **m).map(|(k, _)| *k as i32).sum()
}

impl fmt::Display for CommPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let mono = fmt_monomial(&self.ring, e);
            let coef = fmt_q(c);
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (mono.is_empty(), c.is_one()) {
                (true, _) => write!(f, "{coef}")?,
                (false, true) => write!(f, "{mono}")?,
                (false, false) => write!(f, "{coef}*{mono}")?,
            }
        }
        Ok(())
    }
}

pub(crate) fn fmt_monomial(ring: &PolyRing, e: &[i16]) -> String {
    e.iter()
        .enumerate()
        .filter(|(_, k)| **k != 0)
        .map(|(i, k)| if *k == 1 { ring.name(i).to_string() } else { format!("{}^{}", ring.name(i), k) })
        .collect::<Vec<_>>()
        .join("*")
}

impl Add for &CommPoly {
    type Output = CommPoly;
    fn add(self, o: &CommPoly) -> CommPoly {
        self.checked_add(o).expect("polynomial ring mismatch")
    }
}

impl Add for CommPoly {
    type Output = CommPoly;
    fn add(mut self, o: CommPoly) -> CommPoly {
        self.check(&o).expect("polynomial ring mismatch");
        for (e, c) in o.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Sub for &CommPoly {
    type Output = CommPoly;
    fn sub(self, o: &CommPoly) -> CommPoly {
        self + &(-o)
    }
}

impl Sub for CommPoly {
    type Output = CommPoly;
    fn sub(self, o: CommPoly) -> CommPoly {
        self + (-o)
    }
}

impl Neg for &CommPoly {
    type Output = CommPoly;
    fn neg(self) -> CommPoly {
        CommPoly { ring: self.ring.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl Neg for CommPoly {
    type Output = CommPoly;
    fn neg(mut self) -> CommPoly {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Mul for &CommPoly {
    type Output = CommPoly;
    fn mul(self, o: &CommPoly) -> CommPoly {
        self.checked_mul(o).expect("polynomial ring mismatch")
    }
}

impl Mul for CommPoly {
    type Output = CommPoly;
    fn mul(self, o: CommPoly) -> CommPoly {
        &self * &o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};
    use proptest::prelude::*;

    fn ring() -> Arc<PolyRing> {
        PolyRing::new(["x", "y", "z"])
    }

    fn poly_strategy() -> impl Strategy<Value = Vec<((i16, i16, i16), i64)>> {
        proptest::collection::vec(((0i16..3, 0i16..3, -1i16..2), -5i64..6), 0..5)
    }

    fn build(r: &Arc<PolyRing>, t: &[((i16, i16, i16), i64)]) -> CommPoly {
        CommPoly::from_terms(r, t.iter().map(|((a, b, c), v)| (vec![*a, *b, *c], qi(*v))))
    }

    #[test]
    fn display_is_canonical() {
        let r = ring();
        let p = &CommPoly::named(&r, "x") + &CommPoly::constant(&r, q(-1, 2));
        assert_eq!(p.to_string(), "x + -1/2");
        assert_eq!((&p - &p).to_string(), "0");
    }

    #[test]
    fn substitution_and_inverse() {
        let r = ring();
        let x = CommPoly::named(&r, "x");
        let z = CommPoly::named(&r, "z");
        let p = &x * &z.monomial_inverse().unwrap();
        let s = p.substitute(2, &CommPoly::constant(&r, qi(2))).unwrap();
        assert_eq!(s, x.scale(&q(1, 2)));
        assert!(p.substitute(2, &(&x + &z)).is_err());
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = CommPoly::one(&ring());
        let b = CommPoly::one(&PolyRing::new(["u"]));
        assert!(a.checked_add(&b).is_err());
    }

    proptest! {
        #[test]
        fn ring_axioms(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
            let r = ring();
            let (a, b, c) = (build(&r, &a), build(&r, &b), build(&r, &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn leibniz(a in poly_strategy(), b in poly_strategy()) {
            let r = ring();
            let (a, b) = (build(&r, &a), build(&r, &b));
            for v in 0..3 {
                prop_assert_eq!((&a * &b).derivative(v), &(&a.derivative(v) * &b) + &(&a * &b.derivative(v)));
            }
        }
    }
}
