//! Subconvexity exponent bookkeeping in exact rational arithmetic.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::scalar::{fmt_q, qi, Q};

/// `δ_n♯ = 2 / (3n⁵ − 2n⁴ − n²)`.
pub fn delta_sharp(n: i64) -> Q {
    qi(2) / qi(3 * n.pow(5) - 2 * n.pow(4) - n * n)
}

/// `2 + 2n + (3(n+1)² + n)(n+1)`, the coefficient of `δ` in `α`.
pub fn alpha_slope(n: i64) -> Q {
    qi(2 + 2 * n + (3 * (n + 1).pow(2) + n) * (n + 1))
}

/// Exponent budget for `GL(n+1) × GL(n)` with `κ = 2δ` and `L = T^{2δ}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentBudget {
    pub n: i64,
    pub delta: Q,
    pub kappa: Q,
    pub l_exponent: Q,
}

impl ExponentBudget {
    /// `α = 2δ − 1/2 + nκ + (3(n+1)² + n)(n+1)δ`.
    pub fn alpha(&self) -> Q {
        let n = self.n;
        qi(2) * &self.delta - Q::new(1.into(), 2.into()) + qi(n) * &self.kappa + qi((3 * (n + 1).pow(2) + n) * (n + 1)) * &self.delta
    }

    /// The saving in `L(π, 1/2) ≪ T^{(n+1)/4 · (1 − δ♯)}` obtained from
    /// `L(π,1/2)^n ≪ T^{n(n+1)/4 − δ}`.
    pub fn delta_sharp(&self) -> Q {
        qi(4) * &self.delta / qi(self.n * (self.n + 1))
    }
}

/// The largest `δ` with `α ≤ 0`.
pub fn optimize(n: i64) -> ExponentBudget {
    let delta = Q::one() / (qi(2) * alpha_slope(n));
    ExponentBudget { n, kappa: qi(2) * &delta, l_exponent: qi(2) * &delta, delta }
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    out
}

fn poly_scale(a: &[i64], c: i64) -> Vec<i64> {
    a.iter().map(|x| x * c).collect()
}

fn poly_pow(a: &[i64], k: u32) -> Vec<i64> {
    (0..k).fold(vec![1], |acc, _| poly_mul(&acc, a))
}

/// Coefficients in `n` of `n(n+1)(2 + 2n + (3(n+1)² + n)(n+1))` and of
/// `3(n+1)⁵ − 2(n+1)⁴ − (n+1)²`, lowest degree first.
pub fn denominator_polynomials() -> (Vec<i64>, Vec<i64>) {
    let n = [0, 1];
    let n1 = [1, 1];
    let inner = poly_add(&poly_mul(&poly_add(&poly_scale(&poly_pow(&n1, 2), 3), &n), &n1), &[2, 2]);
    let left = poly_mul(&poly_mul(&n, &n1), &inner);
    let right = poly_add(&poly_add(&poly_scale(&poly_pow(&n1, 5), 3), &poly_scale(&poly_pow(&n1, 4), -2)), &poly_scale(&poly_pow(&n1, 2), -1));
    (left, right)
}

/// `Σ_{j=n′+1}^{n} (2j − n − 1)/2 = n′n″/2` with `n = n′ + n″`.
pub fn weight_sum_identity(n1: i64, n2: i64) -> bool {
    let n = n1 + n2;
    let lhs = (n1 + 1..=n).fold(Q::zero(), |acc, j| acc + Q::new((2 * j - n - 1).into(), 2.into()));
    lhs == Q::new((n1 * n2).into(), 2.into())
}

/// `n/(2n′) + n″(n″−1)/2 ≤ n n″/2` and its rearrangement
/// `n′ + n″ ≤ n′(n′+1)n″` agree, and hold for `n′, n″ ≥ 1`.
pub fn rank_inequality(n1: i64, n2: i64) -> bool {
    let n = n1 + n2;
    let original = Q::new(n.into(), (2 * n1).into()) + Q::new((n2 * (n2 - 1)).into(), 2.into()) <= Q::new((n * n2).into(), 2.into());
    let rearranged = n1 + n2 <= n1 * (n1 + 1) * n2;
    original == rearranged && rearranged
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentSummary {
    pub nmax: i64,
    pub delta2: String,
    pub delta3: String,
    pub closed_forms: bool,
    pub pipeline_matches: bool,
    pub alpha_vanishes: bool,
    pub feasible: bool,
    pub lower_bound: bool,
    pub decreasing: bool,
    pub polynomial_identity: bool,
    pub weight_identity: bool,
    pub rank_inequality: bool,
    pub table: Vec<(i64, String, String)>,
}

impl ExponentSummary {
    pub fn all_pass(&self) -> bool {
        self.closed_forms
            && self.pipeline_matches
            && self.alpha_vanishes
            && self.feasible
            && self.lower_bound
            && self.decreasing
            && self.polynomial_identity
            && self.weight_identity
            && self.rank_inequality
    }
}

/// Every exponent identity for `n ≤ nmax`.
pub fn exponent_summary(nmax: i64) -> ExponentSummary {
    let nmax = nmax.max(2);
    let (left, right) = denominator_polynomials();
    let budgets: Vec<ExponentBudget> = (1..=nmax).map(optimize).collect();
    let table = budgets.iter().map(|b| (b.n + 1, fmt_q(&b.delta), fmt_q(&b.delta_sharp()))).collect();
    ExponentSummary {
        nmax,
        delta2: fmt_q(&delta_sharp(2)),
        delta3: fmt_q(&delta_sharp(3)),
        closed_forms: delta_sharp(2) == Q::new(1.into(), 30.into()) && delta_sharp(3) == Q::new(1.into(), 279.into()),
        pipeline_matches: budgets.iter().all(|b| b.delta_sharp() == delta_sharp(b.n + 1)),
        alpha_vanishes: budgets.iter().all(|b| b.alpha().is_zero()),
        feasible: budgets.iter().all(|b| b.delta < Q::new(1.into(), 4.into()) && b.kappa == qi(2) * &b.delta && b.l_exponent == b.kappa),
        lower_bound: (2..=nmax).all(|n| delta_sharp(n) > Q::new(2.into(), (3 * n.pow(5)).into())),
        decreasing: (2..nmax).all(|n| delta_sharp(n + 1) < delta_sharp(n)),
        polynomial_identity: left == right,
        weight_identity: (1..=nmax).all(|n| (0..=n).all(|n1| weight_sum_identity(n1, n - n1))),
        rank_inequality: (2..=nmax).all(|n| (1..n).all(|n1| rank_inequality(n1, n - n1))),
        table,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(delta_sharp(2), Q::new(1.into(), 30.into()));
        assert_eq!(delta_sharp(3), Q::new(1.into(), 279.into()));
        let b = optimize(1);
        assert_eq!(b.delta, Q::new(1.into(), 60.into()));
        assert_eq!(b.delta_sharp(), Q::new(1.into(), 30.into()));
        assert!(b.alpha().is_zero());
    }

    #[test]
    fn polynomial_identity() {
        let (left, right) = denominator_polynomials();
        assert_eq!(left, right);
        assert_eq!(right, vec![0, 5, 17, 22, 13, 3]);
        let at_one: i64 = left.iter().sum();
        assert_eq!(at_one, 60);
    }

    #[test]
    fn combinatorial_identities() {
        assert!(rank_inequality(1, 1));
        assert!(rank_inequality(3, 2));
        assert!(weight_sum_identity(2, 3));
        assert!(weight_sum_identity(0, 4));
    }

    #[test]
    fn summary_to_fifty() {
        let s = exponent_summary(50);
        assert!(s.all_pass(), "{s:?}");
        assert_eq!(s.table[0], (2, "1/60".into(), "1/30".into()));
    }
}
