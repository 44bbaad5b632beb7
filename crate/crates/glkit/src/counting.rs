//! Matrix counting for the pairs `(GL(n+1), GL(n))`: the distance `d_H`,
//! exhaustive enumeration of the sets `Σ(t, u, ℓ, ℓ′, X, 𝒟)`, and the
//! combinatorial lemmas behind their size bounds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hecke::Pair;
use crate::linalg::{permutations, QMat};
use crate::scalar::{fmt_q, qi, qpow, to_f64, Q};
use crate::AlgebraError;

/// A positive diagonal `t = (t_1 ≥ … ≥ t_n)` in the split torus of `GL(n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominantTorus {
    entries: Vec<Q>,
}

impl DominantTorus {
    pub fn new(entries: Vec<Q>) -> Result<Self, AlgebraError> {
        if entries.iter().any(|x| !x.is_positive()) {
            return Err(AlgebraError::Precondition("torus entries must be positive".into()));
        }
        if entries.windows(2).any(|w| w[0] < w[1]) {
            return Err(AlgebraError::Precondition("torus entries must be non-increasing".into()));
        }
        Ok(DominantTorus { entries })
    }

    /// `(2^{k_1}, …, 2^{k_n})`.
    pub fn dyadic(exps: &[i64]) -> Result<Self, AlgebraError> {
        Self::new(exps.iter().map(|&k| qpow(&qi(2), k)).collect())
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Q] {
        &self.entries
    }

    pub fn det(&self) -> Q {
        self.entries.iter().fold(Q::one(), |acc, x| acc * x)
    }

    /// `t† = ∏ max(t_i, t_i^{-1})`.
    pub fn dagger(&self) -> Q {
        self.entries.iter().fold(Q::one(), |acc, x| acc * x.clone().max(x.recip()))
    }

    /// `δ_H(t) = ∏_{i<j} t_i / t_j`.
    pub fn delta_h(&self) -> Q {
        let n = self.rank();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).fold(Q::one(), |acc, (i, j)| acc * &self.entries[i] / &self.entries[j])
    }

    /// The entries followed by `t_{n+1} = 1`.
    pub fn padded(&self) -> Vec<Q> {
        let mut v = self.entries.clone();
        v.push(Q::one());
        v
    }
}

fn block_norm(values: impl Iterator<Item = Q>) -> Q {
    values.map(|x| x.abs()).fold(Q::zero(), |a, b| a.max(b))
}

/// `d_H(g) = min(1, |b/d| + |b′/d′| + |c/d| + |c′/d′|)` for the last-row and
/// last-column blocks of `g` and `g^{-1}`; `1` if `d` or `d′` vanishes.
pub fn d_h(g: &QMat) -> Result<Q, AlgebraError> {
    let m = g.rows();
    let inv = g.inverse()?;
    let part = |x: &QMat| -> Option<Q> {
        let d = x.row(m - 1)[m - 1].clone();
        if d.is_zero() {
            return None;
        }
        let b = block_norm((0..m - 1).map(|i| x.row(i)[m - 1].clone()));
        let c = block_norm((0..m - 1).map(|j| x.row(m - 1)[j].clone()));
        Some((b + c) / d.abs())
    };
    Ok(match (part(g), part(&inv)) {
        (Some(x), Some(y)) => (x + y).min(Q::one()),
        _ => Q::one(),
    })
}

/// `|Ad(g) − 1|`, the largest entry of `X ↦ gXg^{-1} − X` on the matrix units.
pub fn ad_distance(g: &QMat) -> Result<Q, AlgebraError> {
    let m = g.rows();
    let inv = g.inverse()?;
    let mut best = Q::zero();
    for k in 0..m {
        for l in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let mut v = &g.row(k)[i] * &inv.row(j)[l];
                    if k == i && l == j {
                        v -= Q::one();
                    }
                    best = best.max(v.abs());
                }
            }
        }
    }
    Ok(best)
}

/// Parameters of one counting problem; the region `𝒟` is the box
/// `|entries of t^{-1} γ^{(1)} u| ≤ R` for the determinant-one rescaling
/// `γ^{(1)}` of the integral lift.
#[derive(Clone, Debug)]
pub struct SigmaInstance {
    pub t: DominantTorus,
    pub u: DominantTorus,
    pub ell: u64,
    pub ell_prime: u64,
    pub x: Q,
    pub radius: Q,
}

impl SigmaInstance {
    fn validate(&self) -> Result<(), AlgebraError> {
        if self.t.rank() != self.u.rank() || !(1..=2).contains(&self.t.rank()) {
            return Err(AlgebraError::Precondition("counting supports GL(2) ⊃ GL(1) and GL(3) ⊃ GL(2)".into()));
        }
        if self.ell == 0 || self.ell_prime == 0 || !self.x.is_positive() || self.x > Q::one() || !self.radius.is_positive() {
            return Err(AlgebraError::Precondition("need ℓ, ℓ′ ≥ 1, 0 < X ≤ 1, R > 0".into()));
        }
        Ok(())
    }

    /// `D = ℓ det(u) / det(t)`.
    pub fn scale(&self) -> Q {
        qi(self.ell as i64) * self.u.det() / self.t.det()
    }

    /// `D′ = ℓ′ det(t) / det(u)`.
    pub fn dual_scale(&self) -> Q {
        qi(self.ell_prime as i64) * self.t.det() / self.u.det()
    }

    /// Radius of the inverse box: adjugates of matrices bounded by `R`.
    pub fn dual_radius(&self) -> Q {
        let n = self.t.rank() as i64;
        let fact: i64 = (1..=n).product();
        qi(fact) * qpow(&self.radius, n)
    }

    fn entry_bounds(&self) -> Vec<Vec<i64>> {
        let m = self.t.rank() + 1;
        let (t, u) = (self.t.padded(), self.u.padded());
        let d = self.scale();
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let ratio = &self.radius * &t[i] / &u[j];
                        integer_root_floor(&(qpow(&ratio, m as i64) * &d), m as u32)
                    })
                    .collect()
            })
            .collect()
    }

    fn swapped(&self) -> SigmaInstance {
        SigmaInstance { t: self.u.clone(), u: self.t.clone(), ell: self.ell_prime, ell_prime: self.ell, x: self.x.clone(), radius: self.radius.clone() }
    }
}

/// Largest integer `B ≥ 0` with `B^k ≤ v`.
fn integer_root_floor(v: &Q, k: u32) -> i64 {
    if !v.is_positive() {
        return 0;
    }
    let mut b = to_f64(v).powf(1.0 / k as f64).floor() as i64;
    let pow = |x: i64| Q::from_integer(BigInt::from(x).pow(k));
    while b > 0 && pow(b) > *v {
        b -= 1;
    }
    while pow(b + 1) <= *v {
        b += 1;
    }
    b
}

/// One element of `Σ`: the sign-normalized integral lift and `d_H(t^{-1}γu)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaMember {
    pub lift: Vec<Vec<i64>>,
    pub distance: Q,
}

fn det_i128(g: &[Vec<i64>]) -> i128 {
    let m = g.len();
    permutations(m)
        .iter()
        .map(|(perm, sign)| *sign as i128 * perm.iter().enumerate().map(|(i, &j)| g[i][j] as i128).product::<i128>())
        .sum()
}

fn adjugate(g: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let m = g.len();
    if m == 1 {
        return vec![vec![1]];
    }
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let minor: Vec<Vec<i64>> = (0..m).filter(|&r| r != j).map(|r| (0..m).filter(|&c| c != i).map(|c| g[r][c]).collect()).collect();
                    let s = if (i + j) % 2 == 0 { 1 } else { -1 };
                    s * det_i128(&minor) as i64
                })
                .collect()
        })
        .collect()
}

fn is_perfect_power(v: i128, k: u32) -> bool {
    if v < 1 {
        return false;
    }
    let mut r = (v as f64).powf(1.0 / k as f64).round() as i128;
    while r > 1 && r.pow(k) > v {
        r -= 1;
    }
    while (r + 1).pow(k) <= v {
        r += 1;
    }
    r.pow(k) == v
}

/// The sign-normalized primitive multiple of `adj(γ)` with `|det| = ℓ′`, if any.
pub fn inverse_lift(lift: &[Vec<i64>], ell_prime: u64) -> Option<Vec<Vec<i64>>> {
    let m = lift.len();
    let adj = adjugate(lift);
    let g = adj.iter().flatten().fold(0i64, |acc, &x| acc.gcd(&x));
    if g == 0 {
        return None;
    }
    let prim: Vec<Vec<i64>> = adj.iter().map(|r| r.iter().map(|x| x / g).collect()).collect();
    let base = det_i128(&prim).abs();
    if base == 0 || ell_prime as i128 % base != 0 {
        return None;
    }
    let quotient = ell_prime as i128 / base;
    if !is_perfect_power(quotient, m as u32) {
        return None;
    }
    let k = (quotient as f64).powf(1.0 / m as f64).round() as i64;
    Some(normalize_sign(prim.iter().map(|r| r.iter().map(|x| x * k).collect()).collect()))
}

fn normalize_sign(g: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let first = g.iter().flatten().find(|&&x| x != 0).copied().unwrap_or(1);
    if first < 0 {
        g.into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect()
    } else {
        g
    }
}

fn in_subgroup(g: &[Vec<i64>]) -> bool {
    let m = g.len();
    (0..m - 1).all(|i| g[i][m - 1] == 0 && g[m - 1][i] == 0)
}

fn conjugated(g: &[Vec<i64>], t: &[Q], u: &[Q]) -> QMat {
    QMat::from_rows(g.iter().enumerate().map(|(i, r)| r.iter().enumerate().map(|(j, &x)| qi(x) * &u[j] / &t[i]).collect()).collect())
}

/// All classes satisfying the lift, inverse-lift, box and `γ ∉ H`
/// conditions, with their distances; the `d_H ≤ X` filter is left to the
/// caller. Fails when the search box exceeds `budget` points.
pub fn enumerate_lifts(inst: &SigmaInstance, budget: u64) -> Result<Vec<SigmaMember>, AlgebraError> {
    inst.validate()?;
    let m = inst.t.rank() + 1;
    let bounds = inst.entry_bounds();
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    let solve = *cells.iter().max_by_key(|&&(i, j)| (bounds[i][j], std::cmp::Reverse((i, j)))).unwrap();
    let free: Vec<(usize, usize)> = cells.iter().copied().filter(|&c| c != solve).collect();
    let volume = free.iter().try_fold(1u64, |acc, &(i, j)| acc.checked_mul(2 * bounds[i][j] as u64 + 1));
    match volume {
        Some(v) if v <= budget => {}
        _ => return Err(AlgebraError::Precondition(format!("search box exceeds budget {budget}"))),
    }
    let (t, u) = (inst.t.padded(), inst.u.padded());
    let ell = inst.ell as i128;
    let (si, sj) = solve;
    let solve_bound = bounds[si][sj];
    let (head, tail) = (free[0], &free[1..]);
    let chunks: Vec<Vec<SigmaMember>> = (-bounds[head.0][head.1]..=bounds[head.0][head.1])
        .into_par_iter()
        .map(|first| -> Result<Vec<SigmaMember>, AlgebraError> {
            let mut found = Vec::new();
            let mut g = vec![vec![0i64; m]; m];
            g[head.0][head.1] = first;
            let mut idx: Vec<i64> = tail.iter().map(|&(i, j)| -bounds[i][j]).collect();
            loop {
                for (k, &(i, j)) in tail.iter().enumerate() {
                    g[i][j] = idx[k];
                }
                g[si][sj] = 0;
                let rest = det_i128(&g);
                g[si][sj] = 1;
                let coeff = det_i128(&g) - rest;
                let candidates: Vec<i64> = if coeff == 0 {
                    if rest.abs() == ell { (-solve_bound..=solve_bound).collect() } else { vec![] }
                } else {
                    [ell, -ell]
                        .iter()
                        .filter(|&&target| (target - rest) % coeff == 0)
                        .map(|&target| ((target - rest) / coeff) as i64)
                        .filter(|x| x.abs() <= solve_bound)
                        .collect()
                };
                for x in candidates {
                    g[si][sj] = x;
                    if in_subgroup(&g) || normalize_sign(g.clone()) != g {
                        continue;
                    }
                    if inverse_lift(&g, inst.ell_prime).is_none() {
                        continue;
                    }
                    if !dual_box_holds(inst, &g) {
                        continue;
                    }
                    let distance = d_h(&conjugated(&g, &t, &u))?;
                    found.push(SigmaMember { lift: g.clone(), distance });
                }
                let mut k = 0;
                while k < idx.len() {
                    let (i, j) = tail[k];
                    idx[k] += 1;
                    if idx[k] <= bounds[i][j] {
                        break;
                    }
                    idx[k] = -bounds[i][j];
                    k += 1;
                }
                if k == idx.len() {
                    break;
                }
            }
            Ok(found)
        })
        .collect::<Result<_, _>>()?;
    let mut out: Vec<SigmaMember> = chunks.into_iter().flatten().collect();
    out.sort_by(|a, b| a.lift.cmp(&b.lift));
    Ok(out)
}

/// For rank two the box is inversion-symmetric; for rank three the inverse
/// is constrained to the adjugate box so that the set stays symmetric.
fn dual_box_holds(inst: &SigmaInstance, g: &[Vec<i64>]) -> bool {
    let m = g.len();
    if m == 2 {
        return true;
    }
    let Some(inv) = inverse_lift(g, inst.ell_prime) else { return false };
    let (t, u) = (inst.t.padded(), inst.u.padded());
    let d = inst.dual_scale();
    let radius = inst.dual_radius();
    (0..m).all(|i| {
        (0..m).all(|j| {
            let entry = qi(inv[i][j]) * &t[j] / &u[i];
            qpow(&entry.abs(), m as i64) <= qpow(&radius, m as i64) * &d
        })
    })
}

/// `Σ(t, u, ℓ, ℓ′, X, 𝒟)`.
pub fn enumerate_sigma(inst: &SigmaInstance, budget: u64) -> Result<Vec<SigmaMember>, AlgebraError> {
    Ok(enumerate_lifts(inst, budget)?.into_iter().filter(|s| s.distance <= inst.x).collect())
}

/// `d(a, b) = min_σ max_i |a_i − b_{σ(i)}|` by brute force over `S(n)`.
pub fn perm_distance(a: &[i64], b: &[i64]) -> i64 {
    assert_eq!(a.len(), b.len());
    permutations(a.len())
        .iter()
        .map(|(perm, _)| a.iter().zip(perm).map(|(x, &j)| (x - b[j]).abs()).max().unwrap_or(0))
        .min()
        .unwrap_or(0)
}

/// `max_i |a_i − b_i|` after sorting both tuples.
pub fn sorted_distance(a: &[i64], b: &[i64]) -> i64 {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    x.sort_unstable();
    y.sort_unstable();
    x.iter().zip(&y).map(|(p, q)| (p - q).abs()).max().unwrap_or(0)
}

fn remove_at(a: &[i64], k: usize) -> Vec<i64> {
    a.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &x)| x).collect()
}

/// `d(a^{(k)}, b^{(l)}) ≤ 2c` whenever `d(a, b) ≤ c` and `a_k = b_l`.
pub fn removal_lemma_check(a: &[i64], b: &[i64], k: usize, l: usize, c: i64) -> bool {
    if perm_distance(a, b) > c || a[k] != b[l] {
        return true;
    }
    perm_distance(&remove_at(a, k), &remove_at(b, l)) <= 2 * c
}

/// `t† ≤ max(1/det t, det t, t_1^n / det t, det t / t_n^n)`, and
/// `t† ≤ max(t_1^n, t_n^{-n})` when `det t = 1`.
pub fn t_dagger_bounds(t: &DominantTorus) -> bool {
    let n = t.rank() as i64;
    let det = t.det();
    let (first, last) = (&t.entries()[0], t.entries().last().unwrap());
    let general = [det.recip(), det.clone(), qpow(first, n) / &det, &det / qpow(last, n)].into_iter().fold(Q::zero(), Q::max);
    let dagger = t.dagger();
    let unimodular = !det.is_one() || dagger <= qpow(first, n).max(qpow(last, -n));
    dagger <= general && unimodular
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub cases: usize,
    pub failures: usize,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.failures == 0
    }
}

/// Brute-force permutation distance against the sorted matching.
pub fn sorted_matching_trials(cases: usize, max_len: usize, rng: &mut impl Rng) -> LemmaReport {
    let failures = (0..cases)
        .filter(|_| {
            let len = rng.gen_range(1..=max_len);
            let mut a: Vec<i64> = (0..len).map(|_| rng.gen_range(-20..=20)).collect();
            let mut b: Vec<i64> = (0..len).map(|_| rng.gen_range(-20..=20)).collect();
            a.sort_unstable();
            b.sort_unstable();
            perm_distance(&a, &b) != sorted_distance(&a, &b)
        })
        .count();
    LemmaReport { cases, failures }
}

/// Random removal-lemma instances, with values drawn from small ranges to
/// force ties.
pub fn removal_trials(cases: usize, max_len: usize, rng: &mut impl Rng) -> LemmaReport {
    let failures = (0..cases)
        .filter(|_| {
            let len = rng.gen_range(1..=max_len);
            let spread = rng.gen_range(1..=12);
            let a: Vec<i64> = (0..len).map(|_| rng.gen_range(-spread..=spread)).collect();
            let mut b: Vec<i64> = (0..len).map(|_| rng.gen_range(-spread..=spread)).collect();
            let (k, l) = (rng.gen_range(0..len), rng.gen_range(0..len));
            b[l] = a[k];
            let c = perm_distance(&a, &b);
            !removal_lemma_check(&a, &b, k, l, c)
        })
        .count();
    LemmaReport { cases, failures }
}

fn random_positive(rng: &mut impl Rng) -> Q {
    Q::new(BigInt::from(rng.gen_range(1..=40)), BigInt::from(rng.gen_range(1..=40)))
}

/// Random dominant rational tuples, half of them rescaled to determinant one.
pub fn t_dagger_trials(cases: usize, max_len: usize, rng: &mut impl Rng) -> LemmaReport {
    let failures = (0..cases)
        .filter(|case| {
            let n = rng.gen_range(1..=max_len);
            let mut v: Vec<Q> = (0..n).map(|_| random_positive(rng)).collect();
            if case % 2 == 1 {
                let prod = v[..n - 1].iter().fold(Q::one(), |a, x| a * x);
                v[n - 1] = prod.recip();
            }
            v.sort_unstable_by(|x, y| y.cmp(x));
            !t_dagger_bounds(&DominantTorus::new(v).expect("positive"))
        })
        .count();
    LemmaReport { cases, failures }
}

/// Exact quasi-invariance `d_H(h_1 g h_2) ≤ K d_H(g)` with
/// `K = n · max(|h_i|, |h_i^{-1}|)`, and `d_H(g) ≤ 4δ/(1−δ)` for
/// `δ = |Ad(g) − 1| < 1`. Returns the largest observed `d_H(g)/δ`.
#[derive(Clone, Debug, Serialize)]
pub struct DistanceReport {
    pub samples: usize,
    pub invariance: bool,
    pub ad_bound: bool,
    pub ad_constant: f64,
}

fn random_small_matrix(m: usize, scale: i64, rng: &mut impl Rng) -> QMat {
    QMat::from_rows((0..m).map(|i| (0..m).map(|j| {
        let base = if i == j { qi(1) } else { Q::zero() };
        base + Q::new(BigInt::from(rng.gen_range(-4..=4)), BigInt::from(scale))
    }).collect()).collect())
}

fn embed(h: &QMat) -> QMat {
    let n = h.rows();
    QMat::from_rows((0..=n).map(|i| (0..=n).map(|j| if i < n && j < n { h.row(i)[j].clone() } else if i == j { Q::one() } else { Q::zero() }).collect()).collect())
}

fn sup_norm(g: &QMat) -> Q {
    block_norm(g.entries().iter().cloned())
}

pub fn distance_trials(n: usize, samples: usize, rng: &mut impl Rng) -> Result<DistanceReport, AlgebraError> {
    let mut invariance = true;
    let mut ad_bound = true;
    let mut ad_constant = 0.0f64;
    for _ in 0..samples {
        let g = random_small_matrix(n + 1, rng.gen_range(2..=8), rng);
        if g.det().is_zero() {
            continue;
        }
        let h1 = random_small_matrix(n, 3, rng);
        let h2 = random_small_matrix(n, 3, rng);
        if h1.det().is_zero() || h2.det().is_zero() {
            continue;
        }
        let k = [sup_norm(&h1), sup_norm(&h1.inverse()?), sup_norm(&h2), sup_norm(&h2.inverse()?)].into_iter().fold(Q::zero(), Q::max);
        let kk = qi(n as i64) * k.clone() * k;
        let base = d_h(&g)?;
        let moved = d_h(&(&(&embed(&h1) * &g) * &embed(&h2)))?;
        invariance &= moved <= &kk * &base && base <= &kk * &moved;
        let near = random_small_matrix(n + 1, rng.gen_range(40..=400), rng);
        if near.det().is_zero() {
            continue;
        }
        let delta = ad_distance(&near)?;
        if delta.is_zero() || delta >= Q::one() {
            continue;
        }
        let dist = d_h(&near)?;
        ad_bound &= dist <= qi(4) * &delta / (Q::one() - &delta);
        ad_constant = ad_constant.max(to_f64(&(dist / delta)));
    }
    Ok(DistanceReport { samples, invariance, ad_bound, ad_constant })
}

/// A counting sweep; exponents are base two.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_pair")]
    pub pair: String,
    pub t_exponents: Vec<i64>,
    pub u_exponents: Vec<i64>,
    pub ells: Vec<u64>,
    #[serde(default)]
    pub ell_prime_offset: i64,
    pub x_exponents: Vec<i64>,
    #[serde(default = "default_radius")]
    pub radius: i64,
    #[serde(default = "default_budget")]
    pub budget: u64,
}

fn default_pair() -> String {
    "gl2-gl1".into()
}

fn default_radius() -> i64 {
    2
}

fn default_budget() -> u64 {
    20_000_000
}

impl SweepSpec {
    /// `t, u ∈ {2^k : |k| ≤ 5}`, `ℓ ≤ 20`, `X ∈ {1, 1/2, …, 1/16}`, `R = 2`.
    pub fn standard() -> Self {
        SweepSpec {
            pair: default_pair(),
            t_exponents: (-5..=5).collect(),
            u_exponents: (-5..=5).collect(),
            ells: (1..=20).collect(),
            ell_prime_offset: 0,
            x_exponents: vec![0, -1, -2, -3, -4],
            radius: 2,
            budget: default_budget(),
        }
    }

    /// A small rank-three sweep.
    pub fn gl3_small() -> Self {
        SweepSpec {
            pair: "gl3-gl2".into(),
            t_exponents: vec![-1, 0, 1],
            u_exponents: vec![-1, 0, 1],
            ells: (1..=4).collect(),
            ell_prime_offset: 0,
            x_exponents: vec![0, -1, -2],
            radius: 1,
            budget: default_budget(),
        }
    }

    fn tori(exps: &[i64], n: usize) -> Vec<(Vec<i64>, DominantTorus)> {
        let mut out = Vec::new();
        let mut stack: Vec<Vec<i64>> = vec![vec![]];
        while let Some(cur) = stack.pop() {
            if cur.len() == n {
                out.push(cur);
                continue;
            }
            for &k in exps {
                if cur.last().is_none_or(|&l| k <= l) {
                    let mut next = cur.clone();
                    next.push(k);
                    stack.push(next);
                }
            }
        }
        out.sort();
        out.into_iter().map(|e| { let t = DominantTorus::dyadic(&e).expect("dyadic"); (e, t) }).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CountRow {
    pub t: Vec<i64>,
    pub u: Vec<i64>,
    pub ell: u64,
    pub ell_prime: u64,
    pub x: String,
    pub count: usize,
    pub crude_bound: f64,
    pub crude_ratio: f64,
    pub refined_bound: f64,
    pub refined_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountingReport {
    pub pair: Pair,
    pub instances: usize,
    pub crude_constant: f64,
    pub crude_max_ratio: f64,
    pub crude_holds: bool,
    pub refined_max_ratio: f64,
    pub refined_calibrated: f64,
    pub refined_exponent: f64,
    pub refined_claimed_exponent: f64,
    pub refined_holds: bool,
    pub nonempty_constraint: bool,
    pub monotone_in_x: bool,
    pub symmetric: bool,
    pub rows: Vec<CountRow>,
}

impl CountingReport {
    pub fn all_pass(&self) -> bool {
        self.crude_holds && self.refined_holds && self.nonempty_constraint && self.monotone_in_x && self.symmetric
    }
}

/// `(4(1 + 2R′))^{(n+1)²}` with `R′ = max(R, n!R^n)`.
pub fn crude_constant(n: usize, radius: &Q) -> Q {
    let n_i = n as i64;
    let fact: i64 = (1..=n_i).product();
    let r = radius.clone().max(qi(fact) * qpow(radius, n_i));
    qpow(&(qi(4) * (Q::one() + qi(2) * r)), ((n + 1) * (n + 1)) as i64)
}

/// Nonemptiness forces `max(t_i/u_i, u_i/t_i)^{n+1} ≤ R′^{2(n+1)} max(D, D′)²`.
fn nonempty_constraint_holds(inst: &SigmaInstance) -> bool {
    let n = inst.t.rank();
    let rho = inst.radius.clone().max(inst.dual_radius());
    let dmax = inst.scale().max(inst.dual_scale());
    let cap = qpow(&rho, 2 * (n as i64 + 1)) * &dmax * &dmax;
    inst.t.entries().iter().zip(inst.u.entries()).all(|(a, b)| {
        let r = (a / b).max(b / a);
        qpow(&r, n as i64 + 1) <= cap
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    if points.len() < 2 {
        return 0.0;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 { 0.0 } else { sxy / sxx }
}

/// Runs a counting sweep and checks the crude bound with its explicit
/// constant, the refined bound's `ℓ`-exponent and a constant calibrated on
/// the lower half of the `ℓ` range, the nonemptiness constraint, monotonicity
/// in `X`, and (rank two) the inversion symmetry of `Σ`.
pub fn counting_sweep(spec: &SweepSpec) -> Result<CountingReport, AlgebraError> {
    let pair: Pair = spec.pair.parse()?;
    let n = pair.rank() - 1;
    let radius = qi(spec.radius);
    let xs: Vec<Q> = {
        let mut v: Vec<Q> = spec.x_exponents.iter().map(|&k| qpow(&qi(2), k)).collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    };
    if xs.iter().any(|x| *x > Q::one()) {
        return Err(AlgebraError::Precondition("X must not exceed 1".into()));
    }
    let ts = SweepSpec::tori(&spec.t_exponents, n);
    let us = SweepSpec::tori(&spec.u_exponents, n);
    let constant = crude_constant(n, &radius);
    let mut rows = Vec::new();
    let mut crude_holds = true;
    let mut nonempty_constraint = true;
    let mut monotone_in_x = true;
    let mut symmetric = true;
    let mut envelope: std::collections::BTreeMap<u64, f64> = std::collections::BTreeMap::new();
    let mut refined_points = Vec::new();
    for (te, t) in &ts {
        for (ue, u) in &us {
            for &ell in &spec.ells {
                let ell_prime = (ell as i64 + spec.ell_prime_offset).max(1) as u64;
                let base = SigmaInstance { t: t.clone(), u: u.clone(), ell, ell_prime, x: Q::one(), radius: radius.clone() };
                let members = enumerate_lifts(&base, spec.budget)?;
                if !members.is_empty() {
                    nonempty_constraint &= nonempty_constraint_holds(&base);
                }
                if n == 1 && te[0].abs() <= 2 && ue[0].abs() <= 2 && ell <= 6 {
                    symmetric &= inversion_symmetric(&base, &members, spec.budget)?;
                }
                let det_ratio = (u.det() / t.det()).max(t.det() / u.det());
                let ell_max = qi(ell.max(ell_prime) as i64);
                let crude = qpow(&(&ell_max * t.dagger() * u.dagger() * &det_ratio), n as i64 + 1);
                let shape = (t.delta_h() * t.dagger()).min(u.delta_h() * u.dagger());
                let mut previous = usize::MAX;
                for x in &xs {
                    let count = members.iter().filter(|s| s.distance <= *x).count();
                    monotone_in_x &= count <= previous;
                    previous = count;
                    let count_q = qi(count as i64);
                    crude_holds &= count_q <= &constant * &crude;
                    let refined = x * qpow(&qi(ell as i64), 3 * (n as i64 + 1)) * &shape;
                    let refined_ratio = to_f64(&(&count_q / &refined));
                    if count > 0 {
                        let weight = to_f64(&(&count_q / (x * &shape)));
                        let slot = envelope.entry(ell).or_insert(0.0);
                        *slot = slot.max(weight);
                    }
                    refined_points.push((ell, refined_ratio));
                    rows.push(CountRow {
                        t: te.clone(),
                        u: ue.clone(),
                        ell,
                        ell_prime,
                        x: fmt_q(x),
                        count,
                        crude_bound: to_f64(&(&constant * &crude)),
                        crude_ratio: to_f64(&(&count_q / &crude)),
                        refined_bound: to_f64(&refined),
                        refined_ratio,
                    });
                }
            }
        }
    }
    let fit: Vec<(f64, f64)> = envelope.iter().filter(|(&l, _)| l > 1).map(|(&l, &w)| ((l as f64).ln(), w.ln())).collect();
    let refined_exponent = least_squares_slope(&fit);
    let claimed = 3.0 * (n as f64 + 1.0);
    let split = spec.ells.iter().copied().max().unwrap_or(1) / 2;
    let refined_calibrated = refined_points.iter().filter(|(l, _)| *l <= split.max(1)).map(|p| p.1).fold(0.0, f64::max);
    let refined_max_ratio = refined_points.iter().map(|p| p.1).fold(0.0, f64::max);
    let refined_holds = refined_exponent <= claimed && refined_max_ratio <= refined_calibrated;
    let crude_max_ratio = rows.iter().map(|r| r.crude_ratio).fold(0.0, f64::max);
    Ok(CountingReport {
        pair,
        instances: rows.len(),
        crude_constant: to_f64(&constant),
        crude_max_ratio,
        crude_holds,
        refined_max_ratio,
        refined_calibrated,
        refined_exponent,
        refined_claimed_exponent: claimed,
        refined_holds,
        nonempty_constraint,
        monotone_in_x,
        symmetric,
        rows,
    })
}

/// `γ ↦ γ^{-1}` maps `Σ(t, u, ℓ, ℓ′)` onto `Σ(u, t, ℓ′, ℓ)`.
fn inversion_symmetric(inst: &SigmaInstance, members: &[SigmaMember], budget: u64) -> Result<bool, AlgebraError> {
    let dual = enumerate_lifts(&inst.swapped(), budget)?;
    let mut image: Vec<Vec<Vec<i64>>> = members.iter().filter_map(|s| inverse_lift(&s.lift, inst.ell_prime)).collect();
    image.sort();
    let targets: Vec<Vec<Vec<i64>>> = dual.iter().map(|s| s.lift.clone()).collect();
    let distances_match = members.iter().all(|s| {
        let inv = inverse_lift(&s.lift, inst.ell_prime).expect("member has inverse lift");
        dual.iter().any(|d| d.lift == inv && d.distance == s.distance)
    });
    Ok(image == targets && distances_match)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn unit(n: usize) -> DominantTorus {
        DominantTorus::new(vec![Q::one(); n]).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(d_h(&QMat::identity(3)).unwrap(), Q::zero());
        let block = QMat::from_i64(&[&[2, 1, 0], &[1, 1, 0], &[0, 0, 5]]);
        assert_eq!(d_h(&block).unwrap(), Q::zero());
        assert_eq!(d_h(&QMat::from_i64(&[&[0, 1], &[1, 0]])).unwrap(), Q::one());
        let g = QMat::from_i64(&[&[1, 1], &[0, 4]]);
        assert!(d_h(&g).unwrap() > Q::zero());
        assert_eq!(d_h(&g.scale(&qi(3))).unwrap(), d_h(&g).unwrap());
    }

    fn brute_unimodular(bound: i64) -> usize {
        let r = -bound..=bound;
        let mut count = 0;
        for a in r.clone() {
            for b in r.clone() {
                for c in r.clone() {
                    for d in r.clone() {
                        let first = [a, b, c, d].into_iter().find(|&x| x != 0).unwrap_or(0);
                        if (a * d - b * c).abs() == 1 && (b, c) != (0, 0) && first > 0 {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    #[test]
    fn sigma_unimodular_box() {
        let inst = SigmaInstance { t: unit(1), u: unit(1), ell: 1, ell_prime: 1, x: Q::one(), radius: qi(2) };
        let members = enumerate_sigma(&inst, 1 << 20).unwrap();
        assert_eq!(members.len(), brute_unimodular(2));
        let tiny = SigmaInstance { radius: Q::new(BigInt::from(1), BigInt::from(2)), ..inst.clone() };
        assert!(enumerate_sigma(&tiny, 1 << 20).unwrap().is_empty());
        let sharp = SigmaInstance { x: Q::new(BigInt::from(1), BigInt::from(1 << 20)), ..inst };
        assert!(enumerate_sigma(&sharp, 1 << 20).unwrap().is_empty());
    }

    #[test]
    fn sigma_monotone_in_radius() {
        let t = DominantTorus::dyadic(&[1]).unwrap();
        let small = SigmaInstance { t: t.clone(), u: unit(1), ell: 6, ell_prime: 6, x: Q::one(), radius: qi(1) };
        let large = SigmaInstance { radius: qi(2), ..small.clone() };
        let a = enumerate_sigma(&small, 1 << 22).unwrap();
        let b = enumerate_sigma(&large, 1 << 22).unwrap();
        assert!(a.iter().all(|s| b.contains(s)));
        assert!(a.len() < b.len());
    }

    #[test]
    fn sigma_symmetry_and_guard() {
        let inst = SigmaInstance { t: DominantTorus::dyadic(&[2]).unwrap(), u: DominantTorus::dyadic(&[-1]).unwrap(), ell: 4, ell_prime: 4, x: Q::one(), radius: qi(2) };
        let members = enumerate_lifts(&inst, 1 << 22).unwrap();
        assert!(inversion_symmetric(&inst, &members, 1 << 22).unwrap());
        assert!(enumerate_lifts(&inst, 10).is_err());
    }

    #[test]
    fn gl3_enumeration() {
        let inst = SigmaInstance { t: unit(2), u: unit(2), ell: 2, ell_prime: 4, x: Q::one(), radius: qi(1) };
        let members = enumerate_sigma(&inst, 1 << 22).unwrap();
        assert!(!members.is_empty());
        assert!(members.iter().all(|s| det_i128(&s.lift).abs() == 2 && !in_subgroup(&s.lift)));
    }

    #[test]
    fn dagger_examples() {
        assert_eq!(unit(3).dagger(), Q::one());
        for n in 2..=5i64 {
            let r = qi(3);
            let mut v = vec![qpow(&r, n - 1)];
            v.extend((1..n).map(|_| r.recip()));
            let t = DominantTorus::new(v).unwrap();
            assert_eq!(t.det(), Q::one());
            assert_eq!(t.dagger(), qpow(&r, 2 * (n - 1)));
            assert!(t_dagger_bounds(&t));
        }
        assert_eq!(DominantTorus::dyadic(&[2, 0, -1]).unwrap().delta_h(), qpow(&qi(2), 2 + 3 + 1));
    }

    #[test]
    fn lemma_trials() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        assert!(sorted_matching_trials(2000, 6, &mut rng).holds());
        assert!(removal_trials(2000, 6, &mut rng).holds());
        assert!(t_dagger_trials(2000, 6, &mut rng).holds());
        assert_eq!(perm_distance(&[0, 1], &[1, 0]), 0);
    }

    #[test]
    fn distance_properties() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2] {
            let rep = distance_trials(n, 200, &mut rng).unwrap();
            assert!(rep.invariance && rep.ad_bound, "{rep:?}");
        }
    }

    #[test]
    fn small_sweep() {
        let spec = SweepSpec { t_exponents: vec![-1, 0, 2], u_exponents: vec![-2, 0, 1], ells: (1..=6).collect(), x_exponents: vec![0, -2], ..SweepSpec::standard() };
        let rep = counting_sweep(&spec).unwrap();
        assert!(rep.all_pass(), "{:?}", (rep.crude_holds, rep.refined_holds, rep.nonempty_constraint, rep.monotone_in_x, rep.symmetric));
        assert!(rep.crude_max_ratio < rep.crude_constant);
    }

    proptest! {
        #[test]
        fn sorted_distance_matches(a in proptest::collection::vec(-30i64..30, 1..6), seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let b: Vec<i64> = a.iter().map(|_| rng.gen_range(-30..30)).collect();
            prop_assert!(perm_distance(&a, &b) == sorted_distance(&a, &b));
        }
    }
}
