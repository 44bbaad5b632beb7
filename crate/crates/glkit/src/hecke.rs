//! Spherical Hecke operators for `GL(m)` over `Q_p`: coset enumeration in
//! Hermite normal form, Satake values, convolution, and the amplifier
//! restriction to an embedded `GL(m-1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::linalg::QMat;
use crate::scalar::{fmt_q, qi, qpow, to_f64, Q};
use crate::AlgebraError;

/// An element `rational + radical·√p` of `Q(√p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    p: u64,
    rational: Q,
    radical: Q,
}

impl Surd {
    pub fn zero(p: u64) -> Self {
        Surd { p, rational: Q::zero(), radical: Q::zero() }
    }

    pub fn from_q(p: u64, c: Q) -> Self {
        Surd { p, rational: c, radical: Q::zero() }
    }

    /// `p^(half_exp/2)`.
    pub fn p_half_pow(p: u64, half_exp: i64) -> Self {
        let pq = qi(p as i64);
        let base = qpow(&pq, half_exp.div_euclid(2));
        if half_exp.rem_euclid(2) == 0 {
            Surd { p, rational: base, radical: Q::zero() }
        } else {
            Surd { p, rational: Q::zero(), radical: base }
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn rational_part(&self) -> &Q {
        &self.rational
    }

    pub fn radical_part(&self) -> &Q {
        &self.radical
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.radical.is_zero()
    }

    pub fn scale(&self, c: &Q) -> Self {
        Surd { p: self.p, rational: &self.rational * c, radical: &self.radical * c }
    }

    pub fn add(&self, other: &Surd) -> Surd {
        debug_assert_eq!(self.p, other.p);
        Surd { p: self.p, rational: &self.rational + &other.rational, radical: &self.radical + &other.radical }
    }

    pub fn mul(&self, other: &Surd) -> Surd {
        debug_assert_eq!(self.p, other.p);
        let pq = qi(self.p as i64);
        Surd {
            p: self.p,
            rational: &self.rational * &other.rational + &self.radical * &other.radical * pq,
            radical: &self.rational * &other.radical + &self.radical * &other.rational,
        }
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.rational) + to_f64(&self.radical) * (self.p as f64).sqrt()
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let root = format!("sqrt({})", self.p);
        match (self.rational.is_zero(), self.radical.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", fmt_q(&self.rational)),
            (true, false) if self.radical.is_one() => write!(f, "{root}"),
            (true, false) => write!(f, "{}*{root}", fmt_q(&self.radical)),
            (false, false) => write!(f, "{} + {}*{root}", fmt_q(&self.rational), fmt_q(&self.radical)),
        }
    }
}

/// `p^(norm_half_exp/2) · 1_{K diag(p^a) K}` on `GL(m, Q_p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeckeOperator {
    pub p: u64,
    pub a: Vec<i64>,
    pub norm_half_exp: i64,
}

impl HeckeOperator {
    pub fn new(p: u64, a: &[i64]) -> Result<Self, AlgebraError> {
        Self::normalized(p, a, 0)
    }

    pub fn normalized(p: u64, a: &[i64], norm_half_exp: i64) -> Result<Self, AlgebraError> {
        if !is_prime(p) {
            return Err(AlgebraError::Precondition(format!("{p} is not prime")));
        }
        if a.is_empty() || a.windows(2).any(|w| w[0] < w[1]) {
            return Err(AlgebraError::Precondition(format!("{a:?} is not dominant")));
        }
        Ok(HeckeOperator { p, a: a.to_vec(), norm_half_exp })
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    /// `T_p[j] = T_p(j,0,…,0)` on `GL(m)`.
    pub fn basic(p: u64, m: usize, j: i64) -> Result<Self, AlgebraError> {
        let mut a = vec![0; m];
        a[0] = j;
        Self::new(p, &a)
    }

    /// `t_{p,j} = p^{-(m-1)j/2} T_p(j,0,…,0)`.
    pub fn amplifier(p: u64, m: usize, j: i64) -> Result<Self, AlgebraError> {
        let mut a = vec![0; m];
        a[0] = j;
        Self::normalized(p, &a, -(m as i64 - 1) * j)
    }

    /// `t_{p,j}^* = p^{-(m-1)j/2} T_p(0,…,0,-j)`.
    pub fn amplifier_adjoint(p: u64, m: usize, j: i64) -> Result<Self, AlgebraError> {
        let mut a = vec![0; m];
        a[m - 1] = -j;
        Self::normalized(p, &a, -(m as i64 - 1) * j)
    }

    /// `p^{-(m-1)j} T_p(j,0,…,0,-j)`, the coincident-prime amplifier.
    pub fn amplifier_coincident(p: u64, m: usize, j: i64) -> Result<Self, AlgebraError> {
        let mut a = vec![0; m];
        a[0] += j;
        a[m - 1] -= j;
        a.sort_unstable_by(|x, y| y.cmp(x));
        Self::normalized(p, &a, -2 * (m as i64 - 1) * j)
    }

    fn central_shift(&self) -> i64 {
        *self.a.last().unwrap()
    }

    fn shifted(&self) -> Vec<u32> {
        let c = self.central_shift();
        self.a.iter().map(|&x| (x - c) as u32).collect()
    }
}

/// Upper-triangular integral coset representative `g` of `g·GL(m, Z_p)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coset {
    pub diag: Vec<u32>,
    pub entries: Vec<Vec<BigInt>>,
}

impl Coset {
    pub fn to_qmat(&self) -> QMat {
        QMat::from_rows(self.entries.iter().map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect()).collect())
    }
}

/// Hermite-form representatives of `K diag(p^a) K / K`, after removing the
/// central shift `p^{a_m}`.
#[derive(Clone, Debug)]
pub struct CosetList {
    pub p: u64,
    pub a: Vec<i64>,
    pub central_shift: i64,
    pub reps: Vec<Coset>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Primes up to `bound`.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&p| is_prime(p)).collect()
}

fn valuation_int(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    while (&y % &pb).is_zero() {
        y /= &pb;
        v += 1;
    }
    Some(v)
}

/// `v_p(x)` for nonzero rational `x`.
pub fn valuation(x: &Q, p: u64) -> Option<i64> {
    let num = valuation_int(x.numer(), p)? as i64;
    let den = valuation_int(x.denom(), p).unwrap_or(0) as i64;
    Some(num - den)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Elementary-divisor exponents of a nonsingular matrix over `Z_(p)`,
/// returned in decreasing order.
pub fn smith_type(g: &QMat, p: u64) -> Result<Vec<i64>, AlgebraError> {
    let m = g.rows();
    let mut prefix = vec![0i64; m + 1];
    for k in 1..=m {
        let mut best: Option<i64> = None;
        for rows in subsets(m, k) {
            for cols in subsets(m, k) {
                let minor = QMat::from_rows(rows.iter().map(|&i| cols.iter().map(|&j| g.row(i)[j].clone()).collect()).collect());
                if let Some(v) = valuation(&minor.det(), p) {
                    best = Some(best.map_or(v, |b| b.min(v)));
                }
            }
        }
        prefix[k] = best.ok_or_else(|| AlgebraError::Singular("all minors vanish".into()))?;
    }
    let mut ty: Vec<i64> = (1..=m).map(|k| prefix[k] - prefix[k - 1]).collect();
    ty.sort_unstable_by(|x, y| y.cmp(x));
    Ok(ty)
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|first| {
            compositions(total - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Exhaustive Hermite-normal-form enumeration of `K diag(p^a) K / K`,
/// filtered by Smith type.
pub fn coset_reps(p: u64, a: &[i64]) -> Result<CosetList, AlgebraError> {
    let op = HeckeOperator::new(p, a)?;
    let shifted = op.shifted();
    let target: Vec<i64> = shifted.iter().map(|&x| x as i64).collect();
    let m = a.len();
    let total: u32 = shifted.iter().sum();
    let mut reps = Vec::new();
    for diag in compositions(total, m) {
        let slots: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
        let moduli: Vec<u64> = slots.iter().map(|&(i, _)| p.pow(diag[i])).collect();
        let mut idx = vec![0u64; slots.len()];
        loop {
            let mut entries = vec![vec![BigInt::zero(); m]; m];
            for i in 0..m {
                entries[i][i] = BigInt::from(p).pow(diag[i]);
            }
            for (s, &(i, j)) in slots.iter().enumerate() {
                entries[i][j] = BigInt::from(idx[s]);
            }
            let coset = Coset { diag: diag.clone(), entries };
            if smith_type(&coset.to_qmat(), p)? == target {
                reps.push(coset);
            }
            let mut s = 0;
            while s < slots.len() {
                idx[s] += 1;
                if idx[s] < moduli[s] {
                    break;
                }
                idx[s] = 0;
                s += 1;
            }
            if s == slots.len() {
                break;
            }
        }
    }
    Ok(CosetList { p, a: a.to_vec(), central_shift: op.central_shift(), reps })
}

/// Number of representatives per Hermite diagonal. Ranks two and three are
/// counted by valuation strata; higher rank enumerates.
pub fn diagonal_counts(p: u64, a: &[i64]) -> Result<BTreeMap<Vec<u32>, Q>, AlgebraError> {
    let op = HeckeOperator::new(p, a)?;
    let shifted = op.shifted();
    let mut out = BTreeMap::new();
    match shifted.len() {
        1 => {
            out.insert(shifted.clone(), Q::one());
        }
        2 => {
            let low = shifted[1];
            let pq = qi(p as i64);
            for d0 in 0..=shifted[0] + low {
                let d1 = shifted[0] + low - d0;
                let floor = d0.min(d1);
                let count = if floor < low {
                    continue;
                } else if floor == low {
                    qpow(&pq, (d0 - low) as i64)
                } else {
                    qpow(&pq, (d0 - low) as i64) - qpow(&pq, (d0 - low) as i64 - 1)
                };
                out.insert(vec![d0, d1], count);
            }
        }
        3 => {
            let total: u32 = shifted.iter().sum();
            let target: Vec<i64> = shifted.iter().map(|&x| x as i64).collect();
            for diag in compositions(total, 3) {
                let count = rank_three_count(p, &diag, &target);
                if !count.is_zero() {
                    out.insert(diag, count);
                }
            }
        }
        _ => {
            for rep in coset_reps(p, a)?.reps {
                *out.entry(rep.diag).or_insert_with(Q::zero) += Q::one();
            }
        }
    }
    Ok(out)
}

const INF: i64 = i64::MAX / 4;

/// `(valuation, count)` for residues mod `p^r`; `INF` marks zero.
fn strata(p: u64, r: u32) -> Vec<(i64, Q)> {
    let pq = qi(p as i64);
    let mut out: Vec<(i64, Q)> = (0..r).map(|k| (k as i64, qpow(&pq, (r - k) as i64) - qpow(&pq, (r - k) as i64 - 1))).collect();
    out.push((INF, Q::one()));
    out
}

/// Hermite representatives of rank three with diagonal `p^d` and Smith type
/// `target`, counted over valuation strata of `x = g_12`, `y = g_13`,
/// `z = g_23`. Only `v(x)`, `v(y)`, `v(z)` and `v(xz − p^{d_2} y)` enter the
/// minors.
fn rank_three_count(p: u64, d: &[u32], target: &[i64]) -> Q {
    let pq = qi(p as i64);
    let (d0, d1, d2) = (d[0] as i64, d[1] as i64, d[2] as i64);
    let mut total = Q::zero();
    for (vx, cx) in strata(p, d[0]) {
        for (vz, cz) in strata(p, d[1]) {
            let u = if vx >= INF || vz >= INF { INF } else { vx + vz };
            for (vy, cy) in strata(p, d[0]) {
                let t = if vy >= INF { INF } else { d1 + vy };
                let cross: Vec<(i64, Q)> = if u != t || u >= INF {
                    vec![(u.min(t), cy.clone())]
                } else {
                    let r = d0 - vy;
                    let mut dist = vec![(u, qpow(&pq, r - 1) * qi(p as i64 - 2))];
                    dist.extend((1..r).map(|k| (u + k, qpow(&pq, r - k) - qpow(&pq, r - k - 1))));
                    dist.push((INF, Q::one()));
                    dist
                };
                let e1 = [d0, d1, d2, vx, vy, vz].into_iter().min().unwrap();
                for (vw, cw) in cross {
                    let e2 = [d0 + d1, d0 + vz.min(INF - d0), vw, d0 + d2, vx.min(INF - d2) + d2, d1 + d2].into_iter().min().unwrap();
                    let mut ty = vec![e1, e2 - e1, d0 + d1 + d2 - e2];
                    ty.sort_unstable_by(|x, y| y.cmp(x));
                    if ty == target {
                        total += &cx * &cz * cw;
                    }
                }
            }
        }
    }
    total
}

/// `deg T_p(a) = p^{Σ_{i<j}(a_i−a_j)} [m]_t! / ∏ [m_k]_t!` at `t = 1/p`.
pub fn flag_count(p: u64, a: &[i64]) -> Q {
    let t = Q::one() / qi(p as i64);
    let factorial = |k: usize| -> Q {
        (1..=k).fold(Q::one(), |acc, i| acc * (Q::one() - qpow(&t, i as i64)) / (Q::one() - &t))
    };
    let m = a.len();
    let spread: i64 = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).map(|(i, j)| a[i] - a[j]).sum();
    let mut blocks = BTreeMap::new();
    for &x in a {
        *blocks.entry(x).or_insert(0usize) += 1;
    }
    let denom = blocks.values().fold(Q::one(), |acc, &k| acc * factorial(k));
    qpow(&qi(p as i64), spread) * factorial(m) / denom
}

fn half_modulus_exp(diag: &[u32]) -> i64 {
    let m = diag.len() as i64;
    -diag.iter().enumerate().map(|(i, &d)| (m - 1 - 2 * i as i64) * d as i64).sum::<i64>()
}

/// Exact `λ_s(T)` for integral `s`, in `Q(√p)`.
pub fn satake_value(op: &HeckeOperator, s: &[i64]) -> Result<Surd, AlgebraError> {
    if s.len() != op.rank() {
        return Err(AlgebraError::Precondition("parameter length differs from rank".into()));
    }
    let c = op.central_shift();
    let central = c * s.iter().sum::<i64>();
    let mut total = Surd::zero(op.p);
    for (diag, count) in diagonal_counts(op.p, &op.a)? {
        let twist: i64 = diag.iter().zip(s).map(|(&d, &x)| d as i64 * x).sum();
        let half = half_modulus_exp(&diag) - 2 * (twist + central) + op.norm_half_exp;
        total = total.add(&Surd::p_half_pow(op.p, half).scale(&count));
    }
    Ok(total)
}

/// `λ_0(T)`.
pub fn satake_trivial(op: &HeckeOperator) -> Result<Surd, AlgebraError> {
    satake_value(op, &vec![0; op.rank()])
}

/// `λ_s(T)` at complex `s`.
pub fn satake_numeric(op: &HeckeOperator, s: &[Complex64]) -> Result<Complex64, AlgebraError> {
    if s.len() != op.rank() {
        return Err(AlgebraError::Precondition("parameter length differs from rank".into()));
    }
    let lp = (op.p as f64).ln();
    let c = op.central_shift() as f64;
    let central: Complex64 = s.iter().sum::<Complex64>() * c;
    let mut total = Complex64::zero();
    for (diag, count) in diagonal_counts(op.p, &op.a)? {
        let twist: Complex64 = diag.iter().zip(s).map(|(&d, x)| x * d as f64).sum();
        let half = (half_modulus_exp(&diag) + op.norm_half_exp) as f64 / 2.0;
        total += (Complex64::new(half * lp, 0.0) - (twist + central) * lp).exp() * to_f64(&count);
    }
    Ok(total)
}

/// A finite rational combination of Hecke operators at one prime.
#[derive(Clone, Debug)]
pub struct HeckeElement {
    pub terms: Vec<(Q, HeckeOperator)>,
}

impl HeckeElement {
    pub fn single(op: HeckeOperator) -> Self {
        HeckeElement { terms: vec![(Q::one(), op)] }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.iter().all(|(c, _)| !c.is_negative())
    }

    pub fn satake_trivial(&self) -> Result<f64, AlgebraError> {
        self.terms.iter().try_fold(0.0, |acc, (c, op)| Ok(acc + to_f64(c) * satake_trivial(op)?.to_f64()))
    }

    pub fn satake_numeric(&self, s: &[Complex64]) -> Result<Complex64, AlgebraError> {
        self.terms.iter().try_fold(Complex64::zero(), |acc, (c, op)| Ok(acc + satake_numeric(op, s)? * to_f64(c)))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TemperedCheck {
    pub samples: usize,
    pub lambda0: f64,
    pub max_abs: f64,
    pub holds: bool,
}

/// `|λ_s(t)| ≤ λ_0(t)` at unitary `s = iθ`.
pub fn tempered_inequality_check(t: &HeckeElement, thetas: &[Vec<f64>], tol: f64) -> Result<TemperedCheck, AlgebraError> {
    let lambda0 = t.satake_trivial()?;
    let mut max_abs = 0.0f64;
    for theta in thetas {
        let s: Vec<Complex64> = theta.iter().map(|&x| Complex64::new(0.0, x)).collect();
        max_abs = max_abs.max(t.satake_numeric(&s)?.norm());
    }
    Ok(TemperedCheck { samples: thetas.len(), lambda0, max_abs, holds: max_abs <= lambda0 + tol })
}

/// `T(1,0) − 3·T(0,0)` at `p = 2` and `s = (iπ/ln 2, 0)`: a signed element
/// for which the tempered inequality fails.
pub fn tempered_negative_control() -> Result<TemperedCheck, AlgebraError> {
    let p = 2;
    let t = HeckeElement {
        terms: vec![(Q::one(), HeckeOperator::new(p, &[1, 0])?), (qi(-3), HeckeOperator::new(p, &[0, 0])?)],
    };
    let theta = vec![std::f64::consts::PI / (p as f64).ln(), 0.0];
    tempered_inequality_check(&t, &[theta], 1e-9)
}

fn residue(x: &Q, p: u64, d: u32) -> BigInt {
    let modulus = BigInt::from(p).pow(d);
    let num = x.numer().mod_floor(&modulus);
    let den = x.denom().mod_floor(&modulus);
    let phi = BigInt::from(p).pow(d.saturating_sub(1)) * BigInt::from(p - 1);
    let inv = den.modpow(&(phi - 1u32), &modulus);
    (num * inv).mod_floor(&modulus)
}

/// Canonical Hermite representative of `g·GL(m, Z_p)` for `g` with entries
/// in `Z_(p)`.
pub fn canonical_coset(g: &QMat, p: u64) -> Result<Coset, AlgebraError> {
    let m = g.rows();
    let mut a: Vec<Vec<Q>> = (0..m).map(|i| g.row(i).to_vec()).collect();
    let mut diag = vec![0u32; m];
    for i in (0..m).rev() {
        let pivot = (0..=i)
            .filter_map(|c| valuation(&a[i][c], p).map(|v| (v, c)))
            .min()
            .ok_or_else(|| AlgebraError::Singular("row has no pivot".into()))?;
        let (v, c) = pivot;
        if v < 0 {
            return Err(AlgebraError::Precondition("matrix is not p-integral".into()));
        }
        for row in a.iter_mut() {
            row.swap(c, i);
        }
        let unit = &a[i][i] / qpow(&qi(p as i64), v);
        for row in a.iter_mut() {
            row[i] = &row[i] / &unit;
        }
        for col in 0..i {
            let factor = &a[i][col] / &a[i][i];
            if factor.is_zero() {
                continue;
            }
            for row in a.iter_mut() {
                let delta = &factor * &row[i];
                row[col] -= delta;
            }
        }
        diag[i] = v as u32;
    }
    for j in 1..m {
        for i in (0..j).rev() {
            let modulus = qpow(&qi(p as i64), diag[i] as i64);
            let rep = Q::from_integer(residue(&a[i][j], p, diag[i]));
            let k = (&a[i][j] - &rep) / &modulus;
            if k.is_zero() {
                continue;
            }
            for row in a.iter_mut() {
                let delta = &k * &row[i];
                row[j] -= delta;
            }
        }
    }
    let entries = a
        .iter()
        .map(|row| row.iter().map(|x| if x.is_integer() { Ok(x.to_integer()) } else { Err(AlgebraError::NotPolynomial("non-integral reduction".into())) }).collect())
        .collect::<Result<_, _>>()?;
    Ok(Coset { diag, entries })
}

/// Structure constants `n_c` in `T_p(a)·T_p(b) = Σ n_c T_p(c)`, computed by
/// multiplying coset lists. Fails if a double coset is hit unevenly.
pub fn convolve(p: u64, a: &[i64], b: &[i64]) -> Result<BTreeMap<Vec<i64>, u64>, AlgebraError> {
    if a.len() != b.len() {
        return Err(AlgebraError::Precondition("rank mismatch".into()));
    }
    let left = coset_reps(p, a)?;
    let right = coset_reps(p, b)?;
    let shift = left.central_shift + right.central_shift;
    let mut hits: BTreeMap<Coset, u64> = BTreeMap::new();
    for g in &left.reps {
        let gm = g.to_qmat();
        for h in &right.reps {
            *hits.entry(canonical_coset(&(&gm * &h.to_qmat()), p)?).or_insert(0) += 1;
        }
    }
    let mut by_type: BTreeMap<Vec<i64>, (u64, usize)> = BTreeMap::new();
    for (coset, mult) in &hits {
        let ty: Vec<i64> = smith_type(&coset.to_qmat(), p)?.into_iter().map(|x| x + shift).collect();
        let slot = by_type.entry(ty.clone()).or_insert((*mult, 0));
        if slot.0 != *mult {
            return Err(AlgebraError::Precondition(format!("uneven multiplicity on {ty:?}")));
        }
        slot.1 += 1;
    }
    let mut out = BTreeMap::new();
    for (ty, (mult, distinct)) in by_type {
        if Q::from_integer(BigInt::from(distinct)) != flag_count(p, &ty) {
            return Err(AlgebraError::Precondition(format!("double coset {ty:?} only partially covered")));
        }
        out.insert(ty, mult);
    }
    Ok(out)
}

/// `λ_s(T_a ∗ T_b) = λ_s(T_a)λ_s(T_b)` exactly at every integral `s` given.
pub fn homomorphism_check(p: u64, a: &[i64], b: &[i64], params: &[Vec<i64>]) -> Result<bool, AlgebraError> {
    let constants = convolve(p, a, b)?;
    let ta = HeckeOperator::new(p, a)?;
    let tb = HeckeOperator::new(p, b)?;
    for s in params {
        let expected = satake_value(&ta, s)?.mul(&satake_value(&tb, s)?);
        let mut got = Surd::zero(p);
        for (c, n) in &constants {
            got = got.add(&satake_value(&HeckeOperator::new(p, c)?, s)?.scale(&qi(*n as i64)));
        }
        if got != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Enumerated coset count equals the flag-count formula, and every
/// representative has determinant valuation `Σ a`.
pub fn coset_count_check(p: u64, a: &[i64]) -> Result<bool, AlgebraError> {
    let list = coset_reps(p, a)?;
    let count = Q::from_integer(BigInt::from(list.reps.len()));
    let det_ok = list.reps.iter().all(|r| {
        let v = valuation(&r.to_qmat().det(), p).unwrap_or(-1) + list.central_shift * a.len() as i64;
        v == a.iter().sum::<i64>()
    });
    let strata_ok = diagonal_counts(p, a)?.values().fold(Q::zero(), |acc, c| acc + c) == count;
    Ok(count == flag_count(p, a) && det_ok && strata_ok)
}

/// Group pairs `(G, H)` with `H = GL(m-1)` embedded as `diag(h, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Pair {
    #[serde(rename = "gl2-gl1")]
    Gl2Gl1,
    #[serde(rename = "gl3-gl2")]
    Gl3Gl2,
}

impl Pair {
    pub fn rank(self) -> usize {
        match self {
            Pair::Gl2Gl1 => 2,
            Pair::Gl3Gl2 => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Pair::Gl2Gl1 => "gl2-gl1",
            Pair::Gl3Gl2 => "gl3-gl2",
        }
    }
}

impl FromStr for Pair {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gl2-gl1" => Ok(Pair::Gl2Gl1),
            "gl3-gl2" => Ok(Pair::Gl3Gl2),
            other => Err(AlgebraError::Precondition(format!("unsupported pair {other}"))),
        }
    }
}

/// Dominant `b` for `H = GL(m-1)` with multiplicity `#{k : p^k diag(p^b, 1) ∈ K p^a K}`.
pub fn restricted_support(a: &[i64]) -> BTreeMap<Vec<i64>, u64> {
    let mut out = BTreeMap::new();
    let mut seen = Vec::new();
    for (idx, &k) in a.iter().enumerate() {
        if seen.contains(&k) {
            continue;
        }
        seen.push(k);
        let mut rest: Vec<i64> = a.iter().enumerate().filter(|&(i, _)| i != idx).map(|(_, &x)| x - k).collect();
        rest.sort_unstable_by(|x, y| y.cmp(x));
        *out.entry(rest).or_insert(0) += 1;
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct MainTerm {
    pub p: u64,
    pub j: i64,
    pub pair: Pair,
    pub coincident: bool,
    pub value: String,
    pub value_f64: f64,
    pub ratio: f64,
}

/// `λ_0^H(t_p)` for the restriction to `H` of the central average of the
/// amplifier at `p`, with its ratio to `p^{-j/2}` (or `p^{-j}` when both
/// amplifier primes coincide).
pub fn restricted_main_term(p: u64, j: i64, pair: Pair, coincident: bool) -> Result<MainTerm, AlgebraError> {
    if j < 0 {
        return Err(AlgebraError::Precondition("j must be nonnegative".into()));
    }
    let m = pair.rank();
    let op = if coincident { HeckeOperator::amplifier_coincident(p, m, j)? } else { HeckeOperator::amplifier(p, m, j)? };
    let mut value = Surd::zero(p);
    for (b, mult) in restricted_support(&op.a) {
        let restricted = HeckeOperator::normalized(p, &b, op.norm_half_exp)?;
        value = value.add(&satake_trivial(&restricted)?.scale(&qi(mult as i64)));
    }
    let scale = if coincident { (p as f64).powi(-j as i32) } else { (p as f64).powf(-(j as f64) / 2.0) };
    let value_f64 = value.to_f64();
    Ok(MainTerm { p, j, pair, coincident, value: value.to_string(), value_f64, ratio: value_f64 / scale })
}

#[derive(Clone, Debug, Serialize)]
pub struct MainTermSweep {
    pub pair: Pair,
    pub j: i64,
    pub coincident: bool,
    pub rows: Vec<MainTerm>,
    pub max_ratio: f64,
}

/// Restricted main term for every prime up to `bound`.
pub fn main_term_sweep(bound: u64, j: i64, pair: Pair, coincident: bool) -> Result<MainTermSweep, AlgebraError> {
    let rows = primes_up_to(bound).into_iter().map(|p| restricted_main_term(p, j, pair, coincident)).collect::<Result<Vec<_>, _>>()?;
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(MainTermSweep { pair, j, coincident, rows, max_ratio })
}

#[derive(Clone, Debug, Serialize)]
pub struct HeckeSummary {
    pub p: u64,
    pub j: i64,
    pub pair: Pair,
    pub basic_value: String,
    pub basic_exact: bool,
    pub amplifier_value: String,
    pub identity_trivial: bool,
    pub coset_counts: bool,
    pub homomorphism: bool,
    pub tempered: TemperedCheck,
    pub negative_control: TemperedCheck,
    pub sweep: MainTermSweep,
    pub coincident_sweep: MainTermSweep,
}

impl HeckeSummary {
    pub fn all_pass(&self) -> bool {
        self.basic_exact
            && self.identity_trivial
            && self.coset_counts
            && self.homomorphism
            && self.tempered.holds
            && !self.negative_control.holds
            && self.sweep.max_ratio.is_finite()
            && self.coincident_sweep.max_ratio.is_finite()
    }
}

/// Every Hecke check at prime `p`, with main-term sweeps over primes up to
/// `bound`.
pub fn hecke_summary(p: u64, j: i64, pair: Pair, bound: u64, rng: &mut impl rand::Rng) -> Result<HeckeSummary, AlgebraError> {
    let basic = satake_trivial(&HeckeOperator::basic(p, 2, 1)?)?;
    let two_root_p = Surd::p_half_pow(p, 1).scale(&qi(2));
    let amplifier = satake_trivial(&HeckeOperator::amplifier(p, 2, 1)?)?;
    let identity_trivial = satake_value(&HeckeOperator::new(p, &[0, 0])?, &[3, -1])? == Surd::from_q(p, Q::one());
    let small = if p <= 3 { p } else { 2 };
    let shapes: [&[i64]; 7] = [&[1, 0], &[2, 0], &[1, 1], &[1, 0, 0], &[1, 1, 0], &[2, 1, 0], &[3, 0, 0]];
    let coset_counts = shapes.iter().try_fold(true, |acc, a| Ok::<_, AlgebraError>(acc && coset_count_check(small, a)?))?;
    let params = vec![vec![0, 0], vec![1, -2], vec![-1, 3]];
    let params3 = vec![vec![0, 0, 0], vec![1, 0, -1], vec![2, -1, 0]];
    let homomorphism = homomorphism_check(small, &[1, 0], &[1, 0], &params)?
        && homomorphism_check(small, &[2, 0], &[1, 0], &params)?
        && homomorphism_check(small, &[1, 0, 0], &[1, 1, 0], &params3)?
        && homomorphism_check(small, &[1, 0, 0], &[1, 0, 0], &params3)?;
    let m = pair.rank();
    let t = HeckeElement {
        terms: vec![(Q::one(), HeckeOperator::amplifier(p, m, j)?), (q_half(), HeckeOperator::amplifier_adjoint(p, m, j)?)],
    };
    let bound_theta = std::f64::consts::TAU / (p as f64).ln();
    let thetas: Vec<Vec<f64>> = (0..100).map(|_| (0..m).map(|_| rng.gen_range(0.0..bound_theta)).collect()).collect();
    Ok(HeckeSummary {
        p,
        j,
        pair,
        basic_value: basic.to_string(),
        basic_exact: basic == two_root_p,
        amplifier_value: amplifier.to_string(),
        identity_trivial,
        coset_counts,
        homomorphism,
        tempered: tempered_inequality_check(&t, &thetas, 1e-9)?,
        negative_control: tempered_negative_control()?,
        sweep: main_term_sweep(bound, j, pair, false)?,
        coincident_sweep: main_term_sweep(bound, j, pair, true)?,
    })
}

fn q_half() -> Q {
    Q::new(BigInt::one(), BigInt::from(2))
}

/// Exact `λ_0` of `T_p(a)` for a small prime, as a float; used for tables.
pub fn satake_trivial_f64(p: u64, a: &[i64]) -> Result<f64, AlgebraError> {
    Ok(satake_trivial(&HeckeOperator::new(p, a)?)?.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn gl2_cosets() {
        for p in [2u64, 3, 5] {
            let list = coset_reps(p, &[1, 0]).unwrap();
            assert_eq!(list.reps.len() as u64, p + 1);
            assert_eq!(list.reps.iter().filter(|r| r.diag == vec![1, 0]).count() as u64, p);
        }
        assert_eq!(coset_reps(3, &[0, 0]).unwrap().reps.len(), 1);
        let central = coset_reps(3, &[1, 1]).unwrap();
        assert_eq!(central.reps.len(), 1);
        assert_eq!(central.central_shift, 1);
    }

    #[test]
    fn basic_satake_values() {
        for p in [2u64, 3, 5] {
            let v = satake_trivial(&HeckeOperator::basic(p, 2, 1).unwrap()).unwrap();
            assert_eq!(v, Surd::p_half_pow(p, 1).scale(&qi(2)));
            let t = satake_trivial(&HeckeOperator::amplifier(p, 2, 1).unwrap()).unwrap();
            assert_eq!(t, Surd::from_q(p, qi(2)));
        }
        assert_eq!(satake_trivial(&HeckeOperator::basic(7, 2, 1).unwrap()).unwrap().to_string(), "2*sqrt(7)");
    }

    #[test]
    fn flag_counts_match_enumeration() {
        for a in [&[1i64, 0][..], &[2, 0], &[2, 1, 0], &[1, 1, 0], &[3, 0, 0], &[1, 0, 0]] {
            assert!(coset_count_check(2, a).unwrap(), "{a:?}");
        }
        assert!(coset_count_check(3, &[1, 0, 0]).unwrap());
        assert_eq!(flag_count(5, &[1, 0, 0]), qi(31));
    }

    #[test]
    fn stratified_counts_match_enumeration() {
        for p in [2u64, 3] {
            for a in [&[3i64, 0][..], &[2, 1], &[4, 1], &[2, 1, 0], &[2, 2, 0], &[3, 1, 0], &[2, 0, 0], &[1, 1, -1]] {
                let mut brute = BTreeMap::new();
                for r in coset_reps(p, a).unwrap().reps {
                    *brute.entry(r.diag).or_insert_with(Q::zero) += Q::one();
                }
                assert_eq!(brute, diagonal_counts(p, a).unwrap(), "{a:?}");
            }
        }
    }

    #[test]
    fn canonical_reduction_is_stable() {
        for r in coset_reps(3, &[2, 1, 0]).unwrap().reps {
            assert_eq!(canonical_coset(&r.to_qmat(), 3).unwrap(), r);
        }
        let g = QMat::from_i64(&[&[0, 2], &[1, 0]]);
        let c = canonical_coset(&g, 2).unwrap();
        assert_eq!(c.diag, vec![1, 0]);
    }

    #[test]
    fn hecke_multiplication() {
        let t = convolve(2, &[1, 0], &[1, 0]).unwrap();
        assert_eq!(t.get(&vec![2, 0]), Some(&1));
        assert_eq!(t.get(&vec![1, 1]), Some(&3));
        assert!(homomorphism_check(3, &[1, 0], &[1, 0], &[vec![0, 0], vec![2, -1]]).unwrap());
        assert!(homomorphism_check(2, &[1, 0, 0], &[0, 0, -1], &[vec![0, 0, 0], vec![1, 2, 3]]).unwrap());
    }

    #[test]
    fn tempered_inequality() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let t = HeckeElement::single(HeckeOperator::basic(3, 2, 1).unwrap());
        let thetas: Vec<Vec<f64>> = (0..100).map(|_| vec![rng.gen_range(0.0..6.0), rng.gen_range(0.0..6.0)]).collect();
        assert!(tempered_inequality_check(&t, &thetas, 1e-9).unwrap().holds);
        let at_zero = tempered_inequality_check(&t, &[vec![0.0, 0.0]], 0.0).unwrap();
        assert!((at_zero.max_abs - at_zero.lambda0).abs() < 1e-12);
        let control = tempered_negative_control().unwrap();
        assert!(t.is_nonnegative());
        assert!(!control.holds);
    }

    #[test]
    fn main_term_gl2_gl1() {
        for j in [1, 2] {
            let sweep = main_term_sweep(50, j, Pair::Gl2Gl1, false).unwrap();
            assert!(sweep.rows.iter().all(|r| (r.ratio - 2.0).abs() < 1e-12));
            let c = main_term_sweep(50, j, Pair::Gl2Gl1, true).unwrap();
            assert!(c.rows.iter().all(|r| (r.ratio - 2.0).abs() < 1e-12));
        }
        assert_eq!(restricted_main_term(7, 0, Pair::Gl2Gl1, false).unwrap().value, "1");
        assert!("gl4-gl3".parse::<Pair>().is_err());
    }

    #[test]
    fn main_term_gl3_gl2() {
        for j in [1, 2] {
            let sweep = main_term_sweep(50, j, Pair::Gl3Gl2, false).unwrap();
            assert!(sweep.max_ratio < 2.0 * (j as f64 + 1.0) + 1.0, "{}", sweep.max_ratio);
        }
        assert_eq!(restricted_support(&[1, 0, 0]), BTreeMap::from([(vec![1, 0], 1), (vec![-1, -1], 1)]));
    }

    proptest! {
        #[test]
        fn satake_is_central_equivariant(a0 in 0i64..3, a1 in 0i64..3, c in -2i64..3, s0 in -2i64..3, s1 in -2i64..3) {
            let (hi, lo) = (a0.max(a1), a0.min(a1));
            let base = satake_value(&HeckeOperator::new(3, &[hi, lo]).unwrap(), &[s0, s1]).unwrap();
            let shifted = satake_value(&HeckeOperator::new(3, &[hi + c, lo + c]).unwrap(), &[s0, s1]).unwrap();
            prop_assert_eq!(shifted, base.mul(&Surd::p_half_pow(3, -2 * c * (s0 + s1))));
        }
    }
}
