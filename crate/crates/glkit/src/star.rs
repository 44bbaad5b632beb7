//! Star product on polynomial symbols, built from the Baker-Campbell-Hausdorff
//! series, together with the support and invariance lemmas it satisfies.
//!
//! Symbols live in the symmetric ring of a [`Gl`]: the coordinate `e[i][j]` is
//! the linear function `ζ ↦ ⟨E_ij, ζ⟩`. Under the trace pairing a matrix `W`
//! has coordinates `e[i][j](W) = W[j][i]`.

use crate::capelli::restrict_to_diagonal;
use crate::enveloping::{hc_project, sym_inverse, symmetrize, Gl, Ue};
use crate::linalg::{resultant, QMat};
use crate::poly::{CommPoly, Exps, PolyRing};
use crate::scalar::{fmt_q, q, qi, GaussQ, Q};
use crate::AlgebraError;
use num_traits::{One, Zero};
use rand::Rng;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// Square matrix with polynomial entries.
pub type PolyMat = Vec<Vec<CommPoly>>;

/// `p ↦ sym(p_ℏ)`, where `p_ℏ` multiplies the degree-`k` part in the `e` variables by `hbar^k`.
pub fn opp(gl: &Arc<Gl>, p: &CommPoly) -> Ue {
    let h = gl.sym_ring().idx("hbar");
    let d = gl.dim();
    let rescaled = CommPoly::from_terms(
        gl.sym_ring(),
        p.terms().iter().map(|(e, c)| {
            let mut e2 = e.clone();
            e2[h] += e[..d].iter().sum::<i16>();
            (e2, c.clone())
        }),
    );
    symmetrize(gl, &rescaled).expect("symmetric ring")
}

fn mat_identity(ring: &Arc<PolyRing>, n: usize) -> PolyMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { CommPoly::one(ring) } else { CommPoly::zero(ring) }).collect()).collect()
}

fn mat_zero(ring: &Arc<PolyRing>, n: usize) -> PolyMat {
    vec![vec![CommPoly::zero(ring); n]; n]
}

fn mat_add(a: &PolyMat, b: &PolyMat, scale: &Q) -> PolyMat {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + &y.scale(scale)).collect()).collect()
}

fn mat_mul(a: &PolyMat, b: &PolyMat, weights: &[i32], max: i32) -> PolyMat {
    let n = a.len();
    let ring = a[0][0].ring().clone();
    let mut out = mat_zero(&ring, n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] = &out[i][j] + &a[i][k].mul_truncated(&b[k][j], weights, max);
                }
            }
        }
    }
    out
}

fn mat_is_zero(m: &PolyMat) -> bool {
    m.iter().all(|r| r.iter().all(CommPoly::is_zero))
}

fn exp_truncated(x: &PolyMat, weights: &[i32], max: i32) -> PolyMat {
    let ring = x[0][0].ring().clone();
    let n = x.len();
    let mut out = mat_identity(&ring, n);
    let mut term = out.clone();
    for k in 1..=max.max(0) as i64 {
        term = mat_mul(&term, x, weights, max);
        term = mat_add(&mat_zero(&ring, n), &term, &q(1, k));
        if mat_is_zero(&term) {
            break;
        }
        out = mat_add(&out, &term, &Q::one());
    }
    out
}

fn log_truncated(m: &PolyMat, weights: &[i32], max: i32) -> PolyMat {
    let ring = m[0][0].ring().clone();
    let n = m.len();
    let d = mat_add(m, &mat_identity(&ring, n), &-Q::one());
    let mut out = mat_zero(&ring, n);
    let mut power = mat_identity(&ring, n);
    for k in 1..=max.max(0) as i64 {
        power = mat_mul(&power, &d, weights, max);
        if mat_is_zero(&power) {
            break;
        }
        let sign = if k % 2 == 1 { 1 } else { -1 };
        out = mat_add(&out, &power, &q(sign, k));
    }
    out
}

/// `log(exp x · exp y) − x − y`, truncated at weighted degree `max`.
pub fn bch_bracket(x: &PolyMat, y: &PolyMat, weights: &[i32], max: i32) -> PolyMat {
    let prod = mat_mul(&exp_truncated(x, weights, max), &exp_truncated(y, weights, max), weights, max);
    let log = log_truncated(&prod, weights, max);
    mat_add(&mat_add(&log, x, &-Q::one()), y, &-Q::one())
}

fn exp_poly_truncated(p: &CommPoly, weights: &[i32], max: i32) -> CommPoly {
    let mut out = CommPoly::one(p.ring());
    let mut term = out.clone();
    for m in 1..=max.max(0) as i64 + 1 {
        term = term.mul_truncated(p, weights, max).scale(&q(1, m));
        if term.is_zero() {
            break;
        }
        out = &out + &term;
    }
    out
}

/// The bracket part `{x, y}` of the BCH series for `gl(n)`, in matrix form.
#[derive(Clone, Debug)]
pub struct BchSeries {
    n: usize,
    order: usize,
    ring: Arc<PolyRing>,
    bracket: PolyMat,
}

impl BchSeries {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coordinates `x[i][j]` then `y[i][j]`, row-major.
    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn bracket(&self) -> &PolyMat {
        &self.bracket
    }

    /// Homogeneous degree-`d` part of `{x, y}`.
    pub fn degree_part(&self, d: i32) -> PolyMat {
        let mask = vec![true; self.ring.len()];
        self.bracket.iter().map(|r| r.iter().map(|p| p.homogeneous_part(&mask, d)).collect()).collect()
    }

    /// Generic matrices `x` and `y` over [`Self::ring`].
    pub fn generic_pair(&self) -> (PolyMat, PolyMat) {
        let n = self.n;
        let m = |off: usize| -> PolyMat {
            (0..n).map(|i| (0..n).map(|j| CommPoly::var(&self.ring, off + i * n + j)).collect()).collect()
        };
        (m(0), m(n * n))
    }
}

/// BCH bracket series of `gl(n)` exact through total degree `order`.
pub fn bch_bracket_series(n: usize, order: usize) -> Result<BchSeries, AlgebraError> {
    if order < 2 {
        return Err(AlgebraError::Precondition(format!("BCH order {order} < 2")));
    }
    let names: Vec<String> = ["x", "y"]
        .iter()
        .flat_map(|s| (0..n).flat_map(move |i| (0..n).map(move |j| format!("{s}[{}][{}]", i + 1, j + 1))))
        .collect();
    let ring = PolyRing::new(names);
    let mut s = BchSeries { n, order, ring: ring.clone(), bracket: Vec::new() };
    let (x, y) = s.generic_pair();
    let weights = vec![1; ring.len()];
    s.bracket = bch_bracket(&x, &y, &weights, order as i32);
    Ok(s)
}

/// Coefficients `c_{αβγ}` of `exp⟨{x,y}, ζ⟩`, grouped by order `j = |α| + |β| − |γ|`.
#[derive(Clone, Debug)]
pub struct StarTable {
    gl: Arc<Gl>,
    order: usize,
    unit: GaussQ,
    calibrated: bool,
    by_order: Vec<BTreeMap<(Exps, Exps), CommPoly>>,
}

impl StarTable {
    /// Table through order `order` with pairing `⟨x, ζ⟩ = unit · Σ x_k ζ_k`.
    pub fn with_unit(gl: &Arc<Gl>, order: usize, unit: &GaussQ) -> Result<Self, AlgebraError> {
        if !unit.im.is_zero() || !unit.is_unit_of_order_four() {
            return Err(AlgebraError::Precondition(format!("unit {unit} is not ±1")));
        }
        let n = gl.n();
        let d = gl.dim();
        let names: Vec<String> = ["x", "y", "z"].iter().flat_map(|s| (0..d).map(move |k| format!("{s}{k}"))).collect();
        let ring = PolyRing::new(names);
        let coords = |off: usize| -> PolyMat {
            (0..n).map(|i| (0..n).map(|j| CommPoly::var(&ring, off + gl.index(i, j))).collect()).collect()
        };
        let weights: Vec<i32> = (0..3 * d).map(|k| if k < 2 * d { 1 } else { -1 }).collect();
        let bracket = bch_bracket(&coords(0), &coords(d), &weights, order as i32 + 1);
        let mut pairing = CommPoly::zero(&ring);
        for (i, row) in bracket.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                pairing = &pairing + &(b * &CommPoly::var(&ring, 2 * d + gl.index(i, j)));
            }
        }
        let series = exp_poly_truncated(&pairing.scale(&unit.re), &weights, order as i32);
        let sym = gl.sym_ring();
        let mut by_order = vec![BTreeMap::new(); order + 1];
        for (e, c) in series.terms() {
            let deg = |r: std::ops::Range<usize>| e[r].iter().map(|&k| k as i32).sum::<i32>();
            let j = (deg(0..2 * d) - deg(2 * d..3 * d)) as usize;
            let mut zeta = vec![0; sym.len()];
            zeta[..d].copy_from_slice(&e[2 * d..]);
            let key = (e[..d].to_vec(), e[d..2 * d].to_vec());
            let slot: &mut CommPoly = by_order[j].entry(key).or_insert_with(|| CommPoly::zero(sym));
            slot.add_term(zeta, c.clone());
        }
        Ok(Self { gl: gl.clone(), order, unit: unit.clone(), calibrated: false, by_order })
    }

    /// Table built with the unit fixed by [`calibrate_unit`].
    pub fn calibrated(gl: &Arc<Gl>, order: usize) -> Result<Self, AlgebraError> {
        let unit = calibrate_unit(gl)?;
        let mut t = Self::with_unit(gl, order, &unit)?;
        t.calibrated = true;
        Ok(t)
    }

    pub fn gl(&self) -> &Arc<Gl> {
        &self.gl
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn unit(&self) -> &GaussQ {
        &self.unit
    }

    pub fn is_calibrated(&self) -> bool {
        self.calibrated
    }

    /// Every nonzero `(j, α, β, γ, c_{αβγ})`.
    pub fn coefficients(&self) -> impl Iterator<Item = (usize, &Exps, &Exps, Exps, &Q)> + '_ {
        let d = self.gl.dim();
        self.by_order.iter().enumerate().flat_map(move |(j, m)| {
            m.iter().flat_map(move |((a, b), p)| p.terms().iter().map(move |(g, c)| (j, a, b, g[..d].to_vec(), c)))
        })
    }

    pub fn coefficient_count(&self) -> usize {
        self.coefficients().count()
    }

    /// `c_{∅∅∅} = 1` and `|γ| ≤ min(|α|, |β|)` for every stored coefficient.
    pub fn basic_support_holds(&self) -> bool {
        let deg = |e: &Exps| e.iter().map(|&k| k as i32).sum::<i32>();
        let d = self.gl.dim();
        let empty = self.by_order[0].get(&(vec![0; d], vec![0; d])).and_then(CommPoly::as_constant);
        empty == Some(Q::one())
            && self.by_order[0].len() == 1
            && self.coefficients().all(|(_, a, b, g, _)| deg(&g) <= deg(a).min(deg(b)))
    }

    /// `a ⋆^j b = Σ c_{αβγ} ζ^γ ∂^α a ∂^β b` over `|α| + |β| − |γ| = j`.
    pub fn star_j(&self, a: &CommPoly, b: &CommPoly, j: usize) -> CommPoly {
        assert!(j <= self.order, "order {j} beyond table order {}", self.order);
        let sym = self.gl.sym_ring();
        let mut da: HashMap<&Exps, CommPoly> = HashMap::new();
        let mut db: HashMap<&Exps, CommPoly> = HashMap::new();
        let mut out = CommPoly::zero(sym);
        for ((alpha, beta), coeff) in &self.by_order[j] {
            let pa = da.entry(alpha).or_insert_with(|| partial(a, alpha));
            if pa.is_zero() {
                continue;
            }
            let pa = pa.clone();
            let pb = db.entry(beta).or_insert_with(|| partial(b, beta));
            if pb.is_zero() {
                continue;
            }
            out = &out + &(&(coeff * &pa) * pb);
        }
        out
    }

    /// `a ⋆_ℏ b = Σ_{j ≤ order} hbar^j a ⋆^j b`, truncated at `hbar^order`.
    pub fn star_hbar(&self, a: &CommPoly, b: &CommPoly) -> CommPoly {
        let h = self.gl.sym_var("hbar");
        let mut out = CommPoly::zero(self.gl.sym_ring());
        for j in 0..=self.order {
            out = &out + &(&h.pow(j as u32) * &self.star_j(a, b, j));
        }
        self.truncate_hbar(&out)
    }

    fn truncate_hbar(&self, p: &CommPoly) -> CommPoly {
        let h = self.gl.sym_ring().idx("hbar");
        let w: Vec<i32> = (0..self.gl.sym_ring().len()).map(|k| i32::from(k == h)).collect();
        p.truncate(&w, self.order as i32)
    }
}

fn partial(p: &CommPoly, alpha: &Exps) -> CommPoly {
    let mut out = p.clone();
    for (k, &m) in alpha.iter().enumerate() {
        for _ in 0..m {
            out = out.derivative(k);
            if out.is_zero() {
                return out;
            }
        }
    }
    out
}

/// Homogeneous parts of `p` in the `e` variables, indexed by degree.
fn graded_parts(gl: &Arc<Gl>, p: &CommPoly) -> Vec<(usize, CommPoly)> {
    let mask = gl.e_mask();
    let top = p.degree_in_mask(&mask).unwrap_or(0).max(0);
    (0..=top).map(|k| (k as usize, p.homogeneous_part(&mask, k))).filter(|(_, q)| !q.is_zero()).collect()
}

/// Degree-drop components of `sym⁻¹(sym(a) sym(b))` for `j ≤ order`.
fn enveloping_components(gl: &Arc<Gl>, a: &CommPoly, b: &CommPoly, order: usize) -> Result<Vec<CommPoly>, AlgebraError> {
    let mask = gl.e_mask();
    let mut out = vec![CommPoly::zero(gl.sym_ring()); order + 1];
    for (p, ap) in graded_parts(gl, a) {
        let sa = symmetrize(gl, &ap)?;
        for (r, br) in graded_parts(gl, b) {
            let s = sym_inverse(&(&sa * &symmetrize(gl, &br)?));
            for (j, slot) in out.iter_mut().enumerate().take(order.min(p + r) + 1) {
                *slot = &*slot + &s.homogeneous_part(&mask, (p + r - j) as i32);
            }
        }
    }
    Ok(out)
}

/// Unit `ε` forced by `e_12 ⋆ e_21 − e_21 ⋆ e_12 = ℏ · (symbol of [E_12, E_21])`.
pub fn calibrate_unit(gl: &Arc<Gl>) -> Result<GaussQ, AlgebraError> {
    if gl.n() < 2 {
        return Ok(GaussQ::one());
    }
    let probe = StarTable::with_unit(gl, 1, &GaussQ::one())?;
    let (x, y) = (gl.e(0, 1), gl.e(1, 0));
    let raw = &probe.star_j(&x, &y, 1) - &probe.star_j(&y, &x, 1);
    let target = &enveloping_components(gl, &x, &y, 1)?[1] - &enveloping_components(gl, &y, &x, 1)?[1];
    let ratio = proportionality(&target, &raw)
        .ok_or_else(|| AlgebraError::Precondition("degree-one star term not proportional to the bracket".into()))?;
    let unit = GaussQ::real(ratio);
    if !unit.is_unit_of_order_four() {
        return Err(AlgebraError::Precondition(format!("calibrated unit {unit} is not a fourth root of unity")));
    }
    Ok(unit)
}

/// `r` with `target = r · raw`, if it exists and `raw ≠ 0`.
fn proportionality(target: &CommPoly, raw: &CommPoly) -> Option<Q> {
    let (e, c) = raw.terms().iter().next()?;
    let r = target.terms().get(e).cloned().unwrap_or_else(Q::zero) / c;
    (raw.scale(&r) == *target).then_some(r)
}

/// Per-order ratio between the enveloping-algebra component and `⋆^j` on a fixed probe pair.
pub fn unit_audit(table: &StarTable) -> Result<Vec<(usize, Option<Q>)>, AlgebraError> {
    let gl = table.gl();
    if gl.n() < 2 {
        return Ok(Vec::new());
    }
    let a0 = &(&gl.e(0, 1) + &gl.e(1, 0)) + &gl.e(0, 0);
    let b0 = &(&gl.e(1, 0) + &gl.e(1, 1)) + &gl.e(0, 1);
    (1..=table.order())
        .map(|j| {
            let (a, b) = (a0.pow(j as u32), b0.pow(j as u32));
            let lhs = enveloping_components(gl, &a, &b, j)?;
            Ok((j, proportionality(&lhs[j], &table.star_j(&a, &b, j))))
        })
        .collect()
}

/// `sym(a) sym(b)` against `Σ_{j ≤ order} ℏ^j a ⋆^j b`, component by component.
pub fn gutt_identity_check(table: &StarTable, a: &CommPoly, b: &CommPoly) -> Result<bool, AlgebraError> {
    if !table.is_calibrated() {
        return Err(AlgebraError::Precondition("star table unit not calibrated".into()));
    }
    let lhs = enveloping_components(table.gl(), a, b, table.order())?;
    Ok(lhs.iter().enumerate().all(|(j, l)| *l == table.star_j(a, b, j)))
}

/// `(a ⋆_ℏ b) ⋆_ℏ c = a ⋆_ℏ (b ⋆_ℏ c)` modulo `hbar^{order+1}`.
pub fn associativity_check(table: &StarTable, a: &CommPoly, b: &CommPoly, c: &CommPoly) -> bool {
    let left = table.star_hbar(&table.star_hbar(a, b), c);
    let right = table.star_hbar(a, &table.star_hbar(b, c));
    left == right
}

/// Random symbol of degree at most `max_deg` in the `e` variables with up to `terms` monomials.
pub fn random_symbol(gl: &Arc<Gl>, max_deg: usize, terms: usize, rng: &mut impl Rng) -> CommPoly {
    let d = gl.dim();
    let mut out = CommPoly::zero(gl.sym_ring());
    for _ in 0..terms {
        let deg = rng.gen_range(0..=max_deg);
        let mut e = vec![0i16; gl.sym_ring().len()];
        for _ in 0..deg {
            e[rng.gen_range(0..d)] += 1;
        }
        let c = q(rng.gen_range(-3..=3), rng.gen_range(1..=2));
        out.add_term(e, c);
    }
    out
}

/// Splittings `g = g_τ^♭ ⊕ g_τ` and `g^∧ = g_τ^⊥ ⊕ g_τ^{⊥♭}` at a regular semisimple `τ`.
///
/// Dual vectors are matrices `W` paired with `x` by `tr(x W)`.
#[derive(Clone, Debug)]
pub struct TauFrame {
    pub tau: QMat,
    pub centralizer: Vec<QMat>,
    pub flat: Vec<QMat>,
    pub perp: Vec<QMat>,
    pub perp_flat: Vec<QMat>,
}

fn unflatten(v: &[Q], n: usize) -> QMat {
    QMat::from_rows(v.chunks(n).map(<[Q]>::to_vec).collect())
}

fn pair(x: &QMat, w: &QMat) -> Q {
    (x * w).trace()
}

/// `{W : tr(v W) = 0 for all v in vs}`.
fn annihilator(vs: &[QMat], n: usize) -> Vec<QMat> {
    if vs.is_empty() {
        return (0..n * n)
            .map(|k| {
                let mut m = QMat::zeros(n, n);
                m[(k / n, k % n)] = Q::one();
                m
            })
            .collect();
    }
    let rows: Vec<Vec<Q>> =
        vs.iter().map(|v| (0..n * n).map(|k| v[(k % n, k / n)].clone()).collect()).collect();
    QMat::from_rows(rows).null_space().iter().map(|w| unflatten(w, n)).collect()
}

impl TauFrame {
    pub fn new(tau: QMat) -> Result<Self, AlgebraError> {
        let n = tau.rows();
        let cp = tau.char_coeffs();
        let deriv: Vec<Q> = cp[..n].iter().enumerate().map(|(i, c)| c * qi((n - i) as i64)).collect();
        if n > 1 && resultant(&cp, &deriv).is_zero() {
            return Err(AlgebraError::Precondition("basepoint is not regular semisimple".into()));
        }
        let mut ad = QMat::zeros(n * n, n * n);
        for col in 0..n * n {
            let mut e = QMat::zeros(n, n);
            e[(col / n, col % n)] = Q::one();
            let img = &(&tau * &e) - &(&e * &tau);
            for (row, v) in img.entries().iter().enumerate() {
                ad[(row, col)] = v.clone();
            }
        }
        let centralizer: Vec<QMat> = ad.null_space().iter().map(|v| unflatten(v, n)).collect();
        let (r, pivots) = ad.transpose().rref();
        let flat: Vec<QMat> = (0..pivots.len()).map(|i| unflatten(r.row(i), n)).collect();
        if centralizer.len() != n || flat.len() + n != n * n {
            return Err(AlgebraError::Precondition("centralizer has the wrong dimension".into()));
        }
        let perp = annihilator(&centralizer, n);
        let perp_flat = annihilator(&flat, n);
        Ok(Self { tau, centralizer, flat, perp, perp_flat })
    }

    pub fn n(&self) -> usize {
        self.tau.rows()
    }

    /// Dimensions add up, the two splittings are direct and each dual block annihilates its partner.
    pub fn is_consistent(&self) -> bool {
        let n = self.n();
        let spans = |vs: &[QMat]| QMat::from_rows(vs.iter().map(|m| m.entries().to_vec()).collect()).rank();
        let primal: Vec<QMat> = self.flat.iter().chain(&self.centralizer).cloned().collect();
        let dual: Vec<QMat> = self.perp.iter().chain(&self.perp_flat).cloned().collect();
        spans(&primal) == n * n
            && spans(&dual) == n * n
            && self.centralizer.iter().all(|c| self.perp.iter().all(|w| pair(c, w).is_zero()))
            && self.flat.iter().all(|f| self.perp_flat.iter().all(|w| pair(f, w).is_zero()))
            && self.centralizer.iter().all(|c| (&(&self.tau * c) - &(c * &self.tau)).is_zero())
    }
}

/// Regular semisimple basepoint used by the default checks.
pub fn default_basepoint(n: usize) -> QMat {
    match n {
        2 => QMat::from_i64(&[&[1, 0], &[0, -1]]),
        3 => QMat::from_i64(&[&[2, 1, 0], &[1, 2, 0], &[0, 0, -1]]),
        _ => QMat::diag(&(0..n).map(|i| qi(n as i64 - 1 - 2 * i as i64)).collect::<Vec<_>>()),
    }
}

/// Outcome of the refined support expansion.
#[derive(Clone, Debug, serde::Serialize)]
pub struct RefinedSupport {
    pub order: usize,
    pub terms: usize,
    pub violations: usize,
    /// Smallest slack `2j − (|α′| + |β′| + 2|α″| + 2|β″|)` seen.
    pub min_slack: i32,
}

impl RefinedSupport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Expand `exp⟨{x,y}, ζ⟩` with `x, y` in frame coordinates and `ζ` in the `g_τ^{⊥♭}` block.
pub fn refined_support_check(frame: &TauFrame, order: usize) -> RefinedSupport {
    let n = frame.n();
    let (nf, nc, nz) = (frame.flat.len(), frame.centralizer.len(), frame.perp_flat.len());
    let blocks = [("xp", nf), ("xpp", nc), ("yp", nf), ("ypp", nc), ("z", nz)];
    let names: Vec<String> = blocks.iter().flat_map(|(s, k)| (0..*k).map(move |i| format!("{s}{i}"))).collect();
    let ring = PolyRing::new(names);
    let mut offsets = Vec::new();
    let mut acc = 0;
    for (_, k) in blocks {
        offsets.push(acc);
        acc += k;
    }
    let weights: Vec<i32> = (0..ring.len()).map(|k| if k < offsets[4] { 1 } else { -1 }).collect();
    let vector = |off_flat: usize, off_cent: usize| -> PolyMat {
        let mut m = mat_zero(&ring, n);
        for (a, u) in frame.flat.iter().enumerate() {
            add_scaled_matrix(&mut m, u, &CommPoly::var(&ring, off_flat + a));
        }
        for (b, v) in frame.centralizer.iter().enumerate() {
            add_scaled_matrix(&mut m, v, &CommPoly::var(&ring, off_cent + b));
        }
        m
    };
    let x = vector(offsets[0], offsets[1]);
    let y = vector(offsets[2], offsets[3]);
    let bracket = bch_bracket(&x, &y, &weights, order as i32 + 1);
    let mut pairing = CommPoly::zero(&ring);
    for (c, w) in frame.perp_flat.iter().enumerate() {
        let z = CommPoly::var(&ring, offsets[4] + c);
        for (i, row) in bracket.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                if !w[(j, i)].is_zero() {
                    pairing = &pairing + &(&b.scale(&w[(j, i)]) * &z);
                }
            }
        }
    }
    let series = exp_poly_truncated(&pairing, &weights, order as i32);
    let mut out = RefinedSupport { order, terms: 0, violations: 0, min_slack: i32::MAX };
    for e in series.terms().keys() {
        let deg = |k: usize| e[offsets[k]..offsets[k] + blocks[k].1].iter().map(|&v| v as i32).sum::<i32>();
        let (a1, a2, b1, b2, g) = (deg(0), deg(1), deg(2), deg(3), deg(4));
        let j = a1 + a2 + b1 + b2 - g;
        let slack = 2 * j - (a1 + b1 + 2 * a2 + 2 * b2);
        out.terms += 1;
        out.min_slack = out.min_slack.min(slack);
        if slack < 0 {
            out.violations += 1;
        }
    }
    out
}

fn add_scaled_matrix(m: &mut PolyMat, u: &QMat, var: &CommPoly) {
    for (i, row) in m.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            if !u[(i, j)].is_zero() {
                *slot = &*slot + &var.scale(&u[(i, j)]);
            }
        }
    }
}

/// First derivatives of `f` at `τ` along every `g_τ^⊥` direction vanish.
pub fn invariant_gradient_check(gl: &Arc<Gl>, f: &CommPoly, frame: &TauFrame) -> bool {
    let d = gl.dim();
    let mut point = vec![Q::zero(); gl.sym_ring().len()];
    for (k, slot) in point.iter_mut().enumerate().take(d) {
        let (i, j) = gl.gen(k);
        *slot = frame.tau[(j, i)].clone();
    }
    let grad: Vec<Q> = (0..d).map(|k| f.derivative(k).eval(&point)).collect();
    frame.perp.iter().all(|w| {
        (0..d)
            .map(|k| {
                let (i, j) = gl.gen(k);
                &grad[k] * &w[(j, i)]
            })
            .fold(Q::zero(), |a, b| a + b)
            .is_zero()
    })
}

/// `deg(HC(sym p) − p|_t) ≤ deg p − 1`.
pub fn hc_vs_sym_order_drop(gl: &Arc<Gl>, p: &CommPoly) -> Result<bool, AlgebraError> {
    let mask = gl.e_mask();
    let deg = p.degree_in_mask(&mask).unwrap_or(0);
    let diff = &hc_project(&symmetrize(gl, p)?) - &restrict_to_diagonal(gl, p);
    Ok(diff.degree_in_mask(&mask).is_none_or(|k| k < deg.max(1)))
}

/// Results of the star-product suite for one `gl(n)`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct StarSummary {
    pub n: usize,
    pub order: usize,
    pub unit: String,
    pub unit_audit: Vec<String>,
    pub coefficients: usize,
    pub basic_support: bool,
    pub refined_support: RefinedSupport,
    pub frame_consistent: bool,
    pub gutt_pairs: usize,
    pub gutt_passed: usize,
    pub associativity: bool,
    pub invariant_star_one: bool,
    pub invariant_gradient: bool,
    pub gradient_negative_control: bool,
    pub hc_order_drop: bool,
}

impl StarSummary {
    pub fn all_pass(&self) -> bool {
        self.unit_audit.iter().all(|u| u.ends_with("=1"))
            && self.basic_support
            && self.refined_support.holds()
            && self.frame_consistent
            && self.gutt_passed == self.gutt_pairs
            && self.associativity
            && self.invariant_star_one
            && self.invariant_gradient
            && self.gradient_negative_control
            && self.hc_order_drop
    }
}

/// Run every star-product check for `gl(n)` through `order`, drawing `pairs` random symbol pairs.
pub fn star_summary(n: usize, order: usize, pairs: usize, rng: &mut impl Rng) -> Result<StarSummary, AlgebraError> {
    use crate::capelli::capelli_algebra;
    use crate::invariants::invariant_coefficient;
    let gl = capelli_algebra(n);
    let table = StarTable::calibrated(&gl, order)?;
    let audit = unit_audit(&table)?
        .into_iter()
        .map(|(j, r)| format!("j={j}:ratio={}", r.map_or("none".into(), |r| fmt_q(&r))))
        .collect();
    let frame = TauFrame::new(default_basepoint(n))?;
    let refined = refined_support_check(&frame, order);
    let mut gutt_passed = 0;
    for _ in 0..pairs {
        let a = random_symbol(&gl, 3, 3, rng);
        let b = random_symbol(&gl, 3, 3, rng);
        if gutt_identity_check(&table, &a, &b)? {
            gutt_passed += 1;
        }
    }
    let mut associativity = true;
    for _ in 0..3 {
        let (a, b, c) = (random_symbol(&gl, 2, 2, rng), random_symbol(&gl, 2, 2, rng), random_symbol(&gl, 2, 2, rng));
        associativity &= associativity_check(&table, &a, &b, &c);
    }
    let invariants: Vec<CommPoly> = (1..=n).map(|k| invariant_coefficient(&gl, k)).collect();
    let mut star_one = true;
    for f in &invariants {
        for _ in 0..50 {
            let a = random_symbol(&gl, 3, 3, rng);
            star_one &= table.star_j(f, &a, 1).is_zero() && table.star_j(&a, f, 1).is_zero();
        }
    }
    let gradient = invariants.iter().all(|f| invariant_gradient_check(&gl, f, &frame));
    let control = n < 2 || !invariant_gradient_check(&gl, &gl.e(0, 1), &frame);
    let mut drop = true;
    for f in &invariants {
        drop &= hc_vs_sym_order_drop(&gl, f)?;
    }
    Ok(StarSummary {
        n,
        order,
        unit: table.unit().to_string(),
        unit_audit: audit,
        coefficients: table.coefficient_count(),
        basic_support: table.basic_support_holds(),
        refined_support: refined,
        frame_consistent: frame.is_consistent(),
        gutt_pairs: pairs,
        gutt_passed,
        associativity,
        invariant_star_one: star_one,
        invariant_gradient: gradient,
        gradient_negative_control: control,
        hc_order_drop: drop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capelli::capelli_algebra;
    use crate::invariants::invariant_coefficient;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn commutator(a: &PolyMat, b: &PolyMat) -> PolyMat {
        let w = vec![1; a[0][0].ring().len()];
        mat_add(&mat_mul(a, b, &w, 99), &mat_mul(b, a, &w, 99), &-Q::one())
    }

    #[test]
    fn bch_low_degrees() {
        let s = bch_bracket_series(2, 3).unwrap();
        let (x, y) = s.generic_pair();
        let zero = mat_zero(s.ring(), 2);
        assert!(mat_is_zero(&s.degree_part(1)));
        let half = mat_add(&zero, &commutator(&x, &y), &q(1, 2));
        assert_eq!(s.degree_part(2), half);
        let xy = commutator(&x, &y);
        let yx = commutator(&y, &x);
        let third = mat_add(&mat_add(&zero, &commutator(&x, &xy), &q(1, 12)), &commutator(&y, &yx), &q(1, 12));
        assert_eq!(s.degree_part(3), third);
    }

    /// Degree-3 BCH term in the free algebra on two letters, computed from the series directly.
    #[test]
    fn free_algebra_degree_three() {
        type Word = Vec<u8>;
        type Free = BTreeMap<Word, Q>;
        fn mul(a: &Free, b: &Free, max: usize) -> Free {
            let mut out = Free::new();
            for (u, c) in a {
                for (v, d) in b {
                    if u.len() + v.len() <= max {
                        let w: Word = u.iter().chain(v).copied().collect();
                        *out.entry(w).or_insert_with(Q::zero) += c * d;
                    }
                }
            }
            out.retain(|_, c| !c.is_zero());
            out
        }
        fn add(a: &Free, b: &Free, s: &Q) -> Free {
            let mut out = a.clone();
            for (w, c) in b {
                *out.entry(w.clone()).or_insert_with(Q::zero) += c * s;
            }
            out.retain(|_, c| !c.is_zero());
            out
        }
        let letter = |l: u8| Free::from([(vec![l], Q::one())]);
        let one = Free::from([(vec![], Q::one())]);
        let exp = |x: &Free| {
            let mut out = one.clone();
            let mut t = one.clone();
            for k in 1..=3 {
                t = add(&Free::new(), &mul(&t, x, 3), &q(1, k));
                out = add(&out, &t, &Q::one());
            }
            out
        };
        let (x, y) = (letter(0), letter(1));
        let m = add(&mul(&exp(&x), &exp(&y), 3), &one, &-Q::one());
        let mut log = Free::new();
        let mut p = one.clone();
        for k in 1..=3i64 {
            p = mul(&p, &m, 3);
            log = add(&log, &p, &q(if k % 2 == 1 { 1 } else { -1 }, k));
        }
        let cubic: Free = log.into_iter().filter(|(w, _)| w.len() == 3).collect();
        let br = |a: &Free, b: &Free| add(&mul(a, b, 3), &mul(b, a, 3), &-Q::one());
        let expected = add(&add(&Free::new(), &br(&x, &br(&x, &y)), &q(1, 12)), &br(&y, &br(&y, &x)), &q(1, 12));
        assert_eq!(cubic, expected);
    }

    #[test]
    fn bch_vanishes_at_zero() {
        let s = bch_bracket_series(2, 4).unwrap();
        let xs: Vec<CommPoly> = (0..8).map(|k| if k < 4 { CommPoly::zero(s.ring()) } else { CommPoly::var(s.ring(), k) }).collect();
        for row in s.bracket() {
            for p in row {
                assert!(p.compose(&xs).unwrap().is_zero());
            }
        }
        assert!(bch_bracket_series(2, 1).is_err());
    }

    #[test]
    fn calibration_gives_plus_one() {
        let gl = capelli_algebra(2);
        assert_eq!(calibrate_unit(&gl).unwrap(), GaussQ::one());
        let t = StarTable::calibrated(&gl, 4).unwrap();
        assert!(unit_audit(&t).unwrap().iter().all(|(_, r)| *r == Some(Q::one())));
    }

    #[test]
    fn low_order_components() {
        let gl = capelli_algebra(2);
        let t = StarTable::calibrated(&gl, 2).unwrap();
        let (x, y) = (gl.e(0, 1), gl.e(1, 0));
        assert_eq!(t.star_j(&x, &y, 0), &x * &y);
        let bracket = &gl.e(0, 0) - &gl.e(1, 1);
        assert_eq!(t.star_j(&x, &y, 1), bracket.scale(&q(1, 2)));
        assert!(t.basic_support_holds());
        let j1: Vec<_> = t.coefficients().filter(|c| c.0 == 1).collect();
        assert!(j1.iter().all(|(_, _, _, _, c)| **c == q(1, 2) || **c == q(-1, 2)));
    }

    #[test]
    fn gutt_identity_gl2() {
        let gl = capelli_algebra(2);
        let t = StarTable::calibrated(&gl, 4).unwrap();
        let uncal = StarTable::with_unit(&gl, 1, &GaussQ::one()).unwrap();
        let one = CommPoly::one(gl.sym_ring());
        assert!(gutt_identity_check(&uncal, &one, &one).is_err());
        assert!(gutt_identity_check(&t, &one, &one).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let a = random_symbol(&gl, 3, 3, &mut rng);
            let b = random_symbol(&gl, 3, 3, &mut rng);
            assert!(gutt_identity_check(&t, &a, &b).unwrap());
        }
    }

    #[test]
    fn wrong_unit_breaks_gutt() {
        let gl = capelli_algebra(2);
        let mut t = StarTable::with_unit(&gl, 2, &-GaussQ::one()).unwrap();
        t.calibrated = true;
        assert!(!gutt_identity_check(&t, &gl.e(0, 1), &gl.e(1, 0)).unwrap());
    }

    #[test]
    fn invariants_are_star_one_central() {
        for n in 2..=3 {
            let gl = capelli_algebra(n);
            let t = StarTable::calibrated(&gl, 1).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for k in 1..=n {
                let f = invariant_coefficient(&gl, k);
                for _ in 0..10 {
                    let a = random_symbol(&gl, 3, 4, &mut rng);
                    assert!(t.star_j(&f, &a, 1).is_zero());
                }
            }
        }
    }

    #[test]
    fn degree_bookkeeping() {
        let gl = capelli_algebra(2);
        let t = StarTable::calibrated(&gl, 3).unwrap();
        let mask = gl.e_mask();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = random_symbol(&gl, 3, 3, &mut rng);
            let b = random_symbol(&gl, 3, 3, &mut rng);
            let (da, db) = (a.degree_in_mask(&mask).unwrap_or(0), b.degree_in_mask(&mask).unwrap_or(0));
            for j in 0..=3 {
                if let Some(d) = t.star_j(&a, &b, j).degree_in_mask(&mask) {
                    assert!(d <= da + db - j as i32);
                }
            }
        }
    }

    #[test]
    fn associativity_gl2() {
        let gl = capelli_algebra(2);
        let t = StarTable::calibrated(&gl, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..3 {
            let (a, b, c) = (random_symbol(&gl, 2, 2, &mut rng), random_symbol(&gl, 2, 2, &mut rng), random_symbol(&gl, 2, 2, &mut rng));
            assert!(associativity_check(&t, &a, &b, &c));
        }
    }

    #[test]
    fn frames_and_refined_support() {
        for n in 2..=3 {
            let frame = TauFrame::new(default_basepoint(n)).unwrap();
            assert_eq!(frame.centralizer.len(), n);
            assert!(frame.is_consistent());
            let r = refined_support_check(&frame, if n == 2 { 4 } else { 3 });
            assert!(r.holds(), "{r:?}");
            assert!(r.terms > 1);
        }
        assert!(TauFrame::new(QMat::from_i64(&[&[1, 1], &[0, 1]])).is_err());
    }

    #[test]
    fn gradients_at_basepoint() {
        let gl = capelli_algebra(2);
        let frame = TauFrame::new(default_basepoint(2)).unwrap();
        assert!(invariant_gradient_check(&gl, &invariant_coefficient(&gl, 1), &frame));
        assert!(invariant_gradient_check(&gl, &invariant_coefficient(&gl, 2), &frame));
        assert!(!invariant_gradient_check(&gl, &gl.e(0, 1), &frame));
    }

    #[test]
    fn order_drop() {
        for n in 1..=3 {
            let gl = capelli_algebra(n);
            for k in 1..=n {
                assert!(hc_vs_sym_order_drop(&gl, &invariant_coefficient(&gl, k)).unwrap());
            }
        }
    }
}
