//! Capelli determinant, its Harish-Chandra image, the cofactor expansions and
//! the Vandermonde recovery of `τ`.

use crate::enveloping::{hc_project, sym_inverse, verify_central, Gl, Ue};
use crate::invariants::{char_poly_universal, InfinitesimalChar, NondegenerateCharacter};
use crate::linalg::{permutations, QMat};
use crate::poly::CommPoly;
use crate::scalar::{q, qi, qpow, Q};
use crate::AlgebraError;
use num_traits::Zero;
use std::sync::Arc;

/// Enveloping algebra with the auxiliary variables used here (`X`, `hbar`).
pub fn capelli_algebra(n: usize) -> Arc<Gl> {
    Gl::new(n, ["X", "hbar"])
}

/// Entry `A_{ij} = δ_{ij}(X + ρ_i) + E_{ij}` with `ρ_i = (n-1-2i)/2`, 0-based.
fn capelli_entry(gl: &Arc<Gl>, i: usize, j: usize) -> Ue {
    let mut a = Ue::gen0(gl, i, j);
    if i == j {
        let rho = q(gl.n() as i64 - 1 - 2 * i as i64, 2);
        let shift = &gl.aux_var("X") + &CommPoly::constant(gl.aux(), rho);
        a = &a + &Ue::scalar(gl, shift);
    }
    a
}

/// Row-ordered product `A_{r,σ(r)} ⋯ A_{0,σ(0)}` with the bottom row leftmost.
fn row_product(gl: &Arc<Gl>, perm: &[usize], top_row: usize) -> Ue {
    let mut t = Ue::one(gl);
    for r in (0..=top_row).rev() {
        t = &t * &capelli_entry(gl, r, perm[r]);
    }
    t
}

/// `det(X + ρ + E)` in PBW normal form.
pub fn capelli_det(gl: &Arc<Gl>) -> Ue {
    let n = gl.n();
    let mut out = Ue::zero(gl);
    for (perm, sign) in permutations(n) {
        out = &out + &row_product(gl, &perm, n - 1).scale_q(&qi(sign as i64));
    }
    out
}

/// Non-commutative minors `𝔇_j(X)`, `j = 1..n`, restricted to `σ(n) = j`, rows `1..n-1`.
pub fn nc_minors(gl: &Arc<Gl>) -> Vec<Ue> {
    let n = gl.n();
    let mut out = vec![Ue::zero(gl); n];
    for (perm, sign) in permutations(n) {
        let t = if n == 1 { Ue::one(gl) } else { row_product(gl, &perm, n - 2) };
        let j = perm[n - 1];
        out[j] = &out[j] + &t.scale_q(&qi(sign as i64));
    }
    out
}

/// Commutative minors `𝔡_j(X)` of `det(X + e)`, in the symmetric ring of `gl` (which carries `X`).
pub fn comm_minors(gl: &Arc<Gl>) -> Vec<CommPoly> {
    let n = gl.n();
    let x = gl.sym_var("X");
    let mut out = vec![CommPoly::zero(gl.sym_ring()); n];
    for (perm, sign) in permutations(n) {
        let mut t = CommPoly::constant(gl.sym_ring(), qi(sign as i64));
        for (r, &c) in perm.iter().enumerate().take(n - 1) {
            let entry = if r == c { &x + &gl.e(r, r) } else { gl.e(r, c) };
            t = &t * &entry;
        }
        let j = perm[n - 1];
        out[j] = &out[j] + &t;
    }
    out
}

/// Every X-coefficient of the Capelli determinant commutes with the simple generators.
pub fn capelli_is_central(gl: &Arc<Gl>) -> bool {
    verify_central(&capelli_det(gl))
}

/// `γ(det(X + ρ + E)) = det(X + e)` restricted to the diagonal.
pub fn hc_of_capelli_equals_charpoly(gl: &Arc<Gl>) -> bool {
    let image = hc_project(&capelli_det(gl));
    image == restrict_to_diagonal(gl, &char_poly_universal(gl))
}

/// Set every off-diagonal `e[i][j]` to zero.
pub fn restrict_to_diagonal(gl: &Arc<Gl>, p: &CommPoly) -> CommPoly {
    let d = gl.dim();
    CommPoly::from_terms(
        gl.sym_ring(),
        p.terms().iter().filter(|(e, _)| (0..d).all(|k| gl.is_diagonal(k) || e[k] == 0)).map(|(e, c)| (e.clone(), c.clone())),
    )
}

/// `Σ_j (1_{n=j}(X - (n-1)/2) + E_{nj}) 𝔇_j(X) = det(X + ρ + E)`.
pub fn cofactor_expansion_check(gl: &Arc<Gl>) -> bool {
    let n = gl.n();
    let minors = nc_minors(gl);
    let mut total = Ue::zero(gl);
    for (j, m) in minors.iter().enumerate() {
        total = &total + &(&capelli_entry(gl, n - 1, j) * m);
    }
    total == capelli_det(gl)
}

/// Same regrouping for the commutative determinant.
pub fn comm_cofactor_expansion_check(gl: &Arc<Gl>) -> bool {
    let n = gl.n();
    let x = gl.sym_var("X");
    let mut total = CommPoly::zero(gl.sym_ring());
    for (j, m) in comm_minors(gl).iter().enumerate() {
        let lead = if j == n - 1 { &x + &gl.e(n - 1, j) } else { gl.e(n - 1, j) };
        total = &total + &(&lead * m);
    }
    total == char_poly_universal(gl)
}

/// Images of the symmetric-ring variables at the point `θ_P(ψ)` (with `e_{ij}(ξ) = ξ_{ji}`)
/// in the ring of `target`, where `theta` is the matrix and `x` the value of `X`.
fn theta_images(gl: &Arc<Gl>, theta: &[Vec<CommPoly>], x: &CommPoly) -> Vec<CommPoly> {
    let ring = gl.sym_ring();
    (0..ring.len())
        .map(|k| {
            if k < gl.dim() {
                let (i, j) = gl.gen(k);
                theta[j][i].clone()
            } else if ring.name(k) == "X" {
                x.clone()
            } else {
                CommPoly::zero(x.ring())
            }
        })
        .collect()
}

/// `𝔡_j(X)(θ)` as a polynomial in `X, eta[1..n-1]`, together with the sign in
/// `𝔡_j(X)(θ) = sign · X^{j-1} η_j ⋯ η_{n-1}`; `None` when no such sign exists.
pub fn minor_at_theta_formal(n: usize, j: usize) -> (CommPoly, Option<i8>) {
    let gl = Gl::new(n, ["X"]);
    let ring = crate::poly::PolyRing::new(std::iter::once("X".to_string()).chain((1..n).map(|k| format!("eta[{k}]"))));
    let mut theta = vec![vec![CommPoly::zero(&ring); n]; n];
    for k in 1..n {
        theta[k][k - 1] = CommPoly::named(&ring, &format!("eta[{k}]"));
    }
    let x = CommPoly::named(&ring, "X");
    let value = comm_minors(&gl)[j - 1].compose(&theta_images(&gl, &theta, &x)).expect("polynomial images");
    let mut mono = x.pow((j - 1) as u32);
    for k in j..n {
        mono = &mono * &CommPoly::named(&ring, &format!("eta[{k}]"));
    }
    let sign = if value == mono {
        Some(1)
    } else if value == -&mono {
        Some(-1)
    } else {
        None
    };
    (value, sign)
}

/// Commutative minors prepared for repeated numeric evaluation at `θ_P(ψ)`.
pub struct ThetaMinors {
    gl: Arc<Gl>,
    minors: Vec<CommPoly>,
}

impl ThetaMinors {
    pub fn new(n: usize) -> Self {
        let gl = Gl::new(n, ["X"]);
        let minors = comm_minors(&gl);
        Self { gl, minors }
    }

    /// `𝔡_j(x)(θ_P(ψ))`, 1-based `j`.
    pub fn eval(&self, j: usize, psi: &NondegenerateCharacter, x: &Q) -> Q {
        let gl = &self.gl;
        let n = gl.n();
        let ring = gl.sym_ring();
        let values: Vec<Q> = (0..ring.len())
            .map(|k| {
                if k < gl.dim() {
                    let (r, c) = gl.gen(k);
                    // e_{rc}(θ) = θ_{cr}; θ_{c+1,c} = η_c
                    if c == r + 1 && c < n {
                        psi.eta()[r].clone()
                    } else {
                        Q::zero()
                    }
                } else {
                    x.clone()
                }
            })
            .collect();
        self.minors[j - 1].eval(&values)
    }
}

/// `𝔡_j(x)(θ_P(ψ))` for a single evaluation.
pub fn minor_at_theta(j: usize, psi: &NondegenerateCharacter, x: &Q) -> Q {
    ThetaMinors::new(psi.eta().len() + 1).eval(j, psi, x)
}

/// Solve `Σ_{j<n} τ_{jn} 𝔡_j(x)(θ) = P_λ(x) - (x + c_1) x^{n-1}` at the given samples.
/// Returns the full last column `(τ_{1n}, …, τ_{n-1,n}, c_1)`.
pub fn vandermonde_recover_tau(
    minors: &ThetaMinors,
    psi: &NondegenerateCharacter,
    lambda: &InfinitesimalChar,
    samples: &[Q],
) -> Result<Vec<Q>, AlgebraError> {
    let n = lambda.n();
    if samples.len() != n - 1 {
        return Err(AlgebraError::Precondition(format!("need {} samples", n - 1)));
    }
    for a in 0..samples.len() {
        for b in a + 1..samples.len() {
            if samples[a] == samples[b] {
                return Err(AlgebraError::Singular("repeated Vandermonde sample".into()));
            }
        }
    }
    let mut col = Vec::with_capacity(n);
    if n > 1 {
        let mut m = QMat::zeros(n - 1, n - 1);
        let mut rhs = Vec::with_capacity(n - 1);
        for (k, x) in samples.iter().enumerate() {
            for j in 1..n {
                m[(k, j - 1)] = minors.eval(j, psi, x);
            }
            rhs.push(lambda.eval(x) - (x + lambda.c(1)) * qpow(x, n as i64 - 1));
        }
        col = m.solve(&rhs)?;
    }
    col.push(lambda.c(1).clone());
    Ok(col)
}

/// Graded decomposition `𝔇_i(X) = Σ_ℓ sym(𝔡_i^{(ℓ)}(X))`, 1-based `i`.
///
/// The `ℓ`-th entry collects, for each `k`, the degree `k - ℓ` part of
/// `sym⁻¹` of the `X^{n-1-k}` coefficient of `𝔇_i`.
pub fn graded_minor_decomposition(gl: &Arc<Gl>, i: usize) -> Vec<CommPoly> {
    let n = gl.n();
    let minor = &nc_minors(gl)[i - 1];
    let x = gl.sym_var("X");
    let mask = gl.e_mask();
    let mut parts = vec![CommPoly::zero(gl.sym_ring()); n];
    for k in 0..n {
        let coeff = minor.coeff_of("X", (n - 1 - k) as i16);
        let s = sym_inverse(&coeff);
        for (l, part) in parts.iter_mut().enumerate().take(k + 1) {
            let piece = s.homogeneous_part(&mask, (k - l) as i32);
            *part = &*part + &(&piece * &x.pow((n - 1 - k) as u32));
        }
        let rest = (0..=k).fold(s.clone(), |acc, l| &acc - &s.homogeneous_part(&mask, (k - l) as i32));
        assert!(rest.is_zero(), "coefficient exceeds the filtration bound");
    }
    parts
}

/// `sym_ℏ(d_i(X)) = ℏ^{n-1} 𝔇_i(ℏ^{-1} X)` with `d_i = Σ_ℓ ℏ^ℓ 𝔡_i^{(ℓ)}`.
pub fn hbar_rescaled_minor_check(gl: &Arc<Gl>, i: usize) -> bool {
    let n = gl.n();
    let parts = graded_minor_decomposition(gl, i);
    let h = gl.sym_var("hbar");
    let d = parts.iter().enumerate().fold(CommPoly::zero(gl.sym_ring()), |acc, (l, p)| &acc + &(&h.pow(l as u32) * p));
    let lhs = crate::star::opp(gl, &d);
    let hx = gl.aux().idx("X");
    let haux = gl.aux_var("hbar");
    let xs = &gl.aux_var("X") * &haux.monomial_inverse().unwrap();
    let rhs = nc_minors(gl)[i - 1].map_coeffs(|c| &c.substitute(hx, &xs).unwrap() * &haux.pow(n as u32 - 1));
    lhs == rhs
}

/// Per-`n` outcome of the Capelli identities.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CapelliSummary {
    pub n: usize,
    pub central: bool,
    pub hc_identity: bool,
    pub cofactor: bool,
    pub comm_cofactor: bool,
    pub minors_at_theta: bool,
    pub graded_minors: bool,
}

pub fn capelli_summary(n: usize) -> CapelliSummary {
    let gl = capelli_algebra(n);
    let minors_at_theta = (1..=n).all(|j| minor_at_theta_formal(n, j).1.is_some());
    let graded_minors = (1..=n).all(|i| {
        let parts = graded_minor_decomposition(&gl, i);
        let top = parts[0].clone();
        let cm = comm_minors(&gl)[i - 1].clone();
        top == cm && hbar_rescaled_minor_check(&gl, i)
    });
    CapelliSummary {
        n,
        central: capelli_is_central(&gl),
        hc_identity: hc_of_capelli_equals_charpoly(&gl),
        cofactor: cofactor_expansion_check(&gl),
        comm_cofactor: comm_cofactor_expansion_check(&gl),
        minors_at_theta,
        graded_minors,
    }
}

impl CapelliSummary {
    pub fn all_pass(&self) -> bool {
        self.central && self.hc_identity && self.cofactor && self.comm_cofactor && self.minors_at_theta && self.graded_minors
    }
}

/// Centrality and the Harish-Chandra identity alone, for the larger `n`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CapelliCore {
    pub n: usize,
    pub central: bool,
    pub hc_identity: bool,
}

pub fn capelli_core(n: usize) -> CapelliCore {
    let gl = capelli_algebra(n);
    CapelliCore { n, central: capelli_is_central(&gl), hc_identity: hc_of_capelli_equals_charpoly(&gl) }
}

/// Minor evaluations at `θ_P(ψ)` carry the sign and monomial shape for every `j ≤ n`.
pub fn minors_at_theta_hold(n: usize) -> bool {
    (1..=n).all(|j| minor_at_theta_formal(n, j).1.is_some())
}

/// Failures among random `(ψ, λ)` trials of the `τ` construction.
#[derive(Clone, Debug, serde::Serialize)]
pub struct TauSummary {
    pub cases: usize,
    pub max_n: usize,
    pub char_poly_failures: usize,
    pub vandermonde_failures: usize,
    pub resultant_failures: usize,
    pub formal: bool,
}

impl TauSummary {
    pub fn all_pass(&self) -> bool {
        self.char_poly_failures == 0 && self.vandermonde_failures == 0 && self.resultant_failures == 0 && self.formal
    }
}

fn random_rational(rng: &mut impl rand::Rng, nonzero: bool) -> Q {
    loop {
        let x = q(rng.gen_range(-12..=12), rng.gen_range(1..=7));
        if !nonzero || !x.is_zero() {
            return x;
        }
    }
}

/// `det(X + τ) = 𝒫_λ(X)`, Vandermonde recovery of the last column and
/// `|ℛ(τ)| = |∏ λ_j|^{n-1}` on random rational data with `2 ≤ n ≤ max_n`.
pub fn tau_summary(cases: usize, max_n: usize, rng: &mut impl rand::Rng) -> Result<TauSummary, AlgebraError> {
    use crate::invariants::{resultant_stability, tau, tau_formal_char_check};
    use num_traits::Signed;
    let max_n = max_n.max(2);
    let minors: Vec<ThetaMinors> = (2..=max_n).map(ThetaMinors::new).collect();
    let mut out = TauSummary {
        cases,
        max_n,
        char_poly_failures: 0,
        vandermonde_failures: 0,
        resultant_failures: 0,
        formal: (1..=max_n).all(tau_formal_char_check),
    };
    for _ in 0..cases {
        let n = rng.gen_range(2..=max_n);
        let psi = NondegenerateCharacter::new((1..n).map(|_| random_rational(rng, true)).collect())?;
        let eigen: Vec<Q> = (0..n).map(|_| random_rational(rng, false)).collect();
        let lambda = InfinitesimalChar::from_eigenvalues(eigen.clone());
        let t = match tau(&psi, &lambda) {
            Ok(t) => t,
            Err(_) => {
                out.char_poly_failures += 1;
                continue;
            }
        };
        if t.char_coeffs()[1..] != lambda.coeffs()[..] {
            out.char_poly_failures += 1;
        }
        let samples: Vec<Q> = (1..n).map(|k| qi(k as i64)).collect();
        let col = vandermonde_recover_tau(&minors[n - 2], &psi, &lambda, &samples)?;
        if (0..n).any(|i| col[i] != t[(i, n - 1)]) {
            out.vandermonde_failures += 1;
        }
        let product = eigen.iter().fold(Q::from_integer(1.into()), |a, b| a * b);
        if resultant_stability(&t).abs() != qpow(&product.abs(), n as i64 - 1) {
            out.resultant_failures += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::tau;
    use proptest::prelude::*;

    #[test]
    fn capelli_gl1_gl2() {
        let gl = capelli_algebra(1);
        let x = Ue::scalar(&gl, gl.aux_var("X"));
        assert_eq!(capelli_det(&gl), &x + &Ue::e(&gl, 1, 1));

        let gl = capelli_algebra(2);
        let x = Ue::scalar(&gl, gl.aux_var("X"));
        let half = Ue::rational(&gl, q(1, 2));
        let a = &(&x - &half) + &Ue::e(&gl, 2, 2);
        let b = &(&x + &half) + &Ue::e(&gl, 1, 1);
        let expect = &(&a * &b) - &(&Ue::e(&gl, 2, 1) * &Ue::e(&gl, 1, 2));
        let det = capelli_det(&gl);
        assert_eq!(det, expect);
        assert_eq!(det.coeff_of("X", 1), &Ue::e(&gl, 1, 1) + &Ue::e(&gl, 2, 2));
        assert!(verify_central(&det));
        assert!(!verify_central(&Ue::e(&gl, 1, 2)));
        assert!(verify_central(&Ue::one(&gl)));
    }

    #[test]
    fn hc_image_gl2() {
        let gl = capelli_algebra(2);
        let x = gl.sym_var("X");
        let expect = &(&x + &gl.e(0, 0)) * &(&x + &gl.e(1, 1));
        assert_eq!(hc_project(&capelli_det(&gl)), expect);
    }

    #[test]
    fn identities_through_gl3() {
        for n in 1..=3 {
            let s = capelli_summary(n);
            assert!(s.all_pass(), "{s:?}");
        }
    }

    #[test]
    fn minors_at_theta_examples() {
        let (v, s) = minor_at_theta_formal(3, 1);
        assert!(s.is_some(), "{v}");
        assert_eq!(v.to_string().trim_start_matches("-1*"), "eta[1]*eta[2]");
        let (v, s) = minor_at_theta_formal(3, 3);
        assert!(s.is_some());
        assert_eq!(v.to_string().trim_start_matches("-1*"), "X^2");
        assert!(minor_at_theta_formal(4, 2).1.is_some());
        for n in 1..=4 {
            for j in 1..=n {
                assert!(minor_at_theta_formal(n, j).1.is_some(), "n={n} j={j}");
            }
        }
    }

    #[test]
    fn graded_minor_bounds() {
        let gl = capelli_algebra(2);
        let parts = graded_minor_decomposition(&gl, 1);
        assert!(parts[1].is_zero());
        // the diagonal entry carries the shift ρ_1 = 1/2 as its only lower-order piece
        let parts = graded_minor_decomposition(&gl, 2);
        assert_eq!(parts[1], CommPoly::constant(gl.sym_ring(), q(1, 2)));
        let gl = capelli_algebra(3);
        let mask = gl.e_mask();
        for i in 1..=3 {
            let parts = graded_minor_decomposition(&gl, i);
            assert!(parts[1].degree_in_mask(&mask).unwrap_or(0) <= 1);
            assert_eq!(parts.len(), 3);
        }
    }

    #[test]
    fn tau_trials() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let s = tau_summary(20, 4, &mut rng).unwrap();
        assert!(s.all_pass(), "{s:?}");
    }

    #[test]
    fn vandermonde_n2_and_nilpotent() {
        let m = ThetaMinors::new(2);
        let psi = NondegenerateCharacter::new(vec![q(3, 2)]).unwrap();
        let lambda = InfinitesimalChar::from_coeffs(vec![qi(2), qi(5)]);
        let col = vandermonde_recover_tau(&m, &psi, &lambda, &[qi(7)]).unwrap();
        assert_eq!(col[0], -qi(5) / q(3, 2));
        let m3 = ThetaMinors::new(3);
        let psi3 = NondegenerateCharacter::new(vec![qi(1), qi(2)]).unwrap();
        let zero = InfinitesimalChar::from_coeffs(vec![Q::zero(); 3]);
        let col = vandermonde_recover_tau(&m3, &psi3, &zero, &[qi(1), qi(2)]).unwrap();
        assert!(col.iter().all(Zero::is_zero));
        assert!(vandermonde_recover_tau(&m3, &psi3, &zero, &[qi(1), qi(1)]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]
        #[test]
        fn vandermonde_matches_tau(eta in proptest::collection::vec(1i64..6, 1..5), c in proptest::collection::vec(-9i64..10, 5)) {
            let n = eta.len() + 1;
            let psi = NondegenerateCharacter::new(eta.iter().map(|&e| q(e, 3)).collect()).unwrap();
            let lambda = InfinitesimalChar::from_coeffs(c[..n].iter().map(|&x| q(x, 2)).collect());
            let m = ThetaMinors::new(n);
            let samples: Vec<Q> = (1..n).map(|k| qi(k as i64)).collect();
            let col = vandermonde_recover_tau(&m, &psi, &lambda, &samples).unwrap();
            let t = tau(&psi, &lambda).unwrap();
            for i in 0..n {
                prop_assert_eq!(&col[i], &t[(i, n - 1)]);
            }
        }
    }
}
