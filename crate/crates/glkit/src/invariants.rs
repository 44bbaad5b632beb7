//! Characteristic polynomials, infinitesimal characters, the scaling action,
//! the stability resultant and the mirabolic normal form `τ(ψ, λ)`.

use crate::enveloping::Gl;
use crate::linalg::{permutations, resultant, QMat};
use crate::poly::{CommPoly, PolyRing};
use crate::scalar::{qi, qpow, Q};
use crate::AlgebraError;
use num_traits::{One, Zero};
use std::sync::Arc;

/// Infinitesimal character, carried as `(c_1, …, c_n)` and optionally as an eigenvalue multiset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfinitesimalChar {
    coeffs: Vec<Q>,
    eigenvalues: Option<Vec<Q>>,
}

impl InfinitesimalChar {
    pub fn from_coeffs(coeffs: Vec<Q>) -> Self {
        Self { coeffs, eigenvalues: None }
    }

    /// `P(X) = ∏ (X + λ_j)`.
    pub fn from_eigenvalues(eigenvalues: Vec<Q>) -> Self {
        let mut poly = vec![Q::one()];
        for l in &eigenvalues {
            let mut next = poly.clone();
            next.push(Q::zero());
            for (k, c) in poly.iter().enumerate() {
                next[k + 1] += c * l;
            }
            poly = next;
        }
        let mut ev = eigenvalues;
        ev.sort();
        Self { coeffs: poly[1..].to_vec(), eigenvalues: Some(ev) }
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    /// `c_j`, 1-based.
    pub fn c(&self, j: usize) -> &Q {
        &self.coeffs[j - 1]
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn eigenvalues(&self) -> Option<&[Q]> {
        self.eigenvalues.as_deref()
    }

    /// `P_λ(x)`.
    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs.iter().fold(Q::one(), |acc, c| acc * x + c)
    }
}

/// `P_{tλ}(X) = t^n P_λ(t^{-1} X)`.
pub fn scale_char(t: &Q, lambda: &InfinitesimalChar) -> InfinitesimalChar {
    let coeffs = lambda.coeffs.iter().enumerate().map(|(k, c)| c * qpow(t, k as i64 + 1)).collect();
    let eigenvalues = lambda.eigenvalues.as_ref().map(|ev| {
        let mut v: Vec<Q> = ev.iter().map(|x| x * t).collect();
        v.sort();
        v
    });
    InfinitesimalChar { coeffs, eigenvalues }
}

/// Nondegenerate character `ψ`, recorded by its nonzero constants `η_1, …, η_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NondegenerateCharacter {
    eta: Vec<Q>,
}

impl NondegenerateCharacter {
    pub fn new(eta: Vec<Q>) -> Result<Self, AlgebraError> {
        if let Some(k) = eta.iter().position(Zero::is_zero) {
            return Err(AlgebraError::Precondition(format!("eta[{}] = 0", k + 1)));
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> &[Q] {
        &self.eta
    }
}

/// `det(X + e)` over the symmetric ring of `gl` (which must carry the auxiliary variable `X`).
pub fn char_poly_universal(gl: &Arc<Gl>) -> CommPoly {
    let n = gl.n();
    let x = gl.sym_var("X");
    let entries: Vec<Vec<CommPoly>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { &x + &gl.e(i, i) } else { gl.e(i, j) }).collect()).collect();
    det_poly(&entries, gl.sym_ring())
}

/// Coefficient `c_k` of `X^{n-k}` in `det(X + e)`, as an invariant polynomial in the `e` variables.
pub fn invariant_coefficient(gl: &Arc<Gl>, k: usize) -> CommPoly {
    let x = gl.sym_ring().idx("X");
    char_poly_universal(gl).coeff_of(x, (gl.n() - k) as i16)
}

/// Permutation-sum determinant of a square matrix of polynomials.
pub fn det_poly(m: &[Vec<CommPoly>], ring: &Arc<PolyRing>) -> CommPoly {
    let n = m.len();
    let mut out = CommPoly::zero(ring);
    for (perm, sign) in permutations(n) {
        let mut t = CommPoly::constant(ring, qi(sign as i64));
        for (i, &j) in perm.iter().enumerate() {
            if m[i][j].is_zero() {
                t = CommPoly::zero(ring);
                break;
            }
            t = &t * &m[i][j];
        }
        out = out + t;
    }
    out
}

/// Mirabolic pattern of `θ_P(ψ)`: `Some(v)` for a constrained entry, `None` for the free last column.
pub fn theta_p(psi: &NondegenerateCharacter, n: usize) -> Vec<Vec<Option<Q>>> {
    assert_eq!(psi.eta.len() + 1, n.max(1));
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j == n - 1 {
                        None
                    } else if i == j + 1 {
                        Some(psi.eta[j].clone())
                    } else {
                        Some(Q::zero())
                    }
                })
                .collect()
        })
        .collect()
}

/// Last column of `τ(ψ, λ)`: `τ_{in} = (-1)^{n-i} c_{n+1-i} / (η_i ⋯ η_{n-1})`.
fn tau_last_column(eta: &[Q], coeffs: &[Q]) -> Vec<Q> {
    let n = coeffs.len();
    (1..=n)
        .map(|i| {
            let prod = eta[i - 1..n - 1].iter().fold(Q::one(), |a, b| a * b);
            let sign = if (n - i) % 2 == 0 { Q::one() } else { -Q::one() };
            sign * &coeffs[n - i] / prod
        })
        .collect()
}

/// The unique matrix with pattern `θ_P(ψ)` and `det(X + τ) = P_λ(X)`.
pub fn tau(psi: &NondegenerateCharacter, lambda: &InfinitesimalChar) -> Result<QMat, AlgebraError> {
    let n = lambda.n();
    if psi.eta.len() + 1 != n {
        return Err(AlgebraError::Precondition(format!("need {} eta values, got {}", n - 1, psi.eta.len())));
    }
    let mut t = QMat::zeros(n, n);
    for j in 0..n - 1 {
        t[(j + 1, j)] = psi.eta[j].clone();
    }
    for (i, v) in tau_last_column(&psi.eta, &lambda.coeffs).into_iter().enumerate() {
        t[(i, n - 1)] = v;
    }
    let got = t.char_coeffs();
    if got[1..] != lambda.coeffs[..] {
        return Err(AlgebraError::Precondition("det(X + tau) differs from P_lambda".into()));
    }
    Ok(t)
}

/// `τ` over a ring containing `eta[1..n-1]` and `c[1..n]`.
pub fn tau_formal(ring: &Arc<PolyRing>, n: usize) -> Vec<Vec<CommPoly>> {
    let eta = |j: usize| CommPoly::named(ring, &format!("eta[{j}]"));
    let c = |j: usize| CommPoly::named(ring, &format!("c[{j}]"));
    let mut m = vec![vec![CommPoly::zero(ring); n]; n];
    for j in 1..n {
        m[j][j - 1] = eta(j);
    }
    for i in 1..=n {
        let mut v = c(n + 1 - i);
        for k in i..n {
            v = &v * &eta(k).monomial_inverse().expect("monomial");
        }
        if (n - i) % 2 == 1 {
            v = -v;
        }
        m[i - 1][n - 1] = v;
    }
    m
}

/// Ring with `X`, `eta[1..n-1]` and `c[1..n]`.
pub fn tau_ring(n: usize) -> Arc<PolyRing> {
    PolyRing::new(
        std::iter::once("X".to_string())
            .chain((1..n).map(|j| format!("eta[{j}]")))
            .chain((1..=n).map(|j| format!("c[{j}]"))),
    )
}

/// Exact check that `det(X + τ_formal) = X^n + c_1 X^{n-1} + … + c_n`.
pub fn tau_formal_char_check(n: usize) -> bool {
    let ring = tau_ring(n);
    let x = CommPoly::named(&ring, "X");
    let t = tau_formal(&ring, n);
    let shifted: Vec<Vec<CommPoly>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { &t[i][j] + &x } else { t[i][j].clone() }).collect()).collect();
    let det = det_poly(&shifted, &ring);
    let mut expect = x.pow(n as u32);
    for j in 1..=n {
        expect = &expect + &(&CommPoly::named(&ring, &format!("c[{j}]")) * &x.pow((n - j) as u32));
    }
    det == expect
}

/// `ℛ(ξ)`: resultant of the characteristic polynomials of `ξ` and of its leading `(n-1)`-block.
pub fn resultant_stability(xi: &QMat) -> Q {
    let n = xi.rows();
    assert!(n >= 1 && xi.cols() == n);
    resultant(&xi.char_coeffs(), &xi.leading_block(n - 1).char_coeffs())
}

/// Solve for the last column of a matrix with pattern `θ_P(ψ)` whose characteristic data is `λ`.
///
/// The characteristic coefficients are affine in the free column, so this is a
/// linear system; an error means the solution is not unique.
pub fn solve_last_column(psi: &NondegenerateCharacter, lambda: &InfinitesimalChar) -> Result<Vec<Q>, AlgebraError> {
    let n = lambda.n();
    let base = {
        let mut m = QMat::zeros(n, n);
        for j in 0..n - 1 {
            m[(j + 1, j)] = psi.eta[j].clone();
        }
        m
    };
    let c0 = base.char_coeffs();
    let mut a = QMat::zeros(n, n);
    for k in 0..n {
        let mut m = base.clone();
        m[(k, n - 1)] = Q::one();
        let ck = m.char_coeffs();
        for r in 0..n {
            a[(r, k)] = &ck[r + 1] - &c0[r + 1];
        }
    }
    let rhs: Vec<Q> = (0..n).map(|r| &lambda.coeffs[r] - &c0[r + 1]).collect();
    a.solve(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use num_traits::Signed;
    use proptest::prelude::*;

    #[test]
    fn universal_char_poly_small() {
        let gl = Gl::new(2, ["X"]);
        let x = gl.sym_var("X");
        let expect = &(&x * &x) + &(&(&x * &(&gl.e(0, 0) + &gl.e(1, 1))) + &(&(&gl.e(0, 0) * &gl.e(1, 1)) - &(&gl.e(0, 1) * &gl.e(1, 0))));
        assert_eq!(char_poly_universal(&gl), expect);
        let gl1 = Gl::new(1, ["X"]);
        assert_eq!(char_poly_universal(&gl1), &gl1.sym_var("X") + &gl1.e(0, 0));
    }

    #[test]
    fn constant_term_is_determinant_gl3() {
        let gl = Gl::new(3, ["X"]);
        let c3 = invariant_coefficient(&gl, 3);
        // cofactor expansion along the first row
        let e = |i, j| gl.e(i, j);
        let minor = |a: usize, b: usize, c: usize, d: usize| &(&e(1, a) * &e(2, b)) - &(&e(1, c) * &e(2, d));
        let det = &(&(&e(0, 0) * &minor(1, 2, 2, 1)) - &(&e(0, 1) * &minor(0, 2, 2, 0))) + &(&e(0, 2) * &minor(0, 1, 1, 0));
        assert_eq!(c3, det);
    }

    #[test]
    fn scaling_examples() {
        let l = InfinitesimalChar::from_eigenvalues(vec![qi(1), qi(2)]);
        let s = scale_char(&qi(3), &l);
        assert_eq!(s.eigenvalues().unwrap(), &[qi(3), qi(6)]);
        assert_eq!(s.c(2), &qi(18));
        assert_eq!(scale_char(&Q::one(), &l), l);
        assert!(scale_char(&Q::zero(), &l).coeffs().iter().all(Zero::is_zero));
    }

    #[test]
    fn theta_patterns() {
        let psi = NondegenerateCharacter::new(vec![qi(5)]).unwrap();
        let p = theta_p(&psi, 2);
        assert_eq!(p[1][0], Some(qi(5)));
        assert_eq!(p[0][0], Some(Q::zero()));
        assert!(p[0][1].is_none() && p[1][1].is_none());
        let empty = theta_p(&NondegenerateCharacter::new(vec![]).unwrap(), 1);
        assert_eq!(empty, vec![vec![None]]);
    }

    #[test]
    fn tau_examples() {
        let psi = NondegenerateCharacter::new(vec![qi(1)]).unwrap();
        let l = InfinitesimalChar::from_eigenvalues(vec![qi(1), qi(-1)]);
        assert_eq!(tau(&psi, &l).unwrap(), QMat::from_i64(&[&[0, 1], &[1, 0]]));
        let one = InfinitesimalChar::from_coeffs(vec![q(7, 3)]);
        assert_eq!(tau(&NondegenerateCharacter::new(vec![]).unwrap(), &one).unwrap(), QMat::diag(&[q(7, 3)]));
        assert!(NondegenerateCharacter::new(vec![qi(1), Q::zero()]).is_err());
    }

    #[test]
    fn tau_formal_n4_display() {
        let ring = tau_ring(4);
        let t = tau_formal(&ring, 4);
        let v = |s: &str| CommPoly::named(&ring, s);
        let inv = |s: &str| v(s).monomial_inverse().unwrap();
        assert_eq!(t[0][3], -(&(&(&v("c[4]") * &inv("eta[1]")) * &inv("eta[2]")) * &inv("eta[3]")));
        assert_eq!(t[1][3], &(&v("c[3]") * &inv("eta[2]")) * &inv("eta[3]"));
        assert_eq!(t[2][3], -(&v("c[2]") * &inv("eta[3]")));
        assert_eq!(t[3][3], v("c[1]"));
        assert_eq!(t[1][0], v("eta[1]"));
        for n in 1..=5 {
            assert!(tau_formal_char_check(n), "n = {n}");
        }
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(resultant_stability(&QMat::zeros(2, 2)), Q::zero());
        let t = QMat::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(resultant_stability(&t).abs(), Q::one());
    }

    fn companion(f: &[Q]) -> QMat {
        // monic f = X^m + f_1 X^{m-1} + ... ; companion has char poly det(X - C) = f
        let m = f.len() - 1;
        let mut c = QMat::zeros(m, m);
        for i in 1..m {
            c[(i, i - 1)] = Q::one();
        }
        for i in 0..m {
            c[(i, m - 1)] = -f[m - i].clone();
        }
        c
    }

    proptest! {
        #[test]
        fn resultant_matches_companion_oracle(entries in proptest::collection::vec(-5i64..6, 9)) {
            let xi = QMat::from_rows(entries.chunks(3).map(|r| r.iter().map(|&x| qi(x)).collect()).collect());
            let f = xi.char_coeffs();
            let g = xi.leading_block(2).char_coeffs();
            // det(X + xi) has roots -a; det(g(C)) with C the companion of f gives ∏ g(root)
            let c = companion(&f);
            let mut gc = QMat::zeros(3, 3);
            let mut pw = QMat::identity(3);
            for k in (0..g.len()).rev() {
                gc = &gc + &pw.scale(&g[k]);
                pw = &pw * &c;
            }
            prop_assert_eq!(resultant_stability(&xi).abs(), gc.det().abs());
        }

        #[test]
        fn tau_is_unique(eta in proptest::collection::vec(1i64..5, 1..5), ev in proptest::collection::vec(-6i64..7, 5)) {
            let n = eta.len() + 1;
            let psi = NondegenerateCharacter::new(eta.iter().map(|&x| q(x, 2)).collect()).unwrap();
            let lambda = InfinitesimalChar::from_eigenvalues(ev[..n].iter().map(|&x| q(x, 3)).collect());
            let t = tau(&psi, &lambda).unwrap();
            let col = solve_last_column(&psi, &lambda).unwrap();
            for i in 0..n {
                prop_assert_eq!(&t[(i, n - 1)], &col[i]);
            }
        }

        #[test]
        fn scaling_routes_agree(ev in proptest::collection::vec(-6i64..7, 1..5), t in -4i64..5) {
            let l = InfinitesimalChar::from_eigenvalues(ev.iter().map(|&x| qi(x)).collect());
            let s = scale_char(&q(t, 3), &l);
            let via_ev = InfinitesimalChar::from_eigenvalues(s.eigenvalues().unwrap().to_vec());
            prop_assert_eq!(via_ev.coeffs(), s.coeffs());
        }
    }
}
