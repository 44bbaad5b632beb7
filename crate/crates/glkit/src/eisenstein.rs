//! Wave packets on the punctured plane and their SL₂ pseudo Eisenstein series.
//!
//! A packet is a finite superposition over log-radius of Gaussian lobes
//! `exp(−π|e^u w − r₀ĉ|²) e(r₀e^u⟨w, ŝ⟩)` together with their antipodes,
//! where `ŝ` is `ĉ` turned by a quarter. The weights `c(u) = e^u b(u)` are
//! sampled on a grid symmetric about `u = 0`, and `b` is a sum of Gaussians
//! in `u`. Each symmetric lobe pair is fixed by the symplectic Fourier
//! transform and `ℱ[G(e^u ·)] = e^{−2u} G(e^{−u} ·)`, so the packet is
//! self-dual exactly when `e^{2u} c(−u) = c(u)` on the grid.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::AlgebraError;

pub type Point = [f64; 2];
/// A 2×2 real matrix acting on row vectors from the right.
pub type Mat2 = [[f64; 2]; 2];

/// `𝒫_G(s) = s²(s² − 1)` for `SL₂`, coefficients lowest degree first.
pub const PG_COEFFS: [f64; 5] = [0.0, 0.0, -1.0, 0.0, 1.0];

/// Terms whose Gaussian exponent falls below `−SKIP` are dropped.
const SKIP: f64 = 60.0;

pub fn pg(s: f64) -> f64 {
    s * s * (s * s - 1.0)
}

fn e(x: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * x)
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

pub fn act(w: Point, g: &Mat2) -> Point {
    [w[0] * g[0][0] + w[1] * g[1][0], w[0] * g[0][1] + w[1] * g[1][1]]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [act(a[0], b), act(a[1], b)]
}

/// `n(x) = [[1, x], [0, 1]]`.
pub fn unipotent(x: f64) -> Mat2 {
    [[1.0, x], [0.0, 1.0]]
}

/// `diag(t, 1/t)`.
pub fn torus(t: f64) -> Mat2 {
    [[t, 0.0], [0.0, 1.0 / t]]
}

pub fn rotation(phi: f64) -> Mat2 {
    let (s, c) = phi.sin_cos();
    [[c, s], [-s, c]]
}

/// Probabilists' Hermite polynomial `He_k(z)`.
fn hermite(k: usize, z: f64) -> f64 {
    let (mut a, mut b) = (1.0, z);
    if k == 0 {
        return a;
    }
    for j in 1..k {
        let next = z * b - j as f64 * a;
        a = b;
        b = next;
    }
    b
}

/// `Σ_k p_k b^{(k)}(u)` for `b(u) = exp(−u²/2σ²)`.
fn gaussian_poly_derivative(coeffs: &[f64], sigma: f64, u: f64) -> f64 {
    let z = u / sigma;
    let b = (-0.5 * z * z).exp();
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, p)| **p != 0.0)
        .map(|(k, p)| p * (-1.0f64 / sigma).powi(k as i32) * hermite(k, z))
        .sum::<f64>()
        * b
}

/// Log-radial window `c(u) = e^u Σ a_i exp(−(u − μ_i)²/2σ²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogWindow {
    pub sigma: f64,
    pub components: Vec<(f64, f64)>,
}

impl LogWindow {
    pub fn value(&self, u: f64) -> f64 {
        self.apply(&[1.0], u)
    }

    /// `P(D − 1) c` with `D = d/du`; on `e^u b` this is `e^u P(D) b`.
    pub fn apply(&self, coeffs: &[f64], u: f64) -> f64 {
        u.exp() * self.components.iter().map(|&(mu, a)| a * gaussian_poly_derivative(coeffs, self.sigma, u - mu)).sum::<f64>()
    }

    /// Weights of `½(f + ℱf)`: the image of component `μ` sits at `−μ`.
    pub fn symmetrized(&self) -> Self {
        let mut components: Vec<(f64, f64)> = self.components.iter().flat_map(|&(mu, a)| [(mu, 0.5 * a), (-mu, 0.5 * a)]).collect();
        components.sort_by(|x, y| x.0.total_cmp(&y.0));
        components.dedup_by(|x, y| {
            if x.0 == y.0 {
                y.1 += x.1;
                true
            } else {
                false
            }
        });
        Self { sigma: self.sigma, components }
    }

    /// Interval of `u` outside which every component is below `10^{-12}` of its peak.
    pub fn support(&self) -> (f64, f64) {
        let reach = self.sigma * (2.0 * 12.0 * std::f64::consts::LN_10).sqrt();
        let lo = self.components.iter().map(|c| c.0).fold(f64::INFINITY, f64::min) - reach;
        let hi = self.components.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max) + reach;
        (lo, hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Series {
    /// The symmetrized packet `f`.
    Raw,
    /// `f♭ = 𝒫_G(−(ℰ + 1)) f`.
    Flat,
}

#[derive(Clone, Debug)]
pub struct PacketConfig {
    /// The parameter `T`.
    pub t: f64,
    /// Width of the log-radial window.
    pub sigma: f64,
    /// Log-radial offset of the unsymmetrized window.
    pub offset: f64,
    /// Direction of the lobe centre.
    pub angle: f64,
    /// Grid nodes per lobe width.
    pub resolution: f64,
    /// Allowed log-radial reach after symmetrization.
    pub support_slack: f64,
}

impl PacketConfig {
    pub fn new(t: f64) -> Self {
        Self { t, sigma: 0.15, offset: 0.0, angle: PI / 2.0, resolution: 2.0, support_slack: 1.5 }
    }
}

#[derive(Clone, Debug)]
pub struct WavePacket {
    pub t: f64,
    pub r0: f64,
    pub window: LogWindow,
    pub center: Point,
    pub momentum: Point,
    pub step: f64,
    pub nodes: Vec<f64>,
    raw: Vec<f64>,
    flat: Vec<f64>,
    /// Truncation radius for lattice sums.
    pub radius: f64,
    /// Per-point decay bound at `radius`.
    pub decay_tol: f64,
}

/// One Gaussian lobe: `exp(−π|e^u w − r₀ĉ|²) e(r₀e^u⟨w, ŝ⟩)`.
#[derive(Clone, Copy, Debug)]
struct Lobe {
    scale: f64,
    center: Point,
    momentum: Point,
}

impl Lobe {
    fn exponent(&self, w: Point, r0: f64) -> f64 {
        let d = [self.scale * w[0] - r0 * self.center[0], self.scale * w[1] - r0 * self.center[1]];
        -PI * dot(d, d)
    }

    fn eval(&self, w: Point, r0: f64) -> C64 {
        let ex = self.exponent(w, r0);
        if ex < -SKIP {
            return C64::new(0.0, 0.0);
        }
        ex.exp() * e(r0 * self.scale * dot(w, self.momentum))
    }

    /// `∫_ℝ lobe(a + x d) e(−m x) dx` in closed form.
    fn line_integral(&self, a: Point, d: Point, m: f64, r0: f64) -> C64 {
        let s = self.scale;
        let big_a = [s * a[0] - r0 * self.center[0], s * a[1] - r0 * self.center[1]];
        let big_b = [s * d[0], s * d[1]];
        let alpha = dot(big_b, big_b);
        let cross = big_a[0] * big_b[1] - big_a[1] * big_b[0];
        let beta = dot(big_a, big_b);
        let omega = r0 * s * dot(d, self.momentum) - m;
        let ex = -PI * (cross * cross + omega * omega) / alpha;
        if ex < -SKIP {
            return C64::new(0.0, 0.0);
        }
        ex.exp() / alpha.sqrt() * e(r0 * s * dot(a, self.momentum) - omega * beta / alpha)
    }

    /// `ℱ lobe(w)` by separable trapezoid quadrature.
    fn fourier_quadrature(&self, w: Point, r0: f64) -> C64 {
        let a = self.scale * self.scale;
        let p0 = [r0 * self.center[0] / self.scale, r0 * self.center[1] / self.scale];
        let k = [r0 * self.scale * self.momentum[0], r0 * self.scale * self.momentum[1]];
        // ℱφ(x, y) = ∫∫ φ(u, v) e(xv − yu) du dv
        let first = gaussian_moment_quadrature(a, p0[0], k[0] - w[1]);
        let second = gaussian_moment_quadrature(a, p0[1], k[1] + w[0]);
        first * second
    }
}

/// `∫ exp(−πa(x − x₀)²) e(νx) dx` by the trapezoid rule.
fn gaussian_moment_quadrature(a: f64, x0: f64, nu: f64) -> C64 {
    let half = 7.0 / a.sqrt();
    let step = 1.0 / (nu.abs() + 8.0 * a.sqrt());
    let n = (2.0 * half / step).ceil() as usize;
    let h = 2.0 * half / n as f64;
    (0..=n)
        .map(|i| {
            let x = x0 - half + i as f64 * h;
            (-PI * a * (x - x0).powi(2)).exp() * e(nu * x)
        })
        .sum::<C64>()
        * h
}

/// `∫∫ φ₁ φ̄₂` for two lobes.
fn lobe_overlap(l1: &Lobe, l2: &Lobe, r0: f64) -> C64 {
    let (a1, a2) = (l1.scale * l1.scale, l2.scale * l2.scale);
    let p1 = [r0 * l1.center[0] / l1.scale, r0 * l1.center[1] / l1.scale];
    let p2 = [r0 * l2.center[0] / l2.scale, r0 * l2.center[1] / l2.scale];
    let k1 = [r0 * l1.scale * l1.momentum[0], r0 * l1.scale * l1.momentum[1]];
    let k2 = [r0 * l2.scale * l2.momentum[0], r0 * l2.scale * l2.momentum[1]];
    let big_a = a1 + a2;
    let bar = [(a1 * p1[0] + a2 * p2[0]) / big_a, (a1 * p1[1] + a2 * p2[1]) / big_a];
    let dp = [p1[0] - p2[0], p1[1] - p2[1]];
    let kappa = [k1[0] - k2[0], k1[1] - k2[1]];
    let ex = -PI * (a1 * a2 / big_a * dot(dp, dp) + dot(kappa, kappa) / big_a);
    if ex < -SKIP {
        return C64::new(0.0, 0.0);
    }
    ex.exp() / big_a * e(dot(bar, kappa))
}

impl WavePacket {
    pub fn build(config: &PacketConfig) -> Result<Self, AlgebraError> {
        if config.t < 4.0 {
            return Err(AlgebraError::Precondition(format!("T = {} below 4", config.t)));
        }
        let raw_window = LogWindow { sigma: config.sigma, components: vec![(config.offset, 1.0)] };
        let window = raw_window.symmetrized();
        let (lo, hi) = window.support();
        let reach = lo.abs().max(hi.abs());
        if reach > config.support_slack {
            return Err(AlgebraError::Precondition(format!(
                "symmetrized log-radial support [{lo:.3}, {hi:.3}] exceeds slack {}",
                config.support_slack
            )));
        }
        let r0 = (config.t / (2.0 * PI)).sqrt();
        let step = (1.0 / (config.resolution * r0)).min(config.sigma / 5.0);
        let half = ((window.components.iter().map(|c| c.0.abs()).fold(0.0, f64::max) + 10.0 * config.sigma) / step).ceil() as i64;
        let nodes: Vec<f64> = (-half..=half).map(|j| j as f64 * step).collect();
        let (s, c) = config.angle.sin_cos();
        let mut packet = Self {
            t: config.t,
            r0,
            center: [c, s],
            momentum: [-s, c],
            step,
            raw: nodes.iter().map(|&u| step * window.value(u)).collect(),
            flat: nodes.iter().map(|&u| step * window.apply(&PG_COEFFS, u)).collect(),
            window,
            nodes,
            radius: 0.0,
            decay_tol: 1e-12,
        };
        for series in [Series::Raw, Series::Flat] {
            let n2 = packet.l2_norm_sq(series);
            if n2 > 0.0 {
                let k = n2.sqrt().recip();
                packet.weights_mut(series).iter_mut().for_each(|x| *x *= k);
            }
        }
        packet.radius = packet.certified_radius();
        Ok(packet)
    }

    fn weights_mut(&mut self, series: Series) -> &mut Vec<f64> {
        match series {
            Series::Raw => &mut self.raw,
            Series::Flat => &mut self.flat,
        }
    }

    pub fn weights(&self, series: Series) -> &[f64] {
        match series {
            Series::Raw => &self.raw,
            Series::Flat => &self.flat,
        }
    }

    fn lobes(&self, u: f64) -> [Lobe; 2] {
        let scale = u.exp();
        let neg = |p: Point| [-p[0], -p[1]];
        [
            Lobe { scale, center: self.center, momentum: self.momentum },
            Lobe { scale, center: neg(self.center), momentum: neg(self.momentum) },
        ]
    }

    fn terms(&self, series: Series) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights(series).iter().copied()).filter(|(_, c)| *c != 0.0)
    }

    pub fn eval(&self, series: Series, w: Point) -> C64 {
        let rho = norm(w);
        let mut acc = C64::new(0.0, 0.0);
        for (u, c) in self.terms(series) {
            let gap = u.exp() * rho - self.r0;
            if PI * gap * gap > SKIP {
                continue;
            }
            for lobe in self.lobes(u) {
                acc += c * lobe.eval(w, self.r0);
            }
        }
        acc
    }

    /// `[f, f_x, f_y, f_xx, f_xy, f_yy]` at `w`.
    pub fn derivatives(&self, series: Series, w: Point) -> [C64; 6] {
        let mut out = [C64::new(0.0, 0.0); 6];
        for (u, c) in self.terms(series) {
            for lobe in self.lobes(u) {
                let v = c * lobe.eval(w, self.r0);
                let s = lobe.scale;
                let i = C64::new(0.0, 1.0);
                let gx = -2.0 * PI * s * (s * w[0] - self.r0 * lobe.center[0]) + i * 2.0 * PI * self.r0 * s * lobe.momentum[0];
                let gy = -2.0 * PI * s * (s * w[1] - self.r0 * lobe.center[1]) + i * 2.0 * PI * self.r0 * s * lobe.momentum[1];
                let hd = -2.0 * PI * s * s;
                out[0] += v;
                out[1] += gx * v;
                out[2] += gy * v;
                out[3] += (hd + gx * gx) * v;
                out[4] += gx * gy * v;
                out[5] += (hd + gy * gy) * v;
            }
        }
        out
    }

    /// Radial Euler operator `ℰf = x f_x + y f_y`.
    pub fn euler(&self, series: Series, w: Point) -> C64 {
        let d = self.derivatives(series, w);
        w[0] * d[1] + w[1] * d[2]
    }

    /// `f♯(w) = Σ_{c ≥ 1} f♭(cw)`, truncated at the certified radius.
    pub fn sharp(&self, w: Point) -> C64 {
        let rho = norm(w);
        if rho == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let cmax = (self.radius / rho).floor() as i64;
        (1..=cmax).map(|c| self.eval(Series::Flat, [c as f64 * w[0], c as f64 * w[1]])).sum()
    }

    /// `∫_ℝ f(a + x d) e(−m x) dx`.
    pub fn line_integral(&self, series: Series, a: Point, d: Point, m: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (u, c) in self.terms(series) {
            for lobe in self.lobes(u) {
                acc += c * lobe.line_integral(a, d, m, self.r0);
            }
        }
        acc
    }

    /// `ℱf(w)` by quadrature, lobe by lobe.
    pub fn fourier_quadrature(&self, series: Series, w: Point) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (u, c) in self.terms(series) {
            if c.abs() < 1e-300 {
                continue;
            }
            for lobe in self.lobes(u) {
                acc += c * lobe.fourier_quadrature(w, self.r0);
            }
        }
        acc
    }

    pub fn l2_norm_sq(&self, series: Series) -> f64 {
        let terms: Vec<(f64, f64)> = self.terms(series).collect();
        let mut acc = C64::new(0.0, 0.0);
        for &(u1, c1) in &terms {
            for &(u2, c2) in &terms {
                for l1 in self.lobes(u1) {
                    for l2 in self.lobes(u2) {
                        acc += c1 * c2 * lobe_overlap(&l1, &l2, self.r0);
                    }
                }
            }
        }
        acc.re
    }

    /// Upper bound for `|f(w)|` over `|w| ≥ ρ`, both series.
    pub fn decay_bound(&self, rho: f64) -> f64 {
        [Series::Raw, Series::Flat]
            .iter()
            .map(|&s| {
                self.terms(s)
                    .map(|(u, c)| {
                        let gap = (u.exp() * rho - self.r0).max(0.0);
                        2.0 * c.abs() * (-PI * gap * gap).exp()
                    })
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    fn certified_radius(&self) -> f64 {
        let mut rho = self.r0;
        while self.decay_bound(rho) > self.decay_tol {
            rho += 0.01;
        }
        rho
    }

    /// Largest momentum `r₀e^u + 8e^u` over active nodes.
    fn momentum_reach(&self, series: Series) -> f64 {
        self.terms(series).map(|(u, _)| (self.r0 + 8.0) * u.exp()).fold(0.0, f64::max)
    }

    /// `∫_ℝ |t|^s f(tv) dt` by quadrature in `log t`.
    pub fn mellin_quadrature(&self, series: Series, v: Point, s: f64) -> f64 {
        let lo = -30.0;
        let hi = (self.radius / norm(v)).ln() + 1.0;
        let step = 0.05 / self.r0;
        let n = ((hi - lo) / step).ceil() as usize;
        let h = (hi - lo) / n as f64;
        let sum: f64 = (0..=n)
            .map(|i| {
                let tau = lo + i as f64 * h;
                let t = tau.exp();
                let wgt = if i == 0 || i == n { 0.5 } else { 1.0 };
                wgt * ((s + 1.0) * tau).exp() * self.eval(series, [t * v[0], t * v[1]]).re
            })
            .sum();
        2.0 * h * sum
    }

    /// `Σ_j c_j e^{−(1+s)u_j}`, the Mellin weight of the packet along its axis.
    pub fn mellin_weight(&self, series: Series, s: f64) -> f64 {
        self.terms(series).map(|(u, c)| c * (-(1.0 + s) * u).exp()).sum()
    }
}

/// `ℰf(w) = d/dε f(e^ε w)|₀` by Richardson-extrapolated central differences.
pub fn euler_difference(f: &dyn Fn(Point) -> C64, w: Point) -> C64 {
    let central = |h: f64| {
        let (p, m) = (h.exp(), (-h).exp());
        (f([p * w[0], p * w[1]]) - f([m * w[0], m * w[1]])) / (2.0 * h)
    };
    let h = 1e-3;
    (4.0 * central(h / 2.0) - central(h)) / 3.0
}

/// `ℱf(w) = ∫∫ f(u, v) e(xv − yu) du dv` over the square of side `2·half` about `center`.
pub fn symplectic_fourier(f: &(dyn Fn(Point) -> C64 + Sync), w: Point, center: Point, half: f64, n: usize) -> C64 {
    let h = 2.0 * half / n as f64;
    (0..=n)
        .into_par_iter()
        .map(|i| {
            let u = center[0] - half + i as f64 * h;
            (0..=n)
                .map(|j| {
                    let v = center[1] - half + j as f64 * h;
                    f([u, v]) * e(w[0] * v - w[1] * u)
                })
                .sum::<C64>()
        })
        .sum::<C64>()
        * h
        * h
}

/// Nonzero `v ∈ ℤ²` with `|vg| ≤ radius`, in lexicographic order.
pub fn lattice_points(g: &Mat2, radius: f64) -> Vec<([i64; 2], Point)> {
    let (r0, r1) = (g[0], g[1]);
    let det = (r0[0] * r1[1] - r0[1] * r1[0]).abs();
    let n1 = dot(r1, r1);
    let amax = (radius * n1.sqrt() / det).floor() as i64;
    let mut out = Vec::new();
    for a in -amax..=amax {
        let af = a as f64;
        // |a r0 + b r1|² ≤ R² as a quadratic in b
        let bq = af * dot(r0, r1);
        let cq = af * af * dot(r0, r0) - radius * radius;
        let disc = bq * bq - n1 * cq;
        if disc < 0.0 {
            continue;
        }
        let lo = ((-bq - disc.sqrt()) / n1).ceil() as i64;
        let hi = ((-bq + disc.sqrt()) / n1).floor() as i64;
        for b in lo..=hi {
            if a == 0 && b == 0 {
                continue;
            }
            let w = [af * r0[0] + b as f64 * r1[0], af * r0[1] + b as f64 * r1[1]];
            out.push(([a, b], w));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    /// `Σ*_{v primitive} f♯(vg)`.
    PrimitiveSharp,
    /// `Σ_{v ≠ 0} f♭(vg)`.
    FullFlat,
}

pub fn eisenstein_eval(packet: &WavePacket, series: Series, g: &Mat2, mode: Mode) -> C64 {
    let points = lattice_points(g, packet.radius);
    match mode {
        Mode::FullFlat => points.iter().map(|(_, w)| packet.eval(series, *w)).sum(),
        Mode::PrimitiveSharp => points
            .iter()
            .filter(|(v, _)| v[0].gcd(&v[1]) == 1)
            .map(|(_, w)| {
                let rho = norm(*w);
                let cmax = (packet.radius / rho).floor() as i64;
                (1..=cmax).map(|c| packet.eval(series, [c as f64 * w[0], c as f64 * w[1]])).sum::<C64>()
            })
            .sum(),
    }
}

/// Positive divisors of `ℓ`, the `c`-terms of the `ℓ`-th coefficient.
pub fn c_terms(l: i64) -> Vec<i64> {
    let l = l.abs();
    (1..=l).filter(|c| l % c == 0).collect()
}

#[derive(Clone, Debug)]
pub struct FourierData {
    /// Constant term `Σ_{b≠0} f((0,b)h) + Σ_{a≠0} ∫ f((a,x)h) dx`.
    pub constant: C64,
    /// `Σ_t (f + ℱf)((0,t)h)` with `ℱf = f`.
    pub constant_poisson: C64,
    /// `W(ℓ, h)` for `0 < |ℓ| ≤ truncation`.
    pub coefficients: BTreeMap<i64, C64>,
    pub c_max: i64,
    pub l_max: i64,
    pub truncation: i64,
    /// `Σ_{|ℓ| > truncation} |W(ℓ, h)|`.
    pub tail_bound: f64,
}

impl FourierData {
    pub fn energy(&self) -> f64 {
        self.constant.norm_sqr() + self.coefficients.values().map(|w| w.norm_sqr()).sum::<f64>()
    }

    /// `Ψ_N + Σ_{0<|ℓ|≤L} W(ℓ) e(ℓx)`.
    pub fn reconstruct(&self, x: f64) -> C64 {
        self.constant + self.coefficients.iter().map(|(&l, w)| w * e(l as f64 * x)).sum::<C64>()
    }
}

/// Fourier expansion of `x ↦ Ψ(n(x)h)`, with
/// `W(ℓ, h) = Σ_{c | ℓ} ∫ f((c, x)h) e(−ℓx/c) dx` over nonzero divisors `c`.
pub fn fourier_expand(packet: &WavePacket, series: Series, h: &Mat2, truncation: i64) -> FourierData {
    let (h0, h1) = (h[0], h[1]);
    let n1 = norm(h1);
    let det = (h0[0] * h1[1] - h0[1] * h1[0]).abs();
    let c_max = (packet.radius * n1 / det).floor() as i64;
    let m_max = (packet.momentum_reach(series) * n1).ceil() as i64 + 1;
    let rows: Vec<Vec<(i64, C64)>> = (1..=c_max)
        .into_par_iter()
        .map(|c| {
            let a = [c as f64 * h0[0], c as f64 * h0[1]];
            (-m_max..=m_max).map(|m| (m, 2.0 * packet.line_integral(series, a, h1, m as f64))).collect()
        })
        .collect();
    let mut all: BTreeMap<i64, C64> = BTreeMap::new();
    let mut constant: C64 = line_sum(packet, series, h1, false);
    for (c, row) in (1..=c_max).zip(&rows) {
        for &(m, w) in row {
            if m == 0 {
                constant += w;
            } else {
                *all.entry(c * m).or_default() += w;
            }
        }
    }
    let constant_poisson = 2.0 * line_sum(packet, series, h1, true);
    let tail_bound = all.iter().filter(|(l, _)| l.abs() > truncation).map(|(_, w)| w.norm()).sum();
    let coefficients = all.into_iter().filter(|(l, _)| l.abs() <= truncation).collect();
    FourierData { constant, constant_poisson, coefficients, c_max, l_max: c_max * m_max, truncation, tail_bound }
}

/// `Σ_b f(b h₁)`, over `b ≠ 0` unless `with_origin`.
fn line_sum(packet: &WavePacket, series: Series, h1: Point, with_origin: bool) -> C64 {
    let bmax = (packet.radius / norm(h1)).floor() as i64;
    let mut acc: C64 = (1..=bmax).map(|b| 2.0 * packet.eval(series, [b as f64 * h1[0], b as f64 * h1[1]])).sum();
    if with_origin {
        acc += packet.eval(series, [0.0, 0.0]);
    }
    acc
}

#[derive(Clone, Debug, Serialize)]
pub struct FourierCheck {
    pub t: f64,
    pub samples: usize,
    pub l_max: i64,
    /// `max |W(ℓ) − ∫₀¹ Ψ(n(x)h) e(−ℓx) dx|`.
    pub coefficient_error: f64,
    /// `max_x |Σ_{|ℓ|≤L} W(ℓ)e(ℓx) − Ψ(n(x)h)|`.
    pub reconstruction_error: f64,
    pub tail_bound: f64,
    pub parseval_rel: f64,
    pub poisson_error: f64,
}

/// Validates the closed-form coefficients against a direct DFT of `Ψ(n(x)h)`.
pub fn fourier_check(packet: &WavePacket, h: &Mat2, t: f64, truncation: i64) -> FourierCheck {
    let full = fourier_expand(packet, Series::Flat, h, i64::MAX);
    let cut = fourier_expand(packet, Series::Flat, h, truncation);
    let n = ((2 * full.l_max + 2) as usize).next_power_of_two().max(64);
    let samples: Vec<C64> = (0..n)
        .into_par_iter()
        .map(|k| eisenstein_eval(packet, Series::Flat, &mat_mul(&unipotent(k as f64 / n as f64), h), Mode::FullFlat))
        .collect();
    let mut spectrum = samples.clone();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut spectrum);
    let coeff = |l: i64| spectrum[l.rem_euclid(n as i64) as usize] / n as f64;
    let mut coefficient_error = (coeff(0) - full.constant).norm();
    for l in 1..=(n as i64 / 2 - 1) {
        for l in [l, -l] {
            let w = full.coefficients.get(&l).copied().unwrap_or_default();
            coefficient_error = coefficient_error.max((coeff(l) - w).norm());
        }
    }
    let reconstruction_error = samples
        .iter()
        .enumerate()
        .map(|(k, psi)| (cut.reconstruct(k as f64 / n as f64) - psi).norm())
        .fold(0.0, f64::max);
    let direct: f64 = samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / n as f64;
    let parseval_rel = (direct - full.energy()).abs() / direct.max(f64::MIN_POSITIVE);
    let poisson_error = (full.constant - full.constant_poisson).norm() / full.constant.norm().max(1.0);
    FourierCheck {
        t,
        samples: n,
        l_max: full.l_max,
        coefficient_error,
        reconstruction_error,
        tail_bound: cut.tail_bound,
        parseval_rel,
        poisson_error,
    }
}

/// Compact `Ω = {a(y^{1/2}) k(φ)}` with `y ∈ [0.8, 1.25]`, `φ ∈ [0, π)`, midpoint weights summing to 1.
pub fn omega_grid(ny: usize, nphi: usize) -> Vec<(Mat2, f64)> {
    let (ylo, yhi) = (0.8f64.ln(), 1.25f64.ln());
    let w = 1.0 / (ny * nphi) as f64;
    let mut out = Vec::new();
    for i in 0..ny {
        let y = (ylo + (i as f64 + 0.5) * (yhi - ylo) / ny as f64).exp();
        for j in 0..nphi {
            let phi = (j as f64 + 0.5) * PI / nphi as f64;
            out.push((mat_mul(&torus(y.sqrt()), &rotation(phi)), w));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileRow {
    pub t: f64,
    pub measured: f64,
    pub i0: f64,
    pub i1: f64,
    pub envelope: f64,
    pub ratio: f64,
    pub normalized: f64,
}

/// `∫_Ω ∫₀¹ |Ψ|²(n(x) diag(t,1/t) g) dx dg` through Parseval at each `t`.
pub fn local_l2_profile(packet: &WavePacket, series: Series, tgrid: &[f64], omega: &[(Mat2, f64)]) -> Vec<ProfileRow> {
    let measure = |t: f64| {
        omega.iter().fold((0.0, 0.0), |(i0, i1), (g, w)| {
            let data = fourier_expand(packet, series, &mat_mul(&torus(t), g), i64::MAX);
            let rest: f64 = data.coefficients.values().map(|c| c.norm_sqr()).sum();
            (i0 + w * data.constant.norm_sqr(), i1 + w * rest)
        })
    };
    let (b0, b1) = measure(1.0);
    let base = b0 + b1;
    tgrid
        .par_iter()
        .map(|&t| {
            let (i0, i1) = measure(t);
            let measured = i0 + i1;
            let envelope = t * t * base;
            ProfileRow { t, measured, i0, i1, envelope, ratio: measured / envelope, normalized: measured / base }
        })
        .collect()
}

/// Parses `a:b:n` (geometric), `a,b,…` or `auto` (nine geometric points in `[1, T^{1/2}]`).
pub fn parse_tgrid(spec: &str, t_param: f64) -> Result<Vec<f64>, AlgebraError> {
    let bad = || AlgebraError::Precondition(format!("bad t-grid '{spec}'"));
    let geometric = |a: f64, b: f64, n: usize| -> Vec<f64> {
        if n == 1 {
            return vec![a];
        }
        (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
    };
    let grid = if spec == "auto" {
        geometric(1.0, t_param.sqrt(), 9)
    } else if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let a: f64 = parts[0].parse().map_err(|_| bad())?;
        let b: f64 = parts[1].parse().map_err(|_| bad())?;
        let n: usize = parts[2].parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        geometric(a, b, n)
    } else {
        spec.split(',').filter(|s| !s.trim().is_empty()).map(|s| s.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if grid.iter().any(|t| !(t.is_finite() && *t >= 1.0)) {
        return Err(bad());
    }
    Ok(grid)
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub sup_norm: f64,
    pub self_dual_error: f64,
    pub raw_self_dual_error: f64,
    pub line_integral_max: f64,
    pub raw_line_integral_max: f64,
    pub angular_leakage: f64,
    pub even_error: f64,
}

/// Checks (i)–(iii) on `f♭`.
pub fn enforce_hypotheses(packet: &WavePacket) -> HypothesisReport {
    let r0 = packet.r0;
    let sigma = packet.window.sigma;
    let radii: Vec<f64> = [-2.0, 0.0, 2.0].iter().map(|k| r0 * (k * sigma).exp()).collect();
    let n = ((16.0 * packet.t) as usize).next_power_of_two();
    let mut sup_norm: f64 = 0.0;
    let mut angular_leakage: f64 = 0.0;
    let cutoff = 4.0 * packet.t;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    for &rho in &radii {
        let mut buf: Vec<C64> = (0..n)
            .into_par_iter()
            .map(|k| {
                let th = 2.0 * PI * k as f64 / n as f64;
                packet.eval(Series::Flat, [rho * th.cos(), rho * th.sin()])
            })
            .collect();
        sup_norm = buf.iter().map(|z| z.norm()).fold(sup_norm, f64::max);
        fft.process(&mut buf);
        let total: f64 = buf.iter().map(|z| z.norm_sqr()).sum();
        let high: f64 = buf
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let k = *k as i64;
                let mode = if k < n as i64 / 2 { k } else { k - n as i64 };
                mode.abs() as f64 > cutoff
            })
            .map(|(_, z)| z.norm_sqr())
            .sum();
        angular_leakage = angular_leakage.max(high / total);
    }
    let c = packet.center;
    let tangent = packet.momentum;
    let samples: Vec<Point> = [(-0.3, -1.0), (0.0, 0.0), (0.3, 1.0), (0.15, -0.5), (-0.15, 0.5), (0.0, 2.0)]
        .iter()
        .flat_map(|&(lr, off)| {
            let rho = r0 * f64::exp(lr);
            let p = [rho * c[0] + off * tangent[0], rho * c[1] + off * tangent[1]];
            [p, [-p[0], -p[1]]]
        })
        .collect();
    let dual_error = |series: Series| {
        let sup = samples.iter().map(|&w| packet.eval(series, w).norm()).fold(0.0, f64::max);
        samples
            .par_iter()
            .map(|&w| (packet.fourier_quadrature(series, w) - packet.eval(series, w)).norm())
            .reduce(|| 0.0, f64::max)
            / sup
    };
    let line_max = |series: Series| {
        let sup = samples.iter().map(|&w| packet.eval(series, w).norm()).fold(0.0, f64::max);
        (0..32)
            .map(|k| {
                let th = PI * k as f64 / 32.0;
                packet.line_integral(series, [0.0, 0.0], [th.cos(), th.sin()], 0.0).norm()
            })
            .fold(0.0, f64::max)
            / sup
    };
    let even_error = samples.iter().map(|&w| (packet.eval(Series::Flat, w) - packet.eval(Series::Flat, [-w[0], -w[1]])).norm()).fold(0.0, f64::max) / sup_norm;
    HypothesisReport {
        sup_norm,
        self_dual_error: dual_error(Series::Flat),
        raw_self_dual_error: dual_error(Series::Raw),
        line_integral_max: line_max(Series::Flat),
        raw_line_integral_max: line_max(Series::Raw),
        angular_leakage,
        even_error,
    }
}

/// `max_s |M[f♭](s) / (𝒫_G(s) M[f](s)) − 1|` with normalizations removed, over `s ∈ {0.5, 1.5, 2, 2.5}`.
pub fn mellin_oracle(packet: &WavePacket) -> f64 {
    let gain = packet.mellin_weight(Series::Flat, 2.0) / (pg(2.0) * packet.mellin_weight(Series::Raw, 2.0));
    [0.5, 1.5, 2.0, 2.5]
        .iter()
        .map(|&s| {
            let flat = packet.mellin_quadrature(Series::Flat, packet.center, s);
            let raw = packet.mellin_quadrature(Series::Raw, packet.center, s);
            (flat / (gain * pg(s) * raw) - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct EisensteinConfig {
    pub t: f64,
    pub tgrid: Vec<f64>,
    pub truncation: i64,
    pub samples: usize,
    pub seed: u64,
}

impl EisensteinConfig {
    pub fn new(t: f64) -> Self {
        Self { t, tgrid: parse_tgrid("auto", t).expect("auto grid"), truncation: i64::MAX, samples: 20, seed: 7 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EisensteinSummary {
    pub t: f64,
    pub r0: f64,
    pub sigma: f64,
    pub nodes: usize,
    pub radius: f64,
    pub decay_tol: f64,
    pub hypotheses: HypothesisReport,
    pub mellin_rel_error: f64,
    pub mode_rel_error: f64,
    pub invariance_error: f64,
    pub fourier: Vec<FourierCheck>,
    pub profile: Vec<ProfileRow>,
    pub max_normalized: f64,
    pub envelope_top: f64,
    pub decay_t: f64,
    pub decay_ratio: f64,
    pub control_top: f64,
}

impl EisensteinSummary {
    pub fn hypotheses_pass(&self) -> bool {
        let h = &self.hypotheses;
        h.self_dual_error <= 1e-8 && h.line_integral_max <= 1e-8 && h.angular_leakage < 1e-6 && h.even_error <= 1e-12
    }

    pub fn series_pass(&self) -> bool {
        self.mellin_rel_error <= 1e-6 && self.mode_rel_error <= 1e-6 && self.invariance_error <= 1e-9
    }

    pub fn fourier_pass(&self) -> bool {
        self.fourier.iter().all(|f| {
            f.coefficient_error <= 1e-3 && f.reconstruction_error <= 1e-3 + f.tail_bound && f.parseval_rel <= 1e-3 && f.poisson_error <= 1e-6
        })
    }

    pub fn growth_pass(&self) -> bool {
        self.max_normalized <= 20.0 && self.envelope_top > self.t / 4.0 && self.decay_ratio < 1e-6
    }

    pub fn all_pass(&self) -> bool {
        self.hypotheses_pass() && self.series_pass() && self.fourier_pass() && self.growth_pass()
    }
}

/// A random `n(x) a(y^{1/2}) k(θ)` of bounded height.
pub fn random_sl2(rng: &mut impl Rng) -> Mat2 {
    let x = rng.gen_range(-0.5..0.5);
    let y: f64 = rng.gen_range(0.6..1.6);
    let th = rng.gen_range(0.0..2.0 * PI);
    mat_mul(&mat_mul(&unipotent(x), &torus(y.sqrt())), &rotation(th))
}

pub fn eisenstein_summary(config: &EisensteinConfig) -> Result<EisensteinSummary, AlgebraError> {
    let packet = WavePacket::build(&PacketConfig::new(config.t))?;
    let hypotheses = enforce_hypotheses(&packet);
    let mellin_rel_error = mellin_oracle(&packet);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let gs: Vec<Mat2> = (0..config.samples).map(|_| random_sl2(&mut rng)).collect();
    let mode_rel_error = gs
        .par_iter()
        .map(|g| {
            let flat = eisenstein_eval(&packet, Series::Flat, g, Mode::FullFlat);
            let sharp = eisenstein_eval(&packet, Series::Flat, g, Mode::PrimitiveSharp);
            (flat - sharp).norm() / flat.norm().max(1e-12)
        })
        .reduce(|| 0.0, f64::max);
    let gammas: [Mat2; 3] = [[[0.0, -1.0], [1.0, 0.0]], [[1.0, 1.0], [0.0, 1.0]], [[2.0, 1.0], [1.0, 1.0]]];
    let invariance_error = gs
        .iter()
        .take(4)
        .flat_map(|g| gammas.iter().map(move |gm| (g, gm)))
        .map(|(g, gm)| {
            let a = eisenstein_eval(&packet, Series::Flat, g, Mode::FullFlat);
            let b = eisenstein_eval(&packet, Series::Flat, &mat_mul(gm, g), Mode::FullFlat);
            (a - b).norm() / a.norm().max(1e-12)
        })
        .fold(0.0, f64::max);

    let omega = omega_grid(3, (6.0 * PI * packet.r0).ceil() as usize);
    let fourier: Vec<FourierCheck> = [(1.0, 0), (2.0, 7)]
        .iter()
        .map(|&(t, k)| fourier_check(&packet, &mat_mul(&torus(t), &omega[k].0), t, config.truncation))
        .collect();

    let top = config.t.sqrt();
    let profile = local_l2_profile(&packet, Series::Flat, &config.tgrid, &omega);
    let max_normalized = profile.iter().filter(|r| r.t <= top * (1.0 + 1e-12)).map(|r| r.normalized).fold(0.0, f64::max);
    let envelope_top = top * top;
    let decay_t = 4.0 * top;
    let decay_ratio = local_l2_profile(&packet, Series::Flat, &[decay_t], &omega)[0].normalized;
    let control_top = local_l2_profile(&packet, Series::Raw, &[top], &omega)[0].normalized;

    Ok(EisensteinSummary {
        t: config.t,
        r0: packet.r0,
        sigma: packet.window.sigma,
        nodes: packet.nodes.len(),
        radius: packet.radius,
        decay_tol: packet.decay_tol,
        hypotheses,
        mellin_rel_error,
        mode_rel_error,
        invariance_error,
        fourier,
        profile,
        max_normalized,
        envelope_top,
        decay_t,
        decay_ratio,
        control_top,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn packet(t: f64) -> WavePacket {
        WavePacket::build(&PacketConfig::new(t)).unwrap()
    }

    #[test]
    fn gaussian_is_self_dual() {
        let f = |w: Point| C64::new((-PI * dot(w, w)).exp(), 0.0);
        for w in [[0.0, 0.0], [0.3, -0.7], [1.1, 0.4]] {
            let v = symplectic_fourier(&f, w, [0.0, 0.0], 6.0, 240);
            assert!((v - f(w)).norm() < 1e-12, "{w:?}: {v}");
        }
        let zero = |_: Point| C64::new(0.0, 0.0);
        assert_eq!(symplectic_fourier(&zero, [0.5, 0.5], [0.0, 0.0], 3.0, 20), C64::new(0.0, 0.0));
    }

    #[test]
    fn double_transform_of_a_lobe() {
        let lobe = Lobe { scale: 1.0, center: [0.0, 1.0], momentum: [-1.0, 0.0] };
        let r0 = 1.2;
        let once = |w: Point| lobe.fourier_quadrature(w, r0);
        for w in [[0.2, 1.1], [-0.4, 0.9]] {
            let twice = symplectic_fourier(&once, w, [0.0, -r0], 5.0, 160);
            assert!((twice - lobe.eval(w, r0)).norm() < 1e-8);
        }
    }

    #[test]
    fn hermite_derivatives() {
        let sigma = 0.3;
        let b = |u: f64| (-u * u / (2.0 * sigma * sigma)).exp();
        let u = 0.17;
        let h = 1e-3;
        let second = (b(u + h) - 2.0 * b(u) + b(u - h)) / (h * h);
        assert!((gaussian_poly_derivative(&[0.0, 0.0, 1.0], sigma, u) - second).abs() < 1e-4);
        let first = (b(u + h) - b(u - h)) / (2.0 * h);
        assert!((gaussian_poly_derivative(&[0.0, 1.0], sigma, u) - first).abs() < 1e-5);
    }

    #[test]
    fn euler_on_homogeneous_input() {
        for s in [0.5, 1.0, 2.5] {
            let f = move |w: Point| C64::new(dot(w, w).powf(-(1.0 + s) / 2.0) * (1.0 + w[0] / norm(w)), 0.0);
            let w = [0.7, -1.3];
            let v = euler_difference(&f, w);
            assert!((v + (1.0 + s) * f(w)).norm() < 1e-6 * f(w).norm());
        }
    }

    #[test]
    fn euler_matches_dilation_derivative() {
        let p = packet(64.0);
        let w = [0.2, p.r0 * 1.05];
        let f = |x: Point| p.eval(Series::Raw, x);
        let fd = euler_difference(&f, w);
        let an = p.euler(Series::Raw, w);
        assert!((fd - an).norm() < 1e-6 * an.norm().max(1.0), "{fd} vs {an}");
    }

    #[test]
    fn packet_symmetries() {
        let p = packet(64.0);
        let wts = p.weights(Series::Raw);
        let n = p.nodes.len();
        for j in 0..n {
            let (u, c) = (p.nodes[j], wts[j]);
            let mirror = wts[n - 1 - j];
            assert!((c - (2.0 * u).exp() * mirror).abs() <= 1e-12 * c.abs().max(1e-300));
        }
        let w = [0.4, 3.1];
        assert!((p.eval(Series::Flat, w) - p.eval(Series::Flat, [-w[0], -w[1]])).norm() < 1e-14);
        assert!((p.l2_norm_sq(Series::Flat) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mellin_multiplier() {
        let p = packet(64.0);
        for s in [0.5, 1.5, 2.5] {
            let ratio = p.mellin_weight(Series::Flat, s) / p.mellin_weight(Series::Raw, s);
            let at_two = p.mellin_weight(Series::Flat, 2.0) / p.mellin_weight(Series::Raw, 2.0);
            assert!((ratio / at_two - pg(s) / pg(2.0)).abs() < 1e-9, "{s}: {} vs {}", ratio / at_two, pg(s) / pg(2.0));
        }
        assert!(mellin_oracle(&p) < 1e-6);
    }

    #[test]
    fn line_integral_closed_form() {
        let p = packet(64.0);
        let a = [0.3, 0.1];
        let d = [0.2, 0.9];
        let m = 1.5;
        let exact = p.line_integral(Series::Raw, a, d, m);
        let h = 1e-3;
        let quad: C64 = (-40000..=40000)
            .map(|i| {
                let x = i as f64 * h;
                p.eval(Series::Raw, [a[0] + x * d[0], a[1] + x * d[1]]) * e(-m * x)
            })
            .sum::<C64>()
            * h;
        assert!((exact - quad).norm() < 1e-9, "{exact} vs {quad}");
    }

    #[test]
    fn zero_packet_vanishes() {
        let mut p = packet(16.0);
        p.weights_mut(Series::Flat).iter_mut().for_each(|c| *c = 0.0);
        let g = rotation(0.3);
        assert_eq!(eisenstein_eval(&p, Series::Flat, &g, Mode::FullFlat), C64::new(0.0, 0.0));
        assert_eq!(p.sharp([1.0, 2.0]), C64::new(0.0, 0.0));
    }

    #[test]
    fn lattice_enumeration_is_complete() {
        let g = mat_mul(&unipotent(0.3), &torus(1.7));
        let pts = lattice_points(&g, 5.0);
        let brute = (-20i64..=20)
            .flat_map(|a| (-20i64..=20).map(move |b| (a, b)))
            .filter(|&(a, b)| (a, b) != (0, 0) && norm(act([a as f64, b as f64], &g)) <= 5.0)
            .count();
        assert_eq!(pts.len(), brute);
    }

    #[test]
    fn modes_agree_and_invariance() {
        let p = packet(64.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..4 {
            let g = random_sl2(&mut rng);
            let a = eisenstein_eval(&p, Series::Flat, &g, Mode::FullFlat);
            let b = eisenstein_eval(&p, Series::Flat, &g, Mode::PrimitiveSharp);
            assert!((a - b).norm() <= 1e-9 * a.norm().max(1e-9));
            let s = eisenstein_eval(&p, Series::Flat, &mat_mul(&[[0.0, -1.0], [1.0, 0.0]], &g), Mode::FullFlat);
            assert!((a - s).norm() <= 1e-9 * a.norm().max(1e-9));
        }
    }

    #[test]
    fn divisor_terms() {
        assert_eq!(c_terms(7), vec![1, 7]);
        assert_eq!(c_terms(-12), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn fourier_route_small_t() {
        let p = packet(64.0);
        let g = omega_grid(3, 5)[4].0;
        let check = fourier_check(&p, &mat_mul(&torus(1.5), &g), 1.5, i64::MAX);
        assert!(check.coefficient_error < 1e-3, "{check:?}");
        assert!(check.reconstruction_error < 1e-3, "{check:?}");
        assert!(check.parseval_rel < 1e-3, "{check:?}");
        assert!(check.poisson_error < 1e-6, "{check:?}");
    }

    #[test]
    fn hypotheses_hold() {
        let p = packet(64.0);
        let h = enforce_hypotheses(&p);
        assert!(h.self_dual_error < 1e-8, "{h:?}");
        assert!(h.raw_self_dual_error < 1e-8, "{h:?}");
        assert!(h.line_integral_max < 1e-8, "{h:?}");
        assert!(h.raw_line_integral_max > 1e-3, "{h:?}");
        assert!(h.angular_leakage < 1e-6, "{h:?}");
    }

    #[test]
    fn symmetrization_guards_support() {
        let mut cfg = PacketConfig::new(64.0);
        cfg.offset = 1.0;
        assert!(WavePacket::build(&cfg).is_err());
    }

    #[test]
    fn tgrid_parsing() {
        assert_eq!(parse_tgrid("1,2,4", 64.0).unwrap(), vec![1.0, 2.0, 4.0]);
        let g = parse_tgrid("1:16:5", 256.0).unwrap();
        assert!((g[2] - 4.0).abs() < 1e-12 && (g[4] - 16.0).abs() < 1e-12);
        assert_eq!(parse_tgrid("auto", 256.0).unwrap().len(), 9);
        assert!(parse_tgrid("0.5,2", 64.0).is_err());
        assert!(parse_tgrid("1:2", 64.0).is_err());
    }
}
