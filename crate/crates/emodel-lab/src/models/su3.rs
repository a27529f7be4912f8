//! Explicit matrices for `SU(3)` with `ξ = i diag(1, 1, -2)`.
//!
//! Coordinates on `su(3)` follow [`su3_encode`]. The group element is
//! `k = U(a, b) · Rot(θ)` with `U = [[a, -b̄, 0], [b, ā, 0], [0, 0, 1]]` and `Rot` the
//! rotation by `θ` in the `(1, 3)` plane. Tables act on coordinate columns: `y = M x`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::algebra::{su3_decode, su3_encode, r_twisted_unchecked, yang_baxter_r, CMat, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::models::biyb::BiYbGeometry;

/// Which version of the two sign-sensitive closed forms to use.
///
/// `Uncorrected` carries `+Δ₁p` off the diagonal of the inverse block where the inverse of
/// `[[·, p], [p, ·]]` needs `-Δ₁p`, and flips the signs of the `3μσs³`, `3μτs³` terms of
/// `P⊥V`. It is kept so the size of those slips stays measurable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    Uncorrected,
    Corrected,
}

pub fn xi() -> CMat {
    CMat::from_diagonal(&DVector::from_vec(vec![
        C64::new(0.0, 1.0),
        C64::new(0.0, 1.0),
        C64::new(0.0, -2.0),
    ]))
}

/// Matrix of a linear map of `su(3)` in the x-coordinates.
pub fn coordinate_matrix(f: impl Fn(&CMat) -> CMat) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(8, 8);
    for i in 0..8 {
        let mut e = [0.0; 8];
        e[i] = 1.0;
        let y = su3_encode(&f(&su3_decode(&e))).expect("3x3 input");
        m.set_column(i, &DVector::from_row_slice(&y));
    }
    m
}

/// Point `(a, b, θ)` with `|a|² + |b|² = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Chart {
    pub a: C64,
    pub b: C64,
    pub theta: f64,
}

/// Tangent vector at a [`Chart`] point; `Re(āȧ + b̄ḃ) = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Velocity {
    pub a: C64,
    pub b: C64,
    pub theta: f64,
}

/// The scalar combinations the closed forms are written in.
#[derive(Clone, Copy, Debug)]
pub struct Scalars {
    pub c: f64,
    pub s: f64,
    pub sigma: f64,
    pub tau: f64,
    pub a2: f64,
    pub b2: f64,
    /// `|a|²|b|² = σ² + τ²`
    pub ab2: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub p: f64,
    pub q: f64,
    pub beta: f64,
    pub delta: f64,
    pub delta1: f64,
    pub delta2: f64,
}

fn rot(theta: f64) -> CMat {
    let (s, c) = theta.sin_cos();
    let r = |x: f64| C64::new(x, 0.0);
    CMat::from_row_slice(3, 3, &[r(c), ZERO, r(s), ZERO, ONE, ZERO, r(-s), ZERO, r(c)])
}

fn rot_dot(theta: f64, thetad: f64) -> CMat {
    let (s, c) = theta.sin_cos();
    let r = |x: f64| C64::new(x * thetad, 0.0);
    CMat::from_row_slice(3, 3, &[r(-s), ZERO, r(c), ZERO, ZERO, ZERO, r(-c), ZERO, r(-s)])
}

fn u_mat(a: C64, b: C64, corner: C64) -> CMat {
    CMat::from_row_slice(3, 3, &[a, -b.conj(), ZERO, b, a.conj(), ZERO, ZERO, ZERO, corner])
}

impl Chart {
    pub fn new(a: C64, b: C64, theta: f64) -> Result<Self> {
        let r = a.norm_sqr() + b.norm_sqr();
        if (r - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter {
                name: "a, b",
                reason: format!("need |a|^2 + |b|^2 = 1, got {r}"),
            });
        }
        Ok(Self { a, b, theta })
    }

    pub fn k(&self) -> CMat {
        u_mat(self.a, self.b, ONE) * rot(self.theta)
    }

    /// Exact `k̇`.
    pub fn k_dot(&self, v: &Velocity) -> Result<CMat> {
        let radial = (self.a.conj() * v.a + self.b.conj() * v.b).re;
        if radial.abs() > 1e-10 {
            return Err(Error::InvalidParameter {
                name: "velocity",
                reason: format!("not tangent to |a|^2+|b|^2=1 (radial part {radial})"),
            });
        }
        Ok(u_mat(v.a, v.b, ZERO) * rot(self.theta) + u_mat(self.a, self.b, ONE) * rot_dot(self.theta, v.theta))
    }

    pub fn scalars(&self, eta: f64, mu: f64) -> Result<Scalars> {
        let (s, c) = self.theta.sin_cos();
        let (a1, a2i, b1, b2i) = (self.a.re, self.a.im, self.b.re, self.b.im);
        let sigma = a1 * b2i + a2i * b1;
        let tau = -a1 * b1 + a2i * b2i;
        let a2 = self.a.norm_sqr();
        let b2 = self.b.norm_sqr();
        let ab2 = a2 * b2;
        if ab2 < 1e-12 {
            return Err(Error::Pole { denominator: "|a|^2|b|^2" });
        }
        let gamma = (2.0 * self.theta).cos();
        let xs = (2.0 * self.theta).sin();
        let eps1 = 1.0 + (eta + mu * gamma).powi(2) + mu * mu * xs * xs * ab2;
        let eps2 = 1.0 + eta * eta + mu * mu + 2.0 * eta * mu * gamma;
        let p = mu * xs * s * (eta - mu * (a2 - b2));
        let q = eta * mu * xs * s;
        let beta = 1.0 + (eta + mu).powi(2) - 4.0 * eta * mu * s * s * a2;
        let delta = -4.0 * mu * mu * s * s;
        let d1 = eps1 * beta + (eps1 * delta - p * p) * ab2;
        let d2 = eps2 * beta - q * q * ab2;
        if d1.abs() < 1e-14 || d2.abs() < 1e-14 {
            return Err(Error::Pole { denominator: "Delta" });
        }
        Ok(Scalars {
            c,
            s,
            sigma,
            tau,
            a2,
            b2,
            ab2,
            eps1,
            eps2,
            p,
            q,
            beta,
            delta,
            delta1: ab2 / d1,
            delta2: ab2 / d2,
        })
    }
}

/// The 8×8 table of `R`.
pub fn r_table() -> DMatrix<f64> {
    let mut m = DMatrix::zeros(8, 8);
    m[(0, 1)] = -1.0;
    m[(1, 0)] = 1.0;
    m[(3, 4)] = -1.0;
    m[(4, 3)] = 1.0;
    m[(5, 6)] = -1.0;
    m[(6, 5)] = 1.0;
    m
}

pub fn pperp_table() -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_row_slice(&[0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0]))
}

/// `Ad_k = A₁ A₂` with `A₁` from `U(a, b)` and `A₂` from `Rot(θ)`.
pub fn adjoint_factors(ch: &Chart) -> (DMatrix<f64>, DMatrix<f64>) {
    let (a1, a2, b1, b2) = (ch.a.re, ch.a.im, ch.b.re, ch.b.im);
    let (s, c) = ch.theta.sin_cos();
    #[rustfmt::skip]
    let f1 = DMatrix::from_row_slice(8, 8, &[
        2.0*a1*a1 + 2.0*b2*b2 - 1.0, 2.0*(a1*a2 - b1*b2), 2.0*(a1*b1 + a2*b2), 0.0, 0.0, 0.0, 0.0, 0.0,
        -2.0*(a1*a2 + b1*b2), 2.0*a1*a1 + 2.0*b1*b1 - 1.0, 2.0*(a1*b2 - a2*b1), 0.0, 0.0, 0.0, 0.0, 0.0,
        2.0*(a2*b2 - a1*b1), -2.0*(a1*b2 + a2*b1), 2.0*a1*a1 + 2.0*a2*a2 - 1.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, a1, a2, -b1, b2, 0.0,
        0.0, 0.0, 0.0, -a2, a1, -b2, -b1, 0.0,
        0.0, 0.0, 0.0, b1, b2, a1, -a2, 0.0,
        0.0, 0.0, 0.0, -b2, b1, a2, a1, 0.0,
        0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0,
    ]);
    #[rustfmt::skip]
    let f2 = DMatrix::from_row_slice(8, 8, &[
        c, 0.0, 0.0, 0.0, 0.0, s, 0.0, 0.0,
        0.0, c, 0.0, 0.0, 0.0, 0.0, -s, 0.0,
        0.0, 0.0, 1.0 - s*s/2.0, s*c, 0.0, 0.0, 0.0, -1.5*s*s,
        0.0, 0.0, -s*c, 1.0 - 2.0*s*s, 0.0, 0.0, 0.0, -3.0*s*c,
        0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0,
        -s, 0.0, 0.0, 0.0, 0.0, c, 0.0, 0.0,
        0.0, s, 0.0, 0.0, 0.0, 0.0, c, 0.0,
        0.0, 0.0, -s*s/2.0, s*c, 0.0, 0.0, 0.0, 1.0 - 1.5*s*s,
    ]);
    (f1, f2)
}

/// The table of `R_k = Ad_{k⁻¹} R Ad_k`.
pub fn rk_table(ch: &Chart) -> DMatrix<f64> {
    let (s, c) = ch.theta.sin_cos();
    let (a1, a2, b1, b2) = (ch.a.re, ch.a.im, ch.b.re, ch.b.im);
    let sg = a1 * b2 + a2 * b1;
    let ta = -a1 * b1 + a2 * b2;
    let aa = ch.a.norm_sqr();
    let c2 = c * c;
    let s2 = s * s;
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(8, 8, &[
        0.0, 1.0 - 2.0*c2*aa, -c*(c2 + 1.0)*sg, -2.0*c2*s*sg, 0.0, 0.0, 2.0*c*s*aa, 3.0*c*s2*sg,
        2.0*c2*aa - 1.0, 0.0, -c*(c2 + 1.0)*ta, -2.0*c2*s*ta, 0.0, 2.0*c*s*aa, 0.0, 3.0*c*s2*ta,
        c*(c2 + 1.0)*sg, c*(c2 + 1.0)*ta, 0.0, 0.0, c*s, s*(c2 + 1.0)*sg, -s*(c2 + 1.0)*ta, 0.0,
        2.0*c2*s*sg, 2.0*c2*s*ta, 0.0, 0.0, s2 - c2, 2.0*c*s2*sg, -2.0*c*s2*ta, 0.0,
        0.0, 0.0, -c*s, c2 - s2, 0.0, 0.0, 0.0, -3.0*c*s,
        0.0, -2.0*c*s*aa, -s*(c2 + 1.0)*sg, -2.0*c*s2*sg, 0.0, 0.0, -1.0 + 2.0*s2*aa, 3.0*s2*s*sg,
        -2.0*c*s*aa, 0.0, s*(c2 + 1.0)*ta, 2.0*c*s2*ta, 0.0, 1.0 - 2.0*s2*aa, 0.0, -3.0*s2*s*ta,
        -c*s2*sg, -c*s2*ta, 0.0, 0.0, c*s, -s2*s*sg, s2*s*ta, 0.0,
    ]);
    m
}

/// `1⊥ - P⊥Ω²P⊥` on coordinates 4..7.
pub fn block(sc: &Scalars) -> DMatrix<f64> {
    let Scalars { sigma: sg, tau: ta, eps1, eps2, p, q, beta, delta, .. } = *sc;
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        eps1, 0.0, p*ta, p*sg,
        0.0, eps2, -q*sg, q*ta,
        p*ta, -q*sg, beta + delta*ta*ta, delta*ta*sg,
        p*sg, q*ta, delta*ta*sg, beta + delta*sg*sg,
    ]);
    m
}

/// `(Rl, Mid, Rr)` with `block = Rl · Mid · Rr`.
pub fn block_factors(sc: &Scalars) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let Scalars { sigma: sg, tau: ta, ab2, eps1, eps2, p, q, beta, delta, .. } = *sc;
    #[rustfmt::skip]
    let rl = DMatrix::from_row_slice(4, 4, &[
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, sg, ta,
        0.0, 0.0, -ta, sg,
    ]);
    #[rustfmt::skip]
    let mid = DMatrix::from_row_slice(4, 4, &[
        eps1, 0.0, 0.0, p,
        0.0, eps2, -q, 0.0,
        0.0, -q, beta/ab2, 0.0,
        p, 0.0, 0.0, beta/ab2 + delta,
    ]);
    let rr = rl.transpose();
    (rl, mid, rr)
}

/// `[[1, 0], [0, (σ, -τ; τ, σ)/|a|²|b|²]]`; it maps `P⊥V` to `W`.
pub fn w_transform(sc: &Scalars) -> DMatrix<f64> {
    let Scalars { sigma: sg, tau: ta, ab2, .. } = *sc;
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, sg/ab2, -ta/ab2,
        0.0, 0.0, ta/ab2, sg/ab2,
    ]);
    m
}

/// Inner factor of the closed inverse.
pub fn inverse_middle(sc: &Scalars, tr: SignConvention) -> DMatrix<f64> {
    let Scalars { ab2, eps1, eps2, p, q, beta, delta, delta1: d1, delta2: d2, .. } = *sc;
    let off = match tr {
        SignConvention::Uncorrected => d1 * p,
        SignConvention::Corrected => -d1 * p,
    };
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        d1*(beta/ab2 + delta), 0.0, 0.0, off,
        0.0, d2*beta/ab2, d2*q, 0.0,
        0.0, d2*q, d2*eps2, 0.0,
        off, 0.0, 0.0, d1*eps1,
    ]);
    m
}

/// Closed-form inverse of [`block`].
pub fn block_inverse(sc: &Scalars, tr: SignConvention) -> DMatrix<f64> {
    let ir = w_transform(sc);
    ir.transpose() * inverse_middle(sc, tr) * ir
}

/// Coordinates 4..7 of `P⊥V`.
pub fn pperp_v(ch: &Chart, v: &Velocity, eta: f64, mu: f64, tr: SignConvention) -> Result<DVector<f64>> {
    let sc = ch.scalars(eta, mu)?;
    let (s, c) = (sc.s, sc.c);
    let abd = ch.a.conj() * v.a + ch.b.conj() * v.b;
    let cross = ch.a * v.b - v.a * ch.b;
    let sign = match tr {
        SignConvention::Uncorrected => -1.0,
        SignConvention::Corrected => 1.0,
    };
    Ok(DVector::from_row_slice(&[
        s * c * abd.im,
        v.theta + s * c * abd.re - 3.0 * (eta + mu) * s * c,
        s * cross.im + sign * 3.0 * mu * sc.sigma * s.powi(3),
        s * cross.re - sign * 3.0 * mu * sc.tau * s.powi(3),
    ]))
}

/// `W = (w_transform) · P⊥V`, written directly in `(a, b, θ)`.
pub fn w_column(ch: &Chart, v: &Velocity, eta: f64, mu: f64) -> Result<DVector<f64>> {
    let sc = ch.scalars(eta, mu)?;
    let (s, c) = (sc.s, sc.c);
    let abd = ch.a.conj() * v.a + ch.b.conj() * v.b;
    let log = v.b / ch.b - v.a / ch.a;
    Ok(DVector::from_row_slice(&[
        s * c * abd.im,
        v.theta - 3.0 * s * c * (eta + mu),
        s * log.re + 3.0 * mu * s.powi(3),
        -s * log.im,
    ]))
}

/// Closed form of the second-order Lagrangian.
pub fn lagrangian(ch: &Chart, v: &Velocity, eta: f64, mu: f64, tr: SignConvention) -> Result<f64> {
    let sc = ch.scalars(eta, mu)?;
    let w = w_column(ch, v, eta, mu)?;
    let pm = match tr {
        SignConvention::Uncorrected => 1.0,
        SignConvention::Corrected => -1.0,
    };
    let Scalars { ab2, eps1, eps2, p, q, beta, delta, delta1: d1, delta2: d2, s, .. } = sc;
    Ok(d2 * (beta / ab2 * w[1] * w[1] + eps2 * w[2] * w[2] + 2.0 * q * w[1] * w[2])
        + d1 * ((beta / ab2 + delta) * w[0] * w[0] + eps1 * w[3] * w[3] + pm * 2.0 * p * w[0] * w[3])
        - 9.0 * s * s)
}

/// Undeformed limit `W₄² + W₅² + |a|²|b|²(W₆² + W₇²) - 9s²`.
pub fn undeformed_lagrangian(ch: &Chart, v: &Velocity) -> Result<f64> {
    let sc = ch.scalars(0.0, 0.0)?;
    let w = w_column(ch, v, 0.0, 0.0)?;
    Ok(w[0] * w[0] + w[1] * w[1] + sc.ab2 * (w[2] * w[2] + w[3] * w[3]) - 9.0 * sc.s * sc.s)
}

/// Max entrywise differences between the tables above and the generic machinery.
#[derive(Clone, Debug, Serialize)]
pub struct Su3Residuals {
    pub r_table: f64,
    pub pperp_table: f64,
    pub adjoint_factors: f64,
    pub rk_table: f64,
    pub block: f64,
    pub block_factors: f64,
    /// `block · inverse - 1`, corrected signs
    pub inverse: f64,
    /// same with the uncorrected signs
    pub inverse_uncorrected: f64,
    /// closed inverse against the numerical inverse of the generic block
    pub inverse_vs_numeric: f64,
    pub pperp_v: f64,
    pub pperp_v_uncorrected: f64,
    pub w_column: f64,
    pub lagrangian: f64,
    pub lagrangian_uncorrected: f64,
}

fn diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}

/// Compares every closed form at one point against [`BiYbGeometry`].
pub fn residuals(ch: &Chart, v: &Velocity, eta: f64, mu: f64) -> Result<Su3Residuals> {
    let geo = BiYbGeometry::new(xi(), eta, mu)?;
    let k = ch.k();
    let kdot = ch.k_dot(v)?;
    let kinv = k.adjoint();
    let sc = ch.scalars(eta, mu)?;

    let r_num = coordinate_matrix(yang_baxter_r);
    let pp_num = coordinate_matrix(|x| geo.stabilizer().project_perp(x));
    let ad_num = coordinate_matrix(|x| &k * x * &kinv);
    let rk_num = coordinate_matrix(|x| r_twisted_unchecked(&kinv, x));
    let (f1, f2) = adjoint_factors(ch);

    let full = coordinate_matrix(|x| geo.stabilizer().project_perp(&(x - geo.omega(&k, &geo.omega(&k, x)))));
    let blk = full.view((3, 3), (4, 4)).into_owned();
    let (rl, mid, rr) = block_factors(&sc);
    let id = DMatrix::<f64>::identity(4, 4);
    let inv = block_inverse(&sc, SignConvention::Corrected);
    let inv_p = block_inverse(&sc, SignConvention::Uncorrected);
    let num_inv = blk.clone().try_inverse().ok_or(Error::Singular {
        what: "su3 block",
        condition: f64::INFINITY,
    })?;

    let vv = geo.stabilizer().project_perp(&geo.v(&k, &kdot));
    let v_num = DVector::from_row_slice(&su3_encode(&vv)?[3..7]);
    let v_c = pperp_v(ch, v, eta, mu, SignConvention::Corrected)?;
    let v_p = pperp_v(ch, v, eta, mu, SignConvention::Uncorrected)?;
    let w_num = w_transform(&sc) * &v_num;
    let w_c = w_column(ch, v, eta, mu)?;

    let generic = geo.lagrangian(&k, &kdot)?;
    Ok(Su3Residuals {
        r_table: diff(&r_table(), &r_num),
        pperp_table: diff(&pperp_table(), &pp_num),
        adjoint_factors: diff(&(f1 * f2), &ad_num),
        rk_table: diff(&rk_table(ch), &rk_num),
        block: diff(&block(&sc), &blk),
        block_factors: diff(&(rl * mid * rr), &blk),
        inverse: diff(&(&blk * &inv), &id),
        inverse_uncorrected: diff(&(&blk * inv_p), &id),
        inverse_vs_numeric: diff(&inv, &num_inv),
        pperp_v: (&v_c - &v_num).amax(),
        pperp_v_uncorrected: (&v_p - &v_num).amax(),
        w_column: (&w_c - w_num).amax(),
        lagrangian: (lagrangian(ch, v, eta, mu, SignConvention::Corrected)? - generic).abs(),
        lagrangian_uncorrected: (lagrangian(ch, v, eta, mu, SignConvention::Uncorrected)? - generic).abs(),
    })
}

/// Random chart point with `|a|, |b|` bounded away from 0 and `θ ∈ [0.2, 1.3]`.
pub fn random_point(rng: &mut crate::random::Rng) -> (Chart, Velocity) {
    use crate::random::{gaussian, su_element, uniform, unit_pair};
    let (a, b) = loop {
        let (a, b) = unit_pair(rng);
        if a.norm_sqr() * b.norm_sqr() > 0.01 {
            break (a, b);
        }
    };
    let theta = uniform(rng, 0.2, 1.3);
    let z = su_element(2, rng);
    let ad = z[(0, 0)] * a + z[(0, 1)] * b;
    let bd = z[(1, 0)] * a + z[(1, 1)] * b;
    (
        Chart { a, b, theta },
        Velocity {
            a: ad,
            b: bd,
            theta: gaussian(rng),
        },
    )
}

/// Every entry of [`Su3Residuals`] over random points; uncorrected variants are notes.
pub fn suite(eta: f64, mu: f64, samples: usize, seed: u64) -> Result<crate::models::SuiteReport> {
    let mut rng = crate::random::rng_from_seed(seed);
    let mut rep = crate::models::SuiteReport::new("su3-closed-form", seed, samples);
    for _ in 0..samples {
        let (ch, v) = random_point(&mut rng);
        let r = residuals(&ch, &v, eta, mu)?;
        let sc = ch.scalars(eta, mu)?;
        rep.record("sigma-tau", (sc.sigma * sc.sigma + sc.tau * sc.tau - sc.ab2).abs(), 1e-12);
        for (name, value) in [
            ("r-table", r.r_table),
            ("pperp-table", r.pperp_table),
            ("adjoint-factors", r.adjoint_factors),
            ("rk-table", r.rk_table),
            ("block", r.block),
            ("block-factors", r.block_factors),
            ("block-times-inverse", r.inverse),
            ("inverse-vs-numeric", r.inverse_vs_numeric),
            ("pperp-v", r.pperp_v),
            ("w-column", r.w_column),
        ] {
            rep.record(name, value, 1e-10);
        }
        let generic = BiYbGeometry::new(xi(), eta, mu)?.lagrangian(&ch.k(), &ch.k_dot(&v)?)?;
        rep.record("lagrangian", r.lagrangian / generic.abs().max(1.0), 1e-9);
        rep.note("block-times-inverse-uncorrected", r.inverse_uncorrected);
        rep.note("pperp-v-uncorrected", r.pperp_v_uncorrected);
        rep.note("lagrangian-uncorrected", r.lagrangian_uncorrected / generic.abs().max(1.0));

        let flat = BiYbGeometry::new(xi(), 0.0, 0.0)?.lagrangian(&ch.k(), &ch.k_dot(&v)?)?;
        let nn = undeformed_lagrangian(&ch, &v)?;
        rep.record("undeformed", (flat - nn).abs() / flat.abs().max(1.0), 1e-10);
    }
    Ok(rep)
}
