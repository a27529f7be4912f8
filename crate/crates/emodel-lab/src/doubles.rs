//! The two Drinfeld doubles: `T*K` with `K = SU(N)` and the Lu-Weinstein double `SL(N, C)`.

use serde::Serialize;

use crate::algebra::{
    ad_unitary, check_square, commutator, identity, is_su, max_abs, unitarity_defect, yang_baxter_r, CMat,
    LinearSpace, TStarAlgebraElement, C64, I, ZERO,
};
use crate::error::{check_dims, check_positive, Error, Result};

/// Point `(k, κ)` of `T*K`.
#[derive(Clone, Debug, PartialEq)]
pub struct TStarPoint {
    pub k: CMat,
    pub kappa: CMat,
}

impl TStarPoint {
    pub fn new(k: CMat, kappa: CMat) -> Result<Self> {
        let n = check_square(&k)?;
        check_dims(n, check_square(&kappa)?)?;
        let deviation = unitarity_defect(&k).max((k.determinant() - 1.0).norm());
        if deviation > 1e-10 {
            return Err(Error::NotUnitary { deviation });
        }
        if !is_su(&kappa, 1e-10) {
            return Err(Error::InvalidParameter {
                name: "kappa",
                reason: "must lie in su(N)".into(),
            });
        }
        Ok(Self { k, kappa })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            k: identity(n),
            kappa: CMat::zeros(n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.k.nrows()
    }

    /// `(k⁻¹, -Ad_{k⁻¹} κ)`.
    pub fn inverse(&self) -> Self {
        let kd = self.k.adjoint();
        let kappa = -(&kd * &self.kappa * &self.k);
        Self { k: kd, kappa }
    }
}

impl LinearSpace for TStarPoint {
    fn zero_like(&self) -> Self {
        let n = self.n();
        Self {
            k: CMat::zeros(n, n),
            kappa: CMat::zeros(n, n),
        }
    }

    fn add_scaled(&mut self, a: f64, x: &Self) {
        self.k.add_scaled(a, &x.k);
        self.kappa.add_scaled(a, &x.kappa);
    }

    fn scale(&self, a: f64) -> Self {
        Self {
            k: LinearSpace::scale(&self.k, a),
            kappa: LinearSpace::scale(&self.kappa, a),
        }
    }

    fn frob_norm(&self) -> f64 {
        (self.k.norm_squared() + self.kappa.norm_squared()).sqrt()
    }

    fn all_finite(&self) -> bool {
        self.k.all_finite() && self.kappa.all_finite()
    }
}

/// `(k₁, κ₁)(k₂, κ₂) = (k₁k₂, κ₁ + Ad_{k₁} κ₂)`.
pub fn tstar_multiply(p: &TStarPoint, q: &TStarPoint) -> Result<TStarPoint> {
    check_dims(p.n(), q.n())?;
    Ok(TStarPoint {
        k: &p.k * &q.k,
        kappa: &p.kappa + ad_unitary(&p.k, &q.kappa),
    })
}

pub(crate) fn tstar_adjoint_unchecked(p: &TStarPoint, x: &TStarAlgebraElement) -> TStarAlgebraElement {
    let mu = ad_unitary(&p.k, &x.first);
    let nu = ad_unitary(&p.k, &x.second) + commutator(&p.kappa, &mu);
    TStarAlgebraElement { first: mu, second: nu }
}

/// `Ad_{(k,κ)}(μ, ν) = (Ad_k μ, Ad_k ν + [κ, Ad_k μ])`.
pub fn tstar_adjoint(p: &TStarPoint, x: &TStarAlgebraElement) -> Result<TStarAlgebraElement> {
    check_dims(p.n(), x.n())?;
    Ok(tstar_adjoint_unchecked(p, x))
}

/// `E(μ, ν) = (-ν, -μ)`.
pub fn e_tstar(x: &TStarAlgebraElement) -> TStarAlgebraElement {
    TStarAlgebraElement {
        first: -&x.second,
        second: -&x.first,
    }
}

/// Point of `SL(N, C)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SLPoint {
    pub l: CMat,
}

impl SLPoint {
    pub fn new(l: CMat) -> Result<Self> {
        check_square(&l)?;
        let deviation = (l.determinant() - 1.0).norm();
        if deviation > 1e-10 {
            return Err(Error::InvalidParameter {
                name: "l",
                reason: format!("det l deviates from 1 by {deviation:e}"),
            });
        }
        Ok(Self { l })
    }

    pub fn identity(n: usize) -> Self {
        Self { l: identity(n) }
    }

    pub fn n(&self) -> usize {
        self.l.nrows()
    }
}

impl LinearSpace for SLPoint {
    fn zero_like(&self) -> Self {
        Self {
            l: self.l.zero_like(),
        }
    }

    fn add_scaled(&mut self, a: f64, x: &Self) {
        self.l.add_scaled(a, &x.l);
    }

    fn scale(&self, a: f64) -> Self {
        Self {
            l: LinearSpace::scale(&self.l, a),
        }
    }

    fn frob_norm(&self) -> f64 {
        self.l.norm()
    }

    fn all_finite(&self) -> bool {
        self.l.all_finite()
    }
}

/// `l = g·a·n` with `g` unitary, `a` positive diagonal, `n` unit upper triangular.
#[derive(Clone, Debug, PartialEq)]
pub struct IwasawaFactors {
    pub g: CMat,
    pub a: CMat,
    pub n: CMat,
}

impl IwasawaFactors {
    pub fn compose(&self) -> CMat {
        &self.g * &self.a * &self.n
    }

    /// The `AN` factor `b = a·n`.
    pub fn b(&self) -> CMat {
        &self.a * &self.n
    }
}

/// Column orthonormalisation with phases chosen so the triangular factor has a positive diagonal.
pub(crate) fn iwasawa_decompose_unchecked(l: &CMat) -> (CMat, CMat, CMat) {
    let qr = l.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    let n = l.nrows();
    for i in 0..n {
        let d = r[(i, i)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for row in 0..n {
            q[(row, i)] *= ph;
        }
        for col in 0..n {
            r[(i, col)] *= ph.conj();
        }
    }
    let a = CMat::from_fn(n, n, |i, j| if i == j { C64::new(r[(i, i)].re, 0.0) } else { ZERO });
    let nn = CMat::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(1.0, 0.0)
        } else if i < j {
            r[(i, j)] / r[(i, i)].re
        } else {
            ZERO
        }
    });
    (q, a, nn)
}

/// Iwasawa decomposition of a point of `SL(N, C)`.
pub fn iwasawa_decompose(l: &SLPoint) -> Result<IwasawaFactors> {
    let scale = max_abs(&l.l).max(1.0);
    let (g, a, n) = iwasawa_decompose_unchecked(&l.l);
    let smallest = (0..a.nrows()).map(|i| a[(i, i)].re).fold(f64::INFINITY, f64::min);
    let largest = (0..a.nrows()).map(|i| a[(i, i)].re).fold(0.0, f64::max);
    if !(smallest > 1e-12 * scale) {
        return Err(Error::Singular {
            what: "Iwasawa pivot",
            condition: largest / smallest.max(f64::MIN_POSITIVE),
        });
    }
    Ok(IwasawaFactors { g, a, n })
}

/// Which E-operator a model uses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EOperator {
    /// `(μ, ν) ↦ (-ν, -μ)` on `T*K`.
    TStarFlip,
    /// The two-parameter family on the Lu-Weinstein double.
    BiYB { eta: f64, mu: f64 },
}

impl EOperator {
    pub fn biyb(eta: f64, mu: f64) -> Result<Self> {
        check_positive("eta", eta)?;
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "mu",
                reason: format!("must be non-negative, got {mu}"),
            });
        }
        Ok(EOperator::BiYB { eta, mu })
    }
}

pub(crate) fn e_biyb_unchecked(x: &CMat, eta: f64, mu: f64) -> CMat {
    let xd = x.adjoint();
    let r2x = yang_baxter_r(&yang_baxter_r(x));
    let r2xd = yang_baxter_r(&yang_baxter_r(&xd));
    let c = I / (2.0 * eta);
    ((x.scale(eta * eta - 1.0) + r2x.scale(mu * mu)) * c) - ((xd.scale(eta * eta + 1.0) - r2xd.scale(mu * mu)) * c)
        - yang_baxter_r(&xd).scale(mu)
}

/// `E_{η,μ} X = (i/2)((η² + μ²R² - 1)/η) X - (i/2)((η² - μ²R² + 1)/η) X† - μ R X†`.
pub fn e_biyb(x: &CMat, eta: f64, mu: f64) -> Result<CMat> {
    check_positive("eta", eta)?;
    check_square(x)?;
    Ok(e_biyb_unchecked(x, eta, mu))
}

/// Nearest special unitary matrix (polar factor with the determinant phase removed).
pub fn polar_special_unitary(k: &CMat) -> CMat {
    let n = k.nrows();
    let svd = k.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let w = u * vt;
    let det = w.determinant();
    w * C64::from_polar(1.0, -det.arg() / n as f64)
}

/// Rescales `l` to determinant one.
pub fn normalize_det(l: &CMat) -> CMat {
    let n = l.nrows();
    let det = l.determinant();
    let root = C64::from_polar(det.norm().powf(1.0 / n as f64), det.arg() / n as f64);
    l / root
}
