//! Spectral data `O(λ)`, `O†(λ)`, `r̂(λ,ρ)`, Lax pairs and numerical checks of the
//! sufficient conditions for integrability.
//!
//! `𝒢^ℂ = su(N) ⊗ C` is represented by complex matrices (`sl(N, C)` with the matrix `i`
//! as complex unit) and carries the complex-bilinear form `tr(XY)`. `𝒟^ℂ` uses the formal
//! pair [`Cx`].

use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::{
    commutator, cx_bracket, cx_form, split_complexified, trace_product, yang_baxter_r, CMat, Cx, LinearSpace,
    RealBasis, C64, ONE,
};
use crate::dynamics::{current_of, eom_rhs, five_point_derivative, format_complex, BiYbModel, EModel, Observables, TStarModel, Trajectory};
use crate::error::{Error, Result};
use crate::random::{self, rng_from_seed, Rng};

/// Denominators smaller than this are treated as poles.
pub const POLE_TOL: f64 = 1e-12;

pub type ElemOf<S> = <<S as SpectralData>::Model as EModel>::Elem;

/// Spectral data of an integrable point particle E-model.
///
/// `O(λ) = Σ_k a_k(λ) O_k` with real maps `O_k : 𝒟 → 𝒢`; the adjoint is taken
/// with respect to the double form and the Killing form on `𝒢`.
pub trait SpectralData {
    type Model: EModel;

    fn model(&self) -> &Self::Model;
    fn name(&self) -> &'static str;
    fn coefficients(&self, lambda: C64) -> Result<Vec<C64>>;
    fn component(&self, k: usize, x: &ElemOf<Self>) -> CMat;
    fn component_adjoint(&self, k: usize, y: &CMat) -> ElemOf<Self>;
    fn rhat(&self, lambda: C64, rho: C64, y: &CMat) -> Result<CMat>;
}

fn pole(value: C64, denominator: &'static str) -> Result<C64> {
    if value.norm() < POLE_TOL || !value.is_finite() {
        Err(Error::Pole { denominator })
    } else {
        Ok(value)
    }
}

/// `O(λ) x`.
pub fn o<S: SpectralData>(sd: &S, lambda: C64, x: &ElemOf<S>) -> Result<CMat> {
    let coeff = sd.coefficients(lambda)?;
    let n = sd.model().n();
    Ok(coeff
        .iter()
        .enumerate()
        .fold(CMat::zeros(n, n), |acc, (k, a)| acc + sd.component(k, x) * *a))
}

/// `O(λ)` extended complex-linearly to `𝒟^ℂ`.
pub fn o_cx<S: SpectralData>(sd: &S, lambda: C64, x: &Cx<ElemOf<S>>) -> Result<CMat> {
    Ok(o(sd, lambda, &x.re)? + o(sd, lambda, &x.im)? * C64::i())
}

/// `O†(λ) W` for `W ∈ 𝒢^ℂ`.
pub fn o_dagger<S: SpectralData>(sd: &S, lambda: C64, w: &CMat) -> Result<Cx<ElemOf<S>>> {
    let coeff = sd.coefficients(lambda)?;
    let (wr, wi) = split_complexified(w);
    let zero = sd.model().xi().zero_like();
    let mut out = Cx {
        re: zero.clone(),
        im: zero,
    };
    for (k, a) in coeff.iter().enumerate() {
        let r = sd.component_adjoint(k, &wr);
        let i = sd.component_adjoint(k, &wi);
        out.add_complex_scaled(*a, &r);
        out.add_complex_scaled(*a * C64::i(), &i);
    }
    Ok(out)
}

/// Principal chiral model data on `T*SU(N)`.
#[derive(Clone, Debug)]
pub struct PcmSpectral {
    model: TStarModel,
}

impl PcmSpectral {
    pub fn new(model: TStarModel) -> Self {
        Self { model }
    }

    /// Kernel of `r̂(λ,ρ) = c·Id`.
    pub fn kernel(lambda: C64, rho: C64) -> Result<C64> {
        let a = pole(ONE - rho * rho, "1-rho^2")?;
        let b = pole(rho - lambda, "rho-lambda")?;
        Ok(rho * rho / (a * b))
    }
}

impl SpectralData for PcmSpectral {
    type Model = TStarModel;

    fn model(&self) -> &TStarModel {
        &self.model
    }

    fn name(&self) -> &'static str {
        "pcm"
    }

    fn coefficients(&self, lambda: C64) -> Result<Vec<C64>> {
        let d = pole(ONE - lambda * lambda, "1-lambda^2")?;
        Ok(vec![ONE / d, -lambda / d])
    }

    fn component(&self, k: usize, x: &ElemOf<Self>) -> CMat {
        if k == 0 {
            x.first.clone()
        } else {
            x.second.clone()
        }
    }

    fn component_adjoint(&self, k: usize, y: &CMat) -> ElemOf<Self> {
        let z = CMat::zeros(y.nrows(), y.ncols());
        if k == 0 {
            crate::algebra::TStarAlgebraElement {
                first: z,
                second: y.clone(),
            }
        } else {
            crate::algebra::TStarAlgebraElement {
                first: y.clone(),
                second: z,
            }
        }
    }

    fn rhat(&self, lambda: C64, rho: C64, y: &CMat) -> Result<CMat> {
        Ok(y * Self::kernel(lambda, rho)?)
    }
}

/// Bi-Yang-Baxter data on the Lu-Weinstein double.
#[derive(Clone, Debug)]
pub struct BiYbSpectral {
    model: BiYbModel,
    transposed_r: bool,
}

impl BiYbSpectral {
    pub fn new(model: BiYbModel) -> Self {
        Self {
            model,
            transposed_r: false,
        }
    }

    /// Deliberately wrong data: `R` replaced by its transpose inside `r̂`.
    pub fn negative_control(model: BiYbModel) -> Self {
        Self {
            model,
            transposed_r: true,
        }
    }

    fn s(&self) -> f64 {
        let (eta, mu) = (self.model.eta(), self.model.mu());
        let a = 1.0 + eta * eta - mu * mu;
        (a * a + 4.0 * mu * mu).sqrt()
    }

    pub fn f0(&self, lambda: C64) -> C64 {
        let (eta, mu) = (self.model.eta(), self.model.mu());
        (1.0 + eta * eta - mu * mu) / 2.0 + lambda.cosh() * (self.s() / 2.0)
    }

    pub fn f1(&self, lambda: C64) -> C64 {
        lambda.sinh() * (self.s() / 2.0)
    }
}

impl SpectralData for BiYbSpectral {
    type Model = BiYbModel;

    fn model(&self) -> &BiYbModel {
        &self.model
    }

    fn name(&self) -> &'static str {
        if self.transposed_r {
            "biyb-transposed-r"
        } else {
            "biyb"
        }
    }

    fn coefficients(&self, lambda: C64) -> Result<Vec<C64>> {
        let f0 = self.f0(lambda);
        Ok(vec![f0, self.f1(lambda), (ONE - f0) * self.model.mu()])
    }

    fn component(&self, k: usize, x: &CMat) -> CMat {
        let xd = x.adjoint();
        match k {
            0 => (x - xd).scale(0.5),
            _ => {
                let t = (x + xd) * C64::new(0.0, -0.5 / self.model.eta());
                if k == 1 {
                    t
                } else {
                    yang_baxter_r(&t)
                }
            }
        }
    }

    fn component_adjoint(&self, k: usize, y: &CMat) -> CMat {
        match k {
            0 => y * C64::new(0.0, -self.model.eta()),
            1 => -y,
            _ => yang_baxter_r(y),
        }
    }

    fn rhat(&self, lambda: C64, rho: C64, y: &CMat) -> Result<CMat> {
        let (a, b) = (self.f0(lambda), self.f0(rho));
        let d = pole(a - b, "f0(lambda)-f0(rho)")?;
        let c = (a * self.f1(rho) + self.f1(lambda) * b) / d;
        let mu = if self.transposed_r { -self.model.mu() } else { self.model.mu() };
        Ok((y * c - yang_baxter_r(y).scale(mu)) * (ONE - b))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaxPair {
    pub l: CMat,
    pub m: CMat,
    pub lambda: C64,
}

/// `L(λ) = ξ - O(λ) j`, `M(λ) = -O(λ) E j`.
pub fn lax_pair<S: SpectralData>(sd: &S, j: &ElemOf<S>, lambda: C64) -> Result<LaxPair> {
    let model = sd.model();
    Ok(LaxPair {
        l: model.xi_g() - o(sd, lambda, j)?,
        m: -o(sd, lambda, &model.e(j))?,
        lambda,
    })
}

/// `‖dL/dt - [L, M]‖` with `dL/dt = -O(λ) dj/dt` taken from the equations of motion.
pub fn lax_defect<S: SpectralData>(sd: &S, j: &ElemOf<S>, lambda: C64) -> Result<f64> {
    let lp = lax_pair(sd, j, lambda)?;
    let dl = -o(sd, lambda, &eom_rhs(sd.model(), j))?;
    Ok((dl - commutator(&lp.l, &lp.m)).norm())
}

/// `tr L(λ)^k` for each requested power.
pub fn lax_invariants<S: SpectralData>(sd: &S, j: &ElemOf<S>, lambda: C64, powers: &[u32]) -> Result<Vec<C64>> {
    let l = lax_pair(sd, j, lambda)?.l;
    Ok(powers.iter().map(|&k| l.pow(k).trace()).collect())
}

/// Observables `tr L(λ)^k` for use with [`crate::dynamics::integrate`]. Poles are rejected up front.
pub fn lax_observables<'a, S: SpectralData>(
    sd: &'a S,
    lambdas: &[C64],
    powers: &[u32],
) -> Result<Observables<'a, ElemOf<S>>> {
    for &l in lambdas {
        sd.coefficients(l)?;
    }
    let mut names = Vec::new();
    for &l in lambdas {
        for &k in powers {
            names.push(format!("L_inv_{k}@{}", format_complex(l)));
        }
    }
    let lambdas = lambdas.to_vec();
    let powers = powers.to_vec();
    Ok(Observables {
        names,
        eval: Box::new(move |j| {
            lambdas
                .iter()
                .flat_map(|&l| lax_invariants(sd, j, l, &powers).expect("poles were excluded"))
                .collect()
        }),
    })
}

/// Lax equation residual along a sampled trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct LaxCheck {
    /// `max ‖dL/dt - [L, M]‖` with a five-point finite difference.
    pub residual: f64,
    /// Largest eigenvalue displacement of `L(λ)` relative to `max(‖spec L(0)‖, 1)`.
    pub spectral_drift: f64,
}

pub fn lax_residual<S: SpectralData>(
    sd: &S,
    traj: &Trajectory<<S::Model as EModel>::Point, ElemOf<S>>,
    lambda: C64,
) -> Result<LaxCheck> {
    let pairs = traj
        .currents
        .iter()
        .map(|j| lax_pair(sd, j, lambda))
        .collect::<Result<Vec<_>>>()?;
    let ls: Vec<CMat> = pairs.iter().map(|p| p.l.clone()).collect();
    let mut residual: f64 = 0.0;
    if ls.len() >= 5 {
        let dt = traj.times[1] - traj.times[0];
        for i in 2..ls.len() - 2 {
            let dl = five_point_derivative(&ls, i, dt);
            residual = residual.max((dl - commutator(&pairs[i].l, &pairs[i].m)).norm());
        }
    }
    let s0 = crate::dynamics::spectrum(&ls[0]);
    let scale = s0.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let spectral_drift = ls
        .iter()
        .map(|l| crate::dynamics::spectrum_distance(&s0, &crate::dynamics::spectrum(l)))
        .fold(0.0, f64::max)
        / scale;
    Ok(LaxCheck {
        residual,
        spectral_drift,
    })
}

/// Identities the spectral data must satisfy for the Lax pair to close.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    /// `[ξ, O(λ)x] = O(λ)[ξ, x]`
    XiEquivariance,
    /// `[O(λ)x, O(λ)Ex] = O(λ)[x, Ex]`
    BracketCompatibility,
    /// `[ξ, r̂(λ,ρ)y] = r̂(λ,ρ)[ξ, y]`
    RhatEquivariance,
    /// the bracket of `O†` images closes through `r̂`
    DualBracket,
    /// the form of `O†` images closes through `r̂`
    DualForm,
    /// `O†` is the adjoint of `O`
    Adjointness,
}

impl Condition {
    pub const ALL: [Condition; 6] = [
        Condition::XiEquivariance,
        Condition::BracketCompatibility,
        Condition::RhatEquivariance,
        Condition::DualBracket,
        Condition::DualForm,
        Condition::Adjointness,
    ];
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub samples: usize,
    pub seed: u64,
    pub max_residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl ConditionReport {
    pub fn new(condition: Condition, samples: usize, seed: u64, max_residual: f64, threshold: f64) -> Self {
        Self {
            condition,
            samples,
            seed,
            max_residual,
            threshold,
            pass: max_residual <= threshold,
        }
    }
}

/// One random draw for the condition suite.
struct Draw<E> {
    x: E,
    gx: CMat,
    gy: CMat,
    lambda: C64,
    rho: C64,
}

fn spectral_parameter(rng: &mut Rng) -> C64 {
    random::complex_gaussian(rng) * 0.5
}

fn draw<S: SpectralData>(sd: &S, rng: &mut Rng) -> Draw<ElemOf<S>> {
    let model = sd.model();
    let n = model.n();
    loop {
        let lambda = spectral_parameter(rng);
        let rho = spectral_parameter(rng);
        let d = Draw {
            x: model.random_elem(rng),
            gx: random::su_element(n, rng),
            gy: random::su_element(n, rng),
            lambda,
            rho,
        };
        // Keep away from poles so residuals measure the identities, not conditioning.
        let probe = CMat::identity(n, n);
        let ok = sd.coefficients(lambda).is_ok_and(|c| c.iter().all(|a| a.norm() < 20.0))
            && sd.coefficients(rho).is_ok_and(|c| c.iter().all(|a| a.norm() < 20.0))
            && sd.rhat(lambda, rho, &probe).is_ok_and(|r| r.norm() < 20.0 * (n as f64).sqrt())
            && sd.rhat(rho, lambda, &probe).is_ok_and(|r| r.norm() < 20.0 * (n as f64).sqrt());
        if ok {
            return d;
        }
    }
}

fn cx_norm<E: LinearSpace>(x: &Cx<E>) -> f64 {
    x.frob_norm()
}

/// Residual of a single condition on a single draw.
fn condition_residual<S: SpectralData>(sd: &S, c: Condition, d: &Draw<ElemOf<S>>) -> Result<f64> {
    let m = sd.model();
    let (l, r) = (d.lambda, d.rho);
    let br_d = |a: &ElemOf<S>, b: &ElemOf<S>| m.bracket(a, b);
    let form_d = |a: &ElemOf<S>, b: &ElemOf<S>| m.form(a, b);
    Ok(match c {
        Condition::XiEquivariance => {
            (commutator(m.xi_g(), &o(sd, l, &d.x)?) - o(sd, l, &m.bracket(m.xi(), &d.x))?).norm()
        }
        Condition::BracketCompatibility => {
            let ex = m.e(&d.x);
            (commutator(&o(sd, l, &d.x)?, &o(sd, l, &ex)?) - o(sd, l, &m.bracket(&d.x, &ex))?).norm()
        }
        Condition::RhatEquivariance => {
            let lhs = commutator(m.xi_g(), &sd.rhat(l, r, &d.gy)?);
            (lhs - sd.rhat(l, r, &commutator(m.xi_g(), &d.gy))?).norm()
        }
        Condition::DualBracket => {
            let ox = o_dagger(sd, l, &d.gx)?;
            let oy = o_dagger(sd, r, &d.gy)?;
            let mut total = cx_bracket(&ox, &oy, br_d);
            total.add(&o_dagger(sd, l, &commutator(&d.gx, &sd.rhat(l, r, &d.gy)?))?);
            total.add(&o_dagger(sd, r, &commutator(&sd.rhat(r, l, &d.gx)?, &d.gy))?);
            cx_norm(&total)
        }
        Condition::DualForm => {
            let ox = o_dagger(sd, l, &d.gx)?;
            let oy = o_dagger(sd, r, &d.gy)?;
            let v = cx_form(&ox, &oy, form_d)
                + trace_product(&d.gx, &sd.rhat(l, r, &d.gy)?)
                + trace_product(&sd.rhat(r, l, &d.gx)?, &d.gy);
            v.norm()
        }
        Condition::Adjointness => {
            let lhs = trace_product(&o(sd, l, &d.x)?, &d.gy);
            let rhs = cx_form(&Cx::from_real(d.x.clone()), &o_dagger(sd, l, &d.gy)?, form_d);
            (lhs - rhs).norm()
        }
    })
}

/// Evaluates every condition on `samples` seeded draws.
pub fn verify_conditions<S: SpectralData>(
    sd: &S,
    samples: usize,
    seed: u64,
    threshold: f64,
) -> Result<Vec<ConditionReport>> {
    if samples == 0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "must be at least 1".into(),
        });
    }
    let mut rng = rng_from_seed(seed);
    let draws: Vec<_> = (0..samples).map(|_| draw(sd, &mut rng)).collect();
    Condition::ALL
        .iter()
        .map(|&c| {
            let worst = draws
                .iter()
                .map(|d| condition_residual(sd, c, d))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok(ConditionReport::new(c, samples, seed, worst, threshold))
        })
        .collect()
}

/// Both sides of the fundamental r-matrix relation for `{(L(λ), x), (L(ρ), y)}`.
pub fn rmatrix_identity<S: SpectralData>(
    sd: &S,
    j: &ElemOf<S>,
    x: &CMat,
    y: &CMat,
    lambda: C64,
    rho: C64,
) -> Result<(C64, C64)> {
    let m = sd.model();
    let form_d = |a: &ElemOf<S>, b: &ElemOf<S>| m.form(a, b);
    let br_d = |a: &ElemOf<S>, b: &ElemOf<S>| m.bracket(a, b);
    let ox = o_dagger(sd, lambda, x)?;
    let oy = o_dagger(sd, rho, y)?;
    let jc = Cx::from_real(j.clone());
    let xic = Cx::from_real(m.xi().clone());
    let lhs = cx_form(&jc, &cx_bracket(&ox, &oy, br_d), form_d)
        + cx_form(&ox, &cx_bracket(&xic, &oy, br_d), form_d);
    let r_ly = sd.rhat(lambda, rho, y)?;
    let r_rx = sd.rhat(rho, lambda, x)?;
    let xi = m.xi_g();
    let rhs = -trace_product(&o(sd, lambda, j)?, &commutator(x, &r_ly))
        - trace_product(&o(sd, rho, j)?, &commutator(&r_rx, y))
        + trace_product(&commutator(xi, x), &r_ly)
        - trace_product(&commutator(xi, y), &r_rx);
    Ok((lhs, rhs))
}

/// `r(λ,ρ) = Σ r^{CB} T_C ⊗ T_B` over a real basis of `su(N)`.
#[derive(Clone, Debug)]
pub struct RMatrixTensor {
    pub coefficients: DMatrix<C64>,
    pub basis: RealBasis,
}

impl RMatrixTensor {
    /// `(x ⊗ y, r)`, which equals `(x, r̂ y)`.
    pub fn contract(&self, x: &CMat, y: &CMat) -> C64 {
        let xs: Vec<C64> = self.basis.generators().iter().map(|t| trace_product(x, t)).collect();
        let ys: Vec<C64> = self.basis.generators().iter().map(|t| trace_product(y, t)).collect();
        let d = self.basis.dim();
        let mut acc = C64::new(0.0, 0.0);
        for c in 0..d {
            for b in 0..d {
                acc += xs[c] * self.coefficients[(c, b)] * ys[b];
            }
        }
        acc
    }

    /// `Σ r^{CB} T_C ⊗ T_B` as an `N²×N²` Kronecker matrix (basis independent).
    pub fn to_kronecker(&self) -> CMat {
        let n = self.basis.n();
        let mut out = CMat::zeros(n * n, n * n);
        let g = self.basis.generators();
        for c in 0..g.len() {
            for b in 0..g.len() {
                out += g[c].kronecker(&g[b]) * self.coefficients[(c, b)];
            }
        }
        out
    }
}

pub fn rmatrix_tensor<S: SpectralData>(sd: &S, lambda: C64, rho: C64, basis: &RealBasis) -> Result<RMatrixTensor> {
    let d = basis.dim();
    let gram = basis.gram();
    let inv = gram.clone().try_inverse().ok_or(Error::Singular {
        what: "basis Gram matrix",
        condition: f64::INFINITY,
    })?;
    let mut m = DMatrix::<C64>::zeros(d, d);
    for (a, t) in basis.generators().iter().enumerate() {
        let col = basis.coordinates_complexified(&sd.rhat(lambda, rho, t)?);
        m.set_column(a, &col);
    }
    let inv_c = inv.map(|v| C64::new(v, 0.0));
    Ok(RMatrixTensor {
        coefficients: m * inv_c,
        basis: basis.clone(),
    })
}

/// `L(λ) = ξ - O(λ) j(l)` straight from a group point.
pub fn lax_at_point<S: SpectralData>(sd: &S, l: &<S::Model as EModel>::Point, lambda: C64) -> Result<LaxPair> {
    lax_pair(sd, &current_of(sd.model(), l), lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::I;
    use nalgebra::DVector;

    fn pcm(n: usize) -> PcmSpectral {
        let mut d = vec![I; n];
        d[n - 1] = I * -((n - 1) as f64);
        PcmSpectral::new(TStarModel::new(CMat::from_diagonal(&DVector::from_vec(d))).unwrap())
    }

    fn biyb(n: usize, eta: f64, mu: f64) -> BiYbSpectral {
        let mut d = vec![I; n];
        d[n - 1] = I * -((n - 1) as f64);
        BiYbSpectral::new(BiYbModel::new(CMat::from_diagonal(&DVector::from_vec(d)), eta, mu).unwrap())
    }

    #[test]
    fn pcm_at_zero_is_first_component() {
        let sd = pcm(2);
        let mut rng = rng_from_seed(1);
        let x = sd.model().random_elem(&mut rng);
        let ox = o(&sd, C64::new(0.0, 0.0), &x).unwrap();
        assert!((ox - &x.first).norm() < 1e-15);
    }

    #[test]
    fn poles_are_reported() {
        let sd = pcm(2);
        let z = CMat::identity(2, 2);
        assert!(matches!(sd.coefficients(ONE), Err(Error::Pole { denominator: "1-lambda^2" })));
        assert!(matches!(
            sd.rhat(C64::new(0.2, 0.0), C64::new(0.2, 0.0), &z),
            Err(Error::Pole { denominator: "rho-lambda" })
        ));
        let b = biyb(2, 0.5, 0.2);
        let l = C64::new(0.3, 0.1);
        assert!(matches!(b.rhat(l, -l, &z), Err(Error::Pole { .. })));
    }

    #[test]
    fn biyb_functions_at_eta_one() {
        let b = biyb(2, 1.0, 0.0);
        let l = C64::new(0.37, -0.2);
        assert!((b.f0(l) - (ONE + l.cosh())).norm() < 1e-14);
        assert!((b.f1(l) - l.sinh()).norm() < 1e-14);
    }

    #[test]
    fn lax_pair_at_zero_current() {
        let sd = biyb(3, 0.7, 0.3);
        let lp = lax_pair(&sd, &CMat::zeros(3, 3), C64::new(0.4, 0.1)).unwrap();
        assert_eq!(&lp.l, sd.model().xi_g());
        assert_eq!(lp.m.norm(), 0.0);
    }

    #[test]
    fn reports_serialize() {
        let r = ConditionReport::new(Condition::DualBracket, 3, 7, 1e-14, 1e-10);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.starts_with("{\"condition\":\"dual-bracket\",\"samples\":3,\"seed\":7"));
        assert!(r.pass);
    }

    #[test]
    fn zero_samples_is_an_error() {
        assert!(verify_conditions(&pcm(2), 0, 1, 1e-10).is_err());
    }
}
