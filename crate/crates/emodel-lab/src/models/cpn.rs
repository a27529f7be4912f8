//! `CP^N` as the orbit of `ζ = i diag(1, …, 1, -N)` in `SU(N+1)`.
//!
//! Chart variables: `χ ∈ C^N` with `|χ| < 1`, velocity `χ̇`, momenta `w` or `p`.
//! All chart functions refuse `|χ| ≥ 1 - 1e-10`; near that boundary use the homogeneous
//! coordinates of [`crate::models::reduction`].

use nalgebra::DVector;

use crate::algebra::{CMat, TStarAlgebraElement, C64, I, ONE, ZERO};
use crate::doubles::TStarPoint;
use crate::dynamics::TStarModel;
use crate::error::{Error, Result};

pub type CVec = DVector<C64>;

const CHART_TOL: f64 = 1e-10;

pub fn zeta(n: usize) -> CMat {
    let mut d = vec![I; n + 1];
    d[n] = C64::new(0.0, -(n as f64));
    CMat::from_diagonal(&DVector::from_vec(d))
}

pub fn model(n: usize) -> TStarModel {
    TStarModel::new(zeta(n)).expect("zeta is traceless anti-hermitian")
}

/// Derived chart scalars of a point `χ`.
#[derive(Clone, Copy, Debug)]
struct Chart {
    r2: f64,
    /// `√(1-|χ|²)`
    sq: f64,
    /// `(1-√(1-|χ|²))/|χ|²`, written as `1/(1+√…)` so that it is smooth at `χ = 0`.
    alpha: f64,
}

fn chart(chi: &CVec) -> Result<Chart> {
    let r2 = chi.norm_squared();
    let norm = r2.sqrt();
    if !(norm < 1.0 - CHART_TOL) {
        return Err(Error::ChartDomain { norm });
    }
    let sq = (1.0 - r2).sqrt();
    Ok(Chart {
        r2,
        sq,
        alpha: 1.0 / (1.0 + sq),
    })
}

fn check_len(a: &CVec, n: usize) -> Result<()> {
    if a.len() != n {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: n,
        });
    }
    Ok(())
}

pub fn alpha(chi: &CVec) -> Result<f64> {
    Ok(chart(chi)?.alpha)
}

/// `k(χ) = [[1 - α χχ†, χ], [-χ†, √(1-|χ|²)]]` in `SU(N+1)`.
pub fn chart_embed(chi: &CVec) -> Result<CMat> {
    let c = chart(chi)?;
    let n = chi.len();
    let mut k = CMat::zeros(n + 1, n + 1);
    for a in 0..n {
        for b in 0..n {
            let delta = if a == b { ONE } else { ZERO };
            k[(a, b)] = delta - chi[a] * chi[b].conj() * c.alpha;
        }
        k[(a, n)] = chi[a];
        k[(n, a)] = -chi[a].conj();
    }
    k[(n, n)] = C64::new(c.sq, 0.0);
    Ok(k)
}

/// `d√(1-|χ|²)/dt = -Re(χ†χ̇)/√(1-|χ|²)`.
pub fn sqrt_dot(chi: &CVec, chi_dot: &CVec) -> Result<f64> {
    check_len(chi_dot, chi.len())?;
    let c = chart(chi)?;
    Ok(-chi.dotc(chi_dot).re / c.sq)
}

/// Exact `dk/dt` along `χ̇`. Uses `α̇ = -(d√)/(1+√)²`.
pub fn chart_embed_velocity(chi: &CVec, chi_dot: &CVec) -> Result<CMat> {
    let c = chart(chi)?;
    let sd = sqrt_dot(chi, chi_dot)?;
    let ad = -sd / (1.0 + c.sq).powi(2);
    let n = chi.len();
    let mut kd = CMat::zeros(n + 1, n + 1);
    for a in 0..n {
        for b in 0..n {
            kd[(a, b)] = -(chi[a] * chi[b].conj() * ad
                + (chi_dot[a] * chi[b].conj() + chi[a] * chi_dot[b].conj()) * c.alpha);
        }
        kd[(a, n)] = chi_dot[a];
        kd[(n, a)] = -chi_dot[a].conj();
    }
    kd[(n, n)] = C64::new(sd, 0.0);
    Ok(kd)
}

/// `k⁻¹k' = (N+1) i [[-χχ†, √χ], [√χ†, |χ|²]]`.
pub fn k_inv_k_prime(chi: &CVec) -> Result<CMat> {
    let c = chart(chi)?;
    let n = chi.len();
    let f = I * (n as f64 + 1.0);
    let mut m = CMat::zeros(n + 1, n + 1);
    for a in 0..n {
        for b in 0..n {
            m[(a, b)] = -f * chi[a] * chi[b].conj();
        }
        m[(a, n)] = f * chi[a] * c.sq;
        m[(n, a)] = f * chi[a].conj() * c.sq;
    }
    m[(n, n)] = f * c.r2;
    Ok(m)
}

/// Sign in front of the `d√(1-|χ|²)/dt` term of the projected velocity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqrtDotSign {
    /// `χ̇ - (d√)χ - α(χ†χ̇)χ`
    Minus,
    /// `χ̇ + (d√)χ - α(χ†χ̇)χ`, the sign flip a derivation slip would give
    Plus,
}

/// The upper-right column `v` of `P⊥ k⁻¹k̇ = [[0, v], [-v†, 0]]`.
pub fn pperp_velocity(chi: &CVec, chi_dot: &CVec, sign: SqrtDotSign) -> Result<CVec> {
    let c = chart(chi)?;
    let sd = sqrt_dot(chi, chi_dot)?;
    let s = match sign {
        SqrtDotSign::Minus => -sd,
        SqrtDotSign::Plus => sd,
    };
    Ok(chi_dot + chi * C64::new(s, 0.0) - chi * (chi.dotc(chi_dot) * c.alpha))
}

/// `[[0, v], [-v†, 0]]`.
pub fn pperp_block(v: &CVec) -> CMat {
    let n = v.len();
    let mut m = CMat::zeros(n + 1, n + 1);
    for a in 0..n {
        m[(a, n)] = v[a];
        m[(n, a)] = -v[a].conj();
    }
    m
}

/// Chart Lagrangian `|v|² - (N+1)²|χ|²`.
pub fn chart_lagrangian(chi: &CVec, chi_dot: &CVec, sign: SqrtDotSign) -> Result<f64> {
    let v = pperp_velocity(chi, chi_dot, sign)?;
    let n1 = chi.len() as f64 + 1.0;
    Ok(v.norm_squared() - n1 * n1 * chi.norm_squared())
}

/// Homogeneous coordinates `Z = (χ, √(1-|χ|²))` and their velocity.
pub fn gauge_fix(chi: &CVec, chi_dot: &CVec) -> Result<(CVec, CVec)> {
    let c = chart(chi)?;
    let sd = sqrt_dot(chi, chi_dot)?;
    let n = chi.len();
    let z = CVec::from_fn(n + 1, |i, _| if i < n { chi[i] } else { C64::new(c.sq, 0.0) });
    let zd = CVec::from_fn(n + 1, |i, _| if i < n { chi_dot[i] } else { C64::new(sd, 0.0) });
    Ok((z, zd))
}

/// `|dZ|² - |Z†dZ|²`.
pub fn fubini_study(z: &CVec, dz: &CVec) -> f64 {
    dz.norm_squared() - z.dotc(dz).norm_sqr()
}

/// Global Lagrangian on `|Z| = 1` (multiplier eliminated):
/// `|Ż|² - |Z†Ż|² + (N+1)²(|Z_{N+1}|² - 1)`.
pub fn global_lagrangian(z: &CVec, z_dot: &CVec) -> Result<f64> {
    check_len(z_dot, z.len())?;
    let n1 = z.len() as f64;
    let last = z[z.len() - 1].norm_sqr();
    Ok(fubini_study(z, z_dot) + n1 * n1 * (last - 1.0))
}

/// `ρ' = i [[0, w], [w†, 0]]`.
pub fn rho_prime_of_w(w: &CVec) -> CMat {
    let n = w.len();
    let mut m = CMat::zeros(n + 1, n + 1);
    for a in 0..n {
        m[(a, n)] = I * w[a];
        m[(n, a)] = I * w[a].conj();
    }
    m
}

/// `ρ ∈ 𝒦⊥` with `[ζ, ρ] = ρ'(w)`.
pub fn rho_of_w(w: &CVec) -> CMat {
    let n = w.len();
    let f = 1.0 / (n as f64 + 1.0);
    let mut m = CMat::zeros(n + 1, n + 1);
    for a in 0..n {
        m[(a, n)] = w[a] * f;
        m[(n, a)] = -w[a].conj() * f;
    }
    m
}

/// Phase-space point `(k(χ), k ρ(w) k⁻¹)` of `T*SU(N+1)`.
pub fn tstar_point(chi: &CVec, w: &CVec) -> Result<TStarPoint> {
    check_len(w, chi.len())?;
    let k = chart_embed(chi)?;
    let kappa = &k * rho_of_w(w) * k.adjoint();
    Ok(TStarPoint { k, kappa })
}

/// `p = w - ((w†χ - χ†w)/(2√)) χ - α (χ†w) χ`.
pub fn p_of_w(chi: &CVec, w: &CVec) -> Result<CVec> {
    check_len(w, chi.len())?;
    let c = chart(chi)?;
    let t = (w.dotc(chi) - chi.dotc(w)) / (2.0 * c.sq);
    Ok(w - chi * t - chi * (chi.dotc(w) * c.alpha))
}

/// Inverse of [`p_of_w`].
pub fn w_of_p(chi: &CVec, p: &CVec) -> Result<CVec> {
    check_len(p, chi.len())?;
    let c = chart(chi)?;
    let t = (p.dotc(chi) - chi.dotc(p)) / (2.0 * c.sq);
    Ok(p + chi * t + chi * (chi.dotc(p) * (c.alpha / c.sq)))
}

/// `ξ = w - α(χ†w)χ`.
pub fn xi_of_w(chi: &CVec, w: &CVec) -> Result<CVec> {
    check_len(w, chi.len())?;
    let c = chart(chi)?;
    Ok(w - chi * (chi.dotc(w) * c.alpha))
}

/// `w = ξ + (α/√)(χ†ξ)χ`.
pub fn w_of_xi(chi: &CVec, xi: &CVec) -> Result<CVec> {
    check_len(xi, chi.len())?;
    let c = chart(chi)?;
    Ok(xi + chi * (chi.dotc(xi) * (c.alpha / c.sq)))
}

/// `p = ξ + ((χ†ξ - ξ†χ)/(2(1-|χ|²))) χ`.
pub fn p_of_xi(chi: &CVec, xi: &CVec) -> Result<CVec> {
    check_len(xi, chi.len())?;
    let c = chart(chi)?;
    Ok(xi + chi * ((chi.dotc(xi) - xi.dotc(chi)) / (2.0 * (1.0 - c.r2))))
}

/// `|w|² + (N+1)²|χ|²`.
pub fn hamiltonian_w(chi: &CVec, w: &CVec) -> Result<f64> {
    check_len(w, chi.len())?;
    chart(chi)?;
    let n1 = chi.len() as f64 + 1.0;
    Ok(w.norm_squared() + n1 * n1 * chi.norm_squared())
}

struct PScalars {
    r2: f64,
    /// `χ†p + p†χ`
    s: C64,
    /// `χ†p - p†χ`
    d: C64,
}

fn p_scalars(chi: &CVec, p: &CVec) -> Result<PScalars> {
    check_len(p, chi.len())?;
    let c = chart(chi)?;
    let a = chi.dotc(p);
    let b = p.dotc(chi);
    Ok(PScalars { r2: c.r2, s: a + b, d: a - b })
}

/// `|p|² + (χ†p+p†χ)²/(4(1-|χ|²)) + ¼(χ†p-p†χ)² + (N+1)²|χ|²`.
pub fn hamiltonian_p(chi: &CVec, p: &CVec) -> Result<f64> {
    let PScalars { r2, s, d } = p_scalars(chi, p)?;
    let n1 = chi.len() as f64 + 1.0;
    let h = C64::new(p.norm_squared(), 0.0) + s * s / (4.0 * (1.0 - r2)) + d * d * 0.25 + n1 * n1 * r2;
    Ok(h.re)
}

/// First-order Lagrangian in `(χ, w)`: `-2 Im(w† v) - |w|² - (N+1)²|χ|²`.
pub fn first_order_lagrangian_w(chi: &CVec, chi_dot: &CVec, w: &CVec) -> Result<f64> {
    let v = pperp_velocity(chi, chi_dot, SqrtDotSign::Minus)?;
    Ok(-2.0 * w.dotc(&v).im - hamiltonian_w(chi, w)?)
}

/// First-order Lagrangian in `(χ, p)`: `i p†χ̇ - i χ̇†p - H(χ, p)`.
pub fn first_order_lagrangian_p(chi: &CVec, chi_dot: &CVec, p: &CVec) -> Result<f64> {
    check_len(chi_dot, chi.len())?;
    let kin = I * p.dotc(chi_dot) - I * chi_dot.dotc(p);
    Ok(kin.re - hamiltonian_p(chi, p)?)
}

/// Hamilton's equations `iχ̇ = ∂H/∂p̄`, `iṗ = ∂H/∂χ̄` for [`hamiltonian_p`].
pub fn hamilton_rhs(chi: &CVec, p: &CVec) -> Result<(CVec, CVec)> {
    let PScalars { r2, s, d } = p_scalars(chi, p)?;
    let n1 = chi.len() as f64 + 1.0;
    let g = s / (2.0 * (1.0 - r2));
    let i_chi_dot = p + chi * g - chi * (d * 0.5);
    let i_p_dot = p * g + chi * C64::new(n1 * n1, 0.0) + chi * (s * s / (4.0 * (1.0 - r2).powi(2))) + p * (d * 0.5);
    Ok((i_chi_dot * (-I), i_p_dot * (-I)))
}

/// Chart variables `(χ, p)` of a point of `T*SU(N+1)` via its current `j`.
///
/// With `𝒲 = j₁ = ζ - kζk⁻¹` and `𝒥 = -j₂`, this inverts the chart map wherever
/// `Z_{N+1} ≠ 0`.
pub fn chart_of_current(zeta: &CMat, j: &TStarAlgebraElement) -> Result<(CVec, CVec)> {
    chart_of_reduced(zeta, &j.first, &(-&j.second))
}

/// `(χ, p)` from reduced variables `(𝒲, 𝒥)`.
pub fn chart_of_reduced(zeta: &CMat, w: &CMat, j: &CMat) -> Result<(CVec, CVec)> {
    let n = w.nrows() - 1;
    let n1 = n as f64 + 1.0;
    let base = -I * w[(n, n)] + n1;
    if base.norm() < 1e-12 {
        return Err(Error::ChartDomain { norm: 1.0 });
    }
    let den = (base * n1).sqrt();
    let c = crate::algebra::commutator(j, &(w - zeta));
    let chi = CVec::from_fn(n, |a, _| -I * w[(a, n)] / den);
    let p = CVec::from_fn(n, |a, _| {
        I * (j[(a, n)] * n1 - I * c[(a, n)]) / (den * 2.0)
            + I * w[(a, n)] * c[(n, n)] / (2.0 * n1.sqrt() * base.powf(1.5))
    });
    chart(&chi)?;
    Ok((chi, p))
}

/// Max deviation of [`hamilton_rhs`] from central-difference Wirtinger derivatives of
/// [`hamiltonian_p`].
pub fn hamilton_fd_residual(chi: &CVec, p: &CVec, eps: f64) -> Result<f64> {
    let n = chi.len();
    let (cd, pd) = hamilton_rhs(chi, p)?;
    let mut worst = 0.0_f64;
    for a in 0..n {
        for (which, target) in [(0, &pd), (1, &cd)] {
            let h = |dz: C64| -> Result<f64> {
                let mut c = chi.clone();
                let mut q = p.clone();
                if which == 0 {
                    c[a] += dz;
                } else {
                    q[a] += dz;
                }
                hamiltonian_p(&c, &q)
            };
            let gr = (h(C64::new(eps, 0.0))? - h(C64::new(-eps, 0.0))?) / (2.0 * eps);
            let gi = (h(C64::new(0.0, eps))? - h(C64::new(0.0, -eps))?) / (2.0 * eps);
            let dbar = C64::new(gr, gi) * 0.5;
            worst = worst.max((I * target[a] - dbar).norm());
        }
    }
    Ok(worst)
}

/// Chart identities at random points with `|χ| ∈ [0.1, 0.9]`.
pub fn cpn_suite(n: usize, samples: usize, seed: u64) -> Result<crate::models::SuiteReport> {
    use crate::dynamics::{current_of, hamiltonian};
    use crate::random::{complex_vector, rng_from_seed, uniform};
    crate::error::check_positive("n", n as f64)?;
    let z = zeta(n);
    let m = model(n);
    let stab = crate::algebra::Stabilizer::new(&z)?;
    let n1 = n as f64 + 1.0;
    let mut rng = rng_from_seed(seed);
    let mut rep = crate::models::SuiteReport::new(&format!("cp{n}"), seed, samples);
    for _ in 0..samples {
        let r = uniform(&mut rng, 0.1, 0.9);
        let chi = CVec::from_vec(complex_vector(n, &mut rng));
        let chi = &chi * C64::new(r / chi.norm(), 0.0);
        let chi_dot = CVec::from_vec(complex_vector(n, &mut rng));
        let w = CVec::from_vec(complex_vector(n, &mut rng));

        let k = chart_embed(&chi)?;
        let kdot = chart_embed_velocity(&chi, &chi_dot)?;
        let kk = k.adjoint() * &z * &k - &z;
        rep.record("k-inv-k-prime", crate::algebra::max_abs(&(&kk - k_inv_k_prime(&chi)?)), 1e-12);
        let tr = (&kk * &kk).trace().re;
        rep.record("killing-norm", (tr + 2.0 * n1 * n1 * r * r).abs(), 1e-12);

        let v = pperp_velocity(&chi, &chi_dot, SqrtDotSign::Minus)?;
        let generic = stab.project_perp(&(k.adjoint() * &kdot));
        rep.record("pperp-velocity", crate::algebra::max_abs(&(generic - pperp_block(&v))), 1e-12);

        let (gz, gzd) = gauge_fix(&chi, &chi_dot)?;
        let chart_l = chart_lagrangian(&chi, &chi_dot, SqrtDotSign::Minus)?;
        let scale = chart_l.abs().max(1.0);
        let global = global_lagrangian(&gz, &gzd)?;
        rep.record("chart-vs-global", (chart_l - global).abs() / scale, 1e-10);
        let flipped = chart_lagrangian(&chi, &chi_dot, SqrtDotSign::Plus)?;
        rep.note("chart-vs-global-flipped-sign", (flipped - global).abs() / scale);
        let generic_l = crate::models::pcm::second_order_integrand(&z, &k, &kdot)?;
        rep.record("chart-vs-generic", (chart_l - generic_l).abs() / scale, 1e-10);
        rep.record("fubini-study", (v.norm_squared() - fubini_study(&gz, &gzd)).abs() / scale, 1e-12);

        let p = p_of_w(&chi, &w)?;
        let hw = hamiltonian_w(&chi, &w)?;
        rep.record("hamiltonian-w-vs-p", (hw - hamiltonian_p(&chi, &p)?).abs() / hw.max(1.0), 1e-12);
        let l = tstar_point(&chi, &w)?;
        let j = current_of(&m, &l);
        rep.record("hamiltonian-vs-emodel", (hw - hamiltonian(&m, &j)).abs() / hw.max(1.0), 1e-12);
        let (chi2, p2) = chart_of_current(&z, &j)?;
        rep.record("chart-of-current", (&chi2 - &chi).camax().max((&p2 - &p).camax()), 1e-12);

        let fd = hamilton_fd_residual(&chi, &p, 1e-5)?;
        rep.record("hamilton-equations-fd", fd / hw.max(1.0), 1e-6);

        let l1 = first_order_lagrangian_w(&chi, &chi_dot, &w)?;
        let l2 = first_order_lagrangian_p(&chi, &chi_dot, &p)?;
        rep.record("first-order-w-vs-p", (l1 - l2).abs() / l1.abs().max(1.0), 1e-10);
        let (on_shell, _) = hamilton_rhs(&chi, &p)?;
        let l_on = first_order_lagrangian_p(&chi, &on_shell, &p)?;
        let l_second = chart_lagrangian(&chi, &on_shell, SqrtDotSign::Minus)?;
        rep.record("legendre", (l_on - l_second).abs() / l_second.abs().max(1.0), 1e-10);
    }
    Ok(rep)
}
