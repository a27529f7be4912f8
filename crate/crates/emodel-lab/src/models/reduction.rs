//! `CP^N` dynamics from `C^{N+1} × C^{N+1}` by symplectic reduction.
//!
//! The phase space carries `(Z, Y)` with constraints `|Z|² = 1`, `Y†Z - Z†Y = 0` and the
//! two gauge flows `(Y, Z) ↦ (e^{iβ}Y, e^{iβ}Z)`, `(Y, Z) ↦ (Y + βZ, Z)`.

use crate::algebra::{commutator, LinearSpace, CMat, C64, I, ONE};
use crate::dynamics::rk4_trajectory;
use crate::error::{Error, Result};
use crate::integrability::POLE_TOL;
use crate::models::cpn::{self, CVec};
use crate::models::SuiteReport;
use crate::random::{complex_gaussian, complex_vector, rng_from_seed, Rng};

#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousState {
    pub z: CVec,
    pub y: CVec,
}

fn e_last(len: usize) -> CVec {
    CVec::from_fn(len, |i, _| if i + 1 == len { ONE } else { C64::new(0.0, 0.0) })
}

fn outer(a: &CVec, b: &CVec) -> CMat {
    a * b.adjoint()
}

impl LinearSpace for HomogeneousState {
    fn zero_like(&self) -> Self {
        Self {
            z: CVec::zeros(self.z.len()),
            y: CVec::zeros(self.y.len()),
        }
    }

    fn add_scaled(&mut self, a: f64, o: &Self) {
        let a = C64::new(a, 0.0);
        self.z += &o.z * a;
        self.y += &o.y * a;
    }

    fn scale(&self, a: f64) -> Self {
        let a = C64::new(a, 0.0);
        Self {
            z: &self.z * a,
            y: &self.y * a,
        }
    }

    fn frob_norm(&self) -> f64 {
        (self.z.norm_squared() + self.y.norm_squared()).sqrt()
    }

    fn all_finite(&self) -> bool {
        self.z.iter().chain(self.y.iter()).all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl HomogeneousState {
    /// `N` of `CP^N`.
    pub fn n(&self) -> usize {
        self.z.len() - 1
    }

    /// Lift of chart data: `Z = (χ, √(1-|χ|²))`, `Y = -2i(ξ, -χ†ξ/√(1-|χ|²))` with `ξ = ξ(w)`.
    pub fn from_chart(chi: &CVec, w: &CVec) -> Result<Self> {
        let xi = cpn::xi_of_w(chi, w)?;
        let sq = (1.0 - chi.norm_squared()).sqrt();
        let n = chi.len();
        let last = -chi.dotc(&xi) / sq;
        let z = CVec::from_fn(n + 1, |i, _| if i < n { chi[i] } else { C64::new(sq, 0.0) });
        let y = CVec::from_fn(n + 1, |i, _| if i < n { xi[i] } else { last }) * C64::new(0.0, -2.0);
        Ok(Self { z, y })
    }

    /// `(|Z|² - 1, Y†Z - Z†Y)`.
    pub fn constraints(&self) -> (f64, C64) {
        (self.z.norm_squared() - 1.0, self.y.dotc(&self.z) - self.z.dotc(&self.y))
    }

    /// `Ỹ = Y - (Z†Y) Z`, invariant under both gauge flows.
    pub fn k(&self) -> CVec {
        &self.y - &self.z * self.z.dotc(&self.y)
    }

    /// `H̃ = ¼|Z|²|Y|² - ¼|Z†Y|² + (N+1)²(1 - |Z_{N+1}|²)`.
    pub fn hamiltonian(&self) -> f64 {
        let n1 = self.z.len() as f64;
        let last = self.z[self.z.len() - 1].norm_sqr();
        0.25 * self.z.norm_squared() * self.y.norm_squared() - 0.25 * self.z.dotc(&self.y).norm_sqr()
            + n1 * n1 * (1.0 - last)
    }

    /// Unreduced flow `Ż = 2∂H̃/∂Ȳ`, `Ẏ = -2∂H̃/∂Z̄`.
    pub fn rhs(&self) -> Self {
        let n1 = self.z.len() as f64;
        let zy = self.z.dotc(&self.y);
        let zn = self.z[self.z.len() - 1];
        let zdot = &self.y * C64::new(0.5 * self.z.norm_squared(), 0.0) - &self.z * (zy * 0.5);
        let ydot = &self.z * C64::new(-0.5 * self.y.norm_squared(), 0.0)
            + &self.y * (zy.conj() * 0.5)
            + e_last(self.z.len()) * (2.0 * n1 * n1 * zn);
        Self { z: zdot, y: ydot }
    }

    /// `(Ż, Ỹ̇)` written through `Ỹ` alone, valid on the constraint surface.
    pub fn reduced_velocity(&self) -> (CVec, CVec) {
        let n1 = self.z.len() as f64;
        let k = self.k();
        let zn = self.z[self.z.len() - 1];
        let zdot = &k * C64::new(0.5, 0.0);
        let e = e_last(self.z.len());
        let kdot = &self.z * C64::new(-0.5 * k.norm_squared(), 0.0) + (e - &self.z * zn.conj()) * (2.0 * n1 * n1 * zn);
        (zdot, kdot)
    }

    pub fn phase_flow(&self, beta: f64) -> Self {
        let u = C64::from_polar(1.0, beta);
        Self {
            z: &self.z * u,
            y: &self.y * u,
        }
    }

    pub fn shift_flow(&self, beta: f64) -> Self {
        Self {
            z: self.z.clone(),
            y: &self.y + &self.z * C64::new(beta, 0.0),
        }
    }

    /// Gauge-invariant `(𝒲, 𝒥)`.
    pub fn reduce(&self) -> ReducedState {
        let n1 = self.z.len() as f64;
        let e = e_last(self.z.len());
        let k = self.k();
        let w = (outer(&self.z, &self.z) - outer(&e, &e)) * (I * n1);
        let j = (outer(&k, &self.z) - outer(&self.z, &k)) * C64::new(0.5, 0.0);
        ReducedState { w, j }
    }
}

/// `(𝒲, 𝒥)` on the reduced phase space.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedState {
    pub w: CMat,
    pub j: CMat,
}

impl LinearSpace for ReducedState {
    fn zero_like(&self) -> Self {
        Self {
            w: self.w.zero_like(),
            j: self.j.zero_like(),
        }
    }

    fn add_scaled(&mut self, a: f64, o: &Self) {
        self.w.add_scaled(a, &o.w);
        self.j.add_scaled(a, &o.j);
    }

    fn scale(&self, a: f64) -> Self {
        Self {
            w: self.w.scale(a),
            j: self.j.scale(a),
        }
    }

    fn frob_norm(&self) -> f64 {
        (self.w.norm_squared() + self.j.norm_squared()).sqrt()
    }

    fn all_finite(&self) -> bool {
        self.w.all_finite() && self.j.all_finite()
    }
}

impl ReducedState {
    /// `𝒲̇ = [𝒥, 𝒲 - ζ]`, `𝒥̇ = [ζ, 𝒲]`.
    pub fn rhs(&self, zeta: &CMat) -> Self {
        Self {
            w: commutator(&self.j, &(&self.w - zeta)),
            j: commutator(zeta, &self.w),
        }
    }

    /// `L = ζ - (λ𝒥 + 𝒲)/(1-λ²)`, `M = -(𝒥 + λ𝒲)/(1-λ²)`.
    pub fn lax_pair(&self, zeta: &CMat, lambda: C64) -> Result<(CMat, CMat)> {
        let d = ONE - lambda * lambda;
        if d.norm() < POLE_TOL {
            return Err(Error::Pole {
                denominator: "1-lambda^2",
            });
        }
        let l = zeta - (&self.j * lambda + &self.w) / d;
        let m = -(&self.j + &self.w * lambda) / d;
        Ok((l, m))
    }
}

/// Residual of `L̇ = [L, M]` for the reduced Lax pair evaluated with the exact flow.
pub fn reduced_lax_defect(zeta: &CMat, s: &ReducedState, lambda: C64) -> Result<f64> {
    let (l, m) = s.lax_pair(zeta, lambda)?;
    let sd = s.rhs(zeta);
    let d = ONE - lambda * lambda;
    let ldot = -(&sd.j * lambda + &sd.w) / d;
    Ok((ldot - commutator(&l, &m)).norm())
}

/// Random chart point with `|χ| = r` and Gaussian momentum.
pub fn random_chart(n: usize, r: f64, rng: &mut Rng) -> (CVec, CVec) {
    let chi = CVec::from_vec(complex_vector(n, rng));
    let chi = &chi * C64::new(r / chi.norm(), 0.0);
    (chi, CVec::from_vec(complex_vector(n, rng)))
}

fn homo_err(a: &CVec, b: &CVec) -> f64 {
    (a - b).camax()
}

/// Runs every reduction identity on `samples` random chart points.
pub fn reduction_suite(n: usize, samples: usize, seed: u64) -> Result<SuiteReport> {
    crate::error::check_positive("n", n as f64)?;
    let zeta = cpn::zeta(n);
    let model = cpn::model(n);
    let mut rng = rng_from_seed(seed);
    let mut rep = SuiteReport::new(&format!("reduction-cp{n}"), seed, samples);
    for _ in 0..samples {
        let r = 0.2 + 0.6 * crate::random::uniform(&mut rng, 0.0, 1.0);
        let (chi, w) = random_chart(n, r, &mut rng);
        let s = HomogeneousState::from_chart(&chi, &w)?;
        let (c1, c2) = s.constraints();
        rep.record("constraints", c1.abs().max(c2.norm()), 1e-12);

        let h = cpn::hamiltonian_w(&chi, &w)?;
        rep.record("hamiltonian", (s.hamiltonian() - h).abs() / h.max(1.0), 1e-12);

        // reduced variables against the T*K current
        let l = cpn::tstar_point(&chi, &w)?;
        let cur = crate::dynamics::current_of(&model, &l);
        let red = s.reduce();
        rep.record(
            "reduced-vs-current",
            (&red.w - &cur.first).camax().max((&red.j + &cur.second).camax()),
            1e-12,
        );

        // gauge orbit
        let b1 = complex_gaussian(&mut rng).re;
        let b2 = complex_gaussian(&mut rng).re;
        let g1 = s.phase_flow(b1).reduce();
        let g2 = s.shift_flow(b2).reduce();
        let orb = (&g1.w - &red.w)
            .camax()
            .max((&g1.j - &red.j).camax())
            .max((&g2.w - &red.w).camax())
            .max((&g2.j - &red.j).camax());
        rep.record("gauge-orbit", orb, 1e-12);

        // constraint preservation: d/dt of both constraints along the flow
        let sd = s.rhs();
        let dc1 = 2.0 * s.z.dotc(&sd.z).re;
        let dc2 = sd.y.dotc(&s.z) + s.y.dotc(&sd.z) - sd.z.dotc(&s.y) - s.z.dotc(&sd.y);
        rep.record("constraint-velocity", dc1.abs().max(dc2.norm()), 1e-12);

        // reduced velocities
        let (zd, kd) = s.reduced_velocity();
        let k = s.k();
        let kdot = &sd.y - &s.z * (sd.z.dotc(&s.y) + s.z.dotc(&sd.y)) - &sd.z * s.z.dotc(&s.y);
        rep.record("reduced-velocity", homo_err(&zd, &sd.z).max(homo_err(&kd, &kdot)), 1e-12);

        // reduced equations from the unreduced flow
        let n1 = (n + 1) as f64;
        let wd = (outer(&sd.z, &s.z) + outer(&s.z, &sd.z)) * (I * n1);
        let jd = (outer(&kdot, &s.z) + outer(&k, &sd.z) - outer(&sd.z, &k) - outer(&s.z, &kdot)) * C64::new(0.5, 0.0);
        let ab = red.rhs(&zeta);
        rep.record("reduced-eom", (&wd - &ab.w).camax().max((&jd - &ab.j).camax()), 1e-12);

        // chart recovery and Hamilton's equations in the chart
        let (chi2, p2) = cpn::chart_of_reduced(&zeta, &red.w, &red.j)?;
        let p = cpn::p_of_w(&chi, &w)?;
        rep.record("chart-recovery", homo_err(&chi2, &chi).max(homo_err(&p2, &p)), 1e-12);

        // χ̇ and ṗ predicted by the reduced flow reproduce the chart Hamiltonian flow
        let eps = 1e-5;
        let plus = {
            let mut t = red.clone();
            t.add_scaled(eps, &ab);
            cpn::chart_of_reduced(&zeta, &t.w, &t.j)?
        };
        let minus = {
            let mut t = red.clone();
            t.add_scaled(-eps, &ab);
            cpn::chart_of_reduced(&zeta, &t.w, &t.j)?
        };
        let chi_dot = (&plus.0 - &minus.0) / C64::new(2.0 * eps, 0.0);
        let p_dot = (&plus.1 - &minus.1) / C64::new(2.0 * eps, 0.0);
        let (chi_dot_h, p_dot_h) = cpn::hamilton_rhs(&chi, &p)?;
        let scale = chi_dot_h.camax().max(p_dot_h.camax()).max(1.0);
        rep.record(
            "chart-flow",
            homo_err(&chi_dot, &chi_dot_h).max(homo_err(&p_dot, &p_dot_h)) / scale,
            1e-7,
        );

        // reduced Lax pair
        let lambda = complex_gaussian(&mut rng) * 0.5;
        if (ONE - lambda * lambda).norm() > 1e-2 {
            rep.record("reduced-lax", reduced_lax_defect(&zeta, &red, lambda)?, 1e-11);
        }
    }

    // one short trajectory: reduced vs unreduced flow
    let (chi, w) = random_chart(n, 0.5, &mut rng);
    let s0 = HomogeneousState::from_chart(&chi, &w)?;
    let dt = 1e-3;
    let unreduced = rk4_trajectory(&s0, 1.0, dt, |s| s.rhs());
    let reduced = rk4_trajectory(&s0.reduce(), 1.0, dt, |r| r.rhs(&zeta));
    let err = unreduced
        .iter()
        .zip(&reduced)
        .map(|(u, r)| {
            let ur = u.reduce();
            (&ur.w - &r.w).camax().max((&ur.j - &r.j).camax())
        })
        .fold(0.0, f64::max);
    rep.record("trajectory-agreement", err, 1e-9);
    let h0 = s0.hamiltonian();
    let drift = unreduced.iter().map(|s| (s.hamiltonian() - h0).abs()).fold(0.0, f64::max) / h0.max(1.0);
    rep.record("trajectory-energy", drift, 1e-9);
    Ok(rep)
}

