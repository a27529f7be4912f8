//! Yang-Baxter deformed (`μ = 0`) point particle on `CP^N`.

use crate::error::{check_dims, Result};
use crate::models::cpn::{self, CVec, SqrtDotSign};

/// Chart Lagrangian `|v - η(N+1)√(1-|χ|²) χ|²/(1+η²) - (N+1)²|χ|²`.
pub fn chart_lagrangian(chi: &CVec, chi_dot: &CVec, eta: f64) -> Result<f64> {
    let v = cpn::pperp_velocity(chi, chi_dot, SqrtDotSign::Minus)?;
    let n1 = chi.len() as f64 + 1.0;
    let sq = (1.0 - chi.norm_squared()).sqrt();
    let shifted = v - chi * crate::algebra::C64::new(eta * n1 * sq, 0.0);
    Ok(shifted.norm_squared() / (1.0 + eta * eta) - n1 * n1 * chi.norm_squared())
}

/// Homogeneous form on `|Z| = 1`:
/// `(|Ż|² - |Z†Ż|²)/(1+η²) + (N+1)²((2η²+1)|Z_{N+1}|² - η²|Z_{N+1}|⁴)/(1+η²)`.
pub fn global_lagrangian(z: &CVec, z_dot: &CVec, eta: f64) -> Result<f64> {
    check_dims(z.len(), z_dot.len())?;
    let n1 = z.len() as f64;
    let zn = z[z.len() - 1].norm_sqr();
    let e = 1.0 + eta * eta;
    Ok(cpn::fubini_study(z, z_dot) / e + n1 * n1 / e * ((2.0 * eta * eta + 1.0) * zn - eta * eta * zn * zn))
}

/// `chart - global` on the gauge slice: `-(N+1)² - 2η(N+1)Re(χ†χ̇)/(1+η²)`.
///
/// Both terms are a constant and `d/dt` of `-η(N+1)|χ|²/(1+η²)`.
pub fn chart_minus_global(chi: &CVec, chi_dot: &CVec, eta: f64) -> f64 {
    let n1 = chi.len() as f64 + 1.0;
    -n1 * n1 - 2.0 * eta * n1 * chi.dotc(chi_dot).re / (1.0 + eta * eta)
}

/// Chart form against the generic `μ = 0` Lagrangian and the homogeneous form.
pub fn yb_cpn_suite(n: usize, eta: f64, samples: usize, seed: u64) -> Result<crate::models::SuiteReport> {
    use crate::algebra::C64;
    use crate::models::biyb::BiYbGeometry;
    use crate::random::{complex_vector, rng_from_seed, uniform};
    crate::error::check_positive("n", n as f64)?;
    let geo = BiYbGeometry::new(cpn::zeta(n), eta, 0.0)?;
    let mut rng = rng_from_seed(seed);
    let mut rep = crate::models::SuiteReport::new(&format!("yb-cp{n}"), seed, samples);
    for _ in 0..samples {
        let r = uniform(&mut rng, 0.1, 0.9);
        let chi = CVec::from_vec(complex_vector(n, &mut rng));
        let chi = &chi * C64::new(r / chi.norm(), 0.0);
        let chi_dot = CVec::from_vec(complex_vector(n, &mut rng));
        let k = cpn::chart_embed(&chi)?;
        let kdot = cpn::chart_embed_velocity(&chi, &chi_dot)?;
        let chart = chart_lagrangian(&chi, &chi_dot, eta)?;
        let scale = chart.abs().max(1.0);
        rep.record("chart-vs-generic", (chart - geo.lagrangian(&k, &kdot)?).abs() / scale, 1e-10);
        let (z, zd) = cpn::gauge_fix(&chi, &chi_dot)?;
        let global = global_lagrangian(&z, &zd, eta)?;
        let corr = chart_minus_global(&chi, &chi_dot, eta);
        rep.record("chart-vs-global-plus-correction", (chart - global - corr).abs() / scale, 1e-10);
        rep.note("chart-vs-global-literal", (chart - global).abs() / scale);
        let undeformed = chart_lagrangian(&chi, &chi_dot, 0.0)?;
        let undeformed_chart = cpn::chart_lagrangian(&chi, &chi_dot, SqrtDotSign::Minus)?;
        rep.record("undeformed-limit", (undeformed - undeformed_chart).abs() / undeformed_chart.abs().max(1.0), 1e-12);
    }
    Ok(rep)
}
