//! The point particle E-model: current `j = ξ - Ad_l ξ`, Hamiltonian `½(j, E j)`,
//! first-order equations of motion and the group-level reconstruction flow.

use std::fmt::{self, Debug, Write as _};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::{
    anti_hermitian_part, commutator, form_tstar_unchecked, is_su, max_abs, trace_product, unitarity_defect, CMat,
    LinearSpace, RealBasis, TStarAlgebraElement, C64,
};
use crate::doubles::{
    e_biyb_unchecked, e_tstar, normalize_det, polar_special_unitary, tstar_adjoint_unchecked, EOperator, SLPoint,
    TStarPoint,
};
use crate::error::{check_positive, Error, Result};
use crate::random::{self, Rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DoubleKind {
    TStarK,
    LuWeinstein,
}

/// A point particle E-model: a double, an E-operator and an element `ξ` of the isotropic subalgebra.
///
/// Group points are integrated in their ambient matrix coordinates, hence the
/// [`LinearSpace`] bound on `Point`.
pub trait EModel {
    type Elem: LinearSpace + Debug;
    type Point: LinearSpace + Debug;

    fn n(&self) -> usize;
    fn kind(&self) -> DoubleKind;
    fn e_operator(&self) -> EOperator;
    /// `ξ ∈ 𝒟`.
    fn xi(&self) -> &Self::Elem;
    /// `ξ` as an element of the isotropic subalgebra `𝒢 = su(N)`.
    fn xi_g(&self) -> &CMat;
    /// The embedding `𝒢 → 𝒟`.
    fn embed_g(&self, x: &CMat) -> Self::Elem;
    fn bracket(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn form(&self, a: &Self::Elem, b: &Self::Elem) -> f64;
    fn e(&self, x: &Self::Elem) -> Self::Elem;
    fn adjoint(&self, l: &Self::Point, x: &Self::Elem) -> Self::Elem;
    fn identity(&self) -> Self::Point;
    /// Right-invariant vector field: the tangent vector `x·l` at `l`.
    fn translate(&self, x: &Self::Elem, l: &Self::Point) -> Self::Point;
    /// Distance of an ambient point from the group.
    fn defect(&self, l: &Self::Point) -> f64;
    /// Projection of an ambient point back onto the group.
    fn repair(&self, l: &Self::Point) -> Self::Point;
    /// Real basis of `𝒟`.
    fn basis(&self) -> Vec<Self::Elem>;
    fn random_elem(&self, rng: &mut Rng) -> Self::Elem;
    fn random_point(&self, scale: f64, rng: &mut Rng) -> Self::Point;
    /// Matrix whose spectrum is constant on coadjoint orbits (`Ad_l ξ`, or its `𝒦` part).
    fn orbit_matrix(&self, j: &Self::Elem) -> CMat;
    fn state_names(&self) -> Vec<String>;
    fn state_values(&self, l: &Self::Point) -> Vec<f64>;
}

/// `T*SU(N)` with `E(μ,ν) = (-ν,-μ)` and `ξ = (ζ, 0)`.
#[derive(Clone, Debug)]
pub struct TStarModel {
    zeta: CMat,
    xi: TStarAlgebraElement,
    basis: RealBasis,
}

impl TStarModel {
    pub fn new(zeta: CMat) -> Result<Self> {
        if !is_su(&zeta, 1e-12) {
            return Err(Error::InvalidParameter {
                name: "zeta",
                reason: "must lie in su(N)".into(),
            });
        }
        let n = zeta.nrows();
        Ok(Self {
            xi: TStarAlgebraElement::from_first(zeta.clone()),
            zeta,
            basis: RealBasis::su(n),
        })
    }

    pub fn zeta(&self) -> &CMat {
        &self.zeta
    }

    /// `l = (k, 0)(1, ρ) = (k, Ad_k ρ)`.
    pub fn point_from_rho(&self, k: &CMat, rho: &CMat) -> TStarPoint {
        TStarPoint {
            k: k.clone(),
            kappa: k * rho * k.adjoint(),
        }
    }
}

impl EModel for TStarModel {
    type Elem = TStarAlgebraElement;
    type Point = TStarPoint;

    fn n(&self) -> usize {
        self.zeta.nrows()
    }

    fn kind(&self) -> DoubleKind {
        DoubleKind::TStarK
    }

    fn e_operator(&self) -> EOperator {
        EOperator::TStarFlip
    }

    fn xi(&self) -> &TStarAlgebraElement {
        &self.xi
    }

    fn xi_g(&self) -> &CMat {
        &self.zeta
    }

    fn embed_g(&self, x: &CMat) -> TStarAlgebraElement {
        TStarAlgebraElement::from_first(x.clone())
    }

    fn bracket(&self, a: &TStarAlgebraElement, b: &TStarAlgebraElement) -> TStarAlgebraElement {
        a.commutator(b)
    }

    fn form(&self, a: &TStarAlgebraElement, b: &TStarAlgebraElement) -> f64 {
        form_tstar_unchecked(a, b)
    }

    fn e(&self, x: &TStarAlgebraElement) -> TStarAlgebraElement {
        e_tstar(x)
    }

    fn adjoint(&self, l: &TStarPoint, x: &TStarAlgebraElement) -> TStarAlgebraElement {
        tstar_adjoint_unchecked(l, x)
    }

    fn identity(&self) -> TStarPoint {
        TStarPoint::identity(self.n())
    }

    fn translate(&self, x: &TStarAlgebraElement, l: &TStarPoint) -> TStarPoint {
        TStarPoint {
            k: &x.first * &l.k,
            kappa: &x.second + commutator(&x.first, &l.kappa),
        }
    }

    fn defect(&self, l: &TStarPoint) -> f64 {
        let kappa_defect = max_abs(&(&l.kappa + l.kappa.adjoint())).max(l.kappa.trace().norm());
        unitarity_defect(&l.k)
            .max((l.k.determinant() - 1.0).norm())
            .max(kappa_defect)
    }

    fn repair(&self, l: &TStarPoint) -> TStarPoint {
        let n = self.n();
        let mut kappa = anti_hermitian_part(&l.kappa);
        let t = kappa.trace() / n as f64;
        for i in 0..n {
            kappa[(i, i)] -= t;
        }
        TStarPoint {
            k: polar_special_unitary(&l.k),
            kappa,
        }
    }

    fn basis(&self) -> Vec<TStarAlgebraElement> {
        let n = self.n();
        let gens = self.basis.generators();
        let mut out: Vec<_> = gens.iter().map(|g| TStarAlgebraElement::from_first(g.clone())).collect();
        out.extend(gens.iter().map(|g| TStarAlgebraElement {
            first: CMat::zeros(n, n),
            second: g.clone(),
        }));
        out
    }

    fn random_elem(&self, rng: &mut Rng) -> TStarAlgebraElement {
        TStarAlgebraElement {
            first: random::su_element(self.n(), rng),
            second: random::su_element(self.n(), rng),
        }
    }

    fn random_point(&self, scale: f64, rng: &mut Rng) -> TStarPoint {
        TStarPoint {
            k: random::special_unitary(self.n(), rng),
            kappa: random::su_element(self.n(), rng).scale(scale),
        }
    }

    fn orbit_matrix(&self, j: &TStarAlgebraElement) -> CMat {
        &self.zeta - &j.first
    }

    fn state_names(&self) -> Vec<String> {
        matrix_names("k", self.n())
            .into_iter()
            .chain(matrix_names("kappa", self.n()))
            .collect()
    }

    fn state_values(&self, l: &TStarPoint) -> Vec<f64> {
        matrix_values(&l.k).into_iter().chain(matrix_values(&l.kappa)).collect()
    }
}

/// Lu-Weinstein double `SL(N, C)` with the bi-Yang-Baxter operator `E_{η,μ}`.
#[derive(Clone, Debug)]
pub struct BiYbModel {
    eta: f64,
    mu: f64,
    xi: CMat,
    basis: RealBasis,
}

impl BiYbModel {
    /// `xi` must be a diagonal element of `su(N)` (Cartan).
    pub fn new(xi: CMat, eta: f64, mu: f64) -> Result<Self> {
        EOperator::biyb(eta, mu)?;
        let n = xi.nrows();
        let off_diag = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .fold(0.0_f64, |m, (i, j)| m.max(xi[(i, j)].norm()));
        if !is_su(&xi, 1e-12) || off_diag > 0.0 {
            return Err(Error::InvalidParameter {
                name: "xi",
                reason: "must be a diagonal element of su(N)".into(),
            });
        }
        Ok(Self {
            eta,
            mu,
            xi,
            basis: RealBasis::sl(n),
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

impl EModel for BiYbModel {
    type Elem = CMat;
    type Point = SLPoint;

    fn n(&self) -> usize {
        self.xi.nrows()
    }

    fn kind(&self) -> DoubleKind {
        DoubleKind::LuWeinstein
    }

    fn e_operator(&self) -> EOperator {
        EOperator::BiYB {
            eta: self.eta,
            mu: self.mu,
        }
    }

    fn xi(&self) -> &CMat {
        &self.xi
    }

    fn xi_g(&self) -> &CMat {
        &self.xi
    }

    fn embed_g(&self, x: &CMat) -> CMat {
        x.clone()
    }

    fn bracket(&self, a: &CMat, b: &CMat) -> CMat {
        commutator(a, b)
    }

    fn form(&self, a: &CMat, b: &CMat) -> f64 {
        -trace_product(a, b).im / self.eta
    }

    fn e(&self, x: &CMat) -> CMat {
        e_biyb_unchecked(x, self.eta, self.mu)
    }

    fn adjoint(&self, l: &SLPoint, x: &CMat) -> CMat {
        let inv = l.l.clone().try_inverse().expect("SL points are invertible");
        &l.l * x * inv
    }

    fn identity(&self) -> SLPoint {
        SLPoint::identity(self.n())
    }

    fn translate(&self, x: &CMat, l: &SLPoint) -> SLPoint {
        SLPoint { l: x * &l.l }
    }

    fn defect(&self, l: &SLPoint) -> f64 {
        (l.l.determinant() - 1.0).norm()
    }

    fn repair(&self, l: &SLPoint) -> SLPoint {
        SLPoint { l: normalize_det(&l.l) }
    }

    fn basis(&self) -> Vec<CMat> {
        self.basis.generators().to_vec()
    }

    fn random_elem(&self, rng: &mut Rng) -> CMat {
        random::sl_element(self.n(), rng)
    }

    fn random_point(&self, scale: f64, rng: &mut Rng) -> SLPoint {
        SLPoint {
            l: random::sl_group_element(self.n(), scale, rng),
        }
    }

    fn orbit_matrix(&self, j: &CMat) -> CMat {
        &self.xi - j
    }

    fn state_names(&self) -> Vec<String> {
        matrix_names("l", self.n())
    }

    fn state_values(&self, l: &SLPoint) -> Vec<f64> {
        matrix_values(&l.l)
    }
}

fn matrix_names(prefix: &str, n: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(format!("{prefix}_re_{i}{j}"));
            out.push(format!("{prefix}_im_{i}{j}"));
        }
    }
    out
}

fn matrix_values(m: &CMat) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(m[(i, j)].re);
            out.push(m[(i, j)].im);
        }
    }
    out
}

/// `j = ξ - Ad_l ξ`.
pub fn current_of<M: EModel>(model: &M, l: &M::Point) -> M::Elem {
    model.xi().minus(&model.adjoint(l, model.xi()))
}

/// `H = ½ (j, E j)`.
pub fn hamiltonian<M: EModel>(model: &M, j: &M::Elem) -> f64 {
    0.5 * model.form(j, &model.e(j))
}

/// `dj/dt = [ξ, E j] + [E j, j]`.
pub fn eom_rhs<M: EModel>(model: &M, j: &M::Elem) -> M::Elem {
    let ej = model.e(j);
    model.bracket(model.xi(), &ej).plus(&model.bracket(&ej, j))
}

/// `dl/dt = (E j(l))·l`.
pub fn group_flow_rhs<M: EModel>(model: &M, l: &M::Point) -> M::Point {
    let j = current_of(model, l);
    model.translate(&model.e(&j), l)
}

/// `{(j,T₁), (j,T₂)} = (j, [T₁,T₂]) + (T₁, [ξ, T₂])`.
pub fn poisson_bracket_current<M: EModel>(model: &M, t1: &M::Elem, t2: &M::Elem, j: &M::Elem) -> f64 {
    model.form(j, &model.bracket(t1, t2)) + model.form(t1, &model.bracket(model.xi(), t2))
}

/// Symplectic potential `(ξ, l⁻¹dl)` evaluated on a tangent vector `dl` at `l`, given `l⁻¹`.
///
/// Its exterior derivative (with a minus sign) is the symplectic form of the model.
pub fn symplectic_potential<M: EModel>(model: &M, l_inv_dl: &M::Elem) -> f64 {
    model.form(model.xi(), l_inv_dl)
}

/// Residuals of the E-operator axioms on the model basis.
#[derive(Clone, Debug, Serialize)]
pub struct EAxioms {
    pub involution: f64,
    pub symmetry: f64,
    pub min_gram_eigenvalue: f64,
    pub max_gram_eigenvalue: f64,
}

/// Checks `E² = Id`, `(x, E y) = (E x, y)` and positivity of `(x, E x)` on a basis of `𝒟`.
pub fn e_axioms<M: EModel>(model: &M) -> EAxioms {
    let basis = model.basis();
    let d = basis.len();
    let images: Vec<_> = basis.iter().map(|b| model.e(b)).collect();
    let involution = basis
        .iter()
        .zip(&images)
        .map(|(b, eb)| model.e(eb).minus(b).frob_norm())
        .fold(0.0, f64::max);
    let g = DMatrix::from_fn(d, d, |i, j| model.form(&basis[i], &images[j]));
    let symmetry = (&g - g.transpose()).amax();
    let eig = ((&g + g.transpose()) * 0.5).symmetric_eigenvalues();
    EAxioms {
        involution,
        symmetry,
        min_gram_eigenvalue: eig.min(),
        max_gram_eigenvalue: eig.max(),
    }
}

/// Signature `(positive, negative)` of the double's bilinear form.
pub fn form_signature<M: EModel>(model: &M) -> (usize, usize) {
    let basis = model.basis();
    let d = basis.len();
    let g = DMatrix::from_fn(d, d, |i, j| model.form(&basis[i], &basis[j]));
    let eig = g.symmetric_eigenvalues();
    let scale = eig.amax().max(1.0);
    let pos = eig.iter().filter(|&&x| x > 1e-10 * scale).count();
    let neg = eig.iter().filter(|&&x| x < -1e-10 * scale).count();
    (pos, neg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Rk4,
    Dopri,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Rk4 => "rk4",
            Scheme::Dopri => "dopri",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegrationOptions {
    pub t_end: f64,
    pub dt: f64,
    pub scheme: Scheme,
    pub rtol: f64,
    pub atol: f64,
    /// Group points are projected back when their defect exceeds this value.
    pub repair_threshold: f64,
}

impl IntegrationOptions {
    pub fn rk4(t_end: f64, dt: f64) -> Self {
        Self {
            t_end,
            dt,
            scheme: Scheme::Rk4,
            rtol: 1e-10,
            atol: 1e-12,
            repair_threshold: 1e-8,
        }
    }

    fn validate(&self) -> Result<()> {
        check_positive("dt", self.dt)?;
        check_positive("t_end", self.t_end)?;
        check_positive("rtol", self.rtol)?;
        check_positive("atol", self.atol)?;
        Ok(())
    }
}

/// Named scalar observables recorded at every sample (typically `tr L(λ)^k`).
pub struct Observables<'a, E> {
    pub names: Vec<String>,
    pub eval: Box<dyn Fn(&E) -> Vec<C64> + 'a>,
}

impl<'a, E> Observables<'a, E> {
    pub fn none() -> Self {
        Self {
            names: Vec::new(),
            eval: Box::new(|_| Vec::new()),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Diagnostics {
    pub steps: usize,
    pub rejected_steps: usize,
    pub renormalizations: usize,
    pub max_defect: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory<P, E> {
    pub times: Vec<f64>,
    pub points: Vec<P>,
    pub currents: Vec<E>,
    pub hamiltonian: Vec<f64>,
    pub observable_names: Vec<String>,
    pub observables: Vec<Vec<C64>>,
    pub defect: Vec<f64>,
    pub diagnostics: Diagnostics,
}

fn relative_drift(values: impl Iterator<Item = C64> + Clone) -> f64 {
    let mut it = values.clone();
    let Some(first) = it.next() else { return 0.0 };
    // Quantities that vanish identically (tr L³ for su(2)) are measured absolutely.
    let scale = first.norm().max(1.0);
    values.map(|v| (v - first).norm()).fold(0.0, f64::max) / scale
}

impl<P, E> Trajectory<P, E> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max |H(t) - H(0)| / max(|H(0)|, 1)`.
    pub fn energy_drift(&self) -> f64 {
        relative_drift(self.hamiltonian.iter().map(|&h| C64::new(h, 0.0)))
    }

    /// Relative drift of each observable column.
    pub fn observable_drifts(&self) -> Vec<f64> {
        (0..self.observable_names.len())
            .map(|c| relative_drift(self.observables.iter().map(|row| row[c])))
            .collect()
    }
}

fn fmt_f64(out: &mut String, x: f64) {
    // 17 significant digits
    let _ = write!(out, "{x:.16e}");
}

/// Renders `λ` as `a+bi`.
pub fn format_complex(z: C64) -> String {
    let sign = if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

impl<P, E> Trajectory<P, E> {
    /// CSV with one row per sample: time, flattened state, `H`, observables (real and imaginary), defect.
    pub fn to_csv<M: EModel<Point = P, Elem = E>>(&self, model: &M) -> String {
        let mut out = String::new();
        out.push('t');
        for name in model.state_names() {
            out.push(',');
            out.push_str(&name);
        }
        out.push_str(",H");
        for name in &self.observable_names {
            let _ = write!(out, ",re{name},im{name}");
        }
        out.push_str(",defect\n");
        for i in 0..self.len() {
            fmt_f64(&mut out, self.times[i]);
            for v in model.state_values(&self.points[i]) {
                out.push(',');
                fmt_f64(&mut out, v);
            }
            out.push(',');
            fmt_f64(&mut out, self.hamiltonian[i]);
            for z in &self.observables[i] {
                out.push(',');
                fmt_f64(&mut out, z.re);
                out.push(',');
                fmt_f64(&mut out, z.im);
            }
            out.push(',');
            fmt_f64(&mut out, self.defect[i]);
            out.push('\n');
        }
        out
    }
}

/// JSON-friendly summary of a trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectorySummary {
    pub samples: usize,
    pub t_end: f64,
    pub energy_initial: f64,
    pub energy_drift: f64,
    pub observable_drifts: Vec<(String, f64)>,
    pub diagnostics: Diagnostics,
}

impl<P, E> Trajectory<P, E> {
    pub fn summary(&self) -> TrajectorySummary {
        TrajectorySummary {
            samples: self.len(),
            t_end: self.times.last().copied().unwrap_or(0.0),
            energy_initial: self.hamiltonian.first().copied().unwrap_or(0.0),
            energy_drift: self.energy_drift(),
            observable_drifts: self.observable_names.iter().cloned().zip(self.observable_drifts()).collect(),
            diagnostics: self.diagnostics.clone(),
        }
    }
}

fn rk4_step<S: LinearSpace>(y: &S, h: f64, f: &impl Fn(&S) -> S) -> S {
    let k1 = f(y);
    let mut y2 = y.clone();
    y2.add_scaled(0.5 * h, &k1);
    let k2 = f(&y2);
    let mut y3 = y.clone();
    y3.add_scaled(0.5 * h, &k2);
    let k3 = f(&y3);
    let mut y4 = y.clone();
    y4.add_scaled(h, &k3);
    let k4 = f(&y4);
    let mut out = y.clone();
    out.add_scaled(h / 6.0, &k1);
    out.add_scaled(h / 3.0, &k2);
    out.add_scaled(h / 3.0, &k3);
    out.add_scaled(h / 6.0, &k4);
    out
}

const DP_A: [&[f64]; 6] = [
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand-Prince 5(4) step; returns the fifth-order solution and the error estimate.
fn dopri_step<S: LinearSpace>(y: &S, h: f64, f: &impl Fn(&S) -> S) -> (S, S) {
    let mut ks: Vec<S> = Vec::with_capacity(7);
    ks.push(f(y));
    for row in DP_A.iter() {
        let mut yi = y.clone();
        for (a, k) in row.iter().zip(&ks) {
            if *a != 0.0 {
                yi.add_scaled(h * a, k);
            }
        }
        ks.push(f(&yi));
    }
    let mut y5 = y.clone();
    let mut err = y.zero_like();
    for (i, k) in ks.iter().enumerate() {
        if DP_B5[i] != 0.0 {
            y5.add_scaled(h * DP_B5[i], k);
        }
        let d = DP_B5[i] - DP_B4[i];
        if d != 0.0 {
            err.add_scaled(h * d, k);
        }
    }
    (y5, err)
}

/// Integrates `dl/dt = (E j) l` and samples every `dt`.
pub fn integrate<M: EModel>(
    model: &M,
    l0: &M::Point,
    opts: &IntegrationOptions,
    observables: &Observables<'_, M::Elem>,
) -> Result<Trajectory<M::Point, M::Elem>> {
    opts.validate()?;
    let steps = step_count(opts.t_end, opts.dt);
    let f = |l: &M::Point| group_flow_rhs(model, l);
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        points: Vec::with_capacity(steps + 1),
        currents: Vec::with_capacity(steps + 1),
        hamiltonian: Vec::with_capacity(steps + 1),
        observable_names: observables.names.clone(),
        observables: Vec::with_capacity(steps + 1),
        defect: Vec::with_capacity(steps + 1),
        diagnostics: Diagnostics::default(),
    };
    let record = |traj: &mut Trajectory<M::Point, M::Elem>, t: f64, l: M::Point, defect: f64| {
        let j = current_of(model, &l);
        traj.times.push(t);
        traj.hamiltonian.push(hamiltonian(model, &j));
        traj.observables.push((observables.eval)(&j));
        traj.defect.push(defect);
        traj.currents.push(j);
        traj.points.push(l);
    };
    let mut l = l0.clone();
    let d0 = model.defect(&l);
    record(&mut traj, 0.0, l.clone(), d0);
    traj.diagnostics.max_defect = d0;
    let mut h = opts.dt;
    for i in 1..=steps {
        let t_prev = (i - 1) as f64 * opts.dt;
        let t_target = if i == steps { opts.t_end } else { i as f64 * opts.dt };
        match opts.scheme {
            Scheme::Rk4 => {
                let step = if i == steps { opts.t_end - t_prev } else { opts.dt };
                l = rk4_step(&l, step, &f);
                traj.diagnostics.steps += 1;
            }
            Scheme::Dopri => {
                let mut t = t_prev;
                while t < t_target - 1e-15 * t_target.max(1.0) {
                    let step = h.min(t_target - t);
                    let (y5, err) = dopri_step(&l, step, &f);
                    let scale = opts.atol + opts.rtol * l.frob_norm().max(y5.frob_norm());
                    let ratio = err.frob_norm() / scale;
                    if !ratio.is_finite() {
                        return Err(Error::NonFinite { t });
                    }
                    let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
                    if ratio <= 1.0 {
                        l = y5;
                        t += step;
                        traj.diagnostics.steps += 1;
                        if step == h {
                            h *= factor;
                        }
                    } else {
                        traj.diagnostics.rejected_steps += 1;
                        h = step * factor;
                    }
                    if h < 1e-14 {
                        return Err(Error::NonFinite { t });
                    }
                }
            }
        }
        if !l.all_finite() {
            return Err(Error::NonFinite { t: t_target });
        }
        let mut defect = model.defect(&l);
        traj.diagnostics.max_defect = traj.diagnostics.max_defect.max(defect);
        if defect > opts.repair_threshold {
            l = model.repair(&l);
            traj.diagnostics.renormalizations += 1;
            defect = model.defect(&l);
        }
        record(&mut traj, t_target, l.clone(), defect);
    }
    Ok(traj)
}

/// Number of steps to reach `t_end`; the last one is shortened when `dt` does not divide it.
fn step_count(t_end: f64, dt: f64) -> usize {
    let ratio = t_end / dt;
    // absorb rounding in ratios such as 10 / 1e-3
    let near = ratio.round();
    let n = if (ratio - near).abs() <= 1e-9 * near.max(1.0) { near } else { ratio.ceil() };
    (n as usize).max(1)
}

/// Integrates the current equation `dj/dt = [ξ, E j] + [E j, j]` directly (RK4).
pub fn integrate_current<M: EModel>(model: &M, j0: &M::Elem, t_end: f64, dt: f64) -> Result<Vec<M::Elem>> {
    check_positive("dt", dt)?;
    check_positive("t_end", t_end)?;
    let steps = step_count(t_end, dt);
    let f = |j: &M::Elem| eom_rhs(model, j);
    let mut out = Vec::with_capacity(steps + 1);
    let mut j = j0.clone();
    out.push(j.clone());
    for i in 1..=steps {
        let step = if i == steps { t_end - (i - 1) as f64 * dt } else { dt };
        j = rk4_step(&j, step, &f);
        if !j.all_finite() {
            return Err(Error::NonFinite { t: i as f64 * dt });
        }
        out.push(j.clone());
    }
    Ok(out)
}

/// Generic fixed-step RK4 on any linear space (used by catalogue oracles).
pub fn rk4_trajectory<S: LinearSpace>(y0: &S, t_end: f64, dt: f64, f: impl Fn(&S) -> S) -> Vec<S> {
    let steps = (t_end / dt).round() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = y0.clone();
    out.push(y.clone());
    for _ in 0..steps {
        y = rk4_step(&y, dt, &f);
        out.push(y.clone());
    }
    out
}

/// Five-point central derivative of a uniformly sampled series at interior index `i`.
pub fn five_point_derivative<S: LinearSpace>(samples: &[S], i: usize, dt: f64) -> S {
    let mut d = samples[i - 2].scale(1.0 / (12.0 * dt));
    d.add_scaled(-8.0 / (12.0 * dt), &samples[i - 1]);
    d.add_scaled(8.0 / (12.0 * dt), &samples[i + 1]);
    d.add_scaled(-1.0 / (12.0 * dt), &samples[i + 2]);
    d
}

/// Sorted spectrum of a complex matrix.
pub fn spectrum(m: &CMat) -> Vec<C64> {
    let mut ev: Vec<C64> = m
        .clone()
        .schur()
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .unwrap_or_default();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    ev
}

/// Largest distance between two spectra, matching eigenvalues greedily.
pub fn spectrum_distance(a: &[C64], b: &[C64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let mut best = f64::INFINITY;
        let mut arg = 0;
        for (i, y) in b.iter().enumerate() {
            if !used[i] && (x - y).norm() < best {
                best = (x - y).norm();
                arg = i;
            }
        }
        if arg < used.len() {
            used[arg] = true;
        }
        worst = worst.max(best);
    }
    worst
}

/// Object-safe view over the two concrete model families.
#[derive(Clone, Debug)]
pub enum AnyModel {
    TStar(TStarModel),
    LuWeinstein(BiYbModel),
}

/// A labelled model.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub label: String,
    pub model: AnyModel,
}

/// A point of either double.
#[derive(Clone, Debug, PartialEq)]
pub enum DoublePoint {
    TStar(TStarPoint),
    Sl(SLPoint),
}

/// An element of either double's Lie algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum Current {
    TStar(TStarAlgebraElement),
    Sl(CMat),
}

impl ModelSpec {
    pub fn kind(&self) -> DoubleKind {
        match &self.model {
            AnyModel::TStar(m) => m.kind(),
            AnyModel::LuWeinstein(m) => m.kind(),
        }
    }

    pub fn n(&self) -> usize {
        match &self.model {
            AnyModel::TStar(m) => m.n(),
            AnyModel::LuWeinstein(m) => m.n(),
        }
    }

    pub fn e_operator(&self) -> EOperator {
        match &self.model {
            AnyModel::TStar(m) => m.e_operator(),
            AnyModel::LuWeinstein(m) => m.e_operator(),
        }
    }

    fn mismatch(&self) -> Error {
        Error::KindMismatch(format!("model `{}` is {:?}", self.label, self.kind()))
    }

    pub fn current_of(&self, l: &DoublePoint) -> Result<Current> {
        match (&self.model, l) {
            (AnyModel::TStar(m), DoublePoint::TStar(p)) => {
                crate::error::check_dims(m.n(), p.n())?;
                Ok(Current::TStar(current_of(m, p)))
            }
            (AnyModel::LuWeinstein(m), DoublePoint::Sl(p)) => {
                crate::error::check_dims(m.n(), p.n())?;
                Ok(Current::Sl(current_of(m, p)))
            }
            _ => Err(self.mismatch()),
        }
    }

    pub fn hamiltonian(&self, j: &Current) -> Result<f64> {
        match (&self.model, j) {
            (AnyModel::TStar(m), Current::TStar(j)) => Ok(hamiltonian(m, j)),
            (AnyModel::LuWeinstein(m), Current::Sl(j)) => Ok(hamiltonian(m, j)),
            _ => Err(self.mismatch()),
        }
    }

    pub fn eom_rhs(&self, j: &Current) -> Result<Current> {
        match (&self.model, j) {
            (AnyModel::TStar(m), Current::TStar(j)) => Ok(Current::TStar(eom_rhs(m, j))),
            (AnyModel::LuWeinstein(m), Current::Sl(j)) => Ok(Current::Sl(eom_rhs(m, j))),
            _ => Err(self.mismatch()),
        }
    }

    pub fn group_flow_rhs(&self, l: &DoublePoint) -> Result<DoublePoint> {
        match (&self.model, l) {
            (AnyModel::TStar(m), DoublePoint::TStar(p)) => Ok(DoublePoint::TStar(group_flow_rhs(m, p))),
            (AnyModel::LuWeinstein(m), DoublePoint::Sl(p)) => Ok(DoublePoint::Sl(group_flow_rhs(m, p))),
            _ => Err(self.mismatch()),
        }
    }

    pub fn identity(&self) -> DoublePoint {
        match &self.model {
            AnyModel::TStar(m) => DoublePoint::TStar(m.identity()),
            AnyModel::LuWeinstein(m) => DoublePoint::Sl(m.identity()),
        }
    }
}
