//! Lie-algebra kernel for `su(N)` and `sl(N, C)` viewed as a real Lie algebra.
//!
//! Elements are plain complex matrices. Membership in a subalgebra is a predicate,
//! not a type, so the same carrier also houses the complexification `su(N) ⊗ C`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{check_dims, check_positive, Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type AlgebraElement = CMat;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Absolute tolerance used by the structural predicates.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Tolerance for unitarity of group elements passed as conjugators.
pub const UNITARY_TOL: f64 = 1e-10;

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn max_abs(x: &CMat) -> f64 {
    x.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn dagger(x: &CMat) -> CMat {
    x.adjoint()
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn is_traceless(x: &CMat, tol: f64) -> bool {
    x.trace().norm() <= tol
}

/// `x† = -x` and `tr x = 0`.
pub fn is_su(x: &CMat, tol: f64) -> bool {
    x.is_square() && max_abs(&(x + x.adjoint())) <= tol && is_traceless(x, tol)
}

/// Upper triangular with a real diagonal (the Lie algebra of `AN`).
pub fn is_an(x: &CMat, tol: f64) -> bool {
    let n = x.nrows();
    for i in 0..n {
        if x[(i, i)].im.abs() > tol {
            return false;
        }
        for j in 0..i {
            if x[(i, j)].norm() > tol {
                return false;
            }
        }
    }
    true
}

/// Anti-Hermitian part `(x - x†)/2`.
pub fn anti_hermitian_part(x: &CMat) -> CMat {
    (x - x.adjoint()).scale(0.5)
}

/// Splits an element of `su(N) ⊗ C` into its two `su(N)` components.
pub fn split_complexified(w: &CMat) -> (CMat, CMat) {
    let wr = (w - w.adjoint()).scale(0.5);
    let wi = (w + w.adjoint()) * C64::new(0.0, -0.5);
    (wr, wi)
}

pub(crate) fn check_square(x: &CMat) -> Result<usize> {
    if x.is_square() {
        Ok(x.nrows())
    } else {
        Err(Error::DimensionMismatch {
            left: x.nrows(),
            right: x.ncols(),
        })
    }
}

fn check_pair(x: &CMat, y: &CMat) -> Result<()> {
    let n = check_square(x)?;
    let m = check_square(y)?;
    check_dims(n, m)
}

pub(crate) fn commutator(x: &CMat, y: &CMat) -> CMat {
    x * y - y * x
}

/// Matrix commutator `XY - YX`.
pub fn bracket(x: &CMat, y: &CMat) -> Result<CMat> {
    check_pair(x, y)?;
    Ok(commutator(x, y))
}

/// Complex-bilinear `tr(XY)` without forming the product.
pub fn trace_product(x: &CMat, y: &CMat) -> C64 {
    let n = x.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += x[(i, j)] * y[(j, i)];
        }
    }
    acc
}

/// `Re tr(XY)` in the defining representation.
pub fn killing_form(x: &CMat, y: &CMat) -> Result<f64> {
    check_pair(x, y)?;
    Ok(trace_product(x, y).re)
}

/// `-(1/η) Im tr(XY)`, the split form on `sl(N, C)`.
pub fn form_sl(x: &CMat, y: &CMat, eta: f64) -> Result<f64> {
    check_positive("eta", eta)?;
    check_pair(x, y)?;
    Ok(-trace_product(x, y).im / eta)
}

/// Yang-Baxter operator: `-i` on the strict upper triangle, `+i` on the strict lower one,
/// zero on the diagonal.
pub fn yang_baxter_r(x: &CMat) -> CMat {
    let n = x.nrows();
    CMat::from_fn(n, n, |i, j| {
        if i < j {
            -I * x[(i, j)]
        } else if i > j {
            I * x[(i, j)]
        } else {
            ZERO
        }
    })
}

pub fn unitarity_defect(k: &CMat) -> f64 {
    let n = k.nrows();
    max_abs(&(k.adjoint() * k - identity(n)))
}

/// `Ad_k x = k x k†` for unitary `k`.
pub fn ad_unitary(k: &CMat, x: &CMat) -> CMat {
    k * x * k.adjoint()
}

pub(crate) fn r_twisted_unchecked(k: &CMat, x: &CMat) -> CMat {
    let kd = k.adjoint();
    k * yang_baxter_r(&(&kd * x * k)) * kd
}

/// `Ad_k R Ad_{k⁻¹} x`. The caller chooses the orientation by passing `k` or `k⁻¹`.
pub fn r_twisted(k: &CMat, x: &CMat) -> Result<CMat> {
    check_pair(k, x)?;
    let deviation = unitarity_defect(k);
    if deviation > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(r_twisted_unchecked(k, x))
}

/// Element `(μ, ν)` of the Lie algebra of `T*K`.
#[derive(Clone, Debug, PartialEq)]
pub struct TStarAlgebraElement {
    pub first: CMat,
    pub second: CMat,
}

impl TStarAlgebraElement {
    pub fn new(first: CMat, second: CMat) -> Result<Self> {
        check_pair(&first, &second)?;
        Ok(Self { first, second })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            first: CMat::zeros(n, n),
            second: CMat::zeros(n, n),
        }
    }

    /// Embeds `μ ∈ 𝒦` as `(μ, 0)`.
    pub fn from_first(first: CMat) -> Self {
        let n = first.nrows();
        Self {
            first,
            second: CMat::zeros(n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.first.nrows()
    }

    pub fn is_su(&self, tol: f64) -> bool {
        is_su(&self.first, tol) && is_su(&self.second, tol)
    }

    pub(crate) fn commutator(&self, other: &Self) -> Self {
        Self {
            first: commutator(&self.first, &other.first),
            second: commutator(&self.first, &other.second) + commutator(&self.second, &other.first),
        }
    }

    /// `[(μ₁,ν₁),(μ₂,ν₂)] = ([μ₁,μ₂], [μ₁,ν₂] + [ν₁,μ₂])`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        check_dims(self.n(), other.n())?;
        Ok(self.commutator(other))
    }
}

pub(crate) fn form_tstar_unchecked(a: &TStarAlgebraElement, b: &TStarAlgebraElement) -> f64 {
    trace_product(&a.first, &b.second).re + trace_product(&b.first, &a.second).re
}

/// `((μ₁,ν₁),(μ₂,ν₂)) = (μ₁,ν₂) + (μ₂,ν₁)`.
pub fn form_tstar(a: &TStarAlgebraElement, b: &TStarAlgebraElement) -> Result<f64> {
    check_dims(a.n(), b.n())?;
    Ok(form_tstar_unchecked(a, b))
}

/// Minimal real vector-space interface shared by algebra elements and ambient group points.
pub trait LinearSpace: Clone {
    fn zero_like(&self) -> Self;
    /// `self += a x`.
    fn add_scaled(&mut self, a: f64, x: &Self);
    fn scale(&self, a: f64) -> Self;
    /// Frobenius norm.
    fn frob_norm(&self) -> f64;
    fn all_finite(&self) -> bool;

    fn plus(&self, x: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(1.0, x);
        out
    }

    fn minus(&self, x: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(-1.0, x);
        out
    }
}

impl LinearSpace for CMat {
    fn zero_like(&self) -> Self {
        CMat::zeros(self.nrows(), self.ncols())
    }

    fn add_scaled(&mut self, a: f64, x: &Self) {
        self.zip_apply(x, |s, v| *s += v * a);
    }

    fn scale(&self, a: f64) -> Self {
        self.map(|z| z * a)
    }

    fn frob_norm(&self) -> f64 {
        self.norm()
    }

    fn all_finite(&self) -> bool {
        self.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl LinearSpace for TStarAlgebraElement {
    fn zero_like(&self) -> Self {
        Self::zero(self.n())
    }

    fn add_scaled(&mut self, a: f64, x: &Self) {
        self.first.add_scaled(a, &x.first);
        self.second.add_scaled(a, &x.second);
    }

    fn scale(&self, a: f64) -> Self {
        Self {
            first: LinearSpace::scale(&self.first, a),
            second: LinearSpace::scale(&self.second, a),
        }
    }

    fn frob_norm(&self) -> f64 {
        (self.first.norm_squared() + self.second.norm_squared()).sqrt()
    }

    fn all_finite(&self) -> bool {
        self.first.all_finite() && self.second.all_finite()
    }
}

/// Formal complexification `re + I·im` of a real vector space.
///
/// The unit `I` is kept separate from any complex structure the real space may
/// already carry (for `sl(N, C)` the matrix `i` is *not* `I`).
#[derive(Clone, Debug, PartialEq)]
pub struct Cx<T> {
    pub re: T,
    pub im: T,
}

impl<T: LinearSpace> Cx<T> {
    pub fn from_real(x: T) -> Self {
        let im = x.zero_like();
        Self { re: x, im }
    }

    /// `self += z·x` with `z` complex and `x` real.
    pub fn add_complex_scaled(&mut self, z: C64, x: &T) {
        self.re.add_scaled(z.re, x);
        self.im.add_scaled(z.im, x);
    }

    pub fn add(&mut self, other: &Self) {
        self.re.add_scaled(1.0, &other.re);
        self.im.add_scaled(1.0, &other.im);
    }

    pub fn frob_norm(&self) -> f64 {
        self.re.frob_norm().hypot(self.im.frob_norm())
    }
}

/// Complex-bilinear extension of a real bilinear form.
pub fn cx_form<T>(a: &Cx<T>, b: &Cx<T>, form: impl Fn(&T, &T) -> f64) -> C64 {
    C64::new(
        form(&a.re, &b.re) - form(&a.im, &b.im),
        form(&a.re, &b.im) + form(&a.im, &b.re),
    )
}

/// Complex-bilinear extension of a real bilinear bracket.
pub fn cx_bracket<T: LinearSpace>(a: &Cx<T>, b: &Cx<T>, br: impl Fn(&T, &T) -> T) -> Cx<T> {
    let mut re = br(&a.re, &b.re);
    re.add_scaled(-1.0, &br(&a.im, &b.im));
    let mut im = br(&a.re, &b.im);
    im.add_scaled(1.0, &br(&a.im, &b.re));
    Cx { re, im }
}

/// Ordered real basis of a subspace of complex `N×N` matrices.
#[derive(Clone, Debug)]
pub struct RealBasis {
    generators: Vec<CMat>,
    gram: DMatrix<f64>,
    inner_inv: DMatrix<f64>,
    condition: f64,
}

fn real_inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

impl RealBasis {
    /// Builds a basis from linearly independent generators.
    ///
    /// `gram` holds pairwise `killing_form` values; independence is tested on the
    /// positive-definite inner product `Re tr(A†B)`.
    pub fn new(generators: Vec<CMat>) -> Result<Self> {
        let d = generators.len();
        if d == 0 {
            return Err(Error::InvalidParameter {
                name: "generators",
                reason: "empty basis".into(),
            });
        }
        let n = check_square(&generators[0])?;
        for g in &generators {
            check_dims(n, check_square(g)?)?;
        }
        let gram = DMatrix::from_fn(d, d, |i, j| trace_product(&generators[i], &generators[j]).re);
        let inner = DMatrix::from_fn(d, d, |i, j| real_inner(&generators[i], &generators[j]));
        let sv = inner.clone().singular_values();
        let (smax, smin) = (sv.max(), sv.min());
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !condition.is_finite() || condition > 1e12 {
            return Err(Error::Singular {
                what: "basis Gram matrix",
                condition,
            });
        }
        let inner_inv = inner.clone().try_inverse().ok_or(Error::Singular {
            what: "basis Gram matrix",
            condition,
        })?;
        Ok(Self {
            generators,
            gram,
            inner_inv,
            condition,
        })
    }

    /// Root-vector basis of `su(N)`: `E_ij - E_ji`, `i(E_ij + E_ji)` for `i < j`, followed by an
    /// orthogonal Cartan basis.
    pub fn su_roots(n: usize) -> Self {
        let mut gens = Vec::with_capacity(n * n - 1);
        for i in 0..n {
            for j in (i + 1)..n {
                let mut a = CMat::zeros(n, n);
                a[(i, j)] = ONE;
                a[(j, i)] = -ONE;
                gens.push(a);
                let mut b = CMat::zeros(n, n);
                b[(i, j)] = I;
                b[(j, i)] = I;
                gens.push(b);
            }
        }
        for l in 1..n {
            // i·diag(1,…,1,-l,0,…) scaled so that tr(H²) = -2 like the root vectors
            let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
            let mut h = CMat::zeros(n, n);
            for m in 0..l {
                h[(m, m)] = I * scale;
            }
            h[(l, l)] = I * (-(l as f64) * scale);
            gens.push(h);
        }
        Self::new(gens).expect("root basis is independent")
    }

    /// The coordinate basis `(x₁,…,x₇,y)` of `su(3)`.
    pub fn su3_x() -> Self {
        let gens = (0..8)
            .map(|i| {
                let mut v = [0.0; 8];
                v[i] = 1.0;
                su3_decode(&v)
            })
            .collect();
        Self::new(gens).expect("x-basis is independent")
    }

    /// The x-basis for `N = 3`, the root basis otherwise.
    pub fn su(n: usize) -> Self {
        if n == 3 {
            Self::su3_x()
        } else {
            Self::su_roots(n)
        }
    }

    /// `sl(N, C)` as a real space: the `su(N)` basis followed by `i` times it.
    pub fn sl(n: usize) -> Self {
        let su = Self::su(n);
        let mut gens = su.generators.clone();
        gens.extend(su.generators.iter().map(|g| g * I));
        Self::new(gens).expect("sl basis is independent")
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn n(&self) -> usize {
        self.generators[0].nrows()
    }

    pub fn generators(&self) -> &[CMat] {
        &self.generators
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn condition_number(&self) -> f64 {
        self.condition
    }

    /// Orthogonal-projection coordinates with respect to `Re tr(A†B)`.
    pub fn coordinates(&self, x: &CMat) -> DVector<f64> {
        let b = DVector::from_iterator(self.dim(), self.generators.iter().map(|g| real_inner(g, x)));
        &self.inner_inv * b
    }

    /// Coordinates of an element of the complexified span (`su(N) ⊗ C` for an `su` basis).
    pub fn coordinates_complexified(&self, w: &CMat) -> DVector<C64> {
        let (wr, wi) = split_complexified(w);
        let cr = self.coordinates(&wr);
        let ci = self.coordinates(&wi);
        DVector::from_fn(self.dim(), |i, _| C64::new(cr[i], ci[i]))
    }

    pub fn element(&self, v: &DVector<f64>) -> CMat {
        let n = self.n();
        let mut out = CMat::zeros(n, n);
        for (c, g) in v.iter().zip(&self.generators) {
            out.add_scaled(*c, g);
        }
        out
    }

    pub fn element_complexified(&self, v: &DVector<C64>) -> CMat {
        let n = self.n();
        let mut out = CMat::zeros(n, n);
        for (c, g) in v.iter().zip(&self.generators) {
            out += g * *c;
        }
        out
    }

    /// Distance from `x` to the span of the basis.
    pub fn residual(&self, x: &CMat) -> f64 {
        max_abs(&(self.element(&self.coordinates(x)) - x))
    }
}

/// Real-linear map represented by a matrix between two bases (rows = output coordinates).
#[derive(Clone, Debug)]
pub struct LinearMap {
    pub matrix: DMatrix<f64>,
    pub domain: RealBasis,
    pub codomain: RealBasis,
}

impl LinearMap {
    pub fn from_fn(domain: &RealBasis, codomain: &RealBasis, f: impl Fn(&CMat) -> CMat) -> Self {
        let mut matrix = DMatrix::zeros(codomain.dim(), domain.dim());
        for (j, g) in domain.generators().iter().enumerate() {
            matrix.set_column(j, &codomain.coordinates(&f(g)));
        }
        Self {
            matrix,
            domain: domain.clone(),
            codomain: codomain.clone(),
        }
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        self.codomain.element(&(&self.matrix * self.domain.coordinates(x)))
    }

    /// Largest deviation between matrix application and direct evaluation on the generators.
    pub fn consistency_residual(&self, f: impl Fn(&CMat) -> CMat) -> f64 {
        self.domain
            .generators()
            .iter()
            .map(|g| max_abs(&(self.apply(g) - f(g))))
            .fold(0.0, f64::max)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        LinearMap {
            matrix: &self.matrix * &other.matrix,
            domain: other.domain.clone(),
            codomain: self.codomain.clone(),
        }
    }
}

/// Centralizer data of an element `ξ ∈ su(N)`.
///
/// `ξ` is diagonalised once; `P` keeps the blocks between equal eigenvalues and `P⊥`
/// the rest. Both act complex-linearly, so they also apply on `su(N) ⊗ C`.
#[derive(Clone, Debug)]
pub struct Stabilizer {
    frame: Option<CMat>,
    labels: Vec<usize>,
}

impl Stabilizer {
    pub fn new(xi: &CMat) -> Result<Self> {
        let n = check_square(xi)?;
        if !is_su(xi, 1e-10) {
            return Err(Error::InvalidParameter {
                name: "xi",
                reason: "must lie in su(N)".into(),
            });
        }
        let off_diag = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(0.0_f64, |m, (i, j)| m.max(xi[(i, j)].norm()));
        let (frame, eig): (Option<CMat>, Vec<f64>) = if off_diag == 0.0 {
            (None, (0..n).map(|i| xi[(i, i)].im).collect())
        } else {
            let h = xi * C64::new(0.0, -1.0);
            let se = h.symmetric_eigen();
            (Some(se.eigenvectors), se.eigenvalues.iter().copied().collect())
        };
        let mut labels = vec![usize::MAX; n];
        let mut next = 0;
        for i in 0..n {
            if labels[i] != usize::MAX {
                continue;
            }
            for j in i..n {
                if labels[j] == usize::MAX && (eig[j] - eig[i]).abs() < 1e-9 {
                    labels[j] = next;
                }
            }
            next += 1;
        }
        Ok(Self { frame, labels })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    fn into_frame(&self, x: &CMat) -> CMat {
        match &self.frame {
            Some(u) => u.adjoint() * x * u,
            None => x.clone(),
        }
    }

    fn out_of_frame(&self, x: CMat) -> CMat {
        match &self.frame {
            Some(u) => u * x * u.adjoint(),
            None => x,
        }
    }

    fn masked(&self, x: &CMat, keep_same: bool) -> CMat {
        let n = self.n();
        let y = self.into_frame(x);
        let z = CMat::from_fn(n, n, |i, j| {
            if (self.labels[i] == self.labels[j]) == keep_same {
                y[(i, j)]
            } else {
                ZERO
            }
        });
        self.out_of_frame(z)
    }

    /// Projection onto the centralizer `ker ad_ξ`.
    pub fn project(&self, x: &CMat) -> CMat {
        self.masked(x, true)
    }

    /// Projection onto the orthocomplement of the centralizer.
    pub fn project_perp(&self, x: &CMat) -> CMat {
        self.masked(x, false)
    }

    /// Real basis of the orthocomplement, made of (rotated) root vectors.
    pub fn perp_basis(&self) -> RealBasis {
        let n = self.n();
        let mut gens = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.labels[i] != self.labels[j] {
                    let mut a = CMat::zeros(n, n);
                    a[(i, j)] = ONE;
                    a[(j, i)] = -ONE;
                    gens.push(self.out_of_frame(a));
                    let mut b = CMat::zeros(n, n);
                    b[(i, j)] = I;
                    b[(j, i)] = I;
                    gens.push(self.out_of_frame(b));
                }
            }
        }
        RealBasis::new(gens).expect("perp basis is independent")
    }

    pub fn perp_rank(&self) -> usize {
        let n = self.n();
        (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.labels[i] != self.labels[j])
            .count()
            * 2
    }
}

/// `(P, P⊥)` as matrices in [`RealBasis::su`].
pub fn stabilizer_projectors(xi: &CMat) -> Result<(LinearMap, LinearMap)> {
    let st = Stabilizer::new(xi)?;
    let basis = RealBasis::su(st.n());
    let p = LinearMap::from_fn(&basis, &basis, |x| st.project(x));
    let pp = LinearMap::from_fn(&basis, &basis, |x| st.project_perp(x));
    Ok((p, pp))
}

/// Reads `(x₁,…,x₇,y)` off `χ = i[[x₃+y, x₁-ix₂, x₄-ix₅], [x₁+ix₂, -x₃+y, x₆-ix₇], [x₄+ix₅, x₆+ix₇, -2y]]`.
pub fn su3_encode(x: &CMat) -> Result<[f64; 8]> {
    if x.nrows() != 3 || x.ncols() != 3 {
        return Err(Error::DimensionMismatch {
            left: x.nrows(),
            right: 3,
        });
    }
    let y = x * C64::new(0.0, -1.0);
    let sym = |i: usize, j: usize| ((y[(i, j)] + y[(j, i)]) * 0.5).re;
    let asym = |i: usize, j: usize| ((y[(j, i)] - y[(i, j)]) * C64::new(0.0, -0.5)).re;
    Ok([
        sym(0, 1),
        asym(0, 1),
        ((y[(0, 0)] - y[(1, 1)]) * 0.5).re,
        sym(0, 2),
        asym(0, 2),
        sym(1, 2),
        asym(1, 2),
        (-y[(2, 2)] * 0.5).re,
    ])
}

/// Inverse of [`su3_encode`].
pub fn su3_decode(v: &[f64; 8]) -> CMat {
    let [x1, x2, x3, x4, x5, x6, x7, y] = *v;
    let c = C64::new;
    let m = CMat::from_row_slice(
        3,
        3,
        &[
            c(x3 + y, 0.0),
            c(x1, -x2),
            c(x4, -x5),
            c(x1, x2),
            c(-x3 + y, 0.0),
            c(x6, -x7),
            c(x4, x5),
            c(x6, x7),
            c(-2.0 * y, 0.0),
        ],
    );
    m * I
}

/// Adjoint-action matrix `ad_x` in a basis (used for invariance and basis tests).
pub fn ad_matrix(basis: &RealBasis, x: &CMat) -> DMatrix<f64> {
    LinearMap::from_fn(basis, basis, |y| commutator(x, y)).matrix
}
