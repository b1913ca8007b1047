//! AAA and set-valued AAA rational approximation in barycentric form, the
//! generalized state-space pencil of a barycentric approximant, its quotient
//! form `p/q`, and the irreducibility and structure checks built on them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::linalg::{poly_det, rank};
use crate::exactalg::roots::numeric_roots;
use crate::exactalg::{ExactField, Mat, Poly, PolyMatrix, Scalar};
use crate::smithmcmillan::determinantal_divisor;
use crate::sysmat::SystemMatrix;

/// Sample points `Σ` and the values of one or more functions on them.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    points: Vec<Complex64>,
    functions: Vec<SampledFunction>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    pub name: String,
    pub values: Vec<Complex64>,
}

impl SampleSet {
    pub fn new(points: Vec<Complex64>, functions: Vec<SampledFunction>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::DegenerateSamples("at least two sample points are required".into()));
        }
        if functions.is_empty() {
            return Err(Error::DegenerateSamples("no sampled functions".into()));
        }
        for (i, z) in points.iter().enumerate() {
            if !z.is_finite() {
                return Err(Error::DegenerateSamples(format!("sample point {i} is not finite")));
            }
            if points[..i].contains(z) {
                return Err(Error::DegenerateSamples(format!("sample point {i} repeats an earlier point")));
            }
        }
        for f in &functions {
            if f.values.len() != points.len() {
                return Err(Error::DegenerateSamples(format!("{}: {} values for {} points", f.name, f.values.len(), points.len())));
            }
            if let Some(k) = f.values.iter().position(|v| !v.is_finite()) {
                return Err(Error::DegenerateSamples(format!("{}: value at point {k} is not finite", f.name)));
            }
        }
        Ok(SampleSet { points, functions })
    }

    /// Sample registry functions on the given points.
    pub fn from_functions(points: Vec<Complex64>, functions: &[ScalarFunction]) -> Result<Self> {
        let sampled = functions
            .iter()
            .map(|f| {
                let values = points.iter().map(|&z| f.eval(z)).collect::<Result<Vec<_>>>()?;
                Ok(SampledFunction { name: f.name(), values })
            })
            .collect::<Result<Vec<_>>>()?;
        SampleSet::new(points, sampled)
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn functions(&self) -> &[SampledFunction] {
        &self.functions
    }

    fn is_real(&self) -> bool {
        self.points.iter().all(|z| z.im == 0.0) && self.functions.iter().all(|f| f.values.iter().all(|v| v.im == 0.0))
    }
}

/// Built-in scalar functions for sampling and for residuals against the
/// original nonlinear problem.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarFunction {
    Exp,
    Sin,
    /// Principal branch; not evaluable on the negative real axis.
    Sqrt,
    /// `1/(λ - c)`.
    Pole(Complex64),
}

impl ScalarFunction {
    /// `exp`, `sin`, `sqrt`, or `pole:RE` / `pole:RE,IM`.
    pub fn parse(name: &str) -> Result<Self> {
        let name = name.trim();
        match name {
            "exp" => Ok(ScalarFunction::Exp),
            "sin" => Ok(ScalarFunction::Sin),
            "sqrt" => Ok(ScalarFunction::Sqrt),
            _ => {
                let arg = name.strip_prefix("pole:").ok_or_else(|| Error::UnknownFunction(name.to_string()))?;
                let parts: Vec<f64> = arg
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::UnknownFunction(name.to_string()))?;
                match parts.as_slice() {
                    [re] => Ok(ScalarFunction::Pole(Complex64::new(*re, 0.0))),
                    [re, im] => Ok(ScalarFunction::Pole(Complex64::new(*re, *im))),
                    _ => Err(Error::UnknownFunction(name.to_string())),
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            ScalarFunction::Exp => "exp".into(),
            ScalarFunction::Sin => "sin".into(),
            ScalarFunction::Sqrt => "sqrt".into(),
            ScalarFunction::Pole(c) if c.im == 0.0 => format!("pole:{}", c.re),
            ScalarFunction::Pole(c) => format!("pole:{},{}", c.re, c.im),
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let not_evaluable = || Error::FunctionNotEvaluable { name: self.name(), point: format!("{z}") };
        let v = match self {
            ScalarFunction::Exp => z.exp(),
            ScalarFunction::Sin => z.sin(),
            ScalarFunction::Sqrt => {
                if z.im == 0.0 && z.re < 0.0 {
                    return Err(not_evaluable());
                }
                z.sqrt()
            }
            ScalarFunction::Pole(c) => {
                if z == *c {
                    return Err(not_evaluable());
                }
                (z - c).inv()
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(not_evaluable())
        }
    }
}

/// `r(λ) = Σ g_j w_j/(λ - z_j) / Σ w_j/(λ - z_j)` with distinct supports
/// `z_j` and nonzero weights `w_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BarycentricApprox<T = Complex64> {
    supports: Vec<T>,
    weights: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> BarycentricApprox<T> {
    pub fn new(supports: Vec<T>, weights: Vec<T>, values: Vec<T>) -> Result<Self> {
        let m = supports.len();
        if m == 0 || weights.len() != m || values.len() != m {
            return Err(Error::InvalidApprox("supports, weights and values must be nonempty and of equal length".into()));
        }
        for j in 0..m {
            if supports[..j].contains(&supports[j]) {
                return Err(Error::InvalidApprox(format!("support {j} repeats an earlier support")));
            }
            if weights[j].is_zero() {
                return Err(Error::InvalidApprox(format!("weight {j} is zero")));
            }
        }
        Ok(BarycentricApprox { supports, weights, values })
    }

    pub fn m(&self) -> usize {
        self.supports.len()
    }

    pub fn supports(&self) -> &[T] {
        &self.supports
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// The approximant whose quotient form is exactly `p/q` at the given
    /// supports: `w_j = q(z_j)/Π_{k≠j}(z_j - z_k)` and `g_j = p(z_j)/q(z_j)`.
    /// Requires `deg p, deg q < m` and `q(z_j) ≠ 0`.
    pub fn from_quotient(supports: Vec<T>, p: &Poly<T>, q: &Poly<T>) -> Result<Self> {
        let m = supports.len();
        let too_high = |d: Option<usize>| d.is_some_and(|d| d >= m);
        if too_high(p.degree()) || too_high(q.degree()) {
            return Err(Error::InvalidApprox("p and q must have degree below the number of supports".into()));
        }
        let mut weights = Vec::with_capacity(m);
        let mut values = Vec::with_capacity(m);
        for (j, z) in supports.iter().enumerate() {
            let qz = q.eval(z);
            if qz.is_zero() {
                return Err(Error::InvalidApprox(format!("q vanishes at support {j}")));
            }
            let node = supports
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .fold(T::one(), |acc, (_, zk)| acc * (z.clone() - zk.clone()));
            weights.push(qz.clone() / node);
            values.push(p.eval(z) / qz);
        }
        BarycentricApprox::new(supports, weights, values)
    }

    /// Value at `x`; the interpolated value at a support, `None` at a pole.
    pub fn eval(&self, x: &T) -> Option<T> {
        if let Some(j) = self.supports.iter().position(|z| z == x) {
            return Some(self.values[j].clone());
        }
        let mut num = T::zero();
        let mut den = T::zero();
        for j in 0..self.m() {
            let c = self.weights[j].clone() / (x.clone() - self.supports[j].clone());
            num = num + c.clone() * self.values[j].clone();
            den = den + c;
        }
        (!den.is_zero()).then(|| num / den)
    }

    /// `p = Π(λ - z_j) Σ g_j w_j/(λ - z_j)` and `q = Π(λ - z_j) Σ w_j/(λ - z_j)`,
    /// expanded without cancelling common factors.
    pub fn quotient(&self) -> (Poly<T>, Poly<T>) {
        let mut p = Poly::zero();
        let mut q = Poly::zero();
        for j in 0..self.m() {
            let mut prod = Poly::one();
            for (k, z) in self.supports.iter().enumerate() {
                if k != j {
                    prod = prod * Poly::linear(z.clone());
                }
            }
            p = p + prod.scale(&(self.values[j].clone() * self.weights[j].clone()));
            q = q + prod.scale(&self.weights[j]);
        }
        (p, q)
    }

    /// The pencil `[E - λF, -b; a^T, 0]`: first row of `E` holds the weights,
    /// row `j+1` encodes `(λ - z_j) x_j + (z_{j+1} - λ) x_{j+1}`.
    pub fn realization(&self) -> RealizationPencil<T> {
        let m = self.m();
        let mut e = Mat::zeros(m, m);
        let mut f = Mat::zeros(m, m);
        for j in 0..m {
            e[(0, j)] = self.weights[j].clone();
        }
        for j in 0..m.saturating_sub(1) {
            e[(j + 1, j)] = -self.supports[j].clone();
            e[(j + 1, j + 1)] = self.supports[j + 1].clone();
            f[(j + 1, j)] = -T::one();
            f[(j + 1, j + 1)] = T::one();
        }
        let a = (0..m).map(|j| self.values[j].clone() * self.weights[j].clone()).collect();
        let mut b = vec![T::zero(); m];
        b[0] = T::one();
        RealizationPencil { e, f, a, b }
    }
}

impl BarycentricApprox<Complex64> {
    /// Snap every number to the exact field. Doubles are dyadic rationals, so
    /// this loses nothing; it fails only for complex data in a real field.
    pub fn rationalize<F: ExactField>(&self) -> Result<BarycentricApprox<F>> {
        let snap = |v: &[Complex64]| {
            v.iter()
                .map(|&z| F::from_c64(z).ok_or_else(|| Error::NotRepresentable(format!("{z}"))))
                .collect::<Result<Vec<F>>>()
        };
        BarycentricApprox::new(snap(&self.supports)?, snap(&self.weights)?, snap(&self.values)?)
    }
}

/// `E`, `F` (m×m), `a` and `b` with `r(λ) = a^T (E - λF)^{-1} b`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizationPencil<T = Complex64> {
    pub e: Mat<T>,
    pub f: Mat<T>,
    pub a: Vec<T>,
    pub b: Vec<T>,
}

/// Barycentric value at `λ`; infinite at a pole.
pub fn barycentric_eval(r: &BarycentricApprox, lambda: Complex64) -> Complex64 {
    r.eval(&lambda).unwrap_or(Complex64::new(f64::INFINITY, 0.0))
}

/// The realization pencil and the system matrix with state `E - λF`,
/// `B = -b`, `C = -a^T`, `D = 0`, whose transfer function is `r`.
pub fn barycentric_to_pencil<F: ExactField>(r: &BarycentricApprox<F>) -> (RealizationPencil<F>, SystemMatrix<F>) {
    let rp = r.realization();
    let m = r.m();
    let state = PolyMatrix::pencil(&rp.e, &-rp.f.clone());
    let b = Mat::from_fn(m, 1, |i, _| Poly::constant(-rp.b[i].clone()));
    let c = Mat::from_fn(1, m, |_, j| Poly::constant(-rp.a[j].clone()));
    let sys = SystemMatrix::new(state, b, c, Mat::zeros(1, 1)).expect("realization pencil has conforming blocks");
    (rp, sys)
}

pub fn barycentric_to_quotient<F: ExactField>(r: &BarycentricApprox<F>) -> (Poly<F>, Poly<F>) {
    r.quotient()
}

#[derive(Clone, Debug, PartialEq)]
pub struct IrreducibilityReport<F> {
    pub irreducible: bool,
    /// Monic `gcd(p, q)`.
    pub common_factor: Poly<F>,
    /// Roots of the common factor in the field, with multiplicity.
    pub common_roots: Vec<(F, usize)>,
    /// All roots of the common factor, numerically.
    pub common_roots_numeric: Vec<Complex64>,
}

/// Common roots of `p` and `q`, exactly via their gcd.
pub fn irreducibility_report<F: ExactField>(r: &BarycentricApprox<F>) -> IrreducibilityReport<F> {
    let (p, q) = r.quotient();
    let g = if p.is_zero() { q.monic() } else { p.gcd(&q) };
    let (common_roots, _) = g.exact_roots();
    IrreducibilityReport {
        irreducible: g.is_constant(),
        common_roots_numeric: numeric_roots(&g.to_c64()),
        common_factor: g,
        common_roots,
    }
}

/// Roots of `q` at which `|p|` is below `tol` relative to the size of `p`.
pub fn numeric_common_roots(r: &BarycentricApprox, tol: f64) -> Vec<Complex64> {
    let (p, q) = r.quotient();
    let pmax = p.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    numeric_roots(&q)
        .into_iter()
        .filter(|z| {
            let scale = pmax * z.norm().max(1.0).powi(p.degree().unwrap_or(0) as i32);
            p.eval(z).norm() <= tol * scale.max(f64::MIN_POSITIVE)
        })
        .collect()
}

/// The state pencil `E - λF = [M; K(λ)]` is a strong block minimal bases
/// pencil for `q`: `K` has full rank everywhere, its highest row degree
/// coefficient has full row rank, `K N^T = 0` with
/// `N = Π(λ - z_j) [1/(λ - z_1) … 1/(λ - z_m)]`, and `M N^T = q`.
pub fn verify_state_pencil_structure<F: ExactField>(r: &BarycentricApprox<F>) -> bool {
    let m = r.m();
    let rp = r.realization();
    let pencil = PolyMatrix::pencil(&rp.e, &-rp.f.clone());
    let k = pencil.submatrix(1..m, 0..m);
    let nvec: Vec<Poly<F>> = (0..m)
        .map(|j| {
            r.supports()
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .fold(Poly::one(), |acc, (_, z)| acc * Poly::linear(z.clone()))
        })
        .collect();
    let n = Mat::from_fn(1, m, |_, j| nvec[j].clone());
    let everywhere_full = m == 1 || determinantal_divisor(&k, m - 1).is_constant();
    let khr = -rp.f.submatrix(1..m, 0..m);
    let row_reduced = rank(&khr) == m - 1;
    let dual = (&k * &n.transpose()).is_zero();
    let (_, q) = r.quotient();
    let mq = &pencil.submatrix(0..1, 0..m) * &n.transpose();
    everywhere_full && row_reduced && dual && mq[(0, 0)] == q
}

/// `det(E - λF)`.
pub fn state_determinant<F: ExactField>(r: &BarycentricApprox<F>) -> Poly<F> {
    let rp = r.realization();
    poly_det(&PolyMatrix::pencil(&rp.e, &-rp.f)).expect("square state pencil")
}

/// AAA for a single function.
pub fn aaa_approximate(samples: &SampleSet, tol: f64, max_m: usize) -> Result<BarycentricApprox> {
    if samples.functions.len() != 1 {
        return Err(Error::DegenerateSamples(format!("expected one function, got {}", samples.functions.len())));
    }
    Ok(set_valued_aaa(samples, tol, max_m)?.remove(0))
}

/// Set-valued AAA: one set of supports and weights shared by all functions.
/// Each function is scaled by its maximum modulus on `Σ`, and the iteration
/// stops once every relative maximum error on `Σ` is at most `tol`.
pub fn set_valued_aaa(samples: &SampleSet, tol: f64, max_m: usize) -> Result<Vec<BarycentricApprox>> {
    let pts = &samples.points;
    let npts = pts.len();
    let scales: Vec<f64> = samples
        .functions
        .iter()
        .map(|f| {
            let s = f.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    let g: Vec<Vec<Complex64>> = samples
        .functions
        .iter()
        .zip(&scales)
        .map(|(f, s)| f.values.iter().map(|v| v / s).collect())
        .collect();
    let real = samples.is_real();

    let mut approx: Vec<Vec<Complex64>> = g
        .iter()
        .map(|gi| {
            let mean = gi.iter().sum::<Complex64>() / npts as f64;
            vec![mean; npts]
        })
        .collect();
    let mut support_idx: Vec<usize> = Vec::new();
    let mut active = vec![true; npts];
    let mut error = f64::INFINITY;

    for m in 1..=max_m.min(npts) {
        let mut best = None;
        let mut best_err = -1.0;
        for k in (0..npts).filter(|&k| active[k]) {
            let e = g.iter().zip(&approx).map(|(gi, ri)| (gi[k] - ri[k]).norm()).fold(0.0, f64::max);
            if e > best_err {
                best_err = e;
                best = Some(k);
            }
        }
        let j = best.expect("an active point remains");
        support_idx.push(j);
        active[j] = false;

        let rest: Vec<usize> = (0..npts).filter(|&k| active[k]).collect();
        let rows = (g.len() * rest.len()).max(m);
        let entry = |row: usize, c: usize| -> Complex64 {
            if row >= g.len() * rest.len() {
                return Complex64::zero();
            }
            let (i, k) = (row / rest.len(), rest[row % rest.len()]);
            let s = support_idx[c];
            (g[i][k] - g[i][s]) / (pts[k] - pts[s])
        };
        let weights = smallest_right_singular_vector(rows, m, entry, real);
        if let Some(pos) = weights.iter().position(|w| w.norm() < 1e-300) {
            return Err(Error::DegenerateSamples(format!("weight {pos} vanished at m = {m}")));
        }

        for (gi, ri) in g.iter().zip(approx.iter_mut()) {
            for k in 0..npts {
                ri[k] = if active[k] {
                    let mut num = Complex64::zero();
                    let mut den = Complex64::zero();
                    for (c, &s) in support_idx.iter().enumerate() {
                        let t = weights[c] / (pts[k] - pts[s]);
                        num += t * gi[s];
                        den += t;
                    }
                    num / den
                } else {
                    gi[k]
                };
            }
        }
        error = g
            .iter()
            .zip(&approx)
            .map(|(gi, ri)| gi.iter().zip(ri).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if !error.is_finite() {
            error = f64::INFINITY;
        }
        if error <= tol || rest.is_empty() {
            let supports: Vec<Complex64> = support_idx.iter().map(|&k| pts[k]).collect();
            return samples
                .functions
                .iter()
                .map(|f| {
                    let values = support_idx.iter().map(|&k| f.values[k]).collect();
                    BarycentricApprox::new(supports.clone(), weights.clone(), values)
                })
                .collect();
        }
    }
    Err(Error::ToleranceNotReached { max_m, error })
}

/// Unit right singular vector for the smallest singular value. When several
/// singular values tie within `1e-14` relative, the last one is taken. The
/// phase is fixed so that the first nonzero component is real and positive.
fn smallest_right_singular_vector(
    rows: usize,
    cols: usize,
    entry: impl Fn(usize, usize) -> Complex64,
    real: bool,
) -> Vec<Complex64> {
    let pick = |sv: &[f64]| -> usize {
        let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
        let smax = sv.iter().copied().fold(0.0, f64::max);
        (0..sv.len()).filter(|&i| sv[i] <= smin + 1e-14 * smax).max().unwrap()
    };
    let mut v: Vec<Complex64> = if real {
        let a = DMatrix::<f64>::from_fn(rows, cols, |i, j| entry(i, j).re);
        let svd = a.svd(false, true);
        let vt = svd.v_t.expect("right singular vectors requested");
        let i = pick(svd.singular_values.as_slice());
        (0..cols).map(|j| Complex64::new(vt[(i, j)], 0.0)).collect()
    } else {
        let a = DMatrix::<Complex64>::from_fn(rows, cols, entry);
        let svd = a.svd(false, true);
        let vt = svd.v_t.expect("right singular vectors requested");
        let i = pick(svd.singular_values.as_slice());
        (0..cols).map(|j| vt[(i, j)].conj()).collect()
    };
    if let Some(first) = v.iter().find(|z| z.norm() > 0.0).copied() {
        let phase = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
    v
}
