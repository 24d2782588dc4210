//! Seeded test problems with prescribed spectra.
//!
//! Randomness comes from ChaCha8 seeded with the 64-bit problem seed;
//! standard normals use the Box–Muller transform, so a given spec yields the
//! same matrices on every platform up to floating point rounding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{combine_columns, complete_orthonormal, dot, project_onto, DenseMatrix, Vector};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Spsd,
    Rectangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum X0Mode {
    #[default]
    Zero,
    RandomRange,
    RandomFull,
}

/// Recipe for a synthetic problem. `spectrum` holds eigenvalues (spsd) or
/// singular values (rectangular) in descending order; exact zeros set the
/// rank deficiency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub dims: (usize, usize),
    pub spectrum: Vec<f64>,
    pub seed: u64,
    #[serde(default)]
    pub consistency_gap: f64,
    #[serde(default)]
    pub x0_mode: X0Mode,
}

impl ProblemSpec {
    pub fn spsd(n: usize, spectrum: Vec<f64>, seed: u64) -> Self {
        ProblemSpec {
            kind: ProblemKind::Spsd,
            dims: (n, n),
            spectrum,
            seed,
            consistency_gap: 0.0,
            x0_mode: X0Mode::Zero,
        }
    }

    pub fn rectangular(m: usize, n: usize, spectrum: Vec<f64>, seed: u64) -> Self {
        ProblemSpec {
            kind: ProblemKind::Rectangular,
            dims: (m, n),
            spectrum,
            seed,
            consistency_gap: 0.0,
            x0_mode: X0Mode::Zero,
        }
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.consistency_gap = gap;
        self
    }

    pub fn with_x0(mut self, mode: X0Mode) -> Self {
        self.x0_mode = mode;
        self
    }

    /// Number of strictly positive spectrum entries.
    pub fn rank(&self) -> usize {
        self.spectrum.iter().filter(|&&s| s > 0.0).count()
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n) = self.dims;
        if m == 0 || n == 0 {
            return Err(Error::InvalidInput("problem dimensions must be positive".into()));
        }
        let expected = match self.kind {
            ProblemKind::Spsd => {
                if m != n {
                    return Err(Error::InvalidInput(format!("spsd problem must be square, got {m}x{n}")));
                }
                n
            }
            ProblemKind::Rectangular => m.min(n),
        };
        if self.spectrum.len() != expected {
            return Err(Error::dims("spectrum length", expected, self.spectrum.len()));
        }
        if self.spectrum.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::InvalidInput(
                "spectrum entries must be finite and nonnegative".into(),
            ));
        }
        if self.spectrum.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("spectrum must be sorted descending".into()));
        }
        if !self.consistency_gap.is_finite() || self.consistency_gap < 0.0 {
            return Err(Error::InvalidInput(
                "consistency_gap must be finite and nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// A generated problem together with its known minimum-norm solution.
///
/// `x0` lives in the solution space (length n); `y0` is the matching start
/// for the second-kind normal equation (length m), drawn from `R(A)` when
/// `x0_mode` is `random_range`.
#[derive(Debug, Clone)]
pub struct Problem<T> {
    pub a: DenseMatrix<T>,
    pub b: Vector<T>,
    pub x0: Vector<T>,
    pub y0: Vector<T>,
    pub xstar_reference: Vector<T>,
    pub rank: usize,
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller; 1 − u keeps the logarithm argument in (0, 1]
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn normal_vector<T: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> Vector<T> {
    (0..n).map(|_| T::lit(standard_normal(rng))).collect()
}

fn orthogonal_from<T: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix<T> {
    let mut cols: Vec<Vec<T>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut x = normal_vector::<T>(rng, n).into_vec();
        // modified Gram–Schmidt, applied twice
        for _ in 0..2 {
            for c in &cols {
                let h = dot(c, &x);
                for (xi, &ci) in x.iter_mut().zip(c) {
                    *xi -= h * ci;
                }
            }
        }
        let norm = dot(&x, &x).sqrt();
        if norm > T::lit(1e-8) {
            cols.push(x.into_iter().map(|v| v / norm).collect());
        } else {
            // a vanishing draw is astronomically unlikely; fall back to coordinates
            complete_orthonormal(&mut cols, n);
        }
    }
    let mut q = DenseMatrix::zeros(n, n);
    for (j, c) in cols.iter().enumerate() {
        q.set_column(j, c);
    }
    q
}

/// Seeded random orthogonal matrix.
pub fn random_orthogonal<T: Scalar>(n: usize, seed: u64) -> Result<DenseMatrix<T>> {
    if n < 1 {
        return Err(Error::InvalidInput("random_orthogonal needs n >= 1".into()));
    }
    Ok(orthogonal_from(&mut ChaCha8Rng::seed_from_u64(seed), n))
}

/// `U·diag(s)·Vᵀ` for the leading `s.len()` columns of both factors.
fn assemble<T: Scalar>(u: &DenseMatrix<T>, s: &[T], v: &DenseMatrix<T>) -> DenseMatrix<T> {
    let (m, n) = (u.rows(), v.rows());
    let mut a = DenseMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            a[(i, j)] = s
                .iter()
                .enumerate()
                .fold(T::zero(), |acc, (k, &sk)| acc + u[(i, k)] * sk * v[(j, k)]);
        }
    }
    a
}

/// Unit vector in the span of columns `cols` of `q`, or `None` for an empty span.
fn unit_in_span<T: Scalar>(
    rng: &mut ChaCha8Rng,
    q: &DenseMatrix<T>,
    cols: std::ops::Range<usize>,
) -> Option<Vector<T>> {
    if cols.is_empty() {
        return None;
    }
    let z = normal_vector::<T>(rng, cols.len());
    let z = z.scaled(z.norm().recip());
    Some(combine_columns(q, cols, &z))
}

/// Builds a problem from its spec with the pseudoinverse solution computed
/// from the generating factors.
pub fn make_problem<T: Scalar>(spec: &ProblemSpec) -> Result<Problem<T>> {
    spec.validate()?;
    let (m, n) = spec.dims;
    let rank = spec.rank();
    let spectrum: Vec<T> = spec.spectrum.iter().map(|&s| T::lit(s)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let (left, right) = match spec.kind {
        ProblemKind::Spsd => {
            let q = orthogonal_from::<T>(&mut rng, n);
            (q.clone(), q)
        }
        ProblemKind::Rectangular => {
            let u = orthogonal_from::<T>(&mut rng, m);
            let v = orthogonal_from::<T>(&mut rng, n);
            (u, v)
        }
    };
    let k = spectrum.len();
    let mut a = assemble(&left, &spectrum, &right);
    if spec.kind == ProblemKind::Spsd {
        for i in 0..n {
            for j in 0..i {
                let avg = T::lit(0.5) * (a[(i, j)] + a[(j, i)]);
                a[(i, j)] = avg;
                a[(j, i)] = avg;
            }
        }
    }
    debug_assert_eq!(k, m.min(n));

    // b = A·w + gap·u with u a unit vector orthogonal to R(A)
    let w = normal_vector::<T>(&mut rng, n);
    let w_coords = project_onto(&right, 0..rank, &w);
    let scaled: Vec<T> = w_coords.iter().zip(&spectrum).map(|(&c, &s)| c * s).collect();
    let mut b = combine_columns(&left, 0..rank, &scaled);
    let null_dir = unit_in_span(&mut rng, &left, rank..m);
    if spec.consistency_gap > 0.0 {
        let u = null_dir.ok_or_else(|| {
            Error::InvalidInput("consistency_gap > 0 requires a null space of A^T, but A has full row rank".into())
        })?;
        b = b.add_scaled(T::lit(spec.consistency_gap), &u);
    }
    // A†b = V₁·Σr⁻¹·U₁ᵀ·(U₁·Σr·V₁ᵀw) = V₁·V₁ᵀw
    let xstar_reference = combine_columns(&right, 0..rank, &w_coords);

    let (x0, y0) = match spec.x0_mode {
        X0Mode::Zero => (Vector::zeros(n), Vector::zeros(m)),
        X0Mode::RandomRange => {
            let zx = normal_vector::<T>(&mut rng, rank);
            let zy = normal_vector::<T>(&mut rng, rank);
            (
                combine_columns(&right, 0..rank, &zx),
                combine_columns(&left, 0..rank, &zy),
            )
        }
        X0Mode::RandomFull => (normal_vector(&mut rng, n), normal_vector(&mut rng, m)),
    };

    Ok(Problem {
        a,
        b,
        x0,
        y0,
        xstar_reference,
        rank,
    })
}

/// Geometric spectrum `λ₁ = top` down to `top/κ` over `rank` entries,
/// padded with zeros to `len`.
pub fn geometric_spectrum(len: usize, rank: usize, top: f64, kappa: f64) -> Vec<f64> {
    assert!(rank <= len, "rank exceeds spectrum length");
    let mut s: Vec<f64> = (0..rank)
        .map(|i| {
            if rank == 1 {
                top
            } else {
                top * kappa.powf(-(i as f64) / (rank - 1) as f64)
            }
        })
        .collect();
    s.resize(len, 0.0);
    s
}

/// `rank` values spaced evenly from `top` down to `top/kappa`, padded with
/// zeros to `len`.
pub fn linear_spectrum(len: usize, rank: usize, top: f64, kappa: f64) -> Vec<f64> {
    assert!(rank <= len, "rank exceeds spectrum length");
    let bottom = top / kappa;
    let mut s: Vec<f64> = (0..rank)
        .map(|i| {
            if rank == 1 {
                top
            } else {
                top - (top - bottom) * i as f64 / (rank - 1) as f64
            }
        })
        .collect();
    s.resize(len, 0.0);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{svd, symmetric_eig, DEFAULT_RANK_TOL};
    use crate::oracle::consistency_check;

    fn orthogonality_error(q: &DenseMatrix<f64>) -> f64 {
        let qtq = q.transpose().matmul(q).unwrap();
        qtq.sub(&DenseMatrix::identity(q.cols())).unwrap().max_abs()
    }

    #[test]
    fn one_by_one_orthogonal_is_a_sign() {
        let q = random_orthogonal::<f64>(1, 7).unwrap();
        assert_eq!(q[(0, 0)].abs(), 1.0);
        assert!(random_orthogonal::<f64>(0, 7).is_err());
    }

    #[test]
    fn orthogonal_and_deterministic() {
        for seed in [0u64, 1, 99, u64::MAX] {
            let q = random_orthogonal::<f64>(17, seed).unwrap();
            assert!(orthogonality_error(&q) <= 1e-12);
            assert_eq!(q, random_orthogonal::<f64>(17, seed).unwrap());
        }
        assert_ne!(
            random_orthogonal::<f64>(5, 1).unwrap(),
            random_orthogonal::<f64>(5, 2).unwrap()
        );
    }

    #[test]
    fn spsd_roundtrip() {
        let p = make_problem::<f64>(&ProblemSpec::spsd(3, vec![2.0, 1.0, 0.0], 11)).unwrap();
        let d = symmetric_eig(&p.a, DEFAULT_RANK_TOL).unwrap();
        for (got, want) in d.lambdas.iter().zip([2.0, 1.0, 0.0]) {
            assert!((got - want).abs() <= 1e-10);
        }
        assert_eq!(d.rank, 2);
        assert_eq!(p.rank, 2);
    }

    #[test]
    fn identity_spectrum_gives_identity() {
        let p = make_problem::<f64>(&ProblemSpec::spsd(3, vec![1.0; 3], 5)).unwrap();
        assert!(p.a.sub(&DenseMatrix::identity(3)).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn rectangular_gap_is_exact() {
        let spec = ProblemSpec::rectangular(3, 2, vec![2.0, 1.0], 3).with_gap(0.5);
        let p = make_problem::<f64>(&spec).unwrap();
        let aat = p.a.matmul(&p.a.transpose()).unwrap();
        let d = symmetric_eig(&aat, DEFAULT_RANK_TOL).unwrap();
        let rep = consistency_check(&d, &p.b, 1e-10).unwrap();
        assert!((rep.null_norm - 0.5).abs() <= 1e-10);
        assert!(!rep.consistent);
        let s = svd(&p.a, DEFAULT_RANK_TOL).unwrap();
        assert!((s.sigmas[0] - 2.0).abs() < 1e-12 && (s.sigmas[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gap_needs_null_space() {
        let spec = ProblemSpec::spsd(2, vec![2.0, 1.0], 3).with_gap(0.1);
        assert!(make_problem::<f64>(&spec).is_err());
        let spec = ProblemSpec::rectangular(2, 3, vec![2.0, 1.0], 3).with_gap(0.1);
        assert!(make_problem::<f64>(&spec).is_err());
    }

    #[test]
    fn validation() {
        assert!(ProblemSpec::spsd(3, vec![1.0, 2.0, 0.0], 0).validate().is_err());
        assert!(ProblemSpec::spsd(3, vec![1.0, 0.0], 0).validate().is_err());
        assert!(ProblemSpec::spsd(2, vec![1.0, -1.0], 0).validate().is_err());
        assert!(ProblemSpec::rectangular(4, 2, vec![1.0, 0.5], 0).validate().is_ok());
        let mut s = ProblemSpec::spsd(2, vec![1.0, 0.0], 0);
        s.dims = (2, 3);
        assert!(s.validate().is_err());
    }

    #[test]
    fn x0_modes() {
        let base = ProblemSpec::spsd(6, vec![3.0, 2.0, 1.0, 0.0, 0.0, 0.0], 9);
        let p = make_problem::<f64>(&base.clone().with_x0(X0Mode::RandomRange)).unwrap();
        let d = symmetric_eig(&p.a, DEFAULT_RANK_TOL).unwrap();
        let null = crate::oracle::split(&d, &p.x0).unwrap().null_part;
        assert!(null.norm() <= 1e-12 * p.x0.norm());
        let p = make_problem::<f64>(&base.with_x0(X0Mode::RandomFull)).unwrap();
        let null = crate::oracle::split(&d, &p.x0).unwrap().null_part;
        assert!(null.norm() > 1e-3);
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec = ProblemSpec::rectangular(4, 3, vec![2.0, 1.0, 0.0], 42)
            .with_gap(0.25)
            .with_x0(X0Mode::RandomRange);
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"kind\":\"rectangular\""));
        assert!(text.contains("\"x0_mode\":\"random_range\""));
        let back: ProblemSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn geometric_spectrum_shape() {
        let s = geometric_spectrum(5, 3, 1.0, 100.0);
        assert_eq!(s.len(), 5);
        assert_eq!(s[0], 1.0);
        assert!((s[2] - 0.01).abs() < 1e-15);
        assert_eq!(&s[3..], &[0.0, 0.0]);
    }

    #[test]
    fn linear_spectrum_shape() {
        let s = linear_spectrum(5, 3, 2.0, 4.0);
        assert_eq!(s, vec![2.0, 1.25, 0.5, 0.0, 0.0]);
        assert_eq!(linear_spectrum(2, 1, 3.0, 10.0), vec![3.0, 0.0]);
    }
}
