//! Domain types shared by every other module: raw bivariate observations
//! with a censoring pattern, their sufficient-statistic reduction, Gaussian
//! parameters in both the covariance and concentration charts, and the count
//! and probability tables of the discrete model.
//!
//! All types are immutable after construction; the operations here are pure
//! functions, so everything can be shared freely across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Raw bivariate data under the three-block censoring pattern: `y` holds the
/// complete pairs, `z` the cases where only the first coordinate was
/// observed, `w` the cases where only the second was.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset<T> {
    pub y: Vec<[T; 2]>,
    pub z: Vec<T>,
    pub w: Vec<T>,
}

impl<T: Real> Dataset<T> {
    pub fn new(y: Vec<[T; 2]>, z: Vec<T>, w: Vec<T>) -> Result<Self> {
        let ds = Dataset { y, z, w };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        if self.y.is_empty() && self.z.is_empty() && self.w.is_empty() {
            return Err(Error::invalid("dataset has no observations"));
        }
        let finite = self
            .y
            .iter()
            .flat_map(|p| p.iter())
            .chain(self.z.iter())
            .chain(self.w.iter())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("dataset contains a non-finite value"));
        }
        Ok(())
    }
}

/// The twelve sufficient statistics of the observed-data likelihood: block
/// counts and per-block moments (arithmetic means of the transforms).
///
/// Counts are stored as scalars so that statistics generated directly,
/// without an underlying dataset, stay representable; dataset-derived values
/// always carry integers. Moment fields of a block with count zero are
/// ignored by every consumer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuffStats<T> {
    pub n: T,
    pub r: T,
    pub s: T,
    pub my1: T,
    pub my2: T,
    pub my11: T,
    pub my12: T,
    pub my22: T,
    pub mz1: T,
    pub mz2: T,
    pub mw1: T,
    pub mw2: T,
}

/// Mean of `f` over `xs` by compensated (Kahan) summation.
fn kahan_mean<T: Real>(xs: &[T], f: impl Fn(&T) -> T) -> T {
    if xs.is_empty() {
        return T::zero();
    }
    let mut sum = T::zero();
    let mut c = T::zero();
    for x in xs {
        let y = f(x) - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum / T::from_usize(xs.len()).unwrap()
}

fn kahan_mean_pairs<T: Real>(xs: &[[T; 2]], f: impl Fn(&[T; 2]) -> T) -> T {
    if xs.is_empty() {
        return T::zero();
    }
    let mut sum = T::zero();
    let mut c = T::zero();
    for x in xs {
        let y = f(x) - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum / T::from_usize(xs.len()).unwrap()
}

/// Absolute slack allowed on the sample-variance inequalities; covers
/// rounding in the compensated sums on large blocks.
pub const VARIANCE_TOL: f64 = 1e-9;

impl<T: Real> SuffStats<T> {
    /// Total effective sample size `n + r + s`.
    pub fn total(&self) -> T {
        self.n + self.r + self.s
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.n, self.r, self.s, self.my1, self.my2, self.my11, self.my12, self.my22,
            self.mz1, self.mz2, self.mw1, self.mw2,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("sufficient statistics contain a non-finite value"));
        }
        if self.n < T::zero() || self.r < T::zero() || self.s < T::zero() {
            return Err(Error::invalid("negative block count"));
        }
        if self.total() <= T::zero() {
            return Err(Error::invalid("all block counts are zero"));
        }
        let tol = T::of(VARIANCE_TOL);
        if self.n > T::zero()
            && (self.my11 < self.my1 * self.my1 - tol || self.my22 < self.my2 * self.my2 - tol)
        {
            return Err(Error::invalid("complete-block second moment below squared mean"));
        }
        if self.r > T::zero() && self.mz2 < self.mz1 * self.mz1 - tol {
            return Err(Error::invalid("z-block second moment below squared mean"));
        }
        if self.s > T::zero() && self.mw2 < self.mw1 * self.mw1 - tol {
            return Err(Error::invalid("w-block second moment below squared mean"));
        }
        Ok(())
    }
}

/// Reduce a dataset to its twelve sufficient statistics. Empty blocks yield
/// zeroed moments with count zero.
pub fn reduce<T: Real>(dataset: &Dataset<T>) -> SuffStats<T> {
    SuffStats {
        n: T::from_usize(dataset.y.len()).unwrap(),
        r: T::from_usize(dataset.z.len()).unwrap(),
        s: T::from_usize(dataset.w.len()).unwrap(),
        my1: kahan_mean_pairs(&dataset.y, |p| p[0]),
        my2: kahan_mean_pairs(&dataset.y, |p| p[1]),
        my11: kahan_mean_pairs(&dataset.y, |p| p[0] * p[0]),
        my12: kahan_mean_pairs(&dataset.y, |p| p[0] * p[1]),
        my22: kahan_mean_pairs(&dataset.y, |p| p[1] * p[1]),
        mz1: kahan_mean(&dataset.z, |z| *z),
        mz2: kahan_mean(&dataset.z, |z| *z * *z),
        mw1: kahan_mean(&dataset.w, |w| *w),
        mw2: kahan_mean(&dataset.w, |w| *w * *w),
    }
}

/// Mean vector and concentration matrix `Γ = Σ⁻¹` (symmetric, entries
/// `g11, g12, g22`) of a bivariate normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams<T> {
    pub mu1: T,
    pub mu2: T,
    pub g11: T,
    pub g12: T,
    pub g22: T,
}

impl<T: Real> GaussianParams<T> {
    pub fn new(mu1: T, mu2: T, g11: T, g12: T, g22: T) -> Self {
        GaussianParams { mu1, mu2, g11, g12, g22 }
    }

    pub fn det_gamma(&self) -> T {
        self.g11 * self.g22 - self.g12 * self.g12
    }

    /// Statistical relevance: Γ (equivalently Σ) lies in the positive
    /// definite cone.
    pub fn is_relevant(&self) -> bool {
        self.g11 > T::zero() && self.det_gamma() > T::zero()
    }

    /// Build from a covariance matrix `(σ11, σ12, σ22)`; fails off the
    /// positive-definite cone.
    pub fn from_sigma(mu1: T, mu2: T, s11: T, s12: T, s22: T) -> Result<Self> {
        let (g11, g12, g22) = gamma_from_sigma(s11, s12, s22)?;
        Ok(GaussianParams { mu1, mu2, g11, g12, g22 })
    }

    /// Covariance entries `(σ11, σ12, σ22)` recovered from Γ.
    pub fn sigma(&self) -> Result<(T, T, T)> {
        sigma_from_gamma(self.g11, self.g12, self.g22)
    }
}

/// Invert a symmetric positive definite 2×2 matrix given as `(a11, a12, a22)`.
fn invert_pd2<T: Real>(a11: T, a12: T, a22: T, what: &str) -> Result<(T, T, T)> {
    let det = a11 * a22 - a12 * a12;
    if !(a11 > T::zero() && det > T::zero()) {
        return Err(Error::invalid(format!("{what} matrix is not positive definite")));
    }
    Ok((a22 / det, -a12 / det, a11 / det))
}

/// Concentration entries from covariance entries: `Γ = Σ⁻¹` by the 2×2
/// adjugate. Errors on a non-PD input.
pub fn gamma_from_sigma<T: Real>(s11: T, s12: T, s22: T) -> Result<(T, T, T)> {
    invert_pd2(s11, s12, s22, "covariance")
}

/// Covariance entries from concentration entries (inverse of
/// [`gamma_from_sigma`]).
pub fn sigma_from_gamma<T: Real>(g11: T, g12: T, g22: T) -> Result<(T, T, T)> {
    invert_pd2(g11, g12, g22, "concentration")
}

/// Multinomial missing-data counts: complete-case table `t` plus the
/// supplementary margins `rvec` (row-only observations) and `svec`
/// (column-only observations). The grid is row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountTable<T> {
    pub t: Vec<Vec<T>>,
    pub rvec: Vec<T>,
    pub svec: Vec<T>,
}

impl<T: Real> CountTable<T> {
    pub fn new(t: Vec<Vec<T>>, rvec: Vec<T>, svec: Vec<T>) -> Result<Self> {
        let table = CountTable { t, rvec, svec };
        table.validate()?;
        Ok(table)
    }

    pub fn nrows(&self) -> usize {
        self.t.len()
    }

    pub fn ncols(&self) -> usize {
        self.t.first().map_or(0, |row| row.len())
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n) = (self.nrows(), self.ncols());
        if m < 1 || n < 1 {
            return Err(Error::invalid("count table must be at least 1x1"));
        }
        if self.t.iter().any(|row| row.len() != n) {
            return Err(Error::invalid("count table is ragged"));
        }
        if self.rvec.len() != m || self.svec.len() != n {
            return Err(Error::invalid("margin vector length does not match table shape"));
        }
        let ok = self
            .t
            .iter()
            .flatten()
            .chain(self.rvec.iter())
            .chain(self.svec.iter())
            .all(|v| v.is_finite() && *v >= T::zero());
        if !ok {
            return Err(Error::invalid("count table entries must be finite and nonnegative"));
        }
        Ok(())
    }

    /// Grand total `ΣT + ΣR + ΣS`.
    pub fn total(&self) -> T {
        let t: T = self.t.iter().flatten().copied().sum();
        let r: T = self.rvec.iter().copied().sum();
        let s: T = self.svec.iter().copied().sum();
        t + r + s
    }
}

/// A cell-probability table; lives on the statistical simplex when produced
/// by the MLE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbTable<T> {
    pub p: Vec<Vec<T>>,
}

impl<T: Real> ProbTable<T> {
    pub fn uniform(m: usize, n: usize) -> Self {
        let v = T::one() / T::from_usize(m * n).unwrap();
        ProbTable { p: vec![vec![v; n]; m] }
    }

    pub fn nrows(&self) -> usize {
        self.p.len()
    }

    pub fn ncols(&self) -> usize {
        self.p.first().map_or(0, |row| row.len())
    }

    pub fn row_margin(&self, i: usize) -> T {
        self.p[i].iter().copied().sum()
    }

    pub fn col_margin(&self, j: usize) -> T {
        self.p.iter().map(|row| row[j]).sum()
    }

    pub fn grand_total(&self) -> T {
        self.p.iter().flatten().copied().sum()
    }

    /// Membership in the simplex, up to `tol` on the total and `-tol` on
    /// entries.
    pub fn on_simplex(&self, tol: T) -> bool {
        self.p.iter().flatten().all(|v| *v >= -tol)
            && (self.grand_total() - T::one()).abs() <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn reduce_all_zero_data() {
        let ds = Dataset::new(vec![[0.0, 0.0]], vec![], vec![]).unwrap();
        let st = reduce(&ds);
        assert_eq!(st.n, 1.0);
        assert_eq!(st.r, 0.0);
        assert_eq!(st.s, 0.0);
        assert_eq!((st.my1, st.my2, st.my11, st.my12, st.my22), (0.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn reduce_two_complete_pairs() {
        // Hand arithmetic: means of (1,3), (2,4), (1,9), (2,12), (4,16).
        let ds = Dataset::new(vec![[1.0, 2.0], [3.0, 4.0]], vec![], vec![]).unwrap();
        let st = reduce(&ds);
        assert_eq!(st.my1, 2.0);
        assert_eq!(st.my2, 3.0);
        assert_eq!(st.my11, 5.0);
        assert_eq!(st.my12, 7.0);
        assert_eq!(st.my22, 10.0);
        st.validate().unwrap();
    }

    #[test]
    fn reduce_single_z_point() {
        let ds = Dataset::new(vec![], vec![2.0], vec![]).unwrap();
        let st = reduce(&ds);
        assert_eq!(st.r, 1.0);
        assert_eq!(st.mz1, 2.0);
        assert_eq!(st.mz2, 4.0);
        assert_eq!(st.n, 0.0);
    }

    #[test]
    fn empty_dataset_rejected() {
        assert!(Dataset::<f64>::new(vec![], vec![], vec![]).is_err());
        assert!(Dataset::new(vec![[f64::NAN, 0.0]], vec![], vec![]).is_err());
    }

    #[test]
    fn gamma_identity_and_diagonal() {
        assert_eq!(gamma_from_sigma(1.0, 0.0, 1.0).unwrap(), (1.0, 0.0, 1.0));
        assert_eq!(gamma_from_sigma(2.0, 0.0, 2.0).unwrap(), (0.5, 0.0, 0.5));
    }

    #[test]
    fn gamma_by_adjugate() {
        // Σ = (2,1,2): det 3, inverse (2/3, -1/3, 2/3).
        let (g11, g12, g22) = gamma_from_sigma(2.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(g11, 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(g12, -1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(g22, 2.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn non_pd_sigma_rejected() {
        assert!(gamma_from_sigma(1.0, 2.0, 1.0).is_err());
        assert!(gamma_from_sigma(-1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn dataset_json_round_trip_field_names() {
        let ds = Dataset::new(vec![[1.0, 2.0]], vec![3.0], vec![]).unwrap();
        let json = serde_json::to_value(&ds).unwrap();
        assert_eq!(json["y"][0][1], 2.0);
        assert_eq!(json["z"][0], 3.0);
        let back: Dataset<f64> = serde_json::from_value(json).unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn suffstats_json_field_names() {
        let st = reduce(&Dataset::new(vec![[1.0, 2.0], [3.0, 4.0]], vec![1.0], vec![2.0]).unwrap());
        let json = serde_json::to_value(st).unwrap();
        for key in ["n", "r", "s", "my1", "my2", "my11", "my12", "my22", "mz1", "mz2", "mw1", "mw2"] {
            assert!(json.get(key).is_some(), "missing field {key}");
        }
    }

    fn pd_sigma() -> impl Strategy<Value = (f64, f64, f64)> {
        // A A^t + 0.05 I is PD for any A.
        (
            prop::array::uniform4(-3.0f64..3.0),
        )
            .prop_map(|(a,)| {
                let s11 = a[0] * a[0] + a[1] * a[1] + 0.05;
                let s12 = a[0] * a[2] + a[1] * a[3];
                let s22 = a[2] * a[2] + a[3] * a[3] + 0.05;
                (s11, s12, s22)
            })
    }

    proptest! {
        #[test]
        fn sigma_gamma_round_trip((s11, s12, s22) in pd_sigma()) {
            let (g11, g12, g22) = gamma_from_sigma(s11, s12, s22).unwrap();
            let (b11, b12, b22) = sigma_from_gamma(g11, g12, g22).unwrap();
            prop_assert!((b11 - s11).abs() <= 1e-12 * s11.abs());
            prop_assert!((b12 - s12).abs() <= 1e-12 * (1.0 + s12.abs()));
            prop_assert!((b22 - s22).abs() <= 1e-12 * s22.abs());
        }

        #[test]
        fn relevance_matches_sigma_eigenvalues((s11, s12, s22) in pd_sigma()) {
            let (g11, g12, g22) = gamma_from_sigma(s11, s12, s22).unwrap();
            let params = GaussianParams::new(0.0, 0.0, g11, g12, g22);
            // Eigenvalues of the reconstructed Σ must both be positive.
            let (b11, b12, b22) = params.sigma().unwrap();
            let tr = b11 + b22;
            let det = b11 * b22 - b12 * b12;
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            let (l1, l2) = (tr / 2.0 - disc, tr / 2.0 + disc);
            prop_assert_eq!(params.is_relevant(), l1 > 0.0 && l2 > 0.0);
        }

        #[test]
        fn reduce_is_permutation_invariant(
            mut y in prop::collection::vec(prop::array::uniform2(-10.0f64..10.0), 1..20),
            seed in 0u64..1000,
        ) {
            let a = reduce(&Dataset::new(y.clone(), vec![], vec![]).unwrap());
            // Deterministic shuffle.
            let k = y.len();
            for i in (1..k).rev() {
                let j = ((seed as usize).wrapping_mul(6364136223846793005).wrapping_add(i)) % (i + 1);
                y.swap(i, j);
            }
            let b = reduce(&Dataset::new(y, vec![], vec![]).unwrap());
            prop_assert!((a.my1 - b.my1).abs() <= 1e-12 * (1.0 + a.my1.abs()));
            prop_assert!((a.my12 - b.my12).abs() <= 1e-12 * (1.0 + a.my12.abs()));
            prop_assert!((a.my22 - b.my22).abs() <= 1e-12 * (1.0 + a.my22.abs()));
        }

        #[test]
        fn reduce_variance_invariant(
            y in prop::collection::vec(prop::array::uniform2(-100.0f64..100.0), 1..50),
            z in prop::collection::vec(-100.0f64..100.0, 0..50),
        ) {
            let st = reduce(&Dataset::new(y, z, vec![]).unwrap());
            prop_assert!(st.my11 >= st.my1 * st.my1 - VARIANCE_TOL);
            prop_assert!(st.my22 >= st.my2 * st.my2 - VARIANCE_TOL);
            if st.r > 0.0 {
                prop_assert!(st.mz2 >= st.mz1 * st.mz1 - VARIANCE_TOL);
            }
            st.validate().unwrap();
        }
    }
}
