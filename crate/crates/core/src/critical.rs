//! Polynomial systems whose solutions (off the cleared-denominator locus)
//! are the critical points of the observed-data likelihood.
//!
//! `build_full` clears denominators in the five score equations, giving
//! polynomials of degrees (3, 3, 6, 6, 6) in `(μ1, μ2, γ11, γ12, γ22)`.
//! `eliminate_mu` uses the linearity of the two mean equations to solve for
//! `μ(Γ)` by adjugate and produces an equivalent three-variable system in
//! `(γ11, γ12, γ22)`; this is the default solving formulation.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SuffStats;
use crate::poly::Poly;
use crate::scalar::Real;

/// Full-system variable order.
pub const FULL_VARS: [&str; 5] = ["mu1", "mu2", "g11", "g12", "g22"];
/// Reduced-system variable order.
pub const REDUCED_VARS: [&str; 3] = ["g11", "g12", "g22"];

/// Rational back-substitution `μ_i(Γ) = num_i / den` attached to the reduced
/// system; `den` is the determinant of the 2×2 linear system for the means,
/// with the shared `det Γ` factor already cancelled.
#[derive(Debug, Clone)]
pub struct BackSubstitution<T> {
    pub num_mu1: Poly<T>,
    pub num_mu2: Poly<T>,
    pub den: Poly<T>,
}

impl<T: Real> BackSubstitution<T> {
    /// Recover the mean coordinates at a concentration point; `None` when the
    /// denominator vanishes to working precision.
    pub fn mu_at(&self, gamma: &[Complex<T>]) -> Option<(Complex<T>, Complex<T>)> {
        let den = self.den.eval_complex(gamma);
        let scale = self.den.max_abs_coeff();
        if den.norm() <= T::of(1e-14) * scale {
            return None;
        }
        Some((
            self.num_mu1.eval_complex(gamma) / den,
            self.num_mu2.eval_complex(gamma) / den,
        ))
    }
}

/// A cleared polynomial critical system together with its provenance: the
/// generating statistics, the per-equation cleared factor, and the saturation
/// polynomial whose zero locus carries the spurious solutions.
#[derive(Debug, Clone)]
pub struct PolySystem<T> {
    pub stats: SuffStats<T>,
    pub vars: Vec<&'static str>,
    pub polys: Vec<Poly<T>>,
    /// Cleared factor per original score equation, as a polynomial in Γ
    /// (variables of the *reduced* space embed into the full space).
    pub multipliers: Vec<Poly<T>>,
    pub saturant: Poly<T>,
    pub back: Option<BackSubstitution<T>>,
}

impl<T: Real> PolySystem<T> {
    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_reduced(&self) -> bool {
        self.back.is_some()
    }

    /// Total degree of each equation.
    pub fn degrees(&self) -> Vec<usize> {
        self.polys.iter().map(|p| p.degree()).collect()
    }

    /// Product of the equation degrees: the number of start paths a
    /// total-degree homotopy tracks.
    pub fn bezout_number(&self) -> usize {
        self.degrees().iter().product()
    }

    pub fn eval(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        self.polys.iter().map(|p| p.eval_complex(x)).collect()
    }

    /// Lift a point of this system to full `(μ1, μ2, γ11, γ12, γ22)`
    /// coordinates, back-substituting the means when reduced.
    pub fn lift(&self, x: &[Complex<T>]) -> Option<[Complex<T>; 5]> {
        if let Some(back) = &self.back {
            let (mu1, mu2) = back.mu_at(x)?;
            Some([mu1, mu2, x[0], x[1], x[2]])
        } else {
            Some([x[0], x[1], x[2], x[3], x[4]])
        }
    }
}

impl<T: Real + Serialize> Serialize for PolySystem<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("PolySystem", 4)?;
        st.serialize_field("vars", &self.vars)?;
        let polys: Vec<Vec<serde_json::Value>> =
            self.polys.iter().map(|p| p.to_json_terms()).collect();
        st.serialize_field("polys", &polys)?;
        st.serialize_field("saturant", &self.saturant.to_json_terms())?;
        st.serialize_field("degrees", &self.degrees())?;
        st.end()
    }
}

struct FullAtoms<T> {
    mu1: Poly<T>,
    mu2: Poly<T>,
    g11: Poly<T>,
    g12: Poly<T>,
    g22: Poly<T>,
}

fn full_atoms<T: Real>() -> FullAtoms<T> {
    FullAtoms {
        mu1: Poly::var(5, 0),
        mu2: Poly::var(5, 1),
        g11: Poly::var(5, 2),
        g12: Poly::var(5, 3),
        g22: Poly::var(5, 4),
    }
}

/// Clear denominators in the five score equations.
///
/// Cleared factors: `γ22` for ∂μ1, `γ11` for ∂μ2, `2·detΓ·γ11²` for ∂γ11,
/// `2·detΓ·γ22²` for ∂γ22, and `detΓ·γ11·γ22` for ∂γ12.
pub fn build_full<T: Real>(stats: &SuffStats<T>) -> PolySystem<T> {
    let v = full_atoms::<T>();
    let c = |x: T| Poly::constant(5, x);
    let two = T::of(2.0);
    let (n, r, s) = (stats.n, stats.r, stats.s);
    let total = stats.total();

    let det = &(&v.g11 * &v.g22) - &(&v.g12 * &v.g12);

    // Centered quadratic moments as polynomials in μ.
    let q11 = &(&c(stats.my11) - &v.mu1.scale(two * stats.my1)) + &(&v.mu1 * &v.mu1);
    let q22 = &(&c(stats.my22) - &v.mu2.scale(two * stats.my2)) + &(&v.mu2 * &v.mu2);
    let q12 = &(&(&c(stats.my12) - &v.mu2.scale(stats.my1)) - &v.mu1.scale(stats.my2))
        + &(&v.mu1 * &v.mu2);
    let qz = &(&c(stats.mz2) - &v.mu1.scale(two * stats.mz1)) + &(&v.mu1 * &v.mu1);
    let qw = &(&c(stats.mw2) - &v.mu2.scale(two * stats.mw1)) + &(&v.mu2 * &v.mu2);

    // γ22·∂ℓ/∂μ1 and γ11·∂ℓ/∂μ2.
    let eq1 = &(&v.g22 * &(&(&(&c(stats.my1) - &v.mu1) * &v.g11)
        + &(&(&c(stats.my2) - &v.mu2) * &v.g12)))
        .scale(n)
        + &(&det * &(&c(stats.mz1) - &v.mu1)).scale(r);
    let eq2 = &(&v.g11 * &(&(&(&c(stats.my2) - &v.mu2) * &v.g22)
        + &(&(&c(stats.my1) - &v.mu1) * &v.g12)))
        .scale(n)
        + &(&det * &(&c(stats.mw1) - &v.mu2)).scale(s);

    // 2·detΓ·γ11²·∂ℓ/∂γ11.
    let g11sq = &v.g11 * &v.g11;
    let g22sq = &v.g22 * &v.g22;
    let g12sq = &v.g12 * &v.g12;
    let eq3 = &(&(&(&v.g22 * &g11sq).scale(total) - &(&det * &v.g11).scale(s))
        - &(&(&det * &g11sq) * &(&q11.scale(n) + &qz.scale(r))))
        - &(&(&g12sq * &det) * &qw).scale(s);
    let eq4 = &(&(&(&v.g11 * &g22sq).scale(total) - &(&det * &v.g22).scale(r))
        - &(&(&det * &g22sq) * &(&q22.scale(n) + &qw.scale(s))))
        - &(&(&g12sq * &det) * &qz).scale(r);

    // detΓ·γ11·γ22·∂ℓ/∂γ12.
    let g11g22 = &v.g11 * &v.g22;
    let eq5 = &(&(&(&v.g12 * &g11g22).scale(-total) - &(&(&det * &g11g22) * &q12).scale(n))
        + &(&(&(&v.g12 * &v.g11) * &det) * &qz).scale(r))
        + &(&(&(&v.g12 * &v.g22) * &det) * &qw).scale(s);

    let multipliers = vec![
        v.g22.clone(),
        v.g11.clone(),
        (&det * &g11sq).scale(two),
        &det * &g11g22,
        (&det * &g22sq).scale(two),
    ];
    let saturant = &g11g22 * &det;

    // Equations follow the coordinate order (μ1, μ2, γ11, γ12, γ22).
    PolySystem {
        stats: *stats,
        vars: FULL_VARS.to_vec(),
        polys: vec![eq1, eq2, eq3, eq5, eq4],
        multipliers,
        saturant,
        back: None,
    }
}

/// Eliminate the means using the linearity of the first two score equations.
///
/// Solving the 2×2 linear system by adjugate gives `μ_i = num_i / den` with a
/// common `det Γ` factor cancelled, leaving `den` of degree two. The three
/// Γ-equations are then cleared by `den²`, and `den` joins the saturant.
pub fn eliminate_mu<T: Real>(system: &PolySystem<T>) -> Result<PolySystem<T>> {
    if system.is_reduced() {
        return Err(Error::invalid("system is already μ-eliminated"));
    }
    let stats = &system.stats;
    let (n, r, s) = (stats.n, stats.r, stats.s);
    if !(n > T::zero() || (r > T::zero() && s > T::zero())) {
        return Err(Error::degenerate(
            "means are not identifiable: need complete cases or both marginal blocks",
        ));
    }
    let total = stats.total();
    let two = T::of(2.0);

    let g11 = Poly::<T>::var(3, 0);
    let g12 = Poly::<T>::var(3, 1);
    let g22 = Poly::<T>::var(3, 2);
    let det = &(&g11 * &g22) - &(&g12 * &g12);
    let g11g22 = &g11 * &g22;

    // den = n(n+r+s)·γ11γ22 + rs·detΓ; num_i as derived from the adjugate
    // solve with the common detΓ factor cancelled.
    let den = &g11g22.scale(n * total) + &det.scale(r * s);
    let num1 = &(&(&g11g22.scale(n * (n + s) * stats.my1) + &g11g22.scale(n * r * stats.mz1))
        + &(&g12 * &g22).scale(n * s * (stats.my2 - stats.mw1)))
        + &det.scale(r * s * stats.mz1);
    let num2 = &(&(&g11g22.scale(n * (n + r) * stats.my2) + &g11g22.scale(n * s * stats.mw1))
        + &(&g11 * &g12).scale(n * r * (stats.my1 - stats.mz1)))
        + &det.scale(r * s * stats.mw1);

    let den2 = &den * &den;
    let num1_den = &num1 * &den;
    let num2_den = &num2 * &den;
    let num1_sq = &num1 * &num1;
    let num2_sq = &num2 * &num2;

    // den²·Q(μ(Γ)) for each centered quadratic moment.
    let q11 = &(&den2.scale(stats.my11) - &num1_den.scale(two * stats.my1)) + &num1_sq;
    let q22 = &(&den2.scale(stats.my22) - &num2_den.scale(two * stats.my2)) + &num2_sq;
    let q12 = &(&(&den2.scale(stats.my12) - &num2_den.scale(stats.my1))
        - &num1_den.scale(stats.my2))
        + &(&num1 * &num2);
    let qz = &(&den2.scale(stats.mz2) - &num1_den.scale(two * stats.mz1)) + &num1_sq;
    let qw = &(&den2.scale(stats.mw2) - &num2_den.scale(two * stats.mw1)) + &num2_sq;

    let g11sq = &g11 * &g11;
    let g22sq = &g22 * &g22;
    let g12sq = &g12 * &g12;

    let red3 = &(&(&(&(&g22 * &g11sq) * &den2).scale(total) - &(&(&det * &g11) * &den2).scale(s))
        - &(&(&det * &g11sq) * &(&q11.scale(n) + &qz.scale(r))))
        - &(&(&g12sq * &det) * &qw).scale(s);
    let red4 = &(&(&(&(&g11 * &g22sq) * &den2).scale(total) - &(&(&det * &g22) * &den2).scale(r))
        - &(&(&det * &g22sq) * &(&q22.scale(n) + &qw.scale(s))))
        - &(&(&g12sq * &det) * &qz).scale(r);
    let red5 = &(&(&(&(&g12 * &g11g22) * &den2).scale(-total)
        - &(&(&det * &g11g22) * &q12).scale(n))
        + &(&(&(&g12 * &g11) * &det) * &qz).scale(r))
        + &(&(&(&g12 * &g22) * &det) * &qw).scale(s);

    let saturant = &(&g11g22 * &det) * &den;

    // Multipliers of the underlying γ-equations, now on the reduced space,
    // in the order (∂γ11, ∂γ12, ∂γ22) matching the equations.
    let multipliers = vec![
        (&det * &g11sq).scale(two),
        &det * &g11g22,
        (&det * &g22sq).scale(two),
    ];

    Ok(PolySystem {
        stats: *stats,
        vars: REDUCED_VARS.to_vec(),
        polys: vec![red3, red5, red4],
        multipliers,
        saturant,
        back: Some(BackSubstitution { num_mu1: num1, num_mu2: num2, den }),
    })
}

/// Convenience: the default solving formulation for a statistics vector.
pub fn build_reduced<T: Real>(stats: &SuffStats<T>) -> Result<PolySystem<T>> {
    eliminate_mu(&build_full(stats))
}
