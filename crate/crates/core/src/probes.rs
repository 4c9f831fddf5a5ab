//! Complex exponential probes `e^{i ζ·x}` with `ζ·ζ = k²`.
//!
//! Every constructor works in the frame `e₁ = ξ/|ξ|`, `e₂ = e₁` rotated by
//! +90°. When a discriminant is negative the principal square root puts a
//! positive imaginary part on the `e₂` component and the set is flagged
//! [`Regime::Evanescent`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative rounding slack on the propagating/evanescent discriminants.
const DISC_SLACK: f64 = 1e-12;

/// A vector in `ℂ²`, paired with the unconjugated bilinear product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexVector2(pub [Complex64; 2]);

impl ComplexVector2 {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self([a, b])
    }

    pub fn real(x: [f64; 2]) -> Self {
        Self([Complex64::new(x[0], 0.0), Complex64::new(x[1], 0.0)])
    }

    pub fn zero() -> Self {
        Self::real([0.0, 0.0])
    }

    /// `ζ¹ζ¹ + ζ²ζ²` (no conjugation).
    pub fn self_product(&self) -> Complex64 {
        self.0[0] * self.0[0] + self.0[1] * self.0[1]
    }

    /// `ζ·x` for a real point.
    pub fn dot_real(&self, x: [f64; 2]) -> Complex64 {
        self.0[0] * x[0] + self.0[1] * x[1]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self([self.0[0] * s, self.0[1] * s])
    }

    pub fn max_imag(&self) -> f64 {
        self.0[0].im.abs().max(self.0[1].im.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl std::ops::Add for ComplexVector2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1]])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Propagating,
    Evanescent,
}

/// What a probe is used for in a boundary identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeRole {
    /// Dirichlet datum of a forward solve.
    Data,
    /// Test function paired with the measured trace.
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub zeta: ComplexVector2,
    pub role: ProbeRole,
    /// How many times the vector enters the product `Π e^{iζ·x}`.
    pub multiplicity: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    Quadratic,
    Even,
    Odd,
    Mu,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSet {
    pub kind: ProbeKind,
    pub k: f64,
    pub xi: [f64; 2],
    pub probes: Vec<Probe>,
    pub regime: Regime,
}

impl ProbeSet {
    /// `Σ multiplicity · ζ`, which equals `ξ` for every constructor.
    pub fn weighted_sum(&self) -> ComplexVector2 {
        self.probes.iter().fold(ComplexVector2::zero(), |acc, p| {
            acc + p.zeta.scale(p.multiplicity as f64)
        })
    }

    pub fn data(&self) -> impl Iterator<Item = &Probe> {
        self.probes.iter().filter(|p| p.role == ProbeRole::Data)
    }

    pub fn test(&self) -> &Probe {
        self.probes
            .iter()
            .find(|p| p.role == ProbeRole::Test)
            .expect("every probe set carries a test function")
    }

    pub fn is_propagating(&self) -> bool {
        self.regime == Regime::Propagating
    }
}

fn frame(xi: [f64; 2]) -> Result<(f64, [f64; 2], [f64; 2])> {
    let norm = xi[0].hypot(xi[1]);
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::invalid("probe frequency xi must be finite and nonzero"));
    }
    let e1 = [xi[0] / norm, xi[1] / norm];
    Ok((norm, e1, [-e1[1], e1[0]]))
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::invalid(format!("wavenumber must be positive, got {k}")));
    }
    Ok(())
}

/// `a·e₁ + b·e₂` with real `a` and complex `b`.
fn combine(a: f64, e1: [f64; 2], b: Complex64, e2: [f64; 2]) -> ComplexVector2 {
    ComplexVector2([
        Complex64::new(a * e1[0], 0.0) + b * e2[0],
        Complex64::new(a * e1[1], 0.0) + b * e2[1],
    ])
}

fn principal_sqrt(d: f64) -> Complex64 {
    if d >= 0.0 {
        Complex64::new(d.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-d).sqrt())
    }
}

/// Zeroes a discriminant that is negative only through rounding of `|ξ|`,
/// so nodes placed exactly on a cutoff stay propagating.
fn snap(discriminant: f64, scale: f64) -> f64 {
    if discriminant < 0.0 && discriminant > -DISC_SLACK * scale {
        0.0
    } else {
        discriminant
    }
}

fn regime_of(discriminant: f64) -> Regime {
    if discriminant >= 0.0 {
        Regime::Propagating
    } else {
        Regime::Evanescent
    }
}

fn probe(zeta: ComplexVector2, role: ProbeRole, multiplicity: u32) -> Probe {
    Probe {
        zeta,
        role,
        multiplicity,
    }
}

/// Triple `(ζ₁, ζ₂, ζ₃)` with `ζ₁ + ζ₂ + ζ₃ = ξ`; `ζ₁`, `ζ₂` are data and
/// `ζ₃ = k e₁` is the test function. Propagating iff `|ξ| ≤ 3k`.
pub fn quadratic_probe(k: f64, xi: [f64; 2]) -> Result<ProbeSet> {
    check_k(k)?;
    let (r, e1, e2) = frame(xi)?;
    // (3k - r)(k + r), written factored so the degenerate |ξ| = 3k is exact
    let disc = snap((3.0 * k - r) * (k + r), (k + r).powi(2));
    let root = principal_sqrt(disc) * 0.5;
    let a = 0.5 * (r - k);
    let z1 = combine(a, e1, -root, e2);
    let z2 = combine(a, e1, root, e2);
    let z3 = combine(k, e1, Complex64::new(0.0, 0.0), e2);
    Ok(ProbeSet {
        kind: ProbeKind::Quadratic,
        k,
        xi,
        probes: vec![
            probe(z1, ProbeRole::Data, 1),
            probe(z2, ProbeRole::Data, 1),
            probe(z3, ProbeRole::Test, 1),
        ],
        regime: regime_of(disc),
    })
}

/// `m + 1` vectors for even `m`: the pair `ζ₁, ζ₂` alternating `m/2` times,
/// then `ζ_{m+1} = k e₁` as test function. Propagating iff `|ξ| ≤ (m+1)k`.
pub fn even_probe(k: f64, xi: [f64; 2], m: u32) -> Result<ProbeSet> {
    check_k(k)?;
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::invalid(format!("even_probe needs an even m >= 2, got {m}")));
    }
    let (r, e1, e2) = frame(xi)?;
    let mf = m as f64;
    // (m²-1)k² + 2kr - r² = ((m+1)k - r)((m-1)k + r)
    let disc = snap(
        ((mf + 1.0) * k - r) * ((mf - 1.0) * k + r),
        ((mf + 1.0) * k + r).powi(2),
    );
    let root = principal_sqrt(disc) / mf;
    let a = (r - k) / mf;
    let z1 = combine(a, e1, root, e2);
    let z2 = combine(a, e1, -root, e2);
    let mut probes = Vec::with_capacity(m as usize + 1);
    for j in 0..m {
        let z = if j % 2 == 0 { z1 } else { z2 };
        probes.push(probe(z, ProbeRole::Data, 1));
    }
    probes.push(probe(combine(k, e1, Complex64::new(0.0, 0.0), e2), ProbeRole::Test, 1));
    Ok(ProbeSet {
        kind: ProbeKind::Even,
        k,
        xi,
        probes,
        regime: regime_of(disc),
    })
}

/// `m + 1` vectors for odd `m`: `ζ₁, ζ₂` alternating, each `(m+1)/2` times.
/// The last vector (a copy of `ζ₂`) is the test function.
pub fn odd_probe(k: f64, xi: [f64; 2], m: u32) -> Result<ProbeSet> {
    check_k(k)?;
    if m < 3 || m % 2 != 1 {
        return Err(Error::invalid(format!("odd_probe needs an odd m >= 3, got {m}")));
    }
    let (r, e1, e2) = frame(xi)?;
    let mp1 = m as f64 + 1.0;
    let disc = snap((mp1 * k - r) * (mp1 * k + r), (mp1 * k + r).powi(2));
    let root = principal_sqrt(disc) / mp1;
    let a = r / mp1;
    let z1 = combine(a, e1, root, e2);
    let z2 = combine(a, e1, -root, e2);
    let mut probes = Vec::with_capacity(m as usize + 1);
    for j in 0..=m {
        let z = if j % 2 == 0 { z1 } else { z2 };
        let role = if j == m { ProbeRole::Test } else { ProbeRole::Data };
        probes.push(probe(z, role, 1));
    }
    Ok(ProbeSet {
        kind: ProbeKind::Odd,
        k,
        xi,
        probes,
        regime: regime_of(disc),
    })
}

/// Dispatches to [`even_probe`] or [`odd_probe`].
pub fn frechet_probe(k: f64, xi: [f64; 2], m: u32) -> Result<ProbeSet> {
    if m.is_multiple_of(2) {
        even_probe(k, xi, m)
    } else {
        odd_probe(k, xi, m)
    }
}

/// The pair `(μ₁, μ₂)` with `m μ₁ + μ₂ = ξ`: `u₀ = e^{iμ₁·x}` is the datum
/// (entering as `u₀^m`) and `φ = e^{iμ₂·x}` the test function. Propagating
/// iff `(m-1)k ≤ |ξ| ≤ (m+1)k`.
pub fn mu_probe(k: f64, xi: [f64; 2], m: u32) -> Result<ProbeSet> {
    check_k(k)?;
    if m < 2 {
        return Err(Error::invalid(format!("mu_probe needs m >= 2, got {m}")));
    }
    let (r, e1, e2) = frame(xi)?;
    let mf = m as f64;
    let a2 = (mf * mf - 1.0) * k * k;
    // -(r+(m+1)k)(r+(m-1)k)(r-(m-1)k)(r-(m+1)k)
    let disc = snap(
        (r + (mf + 1.0) * k) * (r + (mf - 1.0) * k) * (r - (mf - 1.0) * k) * ((mf + 1.0) * k - r),
        (r + (mf + 1.0) * k).powi(4),
    );
    let root = principal_sqrt(disc);
    let mu1 = combine((a2 + r * r) / (2.0 * mf * r), e1, -root / (2.0 * mf * r), e2);
    let mu2 = combine((r * r - a2) / (2.0 * r), e1, root / (2.0 * r), e2);
    Ok(ProbeSet {
        kind: ProbeKind::Mu,
        k,
        xi,
        probes: vec![probe(mu1, ProbeRole::Data, m), probe(mu2, ProbeRole::Test, 1)],
        regime: regime_of(disc),
    })
}

/// `e^{i ζ·x}` at each point.
pub fn plane_wave(zeta: &ComplexVector2, points: &[[f64; 2]]) -> Vec<Complex64> {
    points
        .iter()
        .map(|&x| (Complex64::i() * zeta.dot_real(x)).exp())
        .collect()
}

/// A finite sum `Σ aⱼ e^{i ζⱼ·x}`; every Dirichlet datum in the experiments
/// has this form, so it can be evaluated anywhere on the raster.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlaneWaveSum {
    terms: Vec<(Complex64, ComplexVector2)>,
}

impl PlaneWaveSum {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn single(zeta: ComplexVector2) -> Self {
        Self {
            terms: vec![(Complex64::new(1.0, 0.0), zeta)],
        }
    }

    pub fn from_terms(terms: Vec<(Complex64, ComplexVector2)>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[(Complex64, ComplexVector2)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(a, _)| *a == Complex64::new(0.0, 0.0))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|(a, z)| (a * s, *z)).collect(),
        }
    }

    /// Concatenation of the two sums.
    pub fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self { terms }
    }

    pub fn eval(&self, x: [f64; 2]) -> Complex64 {
        self.terms
            .iter()
            .map(|(a, z)| a * (Complex64::i() * z.dot_real(x)).exp())
            .sum()
    }

    pub fn eval_points(&self, points: &[[f64; 2]]) -> Vec<Complex64> {
        points.iter().map(|&x| self.eval(x)).collect()
    }
}
