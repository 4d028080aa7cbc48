//! Landau Hamiltonian fundamentals: levels, the ladder algebra acting on
//! polynomial-times-Gaussian functions, and the level projection kernel for
//! d = 1.
//!
//! Conventions. Complex coordinates z_j = x_{2j-1} + i x_{2j}, magnetic
//! potential A0 = (1/2)(-x_2, x_1, ..., -x_{2d}, x_{2d-1}), scalar potential
//! Psi = b|z|^2/4, and
//!
//! ```text
//!   Q_j    = -2i e^{-Psi} d/d conj(z_j) e^{Psi}      (annihilation)
//!   Qbar_j = -2i e^{Psi}  d/d z_j       e^{-Psi}     (creation)
//! ```
//!
//! so that [Q_j, Qbar_k] = 2b delta_jk, L = sum_j Qbar_j Q_j + b d, and the
//! lowest level is spanned by holomorphic polynomials times e^{-Psi}. (The
//! conjugation factors are the swap of the commonly printed pair; the printed
//! assignment annihilates nothing and gives [Q, Qbar] = -2b, which the
//! algebra tests here would reject.)

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::{Error, Result};

/// Constant magnetic field of intensity `b` on R^{2d}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MagneticSetup {
    pub b: f64,
    pub d: u32,
}

impl MagneticSetup {
    pub fn new(b: f64, d: u32) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::InvalidArgument("field intensity b must be positive".into()));
        }
        if d < 1 {
            return Err(Error::InvalidArgument("dimension parameter d must be >= 1".into()));
        }
        Ok(MagneticSetup { b, d })
    }

    /// Symmetric-gauge potential at a point of R^{2d}.
    pub fn potential(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), 2 * self.d as usize);
        let mut a = vec![0.0; x.len()];
        for j in 0..self.d as usize {
            a[2 * j] = -0.5 * x[2 * j + 1];
            a[2 * j + 1] = 0.5 * x[2 * j];
        }
        a
    }
}

/// Index of a Landau level (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LandauIndex(pub u32);

impl LandauIndex {
    pub fn new(q: u32) -> Result<Self> {
        if q < 1 {
            return Err(Error::InvalidArgument("level index q must be >= 1".into()));
        }
        Ok(LandauIndex(q))
    }
}

/// Lambda_q = (2(q-1) + d) b.
pub fn landau_level(setup: &MagneticSetup, q: LandauIndex) -> f64 {
    (2.0 * (q.0 as f64 - 1.0) + setup.d as f64) * setup.b
}

/// Monomial exponents of z^alpha conj(z)^beta in d complex variables.
type Monomial = (Vec<u32>, Vec<u32>);

/// A polynomial p(z, conj z) with the implicit factor e^{-b|z|^2/4}. Closed
/// under the ladder operators, which makes the commutation relations exactly
/// checkable on the coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialGaussian {
    pub d: u32,
    terms: BTreeMap<Monomial, Complex64>,
}

impl PolynomialGaussian {
    pub fn zero(d: u32) -> Self {
        PolynomialGaussian {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(d: u32, c: Complex64) -> Self {
        let mut p = Self::zero(d);
        if c != Complex64::new(0.0, 0.0) {
            p.terms.insert((vec![0; d as usize], vec![0; d as usize]), c);
        }
        p
    }

    pub fn monomial(d: u32, alpha: Vec<u32>, beta: Vec<u32>, c: Complex64) -> Result<Self> {
        if alpha.len() != d as usize || beta.len() != d as usize {
            return Err(Error::InvalidArgument("exponent length must equal d".into()));
        }
        let mut p = Self::zero(d);
        p.add_term((alpha, beta), c);
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(m).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| **v == Complex64::new(0.0, 0.0))
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero(self.d);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), c * v);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, v) in &other.terms {
            out.add_term(m.clone(), *v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Holomorphic iff no conj(z) factors appear.
    pub fn is_holomorphic(&self) -> bool {
        self.terms.keys().all(|(_, beta)| beta.iter().all(|&b| b == 0))
    }

    /// Value of the full function p(z, conj z) e^{-b|z|^2/4}.
    pub fn eval(&self, setup: &MagneticSetup, z: &[Complex64]) -> Complex64 {
        assert_eq!(z.len(), self.d as usize);
        let norm2: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        let gauss = (-setup.b * norm2 / 4.0).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for ((alpha, beta), c) in &self.terms {
            let mut t = *c;
            for j in 0..self.d as usize {
                t *= z[j].powu(alpha[j]) * z[j].conj().powu(beta[j]);
            }
            acc += t;
        }
        acc * gauss
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis < 1 || axis > self.d as usize {
            return Err(Error::AxisOutOfRange {
                index: axis,
                dim: self.d as usize,
            });
        }
        Ok(())
    }
}

/// Q_j on the polynomial part: p -> -2i d p / d conj(z_j). Axis is 1-based.
pub fn apply_annihilation(
    _setup: &MagneticSetup,
    axis: usize,
    f: &PolynomialGaussian,
) -> Result<PolynomialGaussian> {
    f.check_axis(axis)?;
    let j = axis - 1;
    let mut out = PolynomialGaussian::zero(f.d);
    let m2i = Complex64::new(0.0, -2.0);
    for ((alpha, beta), c) in &f.terms {
        if beta[j] == 0 {
            continue;
        }
        let mut nb = beta.clone();
        nb[j] -= 1;
        out.add_term((alpha.clone(), nb), m2i * c * beta[j] as f64);
    }
    Ok(out)
}

/// Qbar_j on the polynomial part: p -> -2i (d p / d z_j - (b/2) conj(z_j) p).
pub fn apply_creation(
    setup: &MagneticSetup,
    axis: usize,
    f: &PolynomialGaussian,
) -> Result<PolynomialGaussian> {
    f.check_axis(axis)?;
    let j = axis - 1;
    let mut out = PolynomialGaussian::zero(f.d);
    let m2i = Complex64::new(0.0, -2.0);
    for ((alpha, beta), c) in &f.terms {
        if alpha[j] > 0 {
            let mut na = alpha.clone();
            na[j] -= 1;
            out.add_term((na, beta.clone()), m2i * c * alpha[j] as f64);
        }
        let mut nb = beta.clone();
        nb[j] += 1;
        out.add_term((alpha.clone(), nb), m2i * c * (-setup.b / 2.0));
    }
    Ok(out)
}

/// L conjugated by the Gaussian, applied to the polynomial part directly:
/// p -> sum_j (-4 d^2 p / dz_j d conj(z_j) + 2 b conj(z_j) dp/d conj(z_j)) + b d p.
/// Independent of the ladder composition; the identity
/// L = sum Qbar_j Q_j + b d is a test, not the definition.
pub fn apply_hamiltonian(setup: &MagneticSetup, f: &PolynomialGaussian) -> PolynomialGaussian {
    let mut out = f.scale(Complex64::new(setup.b * setup.d as f64, 0.0));
    for j in 0..setup.d as usize {
        for ((alpha, beta), c) in &f.terms {
            if alpha[j] > 0 && beta[j] > 0 {
                let mut na = alpha.clone();
                let mut nb = beta.clone();
                na[j] -= 1;
                nb[j] -= 1;
                out.add_term((na, nb), -4.0 * c * (alpha[j] as f64) * (beta[j] as f64));
            }
            if beta[j] > 0 {
                out.add_term(
                    (alpha.clone(), beta.clone()),
                    2.0 * setup.b * c * beta[j] as f64,
                );
            }
        }
    }
    out
}

/// Projection kernel K_q(z, w) of the level-q eigenprojection for d = 1:
///
/// ```text
///   K_q(z, w) = (b/2pi) L_{q-1}(b|z-w|^2/2) e^{-b|z-w|^2/4} e^{-i b (x^y)/2}
/// ```
///
/// The formula is not taken on faith: tests pin the constant diagonal b/2pi,
/// Hermitian symmetry, numerical idempotence and the eigenvalue relation.
pub fn projection_kernel(
    setup: &MagneticSetup,
    q: LandauIndex,
    z: Complex64,
    w: Complex64,
) -> Result<Complex64> {
    if setup.d != 1 {
        return Err(Error::InvalidArgument(
            "projection kernel in closed form requires d = 1".into(),
        ));
    }
    let b = setup.b;
    let u = b * (z - w).norm_sqr() / 2.0;
    let lag = laguerre(q.0 - 1, u);
    let gauss = (-u / 2.0).exp();
    let wedge = (z.conj() * w).im; // x ^ y = x1 y2 - x2 y1 = Im(conj z * w) ... sign checked below
    // Im(conj(z) w) = x1 y2 - x2 y1
    let phase = Complex64::from_polar(1.0, -0.5 * b * wedge);
    Ok(b / (2.0 * std::f64::consts::PI) * lag * gauss * phase)
}

fn laguerre(n: u32, x: f64) -> f64 {
    let mut p0 = 1.0;
    if n == 0 {
        return p0;
    }
    let mut p1 = 1.0 - x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0 - x) * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    p1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::GaussLegendre;

    const PI: f64 = std::f64::consts::PI;

    fn setup(b: f64, d: u32) -> MagneticSetup {
        MagneticSetup::new(b, d).unwrap()
    }

    #[test]
    fn landau_level_values() {
        assert_eq!(landau_level(&setup(1.0, 1), LandauIndex(1)), 1.0);
        assert_eq!(landau_level(&setup(3.0, 2), LandauIndex(2)), 12.0);
        for q0 in 2..8 {
            let gap = landau_level(&setup(1.0, 1), LandauIndex(q0))
                - landau_level(&setup(1.0, 1), LandauIndex(q0 - 1));
            assert_eq!(gap, 2.0);
        }
        // strictly increasing in q, affine in b with slope 2(q-1)+d
        for d in [1u32, 2, 3] {
            for q in 1..5u32 {
                let s1 = landau_level(&setup(1.0, d), LandauIndex(q));
                let s2 = landau_level(&setup(2.0, d), LandauIndex(q));
                assert_eq!(s2 - s1, 2.0 * (q as f64 - 1.0) + d as f64);
                assert!(landau_level(&setup(1.0, d), LandauIndex(q + 1)) > s1);
            }
        }
    }

    #[test]
    fn vacuum_is_annihilated() {
        let st = setup(1.0, 2);
        let p = PolynomialGaussian::constant(2, Complex64::new(1.0, 0.0));
        for j in 1..=2 {
            assert!(apply_annihilation(&st, j, &p).unwrap().is_zero());
        }
    }

    #[test]
    fn axis_out_of_range_rejected() {
        let st = setup(1.0, 1);
        let p = PolynomialGaussian::constant(1, Complex64::new(1.0, 0.0));
        assert!(matches!(
            apply_annihilation(&st, 2, &p),
            Err(Error::AxisOutOfRange { .. })
        ));
        assert!(apply_creation(&st, 0, &p).is_err());
    }

    #[test]
    fn commutator_is_2b_delta() {
        let st = setup(3.0, 2);
        let p = PolynomialGaussian::monomial(
            2,
            vec![2, 1],
            vec![1, 0],
            Complex64::new(1.0, -2.0),
        )
        .unwrap();
        for j in 1..=2usize {
            for k in 1..=2usize {
                let qk = apply_creation(&st, k, &p).unwrap();
                let qjk = apply_annihilation(&st, j, &qk).unwrap();
                let qj = apply_annihilation(&st, j, &p).unwrap();
                let qkj = apply_creation(&st, k, &qj).unwrap();
                let comm = qjk.sub(&qkj);
                let expect = if j == k {
                    p.scale(Complex64::new(2.0 * st.b, 0.0))
                } else {
                    PolynomialGaussian::zero(2)
                };
                assert_eq!(comm, expect, "j={j} k={k}");
            }
        }
    }

    #[test]
    fn hamiltonian_on_vacuum_and_holomorphic() {
        // (sum Qbar Q + bd) p = Lambda_1 p for holomorphic p
        for d in [1u32, 2] {
            let st = setup(1.0, d);
            let p = PolynomialGaussian::monomial(
                d,
                {
                    let mut a = vec![0; d as usize];
                    a[0] = 3;
                    a
                },
                vec![0; d as usize],
                Complex64::new(0.5, 1.0),
            )
            .unwrap();
            let hp = apply_hamiltonian(&st, &p);
            let want = p.scale(Complex64::new(landau_level(&st, LandauIndex(1)), 0.0));
            assert_eq!(hp, want);
        }
        // and the vacuum at b=1, d=1 has energy 1
        let st = setup(1.0, 1);
        let one = PolynomialGaussian::constant(1, Complex64::new(1.0, 0.0));
        assert_eq!(apply_hamiltonian(&st, &one), one.scale(Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn hamiltonian_equals_ladder_composition() {
        let st = setup(2.0, 2);
        let p = PolynomialGaussian::monomial(2, vec![1, 2], vec![2, 0], Complex64::new(1.0, 0.25))
            .unwrap();
        let mut viaq = p.scale(Complex64::new(st.b * st.d as f64, 0.0));
        for j in 1..=2 {
            let qp = apply_annihilation(&st, j, &p).unwrap();
            let qqp = apply_creation(&st, j, &qp).unwrap();
            viaq = viaq.add(&qqp);
        }
        assert_eq!(viaq, apply_hamiltonian(&st, &p));
    }

    #[test]
    fn creation_raises_level_exactly() {
        // Qbar applied to a level-q sample is a level-(q+1) eigenfunction
        let st = setup(1.5, 1);
        let p = PolynomialGaussian::monomial(1, vec![2], vec![0], Complex64::new(1.0, 0.0)).unwrap();
        let up = apply_creation(&st, 1, &p).unwrap();
        let h_up = apply_hamiltonian(&st, &up);
        let want = up.scale(Complex64::new(landau_level(&st, LandauIndex(2)), 0.0));
        assert_eq!(h_up, want);
    }

    #[test]
    fn projection_kernel_diagonal_and_symmetry() {
        let st = setup(2.5, 1);
        for q in 1..=3 {
            for z in [Complex64::new(0.0, 0.0), Complex64::new(1.2, -0.7)] {
                let k = projection_kernel(&st, LandauIndex(q), z, z).unwrap();
                assert!((k - st.b / (2.0 * PI)).norm() < 1e-14, "q={q}");
            }
        }
        let z = Complex64::new(0.3, 0.4);
        let w = Complex64::new(-0.6, 0.1);
        let kzw = projection_kernel(&st, LandauIndex(2), z, w).unwrap();
        let kwz = projection_kernel(&st, LandauIndex(2), w, z).unwrap();
        assert!((kzw - kwz.conj()).norm() < 1e-15);
        assert!(projection_kernel(&setup(1.0, 2), LandauIndex(1), z, w).is_err());
    }

    #[test]
    fn projection_kernel_idempotence_by_quadrature() {
        // int K_q(z,u) K_q(u,w) du = K_q(z,w) over a large disk
        let st = setup(1.0, 1);
        let z = Complex64::new(0.4, 0.0);
        let w = Complex64::new(-0.3, 0.5);
        for q in [1u32, 2] {
            let kq = |a: Complex64, b: Complex64| projection_kernel(&st, LandauIndex(q), a, b).unwrap();
            let rule = GaussLegendre::new(&0.0_f64, 80);
            let r_max = 9.0;
            let n_ang = 160;
            let mut acc = Complex64::new(0.0, 0.0);
            // polar quadrature: angular trapezoid x radial Gauss-Legendre
            for ia in 0..n_ang {
                let th = 2.0 * PI * ia as f64 / n_ang as f64;
                let dir = Complex64::from_polar(1.0, th);
                let mut radial = Complex64::new(0.0, 0.0);
                let half = r_max / 2.0;
                for (x, wt) in rule.nodes.iter().zip(rule.weights.iter()) {
                    let r = half * (x + 1.0);
                    let u = r * dir;
                    radial += wt * kq(z, u) * kq(u, w) * r * half;
                }
                acc += radial * (2.0 * PI / n_ang as f64);
            }
            let direct = kq(z, w);
            assert!(
                (acc - direct).norm() < 1e-8,
                "q={q}: {acc} vs {direct}"
            );
        }
    }

    #[test]
    fn projection_kernel_eigenrelation_finite_differences() {
        // centered second-order stencil of L applied to u = K_q(., w)
        let st = setup(1.0, 1);
        let w = Complex64::new(0.2, -0.1);
        for q in [1u32, 2, 3] {
            let lam = landau_level(&st, LandauIndex(q));
            let f = |p: [f64; 2]| {
                projection_kernel(&st, LandauIndex(q), Complex64::new(p[0], p[1]), w).unwrap()
            };
            let x = [0.7, 0.4];
            let h = 1e-4;
            let b = st.b;
            let mut lap = Complex64::new(0.0, 0.0);
            let center = f(x);
            for k in 0..2 {
                let mut xp = x;
                xp[k] += h;
                let mut xm = x;
                xm[k] -= h;
                let a0k = if k == 0 { -0.5 * x[1] } else { 0.5 * x[0] };
                let d2 = (f(xp) - 2.0 * center + f(xm)) / (h * h);
                let d1 = (f(xp) - f(xm)) / (2.0 * h);
                // -(d_k - i b A0_k)^2 = -d2 + 2 i b A0_k d1 + b^2 A0_k^2
                lap += -d2
                    + Complex64::new(0.0, 2.0 * b * a0k) * d1
                    + b * b * a0k * a0k * center;
            }
            let resid = (lap - lam * center).norm();
            assert!(resid < 5e-6, "q={q}: residual {resid}");
        }
    }
}
