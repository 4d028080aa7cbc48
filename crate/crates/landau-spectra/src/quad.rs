//! Quadrature building blocks: tanh-sinh (double exponential) rules for
//! endpoint-singular and smooth integrands, Gauss-Legendre rules at any
//! working precision, and the spectral weights for the periodic logarithmic
//! kernel used by the Nystrom assemblies.

use crate::precision::Real;
use crate::{Error, Result};

/// Evaluation point handed to a tanh-sinh integrand. `from_lo` and `from_hi`
/// are the distances to the interval endpoints computed without cancellation,
/// so integrable endpoint singularities like (u-1)^{-1/2} can be evaluated
/// accurately.
pub struct DePoint<'a, T> {
    pub x: &'a T,
    pub from_lo: &'a T,
    pub from_hi: &'a T,
}

/// Tanh-sinh quadrature on [lo, hi].
///
/// Halves the step until two successive levels agree to `rel_tol` (relative
/// to the magnitude of the result). Handles integrable endpoint
/// singularities.
pub fn tanh_sinh<T: Real>(
    lo: &T,
    hi: &T,
    rel_tol: f64,
    mut f: impl FnMut(DePoint<'_, T>) -> T,
) -> Result<T> {
    let half = lo.lift(0.5);
    let mid = (lo.clone() + hi.clone()) * half.clone();
    let rad = (hi.clone() - lo.clone()) * half.clone();
    let pi_half = lo.lift(std::f64::consts::FRAC_PI_2);

    let bits = lo.precision_bits() as f64;
    // abscissa cutoff: contributions near an endpoint with an integrable
    // singularity x^{-alpha} scale like e^{-2u(1-alpha)}; budget for
    // alpha up to 1/2
    let u_need = (bits + 24.0) * std::f64::consts::LN_2;
    let t_max = (2.0 * u_need / std::f64::consts::PI).asinh();

    let eval = |f: &mut dyn FnMut(DePoint<'_, T>) -> T, t: f64| -> T {
        // w = tanh(pi/2 sinh t); 1 - |w| computed stably via exponentials
        let t_big = lo.lift(t);
        let et = t_big.clone().exp();
        let emt = (-t_big).exp();
        let u = pi_half.clone() * (et.clone() - emt.clone()) * half.clone();
        let (ua, sgn) = if u >= lo.lift(0.0) {
            (u.clone(), 1.0)
        } else {
            (-u.clone(), -1.0)
        };
        let em = (-(ua.clone() + ua.clone())).exp(); // e^{-2|u|}
        let one = lo.lift(1.0);
        let denom = one.clone() + em.clone();
        // 1 - |w| = 2 e^{-2|u|} / (1 + e^{-2|u|})
        let one_minus = (lo.lift(2.0) * em.clone()) / denom.clone();
        let w_abs = one.clone() - one_minus.clone();
        // cosh(2u) etc. for the weight: sech^2(u) = 4 e^{-2|u|} / (1+e^{-2|u|})^2
        let sech2 = lo.lift(4.0) * em / (denom.clone() * denom);
        let cosh_t = (et + emt) * half.clone();
        let dw = pi_half.clone() * cosh_t * sech2; // dw/dt
        let (x, dlo, dhi) = if sgn > 0.0 {
            let x = mid.clone() + rad.clone() * w_abs.clone();
            let dhi = rad.clone() * one_minus.clone();
            let dlo = rad.clone() * (one.clone() + w_abs.clone());
            (x, dlo, dhi)
        } else {
            let x = mid.clone() - rad.clone() * w_abs.clone();
            let dlo = rad.clone() * one_minus.clone();
            let dhi = rad.clone() * (one.clone() + w_abs.clone());
            (x, dlo, dhi)
        };
        let fv = f(DePoint {
            x: &x,
            from_lo: &dlo,
            from_hi: &dhi,
        });
        fv * dw * rad.clone()
    };

    let mut h = 1.0_f64;
    let mut sum = eval(&mut f, 0.0);
    let mut k = 1usize;
    while (k as f64) * h <= t_max {
        let t = k as f64 * h;
        sum = sum + eval(&mut f, t) + eval(&mut f, -t);
        k += 1;
    }
    let mut total = sum * lo.lift(h);

    for _level in 0..14 {
        h *= 0.5;
        // new points at odd multiples of the refined step
        let mut add = lo.lift(0.0);
        let mut k = 1usize;
        while (k as f64) * h <= t_max {
            let t = k as f64 * h;
            add = add + eval(&mut f, t) + eval(&mut f, -t);
            k += 2;
        }
        let refined = total.clone() * lo.lift(0.5) + add * lo.lift(h);
        let diff = (refined.clone() - total.clone()).abs();
        let scale = refined.abs() + lo.lift(1e-300);
        total = refined;
        if diff < scale * lo.lift(rel_tol) {
            return Ok(total);
        }
    }
    // not converged to the requested tolerance
    Err(Error::QuadratureNonconvergence)
}

/// Gauss-Legendre rule on [-1, 1] at the working precision of `proto`.
/// Nodes are polished with Newton iterations starting from f64 seeds.
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

fn legendre_pair<T: Real>(n: usize, x: &T) -> (T, T) {
    // returns (P_n(x), P_n'(x))
    let one = x.lift(1.0);
    let mut p0 = one.clone();
    let mut p1 = x.clone();
    if n == 0 {
        return (p0, x.lift(0.0));
    }
    for k in 2..=n {
        let kf = x.lift(k as f64);
        let a = (x.lift(2.0 * k as f64 - 1.0) * x.clone() * p1.clone()
            - x.lift(k as f64 - 1.0) * p0.clone())
            / kf;
        p0 = p1;
        p1 = a;
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let num = x.lift(n as f64) * (x.clone() * p1.clone() - p0);
    let den = x.clone() * x.clone() - one;
    (p1, num / den)
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(proto: &T, n: usize) -> Self {
        assert!(n >= 2);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let newton_steps = if proto.precision_bits() > 60 {
            // quadratic convergence from ~1e-15 seeds
            2 + (proto.precision_bits() as f64 / 50.0).log2().ceil() as usize
        } else {
            3
        };
        for i in 0..n {
            // f64 seed (Tricomi initial guess + f64 Newton)
            let mut xf = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..20 {
                let (p, dp) = legendre_pair(n, &xf);
                let step = p / dp;
                xf -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            let mut x = proto.lift(xf);
            for _ in 0..newton_steps {
                let (p, dp) = legendre_pair(n, &x);
                x = x - p / dp;
            }
            let (_, dp) = legendre_pair(n, &x);
            let one = proto.lift(1.0);
            let w = proto.lift(2.0) / ((one.clone() - x.clone() * x.clone()) * dp.clone() * dp);
            nodes.push(x);
            weights.push(w);
        }
        nodes.reverse();
        weights.reverse();
        GaussLegendre { nodes, weights }
    }

    /// Integrate over consecutive panels given by `breaks`.
    pub fn integrate_panels(&self, breaks: &[T], mut f: impl FnMut(&T) -> T) -> T {
        let mut acc = breaks[0].lift(0.0);
        for w in breaks.windows(2) {
            acc = acc + self.integrate(&w[0], &w[1], &mut f);
        }
        acc
    }

    /// Integrate `f` over [lo, hi].
    pub fn integrate(&self, lo: &T, hi: &T, mut f: impl FnMut(&T) -> T) -> T {
        let half = lo.lift(0.5);
        let mid = (lo.clone() + hi.clone()) * half.clone();
        let rad = (hi.clone() - lo.clone()) * half;
        let mut acc = lo.lift(0.0);
        for (x, w) in self.nodes.iter().zip(self.weights.iter()) {
            let xx = mid.clone() + rad.clone() * x.clone();
            acc = acc + w.clone() * f(&xx);
        }
        acc * rad
    }
}

/// Panel edges lo, lo+scale, lo+2 scale, lo+4 scale, ... capped at hi.
/// Doubling panel widths resolve boundary layers of width `scale` at `lo`
/// while keeping the panel count logarithmic in the interval length.
pub fn geometric_breakpoints<T: Real>(lo: &T, scale: f64, hi: &T) -> Vec<T> {
    let mut breaks = vec![lo.clone()];
    let mut offset = scale.max(1e-300);
    let span = (hi.clone() - lo.clone()).to_f64();
    while offset < span {
        breaks.push(lo.clone() + lo.lift(offset));
        offset *= 2.0;
    }
    breaks.push(hi.clone());
    breaks
}

/// Kress weights R_{|i-j|} for the periodic logarithmic kernel
/// ln(4 sin^2((t - t_j)/2)) on an even uniform grid of `n` points.
///
/// The trapezoid rule applied to the remaining smooth factor together with
/// these weights yields spectral accuracy on analytic curves.
pub fn kress_log_weights(n: usize) -> Vec<f64> {
    assert!(n % 2 == 0 && n >= 4);
    let half = n / 2;
    let mut r = vec![0.0_f64; n];
    for (k, rk) in r.iter_mut().enumerate() {
        let tau = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let mut s = 0.0;
        for m in 1..half {
            s += (m as f64 * tau).cos() / m as f64;
        }
        s += (half as f64 * tau).cos() / n as f64;
        *rk = -4.0 * std::f64::consts::PI * s / n as f64;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::Mpf;

    #[test]
    fn tanh_sinh_smooth() {
        // int_0^1 x^2 dx
        let v = tanh_sinh(&0.0_f64, &1.0, 1e-14, |p| p.x * p.x).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // int_0^1 1/sqrt(x) dx = 2, singular endpoint resolved via from_lo
        let v = tanh_sinh(&0.0_f64, &1.0, 1e-13, |p| 1.0 / p.from_lo.sqrt()).unwrap();
        assert!((v - 2.0).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn tanh_sinh_extended_precision() {
        // int_0^1 e^x dx = e - 1 at 256 bits
        let lo = Mpf::with_precision(0.0, 256);
        let hi = Mpf::with_precision(1.0, 256);
        let v = tanh_sinh(&lo, &hi, 1e-60, |p| p.x.exp()).unwrap();
        let expect = hi.lift(1.0).exp() - hi.lift(1.0);
        let err = (v - expect).abs();
        assert!(err < hi.lift(1e-55), "err {:?}", err.to_f64());
    }

    #[test]
    fn gauss_legendre_polynomial_exactness() {
        let rule = GaussLegendre::new(&0.0_f64, 12);
        // degree 23 polynomial integrated exactly: x^10 over [0,2]
        let v = rule.integrate(&0.0, &2.0, |x| x.powi(10));
        assert!((v - 2048.0 / 11.0 * 1.0).abs() < 1e-10 * v.abs());
        // and e^{-x} over [0,1]
        let w = rule.integrate(&0.0, &1.0, |x| (-x).exp());
        assert!((w - (1.0 - (-1.0_f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn gauss_legendre_extended() {
        let proto = Mpf::with_precision(0.0, 256);
        let rule = GaussLegendre::new(&proto, 40);
        let v = rule.integrate(&proto.lift(0.0), &proto.lift(1.0), |x| (-x.clone()).exp());
        let expect = proto.lift(1.0) - proto.lift(-1.0).exp();
        let err = (v - expect).abs();
        assert!(err < proto.lift(1e-60), "err {:?}", err.to_f64());
    }

    #[test]
    fn kress_weights_integrate_log_kernel() {
        // int_0^{2pi} ln(4 sin^2(t/2)) cos(m t) dt = -2 pi / m (m >= 1), 0 for m = 0
        let n = 64;
        let r = kress_log_weights(n);
        for m in [0usize, 1, 3, 7] {
            let mut s = 0.0;
            for j in 0..n {
                let tj = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                // weights R_{|0-j|} approximate the kernel centred at t = 0
                s += r[j] * (m as f64 * tj).cos();
            }
            let expect = if m == 0 {
                0.0
            } else {
                -2.0 * std::f64::consts::PI / m as f64
            };
            assert!((s - expect).abs() < 1e-12, "m={m} got {s} want {expect}");
        }
    }
}
