//! Closed smooth curves in the plane, sampled uniformly in parameter.
//!
//! The boundary of the compact region K is stored with nodes, first and
//! second parameter derivatives, speeds, and the normal pointing out of K.
//! Orientation is normalized to counterclockwise. The exterior-domain
//! operators flip the normal themselves where their conventions require it.

use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct SmoothCurve {
    /// parameter values t_i = 2 pi i / n
    pub t: Vec<f64>,
    /// nodes x(t_i)
    pub x: Vec<[f64; 2]>,
    /// first derivatives x'(t_i)
    pub dx: Vec<[f64; 2]>,
    /// second derivatives x''(t_i)
    pub ddx: Vec<[f64; 2]>,
    /// speeds |x'(t_i)|
    pub speed: Vec<f64>,
    /// unit normal pointing out of the enclosed compact region
    pub normal: Vec<[f64; 2]>,
}

impl SmoothCurve {
    /// Sample an analytic parameterization (position, first and second
    /// derivative) at `n` uniform nodes. `n` must be even.
    pub fn from_parametrization(
        n: usize,
        f: impl Fn(f64) -> ([f64; 2], [f64; 2], [f64; 2]),
    ) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidCurve("need an even node count >= 8".into()));
        }
        let mut t = Vec::with_capacity(n);
        let mut x = Vec::with_capacity(n);
        let mut dx = Vec::with_capacity(n);
        let mut ddx = Vec::with_capacity(n);
        for i in 0..n {
            let ti = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let (p, dp, ddp) = f(ti);
            t.push(ti);
            x.push(p);
            dx.push(dp);
            ddx.push(ddp);
        }
        Self::assemble(t, x, dx, ddx)
    }

    /// Build from plain position samples; derivatives come from spectral
    /// (trigonometric) differentiation, which is accurate for smooth closed
    /// curves sampled uniformly.
    pub fn from_points(x: Vec<[f64; 2]>) -> Result<Self> {
        let n = x.len();
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidCurve("need an even node count >= 8".into()));
        }
        let t: Vec<f64> = (0..n)
            .map(|i| 2.0 * std::f64::consts::PI * i as f64 / n as f64)
            .collect();
        let dx = spectral_derivative(&x, 1);
        let ddx = spectral_derivative(&x, 2);
        Self::assemble(t, x, dx, ddx)
    }

    fn assemble(
        t: Vec<f64>,
        x: Vec<[f64; 2]>,
        mut dx: Vec<[f64; 2]>,
        mut ddx: Vec<[f64; 2]>,
    ) -> Result<Self> {
        let n = x.len();
        // orientation: enforce counterclockwise via the shoelace area
        let mut area2 = 0.0;
        for i in 0..n {
            let j = (i + 1) % n;
            area2 += x[i][0] * x[j][1] - x[j][0] * x[i][1];
        }
        if area2 == 0.0 {
            return Err(Error::InvalidCurve("degenerate curve (zero enclosed area)".into()));
        }
        let flipped = area2 < 0.0;
        if flipped {
            for v in dx.iter_mut() {
                v[0] = -v[0];
                v[1] = -v[1];
            }
            // t -> -t leaves x'' unchanged
            let _ = &mut ddx;
        }
        let mut speed = Vec::with_capacity(n);
        let mut normal = Vec::with_capacity(n);
        for i in 0..n {
            let s = (dx[i][0] * dx[i][0] + dx[i][1] * dx[i][1]).sqrt();
            if s <= 0.0 || !s.is_finite() {
                return Err(Error::InvalidCurve(format!("vanishing speed at node {i}")));
            }
            speed.push(s);
            // CCW tangent rotated by -90 degrees points out of the region
            normal.push([dx[i][1] / s, -dx[i][0] / s]);
        }
        let curve = SmoothCurve {
            t,
            x,
            dx,
            ddx,
            speed,
            normal,
        };
        curve.check_simple()?;
        Ok(curve)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Arc-length quadrature weights of the uniform trapezoid rule.
    pub fn arc_weights(&self) -> Vec<f64> {
        let h = 2.0 * std::f64::consts::PI / self.len() as f64;
        self.speed.iter().map(|s| s * h).collect()
    }

    /// Total boundary length (spectrally accurate for smooth curves).
    pub fn length(&self) -> f64 {
        self.arc_weights().iter().sum()
    }

    /// Enclosed area via the shoelace integral on the exact derivatives.
    pub fn area(&self) -> f64 {
        let h = 2.0 * std::f64::consts::PI / self.len() as f64;
        0.5 * self
            .x
            .iter()
            .zip(self.dx.iter())
            .map(|(p, dp)| p[0] * dp[1] - p[1] * dp[0])
            .sum::<f64>()
            * h
    }

    /// Centroid of the boundary nodes (an interior anchor for star-shaped
    /// regions).
    pub fn node_centroid(&self) -> [f64; 2] {
        let n = self.len() as f64;
        let mut c = [0.0, 0.0];
        for p in &self.x {
            c[0] += p[0] / n;
            c[1] += p[1] / n;
        }
        c
    }

    pub fn scaled(&self, lambda: f64) -> Result<SmoothCurve> {
        if lambda <= 0.0 {
            return Err(Error::InvalidArgument("scale must be positive".into()));
        }
        let map = |v: &[f64; 2]| [lambda * v[0], lambda * v[1]];
        SmoothCurve::assemble(
            self.t.clone(),
            self.x.iter().map(map).collect(),
            self.dx.iter().map(map).collect(),
            self.ddx.iter().map(map).collect(),
        )
    }

    pub fn translated(&self, shift: [f64; 2]) -> Result<SmoothCurve> {
        SmoothCurve::assemble(
            self.t.clone(),
            self.x
                .iter()
                .map(|v| [v[0] + shift[0], v[1] + shift[1]])
                .collect(),
            self.dx.clone(),
            self.ddx.clone(),
        )
    }

    pub fn rotated(&self, angle: f64) -> Result<SmoothCurve> {
        let (s, c) = angle.sin_cos();
        let rot = |v: &[f64; 2]| [c * v[0] - s * v[1], s * v[0] + c * v[1]];
        SmoothCurve::assemble(
            self.t.clone(),
            self.x.iter().map(rot).collect(),
            self.dx.iter().map(rot).collect(),
            self.ddx.iter().map(rot).collect(),
        )
    }

    /// Pairwise segment intersection test on the polygonal interpolant;
    /// rejects self-intersecting (non-simple) curves.
    fn check_simple(&self) -> Result<()> {
        let n = self.len();
        let seg = |i: usize| (self.x[i], self.x[(i + 1) % n]);
        for i in 0..n {
            let (a, b) = seg(i);
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue; // adjacent around the seam
                }
                let (c, d) = seg(j);
                if segments_intersect(a, b, c, d) {
                    return Err(Error::InvalidCurve(format!(
                        "self-intersection between segments {i} and {j}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_intersect(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    (o1 * o2 < 0.0) && (o3 * o4 < 0.0)
}

/// Differentiate periodic samples by explicit Fourier synthesis; O(n^2) but
/// exact for band-limited data and spectrally accurate for smooth curves.
fn spectral_derivative(x: &[[f64; 2]], order: u32) -> Vec<[f64; 2]> {
    let n = x.len();
    let mut out = vec![[0.0_f64; 2]; n];
    for comp in 0..2 {
        // DFT coefficients
        let mut re = vec![0.0; n];
        let mut im = vec![0.0; n];
        for (k, (rk, ik)) in re.iter_mut().zip(im.iter_mut()).enumerate() {
            for (j, xj) in x.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * (k * j) as f64 / n as f64;
                *rk += xj[comp] * ang.cos();
                *ik += xj[comp] * ang.sin();
            }
        }
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in 0..n {
                // signed frequency, Nyquist dropped for odd derivatives
                let kk = if k <= n / 2 { k as i64 } else { k as i64 - n as i64 };
                if order % 2 == 1 && k == n / 2 {
                    continue;
                }
                let ang = 2.0 * std::f64::consts::PI * (k * j) as f64 / n as f64;
                let (cr, ci) = (re[k] / n as f64, im[k] / n as f64);
                let kf = kk as f64;
                let (fr, fi) = match order {
                    1 => (-kf * ci, kf * cr),
                    2 => (-kf * kf * cr, -kf * kf * ci),
                    _ => unreachable!(),
                };
                acc += fr * ang.cos() - fi * ang.sin();
            }
            o[comp] = acc;
        }
    }
    out
}

/// Circle of radius `r` centred at `c`.
pub fn circle(n: usize, r: f64, c: [f64; 2]) -> Result<SmoothCurve> {
    SmoothCurve::from_parametrization(n, move |t| {
        let (s, co) = t.sin_cos();
        (
            [c[0] + r * co, c[1] + r * s],
            [-r * s, r * co],
            [-r * co, -r * s],
        )
    })
}

/// Axis-aligned ellipse with semi-axes (a, b).
pub fn ellipse(n: usize, a: f64, b: f64) -> Result<SmoothCurve> {
    SmoothCurve::from_parametrization(n, move |t| {
        let (s, c) = t.sin_cos();
        ([a * c, b * s], [-a * s, b * c], [-a * c, -b * s])
    })
}

/// Star-shaped perturbed circle r(theta) = r0 (1 + eps cos(k theta)).
pub fn perturbed_circle(n: usize, r0: f64, eps: f64, k: u32) -> Result<SmoothCurve> {
    SmoothCurve::from_parametrization(n, move |t| {
        let kf = k as f64;
        let r = r0 * (1.0 + eps * (kf * t).cos());
        let dr = -r0 * eps * kf * (kf * t).sin();
        let ddr = -r0 * eps * kf * kf * (kf * t).cos();
        let (s, c) = t.sin_cos();
        let p = [r * c, r * s];
        let dp = [dr * c - r * s, dr * s + r * c];
        let ddp = [
            ddr * c - 2.0 * dr * s - r * c,
            ddr * s + 2.0 * dr * c - r * s,
        ];
        (p, dp, ddp)
    })
}

/// Parse the curve file format: first line the node count, then n lines
/// "t x1 x2". The parameter column is validated to be the uniform grid.
pub fn parse_curve_file(content: &str) -> Result<SmoothCurve> {
    let mut lines = content.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::CurveParse { line: 1, msg: "empty file".into() })?;
    let n: usize = first.trim().parse().map_err(|_| Error::CurveParse {
        line: 1,
        msg: format!("expected node count, found {first:?}"),
    })?;
    let mut pts = Vec::with_capacity(n);
    for _ in 0..n {
        let (idx, line) = lines.next().ok_or_else(|| Error::CurveParse {
            line: pts.len() + 2,
            msg: "unexpected end of file".into(),
        })?;
        let lineno = idx + 1;
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 3 {
            return Err(Error::CurveParse {
                line: lineno,
                msg: format!("expected 3 columns, found {}", cols.len()),
            });
        }
        let t: f64 = cols[0].parse().map_err(|_| Error::CurveParse {
            line: lineno,
            msg: format!("bad parameter value {:?}", cols[0]),
        })?;
        let x1: f64 = cols[1].parse().map_err(|_| Error::CurveParse {
            line: lineno,
            msg: format!("bad coordinate {:?}", cols[1]),
        })?;
        let x2: f64 = cols[2].parse().map_err(|_| Error::CurveParse {
            line: lineno,
            msg: format!("bad coordinate {:?}", cols[2]),
        })?;
        let expected = 2.0 * std::f64::consts::PI * pts.len() as f64 / n as f64;
        if (t - expected).abs() > 1e-8 {
            return Err(Error::CurveParse {
                line: lineno,
                msg: format!("parameter {t} is not the uniform node {expected}"),
            });
        }
        pts.push([x1, x2]);
    }
    SmoothCurve::from_points(pts).map_err(|e| match e {
        Error::InvalidCurve(msg) => Error::CurveParse { line: 1, msg },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_geometry() {
        let c = circle(64, 2.0, [0.3, -0.4]).unwrap();
        assert!((c.length() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!((c.area() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        // outward normal points away from the centre
        for (p, nu) in c.x.iter().zip(c.normal.iter()) {
            let r = [p[0] - 0.3, p[1] + 0.4];
            let dot = r[0] * nu[0] + r[1] * nu[1];
            assert!(dot > 1.99 && dot < 2.01);
        }
    }

    #[test]
    fn orientation_normalized() {
        // clockwise input gets flipped to CCW with outward normals
        let cw = SmoothCurve::from_parametrization(32, |t| {
            let (s, c) = (-t).sin_cos();
            ([c, s], [s, -c], [-c, -s])
        })
        .unwrap();
        assert!(cw.area() > 0.0);
        for (p, nu) in cw.x.iter().zip(cw.normal.iter()) {
            assert!(p[0] * nu[0] + p[1] * nu[1] > 0.9);
        }
    }

    #[test]
    fn spectral_derivatives_match_analytic() {
        let analytic = ellipse(48, 2.0, 1.0).unwrap();
        let sampled = SmoothCurve::from_points(analytic.x.clone()).unwrap();
        for i in 0..48 {
            for c in 0..2 {
                assert!((analytic.dx[i][c] - sampled.dx[i][c]).abs() < 1e-10);
                assert!((analytic.ddx[i][c] - sampled.ddx[i][c]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn rejects_self_intersection() {
        // figure-eight
        let r = SmoothCurve::from_parametrization(40, |t| {
            ([t.sin(), (2.0 * t).sin()], [t.cos(), 2.0 * (2.0 * t).cos()], [-t.sin(), -4.0 * (2.0 * t).sin()])
        });
        assert!(matches!(r, Err(Error::InvalidCurve(_))));
    }

    #[test]
    fn curve_file_roundtrip_and_errors() {
        let c = ellipse(16, 1.0, 0.5).unwrap();
        let mut s = format!("{}\n", c.len());
        for (t, p) in c.t.iter().zip(c.x.iter()) {
            s.push_str(&format!("{t:.17} {:.17} {:.17}\n", p[0], p[1]));
        }
        let parsed = parse_curve_file(&s).unwrap();
        assert_eq!(parsed.len(), 16);
        assert!((parsed.x[3][0] - c.x[3][0]).abs() < 1e-15);

        let mut bad = format!("{}\n", c.len());
        for (i, (t, p)) in c.t.iter().zip(c.x.iter()).enumerate() {
            if i == 2 {
                bad.push_str("broken line\n");
            } else {
                bad.push_str(&format!("{t:.17} {:.17} {:.17}\n", p[0], p[1]));
            }
        }
        match parse_curve_file(&bad) {
            Err(Error::CurveParse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
