use landau_spectra::green::*;
use landau_spectra::precision::{Mpf, Real};

fn main() {
    // extract c'_1, c'_2, d_2, c'_3 for d=1 from the quadrature in 320-bit
    let prec = 320usize;
    let proto = Mpf::with_precision(0.0, prec);
    let coeffs = expansion_coeffs(&proto, 1, 6);
    println!("table: c'_0={:.15} c'_1={:.15} c'_2={:.15} c'_3={:.15}", coeffs.c_prime(0).to_f64(), coeffs.c_prime(1).to_f64(), coeffs.c_prime(2).to_f64(), coeffs.c_prime(3).to_f64());
    println!("table: d_0={:.15} d_1={:.15} d_2={:.15} d_3={:.15}", coeffs.d_coef(0).to_f64(), coeffs.d_coef(1).to_f64(), coeffs.d_coef(2).to_f64(), coeffs.d_coef(3).to_f64());

    // probe(s) = I0(s) + d0 ln s + c'_0  = -c'_1 s - (c'_2 + d_2 ln s)s^2 - ...
    let probe = |s: &Mpf| -> Mpf {
        eval_i0(s, 1).unwrap() + coeffs.d_coef(0) * s.clone().ln() + coeffs.c_prime(0)
    };
    let s1 = Mpf::from_decimal("1e-30", prec);
    let p1 = probe(&s1) / s1.clone();
    println!("c'_1 extracted = {:.15}  (table {:.15})", (-p1.clone()).to_f64(), coeffs.c_prime(1).to_f64());

    // next order: probe2 = (probe + c'_1 s)/s^2 = -(c'_2 + d_2 ln s) - ...
    let probe2 = |s: &Mpf| -> Mpf {
        (probe(s) + coeffs.c_prime(1) * s.clone()) / (s.clone() * s.clone())
    };
    let sa = Mpf::from_decimal("1e-25", prec);
    let sb = Mpf::from_decimal("1e-28", prec);
    let va = probe2(&sa);
    let vb = probe2(&sb);
    let d2 = -((va.clone() - vb.clone()) / (sa.clone().ln() - sb.clone().ln()));
    let c2 = -(va + d2.clone() * sa.clone().ln());
    println!("d_2 extracted = {:.15}  (table {:.15})", d2.to_f64(), coeffs.d_coef(2).to_f64());
    println!("c'_2 extracted = {:.15} (table {:.15})", c2.to_f64(), coeffs.c_prime(2).to_f64());

    // residual shape for the f64 singular-expansion test
    let setup = landau_spectra::landau::MagneticSetup::new(1.0, 1).unwrap();
    let expn = singular_expansion(&setup, 3).unwrap();
    use num_complex::Complex64;
    let z = [Complex64::new(0.25, -0.15)];
    for k in 0..6 {
        let rho = 0.3 * 0.5f64.powi(k);
        let w = [z[0] + Complex64::new(rho * 0.6, rho * 0.8)];
        let g = green_g0(&setup, &z, &w).unwrap();
        let e = expn.eval(&z, &w).unwrap();
        println!("rho={rho:.5}  resid={:.3e}  rho^8lnrho={:.3e}", (g - e).norm(), rho.powi(8) * rho.ln().abs());
    }
}
