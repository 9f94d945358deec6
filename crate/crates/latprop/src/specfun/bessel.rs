//! Bessel functions of the first kind for integer and half-integer order,
//! plus the Neumann functions needed by the continuum kernels.

use crate::C64;
use std::f64::consts::PI;

/// Arguments up to this magnitude use the ascending series.
const SERIES_LIMIT: f64 = 4.0;
const RESCALE: f64 = 1e250;

fn miller_start(nmax: usize, ax: f64) -> usize {
    let top = (nmax as f64).max(ax);
    let m = top.ceil() as usize + (160.0 * top.max(1.0)).sqrt().ceil() as usize + 20;
    m + (m & 1)
}

/// Ascending series of J_n(x), stopped once the term falls below 1e-17 of
/// the largest term seen.
fn series_j(n: usize, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= h / k as f64;
    }
    let q = -h * h;
    let mut sum = term;
    let mut peak = term.abs();
    let mut k = 0usize;
    loop {
        k += 1;
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        peak = peak.max(term.abs());
        if term.abs() <= 1e-17 * peak || term == 0.0 {
            break;
        }
    }
    sum
}

/// J_0(x) ..= J_nmax(x) for real x.
pub fn bessel_j_range(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    if ax <= SERIES_LIMIT {
        for (n, v) in out.iter_mut().enumerate() {
            *v = series_j(n, ax);
        }
    } else {
        let m = miller_start(nmax, ax);
        let mut above = 0.0;
        let mut cur = 1e-300_f64.sqrt();
        let mut norm = 0.0;
        for k in (0..=m).rev() {
            if k <= nmax {
                out[k] = cur;
            }
            if k == 0 {
                norm += cur;
            } else if k % 2 == 0 {
                norm += 2.0 * cur;
            }
            if k > 0 {
                let below = 2.0 * k as f64 / ax * cur - above;
                above = cur;
                cur = below;
                if cur.abs() > RESCALE {
                    cur /= RESCALE;
                    above /= RESCALE;
                    norm /= RESCALE;
                    for v in out.iter_mut() {
                        *v /= RESCALE;
                    }
                }
            }
        }
        for v in out.iter_mut() {
            *v /= norm;
        }
    }
    if x < 0.0 {
        for v in out.iter_mut().skip(1).step_by(2) {
            *v = -*v;
        }
    }
    out
}

/// J_order(x) for any integer order, with J_{-d} = (-1)^d J_d.
pub fn bessel_j(order: i64, x: f64) -> f64 {
    let d = order.unsigned_abs() as usize;
    let v = if x.abs() <= SERIES_LIMIT {
        let s = series_j(d, x.abs());
        if x < 0.0 && d % 2 == 1 {
            -s
        } else {
            s
        }
    } else {
        bessel_j_range(d, x)[d]
    };
    if order < 0 && d % 2 == 1 {
        -v
    } else {
        v
    }
}

/// Lookup into a non-negative order table with the reflection rule.
#[inline]
pub fn j_signed(table: &[f64], order: i64) -> f64 {
    let d = order.unsigned_abs() as usize;
    match table.get(d) {
        Some(&v) if order < 0 && d % 2 == 1 => -v,
        Some(&v) => v,
        None => 0.0,
    }
}

/// J_0(z) ..= J_nmax(z) for complex z.
pub fn bessel_j_range_complex(nmax: usize, z: C64) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); nmax + 1];
    if z.norm() == 0.0 {
        out[0] = C64::new(1.0, 0.0);
        return out;
    }
    if z.norm() <= SERIES_LIMIT {
        let h = 0.5 * z;
        let q = -h * h;
        let mut lead = C64::new(1.0, 0.0);
        for (n, v) in out.iter_mut().enumerate() {
            if n > 0 {
                lead *= h / n as f64;
            }
            let mut term = lead;
            let mut sum = term;
            let mut peak = term.norm();
            let mut k = 0usize;
            loop {
                k += 1;
                term *= q / (k as f64 * (k + n) as f64);
                sum += term;
                peak = peak.max(term.norm());
                if term.norm() <= 1e-17 * peak || term.norm() == 0.0 {
                    break;
                }
            }
            *v = sum;
        }
        return out;
    }
    let m = miller_start(nmax, z.norm());
    let mut above = C64::new(0.0, 0.0);
    let mut cur = C64::new(1e-150, 0.0);
    let mut norm = C64::new(0.0, 0.0);
    for k in (0..=m).rev() {
        if k <= nmax {
            out[k] = cur;
        }
        if k == 0 {
            norm += cur;
        } else if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        if k > 0 {
            let below = cur * (2.0 * k as f64) / z - above;
            above = cur;
            cur = below;
            if cur.norm() > RESCALE {
                cur /= RESCALE;
                above /= RESCALE;
                norm /= RESCALE;
                for v in out.iter_mut() {
                    *v /= RESCALE;
                }
            }
        }
    }
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// Spherical Bessel j_0(x) ..= j_lmax(x).
pub fn spherical_j_range(lmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; lmax + 1];
    let ax = x.abs();
    if ax == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if ax < 1.0 {
        // j_l(x) = x^l/(2l+1)!! * sum_k (-x^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))
        let mut lead = 1.0;
        for (l, v) in out.iter_mut().enumerate() {
            if l > 0 {
                lead *= ax / (2 * l + 1) as f64;
            }
            let mut term = lead;
            let mut sum = term;
            let mut k = 0usize;
            while term.abs() > 1e-18 * sum.abs() && term != 0.0 {
                k += 1;
                term *= -0.5 * ax * ax / (k as f64 * (2 * l + 2 * k + 1) as f64);
                sum += term;
            }
            *v = sum;
        }
    } else {
        let m = miller_start(lmax, ax);
        let mut above = 0.0;
        let mut cur = 1e-150;
        let mut kept = vec![0.0; lmax.max(1) + 1];
        for l in (0..=m).rev() {
            if l < kept.len() {
                kept[l] = cur;
            }
            if l > 0 {
                let below = (2 * l + 1) as f64 / ax * cur - above;
                above = cur;
                cur = below;
                if cur.abs() > RESCALE {
                    cur /= RESCALE;
                    above /= RESCALE;
                    for v in kept.iter_mut() {
                        *v /= RESCALE;
                    }
                }
            }
        }
        let (s, c) = ax.sin_cos();
        let j0 = s / ax;
        let j1 = s / (ax * ax) - c / ax;
        let scale = if j0.abs() >= j1.abs() { j0 / kept[0] } else { j1 / kept[1] };
        for (v, k) in out.iter_mut().zip(kept.iter()) {
            *v = k * scale;
        }
    }
    if x < 0.0 {
        for v in out.iter_mut().skip(1).step_by(2) {
            *v = -*v;
        }
    }
    out
}

/// Errors on negative order; otherwise j_l(x).
pub fn spherical_j(l: i64, x: f64) -> crate::Result<f64> {
    if l < 0 {
        return crate::error::domain(format!("spherical Bessel order must be >= 0, got {l}"));
    }
    Ok(spherical_j_range(l as usize, x)[l as usize])
}

/// J_{q+1/2}(x) = sqrt(2x/pi) j_q(x) for x >= 0.
pub fn bessel_j_half(q: usize, x: f64) -> f64 {
    (2.0 * x / PI).sqrt() * spherical_j_range(q, x)[q]
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Neumann function Y_n(x) for x > 0 from the ascending series; intended for
/// the moderate arguments of the continuum checks.
pub fn bessel_y(n: usize, x: f64) -> f64 {
    assert!(x > 0.0, "bessel_y needs a positive argument");
    if x > 20.0 {
        return bessel_y_recurrence(n, x);
    }
    let h = 0.5 * x;
    let jn = bessel_j(n as i64, x);
    let mut finite = 0.0;
    if n > 0 {
        let mut fact = (1..n).map(|k| k as f64).product::<f64>();
        let mut pw = 1.0;
        for k in 0..n {
            finite += fact / factorial(k) * pw;
            if k + 1 < n {
                fact /= (n - k - 1) as f64;
            }
            pw *= h * h;
        }
        finite *= -h.powi(-(n as i32)) / PI;
    }
    let mut tail = 0.0;
    let mut psi_a = -EULER_GAMMA;
    let mut psi_b = -EULER_GAMMA + (1..=n).map(|k| 1.0 / k as f64).sum::<f64>();
    let mut term = h.powi(n as i32) / factorial(n);
    let q = -h * h;
    let mut k = 0usize;
    loop {
        let add = (psi_a + psi_b) * term;
        tail += add;
        k += 1;
        psi_a += 1.0 / k as f64;
        psi_b += 1.0 / (k + n) as f64;
        term *= q / (k as f64 * (k + n) as f64);
        if add.abs() < 1e-18 * tail.abs().max(1e-300) && k > 2 {
            break;
        }
        if k > 400 {
            break;
        }
    }
    finite + 2.0 / PI * h.ln() * jn - tail / PI
}

fn bessel_y_recurrence(n: usize, x: f64) -> f64 {
    // Hankel asymptotics for Y_0, Y_1 then forward recurrence (stable for Y).
    let y0 = hankel_asym(0.0, x).1;
    if n == 0 {
        return y0;
    }
    let mut a = y0;
    let mut b = hankel_asym(1.0, x).1;
    for k in 1..n {
        let c = 2.0 * k as f64 / x * b - a;
        a = b;
        b = c;
    }
    b
}

fn hankel_asym(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    for k in 1..30 {
        let kk = k as f64;
        term *= (mu - (2.0 * kk - 1.0).powi(2)) / (kk * 8.0 * x);
        if k % 2 == 1 {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            q += sign * term;
        } else {
            let sign = if (k / 2) % 2 == 1 { -1.0 } else { 1.0 };
            p += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    let amp = (2.0 / (PI * x)).sqrt();
    let (s, c) = chi.sin_cos();
    (amp * (p * c - q * s), amp * (p * s + q * c))
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}
