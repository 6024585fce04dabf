//! Adaptive Gauss–Kronrod (7/15) integration.

use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

// 15-point Kronrod estimate and the QUADPACK error estimate on [a, b].
fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut fv = [(0.0, 0.0); 7];
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    for j in 0..7 {
        let x = h * XGK[j];
        let (f1, f2) = (f(c - x), f(c + x));
        fv[j] = (f1, f2);
        k += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    let mid = 0.5 * k;
    let mut asc = WGK[7] * (fc - mid).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv[j].0 - mid).abs() + (fv[j].1 - mid).abs());
    }
    let (k, abs, asc) = (k * h, abs * h.abs(), asc * h.abs());
    let mut err = (k - g * h).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs);
    }
    (k, err)
}

const MAX_INTERVALS: usize = 2000;

struct Interval {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}

impl Eq for Interval {}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Interval {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// `∫_a^b f(x) dx`, bisecting the interval with the largest error estimate
/// until the total estimate is below `max(tol, 1e-14·|I|)` or the interval
/// budget is spent.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let (value, err) = kronrod(&f, a, b);
    let mut heap = BinaryHeap::from([Interval { a, b, value, err }]);
    let (mut total, mut total_err) = (value, err);
    while heap.len() < MAX_INTERVALS && total_err > tol.max(1e-14 * total.abs()) {
        let worst = heap.pop().expect("non-empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            heap.push(worst);
            break;
        }
        total -= worst.value;
        total_err -= worst.err;
        for (lo, hi) in [(worst.a, m), (m, worst.b)] {
            let (value, err) = kronrod(&f, lo, hi);
            total += value;
            total_err += err;
            heap.push(Interval {
                a: lo,
                b: hi,
                value,
                err,
            });
        }
    }
    // re-sum to avoid drift from the running updates
    heap.iter().map(|p| p.value).sum()
}

/// `∫_a^∞ f(x) dx` via `x = a + t / (1 - t)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> f64 {
    let g = |t: f64| {
        let s = 1.0 - t;
        let v = f(a + t / s) / (s * s);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_and_trig() {
        assert!((integrate(|x| x * x, 0.0, 3.0, 1e-13) - 9.0).abs() < 1e-12);
        assert!((integrate(f64::sin, 0.0, PI, 1e-13) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn semi_infinite() {
        assert!((integrate_to_infinity(|x| (-x).exp(), 0.0, 1e-13) - 1.0).abs() < 1e-12);
        let gauss = integrate_to_infinity(|x| (-x * x / 2.0).exp(), 0.0, 1e-13);
        assert!((gauss - (PI / 2.0).sqrt()).abs() < 1e-11);
    }
}
