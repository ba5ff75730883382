//! Adaptive Gauss–Kronrod (7/15) quadrature and composite Simpson on uniform grids.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            rel_tol: 1e-8,
            abs_tol: 0.0,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
    /// ∫|f|, used as the scale for near-zero results.
    pub l1: f64,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
    l1: f64,
}

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut l1 = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        let s = f1 + f2;
        kronrod += s * WGK[j];
        l1 += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    Segment {
        a,
        b,
        value: kronrod * h,
        error: ((kronrod - gauss) * h).norm(),
        l1: l1 * h.abs(),
    }
}

/// Integrates a complex-valued `f` over `[a, b]` by global adaptive bisection.
///
/// Converges when the summed error estimate drops below
/// `max(abs_tol, rel_tol·|I|, rel_tol·∫|f|·1e-3)`; the last term keeps
/// cancelling integrands (|I| ≪ ∫|f|) from demanding unattainable accuracy.
pub fn integrate<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: C64::new(0.0, 0.0),
            error: 0.0,
            l1: 0.0,
            intervals: 0,
        });
    }
    let mut segs = vec![gk15(&f, a, b)];
    loop {
        let value: C64 = segs.iter().map(|s| s.value).sum();
        let error: f64 = segs.iter().map(|s| s.error).sum();
        let l1: f64 = segs.iter().map(|s| s.l1).sum();
        let tol = opts
            .abs_tol
            .max(opts.rel_tol * value.norm())
            .max(opts.rel_tol * 1e-3 * l1);
        if error <= tol {
            return Ok(QuadResult {
                value,
                error,
                l1,
                intervals: segs.len(),
            });
        }
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Numerical(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        if segs.len() >= opts.max_intervals {
            return Err(Error::Numerical(format!(
                "quadrature on [{a}, {b}] did not converge: error {error:e} > tolerance {tol:e} after {} intervals",
                segs.len()
            )));
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        segs.push(gk15(&f, s.a, mid));
        segs.push(gk15(&f, mid, s.b));
    }
}

/// Composite Simpson rule for samples on a uniform grid of spacing `h`.
///
/// An even number of intervals is integrated with Simpson's 1/3 rule; an odd
/// count closes the last three intervals with the 3/8 rule.
pub fn simpson_uniform<T>(values: &[T], h: f64) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
{
    let n = values.len();
    match n {
        0 | 1 => T::default(),
        2 => (values[0] + values[1]) * (0.5 * h),
        3 => (values[0] + values[1] * 4.0 + values[2]) * (h / 3.0),
        _ => {
            let intervals = n - 1;
            let (simpson_end, tail) = if intervals % 2 == 0 {
                (n - 1, None)
            } else {
                (n - 4, Some(n - 4))
            };
            let mut total = T::default();
            if simpson_end > 0 {
                let mut acc = values[0] + values[simpson_end];
                for (i, v) in values.iter().enumerate().take(simpson_end).skip(1) {
                    acc = acc + *v * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                total = acc * (h / 3.0);
            }
            if let Some(k) = tail {
                let t = (values[k] + values[k + 1] * 3.0 + values[k + 2] * 3.0 + values[k + 3])
                    * (3.0 * h / 8.0);
                total = total + t;
            }
            total
        }
    }
}

/// Trapezoidal rule for samples on a uniform grid of spacing `h`.
pub fn trapezoid_uniform<T>(values: &[T], h: f64) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
{
    if values.len() < 2 {
        return T::default();
    }
    let inner = values[1..values.len() - 1]
        .iter()
        .fold(T::default(), |acc, v| acc + *v);
    (inner + (values[0] + values[values.len() - 1]) * 0.5) * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_integrates_smooth_and_oscillatory() {
        let r = integrate(|x| C64::new(x.sin(), x.cos()), 0.0, std::f64::consts::PI, QuadOptions::default())
            .unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-12);
        assert!(r.value.im.abs() < 1e-12);

        let r = integrate(
            |x| C64::new((-x * x).exp() * (30.0 * x).cos(), 0.0),
            0.0,
            12.0,
            QuadOptions::default(),
        )
        .unwrap();
        let exact = 0.5 * std::f64::consts::PI.sqrt() * (-225.0f64).exp();
        assert!((r.value.re - exact).abs() < 1e-12);
    }

    #[test]
    fn gk_reports_nonconvergence() {
        let opts = QuadOptions {
            max_intervals: 3,
            ..Default::default()
        };
        let r = integrate(|x| C64::new((200.0 * x).sin() * x, 0.0), 0.0, 50.0, opts);
        assert!(matches!(r, Err(Error::Numerical(_))));
    }

    #[test]
    fn simpson_exact_for_cubics() {
        let h = 0.1;
        for n in [3usize, 4, 5, 8, 11] {
            let xs: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
            let vals: Vec<f64> = xs.iter().map(|x| x * x * x - 2.0 * x + 1.0).collect();
            let l = xs[n - 1];
            let exact = l.powi(4) / 4.0 - l * l + l;
            assert!((simpson_uniform(&vals, h) - exact).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn trapezoid_exact_for_lines() {
        let vals = [1.0, 2.0, 3.0, 4.0];
        assert!((trapezoid_uniform(&vals, 0.5) - 3.75).abs() < 1e-15);
    }
}
