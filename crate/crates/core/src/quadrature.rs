//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Every integral in the crate goes through [`Quadrature`]. Segments are kept
//! in a max-heap keyed by their error estimate; the worst segment is bisected
//! until the summed error drops below `max(abs_tol, rel_tol * |I|)`.
//!
//! Infinite ranges are mapped onto `[0, π/2)` with `u = s·tan φ`. With the
//! scale `s` set to the width of the density, algebraic tails such as the
//! Cauchy `1/u²` become bounded integrands and need no truncation.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: reals and complex numbers.
pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
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

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point Kronrod evaluation on `[a, b]`: (estimate, error).
fn gk15<T: Scalar, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.magnitude() * WGK[7];
    let mut values = [(T::zero(), T::zero()); 7];
    for (j, v) in values.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod = kronrod + (f1 + f2) * WGK[j];
        abs_sum += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
        *v = (f1, f2);
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (fc - mean).magnitude();
    for (j, (f1, f2)) in values.iter().enumerate() {
        asc += WGK[j] * ((*f1 - mean).magnitude() + (*f2 - mean).magnitude());
    }
    let scale = half.abs();
    let result = kronrod * half;
    let resabs = abs_sum * scale;
    let resasc = asc * scale;
    let mut err = ((kronrod - gauss) * half).magnitude();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err)
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Tolerances and segment budget for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_segments: 4000,
        }
    }
}

impl Quadrature {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<T: Scalar, F: Fn(f64) -> T>(&self, f: F, a: f64, b: f64) -> Result<T> {
        self.integrate_points(f, &[a, b])
    }

    /// Integrates over `[points[0], points[last]]`, starting from the given
    /// subdivision. Points must be sorted; duplicates are skipped.
    pub fn integrate_points<T: Scalar, F: Fn(f64) -> T>(&self, f: F, points: &[f64]) -> Result<T> {
        let mut heap = BinaryHeap::new();
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let (value, error) = gk15(&f, a, b);
            heap.push(Segment { a, b, value, error });
        }
        let mut frozen: Vec<Segment<T>> = Vec::new();
        loop {
            let (total, err) = heap
                .iter()
                .chain(frozen.iter())
                .fold((T::zero(), 0.0), |(s, e), seg| (s + seg.value, e + seg.error));
            let tol = self.abs_tol.max(self.rel_tol * total.magnitude());
            if err <= tol {
                return Ok(total);
            }
            let worst = match heap.pop() {
                Some(seg) => seg,
                // Everything left is at machine resolution.
                None => return Ok(total),
            };
            if heap.len() + frozen.len() + 2 > self.max_segments {
                if err <= 100.0 * tol {
                    return Ok(total);
                }
                return Err(Error::Quadrature {
                    error: err,
                    tolerance: tol,
                });
            }
            let mid = 0.5 * (worst.a + worst.b);
            let width_floor = 4.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(1e-300);
            if worst.b - worst.a <= width_floor || mid <= worst.a || mid >= worst.b {
                frozen.push(worst);
                continue;
            }
            let (v1, e1) = gk15(&f, worst.a, mid);
            let (v2, e2) = gk15(&f, mid, worst.b);
            heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
            heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
        }
    }

    /// `∫₀^∞ f(u) du` through `u = scale·tan φ`. `breaks` are points in `u`
    /// (any order, non-positive entries ignored) where `f` changes character.
    pub fn integrate_half_line<T: Scalar, F: Fn(f64) -> T>(
        &self,
        f: F,
        scale: f64,
        breaks: &[f64],
    ) -> Result<T> {
        let mut phis: Vec<f64> = breaks
            .iter()
            .filter(|u| u.is_finite() && **u > 0.0)
            .map(|u| (u / scale).atan())
            .collect();
        phis.push(0.0);
        phis.push(FRAC_PI_2);
        phis.sort_by(f64::total_cmp);
        phis.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let mapped = |phi: f64| {
            let (s, c) = phi.sin_cos();
            let u = scale * s / c;
            let jac = scale / (c * c);
            let v = f(u);
            if jac.is_finite() {
                v * jac
            } else {
                T::zero()
            }
        };
        self.integrate_points(mapped, &phis)
    }

    /// `∫_ℝ f(ω) dω`, folded onto the half line.
    pub fn integrate_line<T: Scalar, F: Fn(f64) -> T>(&self, f: F, scale: f64, breaks: &[f64]) -> Result<T> {
        self.integrate_half_line(|u| f(u) + f(-u), scale, breaks)
    }
}
