//! Globally adaptive 7/15-point Gauss–Kronrod integration.
//!
//! The integrator works for scalar and small fixed-size vector integrands, so
//! that several kernels sharing the same nodes can be integrated in one pass.
//! Convergence is judged per component; each component must either meet
//! `max(abs_tol, rel_tol·|I|)` or be limited by the accumulated roundoff floor.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
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

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values the integrator can accumulate: `f64` and `[f64; N]`.
pub trait QuadValue: Copy {
    const DIM: usize;
    fn zero() -> Self;
    fn get(&self, i: usize) -> f64;
    fn set(&mut self, i: usize, v: f64);

    /// Size of the terms that produced component `i`; sets the roundoff
    /// floor. Differs from `|get(i)|` only for values formed by cancellation.
    fn magnitude(&self, i: usize) -> f64 {
        self.get(i).abs()
    }

    fn axpy(self, k: f64, other: Self) -> Self {
        let mut out = self;
        for i in 0..Self::DIM {
            out.set(i, self.get(i) + k * other.get(i));
        }
        out
    }
}

impl QuadValue for f64 {
    const DIM: usize = 1;
    fn zero() -> Self {
        0.0
    }
    fn get(&self, _i: usize) -> f64 {
        *self
    }
    fn set(&mut self, _i: usize, v: f64) {
        *self = v;
    }
}

impl<const N: usize> QuadValue for [f64; N] {
    const DIM: usize = N;
    fn zero() -> Self {
        [0.0; N]
    }
    fn get(&self, i: usize) -> f64 {
        self[i]
    }
    fn set(&mut self, i: usize, v: f64) {
        self[i] = v;
    }
}

/// Tolerances and budget for one adaptive run.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdiv: usize,
}

/// Outcome of an adaptive run.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive<V> {
    pub value: V,
    pub error: V,
    pub panels: usize,
}

#[derive(Clone, Copy)]
struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: V,
    floor: V,
    priority: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.total_cmp(&other.priority)
    }
}

fn kronrod_panel<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> Panel<V> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);

    let mut resk = V::zero().axpy(WGK[7], fc);
    let mut resg = V::zero().axpy(WG[3], fc);
    let mut fv1 = [V::zero(); 7];
    let mut fv2 = [V::zero(); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk = resk.axpy(WGK[j], f1).axpy(WGK[j], f2);
        if j % 2 == 1 {
            resg = resg.axpy(WG[j / 2], f1).axpy(WG[j / 2], f2);
        }
    }

    let mut value = V::zero();
    let mut error = V::zero();
    let mut floor = V::zero();
    for i in 0..V::DIM {
        let k = resk.get(i);
        let mean = 0.5 * k;
        let mut resabs = WGK[7] * fc.magnitude(i);
        let mut resasc = WGK[7] * (fc.get(i) - mean).abs();
        for j in 0..7 {
            resabs += WGK[j] * (fv1[j].magnitude(i) + fv2[j].magnitude(i));
            resasc += WGK[j] * ((fv1[j].get(i) - mean).abs() + (fv2[j].get(i) - mean).abs());
        }
        let hl = half.abs();
        resabs *= hl;
        resasc *= hl;
        let mut err = ((k - resg.get(i)) * half).abs();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        let fl = 50.0 * f64::EPSILON * resabs;
        value.set(i, k * half);
        error.set(i, if err.is_finite() { err.max(fl) } else { err });
        floor.set(i, fl);
    }

    Panel {
        a,
        b,
        value,
        error,
        floor,
        priority: 0.0,
    }
}

// Error above the panel's own roundoff floor, relative to the target scale,
// over the components that have not yet converged. A component stuck at its
// floor, or already converged, must not keep attracting refinement.
fn priority<V: QuadValue>(p: &Panel<V>, scale: &V, active: &[bool]) -> f64 {
    let (error, floor) = (&p.error, &p.floor);
    let mut p = 0.0_f64;
    for i in (0..V::DIM).filter(|&i| active[i]) {
        let s = scale.get(i);
        let e = error.get(i) - 2.0 * floor.get(i);
        let e = if e.is_nan() { e } else { e.max(0.0) };
        let r = if s > 0.0 { e / s } else { e };
        if r.is_nan() {
            return f64::INFINITY;
        }
        p = p.max(r);
    }
    p
}

/// Integrates `f` over the partition given by `breaks` (strictly increasing,
/// at least two points), refining the worst panel until every component meets
/// its tolerance.
pub fn integrate<V, F>(mut f: F, breaks: &[f64], opts: AdaptiveOptions) -> Result<Adaptive<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    if breaks.len() < 2 {
        return Err(Error::invalid("integration needs at least two break points"));
    }
    let mut heap: BinaryHeap<Panel<V>> = BinaryHeap::new();
    let mut frozen: Vec<Panel<V>> = Vec::new();
    let mut total = V::zero();
    let mut total_err = V::zero();
    let mut total_floor = V::zero();

    let mut initial = Vec::with_capacity(breaks.len() - 1);
    for w in breaks.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::invalid(format!(
                "break points must increase strictly ({} !< {})",
                w[0], w[1]
            )));
        }
        let p = kronrod_panel(&mut f, w[0], w[1]);
        total = total.axpy(1.0, p.value);
        total_err = total_err.axpy(1.0, p.error);
        total_floor = total_floor.axpy(1.0, p.floor);
        initial.push(p);
    }

    let mut scale = V::zero();
    for i in 0..V::DIM {
        scale.set(i, opts.abs_tol.max(opts.rel_tol * total.get(i).abs()));
    }
    let pending = |total: &V, err: &V, floor: &V| -> Vec<bool> {
        (0..V::DIM)
            .map(|i| {
                let e = err.get(i);
                let target = opts.abs_tol.max(opts.rel_tol * total.get(i).abs());
                !(e <= target || e <= 2.0 * floor.get(i))
            })
            .collect()
    };
    let mut active = pending(&total, &total_err, &total_floor);
    for mut p in initial {
        p.priority = priority(&p, &scale, &active);
        heap.push(p);
    }

    loop {
        let now = pending(&total, &total_err, &total_floor);
        if now.iter().all(|&a| !a) {
            break;
        }
        if now != active {
            // re-rank everything against the components still in play
            active = now;
            heap = heap
                .into_vec()
                .into_iter()
                .map(|mut p| {
                    p.priority = priority(&p, &scale, &active);
                    p
                })
                .collect();
        }
        let panels = heap.len() + frozen.len();
        if panels >= opts.max_subdiv {
            return Err(Error::no_convergence(
                "adaptive quadrature",
                format!(
                    "{} panels on [{}, {}], error {:e} vs value {:e}",
                    panels,
                    breaks[0],
                    breaks[breaks.len() - 1],
                    total_err.get(0),
                    total.get(0)
                ),
            ));
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => {
                return Err(Error::no_convergence(
                    "adaptive quadrature",
                    "all panels at roundoff resolution",
                ))
            }
        };
        if !worst.priority.is_finite() && worst.error.get(0).is_nan() {
            return Err(Error::no_convergence(
                "adaptive quadrature",
                format!("non-finite integrand on [{}, {}]", worst.a, worst.b),
            ));
        }
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 8.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs())
        {
            frozen.push(worst);
            continue;
        }
        let left = kronrod_panel(&mut f, worst.a, mid);
        let right = kronrod_panel(&mut f, mid, worst.b);
        total = total
            .axpy(-1.0, worst.value)
            .axpy(1.0, left.value)
            .axpy(1.0, right.value);
        total_err = total_err
            .axpy(-1.0, worst.error)
            .axpy(1.0, left.error)
            .axpy(1.0, right.error);
        total_floor = total_floor
            .axpy(-1.0, worst.floor)
            .axpy(1.0, left.floor)
            .axpy(1.0, right.floor);
        for mut child in [left, right] {
            child.priority = priority(&child, &scale, &active);
            heap.push(child);
        }
    }

    // Re-sum from the panels to shed drift from the running updates.
    let mut value = V::zero();
    let mut error = V::zero();
    let mut count = 0;
    for p in heap.iter().chain(frozen.iter()) {
        value = value.axpy(1.0, p.value);
        error = error.axpy(1.0, p.error);
        count += 1;
    }
    Ok(Adaptive {
        value,
        error,
        panels: count,
    })
}
