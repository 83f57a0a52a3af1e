//! Seeded random inputs for property checks and the verification suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::holo::HoloSeries;
use crate::qalg::{complete_frame, Frame, ImaginaryUnit, Quaternion};
use crate::slicefn::SliceSeries;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed derived from a label (FNV-1a).
pub fn seed_for(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn quaternion(rng: &mut SampleRng, scale: f64) -> Quaternion<f64> {
    Quaternion::new(
        rng.gen_range(-scale..=scale),
        rng.gen_range(-scale..=scale),
        rng.gen_range(-scale..=scale),
        rng.gen_range(-scale..=scale),
    )
}

pub fn unit(rng: &mut SampleRng) -> ImaginaryUnit<f64> {
    loop {
        let v = quaternion(rng, 1.0).vector();
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return ImaginaryUnit::new(v).expect("nonzero vector");
        }
    }
}

pub fn frame(rng: &mut SampleRng) -> Frame<f64> {
    complete_frame(unit(rng))
}

/// Uniform direction in ℝ⁴, modulus uniform in `[0, radius)`.
pub fn ball_point(rng: &mut SampleRng, radius: f64) -> Quaternion<f64> {
    loop {
        let q = quaternion(rng, 1.0);
        let n = q.norm();
        if n > 1e-3 && n <= 1.0 {
            return q.scale(rng.gen_range(0.0..radius) / n);
        }
    }
}

/// Point of the ball whose imaginary unit stays away from `±frame.i`.
pub fn off_slice_point(rng: &mut SampleRng, frame: Frame<f64>, radius: f64) -> Quaternion<f64> {
    loop {
        let q = ball_point(rng, radius);
        let v = q.vector();
        let n = v.norm();
        if n > 0.05 * radius && (v.dot(frame.i.q()) / n).abs() < 0.95 {
            return q;
        }
    }
}

pub fn slice_point(rng: &mut SampleRng, frame: Frame<f64>, radius: f64) -> Quaternion<f64> {
    loop {
        let (x, y) = (
            rng.gen_range(-radius..radius),
            rng.gen_range(-radius..radius),
        );
        if x * x + y * y < radius * radius {
            return frame.slice_point(x, y);
        }
    }
}

pub fn slice_series(rng: &mut SampleRng, degree: usize) -> SliceSeries<f64> {
    SliceSeries::new((0..=degree).map(|_| quaternion(rng, 1.0)).collect())
}

pub fn real_series(rng: &mut SampleRng, degree: usize) -> SliceSeries<f64> {
    let c: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    SliceSeries::from_real(&c)
}

pub fn holo_series(rng: &mut SampleRng, frame: Frame<f64>, degree: usize) -> HoloSeries<f64> {
    let c: Vec<(f64, f64)> = (0..=degree)
        .map(|_| (rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        .collect();
    HoloSeries::from_complex(frame, &c)
}
