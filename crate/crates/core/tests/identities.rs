use proptest::prelude::*;

use qsb_core::cbergman::{bergman_project, disk_kernel_eval};
use qsb_core::qalg::{Frame, ImaginaryUnit, Quaternion};
use qsb_core::quad::{build_ball_rule, build_disk_rule, integrate_ball, integrate_slice};
use qsb_core::sbergman::{gram_build, second_kind_eval, slice_reproduce};
use qsb_core::slicefn::{
    extend_p, extend_series, fourfold_assemble, fourfold_decompose, restrict_q, split_basis,
    SliceSeries,
};
use qsb_core::{
    c_anti_decompose, complete_frame, ComplexKernel, HoloSeries64, Quat, SliceSeries64,
};

fn quat() -> impl Strategy<Value = Quat> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_map(|(w, x, y, z)| Quat::new(w, x, y, z))
}

fn frame() -> impl Strategy<Value = Frame<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(x, y, z)| x * x + y * y + z * z > 0.01)
        .prop_map(|(x, y, z)| complete_frame(ImaginaryUnit::new(Quat::new(0.0, x, y, z)).unwrap()))
}

fn series(max_degree: usize) -> impl Strategy<Value = SliceSeries64> {
    prop::collection::vec(quat(), 1..=max_degree + 1).prop_map(SliceSeries::new)
}

fn ball_point(radius: f64) -> impl Strategy<Value = Quat> {
    quat().prop_filter("inside", move |q| q.norm() < radius)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn restriction_then_extension_agrees_pointwise(f in series(8), fr in frame(), q in ball_point(0.95)) {
        let g = restrict_q(&f, fr);
        let direct = f.eval(q).unwrap();
        prop_assert!(extend_p(&g, q).unwrap().dist(direct) < 1e-12);
        prop_assert!(extend_series(&g).eval(q).unwrap().dist(direct) < 1e-12);
    }

    #[test]
    fn fourfold_parts_reassemble(f in series(10), fr in frame()) {
        let parts = fourfold_decompose(&f, fr);
        prop_assert!(fourfold_assemble(&parts, fr).max_coeff_diff(&f) < 1e-13);
    }

    #[test]
    fn c_anti_split_of_extension(f in series(6), fr in frame()) {
        let (g, _): (HoloSeries64, _) = split_basis(&f, fr);
        let (fc, fa) = c_anti_decompose(&g).unwrap();
        prop_assert!(fc.add(&fa).max_coeff_diff(&g) < 1e-13);
    }

    #[test]
    fn second_kind_on_a_slice_is_the_disk_kernel(fr in frame(), a in -0.6..0.6f64, b in -0.6..0.6f64, c in -0.6..0.6f64, d in -0.6..0.6f64) {
        let (z, w) = (fr.slice_point(a, b), fr.slice_point(c, d));
        let k = second_kind_eval(z, w, 96).unwrap();
        prop_assert!(k.dist(disk_kernel_eval(z, w).unwrap()) < 1e-11);
    }

    #[test]
    fn slice_reproduction_off_the_slice(f in series(6), fr in frame(), q in ball_point(0.8)) {
        let rule = build_disk_rule(32, 64, Frame::standard()).unwrap();
        let v = slice_reproduce(&f, q, fr, &rule, 32).unwrap();
        prop_assert!(v.dist(f.eval(q).unwrap()) < 1e-10);
    }
}

#[test]
fn projection_of_a_polynomial_is_itself() {
    let frame = Frame::standard();
    let rule = build_disk_rule(8, 16, frame).unwrap();
    let f = HoloSeries64::from_complex(frame, &[(1.0, -0.5), (0.25, 2.0), (0.0, 1.0)]);
    let p = bergman_project(|z| f.eval(z), &rule, &ComplexKernel::disk(frame)).unwrap();
    assert!(p.series.max_coeff_diff(&f) < 1e-13);
}

#[test]
fn ball_volume_and_moment() {
    let rule = build_ball_rule::<f64>(4, 8, 8).unwrap();
    let vol = integrate_ball(|_| Ok(Quat::one()), &rule).unwrap();
    assert!((vol.w - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-13);
    let m = integrate_ball(|q| Ok(Quat::from_real(q.norm_sqr())), &rule).unwrap();
    assert!((m.w - std::f64::consts::PI.powi(2) / 3.0).abs() < 1e-13);
}

#[test]
fn single_precision_pipeline() {
    type Q32 = Quaternion<f32>;
    let frame = Frame::<f32>::standard();
    let f = SliceSeries::new(vec![
        Q32::new(1.0, 0.5, 0.0, 0.0),
        Q32::new(0.0, 0.0, 1.0, 0.0),
    ]);
    let q = Q32::new(0.1, 0.2, 0.3, 0.1);
    let back = extend_p(&restrict_q(&f, frame), q).unwrap();
    assert!(back.dist(f.eval(q).unwrap()) < 1e-6);
    let rule = build_disk_rule::<f32>(4, 8, frame).unwrap();
    let area = integrate_slice(|_| Ok(Q32::one()), &rule).unwrap();
    assert!((area.w - std::f32::consts::PI).abs() < 1e-5);
    let kernel = gram_build(2, &build_ball_rule::<f32>(4, 8, 8).unwrap()).unwrap();
    assert!((kernel.gram[0][0] - std::f32::consts::PI.powi(2) / 2.0).abs() < 1e-4);
}
