use ct_compand::modulate::NakaRushton;
use ct_compand::phantom::{mandible_phantom, PhantomSpec};
use ct_compand::{compand, BitDepth, CompandParams};
use ct_compand_web::{response_curves, to_rgba, Phantom};

#[test]
fn curves_are_flattened_per_gamma() {
    let gammas = [0.5, 1.0, 4.0];
    let v = response_curves(&gammas, 50, 2.0);
    assert_eq!(v.len(), 150);
    let nr = NakaRushton::default();
    for (i, g) in gammas.iter().enumerate() {
        // Sample 25 of 50 sits at C = 1, where every curve passes through 1.
        assert!((v[i * 50 + 24] - 1.0).abs() < 1e-12);
        assert_eq!(v[i * 50 + 49], nr.response(2.0, *g));
    }
}

#[test]
fn compand_matches_library_render() {
    let mut demo = Phantom::build(128, 7).unwrap();
    let rgba = demo.compand_rgba(30.0, 60.0, 0.7, 0.1, 0.05).unwrap();
    assert_eq!(rgba.len(), 128 * 128 * 4);

    let slice = mandible_phantom(&PhantomSpec { size: 128, seed: 7, ..Default::default() });
    let want = compand(&slice, &CompandParams::default(), BitDepth::Eight).unwrap();
    assert_eq!(rgba, to_rgba(&want));
    assert!(demo.lesion_rms() > 0.0);
}

#[test]
fn sliders_change_the_render() {
    let mut demo = Phantom::build(128, 7).unwrap();
    let a = demo.compand_rgba(30.0, 60.0, 0.7, 0.1, 0.05).unwrap();
    let b = demo.compand_rgba(5.0, 5.0, 0.7, 0.1, 0.05).unwrap();
    assert_ne!(a, b);
    assert!(demo.compand_rgba(30.0, 60.0, -1.0, 0.1, 0.05).is_err());
}

#[test]
fn window_render_and_errors() {
    let mut demo = Phantom::build(64, 1).unwrap();
    let rgba = demo.window_rgba(40.0, 400.0).unwrap();
    assert_eq!(rgba.len(), 64 * 64 * 4);
    assert!(rgba.chunks(4).all(|p| p[0] == p[1] && p[1] == p[2] && p[3] == 255));
    assert!(demo.window_rgba(40.0, 0.0).is_err());
    assert!(Phantom::build(32, 1).is_err());
}
