use ct_compand::ingest::{encode_raw_float, load_raw_float};
use ct_compand::phantom::{mandible_phantom, PhantomSpec};

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/mandible_phantom.ctf");

#[test]
fn committed_phantom_matches_generator() {
    let fixture = load_raw_float(FIXTURE).unwrap();
    let fresh = mandible_phantom(&PhantomSpec::default());
    assert_eq!((fixture.width(), fixture.height()), (256, 256));
    // Stored as f32; allow for libm differences in the noise generator.
    let worst = fixture
        .values()
        .as_slice()
        .iter()
        .zip(fresh.values().as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-3, "fixture drifted from generator by {worst} HU");
}

#[test]
fn fixture_bytes_are_canonical() {
    let bytes = std::fs::read(FIXTURE).unwrap();
    let slice = load_raw_float(FIXTURE).unwrap();
    assert_eq!(encode_raw_float(slice.values()).unwrap(), bytes);
}
