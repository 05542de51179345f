#![no_main]

//! Anything the parser accepts must print to text that parses back to the
//! same spec without warnings.

use libfuzzer_sys::fuzz_target;
use photon_filter::experiment::{parse_experiment, AncillaSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(first) = parse_experiment(text) else {
        return;
    };
    let printed = first.spec.to_string();
    let second = parse_experiment(&printed).expect("printed spec parses");
    assert!(second.warnings.is_empty(), "{printed}");
    assert_eq!(second.spec.n, first.spec.n);
    match (&first.spec.ancilla, &second.spec.ancilla) {
        (AncillaSpec::Explicit(x), AncillaSpec::Explicit(y)) => {
            assert_eq!(x.len(), y.len());
            for ((pa, a), (pb, b)) in x.iter().zip(y) {
                assert_eq!(pa, pb);
                assert!((a - b).norm() < 1e-12);
            }
        }
        (a, b) => assert_eq!(a, b),
    }
    assert_eq!(second.spec.input.len(), first.spec.input.len());
    for (a, b) in first.spec.input.iter().zip(&second.spec.input) {
        assert!((a.weight - b.weight).abs() < 1e-12);
        for ((pa, x), (pb, y)) in a.terms.iter().zip(&b.terms) {
            assert_eq!(pa, pb);
            assert!((x - y).norm() < 1e-12);
        }
    }
});
