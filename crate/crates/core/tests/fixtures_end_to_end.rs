use std::path::PathBuf;

use proptest::prelude::*;
use twisted_core::applications::{free_loop_model, loop_product_table, path_space_model};
use twisted_core::graded_core::q;
use twisted_core::model_io::{load_model, parse_model_str, to_json, to_model_file};
use twisted_core::{parse_model_file, LoadedModel};

fn fixture(name: &str) -> LoadedModel {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name]
        .iter()
        .collect();
    parse_model_file(&p).unwrap()
}

#[test]
fn every_fixture_round_trips() {
    for f in [
        "s2.json",
        "s3.json",
        "cp2.json",
        "hopf.json",
        "su2-s4.json",
        "trivial-bundle.json",
    ] {
        let m = fixture(f);
        let again = load_model(&parse_model_str(&to_json(&to_model_file(&m))).unwrap()).unwrap();
        assert_eq!(again.manifold, m.manifold, "{f}");
        assert_eq!(again.bundle, m.bundle, "{f}");
    }
}

#[test]
fn cdga_and_coalgebra_files_agree_on_cp2() {
    let a = free_loop_model(&fixture("cp2.json").manifold, 7).unwrap();
    let b = free_loop_model(&fixture("cp2-cdga.json").manifold, 7).unwrap();
    assert_eq!(a.betti(), b.betti());
    let p = path_space_model(&fixture("cp2-cdga.json").manifold, 7).unwrap();
    assert_eq!(p.betti(), [1, 0, 0, 0, 0, 0, 0, 0]);
}

#[test]
fn padded_s2_model_gives_the_same_loop_homology() {
    let a = free_loop_model(&fixture("s2.json").manifold, 6).unwrap();
    let b = free_loop_model(&fixture("s2-padded-cdga.json").manifold, 6).unwrap();
    assert_eq!(a.betti(), b.betti());
}

#[test]
fn trivial_bundle_is_a_product() {
    let b = fixture("trivial-bundle.json").bundle.unwrap();
    let r = twisted_core::applications::bundle_model(
        &b,
        5,
        twisted_core::applications::BundleVariant::Homology,
    )
    .unwrap();
    // H_*(S²) ⊗ H_*(S³) through degree 5.
    assert_eq!(r.betti, [1, 0, 1, 1, 0, 1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn fundamental_class_is_a_unit_on_cp2(p in 0usize..=6, i in 0usize..1) {
        let (mh, table) = loop_product_table(&fixture("cp2.json").manifold, 6).unwrap();
        prop_assume!(i < mh.betti()[p]);
        // The fundamental class e4⊗1 is the unique class in degree 4 with a unit on the right.
        let unit = (0..mh.betti()[4])
            .find(|&u| (0..mh.betti()[0]).all(|j| {
                table.product(4, u, 0, j).map(|v| v.iter().enumerate().all(|(k, c)| *c == q(i64::from(k == j)))).unwrap_or(false)
            }))
            .expect("a unit class");
        let mut expected = vec![q(0); mh.betti()[p]];
        expected[i] = q(1);
        prop_assert_eq!(table.product(4, unit, p, i), Some(&expected));
        prop_assert_eq!(table.product(p, i, 4, unit), Some(&expected));
    }
}
