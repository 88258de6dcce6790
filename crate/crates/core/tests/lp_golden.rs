//! Frozen LP exports for tiny instances, plus a round trip through an
//! independent LP reader. Set `P2S1_BLESS=1` to rewrite the fixtures.

use std::path::PathBuf;

use lp_parser_rs::problem::LpProblem;
use p2s1::milp::{export_lp, Formulation, VarKind};
use p2s1::Instance;

fn instances() -> [(&'static str, Instance); 2] {
    [
        ("n1", Instance::new(&[(2, 3, 4)]).unwrap()),
        ("n2", Instance::new(&[(1, 2, 1), (2, 1, 1)]).unwrap()),
    ]
}

const FORMS: [(Formulation, &str); 3] = [
    (Formulation::Cf, "cf"),
    (Formulation::CfPlus, "cf_plus"),
    (Formulation::Tif, "tif"),
];

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/lp")
        .join(name)
}

#[test]
fn exports_match_frozen_fixtures() {
    let bless = std::env::var_os("P2S1_BLESS").is_some();
    for (label, inst) in instances() {
        for (form, stem) in FORMS {
            let text = export_lp(&form.build(&inst, None).unwrap());
            let path = fixture(&format!("{stem}_{label}.lp"));
            if bless {
                std::fs::write(&path, &text).unwrap();
            }
            let frozen =
                std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("missing fixture {}: {e}", path.display()));
            assert_eq!(text, frozen, "{} drifted", path.display());
        }
    }
}

#[test]
fn exports_parse_in_independent_reader() {
    for (label, inst) in instances() {
        for (form, stem) in FORMS {
            let model = form.build(&inst, None).unwrap();
            let text = export_lp(&model);
            let parsed = LpProblem::parse(&text).unwrap_or_else(|e| panic!("{stem}_{label}: {e}"));
            assert_eq!(parsed.constraint_count(), model.constraints().len(), "{stem}_{label}");
            assert_eq!(parsed.variable_count(), model.variables().len(), "{stem}_{label}");
            assert_eq!(parsed.objective_count(), 1);
            let binaries = model.count_vars(VarKind::Binary);
            assert!(binaries > 0);
        }
    }
}

#[test]
fn names_use_plain_characters() {
    let inst = Instance::new(&[(1, 2, 1), (2, 1, 1), (3, 3, 2)]).unwrap();
    let plain = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    for form in [Formulation::Cf, Formulation::CfPlus, Formulation::Tif] {
        let model = form.build(&inst, None).unwrap();
        assert!(model.variables().iter().all(|v| plain(&v.name)));
        assert!(model.constraints().iter().all(|c| plain(&c.name)));
    }
}
