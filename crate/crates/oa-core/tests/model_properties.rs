//! Constructor/validator agreement and validation determinism.

use oa_core::{new_annotation, validate, BuildError, Iri, Motivation, ResourceRef, Selector};
use oa_testgen::{gen_annotation, gen_body, gen_motivation, gen_provenance, gen_target, rng};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn generated_annotations_always_validate_clean() {
    let mut rng = rng(0x9e4);
    for case in 0..500 {
        let a = gen_annotation(&mut rng);
        let report = validate(&a);
        assert!(
            report.is_empty(),
            "case {case}: {:?} on {a:?}",
            report.violations()
        );
    }
}

#[test]
fn constructor_success_implies_empty_report() {
    let mut rng = rng(0xc0457);
    let mut accepted = 0;
    for _ in 0..600 {
        let targets: Vec<ResourceRef> = (0..rng.random_range(0..=2))
            .map(|_| gen_target(&mut rng, None))
            .collect();
        let bodies: Vec<ResourceRef> = (0..rng.random_range(0..=2))
            .map(|_| gen_body(&mut rng, Some("stray-class")))
            .collect();
        let motivation = rng.random_bool(0.5).then(|| gen_motivation(&mut rng));
        let provenance = gen_provenance(&mut rng);
        match new_annotation(targets.clone(), bodies, motivation, provenance) {
            Ok(a) => {
                let report = validate(&a);
                assert!(report.is_empty(), "{:?}", report.violations());
                assert!(!a.targets.is_empty());
                accepted += 1;
            }
            Err(BuildError::EmptyTargets) => assert!(targets.is_empty()),
            Err(
                BuildError::InvalidResource { .. }
                | BuildError::InvalidProvenance(_)
                | BuildError::NothingSpecified,
            ) => {}
        }
    }
    assert!(accepted >= 100, "only {accepted} constructions succeeded");
}

#[test]
fn validation_is_deterministic_and_sorted() {
    let mut rng = rng(0xde7e);
    for _ in 0..300 {
        let mut a = gen_annotation(&mut rng);
        // Break things on purpose; the report must stay stable and ordered.
        match rng.random_range(0..4) {
            0 => a.targets.clear(),
            1 => a.targets.push(ResourceRef::tag(
                Iri::new("http://dbpedia.org/resource/Gibraltar").unwrap(),
            )),
            2 => a.bodies.push(ResourceRef::Embedded {
                content: oa_core::EmbeddedContent::text(""),
                dcmi: None,
            }),
            _ => {
                if let Some(ResourceRef::Specific { spec, .. }) = a.targets.first_mut() {
                    spec.selector = Some(Selector::TextPosition { start: 9, end: 1 });
                }
            }
        }
        let first = validate(&a);
        let second = validate(&a);
        assert_eq!(first.violations(), second.violations());
        let mut sorted = first.violations().to_vec();
        sorted.sort_by(|l, r| (&l.path, &l.message).cmp(&(&r.path, &r.message)));
        assert_eq!(first.violations(), sorted.as_slice());
    }
}

#[test]
fn annotations_that_validate_clean_have_targets() {
    let mut rng = rng(0x7a26e7);
    for _ in 0..300 {
        let mut a = gen_annotation(&mut rng);
        if rng.random_bool(0.5) {
            a.targets.clear();
        }
        if validate(&a).is_empty() {
            assert!(!a.targets.is_empty());
        } else if a.targets.is_empty() {
            assert!(validate(&a)
                .violations()
                .iter()
                .any(|v| v.path == "targets"));
        }
    }
}

#[test]
fn motivation_names_round_trip() {
    let mut rng = rng(0x307);
    for _ in 0..200 {
        let m = gen_motivation(&mut rng);
        match m.name() {
            Some(name) => assert_eq!(Motivation::from_name(name), Some(m)),
            None => assert!(matches!(m, Motivation::Extension(_))),
        }
    }
}

proptest! {
    #[test]
    fn iri_normalization_is_idempotent(raw in "[a-zA-Z][a-zA-Z0-9+.-]{0,8}://[!-~]{0,24}") {
        if let Ok(iri) = Iri::new(&raw) {
            let again = Iri::new(iri.as_str()).expect("normalized form stays valid");
            prop_assert_eq!(&again, &iri);
        }
    }

    #[test]
    fn iri_rejects_whitespace_everywhere(
        head in "[a-z]{1,6}", tail in "[ -~]{0,12}", ws in prop::sample::select(vec![' ', '\t', '\n'])
    ) {
        let raw = format!("{head}://{tail}{ws}x");
        prop_assert!(Iri::new(&raw).is_err());
    }
}
