//! The indexed store against a linear-scan oracle, plus durability checks.

use oa_core::{
    Annotation, AnnotationStore, Iri, QueryFilter, ResourceRef, StoreError, StoredAnnotation,
};
use oa_testgen::{gen_annotation, gen_query_filter, rng};
use rand::Rng;

struct Shadow {
    id: Iri,
    annotation: Annotation,
    deleted: bool,
}

fn filter_matches(a: &Annotation, f: &QueryFilter) -> bool {
    let target_ok = f.target_source.as_ref().is_none_or(|want| {
        a.targets.iter().any(|t| match t {
            ResourceRef::External { iri, .. } => iri == want,
            ResourceRef::Specific { spec, .. } => &spec.source == want,
            _ => false,
        })
    });
    let tag_ok = f.tag_concept.as_ref().is_none_or(|want| {
        a.bodies
            .iter()
            .any(|b| matches!(b, ResourceRef::SemanticTag { concept } if concept == want))
    });
    let author_ok = f.author.as_ref().is_none_or(|want| {
        a.provenance.annotated_by.as_ref().is_some_and(|agent| {
            agent.name.as_deref() == Some(want.as_str())
                || agent.id.as_ref().is_some_and(|id| id.as_str() == want)
        })
    });
    let since_ok = f
        .since
        .is_none_or(|since| a.provenance.annotated_at.is_some_and(|at| at >= since));
    let motivation_ok = f
        .motivation
        .as_ref()
        .is_none_or(|want| a.motivation.as_ref() == Some(want));
    target_ok && tag_ok && author_ok && since_ok && motivation_ok
}

fn oracle(shadow: &[Shadow], f: &QueryFilter) -> (Vec<Iri>, usize) {
    let hits: Vec<&Shadow> = shadow
        .iter()
        .filter(|s| !s.deleted && filter_matches(&s.annotation, f))
        .collect();
    let total = hits.len();
    let ids = hits
        .iter()
        .skip(f.offset)
        .take(f.limit)
        .map(|s| s.id.clone())
        .collect();
    (ids, total)
}

#[test]
fn query_equals_linear_scan() {
    let mut rng = rng(0x40ac1e);
    let dir = tempfile::tempdir().unwrap();
    let base = Iri::new("http://store.example").unwrap();
    let store = AnnotationStore::open(dir.path(), &base).unwrap();
    let mut shadow: Vec<Shadow> = Vec::new();

    for _ in 0..120 {
        let a = gen_annotation(&mut rng);
        let id = store.put(a).unwrap();
        let annotation = store.get(&id).unwrap();
        shadow.push(Shadow {
            id,
            annotation,
            deleted: false,
        });
        if rng.random_bool(0.15) && !shadow.is_empty() {
            let victim = rng.random_range(0..shadow.len());
            if !shadow[victim].deleted {
                store.delete(&shadow[victim].id).unwrap();
                shadow[victim].deleted = true;
            }
        }
    }

    let annotations: Vec<Annotation> = shadow.iter().map(|s| s.annotation.clone()).collect();
    for case in 0..600 {
        let filter = gen_query_filter(&mut rng, &annotations);
        let page = store.query(&filter).unwrap();
        let (want_ids, want_total) = oracle(&shadow, &filter);
        let got_ids: Vec<Iri> = page.items.iter().map(|s| s.id.clone()).collect();
        assert_eq!(page.total, want_total, "case {case}: total for {filter:?}");
        assert_eq!(got_ids, want_ids, "case {case}: page for {filter:?}");
    }
}

#[test]
fn reopen_preserves_every_visible_record() {
    let mut rng = rng(0xd15c);
    let dir = tempfile::tempdir().unwrap();
    let base = Iri::new("http://store.example").unwrap();
    let mut shadow: Vec<Shadow> = Vec::new();
    {
        let store = AnnotationStore::open(dir.path(), &base).unwrap();
        for _ in 0..60 {
            let a = gen_annotation(&mut rng);
            let id = store.put(a).unwrap();
            let annotation = store.get(&id).unwrap();
            let deleted = rng.random_bool(0.2);
            if deleted {
                store.delete(&id).unwrap();
            }
            shadow.push(Shadow {
                id,
                annotation,
                deleted,
            });
        }
    }
    let store = AnnotationStore::open(dir.path(), &base).unwrap();
    for s in &shadow {
        match store.get_stored(&s.id) {
            Ok(StoredAnnotation {
                annotation,
                deleted,
                ..
            }) => {
                assert!(!s.deleted);
                assert!(!deleted);
                assert_eq!(annotation, s.annotation, "reopen changed {}", s.id);
            }
            Err(StoreError::Gone(_)) => assert!(s.deleted, "{} wrongly tombstoned", s.id),
            Err(other) => panic!("{}: {other:?}", s.id),
        }
    }
    let next = store.put(gen_annotation(&mut rng)).unwrap();
    assert_eq!(
        next.as_str(),
        format!("http://store.example/annotations/{}", shadow.len() + 1)
    );
}

#[test]
fn pagination_windows_tile_the_full_result() {
    let mut rng = rng(0x9a9e);
    let dir = tempfile::tempdir().unwrap();
    let base = Iri::new("http://store.example").unwrap();
    let store = AnnotationStore::open(dir.path(), &base).unwrap();
    for _ in 0..40 {
        store.put(gen_annotation(&mut rng)).unwrap();
    }
    let everything = store
        .query(&QueryFilter {
            limit: 1000,
            ..QueryFilter::default()
        })
        .unwrap();
    let mut stitched = Vec::new();
    let step = 7;
    let mut offset = 0;
    loop {
        let page = store
            .query(&QueryFilter {
                limit: step,
                offset,
                ..QueryFilter::default()
            })
            .unwrap();
        assert_eq!(page.total, everything.total);
        if page.items.is_empty() {
            break;
        }
        stitched.extend(page.items);
        offset += step;
    }
    assert_eq!(stitched.len(), everything.items.len());
    for (a, b) in stitched.iter().zip(everything.items.iter()) {
        assert_eq!(a.id, b.id);
    }
}
