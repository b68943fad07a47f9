//! Seeded random generators and shared fixtures for the test suites.
//!
//! Generated annotations are valid by construction: they satisfy every
//! model invariant, so `validate` on a generated annotation always returns
//! an empty report. The generators lean on awkward strings (quotes,
//! newlines, combining characters, astral-plane symbols) because those are
//! where serializers break.

use chrono::{DateTime, Duration, Utc};
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

use oa_core::{
    new_annotation, Agent, Annotation, AnnoteaBody, AnnoteaRecord, DcmiType, EmbeddedContent, Iri,
    Literal, Motivation, Object, Provenance, QueryFilter, ResourceRef, Selector, SpecificResource,
    State, Style, Subject, SvgShape, Triple, TripleGraph,
};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

const WORDS: &[&str] = &[
    "map",
    "strait",
    "pillars",
    "inscription",
    "galaxy",
    "nebula",
    "margin",
    "gloss",
    "antiquity",
    "mediterranean",
];

const GNARLY: &[&str] = &[
    "plain text",
    "a \"quoted\" remark",
    "back\\slash",
    "line\nbreak",
    "tab\there",
    "curly {braces} and <angles>",
    "h\u{e9}llo w\u{f6}rld",
    "\u{1d11e} clef and \u{1f30d} globe",
    "\u{646}\u{635} \u{639}\u{631}\u{628}\u{64a}",
    "trailing space ",
    "combining e\u{301} acute",
];

pub fn gen_text(rng: &mut impl Rng) -> String {
    if rng.random_bool(0.5) {
        (*GNARLY.choose(rng).unwrap()).to_string()
    } else {
        let n = rng.random_range(1..=4);
        (0..n)
            .map(|_| *WORDS.choose(rng).unwrap())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn gen_iri(rng: &mut impl Rng) -> Iri {
    let n: u32 = rng.random_range(0..100_000);
    let raw = match rng.random_range(0..6) {
        0 => format!("http://example.org/pages/{n}"),
        1 => format!("https://maphub.example/maps/{n}.jpg"),
        2 => format!("http://dbpedia.org/resource/Entry{n}"),
        3 => format!("urn:example:{n}"),
        4 => format!("http://images.example/item?id={n}&rev=2"),
        _ => format!("https://notes.example/n%C3%B6te/{n}#part"),
    };
    Iri::new(raw).expect("generator iris are well formed")
}

pub fn gen_timestamp(rng: &mut impl Rng) -> DateTime<Utc> {
    let secs = rng.random_range(1_000_000_000..1_900_000_000);
    let nanos: u32 = match rng.random_range(0..4) {
        0 => 0,
        1 => rng.random_range(0..1_000) * 1_000_000,
        2 => rng.random_range(0..1_000_000) * 1_000,
        _ => rng.random_range(0..1_000_000_000),
    };
    DateTime::from_timestamp(secs, nanos).expect("in-range timestamp")
}

pub fn gen_dcmi(rng: &mut impl Rng) -> DcmiType {
    match rng.random_range(0..8) {
        0 => DcmiType::Image,
        1 => DcmiType::Sound,
        2 => DcmiType::Text,
        3 => DcmiType::MovingImage,
        4 => DcmiType::Dataset,
        5 => DcmiType::InteractiveResource,
        _ => {
            let label = ["Map", "Score", "Chart", "Sketch"].choose(rng).unwrap();
            DcmiType::Other((*label).to_string())
        }
    }
}

pub fn gen_content(rng: &mut impl Rng) -> EmbeddedContent {
    let text = if rng.random_bool(0.1) {
        String::new()
    } else {
        gen_text(rng)
    };
    let mut content = EmbeddedContent::text(text);
    if content.text.is_empty() || rng.random_bool(0.4) {
        let media = [
            "text/plain",
            "text/html",
            "application/xhtml+xml",
            "text/css",
        ]
        .choose(rng)
        .unwrap();
        content = content.with_media_type(*media);
    }
    if rng.random_bool(0.3) {
        let lang = ["en", "de", "pt-BR", "ar"].choose(rng).unwrap();
        content = content.with_language(*lang);
    }
    content
}

fn coord(rng: &mut impl Rng) -> f64 {
    if rng.random_bool(0.5) {
        rng.random_range(-500..500) as f64
    } else {
        rng.random_range(-50_000..50_000) as f64 / 100.0
    }
}

fn positive(rng: &mut impl Rng) -> f64 {
    rng.random_range(1..10_000) as f64 / 100.0
}

pub fn gen_shape(rng: &mut impl Rng) -> SvgShape {
    match rng.random_range(0..3) {
        0 => SvgShape::Circle {
            cx: coord(rng),
            cy: coord(rng),
            r: positive(rng),
        },
        1 => SvgShape::Rect {
            x: coord(rng),
            y: coord(rng),
            w: positive(rng),
            h: positive(rng),
        },
        _ => {
            let n = rng.random_range(3..=6);
            SvgShape::Polygon {
                vertices: (0..n).map(|_| (coord(rng), coord(rng))).collect(),
            }
        }
    }
}

pub fn gen_selector(rng: &mut impl Rng) -> Selector {
    match rng.random_range(0..4) {
        0 => {
            let start = rng.random_range(0..500);
            Selector::TextPosition {
                start,
                end: start + rng.random_range(0..100),
            }
        }
        1 => Selector::TextQuote {
            exact: gen_text(rng),
            prefix: rng.random_bool(0.6).then(|| gen_text(rng)),
            suffix: rng.random_bool(0.6).then(|| gen_text(rng)),
        },
        2 => {
            let value = [
                "xywh=10,20,30,40",
                "t=10,20",
                "t=,5.5",
                "t=npt:4.5,",
                "namedsection",
                "xpointer(/html/p[3])",
                "page=4",
            ]
            .choose(rng)
            .unwrap();
            Selector::Fragment {
                value: (*value).to_string(),
                conforms_to: rng
                    .random_bool(0.5)
                    .then(|| Iri::new("http://www.w3.org/TR/media-frags/").unwrap()),
            }
        }
        _ => Selector::SvgArea {
            shape: gen_shape(rng),
        },
    }
}

pub fn gen_state(rng: &mut impl Rng) -> State {
    if rng.random_bool(0.5) {
        let pool = [
            ("Accept", "image/jpeg"),
            ("Accept-Language", "en-GB"),
            ("If-None-Match", "\"etag-77\""),
            ("X-Client", "maphub/2.1"),
        ];
        let n = rng.random_range(1..=3);
        State::HttpRequest {
            headers: (0..n)
                .map(|_| {
                    let (name, value) = pool.choose(rng).unwrap();
                    ((*name).to_string(), (*value).to_string())
                })
                .collect(),
        }
    } else {
        State::Time {
            source_date: gen_timestamp(rng),
        }
    }
}

pub fn gen_graph(rng: &mut impl Rng) -> TripleGraph {
    let mut graph = if rng.random_bool(0.5) {
        TripleGraph::named(gen_iri(rng))
    } else {
        TripleGraph::new()
    };
    for _ in 0..rng.random_range(1..=4) {
        let subject = if rng.random_bool(0.4) {
            Subject::Blank(format!("n{}", rng.random_range(0..3)))
        } else {
            Subject::Iri(gen_iri(rng))
        };
        let object = match rng.random_range(0..4) {
            0 => Object::Iri(gen_iri(rng)),
            1 => Object::Blank(format!("n{}", rng.random_range(0..3))),
            2 => Literal::simple(gen_text(rng)).into(),
            _ => {
                if rng.random_bool(0.5) {
                    Literal::lang(gen_text(rng), "pt-BR").into()
                } else {
                    Literal::typed(
                        format!("{}", rng.random_range(0..1000)),
                        Iri::new("http://www.w3.org/2001/XMLSchema#integer").unwrap(),
                    )
                    .into()
                }
            }
        };
        graph.insert(Triple::new(subject, gen_iri(rng), object));
    }
    graph
}

pub fn gen_specific(rng: &mut impl Rng, style_class: Option<&str>) -> SpecificResource {
    let mut spec = SpecificResource {
        source: gen_iri(rng),
        selector: rng.random_bool(0.7).then(|| gen_selector(rng)),
        state: rng.random_bool(0.3).then(|| gen_state(rng)),
        style_class: style_class
            .filter(|_| rng.random_bool(0.5))
            .map(str::to_string),
    };
    if spec.selector.is_none() && spec.state.is_none() && spec.style_class.is_none() {
        spec.selector = Some(gen_selector(rng));
    }
    spec
}

pub fn gen_target(rng: &mut impl Rng, style_class: Option<&str>) -> ResourceRef {
    if rng.random_bool(0.5) {
        ResourceRef::External {
            iri: gen_iri(rng),
            dcmi: rng.random_bool(0.4).then(|| gen_dcmi(rng)),
        }
    } else {
        ResourceRef::Specific {
            spec: gen_specific(rng, style_class),
            dcmi: rng.random_bool(0.2).then(|| gen_dcmi(rng)),
        }
    }
}

pub fn gen_body(rng: &mut impl Rng, style_class: Option<&str>) -> ResourceRef {
    match rng.random_range(0..5) {
        0 => ResourceRef::External {
            iri: gen_iri(rng),
            dcmi: rng.random_bool(0.4).then(|| gen_dcmi(rng)),
        },
        1 => ResourceRef::Embedded {
            content: gen_content(rng),
            dcmi: rng.random_bool(0.3).then(|| gen_dcmi(rng)),
        },
        2 => ResourceRef::SemanticTag {
            concept: gen_iri(rng),
        },
        3 => ResourceRef::Graph {
            graph: gen_graph(rng),
        },
        _ => ResourceRef::Specific {
            spec: gen_specific(rng, style_class),
            dcmi: rng.random_bool(0.2).then(|| gen_dcmi(rng)),
        },
    }
}

pub fn gen_agent(rng: &mut impl Rng) -> Agent {
    match rng.random_range(0..3) {
        0 => Agent::named(gen_text(rng)),
        1 => Agent {
            id: Some(gen_iri(rng)),
            name: None,
        },
        _ => Agent {
            id: Some(gen_iri(rng)),
            name: Some(gen_text(rng)),
        },
    }
}

pub fn gen_provenance(rng: &mut impl Rng) -> Provenance {
    let mut p = Provenance::default();
    if rng.random_bool(0.7) {
        p.annotated_by = Some(gen_agent(rng));
    }
    if rng.random_bool(0.7) {
        p.annotated_at = Some(gen_timestamp(rng));
    }
    if rng.random_bool(0.4) {
        p.serialized_by = Some(gen_agent(rng));
    }
    if rng.random_bool(0.5) {
        let base = p.annotated_at.unwrap_or_else(|| gen_timestamp(rng));
        p.serialized_at = Some(base + Duration::seconds(rng.random_range(0..100_000)));
    }
    p
}

pub fn gen_motivation(rng: &mut impl Rng) -> Motivation {
    match rng.random_range(0..7) {
        0 => Motivation::Commenting,
        1 => Motivation::Tagging,
        2 => Motivation::Bookmarking,
        3 => Motivation::Questioning,
        4 => Motivation::Replying,
        5 => Motivation::Describing,
        _ => Motivation::Extension(gen_iri(rng)),
    }
}

fn gen_extensions(rng: &mut impl Rng) -> serde_json::Map<String, serde_json::Value> {
    let mut out = serde_json::Map::new();
    let keys = [
        "ex:reviewed",
        "http://example.org/vocab#weight",
        "localNote",
    ];
    for key in keys {
        if rng.random_bool(0.2) {
            let value = match rng.random_range(0..3) {
                0 => serde_json::Value::String(gen_text(rng)),
                1 => serde_json::json!(rng.random_range(0..100)),
                _ => serde_json::json!({ "score": rng.random_range(0..10), "ok": true }),
            };
            out.insert(key.to_string(), value);
        }
    }
    out
}

/// A random annotation satisfying every model invariant.
pub fn gen_annotation(rng: &mut impl Rng) -> Annotation {
    let style_class = rng
        .random_bool(0.25)
        .then(|| (*["halfspeed", "red-box", "hl2"].choose(rng).unwrap()).to_string());
    let style = style_class.as_ref().map(|class| Style {
        styled_by: EmbeddedContent::text(format!(".{class} {{ color: red }}"))
            .with_media_type("text/css"),
        style_class: Some(class.clone()),
    });
    let targets = (0..rng.random_range(1..=2))
        .map(|_| gen_target(rng, style_class.as_deref()))
        .collect();
    let bodies = (0..rng.random_range(0..=2))
        .map(|_| gen_body(rng, style_class.as_deref()))
        .collect();
    Annotation {
        id: None,
        bodies,
        targets,
        motivation: rng.random_bool(0.7).then(|| gen_motivation(rng)),
        provenance: gen_provenance(rng),
        style,
        extensions: gen_extensions(rng),
    }
}

/// A random valid Annotea record (annotates and body always present).
pub fn gen_annotea_record(rng: &mut impl Rng) -> AnnoteaRecord {
    let body = if rng.random_bool(0.5) {
        AnnoteaBody::Resource(gen_iri(rng))
    } else {
        AnnoteaBody::Text(format!("<p>{}</p>", gen_text(rng)))
    };
    let context = rng.random_bool(0.5).then(|| {
        let pool = [
            "xpointer(/html/body/p[3])",
            "xpointer(string-range(//h1,'Pillars'))",
            "xpointer(id('margin')/span[2])",
        ];
        (*pool.choose(rng).unwrap()).to_string()
    });
    let created = rng.random_bool(0.7).then(|| gen_timestamp(rng));
    let modified = rng.random_bool(0.5).then(|| {
        created.unwrap_or_else(|| gen_timestamp(rng)) + Duration::seconds(rng.random_range(0..9999))
    });
    let subclass = match rng.random_range(0..8) {
        0 | 1 => None,
        2 => Some("Question".to_string()),
        3 => Some("Comment".to_string()),
        4 => Some("Example".to_string()),
        _ => {
            let pool = [
                "SeeAlso",
                "Advice",
                "Zany Idea",
                "\u{dc}berschrift",
                "\u{6ce8}\u{91c8}",
            ];
            Some((*pool.choose(rng).unwrap()).to_string())
        }
    };
    AnnoteaRecord {
        annotates: Some(gen_iri(rng)),
        body: Some(body),
        context,
        author: rng.random_bool(0.7).then(|| gen_text(rng)),
        created,
        modified,
        subclass,
    }
}

/// A filter biased toward values that actually occur in `anns`, so oracle
/// runs exercise hits as well as misses.
pub fn gen_query_filter(rng: &mut impl Rng, anns: &[Annotation]) -> QueryFilter {
    fn pick<T: Clone>(rng: &mut impl Rng, pool: &[T]) -> Option<T> {
        if pool.is_empty() || rng.random_bool(0.2) {
            None
        } else {
            pool.choose(rng).cloned()
        }
    }
    let mut targets = Vec::new();
    let mut tags = Vec::new();
    let mut authors = Vec::new();
    let mut motivations = Vec::new();
    let mut stamps = Vec::new();
    for a in anns {
        for t in &a.targets {
            match t {
                ResourceRef::External { iri, .. } => targets.push(iri.clone()),
                ResourceRef::Specific { spec, .. } => targets.push(spec.source.clone()),
                _ => {}
            }
        }
        for b in &a.bodies {
            if let ResourceRef::SemanticTag { concept } = b {
                tags.push(concept.clone());
            }
        }
        if let Some(agent) = &a.provenance.annotated_by {
            if let Some(name) = &agent.name {
                authors.push(name.clone());
            }
            if let Some(id) = &agent.id {
                authors.push(id.to_string());
            }
        }
        if let Some(m) = &a.motivation {
            motivations.push(m.clone());
        }
        if let Some(at) = a.provenance.annotated_at {
            stamps.push(at);
        }
    }
    QueryFilter {
        target_source: rng
            .random_bool(0.4)
            .then(|| pick(rng, &targets).unwrap_or_else(|| gen_iri(rng))),
        tag_concept: rng
            .random_bool(0.3)
            .then(|| pick(rng, &tags).unwrap_or_else(|| gen_iri(rng))),
        author: rng
            .random_bool(0.3)
            .then(|| pick(rng, &authors).unwrap_or_else(|| gen_text(rng))),
        since: rng.random_bool(0.3).then(|| {
            pick(rng, &stamps)
                .map(|t| t + Duration::seconds(rng.random_range(-5000..5000)))
                .unwrap_or_else(|| gen_timestamp(rng))
        }),
        motivation: rng
            .random_bool(0.3)
            .then(|| pick(rng, &motivations).unwrap_or_else(|| gen_motivation(rng))),
        limit: rng.random_range(1..=25),
        offset: rng.random_range(0..=30),
    }
}

/// Short documents over small alphabets, so quotes repeat and ambiguity
/// actually occurs; one alphabet mixes multi-byte and combining characters.
pub fn gen_doc_string(rng: &mut impl Rng) -> String {
    let alphabets: [&[&str]; 4] = [
        &["a", "b"],
        &["a", "b", "c", " "],
        &["the ", "cat ", "sat ", "on ", "mat "],
        &[
            "\u{3b1}",
            "\u{3b2}",
            "\u{1d11e}",
            "\u{e9}",
            "e\u{301}",
            "e",
            " ",
        ],
    ];
    let alphabet = alphabets.choose(rng).unwrap();
    let len = rng.random_range(0..=60);
    (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

fn fixed(s: &str) -> DateTime<Utc> {
    s.parse().expect("fixture timestamp")
}

fn fixture_iri(s: &str) -> Iri {
    Iri::new(s).expect("fixture iri")
}

/// A historical map image tagged with the DBpedia entries for Gibraltar
/// and Hercules.
pub fn figure3() -> Annotation {
    new_annotation(
        vec![ResourceRef::external(fixture_iri(
            "http://maphub.example/maps/universalis-1507.jpg",
        ))],
        vec![
            ResourceRef::tag(fixture_iri("http://dbpedia.org/resource/Gibraltar")),
            ResourceRef::tag(fixture_iri("http://dbpedia.org/resource/Hercules")),
        ],
        Some(Motivation::Tagging),
        Provenance {
            annotated_by: Some(Agent::named("behas")),
            annotated_at: Some(fixed("2013-01-28T12:00:00Z")),
            ..Provenance::default()
        },
    )
    .expect("figure3 fixture is valid")
}

/// An image of a group of galaxies annotated with a video about it.
pub fn figure5() -> Annotation {
    new_annotation(
        vec![ResourceRef::External {
            iri: fixture_iri("http://hubblesite.example/images/deep-field.jpg"),
            dcmi: Some(DcmiType::Image),
        }],
        vec![ResourceRef::External {
            iri: fixture_iri("http://hubblesite.example/videos/deep-field-flythrough.mp4"),
            dcmi: Some(DcmiType::MovingImage),
        }],
        None,
        Provenance::default(),
    )
    .expect("figure5 fixture is valid")
}

/// A circular selection of a JPEG image retrieved via content negotiation.
pub fn boxed_circle() -> SpecificResource {
    SpecificResource {
        source: fixture_iri("http://images.example/hubble-deep-field"),
        selector: Some(Selector::SvgArea {
            shape: SvgShape::Circle {
                cx: 100.0,
                cy: 80.0,
                r: 40.0,
            },
        }),
        state: Some(State::HttpRequest {
            headers: vec![("Accept".to_string(), "image/jpeg".to_string())],
        }),
        style_class: None,
    }
}

/// The boxed-circle selection wrapped in a complete annotation.
pub fn boxed_circle_annotation() -> Annotation {
    new_annotation(
        vec![ResourceRef::Specific {
            spec: boxed_circle(),
            dcmi: Some(DcmiType::Image),
        }],
        vec![ResourceRef::embedded(EmbeddedContent::text(
            "Ring of galaxies at the upper left.",
        ))],
        Some(Motivation::Commenting),
        Provenance::default(),
    )
    .expect("boxed circle fixture is valid")
}
