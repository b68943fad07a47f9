//! Golden tests for the `annotate` binary: every command's output is
//! compared against the corresponding library call, and the documented
//! exit codes are pinned.

mod common;

use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::Stdio;
use std::time::Duration;

use common::{command, ServerProcess};

use oa_core::{
    from_document, import_annotea, new_annotation, resolve_text_quote, to_document, Agent,
    AnnoteaRecord, DocText, Iri, Motivation, Provenance, ResourceRef, VocabularyConfig,
};
use oa_testgen::{figure3, figure5, gen_annotea_record, rng};
use serde_json::{json, Value};

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn annotate(args: &[&str]) -> Output {
    let out = command().args(args).output().expect("binary runs");
    Output {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).expect("stdout is utf-8"),
        stderr: String::from_utf8(out.stderr).expect("stderr is utf-8"),
    }
}

fn cfg() -> VocabularyConfig {
    VocabularyConfig::default()
}

fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

fn write_file(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.display().to_string()
}

#[test]
fn create_matches_the_library_construction() {
    let out = annotate(&[
        "create",
        "--target",
        "http://maphub.example/maps/universalis-1507.jpg",
        "--tag",
        "http://dbpedia.org/resource/Gibraltar",
        "--tag",
        "http://dbpedia.org/resource/Hercules",
        "--motivation",
        "tagging",
        "--author",
        "behas",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);

    let expected = new_annotation(
        vec![ResourceRef::external(iri(
            "http://maphub.example/maps/universalis-1507.jpg",
        ))],
        vec![
            ResourceRef::tag(iri("http://dbpedia.org/resource/Gibraltar")),
            ResourceRef::tag(iri("http://dbpedia.org/resource/Hercules")),
        ],
        Some(Motivation::Tagging),
        Provenance {
            annotated_by: Some(Agent::named("behas")),
            ..Provenance::default()
        },
    )
    .unwrap();
    let doc: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(doc, to_document(&expected, &cfg()).unwrap());
}

#[test]
fn create_combines_every_body_kind() {
    let out = annotate(&[
        "create",
        "--target",
        "http://pages.example/article",
        "--body-iri",
        "http://media.example/clip.mp4",
        "--body-text",
        "lovely",
        "--tag",
        "http://dbpedia.org/resource/Hercules",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let doc: Value = serde_json::from_str(&out.stdout).unwrap();
    let annotation = from_document(&doc, &cfg()).unwrap();
    assert_eq!(annotation.bodies.len(), 3);
    assert!(matches!(annotation.bodies[0], ResourceRef::External { .. }));
    assert!(matches!(annotation.bodies[1], ResourceRef::Embedded { .. }));
    assert!(matches!(
        annotation.bodies[2],
        ResourceRef::SemanticTag { .. }
    ));
    assert!(annotation.motivation.is_none());
}

#[test]
fn create_without_a_target_is_a_usage_error() {
    let out = annotate(&["create"]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn create_rejects_unknown_motivation_names() {
    let out = annotate(&[
        "create",
        "--target",
        "http://a.example/x",
        "--motivation",
        "zealous",
    ]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("zealous"));
    assert!(out.stderr.contains("motivation-iri"));
}

#[test]
fn create_accepts_extension_motivation_iris() {
    let out = annotate(&[
        "create",
        "--target",
        "http://a.example/x",
        "--motivation-iri",
        "http://vocab.example/ns#praising",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let doc: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(doc["motivatedBy"], "http://vocab.example/ns#praising");

    let conflict = annotate(&[
        "create",
        "--target",
        "http://a.example/x",
        "--motivation",
        "tagging",
        "--motivation-iri",
        "http://vocab.example/ns#praising",
    ]);
    assert_eq!(conflict.code, 2);
}

#[test]
fn create_rejects_malformed_iris() {
    let out = annotate(&["create", "--target", "not an iri"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--target"));

    let out = annotate(&[
        "create",
        "--target",
        "http://a.example/x",
        "--tag",
        "no scheme here",
    ]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--tag"));
}

#[test]
fn anchor_agrees_with_the_resolver() {
    let dir = tempfile::tempdir().unwrap();
    let doc_path = write_file(dir.path(), "doc.txt", "the cat sat on the mat");

    let out = annotate(&[
        "anchor", "--doc", &doc_path, "--quote", "the", "--prefix", "on ",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let report: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(
        report,
        json!({ "start": 15, "end": 18, "excerpt": "the", "ambiguous": false })
    );

    let doc = DocText::new("the cat sat on the mat");
    let resolved = resolve_text_quote(&doc, "the", Some("on "), None).unwrap();
    assert_eq!(report["start"], resolved.span.start);
    assert_eq!(report["end"], resolved.span.end);
}

#[test]
fn anchor_flags_ambiguous_matches() {
    let dir = tempfile::tempdir().unwrap();
    let doc_path = write_file(dir.path(), "doc.txt", "the cat sat on the mat");

    let out = annotate(&["anchor", "--doc", &doc_path, "--quote", "the"]);
    assert_eq!(out.code, 0);
    let report: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report["start"], 0);
    assert_eq!(report["end"], 3);
    assert_eq!(report["ambiguous"], true);
}

#[test]
fn anchor_position_mode_reports_spans_and_ranges() {
    let dir = tempfile::tempdir().unwrap();
    let doc_path = write_file(dir.path(), "doc.txt", "the cat sat on the mat");

    let out = annotate(&["anchor", "--doc", &doc_path, "--start", "0", "--end", "0"]);
    assert_eq!(out.code, 0);
    let report: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(
        report,
        json!({ "start": 0, "end": 0, "excerpt": "", "ambiguous": false })
    );

    let out = annotate(&["anchor", "--doc", &doc_path, "--start", "5", "--end", "999"]);
    assert_eq!(out.code, 4);
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn anchor_counts_code_points_not_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let doc_path = write_file(dir.path(), "doc.txt", "a\u{1d11e}b caf\u{e9} note");

    let out = annotate(&["anchor", "--doc", &doc_path, "--quote", "caf\u{e9}"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let report: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report["start"], 4);
    assert_eq!(report["end"], 8);
    assert_eq!(report["excerpt"], "caf\u{e9}");
}

#[test]
fn anchor_misses_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let doc_path = write_file(dir.path(), "doc.txt", "the cat sat on the mat");

    let out = annotate(&["anchor", "--doc", &doc_path, "--quote", "zzz"]);
    assert_eq!(out.code, 3);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("not found"));
}

#[test]
fn anchor_flag_misuse_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let doc_path = write_file(dir.path(), "doc.txt", "text");

    for args in [
        vec!["anchor", "--doc", &doc_path],
        vec!["anchor", "--doc", &doc_path, "--start", "1"],
        vec!["anchor", "--doc", &doc_path, "--end", "1"],
        vec![
            "anchor", "--doc", &doc_path, "--quote", "x", "--start", "1", "--end", "2",
        ],
        vec!["anchor", "--doc", &doc_path, "--prefix", "x"],
    ] {
        let out = annotate(&args);
        assert_eq!(out.code, 2, "{args:?}");
    }

    let out = annotate(&["anchor", "--doc", "/nonexistent/file", "--quote", "x"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("cannot read"));
}

#[test]
fn validate_passes_clean_documents() {
    let dir = tempfile::tempdir().unwrap();
    let doc = to_document(&figure3(), &cfg()).unwrap();
    let path = write_file(dir.path(), "fig3.json", &doc.to_string());

    let out = annotate(&["validate", "--in", &path]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let report: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report["valid"], true);
    assert_eq!(report["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn validate_reports_violations_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = to_document(&figure3(), &cfg()).unwrap();
    doc.as_object_mut()
        .unwrap()
        .insert("serializedAt".into(), json!("2001-01-01T00:00:00Z"));
    let path = write_file(dir.path(), "bad.json", &doc.to_string());

    let out = annotate(&["validate", "--in", &path]);
    assert_eq!(out.code, 2);
    let report: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(report["valid"], false);
    assert!(!report["violations"].as_array().unwrap().is_empty());
}

#[test]
fn validate_rejects_unparseable_input() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = write_file(dir.path(), "garbage.json", "{ not json");
    let out = annotate(&["validate", "--in", &garbage]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());

    let wrong = write_file(dir.path(), "wrong.json", "[1, 2, 3]");
    let out = annotate(&["validate", "--in", &wrong]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn convert_imports_the_question_record() {
    let dir = tempfile::tempdir().unwrap();
    let record_json = json!({
        "annotates": "http://pages.example/report",
        "bodyText": "<p>why?</p>",
        "subclass": "Question",
        "author": "alice",
        "created": "2001-03-09T08:30:00Z",
    });
    let path = write_file(dir.path(), "records.json", &record_json.to_string());

    let out = annotate(&["convert", "--from", "annotea", "--to", "oa", "--in", &path]);
    assert_eq!(out.code, 0, "{}", out.stderr);

    let record: AnnoteaRecord = serde_json::from_value(record_json).unwrap();
    let expected = to_document(&import_annotea(&record).unwrap(), &cfg()).unwrap();
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines.len(), 1);
    let doc: Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(doc, expected);
    assert_eq!(doc["motivatedBy"], "questioning");
}

#[test]
fn convert_streams_records_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let mut ndjson = String::new();
    for n in 1..=3 {
        ndjson.push_str(
            &json!({ "annotates": format!("http://pages.example/{n}"), "bodyText": "<p>x</p>" })
                .to_string(),
        );
        ndjson.push('\n');
    }
    let nd_path = write_file(dir.path(), "records.ndjson", &ndjson);

    let out = annotate(&[
        "convert", "--from", "annotea", "--to", "oa", "--in", &nd_path,
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let targets: Vec<String> = out
        .stdout
        .lines()
        .map(|line| {
            let doc: Value = serde_json::from_str(line).unwrap();
            doc["hasTarget"][0]["@id"].as_str().unwrap().to_string()
        })
        .collect();
    assert_eq!(
        targets,
        vec![
            "http://pages.example/1",
            "http://pages.example/2",
            "http://pages.example/3"
        ]
    );

    let array = format!("[{}]", ndjson.lines().collect::<Vec<_>>().join(","));
    let array_path = write_file(dir.path(), "records-array.json", &array);
    let array_out = annotate(&[
        "convert",
        "--from",
        "annotea",
        "--to",
        "oa",
        "--in",
        &array_path,
    ]);
    assert_eq!(array_out.stdout, out.stdout, "array input converts alike");
}

#[test]
fn convert_round_trips_generated_records() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(0xc11);
    let records: Vec<AnnoteaRecord> = (0..20).map(|_| gen_annotea_record(&mut r)).collect();
    let ndjson: String = records
        .iter()
        .map(|rec| serde_json::to_string(rec).unwrap() + "\n")
        .collect();
    let records_path = write_file(dir.path(), "records.ndjson", &ndjson);

    let to_oa = annotate(&[
        "convert",
        "--from",
        "annotea",
        "--to",
        "oa",
        "--in",
        &records_path,
    ]);
    assert_eq!(to_oa.code, 0, "{}", to_oa.stderr);
    let docs_path = write_file(dir.path(), "docs.ndjson", &to_oa.stdout);

    let back = annotate(&[
        "convert", "--from", "oa", "--to", "annotea", "--in", &docs_path,
    ]);
    assert_eq!(back.code, 0, "{}", back.stderr);
    let returned: Vec<AnnoteaRecord> = back
        .stdout
        .lines()
        .map(|line| serde_json::from_str(line).unwrap())
        .collect();
    assert_eq!(returned, records);
}

#[test]
fn convert_reports_unrepresentable_documents() {
    let dir = tempfile::tempdir().unwrap();
    let docs = format!(
        "{}\n{}\n",
        to_document(&figure3(), &cfg()).unwrap(),
        to_document(&figure5(), &cfg()).unwrap()
    );
    let path = write_file(dir.path(), "docs.ndjson", &docs);

    let out = annotate(&["convert", "--from", "oa", "--to", "annotea", "--in", &path]);
    assert_eq!(out.code, 5);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines.len(), 1, "only the representable record is emitted");
    let record: AnnoteaRecord = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(
        record.annotates.unwrap().as_str(),
        "http://hubblesite.example/images/deep-field.jpg"
    );
    assert!(out.stderr.contains("document 1"));
}

#[test]
fn convert_handles_empty_and_rejects_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_file(dir.path(), "empty.json", "");
    let out = annotate(&["convert", "--from", "annotea", "--to", "oa", "--in", &empty]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());

    let garbage = write_file(dir.path(), "garbage.json", "][");
    let out = annotate(&[
        "convert", "--from", "annotea", "--to", "oa", "--in", &garbage,
    ]);
    assert_eq!(out.code, 2);

    let missing = write_file(dir.path(), "missing.json", r#"{"bodyText": "<p>x</p>"}"#);
    let out = annotate(&[
        "convert", "--from", "annotea", "--to", "oa", "--in", &missing,
    ]);
    assert_eq!(out.code, 2, "a record without annotates does not parse");

    let same = annotate(&["convert", "--from", "oa", "--to", "oa", "--in", &empty]);
    assert_eq!(same.code, 2);

    let unknown = annotate(&["convert", "--from", "rdfa", "--to", "oa", "--in", &empty]);
    assert_eq!(unknown.code, 2);
}

#[test]
fn query_failures_exit_6() {
    let out = annotate(&["query", "--server", "http://127.0.0.1:1"]);
    assert_eq!(out.code, 6);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("network error"));
}

#[test]
fn query_validates_filter_iris_before_connecting() {
    let out = annotate(&[
        "query",
        "--server",
        "http://127.0.0.1:1",
        "--tag",
        "not an iri",
    ]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--tag"));
}

#[test]
fn serve_then_query_discovers_the_posted_annotation() {
    let dir = tempfile::tempdir().unwrap();
    let server = ServerProcess::start(dir.path(), &[]);

    let doc = to_document(&figure3(), &cfg()).unwrap();
    let response = ureq::post(&format!("{}/annotations", server.url))
        .header("Content-Type", "application/ld+json")
        .send(doc.to_string())
        .expect("post succeeds");
    assert_eq!(response.status().as_u16(), 201);

    let out = annotate(&[
        "query",
        "--server",
        &server.url,
        "--tag",
        "http://dbpedia.org/resource/Gibraltar",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let collection: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(collection["total"], 1);
    assert_eq!(
        collection["items"][0]["@id"],
        "http://ids.example/annotations/1"
    );

    let all = annotate(&["query", "--server", &server.url]);
    assert_eq!(all.code, 0);
    let collection: Value = serde_json::from_str(&all.stdout).unwrap();
    assert_eq!(collection["total"], 1);

    let miss = annotate(&[
        "query",
        "--server",
        &server.url,
        "--tag",
        "http://dbpedia.org/resource/Atlas",
    ]);
    let collection: Value = serde_json::from_str(&miss.stdout).unwrap();
    assert_eq!(collection["total"], 0);

    let bad = annotate(&["query", "--server", &server.url, "--limit", "0"]);
    assert_eq!(bad.code, 6);
    assert!(bad.stderr.contains("400"));
}

#[test]
fn serve_respects_environment_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let server = ServerProcess::start(dir.path(), &[("OASTORE_MAX_BODY_BYTES", "200")]);

    let doc = to_document(&figure3(), &cfg()).unwrap();
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .http_status_as_error(false)
        .build()
        .new_agent();
    let response = agent
        .post(&format!("{}/annotations", server.url))
        .header("Content-Type", "application/ld+json")
        .send(doc.to_string())
        .expect("post completes");
    assert_eq!(response.status().as_u16(), 413);
}

#[test]
fn serve_rejects_bad_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let out = annotate(&["serve", "--bind", "127.0.0.1:0"]);
    assert_eq!(out.code, 2, "missing base_uri and store");
    assert!(out.stderr.contains("base_uri"));

    let config = write_file(
        dir.path(),
        "bad.conf",
        "base_uri = http://ids.example/\nstore = /tmp/x\n",
    );
    let out = annotate(&["serve", "--config", &config]);
    assert_eq!(out.code, 2, "trailing slash rejected");
}

#[test]
fn serve_loads_key_value_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store");
    let config = write_file(
        dir.path(),
        "svc.conf",
        &format!(
            "# discovery service\nbase_uri = http://ids.example\nstore = {}\n",
            store.display()
        ),
    );

    let mut command = command();
    command
        .args(["serve", "--config", &config, "--bind", "127.0.0.1:0"])
        .stdout(Stdio::null())
        .stderr(Stdio::piped());
    let mut child = command.spawn().unwrap();
    let stderr = child.stderr.take().unwrap();
    let (send, recv) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let mut line = String::new();
        let _ = BufReader::new(stderr).read_line(&mut line);
        let _ = send.send(line);
    });
    let line = recv.recv_timeout(Duration::from_secs(10)).unwrap();
    assert!(
        line.starts_with("listening on http://127.0.0.1:"),
        "{line:?}"
    );
    let _ = child.kill();
    let _ = child.wait();
}

#[test]
fn usage_errors_and_help_behave() {
    let help = annotate(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("annotate"));

    let unknown = annotate(&["frobnicate"]);
    assert_eq!(unknown.code, 2);
}
