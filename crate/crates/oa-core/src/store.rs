//! Persistent, indexed annotation storage.
//!
//! Annotations are kept separately from what they annotate: an append-only
//! `log.jsonl` of document records plus a small `meta.json` holding the base
//! URI and the next sequence number. Everything else (the record map and the
//! discovery indexes) is rebuilt from the log on open. Writes hit disk and
//! are fsynced before `put`/`delete` return.
//!
//! Many readers, one writer: the handle is shareable across tasks, reads
//! take a shared lock, mutations are serialized behind an exclusive lock.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::iri::Iri;
use crate::model::{validate, Annotation, Motivation, ResourceRef, Violation};
use crate::serialization::jsonld::{from_document, to_document};
use crate::serialization::vocab::VocabularyConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct StoredAnnotation {
    pub id: Iri,
    pub annotation: Annotation,
    pub stored_at: DateTime<Utc>,
    pub deleted: bool,
}

/// Discovery filter. An annotation matches when every present field
/// matches; `limit`/`offset` paginate the id-ordered result.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryFilter {
    pub target_source: Option<Iri>,
    pub tag_concept: Option<Iri>,
    pub author: Option<String>,
    pub since: Option<DateTime<Utc>>,
    pub motivation: Option<Motivation>,
    pub limit: usize,
    pub offset: usize,
}

impl Default for QueryFilter {
    fn default() -> Self {
        QueryFilter {
            target_source: None,
            tag_concept: None,
            author: None,
            since: None,
            motivation: None,
            limit: 100,
            offset: 0,
        }
    }
}

pub const MAX_QUERY_LIMIT: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct QueryPage {
    pub items: Vec<StoredAnnotation>,
    /// Matches before pagination; the same for every offset/limit.
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StoreError {
    #[error("annotation is not valid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidAnnotation(Vec<Violation>),
    #[error("annotation already has an id; delete it and put a new one to replace")]
    IdAlreadyAssigned,
    #[error("no annotation with id {0}")]
    NotFound(Iri),
    #[error("annotation {0} has been deleted")]
    Gone(Iri),
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
    #[error("storage failure: {0}")]
    StorageFailure(String),
}

fn io_err(context: &str, e: std::io::Error) -> StoreError {
    StoreError::StorageFailure(format!("{context}: {e}"))
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
enum LogRecord {
    Put {
        seq: u64,
        stored_at: DateTime<Utc>,
        document: Value,
    },
    Delete {
        seq: u64,
        deleted_at: DateTime<Utc>,
    },
}

#[derive(Serialize, Deserialize)]
struct Meta {
    base_uri: Iri,
    next_seq: u64,
}

struct Inner {
    dir: PathBuf,
    log: File,
    base_uri: Iri,
    next_seq: u64,
    records: BTreeMap<u64, StoredAnnotation>,
    by_target: BTreeMap<Iri, BTreeSet<u64>>,
    by_tag: BTreeMap<Iri, BTreeSet<u64>>,
    by_author: BTreeMap<String, BTreeSet<u64>>,
    cfg: VocabularyConfig,
}

pub struct AnnotationStore {
    inner: RwLock<Inner>,
}

fn index_keys(a: &Annotation) -> (Vec<Iri>, Vec<Iri>, Vec<String>) {
    let mut targets = Vec::new();
    for t in &a.targets {
        match t {
            ResourceRef::External { iri, .. } => targets.push(iri.clone()),
            ResourceRef::Specific { spec, .. } => targets.push(spec.source.clone()),
            _ => {}
        }
    }
    let tags = a
        .bodies
        .iter()
        .filter_map(|b| match b {
            ResourceRef::SemanticTag { concept } => Some(concept.clone()),
            _ => None,
        })
        .collect();
    let mut authors = Vec::new();
    if let Some(agent) = &a.provenance.annotated_by {
        if let Some(id) = &agent.id {
            authors.push(id.to_string());
        }
        if let Some(name) = &agent.name {
            authors.push(name.clone());
        }
    }
    (targets, tags, authors)
}

fn matches(s: &StoredAnnotation, f: &QueryFilter) -> bool {
    if s.deleted {
        return false;
    }
    if let Some(t) = &f.target_source {
        let hit = s.annotation.targets.iter().any(|r| match r {
            ResourceRef::External { iri, .. } => iri == t,
            ResourceRef::Specific { spec, .. } => &spec.source == t,
            _ => false,
        });
        if !hit {
            return false;
        }
    }
    if let Some(c) = &f.tag_concept {
        let hit = s
            .annotation
            .bodies
            .iter()
            .any(|r| matches!(r, ResourceRef::SemanticTag { concept } if concept == c));
        if !hit {
            return false;
        }
    }
    if let Some(author) = &f.author {
        let hit = s
            .annotation
            .provenance
            .annotated_by
            .as_ref()
            .is_some_and(|agent| {
                agent.name.as_deref() == Some(author.as_str())
                    || agent.id.as_ref().is_some_and(|id| id.as_str() == author)
            });
        if !hit {
            return false;
        }
    }
    if let Some(since) = f.since {
        if !s
            .annotation
            .provenance
            .annotated_at
            .is_some_and(|ts| ts >= since)
        {
            return false;
        }
    }
    if let Some(m) = &f.motivation {
        if s.annotation.motivation.as_ref() != Some(m) {
            return false;
        }
    }
    true
}

impl Inner {
    fn id_for(&self, seq: u64) -> Iri {
        Iri::new(format!("{}/annotations/{seq}", self.base_uri))
            .expect("sequence id under an absolute base")
    }

    fn seq_of(&self, id: &Iri) -> Option<u64> {
        let prefix = format!("{}/annotations/", self.base_uri);
        id.as_str().strip_prefix(&prefix)?.parse().ok()
    }

    fn index(&mut self, seq: u64, a: &Annotation) {
        let (targets, tags, authors) = index_keys(a);
        for t in targets {
            self.by_target.entry(t).or_default().insert(seq);
        }
        for t in tags {
            self.by_tag.entry(t).or_default().insert(seq);
        }
        for author in authors {
            self.by_author.entry(author).or_default().insert(seq);
        }
    }

    fn unindex(&mut self, seq: u64, a: &Annotation) {
        let (targets, tags, authors) = index_keys(a);
        for t in targets {
            if let Some(set) = self.by_target.get_mut(&t) {
                set.remove(&seq);
            }
        }
        for t in tags {
            if let Some(set) = self.by_tag.get_mut(&t) {
                set.remove(&seq);
            }
        }
        for author in authors {
            if let Some(set) = self.by_author.get_mut(&author) {
                set.remove(&seq);
            }
        }
    }

    fn append(&mut self, record: &LogRecord) -> Result<(), StoreError> {
        let line = serde_json::to_string(record)
            .map_err(|e| StoreError::StorageFailure(format!("encoding log record: {e}")))?;
        self.log
            .write_all(line.as_bytes())
            .and_then(|()| self.log.write_all(b"\n"))
            .and_then(|()| self.log.sync_data())
            .map_err(|e| io_err("appending to log", e))
    }

    fn write_meta(&self) -> Result<(), StoreError> {
        let meta = Meta {
            base_uri: self.base_uri.clone(),
            next_seq: self.next_seq,
        };
        let tmp = self.dir.join("meta.json.tmp");
        let body = serde_json::to_vec_pretty(&meta)
            .map_err(|e| StoreError::StorageFailure(format!("encoding meta: {e}")))?;
        let mut f = File::create(&tmp).map_err(|e| io_err("creating meta", e))?;
        f.write_all(&body)
            .and_then(|()| f.sync_data())
            .map_err(|e| io_err("writing meta", e))?;
        fs::rename(&tmp, self.dir.join("meta.json")).map_err(|e| io_err("replacing meta", e))
    }
}

impl AnnotationStore {
    /// Opens (or creates) a store in `dir`. A reopened store must be given
    /// the same base URI it was created with.
    pub fn open(dir: impl AsRef<Path>, base_uri: &Iri) -> Result<AnnotationStore, StoreError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(|e| io_err("creating store directory", e))?;
        let meta_path = dir.join("meta.json");
        let log_path = dir.join("log.jsonl");
        let cfg = VocabularyConfig::default();

        let mut next_seq = 1;
        if meta_path.exists() {
            let body = fs::read_to_string(&meta_path).map_err(|e| io_err("reading meta", e))?;
            let meta: Meta = serde_json::from_str(&body)
                .map_err(|e| StoreError::StorageFailure(format!("decoding meta: {e}")))?;
            if &meta.base_uri != base_uri {
                return Err(StoreError::StorageFailure(format!(
                    "store at {} was created with base {}, not {}",
                    dir.display(),
                    meta.base_uri,
                    base_uri
                )));
            }
            next_seq = meta.next_seq;
        }

        let mut records: BTreeMap<u64, StoredAnnotation> = BTreeMap::new();
        if log_path.exists() {
            let reader =
                BufReader::new(File::open(&log_path).map_err(|e| io_err("opening log", e))?);
            for (n, line) in reader.lines().enumerate() {
                let line = line.map_err(|e| io_err("reading log", e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let record: LogRecord = serde_json::from_str(&line)
                    .map_err(|e| StoreError::StorageFailure(format!("log line {}: {e}", n + 1)))?;
                match record {
                    LogRecord::Put {
                        seq,
                        stored_at,
                        document,
                    } => {
                        let annotation = from_document(&document, &cfg).map_err(|e| {
                            StoreError::StorageFailure(format!("log line {}: {e}", n + 1))
                        })?;
                        let id = annotation.id.clone().ok_or_else(|| {
                            StoreError::StorageFailure(format!(
                                "log line {}: record has no id",
                                n + 1
                            ))
                        })?;
                        records.insert(
                            seq,
                            StoredAnnotation {
                                id,
                                annotation,
                                stored_at,
                                deleted: false,
                            },
                        );
                        next_seq = next_seq.max(seq + 1);
                    }
                    LogRecord::Delete { seq, .. } => {
                        if let Some(r) = records.get_mut(&seq) {
                            r.deleted = true;
                        }
                    }
                }
            }
        }

        let log = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&log_path)
            .map_err(|e| io_err("opening log for append", e))?;
        let mut inner = Inner {
            dir,
            log,
            base_uri: base_uri.clone(),
            next_seq,
            records: BTreeMap::new(),
            by_target: BTreeMap::new(),
            by_tag: BTreeMap::new(),
            by_author: BTreeMap::new(),
            cfg,
        };
        for (seq, stored) in &records {
            if !stored.deleted {
                let a = stored.annotation.clone();
                inner.index(*seq, &a);
            }
        }
        inner.records = records;
        if !meta_path.exists() {
            inner.write_meta()?;
        }
        Ok(AnnotationStore {
            inner: RwLock::new(inner),
        })
    }

    pub fn base_uri(&self) -> Iri {
        self.inner.read().expect("store lock").base_uri.clone()
    }

    /// Stores a new annotation: assigns the next sequential id, stamps
    /// `serialized_at` if unset, and persists before returning.
    pub fn put(&self, a: Annotation) -> Result<Iri, StoreError> {
        let report = validate(&a);
        if !report.is_empty() {
            return Err(StoreError::InvalidAnnotation(report.into_violations()));
        }
        if a.id.is_some() {
            return Err(StoreError::IdAlreadyAssigned);
        }
        let mut inner = self.inner.write().expect("store lock");
        let seq = inner.next_seq;
        let id = inner.id_for(seq);
        let now = Utc::now();
        let mut a = a.with_id(id.clone());
        if a.provenance.serialized_at.is_none() {
            // A plain `now` could land before a future-dated annotated_at
            // and manufacture a provenance violation.
            let at = a.provenance.annotated_at.map_or(now, |t| t.max(now));
            a.provenance.serialized_at = Some(at);
        }
        let document = to_document(&a, &inner.cfg)
            .map_err(|e| StoreError::StorageFailure(format!("encoding annotation: {e}")))?;
        inner.append(&LogRecord::Put {
            seq,
            stored_at: now,
            document,
        })?;
        inner.next_seq = seq + 1;
        inner.write_meta()?;
        inner.index(seq, &a);
        inner.records.insert(
            seq,
            StoredAnnotation {
                id: id.clone(),
                annotation: a,
                stored_at: now,
                deleted: false,
            },
        );
        Ok(id)
    }

    pub fn get(&self, id: &Iri) -> Result<Annotation, StoreError> {
        Ok(self.get_stored(id)?.annotation)
    }

    pub fn get_stored(&self, id: &Iri) -> Result<StoredAnnotation, StoreError> {
        let inner = self.inner.read().expect("store lock");
        let seq = inner
            .seq_of(id)
            .ok_or_else(|| StoreError::NotFound(id.clone()))?;
        let stored = inner
            .records
            .get(&seq)
            .ok_or_else(|| StoreError::NotFound(id.clone()))?;
        if stored.deleted {
            return Err(StoreError::Gone(id.clone()));
        }
        Ok(stored.clone())
    }

    /// Runs a discovery query: every present filter field must match, ids
    /// ascend, tombstoned annotations never appear.
    pub fn query(&self, f: &QueryFilter) -> Result<QueryPage, StoreError> {
        if f.limit == 0 || f.limit > MAX_QUERY_LIMIT {
            return Err(StoreError::InvalidFilter(format!(
                "limit must be between 1 and {MAX_QUERY_LIMIT}"
            )));
        }
        let inner = self.inner.read().expect("store lock");
        // The narrowest applicable index supplies candidates; the full
        // predicate then re-checks every field, so index choice can never
        // change the result.
        let candidates: Vec<u64> = if let Some(t) = &f.target_source {
            inner
                .by_target
                .get(t)
                .into_iter()
                .flatten()
                .copied()
                .collect()
        } else if let Some(c) = &f.tag_concept {
            inner.by_tag.get(c).into_iter().flatten().copied().collect()
        } else if let Some(a) = &f.author {
            inner
                .by_author
                .get(a)
                .into_iter()
                .flatten()
                .copied()
                .collect()
        } else {
            inner.records.keys().copied().collect()
        };
        let hits: Vec<&StoredAnnotation> = candidates
            .iter()
            .filter_map(|seq| inner.records.get(seq))
            .filter(|s| matches(s, f))
            .collect();
        let total = hits.len();
        let items = hits
            .into_iter()
            .skip(f.offset)
            .take(f.limit)
            .cloned()
            .collect();
        Ok(QueryPage { items, total })
    }

    /// Tombstones an annotation. The record stays in the log and the map;
    /// it just stops being retrievable or discoverable.
    pub fn delete(&self, id: &Iri) -> Result<(), StoreError> {
        let mut inner = self.inner.write().expect("store lock");
        let seq = inner
            .seq_of(id)
            .ok_or_else(|| StoreError::NotFound(id.clone()))?;
        match inner.records.get(&seq) {
            None => return Err(StoreError::NotFound(id.clone())),
            Some(s) if s.deleted => return Err(StoreError::Gone(id.clone())),
            Some(_) => {}
        }
        inner.append(&LogRecord::Delete {
            seq,
            deleted_at: Utc::now(),
        })?;
        let annotation = inner
            .records
            .get(&seq)
            .expect("checked above")
            .annotation
            .clone();
        inner.unindex(seq, &annotation);
        inner.records.get_mut(&seq).expect("checked above").deleted = true;
        Ok(())
    }
}
