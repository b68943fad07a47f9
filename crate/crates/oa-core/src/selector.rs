//! Resolves selectors against concrete resources: anchors text selectors in
//! documents, parses media-fragment strings, and tests point membership in
//! SVG areas.
//!
//! All text offsets are Unicode code points over NFC-normalized text, so a
//! span computed on one system lands on the same characters on another
//! regardless of encoding.

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::iri::Iri;
use crate::model::{Selector, SvgShape};

/// A document prepared for anchoring: NFC-normalized once at construction,
/// indexed by code point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocText {
    text: String,
    chars: Vec<char>,
}

impl DocText {
    pub fn new(input: &str) -> DocText {
        let text: String = input.nfc().collect();
        let chars = text.chars().collect();
        DocText { text, chars }
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// Length in code points (not bytes).
    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    /// The text covered by a span. Panics if the span is out of range;
    /// resolve first.
    pub fn slice(&self, span: Span) -> String {
        self.chars[span.start..span.end].iter().collect()
    }
}

/// Half-open code-point range `[start, end)` within a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// A resolved text anchor. `ambiguous` is set when at least two occurrences
/// tied for the best context score and the earliest was picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnchoredSpan {
    pub span: Span,
    pub ambiguous: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FragmentValue {
    SpatialRegion { x: f64, y: f64, w: f64, h: f64 },
    TimeInterval { begin: f64, end: Option<f64> },
    Opaque { raw: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectorError {
    #[error("selector range [{start}, {end}) does not fit a document of length {len}")]
    OutOfRange {
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("exact text not found in document")]
    NotFound,
    #[error("span [{start}, {end}) is not a nonempty range within a document of length {len}")]
    InvalidSpan {
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("malformed fragment {value:?}: {reason}")]
    Malformed { value: String, reason: String },
}

/// Resolves a text-position selector. Offsets are taken literally; anything
/// outside the document is an error, never clipped.
pub fn resolve_text_position(
    doc: &DocText,
    start: usize,
    end: usize,
) -> Result<Span, SelectorError> {
    if start > end || end > doc.len() {
        return Err(SelectorError::OutOfRange {
            start,
            end,
            len: doc.len(),
        });
    }
    Ok(Span::new(start, end))
}

/// Resolves a text-quote selector: finds every occurrence of `exact`,
/// scores each by how much of the given context matches around it (longest
/// suffix of `prefix` before, longest prefix of `suffix` after), and returns
/// the best, breaking ties toward the smallest offset.
pub fn resolve_text_quote(
    doc: &DocText,
    exact: &str,
    prefix: Option<&str>,
    suffix: Option<&str>,
) -> Result<AnchoredSpan, SelectorError> {
    let needle: Vec<char> = exact.chars().collect();
    if needle.is_empty() || needle.len() > doc.len() {
        return Err(SelectorError::NotFound);
    }
    let hay = &doc.chars;
    let pre: Vec<char> = prefix.unwrap_or("").chars().collect();
    let suf: Vec<char> = suffix.unwrap_or("").chars().collect();

    let mut best: Option<(usize, usize)> = None;
    let mut ambiguous = false;
    for i in 0..=hay.len() - needle.len() {
        if hay[i..i + needle.len()] != needle[..] {
            continue;
        }
        let mut score = 0;
        while score < pre.len() && score < i && pre[pre.len() - 1 - score] == hay[i - 1 - score] {
            score += 1;
        }
        let after = i + needle.len();
        let mut s = 0;
        while s < suf.len() && after + s < hay.len() && suf[s] == hay[after + s] {
            s += 1;
        }
        score += s;
        match best {
            Some((top, _)) if score > top => {
                best = Some((score, i));
                ambiguous = false;
            }
            Some((top, _)) if score == top => ambiguous = true,
            Some(_) => {}
            None => best = Some((score, i)),
        }
    }
    let (_, start) = best.ok_or(SelectorError::NotFound)?;
    Ok(AnchoredSpan {
        span: Span::new(start, start + needle.len()),
        ambiguous,
    })
}

/// Derives a text-quote selector that re-anchors to `span`: the covered text
/// as `exact` plus up to `context_len` code points of context on each side.
/// Empty contexts are left out. The span must be nonempty (an empty quote
/// can never anchor).
pub fn derive_quote(
    doc: &DocText,
    span: Span,
    context_len: usize,
) -> Result<Selector, SelectorError> {
    if span.start >= span.end || span.end > doc.len() {
        return Err(SelectorError::InvalidSpan {
            start: span.start,
            end: span.end,
            len: doc.len(),
        });
    }
    let exact = doc.slice(span);
    let pre_start = span.start.saturating_sub(context_len);
    let prefix: String = doc.chars[pre_start..span.start].iter().collect();
    let suf_end = (span.end + context_len).min(doc.len());
    let suffix: String = doc.chars[span.end..suf_end].iter().collect();
    Ok(Selector::TextQuote {
        exact,
        prefix: (!prefix.is_empty()).then_some(prefix),
        suffix: (!suffix.is_empty()).then_some(suffix),
    })
}

fn malformed(value: &str, reason: impl Into<String>) -> SelectorError {
    SelectorError::Malformed {
        value: value.to_string(),
        reason: reason.into(),
    }
}

fn parse_pixel(value: &str, part: &str) -> Result<f64, SelectorError> {
    if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed(
            value,
            format!("{part:?} is not an unsigned integer"),
        ));
    }
    part.parse::<u64>()
        .map(|n| n as f64)
        .map_err(|_| malformed(value, format!("{part:?} out of range")))
}

/// NPT seconds: digits with an optional fractional part (`10`, `5.5`, `7.`).
fn parse_npt_seconds(value: &str, part: &str) -> Result<f64, SelectorError> {
    let (int, frac) = match part.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (part, None),
    };
    let digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if int.is_empty() || !digits(int) || !frac.is_none_or(digits) {
        return Err(malformed(value, format!("{part:?} is not a seconds value")));
    }
    part.parse::<f64>()
        .map_err(|_| malformed(value, format!("{part:?} out of range")))
}

/// Parses a fragment value (without the `#`). The spatial `xywh=` and
/// temporal `t=` dimensions of the W3C Media Fragments grammar are
/// interpreted; anything else passes through as `Opaque`.
pub fn parse_fragment(value: &str) -> Result<FragmentValue, SelectorError> {
    if let Some(body) = value.strip_prefix("xywh=") {
        let body = match body.split_once(':') {
            Some(("pixel", rest)) => rest,
            Some((unit, _)) => return Err(malformed(value, format!("unsupported unit {unit:?}"))),
            None => body,
        };
        let parts: Vec<&str> = body.split(',').collect();
        let [x, y, w, h] = parts[..] else {
            return Err(malformed(value, "xywh takes exactly four components"));
        };
        let x = parse_pixel(value, x)?;
        let y = parse_pixel(value, y)?;
        let w = parse_pixel(value, w)?;
        let h = parse_pixel(value, h)?;
        if w == 0.0 || h == 0.0 {
            return Err(malformed(value, "region width and height must be positive"));
        }
        return Ok(FragmentValue::SpatialRegion { x, y, w, h });
    }
    if let Some(body) = value.strip_prefix("t=") {
        let body = body.strip_prefix("npt:").unwrap_or(body);
        let (begin, end) = match body.split_once(',') {
            Some((b, e)) => (b, Some(e)),
            None => (body, None),
        };
        let end = match end {
            None | Some("") => None,
            Some(e) => Some(parse_npt_seconds(value, e)?),
        };
        let begin = if begin.is_empty() {
            if end.is_none() {
                return Err(malformed(value, "interval needs a begin or an end"));
            }
            0.0
        } else {
            parse_npt_seconds(value, begin)?
        };
        if let Some(e) = end {
            if e <= begin {
                return Err(malformed(value, "interval end must be after begin"));
            }
        }
        return Ok(FragmentValue::TimeInterval { begin, end });
    }
    Ok(FragmentValue::Opaque {
        raw: value.to_string(),
    })
}

fn on_segment(ax: f64, ay: f64, bx: f64, by: f64, px: f64, py: f64) -> bool {
    let cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
    cross == 0.0 && px >= ax.min(bx) && px <= ax.max(bx) && py >= ay.min(by) && py <= ay.max(by)
}

/// True iff `(x, y)` lies inside or on the boundary of the shape. Polygons
/// use the even-odd rule.
pub fn point_in_area(shape: &SvgShape, x: f64, y: f64) -> bool {
    match shape {
        SvgShape::Circle { cx, cy, r } => (x - cx).powi(2) + (y - cy).powi(2) <= r.powi(2),
        SvgShape::Rect { x: rx, y: ry, w, h } => x >= *rx && x <= rx + w && y >= *ry && y <= ry + h,
        SvgShape::Polygon { vertices } => {
            let n = vertices.len();
            for i in 0..n {
                let (ax, ay) = vertices[i];
                let (bx, by) = vertices[(i + 1) % n];
                if on_segment(ax, ay, bx, by, x, y) {
                    return true;
                }
            }
            let mut inside = false;
            let mut j = n - 1;
            for i in 0..n {
                let (xi, yi) = vertices[i];
                let (xj, yj) = vertices[j];
                if (yi > y) != (yj > y) {
                    let x_int = xi + (y - yi) / (yj - yi) * (xj - xi);
                    if x < x_int {
                        inside = !inside;
                    }
                }
                j = i;
            }
            inside
        }
    }
}

/// Fragment conformance IRI for the W3C Media Fragments grammar, attached to
/// fragment selectors produced by tools that emit `xywh=`/`t=` values.
pub fn media_fragments_iri() -> Iri {
    Iri::new("http://www.w3.org/TR/media-frags/").expect("constant iri")
}
