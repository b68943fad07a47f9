//! Absolute IRIs with syntax-level normalization.
//!
//! Comparison is by exact string after normalization: the scheme and host are
//! lowercased and a default port (http 80, https 443, ws 80, wss 443, ftp 21)
//! is dropped. Nothing is dereferenced and the path/query/fragment bytes are
//! left untouched, so equality is offline and deterministic.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An absolute IRI, normalized at construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IriError {
    #[error("iri must be nonempty")]
    Empty,
    #[error("iri must not contain whitespace")]
    Whitespace,
    #[error("iri must have a scheme")]
    MissingScheme,
    #[error("invalid scheme {0:?}")]
    InvalidScheme(String),
}

fn default_port(scheme: &str) -> Option<u32> {
    match scheme {
        "http" | "ws" => Some(80),
        "https" | "wss" => Some(443),
        "ftp" => Some(21),
        _ => None,
    }
}

fn valid_scheme(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

/// Normalizes `authority` (the part between `//` and the first `/`, `?` or
/// `#`): lowercases the host and drops an empty or default port.
fn normalize_authority(authority: &str, scheme: &str) -> String {
    let (userinfo, hostport) = match authority.rfind('@') {
        Some(at) => (Some(&authority[..at]), &authority[at + 1..]),
        None => (None, authority),
    };
    let drop_port = |p: &str| {
        p.is_empty() || matches!(p.parse::<u32>(), Ok(n) if Some(n) == default_port(scheme))
    };
    // A bracketed IPv6 host may itself contain ':'; the port delimiter is the
    // first ':' after the closing bracket, or the last ':' otherwise.
    let (host, port) = if let Some(close) = hostport.find(']') {
        match hostport[close..].find(':') {
            Some(rel) => {
                let p = &hostport[close + rel + 1..];
                (&hostport[..close + rel], (!drop_port(p)).then_some(p))
            }
            None => (hostport, None),
        }
    } else {
        let mut host = hostport;
        let mut port = None;
        // Dropping an empty or default port can expose another port-shaped
        // tail ("h::80" must come out as "h", not "h:"), so strip until the
        // remainder is already in normal form.
        while let Some(colon) = host.rfind(':') {
            let p = &host[colon + 1..];
            if !p.chars().all(|c| c.is_ascii_digit()) {
                break;
            }
            host = &host[..colon];
            if !drop_port(p) {
                port = Some(p);
                break;
            }
        }
        (host, port)
    };

    let mut out = String::new();
    if let Some(u) = userinfo {
        out.push_str(u);
        out.push('@');
    }
    out.push_str(&host.to_ascii_lowercase());
    if let Some(p) = port {
        out.push(':');
        out.push_str(p);
    }
    out
}

impl Iri {
    /// Parses and normalizes an absolute IRI.
    pub fn new(value: impl AsRef<str>) -> Result<Self, IriError> {
        let value = value.as_ref();
        if value.is_empty() {
            return Err(IriError::Empty);
        }
        if value.chars().any(char::is_whitespace) {
            return Err(IriError::Whitespace);
        }
        let colon = value.find(':').ok_or(IriError::MissingScheme)?;
        let scheme = &value[..colon];
        if !valid_scheme(scheme) {
            return Err(IriError::InvalidScheme(scheme.to_string()));
        }
        let scheme = scheme.to_ascii_lowercase();
        let rest = &value[colon + 1..];

        let mut out = String::with_capacity(value.len());
        out.push_str(&scheme);
        out.push(':');
        if let Some(after) = rest.strip_prefix("//") {
            let end = after.find(['/', '?', '#']).unwrap_or(after.len());
            out.push_str("//");
            out.push_str(&normalize_authority(&after[..end], &scheme));
            out.push_str(&after[end..]);
        } else {
            out.push_str(rest);
        }
        Ok(Iri(out))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl TryFrom<&str> for Iri {
    type Error = IriError;

    fn try_from(value: &str) -> Result<Self, Self::Error> {
        Iri::new(value)
    }
}

impl std::str::FromStr for Iri {
    type Err = IriError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Iri::new(s)
    }
}

impl Serialize for Iri {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Iri {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Iri::new(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_and_host_are_lowercased() {
        let iri = Iri::new("HTTP://Example.COM/Path/To?Q=Mixed#Frag").unwrap();
        assert_eq!(iri.as_str(), "http://example.com/Path/To?Q=Mixed#Frag");
    }

    #[test]
    fn default_ports_are_dropped() {
        assert_eq!(
            Iri::new("http://example.com:80/a").unwrap().as_str(),
            "http://example.com/a"
        );
        assert_eq!(
            Iri::new("https://example.com:443").unwrap().as_str(),
            "https://example.com"
        );
        assert_eq!(
            Iri::new("http://example.com:8080/a").unwrap().as_str(),
            "http://example.com:8080/a"
        );
        // empty port collapses
        assert_eq!(
            Iri::new("http://example.com:/a").unwrap().as_str(),
            "http://example.com/a"
        );
    }

    #[test]
    fn stacked_droppable_ports_normalize_to_a_fixpoint() {
        assert_eq!(Iri::new("a://::").unwrap().as_str(), "a://");
        assert_eq!(Iri::new("http://h::80").unwrap().as_str(), "http://h");
        assert_eq!(Iri::new("http://h:80:80").unwrap().as_str(), "http://h");
        for raw in ["a://::", "http://h::80", "http://h:80:80", "a://x:"] {
            let once = Iri::new(raw).unwrap();
            let again = Iri::new(once.as_str()).unwrap();
            assert_eq!(again, once, "{raw}");
        }
    }

    #[test]
    fn normalized_forms_compare_equal() {
        let a = Iri::new("HTTPS://DBpedia.org:443/resource/Gibraltar").unwrap();
        let b = Iri::new("https://dbpedia.org/resource/Gibraltar").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn urn_rest_is_untouched() {
        let iri = Iri::new("URN:ISBN:0-486-27557-4").unwrap();
        assert_eq!(iri.as_str(), "urn:ISBN:0-486-27557-4");
    }

    #[test]
    fn ipv6_host_keeps_port_delimiting() {
        assert_eq!(
            Iri::new("http://[2001:DB8::1]:80/x").unwrap().as_str(),
            "http://[2001:db8::1]/x"
        );
        assert_eq!(
            Iri::new("http://[2001:db8::1]:9000/x").unwrap().as_str(),
            "http://[2001:db8::1]:9000/x"
        );
    }

    #[test]
    fn userinfo_case_is_preserved() {
        assert_eq!(
            Iri::new("ftp://Alice@Ftp.Example.org:21/f")
                .unwrap()
                .as_str(),
            "ftp://Alice@ftp.example.org/f"
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(Iri::new(""), Err(IriError::Empty));
        assert_eq!(Iri::new("http://a b"), Err(IriError::Whitespace));
        assert_eq!(Iri::new("no-scheme-here"), Err(IriError::MissingScheme));
        assert!(matches!(
            Iri::new("1http://x"),
            Err(IriError::InvalidScheme(_))
        ));
        assert!(matches!(
            Iri::new(":empty"),
            Err(IriError::InvalidScheme(_))
        ));
    }

    #[test]
    fn path_query_percent_bytes_kept_verbatim() {
        let iri = Iri::new("http://e.com/%2Fa%20?x=%41").unwrap();
        assert_eq!(iri.as_str(), "http://e.com/%2Fa%20?x=%41");
    }
}
