//! Corpus data model, ingestion and label normalization.
//!
//! Raw labels go through two steps before they become [`Topic`]s:
//! [`fold_label`] (lowercase, diacritics stripped, dashes unified, whitespace
//! collapsed) and then an exact-match rewrite table ([`NormalizationRules`]).
//! A module is a set, so duplicates that collapse to the same topic are merged.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("label {raw:?} is empty after folding")]
    EmptyLabel { raw: String },
    #[error("{origin}: {position}: {message}")]
    Parse {
        origin: String,
        position: String,
        message: String,
    },
    #[error("invalid corpus: {0}")]
    Validation(String),
    #[error("invalid rewrite rules: {0}")]
    Rules(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CorpusError {
    fn parse(origin: &str, position: impl Into<String>, message: impl Into<String>) -> Self {
        CorpusError::Parse {
            origin: origin.to_string(),
            position: position.into(),
            message: message.into(),
        }
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// A canonical topic label.
///
/// `From<&str>` wraps the text as-is; use [`fold_label`] or [`Topic::parse`]
/// when the input may not be canonical yet.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Topic(String);

impl Topic {
    /// Accepts `label` only if it is already canonical.
    pub fn parse(label: &str) -> Result<Self, CorpusError> {
        let folded = fold_label(label)?;
        if folded.as_str() != label {
            return Err(CorpusError::Validation(format!(
                "label {label:?} is not canonical (expected {:?})",
                folded.as_str()
            )));
        }
        Ok(folded)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl From<&str> for Topic {
    fn from(s: &str) -> Self {
        Topic(s.to_string())
    }
}

impl From<String> for Topic {
    fn from(s: String) -> Self {
        Topic(s)
    }
}

impl AsRef<str> for Topic {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Topic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn is_dash(c: char) -> bool {
    matches!(
        c,
        '\u{2010}'..='\u{2015}' | '\u{2212}' | '\u{FE58}' | '\u{FE63}' | '\u{FF0D}' | '\u{00AD}'
    )
}

fn strip_marks(s: &str) -> String {
    s.nfd().filter(|c| !is_combining_mark(*c)).collect()
}

/// Folds a raw label into canonical form.
///
/// Lowercases, removes combining marks after canonical decomposition, maps
/// dash-like punctuation to `-` and collapses whitespace. Idempotent.
pub fn fold_label(raw: &str) -> Result<Topic, CorpusError> {
    // Lowercasing can produce precomposed characters, hence the second pass.
    let lowered = strip_marks(&strip_marks(raw).to_lowercase());
    let dashed: String = lowered
        .chars()
        .map(|c| if is_dash(c) { '-' } else { c })
        .collect();
    let collapsed = dashed.split_whitespace().collect::<Vec<_>>().join(" ");
    if collapsed.is_empty() {
        return Err(CorpusError::EmptyLabel {
            raw: raw.to_string(),
        });
    }
    Ok(Topic(collapsed))
}

/// Ordered exact-match rewrite table applied after folding.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NormalizationRules {
    rewrites: Vec<(Topic, Topic)>,
    index: HashMap<Topic, usize>,
}

impl NormalizationRules {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Patterns are folded before matching; replacements must already be
    /// canonical and no pattern may appear twice.
    pub fn new<P, R>(pairs: impl IntoIterator<Item = (P, R)>) -> Result<Self, CorpusError>
    where
        P: AsRef<str>,
        R: AsRef<str>,
    {
        let mut rules = Self::default();
        for (n, (pattern, replacement)) in pairs.into_iter().enumerate() {
            let (pattern, replacement) = (pattern.as_ref(), replacement.as_ref());
            let folded = fold_label(pattern)
                .map_err(|_| CorpusError::Rules(format!("rule {}: empty pattern", n + 1)))?;
            let canonical = Topic::parse(replacement).map_err(|_| {
                CorpusError::Rules(format!(
                    "rule {}: replacement {replacement:?} is not canonical",
                    n + 1
                ))
            })?;
            if rules.index.contains_key(&folded) {
                return Err(CorpusError::Rules(format!(
                    "rule {}: pattern {:?} appears more than once",
                    n + 1,
                    folded.as_str()
                )));
            }
            rules.index.insert(folded.clone(), rules.rewrites.len());
            rules.rewrites.push((folded, canonical));
        }
        Ok(rules)
    }

    /// Reads a `pattern,replacement` CSV with a header row.
    pub fn from_csv_str(text: &str) -> Result<Self, CorpusError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| CorpusError::parse("rules", "header", e.to_string()))?
            .clone();
        let expected = ["pattern", "replacement"];
        if headers.len() != 2 || headers.iter().zip(expected).any(|(h, e)| h.trim() != e) {
            return Err(CorpusError::parse(
                "rules",
                "line 1",
                "expected header `pattern,replacement`",
            ));
        }
        let mut pairs = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                CorpusError::parse("rules", format!("line {line}"), e.to_string())
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() != 2 {
                return Err(CorpusError::parse(
                    "rules",
                    format!("line {line}"),
                    format!("expected 2 fields, found {}", record.len()),
                ));
            }
            pairs.push((record[0].to_string(), record[1].to_string()));
        }
        Self::new(pairs)
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let text = fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
        Self::from_csv_str(&text)
    }

    /// Rewrites a folded label. At most one rule fires; rewrites do not chain.
    pub fn apply(&self, label: Topic) -> Topic {
        match self.index.get(&label) {
            Some(&i) => self.rewrites[i].1.clone(),
            None => label,
        }
    }

    pub fn rewrites(&self) -> &[(Topic, Topic)] {
        &self.rewrites
    }

    pub fn len(&self) -> usize {
        self.rewrites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewrites.is_empty()
    }
}

/// Folds then rewrites one raw label.
pub fn canonicalize(raw: &str, rules: &NormalizationRules) -> Result<Topic, CorpusError> {
    fold_label(raw).map(|t| rules.apply(t))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawCourse {
    pub id: String,
    #[serde(default)]
    pub source: Option<String>,
    pub modules: Vec<Vec<String>>,
}

impl RawCourse {
    pub fn new<M, S>(id: &str, modules: impl IntoIterator<Item = M>) -> Self
    where
        M: IntoIterator<Item = S>,
        S: Into<String>,
    {
        RawCourse {
            id: id.to_string(),
            source: None,
            modules: modules
                .into_iter()
                .map(|m| m.into_iter().map(Into::into).collect())
                .collect(),
        }
    }
}

/// Corpus as read from disk, before folding and rewriting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawCorpus {
    pub courses: Vec<RawCourse>,
}

impl RawCorpus {
    pub fn normalize(&self, rules: &NormalizationRules) -> Result<Corpus, CorpusError> {
        if self.courses.is_empty() {
            return Err(CorpusError::Validation("corpus has no courses".into()));
        }
        let mut seen = HashSet::new();
        let mut courses = Vec::with_capacity(self.courses.len());
        for raw in &self.courses {
            if !seen.insert(raw.id.as_str()) {
                return Err(CorpusError::Validation(format!(
                    "duplicate course id {:?}",
                    raw.id
                )));
            }
            if raw.modules.is_empty() {
                return Err(CorpusError::Validation(format!(
                    "course {:?} has no modules",
                    raw.id
                )));
            }
            let mut modules = Vec::with_capacity(raw.modules.len());
            for (i, labels) in raw.modules.iter().enumerate() {
                let mut module = BTreeSet::new();
                for label in labels {
                    let topic = canonicalize(label, rules).map_err(|e| {
                        CorpusError::Validation(format!("course {:?}, module {i}: {e}", raw.id))
                    })?;
                    module.insert(topic);
                }
                if module.is_empty() {
                    return Err(CorpusError::Validation(format!(
                        "course {:?}, module {i} is empty",
                        raw.id
                    )));
                }
                modules.push(module);
            }
            courses.push(Course {
                id: raw.id.clone(),
                source: raw.source.clone(),
                modules,
            });
        }
        Ok(Corpus { courses })
    }
}

/// One curricular module: a set of topics.
pub type Module = BTreeSet<Topic>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Course {
    pub id: String,
    pub source: Option<String>,
    pub modules: Vec<Module>,
}

/// Validated corpus of canonical topics. Course and module order is significant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub courses: Vec<Course>,
}

impl Corpus {
    /// Checks every corpus invariant.
    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.courses.is_empty() {
            return Err(CorpusError::Validation("corpus has no courses".into()));
        }
        let mut seen = HashSet::new();
        for course in &self.courses {
            if !seen.insert(course.id.as_str()) {
                return Err(CorpusError::Validation(format!(
                    "duplicate course id {:?}",
                    course.id
                )));
            }
            if course.modules.is_empty() {
                return Err(CorpusError::Validation(format!(
                    "course {:?} has no modules",
                    course.id
                )));
            }
            for (i, module) in course.modules.iter().enumerate() {
                if module.is_empty() {
                    return Err(CorpusError::Validation(format!(
                        "course {:?}, module {i} is empty",
                        course.id
                    )));
                }
                for topic in module {
                    Topic::parse(topic.as_str()).map_err(|e| {
                        CorpusError::Validation(format!("course {:?}, module {i}: {e}", course.id))
                    })?;
                }
            }
        }
        Ok(())
    }

    /// All distinct topics across the corpus.
    pub fn topics(&self) -> BTreeSet<Topic> {
        self.courses
            .iter()
            .flat_map(|c| c.modules.iter().flatten().cloned())
            .collect()
    }

    pub fn module_count(&self) -> usize {
        self.courses.iter().map(|c| c.modules.len()).sum()
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("corpus serializes");
        out.push('\n');
        out
    }
}

/// Accepted corpus file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Json,
    Tsv,
}

impl CorpusFormat {
    /// Picks a format from the extension, falling back to sniffing the content.
    pub fn detect(path: &Path, text: &str) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => CorpusFormat::Json,
            Some(ext) if ext.eq_ignore_ascii_case("tsv") || ext.eq_ignore_ascii_case("tab") => {
                CorpusFormat::Tsv
            }
            _ if text.trim_start().starts_with('{') => CorpusFormat::Json,
            _ => CorpusFormat::Tsv,
        }
    }
}

pub fn parse_raw_json(text: &str, origin: &str) -> Result<RawCorpus, CorpusError> {
    serde_json::from_str(text).map_err(|e| {
        CorpusError::parse(
            origin,
            format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

/// Parses the TSV layout: `course_id<TAB>module_index<TAB>topic<TAB>topic...`.
///
/// Blank lines and lines starting with `#` are ignored. Rows sharing a course
/// and module index are merged into one module.
pub fn parse_raw_tsv(text: &str, origin: &str) -> Result<RawCorpus, CorpusError> {
    let mut courses: Vec<RawCourse> = Vec::new();
    let mut last_index: Vec<u64> = Vec::new();
    let mut by_id: HashMap<String, usize> = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let id = fields.next().unwrap_or("").trim();
        if id.is_empty() {
            return Err(CorpusError::parse(
                origin,
                format!("line {lineno}"),
                "missing course id",
            ));
        }
        let index_field = fields.next().ok_or_else(|| {
            CorpusError::parse(origin, format!("line {lineno}"), "missing module index")
        })?;
        let index: u64 = index_field.trim().parse().map_err(|_| {
            CorpusError::parse(
                origin,
                format!("line {lineno}"),
                format!("module index {index_field:?} is not a non-negative integer"),
            )
        })?;
        let topics: Vec<String> = fields
            .filter(|f| !f.trim().is_empty())
            .map(str::to_string)
            .collect();
        if topics.is_empty() {
            return Err(CorpusError::Validation(format!(
                "course {id:?}, module index {index} is empty (line {lineno})"
            )));
        }
        let slot = match by_id.get(id) {
            Some(&slot) => slot,
            None => {
                by_id.insert(id.to_string(), courses.len());
                courses.push(RawCourse {
                    id: id.to_string(),
                    source: None,
                    modules: Vec::new(),
                });
                last_index.push(index);
                courses.len() - 1
            }
        };
        let course = &mut courses[slot];
        if course.modules.is_empty() || index > last_index[slot] {
            course.modules.push(topics);
        } else if index == last_index[slot] {
            course.modules.last_mut().expect("nonempty").extend(topics);
        } else {
            return Err(CorpusError::parse(
                origin,
                format!("line {lineno}"),
                format!(
                    "module index {index} of course {id:?} follows index {}",
                    last_index[slot]
                ),
            ));
        }
        last_index[slot] = index;
    }
    Ok(RawCorpus { courses })
}

pub fn parse_corpus(
    text: &str,
    format: CorpusFormat,
    origin: &str,
    rules: &NormalizationRules,
) -> Result<Corpus, CorpusError> {
    let raw = match format {
        CorpusFormat::Json => parse_raw_json(text, origin)?,
        CorpusFormat::Tsv => parse_raw_tsv(text, origin)?,
    };
    let corpus = raw.normalize(rules)?;
    corpus.validate()?;
    Ok(corpus)
}

/// Reads, folds and rewrites a corpus file (JSON or TSV).
pub fn load_corpus(path: &Path, rules: &NormalizationRules) -> Result<Corpus, CorpusError> {
    let text = fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
    let format = CorpusFormat::detect(path, &text);
    parse_corpus(&text, format, &path.display().to_string(), rules)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fold(s: &str) -> String {
        fold_label(s).unwrap().into_string()
    }

    #[test]
    fn folds_case_diacritics_dashes_whitespace() {
        assert_eq!(fold("Centrality"), "centrality");
        assert_eq!(fold("Erdős–Rényi model"), "erdos-renyi model");
        assert_eq!(fold("  small-world   networks "), "small-world networks");
        assert_eq!(fold("Barabási—Albert"), "barabasi-albert");
        assert_eq!(
            fold("k\u{2011}core\tdecomposition\n"),
            "k-core decomposition"
        );
    }

    #[test]
    fn empty_after_folding_is_rejected() {
        assert!(matches!(
            fold_label("   \t "),
            Err(CorpusError::EmptyLabel { .. })
        ));
        assert!(fold_label("\u{0301}").is_err());
    }

    #[test]
    fn rewrites_are_exact_and_do_not_chain() {
        let rules = NormalizationRules::new([("ER graphs", "erdos-renyi networks")]).unwrap();
        assert_eq!(
            rules.apply(Topic::from("er graphs")).as_str(),
            "erdos-renyi networks"
        );
        assert_eq!(
            rules.apply(Topic::from("er graphs basics")).as_str(),
            "er graphs basics"
        );
        let empty = NormalizationRules::empty();
        assert_eq!(
            empty.apply(Topic::from("centrality")).as_str(),
            "centrality"
        );
        let chain = NormalizationRules::new([("a", "b"), ("b", "c")]).unwrap();
        assert_eq!(chain.apply(Topic::from("a")).as_str(), "b");
    }

    #[test]
    fn rules_reject_duplicates_and_noncanonical_replacements() {
        assert!(matches!(
            NormalizationRules::new([("A", "x"), ("a", "y")]),
            Err(CorpusError::Rules(_))
        ));
        assert!(matches!(
            NormalizationRules::new([("a", "Not Canonical")]),
            Err(CorpusError::Rules(_))
        ));
    }

    #[test]
    fn rules_csv() {
        let rules = NormalizationRules::from_csv_str(
            "pattern,replacement\nSW nets,small-world networks\n\"a, b\",c\n",
        )
        .unwrap();
        assert_eq!(rules.len(), 2);
        assert_eq!(
            rules.apply(Topic::from("sw nets")).as_str(),
            "small-world networks"
        );
        assert_eq!(rules.apply(Topic::from("a, b")).as_str(), "c");
        assert!(NormalizationRules::from_csv_str("from,to\na,b\n").is_err());
    }

    #[test]
    fn json_folds_and_dedups() {
        let text = r#"{"courses":[{"id":"c1","source":null,"modules":[["A","a"],["b"]]}]}"#;
        let corpus =
            parse_corpus(text, CorpusFormat::Json, "t", &NormalizationRules::empty()).unwrap();
        let modules: Vec<Vec<&str>> = corpus.courses[0]
            .modules
            .iter()
            .map(|m| m.iter().map(Topic::as_str).collect())
            .collect();
        assert_eq!(modules, vec![vec!["a"], vec!["b"]]);
    }

    #[test]
    fn json_parse_error_has_position() {
        let err = parse_corpus(
            "{\"courses\": [\n  {\"id\": 3}",
            CorpusFormat::Json,
            "bad.json",
            &NormalizationRules::empty(),
        )
        .unwrap_err();
        match err {
            CorpusError::Parse { position, .. } => assert!(position.starts_with("line 2")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_module_is_a_validation_error() {
        let text = r#"{"courses":[{"id":"c1","modules":[["a"],[]]}]}"#;
        let err =
            parse_corpus(text, CorpusFormat::Json, "t", &NormalizationRules::empty()).unwrap_err();
        match err {
            CorpusError::Validation(msg) => {
                assert!(msg.contains("c1") && msg.contains("module 1"), "{msg}")
            }
            other => panic!("unexpected {other:?}"),
        }
        let tsv = "c1\t0\ta\nc1\t1\t\t \n";
        assert!(matches!(
            parse_corpus(tsv, CorpusFormat::Tsv, "t", &NormalizationRules::empty()),
            Err(CorpusError::Validation(_))
        ));
    }

    #[test]
    fn duplicate_course_ids_are_rejected() {
        let text = r#"{"courses":[{"id":"c","modules":[["a"]]},{"id":"c","modules":[["b"]]}]}"#;
        assert!(matches!(
            parse_corpus(text, CorpusFormat::Json, "t", &NormalizationRules::empty()),
            Err(CorpusError::Validation(_))
        ));
    }

    #[test]
    fn tsv_matches_in_memory_corpus() {
        let tsv = "# course\tindex\ttopics\n\
                   c1\t0\tIntro\tGraphs\n\
                   c1\t1\tPaths\n\
                   c1\t2\tCentrality\n\
                   c2\t0\tGraphs\n\
                   c2\t1\tRandom networks\n\
                   c2\t1\tSmall-world networks\n\
                   c2\t5\tCentrality\n";
        let corpus =
            parse_corpus(tsv, CorpusFormat::Tsv, "t", &NormalizationRules::empty()).unwrap();
        let expected = RawCorpus {
            courses: vec![
                RawCourse::new(
                    "c1",
                    [vec!["intro", "graphs"], vec!["paths"], vec!["centrality"]],
                ),
                RawCourse::new(
                    "c2",
                    [
                        vec!["graphs"],
                        vec!["random networks", "small-world networks"],
                        vec!["centrality"],
                    ],
                ),
            ],
        }
        .normalize(&NormalizationRules::empty())
        .unwrap();
        assert_eq!(corpus, expected);
    }

    #[test]
    fn tsv_rejects_decreasing_index_and_bad_numbers() {
        let rules = NormalizationRules::empty();
        let err = parse_corpus("c1\t2\ta\nc1\t1\tb\n", CorpusFormat::Tsv, "t", &rules).unwrap_err();
        assert!(matches!(err, CorpusError::Parse { ref position, .. } if position == "line 2"));
        assert!(matches!(
            parse_corpus("c1\tx\ta\n", CorpusFormat::Tsv, "t", &rules),
            Err(CorpusError::Parse { .. })
        ));
    }

    #[test]
    fn format_detection() {
        assert_eq!(
            CorpusFormat::detect(Path::new("a.json"), ""),
            CorpusFormat::Json
        );
        assert_eq!(
            CorpusFormat::detect(Path::new("a.TSV"), "{"),
            CorpusFormat::Tsv
        );
        assert_eq!(
            CorpusFormat::detect(Path::new("a"), "  {\"c"),
            CorpusFormat::Json
        );
        assert_eq!(
            CorpusFormat::detect(Path::new("a.txt"), "c\t0\tx"),
            CorpusFormat::Tsv
        );
    }

    #[test]
    fn rewrites_apply_during_normalization() {
        let rules = NormalizationRules::new([("ER graphs", "erdos-renyi networks")]).unwrap();
        let raw = RawCorpus {
            courses: vec![RawCourse::new(
                "c",
                [vec!["ER  Graphs", "Erdős–Rényi networks"]],
            )],
        };
        let corpus = raw.normalize(&rules).unwrap();
        assert_eq!(corpus.courses[0].modules[0].len(), 1);
    }
}
