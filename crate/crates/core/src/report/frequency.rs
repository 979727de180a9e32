use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Topic};

/// What counts as one occurrence of a topic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyUnit {
    /// One per (course, module) containing the topic.
    #[default]
    Module,
    /// One per course containing the topic anywhere.
    Course,
}

impl fmt::Display for FrequencyUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrequencyUnit::Module => "module",
            FrequencyUnit::Course => "course",
        })
    }
}

impl FromStr for FrequencyUnit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "module" => Ok(FrequencyUnit::Module),
            "course" => Ok(FrequencyUnit::Course),
            other => Err(format!(
                "unknown frequency unit {other:?} (expected module or course)"
            )),
        }
    }
}

/// Topic counts sorted by count descending, then topic ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FrequencyTable {
    entries: Vec<(Topic, u64)>,
}

impl FrequencyTable {
    /// Sorts the entries; zero counts are dropped.
    pub fn new(entries: impl IntoIterator<Item = (Topic, u64)>) -> Self {
        let mut entries: Vec<(Topic, u64)> = entries.into_iter().filter(|e| e.1 > 0).collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        FrequencyTable { entries }
    }

    pub fn entries(&self) -> &[(Topic, u64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn count(&self, topic: &str) -> Option<u64> {
        self.entries
            .iter()
            .find(|(t, _)| t.as_str() == topic)
            .map(|e| e.1)
    }

    /// `topic,count` with a header row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["topic", "count"]).expect("in-memory write");
        for (t, c) in &self.entries {
            w.write_record([t.as_str(), &c.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

pub fn topic_frequencies(corpus: &Corpus) -> FrequencyTable {
    topic_frequencies_by(corpus, FrequencyUnit::Module)
}

pub fn topic_frequencies_by(corpus: &Corpus, unit: FrequencyUnit) -> FrequencyTable {
    let mut counts: BTreeMap<&Topic, u64> = BTreeMap::new();
    for course in &corpus.courses {
        match unit {
            FrequencyUnit::Module => {
                for topic in course.modules.iter().flatten() {
                    *counts.entry(topic).or_default() += 1;
                }
            }
            FrequencyUnit::Course => {
                let present: std::collections::BTreeSet<&Topic> =
                    course.modules.iter().flatten().collect();
                for topic in present {
                    *counts.entry(topic).or_default() += 1;
                }
            }
        }
    }
    FrequencyTable::new(counts.into_iter().map(|(t, c)| (t.clone(), c)))
}

/// The first `k` entries plus every later entry tied with the `k`-th.
pub fn top_k_with_ties(table: &FrequencyTable, k: usize) -> FrequencyTable {
    let entries = table.entries();
    if k == 0 || entries.is_empty() {
        return FrequencyTable::default();
    }
    if k >= entries.len() {
        return table.clone();
    }
    let cutoff = entries[k - 1].1;
    let len = entries.iter().take_while(|e| e.1 >= cutoff).count();
    FrequencyTable {
        entries: entries[..len].to_vec(),
    }
}

/// Word-cloud font sizes proportional to the square root of each count,
/// scaled so the most frequent topic gets `max_size`.
pub fn wordcloud_sizes(table: &FrequencyTable, max_size: f64) -> Vec<(Topic, f64)> {
    let Some(max) = table.entries().iter().map(|e| e.1).max() else {
        return Vec::new();
    };
    let denom = (max as f64).sqrt();
    table
        .entries()
        .iter()
        .map(|(t, c)| (t.clone(), max_size * (*c as f64).sqrt() / denom))
        .collect()
}
