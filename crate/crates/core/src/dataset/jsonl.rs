//! JSONL dataset files.
//!
//! Line 1 is a header object `{"classCount": .., "dims": {"audio": ..,
//! "text": .., "visual": ..}}`; every following line is one utterance
//! `{"conv": .., "label": .., "audio": [..], "text": [..], "visual": [..],
//! "split": "train"|"valid"|"test"}`. UTF-8, one object per line.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{Conversation, Corpus, CorpusBundle, Split, Utterance};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    #[serde(rename = "classCount")]
    class_count: usize,
    dims: Dims,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Dims {
    audio: usize,
    text: usize,
    visual: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Line {
    conv: String,
    label: usize,
    audio: Vec<f64>,
    text: Vec<f64>,
    visual: Vec<f64>,
    split: String,
}

/// Loads a JSONL dataset. Conversations are grouped by id in first-appearance
/// order; utterance order within a conversation is file order.
pub fn load_jsonl(path: impl AsRef<Path>) -> Result<CorpusBundle> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines().enumerate();

    let (_, first) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty file: missing header".into(),
    })?;
    let first = first.map_err(|e| Error::io(path, e))?;
    let header: Header = serde_json::from_str(&first).map_err(|e| Error::Parse {
        line: 1,
        message: format!("bad header: {e}"),
    })?;
    let dims = [header.dims.audio, header.dims.text, header.dims.visual];

    // conversation id -> (split, utterances), in first-appearance order
    let mut order: Vec<String> = Vec::new();
    let mut convs: HashMap<String, (Split, Vec<Utterance>)> = HashMap::new();
    let mut total = 0usize;

    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Line = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let split = Split::parse(&rec.split).ok_or_else(|| Error::Schema {
            line: line_no,
            message: format!("unknown split tag `{}`", rec.split),
        })?;
        if rec.label >= header.class_count {
            return Err(Error::Schema {
                line: line_no,
                message: format!(
                    "label {} out of range for {} classes",
                    rec.label, header.class_count
                ),
            });
        }
        let features = [rec.audio, rec.text, rec.visual];
        for (m, got) in features.iter().enumerate() {
            if got.len() != dims[m] {
                return Err(Error::Schema {
                    line: line_no,
                    message: format!(
                        "{} feature has {} values, header says {}",
                        ["audio", "text", "visual"][m],
                        got.len(),
                        dims[m]
                    ),
                });
            }
        }
        let entry = convs.entry(rec.conv.clone()).or_insert_with(|| {
            order.push(rec.conv.clone());
            (split, Vec::new())
        });
        if entry.0 != split {
            return Err(Error::Schema {
                line: line_no,
                message: format!("conversation `{}` spans multiple splits", rec.conv),
            });
        }
        entry.1.push(Utterance {
            features,
            label: rec.label,
        });
        total += 1;
    }

    if total == 0 {
        return Err(Error::Data(format!(
            "dataset file {} contains no utterances",
            path.display()
        )));
    }

    let mut per_split: [Vec<Conversation>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for id in order {
        let (split, utterances) = convs.remove(&id).unwrap();
        let slot = match split {
            Split::Train => 0,
            Split::Valid => 1,
            Split::Test => 2,
        };
        per_split[slot].push(Conversation { id, utterances });
    }
    let [train_convs, valid_convs, test_convs] = per_split;
    let corpus = |conversations, split| Corpus {
        conversations,
        class_count: header.class_count,
        modality_dims: dims,
        split,
    };
    CorpusBundle::new(
        corpus(train_convs, Split::Train),
        corpus(valid_convs, Split::Valid),
        corpus(test_convs, Split::Test),
    )
}

/// Writes a bundle in the format [`load_jsonl`] reads. Doubles round-trip
/// exactly through serde_json's shortest representation.
pub fn save_jsonl(bundle: &CorpusBundle, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let dims = bundle.modality_dims();
    let header = Header {
        class_count: bundle.class_count(),
        dims: Dims {
            audio: dims[0],
            text: dims[1],
            visual: dims[2],
        },
    };
    let io_err = |e: std::io::Error| Error::io(path, e);
    serde_json::to_writer(&mut w, &header).map_err(|e| Error::Data(e.to_string()))?;
    w.write_all(b"\n").map_err(io_err)?;
    for corpus in [&bundle.train, &bundle.valid, &bundle.test] {
        for conv in &corpus.conversations {
            for utt in &conv.utterances {
                let rec = Line {
                    conv: conv.id.clone(),
                    label: utt.label,
                    audio: utt.features[0].clone(),
                    text: utt.features[1].clone(),
                    visual: utt.features[2].clone(),
                    split: corpus.split.as_str().to_string(),
                };
                serde_json::to_writer(&mut w, &rec).map_err(|e| Error::Data(e.to_string()))?;
                w.write_all(b"\n").map_err(io_err)?;
            }
        }
    }
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_bundle, SynthConfig};

    fn write_lines(lines: &[&str]) -> tempfile::NamedTempFile {
        use std::io::Write as _;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for l in lines {
            writeln!(f, "{l}").unwrap();
        }
        f
    }

    const HEADER: &str =
        r#"{"classCount": 2, "dims": {"audio": 1, "text": 2, "visual": 1}}"#;

    fn utt(conv: &str, label: usize, split: &str) -> String {
        format!(
            r#"{{"conv": "{conv}", "label": {label}, "audio": [0.5], "text": [1.0, -1.0], "visual": [0.25], "split": "{split}"}}"#
        )
    }

    #[test]
    fn loads_and_groups_conversations() {
        let f = write_lines(&[
            HEADER,
            &utt("a", 0, "train"),
            &utt("a", 1, "train"),
            &utt("a", 0, "train"),
            &utt("b", 1, "train"),
            &utt("b", 0, "train"),
        ]);
        let bundle = load_jsonl(f.path()).unwrap();
        assert_eq!(bundle.train.conversations.len(), 2);
        assert_eq!(bundle.train.conversations[0].utterances.len(), 3);
        assert_eq!(bundle.train.conversations[1].utterances.len(), 2);
        assert!(bundle.valid.is_empty());
        assert!(bundle.test.is_empty());
    }

    #[test]
    fn empty_and_header_only_files_error() {
        let f = write_lines(&[]);
        assert!(matches!(load_jsonl(f.path()), Err(Error::Parse { line: 1, .. })));

        let f = write_lines(&[HEADER]);
        assert!(matches!(load_jsonl(f.path()), Err(Error::Data(_))));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let f = write_lines(&[HEADER, &utt("a", 0, "train"), "{not json"]);
        match load_jsonl(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn schema_errors_for_dims_split_and_label() {
        let bad_dim = r#"{"conv": "a", "label": 0, "audio": [0.5, 0.5], "text": [1.0, -1.0], "visual": [0.25], "split": "train"}"#;
        let f = write_lines(&[HEADER, bad_dim]);
        assert!(matches!(load_jsonl(f.path()), Err(Error::Schema { line: 2, .. })));

        let f = write_lines(&[HEADER, &utt("a", 0, "dev")]);
        assert!(matches!(load_jsonl(f.path()), Err(Error::Schema { .. })));

        let f = write_lines(&[HEADER, &utt("a", 7, "train")]);
        assert!(matches!(load_jsonl(f.path()), Err(Error::Schema { .. })));

        let f = write_lines(&[HEADER, &utt("a", 0, "train"), &utt("a", 0, "test")]);
        assert!(matches!(load_jsonl(f.path()), Err(Error::Schema { line: 3, .. })));
    }

    // Round-trip oracle: generate -> save -> load must reproduce the bundle
    // field-for-field.
    #[test]
    fn round_trip_is_lossless() {
        let cfg = SynthConfig {
            conversation_count: 4,
            ..SynthConfig::default()
        };
        let bundle = generate_bundle(&cfg, 2, 2).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_jsonl(&bundle, f.path()).unwrap();
        let loaded = load_jsonl(f.path()).unwrap();
        assert_eq!(bundle, loaded);
    }
}
