//! Multimodal conversation corpora: domain types, a synthetic imbalanced
//! generator, a JSONL loader, and whole-conversation batching.

mod batch;
mod jsonl;
mod synth;

pub use batch::{assemble_batch, batches, ConvSpan, UtteranceBatch};
pub use jsonl::{load_jsonl, save_jsonl};
pub use synth::{generate, generate_bundle, SynthConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The three feature channels each utterance carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Audio,
    Text,
    Visual,
}

impl Modality {
    pub const ALL: [Modality; 3] = [Modality::Audio, Modality::Text, Modality::Visual];

    pub fn index(self) -> usize {
        match self {
            Modality::Audio => 0,
            Modality::Text => 1,
            Modality::Visual => 2,
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Modality::Audio => "audio",
            Modality::Text => "text",
            Modality::Visual => "visual",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "audio" => Ok(Modality::Audio),
            "text" => Ok(Modality::Text),
            "visual" => Ok(Modality::Visual),
            other => Err(Error::Config(format!("unknown modality `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "train" => Some(Split::Train),
            "valid" => Some(Split::Valid),
            "test" => Some(Split::Test),
            _ => None,
        }
    }
}

/// One labeled turn. Feature vectors are indexed by [`Modality::index`] and
/// all three are always present.
#[derive(Debug, Clone, PartialEq)]
pub struct Utterance {
    pub features: [Vec<f64>; 3],
    pub label: usize,
}

impl Utterance {
    pub fn feature(&self, m: Modality) -> &[f64] {
        &self.features[m.index()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Conversation {
    pub id: String,
    pub utterances: Vec<Utterance>,
}

/// One split of a dataset. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub conversations: Vec<Conversation>,
    pub class_count: usize,
    pub modality_dims: [usize; 3],
    pub split: Split,
}

impl Corpus {
    pub fn empty(class_count: usize, modality_dims: [usize; 3], split: Split) -> Self {
        Corpus {
            conversations: Vec::new(),
            class_count,
            modality_dims,
            split,
        }
    }

    pub fn utterance_count(&self) -> usize {
        self.conversations.iter().map(|c| c.utterances.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.conversations.is_empty()
    }

    /// Checks label range, conversation non-emptiness, and feature dims.
    pub fn validate(&self) -> Result<()> {
        if self.class_count < 2 {
            return Err(Error::Data(format!(
                "class count must be at least 2, got {}",
                self.class_count
            )));
        }
        for conv in &self.conversations {
            if conv.utterances.is_empty() {
                return Err(Error::Data(format!("conversation `{}` is empty", conv.id)));
            }
            for utt in &conv.utterances {
                if utt.label >= self.class_count {
                    return Err(Error::Data(format!(
                        "label {} out of range for {} classes in conversation `{}`",
                        utt.label, self.class_count, conv.id
                    )));
                }
                for m in Modality::ALL {
                    if utt.feature(m).len() != self.modality_dims[m.index()] {
                        return Err(Error::Data(format!(
                            "{} feature dim {} does not match configured {} in conversation `{}`",
                            m.key(),
                            utt.feature(m).len(),
                            self.modality_dims[m.index()],
                            conv.id
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Train/valid/test corpora sharing one schema.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusBundle {
    pub train: Corpus,
    pub valid: Corpus,
    pub test: Corpus,
}

impl CorpusBundle {
    pub fn new(train: Corpus, valid: Corpus, test: Corpus) -> Result<Self> {
        let bundle = CorpusBundle { train, valid, test };
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn class_count(&self) -> usize {
        self.train.class_count
    }

    pub fn modality_dims(&self) -> [usize; 3] {
        self.train.modality_dims
    }

    pub fn validate(&self) -> Result<()> {
        for corpus in [&self.train, &self.valid, &self.test] {
            if corpus.class_count != self.train.class_count
                || corpus.modality_dims != self.train.modality_dims
            {
                return Err(Error::Data("splits disagree on schema".into()));
            }
            corpus.validate()?;
        }
        Ok(())
    }

    /// If the valid split is empty, holds out `fraction` of the train
    /// conversations (seeded; at least one) as validation data.
    pub fn ensure_validation_split(&mut self, fraction: f64, seed: u64) -> Result<()> {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;

        if !self.valid.is_empty() || self.train.is_empty() {
            return Ok(());
        }
        let n = self.train.conversations.len();
        let k = ((n as f64 * fraction).round() as usize).clamp(1, n.saturating_sub(1).max(1));
        if k >= n {
            return Err(Error::Data(
                "train split too small to hold out validation conversations".into(),
            ));
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut held: Vec<usize> = order[..k].to_vec();
        held.sort_unstable();

        let mut kept = Vec::with_capacity(n - k);
        let mut taken = Vec::with_capacity(k);
        let mut held_iter = held.iter().peekable();
        for (idx, conv) in self.train.conversations.drain(..).enumerate() {
            if held_iter.peek() == Some(&&idx) {
                held_iter.next();
                taken.push(conv);
            } else {
                kept.push(conv);
            }
        }
        self.train.conversations = kept;
        self.valid.conversations = taken;
        Ok(())
    }
}
