use serde::{Deserialize, Serialize};

/// A token estimate and the heuristic that produced it. Counts from
/// different methods are not comparable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenCount {
    pub count: u64,
    pub method: String,
}

pub trait TokenCounter: Send + Sync {
    fn method(&self) -> &'static str;

    fn count(&self, text: &str) -> u64;

    fn measure(&self, text: &str) -> TokenCount {
        TokenCount {
            count: self.count(text),
            method: self.method().to_owned(),
        }
    }
}

/// Each maximal run of alphanumeric characters is one token, as is every
/// other non-whitespace character.
#[derive(Debug, Clone, Copy, Default)]
pub struct WordPunctCounter;

impl WordPunctCounter {
    pub const METHOD: &'static str = "word-punct";
}

impl TokenCounter for WordPunctCounter {
    fn method(&self) -> &'static str {
        Self::METHOD
    }

    fn count(&self, text: &str) -> u64 {
        let mut n = 0;
        let mut in_word = false;
        for c in text.chars() {
            if c.is_alphanumeric() {
                if !in_word {
                    n += 1;
                }
                in_word = true;
            } else {
                in_word = false;
                if !c.is_whitespace() {
                    n += 1;
                }
            }
        }
        n
    }
}

/// Whitespace-separated chunks.
#[derive(Debug, Clone, Copy, Default)]
pub struct WhitespaceCounter;

impl WhitespaceCounter {
    pub const METHOD: &'static str = "whitespace";
}

impl TokenCounter for WhitespaceCounter {
    fn method(&self) -> &'static str {
        Self::METHOD
    }

    fn count(&self, text: &str) -> u64 {
        text.split_whitespace().count() as u64
    }
}

/// Counts with the default method.
pub fn count_tokens(text: &str) -> TokenCount {
    WordPunctCounter.measure(text)
}
