//! Transcript tokens: words, pause markers, and bracketed vocal noise.

use serde::{Deserialize, Serialize};

/// What kind of transcript unit a token is. The kind is fully determined
/// by the surface form: `.` is a pause marker, `[...]` is vocal noise,
/// everything else is a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TokenKind {
    Word,
    PauseMarker,
    Bracketed,
}

/// One unit of transcript input with its utterance position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
    pub position: usize,
}

impl Token {
    pub fn new(surface: &str, position: usize) -> Self {
        Self {
            surface: surface.to_string(),
            kind: classify(surface),
            position,
        }
    }

    pub fn is_pause_marker(&self) -> bool {
        self.kind == TokenKind::PauseMarker
    }

    pub fn is_bracketed(&self) -> bool {
        self.kind == TokenKind::Bracketed
    }
}

fn classify(surface: &str) -> TokenKind {
    if surface == "." {
        TokenKind::PauseMarker
    } else if surface.len() >= 2 && surface.starts_with('[') && surface.ends_with(']') {
        TokenKind::Bracketed
    } else {
        TokenKind::Word
    }
}

/// Splits one transcript line (one utterance) into tokens. Tokens are
/// whitespace-separated; positions count from 0.
pub fn tokenize(line: &str) -> Vec<Token> {
    line.split_whitespace()
        .enumerate()
        .map(|(i, s)| Token::new(s, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_follows_surface() {
        assert_eq!(Token::new(".", 0).kind, TokenKind::PauseMarker);
        assert_eq!(Token::new("[eh]", 0).kind, TokenKind::Bracketed);
        assert_eq!(Token::new("train", 0).kind, TokenKind::Word);
        // only the bare dot is a pause marker
        assert_eq!(Token::new("..", 0).kind, TokenKind::Word);
        // a lone bracket is not bracketed noise
        assert_eq!(Token::new("[", 0).kind, TokenKind::Word);
    }

    #[test]
    fn tokenize_assigns_increasing_positions() {
        let toks = tokenize("Yeah I need a train .");
        assert_eq!(toks.len(), 6);
        for (i, t) in toks.iter().enumerate() {
            assert_eq!(t.position, i);
        }
        assert_eq!(toks[5].kind, TokenKind::PauseMarker);
    }

    #[test]
    fn tokenize_empty_line_is_empty() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("   ").is_empty());
    }
}
