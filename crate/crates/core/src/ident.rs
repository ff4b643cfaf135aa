//! Identifiers of the fact language.

use alloc::string::String;
use core::fmt;

/// A name appearing in a fact: component, channel, flow, hazard or
/// pattern id. ASCII letters, digits and underscores; must not start
/// with an uppercase letter (uppercase tokens are variables in the
/// source notation and never occur in ground facts).
///
/// Identifiers starting with `nu` that are not declared anywhere in the
/// model are *fresh*: they name auxiliary elements introduced by a
/// recommended pattern and are exempt from declaration checks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Identifier(String);

impl Identifier {
    /// Validates the token shape and wraps it.
    pub fn new(name: &str) -> Result<Self, InvalidIdentifier> {
        if name.is_empty() {
            return Err(InvalidIdentifier::Empty);
        }
        if !name.is_ascii() {
            return Err(InvalidIdentifier::NonAscii);
        }
        let first = name.as_bytes()[0];
        if first.is_ascii_uppercase() || first == b'_' {
            return Err(InvalidIdentifier::VariableLike);
        }
        if !name
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_')
        {
            return Err(InvalidIdentifier::BadCharacter);
        }
        Ok(Identifier(String::from(name)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Whether the identifier uses the fresh-constant prefix.
    pub fn has_fresh_prefix(&self) -> bool {
        self.0.starts_with("nu")
    }
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvalidIdentifier {
    Empty,
    NonAscii,
    VariableLike,
    BadCharacter,
}

impl fmt::Display for InvalidIdentifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidIdentifier::Empty => f.write_str("identifier is empty"),
            InvalidIdentifier::NonAscii => f.write_str("identifier contains non-ASCII bytes"),
            InvalidIdentifier::VariableLike => {
                f.write_str("identifier starts like a variable (uppercase or underscore)")
            }
            InvalidIdentifier::BadCharacter => {
                f.write_str("identifier contains a character outside [A-Za-z0-9_]")
            }
        }
    }
}

/// Shorthand used in tests and builders; panics on malformed input.
#[macro_export]
macro_rules! id {
    ($name:expr) => {
        $crate::Identifier::new($name).expect("valid identifier")
    };
}
