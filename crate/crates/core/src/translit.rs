//! ISO 9 (system A) Cyrillic to Latin transliteration and its exact inverse.
//!
//! The shipped table covers the modern Russian alphabet plus the ISO 9
//! extension letters whose Latin image is a single precomposed character, so
//! every Cyrillic letter maps to exactly one Latin scalar. Uppercase hard and
//! soft signs use the double prime and prime punctuation characters, keeping
//! the mapping injective.

use std::collections::{BTreeMap, HashMap};

use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::model::{MergeRule, MergeTable, EOW};

const ISO9_TABLE: &str = include_str!("../data/iso9.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    CyrillicToLatin,
    LatinToCyrillic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransliterationTable {
    forward: BTreeMap<char, String>,
    inverse: HashMap<String, char>,
    /// Longest Latin image, in scalars.
    max_image: usize,
}

/// A Latin span with no Cyrillic preimage. `start` counts scalars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Untranslatable {
    pub start: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transliteration {
    pub text: String,
    pub untranslatable: Vec<Untranslatable>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransliteratedTable {
    pub table: MergeTable,
    /// Original rank of every rule in `table`.
    pub origin: Vec<usize>,
    /// Rules whose image could not be mapped back exactly.
    pub dropped: Vec<MergeRule>,
}

impl TransliterationTable {
    pub fn iso9() -> Self {
        Self::from_tsv(ISO9_TABLE).expect("shipped ISO 9 table is valid")
    }

    /// Parses `cyrillic<TAB>latin` lines. Both sides are NFC-normalized; the
    /// Cyrillic side must be one scalar and the mapping must be injective.
    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut forward = BTreeMap::new();
        let mut inverse = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (cyr, lat) = line
                .split_once('\t')
                .ok_or_else(|| Error::format(line_no, "expected \"cyrillic<TAB>latin\""))?;
            let cyr: String = cyr.nfc().collect();
            let lat: String = lat.nfc().collect();
            let mut chars = cyr.chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(Error::format(
                    line_no,
                    format!("{cyr:?} is not a single character"),
                ));
            };
            if lat.is_empty() {
                return Err(Error::format(line_no, "empty Latin image"));
            }
            if forward.insert(c, lat.clone()).is_some() {
                return Err(Error::format(line_no, format!("duplicate entry for {c:?}")));
            }
            if inverse.insert(lat.clone(), c).is_some() {
                return Err(Error::format(
                    line_no,
                    format!("Latin image {lat:?} is not unique"),
                ));
            }
        }
        let max_image = inverse.keys().map(|k| k.chars().count()).max().unwrap_or(1);
        Ok(Self {
            forward,
            inverse,
            max_image,
        })
    }

    pub fn to_tsv(&self) -> String {
        self.forward
            .iter()
            .map(|(c, l)| format!("{c}\t{l}\n"))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn cyrillic_letters(&self) -> impl Iterator<Item = char> + '_ {
        self.forward.keys().copied()
    }

    /// Maps every tabled Cyrillic letter, passes everything else through.
    /// Input is NFC-normalized first.
    pub fn cyrillic_to_latin(&self, text: &str) -> String {
        let text: String = text.nfc().collect();
        self.forward_raw(&text)
    }

    /// Exact inverse of [`cyrillic_to_latin`](Self::cyrillic_to_latin) on its
    /// image. Latin letters without a preimage are left as they are and
    /// reported.
    pub fn latin_to_cyrillic(&self, text: &str) -> Transliteration {
        let text: String = text.nfc().collect();
        self.inverse_raw(&text)
    }

    fn forward_raw(&self, text: &str) -> String {
        let mut out = String::with_capacity(text.len());
        for c in text.chars() {
            match self.forward.get(&c) {
                Some(lat) => out.push_str(lat),
                None => out.push(c),
            }
        }
        out
    }

    fn inverse_raw(&self, text: &str) -> Transliteration {
        let chars: Vec<char> = text.chars().collect();
        let mut out = String::with_capacity(text.len());
        let mut untranslatable: Vec<Untranslatable> = Vec::new();
        let mut key = String::new();
        let mut i = 0;
        'outer: while i < chars.len() {
            for len in (1..=self.max_image.min(chars.len() - i)).rev() {
                key.clear();
                key.extend(&chars[i..i + len]);
                if let Some(&c) = self.inverse.get(&key) {
                    out.push(c);
                    i += len;
                    continue 'outer;
                }
            }
            let c = chars[i];
            if is_latin_letter_or_mark(c) {
                match untranslatable.last_mut() {
                    Some(span) if span.start + span.text.chars().count() == i => span.text.push(c),
                    _ => untranslatable.push(Untranslatable {
                        start: i,
                        text: c.to_string(),
                    }),
                }
            }
            out.push(c);
            i += 1;
        }
        Transliteration {
            text: out,
            untranslatable,
        }
    }

    /// Maps one merge-table symbol, keeping a trailing end-of-word marker.
    fn map_symbol(&self, symbol: &str, direction: Direction) -> Option<String> {
        let (stem, eow) = match symbol.strip_suffix(EOW) {
            Some(stem) => (stem, EOW),
            None => (symbol, ""),
        };
        let mapped = match direction {
            Direction::CyrillicToLatin => self.forward_raw(stem),
            Direction::LatinToCyrillic => {
                let t = self.inverse_raw(stem);
                if !t.untranslatable.is_empty() {
                    return None;
                }
                t.text
            }
        };
        let back = match direction {
            Direction::CyrillicToLatin => self.inverse_raw(&mapped).text,
            Direction::LatinToCyrillic => self.forward_raw(&mapped),
        };
        (back == stem).then(|| format!("{mapped}{eow}"))
    }

    /// Transliterates both sides of every rule. Rules that do not map back
    /// exactly are dropped; the remaining rules keep their relative order.
    pub fn transliterate_merge_table(
        &self,
        table: &MergeTable,
        direction: Direction,
    ) -> TransliteratedTable {
        let mut out = TransliteratedTable {
            table: MergeTable::new(),
            origin: Vec::new(),
            dropped: Vec::new(),
        };
        for rule in table.rules() {
            let left = self.map_symbol(&rule.left, direction);
            let right = self.map_symbol(&rule.right, direction);
            match (left, right) {
                (Some(l), Some(r)) => {
                    out.table.push(l, r);
                    out.origin.push(rule.rank);
                }
                _ => out.dropped.push(rule.clone()),
            }
        }
        out
    }
}

impl Default for TransliterationTable {
    fn default() -> Self {
        Self::iso9()
    }
}

fn is_latin_letter_or_mark(c: char) -> bool {
    c.is_ascii_alphabetic()
        || matches!(c, '\u{00C0}'..='\u{024F}' | '\u{1E00}'..='\u{1EFF}' | '\u{0300}'..='\u{036F}')
            && c != '\u{00D7}'
            && c != '\u{00F7}'
}
