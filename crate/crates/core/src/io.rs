//! Line reading with UTF-8 validation that reports the failing line number.

use std::io::BufRead;

use crate::error::{Error, Result};

pub struct Lines<R> {
    reader: R,
    line_no: usize,
    buf: Vec<u8>,
}

/// Iterates over the lines of `reader` without their terminators
/// (`\n` or `\r\n`). Invalid UTF-8 yields [`Error::Decode`] with the 1-based
/// line number.
pub fn lines<R: BufRead>(reader: R) -> Lines<R> {
    Lines {
        reader,
        line_no: 0,
        buf: Vec::new(),
    }
}

impl<R: BufRead> Iterator for Lines<R> {
    type Item = Result<String>;

    fn next(&mut self) -> Option<Self::Item> {
        self.buf.clear();
        match self.reader.read_until(b'\n', &mut self.buf) {
            Ok(0) => None,
            Ok(_) => {
                self.line_no += 1;
                if self.buf.last() == Some(&b'\n') {
                    self.buf.pop();
                    if self.buf.last() == Some(&b'\r') {
                        self.buf.pop();
                    }
                }
                let line = std::str::from_utf8(&self.buf)
                    .map(str::to_owned)
                    .map_err(|_| Error::Decode { line: self.line_no });
                Some(line)
            }
            Err(e) => Some(Err(e.into())),
        }
    }
}
