use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

/// Why a command failed; decides the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or flag combinations (exit 2).
    Usage(String),
    /// Unreadable, malformed or inconsistent input (exit 2).
    Input(String),
    /// A bug or an impossible state (exit 1).
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Input(_) => 2,
            Failure::Internal(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Input(m) | Failure::Internal(m) => f.write_str(m),
        }
    }
}

pub type Outcome<T = ()> = Result<T, Failure>;

/// Attaches a file name (and line, when the error has one) to a library error.
pub fn located(name: &str, err: subword::Error) -> Failure {
    let text = err.to_string();
    let message = match err.line() {
        Some(line) => {
            let prefix = format!("line {line}: ");
            format!(
                "{name}:{line}: {}",
                text.strip_prefix(&prefix).unwrap_or(&text)
            )
        }
        None => format!("{name}: {text}"),
    };
    match err {
        subword::Error::Underivable(_) => Failure::Internal(message),
        _ => Failure::Input(message),
    }
}

pub fn io_failure(name: &str, err: io::Error) -> Failure {
    Failure::Input(format!("{name}: {err}"))
}

/// A named input stream; `-` or no path means standard input.
pub struct Input {
    pub name: String,
    pub reader: Box<dyn BufRead>,
}

impl Input {
    pub fn open(path: Option<&Path>) -> Outcome<Self> {
        match path {
            None => Ok(Self::stdin()),
            Some(p) if p == Path::new("-") => Ok(Self::stdin()),
            Some(p) => {
                let name = p.display().to_string();
                let file = File::open(p).map_err(|e| io_failure(&name, e))?;
                Ok(Input {
                    name,
                    reader: Box::new(BufReader::new(file)),
                })
            }
        }
    }

    fn stdin() -> Self {
        Input {
            name: "<stdin>".into(),
            reader: Box::new(BufReader::new(io::stdin().lock())),
        }
    }

    /// Iterates over decoded lines, turning errors into located failures.
    pub fn lines(self) -> impl Iterator<Item = Outcome<String>> {
        let name = self.name;
        subword::io::lines(self.reader).map(move |l| l.map_err(|e| located(&name, e)))
    }

    pub fn read_lines(self) -> Outcome<Vec<String>> {
        self.lines().collect()
    }
}

/// A named output stream; `-` or no path means standard output.
pub struct Output {
    pub name: String,
    writer: Box<dyn Write>,
}

impl Output {
    pub fn create(path: Option<&Path>) -> Outcome<Self> {
        match path {
            None => Ok(Self::stdout()),
            Some(p) if p == Path::new("-") => Ok(Self::stdout()),
            Some(p) => {
                let name = p.display().to_string();
                let file = File::create(p).map_err(|e| io_failure(&name, e))?;
                Ok(Output {
                    name,
                    writer: Box::new(BufWriter::new(file)),
                })
            }
        }
    }

    fn stdout() -> Self {
        Output {
            name: "<stdout>".into(),
            writer: Box::new(BufWriter::new(io::stdout().lock())),
        }
    }

    pub fn line(&mut self, text: &str) -> Outcome {
        writeln!(self.writer, "{text}").map_err(|e| io_failure(&self.name, e))
    }

    pub fn text(&mut self, text: &str) -> Outcome {
        self.writer
            .write_all(text.as_bytes())
            .map_err(|e| io_failure(&self.name, e))
    }

    pub fn finish(mut self) -> Outcome {
        self.writer.flush().map_err(|e| io_failure(&self.name, e))
    }
}

pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}
