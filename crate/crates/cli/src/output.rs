use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Echo;
use crate::error::CliResult;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Buffered writer to a file or stdout.
pub struct Sink {
    path: Option<PathBuf>,
    inner: Box<dyn Write>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> CliResult<Self> {
        let inner: Box<dyn Write> = match path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)?;
                }
                Box::new(BufWriter::new(File::create(p)?))
            }
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self {
            path: path.map(Path::to_path_buf),
            inner,
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// `# dirac-stability <version> <config JSON>`
    pub fn header(&mut self, echo: &Echo) -> CliResult<()> {
        writeln!(
            self.inner,
            "# dirac-stability {VERSION} {}",
            serde_json::to_string(echo)?
        )?;
        Ok(())
    }

    fn comment(&mut self, text: &str) -> CliResult<()> {
        writeln!(self.inner, "# {text}")?;
        Ok(())
    }

    /// Header comment, extra `#` notes, then CSV records.
    pub fn csv<R: Serialize>(
        mut self,
        echo: &Echo,
        notes: &[String],
        records: &[R],
    ) -> CliResult<()> {
        self.header(echo)?;
        for note in notes {
            self.comment(note)?;
        }
        let mut w = csv::Writer::from_writer(&mut self.inner);
        for r in records {
            w.serialize(r)?;
        }
        w.flush()?;
        drop(w);
        self.finish()
    }

    /// JSON document `{"header": {...}, ...body}`.
    pub fn json<B: Serialize>(mut self, echo: &Echo, body: &B) -> CliResult<()> {
        #[derive(Serialize)]
        struct Doc<'a, B> {
            header: Header<'a>,
            #[serde(flatten)]
            body: &'a B,
        }
        #[derive(Serialize)]
        struct Header<'a> {
            tool: &'static str,
            version: &'static str,
            config: &'a Echo,
        }
        let doc = Doc {
            header: Header {
                tool: "dirac-stability",
                version: VERSION,
                config: echo,
            },
            body,
        };
        serde_json::to_writer_pretty(&mut self.inner, &doc)?;
        writeln!(self.inner)?;
        self.finish()
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.inner.flush()?;
        Ok(())
    }
}

impl Write for Sink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.inner.write(buf)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}
