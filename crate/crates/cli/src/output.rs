//! CSV assembly: provenance comments, a single header line, and numeric
//! formatting that round-trips by default.

use std::io::Write;

use sha2::{Digest, Sha256};

use crate::CliError;

/// Buffered CSV writer with `#`-prefixed provenance comments.
pub struct CsvWriter<W: Write> {
    sink: W,
    precision: Option<usize>,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(sink: W, precision: Option<usize>) -> Self {
        Self { sink, precision }
    }

    /// Emits the provenance block: tool version, command, input hash and
    /// any warnings. Deterministic for identical inputs.
    pub fn provenance(
        &mut self,
        command: &str,
        input: &str,
        warnings: &[String],
    ) -> Result<(), CliError> {
        writeln!(
            self.sink,
            "# bbfriction {} {command}",
            env!("CARGO_PKG_VERSION")
        )?;
        let mut hasher = Sha256::new();
        hasher.update(input.as_bytes());
        let digest = hasher.finalize();
        let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
        writeln!(self.sink, "# input-sha256: {hex}")?;
        for w in warnings {
            writeln!(self.sink, "# warning: {w}")?;
        }
        Ok(())
    }

    pub fn comment(&mut self, text: &str) -> Result<(), CliError> {
        writeln!(self.sink, "# {text}")?;
        Ok(())
    }

    pub fn header(&mut self, columns: &[&str]) -> Result<(), CliError> {
        writeln!(self.sink, "{}", columns.join(","))?;
        Ok(())
    }

    /// Writes one row of pre-formatted fields.
    pub fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        writeln!(self.sink, "{}", fields.join(","))?;
        Ok(())
    }

    /// Formats a number: shortest round-trip form unless a precision was
    /// configured.
    pub fn num(&self, value: f64) -> String {
        match self.precision {
            Some(digits) => format!("{value:.digits$e}"),
            None => format!("{value}"),
        }
    }

    pub fn flush(&mut self) -> Result<(), CliError> {
        self.sink.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_formatting_round_trips() {
        let w = CsvWriter::new(Vec::new(), None);
        for &x in &[0.1, -3.5e-7, 1.0 / 3.0, 6.02e23, 0.0] {
            let s = w.num(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {s}");
        }
    }

    #[test]
    fn configured_precision_is_scientific() {
        let w = CsvWriter::new(Vec::new(), Some(3));
        assert_eq!(w.num(1.0 / 3.0), "3.333e-1");
    }

    #[test]
    fn provenance_is_deterministic() {
        let mut a = CsvWriter::new(Vec::new(), None);
        a.provenance("force", "input", &["w".into()]).unwrap();
        let mut b = CsvWriter::new(Vec::new(), None);
        b.provenance("force", "input", &["w".into()]).unwrap();
        assert_eq!(a.sink, b.sink);
        assert!(String::from_utf8(a.sink)
            .unwrap()
            .contains("# input-sha256: "));
    }
}
