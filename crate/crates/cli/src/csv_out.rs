//! CSV rendering: one header row, `\n` line endings, numbers in their
//! shortest round-trip decimal form.

use crate::Error;

/// Shortest decimal that parses back to the same `f64`. Very small or very
/// large magnitudes switch to exponent notation.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub struct CsvTable {
    writer: csv::Writer<Vec<u8>>,
    header_error: Option<csv::Error>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let header_error = writer.write_record(header).err();
        Self {
            writer,
            header_error,
        }
    }

    pub fn row(&mut self, fields: &[&str]) -> Result<(), Error> {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(self) -> Result<String, Error> {
        if let Some(e) = self.header_error {
            return Err(e.into());
        }
        let bytes = self
            .writer
            .into_inner()
            .map_err(|e| Error::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("CSV fields are UTF-8"))
    }
}
