//! JSON emission with every float written at 17 significant digits
//! (`{:.16e}`), so that re-reading reproduces the exact bit pattern.

use std::io;

use serde::Serialize;

struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W: io::Write + ?Sized>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes `value` as JSON with 17-significant-digit floats.
pub fn to_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value.serialize(&mut ser).expect("JSON serialization");
    String::from_utf8(out).expect("JSON is UTF-8")
}

/// One float in the same format, for scalar outputs and CSV cells.
pub fn float(value: f64) -> String {
    format!("{value:.16e}")
}
