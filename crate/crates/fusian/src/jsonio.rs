//! JSON writing with full-precision floats.
//!
//! Artifact files (libraries, bases, policies) serialize every `f64` with 17
//! significant digits so that parsing the file back reproduces the exact bit
//! pattern. serde_json's default shortest-representation output would also
//! round-trip, but a fixed digit count keeps the on-disk format independent
//! of the writer.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;

struct PreciseFormatter;

impl Formatter for PreciseFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        // 1 digit before the point + 16 after = 17 significant digits.
        write!(writer, "{:.16e}", value)
    }
}

/// Serialize `value` to a JSON string with full-precision floats.
pub(crate) fn to_string_precise<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, PreciseFormatter);
    value.serialize(&mut ser)?;
    // The formatter only ever emits ASCII.
    Ok(String::from_utf8(out).expect("json output is utf-8"))
}
