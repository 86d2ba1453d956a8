//! Report serialization. Floats are written with a fixed 17-significant-
//! digit scientific format so identical runs produce identical bytes
//! regardless of how a value was computed or shortened.

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};
use std::io;

struct SigDigitFormatter<'a> {
    pretty: PrettyFormatter<'a>,
}

impl<'a> Formatter for SigDigitFormatter<'a> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.pretty.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.pretty.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(writer)
    }
}

/// Serialize a report to the canonical byte form: two-space indentation,
/// pinned float formatting, trailing newline.
pub fn to_report_bytes(value: &serde_json::Value) -> Vec<u8> {
    let mut out = Vec::new();
    let formatter = SigDigitFormatter { pretty: PrettyFormatter::new() };
    let mut ser = Serializer::with_formatter(&mut out, formatter);
    value.serialize(&mut ser).expect("report serialization cannot fail");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn float_formatting_is_pinned() {
        let v = json!({"x": 0.1, "n": 3, "arr": [1.5]});
        let s = String::from_utf8(to_report_bytes(&v)).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("1.5000000000000000e0"), "{s}");
        // Integers stay integers.
        assert!(s.contains("\"n\": 3"), "{s}");
        assert!(s.ends_with('\n'));
    }

    #[test]
    fn identical_values_identical_bytes() {
        let v = json!({"a": [0.3333333333333333, {"b": 2.0e-12}]});
        assert_eq!(to_report_bytes(&v), to_report_bytes(&v.clone()));
    }
}
