use std::path::Path;

use crate::error::{Error, Result};

/// Reads a file as ISO-8859-1. Every byte maps to the code point of the same
/// value; NUL bytes are rejected since they only show up in binary garbage.
pub(crate) fn read_latin1(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_latin1(&bytes, &path.display().to_string())
}

pub(crate) fn decode_latin1(bytes: &[u8], file: &str) -> Result<String> {
    if let Some(offset) = bytes.iter().position(|&b| b == 0) {
        return Err(Error::Decode {
            file: file.to_string(),
            offset,
            byte: 0,
        });
    }
    Ok(bytes.iter().map(|&b| b as char).collect())
}

/// Tabs and line breaks cannot survive the tab-separated interchange format.
pub(crate) fn sanitize(value: &str) -> String {
    value
        .chars()
        .map(|c| if matches!(c, '\t' | '\n' | '\r') { ' ' } else { c })
        .collect::<String>()
        .trim()
        .to_string()
}

pub(crate) fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn latin1_maps_high_bytes() {
        let s = decode_latin1(b"Caf\xe9", "x").unwrap();
        assert_eq!(s, "Café");
    }

    #[test]
    fn nul_byte_reports_offset() {
        match decode_latin1(b"ab\0c", "f.csv") {
            Err(Error::Decode { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("{other:?}"),
        }
    }
}
