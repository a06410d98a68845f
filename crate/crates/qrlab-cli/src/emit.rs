use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Writes a CSV file: fixed header plus one row per record. Output is
/// byte-deterministic for identical inputs.
pub fn emit_csv(path: &Path, header: &str, rows: &[String]) -> CliResult<()> {
    let mut text =
        String::with_capacity(header.len() + rows.iter().map(|r| r.len() + 1).sum::<usize>() + 1);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    write_atomically(path, text.as_bytes())
}

/// Writes records as a pretty-printed JSON array.
pub fn emit_json<T: Serialize>(path: &Path, records: &[T]) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(records)
        .map_err(|e| CliError::Io(format!("json serialisation failed: {e}")))?;
    text.push('\n');
    write_atomically(path, text.as_bytes())
}

fn write_atomically(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    let mut file = std::fs::File::create(path)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    file.write_all(bytes)
        .map_err(|e| CliError::Io(format!("write to {} failed: {e}", path.display())))?;
    Ok(())
}
