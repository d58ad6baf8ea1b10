use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use varifrac::error::Error;
use varifrac::geometry::{MeshJson, SimplicialComplex};

/// Bad input that is not a library error.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

/// Inputs that parse but disagree with each other.
#[derive(Debug)]
pub struct ConsistencyError(pub String);

impl std::fmt::Display for ConsistencyError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConsistencyError {}

/// A step of a run failed after some output was written.
#[derive(Debug)]
pub struct RuntimeError(pub String);

impl std::fmt::Display for RuntimeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for RuntimeError {}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<RuntimeError>().is_some() {
        return crate::EXIT_RUNTIME;
    }
    if e.downcast_ref::<ConsistencyError>().is_some() {
        return crate::EXIT_CONSISTENCY;
    }
    if e.downcast_ref::<InputError>().is_some()
        || e.downcast_ref::<serde_json::Error>().is_some()
        || e.downcast_ref::<std::io::Error>().is_some()
    {
        return crate::EXIT_INPUT;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::MeshError(_)) => crate::EXIT_CONSISTENCY,
        Some(Error::StepFailure { .. }) | None => crate::EXIT_RUNTIME,
        Some(_) => crate::EXIT_INPUT,
    }
}

/// Byte offset of a 1-based (line, column) position.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Parse JSON, reporting failures with their byte offset.
pub fn parse_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| {
        let off = byte_offset(&text, e.line(), e.column());
        anyhow::Error::new(InputError(format!(
            "{}: invalid JSON at byte {off} (line {}, column {}): {e}",
            path.display(),
            e.line(),
            e.column()
        )))
    })
}

pub fn read_mesh(path: &Path) -> Result<SimplicialComplex> {
    let raw: MeshJson = parse_json(path)?;
    raw.into_complex().with_context(|| format!("building mesh from {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Absolute form of a path without touching symlinks.
pub fn absolute(path: &Path) -> Result<std::path::PathBuf> {
    Ok(std::path::absolute(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_count_bytes_from_the_start() {
        let t = "{\n  \"a\": x\n}";
        assert_eq!(byte_offset(t, 1, 1), 0);
        assert_eq!(&t[byte_offset(t, 2, 8)..byte_offset(t, 2, 8) + 1], "x");
    }
}
