//! File formats: species lists, taxonomy files, edit logs and append-only
//! JSON-lines stores.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::Path;

use culturomics_core::taxonomy::{
    parse_species_table, EditLog, FolkTaxon, GraphEdit, SpeciesRecord,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const TAXONOMY_FORMAT_VERSION: u32 = 1;

pub fn read_species_file(path: &Path) -> Result<Vec<SpeciesRecord>> {
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    parse_species_table(&text).map_err(|e| match e {
        culturomics_core::Error::Data { line, reason } => Error::Format {
            path: path.into(),
            line,
            reason,
        },
        other => other.into(),
    })
}

/// The compiled taxonomy: taxa with their keyword sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyFile {
    pub format_version: u32,
    pub taxa: Vec<FolkTaxon>,
}

impl TaxonomyFile {
    pub fn new(taxa: Vec<FolkTaxon>) -> Self {
        Self {
            format_version: TAXONOMY_FORMAT_VERSION,
            taxa,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file: Self = read_json(path)?;
        if file.format_version != TAXONOMY_FORMAT_VERSION {
            return Err(Error::Format {
                path: path.into(),
                line: 1,
                reason: format!(
                    "unsupported taxonomy format version {}",
                    file.format_version
                ),
            });
        }
        for t in &file.taxa {
            t.validate()?;
        }
        Ok(file)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        path: path.into(),
        line: e.line(),
        reason: e.to_string(),
    })
}

/// Pretty JSON with a trailing newline, written atomically.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable value");
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// Write through a temporary sibling and rename, so readers never see a
/// half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(Error::io(dir))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(Error::io(&tmp))?;
    fs::rename(&tmp, path).map_err(Error::io(path))
}

/// Read every complete line of a JSON-lines file. A missing file reads as
/// empty. An unterminated last line is a write cut short and is ignored;
/// the next append truncates it.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Error::io(path)(e)),
    };
    let mut out = Vec::new();
    let mut reader = BufReader::new(file);
    let mut line = String::new();
    let mut n = 0;
    loop {
        line.clear();
        let read = reader.read_line(&mut line).map_err(Error::io(path))?;
        if read == 0 || !line.ends_with('\n') {
            break;
        }
        n += 1;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| Error::Format {
            path: path.into(),
            line: n,
            reason: e.to_string(),
        })?;
        out.push(value);
    }
    Ok(out)
}

/// Append records, one JSON document per line.
pub fn append_jsonl<'a, T, I>(path: &Path, records: I) -> Result<()>
where
    T: Serialize + 'a,
    I: IntoIterator<Item = &'a T>,
{
    let mut buf = Vec::new();
    for r in records {
        serde_json::to_writer(&mut buf, r).expect("serializable record");
        buf.push(b'\n');
    }
    if buf.is_empty() {
        return Ok(());
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(Error::io(dir))?;
    }
    let mut file = OpenOptions::new()
        .create(true)
        .read(true)
        .append(true)
        .open(path)
        .map_err(Error::io(path))?;
    drop_partial_line(&mut file).map_err(Error::io(path))?;
    file.write_all(&buf).map_err(Error::io(path))?;
    file.flush().map_err(Error::io(path))
}

fn drop_partial_line(file: &mut File) -> std::io::Result<()> {
    let len = file.metadata()?.len();
    if len == 0 {
        return Ok(());
    }
    let mut last = [0u8; 1];
    file.seek(SeekFrom::Start(len - 1))?;
    std::io::Read::read_exact(file, &mut last)?;
    if last[0] == b'\n' {
        return Ok(());
    }
    let mut content = Vec::new();
    file.seek(SeekFrom::Start(0))?;
    std::io::Read::read_to_end(file, &mut content)?;
    let keep = content
        .iter()
        .rposition(|&b| b == b'\n')
        .map_or(0, |p| p + 1);
    file.set_len(keep as u64)
}

pub fn read_edit_log(path: &Path) -> Result<EditLog> {
    Ok(read_jsonl::<GraphEdit>(path)?.into_iter().collect())
}

pub fn append_edit(path: &Path, edit: &GraphEdit) -> Result<()> {
    append_jsonl(path, [edit])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct R {
        k: u32,
    }

    #[test]
    fn jsonl_round_trip_and_torn_tail() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s/r.jsonl");
        assert!(read_jsonl::<R>(&p).unwrap().is_empty());
        append_jsonl(&p, &[R { k: 1 }, R { k: 2 }]).unwrap();
        let mut f = OpenOptions::new().append(true).open(&p).unwrap();
        f.write_all(b"{\"k\":").unwrap();
        assert_eq!(read_jsonl::<R>(&p).unwrap(), [R { k: 1 }, R { k: 2 }]);
        append_jsonl(&p, &[R { k: 3 }]).unwrap();
        assert_eq!(
            read_jsonl::<R>(&p).unwrap(),
            [R { k: 1 }, R { k: 2 }, R { k: 3 }]
        );
    }

    #[test]
    fn malformed_line_reports_position() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.jsonl");
        fs::write(&p, "{\"k\":1}\nnope\n").unwrap();
        assert!(matches!(
            read_jsonl::<R>(&p),
            Err(Error::Format { line: 2, .. })
        ));
    }
}
