//! Plain-text file formats.
//!
//! - Triple TSV: `head<TAB>relation<TAB>tail`, UTF-8, `#`-prefixed comment
//!   lines and blank lines ignored.
//! - Type map TSV: `entity<TAB>type`.
//! - Pairs TSV: `entity1<TAB>entity2<TAB>label` with label 0 or 1.
//! - Embedding TSV: `# kind` and `# dim` header lines, then one
//!   `label<TAB>v1<TAB>...` row per entity (and per relation where
//!   applicable), at full round-trip precision.

use std::fs;
use std::io::Write;
use std::path::Path;

use dualkge_core::classify::PairExample;
use dualkge_core::{Triple, TypeMap, Vocabulary};

use crate::error::{AppError, Result};

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let content = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    Ok(content
        .lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim_end_matches('\r').to_string()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
        .collect())
}

fn split_fields<'a>(path: &Path, line_no: usize, line: &'a str, expected: usize) -> Result<Vec<&'a str>> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != expected {
        return Err(AppError::Parse {
            path: path.to_path_buf(),
            line: line_no,
            msg: format!("expected {expected} tab-separated fields, found {}", fields.len()),
        });
    }
    Ok(fields)
}

/// Parse a triple file, interning unseen labels into `vocab`.
///
/// Triples are returned in file order including duplicates; deduplication
/// happens in [`dualkge_core::KnowledgeGraph::new`].
pub fn parse_triples(path: &Path, vocab: &mut Vocabulary) -> Result<Vec<Triple>> {
    let mut triples = Vec::new();
    for (line_no, line) in read_lines(path)? {
        let fields = split_fields(path, line_no, &line, 3)?;
        triples.push(Triple::new(
            vocab.intern_entity(fields[0]),
            vocab.intern_relation(fields[1]),
            vocab.intern_entity(fields[2]),
        ));
    }
    Ok(triples)
}

/// Parse a triple file against a frozen vocabulary; unknown labels are data
/// errors (used at evaluation time, when new labels would have no embedding).
pub fn parse_triples_strict(path: &Path, vocab: &Vocabulary) -> Result<Vec<Triple>> {
    let mut triples = Vec::new();
    for (line_no, line) in read_lines(path)? {
        let fields = split_fields(path, line_no, &line, 3)?;
        let lookup_entity = |label: &str| {
            vocab.entity(label).ok_or_else(|| AppError::Parse {
                path: path.to_path_buf(),
                line: line_no,
                msg: format!("unknown entity {label:?}"),
            })
        };
        let head = lookup_entity(fields[0])?;
        let tail = lookup_entity(fields[2])?;
        let relation = vocab.relation(fields[1]).ok_or_else(|| AppError::Parse {
            path: path.to_path_buf(),
            line: line_no,
            msg: format!("unknown relation {:?}", fields[1]),
        })?;
        triples.push(Triple::new(head, relation, tail));
    }
    Ok(triples)
}

/// A parsed type map plus the number of lines naming entities absent from the
/// vocabulary (those are skipped, not errors).
#[derive(Debug)]
pub struct TypeMapLoad {
    pub map: TypeMap,
    pub skipped_unknown: usize,
}

/// Parse an `entity<TAB>type` file. Conflicting duplicate assignments are
/// errors; repeated identical assignments are fine.
pub fn parse_type_map(path: &Path, vocab: &Vocabulary) -> Result<TypeMapLoad> {
    let mut map = TypeMap::new();
    let mut skipped_unknown = 0;
    for (line_no, line) in read_lines(path)? {
        let fields = split_fields(path, line_no, &line, 2)?;
        match vocab.entity(fields[0]) {
            Some(entity) => {
                map.assign(entity, fields[1]).map_err(|e| AppError::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    msg: format!("entity {:?}: {e}", fields[0]),
                })?;
            }
            None => skipped_unknown += 1,
        }
    }
    Ok(TypeMapLoad { map, skipped_unknown })
}

/// Parse an `entity1<TAB>entity2<TAB>label` file with labels 0/1.
pub fn parse_pairs(path: &Path, vocab: &Vocabulary) -> Result<Vec<PairExample>> {
    let mut pairs = Vec::new();
    for (line_no, line) in read_lines(path)? {
        let fields = split_fields(path, line_no, &line, 3)?;
        let lookup = |label: &str| {
            vocab.entity(label).ok_or_else(|| AppError::Parse {
                path: path.to_path_buf(),
                line: line_no,
                msg: format!("unknown entity {label:?}"),
            })
        };
        let e1 = lookup(fields[0])?;
        let e2 = lookup(fields[1])?;
        let label = match fields[2] {
            "0" => false,
            "1" => true,
            other => {
                return Err(AppError::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    msg: format!("label must be 0 or 1, found {other:?}"),
                })
            }
        };
        pairs.push(PairExample { e1, e2, label });
    }
    Ok(pairs)
}

/// Write triples back to TSV in graph order.
pub fn write_triples_tsv(
    triples: &[Triple],
    vocab: &Vocabulary,
    path: &Path,
) -> Result<()> {
    let mut out = String::new();
    for t in triples {
        out.push_str(vocab.entity_label(t.head).unwrap_or("?"));
        out.push('\t');
        out.push_str(vocab.relation_label(t.relation).unwrap_or("?"));
        out.push('\t');
        out.push_str(vocab.entity_label(t.tail).unwrap_or("?"));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| AppError::io(path, e))
}

/// Write an embedding table: `# kind` and `# dim` headers, then one row per
/// labeled vector. Values use the shortest decimal form that round-trips.
pub fn write_embeddings_tsv<'a>(
    path: &Path,
    kind_name: &str,
    dim: usize,
    rows: impl Iterator<Item = (&'a str, &'a [f64])>,
) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| AppError::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let write = |w: &mut dyn Write, s: &str| w.write_all(s.as_bytes());
    write(&mut w, &format!("# kind\t{kind_name}\n")).map_err(|e| AppError::io(path, e))?;
    write(&mut w, &format!("# dim\t{dim}\n")).map_err(|e| AppError::io(path, e))?;
    for (label, values) in rows {
        let mut line = String::with_capacity(values.len() * 20 + label.len());
        line.push_str(label);
        for v in values {
            line.push('\t');
            line.push_str(&format!("{v}"));
        }
        line.push('\n');
        write(&mut w, &line).map_err(|e| AppError::io(path, e))?;
    }
    w.flush().map_err(|e| AppError::io(path, e))
}

/// Parsed embedding table (headers plus labeled rows).
pub struct EmbeddingTable {
    pub kind_name: String,
    pub dim: usize,
    pub rows: Vec<(String, Vec<f64>)>,
}

/// Read back a table written by [`write_embeddings_tsv`].
pub fn read_embeddings_tsv(path: &Path) -> Result<EmbeddingTable> {
    let content = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let mut kind_name = None;
    let mut dim = None;
    let mut rows = Vec::new();
    for (i, raw) in content.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let fields: Vec<&str> = rest.trim_start().split('\t').collect();
            match fields.as_slice() {
                ["kind", value] => kind_name = Some(value.to_string()),
                ["dim", value] => {
                    dim = Some(value.parse::<usize>().map_err(|_| AppError::Parse {
                        path: path.to_path_buf(),
                        line: line_no,
                        msg: format!("invalid dim {value:?}"),
                    })?)
                }
                _ => {} // other comments ignored
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 2 {
            return Err(AppError::Parse {
                path: path.to_path_buf(),
                line: line_no,
                msg: "expected a label and at least one value".into(),
            });
        }
        let mut values = Vec::with_capacity(fields.len() - 1);
        for v in &fields[1..] {
            values.push(v.parse::<f64>().map_err(|_| AppError::Parse {
                path: path.to_path_buf(),
                line: line_no,
                msg: format!("invalid number {v:?}"),
            })?);
        }
        rows.push((fields[0].to_string(), values));
    }
    Ok(EmbeddingTable {
        kind_name: kind_name.ok_or_else(|| AppError::data(format!("{}: missing '# kind' header", path.display())))?,
        dim: dim.ok_or_else(|| AppError::data(format!("{}: missing '# dim' header", path.display())))?,
        rows,
    })
}
