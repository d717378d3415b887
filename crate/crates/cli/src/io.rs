//! Tab-delimited readers and writers for nodes, edges, seminal ids, scores
//! and result tables.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read};
use std::path::Path;

use citeval_core::network::EdgeOutcome;
use citeval_core::{CitationNetwork, Date, LoadSummary, NetworkBuilder, NodeRecord, ScoreVector, SeminalSet};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Calls `f` with the 1-based line number and the fields of every line that
/// is neither blank nor a `#` comment.
fn for_each_row<F>(path: &Path, delimiter: u8, mut f: F) -> Result<()>
where
    F: FnMut(u64, &[&str]) -> Result<()>,
{
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let delimiter = char::from(delimiter);
    for (index, line) in BufReader::new(file).lines().enumerate() {
        let number = index as u64 + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => row_error(path, number, "not valid UTF-8"),
            _ => CliError::io(path, e),
        })?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(delimiter).map(str::trim).collect();
        f(number, &fields)?;
    }
    Ok(())
}

fn row_error(path: &Path, line: u64, message: impl Into<String>) -> CliError {
    CliError::Row { path: path.to_path_buf(), line, message: message.into() }
}

pub fn parse_date(s: &str) -> Option<Date> {
    Date::parse_from_str(s.trim(), "%Y-%m-%d").ok()
}

/// Reads `id<delim>date` rows.
pub fn read_nodes(path: &Path, delimiter: u8) -> Result<Vec<NodeRecord>> {
    let mut nodes = Vec::new();
    for_each_row(path, delimiter, |line, row| {
        let (Some(id), Some(date)) = (row.first(), row.get(1)) else {
            return Err(row_error(path, line, "expected an id and a date"));
        };
        if id.is_empty() {
            return Err(row_error(path, line, "empty node id"));
        }
        let date = parse_date(date).ok_or_else(|| row_error(path, line, format!("malformed date `{}`", date)))?;
        nodes.push(NodeRecord::new(*id, date));
        Ok(())
    })?;
    if nodes.is_empty() {
        return Err(CliError::Data(format!("{}: node file has no rows", path.display())));
    }
    Ok(nodes)
}

/// Reads a node file and streams an edge file (`citing<delim>cited`) into a
/// network.
pub fn load_network(nodes: &Path, edges: &Path, delimiter: u8) -> Result<(CitationNetwork, LoadSummary)> {
    let records = read_nodes(nodes, delimiter)?;
    let mut builder = NetworkBuilder::from_nodes(records)?;
    for_each_row(edges, delimiter, |line, row| {
        let (Some(citing), Some(cited)) = (row.first(), row.get(1)) else {
            return Err(row_error(edges, line, "expected a citing and a cited id"));
        };
        if builder.add_edge(citing, cited) == EdgeOutcome::UnknownEndpoint {
            log::debug!("{}:{line}: edge references an unknown node", edges.display());
        }
        Ok(())
    })?;
    let (net, summary) = builder.finish();
    if summary.rejected() > 0 {
        log::warn!(
            "{}: rejected {} edge rows ({} unknown endpoint, {} self-citation, {} duplicate)",
            edges.display(),
            summary.rejected(),
            summary.rejected_unknown,
            summary.rejected_self,
            summary.rejected_duplicate
        );
    }
    if summary.predating_citations > 0 {
        log::warn!("{}: {} citations predate the cited node", edges.display(), summary.predating_citations);
    }
    Ok((net, summary))
}

/// Reads one seminal id per line (first field).
pub fn read_seminal_ids(path: &Path, delimiter: u8) -> Result<Vec<String>> {
    let mut ids = Vec::new();
    for_each_row(path, delimiter, |_, row| {
        if let Some(id) = row.first() {
            ids.push(id.to_string());
        }
        Ok(())
    })?;
    Ok(ids)
}

/// Resolves the seminal file against `net`; fails when no id resolves.
pub fn load_seminal(path: &Path, delimiter: u8, net: &CitationNetwork) -> Result<SeminalSet> {
    let ids = read_seminal_ids(path, delimiter)?;
    let (set, missing) = SeminalSet::resolve(net, ids.iter().map(String::as_str));
    if set.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no seminal id resolves to a node; unresolved: {}",
            path.display(),
            missing.join(", ")
        )));
    }
    if !missing.is_empty() {
        log::warn!("{}: {} seminal ids do not resolve: {}", path.display(), missing.len(), missing.join(", "));
    }
    Ok(set)
}

/// Shortest round-trip decimal form; negative zero prints as `0`.
pub fn fmt_f64(v: f64) -> String {
    format!("{}", v + 0.0)
}

/// Single writer for one tab-delimited table with a header line. Files meant
/// to be read back as inputs start the header with `#`.
pub struct Table {
    path: std::path::PathBuf,
    inner: csv::Writer<BufWriter<File>>,
}

impl Table {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let inner = csv::WriterBuilder::new()
            .delimiter(b'\t')
            .quote_style(csv::QuoteStyle::Never)
            .from_writer(BufWriter::new(file));
        let mut table = Self { path: path.to_path_buf(), inner };
        table.row(header)?;
        Ok(table)
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner.write_record(fields).map_err(|e| self.error(e))
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush().map_err(|e| CliError::io(&self.path, e))
    }

    fn error(&self, e: csv::Error) -> CliError {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(&self.path, io),
            other => CliError::Data(format!("{}: {other:?}", self.path.display())),
        }
    }
}

pub fn write_nodes(path: &Path, net: &CitationNetwork) -> Result<()> {
    let mut t = Table::create(path, &["#id", "date"])?;
    for i in 0..net.len() {
        t.row([net.id(i), &net.date(i).format("%Y-%m-%d").to_string()])?;
    }
    t.finish()
}

pub fn write_edges(path: &Path, net: &CitationNetwork) -> Result<()> {
    let mut t = Table::create(path, &["#citing", "cited"])?;
    for (i, j) in net.edges() {
        t.row([net.id(i), net.id(j)])?;
    }
    t.finish()
}

pub fn write_seminal(path: &Path, net: &CitationNetwork, seminal: &SeminalSet) -> Result<()> {
    let mut t = Table::create(path, &["#id"])?;
    for &s in seminal.nodes() {
        t.row([net.id(s)])?;
    }
    t.finish()
}

pub fn write_quality(path: &Path, net: &CitationNetwork, quality: &[f64]) -> Result<()> {
    let mut t = Table::create(path, &["#id", "quality"])?;
    for (i, &q) in quality.iter().enumerate() {
        t.row([net.id(i), &fmt_f64(q)])?;
    }
    t.finish()
}

/// `id, score, rank` in node order; rank 1 is the top.
pub fn write_scores(path: &Path, net: &CitationNetwork, scores: &ScoreVector) -> Result<()> {
    let mut t = Table::create(path, &["id", "score", "rank"])?;
    let positions = scores.positions();
    for (i, (&s, &p)) in scores.scores().iter().zip(&positions).enumerate() {
        t.row([net.id(i), &fmt_f64(s), &p.to_string()])?;
    }
    t.finish()
}

/// Reads a score file written by [`write_scores`] back into node order.
pub fn read_scores(path: &Path, net: &CitationNetwork, label: &str) -> Result<ScoreVector> {
    let mut values = vec![f64::NAN; net.len()];
    let mut seen = vec![false; net.len()];
    let mut header = true;
    for_each_row(path, b'\t', |line, row| {
        if std::mem::take(&mut header) {
            return Ok(());
        }
        let (Some(id), Some(score)) = (row.first(), row.get(1)) else {
            return Err(row_error(path, line, "expected an id and a score"));
        };
        let i = net.index_of(id).ok_or_else(|| row_error(path, line, format!("unknown node `{id}`")))?;
        values[i] = score.parse().map_err(|_| row_error(path, line, format!("malformed score `{score}`")))?;
        seen[i] = true;
        Ok(())
    })?;
    if let Some(i) = seen.iter().position(|&s| !s) {
        return Err(CliError::Data(format!("{}: no score for node `{}`", path.display(), net.id(i))));
    }
    Ok(ScoreVector::new(label, values))
}

/// Hex SHA-256 of a file's contents.
pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn loads_minimal_network() {
        let dir = tempfile::tempdir().unwrap();
        let nodes = write(dir.path(), "n.tsv", "# comment\nA\t1990-01-01\nB\t1990-01-11\n");
        let edges = write(dir.path(), "e.tsv", "B\tA\nB\tZ\n\n");
        let (net, summary) = load_network(&nodes, &edges, b'\t').unwrap();
        assert_eq!((net.len(), net.edge_count()), (2, 1));
        assert_eq!(summary.rejected_unknown, 1);
    }

    #[test]
    fn malformed_date_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let nodes = write(dir.path(), "n.tsv", "A\t1990-01-01\n# note\n\nB\t1990-13-01\n");
        match read_nodes(&nodes, b'\t') {
            Err(CliError::Row { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_column_is_row_error() {
        let dir = tempfile::tempdir().unwrap();
        let nodes = write(dir.path(), "n.tsv", "A\n");
        assert!(matches!(read_nodes(&nodes, b'\t'), Err(CliError::Row { line: 1, .. })));
    }

    #[test]
    fn empty_and_duplicate_nodes_are_fatal() {
        let dir = tempfile::tempdir().unwrap();
        let empty = write(dir.path(), "empty.tsv", "# only a comment\n");
        let edges = write(dir.path(), "e.tsv", "");
        assert_eq!(load_network(&empty, &edges, b'\t').unwrap_err().exit_code(), 2);
        let dup = write(dir.path(), "dup.tsv", "A\t1990-01-01\nA\t1991-01-01\n");
        assert_eq!(load_network(&dup, &edges, b'\t').unwrap_err().exit_code(), 2);
    }

    #[test]
    fn other_delimiters() {
        let dir = tempfile::tempdir().unwrap();
        let nodes = write(dir.path(), "n.csv", "A,1990-01-01\nB,1991-01-01\n");
        let edges = write(dir.path(), "e.csv", "B,A\n");
        let (net, _) = load_network(&nodes, &edges, b',').unwrap();
        assert_eq!(net.edge_count(), 1);
    }

    #[test]
    fn unresolved_seminal_lists_ids() {
        let dir = tempfile::tempdir().unwrap();
        let nodes = write(dir.path(), "n.tsv", "A\t1990-01-01\n");
        let edges = write(dir.path(), "e.tsv", "");
        let seminal = write(dir.path(), "s.tsv", "X\nY\n");
        let (net, _) = load_network(&nodes, &edges, b'\t').unwrap();
        let err = load_seminal(&seminal, b'\t', &net).unwrap_err();
        assert!(err.to_string().contains("X, Y"));
    }

    #[test]
    fn scores_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let nodes = write(dir.path(), "n.tsv", "A\t1990-01-01\nB\t1990-01-11\n");
        let edges = write(dir.path(), "e.tsv", "B\tA\n");
        let (net, _) = load_network(&nodes, &edges, b'\t').unwrap();
        let sv = ScoreVector::new("x", vec![0.1 + 0.2, -0.0]);
        let path = dir.path().join("s.tsv");
        write_scores(&path, &net, &sv).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "id\tscore\trank\nA\t0.30000000000000004\t1\nB\t0\t2\n");
        assert_eq!(read_scores(&path, &net, "x").unwrap().scores(), sv.scores());
    }

    #[test]
    fn negative_zero_prints_plain() {
        assert_eq!(fmt_f64(-0.0), "0");
        assert_eq!(fmt_f64(2.5), "2.5");
    }
}
