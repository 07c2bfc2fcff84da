//! Recorded phase-angle time series and their on-disk formats.
//!
//! The binary format is bit-exact and preferred for anything large:
//! 8-byte ASCII magic `GRIDTS01`, little-endian u32 node count N, u64 sample
//! count T, f64 sampling interval, then N·T little-endian f64 samples in
//! node-major order. A CSV alternative (`n,theta_1,…,theta_N`) exists for
//! small cases and spreadsheets.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"GRIDTS01";

/// N×T matrix of phase-angle deviations, node-major, with sampling interval.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesPanel {
    n_nodes: usize,
    n_samples: usize,
    ts: f64,
    data: Vec<f64>,
}

impl TimeSeriesPanel {
    /// Wraps a node-major buffer (`data[node * n_samples + t]`), validating
    /// dimensions and finiteness.
    pub fn new(n_nodes: usize, n_samples: usize, ts: f64, data: Vec<f64>) -> Result<Self> {
        if n_nodes == 0 || n_samples == 0 {
            return Err(Error::Validation(format!(
                "panel must be non-empty, got {n_nodes} nodes x {n_samples} samples"
            )));
        }
        if !(ts.is_finite() && ts > 0.0) {
            return Err(Error::Validation(format!(
                "sampling interval must be positive and finite, got {ts}"
            )));
        }
        let expected = n_nodes
            .checked_mul(n_samples)
            .ok_or_else(|| Error::Validation("panel dimensions overflow".into()))?;
        if data.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite sample at node {}, step {}",
                pos / n_samples + 1,
                pos % n_samples
            )));
        }
        Ok(TimeSeriesPanel {
            n_nodes,
            n_samples,
            ts,
            data,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn ts(&self) -> f64 {
        self.ts
    }

    /// Node `j`'s full sample sequence.
    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.n_samples..(j + 1) * self.n_samples]
    }

    pub fn get(&self, j: usize, t: usize) -> f64 {
        self.data[j * self.n_samples + t]
    }

    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        w.write_all(MAGIC).map_err(io)?;
        w.write_all(&(self.n_nodes as u32).to_le_bytes())
            .map_err(io)?;
        w.write_all(&(self.n_samples as u64).to_le_bytes())
            .map_err(io)?;
        w.write_all(&self.ts.to_le_bytes()).map_err(io)?;
        for &v in &self.data {
            w.write_all(&v.to_le_bytes()).map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn read_binary(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(file);
        let mut header = [0u8; 28];
        r.read_exact(&mut header).map_err(|e| Error::io(path, e))?;
        if &header[..8] != MAGIC {
            return Err(Error::parse(path, 1, "bad magic; not a GRIDTS01 panel"));
        }
        let n_nodes = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        let n_samples = u64::from_le_bytes(header[12..20].try_into().unwrap()) as usize;
        let ts = f64::from_le_bytes(header[20..28].try_into().unwrap());
        let total = n_nodes
            .checked_mul(n_samples)
            .filter(|&t| t <= (1 << 34))
            .ok_or_else(|| Error::parse(path, 1, "panel dimensions unreasonably large"))?;
        let mut data = vec![0.0f64; total];
        let mut buf = vec![0u8; 8 << 13];
        let mut filled = 0;
        while filled < total {
            let want = ((total - filled) * 8).min(buf.len());
            r.read_exact(&mut buf[..want])
                .map_err(|e| Error::io(path, e))?;
            for (slot, chunk) in data[filled..].iter_mut().zip(buf[..want].chunks_exact(8)) {
                *slot = f64::from_le_bytes(chunk.try_into().unwrap());
            }
            filled += want / 8;
        }
        let mut trailer = [0u8; 1];
        if r.read(&mut trailer).map_err(|e| Error::io(path, e))? != 0 {
            return Err(Error::parse(path, 1, "trailing bytes after panel data"));
        }
        TimeSeriesPanel::new(n_nodes, n_samples, ts, data)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        write!(w, "n").map_err(io)?;
        for j in 1..=self.n_nodes {
            write!(w, ",theta_{j}").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
        for t in 0..self.n_samples {
            write!(w, "{t}").map_err(io)?;
            for j in 0..self.n_nodes {
                write!(w, ",{}", self.get(j, t)).map_err(io)?;
            }
            writeln!(w).map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn read_csv(path: &Path, ts: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, "empty file"))?;
        let cols: Vec<&str> = header.trim().split(',').collect();
        if cols.is_empty() || cols[0] != "n" {
            return Err(Error::parse(path, 1, "expected header starting with `n`"));
        }
        let n_nodes = cols.len() - 1;
        for (j, col) in cols[1..].iter().enumerate() {
            if *col != format!("theta_{}", j + 1) {
                return Err(Error::parse(
                    path,
                    1,
                    format!("expected column theta_{}, got {col:?}", j + 1),
                ));
            }
        }
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); n_nodes];
        for (lineno, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != n_nodes + 1 {
                return Err(Error::parse(
                    path,
                    lineno + 1,
                    format!("expected {} fields, got {}", n_nodes + 1, fields.len()),
                ));
            }
            for (j, f) in fields[1..].iter().enumerate() {
                let v: f64 = f
                    .trim()
                    .parse()
                    .map_err(|e| Error::parse(path, lineno + 1, format!("bad sample: {e}")))?;
                columns[j].push(v);
            }
        }
        let n_samples = columns.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_nodes * n_samples);
        for col in columns {
            data.extend(col);
        }
        TimeSeriesPanel::new(n_nodes, n_samples, ts, data)
    }
}
