//! Plain-text polyhedral formats (cdd style) and a compact binary file for
//! integer behavior rows.

use std::io::{Read, Write};

use crate::behavior::Space;
use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// Which representation a cdd-style file holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Rows `t x_1 .. x_d`: `t = 1` for points, `t = 0` for rays.
    V,
    /// Rows `b a_1 .. a_d` meaning `b + a.x >= 0`.
    H,
}

impl Representation {
    fn header(self) -> &'static str {
        match self {
            Representation::V => "V-representation",
            Representation::H => "H-representation",
        }
    }
}

/// Writes integer rows (already including the leading column).
pub fn write_cdd(rep: Representation, rows: &[Vec<i64>]) -> String {
    let cols = rows.first().map_or(0, Vec::len);
    let mut out = format!("{}\nbegin\n {} {} integer\n", rep.header(), rows.len(), cols);
    for r in rows {
        let line: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        out.push(' ');
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

/// Parses a cdd-style file; comment lines start with `*`.
pub fn read_cdd(text: &str) -> Result<(Representation, Vec<Vec<i64>>)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('*'));
    let mut rep = None;
    for l in lines.by_ref() {
        match l {
            "V-representation" => rep = Some(Representation::V),
            "H-representation" => rep = Some(Representation::H),
            "begin" => break,
            _ => {}
        }
    }
    let rep = rep.unwrap_or(Representation::H);
    let dims = lines.next().ok_or_else(|| Error::Parse("missing size line".into()))?;
    let f: Vec<&str> = dims.split_whitespace().collect();
    if f.len() < 3 || f[2] != "integer" {
        return Err(Error::Parse(format!("expected '<rows> <cols> integer', got '{dims}'")));
    }
    let nrows: usize = f[0].parse().map_err(|_| Error::Parse(format!("bad row count '{}'", f[0])))?;
    let ncols: usize = f[1].parse().map_err(|_| Error::Parse(format!("bad column count '{}'", f[1])))?;
    let mut rows = Vec::with_capacity(nrows);
    for l in lines {
        if l == "end" {
            break;
        }
        let r: Vec<i64> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad integer '{t}'"))))
            .collect::<Result<_>>()?;
        if r.len() != ncols {
            return Err(Error::DimensionMismatch { expected: ncols, got: r.len() });
        }
        rows.push(r);
    }
    if rows.len() != nrows {
        return Err(Error::DimensionMismatch { expected: nrows, got: rows.len() });
    }
    Ok((rep, rows))
}

const MAGIC: &[u8; 4] = b"HBVB";
const VERSION: u8 = 1;

fn space_tag(s: Space) -> u8 {
    match s {
        Space::FullCorrelation => 0,
        Space::WithMarginals => 1,
        Space::Probability => 2,
    }
}

fn tag_space(t: u8) -> Result<Space> {
    match t {
        0 => Ok(Space::FullCorrelation),
        1 => Ok(Space::WithMarginals),
        2 => Ok(Space::Probability),
        _ => Err(Error::Parse(format!("unknown space tag {t}"))),
    }
}

/// Integer behavior rows of one scenario, each divided by `scale`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BehaviorFile {
    pub scenario: Scenario,
    pub space: Space,
    pub scale: i64,
    pub rows: Vec<Vec<i64>>,
}

impl BehaviorFile {
    /// Layout (little endian): magic, version, n, m, space tag, scale
    /// (i64), row count (u64), then `count * dim` entries as i64.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let dim = self.space.dim(&self.scenario);
        if let Some(r) = self.rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
        }
        w.write_all(MAGIC)?;
        w.write_all(&[VERSION, self.scenario.parties() as u8, self.scenario.settings() as u8, space_tag(self.space)])?;
        w.write_all(&self.scale.to_le_bytes())?;
        w.write_all(&(self.rows.len() as u64).to_le_bytes())?;
        for r in &self.rows {
            for v in r {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut head = [0u8; 8];
        r.read_exact(&mut head)?;
        if &head[..4] != MAGIC {
            return Err(Error::Parse("not a behavior file".into()));
        }
        if head[4] != VERSION {
            return Err(Error::Parse(format!("unsupported version {}", head[4])));
        }
        let scenario = Scenario::new(head[5] as usize, head[6] as usize)?;
        let space = tag_space(head[7])?;
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let scale = i64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let count = u64::from_le_bytes(b8) as usize;
        let dim = space.dim(&scenario);
        let mut rows = Vec::with_capacity(count.min(1 << 20));
        for _ in 0..count {
            let mut row = Vec::with_capacity(dim);
            for _ in 0..dim {
                r.read_exact(&mut b8)?;
                row.push(i64::from_le_bytes(b8));
            }
            rows.push(row);
        }
        Ok(BehaviorFile { scenario, space, scale, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdd_round_trip() {
        let rows = vec![vec![1, 1, -1], vec![1, -1, 1], vec![0, 1, 1]];
        let text = write_cdd(Representation::V, &rows);
        assert!(text.starts_with("V-representation\nbegin\n 3 3 integer\n"));
        assert_eq!(read_cdd(&text).unwrap(), (Representation::V, rows));
        assert!(read_cdd("H-representation\nbegin\n 1 2 integer\n 1\nend\n").is_err());
    }

    #[test]
    fn binary_round_trip() {
        let s = Scenario::new(2, 2).unwrap();
        let f = BehaviorFile { scenario: s, space: Space::FullCorrelation, scale: 1, rows: vec![vec![1, -1, 1, 1]] };
        let mut buf = Vec::new();
        f.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 16 + 32);
        assert_eq!(BehaviorFile::read_from(&mut buf.as_slice()).unwrap(), f);
        buf[0] = b'X';
        assert!(BehaviorFile::read_from(&mut buf.as_slice()).is_err());
    }
}
