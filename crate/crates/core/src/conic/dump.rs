//! Plain-text sparse triplet format for conic programs.
//!
//! ```text
//! conic-program v1
//! vars <n> rows <m>
//! cones <count>
//! zero <m> | nonneg <m> | soc <m> | psd <n>     (one per line)
//! c <n>
//! <value>                                      (n lines)
//! b <m>
//! <value>                                      (m lines)
//! a <nnz>
//! <row> <col> <value>                          (nnz lines)
//! ```
//!
//! Values are written with `{:e}` (shortest round-trip form).

use super::{Cone, ConicProgram, SparseMatrix};
use crate::error::{Error, Result};

pub fn write_program(p: &ConicProgram) -> String {
    let mut out = String::new();
    out.push_str("conic-program v1\n");
    out.push_str(&format!("vars {} rows {}\n", p.num_vars(), p.num_rows()));
    out.push_str(&format!("cones {}\n", p.cones.len()));
    for c in &p.cones {
        let line = match c {
            Cone::Zero(m) => format!("zero {m}"),
            Cone::Nonneg(m) => format!("nonneg {m}"),
            Cone::Soc(m) => format!("soc {m}"),
            Cone::Psd(n) => format!("psd {n}"),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str(&format!("c {}\n", p.c.len()));
    for v in &p.c {
        out.push_str(&format!("{v:e}\n"));
    }
    out.push_str(&format!("b {}\n", p.b.len()));
    for v in &p.b {
        out.push_str(&format!("{v:e}\n"));
    }
    out.push_str(&format!("a {}\n", p.a.entries.len()));
    for (r, c, v) in &p.a.entries {
        out.push_str(&format!("{r} {c} {v:e}\n"));
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, &'a str)> {
        loop {
            match self.inner.next() {
                Some((_, l)) if l.trim().is_empty() => continue,
                Some((i, l)) => return Ok((i + 1, l.trim())),
                None => return Err(Error::Parse("unexpected end of program file".into())),
            }
        }
    }

    fn header(&mut self, key: &str) -> Result<(usize, Vec<&'a str>)> {
        let (ln, l) = self.next()?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.first() != Some(&key) {
            return Err(Error::Parse(format!("line {ln}: expected '{key}', found {l:?}")));
        }
        Ok((ln, parts))
    }
}

fn num<T: std::str::FromStr>(s: &str, ln: usize) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Parse(format!("line {ln}: cannot parse {s:?}")))
}

pub fn read_program(text: &str) -> Result<ConicProgram> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (ln, magic) = lines.next()?;
    if magic != "conic-program v1" {
        return Err(Error::Parse(format!("line {ln}: missing 'conic-program v1' header")));
    }
    let (ln, dims) = lines.header("vars")?;
    if dims.len() != 4 || dims[2] != "rows" {
        return Err(Error::Parse(format!("line {ln}: expected 'vars <n> rows <m>'")));
    }
    let n: usize = num(dims[1], ln)?;
    let m: usize = num(dims[3], ln)?;
    let (ln, cc) = lines.header("cones")?;
    let count: usize = num(cc.get(1).copied().unwrap_or(""), ln)?;
    let mut cones = Vec::with_capacity(count);
    for _ in 0..count {
        let (ln, l) = lines.next()?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(Error::Parse(format!("line {ln}: expected '<kind> <size>'")));
        }
        let size: usize = num(parts[1], ln)?;
        cones.push(match parts[0] {
            "zero" => Cone::Zero(size),
            "nonneg" => Cone::Nonneg(size),
            "soc" => Cone::Soc(size),
            "psd" => Cone::Psd(size),
            other => return Err(Error::Parse(format!("line {ln}: unknown cone {other:?}"))),
        });
    }
    let mut read_vec = |key: &str, expect: usize| -> Result<Vec<f64>> {
        let (ln, h) = lines.header(key)?;
        let len: usize = num(h.get(1).copied().unwrap_or(""), ln)?;
        if len != expect {
            return Err(Error::Parse(format!("line {ln}: {key} has {len} entries, expected {expect}")));
        }
        (0..len)
            .map(|_| {
                let (ln, l) = lines.next()?;
                num(l, ln)
            })
            .collect()
    };
    let c = read_vec("c", n)?;
    let b = read_vec("b", m)?;
    let (ln, h) = lines.header("a")?;
    let nnz: usize = num(h.get(1).copied().unwrap_or(""), ln)?;
    let mut a = SparseMatrix::new(m, n);
    for _ in 0..nnz {
        let (ln, l) = lines.next()?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("line {ln}: expected '<row> <col> <value>'")));
        }
        a.entries.push((num(parts[0], ln)?, num(parts[1], ln)?, num(parts[2], ln)?));
    }
    ConicProgram::new(c, a, b, cones)
}
