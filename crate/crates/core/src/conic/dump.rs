//! ASCII exchange format for conic programs.
//!
//! ```text
//! CONIC 1
//! DIMS <m> <n> <nnz>
//! CONES <k>
//! F <dim> | L <dim> | Q <dim>      (k lines, in column order)
//! C <c_0> ... <c_{n-1}>
//! B <b_0> ... <b_{m-1}>
//! A
//! <i> <j> <value>                  (nnz lines, 0-based, column-major)
//! END
//! ```
//!
//! Reals are written with Rust's shortest round-trip formatting, so a
//! written program reads back bit-identically.

use std::fmt::Write as _;
use std::path::Path;

use super::{Cone, ConicError, ConicProgram, CscMatrix};

pub fn write_dump_string(program: &ConicProgram) -> String {
    let mut s = String::new();
    let a = &program.a;
    writeln!(s, "CONIC 1").unwrap();
    writeln!(s, "DIMS {} {} {}", a.nrows, a.ncols, a.nnz()).unwrap();
    writeln!(s, "CONES {}", program.cones.len()).unwrap();
    for cone in &program.cones {
        let (tag, d) = match *cone {
            Cone::Free(d) => ("F", d),
            Cone::NonNeg(d) => ("L", d),
            Cone::Soc(d) => ("Q", d),
        };
        writeln!(s, "{tag} {d}").unwrap();
    }
    s.push('C');
    for v in &program.c {
        write!(s, " {v:?}").unwrap();
    }
    s.push('\n');
    s.push('B');
    for v in &program.b {
        write!(s, " {v:?}").unwrap();
    }
    s.push('\n');
    s.push_str("A\n");
    for (i, j, v) in a.triplets() {
        writeln!(s, "{i} {j} {v:?}").unwrap();
    }
    s.push_str("END\n");
    s
}

pub fn write_dump(program: &ConicProgram, path: &Path) -> Result<(), ConicError> {
    std::fs::write(path, write_dump_string(program)).map_err(|e| ConicError::Io(format!("{}: {e}", path.display())))
}

pub fn read_dump(path: &Path) -> Result<ConicProgram, ConicError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConicError::Io(format!("{}: {e}", path.display())))?;
    parse_dump(&text)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str, ConicError> {
        loop {
            match self.inner.next() {
                Some((k, l)) => {
                    self.line = k + 1;
                    let l = l.trim();
                    if !l.is_empty() && !l.starts_with('#') {
                        return Ok(l);
                    }
                }
                None => return Err(self.err("unexpected end of file")),
            }
        }
    }

    fn err(&self, message: impl Into<String>) -> ConicError {
        ConicError::Format {
            line: self.line,
            message: message.into(),
        }
    }

    fn keyword(&mut self, key: &str) -> Result<Vec<&'a str>, ConicError> {
        let l = self.next()?;
        let mut it = l.split_whitespace();
        if it.next() != Some(key) {
            return Err(self.err(format!("expected `{key}`")));
        }
        Ok(it.collect())
    }

    fn num<T: std::str::FromStr>(&self, s: &str) -> Result<T, ConicError> {
        s.parse().map_err(|_| self.err(format!("invalid number `{s}`")))
    }
}

pub fn parse_dump(text: &str) -> Result<ConicProgram, ConicError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    let version = lines.keyword("CONIC")?;
    if version != ["1"] {
        return Err(lines.err("unsupported version"));
    }
    let dims = lines.keyword("DIMS")?;
    if dims.len() != 3 {
        return Err(lines.err("DIMS needs m n nnz"));
    }
    let m: usize = lines.num(dims[0])?;
    let n: usize = lines.num(dims[1])?;
    let nnz: usize = lines.num(dims[2])?;
    let k = lines.keyword("CONES")?;
    if k.len() != 1 {
        return Err(lines.err("CONES needs a count"));
    }
    let k: usize = lines.num(k[0])?;
    let mut cones = Vec::with_capacity(k);
    for _ in 0..k {
        let l = lines.next()?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(lines.err("cone line needs a tag and a dimension"));
        }
        let d: usize = lines.num(parts[1])?;
        cones.push(match parts[0] {
            "F" => Cone::Free(d),
            "L" => Cone::NonNeg(d),
            "Q" => Cone::Soc(d),
            t => return Err(lines.err(format!("unknown cone tag `{t}`"))),
        });
    }
    let c = lines.keyword("C")?;
    if c.len() != n {
        return Err(lines.err(format!("expected {n} cost entries, found {}", c.len())));
    }
    let c = c.iter().map(|s| lines.num(s)).collect::<Result<Vec<f64>, _>>()?;
    let b = lines.keyword("B")?;
    if b.len() != m {
        return Err(lines.err(format!("expected {m} right-hand side entries, found {}", b.len())));
    }
    let b = b.iter().map(|s| lines.num(s)).collect::<Result<Vec<f64>, _>>()?;
    if !lines.keyword("A")?.is_empty() {
        return Err(lines.err("`A` takes no arguments"));
    }
    let mut trip = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let l = lines.next()?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(lines.err("triplet needs i j value"));
        }
        let i: usize = lines.num(parts[0])?;
        let j: usize = lines.num(parts[1])?;
        let v: f64 = lines.num(parts[2])?;
        if i >= m || j >= n {
            return Err(lines.err(format!("entry ({i}, {j}) out of range")));
        }
        trip.push((i, j, v));
    }
    if !lines.keyword("END")?.is_empty() {
        return Err(lines.err("`END` takes no arguments"));
    }
    ConicProgram::new(CscMatrix::from_triplets(m, n, &trip), b, c, cones)
}
