//! Parser for the sparse SDPA problem text.

use crate::linalg::SparseMat;

/// A parsed problem: `maximize tr(C·X)` s.t. `tr(A_k·X) = b_k`, `X ⪰ 0`.
#[derive(Clone, Debug)]
pub struct Problem {
    pub block_sizes: Vec<i64>,
    pub b: Vec<f64>,
    pub c: SparseMat,
    pub constraints: Vec<SparseMat>,
}

impl Problem {
    pub fn m(&self) -> usize {
        self.b.len()
    }
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| {
        c.is_whitespace() || c == ',' || c == '{' || c == '}' || c == '(' || c == ')'
    })
    .filter(|t| !t.is_empty())
}

fn fail<T>(line: usize, msg: impl Into<String>) -> Result<T, String> {
    Err(format!("line {line}: {}", msg.into()))
}

/// Parses the sparse format, tolerating comments (`"` or `*`) and
/// brace/comma punctuation.
pub fn parse_problem(text: &str) -> Result<Problem, String> {
    let mut header: Vec<(usize, &str)> = Vec::new();
    let mut entry_lines: Vec<(usize, &str)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('"') || line.starts_with('*') {
            continue;
        }
        if header.len() < 4 {
            header.push((lineno, line));
        } else {
            entry_lines.push((lineno, line));
        }
    }
    if header.len() < 4 {
        return fail(
            header.last().map_or(0, |h| h.0),
            "file ends before the four header lines",
        );
    }
    let m: usize = tokens(header[0].1)
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| format!("line {}: bad constraint count", header[0].0))?;
    let nblocks: usize = tokens(header[1].1)
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| format!("line {}: bad block count", header[1].0))?;
    let block_sizes: Vec<i64> = tokens(header[2].1)
        .map(|t| {
            t.parse()
                .map_err(|_| format!("line {}: bad block size `{t}`", header[2].0))
        })
        .collect::<Result<_, _>>()?;
    if block_sizes.len() != nblocks {
        return fail(
            header[2].0,
            format!(
                "{} block sizes for {} declared blocks",
                block_sizes.len(),
                nblocks
            ),
        );
    }
    if block_sizes.iter().any(|&s| s == 0) {
        return fail(header[2].0, "zero block size");
    }
    let b: Vec<f64> = tokens(header[3].1)
        .map(|t| {
            t.parse()
                .map_err(|_| format!("line {}: bad right-hand side `{t}`", header[3].0))
        })
        .collect::<Result<_, _>>()?;
    if b.len() != m {
        return fail(
            header[3].0,
            format!("{} right-hand sides for {} constraints", b.len(), m),
        );
    }
    let mut c = SparseMat::empty(nblocks);
    let mut constraints = vec![SparseMat::empty(nblocks); m];
    for (lineno, line) in entry_lines {
        let toks: Vec<&str> = tokens(line).collect();
        if toks.len() != 5 {
            return fail(lineno, format!("expected 5 fields, got {}", toks.len()));
        }
        let int = |t: &str| -> Result<usize, String> {
            t.parse()
                .map_err(|_| format!("line {lineno}: bad integer `{t}`"))
        };
        let matno = int(toks[0])?;
        let block = int(toks[1])?;
        let i = int(toks[2])?;
        let j = int(toks[3])?;
        let v: f64 = toks[4]
            .parse()
            .map_err(|_| format!("line {lineno}: bad coefficient `{}`", toks[4]))?;
        if matno > m {
            return fail(lineno, format!("matrix {matno} out of range (m = {m})"));
        }
        if block == 0 || block > nblocks {
            return fail(lineno, format!("block {block} out of range"));
        }
        let size = block_sizes[block - 1];
        let dim = size.unsigned_abs() as usize;
        if i == 0 || j == 0 || i > dim || j > dim {
            return fail(lineno, format!("index ({i},{j}) outside block of size {dim}"));
        }
        if size < 0 && i != j {
            return fail(lineno, "off-diagonal entry in a diagonal block");
        }
        let target = if matno == 0 {
            &mut c
        } else {
            &mut constraints[matno - 1]
        };
        target.push(block - 1, i - 1, j - 1, v);
    }
    Ok(Problem {
        block_sizes,
        b,
        c,
        constraints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_small_problem() {
        let text = "\" toy\n2\n2\n2 -1\n1.0 2.0\n0 1 1 2 1.0\n1 1 1 1 1.0\n2 1 2 2 1.0\n2 2 1 1 3.0\n";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.m(), 2);
        assert_eq!(p.block_sizes, vec![2, -1]);
        assert_eq!(p.b, vec![1.0, 2.0]);
        assert_eq!(p.c.by_block[0].len(), 1);
        assert_eq!(p.constraints[1].by_block[1].len(), 1);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_problem("1\n1\n1\n").unwrap_err().contains("header"));
        let bad_entry = "1\n1\n1\n1.0\n1 1 1\n";
        assert!(parse_problem(bad_entry).unwrap_err().contains("5 fields"));
        let bad_block = "1\n1\n1\n1.0\n1 2 1 1 1.0\n";
        assert!(parse_problem(bad_block).unwrap_err().contains("block 2"));
        let off_diag = "1\n1\n-2\n1.0\n1 1 1 2 1.0\n";
        assert!(parse_problem(off_diag).unwrap_err().contains("off-diagonal"));
    }
}
