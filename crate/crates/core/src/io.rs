//! Text format for point sets.
//!
//! ```text
//! fq p=3 ell=2 d=2 mod=1,0,1
//! # comment
//! 0,4
//! 8,1
//! ```
//!
//! `mod` lists the coefficients c_0, …, c_ℓ of the monic modulus (so it ends
//! in 1). Each point is one line of comma-separated element indices in the
//! packed base-p encoding. Blank lines and `#` comments are ignored.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{make_field, FieldCtx};
use crate::geometry::PointSet;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn header(ctx: &FieldCtx, d: usize) -> String {
    let mut coeffs: Vec<String> = ctx.modulus().iter().map(|c| c.to_string()).collect();
    coeffs.push("1".into());
    format!(
        "fq p={} ell={} d={} mod={}",
        ctx.p(),
        ctx.ell(),
        d,
        coeffs.join(",")
    )
}

pub fn format_point_set(a: &PointSet) -> String {
    let mut out = header(a.field(), a.dim());
    out.push('\n');
    for v in a.iter() {
        let row: Vec<String> = v.iter().map(|x| x.idx().to_string()).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

fn parse_header(line_no: usize, line: &str) -> Result<(Arc<FieldCtx>, usize)> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some("fq") {
        return Err(parse_err(line_no, "header must start with `fq`"));
    }
    let (mut p, mut ell, mut d, mut modulus) = (None, None, None, None);
    for part in parts {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, format!("expected key=value, got `{part}`")))?;
        let num = |v: &str| -> Result<u64> {
            v.parse()
                .map_err(|_| parse_err(line_no, format!("bad number `{v}` for `{key}`")))
        };
        match key {
            "p" => p = Some(num(value)?),
            "ell" => ell = Some(num(value)?),
            "d" => d = Some(num(value)?),
            "mod" => modulus = Some(value.split(',').map(num).collect::<Result<Vec<u64>>>()?),
            _ => return Err(parse_err(line_no, format!("unknown header key `{key}`"))),
        }
    }
    let missing = |k: &str| parse_err(line_no, format!("header is missing `{k}`"));
    let p = p.ok_or_else(|| missing("p"))?;
    let ell = ell.ok_or_else(|| missing("ell"))?;
    let d = d.ok_or_else(|| missing("d"))? as usize;
    let modulus = modulus.ok_or_else(|| missing("mod"))?;
    let ell32 = u32::try_from(ell).map_err(|_| parse_err(line_no, "ell out of range"))?;
    let ctx = make_field(p, ell32)?;
    let mut expect: Vec<u64> = ctx.modulus().iter().map(|&c| c as u64).collect();
    expect.push(1);
    if modulus != expect {
        return Err(Error::FieldMismatch);
    }
    if d == 0 {
        return Err(parse_err(line_no, "d must be at least 1"));
    }
    Ok((ctx, d))
}

pub fn parse_point_set(text: &str) -> Result<PointSet> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, h) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let (ctx, d) = parse_header(hl, h)?;
    let mut pts = Vec::new();
    for (no, line) in lines {
        let v = line
            .split(',')
            .map(|t| {
                let i: u64 = t
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(no, format!("bad element `{}`", t.trim())))?;
                ctx.elem(i)
                    .map_err(|_| parse_err(no, format!("element {i} outside F_{}", ctx.q())))
            })
            .collect::<Result<Vec<_>>>()?;
        if v.len() != d {
            return Err(parse_err(
                no,
                format!("expected {d} coordinates, got {}", v.len()),
            ));
        }
        pts.push(v);
    }
    PointSet::new(ctx, d, pts)
}

pub fn read_point_set(path: &Path) -> Result<PointSet> {
    parse_point_set(&std::fs::read_to_string(path)?)
}

pub fn write_point_set(a: &PointSet, path: &Path) -> Result<()> {
    std::fs::write(path, format_point_set(a))?;
    Ok(())
}
