//! HSFIELD plain-text field snapshots.
//!
//! ```text
//! HSFIELD v1 <kind> <nx> <ny> <dx>
//! ix iy re [im]
//! ```
//!
//! `kind` is `psi` (sites, `re im`), `a1` (horizontal links) or `a2`
//! (vertical links). Every site or link of the grid is listed, inactive ones
//! as zero, row-major with `iy` outer. Numbers use shortest round-trip
//! formatting, so write-then-read is lossless.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::fields::{LinkField, SiteField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Psi,
    A1,
    A2,
}

impl FieldKind {
    fn name(self) -> &'static str {
        match self {
            FieldKind::Psi => "psi",
            FieldKind::A1 => "a1",
            FieldKind::A2 => "a2",
        }
    }

    /// Grid of positions listed in a file of this kind.
    fn extent(self, nx: usize, ny: usize) -> (usize, usize) {
        match self {
            FieldKind::Psi => (nx, ny),
            FieldKind::A1 => (nx - 1, ny),
            FieldKind::A2 => (nx, ny - 1),
        }
    }
}

/// Parsed snapshot before it is tied to a domain.
#[derive(Clone, Debug, PartialEq)]
pub struct RawField {
    pub kind: FieldKind,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub values: Vec<Complex64>,
}

fn header(kind: FieldKind, d: &Domain) -> String {
    format!("HSFIELD v1 {} {} {} {:?}\n", kind.name(), d.nx(), d.ny(), d.dx())
}

pub fn format_psi(psi: &SiteField, d: &Domain) -> String {
    let mut s = header(FieldKind::Psi, d);
    for iy in 0..d.ny() {
        for ix in 0..d.nx() {
            let v = psi.values[d.site(ix, iy)];
            let _ = writeln!(s, "{ix} {iy} {:?} {:?}", v.re, v.im);
        }
    }
    s
}

pub fn format_link(kind: FieldKind, values: &[f64], d: &Domain) -> String {
    let mut s = header(kind, d);
    let (ex, ey) = kind.extent(d.nx(), d.ny());
    for iy in 0..ey {
        for ix in 0..ex {
            let _ = writeln!(s, "{ix} {iy} {:?}", values[iy * ex + ix]);
        }
    }
    s
}

pub fn parse(text: &str) -> Result<RawField> {
    let mut lines = text.lines();
    let head = lines.next().ok_or_else(|| Error::Format("empty snapshot".into()))?;
    let tok: Vec<&str> = head.split_whitespace().collect();
    if tok.len() != 6 || tok[0] != "HSFIELD" || tok[1] != "v1" {
        return Err(Error::Format(format!("bad header '{head}'")));
    }
    let kind = match tok[2] {
        "psi" => FieldKind::Psi,
        "a1" => FieldKind::A1,
        "a2" => FieldKind::A2,
        other => return Err(Error::Format(format!("unknown field kind '{other}'"))),
    };
    let num = |s: &str, what: &str| s.parse::<usize>().map_err(|_| Error::Format(format!("bad {what} '{s}'")));
    let (nx, ny) = (num(tok[3], "nx")?, num(tok[4], "ny")?);
    let dx: f64 = tok[5].parse().map_err(|_| Error::Format(format!("bad dx '{}'", tok[5])))?;
    if nx < 2 || ny < 2 {
        return Err(Error::Format(format!("grid {nx}x{ny} too small")));
    }
    let (ex, ey) = kind.extent(nx, ny);
    let ncols = if kind == FieldKind::Psi { 4 } else { 3 };
    let mut values = Vec::with_capacity(ex * ey);
    for (k, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
        let t: Vec<&str> = line.split_whitespace().collect();
        let lineno = k + 2;
        if t.len() != ncols {
            return Err(Error::Format(format!("line {lineno}: expected {ncols} columns")));
        }
        let (ix, iy) = (num(t[0], "ix")?, num(t[1], "iy")?);
        if (ix, iy) != (k % ex, k / ex) {
            return Err(Error::Format(format!("line {lineno}: entries out of row-major order")));
        }
        let f = |s: &str| s.parse::<f64>().map_err(|_| Error::Format(format!("line {lineno}: bad number '{s}'")));
        let re = f(t[2])?;
        let im = if ncols == 4 { f(t[3])? } else { 0.0 };
        values.push(Complex64::new(re, im));
    }
    if values.len() != ex * ey {
        return Err(Error::Format(format!("expected {} entries, found {}", ex * ey, values.len())));
    }
    Ok(RawField { kind, nx, ny, dx, values })
}

fn read(path: &Path) -> Result<RawField> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn check_grid(raw: &RawField, d: &Domain, path: &Path, want: FieldKind) -> Result<()> {
    if raw.kind != want {
        return Err(Error::Format(format!(
            "{}: expected a {} field, found {}",
            path.display(),
            want.name(),
            raw.kind.name()
        )));
    }
    if (raw.nx, raw.ny) != (d.nx(), d.ny()) || raw.dx != d.dx() {
        return Err(Error::Shape(format!(
            "{}: grid {}x{} (dx {:?}) does not match domain {}x{} (dx {:?})",
            path.display(),
            raw.nx,
            raw.ny,
            raw.dx,
            d.nx(),
            d.ny(),
            d.dx()
        )));
    }
    Ok(())
}

pub fn read_psi(path: &Path, d: &Domain) -> Result<SiteField> {
    let raw = read(path)?;
    check_grid(&raw, d, path, FieldKind::Psi)?;
    SiteField::from_values(d, raw.values)
}

pub fn read_links(path_a1: &Path, path_a2: &Path, d: &Domain) -> Result<LinkField> {
    let r1 = read(path_a1)?;
    check_grid(&r1, d, path_a1, FieldKind::A1)?;
    let r2 = read(path_a2)?;
    check_grid(&r2, d, path_a2, FieldKind::A2)?;
    LinkField::from_values(
        d,
        r1.values.iter().map(|v| v.re).collect(),
        r2.values.iter().map(|v| v.re).collect(),
    )
}

/// Paths of the three files of a state saved under `prefix`.
pub fn state_paths(dir: &Path, prefix: &str) -> [PathBuf; 3] {
    ["psi", "a1", "a2"].map(|k| dir.join(format!("{prefix}_{k}.hsf")))
}

pub fn write_state(dir: &Path, prefix: &str, psi: &SiteField, a: &LinkField, d: &Domain) -> Result<()> {
    let [p, a1, a2] = state_paths(dir, prefix);
    std::fs::write(p, format_psi(psi, d))?;
    std::fs::write(a1, format_link(FieldKind::A1, &a.a1, d))?;
    std::fs::write(a2, format_link(FieldKind::A2, &a.a2, d))?;
    Ok(())
}
