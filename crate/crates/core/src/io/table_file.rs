//! Coupling tables as text: one `SRC DST dx dy dz re im` entry per line,
//! `#` starts a comment. Entry order in the file is table order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::IoError;
use crate::engine::{CouplingEntry, CouplingTable};
use crate::lattice::{Quantity, Site};

pub fn to_string(table: &CouplingTable) -> String {
    let mut out = String::from("# SRC DST dx dy dz re im\n");
    for e in table.entries() {
        let _ = writeln!(
            out,
            "{} {} {} {} {} {:e} {:e}",
            e.source, e.destination, e.offset.x, e.offset.y, e.offset.z, e.factor.re, e.factor.im
        );
    }
    out
}

pub fn save_table(table: &CouplingTable, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, to_string(table)).map_err(|e| IoError::io(path, e))
}

pub fn load_table(path: impl AsRef<Path>) -> Result<CouplingTable, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse(&text, path)
}

pub fn parse(text: &str, path: &Path) -> Result<CouplingTable, IoError> {
    let mut table = CouplingTable::new();
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 7 {
            return Err(IoError::parse(
                path,
                no,
                format!("expected `SRC DST dx dy dz re im`, got {} fields", f.len()),
            ));
        }
        let int = |k: usize| {
            f[k].parse::<i32>().map_err(|_| {
                IoError::parse(path, no, format!("offset `{}` is not an integer", f[k]))
            })
        };
        let num = |k: usize| {
            f[k].parse::<f64>()
                .map_err(|_| IoError::parse(path, no, format!("`{}` is not a number", f[k])))
        };
        table.push(CouplingEntry::new(
            f[0],
            f[1],
            Site::new(int(2)?, int(3)?, int(4)?),
            Quantity::new(num(5)?, num(6)?),
        ));
    }
    Ok(table)
}
