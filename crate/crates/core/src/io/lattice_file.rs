//! ASCII lattice files.
//!
//! ```text
//! dmaxwell-lattice 1
//! name Ex
//! iteration 2
//! sites 2
//! 0 0 0 9.84375e-1 0e0
//! 0 1 0 -1.25e-1 0e0
//! ```
//!
//! Four header lines, then one `x y z re im` record per stored site in
//! lexicographic site order. Floats use the shortest decimal that parses
//! back to the same binary64, so a save/load round trip is bit-exact.
//! Lines starting with `#` and blank lines are ignored on load.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::IoError;
use crate::lattice::{Lattice, Quantity, Site};

pub const MAGIC: &str = "dmaxwell-lattice";
pub const VERSION: u32 = 1;

/// Renders a lattice in the file format.
pub fn to_string(lat: &Lattice) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "name {}", lat.name());
    let _ = writeln!(out, "iteration {}", lat.iteration());
    let _ = writeln!(out, "sites {}", lat.nonzero_count());
    for (s, q) in lat.iter() {
        let _ = writeln!(out, "{} {} {} {:e} {:e}", s.x, s.y, s.z, q.re, q.im);
    }
    out
}

pub fn save_lattice(lat: &Lattice, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    if lat.name().is_empty() || lat.name().contains(char::is_whitespace) {
        return Err(IoError::InvalidName(lat.name().to_string()));
    }
    fs::write(path, to_string(lat)).map_err(|e| IoError::io(path, e))
}

pub fn load_lattice(path: impl AsRef<Path>) -> Result<Lattice, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse(&text, path)
}

/// Parses file contents; `path` only labels errors.
pub fn parse(text: &str, path: &Path) -> Result<Lattice, IoError> {
    let err = |line: usize, msg: String| IoError::parse(path, line, msg);
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let mut header = |key: &str| -> Result<(usize, String), IoError> {
        let (no, line) = lines
            .next()
            .ok_or_else(|| err(0, format!("missing `{key}` header")))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(key) {
            return Err(err(no, format!("expected `{key}` header")));
        }
        let value = parts
            .next()
            .ok_or_else(|| err(no, format!("`{key}` needs a value")))?;
        if parts.next().is_some() {
            return Err(err(no, format!("trailing text after `{key}`")));
        }
        Ok((no, value.to_string()))
    };

    let (_, version) = header(MAGIC)?;
    if version != VERSION.to_string() {
        return Err(IoError::Version {
            path: path.to_path_buf(),
            found: version,
            expected: VERSION,
        });
    }
    let (_, name) = header("name")?;
    let (no, iteration) = header("iteration")?;
    let iteration: u64 = iteration
        .parse()
        .map_err(|_| err(no, format!("bad iteration `{iteration}`")))?;
    let (no, count) = header("sites")?;
    let count: usize = count
        .parse()
        .map_err(|_| err(no, format!("bad site count `{count}`")))?;

    let mut records: Vec<(Site, Quantity)> = Vec::with_capacity(count);
    let mut last_line = no;
    for (no, line) in lines {
        last_line = no;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(err(no, format!("expected `x y z re im`, got {} fields", fields.len())));
        }
        let coord = |i: usize| {
            fields[i]
                .parse::<i32>()
                .map_err(|_| err(no, format!("coordinate `{}` is not an integer", fields[i])))
        };
        let value = |i: usize| match fields[i].parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(err(no, format!("`{}` is not a finite number", fields[i]))),
        };
        let site = Site::new(coord(0)?, coord(1)?, coord(2)?);
        records.push((site, Quantity::new(value(3)?, value(4)?)));
    }
    if records.len() != count {
        return Err(err(
            last_line,
            format!("header announces {count} sites, found {}", records.len()),
        ));
    }
    records.sort_by_key(|r| r.0);
    if let Some(w) = records.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(err(0, format!("site ({}) appears twice", w[0].0)));
    }
    let mut lat = Lattice::from_sites(name, records)?;
    lat.set_iteration(iteration);
    Ok(lat)
}
