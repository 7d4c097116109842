use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

/// A point of the 3-D integer lattice in hat coordinates (one unit is half
/// the minimal spatial difference).
///
/// The derived ordering is lexicographic in `(x, y, z)`; every traversal and
/// tie-break in the crate relies on it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub x: i32,
    pub y: i32,
    pub z: i32,
}

impl Site {
    pub const ORIGIN: Site = Site { x: 0, y: 0, z: 0 };

    pub const fn new(x: i32, y: i32, z: i32) -> Self {
        Site { x, y, z }
    }

    /// `|x| + |y| + |z|`.
    pub fn l1_norm(self) -> i64 {
        (self.x as i64).abs() + (self.y as i64).abs() + (self.z as i64).abs()
    }

    /// `x + y + z`, whose parity is the checkerboard colour of the site.
    pub fn coordinate_sum(self) -> i64 {
        self.x as i64 + self.y as i64 + self.z as i64
    }

    pub fn checked_add(self, other: Site) -> Option<Site> {
        Some(Site {
            x: self.x.checked_add(other.x)?,
            y: self.y.checked_add(other.y)?,
            z: self.z.checked_add(other.z)?,
        })
    }
}

impl Add for Site {
    type Output = Site;

    fn add(self, rhs: Site) -> Site {
        Site::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Site {
    type Output = Site;

    fn sub(self, rhs: Site) -> Site {
        Site::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for Site {
    type Output = Site;

    fn neg(self) -> Site {
        Site::new(-self.x, -self.y, -self.z)
    }
}

impl From<(i32, i32, i32)> for Site {
    fn from((x, y, z): (i32, i32, i32)) -> Self {
        Site::new(x, y, z)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.x, self.y, self.z)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("expected three comma-separated integers, got `{0}`")]
pub struct ParseSiteError(pub String);

impl FromStr for Site {
    type Err = ParseSiteError;

    /// Parses `x,y,z`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseSiteError(s.to_string());
        let mut parts = s.split(',').map(|p| p.trim().parse::<i32>());
        let x = parts.next().ok_or_else(err)?.map_err(|_| err())?;
        let y = parts.next().ok_or_else(err)?.map_err(|_| err())?;
        let z = parts.next().ok_or_else(err)?.map_err(|_| err())?;
        if parts.next().is_some() {
            return Err(err());
        }
        Ok(Site::new(x, y, z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_lexicographic() {
        let mut sites = vec![
            Site::new(0, 0, 1),
            Site::new(-1, 5, 5),
            Site::new(0, -1, 9),
            Site::new(0, 0, -1),
        ];
        sites.sort();
        assert_eq!(
            sites,
            vec![
                Site::new(-1, 5, 5),
                Site::new(0, -1, 9),
                Site::new(0, 0, -1),
                Site::new(0, 0, 1),
            ]
        );
    }

    #[test]
    fn parse_and_display() {
        let s: Site = "3, -2,0".parse().unwrap();
        assert_eq!(s, Site::new(3, -2, 0));
        assert_eq!(s.to_string(), "3,-2,0");
        assert!("1,2".parse::<Site>().is_err());
        assert!("1,2,3,4".parse::<Site>().is_err());
        assert!("1,2.5,3".parse::<Site>().is_err());
    }

    #[test]
    fn checked_add_overflows() {
        assert_eq!(Site::new(i32::MAX, 0, 0).checked_add(Site::new(1, 0, 0)), None);
        assert_eq!(Site::new(1, 2, 3).l1_norm(), 6);
        assert_eq!(Site::new(-1, 2, -3).coordinate_sum(), -2);
    }
}
