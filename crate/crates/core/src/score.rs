//! Fagotti score arithmetic and the indication-to-surgery rule.

use core::fmt;

use crate::anatomy::STATION_COUNT;
use crate::constants::ScoringConstants;

/// Total FS in points. With the default two points per station the value is
/// always one of 0, 2, ..., 12.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FagottiScore(u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("{0} is not a valid Fagotti score (expected an even value in 0..=12)")]
pub struct InvalidScore(pub u32);

impl FagottiScore {
    pub const MAX: u32 = 12;

    /// Validates against the standard 0..=12 even range.
    pub fn new(value: u32) -> Result<Self, InvalidScore> {
        if value <= Self::MAX && value.is_multiple_of(2) {
            Ok(Self(value))
        } else {
            Err(InvalidScore(value))
        }
    }

    #[inline]
    pub const fn value(self) -> u32 {
        self.0
    }
}

impl fmt::Display for FagottiScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Indication {
    SurgeryIndicated,
    SurgeryContraindicated,
}

impl Indication {
    pub const fn name(self) -> &'static str {
        match self {
            Indication::SurgeryIndicated => "SurgeryIndicated",
            Indication::SurgeryContraindicated => "SurgeryContraindicated",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "SurgeryIndicated" => Some(Indication::SurgeryIndicated),
            "SurgeryContraindicated" => Some(Indication::SurgeryContraindicated),
            _ => None,
        }
    }
}

impl fmt::Display for Indication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn compute_fs(
    station_positive: &[bool; STATION_COUNT],
    constants: &ScoringConstants,
) -> FagottiScore {
    let positives = station_positive.iter().filter(|&&p| p).count() as u32;
    FagottiScore(positives * constants.points_per_positive_station)
}

pub fn compute_its(fs: FagottiScore, constants: &ScoringConstants) -> Indication {
    if fs.0 >= constants.its_cutoff {
        Indication::SurgeryContraindicated
    } else {
        Indication::SurgeryIndicated
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anatomy::Station;

    #[test]
    fn fs_examples() {
        let c = ScoringConstants::default();
        assert_eq!(compute_fs(&[true; 6], &c).value(), 12);
        assert_eq!(compute_fs(&[false; 6], &c).value(), 0);
        let mut v = [false; 6];
        v[Station::Diaphragm as usize] = true;
        v[Station::GreaterOmentum as usize] = true;
        assert_eq!(compute_fs(&v, &c).value(), 4);
    }

    #[test]
    fn its_examples() {
        let c = ScoringConstants::default();
        let its = |v| compute_its(FagottiScore::new(v).unwrap(), &c);
        assert_eq!(its(8), Indication::SurgeryContraindicated);
        assert_eq!(its(6), Indication::SurgeryIndicated);
        assert_eq!(its(0), Indication::SurgeryIndicated);
        assert_eq!(its(12), Indication::SurgeryContraindicated);
    }

    #[test]
    fn score_range() {
        for v in 0..=20 {
            assert_eq!(FagottiScore::new(v).is_ok(), v % 2 == 0 && v <= 12);
        }
    }

    #[test]
    fn indication_names() {
        for i in [Indication::SurgeryIndicated, Indication::SurgeryContraindicated] {
            assert_eq!(Indication::from_name(i.name()), Some(i));
        }
        assert_eq!(Indication::from_name("maybe"), None);
    }
}
