//! Segmentable anatomical structures and the six FS stations they roll up to.

use core::fmt;
use core::str::FromStr;

pub const ORGAN_COUNT: usize = 8;
pub const STATION_COUNT: usize = 6;

/// A structure the segmentation model produces a confidence map for.
///
/// Integer codes are frozen at 0..=7 in declaration order; raster channels
/// and label values (code + 1) depend on them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum OrganClass {
    Diaphragm = 0,
    Liver = 1,
    Stomach = 2,
    Spleen = 3,
    LesserOmentum = 4,
    GreaterOmentum = 5,
    ParietalPeritoneum = 6,
    Bowel = 7,
}

/// One of the six FS anatomical stations. Codes are frozen at 0..=5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Station {
    Diaphragm = 0,
    Liver = 1,
    StomachSpleenLesserOmentum = 2,
    GreaterOmentum = 3,
    ParietalPeritoneum = 4,
    Bowel = 5,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown name `{0}`")]
pub struct UnknownName(pub alloc::string::String);

impl OrganClass {
    pub const ALL: [OrganClass; ORGAN_COUNT] = [
        OrganClass::Diaphragm,
        OrganClass::Liver,
        OrganClass::Stomach,
        OrganClass::Spleen,
        OrganClass::LesserOmentum,
        OrganClass::GreaterOmentum,
        OrganClass::ParietalPeritoneum,
        OrganClass::Bowel,
    ];

    #[inline]
    pub const fn code(self) -> u8 {
        self as u8
    }

    pub const fn from_code(code: u8) -> Option<Self> {
        if (code as usize) < ORGAN_COUNT {
            Some(Self::ALL[code as usize])
        } else {
            None
        }
    }

    /// Label value used in ground-truth label rasters (0 is background).
    #[inline]
    pub const fn label(self) -> u8 {
        self as u8 + 1
    }

    pub const fn name(self) -> &'static str {
        match self {
            OrganClass::Diaphragm => "diaphragm",
            OrganClass::Liver => "liver",
            OrganClass::Stomach => "stomach",
            OrganClass::Spleen => "spleen",
            OrganClass::LesserOmentum => "lesser_omentum",
            OrganClass::GreaterOmentum => "greater_omentum",
            OrganClass::ParietalPeritoneum => "parietal_peritoneum",
            OrganClass::Bowel => "bowel",
        }
    }

    pub const fn display_name(self) -> &'static str {
        match self {
            OrganClass::Diaphragm => "Diaphragm",
            OrganClass::Liver => "Liver",
            OrganClass::Stomach => "Stomach",
            OrganClass::Spleen => "Spleen",
            OrganClass::LesserOmentum => "Lesser Omentum",
            OrganClass::GreaterOmentum => "Greater Omentum",
            OrganClass::ParietalPeritoneum => "Parietal peritoneum",
            OrganClass::Bowel => "Bowel",
        }
    }

    #[inline]
    pub fn station(self) -> Station {
        station_of(self)
    }
}

impl Station {
    pub const ALL: [Station; STATION_COUNT] = [
        Station::Diaphragm,
        Station::Liver,
        Station::StomachSpleenLesserOmentum,
        Station::GreaterOmentum,
        Station::ParietalPeritoneum,
        Station::Bowel,
    ];

    #[inline]
    pub const fn code(self) -> u8 {
        self as u8
    }

    pub const fn from_code(code: u8) -> Option<Self> {
        if (code as usize) < STATION_COUNT {
            Some(Self::ALL[code as usize])
        } else {
            None
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Station::Diaphragm => "diaphragm",
            Station::Liver => "liver",
            Station::StomachSpleenLesserOmentum => "stomach_spleen_lesser_omentum",
            Station::GreaterOmentum => "greater_omentum",
            Station::ParietalPeritoneum => "parietal_peritoneum",
            Station::Bowel => "bowel",
        }
    }

    pub const fn display_name(self) -> &'static str {
        match self {
            Station::Diaphragm => "Diaphragm",
            Station::Liver => "Liver",
            Station::StomachSpleenLesserOmentum => "Stomach, Spleen, Lesser Omentum",
            Station::GreaterOmentum => "Greater Omentum",
            Station::ParietalPeritoneum => "Parietal peritoneum",
            Station::Bowel => "Bowel",
        }
    }

    /// Organs whose nodules count toward this station.
    pub fn organs(self) -> &'static [OrganClass] {
        match self {
            Station::Diaphragm => &[OrganClass::Diaphragm],
            Station::Liver => &[OrganClass::Liver],
            Station::StomachSpleenLesserOmentum => &[
                OrganClass::Stomach,
                OrganClass::Spleen,
                OrganClass::LesserOmentum,
            ],
            Station::GreaterOmentum => &[OrganClass::GreaterOmentum],
            Station::ParietalPeritoneum => &[OrganClass::ParietalPeritoneum],
            Station::Bowel => &[OrganClass::Bowel],
        }
    }
}

/// The fixed organ to station grouping.
pub const fn station_of(organ: OrganClass) -> Station {
    match organ {
        OrganClass::Diaphragm => Station::Diaphragm,
        OrganClass::Liver => Station::Liver,
        OrganClass::Stomach | OrganClass::Spleen | OrganClass::LesserOmentum => {
            Station::StomachSpleenLesserOmentum
        }
        OrganClass::GreaterOmentum => Station::GreaterOmentum,
        OrganClass::ParietalPeritoneum => Station::ParietalPeritoneum,
        OrganClass::Bowel => Station::Bowel,
    }
}

impl fmt::Display for OrganClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for Station {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OrganClass {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| UnknownName(s.into()))
    }
}

impl FromStr for Station {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| UnknownName(s.into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn organ_codes_are_a_bijection() {
        for (i, organ) in OrganClass::ALL.iter().enumerate() {
            assert_eq!(organ.code() as usize, i);
            assert_eq!(OrganClass::from_code(i as u8), Some(*organ));
            assert_eq!(organ.label() as usize, i + 1);
        }
        assert_eq!(OrganClass::from_code(8), None);
    }

    #[test]
    fn station_codes_are_a_bijection() {
        for (i, s) in Station::ALL.iter().enumerate() {
            assert_eq!(s.code() as usize, i);
            assert_eq!(Station::from_code(i as u8), Some(*s));
        }
        assert_eq!(Station::from_code(6), None);
    }

    #[test]
    fn station_examples() {
        assert_eq!(
            station_of(OrganClass::Stomach),
            Station::StomachSpleenLesserOmentum
        );
        assert_eq!(station_of(OrganClass::Liver), Station::Liver);
        assert_eq!(station_of(OrganClass::Bowel), Station::Bowel);
    }

    #[test]
    fn preimages_match_station_groups() {
        for s in Station::ALL {
            let pre: Vec<OrganClass> = OrganClass::ALL
                .into_iter()
                .filter(|o| station_of(*o) == s)
                .collect();
            assert_eq!(pre.as_slice(), s.organs());
            assert!(!pre.is_empty(), "station_of must be surjective");
        }
    }

    #[test]
    fn names_round_trip() {
        for o in OrganClass::ALL {
            assert_eq!(o.name().parse::<OrganClass>().unwrap(), o);
        }
        for s in Station::ALL {
            assert_eq!(s.name().parse::<Station>().unwrap(), s);
        }
        assert!("pancreas".parse::<OrganClass>().is_err());
    }
}
