use std::fmt;
use std::str::FromStr;

/// Exchange statistics of a two-particle state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistics {
    Boson,
    Fermion,
    Distinguishable,
}

impl Statistics {
    pub const ALL: [Statistics; 3] = [Self::Boson, Self::Fermion, Self::Distinguishable];

    /// +1 for bosons, -1 for fermions, `None` for distinguishable particles.
    pub fn exchange_sign(self) -> Option<f64> {
        match self {
            Self::Boson => Some(1.0),
            Self::Fermion => Some(-1.0),
            Self::Distinguishable => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Boson => "boson",
            Self::Fermion => "fermion",
            Self::Distinguishable => "distinguishable",
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "boson" => Ok(Self::Boson),
            "fermion" => Ok(Self::Fermion),
            "distinguishable" => Ok(Self::Distinguishable),
            other => Err(format!(
                "unknown statistics `{other}` (expected boson, fermion or distinguishable)"
            )),
        }
    }
}
