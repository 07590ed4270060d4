//! Named basis families, selectable from a field description.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::carlitz::carlitz_family_on;
use crate::charzero::DigitBinomialSeeds;
use crate::digit::{BasisFamily, Mode};
use crate::error::{Error, Result};
use crate::hyperdiff::hyperdiff_family_on;
use crate::local::{Kind, LocalField, Repr};
use crate::lubin_tate::{lubin_tate_family, LubinTateGroup};
use crate::tate::baker_family;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Carlitz,
    CarlitzAtPi,
    Hyperdiff,
    HyperdiffAtPi,
    DigitBinomial,
    LubinTate,
    Baker,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 7] = [
        FamilyKind::Carlitz,
        FamilyKind::CarlitzAtPi,
        FamilyKind::Hyperdiff,
        FamilyKind::HyperdiffAtPi,
        FamilyKind::DigitBinomial,
        FamilyKind::LubinTate,
        FamilyKind::Baker,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Carlitz => "carlitz",
            FamilyKind::CarlitzAtPi => "carlitz-at-pi",
            FamilyKind::Hyperdiff => "hyperdiff",
            FamilyKind::HyperdiffAtPi => "hyperdiff-at-pi",
            FamilyKind::DigitBinomial => "digit-binomial",
            FamilyKind::LubinTate => "lubin-tate",
            FamilyKind::Baker => "baker",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<FamilyKind> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown family {s:?}")))
    }
}

/// Extra data for the Lubin-Tate family.
#[derive(Clone, Debug, Default)]
pub struct LubinTateOptions {
    /// Coefficients of the Frobenius series, `X^q + pi X` when absent.
    pub frobenius: Option<Vec<Repr>>,
    /// Truncation degree, `q^level` when absent.
    pub degree: Option<usize>,
}

/// Builds `kind` on `field`, checking that the setting fits.
pub fn build_family(
    kind: FamilyKind,
    field: Arc<LocalField>,
    level: u32,
    lt: &LubinTateOptions,
) -> Result<BasisFamily> {
    let expect = |want: Kind| {
        if field.kind() == want {
            Ok(())
        } else {
            Err(Error::invalid(format!("family {kind} does not live on this field")))
        }
    };
    match kind {
        FamilyKind::Carlitz => {
            expect(Kind::Laurent)?;
            carlitz_family_on(field)
        }
        FamilyKind::CarlitzAtPi => {
            expect(Kind::AtPi)?;
            carlitz_family_on(field)
        }
        FamilyKind::Hyperdiff => {
            expect(Kind::Laurent)?;
            hyperdiff_family_on(field)
        }
        FamilyKind::HyperdiffAtPi => {
            expect(Kind::AtPi)?;
            hyperdiff_family_on(field)
        }
        FamilyKind::DigitBinomial => {
            expect(Kind::Padic)?;
            let p = field.characteristic() as u64;
            Ok(BasisFamily::new(field, p, 1, Mode::General, "digit-binomial", Arc::new(DigitBinomialSeeds)))
        }
        FamilyKind::LubinTate => {
            let degree = lt.degree.unwrap_or_else(|| (field.q() as usize).pow(level.max(1)));
            let group = match &lt.frobenius {
                Some(f) => LubinTateGroup::new(field, f.clone(), degree)?,
                None => LubinTateGroup::standard(field, degree)?,
            };
            Ok(lubin_tate_family(Arc::new(group)))
        }
        FamilyKind::Baker => Ok(baker_family(field)),
    }
}
