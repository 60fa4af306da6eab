use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Complex64, Error, Result};

/// One factor of a quadratic monomial: `u_j` or `conj(u_j)` (0-based `j`).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factor {
    pub component: usize,
    pub conjugate: bool,
}

impl Factor {
    pub fn plain(component: usize) -> Self {
        Factor { component, conjugate: false }
    }

    pub fn conj(component: usize) -> Self {
        Factor { component, conjugate: true }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conjugate {
            write!(f, "conj(u{})", self.component + 1)
        } else {
            write!(f, "u{}", self.component + 1)
        }
    }
}

impl FromStr for Factor {
    type Err = Error;

    /// Parses `u3` or `conj(u3)` (1-based index).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (inner, conjugate) = match s.strip_prefix("conj(").and_then(|r| r.strip_suffix(')')) {
            Some(inner) => (inner.trim(), true),
            None => (s, false),
        };
        let index: usize = inner
            .strip_prefix('u')
            .and_then(|d| d.parse().ok())
            .filter(|&i| i >= 1)
            .ok_or_else(|| Error::InvalidSystem(format!("bad factor '{s}'")))?;
        Ok(Factor { component: index - 1, conjugate })
    }
}

/// `coefficient · a · b` with `a`, `b` factors.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coefficient: Complex64,
    pub factors: [Factor; 2],
}

impl Monomial {
    pub fn new(coefficient: Complex64, a: Factor, b: Factor) -> Self {
        Monomial { coefficient, factors: [a, b] }
    }
}

/// `K` Klein-Gordon components with masses `m_i` and quadratic right-hand sides `N_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct MassSystem {
    masses: Vec<f64>,
    polynomials: Vec<Vec<Monomial>>,
}

impl MassSystem {
    pub fn new(masses: Vec<f64>, polynomials: Vec<Vec<Monomial>>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::InvalidSystem("no components".into()));
        }
        if let Some(&m) = masses.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::NonPositiveMass(m));
        }
        if polynomials.len() != masses.len() {
            return Err(Error::InvalidSystem(format!(
                "{} polynomials for {} components",
                polynomials.len(),
                masses.len()
            )));
        }
        for mono in polynomials.iter().flatten() {
            if !mono.coefficient.is_finite() {
                return Err(Error::NonFinite("monomial coefficient"));
            }
            for f in mono.factors {
                if f.component >= masses.len() {
                    return Err(Error::InvalidSystem(format!("factor {f} beyond K = {}", masses.len())));
                }
            }
        }
        Ok(MassSystem { masses, polynomials })
    }

    /// Linear system: every `N_i = 0`.
    pub fn free(masses: Vec<f64>) -> Result<Self> {
        let k = masses.len();
        MassSystem::new(masses, vec![Vec::new(); k])
    }

    /// Scalar equation `(□ + m²)u = c·u²`.
    pub fn scalar_square(mass: f64, coefficient: f64) -> Result<Self> {
        let mono = Monomial::new(Complex64::new(coefficient, 0.0), Factor::plain(0), Factor::plain(0));
        MassSystem::new(vec![mass], vec![vec![mono]])
    }

    pub fn components(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.masses[i]
    }

    pub fn polynomials(&self) -> &[Vec<Monomial>] {
        &self.polynomials
    }

    /// True when every polynomial vanishes identically.
    pub fn is_free(&self) -> bool {
        self.polynomials.iter().flatten().all(|m| m.coefficient == Complex64::new(0.0, 0.0))
    }

    /// True when all coefficients are real and no factor is conjugated, so
    /// real data stays real.
    pub fn preserves_reality(&self) -> bool {
        self.polynomials
            .iter()
            .flatten()
            .all(|m| m.coefficient.im == 0.0 && m.factors.iter().all(|f| !f.conjugate))
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: SystemFile = toml::from_str(text).map_err(|e| Error::InvalidSystem(e.to_string()))?;
        file.try_into()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&SystemFile::from(self)).expect("system serializes")
    }
}

/// On-disk layout.
///
/// ```toml
/// masses = [1.0, 1.5]
///
/// [[monomials]]
/// component = 1
/// coefficient = [1.0, 0.0]
/// factors = ["u1", "conj(u2)"]
/// ```
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    components: Option<usize>,
    masses: Vec<f64>,
    #[serde(default)]
    monomials: Vec<MonomialEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MonomialEntry {
    component: usize,
    coefficient: Coefficient,
    factors: [String; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Coefficient {
    Real(f64),
    Complex([f64; 2]),
}

impl TryFrom<SystemFile> for MassSystem {
    type Error = Error;

    fn try_from(file: SystemFile) -> Result<Self> {
        let k = file.masses.len();
        if let Some(c) = file.components {
            if c != k {
                return Err(Error::InvalidSystem(format!("components = {c} but {k} masses")));
            }
        }
        let mut polynomials = vec![Vec::new(); k];
        for entry in file.monomials {
            if entry.component == 0 || entry.component > k {
                return Err(Error::InvalidSystem(format!("component {} outside 1..={k}", entry.component)));
            }
            let coefficient = match entry.coefficient {
                Coefficient::Real(re) => Complex64::new(re, 0.0),
                Coefficient::Complex([re, im]) => Complex64::new(re, im),
            };
            let a = entry.factors[0].parse()?;
            let b = entry.factors[1].parse()?;
            polynomials[entry.component - 1].push(Monomial::new(coefficient, a, b));
        }
        MassSystem::new(file.masses, polynomials)
    }
}

impl From<&MassSystem> for SystemFile {
    fn from(sys: &MassSystem) -> Self {
        let monomials = sys
            .polynomials
            .iter()
            .enumerate()
            .flat_map(|(i, poly)| {
                poly.iter().map(move |m| MonomialEntry {
                    component: i + 1,
                    coefficient: Coefficient::Complex([m.coefficient.re, m.coefficient.im]),
                    factors: [m.factors[0].to_string(), m.factors[1].to_string()],
                })
            })
            .collect();
        SystemFile { components: Some(sys.components()), masses: sys.masses.clone(), monomials }
    }
}
