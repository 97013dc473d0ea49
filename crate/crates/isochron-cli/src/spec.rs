use std::fmt;

use isochron::poly::{parse_rational, GaussianRational, Ring};
use isochron::HomogeneousHamiltonianSystem;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

/// A coefficient component: a JSON number or a rational string such as `"-3/7"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Num(f64),
    Text(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    #[default]
    Float,
    Exact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub n: usize,
    pub a: Vec<[Entry; 2]>,
    #[serde(default)]
    pub field: Field,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ParseError {}

impl Entry {
    fn exact(&self, at: &str) -> Result<BigRational, ParseError> {
        match self {
            Entry::Text(s) => parse_rational(s).ok_or_else(|| ParseError(format!("{at}: \"{s}\" is not a rational p/q"))),
            Entry::Num(v) => {
                BigRational::from_float(*v).ok_or_else(|| ParseError(format!("{at}: {v} is not finite")))
            }
        }
    }

    fn float(&self, at: &str) -> Result<f64, ParseError> {
        match self {
            Entry::Num(v) => Ok(*v),
            Entry::Text(s) => match s.trim().parse::<f64>() {
                Ok(v) => Ok(v),
                Err(_) => Ok(GaussianRational::new(self.exact(at)?, BigRational::from_integer(num_bigint::BigInt::from(0))).to_complex().re),
            },
        }
    }
}

impl SystemSpec {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let spec: SystemSpec = serde_json::from_str(text)
            .map_err(|e| ParseError(format!("line {} column {}: {e}", e.line(), e.column())))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ParseError> {
        if self.n < 2 {
            return Err(ParseError(format!("n: expected at least 2, got {}", self.n)));
        }
        if self.a.len() != self.n + 2 {
            return Err(ParseError(format!("a: expected n + 2 = {} entries, got {}", self.n + 2, self.a.len())));
        }
        for (j, pair) in self.a.iter().enumerate() {
            for (k, e) in pair.iter().enumerate() {
                let at = format!("a[{j}][{k}]");
                match self.field {
                    Field::Exact => drop(e.exact(&at)?),
                    Field::Float => {
                        let v = e.float(&at)?;
                        if !v.is_finite() {
                            return Err(ParseError(format!("{at}: {v} is not finite")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The system in the requested field; `field` overrides the one recorded in the spec.
    pub fn system(&self, field: Option<Field>) -> Result<HomogeneousHamiltonianSystem, ParseError> {
        let field = field.unwrap_or(self.field);
        let built = match field {
            Field::Exact => {
                let mut a = Vec::with_capacity(self.a.len());
                for (j, [re, im]) in self.a.iter().enumerate() {
                    a.push(GaussianRational::new(re.exact(&format!("a[{j}][0]"))?, im.exact(&format!("a[{j}][1]"))?));
                }
                HomogeneousHamiltonianSystem::from_exact(self.n, a)
            }
            Field::Float => {
                let mut a = Vec::with_capacity(self.a.len());
                for (j, [re, im]) in self.a.iter().enumerate() {
                    a.push(Complex64::new(re.float(&format!("a[{j}][0]"))?, im.float(&format!("a[{j}][1]"))?));
                }
                HomogeneousHamiltonianSystem::new(self.n, a)
            }
        };
        built.map_err(|e| ParseError(e.to_string()))
    }
}
