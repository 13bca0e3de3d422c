//! The JSON family description read by every command.

use std::path::Path;
use std::sync::Arc;

use fsing_core::relative::{relative_test_seed, ChainMode, FamilySpec, Multiplier};
use fsing_core::absolute::test_element_hypersurface;
use fsing_core::{CartierMap, Field, Ideal, PolyRing, RootMode};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Base {
    Present,
    Absent,
}

impl Serialize for Base {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            Base::Present => "present",
            Base::Absent => "absent",
        })
    }
}

impl<'de> Deserialize<'de> for Base {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Flag(bool),
            Word(String),
        }
        match Repr::deserialize(d)? {
            Repr::Flag(true) => Ok(Base::Present),
            Repr::Flag(false) => Ok(Base::Absent),
            Repr::Word(w) => match w.as_str() {
                "present" => Ok(Base::Present),
                "absent" => Ok(Base::Absent),
                other => Err(serde::de::Error::custom(format!(
                    "base must be \"present\" or \"absent\", got {other:?}"
                ))),
            },
        }
    }
}

/// `"canonical"`, or `{ "e": 1, "u": "x^9+t" }` where `u` may itself be
/// `"canonical"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapField {
    Word(String),
    Explicit {
        #[serde(default = "one", skip_serializing_if = "Option::is_none")]
        e: Option<u32>,
        u: String,
    },
}

fn one() -> Option<u32> {
    Some(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedField {
    /// Only `"jacobian"` is accepted.
    Word(String),
    List(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension_degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimal_polynomial: Option<Vec<u64>>,
    pub variables: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Base>,
    #[serde(default)]
    pub relations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<SeedField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
}

fn mentions_t(src: &str) -> bool {
    src.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).any(|w| w == "t")
}

impl SpecFile {
    pub fn from_json(src: &str) -> Result<Self, CliError> {
        let raw: SpecFile = serde_json::from_str(src).map_err(CliError::Json)?;
        raw.normalized()
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let src = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        Self::from_json(&src)
    }

    /// Pretty JSON with every defaulted field written out.
    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Fill defaults in place: degree 1, map `{e: 1, u: "canonical"}`, and a
    /// base exactly when some relation or the multiplier mentions `t`.
    pub fn normalized(mut self) -> Result<Self, CliError> {
        self.extension_degree.get_or_insert(1);
        let (e, u) = match self.map.take() {
            None => (1, "canonical".to_string()),
            Some(MapField::Word(w)) if w == "canonical" => (1, w),
            Some(MapField::Word(w)) => {
                return Err(CliError::Spec(format!("map must be \"canonical\" or an object, got {w:?}")));
            }
            Some(MapField::Explicit { e, u }) => (e.unwrap_or(1), u),
        };
        if e == 0 {
            return Err(CliError::Spec("map.e must be positive".into()));
        }
        if self.base.is_none() {
            let uses_t = !self.variables.iter().any(|v| v == "t")
                && (self.relations.iter().any(|r| mentions_t(r)) || mentions_t(&u));
            self.base = Some(if uses_t { Base::Present } else { Base::Absent });
        }
        if let Some(SeedField::Word(w)) = &self.seed {
            if w != "jacobian" {
                return Err(CliError::Spec(format!("seed must be \"jacobian\" or a list, got {w:?}")));
            }
        }
        self.map = Some(MapField::Explicit { e: Some(e), u });
        Ok(self)
    }

    fn e(&self) -> u32 {
        match &self.map {
            Some(MapField::Explicit { e: Some(e), .. }) => *e,
            _ => 1,
        }
    }

    fn u(&self) -> &str {
        match &self.map {
            Some(MapField::Explicit { u, .. }) | Some(MapField::Word(u)) => u,
            None => "canonical",
        }
    }

    pub fn has_base(&self) -> bool {
        self.base == Some(Base::Present)
    }

    /// Build the rings and maps, running every well-definedness check.
    pub fn build(&self, opts: &BuildOptions) -> Result<Problem, CliError> {
        let field = Field::new(self.p, self.extension_degree.unwrap_or(1), self.minimal_polynomial.as_deref())?;
        let e = self.e();
        let n_max = opts.n_max.or(self.n_max).unwrap_or(fsing_core::relative::DEFAULT_N_MAX);
        let depth = if self.has_base() {
            Some(opts.depth.or(self.depth).unwrap_or(e * n_max))
        } else {
            None
        };
        let ring = PolyRing::new(field, self.variables.clone(), depth)?;
        let rel_refs: Vec<&str> = self.relations.iter().map(String::as_str).collect();
        let relations = Ideal::parse(ring.clone(), &rel_refs)?;
        let multiplier = match self.u() {
            "canonical" => Multiplier::Canonical,
            u => Multiplier::Explicit(ring.parse(u)?),
        };
        let seed_src = opts.seed.clone().or_else(|| match &self.seed {
            Some(SeedField::List(gens)) => Some(SeedChoice::List(gens.clone())),
            Some(SeedField::Word(_)) => Some(SeedChoice::Jacobian),
            None => None,
        });
        let seed = match seed_src {
            Some(SeedChoice::List(gens)) => {
                let refs: Vec<&str> = gens.iter().map(String::as_str).collect();
                Some(Ideal::parse(ring.clone(), &refs)?)
            }
            _ => None,
        };
        let problem = Problem {
            ring,
            relations,
            e,
            multiplier,
            seed,
            power: opts.power,
            n_max,
        };
        if self.has_base() {
            problem.family(ChainMode::Sigma)?;
        } else {
            problem.absolute_map()?;
        }
        Ok(problem)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedChoice {
    Jacobian,
    List(Vec<String>),
}

impl SeedChoice {
    /// `jacobian` or `g1;g2;...`.
    pub fn parse(src: &str) -> Self {
        if src.trim() == "jacobian" {
            SeedChoice::Jacobian
        } else {
            SeedChoice::List(src.split(';').map(|g| g.trim().to_string()).filter(|g| !g.is_empty()).collect())
        }
    }
}

/// Command-line overrides of the spec file.
#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub n_max: Option<u32>,
    pub depth: Option<u32>,
    pub seed: Option<SeedChoice>,
    pub power: u32,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            n_max: None,
            depth: None,
            seed: None,
            power: 1,
        }
    }
}

/// A validated spec.
#[derive(Clone, Debug)]
pub struct Problem {
    pub ring: Arc<PolyRing>,
    pub relations: Ideal,
    pub e: u32,
    pub multiplier: Multiplier,
    /// An explicit seed; `None` means the Jacobian seed.
    pub seed: Option<Ideal>,
    pub power: u32,
    pub n_max: u32,
}

impl Problem {
    pub fn family(&self, mode: ChainMode) -> Result<FamilySpec, CliError> {
        Ok(FamilySpec::new(&self.relations, self.e, self.multiplier.clone(), self.seed.clone(), mode)?)
    }

    /// The family with its seed resolved, so `--power` applies.
    pub fn seeded_family(&self, mode: ChainMode) -> Result<FamilySpec, CliError> {
        let family = self.family(mode)?;
        if self.seed.is_some() || !mode.is_tau() {
            return Ok(family);
        }
        let seed = relative_test_seed(&family, self.power)?;
        Ok(FamilySpec::new(&self.relations, self.e, self.multiplier.clone(), Some(seed), mode)?)
    }

    pub fn absolute_map(&self) -> Result<CartierMap, CliError> {
        Ok(match &self.multiplier {
            Multiplier::Canonical => CartierMap::canonical(&self.relations, self.e, RootMode::Absolute)?,
            Multiplier::Explicit(u) => CartierMap::new(&self.relations, self.e, u.clone(), RootMode::Absolute)?,
        })
    }

    /// Seed for absolute τ: the explicit one or the Jacobian ideal.
    pub fn absolute_seed(&self) -> Result<Ideal, CliError> {
        if let Some(s) = &self.seed {
            return Ok(s.sum(&self.relations)?);
        }
        let jac = test_element_hypersurface(&self.relations)?;
        if self.power == 1 {
            return Ok(jac);
        }
        Ok(jac.power(self.power).sum(&self.relations)?)
    }
}
