use std::collections::HashMap;
use std::path::Path;

use super::vector::MechanismVector;
use super::CorpusError;

const CANONICAL: &str = include_str!("../../data/mechanisms.txt");

/// Lookup key used to match feature names: lowercase ASCII alphanumerics
/// only, so `"Dice Rolling"` and `"dice-rolling"` resolve to the same
/// feature.
pub fn feature_key(name: &str) -> String {
    name.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feature {
    pub index: usize,
    pub name: String,
}

/// Ordered list of named binary features. Order defines bit indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureRegistry {
    features: Vec<Feature>,
    lookup: HashMap<String, usize>,
}

impl FeatureRegistry {
    pub fn new<I, S>(names: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut features = Vec::new();
        let mut lookup = HashMap::new();
        for (index, name) in names.into_iter().enumerate() {
            let name: String = name.into();
            let name = name.trim().to_string();
            let key = feature_key(&name);
            if key.is_empty() {
                return Err(CorpusError::Parse {
                    line: index + 1,
                    message: format!("feature name {name:?} has no alphanumeric characters"),
                });
            }
            if lookup.insert(key, index).is_some() {
                return Err(CorpusError::DuplicateFeature(name));
            }
            features.push(Feature { index, name });
        }
        if features.is_empty() {
            return Err(CorpusError::EmptyRegistry);
        }
        Ok(Self { features, lookup })
    }

    /// The 51 BoardGameGeek mechanisms (2017 typology).
    pub fn canonical() -> Self {
        Self::parse(CANONICAL).expect("bundled registry is valid")
    }

    /// Parses either a JSON array of strings or one name per line. Blank
    /// lines and `#` comments are skipped in the line format.
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let trimmed = text.trim_start_matches('\u{feff}').trim_start();
        if trimmed.starts_with('[') {
            let names: Vec<String> = serde_json::from_str(trimmed)
                .map_err(|e| CorpusError::Parse { line: e.line(), message: e.to_string() })?;
            return Self::new(names);
        }
        let mut names = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.contains(';') || line.contains('\t') || line.chars().any(char::is_control) {
                return Err(CorpusError::Parse {
                    line: i + 1,
                    message: format!("invalid character in feature name {line:?}"),
                });
            }
            if feature_key(line).is_empty() {
                return Err(CorpusError::Parse {
                    line: i + 1,
                    message: format!("feature name {line:?} has no alphanumeric characters"),
                });
            }
            names.push(line.to_string());
        }
        Self::new(names)
    }

    pub fn dimension(&self) -> usize {
        self.features.len()
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.features.get(index).map(|f| f.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.lookup.get(&feature_key(name)).copied()
    }

    /// Encodes a list of feature names. Returns the first unknown name on
    /// failure.
    pub fn encode<'a, I>(&self, names: I) -> Result<MechanismVector, &'a str>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut v = MechanismVector::zeros(self.dimension());
        for name in names {
            let j = self.index_of(name).ok_or(name)?;
            v.set(j, true);
        }
        Ok(v)
    }

    pub fn decode(&self, v: &MechanismVector) -> Vec<&str> {
        v.ones().map(|j| self.features[j].name.as_str()).collect()
    }

    /// One name per line, in index order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for f in &self.features {
            s.push_str(&f.name);
            s.push('\n');
        }
        s
    }
}

pub fn load_registry(path: impl AsRef<Path>) -> Result<FeatureRegistry, CorpusError> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.display().to_string(), source })?;
    FeatureRegistry::parse(&text)
}
