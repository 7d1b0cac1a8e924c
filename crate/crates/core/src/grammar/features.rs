use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

/// Sparse feature counts, ordered by name.
pub type FeatureMap = BTreeMap<String, f64>;

/// Which feature templates fire on a derivation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureTemplates {
    /// `rule=<name>` once per rule application.
    pub rule: bool,
    /// `(<name>,<token>)` for each token the application covers.
    pub rule_token: bool,
    /// `bigram=<parent>|<child>` per tree edge.
    pub bigram: bool,
    /// `skip` once per skipped token.
    pub skip: bool,
}

impl Default for FeatureTemplates {
    fn default() -> Self {
        FeatureTemplates { rule: true, rule_token: true, bigram: true, skip: true }
    }
}

pub const SKIP_FEATURE: &str = "skip";

pub fn rule_feature(name: &str) -> String {
    format!("rule={name}")
}

pub fn rule_token_feature(name: &str, token: &str) -> String {
    format!("({name},{token})")
}

pub fn bigram_feature(parent: &str, child: &str) -> String {
    format!("bigram={parent}|{child}")
}

#[derive(Debug, Error)]
pub enum WeightsError {
    #[error("line {line}: expected `feature<TAB>value`")]
    Syntax { line: usize },
    #[error("line {line}: weight is not a finite number")]
    NotFinite { line: usize },
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Parser parameters; absent features weigh zero.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightVector {
    weights: BTreeMap<String, f64>,
}

impl WeightVector {
    pub fn new() -> WeightVector {
        WeightVector::default()
    }

    pub fn get(&self, feature: &str) -> f64 {
        self.weights.get(feature).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, feature: &str, value: f64) {
        assert!(value.is_finite(), "weight for {feature} must be finite");
        if value == 0.0 {
            self.weights.remove(feature);
        } else {
            self.weights.insert(feature.to_string(), value);
        }
    }

    /// `self += scale * features`.
    pub fn add_scaled(&mut self, features: &FeatureMap, scale: f64) {
        for (f, v) in features {
            self.set(f, self.get(f) + scale * v);
        }
    }

    /// Multiplies every weight by `factor`.
    pub fn scale(&mut self, factor: f64) {
        for v in self.weights.values_mut() {
            *v *= factor;
        }
        self.weights.retain(|_, v| *v != 0.0);
    }

    pub fn dot(&self, features: &FeatureMap) -> f64 {
        features.iter().map(|(f, v)| self.get(f) * v).sum()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.weights.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn squared_norm(&self) -> f64 {
        self.weights.values().map(|v| v * v).sum()
    }

    /// One `feature<TAB>value` line per nonzero weight, sorted by feature.
    pub fn to_text(&self) -> String {
        self.weights.iter().map(|(k, v)| format!("{k}\t{v}\n")).collect()
    }

    pub fn from_text(text: &str) -> Result<WeightVector, WeightsError> {
        let mut w = WeightVector::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line.rsplit_once('\t').ok_or(WeightsError::Syntax { line: i + 1 })?;
            let v: f64 = v.trim().parse().map_err(|_| WeightsError::Syntax { line: i + 1 })?;
            if !v.is_finite() {
                return Err(WeightsError::NotFinite { line: i + 1 });
            }
            w.set(k, v);
        }
        Ok(w)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<WeightVector, WeightsError> {
        let p = path.as_ref();
        let text = std::fs::read_to_string(p).map_err(|source| WeightsError::Io {
            path: p.display().to_string(),
            source,
        })?;
        WeightVector::from_text(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), WeightsError> {
        let p = path.as_ref();
        std::fs::write(p, self.to_text()).map_err(|source| WeightsError::Io {
            path: p.display().to_string(),
            source,
        })
    }
}

impl FromIterator<(String, f64)> for WeightVector {
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        let mut w = WeightVector::new();
        for (k, v) in iter {
            w.set(&k, v);
        }
        w
    }
}
