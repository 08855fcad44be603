use std::collections::HashMap;
use std::path::Path;

use super::PipelineError;

pub const FEATURE_DIM: usize = 128;

/// A 128-dimensional image descriptor with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Box<[f64; FEATURE_DIM]>);

impl FeatureVector {
    pub fn new(values: [f64; FEATURE_DIM]) -> Result<Self, PipelineError> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(PipelineError::NonFiniteFeature(i));
        }
        Ok(Self(Box::new(values)))
    }

    pub fn from_slice(values: &[f64]) -> Result<Self, PipelineError> {
        let arr: [f64; FEATURE_DIM] = values
            .try_into()
            .map_err(|_| PipelineError::FeatureLength(values.len()))?;
        Self::new(arr)
    }

    pub fn zeros() -> Self {
        Self(Box::new([0.0; FEATURE_DIM]))
    }

    pub fn values(&self) -> &[f64; FEATURE_DIM] {
        &self.0
    }

    pub fn dot(&self, row: &[f64]) -> f64 {
        self.0.iter().zip(row).map(|(a, b)| a * b).sum()
    }
}

impl std::ops::Neg for &FeatureVector {
    type Output = FeatureVector;

    fn neg(self) -> FeatureVector {
        FeatureVector(Box::new(self.0.map(|v| -v)))
    }
}

/// Externally computed features keyed by image id.
///
/// Text format, one image per line: `image_id,v1,...,v128`. Blank lines and
/// lines starting with `#` are ignored.
#[derive(Debug, Clone, Default)]
pub struct FeatureTable {
    entries: HashMap<String, FeatureVector>,
}

impl FeatureTable {
    pub fn parse(text: &str) -> Result<Self, PipelineError> {
        let mut entries = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| PipelineError::FeatureFile {
                line: lineno + 1,
                message: msg.to_string(),
            };
            let mut fields = line.split(',');
            let id = fields.next().map(str::trim).filter(|s| !s.is_empty());
            let id = id.ok_or_else(|| bad("missing image id"))?;
            let values = fields
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| bad(&e.to_string()))?;
            let fv = FeatureVector::from_slice(&values).map_err(|e| bad(&e.to_string()))?;
            entries.insert(id.to_string(), fv);
        }
        Ok(Self { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn insert(&mut self, id: impl Into<String>, features: FeatureVector) {
        self.entries.insert(id.into(), features);
    }

    pub fn get(&self, id: &str) -> Option<&FeatureVector> {
        self.entries.get(id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Serializes in the same line format, sorted by id.
    pub fn to_text(&self) -> String {
        let mut ids: Vec<&String> = self.entries.keys().collect();
        ids.sort();
        let mut out = String::new();
        for id in ids {
            out.push_str(id);
            for v in self.entries[id].values() {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}
