use crate::error::{Error, Result};

/// `V(objects) = value` as a value label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evidence {
    pub variable: String,
    pub objects: Vec<String>,
    pub value: i64,
}

/// Replaces a template factor's weight for one head assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightOverride {
    pub factor: String,
    pub head: Vec<String>,
    pub weight: f64,
}

/// Objects per class in declaration order, plus evidence and per-head weights.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    classes: Vec<(String, Vec<String>)>,
    pub evidence: Vec<Evidence>,
    pub weights: Vec<WeightOverride>,
}

impl Dataset {
    pub fn new() -> Self {
        Dataset::default()
    }

    pub fn add_object(&mut self, class: &str, name: &str) -> Result<()> {
        let slot = match self.classes.iter().position(|(c, _)| c == class) {
            Some(i) => i,
            None => {
                self.classes.push((class.to_string(), Vec::new()));
                self.classes.len() - 1
            }
        };
        let objects = &mut self.classes[slot].1;
        if objects.iter().any(|o| o == name) {
            return Err(Error::invalid(format!("object `{name}` is declared twice in class `{class}`")));
        }
        objects.push(name.to_string());
        Ok(())
    }

    /// Builder form of [`Dataset::add_object`] for many objects.
    pub fn with_objects(mut self, class: &str, names: impl IntoIterator<Item = impl AsRef<str>>) -> Result<Self> {
        for n in names {
            self.add_object(class, n.as_ref())?;
        }
        Ok(self)
    }

    pub fn objects(&self, class: &str) -> &[String] {
        self.classes
            .iter()
            .find(|(c, _)| c == class)
            .map_or(&[], |(_, o)| o.as_slice())
    }

    pub fn classes(&self) -> &[(String, Vec<String>)] {
        &self.classes
    }
}
