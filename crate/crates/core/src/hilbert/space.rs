use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One labeled tensor factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    pub label: String,
    pub dim: usize,
}

/// Ordered tensor product of labeled factors. The first factor is the slowest
/// basis index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertSpace {
    factors: Vec<Factor>,
}

impl HilbertSpace {
    pub fn new<S: Into<String>>(factors: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let factors: Vec<Factor> = factors
            .into_iter()
            .map(|(label, dim)| Factor { label: label.into(), dim })
            .collect();
        if factors.is_empty() {
            return Err(Error::Shape("a space needs at least one factor".into()));
        }
        for (i, f) in factors.iter().enumerate() {
            if f.dim == 0 {
                return Err(Error::ZeroDimension(f.label.clone()));
            }
            if factors[..i].iter().any(|g| g.label == f.label) {
                return Err(Error::DuplicateLabel(f.label.clone()));
            }
        }
        Ok(Self { factors })
    }

    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(label.into(), dim)])
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).product()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|f| f.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.factors[self.position(label)?].dim)
    }

    /// Flat basis index of a product basis state, digits in factor order.
    pub fn index_of(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.factors.len() {
            return Err(Error::DimensionMismatch { expected: self.factors.len(), actual: digits.len() });
        }
        let mut idx = 0;
        for (f, &d) in self.factors.iter().zip(digits) {
            if d >= f.dim {
                return Err(Error::DimensionMismatch { expected: f.dim, actual: d });
            }
            idx = idx * f.dim + d;
        }
        Ok(idx)
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn digits_of(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.factors.len()];
        for (slot, f) in digits.iter_mut().zip(&self.factors).rev() {
            *slot = index % f.dim;
            index /= f.dim;
        }
        digits
    }

    /// Where `sub`'s factors sit inside `self`: `(first position, left dim, right dim)`.
    ///
    /// `sub` must appear as a contiguous run of identical factors.
    pub(crate) fn locate(&self, sub: &HilbertSpace) -> Result<(usize, usize, usize)> {
        let first = &sub.factors[0];
        let start = self.position(&first.label)?;
        let end = start + sub.factors.len();
        for (k, f) in sub.factors.iter().enumerate() {
            let pos = self.position(&f.label)?;
            if pos != start + k {
                return Err(Error::Shape(format!("factor `{}` is not contiguous with `{}`", f.label, first.label)));
            }
            let here = &self.factors[pos];
            if here.dim != f.dim {
                return Err(Error::DimensionMismatch { expected: here.dim, actual: f.dim });
            }
        }
        let left = self.factors[..start].iter().map(|f| f.dim).product();
        let right = self.factors[end..].iter().map(|f| f.dim).product();
        Ok((start, left, right))
    }
}

impl fmt::Display for HilbertSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|x| format!("{}({})", x.label, x.dim)).collect();
        write!(f, "{}", parts.join(" ⊗ "))
    }
}
