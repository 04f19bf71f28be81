use crate::error::{Error, Result};

/// Ordered factor dimensions of a composite Hilbert space.
///
/// Factor 0 is the leftmost tensor factor; for preparation scenarios this is
/// always the preparator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceShape {
    factor_dims: Vec<usize>,
}

impl SpaceShape {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() {
            return Err(Error::InvalidArgument(
                "a space needs at least one factor".into(),
            ));
        }
        if let Some(pos) = factor_dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidArgument(format!(
                "factor {pos} has dimension 0"
            )));
        }
        Ok(Self { factor_dims })
    }

    /// Single-factor space of the given dimension.
    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn bipartite(d1: usize, d2: usize) -> Result<Self> {
        Self::new(vec![d1, d2])
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn num_factors(&self) -> usize {
        self.factor_dims.len()
    }

    pub fn factor_dim(&self, index: usize) -> usize {
        self.factor_dims[index]
    }

    pub fn total_dim(&self) -> usize {
        self.factor_dims.iter().product()
    }

    pub fn concat(&self, other: &SpaceShape) -> SpaceShape {
        let mut dims = self.factor_dims.clone();
        dims.extend_from_slice(&other.factor_dims);
        SpaceShape { factor_dims: dims }
    }

    /// Shape of the factors listed in `factors` (strictly increasing indices).
    pub fn subshape(&self, factors: &[usize]) -> Result<SpaceShape> {
        self.check_factor_set(factors)?;
        Ok(SpaceShape {
            factor_dims: factors.iter().map(|&i| self.factor_dims[i]).collect(),
        })
    }

    pub(crate) fn check_factor_set(&self, factors: &[usize]) -> Result<()> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("empty factor set".into()));
        }
        if factors.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "factor indices {factors:?} must be strictly increasing"
            )));
        }
        if let Some(&bad) = factors.iter().find(|&&i| i >= self.num_factors()) {
            return Err(Error::InvalidArgument(format!(
                "factor index {bad} out of range for {} factors",
                self.num_factors()
            )));
        }
        Ok(())
    }

    pub(crate) fn expect(&self, other: &SpaceShape) -> Result<()> {
        if self != other {
            return Err(Error::ShapeMismatch {
                expected: self.factor_dims.clone(),
                actual: other.factor_dims.clone(),
            });
        }
        Ok(())
    }

    /// Row-major strides: factor 0 is the most significant digit.
    pub(crate) fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.num_factors()];
        for k in (0..self.num_factors().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.factor_dims[k + 1];
        }
        strides
    }

    /// For each multi-index over `factors`, the flat offset it contributes
    /// to a full-space index.
    pub(crate) fn offsets(&self, factors: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offsets = vec![0usize];
        for &f in factors {
            let mut next = Vec::with_capacity(offsets.len() * self.factor_dims[f]);
            for &o in &offsets {
                for digit in 0..self.factor_dims[f] {
                    next.push(o + digit * strides[f]);
                }
            }
            offsets = next;
        }
        offsets
    }

    /// Factor indices not in `factors`.
    pub(crate) fn complement(&self, factors: &[usize]) -> Vec<usize> {
        (0..self.num_factors())
            .filter(|i| !factors.contains(i))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_and_empty() {
        assert!(SpaceShape::new(vec![]).is_err());
        assert!(SpaceShape::new(vec![2, 0]).is_err());
    }

    #[test]
    fn offsets_enumerate_the_full_space() {
        let s = SpaceShape::new(vec![2, 3, 2]).unwrap();
        let keep = s.offsets(&[0, 2]);
        let rest = s.offsets(&[1]);
        let mut all: Vec<usize> = keep
            .iter()
            .flat_map(|k| rest.iter().map(move |r| k + r))
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..12).collect::<Vec<_>>());
        assert_eq!(s.strides(), vec![6, 2, 1]);
    }

    #[test]
    fn subshape_requires_sorted_indices() {
        let s = SpaceShape::new(vec![2, 3, 4]).unwrap();
        assert_eq!(s.subshape(&[0, 2]).unwrap().factor_dims(), &[2, 4]);
        assert!(s.subshape(&[2, 0]).is_err());
        assert!(s.subshape(&[3]).is_err());
    }
}
