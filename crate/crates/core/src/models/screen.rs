use std::ops::Range;

use crate::algebra::linalg::{self, Matrix};
use crate::algebra::{Ket, Projector, SpaceShape, SpectralObservable, Tensor, Unitary};
use crate::error::{Error, Result};
use crate::scalar::{cr, Real};

/// Block structure of a screen broken into non-overlapping segments and of
/// the matching particle events.
///
/// Screen space: one block per segment followed by the "not yet hit" block.
/// Particle space: one block per segment ("hit segment n") followed by the
/// "not yet reached" block. Unhit blocks may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SegmentedScreen {
    segment_dims: Vec<usize>,
    unhit_dim: usize,
    hole_index: usize,
    particle_segment_dims: Vec<usize>,
    particle_unhit_dim: usize,
}

impl SegmentedScreen {
    pub fn new(
        segment_dims: Vec<usize>,
        unhit_dim: usize,
        hole_index: usize,
        particle_segment_dims: Vec<usize>,
        particle_unhit_dim: usize,
    ) -> Result<Self> {
        if segment_dims.is_empty() {
            return Err(Error::Construction("screen needs at least one segment".into()));
        }
        if particle_segment_dims.len() != segment_dims.len() {
            return Err(Error::Construction(format!(
                "{} screen segments but {} particle segments",
                segment_dims.len(),
                particle_segment_dims.len()
            )));
        }
        if segment_dims.contains(&0) || particle_segment_dims.contains(&0) {
            return Err(Error::Construction("segment dimensions must be positive".into()));
        }
        if hole_index >= segment_dims.len() {
            return Err(Error::Construction(format!(
                "hole index {hole_index} out of range for {} segments",
                segment_dims.len()
            )));
        }
        Ok(Self {
            segment_dims,
            unhit_dim,
            hole_index,
            particle_segment_dims,
            particle_unhit_dim,
        })
    }

    /// `n` segments of dimension 1 on both sides, one-dimensional unhit blocks.
    pub fn uniform(n: usize, hole_index: usize) -> Result<Self> {
        Self::new(vec![1; n], 1, hole_index, vec![1; n], 1)
    }

    pub fn num_segments(&self) -> usize {
        self.segment_dims.len()
    }

    pub fn hole_index(&self) -> usize {
        self.hole_index
    }

    pub fn segment_dims(&self) -> &[usize] {
        &self.segment_dims
    }

    pub fn unhit_dim(&self) -> usize {
        self.unhit_dim
    }

    pub fn particle_segment_dims(&self) -> &[usize] {
        &self.particle_segment_dims
    }

    pub fn particle_unhit_dim(&self) -> usize {
        self.particle_unhit_dim
    }

    pub fn screen_dim(&self) -> usize {
        self.segment_dims.iter().sum::<usize>() + self.unhit_dim
    }

    pub fn particle_dim(&self) -> usize {
        self.particle_segment_dims.iter().sum::<usize>() + self.particle_unhit_dim
    }

    pub fn screen_shape(&self) -> SpaceShape {
        SpaceShape::single(self.screen_dim()).expect("positive dimension")
    }

    pub fn particle_shape(&self) -> SpaceShape {
        SpaceShape::single(self.particle_dim()).expect("positive dimension")
    }

    pub fn composite_shape(&self) -> SpaceShape {
        SpaceShape::bipartite(self.screen_dim(), self.particle_dim()).expect("positive dimensions")
    }

    fn block_range(dims: &[usize], index: usize) -> Range<usize> {
        let start: usize = dims[..index].iter().sum();
        start..start + dims[index]
    }

    pub fn segment_range(&self, n: usize) -> Range<usize> {
        Self::block_range(&self.segment_dims, n)
    }

    pub fn unhit_range(&self) -> Range<usize> {
        let start = self.screen_dim() - self.unhit_dim;
        start..self.screen_dim()
    }

    pub fn particle_segment_range(&self, n: usize) -> Range<usize> {
        Self::block_range(&self.particle_segment_dims, n)
    }

    pub fn particle_unhit_range(&self) -> Range<usize> {
        let start = self.particle_dim() - self.particle_unhit_dim;
        start..self.particle_dim()
    }

    /// P₁⁽ⁿ⁾
    pub fn segment_projector<T: Real>(&self, n: usize) -> Projector<T> {
        Projector::from_index_range(self.screen_shape(), self.segment_range(n)).expect("range within screen")
    }

    /// P₁^⊥
    pub fn unhit_projector<T: Real>(&self) -> Projector<T> {
        Projector::from_index_range(self.screen_shape(), self.unhit_range()).expect("range within screen")
    }

    /// Q₂⁽ⁿ⁾
    pub fn particle_segment_projector<T: Real>(&self, n: usize) -> Projector<T> {
        Projector::from_index_range(self.particle_shape(), self.particle_segment_range(n))
            .expect("range within particle space")
    }

    /// Q₂^⊥
    pub fn particle_unhit_projector<T: Real>(&self) -> Projector<T> {
        Projector::from_index_range(self.particle_shape(), self.particle_unhit_range())
            .expect("range within particle space")
    }

    pub fn hole_projector<T: Real>(&self) -> Projector<T> {
        self.segment_projector(self.hole_index)
    }

    pub fn particle_hole_projector<T: Real>(&self) -> Projector<T> {
        self.particle_segment_projector(self.hole_index)
    }

    /// Σₙ aₙ P₁⁽ⁿ⁾ + a^⊥ P₁^⊥ with aₙ = n (1-based) and a^⊥ = 0. The unhit
    /// branch is omitted when its block is empty.
    pub fn observable<T: Real>(&self) -> SpectralObservable<T> {
        let mut branches: Vec<(T, Projector<T>)> = (0..self.num_segments())
            .map(|n| (T::from_usize(n + 1).unwrap(), self.segment_projector(n)))
            .collect();
        if self.unhit_dim > 0 {
            branches.push((T::zero(), self.unhit_projector()));
        }
        SpectralObservable::new(self.screen_shape(), branches).expect("blocks partition the screen space")
    }

    /// Σₙ P₁⁽ⁿ⁾⊗Q₂⁽ⁿ⁾ + P₁^⊥⊗Q₂^⊥: the projector that correlates the screen
    /// segment with the particle segment.
    pub fn correlator<T: Real>(&self) -> Projector<T> {
        let composite = self.composite_shape();
        let dim = composite.total_dim();
        let mut m = Matrix::<T>::zeros(dim, dim);
        for n in 0..self.num_segments() {
            m += self
                .segment_projector::<T>(n)
                .tensor(&self.particle_segment_projector::<T>(n))
                .matrix();
        }
        m += self
            .unhit_projector::<T>()
            .tensor(&self.particle_unhit_projector::<T>())
            .matrix();
        Projector::from_parts_unchecked(composite, m)
    }

    /// max |Σₙ Q₂⁽ⁿ⁾ + Q₂^⊥ − 1|
    pub fn particle_completeness_deviation<T: Real>(&self) -> T {
        let dim = self.particle_dim();
        let mut sum = self.particle_unhit_projector::<T>().matrix().clone();
        for n in 0..self.num_segments() {
            sum += self.particle_segment_projector::<T>(n).matrix();
        }
        linalg::max_abs_diff(&sum, &linalg::identity(dim))
    }

    /// Equal amplitudes on every segment block, zero on the unhit block.
    pub fn uniform_screen_ket<T: Real>(&self) -> Ket<T> {
        uniform_over(self.screen_shape(), 0..self.screen_dim() - self.unhit_dim)
    }

    /// Equal amplitudes on every particle segment block, zero on the
    /// not-yet-reached block.
    pub fn uniform_particle_ket<T: Real>(&self) -> Ket<T> {
        uniform_over(self.particle_shape(), 0..self.particle_dim() - self.particle_unhit_dim)
    }

    /// Free flight of the particle: a cyclic shift by one inside every
    /// particle block. Leaves each Q₂⁽ⁿ⁾ and Q₂^⊥ invariant.
    pub fn particle_flight<T: Real>(&self) -> Unitary<T> {
        let mut perm: Vec<usize> = (0..self.particle_dim()).collect();
        let mut blocks: Vec<Range<usize>> =
            (0..self.num_segments()).map(|n| self.particle_segment_range(n)).collect();
        blocks.push(self.particle_unhit_range());
        for r in blocks.into_iter().filter(|r| r.len() > 1) {
            for i in r.clone() {
                perm[i] = r.start + (i - r.start + 1) % r.len();
            }
        }
        Unitary::permutation(self.particle_shape(), &perm).expect("block shifts form a permutation")
    }
}

pub(crate) fn uniform_over<T: Real>(shape: SpaceShape, range: Range<usize>) -> Ket<T> {
    let dim = shape.total_dim();
    let amp = cr(T::one() / T::from_usize(range.len()).unwrap().sqrt());
    let v = crate::algebra::Vector::<T>::from_fn(dim, |i, _| if range.contains(&i) { amp } else { cr(T::zero()) });
    Ket::new(shape, v).expect("uniform amplitudes are normalized")
}
