use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::EdgeId;

/// Dense complex tensor in row-major order.
///
/// Axes are labeled by the network edges they correspond to; the label list
/// doubles as the dope vector describing the memory layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    axes: Vec<EdgeId>,
    extents: Vec<u64>,
    data: Vec<Complex64>,
}

impl DenseTensor {
    pub fn new(axes: Vec<EdgeId>, extents: Vec<u64>, data: Vec<Complex64>) -> Result<Self> {
        if axes.len() != extents.len() {
            return Err(Error::ShapeMismatch {
                vertex: String::new(),
                reason: format!("{} axes but {} extents", axes.len(), extents.len()),
            });
        }
        let mut seen = axes.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != axes.len() {
            return Err(Error::ShapeMismatch {
                vertex: String::new(),
                reason: "duplicate axis label".into(),
            });
        }
        let expect = extents.iter().product::<u64>() as usize;
        if data.len() != expect {
            return Err(Error::ShapeMismatch {
                vertex: String::new(),
                reason: format!("{} entries but extents require {expect}", data.len()),
            });
        }
        Ok(DenseTensor { axes, extents, data })
    }

    pub fn scalar(value: Complex64) -> Self {
        DenseTensor { axes: Vec::new(), extents: Vec::new(), data: vec![value] }
    }

    /// Standard complex Gaussian entries, deterministic for a given rng state.
    pub fn random<R: Rng>(axes: Vec<EdgeId>, extents: Vec<u64>, rng: &mut R) -> Result<Self> {
        let len = extents.iter().product::<u64>() as usize;
        let data = (0..len)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        DenseTensor::new(axes, extents, data)
    }

    pub fn rank(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[EdgeId] {
        &self.axes
    }

    pub fn extents(&self) -> &[u64] {
        &self.extents
    }

    pub fn extent_of(&self, axis: EdgeId) -> Option<u64> {
        self.axes.iter().position(|&a| a == axis).map(|i| self.extents[i])
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Number of stored entries.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_scalar(&self) -> Option<Complex64> {
        if self.axes.is_empty() {
            Some(self.data[0])
        } else {
            None
        }
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.extents.len()];
        for i in (0..self.extents.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.extents[i + 1] as usize;
        }
        strides
    }

    pub fn get(&self, index: &[u64]) -> Complex64 {
        debug_assert_eq!(index.len(), self.axes.len());
        let strides = self.strides();
        let mut flat = 0usize;
        for (k, &i) in index.iter().enumerate() {
            flat += i as usize * strides[k];
        }
        self.data[flat]
    }

    /// Reorder axes to `order` (a permutation of this tensor's axes),
    /// copying into a fresh row-major buffer.
    pub fn permuted(&self, order: &[EdgeId]) -> Result<Self> {
        if order.len() != self.axes.len() {
            return Err(Error::ShapeMismatch {
                vertex: String::new(),
                reason: "permutation length mismatch".into(),
            });
        }
        let perm: Vec<usize> = order
            .iter()
            .map(|a| {
                self.axes
                    .iter()
                    .position(|b| b == a)
                    .ok_or_else(|| Error::ShapeMismatch {
                        vertex: String::new(),
                        reason: format!("axis e{} not present", a.index()),
                    })
            })
            .collect::<Result<_>>()?;
        if order == self.axes {
            return Ok(self.clone());
        }
        let new_extents: Vec<u64> = perm.iter().map(|&p| self.extents[p]).collect();
        let old_strides = self.strides();
        let mut data = vec![Complex64::default(); self.data.len()];
        let mut index = vec![0u64; order.len()];
        for slot in data.iter_mut() {
            let mut flat = 0usize;
            for (k, &i) in index.iter().enumerate() {
                flat += i as usize * old_strides[perm[k]];
            }
            *slot = self.data[flat];
            for k in (0..index.len()).rev() {
                index[k] += 1;
                if index[k] < new_extents[k] {
                    break;
                }
                index[k] = 0;
            }
        }
        Ok(DenseTensor { axes: order.to_vec(), extents: new_extents, data })
    }

    /// Fix `axis` to `value`, dropping the axis (a slab of the tensor).
    pub fn sliced(&self, axis: EdgeId, value: u64) -> Result<Self> {
        let pos = self
            .axes
            .iter()
            .position(|&a| a == axis)
            .ok_or_else(|| Error::ShapeMismatch {
                vertex: String::new(),
                reason: format!("axis e{} not present", axis.index()),
            })?;
        let strides = self.strides();
        let mut axes = self.axes.clone();
        let mut extents = self.extents.clone();
        axes.remove(pos);
        extents.remove(pos);
        let len: usize = extents.iter().product::<u64>() as usize;
        let mut data = Vec::with_capacity(len);
        let mut index = vec![0u64; axes.len()];
        let rem_strides: Vec<usize> =
            (0..self.axes.len()).filter(|&k| k != pos).map(|k| strides[k]).collect();
        for _ in 0..len {
            let mut flat = value as usize * strides[pos];
            for (k, &i) in index.iter().enumerate() {
                flat += i as usize * rem_strides[k];
            }
            data.push(self.data[flat]);
            for k in (0..index.len()).rev() {
                index[k] += 1;
                if index[k] < extents[k] {
                    break;
                }
                index[k] = 0;
            }
        }
        DenseTensor::new(axes, extents, data)
    }
}

/// Odometer over a list of extents, yielding every multi-index in row-major order.
pub(crate) fn multi_indices(extents: &[u64]) -> impl Iterator<Item = Vec<u64>> + '_ {
    let total: u128 = extents.iter().map(|&d| d as u128).product();
    let mut index = vec![0u64; extents.len()];
    let mut emitted: u128 = 0;
    std::iter::from_fn(move || {
        if emitted >= total {
            return None;
        }
        let out = index.clone();
        emitted += 1;
        for k in (0..index.len()).rev() {
            index[k] += 1;
            if index[k] < extents[k] {
                break;
            }
            index[k] = 0;
        }
        Some(out)
    })
}
