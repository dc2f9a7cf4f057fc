use crate::error::{Error, Result};

/// A permutation of `0..len` stored by images, with its cycle decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Fails with an integrity error if `images` is not a bijection.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let mut hit = vec![false; images.len()];
        for (i, &j) in images.iter().enumerate() {
            if j >= images.len() || std::mem::replace(&mut hit[j], true) {
                return Err(Error::integrity(format!(
                    "map is not a bijection: index {i} -> {j} collides or escapes"
                )));
            }
        }
        Ok(Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Cycles, each starting at its least index, ordered by that index.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.images[i];
            }
            out.push(cycle);
        }
        out
    }
}
