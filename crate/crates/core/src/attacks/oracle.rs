use std::sync::atomic::{AtomicUsize, Ordering};

use crate::imaging::Image;
use crate::pipeline::{BinaryHash, Pipeline, PipelineError};

/// Black-box access to a hash function. Attacks see nothing else.
pub trait HashOracle: Sync {
    fn query(&self, img: &Image) -> Result<BinaryHash, PipelineError>;
}

impl<F> HashOracle for F
where
    F: Fn(&Image) -> BinaryHash + Sync,
{
    fn query(&self, img: &Image) -> Result<BinaryHash, PipelineError> {
        Ok(self(img))
    }
}

impl HashOracle for Pipeline {
    fn query(&self, img: &Image) -> Result<BinaryHash, PipelineError> {
        self.hash_image(img)
    }
}

/// Wraps an oracle and counts queries.
pub struct CountingOracle<'a, O: ?Sized> {
    inner: &'a O,
    queries: AtomicUsize,
}

impl<'a, O: HashOracle + ?Sized> CountingOracle<'a, O> {
    pub fn new(inner: &'a O) -> Self {
        Self {
            inner,
            queries: AtomicUsize::new(0),
        }
    }

    pub fn queries(&self) -> usize {
        self.queries.load(Ordering::Relaxed)
    }
}

impl<O: HashOracle + ?Sized> HashOracle for CountingOracle<'_, O> {
    fn query(&self, img: &Image) -> Result<BinaryHash, PipelineError> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.inner.query(img)
    }
}
