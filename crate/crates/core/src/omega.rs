//! Coin-flip words ω driving the random map.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Where the symbols of ω come from.
#[derive(Debug, Clone)]
pub enum OmegaSource {
    /// The same symbol forever (all ones reproduces the greedy map).
    Constant(u8),
    /// `w w w ...`
    Periodic(Vec<u8>),
    /// A finite prefix; reading past it is an error.
    Finite(Vec<u8>),
    /// Fair coin flips from a seeded generator.
    Random(Box<ChaCha8Rng>),
}

/// A lazily generated binary word with the symbols handed out so far
/// recorded.
#[derive(Debug, Clone)]
pub struct Omega {
    source: OmegaSource,
    consumed: Vec<u8>,
}

impl Omega {
    pub fn new(source: OmegaSource) -> Self {
        Omega { source, consumed: Vec::new() }
    }

    pub fn constant(bit: u8) -> Self {
        Omega::new(OmegaSource::Constant(bit & 1))
    }

    pub fn periodic(word: &[u8]) -> Self {
        assert!(!word.is_empty(), "periodic word must be nonempty");
        Omega::new(OmegaSource::Periodic(word.iter().map(|b| b & 1).collect()))
    }

    pub fn finite(word: &[u8]) -> Self {
        Omega::new(OmegaSource::Finite(word.iter().map(|b| b & 1).collect()))
    }

    pub fn seeded(seed: u64) -> Self {
        Omega::new(OmegaSource::Random(Box::new(ChaCha8Rng::seed_from_u64(seed))))
    }

    /// Independent stream `stream` of the generator seeded with `seed`.
    pub fn split(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Omega::new(OmegaSource::Random(Box::new(rng)))
    }

    /// Symbols consumed so far, in order.
    pub fn consumed(&self) -> &[u8] {
        &self.consumed
    }

    pub fn position(&self) -> usize {
        self.consumed.len()
    }

    /// Symbol at 0-based position `i`, generating (and recording) as needed.
    pub fn peek_at(&mut self, i: usize) -> Result<u8> {
        while self.consumed.len() <= i {
            let b = self.generate()?;
            self.consumed.push(b);
        }
        Ok(self.consumed[i])
    }

    fn generate(&mut self) -> Result<u8> {
        let n = self.consumed.len();
        match &mut self.source {
            OmegaSource::Constant(b) => Ok(*b),
            OmegaSource::Periodic(w) => Ok(w[n % w.len()]),
            OmegaSource::Finite(w) => w.get(n).copied().ok_or(Error::OmegaExhausted(w.len())),
            OmegaSource::Random(rng) => Ok(rng.random::<bool>() as u8),
        }
    }
}

/// A cursor into an [`Omega`]: the random map shifts ω one place per
/// symbol it uses, while the underlying word stays available for
/// functions that look further ahead (the asymmetric ball formula reads
/// `ω_k` directly).
#[derive(Debug, Clone)]
pub struct OmegaCursor {
    word: Omega,
    pos: usize,
}

impl OmegaCursor {
    pub fn new(word: Omega) -> Self {
        OmegaCursor { word, pos: 0 }
    }

    pub fn next_symbol(&mut self) -> Result<u8> {
        let b = self.word.peek_at(self.pos)?;
        self.pos += 1;
        Ok(b)
    }

    /// Number of symbols shifted off so far.
    pub fn used(&self) -> usize {
        self.pos
    }

    /// `ω_i`, 1-based, independent of the cursor position.
    pub fn symbol(&mut self, i: usize) -> Result<u8> {
        self.word.peek_at(i - 1)
    }

    pub fn word(&self) -> &Omega {
        &self.word
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_and_finite() {
        let mut c = OmegaCursor::new(Omega::periodic(&[1, 0]));
        let got: Vec<u8> = (0..5).map(|_| c.next_symbol().unwrap()).collect();
        assert_eq!(got, [1, 0, 1, 0, 1]);
        let mut f = OmegaCursor::new(Omega::finite(&[1]));
        assert_eq!(f.next_symbol(), Ok(1));
        assert_eq!(f.next_symbol(), Err(Error::OmegaExhausted(1)));
    }

    #[test]
    fn seeded_streams_reproduce() {
        let mut a = Omega::split(9, 3);
        let mut b = Omega::split(9, 3);
        let mut c = Omega::split(9, 4);
        let wa: Vec<u8> = (0..64).map(|i| a.peek_at(i).unwrap()).collect();
        let wb: Vec<u8> = (0..64).map(|i| b.peek_at(i).unwrap()).collect();
        let wc: Vec<u8> = (0..64).map(|i| c.peek_at(i).unwrap()).collect();
        assert_eq!(wa, wb);
        assert_ne!(wa, wc);
    }
}
