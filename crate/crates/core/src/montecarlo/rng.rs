use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Separates the substream families of different experiments sharing a seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    SymbolErrors = 1,
    FastSymbolErrors = 2,
    Theta = 3,
    Capacity = 4,
    Generic = 5,
}

/// Independent deterministic stream number `index` of family `purpose`.
pub fn substream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    key[16..24].copy_from_slice(b"ostbc-af");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Standard normal variates by the polar Box–Muller method.
#[derive(Debug, Clone)]
pub struct GaussianSource<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: Rng> GaussianSource<R> {
    pub fn new(rng: R) -> Self {
        Self { rng, spare: None }
    }

    pub fn standard(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.rng.gen::<f64>() - 1.0;
            let v = 2.0 * self.rng.gen::<f64>() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }

    /// Circularly-symmetric complex Gaussian with unit total variance.
    pub fn complex_unit(&mut self) -> Complex64 {
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        Complex64::new(self.standard() * scale, self.standard() * scale)
    }

    pub fn uniform_index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }
}
