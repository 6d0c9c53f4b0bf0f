use num_complex::Complex64;
use rand::Rng;

use super::rng::GaussianSource;

/// Source→relay gains `h` (length K) and relay→destination gains `g`
/// (length N). The effective K×N channel is their outer product and is never
/// stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: Vec<Complex64>,
    pub g: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn zeros(k: usize, n: usize) -> Self {
        Self { h: vec![Complex64::new(0.0, 0.0); k], g: vec![Complex64::new(0.0, 0.0); n] }
    }

    /// Redraw in place.
    pub fn resample<R: Rng>(&mut self, source: &mut GaussianSource<R>) {
        for z in self.h.iter_mut().chain(self.g.iter_mut()) {
            *z = source.complex_unit();
        }
    }
}

/// Fresh i.i.d. CN(0, 1) draw for every entry of `h` and `g`.
pub fn sample_channel<R: Rng>(k: usize, n: usize, source: &mut GaussianSource<R>) -> ChannelRealization {
    let mut ch = ChannelRealization::zeros(k, n);
    ch.resample(source);
    ch
}

/// Selected antenna indices and the resulting gains.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub tx_indices: Vec<usize>,
    pub rx_indices: Vec<usize>,
    /// ‖h_s‖²
    pub a: f64,
    /// ‖g_s‖²
    pub b: f64,
    /// A·B
    pub theta: f64,
}

fn strongest(v: &[Complex64], count: usize) -> (Vec<usize>, f64) {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    // Stable sort keeps the lower index first among equal gains.
    idx.sort_by(|&i, &j| v[j].norm_sqr().partial_cmp(&v[i].norm_sqr()).unwrap());
    idx.truncate(count);
    let energy = idx.iter().map(|&i| v[i].norm_sqr()).sum();
    (idx, energy)
}

/// Picks the `k_s` strongest source antennas and `n_s` strongest
/// destination antennas, ties broken toward the lowest index.
pub fn select_antennas(ch: &ChannelRealization, k_s: usize, n_s: usize) -> SelectionResult {
    let (tx_indices, a) = strongest(&ch.h, k_s);
    let (rx_indices, b) = strongest(&ch.g, n_s);
    SelectionResult { tx_indices, rx_indices, a, b, theta: a * b }
}
