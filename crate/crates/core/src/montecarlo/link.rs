use num_complex::Complex64;
use rand::Rng;

use super::channel::{ChannelRealization, SelectionResult};
use super::modem::Modem;
use super::rng::GaussianSource;
use super::sim::Code;

/// Alamouti G2 code matrix; rows are time slots, columns transmit antennas.
pub fn alamouti_encode(x1: Complex64, x2: Complex64) -> [[Complex64; 2]; 2] {
    [[x1, x2], [-x2.conj(), x1.conj()]]
}

/// Matrix-level link `R = √λ · G · H_s + Z` with `λ = μ / N_s`, where
/// `H_s[k][n] = h_sel[k] · g_sel[n]`, followed by OSTBC matched-filter
/// combining and per-symbol minimum-distance detection.
#[derive(Debug, Clone)]
pub struct Link {
    modem: Modem,
    code: Code,
    sqrt_lambda: f64,
}

impl Link {
    pub fn new(modem: Modem, code: Code, mu: f64, n_s: usize) -> Self {
        Self { modem, code, sqrt_lambda: (mu / n_s as f64).sqrt() }
    }

    pub fn modem(&self) -> &Modem {
        &self.modem
    }

    /// Symbols per code block (τ).
    pub fn block_symbols(&self) -> usize {
        match self.code {
            Code::AlamoutiG2 => 2,
            _ => 1,
        }
    }

    /// Channel uses per code block (N_c).
    pub fn block_uses(&self) -> usize {
        self.block_symbols()
    }

    fn code_matrix(&self, symbols: &[usize]) -> Vec<[Complex64; 2]> {
        match self.code {
            Code::AlamoutiG2 => {
                let g = alamouti_encode(self.modem.point(symbols[0]), self.modem.point(symbols[1]));
                g.to_vec()
            }
            _ => vec![[self.modem.point(symbols[0]), Complex64::new(0.0, 0.0)]],
        }
    }

    /// Received block, row-major `[time][selected rx antenna]`, for the given
    /// additive noise (same layout).
    pub fn receive(
        &self,
        ch: &ChannelRealization,
        sel: &SelectionResult,
        symbols: &[usize],
        noise: &[Complex64],
    ) -> Vec<Complex64> {
        let g = self.code_matrix(symbols);
        let n_s = sel.rx_indices.len();
        let mut out = Vec::with_capacity(g.len() * n_s);
        for (t, row) in g.iter().enumerate() {
            for (j, &rx) in sel.rx_indices.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &tx) in sel.tx_indices.iter().enumerate() {
                    acc += row[k] * ch.h[tx] * ch.g[rx];
                }
                out.push(acc * self.sqrt_lambda + noise[t * n_s + j]);
            }
        }
        out
    }

    /// Matched-filter outputs, one per symbol, each equal to
    /// `√λ·Θ·x + w` with `w ~ CN(0, Θ)`; returns them with the gain `√λ·Θ`.
    pub fn combine(&self, ch: &ChannelRealization, sel: &SelectionResult, r: &[Complex64]) -> (Vec<Complex64>, f64) {
        let n_s = sel.rx_indices.len();
        let gain = self.sqrt_lambda * sel.theta;
        let entry = |k: usize, j: usize| ch.h[sel.tx_indices[k]] * ch.g[sel.rx_indices[j]];
        match self.code {
            Code::AlamoutiG2 => {
                let (mut y1, mut y2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                for j in 0..n_s {
                    let (h0, h1) = (entry(0, j), entry(1, j));
                    let (r0, r1) = (r[j], r[n_s + j]);
                    y1 += h0.conj() * r0 + h1 * r1.conj();
                    y2 += h1.conj() * r0 - h0 * r1.conj();
                }
                (vec![y1, y2], gain)
            }
            _ => {
                let y = (0..n_s).map(|j| entry(0, j).conj() * r[j]).sum();
                (vec![y], gain)
            }
        }
    }

    /// Sends one block over `ch` with fresh CN(0,1) noise and returns the
    /// detected symbol indices.
    pub fn transmit_and_detect<R: Rng>(
        &self,
        ch: &ChannelRealization,
        sel: &SelectionResult,
        symbols: &[usize],
        source: &mut GaussianSource<R>,
    ) -> Vec<usize> {
        let n = self.block_uses() * sel.rx_indices.len();
        let noise: Vec<Complex64> = (0..n).map(|_| source.complex_unit()).collect();
        let r = self.receive(ch, sel, symbols, &noise);
        let (y, gain) = self.combine(ch, sel, &r);
        y.into_iter().map(|v| self.modem.detect(v, gain)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::Constellation;
    use crate::montecarlo::channel::{sample_channel, select_antennas};
    use crate::montecarlo::rng::{substream, Purpose};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn alamouti_matrix_layout() {
        let g = alamouti_encode(c(1.0, 0.0), c(1.0, 0.0));
        assert_eq!(g, [[c(1.0, 0.0), c(1.0, 0.0)], [c(-1.0, 0.0), c(1.0, 0.0)]]);
        let z = alamouti_encode(c(0.0, 0.0), c(0.0, 0.0));
        assert!(z.iter().flatten().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn alamouti_columns_orthogonal() {
        let mut src = GaussianSource::new(substream(5, Purpose::Generic, 0));
        for _ in 0..200 {
            let (x1, x2) = (src.complex_unit(), src.complex_unit());
            let g = alamouti_encode(x1, x2);
            let e = x1.norm_sqr() + x2.norm_sqr();
            // (Gᴴ G)[i][j] = Σ_t conj(G[t][i]) G[t][j]
            for i in 0..2 {
                for j in 0..2 {
                    let v: Complex64 = (0..2).map(|t| g[t][i].conj() * g[t][j]).sum();
                    let want = if i == j { e } else { 0.0 };
                    assert!((v - c(want, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn noiseless_link_detects_perfectly() {
        let mut src = GaussianSource::new(substream(6, Purpose::Generic, 0));
        for (code, k_s) in [(Code::AlamoutiG2, 2), (Code::UncodedSingle, 1)] {
            for c in [Constellation::psk(8).unwrap(), Constellation::qam(16).unwrap()] {
                let link = Link::new(Modem::new(c), code, 3.0, 2);
                for _ in 0..300 {
                    let ch = sample_channel(3, 3, &mut src);
                    let sel = select_antennas(&ch, k_s, 2);
                    let syms: Vec<usize> =
                        (0..link.block_symbols()).map(|_| src.uniform_index(c.order() as usize)).collect();
                    let noise = vec![Complex64::new(0.0, 0.0); link.block_uses() * 2];
                    let r = link.receive(&ch, &sel, &syms, &noise);
                    let (y, gain) = link.combine(&ch, &sel, &r);
                    let det: Vec<usize> = y.iter().map(|&v| link.modem().detect(v, gain)).collect();
                    assert_eq!(det, syms);
                    for (v, &s) in y.iter().zip(&syms) {
                        assert!((v - link.modem().point(s) * gain).norm() < 1e-9 * gain.max(1.0));
                    }
                }
            }
        }
    }
}
