use num_complex::Complex64;

use crate::analytic::{Constellation, Modulation};

/// Binary-reflected Gray code.
pub fn gray(i: u32) -> u32 {
    i ^ (i >> 1)
}

/// Unit-average-energy constellation with Gray bit labels and a
/// minimum-distance detector.
#[derive(Debug, Clone)]
pub struct Modem {
    constellation: Constellation,
    points: Vec<Complex64>,
    labels: Vec<u32>,
}

impl Modem {
    pub fn new(constellation: Constellation) -> Self {
        let m = constellation.order();
        let (points, labels) = match constellation.modulation() {
            Modulation::Psk => (0..m)
                .map(|i| {
                    let phase = 2.0 * std::f64::consts::PI * f64::from(i) / f64::from(m);
                    (Complex64::from_polar(1.0, phase), gray(i))
                })
                .unzip(),
            Modulation::Qam => {
                let side = constellation.side();
                let half_bits = constellation.bits_per_symbol() / 2;
                let scale = (1.5 / (f64::from(m) - 1.0)).sqrt();
                let level = |i: u32| (2.0 * f64::from(i) - f64::from(side) + 1.0) * scale;
                (0..m)
                    .map(|p| {
                        let (i, q) = (p / side, p % side);
                        (Complex64::new(level(i), level(q)), (gray(i) << half_bits) | gray(q))
                    })
                    .unzip()
            }
        };
        Self { constellation, points, labels }
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Complex64 {
        self.points[index]
    }

    pub fn label(&self, index: usize) -> u32 {
        self.labels[index]
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    /// Index minimizing `|y - gain·x|²`. With zero gain every point ties and
    /// index 0 is returned.
    pub fn detect(&self, y: Complex64, gain: f64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, &x) in self.points.iter().enumerate() {
            let d = (y - x * gain).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Number of label bits that differ between two symbol indices.
    pub fn bit_errors(&self, sent: usize, detected: usize) -> u32 {
        (self.labels[sent] ^ self.labels[detected]).count_ones()
    }
}
