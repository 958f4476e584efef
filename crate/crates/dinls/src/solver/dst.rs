//! Discrete sine transform pair on the cell-centered mesh.
//!
//! The reduced field v lives on nodes `r_j = (j+1/2)Δr` with odd symmetry at
//! `r = 0` and a Dirichlet wall at `r = R`. The matching orthogonal basis is
//! `sin(k_m r_j)` with `k_m = mπ/R`, `m = 1..M` — a DST-II/DST-III pair. Both
//! directions are evaluated through one complex FFT of length 2M, so complex
//! fields transform without splitting into real and imaginary parts.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct DstPlan {
    len: usize,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
    /// `e^{iπm/(2M)}` for `m = 0..=M`.
    twiddle: Vec<Complex64>,
}

impl DstPlan {
    pub fn new(len: usize) -> Self {
        assert!(len >= 2, "transform length too small");
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(2 * len);
        let ifft = planner.plan_fft_inverse(2 * len);
        let scratch_len = fft
            .get_inplace_scratch_len()
            .max(ifft.get_inplace_scratch_len());
        let twiddle = (0..=len)
            .map(|m| Complex64::from_polar(1.0, std::f64::consts::PI * m as f64 / (2 * len) as f64))
            .collect();
        DstPlan {
            len,
            fft,
            ifft,
            buf: vec![Complex64::default(); 2 * len],
            scratch: vec![Complex64::default(); scratch_len],
            twiddle,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `out[m-1] = Σ_j input[j] sin(πm(2j+1)/(2M))` for `m = 1..M`.
    pub fn forward(&mut self, input: &[Complex64], out: &mut [Complex64]) {
        let m = self.len;
        assert_eq!(input.len(), m);
        assert_eq!(out.len(), m);
        self.buf[..m].copy_from_slice(input);
        self.buf[m..].fill(Complex64::default());
        self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        let half_neg_i = Complex64::new(0.0, -0.5); // 1/(2i)
        for k in 1..=m {
            let plus = self.buf[2 * m - k]; // Σ_j input[j] e^{+iπkj/M}
            let minus = self.buf[k]; //        Σ_j input[j] e^{-iπkj/M}
            out[k - 1] = half_neg_i * (self.twiddle[k] * plus - self.twiddle[k].conj() * minus);
        }
    }

    /// Inverse of [`forward`]:
    /// `out[j] = (2/M) Σ_{m<M} in[m-1] sin(πm(2j+1)/(2M)) + in[M-1]/M · (-1)^j`.
    pub fn inverse(&mut self, input: &[Complex64], out: &mut [Complex64]) {
        let m = self.len;
        assert_eq!(input.len(), m);
        assert_eq!(out.len(), m);
        self.buf.fill(Complex64::default());
        let half_neg_i = Complex64::new(0.0, -0.5);
        for k in 1..=m {
            let scale = if k < m { 2.0 } else { 1.0 } / m as f64;
            let a = input[k - 1] * scale * half_neg_i;
            self.buf[k] += a * self.twiddle[k];
            self.buf[(2 * m - k) % (2 * m)] -= a * self.twiddle[k].conj();
        }
        self.ifft.process_with_scratch(&mut self.buf, &mut self.scratch);
        out.copy_from_slice(&self.buf[..m]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn naive_forward(input: &[Complex64]) -> Vec<Complex64> {
        let m = input.len();
        (1..=m)
            .map(|k| {
                input
                    .iter()
                    .enumerate()
                    .map(|(j, v)| {
                        v * (std::f64::consts::PI * k as f64 * (2 * j + 1) as f64
                            / (2 * m) as f64)
                            .sin()
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn forward_matches_naive_sum() {
        let m = 32;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let input: Vec<Complex64> = (0..m)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut plan = DstPlan::new(m);
        let mut out = vec![Complex64::default(); m];
        plan.forward(&input, &mut out);
        for (fast, slow) in out.iter().zip(naive_forward(&input)) {
            assert!((fast - slow).norm() < 1e-12);
        }
    }

    #[test]
    fn roundtrip_is_identity() {
        let m = 256;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let input: Vec<Complex64> = (0..m)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut plan = DstPlan::new(m);
        let mut hat = vec![Complex64::default(); m];
        let mut back = vec![Complex64::default(); m];
        plan.forward(&input, &mut hat);
        plan.inverse(&hat, &mut back);
        for (a, b) in input.iter().zip(&back) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn pure_mode_is_an_eigenvector() {
        // input[j] = sin(k_5 r_j) must transform to a single spike at m = 5.
        let m = 64;
        let input: Vec<Complex64> = (0..m)
            .map(|j| {
                Complex64::new(
                    (std::f64::consts::PI * 5.0 * (2 * j + 1) as f64 / (2 * m) as f64).sin(),
                    0.0,
                )
            })
            .collect();
        let mut plan = DstPlan::new(m);
        let mut out = vec![Complex64::default(); m];
        plan.forward(&input, &mut out);
        for (idx, v) in out.iter().enumerate() {
            if idx == 4 {
                assert!((v.re - m as f64 / 2.0).abs() < 1e-10);
            } else {
                assert!(v.norm() < 1e-10, "leak at {idx}: {v}");
            }
        }
    }
}
