//! 3D complex FFT on cubic arrays, built from cached 1D plans.
//!
//! Transforms are unnormalized: `forward` computes
//! `sum_x f(x) exp(-2*pi*i m.x / n)` and `inverse` the conjugate sign.
//! Lanes along each axis are independent, so they run in parallel without
//! affecting determinism.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((n, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(n)
            } else {
                planner.plan_fft_inverse(n)
            }
        })
        .clone()
}

/// In-place 3D FFT over a contiguous `n^3` buffer in row-major order
/// (axis 2 fastest).
pub(crate) fn fft3(buf: &mut [Complex64], n: usize, forward: bool) {
    assert_eq!(buf.len(), n * n * n);
    let fft = plan(n, forward);
    let scratch_len = fft.get_inplace_scratch_len();

    // Axis 2: contiguous lanes.
    buf.par_chunks_mut(n).for_each_init(
        || vec![Complex64::default(); scratch_len],
        |scratch, lane| fft.process_with_scratch(lane, scratch),
    );

    // Axis 1: lanes start at plane*n*n + col, stride n.
    {
        let planes: Vec<usize> = (0..n).collect();
        let buf_ptr = SyncPtr(buf.as_mut_ptr());
        planes.par_iter().for_each_init(
            || {
                (
                    vec![Complex64::default(); scratch_len],
                    vec![Complex64::default(); n],
                )
            },
            |(scratch, lane), &plane| {
                let base_plane = plane * n * n;
                for col in 0..n {
                    let p = buf_ptr;
                    // Disjoint lanes per (plane, col); sound to write through
                    // the shared pointer.
                    unsafe {
                        for (i, slot) in lane.iter_mut().enumerate() {
                            *slot = *p.0.add(base_plane + col + i * n);
                        }
                        fft.process_with_scratch(lane, scratch);
                        for (i, slot) in lane.iter().enumerate() {
                            *p.0.add(base_plane + col + i * n) = *slot;
                        }
                    }
                }
            },
        );
    }

    // Axis 0: lanes start at row*n + col, stride n*n.
    {
        let rows: Vec<usize> = (0..n).collect();
        let buf_ptr = SyncPtr(buf.as_mut_ptr());
        rows.par_iter().for_each_init(
            || {
                (
                    vec![Complex64::default(); scratch_len],
                    vec![Complex64::default(); n],
                )
            },
            |(scratch, lane), &row| {
                let stride = n * n;
                for col in 0..n {
                    let p = buf_ptr;
                    unsafe {
                        for (i, slot) in lane.iter_mut().enumerate() {
                            *slot = *p.0.add(row * n + col + i * stride);
                        }
                        fft.process_with_scratch(lane, scratch);
                        for (i, slot) in lane.iter().enumerate() {
                            *p.0.add(row * n + col + i * stride) = *slot;
                        }
                    }
                }
            },
        );
    }
}

#[derive(Clone, Copy)]
struct SyncPtr(*mut Complex64);
unsafe impl Send for SyncPtr {}
unsafe impl Sync for SyncPtr {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let n = 8;
        let mut data: Vec<Complex64> = (0..n * n * n)
            .map(|i| Complex64::new((i % 7) as f64 - 3.0, (i % 3) as f64))
            .collect();
        let orig = data.clone();
        fft3(&mut data, n, true);
        fft3(&mut data, n, false);
        let scale = (n * n * n) as f64;
        for (a, b) in data.iter().zip(&orig) {
            assert!((a / scale - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_mode_inverse() {
        // coefficient 1 at mode (1,0,0) -> exp(i x) samples along axis 0
        let n = 8;
        let mut data = vec![Complex64::default(); n * n * n];
        data[n * n] = Complex64::new(1.0, 0.0); // index (1,0,0)
        fft3(&mut data, n, false);
        let h = 2.0 * std::f64::consts::PI / n as f64;
        for i in 0..n {
            let want = Complex64::from_polar(1.0, h * i as f64);
            let got = data[i * n * n];
            assert!((got - want).norm() < 1e-12);
        }
    }
}
