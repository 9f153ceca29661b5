//! Thin wrappers around `rustfft` shared by spectral differentiation and the
//! circulant prior sampler. Plans are cached per thread.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::cell::RefCell;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place forward DFT, unnormalized: `out[m] = Σ_j in[j]·exp(-2πi·mj/n)`.
pub(crate) fn forward(data: &mut [Complex64]) {
    PLANNER.with(|p| {
        let plan = p.borrow_mut().plan_fft_forward(data.len());
        plan.process(data);
    });
}

/// In-place inverse DFT, unnormalized: `out[j] = Σ_m in[m]·exp(+2πi·mj/n)`.
/// Divide by `n` to invert [`forward`].
pub(crate) fn inverse(data: &mut [Complex64]) {
    PLANNER.with(|p| {
        let plan = p.borrow_mut().plan_fft_inverse(data.len());
        plan.process(data);
    });
}
