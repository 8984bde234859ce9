//! Multi-dimensional FFTs over row-major arrays of arbitrary shape.
//!
//! Plans are cached per thread. Transforms are unnormalized; callers apply the
//! `1/len` factor of their chosen convention.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
    static BUFFERS: RefCell<(Vec<Complex64>, Vec<Complex64>)> = const { RefCell::new((Vec::new(), Vec::new())) };
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

/// In-place unnormalized transform along every axis of `shape`.
///
/// Forward uses the kernel `e^{-i k x}`, inverse `e^{+i k x}`.
pub fn transform_nd(data: &mut [Complex64], shape: &[usize], inverse: bool) {
    transform_nd_pruned(data, shape, inverse, None);
}

/// As [`transform_nd`] for input that vanishes outside a box: `support[a][i]`
/// is false when every entry with index `i` along axis `a` is zero.
///
/// Lines that are still identically zero when their axis is reached are skipped.
pub fn transform_nd_pruned(
    data: &mut [Complex64],
    shape: &[usize],
    inverse: bool,
    support: Option<&[Vec<bool>]>,
) {
    let total: usize = shape.iter().product();
    assert_eq!(data.len(), total, "buffer does not match shape");
    if let Some(support) = support {
        assert!(
            support.len() == shape.len() && support.iter().zip(shape).all(|(s, &n)| s.len() == n),
            "support does not match shape"
        );
    }
    if total == 0 {
        return;
    }
    BUFFERS.with(|b| {
        let (gather, scratch) = &mut *b.borrow_mut();
        for axis in 0..shape.len() {
            let len = shape[axis];
            if len == 1 {
                continue;
            }
            let fft = plan(len, inverse);
            let need = fft.get_inplace_scratch_len();
            if scratch.len() < need {
                scratch.resize(need, Complex64::default());
            }
            let scratch = &mut scratch[..need];
            let stride: usize = shape[axis + 1..].iter().product();
            if stride == 1 {
                fft.process_with_scratch(data, scratch);
                continue;
            }
            let lines = active_lines(&shape[axis + 1..], support.map(|s| &s[axis + 1..]));
            let block = len * stride;
            let used = len * lines.len();
            if gather.len() < used {
                gather.resize(used, Complex64::default());
            }
            let gather = &mut gather[..used];
            for chunk in data.chunks_mut(block) {
                // chunk[k * stride + j] -> gather[line * len + k]
                for k in 0..len {
                    let row = &chunk[k * stride..(k + 1) * stride];
                    for (line, &j) in lines.iter().enumerate() {
                        gather[line * len + k] = row[j];
                    }
                }
                fft.process_with_scratch(gather, scratch);
                for k in 0..len {
                    let row = &mut chunk[k * stride..(k + 1) * stride];
                    for (line, &j) in lines.iter().enumerate() {
                        row[j] = gather[line * len + k];
                    }
                }
            }
        }
    });
}

/// Flat indices over `shape` whose every coordinate lies in the support.
fn active_lines(shape: &[usize], support: Option<&[Vec<bool>]>) -> Vec<usize> {
    let total: usize = shape.iter().product();
    let Some(support) = support else {
        return (0..total).collect();
    };
    (0..total)
        .filter(|&flat| {
            let mut rest = flat;
            for a in (0..shape.len()).rev() {
                if !support[a][rest % shape[a]] {
                    return false;
                }
                rest /= shape[a];
            }
            true
        })
        .collect()
}

/// Unnormalized 1-d transform of one buffer.
pub fn transform_1d(data: &mut [Complex64], inverse: bool) {
    if data.len() > 1 {
        plan(data.len(), inverse).process(data);
    }
}
