//! Node-only Adams–Bashforth–Moulton stepping for constant-lag DDEs.

use std::collections::VecDeque;

use super::IntegrationError;
use crate::scalar::Scalar;

const AB: [&[f64]; 4] = [
    &[1.0],
    &[3.0 / 2.0, -1.0 / 2.0],
    &[23.0 / 12.0, -16.0 / 12.0, 5.0 / 12.0],
    &[55.0 / 24.0, -59.0 / 24.0, 37.0 / 24.0, -9.0 / 24.0],
];

// First weight multiplies the predicted derivative at the new node.
const AM: [&[f64]; 3] = [
    &[1.0 / 2.0, 1.0 / 2.0],
    &[5.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0],
    &[9.0 / 24.0, 19.0 / 24.0, -5.0 / 24.0, 1.0 / 24.0],
];

/// Multiples of the lag at which the derivative memory is discarded.
const RESTARTS: usize = 4;

/// Integrates `x' = f(x(t), x(t - lag·h))` for `n` steps.
///
/// Before `t = 0` the delayed argument is the constant `history`. `check`
/// is applied to every new node.
pub(super) fn integrate<T, const N: usize, F, C>(
    x0: [T; N],
    history: [T; N],
    lag: usize,
    n: usize,
    h: T,
    f: F,
    check: C,
) -> Result<Vec<[T; N]>, IntegrationError>
where
    T: Scalar,
    F: Fn(&[T; N], &[T; N]) -> [T; N],
    C: Fn(usize, &[T; N]) -> Result<(), IntegrationError>,
{
    let ab: Vec<Vec<T>> = AB.iter().map(|c| c.iter().map(|v| T::of(*v)).collect()).collect();
    let am: Vec<Vec<T>> = AM.iter().map(|c| c.iter().map(|v| T::of(*v)).collect()).collect();

    let mut nodes: Vec<[T; N]> = Vec::with_capacity(n + 1);
    nodes.push(x0);
    // Most recent derivative first.
    let mut memory: VecDeque<[T; N]> = VecDeque::with_capacity(4);
    memory.push_front(f(&x0, &history));

    let delayed = |nodes: &[[T; N]], k: usize| -> [T; N] {
        if k >= lag {
            nodes[k - lag]
        } else {
            history
        }
    };

    for k in 0..n {
        if k > 0 && k % lag == 0 && k / lag < RESTARTS {
            let current = memory[0];
            memory.clear();
            memory.push_front(current);
        }
        let x = nodes[k];
        let order = memory.len();

        let mut predicted = x;
        for (w, d) in ab[order - 1].iter().zip(memory.iter()) {
            for c in 0..N {
                predicted[c] = predicted[c] + h * *w * d[c];
            }
        }
        let delayed_next = delayed(&nodes, k + 1);
        let f_pred = f(&predicted, &delayed_next);

        let weights = &am[order.min(3) - 1];
        let mut corrected = x;
        for c in 0..N {
            let mut acc = weights[0] * f_pred[c];
            for (w, d) in weights[1..].iter().zip(memory.iter()) {
                acc = acc + *w * d[c];
            }
            corrected[c] = corrected[c] + h * acc;
        }
        check(k + 1, &corrected)?;
        nodes.push(corrected);

        memory.push_front(f(&corrected, &delayed_next));
        memory.truncate(4);
    }
    Ok(nodes)
}
