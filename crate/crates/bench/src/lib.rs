//! Shared inputs for the criterion benches.

use sieve_core::simulation::{DataStream, Noise, TargetFunction, XDist};

/// `n` draws from the second example's data model.
pub fn sine_series_sample(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut stream = DataStream::new(
        TargetFunction::SineSeries50,
        XDist::Uniform01,
        Noise::StdNormal,
        1,
        seed,
    )
    .expect("valid stream");
    let mut x = [0.0];
    (0..n)
        .map(|_| {
            let y = stream.next_into(&mut x);
            (x[0], y)
        })
        .collect()
}
