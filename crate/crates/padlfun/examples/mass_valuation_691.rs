//! Newton-polygon denominator prediction at the large irregular prime
//! 691: the branch of 12 carries the zero behind the [691, 1] entry of
//! the k = 8 mass-table row. Slow (Bernoulli numbers up to index ~3500),
//! so it lives here rather than in the test suite:
//!
//! ```text
//! cargo run --release -p padlfun --example mass_valuation_691
//! ```

use padlfun::mass::p_regular_mass_valuation;
use padlfun::measures::SeriesParams;
use std::time::Instant;

fn main() {
    let t = Instant::now();
    let r = p_regular_mass_valuation(8, 691, SeriesParams::new(3, 3)).unwrap();
    println!(
        "p=691 k=8: predicted {} actual {} matched {} ({:.2?})",
        r.predicted,
        r.actual,
        r.matched,
        t.elapsed()
    );
}
