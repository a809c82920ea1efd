//! Fixtures shared by the benchmarks.

use middleconv::{enumerate_rigid, SpectralType};

/// All rigid tuples of order at most `n`.
pub fn rigid_up_to(n: u32) -> Vec<SpectralType> {
    (2..=n)
        .flat_map(|k| enumerate_rigid(k).expect("small orders").items)
        .map(|c| c.into_type())
        .collect()
}

/// A handful of tuples covering all three reduction verdicts.
pub fn mixed_tuples() -> Vec<SpectralType> {
    [
        "411,411,42,33",
        "211,211,1111",
        "211,211,211,31",
        "22,22,1111",
        "3333321,666,99",
        "33,222,111111",
    ]
    .iter()
    .map(|s| SpectralType::parse(s).expect("fixture parses"))
    .collect()
}
