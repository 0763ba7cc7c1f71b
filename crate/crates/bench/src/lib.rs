//! Empty library target; this package exists only to host the criterion
//! benchmarks under `benches/`.
