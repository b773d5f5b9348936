//! Benchmark fixtures shared by the criterion targets.

use equiproj::{GroupSpec, Result};

/// Grid sides timed by default. The SVD route at side 8 factors a
/// 4096×4096 matrix and takes tens of seconds per sample, so criterion
/// times it only up to side 6; `equiproj bench-decomp` covers the rest.
pub const GRID_SIDES: [usize; 3] = [4, 6, 8];

/// `C₄` acting on both input and output `k × k` grids.
pub fn grid_to_grid(k: usize) -> Result<GroupSpec> {
    Ok(GroupSpec::cyclic_grid(k, 4)?.equivariant())
}
