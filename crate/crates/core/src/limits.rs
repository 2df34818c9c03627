/// Capacity limits shared by the exact and Monte Carlo backends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of Boolean variables for model enumeration.
    pub max_booleans: usize,
    /// Maximum number of Boolean variables for which a weight table is materialized.
    pub max_table_booleans: usize,
    /// Maximum number of distinct real atoms in one decomposition.
    pub max_atoms: usize,
    /// Maximum number of constraint subsets tried during vertex enumeration.
    pub max_vertex_subsets: u64,
    /// Highest dimension the exact triangulation accepts.
    pub max_exact_dim: usize,
    /// Highest total polynomial degree the exact integrator accepts.
    pub max_exact_degree: u32,
    /// Maximum number of grid cells visited by the Riemann oracle.
    pub max_oracle_cells: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_booleans: 24,
            max_table_booleans: 20,
            max_atoms: 20,
            max_vertex_subsets: 1_000_000,
            max_exact_dim: 3,
            max_exact_degree: 8,
            max_oracle_cells: 100_000_000,
        }
    }
}
